#!/usr/bin/env python3
"""Regenerate the committed fixture corpora under fixtures/.

Two corpora:

* ghana/   — large synthetic corpus shaped like the published merge run:
             Scopus 4,999 + ScienceDirect 670 + Web of Science 638, with
             exactly 496 cross-Elsevier shared record IDs, 277 DOI
             duplicates against the merged survivors, and 7 title variants
             that differ only in case/punctuation. All abstracts are
             English, so the cleaning cascade ends at 5,527 records.
* demo/    — small hand-authored corpus covering every surface: all four
             sources, scripted duplicate structure, two French abstracts,
             title-only Scholar records, CSV-quoting hazards, the
             N-vs-nitrogen title pair, and a curated relevant list.

Deterministic: running this script twice produces identical bytes.
"""

from __future__ import annotations

import json
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent / "fixtures"

CROPS = ["maize", "rice", "sorghum", "millet", "cowpea", "groundnut", "cassava", "yam"]
NUTRIENTS = ["nitrogen", "phosphorus", "potassium", "compost", "manure", "urea", "NPK"]

RELEVANT_ABSTRACT = (
    "Fertilizer application in Ghana raised the grain yield of {crop} by a "
    "measurable margin across {n} cropping seasons."
)
NEUTRAL_ABSTRACT = (
    "The paper reviews {topic} methods and gives an overview of calibration "
    "practice for the instruments involved in the survey."
)
TOPICS = ["remote sensing", "irrigation scheduling", "market analysis", "soil mapping"]


def write_jsonl(path: Path, rows: list[dict]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as handle:
        for row in rows:
            handle.write(json.dumps(row, ensure_ascii=False) + "\n")


def ghana_scopus(i: int) -> dict:
    crop = CROPS[i % len(CROPS)]
    nutrient = NUTRIENTS[i % len(NUTRIENTS)]
    if i % 3 == 0:
        abstract = RELEVANT_ABSTRACT.format(crop=crop, n=2 + i % 4)
    else:
        abstract = NEUTRAL_ABSTRACT.format(topic=TOPICS[i % len(TOPICS)])
    return {
        "title": f"Effects of {nutrient} on {crop} yield in Ghana: trial {i}",
        "abstract": abstract,
        "doi": f"10.1016/ghana.s{i:04d}",
        "id": f"SCOPUS_ID:85{i:07d}",
        "year": 1990 + i % 35,
        "authors": f"Author {i % 211}; Author {i % 137}",
        "url": f"https://example.org/scopus/{i}",
    }


def build_ghana() -> None:
    scopus = [ghana_scopus(i) for i in range(4999)]

    sciencedirect = []
    for j in range(670):
        crop = CROPS[(j + 3) % len(CROPS)]
        row = {
            "title": f"ScienceDirect report {j} on {crop} nutrition in Ghana",
            "abstract": RELEVANT_ABSTRACT.format(crop=crop, n=1 + j % 5),
            "doi": f"10.1016/ghana.d{j:03d}",
            # First 496 share the Elsevier record ID with the Scopus row.
            "id": scopus[j]["id"] if j < 496 else f"SD_PII:S{j:05d}",
            "year": 1995 + j % 30,
            "authors": f"Author {j % 97}",
            "url": f"https://example.org/sciencedirect/{j}",
        }
        if j >= 496:
            row["doi"] = f"10.1016/ghana.sd{j:03d}"
        sciencedirect.append(row)

    wos = []
    for k in range(638):
        crop = CROPS[(k + 5) % len(CROPS)]
        row = {
            "title": f"Web of Science entry {k} on {crop} fertility management",
            "abstract": NEUTRAL_ABSTRACT.format(topic=TOPICS[k % len(TOPICS)]),
            "doi": f"10.1002/wosgh.{k:03d}",
            "id": f"WOS:000{k:06d}",
            "year": 2000 + k % 25,
            "authors": f"Author {k % 61}",
            "url": f"https://example.org/wos/{k}",
        }
        if k < 277:
            # Same article as the Scopus row, indexed under its DOI.
            row["doi"] = scopus[k]["doi"]
        elif k < 284:
            # Case/punctuation variant of a surviving Scopus title.
            target = scopus[2000 + (k - 277)]
            row["title"] = target["title"].upper() + "."
        wos.append(row)

    write_jsonl(ROOT / "ghana" / "scopus.jsonl", scopus)
    write_jsonl(ROOT / "ghana" / "sciencedirect.jsonl", sciencedirect)
    write_jsonl(ROOT / "ghana" / "wos.jsonl", wos)


DEMO_SCOPUS = [
    # (title, abstract, year)
    ("Nitrogen fertilizer response of maize in northern Ghana",
     "On-farm trials in Ghana showed that nitrogen fertilizer raised maize grain yield in both seasons.", 2019),
    ("Phosphorus and potassium management for cowpea yield in Ghana",
     "Applications of phosphorus with potassium in Ghana increased the cowpea yield over the unfertilized control.", 2020),
    ("Soil fertility, nutrient management in Ghana: a synthesis",
     "The synthesis compiles nutrient omission results from Ghana and relates fertilizer use to yield trends.", 2018),
    ("Remote sensing of canopy temperature in arid orchards",
     "Thermal imagery was collected over orchards to map canopy temperature for irrigation decisions.", 2021),
    ("A survey of irrigation scheduling tools",
     "The survey compares scheduling software and sensors used by extension agents across regions.", 2018),
    ('Farmer perceptions of "improved" seed varieties',
     "Interviews explored how growers judge seed quality and what drives adoption among smallholders.", 2019),
    ("Manure and compost rates for millet production in Ghana",
     "Compost and manure rates in Ghana lifted millet yield relative to the untreated plots.", 2020),
    ("Urea deep placement and rice yield in Ghana's irrigated lowlands",
     "Deep placement of urea in Ghana raised paddy yield under nitrogen limited lowland conditions.", 2021),
    ("Weather index insurance adoption in West Africa",
     "The study models insurance uptake decisions using household panel data from several countries.", 2018),
    ("Cocoa pollination ecology and shade management",
     "Observations of pollinator activity under different shade regimes are reported for cocoa farms.", 2019),
    ("Split nitrogen doses and maize grain yield in Ghana",
     "Splitting nitrogen doses in Ghana improved maize grain yield and agronomic efficiency.", 2020),
    ("Potassium response of plantain in humid Ghana",
     "Potassium fertilizer in humid Ghana increased bunch yield of plantain on depleted soils.", 2021),
    ("Cowpea response to phosphorus rates in Ghana savannas",
     "Phosphorus rates in Ghana savannas doubled cowpea grain yield in the driest year.", 2018),
    ("Gender and mechanization in smallholder systems",
     "The article examines access to mechanization services and its labor implications for households.", 2019),
    ("NPK blends for yam yield on Ghana ferralsols",
     "Balanced NPK blends in Ghana raised tuber yield of yam across three districts.", 2020),
    ("Digital advisory services for extension agents",
     "A field experiment measures message framing effects on the uptake of advisory content.", 2021),
    ("Sulfur amendments and groundnut yield in Ghana",
     "Sulfur amendments in Ghana improved groundnut pod yield on sandy soils.", 2018),
    ("Aflatoxin contamination pathways in storage",
     "Storage trials characterize contamination pathways and the efficacy of hermetic bags.", 2019),
    ("Fertilizer subsidy reform and maize yield in Ghana",
     "Subsidy reform in Ghana shifted fertilizer use and measurably changed maize yield outcomes.", 2020),
    ("Rural road access and market participation",
     "The analysis links road upgrades with crop sales using a difference in differences design.", 2021),
    ("Rendement du mil et azote au Sahel",
     "L'azote améliore le rendement du mil au Sénégal pendant la saison sèche selon les essais.", 2019),
    ("Réponse du maïs aux engrais azotés",
     "Cette étude évalue la réponse du maïs aux engrais azotés dans les zones guinéennes du pays.", 2020),
    ("Participatory varietal selection for cassava",
     "Farmer panels scored cassava clones for taste and processing quality in replicated tastings.", 2018),
    ("Urban food retail transitions in coastal cities",
     "The paper documents supermarket expansion and dietary shifts in two coastal metropolitan areas.", 2019),
]

DEMO_SCIENCEDIRECT = [
    ("Elsevier mirror: nitrogen response of maize in Ghana",
     "Duplicate indexing of the maize nitrogen trials from Ghana with identical yield findings.", 2019),
    ("Elsevier mirror: phosphorus and potassium for cowpea",
     "Duplicate indexing of the cowpea phosphorus study with the same yield response in Ghana.", 2020),
    ("Elsevier mirror: soil fertility synthesis",
     "Second listing of the Ghana nutrient management synthesis with fertilizer and yield tables.", 2018),
    ("Elsevier mirror: canopy temperature sensing",
     "Second listing of the orchard canopy temperature mapping study for irrigation decisions.", 2021),
    ("Micronutrient fertilization of rice in Ghana",
     "Zinc plus nitrogen fertilization in Ghana increased rice yield on alkaline paddies.", 2019),
    ("Supply chains for horticultural exports",
     "The case study follows cold-chain logistics from farm gate to port for vegetable exporters.", 2020),
    ("Residual phosphorus effects on Ghana maize yield",
     "Residual phosphorus in Ghana sustained maize yield for two seasons after application.", 2021),
    ("Farm record keeping and credit access",
     "Administrative data link bookkeeping practices with loan approval odds for smallholders.", 2018),
    ("Nutrient balances of cassava systems in Ghana",
     "Partial nutrient balances in Ghana show potassium mining where cassava yield is highest.", 2020),
    ("Postharvest losses in tomato value chains",
     "Loss assessments along the tomato chain identify handling stages with the largest waste.", 2019),
    ("Seed system regulation in West Africa",
     "The review contrasts certification regimes and their implications for variety turnover.", 2021),
    ("Biochar effects on soil water retention",
     "Laboratory columns were used to quantify the change in moisture retention under two rates of biochar amendment.", 2018),
]

DEMO_WOS = [
    ("Clarivate mirror: nitrogen response of maize in Ghana",
     "Duplicate of the Ghana maize nitrogen record carrying the same DOI and yield results.", 2019),
    ("Clarivate mirror: canopy temperature in orchards",
     "Duplicate of the orchard sensing record carrying the same DOI as the original listing.", 2021),
    ("Clarivate mirror: manure and compost for millet",
     "Duplicate of the Ghana millet record carrying the same DOI and compost yield data.", 2020),
    ("PHOSPHORUS AND POTASSIUM MANAGEMENT FOR COWPEA YIELD IN GHANA.",
     "Uppercase listing of the cowpea study from Ghana with phosphorus and potassium yield data.", 2020),
    ("Determination of a critical nitrogen dilution curve for winter wheat crops",
     "The critical nitrogen dilution curve for winter wheat was fitted to biomass from two campaigns.", 2018),
    ("Sulphur and nitrogen interactions for Ghana maize yield",
     "Factorial trials in Ghana found sulphur with nitrogen lifted maize yield beyond either alone.", 2019),
    ("Carbon stocks under agroforestry parklands",
     "Inventory plots estimate above and below ground carbon across parkland management classes.", 2021),
    ("Fertilizer deep placement for Ghana lowland rice yield",
     "Briquette fertilizer placement in Ghana lowlands raised rice yield and nitrogen recovery.", 2020),
    ("Remote pasture condition scoring from satellites",
     "A scoring model translates vegetation indices into pasture condition classes for herders.", 2018),
    ("Soil acidity mapping for lime recommendations",
     "Gridded maps of soil acidity are used to support district lime recommendations when data are scarce.", 2019),
]

DEMO_GSCHOLAR = [
    ("Fertilizer subsidies and maize yield response in Ghana", 2019),
    ("Nutrient omission trials in Ghana: yield gaps", 2020),
    ("Grey literature on cassava markets", None),
    ("Fertilizer note", 2018),
    ("Phosphorus use efficiency of cowpea in Ghana cropping systems yield stability", 2021),
    ("Urban water governance thesis", None),
    ("Sulphur application and groundnut yield on Ghana savanna soils", 2020),
    ("Extension services and technology adoption", 2019),
]

HUMAN_RELEVANT = """doi,title
10.1016/demo.s0,Nitrogen fertilizer response of maize in northern Ghana
10.1016/demo.s3,Remote sensing of canopy temperature in arid orchards
,Nutrient omission trials in Ghana: yield gaps
,determination of a critical N dilution curve for winter wheat crops
10.4444/absent.doi,A study that was never indexed anywhere
,Split nitrogen doses and maize grain yield in Ghana
"""


def build_demo() -> None:
    scopus = [
        {
            "title": title,
            "abstract": abstract,
            "doi": f"10.1016/demo.s{i}",
            "id": f"DS{i}",
            "year": year,
            "authors": f"Demo Author {i}",
            "url": f"https://example.org/demo/s{i}",
        }
        for i, (title, abstract, year) in enumerate(DEMO_SCOPUS)
    ]

    sciencedirect = []
    for j, (title, abstract, year) in enumerate(DEMO_SCIENCEDIRECT):
        sciencedirect.append(
            {
                "title": title,
                "abstract": abstract,
                "doi": f"10.1016/demo.d{j}",
                # First four share the Elsevier record ID with Scopus rows.
                "id": f"DS{j}" if j < 4 else f"DSD{j}",
                "year": year,
                "authors": f"Demo Author {40 + j}",
                "url": f"https://example.org/demo/sd{j}",
            }
        )

    wos = []
    doi_dup_targets = {0: "10.1016/demo.s0", 1: "10.1016/demo.s3", 2: "10.1016/demo.s6"}
    for k, (title, abstract, year) in enumerate(DEMO_WOS):
        wos.append(
            {
                "title": title,
                "abstract": abstract,
                "doi": doi_dup_targets.get(k, f"10.88/demo.w{k}"),
                "id": f"WOS:D{k}",
                "year": year,
                "authors": f"Demo Author {70 + k}",
                "url": f"https://example.org/demo/w{k}",
            }
        )

    gscholar = []
    for g, (title, year) in enumerate(DEMO_GSCHOLAR):
        row = {"title": title, "id": f"GS{g}", "url": f"https://example.org/demo/g{g}"}
        if year is not None:
            row["year"] = year
        gscholar.append(row)

    write_jsonl(ROOT / "demo" / "scopus.jsonl", scopus)
    write_jsonl(ROOT / "demo" / "sciencedirect.jsonl", sciencedirect)
    write_jsonl(ROOT / "demo" / "wos.jsonl", wos)
    write_jsonl(ROOT / "demo" / "gscholar.jsonl", gscholar)
    (ROOT / "demo" / "human_relevant.csv").write_text(HUMAN_RELEVANT, encoding="utf-8")


if __name__ == "__main__":
    build_ghana()
    build_demo()
    for path in sorted(ROOT.rglob("*")):
        if path.is_file():
            print(f"{path.relative_to(ROOT.parent)}: {path.stat().st_size:,} bytes")
