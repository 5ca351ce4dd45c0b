/** End-to-end test against the real fixture-backed server: submit a job,
 * watch it progress to done, and verify the downloaded CSV's checksum
 * equals the file the server wrote. Spawns the Python service. */

import { spawn, type ChildProcess } from "node:child_process";
import { createHash } from "node:crypto";
import { mkdtempSync, readFileSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { join, resolve } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { pollJob } from "../src/poll.js";
import { toSubmission } from "../src/validation.js";
import { DEFAULT_FORM } from "../src/types.js";

const REPO_ROOT = resolve(__dirname, "..", "..");
const PORT = 8931;
const BASE = `http://127.0.0.1:${PORT}`;

const GHANA_QUERY =
  "Ghana AND (Nutrient OR Fertilization OR Fertilizer OR Rates OR Doses OR " +
  "Nitrogen OR Phosphorus OR Potassium OR Sulfur OR Sulphur) AND Yield";

let server: ChildProcess;
let dataDir: string;

const sha256 = (bytes: Uint8Array) => createHash("sha256").update(bytes).digest("hex");

async function serverReady(deadlineMs: number): Promise<void> {
  const deadline = Date.now() + deadlineMs;
  for (;;) {
    try {
      const response = await fetch(`${BASE}/api/jobs`);
      if (response.ok) return;
    } catch {
      // not up yet
    }
    if (Date.now() > deadline) throw new Error("server did not start");
    await new Promise((resolveWait) => setTimeout(resolveWait, 150));
  }
}

beforeAll(async () => {
  dataDir = mkdtempSync(join(tmpdir(), "dashboard-e2e-"));
  server = spawn(
    "python3",
    [
      "-m", "litharvest.cli",
      "--data-dir", dataDir,
      "--fixtures-dir", join(REPO_ROOT, "fixtures", "demo"),
      "serve", "--port", String(PORT),
    ],
    { cwd: REPO_ROOT, stdio: "ignore" },
  );
  await serverReady(30_000);
}, 40_000);

afterAll(() => {
  server?.kill();
  rmSync(dataDir, { recursive: true, force: true });
});

describe("dashboard against the fixture-backed server", () => {
  it("submits, observes progression to done, and downloads matching bytes", async () => {
    const client = new ApiClient(BASE);
    const submission = toSubmission({
      ...DEFAULT_FORM,
      alias: "e2e",
      query: GHANA_QUERY,
      wosPages: "2",
      gscholarEnabled: true,
    });

    const { alias } = await client.createJob(submission);
    expect(alias).toBe("e2e");

    const rank: Record<string, number> = {
      pending: 0, collecting: 1, filtering: 2, classifying: 3, done: 4, failed: 4,
    };
    const observed: string[] = [];
    const final = await pollJob(client, "e2e", (doc) => observed.push(doc.status), {
      intervalMs: 30,
    });

    expect(final.status).toBe("done");
    const ranks = observed.map((status) => rank[status] ?? -1);
    expect(ranks).toEqual([...ranks].sort((a, b) => a - b));
    expect(final.counters.sources).toEqual({
      scopus: 24, sciencedirect: 12, wos: 10, gscholar: 8,
    });
    expect(final.dedup_report?.final_count).toBe(44);

    const downloaded = await client.download("e2e");
    const onDisk = readFileSync(join(dataDir, "e2e", "export.csv"));
    expect(sha256(downloaded)).toBe(sha256(new Uint8Array(onDisk)));
  }, 60_000);

  it("surfaces server-side validation inline and evaluates a curated list", async () => {
    const client = new ApiClient(BASE);

    const rejected = await client
      .createJob({ alias: "bad", query: GHANA_QUERY, wos: { enabled: true, pages: 101 } })
      .catch((error) => error);
    expect(rejected.status).toBe(400);
    expect(rejected.field).toBe("wos.pages");

    const conflict = await client
      .createJob(toSubmission({ ...DEFAULT_FORM, alias: "e2e", query: GHANA_QUERY }))
      .catch((error) => error);
    expect(conflict.status).toBe(409);

    const humanCsv = readFileSync(
      join(REPO_ROOT, "fixtures", "demo", "human_relevant.csv"),
      "utf-8",
    );
    const report = await client.evaluate("e2e", humanCsv, "demo-list");
    expect(report.overlap_percent).toBe("75.00");
    expect(report.intersection_ht).toBe(4);
    expect(report.intersection_hm).toBe(3);
  }, 30_000);
});
