import { describe, expect, it } from "vitest";

import { DEFAULT_FORM, type FormState } from "../src/types.js";
import { queryFeedback, toSubmission, validateForm } from "../src/validation.js";

function form(overrides: Partial<FormState> = {}): FormState {
  return {
    ...DEFAULT_FORM,
    alias: "demo",
    query: "Ghana AND (Nutrient OR Fertilizer) AND Yield",
    ...overrides,
  };
}

describe("form validation mirrors server bounds", () => {
  it("accepts a well-formed submission", () => {
    expect(validateForm(form())).toEqual([]);
  });

  it("flags the three bound violations (snapshot)", () => {
    const violations = [
      validateForm(form({ scopusMax: "5001" })),
      validateForm(form({ sciencedirectMax: "5001" })),
      validateForm(form({ wosPages: "101" })),
    ];
    expect(violations.every((errors) => errors.length === 1)).toBe(true);
    expect(violations).toMatchSnapshot();
  });

  it("names the violated field and bound", () => {
    const [error] = validateForm(form({ wosPages: "101" }));
    expect(error?.field).toBe("wos.pages");
    expect(error?.message).toContain("0");
    expect(error?.message).toContain("100");

    const [scopusError] = validateForm(form({ scopusMax: "5001" }));
    expect(scopusError?.field).toBe("scopus.max");
    expect(scopusError?.message).toContain("5000");
  });

  it("accepts the boundary values", () => {
    expect(validateForm(form({ scopusMax: "5000", wosPages: "100" }))).toEqual([]);
    expect(validateForm(form({ wosPages: "0" }))).toEqual([]);
  });

  it("rejects duplicate aliases against the job board", () => {
    const errors = validateForm(form({ alias: "taken" }), ["taken", "other"]);
    expect(errors).toEqual([
      { field: "alias", message: "alias 'taken' is already in use" },
    ]);
  });

  it("rejects bad alias characters and missing alias", () => {
    expect(validateForm(form({ alias: "has space" }))[0]?.field).toBe("alias");
    expect(validateForm(form({ alias: "" }))[0]?.field).toBe("alias");
  });

  it("requires year bounds to come as a pair, in order", () => {
    expect(validateForm(form({ yearFrom: "2020" }))[0]?.field).toBe("year_range");
    expect(
      validateForm(form({ yearFrom: "2021", yearTo: "2019" }))[0]?.message,
    ).toContain("exceeds");
    expect(validateForm(form({ yearFrom: "2019", yearTo: "2021" }))).toEqual([]);
  });

  it("validates the scholar cap only when scholar is enabled", () => {
    expect(validateForm(form({ gscholarMax: "9999" }))).toEqual([]);
    expect(
      validateForm(form({ gscholarEnabled: true, gscholarMax: "9999" }))[0]?.field,
    ).toBe("gscholar.max");
  });
});

describe("live query feedback", () => {
  it("accepts published-style queries", () => {
    expect(queryFeedback("Yield")).toBeNull();
    expect(queryFeedback("unmanned aerial vehicle OR drone")).toBeNull();
    expect(
      queryFeedback(
        "Ghana AND (Nutrient OR Fertilization OR Fertilizer) AND Yield",
      ),
    ).toBeNull();
  });

  it("reports structural problems", () => {
    expect(queryFeedback("")).toBe("query is empty");
    expect(queryFeedback("a AND")).toBe("dangling operator");
    expect(queryFeedback("a AND (b OR c")).toBe("unclosed parenthesis");
    expect(queryFeedback("a OR b)")).toBe("unbalanced closing parenthesis");
    expect(queryFeedback("a AND ()")).toBe("empty group");
    expect(queryFeedback("(a OR b) c")).toBe("missing operator after group");
    expect(queryFeedback("a (b OR c)")).toBe("missing operator before group");
    expect(queryFeedback("OR a")).toBe("operator where a keyword was expected");
  });
});

describe("submission body", () => {
  it("matches the server's field names", () => {
    const body = toSubmission(
      form({ gscholarEnabled: true, yearFrom: "2019", yearTo: "2021" }),
    );
    expect(body).toEqual({
      alias: "demo",
      query: "Ghana AND (Nutrient OR Fertilizer) AND Yield",
      scopus: { enabled: true, max: 5000 },
      sciencedirect: { enabled: true, max: 5000 },
      wos: { enabled: true, pages: 10 },
      gscholar: { enabled: true, max: 1000 },
      year_from: 2019,
      year_to: 2021,
    });
  });

  it("omits the year range when empty", () => {
    expect(toSubmission(form())).not.toHaveProperty("year_from");
  });
});
