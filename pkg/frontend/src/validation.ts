/** Client-side mirror of the server's submission rules.
 *
 * Duplicating the bounds keeps the form responsive, but the server stays
 * authoritative: anything accepted here is re-validated on submit and a
 * 400/409 response is surfaced inline.
 */

import type { FormState } from "./types.js";

export const RECORD_LIMIT_MAX = 5000;
export const WOS_PAGES_MIN = 0;
export const WOS_PAGES_MAX = 100;

const ALIAS_RE = /^[A-Za-z0-9][A-Za-z0-9._-]{0,63}$/;

export interface FieldError {
  field: string;
  message: string;
}

/** Minimal boolean-query checker for live feedback: balanced parentheses,
 * no dangling/leading operators, no empty groups, no operatorless
 * adjacency of groups. Accepts exactly what the server's parser accepts. */
export function queryFeedback(query: string): string | null {
  const tokens = query.match(/[()]|[^()\s]+/g) ?? [];
  if (tokens.length === 0) return "query is empty";
  let depth = 0;
  // Adjacent words merge into one phrase; a group may not sit next to a
  // word or another group without an operator.
  let prev: "start" | "word" | "group" | "operator" | "open" = "start";
  for (const token of tokens) {
    const upper = token.toUpperCase();
    if (token === "(") {
      if (prev === "word" || prev === "group") return "missing operator before group";
      depth += 1;
      prev = "open";
    } else if (token === ")") {
      depth -= 1;
      if (depth < 0) return "unbalanced closing parenthesis";
      if (prev === "operator") return "dangling operator";
      if (prev === "open") return "empty group";
      prev = "group";
    } else if (upper === "AND" || upper === "OR") {
      if (prev === "start" || prev === "operator" || prev === "open") {
        return "operator where a keyword was expected";
      }
      prev = "operator";
    } else {
      if (prev === "group") return "missing operator after group";
      prev = "word";
    }
  }
  if (depth > 0) return "unclosed parenthesis";
  if (prev === "operator") return "dangling operator";
  return null;
}

function boundedInt(
  field: string,
  raw: string,
  min: number,
  max: number,
  errors: FieldError[],
): void {
  const value = Number(raw);
  if (!/^-?\d+$/.test(raw.trim()) || !Number.isInteger(value)) {
    errors.push({ field, message: `${field} must be a whole number` });
    return;
  }
  if (value < min || value > max) {
    errors.push({ field, message: `${field} must be between ${min} and ${max}` });
  }
}

export function validateForm(
  form: FormState,
  existingAliases: string[] = [],
): FieldError[] {
  const errors: FieldError[] = [];

  if (!form.alias.trim()) {
    errors.push({ field: "alias", message: "alias is required" });
  } else if (!ALIAS_RE.test(form.alias.trim())) {
    errors.push({
      field: "alias",
      message: "alias must be 1-64 letters, digits, '.', '_' or '-'",
    });
  } else if (existingAliases.includes(form.alias.trim())) {
    errors.push({
      field: "alias",
      message: `alias '${form.alias.trim()}' is already in use`,
    });
  }

  const queryProblem = queryFeedback(form.query);
  if (queryProblem !== null) {
    errors.push({ field: "query", message: queryProblem });
  }

  boundedInt("scopus.max", form.scopusMax, 1, RECORD_LIMIT_MAX, errors);
  boundedInt("sciencedirect.max", form.sciencedirectMax, 1, RECORD_LIMIT_MAX, errors);
  boundedInt("wos.pages", form.wosPages, WOS_PAGES_MIN, WOS_PAGES_MAX, errors);
  if (form.gscholarEnabled) {
    boundedInt("gscholar.max", form.gscholarMax, 1, RECORD_LIMIT_MAX, errors);
  }

  const hasFrom = form.yearFrom.trim() !== "";
  const hasTo = form.yearTo.trim() !== "";
  if (hasFrom !== hasTo) {
    errors.push({
      field: "year_range",
      message: "year from and year to must be given together",
    });
  } else if (hasFrom && hasTo) {
    boundedInt("year_range.from", form.yearFrom, 1800, 2100, errors);
    boundedInt("year_range.to", form.yearTo, 1800, 2100, errors);
    if (errors.every((e) => !e.field.startsWith("year_range"))) {
      if (Number(form.yearFrom) > Number(form.yearTo)) {
        errors.push({ field: "year_range", message: "year range start exceeds end" });
      }
    }
  }

  return errors;
}

/** Submission body in the server's shape; call only on a valid form. */
export function toSubmission(form: FormState): Record<string, unknown> {
  const body: Record<string, unknown> = {
    alias: form.alias.trim(),
    query: form.query.trim(),
    scopus: { enabled: true, max: Number(form.scopusMax) },
    sciencedirect: { enabled: true, max: Number(form.sciencedirectMax) },
    wos: { enabled: true, pages: Number(form.wosPages) },
    gscholar: { enabled: form.gscholarEnabled, max: Number(form.gscholarMax) },
  };
  if (form.yearFrom.trim() !== "" && form.yearTo.trim() !== "") {
    body.year_from = Number(form.yearFrom);
    body.year_to = Number(form.yearTo);
  }
  return body;
}
