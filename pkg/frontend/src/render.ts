/** Pure HTML-string views. Every number rendered comes verbatim from an API
 * response field; the dashboard computes nothing itself. */

import type {
  DedupReport,
  EvaluationReport,
  JobStatusDoc,
  JobSummary,
} from "./types.js";
import type { FieldError } from "./validation.js";

export function escapeHtml(text: string): string {
  return text
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;");
}

export function renderFieldErrors(errors: FieldError[]): string {
  if (errors.length === 0) return "";
  const items = errors
    .map(
      (e) =>
        `<li data-field="${escapeHtml(e.field)}"><strong>${escapeHtml(e.field)}</strong>: ${escapeHtml(e.message)}</li>`,
    )
    .join("");
  return `<ul class="field-errors">${items}</ul>`;
}

export function renderJobBoard(jobs: JobSummary[]): string {
  if (jobs.length === 0) return `<p class="empty">No jobs yet.</p>`;
  const rows = jobs
    .map((job) => {
      const warn = job.warning
        ? ` <span class="badge warn" title="${escapeHtml(job.warning)}">!</span>`
        : "";
      return (
        `<tr data-alias="${escapeHtml(job.alias)}">` +
        `<td><a href="#job/${escapeHtml(job.alias)}">${escapeHtml(job.alias)}</a></td>` +
        `<td class="status status-${escapeHtml(job.status)}">${escapeHtml(job.status)}${warn}</td>` +
        `<td>${escapeHtml(job.created_at)}</td>` +
        `<td>${escapeHtml(job.finished_at ?? "")}</td></tr>`
      );
    })
    .join("");
  return (
    `<table class="jobs"><thead><tr>` +
    `<th>Alias</th><th>Status</th><th>Created</th><th>Finished</th>` +
    `</tr></thead><tbody>${rows}</tbody></table>`
  );
}

export function renderCounters(doc: JobStatusDoc): string {
  const sources = Object.entries(doc.counters.sources);
  const cells = sources
    .map(
      ([source, count]) =>
        `<tr><td>${escapeHtml(source)}</td><td class="num">${count}</td></tr>`,
    )
    .join("");
  const clean =
    doc.counters.clean !== undefined
      ? `<tr><td>after cleaning</td><td class="num">${doc.counters.clean}</td></tr>`
      : "";
  const relevant =
    doc.counters.relevant !== undefined
      ? `<tr><td>labeled relevant</td><td class="num">${doc.counters.relevant}</td></tr>`
      : "";
  return (
    `<table class="counters"><thead><tr><th>Source</th><th>Records</th></tr></thead>` +
    `<tbody>${cells}${clean}${relevant}</tbody></table>`
  );
}

export function renderDedupTable(report: DedupReport): string {
  const rows = report.stages
    .map(
      (s) =>
        `<tr><td>${escapeHtml(s.stage)}</td>` +
        `<td class="num">${s.merged_in}</td>` +
        `<td class="num">${s.before}</td>` +
        `<td class="num">${s.after}</td>` +
        `<td class="num">${s.removed}</td></tr>`,
    )
    .join("");
  return (
    `<table class="dedup"><thead><tr>` +
    `<th>Stage</th><th>Merged in</th><th>Before</th><th>After</th><th>Removed</th>` +
    `</tr></thead><tbody>${rows}` +
    `<tr class="final"><td>final</td><td></td><td></td>` +
    `<td class="num">${report.final_count}</td><td></td></tr>` +
    `</tbody></table>`
  );
}

export function renderEvaluation(report: EvaluationReport): string {
  const overlap =
    report.overlap_percent !== null ? report.overlap_percent : "n/a";
  const note = report.overlap_note
    ? `<p class="note">${escapeHtml(report.overlap_note)}</p>`
    : "";
  return (
    `<table class="evaluation"><thead><tr>` +
    `<th>Keywords</th><th>HumanRelevant</th><th>ToolRetrieved</th>` +
    `<th>H∩T</th><th>H−T</th><th>ModelRelevant</th><th>H∩M</th><th>%Overlap</th>` +
    `</tr></thead><tbody><tr>` +
    `<td>${escapeHtml(report.label)}</td>` +
    `<td class="num">${report.human_relevant}</td>` +
    `<td class="num">${report.tool_retrieved}</td>` +
    `<td class="num">${report.intersection_ht}</td>` +
    `<td class="num">${report.missed}</td>` +
    `<td class="num">${report.model_relevant}</td>` +
    `<td class="num">${report.intersection_hm}</td>` +
    `<td class="num">${escapeHtml(overlap)}</td>` +
    `</tr></tbody></table>${note}`
  );
}

export function renderWarnings(warnings: string[]): string {
  if (warnings.length === 0) return "";
  const items = warnings.map((w) => `<li>${escapeHtml(w)}</li>`).join("");
  return `<ul class="warnings">${items}</ul>`;
}

export function renderJobDetail(doc: JobStatusDoc): string {
  const download =
    doc.status === "done"
      ? `<button id="download" data-alias="${escapeHtml(doc.alias)}">Download CSV</button>`
      : `<button id="download" disabled>Download CSV</button>`;
  const dedup = doc.dedup_report ? renderDedupTable(doc.dedup_report) : "";
  return (
    `<h2>${escapeHtml(doc.alias)} <span class="status status-${escapeHtml(doc.status)}">${escapeHtml(doc.status)}</span></h2>` +
    `<p class="query">${escapeHtml(doc.query)}</p>` +
    renderWarnings(doc.warnings) +
    renderCounters(doc) +
    dedup +
    download
  );
}
