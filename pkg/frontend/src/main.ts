/** DOM wiring for the dashboard; all logic lives in the imported modules. */

import { ApiClient, ApiRequestError } from "./api.js";
import { pollJob } from "./poll.js";
import {
  renderFieldErrors,
  renderEvaluation,
  renderJobBoard,
  renderJobDetail,
} from "./render.js";
import type { FormState } from "./types.js";
import { toSubmission, validateForm } from "./validation.js";

const apiBase =
  new URLSearchParams(window.location.search).get("api") ??
  (window as unknown as { API_BASE?: string }).API_BASE ??
  "http://127.0.0.1:8000";

const client = new ApiClient(apiBase);

const $ = <T extends HTMLElement>(selector: string): T => {
  const node = document.querySelector<T>(selector);
  if (!node) throw new Error(`missing element: ${selector}`);
  return node;
};

function readForm(): FormState {
  return {
    alias: $<HTMLInputElement>("#alias").value,
    query: $<HTMLTextAreaElement>("#query").value,
    scopusMax: $<HTMLInputElement>("#scopus-max").value,
    sciencedirectMax: $<HTMLInputElement>("#sciencedirect-max").value,
    wosPages: $<HTMLInputElement>("#wos-pages").value,
    gscholarEnabled: $<HTMLInputElement>("#gscholar").checked,
    gscholarMax: $<HTMLInputElement>("#gscholar-max").value,
    yearFrom: $<HTMLInputElement>("#year-from").value,
    yearTo: $<HTMLInputElement>("#year-to").value,
  };
}

let knownAliases: string[] = [];

async function refreshBoard(): Promise<void> {
  try {
    const jobs = await client.listJobs();
    knownAliases = jobs.map((job) => job.alias);
    $("#board").innerHTML = renderJobBoard(jobs);
  } catch (error) {
    $("#board").innerHTML = `<p class="error">Cannot reach the API at ${apiBase}: ${String(error)}</p>`;
  }
}

function showFormErrors(): boolean {
  const errors = validateForm(readForm(), knownAliases);
  $("#form-errors").innerHTML = renderFieldErrors(errors);
  $<HTMLButtonElement>("#collect").disabled = errors.length > 0;
  return errors.length === 0;
}

async function showDetail(alias: string): Promise<void> {
  const detail = $("#detail");
  try {
    await pollJob(client, alias, (doc) => {
      detail.innerHTML = renderJobDetail(doc);
      const download = document.querySelector<HTMLButtonElement>("#download");
      if (download && !download.disabled) {
        download.onclick = () => {
          window.location.href = client.downloadUrl(alias);
        };
      }
    });
  } catch (error) {
    detail.innerHTML = `<p class="error banner">${String(error)}</p>`;
  }
  await refreshBoard();
}

async function onCollect(event: Event): Promise<void> {
  event.preventDefault();
  if (!showFormErrors()) return;
  try {
    const { alias } = await client.createJob(toSubmission(readForm()));
    window.location.hash = `#job/${alias}`;
    await refreshBoard();
    await showDetail(alias);
  } catch (error) {
    if (error instanceof ApiRequestError) {
      $("#form-errors").innerHTML = renderFieldErrors([
        { field: error.field ?? error.code, message: error.message },
      ]);
    } else {
      $("#form-errors").innerHTML = `<p class="error">${String(error)} — retry?</p>`;
    }
  }
}

async function onEvaluate(event: Event): Promise<void> {
  event.preventDefault();
  const alias = window.location.hash.replace("#job/", "");
  const file = $<HTMLInputElement>("#human-csv").files?.[0];
  if (!alias || !file) return;
  try {
    const report = await client.evaluate(alias, await file.text());
    $("#evaluation").innerHTML = renderEvaluation(report);
  } catch (error) {
    $("#evaluation").innerHTML = `<p class="error">${String(error)}</p>`;
  }
}

function boot(): void {
  const form = $<HTMLFormElement>("#collection-form");
  form.addEventListener("input", showFormErrors);
  form.addEventListener("submit", (event) => void onCollect(event));
  $("#evaluate-form").addEventListener("submit", (event) => void onEvaluate(event));
  void refreshBoard();
  if (window.location.hash.startsWith("#job/")) {
    void showDetail(window.location.hash.replace("#job/", ""));
  }
  window.addEventListener("hashchange", () => {
    if (window.location.hash.startsWith("#job/")) {
      void showDetail(window.location.hash.replace("#job/", ""));
    }
  });
}

boot();
