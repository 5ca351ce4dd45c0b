/** Thin typed client for the harvest service. No response field is ever
 * reshaped or recomputed here: what the server sends is what views get. */

import type {
  ApiErrorBody,
  EvaluationReport,
  JobStatusDoc,
  JobSummary,
} from "./types.js";

export class ApiRequestError extends Error {
  readonly status: number;
  readonly code: string;
  readonly field?: string;

  constructor(status: number, body: ApiErrorBody) {
    super(body.message);
    this.status = status;
    this.code = body.code;
    this.field = body.field;
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

async function errorFrom(response: Response): Promise<ApiRequestError> {
  let body: ApiErrorBody;
  try {
    body = (await response.json()) as ApiErrorBody;
  } catch {
    body = { code: "http_error", message: `HTTP ${response.status}` };
  }
  return new ApiRequestError(response.status, body);
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private url(path: string): string {
    return this.baseUrl.replace(/\/$/, "") + path;
  }

  private async getJson<T>(path: string): Promise<T> {
    const response = await this.fetchFn(this.url(path));
    if (!response.ok) throw await errorFrom(response);
    return (await response.json()) as T;
  }

  async listJobs(): Promise<JobSummary[]> {
    const body = await this.getJson<{ jobs: JobSummary[] }>("/api/jobs");
    return body.jobs;
  }

  async createJob(submission: Record<string, unknown>): Promise<{ alias: string }> {
    const response = await this.fetchFn(this.url("/api/jobs"), {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(submission),
    });
    if (!response.ok) throw await errorFrom(response);
    return (await response.json()) as { alias: string };
  }

  async getJob(alias: string): Promise<JobStatusDoc> {
    return this.getJson<JobStatusDoc>(`/api/jobs/${encodeURIComponent(alias)}`);
  }

  downloadUrl(alias: string): string {
    return this.url(`/api/jobs/${encodeURIComponent(alias)}/download`);
  }

  /** Raw dataset bytes, untouched (checksum-comparable with the server). */
  async download(alias: string): Promise<Uint8Array> {
    const response = await this.fetchFn(this.downloadUrl(alias));
    if (!response.ok) throw await errorFrom(response);
    return new Uint8Array(await response.arrayBuffer());
  }

  async evaluate(
    alias: string,
    humanCsv: string,
    label?: string,
  ): Promise<EvaluationReport> {
    const response = await this.fetchFn(this.url("/api/evaluate"), {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ alias, human_csv: humanCsv, label }),
    });
    if (!response.ok) throw await errorFrom(response);
    return (await response.json()) as EvaluationReport;
  }
}
