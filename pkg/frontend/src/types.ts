/** Shapes returned by the harvest service; mirrored verbatim, never derived. */

export interface JobSummary {
  alias: string;
  status: string;
  created_at: string;
  finished_at: string | null;
  warning: string | null;
}

export interface DedupStage {
  stage: string;
  before: number;
  after: number;
  removed: number;
  merged_in: number;
}

export interface DedupReport {
  stages: DedupStage[];
  final_count: number;
}

export interface SourceCounters {
  [source: string]: number;
}

export interface JobStatusDoc {
  alias: string;
  status: string;
  query: string;
  created_at: string;
  finished_at: string | null;
  counters: { sources: SourceCounters; clean?: number; relevant?: number };
  warnings: string[];
  files: string[];
  template_id: string;
  model_id: string | null;
  dedup_report: DedupReport | null;
}

export interface EvaluationReport {
  label: string;
  human_relevant: number;
  tool_retrieved: number;
  intersection_ht: number;
  missed: number;
  model_relevant: number;
  intersection_hm: number;
  overlap_percent: string | null;
  overlap_note: string | null;
}

export interface ApiErrorBody {
  code: string;
  message: string;
  field?: string;
}

/** Raw collection-form values as they sit in the inputs. */
export interface FormState {
  alias: string;
  query: string;
  scopusMax: string;
  sciencedirectMax: string;
  wosPages: string;
  gscholarEnabled: boolean;
  gscholarMax: string;
  yearFrom: string;
  yearTo: string;
}

export const DEFAULT_FORM: FormState = {
  alias: "",
  query: "",
  scopusMax: "5000",
  sciencedirectMax: "5000",
  wosPages: "10",
  gscholarEnabled: false,
  gscholarMax: "1000",
  yearFrom: "",
  yearTo: "",
};
