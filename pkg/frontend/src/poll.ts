/** Poll a job until it settles, pushing every status document to the view. */

import type { ApiClient, ApiRequestError } from "./api.js";
import type { JobStatusDoc } from "./types.js";

export const POLL_INTERVAL_MS = 2000;

export class JobRemovedError extends Error {
  constructor(alias: string) {
    super(`job removed: ${alias}`);
  }
}

const wait = (ms: number) => new Promise<void>((resolve) => setTimeout(resolve, ms));

export interface PollOptions {
  intervalMs?: number;
  sleep?: (ms: number) => Promise<void>;
}

export function isSettled(status: string): boolean {
  return status === "done" || status === "failed";
}

export async function pollJob(
  client: ApiClient,
  alias: string,
  onUpdate: (doc: JobStatusDoc) => void,
  options: PollOptions = {},
): Promise<JobStatusDoc> {
  const interval = options.intervalMs ?? POLL_INTERVAL_MS;
  const sleep = options.sleep ?? wait;
  for (;;) {
    let doc: JobStatusDoc;
    try {
      doc = await client.getJob(alias);
    } catch (error) {
      if ((error as ApiRequestError).status === 404) {
        throw new JobRemovedError(alias);
      }
      throw error;
    }
    onUpdate(doc);
    if (isSettled(doc.status)) return doc;
    await sleep(interval);
  }
}
