/** Schema of the sweep verdict JSON produced by the harness. */

import { readFileSync } from "node:fs";
import { z } from "zod";

import { SchemaError } from "./csv.js";

export const SweepSchema = z.object({
  model: z.string(),
  regime: z.string(),
  t_end: z.number(),
  eps: z.array(z.number()).min(1),
  errors: z.record(z.string(), z.array(z.number())),
  rates: z.record(z.string(), z.number()),
  monotone: z.record(z.string(), z.boolean()),
  pass: z.boolean(),
}).passthrough();

export type SweepResult = z.infer<typeof SweepSchema>;

export function readSweep(path: string): SweepResult {
  let raw: unknown;
  try {
    raw = JSON.parse(readFileSync(path, "utf8"));
  } catch (e) {
    throw new SchemaError(`${path}: not valid JSON (${(e as Error).message})`);
  }
  const parsed = SweepSchema.safeParse(raw);
  if (!parsed.success) {
    const issue = parsed.error.issues[0];
    throw new SchemaError(`${path}: bad sweep JSON at '${issue.path.join(".")}': ${issue.message}`);
  }
  const s = parsed.data;
  for (const [field, errs] of Object.entries(s.errors)) {
    if (errs.length !== s.eps.length) {
      throw new SchemaError(`${path}: errors '${field}' has ${errs.length} entries, `
        + `expected ${s.eps.length}`);
    }
  }
  return s;
}
