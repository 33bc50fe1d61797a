/**
 * Reader for convergence-trace CSVs.
 *
 * The contract is byte-exact: header `grad_evals,event,f_value,f_gap,fallback`,
 * one row per event, floats as round-trip decimals, booleans as true/false.
 */

import { readFileSync } from "node:fs";

export const TRACE_HEADER = "grad_evals,event,f_value,f_gap,fallback";

export interface TraceRow {
  gradEvals: number;
  event: "gd" | "extrapolation";
  fValue: number;
  fGap: number;
  fallback: boolean;
}

export class TraceFormatError extends Error {
  constructor(public readonly source: string, message: string) {
    super(`${source}: ${message}`);
    this.name = "TraceFormatError";
  }
}

export function parseTrace(text: string, source = "<string>"): TraceRow[] {
  const lines = text.split(/\r?\n/).filter((line) => line.length > 0);
  if (lines.length === 0 || lines[0] !== TRACE_HEADER) {
    throw new TraceFormatError(source, `missing trace header "${TRACE_HEADER}"`);
  }
  const rows: TraceRow[] = [];
  for (let i = 1; i < lines.length; i++) {
    const parts = lines[i].split(",");
    if (parts.length !== 5) {
      throw new TraceFormatError(source, `line ${i + 1}: expected 5 fields, got ${parts.length}`);
    }
    const [evalsText, event, valueText, gapText, fallbackText] = parts;
    const gradEvals = Number(evalsText);
    if (!Number.isInteger(gradEvals) || gradEvals < 0) {
      throw new TraceFormatError(source, `line ${i + 1}: bad grad_evals "${evalsText}"`);
    }
    if (event !== "gd" && event !== "extrapolation") {
      throw new TraceFormatError(source, `line ${i + 1}: unknown event "${event}"`);
    }
    const fValue = Number(valueText);
    const fGap = Number(gapText);
    if (valueText === "" || Number.isNaN(fValue) || gapText === "" || Number.isNaN(fGap)) {
      throw new TraceFormatError(source, `line ${i + 1}: bad float field`);
    }
    if (fallbackText !== "true" && fallbackText !== "false") {
      throw new TraceFormatError(source, `line ${i + 1}: bad fallback "${fallbackText}"`);
    }
    rows.push({ gradEvals, event, fValue, fGap, fallback: fallbackText === "true" });
  }
  if (rows.length === 0) {
    throw new TraceFormatError(source, "trace has a header but no rows");
  }
  return rows;
}

export function loadTrace(path: string): TraceRow[] {
  let text: string;
  try {
    text = readFileSync(path, "utf-8");
  } catch (err) {
    throw new TraceFormatError(path, `cannot read file (${(err as Error).message})`);
  }
  return parseTrace(text, path);
}
