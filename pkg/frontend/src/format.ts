/** Text rendering of strategic labels, mirroring the server's own rendering:
 * `r:{(1,{w})}[{w};{w}]` is the action, the blocking entries and the
 * prediction at horizons 0 and 1. */

import type { BlockingEntry, Prediction, TransitionEntry } from "./api.js";

export function formatBlocking(entries: BlockingEntry[]): string {
  const parts = entries.map((e) => `(${e.horizon},{${e.labels.join(",")}})`);
  return `{${parts.join(",")}}`;
}

export function formatPrediction(prediction: Prediction): string {
  return `[{${prediction.h0.join(",")}};{${prediction.h1.join(",")}}]`;
}

export function formatChip(entry: TransitionEntry): string {
  return `${entry.action}:${formatBlocking(entry.blocking)}${formatPrediction(entry.prediction)}`;
}

/** Short multi-line detail for hover tooltips. */
export function formatDetail(entry: TransitionEntry): string {
  const blocking = entry.blocking
    .map((e) => `  horizon ${e.horizon}: {${e.labels.join(", ")}}`)
    .join("\n");
  return [
    `action: ${entry.action}`,
    `blocking:${entry.blocking.length ? "\n" + blocking : " none"}`,
    `prediction h0: {${entry.prediction.h0.join(", ")}}`,
    `prediction h1: {${entry.prediction.h1.join(", ")}}`,
    `target: state ${entry.target}`,
  ].join("\n");
}
