import type { FrontEntry } from "./types.js";
import type { Point } from "./run.js";

/** A finished run parked in the compare tray. */
export interface TrayEntry {
  runId: string;
  label: string;
  metricNames: string[];
  front: FrontEntry[];
}

export function commonMetrics(entries: TrayEntry[]): string[] {
  if (entries.length === 0) return [];
  return entries[0].metricNames.filter((name) =>
    entries.every((e) => e.metricNames.includes(name)),
  );
}

export type OverlayStatus = { ok: true; axes: string[] } | { ok: false; reason: string };

/** Overlay needs two or more runs sharing at least two metrics. */
export function overlayStatus(entries: TrayEntry[]): OverlayStatus {
  if (entries.length < 2) return { ok: false, reason: "select at least two runs to compare" };
  const shared = commonMetrics(entries);
  if (shared.length < 2)
    return { ok: false, reason: "selected runs share fewer than two metrics" };
  return { ok: true, axes: shared };
}

export interface OverlaySeries {
  runId: string;
  label: string;
  colorIndex: number;
  points: Point[];
}

export function overlaySeries(entries: TrayEntry[], xAxis: string, yAxis: string): OverlaySeries[] {
  return entries.map((entry, i) => ({
    runId: entry.runId,
    label: entry.label,
    colorIndex: i,
    points: entry.front.map((row) => ({
      x: row.metrics[xAxis] ?? 0,
      y: row.metrics[yAxis] ?? 0,
      rule_id: row.rule_id,
      label: row.text,
    })),
  }));
}
