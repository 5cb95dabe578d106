import type {
  FrontEntry,
  FrontRule,
  GenerationEvent,
  RunConfig,
  RunSummary,
  TerminalEvent,
} from "./types.js";

export interface SortSpec {
  key: string; // "rule_id" or a metric name
  dir: 1 | -1;
}

/** Everything one run's view renders, reduced from service payloads only. */
export interface RunView {
  runId: string;
  config: RunConfig;
  state: string;
  generationsTotal: number;
  generationsDone: number;
  rksSize: number;
  frontSize: number;
  elapsedMs: number;
  liveFront: FrontRule[];
  topRules: string[];
  front: FrontEntry[] | null; // authoritative /front payload once terminal
  summary: RunSummary | null;
  error: string | null;
  progressUpdates: number;
  terminalUpdates: number;
}

export function newRunView(runId: string, config: RunConfig): RunView {
  return {
    runId,
    config,
    state: "pending",
    generationsTotal: config.generations,
    generationsDone: 0,
    rksSize: 0,
    frontSize: 0,
    elapsedMs: 0,
    liveFront: [],
    topRules: [],
    front: null,
    summary: null,
    error: null,
    progressUpdates: 0,
    terminalUpdates: 0,
  };
}

export function applyGeneration(view: RunView, ev: GenerationEvent): RunView {
  view.state = "running";
  view.generationsDone = ev.generation + 1;
  view.rksSize = ev.rks_size;
  view.frontSize = ev.front_size;
  view.elapsedMs = ev.elapsed_ms;
  view.liveFront = ev.front;
  view.topRules = ev.top_rules;
  view.progressUpdates += 1;
  return view;
}

export function applyTerminal(view: RunView, ev: TerminalEvent): RunView {
  view.state = ev.state;
  view.summary = ev.summary ?? null;
  view.error = ev.error ?? null;
  if (ev.summary) {
    view.generationsDone = ev.summary.generations_run;
    view.rksSize = ev.summary.rks_count;
    view.frontSize = ev.summary.front_size;
    view.elapsedMs = ev.summary.elapsed_ms;
  }
  view.terminalUpdates += 1;
  return view;
}

export function setFront(view: RunView, front: FrontEntry[]): RunView {
  view.front = front;
  view.frontSize = front.length;
  return view;
}

export function metricNames(config: RunConfig): string[] {
  return config.metrics.map((m) => m.name);
}

export function progressFraction(view: RunView): number {
  if (view.generationsTotal <= 0) return 0;
  return Math.min(1, view.generationsDone / view.generationsTotal);
}

/** Axis choices are exactly the run's active metrics. */
export function axisChoices(view: RunView): string[] {
  return metricNames(view.config);
}

export function defaultAxes(view: RunView): [string, string] {
  const names = axisChoices(view);
  const x = names.includes("coverage") ? "coverage" : names[0];
  const y = names.includes("confidence") ? "confidence" : names.find((n) => n !== x) ?? names[0];
  return [x, y];
}

/** Current table rows: the /front payload once present, else the live front. */
export function tableRows(view: RunView, sort?: SortSpec): (FrontRule | FrontEntry)[] {
  const rows = (view.front ?? view.liveFront).slice();
  if (!sort) return rows;
  const { key, dir } = sort;
  rows.sort((a, b) => {
    const av = key === "rule_id" ? a.rule_id : a.metrics[key] ?? 0;
    const bv = key === "rule_id" ? b.rule_id : b.metrics[key] ?? 0;
    return av === bv ? a.rule_id - b.rule_id : av < bv ? -dir : dir;
  });
  return rows;
}

export interface Point {
  x: number;
  y: number;
  rule_id: number;
  label: string;
}

export function scatterPoints(view: RunView, xAxis: string, yAxis: string): Point[] {
  return (view.front ?? view.liveFront).map((row) => ({
    x: row.metrics[xAxis] ?? 0,
    y: row.metrics[yAxis] ?? 0,
    rule_id: row.rule_id,
    label: "text" in row ? (row as FrontEntry).text : row.rule,
  }));
}
