// Browser wiring: three parameter panels on the left, live run view on the
// right, compare tray underneath. All data flows through Api; nothing here
// recomputes a metric.

import { Api } from "./api.js";
import {
  FormState,
  WILDCARD,
  defaultForm,
  panelFor,
  presetForm,
  routeErrors,
  toConfig,
  validateForm,
} from "./config.js";
import {
  RunView,
  applyGeneration,
  applyTerminal,
  axisChoices,
  defaultAxes,
  metricNames,
  newRunView,
  progressFraction,
  scatterPoints,
  setFront,
  tableRows,
  SortSpec,
} from "./run.js";
import { TrayEntry, overlaySeries, overlayStatus } from "./compare.js";
import type { DatasetInfo, RunConfig, StreamEvent } from "./types.js";

const api = new Api("");
const PALETTE = ["#2563eb", "#dc2626", "#059669", "#d97706", "#7c3aed", "#0891b2"];

let infoByName = new Map<string, DatasetInfo>();
let presetByName = new Map<string, RunConfig>();
let form: FormState;
let view: RunView | null = null;
let sort: SortSpec | null = null;
let axes: [string, string] | null = null;
let tray: TrayEntry[] = [];
let traySelected = new Set<string>();
let renderQueued = false;

function $(id: string): HTMLElement {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing #${id}`);
  return el;
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [k, v] of Object.entries(attrs)) node.setAttribute(k, v);
  if (text !== undefined) node.textContent = text;
  return node;
}

function info(): DatasetInfo {
  const d = infoByName.get(form.dataset);
  if (!d) throw new Error(`unknown dataset ${form.dataset}`);
  return d;
}

// -- form ------------------------------------------------------------------

function bindNumber(id: string, get: () => string, set: (v: string) => void) {
  const input = $(id) as HTMLInputElement;
  input.value = get();
  input.addEventListener("input", () => {
    set(input.value);
    refreshValidation();
  });
}

function renderForm() {
  const dsSel = $("dataset") as HTMLSelectElement;
  dsSel.innerHTML = "";
  for (const name of infoByName.keys()) dsSel.append(el("option", { value: name }, name));
  dsSel.value = form.dataset;
  dsSel.onchange = () => {
    const preset = presetByName.get(dsSel.value);
    form = preset
      ? presetForm(preset, infoByName.get(dsSel.value)!)
      : defaultForm(infoByName.get(dsSel.value)!);
    renderForm();
  };

  bindNumber("population_size", () => form.population_size, (v) => (form.population_size = v));
  bindNumber("generations", () => form.generations, (v) => (form.generations = v));
  bindNumber("crossover_rate", () => form.crossover_rate, (v) => (form.crossover_rate = v));
  bindNumber("mutation_rate", () => form.mutation_rate, (v) => (form.mutation_rate = v));
  bindNumber("rng_seed", () => form.rng_seed, (v) => (form.rng_seed = v));
  bindNumber("match_threshold", () => form.match_threshold, (v) => (form.match_threshold = v));
  bindNumber("train_fraction", () => form.train_fraction, (v) => (form.train_fraction = v));
  bindNumber("dks_capacity", () => form.dks_capacity, (v) => (form.dks_capacity = v));
  bindNumber("risk_takers", () => form.agents.risk_takers, (v) => (form.agents.risk_takers = v));
  bindNumber("imitators", () => form.agents.imitators, (v) => (form.agents.imitators = v));
  bindNumber("cautious", () => form.agents.cautious, (v) => (form.agents.cautious = v));

  for (const key of [
    "strict_match_threshold",
    "tks_count_matches",
    "classify_with_all_rules",
    "test_on_train",
  ] as const) {
    const box = $(key) as HTMLInputElement;
    box.checked = form[key];
    box.onchange = () => {
      form[key] = box.checked;
      refreshValidation();
    };
  }

  const metricsDiv = $("metrics");
  metricsDiv.innerHTML = "";
  form.metrics.forEach((m, i) => {
    const row = el("div", { class: "metric-row" });
    const box = el("input", { type: "checkbox", id: `metric-${m.name}` }) as HTMLInputElement;
    box.checked = m.enabled;
    box.onchange = () => {
      form.metrics[i].enabled = box.checked;
      refreshValidation();
    };
    const dir = el("select", { class: "dir" }) as HTMLSelectElement;
    dir.append(el("option", { value: "max" }, "maximize"));
    dir.append(el("option", { value: "min" }, "minimize"));
    dir.value = m.maximize ? "max" : "min";
    dir.onchange = () => {
      form.metrics[i].maximize = dir.value === "max";
      refreshValidation();
    };
    row.append(box, el("label", { for: `metric-${m.name}` }, m.name), dir);
    metricsDiv.append(row);
  });

  const schemaBox = $("schema-enabled") as HTMLInputElement;
  schemaBox.checked = form.schemaEnabled;
  schemaBox.onchange = () => {
    form.schemaEnabled = schemaBox.checked;
    renderSchemaEditor();
    refreshValidation();
  };
  renderSchemaEditor();
  refreshValidation();
}

function renderSchemaEditor() {
  const host = $("schema-editor");
  host.innerHTML = "";
  if (!form.schemaEnabled) return;
  const data = info();
  data.attributes.forEach((meta, i) => {
    const sel = el("select") as HTMLSelectElement;
    sel.append(el("option", { value: WILDCARD }, WILDCARD));
    for (const c of meta.codes)
      sel.append(el("option", { value: String(c.code) }, `${c.code} = ${c.display}`));
    sel.value = form.schemaSlots[i] ?? WILDCARD;
    sel.onchange = () => {
      form.schemaSlots[i] = sel.value;
      refreshValidation();
    };
    const row = el("div", { class: "schema-row" });
    row.append(el("label", {}, meta.name), sel);
    host.append(row);
  });
  const clsSel = el("select") as HTMLSelectElement;
  clsSel.append(el("option", { value: WILDCARD }, WILDCARD));
  for (const c of data.class_attribute.codes)
    clsSel.append(el("option", { value: String(c.code) }, `${c.code} = ${c.display}`));
  clsSel.value = form.schemaClass;
  clsSel.onchange = () => {
    form.schemaClass = clsSel.value;
    refreshValidation();
  };
  const row = el("div", { class: "schema-row" });
  row.append(el("label", {}, data.class_attribute.name), clsSel);
  host.append(row);
}

function clearErrors() {
  document.querySelectorAll(".err").forEach((node) => (node.textContent = ""));
  $("form-banner").textContent = "";
}

function showErrors(routed: Map<string, { panel: string; message: string }>) {
  clearErrors();
  for (const [field, { message }] of routed) {
    const slot = document.querySelector(`[data-err="${field}"]`);
    if (slot) slot.textContent = message;
    else $("form-banner").textContent = `${field}: ${message}`;
  }
}

function refreshValidation() {
  const errors = validateForm(form, info());
  showErrors(routeErrors(errors));
  const launch = $("launch") as HTMLButtonElement;
  launch.disabled = errors.length > 0;
  launch.title = errors.length ? errors[0].message : "";
}

// -- run view --------------------------------------------------------------

function scheduleRender() {
  if (renderQueued) return;
  renderQueued = true;
  requestAnimationFrame(() => {
    renderQueued = false;
    renderRun();
  });
}

async function launch() {
  const config = toConfig(form, info());
  const result = await api.createRun(config);
  if (!result.ok) {
    showErrors(routeErrors(result.errors));
    return;
  }
  clearErrors();
  view = newRunView(result.handle.run_id, config);
  sort = null;
  axes = defaultAxes(view);
  traySelected.delete(result.handle.run_id);
  $("run-section").hidden = false;
  renderRun();
  followEvents(view);
}

async function followEvents(target: RunView) {
  const terminalSeen = () => target.terminalUpdates > 0;
  while (!terminalSeen()) {
    try {
      await api.events(target.runId, (ev: StreamEvent) => {
        if (view !== target) return;
        if (ev.event === "generation") {
          // replay after reconnect re-delivers old generations; skip them
          if (ev.data.generation + 1 > target.generationsDone) applyGeneration(target, ev.data);
        } else {
          applyTerminal(target, ev.data);
        }
        scheduleRender();
      });
    } catch {
      // stream dropped; the service replays on reconnect
      await new Promise((r) => setTimeout(r, 500));
    }
  }
  const front = await api.front(target.runId);
  setFront(target, front);
  scheduleRender();
}

function renderRun() {
  if (!view) return;
  $("run-id").textContent = `${view.config.dataset} run ${view.runId}`;
  $("run-state").textContent = view.state;
  ($("progress-fill") as HTMLElement).style.width = `${progressFraction(view) * 100}%`;
  $("progress-text").textContent = `${view.generationsDone} / ${view.generationsTotal} generations`;
  $("stat-rks").textContent = String(view.rksSize);
  $("stat-front").textContent = String(view.frontSize);
  $("stat-elapsed").textContent = `${view.elapsedMs.toFixed(0)} ms`;
  const stop = $("stop") as HTMLButtonElement;
  stop.disabled = view.terminalUpdates > 0;
  const summary = $("run-summary");
  if (view.summary) {
    const s = view.summary;
    summary.textContent =
      `${s.stopped_early ? "stopped early" : "finished"} after ${s.generations_run} generations; ` +
      `accuracy ${(s.accuracy * 100).toFixed(1)}% (${s.eval_mode}), ` +
      `${s.rks_count} rules kept, front size ${s.front_size}`;
  } else if (view.error) {
    summary.textContent = `failed: ${view.error}`;
  } else {
    summary.textContent = "";
  }
  ($("park") as HTMLButtonElement).disabled = view.front === null;
  renderAxes();
  renderScatter();
  renderTable();
}

function renderAxes() {
  if (!view) return;
  const names = axisChoices(view);
  if (!axes || !names.includes(axes[0]) || !names.includes(axes[1])) axes = defaultAxes(view);
  for (const [idx, id] of ["axis-x", "axis-y"].entries()) {
    const sel = $(id) as HTMLSelectElement;
    if (sel.options.length !== names.length || [...sel.options].some((o, i) => o.value !== names[i])) {
      sel.innerHTML = "";
      for (const n of names) sel.append(el("option", { value: n }, n));
    }
    sel.value = axes[idx as 0 | 1];
    sel.onchange = () => {
      axes = idx === 0 ? [sel.value, axes![1]] : [axes![0], sel.value];
      scheduleRender();
    };
  }
}

const SVG = "http://www.w3.org/2000/svg";

function drawScatter(
  host: HTMLElement,
  series: { colorIndex: number; points: { x: number; y: number; label: string }[] }[],
  xLabel: string,
  yLabel: string,
) {
  host.innerHTML = "";
  const width = 420;
  const height = 300;
  const pad = 40;
  const svg = document.createElementNS(SVG, "svg");
  svg.setAttribute("viewBox", `0 0 ${width} ${height}`);
  const all = series.flatMap((s) => s.points);
  const xs = all.map((p) => p.x);
  const ys = all.map((p) => p.y);
  const x0 = Math.min(0, ...xs);
  const x1 = Math.max(1e-9, ...xs);
  const y0 = Math.min(0, ...ys);
  const y1 = Math.max(1e-9, ...ys);
  const sx = (v: number) => pad + ((v - x0) / (x1 - x0 || 1)) * (width - 2 * pad);
  const sy = (v: number) => height - pad - ((v - y0) / (y1 - y0 || 1)) * (height - 2 * pad);

  const frame = document.createElementNS(SVG, "rect");
  frame.setAttribute("x", String(pad));
  frame.setAttribute("y", String(pad / 2));
  frame.setAttribute("width", String(width - 2 * pad));
  frame.setAttribute("height", String(height - 1.5 * pad));
  frame.setAttribute("class", "plot-frame");
  svg.append(frame);

  const tag = (x: number, y: number, text: string, cls: string) => {
    const t = document.createElementNS(SVG, "text");
    t.setAttribute("x", String(x));
    t.setAttribute("y", String(y));
    t.setAttribute("class", cls);
    t.textContent = text;
    svg.append(t);
  };
  tag(width / 2, height - 6, xLabel, "axis-label");
  tag(12, height / 2, yLabel, "axis-label vertical");
  tag(pad, height - pad + 14, x0.toFixed(2), "tick");
  tag(width - pad, height - pad + 14, x1.toFixed(2), "tick");
  tag(pad - 4, height - pad, y0.toFixed(2), "tick end");
  tag(pad - 4, pad / 2 + 8, y1.toFixed(2), "tick end");

  for (const s of series) {
    for (const p of s.points) {
      const dot = document.createElementNS(SVG, "circle");
      dot.setAttribute("cx", String(sx(p.x)));
      dot.setAttribute("cy", String(sy(p.y)));
      dot.setAttribute("r", "5");
      dot.setAttribute("fill", PALETTE[s.colorIndex % PALETTE.length]);
      dot.setAttribute("fill-opacity", "0.75");
      const title = document.createElementNS(SVG, "title");
      title.textContent = p.label;
      dot.append(title);
      svg.append(dot);
    }
  }
  host.append(svg);
}

function renderScatter() {
  if (!view || !axes) return;
  drawScatter(
    $("scatter"),
    [{ colorIndex: 0, points: scatterPoints(view, axes[0], axes[1]) }],
    axes[0],
    axes[1],
  );
}

function renderTable() {
  if (!view) return;
  const names = metricNames(view.config);
  const table = $("rules-table") as HTMLTableElement;
  table.innerHTML = "";
  const head = el("tr");
  const headers: [string, string][] = [["rule_id", "#"], ...names.map((n) => [n, n] as [string, string])];
  for (const [key, label] of headers) {
    const th = el("th", { "data-key": key }, label + (sort?.key === key ? (sort.dir > 0 ? " ^" : " v") : ""));
    th.onclick = () => {
      sort = sort && sort.key === key ? { key, dir: sort.dir > 0 ? -1 : 1 } : { key, dir: -1 };
      scheduleRender();
    };
    head.append(th);
  }
  head.append(el("th", {}, "rule"));
  const thead = el("thead");
  thead.append(head);
  table.append(thead);
  const body = el("tbody");
  for (const row of tableRows(view, sort ?? undefined)) {
    const tr = el("tr");
    tr.append(el("td", {}, String(row.rule_id)));
    for (const n of names) tr.append(el("td", { class: "num" }, (row.metrics[n] ?? 0).toFixed(4)));
    tr.append(el("td", { class: "rule" }, "text" in row ? (row as { text: string }).text : row.rule));
    body.append(tr);
  }
  table.append(body);
}

// -- compare tray ----------------------------------------------------------

function parkCurrent() {
  if (!view || view.front === null) return;
  if (tray.some((t) => t.runId === view!.runId)) return;
  tray.push({
    runId: view.runId,
    label: `${view.config.dataset} ${view.runId.slice(0, 6)} (${metricNames(view.config).length} metrics)`,
    metricNames: metricNames(view.config),
    front: view.front,
  });
  traySelected.add(view.runId);
  renderTray();
}

function renderTray() {
  const list = $("tray-list");
  list.innerHTML = "";
  for (const entry of tray) {
    const row = el("label", { class: "tray-row" });
    const box = el("input", { type: "checkbox" }) as HTMLInputElement;
    box.checked = traySelected.has(entry.runId);
    box.onchange = () => {
      if (box.checked) traySelected.add(entry.runId);
      else traySelected.delete(entry.runId);
      renderTray();
    };
    row.append(box, el("span", {}, entry.label));
    list.append(row);
  }
  const chosen = tray.filter((t) => traySelected.has(t.runId));
  const status = overlayStatus(chosen);
  const note = $("compare-note");
  const xSel = $("compare-x") as HTMLSelectElement;
  const ySel = $("compare-y") as HTMLSelectElement;
  if (!status.ok) {
    note.textContent = tray.length ? status.reason : "";
    xSel.disabled = ySel.disabled = true;
    $("compare-plot").innerHTML = "";
    $("compare-legend").innerHTML = "";
    return;
  }
  note.textContent = "";
  xSel.disabled = ySel.disabled = false;
  const fill = (sel: HTMLSelectElement, preferred: string) => {
    const keep = status.axes.includes(sel.value) ? sel.value : preferred;
    sel.innerHTML = "";
    for (const n of status.axes) sel.append(el("option", { value: n }, n));
    sel.value = status.axes.includes(keep) ? keep : status.axes[0];
  };
  fill(xSel, status.axes.includes("coverage") ? "coverage" : status.axes[0]);
  fill(ySel, status.axes.includes("confidence") ? "confidence" : status.axes[1] ?? status.axes[0]);
  xSel.onchange = ySel.onchange = renderTray;
  const series = overlaySeries(chosen, xSel.value, ySel.value);
  drawScatter($("compare-plot"), series, xSel.value, ySel.value);
  const legend = $("compare-legend");
  legend.innerHTML = "";
  for (const s of series) {
    const sw = el("span", { class: "swatch" });
    sw.style.background = PALETTE[s.colorIndex % PALETTE.length];
    const item = el("span", { class: "legend-item" });
    item.append(sw, el("span", {}, s.label));
    legend.append(item);
  }
}

// -- boot ------------------------------------------------------------------

async function boot() {
  const [datasets, presets] = await Promise.all([api.datasets(), api.presets()]);
  infoByName = new Map(datasets.map((d) => [d.name, d]));
  presetByName = new Map(presets.map((p) => [p.dataset, p]));
  const first = datasets[0];
  const preset = presetByName.get(first.name);
  form = preset ? presetForm(preset, first) : defaultForm(first);
  renderForm();

  $("launch").onclick = () => void launch();
  $("stop").onclick = () => void (view && api.stop(view.runId));
  $("park").onclick = parkCurrent;
}

boot().catch((err) => {
  $("form-banner").textContent = `cannot reach the service: ${err}`;
});
