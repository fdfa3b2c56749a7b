// Browser entry point: wires the scenario editor, job list, result view,
// and diff view to the /v1 API. All model math happens server-side; this
// file only renders documents it fetched.

import { ApiError, isNotDone, PlannerApi } from "./api.js";
import type { ColorScale } from "./bins.js";
import { divergingScale, legendEntries } from "./bins.js";
import type { ScenarioDraft } from "./draft.js";
import {
  blankDraft,
  cycleCounty,
  DEFAULT_DETECTION,
  draftFromScenario,
  draftToScenario,
  orderStatus,
  setCategory,
  setDetection,
  setFriendsShare,
  validateDraft,
} from "./draft.js";
import { diffResults, maxAbsDelta } from "./diff.js";
import { layerPoints, layerScale, makeProjection } from "./map.js";
import { pollJob, TokenGate } from "./poll.js";
import { PRESETS } from "./presets.js";
import type { RawInterval } from "./rawjson.js";
import { extractRawTotals } from "./rawjson.js";
import type { DistrictRow, SortKey } from "./table.js";
import { districtRows, sortRows } from "./table.js";
import type {
  FeatureCollection,
  JobRecord,
  Quantity,
  ResultDoc,
  ScenarioDoc,
} from "./types.js";

const LAYERS: Quantity[] = [
  "evac_rate",
  "exportations",
  "receptions",
  "importations",
  "importations_per10k",
];

const VIEW = { width: 640, height: 560, pad: 24 };
const SVG_NS = "http://www.w3.org/2000/svg";

const STATUS_FILL: Record<string, string> = {
  none: "#cfd8dc",
  voluntary: "#ffb300",
  mandatory: "#e53935",
};

interface LoadedResult {
  jobId: string;
  doc: ResultDoc;
  geojson: FeatureCollection;
  rawTotals: Record<string, RawInterval>;
}

interface AppState {
  api: PlannerApi;
  draft: ScenarioDraft;
  countyLayer: FeatureCollection | null;
  jobs: JobRecord[];
  activeJobId: string | null;
  result: LoadedResult | null;
  layer: Quantity;
  sortKey: SortKey;
  sortDir: "asc" | "desc";
  diffA: LoadedResult | null;
  diffB: LoadedResult | null;
  diffLayer: Quantity;
  banner: { message: string; retry: () => void } | null;
  busy: string | null;
}

const resultGate = new TokenGate();
let activePoll: { cancel(): void } | null = null;

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  ...children: (Node | string)[]
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [k, v] of Object.entries(attrs)) {
    if (k === "class") node.className = v;
    else node.setAttribute(k, v);
  }
  node.append(...children);
  return node;
}

function svgEl(tag: string, attrs: Record<string, string>): SVGElement {
  const node = document.createElementNS(SVG_NS, tag);
  for (const [k, v] of Object.entries(attrs)) node.setAttribute(k, v);
  return node;
}

const fmtInt = new Intl.NumberFormat("en-US", { maximumFractionDigits: 0 });
const fmtFlow = new Intl.NumberFormat("en-US", {
  minimumFractionDigits: 1,
  maximumFractionDigits: 1,
});

function fmtCell(key: SortKey, value: number | string): string {
  if (typeof value !== "number") return String(value);
  if (key === "evac_rate" || key === "importations_per10k") return value.toFixed(3);
  if (key === "population" || key === "counties") return fmtInt.format(value);
  return fmtFlow.format(value);
}

function apiBase(): string {
  if (typeof window === "undefined") return "";
  const param = new URLSearchParams(window.location.search).get("api");
  return param ?? "";
}

export function createState(): AppState {
  return {
    api: new PlannerApi(apiBase()),
    draft: blankDraft(""),
    countyLayer: null,
    jobs: [],
    activeJobId: null,
    result: null,
    layer: "importations",
    sortKey: "importations_per10k",
    sortDir: "desc",
    diffA: null,
    diffB: null,
    diffLayer: "importations",
    banner: null,
    busy: null,
  };
}

const state = createState();

function setBanner(message: string, retry: () => void): void {
  state.banner = { message, retry };
  render();
}

function clearBanner(): void {
  state.banner = null;
}

// --- boot -----------------------------------------------------------------

async function boot(): Promise<void> {
  state.busy = "loading datasets";
  render();
  let asOf = "";
  try {
    const summary = await state.api.getDatasetsSummary();
    asOf = summary.cases.last_date ?? "";
    clearBanner();
  } catch {
    setBanner("service unreachable: could not load dataset summary", () => void boot());
    state.busy = null;
    render();
    return;
  }
  state.draft = blankDraft(asOf);
  await refreshJobs();
  await loadCountyLayer(asOf);
  state.busy = null;
  render();
}

/**
 * The API exposes county geometry only through result GeoJSON, so a
 * zero-order single-replicate probe run supplies the editor's base layer.
 */
async function loadCountyLayer(asOf: string): Promise<void> {
  if (state.countyLayer) return;
  state.busy = "loading county geometry";
  render();
  const probe: ScenarioDoc = {
    name: "geometry probe",
    category: 0,
    warned: [],
    mandatory: [],
    voluntary: [],
    split: { friends: 0.6, hotel: 0.4 },
    prevalence: { source: "computed", as_of: asOf, window_days: 10 },
    mc_samples: 1,
    seed: 1,
  };
  try {
    const { id } = await state.api.submitScenario(probe);
    const handle = pollJob(() => state.api.getJob(id));
    const record = await handle.settled;
    if (record.status !== "done") {
      throw new Error(record.error?.message ?? "probe run failed");
    }
    state.countyLayer = await state.api.getResultGeojson(id);
    await state.api.deleteJob(id);
    clearBanner();
  } catch (err) {
    setBanner(`service unreachable: ${describe(err)}`, () => void loadCountyLayer(asOf));
  }
  state.busy = null;
  render();
}

function describe(err: unknown): string {
  if (err instanceof ApiError) return err.message;
  if (err instanceof Error) return err.message;
  return String(err);
}

// --- jobs -----------------------------------------------------------------

async function refreshJobs(): Promise<void> {
  try {
    state.jobs = await state.api.listJobs();
    clearBanner();
  } catch (err) {
    setBanner(`service unreachable: ${describe(err)}`, () => void refreshJobs());
  }
  render();
}

async function submitDraft(): Promise<void> {
  let doc: ScenarioDoc;
  try {
    doc = draftToScenario(state.draft);
  } catch (err) {
    setBanner(describe(err), () => void 0);
    return;
  }
  try {
    const { id } = await state.api.submitScenario(doc);
    state.draft = { ...state.draft, dirty: false };
    state.activeJobId = id;
    await refreshJobs();
    watchJob(id);
  } catch (err) {
    setBanner(`submission rejected: ${describe(err)}`, () => void submitDraft());
  }
  render();
}

function watchJob(id: string): void {
  activePoll?.cancel();
  const token = resultGate.issue();
  const handle = pollJob(
    () => state.api.getJob(id),
    {},
    () => void refreshJobs(),
  );
  activePoll = handle;
  handle.settled
    .then(async (record) => {
      if (!resultGate.isCurrent(token)) return; // stale: a newer watch started
      if (record.status === "done") await loadResult(id, token);
      await refreshJobs();
    })
    .catch(() => void 0);
}

async function loadResult(id: string, token?: number): Promise<void> {
  const tok = token ?? resultGate.issue();
  try {
    const text = await state.api.getResultText(id);
    const geojson = await state.api.getResultGeojson(id);
    if (!resultGate.isCurrent(tok)) return; // a newer request superseded this one
    state.result = {
      jobId: id,
      doc: JSON.parse(text) as ResultDoc,
      geojson,
      rawTotals: extractRawTotals(text),
    };
    state.activeJobId = id;
    clearBanner();
  } catch (err) {
    if (isNotDone(err)) {
      state.activeJobId = id;
      watchJob(id);
      return;
    }
    setBanner(`could not load result: ${describe(err)}`, () => void loadResult(id));
  }
  render();
}

async function removeJob(id: string): Promise<void> {
  try {
    await state.api.deleteJob(id);
    if (state.result?.jobId === id) state.result = null;
  } catch (err) {
    setBanner(`delete failed: ${describe(err)}`, () => void 0);
  }
  await refreshJobs();
}

// --- rendering ------------------------------------------------------------

function render(): void {
  const root = document.getElementById("app");
  if (!root) return;
  root.replaceChildren(
    renderBanner(),
    renderEditor(),
    renderJobs(),
    renderResult(),
    renderDiff(),
  );
}

function renderBanner(): HTMLElement {
  const box = el("div", { class: "banner-slot" });
  if (state.busy) {
    box.append(el("div", { class: "busy" }, `⏳ ${state.busy}...`));
  }
  if (state.banner) {
    const retry = el("button", {}, "retry");
    retry.onclick = () => {
      const r = state.banner?.retry;
      clearBanner();
      r?.();
    };
    box.append(el("div", { class: "banner" }, state.banner.message, " ", retry));
  }
  return box;
}

function renderEditor(): HTMLElement {
  const pane = el("section", { class: "pane" }, el("h2", {}, "Scenario editor"));
  pane.append(renderEditorControls());
  if (state.countyLayer) {
    pane.append(renderEditorMap(state.countyLayer));
  } else if (!state.busy) {
    pane.append(el("p", { class: "hint" }, "county geometry not loaded"));
  }
  const problems = validateDraft(state.draft);
  if (problems.length > 0) {
    pane.append(el("p", { class: "problems" }, problems.join("; ")));
  }
  return pane;
}

function renderEditorControls(): HTMLElement {
  const d = state.draft;
  const controls = el("div", { class: "controls" });

  const name = el("input", { value: d.name }) as HTMLInputElement;
  name.onchange = () => {
    state.draft = { ...d, name: name.value, dirty: true };
    render();
  };
  controls.append(labeled("name", name));

  const preset = el("select", {}) as HTMLSelectElement;
  preset.append(el("option", { value: "" }, "(blank)"));
  for (const key of Object.keys(PRESETS)) {
    preset.append(el("option", { value: key }, key));
  }
  preset.onchange = () => {
    if (preset.value) state.draft = draftFromScenario(PRESETS[preset.value]);
    else state.draft = blankDraft(d.asOf);
    render();
  };
  controls.append(labeled("preset", preset));

  const cat = el("input", {
    type: "range",
    min: "0",
    max: "5",
    step: "1",
    value: String(d.category),
  }) as HTMLInputElement;
  cat.oninput = () => {
    state.draft = setCategory(state.draft, Number(cat.value));
    render();
  };
  controls.append(labeled(`category: ${d.category}`, cat));

  const split = el("input", {
    type: "range",
    min: "0",
    max: "1",
    step: "0.05",
    value: String(d.friendsShare),
  }) as HTMLInputElement;
  split.oninput = () => {
    state.draft = setFriendsShare(state.draft, Number(split.value));
    render();
  };
  controls.append(
    labeled(
      `split: ${d.friendsShare.toFixed(2)} friends / ${(1 - d.friendsShare).toFixed(2)} hotel`,
      split,
    ),
  );

  const windowDays = el("input", {
    type: "number",
    min: "1",
    value: String(d.windowDays),
  }) as HTMLInputElement;
  windowDays.onchange = () => {
    state.draft = { ...state.draft, windowDays: Number(windowDays.value), dirty: true };
    render();
  };
  controls.append(labeled("case window (days)", windowDays));

  const asOf = el("input", { type: "date", value: d.asOf }) as HTMLInputElement;
  asOf.onchange = () => {
    state.draft = { ...state.draft, asOf: asOf.value, dirty: true };
    render();
  };
  controls.append(labeled("as of", asOf));

  const detection = el("input", { type: "checkbox" }) as HTMLInputElement;
  detection.checked = d.detection !== null;
  detection.onchange = () => {
    state.draft = setDetection(
      state.draft,
      detection.checked ? { ...DEFAULT_DETECTION } : null,
    );
    render();
  };
  controls.append(labeled("custom detection rates", detection));
  if (d.detection) {
    for (const bound of ["low", "mid", "high"] as const) {
      const input = el("input", {
        type: "number",
        step: "0.01",
        min: "0.01",
        max: "1",
        value: String(d.detection[bound]),
      }) as HTMLInputElement;
      input.onchange = () => {
        const det = { ...state.draft.detection! , [bound]: Number(input.value) };
        state.draft = setDetection(state.draft, det);
        render();
      };
      controls.append(labeled(`detection ${bound}`, input));
    }
  }

  const samples = el("input", {
    type: "number",
    min: "1",
    value: String(d.mcSamples),
  }) as HTMLInputElement;
  samples.onchange = () => {
    state.draft = { ...state.draft, mcSamples: Number(samples.value), dirty: true };
    render();
  };
  controls.append(labeled("replicates", samples));

  const seed = el("input", { type: "number", value: String(d.seed) }) as HTMLInputElement;
  seed.onchange = () => {
    state.draft = { ...state.draft, seed: Number(seed.value), dirty: true };
    render();
  };
  controls.append(labeled("seed", seed));

  const submit = el("button", { class: "submit" }, d.dirty ? "run scenario *" : "run scenario");
  submit.onclick = () => void submitDraft();
  controls.append(submit);

  controls.append(
    el(
      "p",
      { class: "hint" },
      `orders: ${state.draft.mandatory.size} mandatory, ` +
        `${state.draft.voluntary.size} voluntary ` +
        "(click a county to cycle none → voluntary → mandatory → none)",
    ),
  );
  return controls;
}

function renderEditorMap(fc: FeatureCollection): SVGElement {
  const svg = svgEl("svg", {
    viewBox: `0 0 ${VIEW.width} ${VIEW.height}`,
    class: "map",
  });
  const proj = makeProjection(fc, VIEW);
  for (const f of fc.features) {
    const [lon, lat] = f.geometry.coordinates;
    const [x, y] = proj(lon, lat);
    const fips = String(f.properties.fips);
    const status = orderStatus(state.draft, fips);
    const dot = svgEl("circle", {
      cx: String(x),
      cy: String(y),
      r: status === "none" ? "4" : "6",
      fill: STATUS_FILL[status],
      stroke: state.draft.selected === fips ? "#000" : "#78909c",
      "stroke-width": state.draft.selected === fips ? "2" : "0.5",
    });
    dot.append(svgEl("title", {}));
    dot.querySelector("title")!.textContent =
      `${f.properties.name} (${fips}): ${status}`;
    dot.addEventListener("click", () => {
      state.draft = cycleCounty(state.draft, fips);
      render();
    });
    svg.append(dot);
  }
  return svg;
}

function renderJobs(): HTMLElement {
  const pane = el("section", { class: "pane" }, el("h2", {}, "Runs"));
  const refresh = el("button", {}, "refresh");
  refresh.onclick = () => void refreshJobs();
  pane.append(refresh);
  const list = el("ul", { class: "jobs" });
  for (const job of state.jobs) {
    const item = el(
      "li",
      { class: job.id === state.activeJobId ? "active" : "" },
      `${job.scenario_name ?? "?"} · ${job.status}`,
    );
    if (job.status === "pending" || job.status === "running") {
      item.append(" ", el("span", { class: "spinner" }, "⧖"));
    }
    if (job.status === "done") {
      const view = el("button", {}, "view");
      view.onclick = () => void loadResult(job.id);
      item.append(" ", view);
    }
    if (job.status === "failed") {
      item.append(" ", el("span", { class: "problems" }, job.error?.message ?? "failed"));
    }
    const del = el("button", {}, "delete");
    del.onclick = () => void removeJob(job.id);
    item.append(" ", del);
    list.append(item);
  }
  pane.append(list);
  return pane;
}

function renderResult(): HTMLElement {
  const pane = el("section", { class: "pane" }, el("h2", {}, "Result"));
  const res = state.result;
  if (!res) {
    pane.append(el("p", { class: "hint" }, "no result loaded"));
    return pane;
  }
  pane.append(
    el(
      "p",
      {},
      `${res.doc.scenario} · ${res.doc.mc_samples} replicates · ` +
        `seed ${res.doc.seed} · level ${res.doc.level}`,
    ),
  );
  for (const warning of res.doc.warnings) {
    pane.append(el("p", { class: "problems" }, warning));
  }
  pane.append(renderTotals(res));

  const layerSel = el("select", {}) as HTMLSelectElement;
  for (const q of LAYERS) {
    const opt = el("option", { value: q }, q) as HTMLOptionElement;
    opt.selected = q === state.layer;
    layerSel.append(opt);
  }
  layerSel.onchange = () => {
    state.layer = layerSel.value as Quantity;
    render();
  };
  pane.append(labeled("layer", layerSel));

  const scale = layerScale(res.geojson, state.layer);
  pane.append(renderLegend(scale));
  pane.append(renderResultMap(res.geojson, scale));
  pane.append(renderDistrictTable(res.doc));
  return pane;
}

function renderTotals(res: LoadedResult): HTMLElement {
  // raw literals from the response bytes, shown verbatim
  const table = el("table", { class: "totals" });
  table.append(
    el("tr", {}, el("th", {}, "total"), el("th", {}, "low"), el("th", {}, "mid"), el("th", {}, "high")),
  );
  for (const [quantity, bounds] of Object.entries(res.rawTotals)) {
    table.append(
      el(
        "tr",
        {},
        el("td", {}, quantity),
        el("td", { class: "verbatim" }, bounds.low),
        el("td", { class: "verbatim" }, bounds.mid),
        el("td", { class: "verbatim" }, bounds.high),
      ),
    );
  }
  return table;
}

function renderLegend(scale: ColorScale): HTMLElement {
  const box = el("div", { class: "legend" });
  for (const entry of legendEntries(scale)) {
    const chip = el("span", { class: "chip" }, entry.label);
    chip.style.background = entry.color;
    box.append(chip);
  }
  return box;
}

function renderResultMap(fc: FeatureCollection, scale: ColorScale): SVGElement {
  const svg = svgEl("svg", {
    viewBox: `0 0 ${VIEW.width} ${VIEW.height}`,
    class: "map",
  });
  for (const pt of layerPoints(fc, state.layer, scale, VIEW)) {
    const dot = svgEl("circle", {
      cx: String(pt.x),
      cy: String(pt.y),
      r: "5",
      fill: pt.color,
      stroke: "#555",
      "stroke-width": "0.4",
    });
    dot.append(svgEl("title", {}));
    dot.querySelector("title")!.textContent =
      `${pt.name}: ${state.layer} = ${pt.value}`;
    svg.append(dot);
  }
  return svg;
}

function renderDistrictTable(doc: ResultDoc): HTMLElement {
  const rows = sortRows(districtRows(doc), state.sortKey, state.sortDir);
  const table = el("table", { class: "districts" });
  const header = el("tr", {});
  const cols: SortKey[] = [
    "district",
    "counties",
    "population",
    "evac_rate",
    "evacuees",
    "exportations",
    "receptions",
    "importations",
    "importations_per10k",
  ];
  for (const key of cols) {
    const th = el("th", {}, key + (state.sortKey === key ? (state.sortDir === "desc" ? " ▼" : " ▲") : ""));
    th.onclick = () => {
      if (state.sortKey === key) {
        state.sortDir = state.sortDir === "desc" ? "asc" : "desc";
      } else {
        state.sortKey = key;
        state.sortDir = "desc";
      }
      render();
    };
    header.append(th);
  }
  table.append(header);
  for (const row of rows) {
    const tr = el("tr", {});
    for (const key of cols) tr.append(el("td", {}, fmtCell(key, row[key])));
    table.append(tr);
  }
  return table;
}

function renderDiff(): HTMLElement {
  const pane = el("section", { class: "pane" }, el("h2", {}, "Compare"));
  const done = state.jobs.filter((j) => j.status === "done");

  const makePicker = (which: "A" | "B"): HTMLSelectElement => {
    const sel = el("select", {}) as HTMLSelectElement;
    sel.append(el("option", { value: "" }, `(pick run ${which})`));
    const current = which === "A" ? state.diffA : state.diffB;
    for (const j of done) {
      const opt = el(
        "option",
        { value: j.id },
        `${j.scenario_name ?? "?"} ${j.id.slice(0, 8)}`,
      ) as HTMLOptionElement;
      opt.selected = current?.jobId === j.id;
      sel.append(opt);
    }
    sel.onchange = () => void pickDiffSide(which, sel.value);
    return sel;
  };

  pane.append(labeled("baseline", makePicker("A")), labeled("variant", makePicker("B")));

  if (!state.diffA || !state.diffB) {
    pane.append(el("p", { class: "hint" }, "pick two finished runs to compare"));
    return pane;
  }

  let diff;
  try {
    diff = diffResults(state.diffA.doc, state.diffB.doc);
  } catch (err) {
    pane.append(el("p", { class: "problems" }, describe(err)));
    return pane;
  }

  const layerSel = el("select", {}) as HTMLSelectElement;
  for (const q of LAYERS) {
    const opt = el("option", { value: q }, q) as HTMLOptionElement;
    opt.selected = q === state.diffLayer;
    layerSel.append(opt);
  }
  layerSel.onchange = () => {
    state.diffLayer = layerSel.value as Quantity;
    render();
  };
  pane.append(labeled("delta layer", layerSel));

  const scale = divergingScale(maxAbsDelta(diff, state.diffLayer));
  pane.append(renderLegend(scale));
  pane.append(renderDiffMap(diff, scale));
  pane.append(renderDiffTable(diff));
  return pane;
}

async function pickDiffSide(which: "A" | "B", jobId: string): Promise<void> {
  if (!jobId) {
    if (which === "A") state.diffA = null;
    else state.diffB = null;
    render();
    return;
  }
  try {
    const text = await state.api.getResultText(jobId);
    const loaded: LoadedResult = {
      jobId,
      doc: JSON.parse(text) as ResultDoc,
      geojson: await state.api.getResultGeojson(jobId),
      rawTotals: extractRawTotals(text),
    };
    if (which === "A") state.diffA = loaded;
    else state.diffB = loaded;
  } catch (err) {
    setBanner(`could not load run: ${describe(err)}`, () => void 0);
  }
  render();
}

function renderDiffMap(
  diff: ReturnType<typeof diffResults>,
  scale: ColorScale,
): SVGElement {
  const svg = svgEl("svg", {
    viewBox: `0 0 ${VIEW.width} ${VIEW.height}`,
    class: "map",
  });
  const fc = state.diffA!.geojson;
  const proj = makeProjection(fc, VIEW);
  const deltaByFips = new Map(
    diff.counties.map((c) => [c.id, c.deltas[state.diffLayer].mid]),
  );
  for (const f of fc.features) {
    const [lon, lat] = f.geometry.coordinates;
    const [x, y] = proj(lon, lat);
    const fips = String(f.properties.fips);
    const delta = deltaByFips.get(fips) ?? 0;
    const dot = svgEl("circle", {
      cx: String(x),
      cy: String(y),
      r: "5",
      fill: scale.colors[colorIndex(scale, delta)],
      stroke: "#555",
      "stroke-width": "0.4",
    });
    dot.append(svgEl("title", {}));
    dot.querySelector("title")!.textContent =
      `${f.properties.name}: Δ${state.diffLayer} = ${delta}`;
    svg.append(dot);
  }
  return svg;
}

function colorIndex(scale: ColorScale, value: number): number {
  for (let i = 1; i < scale.edges.length; i++) {
    if (value <= scale.edges[i]) return Math.min(i - 1, scale.colors.length - 1);
  }
  return scale.colors.length - 1;
}

function renderDiffTable(diff: ReturnType<typeof diffResults>): HTMLElement {
  const table = el("table", { class: "districts" });
  table.append(
    el(
      "tr",
      {},
      el("th", {}, "district"),
      ...LAYERS.map((q) => el("th", {}, `Δ ${q}`)),
    ),
  );
  const rows = [...diff.districts].sort(
    (a, b) =>
      Math.abs(b.deltas[state.diffLayer].mid) - Math.abs(a.deltas[state.diffLayer].mid),
  );
  for (const entry of rows) {
    const tr = el("tr", {}, el("td", {}, entry.name));
    for (const q of LAYERS) {
      tr.append(el("td", {}, entry.deltas[q].mid.toPrecision(4)));
    }
    table.append(tr);
  }
  const totals = el("tr", { class: "totals-row" }, el("td", {}, "TOTAL"));
  for (const q of LAYERS) {
    const t = diff.totals[q === "evac_rate" ? "evacuees" : q];
    totals.append(el("td", {}, t ? t.mid.toPrecision(4) : "—"));
  }
  table.append(totals);
  return table;
}

function labeled(text: string, control: HTMLElement): HTMLElement {
  return el("label", { class: "field" }, el("span", {}, text), control);
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  void boot();
}
