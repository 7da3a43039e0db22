/** DOM wiring for the explorer page. All state lives in ExplorerSession;
 * this module only renders it and forwards clicks. */

import { ApiClient, ApiError, type Diagnostic } from "./api.js";
import { formatChip, formatDetail } from "./format.js";
import { renderGraph } from "./graph.js";
import { ExplorerSession, StaleListingError, type ViewState } from "./session.js";

const api = new ApiClient("..");
const session = new ExplorerSession(api);
let violating: Set<number> | null = null;

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (node === null) throw new Error(`missing element #${id}`);
  return node as T;
}

function showBanner(text: string): void {
  const banner = el<HTMLDivElement>("banner");
  banner.textContent = text;
  banner.hidden = text === "";
}

function showDiagnostics(diagnostics: Diagnostic[], source: string): void {
  const panel = el<HTMLDivElement>("diagnostics");
  panel.innerHTML = "";
  panel.hidden = diagnostics.length === 0;
  const lines = source.split("\n");
  for (const d of diagnostics) {
    const item = document.createElement("div");
    item.className = `diagnostic ${d.severity}`;
    const line = lines[d.line - 1] ?? "";
    const marker = " ".repeat(Math.max(d.column - 1, 0)) + "^".repeat(Math.max(d.length, 1));
    item.textContent = `${d.line}:${d.column}: ${d.severity}: ${d.message} [${d.code}]\n${line}\n${marker}`;
    panel.appendChild(item);
  }
}

function render(view: ViewState): void {
  el<HTMLDivElement>("state-term").textContent =
    `state ${view.currentState}: ${view.currentTerm}`;
  el<HTMLSpanElement>("history").textContent = `${view.historyStack.length} step(s)`;

  const chips = el<HTMLDivElement>("chips");
  chips.innerHTML = "";
  if (view.transitionList.length === 0) {
    const none = document.createElement("em");
    none.textContent = "no transitions";
    chips.appendChild(none);
  }
  for (const entry of view.transitionList) {
    const chip = document.createElement("button");
    chip.className = "chip";
    chip.textContent = formatChip(entry);
    chip.title = formatDetail(entry);
    chip.addEventListener("click", () => {
      void fire(entry.index);
    });
    chips.appendChild(chip);
  }

  el<HTMLDivElement>("graph").innerHTML = renderGraph(view.graph, {
    current: view.currentState,
    violating: violating ?? undefined,
  });
}

async function fire(index: number): Promise<void> {
  try {
    render(await session.fire(index));
    showBanner("");
  } catch (err) {
    if (err instanceof StaleListingError) {
      render(err.view);
      showBanner("listing was stale; refreshed");
      return;
    }
    showBanner(String(err));
  }
}

async function load(): Promise<void> {
  const source = el<HTMLTextAreaElement>("source").value;
  violating = null;
  try {
    const view = await session.load(source);
    showDiagnostics([], source);
    showBanner("");
    render(view);
  } catch (err) {
    if (err instanceof ApiError && err.status === 400) {
      showDiagnostics(err.diagnostics, source);
      return;
    }
    showBanner(`network failure: ${String(err)}`);
  }
}

async function undo(): Promise<void> {
  try {
    render(await session.undoStep());
    showBanner("");
  } catch (err) {
    showBanner(String(err));
  }
}

async function overlay(): Promise<void> {
  const view = session.view;
  if (view === null) return;
  try {
    // Coherence reports reference exploration-order state ids, which need
    // not match the ids this session interned; translate through the terms.
    const [report, lts] = await Promise.all([
      api.coherence(view.programId),
      api.lts(view.programId),
    ]);
    const termOf = new Map(lts.states.map((s) => [s.id, s.term]));
    const violatingTerms = new Set(
      report.violations.map((v) => termOf.get(v.state)).filter((t) => t !== undefined),
    );
    violating = new Set(
      [...view.graph.nodes.entries()]
        .filter(([, term]) => violatingTerms.has(term))
        .map(([id]) => id),
    );
    showBanner(
      `coherence: ${report.verdict} (${report.statesChecked} states, ` +
        `${report.violations.length} violation(s))`,
    );
    render(view);
  } catch (err) {
    showBanner(String(err));
  }
}

el<HTMLButtonElement>("load").addEventListener("click", () => void load());
el<HTMLButtonElement>("undo").addEventListener("click", () => void undo());
el<HTMLButtonElement>("overlay").addEventListener("click", () => void overlay());
