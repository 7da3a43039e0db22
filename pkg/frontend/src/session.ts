/** Client-side mirror of one server stepping session.
 *
 * The transition list is stored exactly as served (no re-derivation), the
 * history stack tracks fired-minus-undone steps, and the visited graph only
 * ever grows: undo moves the cursor back but keeps explored nodes visible.
 */

import { ApiClient, ApiError, type TransitionEntry } from "./api.js";

export interface GraphEdge {
  from: number;
  to: number;
  entry: TransitionEntry;
}

export interface Graph {
  nodes: Map<number, string>; // state id -> term text
  edges: GraphEdge[];
}

export interface ViewState {
  programId: string;
  currentState: number;
  currentTerm: string;
  transitionList: TransitionEntry[];
  historyStack: { from: number; index: number; to: number }[];
  graph: Graph;
}

/** A fired index no longer matched the server's listing; the session has
 * already refreshed the list when this is thrown. */
export class StaleListingError extends Error {
  constructor(readonly view: ViewState) {
    super("transition listing was stale and has been refreshed");
  }
}

export class ExplorerSession {
  view: ViewState | null = null;

  constructor(readonly api: ApiClient) {}

  private get current(): ViewState {
    if (this.view === null) {
      throw new Error("no program loaded");
    }
    return this.view;
  }

  /** POST the source and show the initial state and its transitions.
   * Diagnostics (status 400) propagate as ApiError to the caller. */
  async load(source: string): Promise<ViewState> {
    const { programId } = await this.api.loadProgram(source);
    const snapshot = await this.api.lts(programId, 1);
    const initial = snapshot.states[0];
    const term = initial === undefined ? "" : initial.term;
    const transitionList = await this.api.transitions(programId, 0);
    this.view = {
      programId,
      currentState: 0,
      currentTerm: term,
      transitionList,
      historyStack: [],
      graph: { nodes: new Map([[0, term]]), edges: [] },
    };
    return this.view;
  }

  private async refresh(view: ViewState): Promise<ViewState> {
    view.transitionList = await this.api.transitions(view.programId, view.currentState);
    return view;
  }

  async fire(index: number): Promise<ViewState> {
    const view = this.current;
    const entry = view.transitionList[index];
    try {
      const result = await this.api.step(view.programId, view.currentState, index);
      if (entry !== undefined) {
        view.graph.nodes.set(result.newState, result.stateTerm);
        view.graph.edges.push({ from: view.currentState, to: result.newState, entry });
      }
      view.historyStack.push({ from: view.currentState, index, to: result.newState });
      view.currentState = result.newState;
      view.currentTerm = result.stateTerm;
      return this.refresh(view);
    } catch (err) {
      if (err instanceof ApiError && err.status === 409) {
        throw new StaleListingError(await this.refresh(view));
      }
      throw err;
    }
  }

  async undoStep(): Promise<ViewState> {
    const view = this.current;
    const result = await this.api.undo(view.programId);
    const undone = view.historyStack.pop();
    if (undone !== undefined && undone.from !== result.newState) {
      throw new Error(
        `session diverged from server: expected state ${undone.from}, got ${result.newState}`,
      );
    }
    view.currentState = result.newState;
    view.currentTerm = result.stateTerm;
    return this.refresh(view);
  }
}
