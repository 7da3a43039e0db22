/** Live-server session tests: UI parity with the API, fire/undo round trips,
 * and the clocked loop closing a visible cycle. */

import { beforeEach, describe, expect, it } from "vitest";

import { ApiClient, ApiError } from "../src/api.js";
import { ExplorerSession, StaleListingError } from "../src/session.js";
import { BASE } from "./setup/server.js";

const STORE_CELL = "S = r:{w}.S + w:{w}.S1; S1 = sigma:{sigma}.S; main = S";
const CLOCK_LOOP = "P = r:{~w}.sigma.P; Q = w.sigma.Q; main = P | Q";

let api: ApiClient;
let session: ExplorerSession;

beforeEach(() => {
  api = new ApiClient(BASE);
  session = new ExplorerSession(api);
});

describe("loading", () => {
  it("shows the initial term and its transitions", async () => {
    const view = await session.load(STORE_CELL);
    expect(view.currentState).toBe(0);
    expect(view.currentTerm).toBe("S");
    expect(view.transitionList.map((t) => t.action)).toEqual(["r", "w"]);
    expect(view.graph.nodes.size).toBe(1);
  });

  it("transition chips equal the served listing field-for-field", async () => {
    const view = await session.load(STORE_CELL);
    const served = await api.transitions(view.programId, 0);
    expect(view.transitionList).toEqual(served);
  });

  it("surfaces diagnostics with spans on bad input", async () => {
    try {
      await session.load("main = a:{tau}.0_0");
      expect.unreachable("load should have failed");
    } catch (err) {
      expect(err).toBeInstanceOf(ApiError);
      const diags = (err as ApiError).diagnostics;
      expect(diags.length).toBeGreaterThan(0);
      expect(diags[0]).toMatchObject({ severity: "error", line: 1 });
      expect(diags[0]?.column).toBeGreaterThan(0);
    }
  });

  it("reloading the same source yields a fresh session, same rendering", async () => {
    const first = await session.load(STORE_CELL);
    const second = await new ExplorerSession(api).load(STORE_CELL);
    expect(second.programId).not.toBe(first.programId);
    expect(second.currentTerm).toBe(first.currentTerm);
    expect(second.transitionList).toEqual(first.transitionList);
  });
});

describe("stepping", () => {
  it("fire then undo restores the initial listing", async () => {
    const view = await session.load(STORE_CELL);
    const initialListing = structuredClone(view.transitionList);
    const afterFire = await session.fire(1); // take the write
    expect(afterFire.currentTerm).toBe("S1");
    expect(afterFire.historyStack.length).toBe(1);
    const afterUndo = await session.undoStep();
    expect(afterUndo.currentState).toBe(0);
    expect(afterUndo.historyStack.length).toBe(0);
    expect(afterUndo.transitionList).toEqual(initialListing);
  });

  it("keeps visited nodes in the graph after undo", async () => {
    await session.load(STORE_CELL);
    await session.fire(1);
    const view = await session.undoStep();
    expect(view.graph.nodes.size).toBe(2);
    expect(view.graph.edges.length).toBe(1);
  });

  it("a stale index refreshes the listing instead of desyncing", async () => {
    const view = await session.load(STORE_CELL);
    await expect(session.fire(99)).rejects.toThrowError(StaleListingError);
    expect(view.transitionList.length).toBe(2);
    expect(view.historyStack.length).toBe(0);
  });

  it("history length tracks fires minus undos", async () => {
    await session.load(STORE_CELL);
    await session.fire(0);
    await session.fire(0);
    await session.undoStep();
    expect(session.view?.historyStack.length).toBe(1);
  });
});

describe("the clocked loop", () => {
  it("closes a visible 3-node cycle", async () => {
    const view = await session.load(CLOCK_LOOP);
    const actions: string[] = [];
    for (let i = 0; i < 3; i++) {
      expect(session.view?.transitionList.length).toBe(1);
      const entry = session.view!.transitionList[0]!;
      actions.push(entry.action);
      await session.fire(0);
    }
    expect(actions).toEqual(["w", "r", "sigma"]);
    expect(view.currentState).toBe(0); // back where we started
    expect(view.graph.nodes.size).toBe(3);
    expect(view.graph.edges.length).toBe(3);
    const last = view.graph.edges[2]!;
    expect(last.to).toBe(0); // the closing edge points at an existing node
  });

  it("only ever shows nodes the server knows", async () => {
    const view = await session.load(CLOCK_LOOP);
    await session.fire(0);
    await session.fire(0);
    const lts = await api.lts(view.programId);
    const serverTerms = new Map(lts.states.map((s) => [s.id, s.term]));
    for (const [id, term] of view.graph.nodes) {
      expect(serverTerms.get(id)).toBe(term);
    }
  });
});
