import { describe, expect, it } from "vitest";

import type { TransitionEntry } from "../src/api.js";
import { positions, renderGraph } from "../src/graph.js";
import type { Graph } from "../src/session.js";

function entry(action: string, target: number): TransitionEntry {
  return {
    index: 0,
    action,
    blocking: [{ horizon: 1, labels: [] }],
    prediction: { h0: [], h1: [] },
    target,
  };
}

function loopGraph(): Graph {
  return {
    nodes: new Map([
      [0, "P | Q"],
      [1, "sigma.P | Q"],
      [2, "sigma.P | sigma.Q"],
    ]),
    edges: [
      { from: 0, to: 1, entry: entry("w", 1) },
      { from: 1, to: 2, entry: entry("r", 2) },
      { from: 2, to: 0, entry: entry("sigma", 0) },
    ],
  };
}

describe("graph rendering", () => {
  it("draws a single highlighted node before any step", () => {
    const svg = renderGraph({ nodes: new Map([[0, "S"]]), edges: [] }, { current: 0 });
    expect(svg.match(/class="node current"/g)?.length).toBe(1);
    expect(svg).not.toContain("marker-end");
  });

  it("draws all visited nodes and edges with labels", () => {
    const svg = renderGraph(loopGraph(), { current: 0 });
    expect(svg.match(/class="node/g)?.length).toBe(3);
    expect(svg.match(/class="edge"/g)?.length).toBe(3);
    expect(svg).toContain("w:{(1,{})}[{};{}]");
    expect(svg).toContain("sigma:");
  });

  it("is deterministic for a fixed seed and differs across seeds", () => {
    const graph = loopGraph();
    const one = renderGraph(graph, { current: 1 });
    const two = renderGraph(graph, { current: 1 });
    expect(one).toBe(two);
    const other = renderGraph(graph, { current: 1, layoutSeed: 7 });
    expect(other).not.toBe(one);
  });

  it("marks violating states when the overlay is on", () => {
    const svg = renderGraph(loopGraph(), { current: 0, violating: new Set([2]) });
    expect(svg).toContain('class="node violating" data-state="2"');
  });

  it("escapes terms in hover titles", () => {
    const svg = renderGraph(
      { nodes: new Map([[0, "(a.0_0 | b.0_0) \\ {a}"]]), edges: [] },
      { current: 0 },
    );
    expect(svg).toContain("<title>(a.0_0 | b.0_0) \\ {a}</title>");
  });

  it("lays out nodes on distinct positions", () => {
    const pos = positions([0, 1, 2], 42);
    const seen = new Set([...pos.values()].map((p) => `${p.x.toFixed(1)},${p.y.toFixed(1)}`));
    expect(seen.size).toBe(3);
  });
});
