/** SVG rendering of the visited graph.
 *
 * Pure function of the view state: nodes sit on a circle ordered by state
 * id with a fixed jitter seed, so the same session history always draws the
 * same picture.  The current node is highlighted; a coherence overlay can
 * mark violating states.
 */

import { formatChip, formatDetail } from "./format.js";
import type { Graph } from "./session.js";

const SIZE = 520;
const NODE_RADIUS = 26;

/** Deterministic pseudo-random stream for layout jitter. */
function mulberry32(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a = (a + 0x6d2b79f5) | 0;
    let t = Math.imul(a ^ (a >>> 15), 1 | a);
    t = (t + Math.imul(t ^ (t >>> 7), 61 | t)) ^ t;
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

function escapeXml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export interface RenderOptions {
  current: number;
  violating?: Set<number>;
  layoutSeed?: number;
}

export function positions(
  ids: number[],
  seed: number,
): Map<number, { x: number; y: number }> {
  const rand = mulberry32(seed);
  const out = new Map<number, { x: number; y: number }>();
  const sorted = [...ids].sort((a, b) => a - b);
  const radius = SIZE / 2 - NODE_RADIUS - 30;
  sorted.forEach((id, i) => {
    const angle = (2 * Math.PI * i) / Math.max(sorted.length, 1) - Math.PI / 2;
    const jitter = sorted.length > 1 ? (rand() - 0.5) * 14 : 0;
    out.set(id, {
      x: SIZE / 2 + (radius + jitter) * Math.cos(angle),
      y: SIZE / 2 + (radius + jitter) * Math.sin(angle),
    });
  });
  return out;
}

export function renderGraph(graph: Graph, options: RenderOptions): string {
  const seed = options.layoutSeed ?? 42;
  const pos = positions([...graph.nodes.keys()], seed);
  const parts: string[] = [
    `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${SIZE} ${SIZE}" class="lts-graph">`,
    `<defs><marker id="arrow" viewBox="0 0 10 10" refX="9" refY="5" ` +
      `markerWidth="7" markerHeight="7" orient="auto-start-reverse">` +
      `<path d="M 0 0 L 10 5 L 0 10 z" fill="#555"/></marker></defs>`,
  ];

  for (const edge of graph.edges) {
    const a = pos.get(edge.from);
    const b = pos.get(edge.to);
    if (a === undefined || b === undefined) continue;
    const label = escapeXml(formatChip(edge.entry));
    const detail = escapeXml(formatDetail(edge.entry));
    if (edge.from === edge.to) {
      const x = a.x;
      const y = a.y - NODE_RADIUS;
      parts.push(
        `<g class="edge self"><path d="M ${x - 10} ${y} C ${x - 32} ${y - 44}, ` +
          `${x + 32} ${y - 44}, ${x + 10} ${y}" fill="none" stroke="#555" ` +
          `marker-end="url(#arrow)"/><title>${detail}</title>` +
          `<text x="${x}" y="${y - 38}" text-anchor="middle">${label}</text></g>`,
      );
      continue;
    }
    const dx = b.x - a.x;
    const dy = b.y - a.y;
    const len = Math.hypot(dx, dy) || 1;
    const sx = a.x + (dx / len) * NODE_RADIUS;
    const sy = a.y + (dy / len) * NODE_RADIUS;
    const ex = b.x - (dx / len) * NODE_RADIUS;
    const ey = b.y - (dy / len) * NODE_RADIUS;
    const mx = (sx + ex) / 2 - dy / len * 14;
    const my = (sy + ey) / 2 + dx / len * 14;
    parts.push(
      `<g class="edge"><path d="M ${sx} ${sy} Q ${mx} ${my} ${ex} ${ey}" fill="none" ` +
        `stroke="#555" marker-end="url(#arrow)"/><title>${detail}</title>` +
        `<text x="${mx}" y="${my - 4}" text-anchor="middle">${label}</text></g>`,
    );
  }

  for (const [id, term] of [...graph.nodes.entries()].sort((a, b) => a[0] - b[0])) {
    const p = pos.get(id);
    if (p === undefined) continue;
    const classes = ["node"];
    if (id === options.current) classes.push("current");
    if (options.violating?.has(id)) classes.push("violating");
    parts.push(
      `<g class="${classes.join(" ")}" data-state="${id}">` +
        `<circle cx="${p.x}" cy="${p.y}" r="${NODE_RADIUS}"/>` +
        `<title>${escapeXml(term)}</title>` +
        `<text x="${p.x}" y="${p.y + 4}" text-anchor="middle">${id}</text></g>`,
    );
  }

  parts.push("</svg>");
  return parts.join("\n");
}
