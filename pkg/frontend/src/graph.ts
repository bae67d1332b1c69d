import type { WorldPayload } from "./types.js";

const SVG_NS = "http://www.w3.org/2000/svg";
const W = 640;
const H = 420;

interface Placed {
  x: number;
  y: number;
}

// Rings: events inside (ordered by fabula time), entities outside,
// locations along the bottom. Deterministic, no physics.
function layout(world: WorldPayload): Map<string, Placed> {
  const at = new Map<string, Placed>();
  const events = [...world.events].sort((a, b) => a.fabula_time - b.fabula_time);
  events.forEach((event, i) => {
    const angle = (2 * Math.PI * i) / Math.max(1, events.length) - Math.PI / 2;
    at.set(event.id, {
      x: W / 2 + Math.cos(angle) * 120,
      y: H / 2 + Math.sin(angle) * 120,
    });
  });
  world.entities.forEach((entity, i) => {
    const angle = (2 * Math.PI * i) / Math.max(1, world.entities.length) - Math.PI / 2;
    at.set(entity.id, {
      x: W / 2 + Math.cos(angle) * 190,
      y: H / 2 + Math.sin(angle) * 190,
    });
  });
  world.locations.forEach((loc, i) => {
    at.set(loc.id, {
      x: 40 + (i * (W - 80)) / Math.max(1, world.locations.length - 1 || 1),
      y: H - 16,
    });
  });
  return at;
}

export interface WorldGraphView {
  svg: SVGSVGElement;
  /** Recolor for a new fabula cursor without relayout or refetch. */
  update(fabulaCursor: number): void;
}

/**
 * Node-link view of the world. Events at or before the fabula cursor read
 * as `occurred`, later ones as `pending`; scrubbing the cursor only flips
 * those classes. Event radius scales with the payload's weight field.
 */
export function renderWorldGraph(
  container: HTMLElement,
  world: WorldPayload,
  fabulaCursor: number,
): WorldGraphView {
  container.textContent = "";
  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("viewBox", `0 0 ${W} ${H}`);
  svg.setAttribute("class", "world-graph");
  container.appendChild(svg);

  const at = layout(world);

  for (const edge of world.causal_topology) {
    const from = at.get(edge.source_id);
    const to = at.get(edge.target_id);
    if (!from || !to) continue;
    const line = document.createElementNS(SVG_NS, "line");
    line.setAttribute("x1", String(from.x));
    line.setAttribute("y1", String(from.y));
    line.setAttribute("x2", String(to.x));
    line.setAttribute("y2", String(to.y));
    line.setAttribute("class", `edge ${edge.causality_type}`);
    svg.appendChild(line);
  }

  const eventNodes = new Map<string, SVGCircleElement>();
  for (const event of world.events) {
    const p = at.get(event.id)!;
    const circle = document.createElementNS(SVG_NS, "circle");
    circle.setAttribute("cx", String(p.x));
    circle.setAttribute("cy", String(p.y));
    circle.setAttribute("r", String(5 + event.weight * 3));
    circle.dataset.nodeId = event.id;
    circle.dataset.fabulaTime = String(event.fabula_time);
    svg.appendChild(circle);
    eventNodes.set(event.id, circle);

    const label = document.createElementNS(SVG_NS, "text");
    label.setAttribute("x", String(p.x + 8));
    label.setAttribute("y", String(p.y - 6));
    label.textContent = event.id;
    svg.appendChild(label);
  }

  for (const entity of world.entities) {
    const p = at.get(entity.id)!;
    const rect = document.createElementNS(SVG_NS, "rect");
    rect.setAttribute("x", String(p.x - 6));
    rect.setAttribute("y", String(p.y - 6));
    rect.setAttribute("width", "12");
    rect.setAttribute("height", "12");
    rect.setAttribute("class", `node entity status-${entity.status}`);
    rect.dataset.nodeId = entity.id;
    svg.appendChild(rect);

    const label = document.createElementNS(SVG_NS, "text");
    label.setAttribute("x", String(p.x + 9));
    label.setAttribute("y", String(p.y + 4));
    label.textContent = entity.id;
    svg.appendChild(label);
  }

  const update = (cursor: number) => {
    for (const event of world.events) {
      const circle = eventNodes.get(event.id)!;
      const occurred = event.fabula_time <= cursor;
      circle.setAttribute(
        "class",
        `node event ${occurred ? "occurred" : "pending"}`,
      );
    }
  };
  update(fabulaCursor);

  return { svg, update };
}
