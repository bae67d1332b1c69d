import type { QueryResult, WorldPayload } from "./types.js";

function cell(text: string, tag = "td"): HTMLElement {
  const el = document.createElement(tag);
  el.textContent = text;
  return el;
}

function table(headers: string[], rows: string[][]): HTMLTableElement {
  const t = document.createElement("table");
  const head = document.createElement("tr");
  for (const h of headers) head.appendChild(cell(h, "th"));
  t.appendChild(head);
  for (const row of rows) {
    const tr = document.createElement("tr");
    for (const value of row) tr.appendChild(cell(value));
    t.appendChild(tr);
  }
  return t;
}

function section(container: HTMLElement, title: string, node: HTMLElement) {
  const h = document.createElement("h3");
  h.textContent = title;
  container.appendChild(h);
  container.appendChild(node);
}

/** Inertia of a trait as authored in the world payload, for display only. */
function traitInertia(world: WorldPayload | null, nodeId: string, trait: string): string {
  const entity = world?.entities.find((e) => e.id === nodeId);
  const vector = entity?.traits[trait];
  return vector ? String(vector.inertia) : "–";
}

/**
 * Propagation trace: applied mutations with their pooled impact, the
 * target's inertia, and the movement; blocked impulses with reasons;
 * rectified hidden state; screening flags when present. Every number is
 * lifted verbatim from an API payload.
 */
export function renderTracePanel(
  container: HTMLElement,
  result: QueryResult,
  world: WorldPayload | null = null,
): void {
  container.textContent = "";
  container.classList.add("trace-panel");

  section(
    container,
    `mutations (${result.mutations.length})`,
    table(
      ["node", "trait", "impact", "inertia", "movement"],
      result.mutations.map((m) => [
        m.node_id,
        m.trait,
        String(m.impact),
        traitInertia(world, m.node_id, m.trait),
        `${m.old} → ${m.new}`,
      ]),
    ),
  );

  section(
    container,
    `blocked (${result.blocked.length})`,
    table(
      ["source", "target", "trait", "reason", "pooled impact"],
      result.blocked.map((b) => [
        b.source_id,
        b.target_id,
        b.trait ?? "–",
        b.reason,
        b.impact === null ? "–" : String(b.impact),
      ]),
    ),
  );

  if (result.hidden_deltas.length > 0) {
    section(
      container,
      `rectified hidden state (${result.hidden_deltas.length})`,
      table(
        ["node", "trait", "prior", "posterior", "delta"],
        result.hidden_deltas.map((d) => [
          d.node_id,
          d.trait,
          String(d.prior),
          String(d.posterior),
          String(d.delta),
        ]),
      ),
    );
  }

  const flags: [string, string[]][] = [
    ["already observed", result.rule1_vacuous_assignments],
    ["redundant evidence", result.rule2_redundant_evidence],
    ["no path to target", result.rule3_pruned_interventions],
  ];
  for (const [label, ids] of flags) {
    if (ids.length === 0) continue;
    const p = document.createElement("p");
    p.className = "screening-flag";
    p.textContent = `${label}: ${ids.join(", ")}`;
    container.appendChild(p);
  }
}
