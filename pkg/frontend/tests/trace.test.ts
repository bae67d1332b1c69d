import { describe, expect, it } from "vitest";
import { renderTracePanel } from "../src/trace";
import { QUERY_RESULT, WORLD } from "./helpers";

describe("propagation trace panel", () => {
  it("shows each mutation with impact, inertia, and movement from payloads", () => {
    const host = document.createElement("div");
    renderTracePanel(host, QUERY_RESULT, WORLD);

    const first = QUERY_RESULT.mutations[0];
    const row = [...host.querySelectorAll("tr")].find(
      (tr) => tr.cells[0]?.textContent === first.node_id,
    )!;
    expect(row.cells[1].textContent).toBe(first.trait);
    expect(row.cells[2].textContent).toBe(String(first.impact));
    const authored = WORLD.entities.find((e) => e.id === first.node_id)!;
    expect(row.cells[3].textContent).toBe(
      String(authored.traits[first.trait].inertia),
    );
    expect(row.cells[4].textContent).toBe(`${first.old} → ${first.new}`);
  });

  it("lists every blocked impulse with its reason", () => {
    const host = document.createElement("div");
    renderTracePanel(host, QUERY_RESULT, WORLD);

    const text = host.textContent!;
    for (const blocked of QUERY_RESULT.blocked) {
      expect(text).toContain(blocked.reason);
      expect(text).toContain(blocked.source_id);
    }
    expect(text).toContain(`blocked (${QUERY_RESULT.blocked.length})`);
  });

  it("shows rectified hidden state prior/posterior/delta verbatim", () => {
    const host = document.createElement("div");
    renderTracePanel(host, QUERY_RESULT, WORLD);

    expect(QUERY_RESULT.hidden_deltas.length).toBeGreaterThan(0);
    const hidden = QUERY_RESULT.hidden_deltas[0];
    const row = [...host.querySelectorAll("tr")].find(
      (tr) =>
        tr.cells[0]?.textContent === hidden.node_id &&
        tr.cells[2]?.textContent === String(hidden.prior),
    );
    expect(row).toBeDefined();
    expect(row!.cells[3].textContent).toBe(String(hidden.posterior));
    expect(row!.cells[4].textContent).toBe(String(hidden.delta));
  });
});
