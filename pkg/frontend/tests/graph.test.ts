import { describe, expect, it } from "vitest";
import { renderWorldGraph } from "../src/graph";
import { WORLD } from "./helpers";

describe("world graph", () => {
  it("splits events into occurred/pending at the fabula cursor", () => {
    const host = document.createElement("div");
    renderWorldGraph(host, WORLD, 500);

    for (const circle of host.querySelectorAll<SVGCircleElement>("circle")) {
      const at = Number(circle.dataset.fabulaTime);
      expect(circle.classList.contains("occurred")).toBe(at <= 500);
      expect(circle.classList.contains("pending")).toBe(at > 500);
    }
  });

  it("recolors in place when the cursor scrubs", () => {
    const host = document.createElement("div");
    const view = renderWorldGraph(host, WORLD, 0);

    const occurredCount = () =>
      host.querySelectorAll("circle.occurred").length;
    const atZero = occurredCount();

    const lastFabula = Math.max(...WORLD.events.map((e) => e.fabula_time));
    view.update(lastFabula);
    expect(occurredCount()).toBe(WORLD.events.length);
    expect(occurredCount()).toBeGreaterThan(atZero);

    view.update(0);
    expect(occurredCount()).toBe(atZero);
  });

  it("renders every entity and draws causal edges", () => {
    const host = document.createElement("div");
    renderWorldGraph(host, WORLD, 0);

    expect(host.querySelectorAll("rect.entity").length).toBe(
      WORLD.entities.length,
    );
    expect(host.querySelectorAll("line.edge").length).toBeGreaterThan(0);
  });
});
