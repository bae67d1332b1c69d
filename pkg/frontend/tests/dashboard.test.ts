import { describe, expect, it } from "vitest";
import { renderAffectiveDashboard } from "../src/dashboard";
import { SCORES } from "./helpers";

describe("affective dashboard", () => {
  it("renders one card per scorer in the payload", () => {
    const host = document.createElement("div");
    renderAffectiveDashboard(host, SCORES, 0);

    const names = [...host.querySelectorAll<HTMLElement>(".scorer-card")].map(
      (card) => card.dataset.scorer,
    );
    expect(names.length).toBe(10);
    expect(names).toEqual(
      Object.keys(SCORES.trajectory[0].scores).sort(),
    );
  });

  it("gauges show the payload value at the anchor nearest the cursor", () => {
    const host = document.createElement("div");
    const cursor = SCORES.anchors[2];
    renderAffectiveDashboard(host, SCORES, cursor);

    const point = SCORES.trajectory.find((p) => p.anchor_syuzhet === cursor)!;
    for (const card of host.querySelectorAll<HTMLElement>(".scorer-card")) {
      const name = card.dataset.scorer!;
      expect(card.querySelector(".gauge-value")!.textContent).toBe(
        point.scores[name].toFixed(4),
      );
    }
  });

  it("draws a series and a cursor needle per card", () => {
    const host = document.createElement("div");
    renderAffectiveDashboard(host, SCORES, 4);

    const card = host.querySelector(".scorer-card")!;
    expect(card.querySelector("polyline.series")).not.toBeNull();
    expect(card.querySelector("line.needle")).not.toBeNull();
  });
});
