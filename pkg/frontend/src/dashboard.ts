import type { ScoreTrajectory } from "./types.js";

const WIDTH = 220;
const HEIGHT = 48;
const SVG_NS = "http://www.w3.org/2000/svg";

function sparkline(
  anchors: number[],
  values: number[],
  needleAnchor: number,
): SVGSVGElement {
  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("viewBox", `0 0 ${WIDTH} ${HEIGHT}`);
  svg.setAttribute("class", "sparkline");

  const span = Math.max(1, anchors[anchors.length - 1] - anchors[0]);
  const x = (a: number) => ((a - anchors[0]) / span) * (WIDTH - 8) + 4;
  const y = (v: number) => HEIGHT - 4 - v * (HEIGHT - 8);

  const path = document.createElementNS(SVG_NS, "polyline");
  path.setAttribute(
    "points",
    anchors.map((a, i) => `${x(a).toFixed(1)},${y(values[i]).toFixed(1)}`).join(" "),
  );
  path.setAttribute("fill", "none");
  path.setAttribute("class", "series");
  svg.appendChild(path);

  const needle = document.createElementNS(SVG_NS, "line");
  const nx = x(Math.min(Math.max(needleAnchor, anchors[0]), anchors[anchors.length - 1]));
  needle.setAttribute("x1", nx.toFixed(1));
  needle.setAttribute("x2", nx.toFixed(1));
  needle.setAttribute("y1", "0");
  needle.setAttribute("y2", String(HEIGHT));
  needle.setAttribute("class", "needle");
  svg.appendChild(needle);

  return svg;
}

/**
 * One gauge + time series per scorer. The gauge shows the payload value at
 * the anchor nearest the syuzhet cursor; the needle marks the cursor on the
 * series. Nothing is computed from world structure here -- the trajectory
 * payload is the single source of every number shown.
 */
export function renderAffectiveDashboard(
  container: HTMLElement,
  trajectory: ScoreTrajectory,
  syuzhetCursor: number,
): void {
  container.textContent = "";
  container.classList.add("affective-dashboard");

  if (trajectory.trajectory.length === 0) {
    container.textContent = "no scores";
    return;
  }

  let nearest = trajectory.trajectory[0];
  for (const point of trajectory.trajectory) {
    if (
      Math.abs(point.anchor_syuzhet - syuzhetCursor) <
      Math.abs(nearest.anchor_syuzhet - syuzhetCursor)
    ) {
      nearest = point;
    }
  }

  const names = Object.keys(trajectory.trajectory[0].scores).sort();
  for (const name of names) {
    const card = document.createElement("div");
    card.className = "scorer-card";
    card.dataset.scorer = name;

    const title = document.createElement("h4");
    title.textContent = name;
    card.appendChild(title);

    const gauge = document.createElement("span");
    gauge.className = "gauge-value";
    gauge.textContent = nearest.scores[name].toFixed(4);
    card.appendChild(gauge);

    card.appendChild(
      sparkline(
        trajectory.anchors,
        trajectory.trajectory.map((p) => p.scores[name]),
        syuzhetCursor,
      ),
    );
    container.appendChild(card);
  }
}
