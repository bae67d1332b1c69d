import { ApiClient } from "./api.js";
import { renderTracePanel } from "./trace.js";
import type { WorldPayload } from "./types.js";

const TEMPLATES: Record<string, object> = {
  observation: {
    kind: "observation",
    focal_ids: ["ENT_MACBETH"],
    anchor_fabula: 600,
  },
  intervention: {
    kind: "intervention",
    focal_ids: ["ENT_MACBETH"],
    anchor_fabula: 900,
    interventions: { assignments: { "ENT_MACBETH.ambition": 0.1 } },
    target_ids: ["ENT_MACBETH"],
  },
  counterfactual: {
    kind: "counterfactual",
    focal_ids: ["ENT_MACBETH"],
    anchor_fabula: 900,
    interventions: { assignments: { "ENT_MACBETH.ambition": 0.1 } },
    target_ids: ["ENT_MACBETH"],
    evidence_node_ids: ["ENT_LADY_MACBETH"],
  },
};

/** Query console: kind picker, raw JSON editor, run button, trace below. */
export function renderQueryConsole(
  container: HTMLElement,
  api: ApiClient,
  getActiveVersion: () => string | null,
  getWorld: () => WorldPayload | null,
): void {
  container.textContent = "";
  container.classList.add("query-console");

  const picker = document.createElement("select");
  for (const kind of Object.keys(TEMPLATES)) {
    const option = document.createElement("option");
    option.value = kind;
    option.textContent = kind;
    picker.appendChild(option);
  }
  picker.value = "intervention";

  const editor = document.createElement("textarea");
  editor.rows = 12;
  editor.value = JSON.stringify(TEMPLATES.intervention, null, 2);
  picker.addEventListener("change", () => {
    editor.value = JSON.stringify(TEMPLATES[picker.value], null, 2);
  });

  const run = document.createElement("button");
  run.textContent = "run";
  run.className = "run-query";

  const status = document.createElement("p");
  status.className = "console-status";

  const traceHost = document.createElement("div");

  run.addEventListener("click", async () => {
    let query: unknown;
    try {
      query = JSON.parse(editor.value);
    } catch (err) {
      status.textContent = `bad JSON: ${err}`;
      return;
    }
    status.textContent = "running…";
    try {
      const result = await api.runQuery({
        query,
        version_id: getActiveVersion() ?? undefined,
      });
      status.textContent = "";
      renderTracePanel(traceHost, result, getWorld());
    } catch (err) {
      status.textContent = String(err);
    }
  });

  container.append(picker, editor, run, status, traceHost);
}
