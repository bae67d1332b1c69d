import { ApiClient } from "./api.js";
import { Bus } from "./bus.js";
import { renderAffectiveDashboard } from "./dashboard.js";
import { renderWorldGraph, WorldGraphView } from "./graph.js";
import { renderQueryConsole } from "./console.js";
import { renderVersionSidebar } from "./sidebar.js";
import { Store, Tab } from "./state.js";
import type { WorldPayload } from "./types.js";

const TABS: Tab[] = ["graph", "dashboard", "console"];

export interface App {
  store: Store;
  bus: Bus;
  refreshSidebar(): Promise<void>;
}

/**
 * Wires the workspace together. Panels subscribe to the bus; a panel only
 * refetches when its tab is the active one (off-tab rebuilds are skipped),
 * and cursor-driven refetches arrive pre-debounced from the store.
 */
export function boot(root: HTMLElement, api: ApiClient): App {
  const bus = new Bus();
  const store = new Store(bus);

  root.innerHTML = `
    <aside id="sidebar"></aside>
    <main>
      <nav id="tabs"></nav>
      <div id="cursors">
        <label>fabula <input type="range" id="fabula-cursor" min="0" max="0" step="100" value="0"></label>
        <label>syuzhet <input type="range" id="syuzhet-cursor" min="0" max="0" step="1" value="0"></label>
      </div>
      <section id="panel"></section>
      <pre id="diff-view" hidden></pre>
    </main>`;

  const sidebar = root.querySelector<HTMLElement>("#sidebar")!;
  const panel = root.querySelector<HTMLElement>("#panel")!;
  const diffView = root.querySelector<HTMLPreElement>("#diff-view")!;
  const fabulaSlider = root.querySelector<HTMLInputElement>("#fabula-cursor")!;
  const syuzhetSlider = root.querySelector<HTMLInputElement>("#syuzhet-cursor")!;

  let cachedWorld: WorldPayload | null = null;
  let graphView: WorldGraphView | null = null;

  const nav = root.querySelector<HTMLElement>("#tabs")!;
  for (const tab of TABS) {
    const button = document.createElement("button");
    button.textContent = tab;
    button.dataset.tab = tab;
    button.addEventListener("click", () => store.setTab(tab));
    nav.appendChild(button);
  }

  fabulaSlider.addEventListener("input", () => {
    store.setFabulaCursor(Number(fabulaSlider.value));
    // Recoloring is local; only server-backed panels wait for the debounce.
    graphView?.update(store.state.fabulaCursor);
  });
  syuzhetSlider.addEventListener("input", () => {
    store.setSyuzhetCursor(Number(syuzhetSlider.value));
  });

  async function refreshSidebar(): Promise<void> {
    const listing = await api.listVersions("sidebar");
    if (store.state.activeVersionId === null && listing.active_id) {
      store.state.activeVersionId = listing.active_id;
    }
    renderVersionSidebar(sidebar, listing.versions, store.state.activeVersionId, {
      select: (id) => store.setVersion(id),
      promote: async (id) => {
        await api.promote(id);
        await refreshSidebar();
      },
      diff: async (id) => {
        const against = store.state.activeVersionId;
        if (!against || against === id) return;
        const diff = await api.diff(against, id);
        diffView.hidden = false;
        diffView.textContent = JSON.stringify(diff, null, 2);
      },
      reparent: async (id) => {
        const target = window.prompt("new parent id (blank for root)");
        if (target === null) return;
        await api.reparent(id, target === "" ? null : target);
        await refreshSidebar();
      },
      remove: async (id) => {
        await api.remove(id);
        await refreshSidebar();
      },
    });
  }

  async function loadWorld(): Promise<WorldPayload | null> {
    const id = store.state.activeVersionId;
    if (!id) return null;
    cachedWorld = await api.world(id, "graph");
    const lastFabula = Math.max(0, ...cachedWorld.events.map((e) => e.fabula_time));
    const lastSyuzhet = Math.max(0, ...cachedWorld.events.map((e) => e.syuzhet_index));
    fabulaSlider.max = String(lastFabula);
    syuzhetSlider.max = String(lastSyuzhet);
    return cachedWorld;
  }

  async function renderActiveTab(): Promise<void> {
    const tab = store.state.activeTab;
    for (const button of nav.querySelectorAll("button")) {
      button.classList.toggle("current", button.dataset.tab === tab);
    }
    if (tab === "graph") {
      const world = cachedWorld ?? (await loadWorld());
      panel.textContent = "";
      graphView = world
        ? renderWorldGraph(panel, world, store.state.fabulaCursor)
        : null;
      if (!world) panel.textContent = "no active version";
    } else if (tab === "dashboard") {
      const id = store.state.activeVersionId;
      if (!id) {
        panel.textContent = "no active version";
        return;
      }
      const scores = await api.scores(
        { versionId: id, scorer: "all", anchors: 8 },
        "dashboard",
      );
      renderAffectiveDashboard(panel, scores, store.state.syuzhetCursor);
    } else {
      graphView = null;
      renderQueryConsole(
        panel,
        api,
        () => store.state.activeVersionId,
        () => cachedWorld,
      );
    }
  }

  bus.on("TAB_CHANGED", () => {
    void renderActiveTab();
  });

  bus.on("VERSION_CHANGED", () => {
    cachedWorld = null;
    graphView = null;
    diffView.hidden = true;
    fabulaSlider.value = "0";
    syuzhetSlider.value = "0";
    void refreshSidebar();
    void renderActiveTab();
  });

  bus.on("CURSOR_CHANGED", () => {
    // Visibility gating: only the panel the user is looking at refetches.
    if (store.state.activeTab === "dashboard") {
      void renderActiveTab();
    }
  });

  return { store, bus, refreshSidebar };
}
