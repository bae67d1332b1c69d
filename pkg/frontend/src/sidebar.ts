import type { VersionRow } from "./types.js";

export interface SidebarActions {
  select(versionId: string): void;
  promote(versionId: string): void;
  diff(versionId: string): void;
  reparent(versionId: string): void;
  remove(versionId: string): void;
}

const ACTION_LABELS: [keyof SidebarActions, string][] = [
  ["promote", "promote"],
  ["diff", "diff"],
  ["reparent", "reparent"],
  ["remove", "delete"],
];

/**
 * Version tree, one <li> per row. Factual rows get the `factual` class
 * (green), shadow rows `shadow` (violet). An empty project renders a
 * placeholder with every action disabled.
 */
export function renderVersionSidebar(
  container: HTMLElement,
  rows: VersionRow[],
  activeId: string | null,
  actions: SidebarActions,
): void {
  container.textContent = "";
  container.classList.add("version-sidebar");

  if (rows.length === 0) {
    const empty = document.createElement("p");
    empty.className = "sidebar-empty";
    empty.textContent = "no versions yet";
    container.appendChild(empty);
    for (const [, label] of ACTION_LABELS) {
      const button = document.createElement("button");
      button.textContent = label;
      button.disabled = true;
      container.appendChild(button);
    }
    return;
  }

  const children = new Map<string | null, VersionRow[]>();
  for (const row of rows) {
    const siblings = children.get(row.ancestor_id) ?? [];
    siblings.push(row);
    children.set(row.ancestor_id, siblings);
  }

  const renderRow = (row: VersionRow): HTMLLIElement => {
    const item = document.createElement("li");
    item.dataset.versionId = row.id;
    item.className = `version ${row.world_id}`;
    if (row.id === activeId) item.classList.add("active");

    const label = document.createElement("span");
    label.className = "version-label";
    label.textContent = `${row.id} · ${row.source}`;
    label.addEventListener("click", () => actions.select(row.id));
    item.appendChild(label);

    for (const [method, text] of ACTION_LABELS) {
      const button = document.createElement("button");
      button.className = `act-${text}`;
      button.textContent = text;
      // Promotion only makes sense on shadow rows; the server would 409.
      if (method === "promote" && row.world_id !== "shadow") {
        button.disabled = true;
      }
      button.addEventListener("click", () => actions[method](row.id));
      item.appendChild(button);
    }

    const kids = children.get(row.id);
    if (kids && kids.length > 0) {
      const list = document.createElement("ul");
      for (const kid of kids) list.appendChild(renderRow(kid));
      item.appendChild(list);
    }
    return item;
  };

  const rootList = document.createElement("ul");
  for (const root of children.get(null) ?? []) {
    rootList.appendChild(renderRow(root));
  }
  container.appendChild(rootList);
}
