// Browser wiring: instantiates the view-models against the live service and
// binds DOM events. All state lives on the server; reloading the page
// reproduces the workbench from the API alone.

import { ApiClient } from "./api.js";
import { ConceptPanel } from "./conceptPanel.js";
import { LinkTable } from "./linkTable.js";
import { TreeView } from "./treeView.js";
import type { SortKey } from "./types.js";

function el(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node;
}

async function boot(): Promise<void> {
  const api = new ApiClient("");
  const sessions = await api.listSessions();
  const first = sessions[0];
  if (!first) {
    el("app").textContent = "no sessions loaded; start the service over a session directory";
    return;
  }
  const pair = first.pairs[0];
  if (!pair) {
    el("app").textContent = `session ${first.id} has no match matrix`;
    return;
  }

  const table = new LinkTable(api, first.id, "workbench");
  const tree = new TreeView(api, first.id, pair.left, pair.right);
  const panel = new ConceptPanel(api, first.id);

  const tableHost = el("link-table");
  const treeHost = el("tree-view");
  const panelHost = el("concept-panel");

  table.onChange = () => {
    tableHost.innerHTML = table.render();
  };
  tree.onChange = () => {
    treeHost.innerHTML = tree.render();
  };
  panel.onChange = () => {
    panelHost.innerHTML = panel.render();
  };

  tableHost.addEventListener("click", (ev) => {
    const target = ev.target as HTMLElement;
    const sort = target.dataset.sort as SortKey | undefined;
    if (sort) void table.setSort(sort);
    const action = target.dataset.action;
    if (action === "next") void table.nextPage();
    if (action === "prev") void table.prevPage();
    if (action === "accept" || action === "reject") {
      const row = table.state.rows[Number(target.dataset.row)];
      if (row) void (action === "accept" ? table.accept(row) : table.reject(row));
    }
  });

  const slider = el("min-score") as HTMLInputElement;
  slider.addEventListener("change", () => {
    void tree.setMinScore(Number(slider.value));
    void table.setFilters({ minScore: Number(slider.value) });
  });
  const depth = el("depth-max") as HTMLInputElement;
  depth.addEventListener("change", () => {
    const v = depth.value ? Number(depth.value) : undefined;
    void tree.setDepthMax(v);
  });

  treeHost.addEventListener("click", (ev) => {
    const target = (ev.target as HTMLElement).closest("li[data-side=left]");
    if (target instanceof HTMLElement && target.dataset.id) {
      const id = target.dataset.id;
      void tree.selectSubtree(tree.state.selectedSubtree === id ? null : id);
      void table.setFilters({ leftSubtree: tree.state.selectedSubtree ?? undefined });
    }
  });

  panelHost.addEventListener("submit", (ev) => {
    ev.preventDefault();
    const form = ev.target as HTMLFormElement;
    const name = (form.elements.namedItem("concept-name") as HTMLInputElement).value;
    const ids = (form.elements.namedItem("element-ids") as HTMLInputElement).value
      .split(",")
      .map((s) => s.trim())
      .filter(Boolean);
    if (name && ids.length) void panel.createConcept(name, ids);
  });
  panelHost.addEventListener("click", (ev) => {
    const target = ev.target as HTMLElement;
    if (target.dataset.action === "adopt") {
      const suggestion = panel.state.suggestions[Number(target.dataset.suggestion)];
      if (suggestion) void panel.adoptSuggestion(suggestion);
    }
  });

  await Promise.all([table.load(), tree.load(), panel.load(pair.left)]);
}

void boot();
