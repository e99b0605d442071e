// Schema-centric dual-tree view with correspondence lines. Lines come from
// the links endpoint under the active filters; selecting a sub-tree narrows
// the match to links originating inside it (the incremental-matching
// workflow). Rendering refuses to draw more than lineCap lines and asks the
// user to narrow filters instead.

import { ApiClient } from "./api.js";
import type { LinkRow, SchemaTree, TreeNode } from "./types.js";
import { escapeHtml } from "./linkTable.js";

export interface TreeViewState {
  leftTree: SchemaTree | null;
  rightTree: SchemaTree | null;
  minScore: number;
  depthMax: number | undefined;
  selectedSubtree: string | null; // left-side element id
  lines: LinkRow[];
  capExceeded: boolean;
  totalMatching: number;
  error: string | null;
}

export class TreeView {
  state: TreeViewState = {
    leftTree: null,
    rightTree: null,
    minScore: 0.5,
    depthMax: undefined,
    selectedSubtree: null,
    lines: [],
    capExceeded: false,
    totalMatching: 0,
    error: null,
  };
  onChange: (() => void) | null = null;

  constructor(
    private readonly api: ApiClient,
    private readonly sessionId: string,
    private readonly leftSchemaId: string,
    private readonly rightSchemaId: string,
    readonly lineCap: number = 500,
  ) {}

  private notify(): void {
    this.onChange?.();
  }

  async load(): Promise<void> {
    this.state.leftTree = await this.api.schemaTree(this.leftSchemaId);
    this.state.rightTree = await this.api.schemaTree(this.rightSchemaId);
    await this.refreshLines();
  }

  async setMinScore(value: number): Promise<void> {
    this.state.minScore = value;
    await this.refreshLines();
  }

  async setDepthMax(value: number | undefined): Promise<void> {
    this.state.depthMax = value;
    await this.refreshLines();
  }

  async selectSubtree(rootId: string | null): Promise<void> {
    this.state.selectedSubtree = rootId;
    await this.refreshLines();
  }

  async refreshLines(): Promise<void> {
    try {
      const page = await this.api.links(this.sessionId, {
        minScore: this.state.minScore,
        leftSubtree: this.state.selectedSubtree ?? undefined,
        depthMax: this.state.depthMax,
        sort: "score",
        offset: 0,
        limit: this.lineCap + 1,
      });
      this.state.totalMatching = page.total;
      if (page.total > this.lineCap) {
        this.state.capExceeded = true;
        this.state.lines = [];
      } else {
        this.state.capExceeded = false;
        this.state.lines = page.links;
      }
      this.state.error = null;
    } catch (err) {
      this.state.error = err instanceof Error ? err.message : String(err);
    }
    this.notify();
  }

  private renderNode(node: TreeNode, side: "left" | "right"): string {
    const touched =
      side === "left"
        ? this.state.lines.some((l) => l.leftId === node.id)
        : this.state.lines.some((l) => l.rightId === node.id);
    const selected = side === "left" && this.state.selectedSubtree === node.id;
    const classes = [touched ? "touched" : "", selected ? "selected" : ""]
      .filter(Boolean)
      .join(" ");
    const children = node.children
      .map((c) => this.renderNode(c, side))
      .join("");
    return `<li data-id="${escapeHtml(node.id)}" data-side="${side}"${
      classes ? ` class="${classes}"` : ""
    }><span class="node">${escapeHtml(node.name)}</span>${
      children ? `<ul>${children}</ul>` : ""
    }</li>`;
  }

  render(): string {
    const s = this.state;
    if (!s.leftTree || !s.rightTree) return "<p>loading trees...</p>";
    const left = s.leftTree.roots.map((r) => this.renderNode(r, "left")).join("");
    const right = s.rightTree.roots.map((r) => this.renderNode(r, "right")).join("");
    const prompt = s.capExceeded
      ? `<p class="cap-warning">${s.totalMatching} matches exceed the ${this.lineCap}-line cap; narrow your filters (raise the confidence slider, pick a sub-tree, or lower the depth limit).</p>`
      : "";
    const error = s.error ? `<p class="error">${escapeHtml(s.error)}</p>` : "";
    const lines = s.lines
      .map(
        (l) =>
          `<div class="line" data-left="${escapeHtml(l.leftId)}" data-right="${escapeHtml(
            l.rightId,
          )}" data-score="${l.score.toFixed(4)}"></div>`,
      )
      .join("");
    return `${error}${prompt}
      <div class="trees">
        <ul class="tree left">${left}</ul>
        <div class="lines">${lines}</div>
        <ul class="tree right">${right}</ul>
      </div>`;
  }
}
