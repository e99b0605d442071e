// Match-centric sortable table: the primary surface of the workbench.
// Rows are exactly the service's filtered page in server order; sorting and
// filtering are delegated to the service query parameters, never re-sorted
// client-side.

import { ApiClient, ApiError } from "./api.js";
import type { Annotation, LinkQuery, LinkRow, SortKey } from "./types.js";

export interface LinkTableState {
  rows: LinkRow[];
  total: number;
  offset: number;
  limit: number;
  sort: SortKey;
  minScore?: number;
  maxScore?: number;
  leftSubtree?: string;
  rightSubtree?: string;
  depthMin?: number;
  depthMax?: number;
  error: string | null;
  loading: boolean;
}

export class LinkTable {
  state: LinkTableState = {
    rows: [],
    total: 0,
    offset: 0,
    limit: 50,
    sort: "score",
    error: null,
    loading: false,
  };
  onChange: (() => void) | null = null;

  constructor(
    private readonly api: ApiClient,
    private readonly sessionId: string,
    private readonly author: string = "",
  ) {}

  private notify(): void {
    this.onChange?.();
  }

  private query(): LinkQuery {
    const s = this.state;
    return {
      minScore: s.minScore,
      maxScore: s.maxScore,
      leftSubtree: s.leftSubtree,
      rightSubtree: s.rightSubtree,
      depthMin: s.depthMin,
      depthMax: s.depthMax,
      sort: s.sort,
      offset: s.offset,
      limit: s.limit,
    };
  }

  async load(): Promise<void> {
    this.state.loading = true;
    this.notify();
    try {
      const page = await this.api.links(this.sessionId, this.query());
      this.state.rows = page.links;
      this.state.total = page.total;
      this.state.offset = page.offset;
      this.state.error = null;
    } catch (err) {
      // keep the current rows; surface the problem inline
      this.state.error = err instanceof Error ? err.message : String(err);
    } finally {
      this.state.loading = false;
      this.notify();
    }
  }

  async setSort(sort: SortKey): Promise<void> {
    this.state.sort = sort;
    this.state.offset = 0;
    await this.load();
  }

  async setFilters(filters: Partial<LinkQuery>): Promise<void> {
    Object.assign(this.state, filters);
    this.state.offset = 0;
    await this.load();
  }

  async nextPage(): Promise<void> {
    if (this.state.offset + this.state.limit < this.state.total) {
      this.state.offset += this.state.limit;
      await this.load();
    }
  }

  async prevPage(): Promise<void> {
    this.state.offset = Math.max(0, this.state.offset - this.state.limit);
    await this.load();
  }

  async decide(
    row: LinkRow,
    status: "accepted" | "rejected",
    annotation: Annotation = row.annotation,
  ): Promise<void> {
    try {
      const decision = await this.api.postDecision(
        this.sessionId,
        row.leftId,
        row.rightId,
        status,
        annotation,
        this.author,
        row.assignee,
      );
      // optimistic in-place update from the write response...
      for (const r of this.state.rows) {
        if (r.leftId === decision.leftId && r.rightId === decision.rightId) {
          r.status = decision.status;
          r.annotation = decision.annotation;
          r.author = decision.author;
        }
      }
      this.state.error = null;
      this.notify();
      // ...then re-fetch so ordering and totals match the server again
      await this.load();
    } catch (err) {
      this.state.error =
        err instanceof ApiError ? `decision failed: ${err.message}` : String(err);
      this.notify();
    }
  }

  accept(row: LinkRow, annotation: Annotation = "equivalent"): Promise<void> {
    return this.decide(row, "accepted", annotation);
  }

  reject(row: LinkRow): Promise<void> {
    return this.decide(row, "rejected");
  }

  render(): string {
    const s = this.state;
    const head = `<tr>
      <th data-sort="leftPath">left</th>
      <th data-sort="rightPath">right</th>
      <th data-sort="score">score</th>
      <th data-sort="status">status</th>
      <th>annotation</th>
      <th data-sort="assignee">assignee</th>
      <th>actions</th>
    </tr>`;
    const rows = s.rows
      .map((r, i) => {
        const cls = r.status === "candidate" ? "" : ` class="${r.status}"`;
        return `<tr${cls} data-row="${i}">
        <td title="${escapeHtml(r.leftConcept)}">${escapeHtml(r.leftPath)}</td>
        <td title="${escapeHtml(r.rightConcept)}">${escapeHtml(r.rightPath)}</td>
        <td class="num">${r.score.toFixed(4)}</td>
        <td>${r.status}</td>
        <td>${r.annotation}</td>
        <td>${escapeHtml(r.assignee)}</td>
        <td>
          <button data-action="accept" data-row="${i}">accept</button>
          <button data-action="reject" data-row="${i}">reject</button>
        </td>
      </tr>`;
      })
      .join("");
    const error = s.error ? `<p class="error">${escapeHtml(s.error)}</p>` : "";
    const pager = `<p class="pager">${s.offset + 1}-${Math.min(
      s.offset + s.rows.length,
      s.total,
    )} of ${s.total}
      <button data-action="prev">&lt;</button>
      <button data-action="next">&gt;</button></p>`;
    return `${error}<table class="links"><thead>${head}</thead><tbody>${rows}</tbody></table>${pager}`;
  }
}

export function escapeHtml(text: string): string {
  return text
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;");
}
