// Concept creation and assignment, with ranked suggestions and per-concept
// review progress. Assignment conflicts (an element already owned by another
// concept) surface inline on the offending request instead of clearing state.

import { ApiClient, ApiError } from "./api.js";
import type { Concept, Suggestion } from "./types.js";
import { escapeHtml } from "./linkTable.js";

export interface ConceptPanelState {
  concepts: Concept[];
  suggestions: Suggestion[];
  schemaId: string;
  conflict: string | null;
  error: string | null;
}

export class ConceptPanel {
  state: ConceptPanelState = {
    concepts: [],
    suggestions: [],
    schemaId: "",
    conflict: null,
    error: null,
  };
  onChange: (() => void) | null = null;

  constructor(
    private readonly api: ApiClient,
    private readonly sessionId: string,
  ) {}

  private notify(): void {
    this.onChange?.();
  }

  async load(schemaId: string): Promise<void> {
    this.state.schemaId = schemaId;
    try {
      this.state.concepts = await this.api.listConcepts(this.sessionId);
      this.state.suggestions = await this.api.suggestions(this.sessionId, schemaId);
      this.state.error = null;
    } catch (err) {
      this.state.error = err instanceof Error ? err.message : String(err);
    }
    this.notify();
  }

  async createConcept(name: string, elementIds: string[]): Promise<Concept | null> {
    this.state.conflict = null;
    try {
      const concept = await this.api.createConcept(
        this.sessionId,
        this.state.schemaId,
        name,
        elementIds,
      );
      await this.load(this.state.schemaId);
      return concept;
    } catch (err) {
      if (err instanceof ApiError && err.status === 409) {
        this.state.conflict = err.message;
      } else {
        this.state.error = err instanceof Error ? err.message : String(err);
      }
      this.notify();
      return null;
    }
  }

  async adoptSuggestion(suggestion: Suggestion): Promise<Concept | null> {
    return this.createConcept(suggestion.name, suggestion.memberIds);
  }

  conceptsFor(schemaId: string): Concept[] {
    return this.state.concepts.filter((c) => c.schemaId === schemaId);
  }

  render(): string {
    const s = this.state;
    const conflict = s.conflict
      ? `<p class="conflict">${escapeHtml(s.conflict)}</p>`
      : "";
    const error = s.error ? `<p class="error">${escapeHtml(s.error)}</p>` : "";
    const concepts = this.conceptsFor(s.schemaId)
      .map(
        (c) => `<li data-concept="${escapeHtml(c.id)}">
          <strong>${escapeHtml(c.name)}</strong>
          (${c.memberCount} elements)
          <span class="progress">${c.reviewed} reviewed / ${c.accepted} accepted</span>
          <button data-action="incremental" data-concept="${escapeHtml(c.id)}">match</button>
        </li>`,
      )
      .join("");
    const suggestions = s.suggestions
      .map(
        (g, i) => `<li>
          ${escapeHtml(g.name)} (${g.size} elements)
          <button data-action="adopt" data-suggestion="${i}">create concept</button>
        </li>`,
      )
      .join("");
    return `${error}${conflict}
      <section class="concepts"><h3>concepts</h3><ul>${concepts}</ul></section>
      <section class="suggestions"><h3>suggestions</h3><ul>${suggestions}</ul></section>
      <form class="new-concept">
        <input name="concept-name" placeholder="concept name">
        <input name="element-ids" placeholder="element ids, comma separated">
        <button type="submit">assign</button>
      </form>`;
  }
}
