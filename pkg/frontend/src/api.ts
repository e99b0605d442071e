// Typed client for the schemamatch service. The fetch implementation is
// injectable so tests can run against an in-memory fake server.

import type {
  Annotation,
  Concept,
  Decision,
  DecisionStatus,
  IncrementalResult,
  LinkQuery,
  LinksPage,
  PartitionDoc,
  SchemaInfo,
  SchemaTree,
  SessionInfo,
  Suggestion,
} from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    message: string,
  ) {
    super(message);
  }
}

function buildQuery(params: Record<string, string | number | undefined>): string {
  const parts: string[] = [];
  for (const [key, value] of Object.entries(params)) {
    if (value !== undefined) {
      parts.push(`${encodeURIComponent(key)}=${encodeURIComponent(String(value))}`);
    }
  }
  return parts.length ? `?${parts.join("&")}` : "";
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchImpl: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method };
    if (body !== undefined) {
      init.headers = { "content-type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const resp = await this.fetchImpl(this.baseUrl + path, init);
    if (!resp.ok) {
      let detail = resp.statusText;
      try {
        const payload = (await resp.json()) as { detail?: string };
        if (payload.detail) detail = payload.detail;
      } catch {
        // non-JSON error body; keep the status text
      }
      throw new ApiError(resp.status, detail);
    }
    return (await resp.json()) as T;
  }

  listSchemas(): Promise<SchemaInfo[]> {
    return this.request("GET", "/schemas");
  }

  schemaTree(schemaId: string): Promise<SchemaTree> {
    return this.request("GET", `/schemas/${encodeURIComponent(schemaId)}/tree`);
  }

  listSessions(): Promise<SessionInfo[]> {
    return this.request("GET", "/sessions");
  }

  links(sessionId: string, query: LinkQuery = {}): Promise<LinksPage> {
    const qs = buildQuery({
      minScore: query.minScore,
      maxScore: query.maxScore,
      leftSubtree: query.leftSubtree,
      rightSubtree: query.rightSubtree,
      depthMin: query.depthMin,
      depthMax: query.depthMax,
      sort: query.sort,
      offset: query.offset,
      limit: query.limit,
    });
    return this.request("GET", `/sessions/${encodeURIComponent(sessionId)}/links${qs}`);
  }

  postDecision(
    sessionId: string,
    leftId: string,
    rightId: string,
    status: DecisionStatus,
    annotation: Annotation = "none",
    author = "",
    assignee = "",
  ): Promise<Decision> {
    return this.request("POST", `/sessions/${encodeURIComponent(sessionId)}/decisions`, {
      leftId,
      rightId,
      status,
      annotation,
      author,
      assignee,
    });
  }

  listConcepts(sessionId: string): Promise<Concept[]> {
    return this.request("GET", `/sessions/${encodeURIComponent(sessionId)}/concepts`);
  }

  createConcept(
    sessionId: string,
    schemaId: string,
    name: string,
    elementIds: string[],
  ): Promise<Concept> {
    return this.request("POST", `/sessions/${encodeURIComponent(sessionId)}/concepts`, {
      schemaId,
      name,
      elementIds,
    });
  }

  suggestions(sessionId: string, schemaId: string): Promise<Suggestion[]> {
    const qs = buildQuery({ schemaId });
    return this.request("GET", `/sessions/${encodeURIComponent(sessionId)}/suggestions${qs}`);
  }

  incrementalMatch(
    sessionId: string,
    conceptId: string,
    minScore?: number,
  ): Promise<IncrementalResult> {
    return this.request(
      "POST",
      `/sessions/${encodeURIComponent(sessionId)}/incremental-match`,
      { conceptId, minScore },
    );
  }

  partition(sessionId: string, mode = "validated"): Promise<PartitionDoc> {
    const qs = buildQuery({ mode });
    return this.request("GET", `/sessions/${encodeURIComponent(sessionId)}/partition${qs}`);
  }

  exportUrl(sessionId: string, kind: "concepts" | "elements" | "matrix"): string {
    return `${this.baseUrl}/sessions/${encodeURIComponent(sessionId)}/export/${kind}`;
  }
}
