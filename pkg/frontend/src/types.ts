// Wire types for the schemamatch HTTP API (see ../docs/api.md).

export interface SchemaInfo {
  id: string;
  name: string;
  sourceFormat: string;
  elementCount: number;
}

export interface TreeNode {
  id: string;
  name: string;
  documentation: string;
  typeHint: string;
  depth: number;
  path: string;
  children: TreeNode[];
}

export interface SchemaTree {
  id: string;
  name: string;
  sourceFormat: string;
  elementCount: number;
  roots: TreeNode[];
}

export interface SessionInfo {
  id: string;
  schemaIds: string[];
  pairs: { left: string; right: string }[];
  tau: number;
  decisionCount: number;
  conceptCount: number;
}

export type DecisionStatus = "candidate" | "accepted" | "rejected";
export type Annotation = "equivalent" | "is-a" | "part-of" | "related" | "none";

export interface LinkRow {
  leftId: string;
  rightId: string;
  leftPath: string;
  rightPath: string;
  score: number;
  status: DecisionStatus;
  annotation: Annotation;
  author: string;
  assignee: string;
  leftConcept: string;
  rightConcept: string;
}

export interface LinksPage {
  total: number;
  offset: number;
  limit: number;
  links: LinkRow[];
}

export type SortKey = "score" | "status" | "leftPath" | "rightPath" | "assignee";

export interface LinkQuery {
  minScore?: number;
  maxScore?: number;
  leftSubtree?: string;
  rightSubtree?: string;
  depthMin?: number;
  depthMax?: number;
  sort?: SortKey;
  offset?: number;
  limit?: number;
}

export interface Decision {
  leftId: string;
  rightId: string;
  status: DecisionStatus;
  annotation: Annotation;
  author: string;
  assignee: string;
  timestamp: string;
}

export interface Concept {
  id: string;
  name: string;
  schemaId: string;
  memberElementIds: string[];
  memberCount: number;
  reviewed: number;
  accepted: number;
}

export interface Suggestion {
  rootId: string;
  name: string;
  size: number;
  memberIds: string[];
}

export interface IncrementalResult {
  conceptId: string;
  considered: number;
  links: LinkRow[];
}

export interface PartitionDoc {
  kind: "partition";
  left_schema_id: string;
  right_schema_id: string;
  mode: string;
  left_total: number;
  right_total: number;
  common_pair_count: number;
  left_only_count: number;
  right_only_count: number;
  left_only_pct: number;
  right_only_pct: number;
  left_common_pct: number;
  right_common_pct: number;
}
