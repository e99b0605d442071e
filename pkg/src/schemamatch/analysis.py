"""Decision-maker analytics over one or more match sessions.

partition()                 the {left-only, right-only, common} split of a
                            binary match, with per-side percentages
comprehensive_vocabulary()  cross-schema terms (union-find equivalence
                            classes over matched elements) bucketed into the
                            2^N - 1 schema-subset cells
overlap_distance()/cluster() vocabulary-based distances and average-linkage
                            agglomerative clustering
search()                    rank a repository by how well a query schema's
                            elements are covered

Two evidence modes everywhere: "validated" uses accepted decisions,
"automatic" uses links scoring at or above a threshold.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .engine import MatchConfig, match
from .errors import MissingPairError, UnknownIdError, ValidationError
from .model import Schema
from .session import Session

ElementKey = tuple[str, str]  # (schema_id, element_id)


class UnionFind:
    """Disjoint sets with path compression and union by size."""

    def __init__(self):
        self.parent: dict = {}
        self.size: dict = {}

    def add(self, x) -> None:
        if x not in self.parent:
            self.parent[x] = x
            self.size[x] = 1

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]

    def groups(self) -> dict:
        out: dict = {}
        for x in self.parent:
            out.setdefault(self.find(x), []).append(x)
        return out


def _pct(numerator: int, denominator: int) -> int:
    """Percentage rounded to the nearest integer (half away from zero)."""
    if denominator == 0:
        return 0
    return int(100.0 * numerator / denominator + 0.5)


@dataclass(frozen=True)
class PartitionReport:
    left_schema_id: str
    right_schema_id: str
    left_total: int
    right_total: int
    common_pairs: frozenset[tuple[str, str]]
    left_only: frozenset[str]
    right_only: frozenset[str]
    mode: str

    @property
    def left_common(self) -> frozenset[str]:
        return frozenset(l for l, _ in self.common_pairs)

    @property
    def right_common(self) -> frozenset[str]:
        return frozenset(r for _, r in self.common_pairs)

    @property
    def left_only_pct(self) -> int:
        return _pct(len(self.left_only), self.left_total)

    @property
    def right_only_pct(self) -> int:
        return _pct(len(self.right_only), self.right_total)

    @property
    def left_common_pct(self) -> int:
        return _pct(len(self.left_common), self.left_total)

    @property
    def right_common_pct(self) -> int:
        return _pct(len(self.right_common), self.right_total)


def _matched_pairs(
    session: Session, left_schema_id: str, right_schema_id: str, mode: str, min_score: float | None
) -> frozenset[tuple[str, str]]:
    pair = (left_schema_id, right_schema_id)
    flipped = pair not in session.matrix_pairs
    if flipped:
        if (right_schema_id, left_schema_id) not in session.matrix_pairs:
            raise UnknownIdError(f"no matrix for schema pair {pair!r}")
        pair = (right_schema_id, left_schema_id)
    if mode == "validated":
        raw = session.accepted_pairs()
        ls = session.schema(pair[0])
        pairs = {(l, r) for l, r in raw if l in ls}
    elif mode == "automatic":
        matrix = session.matrix(*pair)
        tau = session.tau if min_score is None else min_score
        ii, jj = np.nonzero(matrix.scores >= tau)
        pairs = {(matrix.left_ids[i], matrix.right_ids[j]) for i, j in zip(ii, jj)}
    else:
        raise ValidationError(f"unknown mode {mode!r}")
    if flipped:
        pairs = {(r, l) for l, r in pairs}
    return frozenset(pairs)


def partition(
    session: Session,
    left_schema_id: str | None = None,
    right_schema_id: str | None = None,
    mode: str = "validated",
    min_score: float | None = None,
) -> PartitionReport:
    """Split two schemata into left-only / right-only / common. An element is
    common iff it participates in at least one accepted match (validated) or
    one link scoring >= the threshold (automatic)."""
    if left_schema_id is None or right_schema_id is None:
        left_schema_id, right_schema_id = session.primary_pair()
    left = session.schema(left_schema_id)
    right = session.schema(right_schema_id)
    pairs = _matched_pairs(session, left_schema_id, right_schema_id, mode, min_score)
    left_common = {l for l, _ in pairs}
    right_common = {r for _, r in pairs}
    return PartitionReport(
        left_schema_id=left_schema_id,
        right_schema_id=right_schema_id,
        left_total=left.element_count,
        right_total=right.element_count,
        common_pairs=pairs,
        left_only=frozenset(el.id for el in left.elements if el.id not in left_common),
        right_only=frozenset(el.id for el in right.elements if el.id not in right_common),
        mode=mode,
    )


# ---------------------------------------------------------------------------
# comprehensive vocabulary
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class VocabularyTerm:
    term_id: str
    member_keys: tuple[ElementKey, ...]  # sorted (schema_id, element_id) pairs
    signature: frozenset[str]
    representative_name: str


@dataclass(frozen=True)
class Vocabulary:
    schema_ids: tuple[str, ...]
    terms: tuple[VocabularyTerm, ...]

    def cell(self, signature: frozenset[str]) -> tuple[VocabularyTerm, ...]:
        return tuple(t for t in self.terms if t.signature == signature)

    def cells(self) -> list[tuple[frozenset[str], tuple[VocabularyTerm, ...]]]:
        """All 2^N - 1 signature cells in deterministic order (by size then
        lexicographic member ids), including empty ones."""
        out = []
        for n in range(1, len(self.schema_ids) + 1):
            for combo in itertools.combinations(sorted(self.schema_ids), n):
                sig = frozenset(combo)
                out.append((sig, self.cell(sig)))
        return out

    def terms_touching(self, schema_id: str) -> tuple[VocabularyTerm, ...]:
        if schema_id not in self.schema_ids:
            raise UnknownIdError(f"schema {schema_id!r} not in vocabulary")
        return tuple(t for t in self.terms if schema_id in t.signature)


def comprehensive_vocabulary(
    sessions: list[Session] | tuple[Session, ...],
    mode: str = "validated",
    min_score: float | None = None,
) -> Vocabulary:
    """Union-find over the elements of all schemata, merging every matched
    pair across every session; each equivalence class becomes a term assigned
    to the exact subset of schemata it touches.

    Requires a matrix for every unordered pair of the N schemata involved.
    """
    if not sessions:
        raise ValidationError("at least one session required")
    schemas: dict[str, Schema] = {}
    for s in sessions:
        for sid in s.schema_ids:
            sch = s.schema(sid)
            if sid in schemas:
                if not schemas[sid].tree_equal(sch):
                    raise ValidationError(f"schema {sid!r} differs between sessions")
            else:
                schemas[sid] = sch
    ids = sorted(schemas)
    required = {frozenset(p) for p in itertools.combinations(ids, 2)}
    present = set()
    for s in sessions:
        for l, r in s.matrix_pairs:
            present.add(frozenset((l, r)))
    missing = required - present
    if missing:
        raise MissingPairError(tuple(sorted(p)) for p in missing)

    uf = UnionFind()
    schema_of: dict[ElementKey, str] = {}
    for sid in ids:
        for el in schemas[sid].elements:
            key = (sid, el.id)
            uf.add(key)
            schema_of[key] = sid
    for s in sessions:
        for left_sid, right_sid in s.matrix_pairs:
            for l, r in _matched_pairs(s, left_sid, right_sid, mode, min_score):
                uf.union((left_sid, l), (right_sid, r))

    classes = sorted(uf.groups().values(), key=lambda members: min(members))
    terms = []
    for idx, members in enumerate(classes, start=1):
        keys = tuple(sorted(members))
        names = sorted(
            (schemas[sid].element(el_id).name for sid, el_id in keys),
            key=lambda n: (len(n), n),
        )
        terms.append(
            VocabularyTerm(
                term_id=f"t{idx}",
                member_keys=keys,
                signature=frozenset(sid for sid, _ in keys),
                representative_name=names[0],
            )
        )
    return Vocabulary(schema_ids=tuple(ids), terms=tuple(terms))


# ---------------------------------------------------------------------------
# distances and clustering
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DistanceMatrix:
    schema_ids: tuple[str, ...]
    values: tuple[tuple[float, ...], ...]

    def __post_init__(self):
        n = len(self.schema_ids)
        if len(self.values) != n or any(len(row) != n for row in self.values):
            raise ValidationError("distance matrix shape mismatch")
        for i in range(n):
            if self.values[i][i] != 0.0:
                raise ValidationError("distance matrix diagonal must be zero")
            for j in range(n):
                if self.values[i][j] != self.values[j][i]:
                    raise ValidationError("distance matrix must be symmetric")

    def distance(self, a: str, b: str) -> float:
        ia = self.schema_ids.index(a)
        ib = self.schema_ids.index(b)
        return self.values[ia][ib]


def overlap_distance(vocab: Vocabulary, schema_a: str, schema_b: str) -> float:
    """1 - Jaccard over vocabulary terms: terms touching both vs either."""
    touch_a = set(t.term_id for t in vocab.terms_touching(schema_a))
    touch_b = set(t.term_id for t in vocab.terms_touching(schema_b))
    either = touch_a | touch_b
    if not either:
        return 0.0
    return 1.0 - len(touch_a & touch_b) / len(either)


def distance_matrix(vocab: Vocabulary) -> DistanceMatrix:
    ids = vocab.schema_ids
    values = tuple(
        tuple(0.0 if a == b else overlap_distance(vocab, a, b) for b in ids) for a in ids
    )
    return DistanceMatrix(ids, values)


@dataclass(frozen=True)
class Merge:
    first: tuple[str, ...]
    second: tuple[str, ...]
    distance: float
    merged: tuple[str, ...]


@dataclass(frozen=True)
class ClusterResult:
    clusters: tuple[tuple[str, ...], ...]
    merges: tuple[Merge, ...]  # the full merge tree, cut or not


def cluster(dist: DistanceMatrix, cutoff: float) -> ClusterResult:
    """Average-linkage agglomerative clustering; flat clusters are the state
    after applying every merge with linkage distance <= cutoff. Ties pick the
    lexicographically smallest cluster pair, so results are deterministic."""
    ids = list(dist.schema_ids)
    active: list[tuple[str, ...]] = [(sid,) for sid in sorted(ids)]
    merges: list[Merge] = []

    def linkage(a: tuple[str, ...], b: tuple[str, ...]) -> float:
        total = 0.0
        for x in a:
            for y in b:
                total += dist.distance(x, y)
        return total / (len(a) * len(b))

    while len(active) > 1:
        best: tuple[float, tuple[str, ...], tuple[str, ...]] | None = None
        for a, b in itertools.combinations(sorted(active), 2):
            d = linkage(a, b)
            cand = (d, a, b)
            if best is None or cand < best:
                best = cand
        d, a, b = best
        merged = tuple(sorted(a + b))
        merges.append(Merge(a, b, d, merged))
        active.remove(a)
        active.remove(b)
        active.append(merged)

    clusters: list[tuple[str, ...]] = [(sid,) for sid in sorted(ids)]
    for m in merges:
        if m.distance <= cutoff:
            clusters.remove(m.first)
            clusters.remove(m.second)
            clusters.append(m.merged)
    clusters.sort()
    return ClusterResult(tuple(clusters), tuple(merges))


# ---------------------------------------------------------------------------
# schema-as-query search
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SearchResult:
    schema_id: str
    coverage: float  # fraction of query elements whose best link >= threshold
    mean_best: float


def search(
    query: Schema,
    repository: list[Schema] | tuple[Schema, ...],
    config: MatchConfig | None = None,
    min_score: float | None = None,
) -> list[SearchResult]:
    """Rank repository schemata by how much of the query they cover."""
    if not repository:
        raise ValidationError("repository must be non-empty")
    cfg = config or MatchConfig()
    tau = cfg.threshold if min_score is None else min_score
    results = []
    for candidate in repository:
        if query.element_count == 0 or candidate.element_count == 0:
            results.append(SearchResult(candidate.id, 0.0, 0.0))
            continue
        m = match(query, candidate, cfg)
        best = m.scores.max(axis=1)
        coverage = float((best >= tau).sum()) / query.element_count
        results.append(SearchResult(candidate.id, coverage, float(best.mean())))
    results.sort(key=lambda r: (-r.coverage, -r.mean_best, r.schema_id))
    return results
