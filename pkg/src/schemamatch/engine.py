"""Pairwise match engine.

Four voters score every (left element, right element) pair with a confidence
in (-1, +1); a merger combines those confidences into one match score per
pair. All voters are symmetric in their arguments and blend two ingredients:

  similarity      the evidence ratio in [0, 1]
  evidence_mass   the quantity of evidence (more evidence pushes the
                  confidence away from 0)

  confidence = (2 * similarity - 1) * mass / (mass + K)

so zero evidence always yields zero confidence and the score saturates
towards +/-1 as evidence accumulates.

Voters:
  name_token  Jaccard over stemmed name-token bags, with 0.5 credit for
              token pairs sharing a >=4-character prefix; mass = |bag1|+|bag2|
  name_edit   1 - normalized Levenshtein over lowercased raw names;
              mass = min(len1, len2) / 4
  doc_token   Jaccard over documentation token bags; mass = min(|b1|, |b2|)
  structure   Jaccard over the union of name-token bags of parent and
              children; mass = number of neighbor elements compared

match() evaluates the full cross product with vectorized kernels; vote()
is the scalar definition of the same arithmetic. The two paths agree
bit-for-bit, which the test suite checks.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import PairBudgetError, UnknownIdError, ValidationError
from .linguistics import DEFAULT_STOPWORDS, load_stopwords, term_bag, tokenize, stem
from .model import Schema, SchemaElement

VOTER_IDS = ("name_token", "name_edit", "doc_token", "structure")

PREFIX_LEN = 4  # tokens sharing a prefix at least this long earn 0.5 credit


@dataclass(frozen=True)
class MatchConfig:
    voters: tuple[str, ...] = VOTER_IDS
    k: float = 4.0
    pair_budget: int = 4_000_000
    threshold: float = 0.5
    stopword_file: str | None = None
    stopwords: frozenset[str] = field(default=DEFAULT_STOPWORDS, compare=False, repr=False)

    def __post_init__(self):
        unknown = [v for v in self.voters if v not in VOTER_IDS]
        if unknown:
            raise ValidationError(f"unknown voters: {unknown}")
        if not self.voters:
            raise ValidationError("at least one voter must be enabled")
        if self.k <= 0:
            raise ValidationError("k must be positive")
        # canonical voter order keeps the merger deterministic
        object.__setattr__(
            self, "voters", tuple(v for v in VOTER_IDS if v in self.voters)
        )

    def to_dict(self) -> dict:
        return {
            "voters": list(self.voters),
            "k": self.k,
            "pair_budget": self.pair_budget,
            "threshold": self.threshold,
            "stopword_file": self.stopword_file,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "MatchConfig":
        cfg = cls(
            voters=tuple(data.get("voters", VOTER_IDS)),
            k=float(data.get("k", 4.0)),
            pair_budget=int(data.get("pair_budget", 4_000_000)),
            threshold=float(data.get("threshold", 0.5)),
            stopword_file=data.get("stopword_file"),
        )
        if cfg.stopword_file:
            object.__setattr__(cfg, "stopwords", load_stopwords(cfg.stopword_file))
        return cfg


def parse_config(text: str) -> MatchConfig:
    """Parse a ``key = value`` configuration (# comments allowed).

    Keys: voters (comma-separated), k, pair_budget, threshold, stopword_file.
    """
    data: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValidationError(f"config line {lineno}: expected key = value")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key == "voters":
            data["voters"] = tuple(v.strip() for v in value.split(",") if v.strip())
        elif key in ("k", "threshold"):
            data[key] = float(value)
        elif key == "pair_budget":
            data[key] = int(value)
        elif key == "stopword_file":
            data[key] = value
        else:
            raise ValidationError(f"config line {lineno}: unknown key {key!r}")
    return MatchConfig.from_dict(data)


def load_config(path) -> MatchConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())


@dataclass(frozen=True)
class VoterScore:
    voter_id: str
    similarity: float
    evidence_mass: float
    confidence: float


@dataclass(frozen=True)
class MatchLink:
    left_id: str
    right_id: str
    score: float
    voter_scores: tuple[VoterScore, ...] = ()


def confidence(similarity: float, evidence_mass: float, k: float = 4.0) -> float:
    """(2s - 1) * m / (m + K); strictly inside (-1, +1), zero when m == 0."""
    return (2.0 * similarity - 1.0) * (evidence_mass / (evidence_mass + k))


def merge_votes(scores: list[VoterScore] | tuple[VoterScore, ...]) -> float:
    """Confidence-magnitude-weighted mean: sum(c*|c|) / sum(|c|), 0 when all
    confidences are 0. Confident voters dominate uncertain ones."""
    if not scores:
        raise ValidationError("merge_votes requires at least one voter score")
    num = 0.0
    den = 0.0
    for s in scores:
        num += s.confidence * abs(s.confidence)
        den += abs(s.confidence)
    return num / den if den > 0.0 else 0.0


# ---------------------------------------------------------------------------
# per-element features
# ---------------------------------------------------------------------------


class _Features:
    """Precomputed linguistic features for every element of one schema."""

    def __init__(self, schema: Schema, stopwords: frozenset[str]):
        self.schema = schema
        self.names_lower: list[str] = []
        self.name_bags: list[dict[str, int]] = []
        self.name_sizes: list[int] = []
        self.doc_bags: list[dict[str, int]] = []
        self.doc_sizes: list[int] = []
        self.neighbor_sets: list[frozenset[str]] = []
        self.neighbor_counts: list[int] = []

        name_tokens: dict[str, tuple[str, ...]] = {}
        for el in schema.elements:
            name_tokens[el.id] = tuple(stem(t) for t in tokenize(el.name, stopwords))
        for el in schema.elements:
            self.names_lower.append(el.name.lower())
            bag: dict[str, int] = {}
            for t in name_tokens[el.id]:
                bag[t] = bag.get(t, 0) + 1
            self.name_bags.append(bag)
            self.name_sizes.append(len(name_tokens[el.id]))
            doc_terms = tuple(stem(t) for t in tokenize(el.documentation, stopwords))
            dbag: dict[str, int] = {}
            for t in doc_terms:
                dbag[t] = dbag.get(t, 0) + 1
            self.doc_bags.append(dbag)
            self.doc_sizes.append(len(doc_terms))
            neighbors = list(schema.children(el.id))
            parent = schema.parent(el.id)
            if parent is not None:
                neighbors.append(parent)
            toks: set[str] = set()
            for nb in neighbors:
                toks.update(name_tokens[nb.id])
            self.neighbor_sets.append(frozenset(toks))
            self.neighbor_counts.append(len(neighbors))


def _prefix_key(token: str) -> str | None:
    return token[:PREFIX_LEN] if len(token) >= PREFIX_LEN else None


# -- scalar similarity kernels (the definitional path) ----------------------


def _name_token_parts(bag_a: dict[str, int], bag_b: dict[str, int]) -> float:
    """Shared mass between two name bags: exact token matches count 1.0,
    leftover tokens pair within their 4-char prefix class for 0.5 each."""
    exact = 0
    exact4 = 0
    for t, ca in bag_a.items():
        cb = bag_b.get(t)
        if cb:
            m = ca if ca < cb else cb
            exact += m
            if len(t) >= PREFIX_LEN:
                exact4 += m
    sums_a: dict[str, int] = {}
    for t, ca in bag_a.items():
        key = _prefix_key(t)
        if key is not None:
            sums_a[key] = sums_a.get(key, 0) + ca
    key_overlap = 0
    sums_b: dict[str, int] = {}
    for t, cb in bag_b.items():
        key = _prefix_key(t)
        if key is not None:
            sums_b[key] = sums_b.get(key, 0) + cb
    for key, sa in sums_a.items():
        sb = sums_b.get(key)
        if sb:
            key_overlap += sa if sa < sb else sb
    return exact + 0.5 * (key_overlap - exact4)


def _jaccard_from_shared(shared: float, size_a: int, size_b: int) -> float:
    den = size_a + size_b - shared
    return shared / den if den > 0.0 else 1.0


def _multiset_overlap(bag_a: dict[str, int], bag_b: dict[str, int]) -> int:
    total = 0
    for t, ca in bag_a.items():
        cb = bag_b.get(t)
        if cb:
            total += ca if ca < cb else cb
    return total


def _edit_distance(a: str, b: str) -> int:
    if len(a) < len(b):
        a, b = b, a
    if not b:
        return len(a)
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        cur = [i] + [0] * len(b)
        for j, cb in enumerate(b, start=1):
            cur[j] = min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb))
        prev = cur
    return prev[len(b)]


def _similarity_and_mass(
    voter_id: str,
    fa: _Features,
    ia: int,
    fb: _Features,
    ib: int,
) -> tuple[float, float]:
    if voter_id == "name_token":
        shared = _name_token_parts(fa.name_bags[ia], fb.name_bags[ib])
        sa, sb = fa.name_sizes[ia], fb.name_sizes[ib]
        return _jaccard_from_shared(shared, sa, sb), float(sa + sb)
    if voter_id == "name_edit":
        a, b = fa.names_lower[ia], fb.names_lower[ib]
        if not a and not b:
            return 1.0, 0.0
        dist = _edit_distance(a, b)
        longer = max(len(a), len(b))
        return 1.0 - dist / longer, min(len(a), len(b)) / 4.0
    if voter_id == "doc_token":
        shared = _multiset_overlap(fa.doc_bags[ia], fb.doc_bags[ib])
        sa, sb = fa.doc_sizes[ia], fb.doc_sizes[ib]
        return _jaccard_from_shared(float(shared), sa, sb), float(min(sa, sb))
    if voter_id == "structure":
        na, nb = fa.neighbor_sets[ia], fb.neighbor_sets[ib]
        inter = len(na & nb)
        union = len(na) + len(nb) - inter
        sim = inter / union if union > 0 else 1.0
        return sim, float(fa.neighbor_counts[ia] + fb.neighbor_counts[ib])
    raise UnknownIdError(f"unknown voter {voter_id!r}")


def vote(
    voter_id: str,
    left: SchemaElement,
    right: SchemaElement,
    left_schema: Schema | None = None,
    right_schema: Schema | None = None,
    config: MatchConfig | None = None,
) -> VoterScore:
    """Score one pair with one voter. The structure voter needs the owning
    schemas for neighbor lookup; the lexical voters do not."""
    cfg = config or MatchConfig()
    if voter_id not in VOTER_IDS:
        raise UnknownIdError(f"unknown voter {voter_id!r}")
    if voter_id == "structure" and (left_schema is None or right_schema is None):
        raise ValidationError("structure voter requires left_schema and right_schema")
    fa = _single_features(left, left_schema, cfg.stopwords)
    fb = _single_features(right, right_schema, cfg.stopwords)
    sim, mass = _similarity_and_mass(voter_id, fa, 0, fb, 0)
    conf = confidence(sim, mass, cfg.k)
    return VoterScore(voter_id, sim, mass, conf)


def _single_features(
    el: SchemaElement, schema: Schema | None, stopwords: frozenset[str]
) -> _Features:
    if schema is not None:
        full = _Features(schema, stopwords)
        idx = schema.order_index(el.id)
        single = _Features.__new__(_Features)
        single.schema = schema
        single.names_lower = [full.names_lower[idx]]
        single.name_bags = [full.name_bags[idx]]
        single.name_sizes = [full.name_sizes[idx]]
        single.doc_bags = [full.doc_bags[idx]]
        single.doc_sizes = [full.doc_sizes[idx]]
        single.neighbor_sets = [full.neighbor_sets[idx]]
        single.neighbor_counts = [full.neighbor_counts[idx]]
        return single
    lone = Schema(el.id.split(":")[0] or "tmp", "tmp", "canonical", [replace(el, parent_id=None, depth=1, path=el.name)])
    return _Features(lone, stopwords)


# -- vectorized kernels ------------------------------------------------------


def _token_index(bags: list[dict[str, int]], clip: bool) -> dict[str, tuple[np.ndarray, np.ndarray]]:
    """token -> (element indices, counts) arrays for sparse accumulation."""
    tmp: dict[str, tuple[list[int], list[int]]] = {}
    for i, bag in enumerate(bags):
        for t, c in bag.items():
            slot = tmp.setdefault(t, ([], []))
            slot[0].append(i)
            slot[1].append(1 if clip else c)
    return {
        t: (np.asarray(ix, dtype=np.intp), np.asarray(cs, dtype=np.float64))
        for t, (ix, cs) in tmp.items()
    }


def _accumulate_overlap(
    out: np.ndarray,
    index_a: dict[str, tuple[np.ndarray, np.ndarray]],
    index_b: dict[str, tuple[np.ndarray, np.ndarray]],
) -> None:
    for t, (ia, ca) in index_a.items():
        hit = index_b.get(t)
        if hit is None:
            continue
        ib, cb = hit
        out[np.ix_(ia, ib)] += np.minimum.outer(ca, cb)


def _key_sums(bags: list[dict[str, int]]) -> list[dict[str, int]]:
    out = []
    for bag in bags:
        sums: dict[str, int] = {}
        for t, c in bag.items():
            key = _prefix_key(t)
            if key is not None:
                sums[key] = sums.get(key, 0) + c
        out.append(sums)
    return out


def _exact_overlap_min4(bags_a, bags_b, shape) -> np.ndarray:
    filt_a = [{t: c for t, c in bag.items() if len(t) >= PREFIX_LEN} for bag in bags_a]
    filt_b = [{t: c for t, c in bag.items() if len(t) >= PREFIX_LEN} for bag in bags_b]
    out = np.zeros(shape)
    _accumulate_overlap(out, _token_index(filt_a, False), _token_index(filt_b, False))
    return out


def _levenshtein_matrix(names_a: list[str], names_b: list[str]) -> np.ndarray:
    """Dense edit-distance matrix via a batched DP over name groups of equal
    length; the horizontal DP dependency is resolved with a running minimum."""
    n_a, n_b = len(names_a), len(names_b)
    out = np.zeros((n_a, n_b), dtype=np.int32)
    if n_a == 0 or n_b == 0:
        return out
    max_b = max(len(s) for s in names_b)
    len_b = np.asarray([len(s) for s in names_b], dtype=np.int32)
    if max_b == 0:
        out[:] = np.asarray([len(s) for s in names_a], dtype=np.int32)[:, None]
        return out
    arr_b = np.zeros((n_b, max_b), dtype=np.int32)
    for j, s in enumerate(names_b):
        arr_b[j, : len(s)] = [ord(c) for c in s]

    by_len: dict[int, list[int]] = {}
    for i, s in enumerate(names_a):
        by_len.setdefault(len(s), []).append(i)

    jgrid = np.arange(max_b + 1, dtype=np.int32)
    gather = np.broadcast_to(len_b[None, :, None], (1, n_b, 1))
    cells = n_b * (max_b + 1)
    chunk_rows = max(1, 4_000_000 // max(cells, 1))

    for length, idxs in sorted(by_len.items()):
        if length == 0:
            out[idxs, :] = len_b[None, :]
            continue
        codes = np.asarray([[ord(c) for c in names_a[i]] for i in idxs], dtype=np.int32)
        for start in range(0, len(idxs), chunk_rows):
            rows = idxs[start : start + chunk_rows]
            a_chunk = codes[start : start + chunk_rows]
            g = len(rows)
            dp = np.broadcast_to(jgrid, (g, n_b, max_b + 1)).copy()
            for i in range(1, length + 1):
                cost = (a_chunk[:, i - 1][:, None, None] != arr_b[None, :, :]).astype(np.int32)
                cand = np.minimum(dp[:, :, 1:] + 1, dp[:, :, :-1] + cost)
                acc = np.empty_like(dp)
                acc[:, :, 0] = i
                acc[:, :, 1:] = cand - jgrid[None, None, 1:]
                np.minimum.accumulate(acc, axis=2, out=acc)
                dp = acc + jgrid[None, None, :]
            dist = np.take_along_axis(dp, np.broadcast_to(gather, (g, n_b, 1)), axis=2)[:, :, 0]
            out[np.asarray(rows)[:, None], np.arange(n_b)[None, :]] = dist
    return out


def _edit_plane(fa: _Features, fb: _Features) -> tuple[np.ndarray, np.ndarray]:
    uniq_a = sorted(set(fa.names_lower))
    uniq_b = sorted(set(fb.names_lower))
    pos_a = {s: i for i, s in enumerate(uniq_a)}
    pos_b = {s: i for i, s in enumerate(uniq_b)}
    dist_u = _levenshtein_matrix(uniq_a, uniq_b)
    inv_a = np.asarray([pos_a[s] for s in fa.names_lower], dtype=np.intp)
    inv_b = np.asarray([pos_b[s] for s in fb.names_lower], dtype=np.intp)
    dist = dist_u[inv_a[:, None], inv_b[None, :]].astype(np.float64)
    len_a = np.asarray([len(s) for s in fa.names_lower], dtype=np.float64)
    len_b = np.asarray([len(s) for s in fb.names_lower], dtype=np.float64)
    longer = np.maximum(len_a[:, None], len_b[None, :])
    sim = np.where(longer > 0, 1.0 - dist / np.where(longer > 0, longer, 1.0), 1.0)
    mass = np.minimum(len_a[:, None], len_b[None, :]) / 4.0
    return sim, mass


def _voter_planes(voter_id: str, fa: _Features, fb: _Features) -> tuple[np.ndarray, np.ndarray]:
    shape = (len(fa.names_lower), len(fb.names_lower))
    if voter_id == "name_token":
        exact = np.zeros(shape)
        _accumulate_overlap(exact, _token_index(fa.name_bags, False), _token_index(fb.name_bags, False))
        key_overlap = np.zeros(shape)
        keys_a = _key_sums(fa.name_bags)
        keys_b = _key_sums(fb.name_bags)
        _accumulate_overlap(key_overlap, _token_index(keys_a, False), _token_index(keys_b, False))
        exact4 = _exact_overlap_min4(fa.name_bags, fb.name_bags, shape)
        shared = exact + 0.5 * (key_overlap - exact4)
        size_a = np.asarray(fa.name_sizes, dtype=np.float64)
        size_b = np.asarray(fb.name_sizes, dtype=np.float64)
        den = size_a[:, None] + size_b[None, :] - shared
        sim = np.where(den > 0, shared / np.where(den > 0, den, 1.0), 1.0)
        return sim, size_a[:, None] + size_b[None, :]
    if voter_id == "name_edit":
        return _edit_plane(fa, fb)
    if voter_id == "doc_token":
        inter = np.zeros(shape)
        _accumulate_overlap(inter, _token_index(fa.doc_bags, False), _token_index(fb.doc_bags, False))
        size_a = np.asarray(fa.doc_sizes, dtype=np.float64)
        size_b = np.asarray(fb.doc_sizes, dtype=np.float64)
        den = size_a[:, None] + size_b[None, :] - inter
        sim = np.where(den > 0, inter / np.where(den > 0, den, 1.0), 1.0)
        return sim, np.minimum(size_a[:, None], size_b[None, :])
    if voter_id == "structure":
        set_bags_a = [{t: 1 for t in s} for s in fa.neighbor_sets]
        set_bags_b = [{t: 1 for t in s} for s in fb.neighbor_sets]
        inter = np.zeros(shape)
        _accumulate_overlap(inter, _token_index(set_bags_a, True), _token_index(set_bags_b, True))
        size_a = np.asarray([len(s) for s in fa.neighbor_sets], dtype=np.float64)
        size_b = np.asarray([len(s) for s in fb.neighbor_sets], dtype=np.float64)
        den = size_a[:, None] + size_b[None, :] - inter
        sim = np.where(den > 0, inter / np.where(den > 0, den, 1.0), 1.0)
        cnt_a = np.asarray(fa.neighbor_counts, dtype=np.float64)
        cnt_b = np.asarray(fb.neighbor_counts, dtype=np.float64)
        return sim, cnt_a[:, None] + cnt_b[None, :]
    raise UnknownIdError(f"unknown voter {voter_id!r}")


class MatchMatrix:
    """Dense |left| x |right| match scores with per-voter breakdowns.

    Immutable after construction; safe to share across threads.
    """

    def __init__(
        self,
        left_schema: Schema,
        right_schema: Schema,
        config: MatchConfig,
        scores: np.ndarray,
        voter_confidence: dict[str, np.ndarray],
        features: tuple[_Features, _Features] | None = None,
    ):
        self.left_schema = left_schema
        self.right_schema = right_schema
        self.config = config
        self.scores = scores
        self.voter_confidence = voter_confidence
        self.left_ids = tuple(el.id for el in left_schema.elements)
        self.right_ids = tuple(el.id for el in right_schema.elements)
        self._features = features
        scores.setflags(write=False)
        for plane in voter_confidence.values():
            plane.setflags(write=False)

    @property
    def left_schema_id(self) -> str:
        return self.left_schema.id

    @property
    def right_schema_id(self) -> str:
        return self.right_schema.id

    @property
    def pair_count(self) -> int:
        return self.scores.size

    def contains_pair(self, left_id: str, right_id: str) -> bool:
        return left_id in self.left_schema and right_id in self.right_schema

    def score(self, left_id: str, right_id: str) -> float:
        i = self.left_schema.order_index(left_id) if left_id in self.left_schema else None
        j = self.right_schema.order_index(right_id) if right_id in self.right_schema else None
        if i is None or j is None:
            raise UnknownIdError(f"pair ({left_id!r}, {right_id!r}) not in matrix")
        return float(self.scores[i, j])

    def breakdown(self, left_id: str, right_id: str) -> tuple[VoterScore, ...]:
        """Per-voter similarity/evidence/confidence for one pair, recomputed
        from the element features (identical to the stored planes)."""
        fa, fb = self._feats()
        i = self.left_schema.order_index(left_id)
        j = self.right_schema.order_index(right_id)
        out = []
        for v in self.config.voters:
            sim, mass = _similarity_and_mass(v, fa, i, fb, j)
            out.append(VoterScore(v, sim, mass, confidence(sim, mass, self.config.k)))
        return tuple(out)

    def link(self, left_id: str, right_id: str) -> MatchLink:
        return MatchLink(
            left_id, right_id, self.score(left_id, right_id), self.breakdown(left_id, right_id)
        )

    def _feats(self) -> tuple[_Features, _Features]:
        if self._features is None:
            self._features = (
                _Features(self.left_schema, self.config.stopwords),
                _Features(self.right_schema, self.config.stopwords),
            )
        return self._features

    def row(self, left_id: str) -> np.ndarray:
        return self.scores[self.left_schema.order_index(left_id), :]

    def __repr__(self) -> str:
        return (
            f"MatchMatrix({self.left_schema_id!r} x {self.right_schema_id!r}, "
            f"{self.pair_count} pairs)"
        )


def match(left: Schema, right: Schema, config: MatchConfig | None = None) -> MatchMatrix:
    """Score the full |left| x |right| cross product.

    Deterministic: the result depends only on the two schemata and the
    config, never on scheduling or iteration order.
    """
    cfg = config or MatchConfig()
    pairs = left.element_count * right.element_count
    if pairs > cfg.pair_budget:
        raise PairBudgetError(
            f"{left.element_count} x {right.element_count} = {pairs} pairs "
            f"exceeds budget {cfg.pair_budget}"
        )
    fa = _Features(left, cfg.stopwords)
    fb = _Features(right, cfg.stopwords)
    shape = (left.element_count, right.element_count)
    num = np.zeros(shape)
    den = np.zeros(shape)
    voter_conf: dict[str, np.ndarray] = {}
    for v in cfg.voters:
        sim, mass = _voter_planes(v, fa, fb)
        conf = (2.0 * sim - 1.0) * (mass / (mass + cfg.k))
        voter_conf[v] = conf
        num += conf * np.abs(conf)
        den += np.abs(conf)
    scores = np.divide(num, den, out=np.zeros(shape), where=den > 0)
    return MatchMatrix(left, right, cfg, scores, voter_conf, features=(fa, fb))
