import itertools
import random

import pytest

from schemamatch.analysis import (
    DistanceMatrix,
    UnionFind,
    Vocabulary,
    VocabularyTerm,
    cluster,
    comprehensive_vocabulary,
    distance_matrix,
    overlap_distance,
    partition,
    search,
)
from schemamatch.engine import MatchConfig
from schemamatch.errors import MissingPairError, UnknownIdError, ValidationError
from schemamatch.model import Node, Schema
from schemamatch.session import Session

from conftest import T, build_schema
from oracles import bruteforce_components


def _clone_with_id(schema: Schema, new_id: str) -> Schema:
    def to_node(el_id):
        el = schema.element(el_id)
        return Node(el.name, el.documentation, el.type_hint,
                    tuple(to_node(c.id) for c in schema.children(el_id)))

    return Schema.build(new_id, new_id, "canonical", [to_node(r.id) for r in schema.roots()])


def _session_over(left: Schema, right: Schema, session_id="s") -> Session:
    s = Session(session_id, MatchConfig())
    s.register_schema(left)
    s.register_schema(right)
    s.add_matrix(left.id, right.id)
    return s


def _flat_schema(schema_id: str, n: int) -> Schema:
    return build_schema(schema_id, *[T(f"el_{schema_id}_{i}") for i in range(n)])


class TestPartition:
    def test_validated_counts_and_percentages(self):
        left = _flat_schema("sa", 10)
        right = _flat_schema("sb", 8)
        s = _session_over(left, right)
        for i in (1, 2, 3):
            s.record_decision(f"sa:{i}", f"sb:{i}", "accepted")
        report = partition(s)
        assert len(report.common_pairs) == 3
        assert len(report.left_only) == 7
        assert len(report.right_only) == 5
        assert report.left_only_pct == 70
        assert report.right_only_pct == 63  # 5/8 = 62.5 rounds half up
        assert report.right_common_pct == 38

    def test_partition_arithmetic_identity(self):
        left = _flat_schema("sa", 9)
        right = _flat_schema("sb", 6)
        s = _session_over(left, right)
        s.record_decision("sa:1", "sb:1", "accepted")
        s.record_decision("sa:2", "sb:1", "accepted")  # many-to-one
        report = partition(s)
        assert len(report.right_only) + len(report.right_common) == 6
        assert len(report.left_only) + len(report.left_common) == 9

    def test_no_decisions_everything_distinct(self):
        left = _flat_schema("sa", 4)
        right = _flat_schema("sb", 3)
        report = partition(_session_over(left, right))
        assert report.common_pairs == frozenset()
        assert report.left_only == {f"sa:{i}" for i in range(1, 5)}
        assert report.right_only == {f"sb:{i}" for i in range(1, 4)}

    def test_identical_schemata_with_diagonal_accepted(self):
        base = build_schema(
            "x", T("Events", T("DATE_BEGIN"), T("CODE")), T("Person", T("NAME"))
        )
        left = _clone_with_id(base, "sa")
        right = _clone_with_id(base, "sb")
        s = _session_over(left, right)
        for i in range(1, base.element_count + 1):
            s.record_decision(f"sa:{i}", f"sb:{i}", "accepted")
        report = partition(s)
        assert report.left_only == frozenset()
        assert report.right_only == frozenset()

    def test_automatic_mode_uses_threshold(self):
        base = build_schema(
            "x",
            T("Vehicle_Registry", T("REGISTRATION_CODE", doc="unique registration code value"),
              T("OWNER_NAME", doc="full owner name text")),
        )
        left = _clone_with_id(base, "sa")
        right = _clone_with_id(base, "sb")
        s = _session_over(left, right)
        report = partition(s, mode="automatic", min_score=0.45)
        assert report.common_pairs  # identical trees produce confident links
        report_strict = partition(s, mode="automatic", min_score=0.999)
        assert report_strict.common_pairs == frozenset()

    def test_swapped_schema_order(self):
        left = _flat_schema("sa", 3)
        right = _flat_schema("sb", 2)
        s = _session_over(left, right)
        s.record_decision("sa:1", "sb:1", "accepted")
        report = partition(s, "sb", "sa")
        assert report.left_total == 2 and report.right_total == 3
        assert ("sb:1", "sa:1") in report.common_pairs

    def test_unknown_pair(self):
        s = _session_over(_flat_schema("sa", 1), _flat_schema("sb", 1))
        with pytest.raises(UnknownIdError):
            partition(s, "sa", "zz")


class TestUnionFind:
    def test_basic_grouping(self):
        uf = UnionFind()
        for x in "abcde":
            uf.add(x)
        uf.union("a", "b")
        uf.union("d", "e")
        uf.union("a", "e")
        groups = {frozenset(g) for g in uf.groups().values()}
        assert groups == {frozenset("abde"), frozenset("c")}


def _random_corpus(rng: random.Random):
    sizes = [rng.randint(1, 10) for _ in range(3)]
    schemas = [_flat_schema(sid, n) for sid, n in zip(("p", "q", "r"), sizes)]
    sessions = []
    edges = []
    for left, right in itertools.combinations(schemas, 2):
        s = _session_over(left, right, f"{left.id}_{right.id}")
        pair_pool = [
            (el.id, er.id) for el in left.elements for er in right.elements
        ]
        for lid, rid in rng.sample(pair_pool, k=min(len(pair_pool), rng.randint(0, 6))):
            s.record_decision(lid, rid, "accepted")
            edges.append(((left.id, lid), (right.id, rid)))
        sessions.append(s)
    return schemas, sessions, edges


class TestVocabulary:
    def test_two_schema_cells_match_partition(self):
        left = _flat_schema("sa", 5)
        right = _flat_schema("sb", 4)
        s = _session_over(left, right)
        s.record_decision("sa:1", "sb:1", "accepted")
        s.record_decision("sa:2", "sb:2", "accepted")
        vocab = comprehensive_vocabulary([s])
        report = partition(s)
        cells = dict((sig, terms) for sig, terms in vocab.cells())
        left_only_terms = cells[frozenset({"sa"})]
        right_only_terms = cells[frozenset({"sb"})]
        both = cells[frozenset({"sa", "sb"})]
        assert {t.member_keys[0][1] for t in left_only_terms} == report.left_only
        assert {t.member_keys[0][1] for t in right_only_terms} == report.right_only
        assert len(both) == 2

    def test_cell_count_for_two_schemas(self):
        s = _session_over(_flat_schema("sa", 2), _flat_schema("sb", 2))
        vocab = comprehensive_vocabulary([s])
        assert len(vocab.cells()) == 3

    def test_missing_pair_error_lists_absences(self):
        a, b, c = (_flat_schema(x, 2) for x in ("a", "b", "c"))
        s1 = _session_over(a, b, "s1")
        s2 = _session_over(b, c, "s2")
        with pytest.raises(MissingPairError) as err:
            comprehensive_vocabulary([s1, s2])
        assert ("a", "c") in err.value.missing

    def test_every_element_in_exactly_one_term(self):
        rng = random.Random(5)
        schemas, sessions, _ = _random_corpus(rng)
        vocab = comprehensive_vocabulary(sessions)
        seen = {}
        for t in vocab.terms:
            for key in t.member_keys:
                assert key not in seen
                seen[key] = t.term_id
        total = sum(s.element_count for s in schemas)
        assert len(seen) == total

    def test_matches_bruteforce_components_on_random_corpora(self):
        rng = random.Random(11)
        for _ in range(25):
            schemas, sessions, edges = _random_corpus(rng)
            vocab = comprehensive_vocabulary(sessions)
            nodes = [(s.id, el.id) for s in schemas for el in s.elements]
            want = bruteforce_components(nodes, edges)
            got = {frozenset(t.member_keys) for t in vocab.terms}
            assert got == want

    def test_merge_order_independence(self):
        rng = random.Random(23)
        schemas, sessions, _ = _random_corpus(rng)
        base = comprehensive_vocabulary(sessions)
        for perm in itertools.permutations(sessions):
            again = comprehensive_vocabulary(list(perm))
            assert again == base

    def test_per_schema_term_sum_is_element_count(self):
        rng = random.Random(31)
        schemas, sessions, _ = _random_corpus(rng)
        vocab = comprehensive_vocabulary(sessions)
        for schema in schemas:
            member_count = sum(
                sum(1 for sid, _ in t.member_keys if sid == schema.id)
                for t in vocab.terms
            )
            assert member_count == schema.element_count

    def test_representative_is_shortest_name(self):
        left = build_schema("sa", T("LongerName"), T("zz"))
        right = build_schema("sb", T("tiny"))
        s = _session_over(left, right)
        s.record_decision("sa:1", "sb:1", "accepted")
        vocab = comprehensive_vocabulary([s])
        joint = next(t for t in vocab.terms if len(t.signature) == 2)
        assert joint.representative_name == "tiny"


def _vocab_from_signatures(sig_specs) -> Vocabulary:
    ids = sorted({sid for spec in sig_specs for sid in spec})
    terms = tuple(
        VocabularyTerm(f"t{i}", tuple((sid, f"{sid}:{i}") for sid in sorted(spec)),
                       frozenset(spec), f"n{i}")
        for i, spec in enumerate(sig_specs, start=1)
    )
    return Vocabulary(tuple(ids), terms)


class TestOverlapDistance:
    def test_identity_zero(self):
        vocab = _vocab_from_signatures([{"a"}, {"a", "b"}])
        assert overlap_distance(vocab, "a", "a") == 0.0

    def test_disjoint_one(self):
        vocab = _vocab_from_signatures([{"a"}, {"b"}])
        assert overlap_distance(vocab, "a", "b") == 1.0

    def test_toy_fraction(self):
        specs = [{"a", "b"}] * 4 + [{"a"}] * 3 + [{"b"}] * 3
        vocab = _vocab_from_signatures(specs)
        assert overlap_distance(vocab, "a", "b") == pytest.approx(0.6)

    def test_unknown_schema(self):
        vocab = _vocab_from_signatures([{"a"}])
        with pytest.raises(UnknownIdError):
            overlap_distance(vocab, "a", "zz")


class TestCluster:
    def _dist(self):
        ids = ("a", "b", "c", "d")
        near, far = 0.1, 0.9
        values = [
            [0.0, near, far, far],
            [near, 0.0, far, far],
            [far, far, 0.0, near],
            [far, far, near, 0.0],
        ]
        return DistanceMatrix(ids, tuple(tuple(row) for row in values))

    def test_two_obvious_groups(self):
        result = cluster(self._dist(), 0.5)
        assert result.clusters == (("a", "b"), ("c", "d"))

    def test_cutoff_zero_keeps_singletons(self):
        result = cluster(self._dist(), 0.0)
        assert result.clusters == (("a",), ("b",), ("c",), ("d",))

    def test_cutoff_one_single_cluster(self):
        result = cluster(self._dist(), 1.0)
        assert result.clusters == (("a", "b", "c", "d"),)

    def test_merge_tree_is_complete_and_monotone(self):
        result = cluster(self._dist(), 0.5)
        assert len(result.merges) == 3
        dists = [m.distance for m in result.merges]
        assert dists == sorted(dists)

    def test_deterministic_tie_break(self):
        ids = ("a", "b", "c")
        values = ((0.0, 0.4, 0.4), (0.4, 0.0, 0.4), (0.4, 0.4, 0.0))
        result = cluster(DistanceMatrix(ids, values), 0.4)
        # all pairs tie at 0.4: (a,b) merges first
        assert result.merges[0].merged == ("a", "b")

    def test_validation(self):
        with pytest.raises(ValidationError):
            DistanceMatrix(("a", "b"), ((0.0, 0.3), (0.4, 0.0)))
        with pytest.raises(ValidationError):
            DistanceMatrix(("a",), ((0.5,),))

    def test_distance_matrix_from_vocab(self):
        vocab = _vocab_from_signatures([{"a", "b"}, {"a"}, {"b"}, {"c"}])
        dm = distance_matrix(vocab)
        assert dm.distance("a", "a") == 0.0
        assert dm.distance("a", "c") == 1.0
        assert dm.distance("a", "b") == dm.distance("b", "a")


def _doc_rich(schema_id: str, names: list[str]) -> Schema:
    return build_schema(
        schema_id,
        *[
            T(name, doc=f"documented {name.replace('_', ' ').lower()} field value")
            for name in names
        ],
    )


class TestSearch:
    def test_self_retrieval_ranks_first_with_full_coverage(self):
        query = _doc_rich("query", ["VEHICLE_REGISTRATION_CODE", "OWNER_FULL_NAME"])
        twin = _clone_with_id(query, "twin")
        other = _doc_rich("other", ["WEATHER_STATION_TEMP", "HUMIDITY_SENSOR_READING"])
        results = search(query, [other, twin])
        assert results[0].schema_id == "twin"
        assert results[0].coverage == 1.0

    def test_disjoint_repository_scores_zero(self):
        query = _doc_rich("query", ["ALPHA_BRAVO_CODE"])
        repo = [_doc_rich("r1", ["ZULU_XRAY_VALUE"]), _doc_rich("r2", ["KILO_LIMA_NUMBER"])]
        results = search(query, repo)
        assert all(r.coverage == 0.0 for r in results)

    def test_engineered_overlap_ranking(self):
        names = ["VEHICLE_CODE_VALUE", "PERSON_NAME_TEXT", "EVENT_DATE_STAMP", "UNIT_RANK_GRADE"]
        query = _doc_rich("query", names)
        full = _clone_with_id(query, "full")
        half = _doc_rich("half", names[:2] + ["OTHER_THING_ONE", "OTHER_THING_TWO"])
        none = _doc_rich("none", ["XRAY_YANKEE_ZULU", "QUEBEC_ROMEO_SIERRA",
                                  "GOLF_HOTEL_INDIA", "MIKE_NOVEMBER_OSCAR"])
        results = search(query, [none, half, full])
        assert [r.schema_id for r in results] == ["full", "half", "none"]
        assert results[0].coverage == 1.0
        assert results[1].coverage == pytest.approx(0.5)
        assert results[2].coverage == 0.0

    def test_empty_repository_rejected(self):
        query = _doc_rich("q", ["A_B"])
        with pytest.raises(ValidationError):
            search(query, [])
