import json

import pytest

from schemamatch.engine import MatchConfig
from schemamatch.errors import (
    ConflictError,
    IllegalTransitionError,
    IntegrityError,
    UnknownIdError,
    UnknownPairError,
    ValidationError,
    VersionError,
)
from schemamatch.ingest import write_canonical
from schemamatch.session import (
    Session,
    load_session,
    save_session,
    suggest_concepts,
)

from conftest import T, build_schema


def _rich(name, doc="shared descriptive documentation words"):
    return T(name, doc=doc)


@pytest.fixture
def left_schema():
    return build_schema(
        "sa",
        T(
            "All_Event_Vitals",
            _rich("DATE_BEGIN_156", "the begin date of the event"),
            _rich("EVENT_CODE", "coded event category value"),
        ),
        T("Person_Master", _rich("PERSON_NAME", "full name of the person")),
    )


@pytest.fixture
def right_schema():
    return build_schema(
        "sb",
        T(
            "EventInformation",
            _rich("DATETIME_FIRST_INFO", "the begin date of the event"),
            _rich("eventCategoryCode", "coded event category value"),
        ),
        T("PersonRecord", _rich("personFullName", "full name of the person")),
    )


@pytest.fixture
def session(left_schema, right_schema):
    s = Session("demo", MatchConfig())
    s.register_schema(left_schema)
    s.register_schema(right_schema)
    s.add_matrix("sa", "sb")
    return s


class TestConcepts:
    def test_assign_creates_concept(self, session):
        label = session.assign_concept("sa", "Event", ["sa:1", "sa:2", "sa:3"])
        assert label.name == "Event"
        assert label.member_element_ids == {"sa:1", "sa:2", "sa:3"}
        summary = session.summary("sa")
        assert summary.concepts == (label,)
        assert summary.unassigned_element_ids == {"sa:4", "sa:5"}

    def test_assign_conflict_names_existing_owner(self, session):
        session.assign_concept("sa", "Event", ["sa:1"])
        with pytest.raises(ConflictError, match="'Event'"):
            session.assign_concept("sa", "Vitals", ["sa:1"])

    def test_assign_extends_same_concept(self, session):
        session.assign_concept("sa", "Event", ["sa:1"])
        label = session.assign_concept("sa", "Event", ["sa:2"])
        assert label.member_element_ids == {"sa:1", "sa:2"}
        assert len(session.summary("sa").concepts) == 1

    def test_assign_unknown_element(self, session):
        with pytest.raises(UnknownIdError):
            session.assign_concept("sa", "Event", ["sa:99"])

    def test_summary_partition_invariant(self, session, left_schema):
        session.assign_concept("sa", "Event", ["sa:1", "sa:2"])
        session.assign_concept("sa", "Person", ["sa:4"])
        summary = session.summary("sa")
        assigned = summary.assigned_element_ids
        assert len(assigned) + len(summary.unassigned_element_ids) == left_schema.element_count
        assert not assigned & summary.unassigned_element_ids


class TestSuggestions:
    def test_ranked_by_descendant_count(self):
        s = build_schema(
            "s",
            T("small", T("a"), T("b")),
            T("big", T("c"), T("d"), T("e"), T("f"), T("g")),
            T("loner"),
        )
        names = [sug.name for sug in suggest_concepts(s)]
        assert names == ["big", "small"]
        sizes = [sug.size for sug in suggest_concepts(s)]
        assert sizes == [6, 3]

    def test_flat_schema_has_no_suggestions(self):
        s = build_schema("s", T("a"), T("b"))
        assert suggest_concepts(s) == []


class TestIncrementalMatch:
    def test_concept_links_filtered_and_sorted(self, session):
        label = session.assign_concept("sa", "Event", ["sa:1", "sa:2", "sa:3"])
        links = session.incremental_match(label.id, min_score=0.2)
        assert links, "expected at least one link above threshold"
        member_ids = label.member_element_ids
        assert all(l.left_id in member_ids for l in links)
        assert all(l.score >= 0.2 for l in links)
        scores = [l.score for l in links]
        assert scores == sorted(scores, reverse=True)

    def test_concept_on_right_schema(self, session):
        label = session.assign_concept("sb", "Event", ["sb:1", "sb:2", "sb:3"])
        links = session.incremental_match(label.id, min_score=-1.0)
        assert {l.right_id for l in links} <= label.member_element_ids
        assert len(links) == 3 * session.schema("sa").element_count

    def test_unknown_concept(self, session):
        with pytest.raises(UnknownIdError):
            session.incremental_match("sa/c99")

    def test_empty_opposing_schema(self):
        s = Session("t")
        s.register_schema(build_schema("one", T("alpha", T("beta"))))
        s.register_schema(build_schema("two"))
        s.add_matrix("one", "two")
        label = s.assign_concept("one", "A", ["one:1", "one:2"])
        assert s.incremental_match(label.id) == []


class TestDecisions:
    def test_accept_records_decision_and_event(self, session):
        d = session.record_decision("sa:2", "sb:2", "accepted", annotation="equivalent", author="kt")
        assert d.status == "accepted"
        assert session.decision_for("sa:2", "sb:2") == d
        assert session.events[-1].kind == "decision_recorded"

    def test_accept_then_reject(self, session):
        session.record_decision("sa:2", "sb:2", "accepted")
        d = session.record_decision("sa:2", "sb:2", "rejected")
        assert d.status == "rejected"
        kinds = [e.kind for e in session.events]
        assert kinds == ["decision_recorded", "decision_recorded"]

    def test_same_status_twice_is_illegal(self, session):
        session.record_decision("sa:2", "sb:2", "accepted")
        with pytest.raises(IllegalTransitionError):
            session.record_decision("sa:2", "sb:2", "accepted")

    def test_unknown_pair(self, session):
        with pytest.raises(UnknownPairError):
            session.record_decision("sa:2", "sb:99", "accepted")

    def test_bad_annotation(self, session):
        with pytest.raises(ValidationError):
            session.record_decision("sa:2", "sb:2", "accepted", annotation="sorta")

    def test_direction_free_storage(self, session):
        session.record_decision("sb:2", "sa:2", "accepted")
        d = session.decision_for("sa:2", "sb:2")
        assert d is not None and d.left_id == "sa:2" and d.right_id == "sb:2"
        with pytest.raises(IllegalTransitionError):
            session.record_decision("sa:2", "sb:2", "accepted")


class TestConceptMatches:
    def _summarized(self, session):
        session.assign_concept("sa", "Event", ["sa:1", "sa:2", "sa:3"])
        session.assign_concept("sa", "Person", ["sa:4", "sa:5"])
        session.assign_concept("sb", "EventInfo", ["sb:1", "sb:2", "sb:3"])
        session.assign_concept("sb", "PersonRec", ["sb:4", "sb:5"])
        return session

    def test_all_matches_in_one_concept(self, session):
        s = self._summarized(session)
        s.record_decision("sa:2", "sb:2", "accepted")
        s.record_decision("sa:3", "sb:3", "accepted")
        matches = s.derive_concept_matches()
        assert len(matches) == 1
        m = matches[0]
        assert s.concept(m.left_concept_id).name == "Event"
        assert s.concept(m.right_concept_id).name == "EventInfo"
        assert m.support == 2

    def test_tie_emits_nothing(self, session):
        s = self._summarized(session)
        s.record_decision("sa:2", "sb:2", "accepted")   # Event -> EventInfo
        s.record_decision("sa:3", "sb:5", "accepted")   # Event -> PersonRec
        assert s.derive_concept_matches() == ()

    def test_plurality_wins(self, session):
        s = self._summarized(session)
        s.record_decision("sa:2", "sb:2", "accepted")
        s.record_decision("sa:3", "sb:3", "accepted")
        s.record_decision("sa:1", "sb:5", "accepted")   # minority to PersonRec
        matches = s.derive_concept_matches()
        assert len(matches) == 1
        assert matches[0].support == 2

    def test_rejected_matches_do_not_count(self, session):
        s = self._summarized(session)
        s.record_decision("sa:2", "sb:2", "rejected")
        assert s.derive_concept_matches() == ()

    def test_unassigned_elements_ignored(self, session):
        session.assign_concept("sa", "Event", ["sa:1", "sa:2"])
        session.record_decision("sa:2", "sb:2", "accepted")
        assert session.derive_concept_matches() == ()


class TestPersistence:
    def test_round_trip_inline(self, session, tmp_path):
        session.assign_concept("sa", "Event", ["sa:1", "sa:2"])
        session.record_decision("sa:2", "sb:2", "accepted", annotation="equivalent")
        path = tmp_path / "s.json"
        save_session(session, path)
        loaded = load_session(path)
        assert loaded.same_state(session)

    def test_round_trip_with_schema_files(self, session, left_schema, right_schema, tmp_path):
        (tmp_path / "sa.json").write_text(write_canonical(left_schema), encoding="utf-8")
        (tmp_path / "sb.json").write_text(write_canonical(right_schema), encoding="utf-8")
        s = Session("filed", MatchConfig())
        s.register_schema(left_schema, "sa.json")
        s.register_schema(right_schema, "sb.json")
        s.add_matrix("sa", "sb")
        s.record_decision("sa:2", "sb:2", "accepted")
        save_session(s, tmp_path / "session.json")
        loaded = load_session(tmp_path / "session.json")
        assert loaded.same_state(s)

    def test_event_log_replay_reproduces_state(self, session):
        session.assign_concept("sa", "Event", ["sa:1", "sa:2"])
        session.record_decision("sa:2", "sb:2", "accepted")
        session.record_decision("sa:2", "sb:2", "rejected")
        rebuilt = session.rebuild()
        assert rebuilt.same_state(session)
        assert rebuilt.derive_concept_matches() == session.derive_concept_matches()

    def test_truncated_file(self, session, tmp_path):
        path = tmp_path / "s.json"
        save_session(session, path)
        text = path.read_text(encoding="utf-8")
        path.write_text(text[: len(text) // 2], encoding="utf-8")
        with pytest.raises(IntegrityError):
            load_session(path)

    def test_hash_mismatch(self, session, left_schema, right_schema, tmp_path):
        (tmp_path / "sa.json").write_text(write_canonical(left_schema), encoding="utf-8")
        (tmp_path / "sb.json").write_text(write_canonical(right_schema), encoding="utf-8")
        s = Session("filed", MatchConfig())
        s.register_schema(left_schema, "sa.json")
        s.register_schema(right_schema, "sb.json")
        s.add_matrix("sa", "sb")
        save_session(s, tmp_path / "session.json")
        # tamper with the referenced schema file
        (tmp_path / "sa.json").write_text(
            write_canonical(left_schema).replace("DATE_BEGIN_156", "DATE_BEGIN_157"),
            encoding="utf-8",
        )
        with pytest.raises(IntegrityError, match="hash"):
            load_session(tmp_path / "session.json")

    def test_version_error(self, session, tmp_path):
        path = tmp_path / "s.json"
        save_session(session, path)
        doc = json.loads(path.read_text(encoding="utf-8"))
        doc["format_version"] = "99"
        path.write_text(json.dumps(doc), encoding="utf-8")
        with pytest.raises(VersionError):
            load_session(path)

    def test_broken_event_sequence(self, session, tmp_path):
        session.record_decision("sa:2", "sb:2", "accepted")
        path = tmp_path / "s.json"
        save_session(session, path)
        doc = json.loads(path.read_text(encoding="utf-8"))
        doc["events"][0]["seq"] = 7
        path.write_text(json.dumps(doc), encoding="utf-8")
        with pytest.raises(IntegrityError, match="sequence"):
            load_session(path)

    def test_event_referencing_missing_element(self, session, tmp_path):
        session.record_decision("sa:2", "sb:2", "accepted")
        path = tmp_path / "s.json"
        save_session(session, path)
        doc = json.loads(path.read_text(encoding="utf-8"))
        doc["events"][0]["data"]["left_id"] = "sa:999"
        path.write_text(json.dumps(doc), encoding="utf-8")
        with pytest.raises(IntegrityError, match="replayed"):
            load_session(path)

    def test_events_survive_round_trip_in_order(self, session, tmp_path):
        session.assign_concept("sa", "Event", ["sa:1"])
        session.record_decision("sa:2", "sb:2", "accepted")
        session.assign_concept("sb", "Info", ["sb:1"])
        path = tmp_path / "s.json"
        save_session(session, path)
        loaded = load_session(path)
        assert [e.kind for e in loaded.events] == [
            "concept_assigned", "decision_recorded", "concept_assigned",
        ]
        assert loaded.events == session.events
