"""Workbench sessions: the human workflow state.

A session owns the schemata under comparison, the match matrices, concept
labels (the summarize step), validation decisions, and an append-only event
log. All human actions are events; replaying the log against the same
schemata and engine config reproduces the session state exactly, which is
also how persistence works: the session file stores schema references
(path or inline text, plus content hash) and the event log, and matrices
are recomputed on demand by the deterministic engine.

Sessions are single-writer: callers must serialize mutations (the HTTP
service does this with a per-session lock). Readers may share snapshots.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from . import engine
from .engine import MatchConfig, MatchLink, MatchMatrix
from .errors import (
    ConflictError,
    IllegalTransitionError,
    IntegrityError,
    UnknownIdError,
    UnknownPairError,
    ValidationError,
    VersionError,
)
from .ingest import read_canonical, write_canonical
from .model import Schema

SESSION_VERSION = "1"

ANNOTATIONS = ("equivalent", "is-a", "part-of", "related", "none")
DECIDED_STATUSES = ("accepted", "rejected")


def _sha256_text(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def _utcnow() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="microseconds")


@dataclass(frozen=True)
class ConceptLabel:
    id: str
    name: str
    schema_id: str
    member_element_ids: frozenset[str]


@dataclass(frozen=True)
class Summary:
    schema_id: str
    concepts: tuple[ConceptLabel, ...]
    unassigned_element_ids: frozenset[str]

    @property
    def assigned_element_ids(self) -> frozenset[str]:
        out: set[str] = set()
        for c in self.concepts:
            out.update(c.member_element_ids)
        return frozenset(out)


@dataclass(frozen=True)
class MatchDecision:
    left_id: str
    right_id: str
    status: str  # candidate | accepted | rejected
    annotation: str
    author: str
    assignee: str
    timestamp: str  # UTC ISO-8601


@dataclass(frozen=True)
class ConceptMatch:
    left_concept_id: str
    right_concept_id: str
    support: int


@dataclass(frozen=True)
class SessionEvent:
    seq: int
    kind: str
    at: str
    data: dict

    def to_dict(self) -> dict:
        return {"seq": self.seq, "kind": self.kind, "at": self.at, "data": self.data}


@dataclass
class _SchemaRef:
    schema: Schema
    path: str | None
    sha256: str
    text: str  # the canonical text the hash covers (embedded when no path)


@dataclass(frozen=True)
class ConceptSuggestion:
    root_id: str
    name: str
    member_ids: frozenset[str]
    size: int


class Session:
    def __init__(self, session_id: str, config: MatchConfig | None = None, tau: float | None = None):
        self.id = session_id
        self.config = config or MatchConfig()
        self.tau = self.config.threshold if tau is None else tau
        self.schema_refs: dict[str, _SchemaRef] = {}
        self.matrix_pairs: list[tuple[str, str]] = []
        self._matrices: dict[tuple[str, str], MatchMatrix] = {}
        self.concepts: dict[str, ConceptLabel] = {}
        self._concept_by_name: dict[tuple[str, str], str] = {}
        self._element_concept: dict[tuple[str, str], str] = {}
        self._concept_seq = 0
        self.decisions: dict[tuple[str, str], MatchDecision] = {}
        self.events: list[SessionEvent] = []

    # -- base setup (not part of the event log) ------------------------

    def register_schema(self, schema: Schema, path: str | None = None, canonical_text: str | None = None) -> None:
        if schema.id in self.schema_refs:
            if not self.schema_refs[schema.id].schema.tree_equal(schema):
                raise ValidationError(f"schema id {schema.id!r} already registered with different content")
            return
        text = canonical_text if canonical_text is not None else write_canonical(schema)
        self.schema_refs[schema.id] = _SchemaRef(schema, path, _sha256_text(text), text)

    def add_matrix(self, left_schema_id: str, right_schema_id: str) -> None:
        for sid in (left_schema_id, right_schema_id):
            if sid not in self.schema_refs:
                raise UnknownIdError(f"schema {sid!r} not registered")
        pair = (left_schema_id, right_schema_id)
        if pair not in self.matrix_pairs:
            self.matrix_pairs.append(pair)

    def schema(self, schema_id: str) -> Schema:
        try:
            return self.schema_refs[schema_id].schema
        except KeyError:
            raise UnknownIdError(f"schema {schema_id!r} not in session") from None

    @property
    def schema_ids(self) -> tuple[str, ...]:
        return tuple(self.schema_refs)

    def matrix(self, left_schema_id: str, right_schema_id: str) -> MatchMatrix:
        """The matrix for a schema pair, computed on first use."""
        pair = (left_schema_id, right_schema_id)
        if pair not in self.matrix_pairs:
            raise UnknownIdError(f"no matrix for pair {pair!r}")
        if pair not in self._matrices:
            self._matrices[pair] = engine.match(
                self.schema(left_schema_id), self.schema(right_schema_id), self.config
            )
        return self._matrices[pair]

    def primary_pair(self) -> tuple[str, str]:
        if len(self.matrix_pairs) != 1:
            raise ValidationError(
                f"session has {len(self.matrix_pairs)} matrices; specify the pair explicitly"
            )
        return self.matrix_pairs[0]

    # -- events ---------------------------------------------------------

    def _append(self, kind: str, data: dict, at: str | None = None) -> SessionEvent:
        ev = SessionEvent(seq=len(self.events) + 1, kind=kind, at=at or _utcnow(), data=data)
        self.events.append(ev)
        return ev

    # -- summarize -------------------------------------------------------

    def assign_concept(self, schema_id: str, concept_name: str, element_ids) -> ConceptLabel:
        label = self._apply_assign(schema_id, concept_name, list(element_ids))
        self._append(
            "concept_assigned",
            {
                "schema_id": schema_id,
                "name": concept_name,
                "element_ids": sorted(element_ids),
            },
        )
        return label

    def _apply_assign(self, schema_id: str, concept_name: str, element_ids: list[str]) -> ConceptLabel:
        schema = self.schema(schema_id)
        if not concept_name:
            raise ValidationError("concept name must be non-empty")
        if not element_ids:
            raise ValidationError("concept member set must be non-empty")
        for el_id in element_ids:
            if el_id not in schema:
                raise UnknownIdError(f"no element {el_id!r} in schema {schema_id!r}")
            owner = self._element_concept.get((schema_id, el_id))
            if owner is not None and self.concepts[owner].name != concept_name:
                raise ConflictError(
                    f"element {el_id!r} already assigned to concept "
                    f"{self.concepts[owner].name!r}"
                )
        key = (schema_id, concept_name)
        concept_id = self._concept_by_name.get(key)
        if concept_id is None:
            self._concept_seq += 1
            concept_id = f"{schema_id}/c{self._concept_seq}"
            label = ConceptLabel(concept_id, concept_name, schema_id, frozenset(element_ids))
            self._concept_by_name[key] = concept_id
        else:
            old = self.concepts[concept_id]
            label = ConceptLabel(
                concept_id, concept_name, schema_id, old.member_element_ids | frozenset(element_ids)
            )
        self.concepts[concept_id] = label
        for el_id in element_ids:
            self._element_concept[(schema_id, el_id)] = concept_id
        return label

    def summary(self, schema_id: str) -> Summary:
        schema = self.schema(schema_id)
        concepts = tuple(c for c in self.concepts.values() if c.schema_id == schema_id)
        assigned: set[str] = set()
        for c in concepts:
            assigned.update(c.member_element_ids)
        unassigned = frozenset(el.id for el in schema.elements if el.id not in assigned)
        return Summary(schema_id, concepts, unassigned)

    def concept(self, concept_id: str) -> ConceptLabel:
        try:
            return self.concepts[concept_id]
        except KeyError:
            raise UnknownIdError(f"no concept {concept_id!r}") from None

    def concept_of(self, schema_id: str, element_id: str) -> ConceptLabel | None:
        cid = self._element_concept.get((schema_id, element_id))
        return None if cid is None else self.concepts[cid]

    # -- incremental matching ---------------------------------------------

    def incremental_match(self, concept_id: str, min_score: float | None = None) -> list[MatchLink]:
        """Links from the concept's members to every element of the opposing
        schema, confidence-filtered at the session threshold."""
        from .filters import FilterSpec, apply  # local import to avoid a cycle

        concept = self.concept(concept_id)
        tau = self.tau if min_score is None else min_score
        for left_sid, right_sid in self.matrix_pairs:
            if concept.schema_id == left_sid:
                matrix = self.matrix(left_sid, right_sid)
                return apply(
                    matrix,
                    [FilterSpec("confidence", lo=tau, hi=1.0)],
                    left_node_set=concept.member_element_ids,
                )
            if concept.schema_id == right_sid:
                matrix = self.matrix(left_sid, right_sid)
                return apply(
                    matrix,
                    [FilterSpec("confidence", lo=tau, hi=1.0)],
                    right_node_set=concept.member_element_ids,
                )
        raise UnknownIdError(f"no matrix involves schema {concept.schema_id!r}")

    # -- decisions ---------------------------------------------------------

    def _orient_pair(self, left_id: str, right_id: str) -> tuple[str, str]:
        """Canonical orientation of a pair: the orientation of the matrix that
        contains it. Decisions are direction-free (the engine is symmetric)."""
        for left_sid, right_sid in self.matrix_pairs:
            ls, rs = self.schema(left_sid), self.schema(right_sid)
            if left_id in ls and right_id in rs:
                return (left_id, right_id)
            if right_id in ls and left_id in rs:
                return (right_id, left_id)
        raise UnknownPairError(f"pair ({left_id!r}, {right_id!r}) not in any match matrix")

    def record_decision(
        self,
        left_id: str,
        right_id: str,
        status: str,
        annotation: str = "none",
        author: str = "",
        assignee: str = "",
    ) -> MatchDecision:
        at = _utcnow()
        decision = self._apply_decision(left_id, right_id, status, annotation, author, assignee, at)
        self._append(
            "decision_recorded",
            {
                "left_id": decision.left_id,
                "right_id": decision.right_id,
                "status": status,
                "annotation": annotation,
                "author": author,
                "assignee": assignee,
                "timestamp": at,
            },
            at=at,
        )
        return decision

    def _apply_decision(
        self, left_id: str, right_id: str, status: str, annotation: str,
        author: str, assignee: str, at: str,
    ) -> MatchDecision:
        if status not in DECIDED_STATUSES:
            raise ValidationError(f"status must be one of {DECIDED_STATUSES}, got {status!r}")
        if annotation not in ANNOTATIONS:
            raise ValidationError(f"annotation must be one of {ANNOTATIONS}, got {annotation!r}")
        pair = self._orient_pair(left_id, right_id)
        existing = self.decisions.get(pair)
        current = existing.status if existing else "candidate"
        legal = {
            ("candidate", "accepted"),
            ("candidate", "rejected"),
            ("accepted", "rejected"),
            ("rejected", "accepted"),
        }
        if (current, status) not in legal:
            raise IllegalTransitionError(f"illegal decision transition {current} -> {status}")
        decision = MatchDecision(pair[0], pair[1], status, annotation, author, assignee, at)
        self.decisions[pair] = decision
        return decision

    def decision_for(self, left_id: str, right_id: str) -> MatchDecision | None:
        try:
            pair = self._orient_pair(left_id, right_id)
        except UnknownPairError:
            return None
        return self.decisions.get(pair)

    def accepted_pairs(self) -> frozenset[tuple[str, str]]:
        return frozenset(p for p, d in self.decisions.items() if d.status == "accepted")

    # -- concept-level matches ----------------------------------------------

    def derive_concept_matches(self) -> tuple[ConceptMatch, ...]:
        """Concept pairs where >=1 accepted element match lands between the
        member sets and the right concept takes a strict plurality of the
        left concept's accepted matches (ties emit nothing).

        Pure function of (summaries, accepted decisions): recomputing after a
        reload yields the identical list.
        """
        by_left: dict[str, dict[str, int]] = {}
        for (lid, rid), decision in self.decisions.items():
            if decision.status != "accepted":
                continue
            left_sid, right_sid = self._pair_schemas(lid, rid)
            lc = self._element_concept.get((left_sid, lid))
            rc = self._element_concept.get((right_sid, rid))
            if lc is None or rc is None:
                continue
            by_left.setdefault(lc, {})
            by_left[lc][rc] = by_left[lc].get(rc, 0) + 1
        out = []
        for lc in sorted(by_left, key=lambda c: (self.concepts[c].name, c)):
            counts = by_left[lc]
            best = max(counts.values())
            winners = [rc for rc, n in counts.items() if n == best]
            if len(winners) != 1:
                continue
            out.append(ConceptMatch(lc, winners[0], best))
        return tuple(out)

    def _pair_schemas(self, left_id: str, right_id: str) -> tuple[str, str]:
        for left_sid, right_sid in self.matrix_pairs:
            if left_id in self.schema(left_sid) and right_id in self.schema(right_sid):
                return left_sid, right_sid
        raise UnknownPairError(f"pair ({left_id!r}, {right_id!r}) not in any match matrix")

    # -- persistence -----------------------------------------------------

    def to_document(self) -> dict:
        schemas = []
        for sid, ref in self.schema_refs.items():
            entry: dict = {"id": sid, "sha256": ref.sha256}
            if ref.path is not None:
                entry["path"] = ref.path
            else:
                entry["inline"] = ref.text
            schemas.append(entry)
        return {
            "format_version": SESSION_VERSION,
            "kind": "session",
            "id": self.id,
            "tau": self.tau,
            "config": self.config.to_dict(),
            "schemas": schemas,
            "matrices": [{"left": l, "right": r} for l, r in self.matrix_pairs],
            "events": [ev.to_dict() for ev in self.events],
        }

    def replay_event(self, ev: SessionEvent) -> None:
        if ev.kind == "concept_assigned":
            self._apply_assign(ev.data["schema_id"], ev.data["name"], list(ev.data["element_ids"]))
        elif ev.kind == "decision_recorded":
            d = ev.data
            self._apply_decision(
                d["left_id"], d["right_id"], d["status"], d["annotation"],
                d.get("author", ""), d.get("assignee", ""), d["timestamp"],
            )
        else:
            raise IntegrityError(f"unknown event kind {ev.kind!r}")
        self.events.append(ev)

    def rebuild(self) -> "Session":
        """Fresh session from the same base inputs with the event log replayed;
        used to check the event-sourcing invariant."""
        fresh = Session(self.id, self.config, self.tau)
        for sid, ref in self.schema_refs.items():
            fresh.register_schema(ref.schema, ref.path)
        for left, right in self.matrix_pairs:
            fresh.add_matrix(left, right)
        for ev in self.events:
            fresh.replay_event(ev)
        return fresh

    def same_state(self, other: "Session") -> bool:
        return (
            self.id == other.id
            and self.tau == other.tau
            and self.config.to_dict() == other.config.to_dict()
            and sorted(self.schema_refs) == sorted(other.schema_refs)
            and all(
                self.schema_refs[sid].schema.tree_equal(other.schema_refs[sid].schema)
                for sid in self.schema_refs
            )
            and self.matrix_pairs == other.matrix_pairs
            and self.events == other.events
            and self.decisions == other.decisions
            and self.concepts == other.concepts
        )


# -- module-level convenience wrappers ----------------------------------------


def assign_concept(session: Session, schema_id: str, concept_name: str, element_ids) -> ConceptLabel:
    return session.assign_concept(schema_id, concept_name, element_ids)


def suggest_concepts(schema: Schema) -> list[ConceptSuggestion]:
    """Every depth-1 element with at least one descendant, proposed as a
    concept rooted there, largest sub-trees first."""
    out = []
    for root in schema.roots():
        members = schema.subtree_elements(root.id)
        if len(members) > 1:
            out.append(ConceptSuggestion(root.id, root.name, members, len(members)))
    out.sort(key=lambda s: (-s.size, schema.order_index(s.root_id)))
    return out


def incremental_match(session: Session, concept_id: str, min_score: float | None = None) -> list[MatchLink]:
    return session.incremental_match(concept_id, min_score)


def record_decision(
    session: Session,
    left_id: str,
    right_id: str,
    status: str,
    annotation: str = "none",
    author: str = "",
    assignee: str = "",
) -> MatchDecision:
    return session.record_decision(left_id, right_id, status, annotation, author, assignee)


def derive_concept_matches(session: Session) -> tuple[ConceptMatch, ...]:
    return session.derive_concept_matches()


def save_session(session: Session, path) -> None:
    text = json.dumps(session.to_document(), indent=2, ensure_ascii=False) + "\n"
    Path(path).write_text(text, encoding="utf-8")


def load_session(path) -> Session:
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise IntegrityError(f"cannot read session file {path}: {exc}") from None
    if not isinstance(doc, dict) or doc.get("kind") != "session":
        raise IntegrityError(f"{path} is not a session document")
    if doc.get("format_version") != SESSION_VERSION:
        raise VersionError(f"unsupported session format_version {doc.get('format_version')!r}")

    config = MatchConfig.from_dict(doc.get("config", {}))
    session = Session(str(doc["id"]), config, float(doc.get("tau", config.threshold)))
    for entry in doc.get("schemas", []):
        if "path" in entry:
            ref_path = Path(entry["path"])
            if not ref_path.is_absolute():
                ref_path = path.parent / ref_path
            try:
                text = ref_path.read_text(encoding="utf-8")
            except OSError as exc:
                raise IntegrityError(f"referenced schema {entry['path']}: {exc}") from None
        else:
            text = entry.get("inline", "")
        digest = _sha256_text(text)
        if digest != entry.get("sha256"):
            raise IntegrityError(
                f"schema {entry['id']!r}: content hash mismatch "
                f"(expected {entry.get('sha256')}, found {digest})"
            )
        schema = read_canonical(text)
        if schema.id != entry["id"]:
            raise IntegrityError(
                f"schema file declares id {schema.id!r}, session expects {entry['id']!r}"
            )
        session.register_schema(schema, entry.get("path"), canonical_text=text)
    for m in doc.get("matrices", []):
        session.add_matrix(m["left"], m["right"])
    events = doc.get("events", [])
    for i, raw in enumerate(events, start=1):
        if raw.get("seq") != i:
            raise IntegrityError(f"event log sequence broken at position {i}")
        try:
            session.replay_event(SessionEvent(raw["seq"], raw["kind"], raw["at"], raw["data"]))
        except (UnknownIdError, UnknownPairError, ConflictError, IllegalTransitionError) as exc:
            raise IntegrityError(f"event {i} cannot be replayed: {exc}") from None
    return session
