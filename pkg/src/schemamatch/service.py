"""HTTP service exposing session operations to the companion UI.

JSON request/response bodies mirror the canonical document conventions
(camelCase on the wire). Each session has a single writer: mutations take a
per-session lock and are persisted before the response returns, so reads
always see durable state. See docs/api.md for the payload reference.
"""

from __future__ import annotations

import logging
import threading
from pathlib import Path

from fastapi import FastAPI, HTTPException, Response
from pydantic import BaseModel

from . import analysis, export
from .engine import MatchMatrix
from .errors import (
    ConflictError,
    IllegalTransitionError,
    IntegrityError,
    RangeBoundsError,
    SchemaMatchError,
    UnknownIdError,
    UnknownPairError,
    ValidationError,
)
from .filters import FilterSpec, apply as apply_filters
from .model import Schema
from .session import Session, load_session, save_session

logger = logging.getLogger(__name__)

SORT_KEYS = ("score", "status", "leftPath", "rightPath", "assignee")


class SessionStore:
    """Loads every session document in a directory and serializes writes."""

    def __init__(self, directory):
        self.directory = Path(directory)
        self.sessions: dict[str, Session] = {}
        self.paths: dict[str, Path] = {}
        self._locks: dict[str, threading.RLock] = {}
        for path in sorted(self.directory.glob("*.json")):
            try:
                session = load_session(path)
            except (SchemaMatchError, IntegrityError):
                continue  # not a session document
            self.sessions[session.id] = session
            self.paths[session.id] = path
            self._locks[session.id] = threading.RLock()
        logger.info("loaded %d session(s) from %s", len(self.sessions), self.directory)

    def add(self, session: Session, path: Path) -> None:
        self.sessions[session.id] = session
        self.paths[session.id] = path
        self._locks[session.id] = threading.RLock()

    def get(self, session_id: str) -> Session:
        if session_id not in self.sessions:
            raise HTTPException(404, f"unknown session {session_id!r}")
        return self.sessions[session_id]

    def lock(self, session_id: str) -> threading.RLock:
        return self._locks[session_id]

    def persist(self, session_id: str) -> None:
        save_session(self.sessions[session_id], self.paths[session_id])

    def schemas(self) -> dict[str, Schema]:
        out: dict[str, Schema] = {}
        for session in self.sessions.values():
            for sid in session.schema_ids:
                out.setdefault(sid, session.schema(sid))
        return out


class DecisionIn(BaseModel):
    leftId: str
    rightId: str
    status: str
    annotation: str = "none"
    author: str = ""
    assignee: str = ""


class ConceptIn(BaseModel):
    schemaId: str
    name: str
    elementIds: list[str]


class IncrementalIn(BaseModel):
    conceptId: str
    minScore: float | None = None


def _concept_payload(session: Session, concept_id: str) -> dict:
    c = session.concept(concept_id)
    members = c.member_element_ids
    reviewed = 0
    accepted = 0
    for (lid, rid), d in session.decisions.items():
        if lid in members or rid in members:
            reviewed += 1
            if d.status == "accepted":
                accepted += 1
    return {
        "id": c.id,
        "name": c.name,
        "schemaId": c.schema_id,
        "memberElementIds": sorted(members),
        "memberCount": len(members),
        "reviewed": reviewed,
        "accepted": accepted,
    }


def _link_row(session: Session, matrix: MatchMatrix, left_id: str, right_id: str, score: float) -> dict:
    decision = session.decisions.get((left_id, right_id))
    lc = session.concept_of(matrix.left_schema_id, left_id)
    rc = session.concept_of(matrix.right_schema_id, right_id)
    return {
        "leftId": left_id,
        "rightId": right_id,
        "leftPath": matrix.left_schema.element(left_id).path,
        "rightPath": matrix.right_schema.element(right_id).path,
        "score": score,
        "status": decision.status if decision else "candidate",
        "annotation": decision.annotation if decision else "none",
        "author": decision.author if decision else "",
        "assignee": decision.assignee if decision else "",
        "leftConcept": lc.name if lc else "",
        "rightConcept": rc.name if rc else "",
    }


_SORTERS = {
    "score": lambda r: (-r["score"], r["leftPath"], r["rightPath"]),
    "status": lambda r: (r["status"], -r["score"], r["leftPath"], r["rightPath"]),
    "leftPath": lambda r: (r["leftPath"], r["rightPath"]),
    "rightPath": lambda r: (r["rightPath"], r["leftPath"]),
    "assignee": lambda r: (r["assignee"], -r["score"], r["leftPath"], r["rightPath"]),
}


def _tree_payload(schema: Schema) -> dict:
    def node(el_id: str) -> dict:
        el = schema.element(el_id)
        return {
            "id": el.id,
            "name": el.name,
            "documentation": el.documentation,
            "typeHint": el.type_hint,
            "depth": el.depth,
            "path": el.path,
            "children": [node(c.id) for c in schema.children(el_id)],
        }

    return {
        "id": schema.id,
        "name": schema.name,
        "sourceFormat": schema.source_format,
        "elementCount": schema.element_count,
        "roots": [node(r.id) for r in schema.roots()],
    }


def create_app(store: SessionStore) -> FastAPI:
    app = FastAPI(title="schemamatch service")

    @app.get("/schemas")
    def list_schemas():
        return [
            {
                "id": s.id,
                "name": s.name,
                "sourceFormat": s.source_format,
                "elementCount": s.element_count,
            }
            for s in sorted(store.schemas().values(), key=lambda s: s.id)
        ]

    @app.get("/schemas/{schema_id}/tree")
    def schema_tree(schema_id: str):
        schemas = store.schemas()
        if schema_id not in schemas:
            raise HTTPException(404, f"unknown schema {schema_id!r}")
        return _tree_payload(schemas[schema_id])

    @app.get("/sessions")
    def list_sessions():
        return [
            {
                "id": s.id,
                "schemaIds": list(s.schema_ids),
                "pairs": [{"left": l, "right": r} for l, r in s.matrix_pairs],
                "tau": s.tau,
                "decisionCount": len(s.decisions),
                "conceptCount": len(s.concepts),
            }
            for s in sorted(store.sessions.values(), key=lambda s: s.id)
        ]

    @app.get("/sessions/{session_id}/links")
    def list_links(
        session_id: str,
        minScore: float | None = None,
        maxScore: float | None = None,
        leftSubtree: str | None = None,
        rightSubtree: str | None = None,
        depthMin: int | None = None,
        depthMax: int | None = None,
        sort: str = "score",
        offset: int = 0,
        limit: int = 100,
    ):
        session = store.get(session_id)
        if sort not in SORT_KEYS:
            raise HTTPException(400, f"unknown sort key {sort!r}; expected one of {SORT_KEYS}")
        if offset < 0 or limit < 0:
            raise HTTPException(400, "offset and limit must be non-negative")
        matrix = session.matrix(*_primary_pair(session))
        link_filters = []
        lo = -1.0 if minScore is None else minScore
        hi = 1.0 if maxScore is None else maxScore
        try:
            link_filters.append(FilterSpec("confidence", lo=lo, hi=hi))
            left_set = right_set = None
            if leftSubtree is not None:
                left_set = matrix.left_schema.subtree_elements(leftSubtree)
            if rightSubtree is not None:
                right_set = matrix.right_schema.subtree_elements(rightSubtree)
            if depthMin is not None or depthMax is not None:
                dlo = 1 if depthMin is None else depthMin
                dhi_l = matrix.left_schema.max_depth if depthMax is None else depthMax
                dhi_r = matrix.right_schema.max_depth if depthMax is None else depthMax
                left_depth = matrix.left_schema.elements_at_depth(dlo, max(dlo, dhi_l))
                right_depth = matrix.right_schema.elements_at_depth(dlo, max(dlo, dhi_r))
                left_set = left_depth if left_set is None else left_set & left_depth
                right_set = right_depth if right_set is None else right_set & right_depth
        except (RangeBoundsError, UnknownIdError, ValidationError) as exc:
            raise HTTPException(400, str(exc)) from None
        links = apply_filters(matrix, link_filters, left_set, right_set)
        rows = [_link_row(session, matrix, l.left_id, l.right_id, l.score) for l in links]
        rows.sort(key=_SORTERS[sort])
        return {
            "total": len(rows),
            "offset": offset,
            "limit": limit,
            "links": rows[offset : offset + limit],
        }

    @app.post("/sessions/{session_id}/decisions")
    def post_decision(session_id: str, body: DecisionIn):
        session = store.get(session_id)
        with store.lock(session_id):
            try:
                decision = session.record_decision(
                    body.leftId,
                    body.rightId,
                    body.status,
                    annotation=body.annotation,
                    author=body.author,
                    assignee=body.assignee,
                )
            except UnknownPairError as exc:
                raise HTTPException(404, str(exc)) from None
            except IllegalTransitionError as exc:
                raise HTTPException(409, str(exc)) from None
            except ValidationError as exc:
                raise HTTPException(400, str(exc)) from None
            store.persist(session_id)
        return {
            "leftId": decision.left_id,
            "rightId": decision.right_id,
            "status": decision.status,
            "annotation": decision.annotation,
            "author": decision.author,
            "assignee": decision.assignee,
            "timestamp": decision.timestamp,
        }

    @app.post("/sessions/{session_id}/concepts", status_code=201)
    def post_concept(session_id: str, body: ConceptIn):
        session = store.get(session_id)
        with store.lock(session_id):
            try:
                label = session.assign_concept(body.schemaId, body.name, body.elementIds)
            except ConflictError as exc:
                raise HTTPException(409, str(exc)) from None
            except UnknownIdError as exc:
                raise HTTPException(404, str(exc)) from None
            except ValidationError as exc:
                raise HTTPException(400, str(exc)) from None
            store.persist(session_id)
        return _concept_payload(session, label.id)

    @app.get("/sessions/{session_id}/concepts")
    def list_concepts(session_id: str):
        session = store.get(session_id)
        return [_concept_payload(session, cid) for cid in sorted(session.concepts)]

    @app.get("/sessions/{session_id}/suggestions")
    def list_suggestions(session_id: str, schemaId: str):
        from .session import suggest_concepts

        session = store.get(session_id)
        try:
            schema = session.schema(schemaId)
        except UnknownIdError as exc:
            raise HTTPException(404, str(exc)) from None
        return [
            {
                "rootId": s.root_id,
                "name": s.name,
                "size": s.size,
                "memberIds": sorted(s.member_ids),
            }
            for s in suggest_concepts(schema)
        ]

    @app.post("/sessions/{session_id}/incremental-match")
    def incremental(session_id: str, body: IncrementalIn):
        session = store.get(session_id)
        try:
            concept = session.concept(body.conceptId)
            links = session.incremental_match(body.conceptId, body.minScore)
        except UnknownIdError as exc:
            raise HTTPException(404, str(exc)) from None
        matrix = session.matrix(*_primary_pair(session))
        left_sid, right_sid = _primary_pair(session)
        opposing = right_sid if concept.schema_id == left_sid else left_sid
        considered = len(concept.member_element_ids) * session.schema(opposing).element_count
        return {
            "conceptId": body.conceptId,
            "considered": considered,
            "links": [
                _link_row(session, matrix, l.left_id, l.right_id, l.score) for l in links
            ],
        }

    @app.get("/sessions/{session_id}/partition")
    def get_partition(session_id: str, mode: str = "validated", minScore: float | None = None):
        session = store.get(session_id)
        try:
            report = analysis.partition(session, mode=mode, min_score=minScore)
        except ValidationError as exc:
            raise HTTPException(400, str(exc)) from None
        return export.partition_to_doc(report)

    @app.get("/sessions/{session_id}/concept-matches")
    def concept_matches(session_id: str):
        session = store.get(session_id)
        return [
            {
                "leftConceptId": m.left_concept_id,
                "rightConceptId": m.right_concept_id,
                "leftConcept": session.concept(m.left_concept_id).name,
                "rightConcept": session.concept(m.right_concept_id).name,
                "support": m.support,
            }
            for m in session.derive_concept_matches()
        ]

    @app.get("/sessions/{session_id}/export/{kind}")
    def export_csv(session_id: str, kind: str, minScore: float | None = None):
        session = store.get(session_id)
        if kind == "concepts":
            text = export.export_concept_sheet(session)
        elif kind == "elements":
            text = export.export_element_sheet(session)
        elif kind == "matrix":
            matrix = session.matrix(*_primary_pair(session))
            lo = session.tau if minScore is None else minScore
            text = export.export_matrix(matrix, lo)
        else:
            raise HTTPException(404, f"unknown export kind {kind!r}")
        return Response(content=text, media_type="text/csv")

    return app


def _primary_pair(session: Session) -> tuple[str, str]:
    try:
        return session.primary_pair()
    except ValidationError as exc:
        raise HTTPException(400, str(exc)) from None
