"""Customer-facing exports: outer-join concept and element sheets, raw match
matrices, and rendered analysis reports.

CSV dialect: comma separated, minimal RFC quoting, UTF-8, header row, LF
line endings. Exports are byte-deterministic for a given session.
"""

from __future__ import annotations

import csv
import io

from .analysis import PartitionReport, Vocabulary, _pct
from .engine import MatchMatrix
from .session import Session

CONCEPT_SHEET_COLUMNS = (
    "row_type",
    "left_concept",
    "left_member_count",
    "right_concept",
    "right_member_count",
    "support",
)

ELEMENT_SHEET_COLUMNS = (
    "row_type",
    "left_concept",
    "left_path",
    "right_concept",
    "right_path",
    "score",
    "status",
    "annotation",
)


def _writer() -> tuple[io.StringIO, csv.writer]:
    buf = io.StringIO()
    return buf, csv.writer(buf, lineterminator="\n")


def _fmt_score(value: float) -> str:
    return f"{value:.6f}"


def export_concept_sheet(session: Session) -> str:
    """One MATCHED row per concept-level match, one LEFT_ONLY / RIGHT_ONLY row
    per unmatched concept. With one-to-one matches the row count is
    |left concepts| + |right concepts| - |matches|."""
    left_sid, right_sid = session.primary_pair()
    matches = session.derive_concept_matches()
    matched_left = {m.left_concept_id for m in matches}
    matched_right = {m.right_concept_id for m in matches}
    left_concepts = sorted(
        (c for c in session.concepts.values() if c.schema_id == left_sid),
        key=lambda c: c.name,
    )
    right_concepts = sorted(
        (c for c in session.concepts.values() if c.schema_id == right_sid),
        key=lambda c: c.name,
    )
    buf, w = _writer()
    w.writerow(CONCEPT_SHEET_COLUMNS)
    rows = []
    for m in matches:
        lc = session.concept(m.left_concept_id)
        rc = session.concept(m.right_concept_id)
        rows.append(
            (
                "MATCHED",
                lc.name,
                str(len(lc.member_element_ids)),
                rc.name,
                str(len(rc.member_element_ids)),
                str(m.support),
            )
        )
    rows.sort(key=lambda r: (r[1], r[3]))
    for row in rows:
        w.writerow(row)
    for c in left_concepts:
        if c.id not in matched_left:
            w.writerow(("LEFT_ONLY", c.name, str(len(c.member_element_ids)), "", "", ""))
    for c in right_concepts:
        if c.id not in matched_right:
            w.writerow(("RIGHT_ONLY", "", "", c.name, str(len(c.member_element_ids)), ""))
    return buf.getvalue()


def export_element_sheet(session: Session) -> str:
    """Outer-join over elements: MATCHED rows carry the accepted pair's score,
    status, and annotation; every element with no accepted match appears in
    one LEFT_ONLY or RIGHT_ONLY row. Elements in many-to-many accepted
    matches appear once per accepted pair."""
    left_sid, right_sid = session.primary_pair()
    left = session.schema(left_sid)
    right = session.schema(right_sid)
    matrix = session.matrix(left_sid, right_sid)

    def concept_name(schema_id: str, element_id: str) -> str:
        c = session.concept_of(schema_id, element_id)
        return c.name if c else ""

    accepted = [d for d in session.decisions.values() if d.status == "accepted"]
    matched_left = {d.left_id for d in accepted}
    matched_right = {d.right_id for d in accepted}

    matched_rows = []
    for d in accepted:
        matched_rows.append(
            (
                "MATCHED",
                concept_name(left_sid, d.left_id),
                left.element(d.left_id).path,
                concept_name(right_sid, d.right_id),
                right.element(d.right_id).path,
                _fmt_score(matrix.score(d.left_id, d.right_id)),
                d.status,
                d.annotation,
            )
        )
    matched_rows.sort(key=lambda r: (r[1], r[2], r[4]))

    left_rows = sorted(
        (
            ("LEFT_ONLY", concept_name(left_sid, el.id), el.path, "", "", "", "", "")
            for el in left.elements
            if el.id not in matched_left
        ),
        key=lambda r: (r[1], r[2]),
    )
    right_rows = sorted(
        (
            ("RIGHT_ONLY", "", "", concept_name(right_sid, el.id), el.path, "", "", "")
            for el in right.elements
            if el.id not in matched_right
        ),
        key=lambda r: (r[3], r[4]),
    )

    buf, w = _writer()
    w.writerow(ELEMENT_SHEET_COLUMNS)
    for row in matched_rows + left_rows + right_rows:
        w.writerow(row)
    return buf.getvalue()


def export_matrix(matrix: MatchMatrix, lo: float) -> str:
    """One row per link with score >= lo: paths, merged score, and one column
    of confidence per enabled voter. Rows ordered by descending score."""
    from .filters import confidence_filter

    buf, w = _writer()
    w.writerow(("left_path", "right_path", "score") + tuple(matrix.config.voters))
    for link in confidence_filter(matrix, lo, 1.0):
        i = matrix.left_schema.order_index(link.left_id)
        j = matrix.right_schema.order_index(link.right_id)
        confs = tuple(
            _fmt_score(float(matrix.voter_confidence[v][i, j])) for v in matrix.config.voters
        )
        w.writerow(
            (
                matrix.left_schema.element(link.left_id).path,
                matrix.right_schema.element(link.right_id).path,
                _fmt_score(link.score),
            )
            + confs
        )
    return buf.getvalue()


# ---------------------------------------------------------------------------
# human-readable + structured reports
# ---------------------------------------------------------------------------


def render_partition_text(report: PartitionReport) -> str:
    lines = [
        f"PARTITION {report.left_schema_id} vs {report.right_schema_id} ({report.mode})",
        f"LEFT_TOTAL: {report.left_total}",
        f"RIGHT_TOTAL: {report.right_total}",
        f"COMMON: {len(report.common_pairs)} ({report.right_common_pct}%)",
        f"COMMON_LEFT_ELEMENTS: {len(report.left_common)} ({report.left_common_pct}%)",
        f"COMMON_RIGHT_ELEMENTS: {len(report.right_common)} ({report.right_common_pct}%)",
        f"LEFT_ONLY: {len(report.left_only)} ({report.left_only_pct}%)",
        f"RIGHT_ONLY: {len(report.right_only)} ({report.right_only_pct}%)",
    ]
    return "".join(line + "\n" for line in lines)


def partition_to_doc(report: PartitionReport) -> dict:
    return {
        "kind": "partition",
        "left_schema_id": report.left_schema_id,
        "right_schema_id": report.right_schema_id,
        "mode": report.mode,
        "left_total": report.left_total,
        "right_total": report.right_total,
        "common_pair_count": len(report.common_pairs),
        "common_pairs": sorted(list(p) for p in report.common_pairs),
        "left_common_count": len(report.left_common),
        "right_common_count": len(report.right_common),
        "left_common_pct": report.left_common_pct,
        "right_common_pct": report.right_common_pct,
        "left_only_count": len(report.left_only),
        "left_only_pct": report.left_only_pct,
        "left_only": sorted(report.left_only),
        "right_only_count": len(report.right_only),
        "right_only_pct": report.right_only_pct,
        "right_only": sorted(report.right_only),
    }


def render_vocabulary_text(vocab: Vocabulary) -> str:
    cells = vocab.cells()
    lines = [
        f"VOCABULARY schemas={len(vocab.schema_ids)} terms={len(vocab.terms)} "
        f"cells={len(cells)}"
    ]
    for sig, terms in cells:
        label = "{" + ",".join(sorted(sig)) + "}"
        lines.append(f"CELL {label}: {len(terms)} terms")
        for t in terms:
            members = " ".join(f"{sid}:{eid}" for sid, eid in t.member_keys)
            lines.append(f"  {t.term_id} {t.representative_name} [{members}]")
    return "".join(line + "\n" for line in lines)


def vocabulary_to_doc(vocab: Vocabulary) -> dict:
    return {
        "kind": "vocabulary",
        "schema_ids": list(vocab.schema_ids),
        "cells": [
            {
                "signature": sorted(sig),
                "terms": [
                    {
                        "term_id": t.term_id,
                        "representative_name": t.representative_name,
                        "members": [list(k) for k in t.member_keys],
                    }
                    for t in terms
                ],
            }
            for sig, terms in vocab.cells()
        ],
    }


def render_report(obj) -> str:
    if isinstance(obj, PartitionReport):
        return render_partition_text(obj)
    if isinstance(obj, Vocabulary):
        return render_vocabulary_text(obj)
    raise TypeError(f"cannot render {type(obj).__name__}")
