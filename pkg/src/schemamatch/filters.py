"""Link filters and node filters over a match matrix.

Link filters constrain the candidate correspondence itself (score range);
node filters constrain which schema elements participate (depth range,
sub-tree membership). Combining filters is set intersection, so application
order never matters. All bounds are inclusive.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .engine import MatchLink, MatchMatrix
from .errors import RangeBoundsError, ValidationError
from .model import Schema


@dataclass(frozen=True)
class FilterSpec:
    kind: str  # confidence | depth | subtree
    lo: float | None = None
    hi: float | None = None
    schema_id: str | None = None
    root_element_id: str | None = None

    def __post_init__(self):
        if self.kind not in ("confidence", "depth", "subtree"):
            raise ValidationError(f"unknown filter kind {self.kind!r}")
        if self.kind in ("confidence", "depth"):
            if self.lo is None or self.hi is None:
                raise ValidationError(f"{self.kind} filter needs lo and hi")
            if self.lo > self.hi:
                raise RangeBoundsError(f"{self.kind} range {self.lo}..{self.hi} has lo > hi")
        if self.kind == "subtree" and not self.root_element_id:
            raise ValidationError("subtree filter needs root_element_id")


def _sorted_links(matrix: MatchMatrix, mask: np.ndarray) -> list[MatchLink]:
    ii, jj = np.nonzero(mask)
    if len(ii) == 0:
        return []
    ss = matrix.scores[ii, jj]
    order = np.lexsort((jj, ii, -ss))
    left_ids, right_ids = matrix.left_ids, matrix.right_ids
    return [
        MatchLink(left_ids[i], right_ids[j], float(s))
        for i, j, s in zip(ii[order], jj[order], ss[order])
    ]


def confidence_filter(matrix: MatchMatrix, lo: float, hi: float) -> list[MatchLink]:
    """Links with lo <= score <= hi, sorted by descending score (ties broken
    by document order of the endpoints)."""
    if lo > hi:
        raise RangeBoundsError(f"confidence range {lo}..{hi} has lo > hi")
    mask = (matrix.scores >= lo) & (matrix.scores <= hi)
    return _sorted_links(matrix, mask)


def node_filter(schema: Schema, spec: FilterSpec) -> frozenset[str]:
    """Element ids enabled by a depth or sub-tree node filter."""
    if spec.kind == "depth":
        return schema.elements_at_depth(int(spec.lo), int(spec.hi))
    if spec.kind == "subtree":
        return schema.subtree_elements(spec.root_element_id)
    raise ValidationError(f"{spec.kind!r} is not a node filter")


def apply(
    matrix: MatchMatrix,
    link_filters: list[FilterSpec] | tuple[FilterSpec, ...] = (),
    left_node_set: frozenset[str] | set[str] | None = None,
    right_node_set: frozenset[str] | set[str] | None = None,
) -> list[MatchLink]:
    """Links whose endpoints are both enabled and whose score passes every
    link filter; equivalent to intersecting each filter applied alone."""
    mask = np.ones(matrix.scores.shape, dtype=bool)
    for spec in link_filters:
        if spec.kind != "confidence":
            raise ValidationError(f"{spec.kind!r} is not a link filter")
        mask &= (matrix.scores >= spec.lo) & (matrix.scores <= spec.hi)
    if left_node_set is not None:
        enabled = frozenset(left_node_set)
        rows = np.asarray([el in enabled for el in matrix.left_ids], dtype=bool)
        mask &= rows[:, None]
    if right_node_set is not None:
        enabled = frozenset(right_node_set)
        cols = np.asarray([el in enabled for el in matrix.right_ids], dtype=bool)
        mask &= cols[None, :]
    return _sorted_links(matrix, mask)
