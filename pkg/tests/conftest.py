"""Shared fixtures and hypothesis strategies."""

from __future__ import annotations

import hypothesis.strategies as st

from schemamatch.model import Node, Schema

# Small pool of domain-ish words so generated schemata overlap realistically.
NAME_WORDS = (
    "date", "begin", "event", "vital", "info", "code", "first", "time",
    "track", "unit", "name", "status", "person", "vehicle", "location",
)

DOC_WORDS = NAME_WORDS + ("recorded", "describes", "value", "system", "feed")


def T(name: str, *children: Node, doc: str = "", hint: str = "") -> Node:
    """Terse tree-node builder for fixtures."""
    return Node(name=name, documentation=doc, type_hint=hint, children=tuple(children))


def build_schema(schema_id: str, *roots: Node, fmt: str = "canonical", name: str | None = None) -> Schema:
    return Schema.build(schema_id, name or schema_id, fmt, list(roots))


@st.composite
def element_names(draw) -> str:
    words = draw(st.lists(st.sampled_from(NAME_WORDS), min_size=1, max_size=3))
    style = draw(st.sampled_from(("upper_snake", "camel", "lower")))
    if style == "upper_snake":
        return "_".join(w.upper() for w in words)
    if style == "camel":
        return words[0] + "".join(w.capitalize() for w in words[1:])
    return "_".join(words)


@st.composite
def documentation_text(draw) -> str:
    if draw(st.booleans()):
        return ""
    words = draw(st.lists(st.sampled_from(DOC_WORDS), min_size=2, max_size=8))
    return "the " + " ".join(words)


@st.composite
def schema_nodes(draw, depth: int, max_children: int) -> Node:
    name = draw(element_names())
    doc = draw(documentation_text())
    children = ()
    if depth > 1:
        children = tuple(
            draw(schema_nodes(depth=depth - 1, max_children=max_children))
            for _ in range(draw(st.integers(0, max_children)))
        )
    return Node(name=name, documentation=doc, type_hint="", children=children)


@st.composite
def schemas(draw, schema_id: str | None = None, max_roots: int = 3, max_depth: int = 3,
            max_children: int = 3) -> Schema:
    sid = schema_id or draw(st.sampled_from(("alpha", "beta", "gamma")))
    roots = draw(
        st.lists(
            schema_nodes(depth=draw(st.integers(1, max_depth)), max_children=max_children),
            min_size=1,
            max_size=max_roots,
        )
    )
    return Schema.build(sid, sid, "canonical", roots)


@st.composite
def schema_pairs(draw) -> tuple[Schema, Schema]:
    return (
        draw(schemas(schema_id="pair_left")),
        draw(schemas(schema_id="pair_right")),
    )
