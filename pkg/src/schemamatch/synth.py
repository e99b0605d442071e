"""Seeded synthetic schema generator.

Produces schemata of an exact element count with names and documentation
drawn from a shared domain vocabulary, so a generated pair exhibits realistic
token overlap. Used by the scale benchmarks and the acceptance suite; the
same seed always yields the same schema.
"""

from __future__ import annotations

import random

from .model import Node, Schema

WORDS = [
    "event", "person", "vehicle", "unit", "mission", "location", "status",
    "date", "time", "begin", "end", "first", "last", "info", "code", "name",
    "type", "category", "group", "report", "record", "entry", "source",
    "target", "track", "position", "latitude", "longitude", "altitude",
    "speed", "heading", "contact", "address", "city", "country", "region",
    "zone", "sector", "grid", "identifier", "number", "serial", "model",
    "make", "class", "rank", "grade", "role", "assignment", "organization",
    "command", "echelon", "strength", "capacity", "weight", "height",
    "width", "length", "fuel", "cargo", "crew", "passenger", "weapon",
    "sensor", "radio", "frequency", "channel", "network", "node", "link",
    "route", "waypoint", "origin", "destination", "departure", "arrival",
    "schedule", "priority", "severity", "confidence", "remark", "comment",
    "description", "narrative", "summary", "detail", "total", "count",
    "amount", "quantity", "measure", "value", "flag", "indicator", "state",
]

_DOC_SHAPES = [
    "the {0} {1} recorded for each {2}",
    "{0} of the {1} at {2} time",
    "unique {0} {1} assigned by the {2} system",
    "free text {0} describing the {1} {2}",
    "coded {0} value for {1} and {2}",
    "{0} {1} as reported in the {2} feed",
]


def _doc(rng: random.Random) -> str:
    if rng.random() < 0.35:
        return ""
    shape = rng.choice(_DOC_SHAPES)
    return shape.format(rng.choice(WORDS), rng.choice(WORDS), rng.choice(WORDS))


def _table_name(rng: random.Random) -> str:
    parts = [rng.choice(WORDS).capitalize() for _ in range(rng.randint(2, 3))]
    return "_".join(parts)


def _column_name(rng: random.Random) -> str:
    parts = [rng.choice(WORDS).upper() for _ in range(rng.randint(1, 3))]
    if rng.random() < 0.4:
        parts.append(str(rng.randint(100, 999)))
    return "_".join(parts)


def _camel(rng: random.Random, upper_first: bool) -> str:
    parts = [rng.choice(WORDS) for _ in range(rng.randint(2, 3))]
    head = parts[0].capitalize() if upper_first else parts[0]
    return head + "".join(p.capitalize() for p in parts[1:])


_SQL_TYPES = ["VARCHAR(30)", "VARCHAR(255)", "INTEGER", "DATE", "TIMESTAMP", "DECIMAL(10,2)", "CHAR(1)"]
_XSD_TYPES = ["string", "int", "dateTime", "date", "decimal", "boolean"]


def synthetic_relational(schema_id: str, n_elements: int, seed: int) -> Schema:
    """Flat tables-and-columns schema with exactly *n_elements* tree nodes."""
    rng = random.Random(seed)
    roots: list[Node] = []
    remaining = n_elements
    while remaining > 0:
        cols = min(rng.randint(3, 24), remaining - 1) if remaining > 1 else 0
        children = tuple(
            Node(
                name=_column_name(rng),
                documentation=_doc(rng),
                type_hint=rng.choice(_SQL_TYPES),
            )
            for _ in range(cols)
        )
        roots.append(
            Node(
                name=_table_name(rng),
                documentation=_doc(rng),
                type_hint="table",
                children=children,
            )
        )
        remaining -= 1 + cols
    schema = Schema.build(schema_id, schema_id, "ddl", roots)
    assert schema.element_count == n_elements
    return schema


def synthetic_nested(schema_id: str, n_elements: int, seed: int) -> Schema:
    """Nested types-and-elements schema with exactly *n_elements* tree nodes
    and depth up to four."""
    rng = random.Random(seed)

    def subtree(budget: int, depth: int) -> tuple[Node, int]:
        used = 1
        children: list[Node] = []
        room = budget - 1
        while room > 0:
            if depth >= 3 or room == 1 or rng.random() < 0.65:
                size = 1
            else:
                size = min(room, rng.randint(2, 5))
            child, spent = subtree(size, depth + 1)
            children.append(child)
            room -= spent
            used += spent
        name = _camel(rng, upper_first=depth == 1)
        return (
            Node(
                name=name,
                documentation=_doc(rng),
                type_hint="complexType" if children else rng.choice(_XSD_TYPES),
                children=tuple(children),
            ),
            used,
        )

    roots: list[Node] = []
    remaining = n_elements
    while remaining > 0:
        take = min(remaining, rng.randint(4, 28))
        node, used = subtree(take, 1)
        roots.append(node)
        remaining -= used
    schema = Schema.build(schema_id, schema_id, "xsd", roots)
    assert schema.element_count == n_elements
    return schema


def synthetic_pair(
    left_count: int = 1378, right_count: int = 784, seed: int = 7
) -> tuple[Schema, Schema]:
    """The benchmark-scale pair: a relational-style left schema and a nested
    right schema sharing one vocabulary."""
    return (
        synthetic_relational("synth_left", left_count, seed),
        synthetic_nested("synth_right", right_count, seed + 1),
    )
