"""Canonical in-memory schema model.

A schema is a rooted ordered tree of named, documented elements. Every other
module consumes this representation: parsers produce it, the match engine
scores pairs of its elements, filters and analytics query it.

Invariants enforced at construction:
  * element ids are unique within a schema
  * depth(child) = depth(parent) + 1, roots have depth 1
  * path is the slash-joined names from root to the element
  * the tree is acyclic and every non-root parent_id resolves
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import UnknownIdError, ValidationError


@dataclass(frozen=True)
class Node:
    """Builder input: a schema element before ids are assigned."""

    name: str
    documentation: str = ""
    type_hint: str = ""
    children: tuple["Node", ...] = ()


@dataclass(frozen=True)
class SchemaElement:
    id: str
    name: str
    documentation: str = ""
    type_hint: str = ""
    parent_id: str | None = None
    depth: int = 1
    path: str = ""


class Schema:
    """Immutable rooted tree of :class:`SchemaElement`.

    Elements are kept in document order (preorder). Instances are safe to
    share across threads; nothing mutates after ``__init__``.
    """

    def __init__(
        self,
        schema_id: str,
        name: str,
        source_format: str,
        elements: list[SchemaElement],
    ):
        if source_format not in ("ddl", "xsd", "canonical"):
            raise ValidationError(f"unknown source_format {source_format!r}")
        self.id = schema_id
        self.name = name
        self.source_format = source_format
        self.elements: tuple[SchemaElement, ...] = tuple(elements)
        self._by_id: dict[str, SchemaElement] = {}
        self._children: dict[str | None, list[str]] = {}
        for el in self.elements:
            if el.id in self._by_id:
                raise ValidationError(f"duplicate element id {el.id!r}")
            self._by_id[el.id] = el
            self._children.setdefault(el.parent_id, []).append(el.id)
        self._order = {el.id: i for i, el in enumerate(self.elements)}
        self._validate()

    # -- construction -------------------------------------------------

    @classmethod
    def build(
        cls,
        schema_id: str,
        name: str,
        source_format: str,
        roots: tuple[Node, ...] | list[Node],
    ) -> "Schema":
        """Build from nested nodes, assigning ids ``schemaId:ordinal`` in
        document order (1-based preorder)."""
        elements: list[SchemaElement] = []
        counter = [0]

        def walk(node: Node, parent: SchemaElement | None) -> None:
            counter[0] += 1
            depth = 1 if parent is None else parent.depth + 1
            path = node.name if parent is None else f"{parent.path}/{node.name}"
            el = SchemaElement(
                id=f"{schema_id}:{counter[0]}",
                name=node.name,
                documentation=node.documentation or "",
                type_hint=node.type_hint or "",
                parent_id=None if parent is None else parent.id,
                depth=depth,
                path=path,
            )
            elements.append(el)
            for child in node.children:
                walk(child, el)

        for root in roots:
            walk(root, None)
        return cls(schema_id, name, source_format, elements)

    @classmethod
    def from_parent_links(
        cls,
        schema_id: str,
        name: str,
        source_format: str,
        records: list[tuple[str, str, str, str, str | None]],
    ) -> "Schema":
        """Build from explicit (id, name, documentation, type_hint, parent_id)
        records in document order; depth and path are derived. Used by the
        canonical reader, which must preserve ids."""
        elements: list[SchemaElement] = []
        by_id: dict[str, SchemaElement] = {}
        for el_id, el_name, doc, hint, parent_id in records:
            if parent_id is None:
                depth, path = 1, el_name
            else:
                parent = by_id.get(parent_id)
                if parent is None:
                    raise ValidationError(
                        f"element {el_id!r}: parent {parent_id!r} does not "
                        "precede it in document order"
                    )
                depth, path = parent.depth + 1, f"{parent.path}/{el_name}"
            el = SchemaElement(el_id, el_name, doc or "", hint or "", parent_id, depth, path)
            if el_id in by_id:
                raise ValidationError(f"duplicate element id {el_id!r}")
            by_id[el_id] = el
            elements.append(el)
        return cls(schema_id, name, source_format, elements)

    def _validate(self) -> None:
        for el in self.elements:
            if el.parent_id is None:
                if el.depth != 1:
                    raise ValidationError(f"root {el.id!r} has depth {el.depth}")
            else:
                parent = self._by_id.get(el.parent_id)
                if parent is None:
                    raise ValidationError(f"element {el.id!r}: unknown parent {el.parent_id!r}")
                if el.depth != parent.depth + 1:
                    raise ValidationError(f"element {el.id!r}: depth != parent depth + 1")
            if el.path.split("/")[-1] != el.name or len(el.path.split("/")) != el.depth:
                raise ValidationError(f"element {el.id!r}: inconsistent path {el.path!r}")

    # -- queries -------------------------------------------------------

    @property
    def element_count(self) -> int:
        return len(self.elements)

    def element(self, element_id: str) -> SchemaElement:
        try:
            return self._by_id[element_id]
        except KeyError:
            raise UnknownIdError(f"no element {element_id!r} in schema {self.id!r}") from None

    def __contains__(self, element_id: str) -> bool:
        return element_id in self._by_id

    def order_index(self, element_id: str) -> int:
        return self._order[element_id]

    def roots(self) -> tuple[SchemaElement, ...]:
        return tuple(self._by_id[i] for i in self._children.get(None, []))

    def children(self, element_id: str) -> tuple[SchemaElement, ...]:
        self.element(element_id)
        return tuple(self._by_id[i] for i in self._children.get(element_id, []))

    def parent(self, element_id: str) -> SchemaElement | None:
        el = self.element(element_id)
        return None if el.parent_id is None else self._by_id[el.parent_id]

    def subtree_elements(self, root_id: str) -> frozenset[str]:
        """The root plus all its descendants."""
        self.element(root_id)
        out: set[str] = set()
        stack = [root_id]
        while stack:
            cur = stack.pop()
            out.add(cur)
            stack.extend(self._children.get(cur, ()))
        return frozenset(out)

    def elements_at_depth(self, lo: int, hi: int) -> frozenset[str]:
        """All element ids with lo <= depth <= hi (both bounds inclusive)."""
        if lo > hi:
            from .errors import RangeBoundsError

            raise RangeBoundsError(f"depth range {lo}..{hi} has lo > hi")
        return frozenset(el.id for el in self.elements if lo <= el.depth <= hi)

    @property
    def max_depth(self) -> int:
        return max((el.depth for el in self.elements), default=0)

    def tree_equal(self, other: "Schema") -> bool:
        """Structural equality: same elements in the same order, ignoring the
        source_format tag (a canonical round-trip reports 'canonical')."""
        return (
            self.id == other.id
            and self.name == other.name
            and self.elements == other.elements
        )

    def __repr__(self) -> str:
        return f"Schema({self.id!r}, {self.element_count} elements)"


def element_count(schema: Schema) -> int:
    return schema.element_count


def subtree_elements(schema: Schema, root_id: str) -> frozenset[str]:
    return schema.subtree_elements(root_id)


def elements_at_depth(schema: Schema, lo: int, hi: int) -> frozenset[str]:
    return schema.elements_at_depth(lo, hi)
