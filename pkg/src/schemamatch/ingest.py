"""Schema ingestion: relational DDL, a simplified XML Schema dialect, and the
canonical interchange document.

The canonical document is versioned JSON with exactly the fields
{format_version, id, name, documentation, type_hint, children}; nesting
carries the tree, ids are preserved verbatim, and absent documentation or
type_hint serializes as "".

Both parsers are deterministic: the same bytes always produce the same schema,
including assigned element ids.
"""

from __future__ import annotations

import json
import xml.parsers.expat
from dataclasses import dataclass, field

from .errors import ParseError, ValidationError, VersionError
from .model import Node, Schema

CANONICAL_VERSION = "1"


class ParseReport:
    """Collects non-fatal ingest warnings, one line per warning."""

    def __init__(self):
        self.warnings: list[str] = []

    def warn(self, line: int, col: int, message: str) -> None:
        self.warnings.append(f"WARN {line}:{col} {message}")

    def text(self) -> str:
        return "".join(w + "\n" for w in self.warnings)

    def __len__(self) -> int:
        return len(self.warnings)


# ---------------------------------------------------------------------------
# DDL (CREATE TABLE / CREATE VIEW subset)
# ---------------------------------------------------------------------------

_SYMBOLS = "(),;"


@dataclass
class _Tok:
    kind: str  # ident | string | number | symbol | eof
    value: str
    line: int
    col: int


def _lex_ddl(text: str) -> list[_Tok]:
    toks: list[_Tok] = []
    i, line, col = 0, 1, 1
    n = len(text)

    def advance(k: int):
        nonlocal i, line, col
        for _ in range(k):
            if i < n and text[i] == "\n":
                line += 1
                col = 1
            else:
                col += 1
            i += 1

    while i < n:
        c = text[i]
        if c in " \t\r\n":
            advance(1)
            continue
        if text.startswith("--", i):
            j = text.find("\n", i)
            advance((j if j != -1 else n) - i)
            continue
        if text.startswith("/*", i):
            j = text.find("*/", i)
            if j == -1:
                raise ParseError("unterminated block comment", line, col)
            advance(j + 2 - i)
            continue
        if c == "'":
            start_line, start_col = line, col
            j = i + 1
            buf = []
            while True:
                if j >= n:
                    raise ParseError("unterminated string literal", start_line, start_col)
                if text[j] == "'":
                    if j + 1 < n and text[j + 1] == "'":  # '' escape
                        buf.append("'")
                        j += 2
                        continue
                    break
                buf.append(text[j])
                j += 1
            toks.append(_Tok("string", "".join(buf), start_line, start_col))
            advance(j + 1 - i)
            continue
        if c in _SYMBOLS:
            toks.append(_Tok("symbol", c, line, col))
            advance(1)
            continue
        if c == '"':
            j = text.find('"', i + 1)
            if j == -1:
                raise ParseError("unterminated quoted identifier", line, col)
            toks.append(_Tok("ident", text[i + 1 : j], line, col))
            advance(j + 1 - i)
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] in "_$#"):
                j += 1
            toks.append(_Tok("ident", text[i:j], line, col))
            advance(j - i)
            continue
        if c.isdigit():
            j = i
            while j < n and (text[j].isdigit() or text[j] == "."):
                j += 1
            toks.append(_Tok("number", text[i:j], line, col))
            advance(j - i)
            continue
        raise ParseError(f"unexpected character {c!r}", line, col)
    toks.append(_Tok("eof", "", line, col))
    return toks


class _DdlParser:
    def __init__(self, toks: list[_Tok]):
        self.toks = toks
        self.pos = 0

    def peek(self) -> _Tok:
        return self.toks[self.pos]

    def next(self) -> _Tok:
        t = self.toks[self.pos]
        if t.kind != "eof":
            self.pos += 1
        return t

    def kw(self, word: str) -> bool:
        t = self.peek()
        return t.kind == "ident" and t.value.upper() == word

    def expect_kw(self, word: str) -> _Tok:
        t = self.next()
        if t.kind != "ident" or t.value.upper() != word:
            raise ParseError(f"expected {word}, found {t.value!r}", t.line, t.col)
        return t

    def expect(self, kind: str, value: str | None = None) -> _Tok:
        t = self.next()
        if t.kind != kind or (value is not None and t.value != value):
            want = value if value is not None else kind
            raise ParseError(f"expected {want!r}, found {t.value!r}", t.line, t.col)
        return t

    def parse(self) -> list[Node]:
        tables: list[Node] = []
        seen: dict[str, _Tok] = {}
        while self.peek().kind != "eof":
            tok = self.peek()
            if not self.kw("CREATE"):
                raise ParseError(f"expected CREATE, found {tok.value!r}", tok.line, tok.col)
            self.next()
            kind_tok = self.next()
            kind = kind_tok.value.upper() if kind_tok.kind == "ident" else ""
            if kind not in ("TABLE", "VIEW"):
                raise ParseError(
                    f"expected TABLE or VIEW, found {kind_tok.value!r}",
                    kind_tok.line,
                    kind_tok.col,
                )
            name_tok = self.next()
            if name_tok.kind != "ident":
                raise ParseError(
                    f"expected table name, found {name_tok.value!r}", name_tok.line, name_tok.col
                )
            if name_tok.value in seen:
                raise ParseError(
                    f"duplicate table name {name_tok.value!r}", name_tok.line, name_tok.col
                )
            seen[name_tok.value] = name_tok
            self.expect("symbol", "(")
            columns = []
            if not (self.peek().kind == "symbol" and self.peek().value == ")"):
                columns.append(self.parse_column())
                while self.peek().kind == "symbol" and self.peek().value == ",":
                    self.next()
                    columns.append(self.parse_column())
            self.expect("symbol", ")")
            table_doc = ""
            if self.kw("COMMENT"):
                self.next()
                table_doc = self.expect("string").value
            if self.peek().kind == "symbol" and self.peek().value == ";":
                self.next()
            tables.append(
                Node(
                    name=name_tok.value,
                    documentation=table_doc,
                    type_hint=kind.lower(),
                    children=tuple(columns),
                )
            )
        return tables

    def parse_column(self) -> Node:
        name_tok = self.next()
        if name_tok.kind != "ident":
            raise ParseError(
                f"expected column name, found {name_tok.value!r}", name_tok.line, name_tok.col
            )
        type_parts: list[str] = []
        t = self.next()
        if t.kind != "ident":
            raise ParseError(f"expected column type, found {t.value!r}", t.line, t.col)
        type_parts.append(t.value.upper())
        if self.peek().kind == "symbol" and self.peek().value == "(":
            self.next()
            args = []
            while not (self.peek().kind == "symbol" and self.peek().value == ")"):
                tok = self.next()
                if tok.kind == "eof":
                    raise ParseError("unterminated type argument list", tok.line, tok.col)
                if tok.kind == "symbol" and tok.value == ",":
                    args.append(",")
                else:
                    args.append(tok.value)
            self.next()
            type_parts.append("(" + "".join(args) + ")")
        # trailing modifiers (NOT NULL, DEFAULT ... ) up to , ) or COMMENT
        doc = ""
        while True:
            t = self.peek()
            if t.kind == "symbol" and t.value in "),":
                break
            if t.kind == "eof":
                raise ParseError("unterminated column definition", t.line, t.col)
            if self.kw("COMMENT"):
                self.next()
                doc = self.expect("string").value
                continue
            self.next()
        return Node(name=name_tok.value, documentation=doc, type_hint="".join(type_parts))


def parse_ddl(text: str, schema_id: str = "ddl", name: str | None = None) -> Schema:
    """Parse CREATE TABLE / CREATE VIEW statements: one depth-1 element per
    table or view and one depth-2 element per column. COMMENT strings become
    documentation; constraints are ignored."""
    roots = _DdlParser(_lex_ddl(text)).parse()
    return Schema.build(schema_id, name or schema_id, "ddl", roots)


# ---------------------------------------------------------------------------
# XML Schema subset
# ---------------------------------------------------------------------------


@dataclass
class _XmlNode:
    tag: str  # local name, prefix stripped
    attrs: dict[str, str]
    line: int
    col: int
    children: list["_XmlNode"] = field(default_factory=list)
    text: list[str] = field(default_factory=list)

    def get_name(self) -> str | None:
        return self.attrs.get("name")


def _parse_xml(text: str) -> _XmlNode | None:
    parser = xml.parsers.expat.ParserCreate()
    root: list[_XmlNode] = []
    stack: list[_XmlNode] = []

    def local(tag: str) -> str:
        return tag.rsplit(":", 1)[-1]

    def start(tag, attrs):
        node = _XmlNode(
            local(tag),
            {local(k): v for k, v in attrs.items()},
            parser.CurrentLineNumber,
            parser.CurrentColumnNumber + 1,
        )
        if stack:
            stack[-1].children.append(node)
        else:
            root.append(node)
        stack.append(node)

    def end(tag):
        stack.pop()

    def chardata(data):
        if stack:
            stack[-1].text.append(data)

    parser.StartElementHandler = start
    parser.EndElementHandler = end
    parser.CharacterDataHandler = chardata
    try:
        parser.Parse(text, True)
    except xml.parsers.expat.ExpatError as exc:
        raise ParseError(str(exc), exc.lineno, exc.offset + 1) from None
    return root[0] if root else None


_XSD_STRUCTURAL = {"sequence", "choice", "all"}
_XSD_IGNORED_QUIETLY = {"annotation", "documentation", "appinfo"}


def _doc_of(node: _XmlNode) -> str:
    for child in node.children:
        if child.tag == "annotation":
            parts = [
                "".join(doc.text).strip()
                for doc in child.children
                if doc.tag == "documentation"
            ]
            return " ".join(p for p in parts if p)
    return ""


class _XsdBuilder:
    def __init__(self, report: ParseReport):
        self.report = report

    def build(self, root: _XmlNode | None) -> list[Node]:
        if root is None:
            return []
        if root.tag != "schema":
            raise ParseError(f"expected schema document element, found <{root.tag}>", root.line, root.col)
        self.named_types: dict[str, _XmlNode] = {}
        for child in root.children:
            if child.tag == "complexType" and child.get_name():
                self.named_types[child.get_name()] = child
        tops: list[Node] = []
        for child in root.children:
            if child.tag == "element":
                tops.append(self.element_node(child, expand_refs=True))
            elif child.tag == "complexType":
                if child.get_name():
                    tops.append(
                        Node(
                            name=child.get_name(),
                            documentation=_doc_of(child),
                            type_hint="complexType",
                            children=self.content_nodes(child),
                        )
                    )
                else:
                    self.report.warn(child.line, child.col, "skipped anonymous top-level complexType")
            elif child.tag in _XSD_IGNORED_QUIETLY:
                continue
            else:
                self.report.warn(child.line, child.col, f"skipped unsupported construct <{child.tag}>")
        return tops

    def element_node(self, el: _XmlNode, expand_refs: bool) -> Node:
        name = el.attrs.get("name") or el.attrs.get("ref") or "element"
        type_ref = el.attrs.get("type", "")
        doc = _doc_of(el)
        inline = [c for c in el.children if c.tag == "complexType"]
        children: tuple[Node, ...] = ()
        hint = _strip_prefix(type_ref)
        if inline:
            children = self.content_nodes(inline[0])
        elif hint in self.named_types:
            if expand_refs:
                # expand one level: the referenced type's own tree is copied,
                # but type references inside it stay unexpanded markers
                children = self.content_nodes(self.named_types[hint])
            # unexpanded reference: leaf with the type name as hint
        return Node(name=name, documentation=doc, type_hint=hint, children=children)

    def content_nodes(self, type_node: _XmlNode) -> tuple[Node, ...]:
        out: list[Node] = []

        def walk(container: _XmlNode):
            for child in container.children:
                if child.tag == "element":
                    out.append(self.element_node(child, expand_refs=False))
                elif child.tag == "attribute":
                    out.append(
                        Node(
                            name=child.attrs.get("name", "attribute"),
                            documentation=_doc_of(child),
                            type_hint=_strip_prefix(child.attrs.get("type", "")),
                        )
                    )
                elif child.tag in _XSD_STRUCTURAL:
                    walk(child)
                elif child.tag in _XSD_IGNORED_QUIETLY:
                    continue
                else:
                    self.report.warn(
                        child.line, child.col, f"skipped unsupported construct <{child.tag}>"
                    )

        walk(type_node)
        return tuple(out)


def _strip_prefix(qname: str) -> str:
    return qname.rsplit(":", 1)[-1]


def parse_xsd(
    text: str,
    schema_id: str = "xsd",
    name: str | None = None,
    report: ParseReport | None = None,
) -> Schema:
    """Parse the supported XML Schema subset: named complex types and global
    elements at depth 1, nested elements/attributes below, documentation
    annotations attached. Unsupported constructs are skipped with a warning
    in *report* rather than failing the ingest."""
    report = report if report is not None else ParseReport()
    root = _parse_xml(text) if text.strip() else None
    roots = _XsdBuilder(report).build(root)
    return Schema.build(schema_id, name or schema_id, "xsd", roots)


# ---------------------------------------------------------------------------
# Canonical interchange document
# ---------------------------------------------------------------------------


def write_canonical(schema: Schema) -> str:
    """Serialize to the canonical JSON document; deterministic bytes."""

    def node_obj(el_id: str) -> dict:
        el = schema.element(el_id)
        return {
            "id": el.id,
            "name": el.name,
            "documentation": el.documentation,
            "type_hint": el.type_hint,
            "children": [node_obj(c.id) for c in schema.children(el_id)],
        }

    doc = {
        "format_version": CANONICAL_VERSION,
        "id": schema.id,
        "name": schema.name,
        "documentation": "",
        "type_hint": "",
        "children": [node_obj(r.id) for r in schema.roots()],
    }
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def read_canonical(text: str) -> Schema:
    """Parse a canonical document back into a schema, preserving ids, names,
    docs, parent links, and sibling order."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", exc.lineno, exc.colno) from None
    if not isinstance(doc, dict):
        raise ValidationError("canonical document must be an object")
    version = doc.get("format_version")
    if version != CANONICAL_VERSION:
        raise VersionError(f"unsupported canonical format_version {version!r}")
    for key in ("id", "name", "children"):
        if key not in doc:
            raise ValidationError(f"canonical document missing field {key!r}")

    records: list[tuple[str, str, str, str, str | None]] = []

    def walk(obj: dict, parent_id: str | None):
        if not isinstance(obj, dict):
            raise ValidationError("element entries must be objects")
        for key in ("id", "name"):
            if key not in obj:
                raise ValidationError(f"element entry missing field {key!r}")
        records.append(
            (
                str(obj["id"]),
                str(obj["name"]),
                str(obj.get("documentation", "") or ""),
                str(obj.get("type_hint", "") or ""),
                parent_id,
            )
        )
        for child in obj.get("children", []):
            walk(child, str(obj["id"]))

    for child in doc.get("children", []):
        walk(child, None)
    return Schema.from_parent_links(str(doc["id"]), str(doc["name"]), "canonical", records)
