"""Namespace-aware parsing and deterministic serialization of both dialects."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional, Union
from xml.parsers import expat

from .diagnostics import Diagnostic, SourceLocation, diag
from .model import (
    TBX_NAMESPACE, TEI_NAMESPACE, XML_NAMESPACE, Admin, Bibl, Bpt, DateItem,
    Descrip, DescripGrp, Dialect, Document, Ept, Foreign, GlobalAttrs, Hi, LangSet,
    Namespace, Node, Note, Ph, RefInline, RefItem, Term, TermEntry, TermNote,
    TermSection, Text, Transac, TransacGrp, TransacNote, Xref, entry_path, indexed,
)

_SEP = "}"

STRUCTURAL = {"termEntry", "langSet", "tig", "descripGrp", "transacGrp"}
TBX_BLOCK = STRUCTURAL | {
    "admin", "descrip", "termNote", "note", "transac", "transacNote", "date", "term", "ref", "xref",
}
TBX_INLINE = {"hi", "foreign", "ref", "bpt", "ept", "ph"}
TEI_BLOCK = {"term", "ref", "note"}
TEI_INLINE = {"hi", "foreign", "ref", "bibl"}

_GLOBAL = {
    f"{XML_NAMESPACE}{_SEP}id": "id",
    f"{XML_NAMESPACE}{_SEP}lang": "lang",
    f"{XML_NAMESPACE}{_SEP}base": "base",
    f"{XML_NAMESPACE}{_SEP}space": "space",
    "n": "n",
    "rend": "rend",
}

# Element-specific attributes by (origin, tag).
_OWN_ATTRS: dict[tuple[Namespace, str], tuple[str, ...]] = {
    (Namespace.TBX, "admin"): ("type",),
    (Namespace.TBX, "descrip"): ("type",),
    (Namespace.TBX, "termNote"): ("type",),
    (Namespace.TBX, "transac"): ("type",),
    (Namespace.TBX, "transacNote"): ("type",),
    (Namespace.TBX, "ref"): ("type", "target"),
    (Namespace.TEI, "ref"): ("type", "target"),
    (Namespace.TBX, "xref"): ("type", "target"),
    (Namespace.TBX, "hi"): ("type", "target"),
    (Namespace.TEI, "hi"): ("type",),
    (Namespace.TBX, "bpt"): ("i",),
    (Namespace.TBX, "ept"): ("i",),
}


class SerializationError(ValueError):
    def __init__(self, path: str, message: str) -> None:
        super().__init__(f"{path}: {message}")
        self.path = path


@dataclass
class ParseResult:
    document: Optional[Document]
    diagnostics: list[Diagnostic] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.document is not None and not any(d.is_error for d in self.diagnostics)


# --- raw tree ---------------------------------------------------------------


@dataclass
class _Raw:
    ns: str
    name: str
    attrs: list[tuple[str, str]]
    loc: SourceLocation
    children: list[Union[_Raw, _RawText]] = field(default_factory=list)


@dataclass
class _RawText:
    value: str
    loc: SourceLocation


class _FatalInput(Exception):
    def __init__(self, message: str, loc: SourceLocation) -> None:
        super().__init__(message)
        self.loc = loc


_DECL = re.compile(rb"^\s*<\?xml[^>]*?encoding\s*=\s*[\"']([A-Za-z0-9._\-]+)[\"']")


def _read_tree(data: bytes) -> _Raw:
    if data.startswith((b"\xff\xfe", b"\xfe\xff")):
        raise _FatalInput("only UTF-8 input is supported", SourceLocation(1, 1, 0))
    m = _DECL.match(data[3:] if data.startswith(b"\xef\xbb\xbf") else data)
    if m and m.group(1).decode("ascii").lower() not in ("utf-8", "utf8"):
        raise _FatalInput(f"unsupported encoding {m.group(1).decode('ascii')!r}; only UTF-8 is supported",
                          SourceLocation(1, 1, 0))

    parser = expat.ParserCreate(encoding="UTF-8", namespace_separator=_SEP)
    parser.buffer_text = True
    parser.ordered_attributes = True
    stack: list[_Raw] = []
    root: list[_Raw] = []

    def here() -> SourceLocation:
        return SourceLocation(parser.CurrentLineNumber, parser.CurrentColumnNumber + 1,
                              max(parser.CurrentByteIndex, 0))

    def start(name: str, attrs: list[str]) -> None:
        ns, _, local = name.rpartition(_SEP)
        node = _Raw(ns, local, list(zip(attrs[0::2], attrs[1::2])), here())
        if stack:
            stack[-1].children.append(node)
        else:
            root.append(node)
        stack.append(node)

    def end(name: str) -> None:
        stack.pop()

    def chars(text: str) -> None:
        if stack:
            kids = stack[-1].children
            if kids and isinstance(kids[-1], _RawText):
                kids[-1].value += text
            else:
                kids.append(_RawText(text, here()))

    def entity_decl(*args) -> None:
        raise _FatalInput("entity declarations are not supported", here())

    parser.StartElementHandler = start
    parser.EndElementHandler = end
    parser.CharacterDataHandler = chars
    parser.EntityDeclHandler = entity_decl
    try:
        parser.Parse(data, True)
    except expat.ExpatError as exc:
        offset = min(max(parser.ErrorByteIndex, 0), len(data))
        raise _FatalInput(f"not well-formed XML: {expat.ErrorString(exc.code)}",
                          SourceLocation(exc.lineno, exc.offset + 1, offset)) from None
    return root[0]


# --- raw tree to model --------------------------------------------------------


def _origin(ns: str) -> Optional[Namespace]:
    if ns == TBX_NAMESPACE:
        return Namespace.TBX
    if ns == TEI_NAMESPACE:
        return Namespace.TEI
    return None


class _Builder:
    def __init__(self) -> None:
        self.diagnostics: list[Diagnostic] = []

    def report(self, code: str, path: str, message: str, loc: SourceLocation) -> None:
        self.diagnostics.append(diag(code, path, message, loc))

    def attrs(self, raw: _Raw, origin: Namespace, path: str) -> tuple[GlobalAttrs, dict[str, str]]:
        own = _OWN_ATTRS.get((origin, raw.name), ())
        values: dict[str, str] = {}
        extra: dict[str, str] = {}
        for key, value in raw.attrs:
            if key in _GLOBAL:
                values[_GLOBAL[key]] = value
            elif key in own:
                extra[key] = value
            else:
                shown = key.replace(f"{XML_NAMESPACE}{_SEP}", "xml:")
                self.report("TBX010", path, f"attribute {shown!r} is not allowed on {raw.name}", raw.loc)
        try:
            return GlobalAttrs(**values), extra
        except ValueError:
            pass
        # Report each bad global attribute separately and drop it.
        kept: dict[str, str] = {}
        for key, value in values.items():
            try:
                GlobalAttrs(**{key: value})
            except ValueError as exc:
                self.report("TBX010", path, str(exc), raw.loc)
            else:
                kept[key] = value
        return GlobalAttrs(**kept), extra

    def classify(self, raw: _Raw, path: str, inline: bool) -> Optional[Namespace]:
        """Return the origin if *raw* may appear here; report and return None otherwise."""
        origin = _origin(raw.ns)
        if origin is None:
            shown = raw.ns or "(no namespace)"
            self.report("TBX002", path, f"element {raw.name!r} in unknown namespace {shown}", raw.loc)
            return None
        known_block = TBX_BLOCK if origin is Namespace.TBX else TEI_BLOCK
        known_inline = TBX_INLINE if origin is Namespace.TBX else TEI_INLINE
        if raw.name not in known_block and raw.name not in known_inline:
            self.report("TBX001", path, f"unknown element {raw.name!r} ({origin.name} namespace)", raw.loc)
            return None
        allowed = known_inline if inline else known_block
        if raw.name not in allowed:
            where = "inline content" if inline else "element-only content"
            self.report("TBX010", path, f"{raw.name} is not allowed in {where}", raw.loc)
            return None
        return origin

    def block_children(self, raw: _Raw, path: str) -> tuple:
        out = []
        counts: dict[str, int] = {}
        for child in raw.children:
            if isinstance(child, _RawText):
                if child.value.strip():
                    self.report("TBX010", path, f"character data {child.value.strip()[:30]!r} "
                                f"is not allowed in {raw.name}", child.loc)
                continue
            tentative = f"{path}/{child.name}[{counts.get(child.name, 0) + 1}]"
            origin = self.classify(child, tentative, inline=False)
            if origin is None:
                continue
            counts[child.name] = counts.get(child.name, 0) + 1
            out.append(self.block(child, origin, tentative))
        return tuple(out)

    def mixed(self, raw: _Raw, path: str) -> tuple:
        out: list = []
        counts: dict[str, int] = {}
        for child in raw.children:
            if isinstance(child, _RawText):
                out.append(Text(child.value))
                continue
            tentative = f"{path}/{child.name}[{counts.get(child.name, 0) + 1}]"
            origin = self.classify(child, tentative, inline=True)
            if origin is None:
                continue
            counts[child.name] = counts.get(child.name, 0) + 1
            out.append(self.inline(child, origin, tentative))
        return tuple(out)

    def text_only(self, raw: _Raw, path: str) -> str:
        parts = []
        for child in raw.children:
            if isinstance(child, _RawText):
                parts.append(child.value)
            else:
                self.report("TBX010", path, f"element {child.name!r} is not allowed in {raw.name}", child.loc)
        return "".join(parts)

    def block(self, raw: _Raw, origin: Namespace, path: str) -> Node:
        attrs, extra = self.attrs(raw, origin, path)
        common = {"attrs": attrs, "loc": raw.loc}
        name = raw.name
        if name in STRUCTURAL:
            cls = {"termEntry": TermEntry, "langSet": LangSet, "tig": TermSection,
                   "descripGrp": DescripGrp, "transacGrp": TransacGrp}[name]
            return cls(children=self.block_children(raw, path), **common)
        if name == "date":
            return DateItem(value=self.text_only(raw, path), **common)
        content = self.mixed(raw, path)
        if name in ("admin", "descrip", "termNote", "transac", "transacNote"):
            cls = {"admin": Admin, "descrip": Descrip, "termNote": TermNote,
                   "transac": Transac, "transacNote": TransacNote}[name]
            return cls(type=extra.get("type"), content=content, **common)
        if name == "note":
            return Note(content=content, origin=origin, **common)
        if name == "term":
            return Term(content=content, origin=origin, **common)
        if name == "ref":
            return RefItem(target=extra.get("target"), type=extra.get("type"),
                           content=content, origin=origin, **common)
        if name == "xref":
            return Xref(target=extra.get("target"), type=extra.get("type"), content=content, **common)
        raise AssertionError(name)

    def inline(self, raw: _Raw, origin: Namespace, path: str) -> Node:
        attrs, extra = self.attrs(raw, origin, path)
        common = {"attrs": attrs, "loc": raw.loc}
        name = raw.name
        if name in ("bpt", "ept"):
            cls = Bpt if name == "bpt" else Ept
            return cls(i=extra.get("i"), content=self.text_only(raw, path), **common)
        if name == "ph":
            return Ph(content=self.text_only(raw, path), **common)
        content = self.mixed(raw, path)
        if name == "hi":
            return Hi(content=content, type=extra.get("type"), target=extra.get("target"),
                      origin=origin, **common)
        if name == "foreign":
            return Foreign(content=content, origin=origin, **common)
        if name == "ref":
            return RefInline(target=extra.get("target"), type=extra.get("type"),
                             content=content, origin=origin, **common)
        if name == "bibl":
            return Bibl(content=content, **common)
        raise AssertionError(name)


def _is_entry(raw: _Raw) -> bool:
    return raw.ns == TBX_NAMESPACE and raw.name == "termEntry"


def _find_entries(raw: _Raw) -> list[_Raw]:
    if _is_entry(raw):
        return [raw]
    found = []
    for child in raw.children:
        if isinstance(child, _Raw):
            found.extend(_find_entries(child))
    return found


def _has_tei(raw: _Raw) -> bool:
    if raw.ns == TEI_NAMESPACE:
        return True
    return any(isinstance(c, _Raw) and _has_tei(c) for c in raw.children)


def _fatal(message: str, loc: SourceLocation) -> ParseResult:
    return ParseResult(None, [diag("TBX000", "/", message, loc)])


def parse(data: Union[bytes, str], dialect_hint: Optional[Dialect] = None,
          source_name: str = "<memory>") -> ParseResult:
    """Parse *data* into a Document; problems come back as diagnostics, never exceptions."""
    if isinstance(data, str):
        data = data.encode("utf-8")
    try:
        root = _read_tree(data)
    except _FatalInput as exc:
        return _fatal(str(exc), exc.loc)

    entries_raw = _find_entries(root)
    if dialect_hint is not None:
        dialect = dialect_hint
    else:
        dialect = Dialect.TEI_BLEND if any(_has_tei(e) for e in entries_raw) else Dialect.MAINSTREAM_TBX

    builder = _Builder()
    entries = []
    for i, raw in enumerate(entries_raw):
        entries.append(builder.block(raw, Namespace.TBX, entry_path(i)))

    base_uri = None
    if not _is_entry(root):
        for key, value in root.attrs:
            if key == f"{XML_NAMESPACE}{_SEP}base":
                base_uri = value
    doc = Document(dialect, tuple(entries), base_uri, source_name)
    return ParseResult(doc, builder.diagnostics)


def detect_dialect(data: Union[bytes, str]) -> Dialect:
    if isinstance(data, str):
        data = data.encode("utf-8")
    try:
        root = _read_tree(data)
    except _FatalInput as exc:
        raise ValueError(f"{exc.loc}: {exc}") from None
    if any(_has_tei(e) for e in _find_entries(root)):
        return Dialect.TEI_BLEND
    return Dialect.MAINSTREAM_TBX


# --- serialization ------------------------------------------------------------

_FIRST_ATTRS = ("xml:id", "xml:lang", "type", "target")


def _escape_text(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;").replace("\r", "&#13;")


def _escape_attr(s: str) -> str:
    return (_escape_text(s).replace('"', "&quot;")
            .replace("\n", "&#10;").replace("\t", "&#9;"))


def _attr_pairs(node: Node) -> list[tuple[str, str]]:
    a = node.attrs
    pairs = {
        "xml:id": a.id, "xml:lang": a.lang, "xml:base": a.base, "xml:space": a.space,
        "n": a.n, "rend": a.rend,
        "type": getattr(node, "type", None),
        "target": getattr(node, "target", None),
        "i": getattr(node, "i", None),
    }
    present = {k: v for k, v in pairs.items() if v is not None}
    head = [(k, present.pop(k)) for k in _FIRST_ATTRS if k in present]
    return head + sorted(present.items())


class _Writer:
    def __init__(self, dialect: Dialect) -> None:
        self.dialect = dialect
        self.out: list[str] = []

    def qname(self, node: Node, path: str) -> str:
        origin = getattr(node, "origin", Namespace.TBX)
        if origin is Namespace.TEI:
            if self.dialect is Dialect.MAINSTREAM_TBX:
                raise SerializationError(path, f"TEI-origin {node.tag} cannot appear in MainstreamTBX")
            return f"tei:{node.tag}"
        return node.tag

    def start_tag(self, name: str, attrs: list[tuple[str, str]], empty: bool) -> str:
        text = "".join(f' {k}="{_escape_attr(v)}"' for k, v in attrs)
        return f"<{name}{text}{'/' if empty else ''}>"

    def inline(self, node, path: str) -> None:
        if isinstance(node, Text):
            self.out.append(_escape_text(node.value))
            return
        if isinstance(node, Hi) and node.target is not None and self.dialect is Dialect.TEI_BLEND:
            raise SerializationError(path, "hi cannot carry @target in TeiBlend")
        name = self.qname(node, path)
        attrs = _attr_pairs(node)
        content = node.content
        if isinstance(content, str):
            if not content:
                self.out.append(self.start_tag(name, attrs, True))
            else:
                self.out.append(self.start_tag(name, attrs, False) + _escape_text(content) + f"</{name}>")
            return
        if not content:
            self.out.append(self.start_tag(name, attrs, True))
            return
        self.out.append(self.start_tag(name, attrs, False))
        for step, child in indexed(content):
            self.inline(child, f"{path}/{step}")
        self.out.append(f"</{name}>")

    def block(self, node: Node, path: str, depth: int, pretty: bool, decls: list[tuple[str, str]] = ()) -> None:
        indent = "  " * depth if pretty else ""
        newline = "\n" if pretty else ""
        name = self.qname(node, path)
        attrs = list(decls) + _attr_pairs(node)
        kids = getattr(node, "children", None)
        if kids is not None:
            if not kids:
                self.out.append(indent + self.start_tag(name, attrs, True) + newline)
                return
            inner_pretty = pretty and node.attrs.space != "preserve"
            self.out.append(indent + self.start_tag(name, attrs, False) + ("\n" if inner_pretty else ""))
            for step, child in indexed(kids):
                self.block(child, f"{path}/{step}", depth + 1, inner_pretty)
            self.out.append((indent if inner_pretty else "") + f"</{name}>" + newline)
            return
        self.out.append(indent)
        if isinstance(node, DateItem):
            if node.value:
                self.out.append(self.start_tag(name, attrs, False) + _escape_text(node.value) + f"</{name}>")
            else:
                self.out.append(self.start_tag(name, attrs, True))
        elif not node.content:
            self.out.append(self.start_tag(name, attrs, True))
        else:
            self.out.append(self.start_tag(name, attrs, False))
            for step, child in indexed(node.content):
                self.inline(child, f"{path}/{step}")
            self.out.append(f"</{name}>")
        self.out.append(newline)


def serialize(doc: Document) -> bytes:
    """UTF-8 XML for *doc*; a single entry with no base URI is written as a bare termEntry."""
    w = _Writer(doc.dialect)
    w.out.append('<?xml version="1.0" encoding="UTF-8"?>\n')
    tei = doc.dialect is Dialect.TEI_BLEND
    entry_decls = [("xmlns", TBX_NAMESPACE)] + ([("xmlns:tei", TEI_NAMESPACE)] if tei else [])
    base = [("xml:base", doc.base_uri)] if doc.base_uri is not None else []
    if len(doc.entries) == 1 and doc.base_uri is None:
        w.block(doc.entries[0], entry_path(0), 0, True, entry_decls)
        return "".join(w.out).encode("utf-8")
    if tei:
        w.out.append(w.start_tag("TEI", [("xmlns", TEI_NAMESPACE)] + base, False) + "\n")
    else:
        w.out.append(w.start_tag("martif", [("xmlns", TBX_NAMESPACE), ("type", "TBX-Basic")] + base, False) + "\n")
        entry_decls = []
    w.out.append("  <text>\n")
    if not doc.entries:
        w.out.append("    <body/>\n")
    else:
        w.out.append("    <body>\n")
        for i, entry in enumerate(doc.entries):
            w.block(entry, entry_path(i), 3, True, entry_decls)
        w.out.append("    </body>\n")
    w.out.append("  </text>\n")
    w.out.append("</TEI>\n" if tei else "</martif>\n")
    return "".join(w.out).encode("utf-8")


__all__ = ["ParseResult", "SerializationError", "detect_dialect", "parse", "serialize"]
