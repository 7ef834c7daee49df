"""In-memory model of terminological entries in either dialect.

Structural nodes keep their children in document order so that ordering
problems survive parsing and can be reported by the validator; the typed
views (``TermSection.term``, ``LangSet.tigs`` ...) are derived from that
sequence. All values are frozen and safe to share between threads.
"""

from __future__ import annotations

import dataclasses
import enum
from dataclasses import dataclass, field
from typing import ClassVar, Iterator, NamedTuple, Optional, Union

from .diagnostics import SourceLocation
from .uri import fragment_id, is_language_tag, is_local_fragment, is_ncname, is_uri_reference

TBX_NAMESPACE = "http://www.tbx.org"
# The only TEI namespace in existence; kept here so it can be corrected in one place.
TEI_NAMESPACE = "http://www.tei-c.org/ns/1.0"
XML_NAMESPACE = "http://www.w3.org/XML/1998/namespace"


class Namespace(enum.Enum):
    TBX = TBX_NAMESPACE
    TEI = TEI_NAMESPACE

    @property
    def uri(self) -> str:
        return self.value


class Dialect(enum.Enum):
    MAINSTREAM_TBX = "MainstreamTBX"
    TEI_BLEND = "TeiBlend"


class Level(str, enum.Enum):
    ENTRY = "entry"
    LANG_SET = "langSet"
    TERM_SECTION = "termSection"


@dataclass(frozen=True)
class GlobalAttrs:
    id: Optional[str] = None
    lang: Optional[str] = None
    base: Optional[str] = None
    space: Optional[str] = None
    n: Optional[str] = None
    rend: Optional[str] = None

    def __post_init__(self) -> None:
        if self.id is not None and not is_ncname(self.id):
            raise ValueError(f"xml:id {self.id!r} is not an NCName")
        if self.lang is not None and not is_language_tag(self.lang):
            raise ValueError(f"xml:lang {self.lang!r} is not a language tag")
        if self.space is not None and self.space not in ("default", "preserve"):
            raise ValueError(f"xml:space must be 'default' or 'preserve', not {self.space!r}")


NO_ATTRS = GlobalAttrs()


@dataclass(frozen=True)
class Text:
    value: str


@dataclass(frozen=True, kw_only=True)
class Node:
    """Base for every element node; ``tag`` is the local element name."""

    tag: ClassVar[str] = ""
    attrs: GlobalAttrs = NO_ATTRS
    loc: Optional[SourceLocation] = field(default=None, compare=False, repr=False)


# --- inline nodes -----------------------------------------------------------


@dataclass(frozen=True, kw_only=True)
class Hi(Node):
    tag: ClassVar[str] = "hi"
    content: tuple[Inline, ...] = ()
    type: Optional[str] = None
    # Only legal on TBX-origin hi; migrated to ref when converting to the blend.
    target: Optional[str] = None
    origin: Namespace = Namespace.TBX


@dataclass(frozen=True, kw_only=True)
class Foreign(Node):
    tag: ClassVar[str] = "foreign"
    content: tuple[Inline, ...] = ()
    origin: Namespace = Namespace.TBX


@dataclass(frozen=True, kw_only=True)
class RefInline(Node):
    tag: ClassVar[str] = "ref"
    target: Optional[str] = None
    type: Optional[str] = None
    content: tuple[Inline, ...] = ()
    origin: Namespace = Namespace.TBX


@dataclass(frozen=True, kw_only=True)
class Bpt(Node):
    tag: ClassVar[str] = "bpt"
    i: Optional[str] = None
    content: str = ""


@dataclass(frozen=True, kw_only=True)
class Ept(Node):
    tag: ClassVar[str] = "ept"
    i: Optional[str] = None
    content: str = ""


@dataclass(frozen=True, kw_only=True)
class Ph(Node):
    tag: ClassVar[str] = "ph"
    content: str = ""


@dataclass(frozen=True, kw_only=True)
class Bibl(Node):
    """Unstructured TEI bibliographic reference; has no TBX counterpart."""

    tag: ClassVar[str] = "bibl"
    content: tuple[Inline, ...] = ()

    @property
    def origin(self) -> Namespace:
        return Namespace.TEI


Inline = Union[Text, Hi, Foreign, RefInline, Bpt, Ept, Ph, Bibl]
MixedContent = tuple[Inline, ...]


# --- textual (data) elements --------------------------------------------------


@dataclass(frozen=True, kw_only=True)
class Admin(Node):
    tag: ClassVar[str] = "admin"
    type: Optional[str] = None
    content: MixedContent = ()


@dataclass(frozen=True, kw_only=True)
class Descrip(Node):
    tag: ClassVar[str] = "descrip"
    type: Optional[str] = None
    content: MixedContent = ()


@dataclass(frozen=True, kw_only=True)
class TermNote(Node):
    tag: ClassVar[str] = "termNote"
    type: Optional[str] = None
    content: MixedContent = ()


@dataclass(frozen=True, kw_only=True)
class Note(Node):
    tag: ClassVar[str] = "note"
    content: MixedContent = ()
    origin: Namespace = Namespace.TBX


@dataclass(frozen=True, kw_only=True)
class Transac(Node):
    tag: ClassVar[str] = "transac"
    type: Optional[str] = None
    content: MixedContent = ()


@dataclass(frozen=True, kw_only=True)
class TransacNote(Node):
    tag: ClassVar[str] = "transacNote"
    type: Optional[str] = None
    content: MixedContent = ()


@dataclass(frozen=True, kw_only=True)
class DateItem(Node):
    tag: ClassVar[str] = "date"
    value: str = ""


@dataclass(frozen=True, kw_only=True)
class RefItem(Node):
    tag: ClassVar[str] = "ref"
    target: Optional[str] = None
    type: Optional[str] = None
    content: MixedContent = ()
    origin: Namespace = Namespace.TBX


@dataclass(frozen=True, kw_only=True)
class Xref(Node):
    """Legacy external cross-reference; absent from the blend."""

    tag: ClassVar[str] = "xref"
    target: Optional[str] = None
    type: Optional[str] = None
    content: MixedContent = ()


@dataclass(frozen=True, kw_only=True)
class Term(Node):
    tag: ClassVar[str] = "term"
    content: MixedContent = ()
    origin: Namespace = Namespace.TBX


# --- structural nodes -------------------------------------------------------


@dataclass(frozen=True, kw_only=True)
class DescripGrp(Node):
    tag: ClassVar[str] = "descripGrp"
    children: tuple[Block, ...] = ()

    @property
    def descrip(self) -> Optional[Descrip]:
        first = self.children[0] if self.children else None
        return first if isinstance(first, Descrip) else None

    @property
    def companions(self) -> tuple[Block, ...]:
        return self.children[1:] if self.descrip is not None else self.children


@dataclass(frozen=True, kw_only=True)
class TransacGrp(Node):
    tag: ClassVar[str] = "transacGrp"
    children: tuple[Block, ...] = ()

    @property
    def transac(self) -> Optional[Transac]:
        first = self.children[0] if self.children else None
        return first if isinstance(first, Transac) else None

    @property
    def companions(self) -> tuple[Block, ...]:
        return self.children[1:] if self.transac is not None else self.children


AUX_TYPES = (Admin, Descrip, DescripGrp, TransacGrp, Note, RefItem, Xref)


@dataclass(frozen=True, kw_only=True)
class TermSection(Node):
    tag: ClassVar[str] = "tig"
    children: tuple[Block, ...] = ()

    @property
    def term(self) -> Optional[Term]:
        return next((c for c in self.children if isinstance(c, Term)), None)

    @property
    def term_notes(self) -> tuple[TermNote, ...]:
        return tuple(c for c in self.children if isinstance(c, TermNote))

    @property
    def aux(self) -> tuple[Block, ...]:
        return tuple(c for c in self.children if isinstance(c, AUX_TYPES))


@dataclass(frozen=True, kw_only=True)
class LangSet(Node):
    tag: ClassVar[str] = "langSet"
    children: tuple[Block, ...] = ()

    @property
    def aux(self) -> tuple[Block, ...]:
        return tuple(c for c in self.children if isinstance(c, AUX_TYPES))

    @property
    def tigs(self) -> tuple[TermSection, ...]:
        return tuple(c for c in self.children if isinstance(c, TermSection))


@dataclass(frozen=True, kw_only=True)
class TermEntry(Node):
    tag: ClassVar[str] = "termEntry"
    children: tuple[Block, ...] = ()

    @property
    def aux(self) -> tuple[Block, ...]:
        return tuple(c for c in self.children if isinstance(c, AUX_TYPES))

    @property
    def lang_sets(self) -> tuple[LangSet, ...]:
        return tuple(c for c in self.children if isinstance(c, LangSet))


Block = Union[
    TermEntry, LangSet, TermSection, DescripGrp, TransacGrp, Admin, Descrip,
    TermNote, Note, Transac, TransacNote, DateItem, RefItem, Xref, Term,
]
STRUCTURAL_TYPES = (TermEntry, LangSet, TermSection, DescripGrp, TransacGrp)


@dataclass(frozen=True)
class Document:
    dialect: Dialect
    entries: tuple[TermEntry, ...] = ()
    base_uri: Optional[str] = None
    source_name: str = field(default="<memory>", compare=False)


# --- traversal ---------------------------------------------------------------


def child_nodes(node: Node) -> tuple:
    """Element-or-text children of *node* (empty for text-only elements)."""
    kids = getattr(node, "children", None)
    if kids is not None:
        return kids
    content = getattr(node, "content", ())
    return content if isinstance(content, tuple) else ()


def indexed(children: tuple) -> Iterator[tuple[str, object]]:
    """Yield ``(step, child)`` with XPath-like steps such as ``admin[2]``; text gets ``text()[k]``."""
    counts: dict[str, int] = {}
    for child in children:
        name = "text()" if isinstance(child, Text) else child.tag
        counts[name] = counts.get(name, 0) + 1
        yield f"{name}[{counts[name]}]", child


def entry_path(index: int) -> str:
    return f"/termEntry[{index + 1}]"


def iter_nodes(doc: Document) -> Iterator[tuple[str, Node]]:
    """Every element node with its structural path, in document order."""

    def walk(path: str, node: Node) -> Iterator[tuple[str, Node]]:
        yield path, node
        for step, child in indexed(child_nodes(node)):
            if not isinstance(child, Text):
                yield from walk(f"{path}/{step}", child)

    for i, entry in enumerate(doc.entries):
        yield from walk(entry_path(i), entry)


def text_content(obj: Union[Document, Node, Text]) -> str:
    """Concatenated character data in document order."""
    if isinstance(obj, Document):
        return "".join(text_content(e) for e in obj.entries)
    if isinstance(obj, Text):
        return obj.value
    if isinstance(obj, DateItem):
        return obj.value
    content = getattr(obj, "content", None)
    if isinstance(content, str):
        return content
    return "".join(text_content(c) for c in child_nodes(obj))


class IdTable(NamedTuple):
    ids: dict[str, str]
    duplicates: dict[str, tuple[str, ...]]


def collect_ids(doc: Document) -> IdTable:
    """Map each xml:id to the path of its first bearer; repeated ids go to ``duplicates``."""
    ids: dict[str, str] = {}
    seen: dict[str, list[str]] = {}
    for path, node in iter_nodes(doc):
        ident = node.attrs.id
        if ident is None:
            continue
        seen.setdefault(ident, []).append(path)
        ids.setdefault(ident, path)
    duplicates = {k: tuple(v) for k, v in seen.items() if len(v) > 1}
    return IdTable(ids, duplicates)


class PointerKind(str, enum.Enum):
    LOCAL = "local"
    DANGLING = "dangling"
    EXTERNAL = "external"


class Resolution(NamedTuple):
    kind: PointerKind
    path: Optional[str] = None


class InvalidPointer(ValueError):
    def __init__(self, target: str) -> None:
        super().__init__(f"malformed URI reference {target!r}")
        self.target = target


def resolve_pointer(
    doc: Document, target: str, ids: Optional[IdTable] = None
) -> Resolution:
    if not is_uri_reference(target):
        raise InvalidPointer(target)
    if not is_local_fragment(target):
        return Resolution(PointerKind.EXTERNAL)
    table = ids if ids is not None else collect_ids(doc)
    path = table.ids.get(fragment_id(target))
    if path is None:
        return Resolution(PointerKind.DANGLING)
    return Resolution(PointerKind.LOCAL, path)


# --- canonical form ----------------------------------------------------------


def _merge_text(items: tuple) -> tuple:
    out: list = []
    for item in items:
        if isinstance(item, Text):
            if not item.value:
                continue
            if out and isinstance(out[-1], Text):
                out[-1] = Text(out[-1].value + item.value)
                continue
        out.append(item)
    return tuple(out)


def canonicalize_node(node):
    if isinstance(node, Text):
        return node
    kids = getattr(node, "children", None)
    if kids is not None:
        return dataclasses.replace(node, children=tuple(canonicalize_node(c) for c in kids))
    content = getattr(node, "content", None)
    if isinstance(content, tuple):
        merged = _merge_text(tuple(canonicalize_node(c) for c in content))
        return dataclasses.replace(node, content=merged)
    return node


def canonicalize(doc: Document) -> Document:
    """Canonical form: text runs merged, empty text dropped.

    Inter-element whitespace in element-only content never reaches the model,
    and attribute order is fixed by the serializer, so nothing else changes.
    """
    return dataclasses.replace(doc, entries=tuple(canonicalize_node(e) for e in doc.entries))
