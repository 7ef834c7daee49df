"""Conversion between mainstream TBX and the TEI blend.

``to_tei`` moves term/ref/hi/foreign into the TEI namespace, folds xref into
ref, rewrites IDREF targets as ``#id`` fragments and turns ``hi/@target``
into ``ref rend="hi"``. ``to_tbx`` undoes all of that; with
``strict_legacy`` it also restores bare IDREFs, xref and ``hi/@target``
so that the round trip is exact.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

from .diagnostics import Diagnostic, diag
from .model import (
    NO_ATTRS, Admin, Bibl, Dialect, Document, Hi, Namespace, Node, RefInline, RefItem,
    Text, Xref, canonicalize, child_nodes, entry_path, indexed,
)
from .uri import is_local_fragment, is_ncname


class ConversionError(ValueError):
    pass


class LossError(ConversionError):
    def __init__(self, losses: list[LossRecord]) -> None:
        super().__init__(f"conversion would lose information at {len(losses)} place(s); first: "
                         f"{losses[0].path}: {losses[0].description}")
        self.losses = losses


@dataclass(frozen=True)
class ConvertOptions:
    wrap_sources_as_bibl: bool = False
    strict_legacy: bool = False
    fail_on_loss: bool = False


class LossRecord(NamedTuple):
    path: str
    description: str


@dataclass
class ConvertResult:
    document: Document
    diagnostics: list[Diagnostic] = field(default_factory=list)
    losses: list[LossRecord] = field(default_factory=list)


HI_REND = "hi"


def _rend_with_hi(rend: Optional[str]) -> str:
    return HI_REND if not rend else f"{HI_REND} {rend}"


def _split_hi_rend(rend: Optional[str]) -> tuple[bool, Optional[str]]:
    """(marks a migrated hi, remaining rend)."""
    tokens = (rend or "").split()
    if not tokens or tokens[0] != HI_REND:
        return False, rend
    return True, " ".join(tokens[1:]) or None


class _Pass:
    def __init__(self, opts: ConvertOptions) -> None:
        self.opts = opts
        self.diagnostics: list[Diagnostic] = []
        self.losses: list[LossRecord] = []

    def children(self, node: Node, path: str) -> Node:
        kids = getattr(node, "children", None)
        if kids is not None:
            return dataclasses.replace(
                node, children=tuple(self.convert(c, f"{path}/{s}") for s, c in indexed(kids)))
        content = getattr(node, "content", None)
        if isinstance(content, tuple):
            return dataclasses.replace(node, content=self.mixed(content, path))
        return node

    def mixed(self, content: tuple, path: str) -> tuple:
        out: list = []
        for step, child in indexed(content):
            converted = self.convert(child, f"{path}/{step}")
            if isinstance(converted, tuple):
                out.extend(converted)
            else:
                out.append(converted)
        return tuple(out)

    def convert(self, node, path: str):
        raise NotImplementedError


class _ToTei(_Pass):
    def target(self, target: Optional[str], path: str, legacy_idref: bool) -> Optional[str]:
        if target is None or is_local_fragment(target):
            return target
        if legacy_idref:
            if is_ncname(target):
                if "." in target:
                    self.diagnostics.append(diag(
                        "TBX051", path, f"target {target!r} could be a relative file name; "
                        f"treated as IDREF and rewritten to '#{target}'"))
                return f"#{target}"
            self.diagnostics.append(diag(
                "TBX051", path, f"target {target!r} is not an IDREF; kept as a URI reference"))
        return target

    def convert(self, node, path: str):
        if isinstance(node, Text):
            return node
        node = self.children(node, path)
        if isinstance(node, Xref):
            return RefItem(attrs=node.attrs, loc=node.loc, target=node.target, type=node.type,
                           content=node.content, origin=Namespace.TEI)
        if isinstance(node, Hi) and node.target is not None:
            self.diagnostics.append(diag(
                "TBX050", path, f"hi/@target {node.target!r} migrated to ref rend=\"hi\""))
            return RefInline(attrs=dataclasses.replace(node.attrs, rend=_rend_with_hi(node.attrs.rend)),
                             loc=node.loc, target=self.target(node.target, path, True), type=node.type,
                             content=node.content, origin=Namespace.TEI)
        if isinstance(node, (RefItem, RefInline)):
            node = dataclasses.replace(node, target=self.target(node.target, path, True))
        if hasattr(node, "origin") and node.tag in ("term", "ref", "hi", "foreign"):
            node = dataclasses.replace(node, origin=Namespace.TEI)
        if (self.opts.wrap_sources_as_bibl and isinstance(node, Admin)
                and node.type == "source" and node.content):
            node = dataclasses.replace(node, content=(Bibl(content=node.content),))
        return node


def _is_bibl_wrapper(node: Admin) -> bool:
    return (node.type == "source" and len(node.content) == 1 and isinstance(node.content[0], Bibl)
            and node.content[0].attrs == NO_ATTRS)


class _ToTbx(_Pass):
    def convert(self, node, path: str):
        if isinstance(node, Text):
            return node
        if isinstance(node, Admin) and _is_bibl_wrapper(node):
            inner = node.content[0]
            node = dataclasses.replace(node, content=inner.content)
        if isinstance(node, Bibl):
            what = "bibl markup dropped, text kept"
            if node.attrs != NO_ATTRS:
                what += " (attributes lost)"
            self.losses.append(LossRecord(path, what))
            return self.mixed(node.content, path)
        node = self.children(node, path)
        if hasattr(node, "origin") and node.origin is Namespace.TEI:
            node = dataclasses.replace(node, origin=Namespace.TBX)
        if not self.opts.strict_legacy:
            return node
        if isinstance(node, RefInline):
            migrated, rest = _split_hi_rend(node.attrs.rend)
            target = node.target
            if target is not None and is_local_fragment(target):
                target = target[1:]
            if migrated:
                return Hi(attrs=dataclasses.replace(node.attrs, rend=rest), loc=node.loc,
                          content=node.content, type=node.type, target=target)
            return dataclasses.replace(node, target=target)
        if isinstance(node, RefItem) and node.target is not None:
            if is_local_fragment(node.target):
                return dataclasses.replace(node, target=node.target[1:])
            return Xref(attrs=node.attrs, loc=node.loc, target=node.target, type=node.type,
                        content=node.content)
        return node


def _run(doc: Document, pass_: _Pass, dialect: Dialect, opts: ConvertOptions) -> ConvertResult:
    entries = tuple(pass_.convert(e, entry_path(i)) for i, e in enumerate(doc.entries))
    if opts.fail_on_loss and pass_.losses:
        raise LossError(pass_.losses)
    out = dataclasses.replace(doc, dialect=dialect, entries=entries)
    return ConvertResult(out, pass_.diagnostics, pass_.losses)


def to_tei(doc: Document, opts: ConvertOptions = ConvertOptions()) -> ConvertResult:
    if doc.dialect is not Dialect.MAINSTREAM_TBX:
        raise ConversionError("document is already in the TEI blend")
    return _run(doc, _ToTei(opts), Dialect.TEI_BLEND, opts)


def to_tbx(doc: Document, opts: ConvertOptions = ConvertOptions()) -> ConvertResult:
    if doc.dialect is not Dialect.TEI_BLEND:
        raise ConversionError("document is already mainstream TBX")
    return _run(doc, _ToTbx(opts), Dialect.MAINSTREAM_TBX, opts)


# --- round trip ---------------------------------------------------------------


@dataclass(frozen=True)
class RoundTripReport:
    equal: bool
    divergence: Optional[str] = None
    losses: tuple[LossRecord, ...] = ()


def _own_fields(node) -> dict:
    return {f.name: getattr(node, f.name) for f in dataclasses.fields(node)
            if f.compare and f.name not in ("children", "content")}


def first_divergence(a, b, path: str = "") -> Optional[str]:
    """Path of the first node where two canonical trees differ, or None if equal."""
    if type(a) is not type(b):
        return path or "/"
    if isinstance(a, Text):
        return None if a == b else path
    if _own_fields(a) != _own_fields(b):
        return path or "/"
    if isinstance(getattr(a, "content", None), str):
        return None if a.content == b.content else path
    kids_a, kids_b = list(indexed(child_nodes(a))), list(indexed(child_nodes(b)))
    for (step_a, ca), (step_b, cb) in zip(kids_a, kids_b):
        if step_a != step_b:
            return f"{path}/{step_a}"
        found = first_divergence(ca, cb, f"{path}/{step_a}")
        if found:
            return found
    if len(kids_a) != len(kids_b):
        longer = kids_a if len(kids_a) > len(kids_b) else kids_b
        return f"{path}/{longer[min(len(kids_a), len(kids_b))][0]}"
    return None


def _doc_divergence(a: Document, b: Document) -> Optional[str]:
    if a.dialect != b.dialect or a.base_uri != b.base_uri:
        return "/"
    for i, (ea, eb) in enumerate(zip(a.entries, b.entries)):
        found = first_divergence(ea, eb, entry_path(i))
        if found:
            return found
    if len(a.entries) != len(b.entries):
        return entry_path(min(len(a.entries), len(b.entries)))
    return None


def _has_bibl_wrapper(doc: Document) -> bool:
    def walk(node) -> bool:
        if isinstance(node, Admin) and _is_bibl_wrapper(node):
            return True
        return any(walk(c) for c in child_nodes(node) if not isinstance(c, Text))

    return any(walk(e) for e in doc.entries)


def check_roundtrip(doc: Document) -> RoundTripReport:
    """Convert there and back with the strict inverse and compare canonical forms."""
    strict = ConvertOptions(strict_legacy=True)
    if doc.dialect is Dialect.MAINSTREAM_TBX:
        there = to_tei(doc)
        back = to_tbx(there.document, strict)
    else:
        there = to_tbx(doc, strict)
        back = to_tei(there.document, ConvertOptions(wrap_sources_as_bibl=_has_bibl_wrapper(doc)))
    original, returned = canonicalize(doc), canonicalize(back.document)
    divergence = _doc_divergence(original, returned)
    return RoundTripReport(divergence is None, divergence, tuple(there.losses + back.losses))


__all__ = [
    "ConversionError", "ConvertOptions", "ConvertResult", "LossError", "LossRecord",
    "RoundTripReport", "check_roundtrip", "first_divergence", "to_tbx", "to_tei",
]
