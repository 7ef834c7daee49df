"""Registry-driven structural, data-category and pointer validation."""

from __future__ import annotations

import datetime
import enum
from collections import Counter
from dataclasses import dataclass
from typing import Iterator, Optional

from .diagnostics import Diagnostic, Severity, diag
from .expr import TEXT_SYMBOL, format_expr
from .model import (
    Admin, Bpt, DateItem, Descrip, Dialect, Document, Ept, Hi, LangSet, Level, Node,
    RefInline, RefItem, TermEntry, TermNote, TermSection, Text, Transac, TransacNote,
    Xref, child_nodes, collect_ids, indexed, iter_nodes, text_content,
)
from .registry import Registry, resolve
from .uri import fragment_id, is_local_fragment, is_ncname, is_uri_reference


class Verdict(str, enum.Enum):
    VALID = "valid"
    INVALID = "invalid"


@dataclass(frozen=True)
class ValidationReport:
    diagnostics: tuple[Diagnostic, ...]

    @property
    def counts(self) -> dict[Severity, int]:
        tally = Counter(d.severity for d in self.diagnostics)
        return {s: tally.get(s, 0) for s in Severity}

    @property
    def verdict(self) -> Verdict:
        return Verdict.INVALID if any(d.is_error for d in self.diagnostics) else Verdict.VALID

    @property
    def codes(self) -> list[str]:
        return [d.code for d in self.diagnostics]


_TYPED = (Admin, Descrip, TermNote, Transac, TransacNote)
_LEVEL_OF = {TermEntry: Level.ENTRY, LangSet: Level.LANG_SET, TermSection: Level.TERM_SECTION}


def child_symbols(node: Node, dialect: Dialect) -> list[str]:
    """Child sequence fed to the content-model matcher; text runs collapse to one token."""
    content = getattr(node, "content", None)
    if isinstance(node, DateItem):
        return [TEXT_SYMBOL] if node.value else []
    if isinstance(content, str):
        return [TEXT_SYMBOL] if content else []
    out: list[str] = []
    for child in child_nodes(node):
        if isinstance(child, Text):
            if out and out[-1] == TEXT_SYMBOL:
                continue
            out.append(TEXT_SYMBOL)
        elif isinstance(child, Xref) and dialect is Dialect.MAINSTREAM_TBX:
            # Mainstream xref fills the slot the blend gives to ref.
            out.append("ref")
        else:
            out.append(child.tag)
    return out


def _show(symbols: list[str]) -> str:
    return "[" + ", ".join("text" if s == TEXT_SYMBOL else s for s in symbols) + "]"


def _valid_date(value: str) -> bool:
    try:
        datetime.date.fromisoformat(value)
    except ValueError:
        return False
    return len(value) == 10


def validate_structure(doc: Document, reg: Registry) -> list[Diagnostic]:
    resolved = resolve(reg)
    matchers = reg.matchers
    out: list[Diagnostic] = []
    for path, node in iter_nodes(doc):
        tag = "ref" if isinstance(node, Xref) and doc.dialect is Dialect.MAINSTREAM_TBX else node.tag
        spec = resolved.elements.get(tag)
        if spec is None:
            out.append(diag("TBX001", path, f"element {node.tag!r} is not declared in the registry", node.loc))
            continue
        symbols = child_symbols(node, doc.dialect)
        bad = matchers[tag].first_mismatch(symbols)
        if bad is not None:
            where = f"at position {bad + 1}" if bad < len(symbols) else "at end of content"
            rule = f"{tag} = {format_expr(spec.content)}"
            out.append(diag("TBX010", path,
                            f"children {_show(symbols)} do not match `{rule}` ({where})", node.loc))
        if isinstance(node, LangSet) and node.attrs.lang is None:
            out.append(diag("TBX011", path, "langSet has no xml:lang", node.loc))
        if isinstance(node, _TYPED) and not node.type:
            out.append(diag("TBX010", path, f"{node.tag} requires @type", node.loc))
        if isinstance(node, (RefItem, RefInline, Xref)) and not node.target:
            out.append(diag("TBX010", path, f"{node.tag} requires @target", node.loc))
        if isinstance(node, Hi) and node.target is not None and doc.dialect is Dialect.TEI_BLEND:
            out.append(diag("TBX010", path, "hi cannot carry @target in the blend; use ref", node.loc))
        if isinstance(node, DateItem) and not _valid_date(node.value):
            out.append(diag("TBX010", path, f"date {node.value!r} is not YYYY-MM-DD", node.loc))
        if isinstance(node, TermEntry):
            seen: dict[str, str] = {}
            for step, child in indexed(node.children):
                if isinstance(child, LangSet) and child.attrs.lang:
                    key = child.attrs.lang.casefold()
                    if key in seen:
                        out.append(diag("TBX040", f"{path}/{step}",
                                        f"language {child.attrs.lang!r} already has a section at {seen[key]}",
                                        child.loc))
                    else:
                        seen[key] = f"{path}/{step}"
        out.extend(_pairing(node, path))
    return out


def _pairing(node: Node, path: str) -> Iterator[Diagnostic]:
    content = getattr(node, "content", None)
    if not isinstance(content, tuple):
        return
    opened = Counter(c.i for c in content if isinstance(c, Bpt))
    closed = Counter(c.i for c in content if isinstance(c, Ept))
    for token in sorted((opened - closed) | (closed - opened), key=str):
        yield diag("TBX010", path, f"bpt/ept pairing token {token!r} is unmatched", node.loc)


def _levelled(doc: Document) -> Iterator[tuple[str, Node, Optional[Level]]]:
    """Nodes with the level of their nearest termEntry/langSet/tig ancestor."""

    def walk(path: str, node: Node, level: Optional[Level]) -> Iterator:
        level = _LEVEL_OF.get(type(node), level)
        yield path, node, level
        for step, child in indexed(child_nodes(node)):
            if not isinstance(child, Text):
                yield from walk(f"{path}/{step}", child, level)

    for i, entry in enumerate(doc.entries):
        yield from walk(f"/termEntry[{i + 1}]", entry, None)


def validate_datacats(doc: Document, reg: Registry) -> list[Diagnostic]:
    out: list[Diagnostic] = []
    for path, node, level in _levelled(doc):
        if isinstance(node, _TYPED):
            host = node.tag
        elif isinstance(node, RefItem):
            host = "ref"
        else:
            continue
        if not node.type:
            continue
        cat = reg.datacat(host, node.type)
        if cat is None:
            out.append(diag("TBX020", path, f"unknown data category {node.type!r} for {host}", node.loc))
            continue
        if level is not None and level not in cat.levels:
            allowed = ", ".join(lv.value for lv in Level if lv in cat.levels)
            out.append(diag("TBX021", path,
                            f"{node.type} is not allowed at {level.value} level (allowed: {allowed})", node.loc))
        if cat.picklist is not None:
            value = text_content(node).strip()
            if value not in cat.picklist:
                out.append(diag("TBX022", path,
                                f"{value!r} is not a permitted {node.type} value "
                                f"({', '.join(cat.picklist)})", node.loc))
    return out


def _pointers(doc: Document) -> Iterator[tuple[str, Node, str]]:
    for path, node in iter_nodes(doc):
        target = getattr(node, "target", None)
        if target:
            yield path, node, target


def validate_pointers(doc: Document) -> list[Diagnostic]:
    ids = collect_ids(doc)
    out: list[Diagnostic] = []
    for ident, paths in ids.duplicates.items():
        out.append(diag("TBX030", paths[0], f"xml:id {ident!r} is used by {', '.join(paths)}"))
    legacy = doc.dialect is Dialect.MAINSTREAM_TBX
    for path, node, target in _pointers(doc):
        if not is_uri_reference(target):
            out.append(diag("TBX031", path, f"target {target!r} is not a valid URI reference", node.loc))
        elif is_local_fragment(target) or (legacy and not isinstance(node, Xref) and is_ncname(target)):
            if fragment_id(target) not in ids.ids:
                out.append(diag("TBX031", path, f"target {target!r} points to no xml:id in this document",
                                node.loc))
        else:
            out.append(diag("TBX032", path, f"external target {target!r} not checked", node.loc))
    return out


def validate(doc: Document, reg: Registry) -> ValidationReport:
    diagnostics: list[Diagnostic] = []
    if not doc.entries:
        diagnostics.append(diag("TBX003", "/", "no entries"))
    diagnostics += validate_structure(doc, reg)
    diagnostics += validate_datacats(doc, reg)
    diagnostics += validate_pointers(doc)
    return ValidationReport(tuple(diagnostics))
