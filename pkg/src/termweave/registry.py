"""Declarative registry of elements, classes and data categories.

One registry drives three consumers: the validator (through compiled
matchers), the compact schema text and the markdown reference. Overlay files
customize the default registry by adding or removing class members,
elements and data categories.
"""

from __future__ import annotations

import dataclasses
import enum
import functools
import os
import re
from dataclasses import dataclass
from types import MappingProxyType
from typing import Mapping, Optional, Union

from .automaton import Matcher, compile_content_model
from .expr import (
    Choice, ClassRef, ElemRef, Expr, ExprSyntaxError, Rep, Seq, TextTok,
    class_refs, elem_refs, format_expr, parse_expr, plus, simplify, star,
)
from .model import Level, Namespace

REGISTRY_VERSION = "tbx-basic-tei/1"


class RegistryError(ValueError):
    def __init__(self, message: str, line: Optional[int] = None, source: Optional[str] = None) -> None:
        where = ""
        if source is not None and line is not None:
            where = f"{source}:{line}: "
        elif line is not None:
            where = f"line {line}: "
        super().__init__(where + message)
        self.line = line


class ClassKind(str, enum.Enum):
    MODEL = "model"
    ATTRIBUTE = "attribute"


HOSTS = ("admin", "descrip", "termNote", "transac", "transacNote", "ref")


@dataclass(frozen=True)
class ClassSpec:
    name: str
    kind: ClassKind
    members: tuple[str, ...]

    def __post_init__(self) -> None:
        if not self.members:
            raise RegistryError(f"class {self.name} has no members")


@dataclass(frozen=True)
class ElementSpec:
    name: str
    namespace: Namespace
    content: Expr
    attr_classes: tuple[str, ...] = ("att.global",)
    own_attrs: tuple[str, ...] = ()
    gloss: str = ""
    doc: str = ""
    examples: tuple[str, ...] = ()


@dataclass(frozen=True)
class DataCatSpec:
    name: str
    host: str
    levels: frozenset[Level]
    picklist: Optional[tuple[str, ...]] = None
    remark: str = ""

    def __post_init__(self) -> None:
        if self.host not in HOSTS:
            raise RegistryError(f"data category {self.name}: unknown host {self.host!r}")
        if not self.levels:
            raise RegistryError(f"data category {self.name}: no levels")
        if self.picklist is not None and not self.picklist:
            raise RegistryError(f"data category {self.name}: empty picklist")

    @property
    def datatype(self) -> str:
        return "picklist" if self.picklist is not None else "plainText"


@dataclass(frozen=True, eq=False)
class Registry:
    elements: Mapping[str, ElementSpec]
    classes: Mapping[str, ClassSpec]
    datacats: tuple[DataCatSpec, ...]
    version: str = REGISTRY_VERSION

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Registry):
            return NotImplemented
        return (
            dict(self.elements) == dict(other.elements)
            and dict(self.classes) == dict(other.classes)
            and self.datacats == other.datacats
            and self.version == other.version
        )

    def element(self, name: str) -> ElementSpec:
        return self.elements[name]

    def datacat(self, host: str, name: str) -> Optional[DataCatSpec]:
        return self._datacat_index.get((host, name))

    def datacats_for(self, host: str) -> tuple[DataCatSpec, ...]:
        return tuple(d for d in self.datacats if d.host == host)

    @functools.cached_property
    def _datacat_index(self) -> dict[tuple[str, str], DataCatSpec]:
        return {(d.host, d.name): d for d in self.datacats}

    @functools.cached_property
    def matchers(self) -> Mapping[str, Matcher]:
        """Compiled content models of the resolved registry, by element name."""
        resolved = resolve(self)
        return MappingProxyType(
            {name: compile_content_model(spec.content) for name, spec in resolved.elements.items()}
        )

    def replace(self, **changes) -> Registry:
        for key in ("elements", "classes"):
            if key in changes:
                changes[key] = MappingProxyType(dict(changes[key]))
        return dataclasses.replace(self, **changes)


def _make(elements: list[ElementSpec], classes: list[ClassSpec], datacats: list[DataCatSpec]) -> Registry:
    return Registry(
        MappingProxyType({e.name: e for e in elements}),
        MappingProxyType({c.name: c for c in classes}),
        tuple(datacats),
    )


# --- checking and resolution ----------------------------------------------------


def check(reg: Registry) -> None:
    """Raise RegistryError on dangling references or inconsistent class kinds."""
    for spec in reg.elements.values():
        for name in sorted(class_refs(spec.content)):
            cls = reg.classes.get(name)
            if cls is None:
                raise RegistryError(f"element {spec.name}: unknown class {name!r}")
            if cls.kind is not ClassKind.MODEL:
                raise RegistryError(f"element {spec.name}: {name} is not a model class")
        for name in sorted(elem_refs(spec.content)):
            if name not in reg.elements:
                raise RegistryError(f"element {spec.name}: unknown element {name!r}")
        for name in spec.attr_classes:
            cls = reg.classes.get(name)
            if cls is None or cls.kind is not ClassKind.ATTRIBUTE:
                raise RegistryError(f"element {spec.name}: unknown attribute class {name!r}")
    for cls in reg.classes.values():
        if cls.kind is not ClassKind.MODEL:
            continue
        for member in cls.members:
            if member not in reg.elements and member not in reg.classes:
                raise RegistryError(f"class {cls.name}: unknown member {member!r}")


def _expand_class(reg: Registry, name: str, stack: tuple[str, ...]) -> Expr:
    if name in stack:
        cycle = " -> ".join(stack + (name,))
        raise RegistryError(f"cyclic class membership: {cycle}")
    cls = reg.classes.get(name)
    if cls is None:
        raise RegistryError(f"unknown class {name!r}")
    items: list[Expr] = []
    for member in cls.members:
        if member in reg.classes:
            items.append(_expand_class(reg, member, stack + (name,)))
        else:
            items.append(ElemRef(member))
    return Choice(tuple(items))


def _resolve_expr(reg: Registry, e: Expr) -> Expr:
    if isinstance(e, ClassRef):
        return _expand_class(reg, e.name, ())
    if isinstance(e, Rep):
        return Rep(_resolve_expr(reg, e.child), e.min, e.max)
    if isinstance(e, (Seq, Choice)):
        return type(e)(tuple(_resolve_expr(reg, item) for item in e.items))
    return e


def resolve(reg: Registry) -> Registry:
    """Expand every class reference into a choice over member elements."""
    check(reg)
    for name in reg.classes:
        if reg.classes[name].kind is ClassKind.MODEL:
            _expand_class(reg, name, ())
    elements = {
        name: dataclasses.replace(spec, content=simplify(_resolve_expr(reg, spec.content)))
        for name, spec in reg.elements.items()
    }
    return reg.replace(elements=elements)


# --- default registry ---------------------------------------------------------

_TEXTUAL = star(Choice((TextTok(), ClassRef("model.limitedPhrase"), ClassRef("model.metaMarkup"))))
_AUX = star(ClassRef("model.auxInfo"))
_ALL_LEVELS = frozenset(Level)

_GLOBAL_ATTRS = ("xml:id", "xml:lang", "xml:base", "xml:space", "n", "rend")


def _el(name: str, ns: Namespace, content: Expr, gloss: str, doc: str = "", *,
        own: tuple[str, ...] = (), pointing: bool = False, examples: tuple[str, ...] = ()) -> ElementSpec:
    classes = ("att.global", "att.pointing") if pointing else ("att.global",)
    return ElementSpec(name, ns, content, classes, own, gloss, doc, examples)


def _default_elements() -> list[ElementSpec]:
    TBX, TEI = Namespace.TBX, Namespace.TEI
    return [
        _el("termEntry", TBX, Seq((_AUX, plus(ElemRef("langSet")))),
            "terminological entry",
            "Groups every description of one concept: entry-level auxiliary "
            "information followed by one language section per language.",
            examples=('<termEntry xmlns="http://www.tbx.org">\n'
                      '  <descrip type="subjectField">Industrie mécanique</descrip>\n'
                      '  <langSet xml:lang="de">...</langSet>\n</termEntry>',)),
        _el("langSet", TBX, Seq((_AUX, plus(ElemRef("tig")))),
            "language section",
            "All terms of the entry in one language. xml:lang is required.",
            examples=('<langSet xml:lang="fr">\n  <tig>...</tig>\n</langSet>',)),
        _el("tig", TBX, Seq((ElemRef("term"), star(ElemRef("termNote")), _AUX)),
            "term information group",
            "Term section: exactly one term, then term notes, then auxiliary information.",
            examples=('<tig>\n  <tei:term>Keilriemen</tei:term>\n'
                      '  <termNote type="partOfSpeech">noun</termNote>\n</tig>',)),
        _el("term", TEI, star(Choice((TextTok(), ElemRef("hi")))),
            "term",
            "The designation itself. Only highlighting is allowed inside it.",
            examples=("<tei:term>Keilriemen</tei:term>",)),
        _el("termNote", TBX, _TEXTUAL, "term note",
            "Data category applying to the term, named by @type.",
            own=("type",), examples=('<termNote type="grammaticalGender">masculine</termNote>',)),
        _el("admin", TBX, star(Choice((TextTok(), ClassRef("model.limitedPhrase"),
                                       ClassRef("model.metaMarkup"), ClassRef("model.biblLike")))),
            "administrative information",
            "Administrative data category such as source or responsibility, named by @type.",
            own=("type",), examples=('<admin type="source">De Coster, Wörterbuch, 1982</admin>',)),
        _el("descrip", TBX, _TEXTUAL, "descriptive information",
            "Descriptive data category such as definition or subjectField, named by @type.",
            own=("type",), examples=('<descrip type="definition">courroie sans fin ...</descrip>',)),
        _el("descripGrp", TBX, Seq((ElemRef("descrip"), star(Choice((ElemRef("admin"), ElemRef("note"), ElemRef("ref")))))),
            "descriptive group",
            "A descrip refined by administrative information, notes or references."),
        _el("transacGrp", TBX, Seq((ElemRef("transac"), star(Choice((ElemRef("transacNote"), ElemRef("date"),
                                                                     ElemRef("note"), ElemRef("ref")))))),
            "transaction group",
            "One transaction on the entry (creation, modification) with its notes and date."),
        _el("transac", TBX, _TEXTUAL, "transaction", own=("type",)),
        _el("transacNote", TBX, _TEXTUAL, "transaction note", own=("type",)),
        _el("date", TBX, TextTok(), "date", "Calendar date in YYYY-MM-DD form.",
            examples=("<date>2014-02-28</date>",)),
        _el("note", TBX, _TEXTUAL, "note", "Free-text note.",
            examples=("<note>wird zum Antrieb der Lichtmaschine benutzt</note>",)),
        _el("ref", TEI, _TEXTUAL, "reference",
            "Pointer to another node or resource. @target holds a URI reference; "
            "local targets use the #id fragment form.",
            own=("type",), pointing=True,
            examples=('<tei:ref target="#E12">see entry E12</tei:ref>',
                      '<tei:ref target="http://astm.org/E284">ASTM E284</tei:ref>')),
        _el("hi", TEI, _TEXTUAL, "highlighted",
            "Highlighted span. Has no @target; use ref for cross-references.",
            own=("type",), examples=('<tei:hi rend="italic">in situ</tei:hi>',)),
        _el("foreign", TEI, _TEXTUAL, "foreign", "Word or phrase in another language than its context.",
            examples=('<tei:foreign xml:lang="en">belt</tei:foreign>',)),
        _el("bibl", TEI, _TEXTUAL, "bibliographic citation",
            "Unstructured bibliographic reference, used to wrap source information.",
            examples=('<admin type="source"><tei:bibl>De Coster, Wörterbuch, 1982</tei:bibl></admin>',)),
        _el("bpt", TBX, TextTok(), "begin paired tag",
            "Opening half of native markup from the source text, paired with ept via @i.", own=("i",)),
        _el("ept", TBX, TextTok(), "end paired tag", "Closing half of native markup paired by @i.", own=("i",)),
        _el("ph", TBX, TextTok(), "placeholder", "Standalone native markup."),
    ]


def _default_classes() -> list[ClassSpec]:
    return [
        ClassSpec("model.auxInfo", ClassKind.MODEL,
                  ("admin", "descrip", "descripGrp", "transacGrp", "note", "ref")),
        ClassSpec("model.metaMarkup", ClassKind.MODEL, ("bpt", "ept", "ph")),
        ClassSpec("model.limitedPhrase", ClassKind.MODEL, ("hi", "foreign", "ref")),
        ClassSpec("model.biblLike", ClassKind.MODEL, ("bibl",)),
        ClassSpec("att.global", ClassKind.ATTRIBUTE, _GLOBAL_ATTRS),
        ClassSpec("att.pointing", ClassKind.ATTRIBUTE, ("target",)),
    ]


def _default_datacats() -> list[DataCatSpec]:
    E, L, T = Level.ENTRY, Level.LANG_SET, Level.TERM_SECTION
    return [
        DataCatSpec("definition", "descrip", frozenset({E, L})),
        DataCatSpec("subjectField", "descrip", frozenset({E})),
        DataCatSpec("source", "admin", _ALL_LEVELS),
        DataCatSpec("responsibility", "admin", _ALL_LEVELS),
        DataCatSpec("projectSubset", "admin", frozenset({E}),
                    remark="industrial: kept for compatibility, of doubtful use outside industry"),
        DataCatSpec("partOfSpeech", "termNote", frozenset({T}),
                    picklist=("noun", "verb", "adjective", "adverb", "properNoun", "other")),
        DataCatSpec("grammaticalGender", "termNote", frozenset({T}),
                    picklist=("masculine", "feminine", "neuter", "other")),
        # transacGrp needs a typed transac to be usable at all.
        DataCatSpec("transactionType", "transac", _ALL_LEVELS, picklist=("origination", "modification")),
    ]


@functools.lru_cache(maxsize=None)
def load_default() -> Registry:
    reg = _make(_default_elements(), _default_classes(), _default_datacats())
    check(reg)
    return reg


# --- overlay files ------------------------------------------------------------

_LEVEL_NAMES = {"entry": Level.ENTRY, "termEntry": Level.ENTRY, "langSet": Level.LANG_SET,
                "termSection": Level.TERM_SECTION, "tig": Level.TERM_SECTION}
_NAME = r"[A-Za-z_][\w.\-]*"
_ELEMENT = re.compile(rf"^element\s+(?:(?P<prefix>tei|tbx):)?(?P<name>{_NAME})\s*=\s*(?P<expr>.+)$")
_REMOVE = re.compile(rf"^remove\s+element\s+(?P<name>{_NAME})$")
_CLASS = re.compile(rf"^class\s+(?P<name>{_NAME})\s*(?P<op>\+=|-=)\s*(?P<member>{_NAME})$")
_DATACAT = re.compile(
    rf"^datacat\s+(?P<host>{_NAME})/(?P<name>{_NAME})\s*@\s*(?P<levels>{_NAME}(?:\s*,\s*{_NAME})*)"
    rf"(?:\s*:\s*(?P<picklist>{_NAME}(?:\s*\|\s*{_NAME})*))?$"
)


def apply_overlay(base: Registry, text: str, source: str = "<overlay>") -> Registry:
    """Apply overlay directives in *text* to *base*; see the README for the format."""
    elements = dict(base.elements)
    classes = dict(base.classes)
    datacats = list(base.datacats)
    removed: dict[str, int] = {}

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if m := _ELEMENT.match(line):
            try:
                content = parse_expr(m["expr"])
            except ExprSyntaxError as exc:
                raise RegistryError(str(exc), lineno, source) from None
            name = m["name"]
            old = elements.get(name)
            ns = Namespace.TEI if m["prefix"] == "tei" else Namespace.TBX
            if old is not None:
                ns = old.namespace if m["prefix"] is None else ns
                elements[name] = dataclasses.replace(old, content=content, namespace=ns)
            else:
                elements[name] = ElementSpec(name, ns, content)
        elif m := _REMOVE.match(line):
            if m["name"] not in elements:
                raise RegistryError(f"cannot remove unknown element {m['name']!r}", lineno, source)
            del elements[m["name"]]
            removed[m["name"]] = lineno
        elif m := _CLASS.match(line):
            cls = classes.get(m["name"])
            if cls is None:
                raise RegistryError(f"unknown class {m['name']!r}", lineno, source)
            member = m["member"]
            if m["op"] == "+=":
                if member in cls.members:
                    raise RegistryError(f"{member!r} is already a member of {cls.name}", lineno, source)
                classes[cls.name] = dataclasses.replace(cls, members=cls.members + (member,))
            else:
                if member not in cls.members:
                    raise RegistryError(f"{member!r} is not a member of {cls.name}", lineno, source)
                members = tuple(x for x in cls.members if x != member)
                if not members:
                    raise RegistryError(f"class {cls.name} would become empty", lineno, source)
                classes[cls.name] = dataclasses.replace(cls, members=members)
        elif m := _DATACAT.match(line):
            try:
                levels = frozenset(_LEVEL_NAMES[x.strip()] for x in m["levels"].split(","))
            except KeyError as exc:
                raise RegistryError(f"unknown level {exc.args[0]!r}", lineno, source) from None
            picklist = tuple(x.strip() for x in m["picklist"].split("|")) if m["picklist"] else None
            try:
                spec = DataCatSpec(m["name"], m["host"], levels, picklist)
            except RegistryError as exc:
                raise RegistryError(str(exc), lineno, source) from None
            datacats = [d for d in datacats if (d.host, d.name) != (spec.host, spec.name)]
            datacats.append(spec)
        else:
            raise RegistryError(f"cannot parse directive {line!r}", lineno, source)

    reg = base.replace(elements=elements, classes=classes, datacats=tuple(datacats))
    for name, lineno in removed.items():
        users = sorted(
            [e.name for e in elements.values() if name in elem_refs(e.content)]
            + [c.name for c in classes.values() if name in c.members]
        )
        if users:
            raise RegistryError(f"removed element {name!r} is still referenced by {', '.join(users)}",
                                lineno, source)
    try:
        resolve(reg)
    except RegistryError as exc:
        raise RegistryError(f"{source}: {exc}") from None
    return reg


def load_from_file(path: Union[str, os.PathLike]) -> Registry:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    return apply_overlay(load_default(), text, source=os.fspath(path))


# --- generated views ------------------------------------------------------------


def emit_schema(reg: Registry) -> str:
    """Compact grammar, one ``name = expr`` rule per element, sorted by name."""
    resolved = resolve(reg)
    lines = [f"{name} = {format_expr(resolved.elements[name].content)}" for name in sorted(resolved.elements)]
    return "\n".join(lines) + "\n"


def _attributes(reg: Registry, spec: ElementSpec) -> list[str]:
    out = []
    for cls_name in spec.attr_classes:
        members = ", ".join(f"@{a}" for a in reg.classes[cls_name].members)
        out.append(f"- {cls_name}: {members}")
    if spec.own_attrs:
        out.append("- own: " + ", ".join(f"@{a}" for a in spec.own_attrs))
    return out


def emit_docs(reg: Registry) -> str:
    """Markdown reference with one ``##`` section per element, in schema order."""
    resolved = resolve(reg)
    parts = [f"# Element reference\n\nRegistry version: `{reg.version}`\n"]
    for name in sorted(resolved.elements):
        spec = reg.elements[name]
        rule = format_expr(resolved.elements[name].content)
        section = [f"## {name}", ""]
        gloss = f"*{spec.gloss}* " if spec.gloss else ""
        section.append(f"{gloss}({spec.namespace.name} namespace)")
        section.append("")
        section.append(spec.doc or "(undocumented)")
        section += ["", "Content model:", "", "```", f"{name} = {rule}", "```", "", "Attributes:", ""]
        section += _attributes(reg, spec)
        cats = reg.datacats_for(name)
        if cats:
            section += ["", "Data categories:", ""]
            for cat in cats:
                levels = ", ".join(lv.value for lv in Level if lv in cat.levels)
                line = f"- `{cat.name}` ({cat.datatype}; levels: {levels})"
                if cat.picklist:
                    line += " values: " + ", ".join(cat.picklist)
                if cat.remark:
                    line += f" [{cat.remark}]"
                section.append(line)
        if spec.examples:
            section += ["", "Examples:"]
            for example in spec.examples:
                section += ["", "```xml", example, "```"]
        parts.append("\n".join(section) + "\n")
    return "\n".join(parts)


__all__ = [
    "ClassKind", "ClassSpec", "DataCatSpec", "ElementSpec", "Registry", "RegistryError",
    "apply_overlay", "check", "compile_content_model", "emit_docs", "emit_schema",
    "load_default", "load_from_file", "resolve",
]
