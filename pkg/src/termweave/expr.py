"""Content-model expressions and their compact text syntax.

Syntax: ``,`` sequence, ``|`` choice, postfix ``*`` ``+`` ``?`` and ``{m,n}``,
``text``, ``empty``, parentheses. Names starting with ``model.`` are class
references; any other name refers to an element.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, Optional, Union

TEXT_SYMBOL = "#text"


@dataclass(frozen=True)
class Seq:
    items: tuple[Expr, ...]

    def __post_init__(self) -> None:
        if not self.items:
            raise ValueError("Seq must be non-empty")


@dataclass(frozen=True)
class Choice:
    items: tuple[Expr, ...]

    def __post_init__(self) -> None:
        if not self.items:
            raise ValueError("Choice must be non-empty")


@dataclass(frozen=True)
class Rep:
    child: Expr
    min: int = 0
    max: Optional[int] = None  # None means unbounded

    def __post_init__(self) -> None:
        if self.min < 0 or (self.max is not None and self.max < self.min):
            raise ValueError(f"bad repetition bounds {{{self.min},{self.max}}}")


@dataclass(frozen=True)
class ElemRef:
    name: str


@dataclass(frozen=True)
class ClassRef:
    name: str


@dataclass(frozen=True)
class TextTok:
    """Character data; like RELAX NG ``text`` it also matches nothing."""


@dataclass(frozen=True)
class Empty:
    pass


Expr = Union[Seq, Choice, Rep, ElemRef, ClassRef, TextTok, Empty]


def star(e: Expr) -> Rep:
    return Rep(e, 0, None)


def plus(e: Expr) -> Rep:
    return Rep(e, 1, None)


def opt(e: Expr) -> Rep:
    return Rep(e, 0, 1)


def walk(e: Expr) -> Iterator[Expr]:
    yield e
    if isinstance(e, (Seq, Choice)):
        for item in e.items:
            yield from walk(item)
    elif isinstance(e, Rep):
        yield from walk(e.child)


def class_refs(e: Expr) -> set[str]:
    return {x.name for x in walk(e) if isinstance(x, ClassRef)}


def elem_refs(e: Expr) -> set[str]:
    return {x.name for x in walk(e) if isinstance(x, ElemRef)}


def simplify(e: Expr) -> Expr:
    """Flatten nested Seq/Choice and unwrap single-item groups; preserves the language."""
    if isinstance(e, Rep):
        return Rep(simplify(e.child), e.min, e.max)
    if isinstance(e, (Seq, Choice)):
        kind = type(e)
        items: list[Expr] = []
        for item in map(simplify, e.items):
            if isinstance(item, kind):
                items.extend(item.items)
            else:
                items.append(item)
        if len(items) == 1:
            return items[0]
        return kind(tuple(items))
    return e


# --- printing ---------------------------------------------------------------


def _postfix(e: Rep) -> str:
    if (e.min, e.max) == (0, None):
        return "*"
    if (e.min, e.max) == (1, None):
        return "+"
    if (e.min, e.max) == (0, 1):
        return "?"
    return f"{{{e.min},{'' if e.max is None else e.max}}}"


def format_expr(e: Expr) -> str:
    if isinstance(e, (ElemRef, ClassRef)):
        return e.name
    if isinstance(e, TextTok):
        return "text"
    if isinstance(e, Empty):
        return "empty"
    if isinstance(e, Rep):
        inner = format_expr(e.child)
        if isinstance(e.child, (Seq, Choice, Rep)):
            inner = f"({inner})"
        return inner + _postfix(e)
    sep = ", " if isinstance(e, Seq) else "|"
    parts = []
    for item in e.items:
        text = format_expr(item)
        if isinstance(item, (Seq, Choice)):
            text = f"({text})"
        parts.append(text)
    return sep.join(parts)


# --- parsing ----------------------------------------------------------------


class ExprSyntaxError(ValueError):
    pass


_TOKEN = re.compile(r"\s*(?:(?P<name>[A-Za-z_][\w.:\-]*)|(?P<count>\{\s*\d+\s*,\s*\d*\s*\})|(?P<op>[,|*+?()]))")


def _tokenize(text: str) -> list[str]:
    tokens = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ExprSyntaxError(f"unexpected character {text[pos:].strip()[:1]!r} at column {pos + 1}")
        tokens.append(m.group(m.lastgroup).replace(" ", ""))
        pos = m.end()
    return tokens


def parse_expr(text: str) -> Expr:
    tokens = _tokenize(text)
    pos = 0

    def peek() -> Optional[str]:
        return tokens[pos] if pos < len(tokens) else None

    def take() -> str:
        nonlocal pos
        if pos >= len(tokens):
            raise ExprSyntaxError("unexpected end of expression")
        pos += 1
        return tokens[pos - 1]

    def choice() -> Expr:
        items = [seq()]
        while peek() == "|":
            take()
            items.append(seq())
        return items[0] if len(items) == 1 else Choice(tuple(items))

    def seq() -> Expr:
        items = [postfix()]
        while peek() == ",":
            take()
            items.append(postfix())
        return items[0] if len(items) == 1 else Seq(tuple(items))

    def postfix() -> Expr:
        e = primary()
        while peek() is not None and (peek() in ("*", "+", "?") or peek().startswith("{")):
            op = take()
            if op == "*":
                e = star(e)
            elif op == "+":
                e = plus(e)
            elif op == "?":
                e = opt(e)
            else:
                lo, hi = op[1:-1].split(",")
                try:
                    e = Rep(e, int(lo), int(hi) if hi else None)
                except ValueError as exc:
                    raise ExprSyntaxError(str(exc)) from None
        return e

    def primary() -> Expr:
        tok = take()
        if tok == "(":
            e = choice()
            if take() != ")":
                raise ExprSyntaxError("expected ')'")
            return e
        if tok in (",", "|", "*", "+", "?", ")") or tok.startswith("{"):
            raise ExprSyntaxError(f"unexpected {tok!r}")
        if tok == "text":
            return TextTok()
        if tok == "empty":
            return Empty()
        if tok.startswith("model."):
            return ClassRef(tok)
        return ElemRef(tok)

    if not tokens:
        raise ExprSyntaxError("empty expression")
    result = choice()
    if pos != len(tokens):
        raise ExprSyntaxError(f"unexpected {tokens[pos]!r}")
    return result
