"""Independent reference implementations used to check the production paths."""

from __future__ import annotations

import random
from functools import lru_cache
from typing import Iterable, Optional

from termweave.expr import (
    TEXT_SYMBOL, Choice, ElemRef, Empty, Expr, Rep, Seq, TextTok,
)


class _Null:
    """The empty language."""

    def __eq__(self, other):
        return isinstance(other, _Null)

    def __hash__(self):
        return 0


NULL = _Null()


@lru_cache(maxsize=None)
def nullable(e) -> bool:
    if e == NULL:
        return False
    if isinstance(e, (Empty, TextTok)):
        return True
    if isinstance(e, ElemRef):
        return False
    if isinstance(e, Seq):
        return all(nullable(i) for i in e.items)
    if isinstance(e, Choice):
        return any(nullable(i) for i in e.items)
    if isinstance(e, Rep):
        return e.min == 0 or nullable(e.child)
    raise TypeError(e)


def _seq(a, b):
    if a == NULL or b == NULL:
        return NULL
    if isinstance(a, Empty):
        return b
    if isinstance(b, Empty):
        return a
    return Seq((a, b))


def _alt(a, b):
    if a == NULL:
        return b
    if b == NULL:
        return a
    if a == b:
        return a
    return Choice((a, b))


@lru_cache(maxsize=None)
def derivative(e, symbol: str):
    """Brzozowski derivative of *e* with respect to one symbol."""
    if e == NULL or isinstance(e, Empty):
        return NULL
    if isinstance(e, ElemRef):
        return Empty() if e.name == symbol else NULL
    if isinstance(e, TextTok):
        return Empty() if symbol == TEXT_SYMBOL else NULL
    if isinstance(e, Choice):
        result = NULL
        for item in e.items:
            result = _alt(result, derivative(item, symbol))
        return result
    if isinstance(e, Seq):
        head, rest = e.items[0], e.items[1:]
        tail = Seq(rest) if len(rest) > 1 else (rest[0] if rest else Empty())
        d = _seq(derivative(head, symbol), tail)
        if nullable(head):
            d = _alt(d, derivative(tail, symbol))
        return d
    if isinstance(e, Rep):
        if e.max == 0:
            return NULL
        rest = Rep(e.child, max(e.min - 1, 0), None if e.max is None else e.max - 1)
        return _seq(derivative(e.child, symbol), rest)
    raise TypeError(e)


def oracle_accepts(e: Expr, sequence: Iterable[str]) -> bool:
    for symbol in sequence:
        e = derivative(e, symbol)
        if e == NULL:
            return False
    return nullable(e)


# --- random expressions ---------------------------------------------------------


def random_expr(rng: random.Random, alphabet: list[str], depth: int) -> Expr:
    if depth <= 1 or rng.random() < 0.25:
        roll = rng.random()
        if roll < 0.08:
            return Empty()
        if roll < 0.18:
            return TextTok()
        return ElemRef(rng.choice(alphabet))
    kind = rng.choice(["seq", "choice", "rep"])
    if kind == "rep":
        lo = rng.choice([0, 0, 1, 1, 2])
        hi: Optional[int] = rng.choice([None, None, lo, lo + 1, lo + 2])
        return Rep(random_expr(rng, alphabet, depth - 1), lo, hi)
    n = rng.randint(1, 3)
    items = tuple(random_expr(rng, alphabet, depth - 1) for _ in range(n))
    return Seq(items) if kind == "seq" else Choice(items)


def random_string(rng: random.Random, alphabet: list[str], max_len: int) -> list[str]:
    symbols = alphabet + [TEXT_SYMBOL]
    return [rng.choice(symbols) for _ in range(rng.randint(0, max_len))]


# --- id census --------------------------------------------------------------


def brute_force_id_paths(doc, ident: str) -> list[str]:
    """Every path whose node carries xml:id *ident*, by exhaustive recursion."""
    from termweave.model import Text

    found: list[str] = []

    def visit(node, path: str) -> None:
        if node.attrs.id == ident:
            found.append(path)
        counts: dict[str, int] = {}
        kids = getattr(node, "children", None)
        if kids is None:
            content = getattr(node, "content", ())
            kids = content if isinstance(content, tuple) else ()
        for child in kids:
            if isinstance(child, Text):
                continue
            counts[child.tag] = counts.get(child.tag, 0) + 1
            visit(child, f"{path}/{child.tag}[{counts[child.tag]}]")

    for i, entry in enumerate(doc.entries):
        visit(entry, f"/termEntry[{i + 1}]")
    return found
