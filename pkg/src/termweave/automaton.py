"""Position (Glushkov) automata for resolved content models.

Each element or text occurrence in the expression becomes a position; the
automaton's states are sets of positions, determinized lazily as child
sequences are fed through it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

from .expr import TEXT_SYMBOL, Choice, ClassRef, ElemRef, Empty, Expr, Rep, Seq, TextTok


class UnresolvedClassError(ValueError):
    pass


@dataclass
class _Info:
    nullable: bool
    first: frozenset[int]
    last: frozenset[int]


class _Builder:
    def __init__(self) -> None:
        self.symbols: list[str] = []
        self.follow: list[set[int]] = []

    def position(self, symbol: str) -> _Info:
        p = len(self.symbols)
        self.symbols.append(symbol)
        self.follow.append(set())
        return _Info(False, frozenset({p}), frozenset({p}))

    def link(self, sources: Iterable[int], targets: frozenset[int]) -> None:
        for p in sources:
            self.follow[p] |= targets

    def build(self, e: Expr) -> _Info:
        if isinstance(e, ElemRef):
            return self.position(e.name)
        if isinstance(e, TextTok):
            info = self.position(TEXT_SYMBOL)
            return _Info(True, info.first, info.last)
        if isinstance(e, Empty):
            return _Info(True, frozenset(), frozenset())
        if isinstance(e, ClassRef):
            raise UnresolvedClassError(f"unresolved class reference {e.name!r}")
        if isinstance(e, Seq):
            acc = self.build(e.items[0])
            for item in e.items[1:]:
                nxt = self.build(item)
                self.link(acc.last, nxt.first)
                acc = _Info(
                    acc.nullable and nxt.nullable,
                    acc.first | nxt.first if acc.nullable else acc.first,
                    nxt.last | acc.last if nxt.nullable else nxt.last,
                )
            return acc
        if isinstance(e, Choice):
            infos = [self.build(item) for item in e.items]
            return _Info(
                any(i.nullable for i in infos),
                frozenset().union(*(i.first for i in infos)),
                frozenset().union(*(i.last for i in infos)),
            )
        if isinstance(e, Rep):
            return self._rep(e)
        raise TypeError(f"not a content expression: {e!r}")

    def _rep(self, e: Rep) -> _Info:
        # Counted repetition is unrolled: min mandatory copies, then either a
        # starred copy or (max - min) nested optional copies.
        parts: list[_Info] = [self.build(e.child) for _ in range(e.min)]
        if e.max is None:
            body = self.build(e.child)
            self.link(body.last, body.first)
            parts.append(_Info(True, body.first, body.last))
        else:
            optional = [self.build(e.child) for _ in range(e.max - e.min)]
            # x{0,k} = (x (x (x)?)?)?
            for i in range(len(optional) - 1, -1, -1):
                cur = optional[i]
                if i + 1 < len(optional):
                    tail = optional[i + 1]
                    self.link(cur.last, tail.first)
                    cur = _Info(cur.nullable, cur.first | tail.first if cur.nullable else cur.first, cur.last | tail.last)
                optional[i] = _Info(True, cur.first, cur.last)
            if optional:
                parts.append(optional[0])
        if not parts:
            return _Info(True, frozenset(), frozenset())
        acc = parts[0]
        for nxt in parts[1:]:
            self.link(acc.last, nxt.first)
            acc = _Info(
                acc.nullable and nxt.nullable,
                acc.first | nxt.first if acc.nullable else acc.first,
                nxt.last | acc.last if nxt.nullable else nxt.last,
            )
        return acc


@dataclass
class Matcher:
    """Deterministic acceptor over child-name sequences (``#text`` for text runs)."""

    symbols: tuple[str, ...]
    first: frozenset[int]
    last: frozenset[int]
    follow: tuple[frozenset[int], ...]
    nullable: bool
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def alphabet(self) -> frozenset[str]:
        return frozenset(self.symbols)

    def step(self, state: Optional[frozenset[int]], symbol: str) -> frozenset[int]:
        """Successor of *state* (``None`` is the start state) on *symbol*."""
        key = (state, symbol)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        if state is None:
            candidates = self.first
        else:
            candidates = frozenset().union(*(self.follow[p] for p in state)) if state else frozenset()
        nxt = frozenset(p for p in candidates if self.symbols[p] == symbol)
        self._cache[key] = nxt
        return nxt

    def is_final(self, state: Optional[frozenset[int]]) -> bool:
        if state is None:
            return self.nullable
        return bool(state & self.last)

    def first_mismatch(self, sequence: Iterable[str]) -> Optional[int]:
        """Index of the first rejected item, ``len(sequence)`` if the input ends too early, else None."""
        items = list(sequence)
        state: Optional[frozenset[int]] = None
        for n, symbol in enumerate(items):
            state = self.step(state, symbol)
            if not state:
                return n
        return None if self.is_final(state) else len(items)

    def accepts(self, sequence: Iterable[str]) -> bool:
        return self.first_mismatch(list(sequence)) is None


def compile_content_model(expr: Expr) -> Matcher:
    builder = _Builder()
    info = builder.build(expr)
    return Matcher(
        symbols=tuple(builder.symbols),
        first=info.first,
        last=info.last,
        follow=tuple(frozenset(f) for f in builder.follow),
        nullable=info.nullable,
    )
