"""Fragment lattice: contiguous token spans of one instance and their inclusion order.

All n(n+1)/2 fragments of an n-token description form a triangle: row k holds
the n-k+1 fragments of length k. Inclusion (strict span containment) is the
partial order the alignment step walks.
"""
from __future__ import annotations

from dataclasses import dataclass

from .errors import DataError
from .corpus import Instance


@dataclass(frozen=True, order=True)
class Fragment:
    instance_id: str
    start: int
    end: int

    def __post_init__(self):
        if not (0 <= self.start < self.end):
            raise DataError(f"bad fragment span [{self.start}, {self.end})")

    @property
    def length(self) -> int:
        return self.end - self.start


class FragmentTriangle:
    def __init__(self, instance_id: str, n_tokens: int):
        if n_tokens < 1:
            raise DataError("instance must have at least one token")
        self.instance_id = instance_id
        self.n = n_tokens
        self._rows = [
            [Fragment(instance_id, s, s + k) for s in range(n_tokens - k + 1)]
            for k in range(1, n_tokens + 1)
        ]

    def row(self, length: int) -> list[Fragment]:
        return self._rows[length - 1]

    def fragments(self):
        for row in self._rows:
            yield from row

    def __len__(self):
        return self.n * (self.n + 1) // 2

    def __contains__(self, frag: Fragment):
        return (
            frag.instance_id == self.instance_id
            and 0 <= frag.start < frag.end <= self.n
        )


def enumerate_fragments(instance: Instance) -> FragmentTriangle:
    return FragmentTriangle(instance.id, len(instance.tokens))


def includes(b: Fragment, a: Fragment) -> bool:
    """True iff b strictly contains a (same instance)."""
    if b.instance_id != a.instance_id:
        raise DataError("cannot compare fragments of different instances")
    return b.start <= a.start and a.end <= b.end and (a.start, a.end) != (b.start, b.end)


def comparable(a: Fragment, b: Fragment) -> bool:
    return includes(a, b) or includes(b, a)


def neighbours(w: Fragment, triangle: FragmentTriangle, mode: str = "comparable") -> set[Fragment]:
    """All fragments inclusion-comparable to w.

    mode="comparable" (default) returns every fragment that contains w or is
    contained in it; mode="adjacent" restricts to the immediate lattice
    neighbours (length difference of one).
    """
    if w not in triangle:
        raise DataError(f"fragment {w} not in triangle of {triangle.instance_id}")
    if mode not in ("comparable", "adjacent"):
        raise DataError(f"unknown neighbourhood mode: {mode!r}")
    out = set()
    for frag in triangle.fragments():
        if frag == w:
            continue
        if mode == "adjacent" and abs(frag.length - w.length) != 1:
            continue
        if comparable(frag, w):
            out.add(frag)
    return out


def surface(w: Fragment, instance: Instance) -> str:
    if w.instance_id != instance.id:
        raise DataError(f"fragment belongs to {w.instance_id!r}, not {instance.id!r}")
    if w.end > len(instance.tokens):
        raise DataError(f"fragment [{w.start}, {w.end}) out of range for {instance.id!r}")
    return " ".join(instance.tokens[w.start:w.end])
