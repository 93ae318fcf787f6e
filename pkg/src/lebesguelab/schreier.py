"""Schreier families S_n and S_n-admissibility.

S_0 holds the singletons, S_1 = {F : |F| <= min F}, and S_{n+1} collects
unions F_1 < ... < F_d of sets from S_n with d <= min F_1.  The empty set
is treated as a member of every S_n.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Iterable, Sequence

from .core import FinVec, is_block_sequence


class NotABlockSequence(ValueError):
    """Admissibility was asked of vectors that are not successive blocks."""


def _normalize(F: Iterable[int]) -> tuple[int, ...]:
    F = tuple(sorted(set(F)))
    if F and F[0] < 1:
        raise ValueError("Schreier sets live in the positive integers")
    return F


@lru_cache(maxsize=1 << 16)
def _member(F: tuple[int, ...], n: int) -> bool:
    if len(F) <= 1:
        return True
    if n == 0:
        return False
    k = len(F)
    # table[a][b]: is F[a..b] in S_m, built up from m = 1
    table = [[b - a + 1 <= F[a] for b in range(k)] for a in range(k)]
    for _ in range(2, n + 1):
        if table[0][k - 1]:
            return True
        nxt = [[_peel(table, F, a, b) for b in range(k)] for a in range(k)]
        if nxt == table:
            break  # every higher order gives the same table
        table = nxt
    return table[0][k - 1]


def _peel(table, F, a: int, b: int) -> bool:
    # Cut F[a..b] greedily into longest S_m prefixes.  Prefixes of members
    # are members (hereditary), so admissible prefix lengths form an initial
    # segment and the greedy cut minimises the number of pieces.
    pieces = 0
    start = a
    while start <= b:
        pieces += 1
        if pieces > F[a]:
            return False
        end = start
        while end < b and table[start][end + 1]:
            end += 1
        start = end + 1
    return True


def schreier_member(F: Iterable[int], n: int) -> bool:
    """Is the finite set F in S_n?"""
    if n < 0:
        raise ValueError("Schreier order must be non-negative")
    return _member(_normalize(F), n)


def schreier_member_exhaustive(F: Iterable[int], n: int) -> bool:
    """Membership by trying every split into consecutive pieces.

    Slow; kept as an independent check on :func:`schreier_member`.
    """
    F = _normalize(F)

    @lru_cache(maxsize=None)
    def member(lo: int, hi: int, order: int) -> bool:
        size = hi - lo
        if size <= 1:
            return True
        if order == 0:
            return False
        if order == 1:
            return size <= F[lo]
        return splits(lo, hi, order - 1, F[lo])

    @lru_cache(maxsize=None)
    def splits(lo: int, hi: int, order: int, pieces_left: int) -> bool:
        # can F[lo:hi] be cut into at most pieces_left consecutive S_order sets?
        if lo == hi:
            return True
        if pieces_left == 0:
            return False
        return any(
            member(lo, cut, order) and splits(cut, hi, order, pieces_left - 1)
            for cut in range(lo + 1, hi + 1)
        )

    return member(0, len(F), n)


def schreier_decomposition(F: Iterable[int], n: int) -> list[tuple[int, ...]] | None:
    """Greedy split of F into S_{n-1} pieces, or None if F is not in S_n."""
    F = _normalize(F)
    if n < 1 or not schreier_member(F, n):
        return None
    out = []
    start = 0
    while start < len(F):
        end = start + 1
        while end < len(F) and schreier_member(F[start:end + 1], n - 1):
            end += 1
        out.append(F[start:end])
        start = end
    return out


def is_admissible(vectors: Sequence[FinVec], n: int) -> bool:
    """Are the successive blocks ``vectors`` S_n-admissible?"""
    if not is_block_sequence(vectors):
        raise NotABlockSequence("vectors must be nonzero with increasing supports")
    return schreier_member([v.min_support for v in vectors], n)
