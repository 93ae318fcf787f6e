"""Dyadic rationals, their breadth-first enumeration, and exact finitely
supported vectors over the index set {1, 2, 3, ...}.

Everything here is an immutable value with exact ``Fraction`` arithmetic.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Union

Rational = Union[int, Fraction]


def as_fraction(value) -> Fraction:
    """Coerce ints, Fractions and rational strings ("-2/3") to Fraction.

    Floats are refused: every coefficient in this package is exact.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not coefficients")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"expected an exact rational, got {type(value).__name__}")


# ---------------------------------------------------------------------------
# dyadic rationals


@dataclass(frozen=True, order=False)
class DyadicRational:
    """The number ``numerator / 2**level`` in [0, 1), stored reduced.

    Reduced means the numerator is odd, or the value is 0 with level 0.
    Use :meth:`of` to build from an unreduced pair.
    """

    numerator: int
    level: int

    def __post_init__(self):
        if self.level < 0 or self.numerator < 0:
            raise ValueError("numerator and level must be non-negative")
        if self.numerator == 0:
            if self.level != 0:
                raise ValueError("zero must be stored at level 0")
        elif self.numerator % 2 == 0 or self.level == 0:
            raise ValueError(f"{self.numerator}/2^{self.level} is not reduced")
        if self.numerator >= 1 << self.level and self.numerator != 0:
            raise ValueError("dyadic rational must lie in [0, 1)")

    @classmethod
    def of(cls, numerator: int, level: int) -> "DyadicRational":
        if numerator < 0 or level < 0:
            raise ValueError("numerator and level must be non-negative")
        if numerator == 0:
            return cls(0, 0)
        while numerator % 2 == 0 and level > 0:
            numerator //= 2
            level -= 1
        return cls(numerator, level)

    @classmethod
    def from_fraction(cls, q: Fraction) -> "DyadicRational":
        q = as_fraction(q)
        den = q.denominator
        if den & (den - 1):
            raise ValueError(f"{q} is not dyadic")
        return cls.of(q.numerator, den.bit_length() - 1)

    @classmethod
    def parse(cls, text: str) -> "DyadicRational":
        """Parse ``"j/2^n"`` (any j) or a plain fraction such as ``"3/4"``."""
        text = text.strip()
        m = re.fullmatch(r"(\d+)\s*/\s*2\s*\^\s*(\d+)", text)
        if m:
            return cls.of(int(m.group(1)), int(m.group(2)))
        return cls.from_fraction(Fraction(text))

    @property
    def value(self) -> Fraction:
        return Fraction(self.numerator, 1 << self.level)

    def cell(self, m: int) -> int:
        """Index c of the half-open cell [c/2^m, (c+1)/2^m) containing self."""
        return (self.numerator << m) >> self.level if m <= self.level else self.numerator << (m - self.level)

    def __lt__(self, other: "DyadicRational") -> bool:
        return self.value < other.value

    def __str__(self) -> str:
        return str(self.value)


def dyadic_enumerate(k: int) -> DyadicRational:
    """k-th dyadic rational of (0, 1): 1/2, 1/4, 3/4, 1/8, 3/8, ...

    Breadth-first over levels, increasing within a level.
    """
    if k < 1:
        raise ValueError("enumeration starts at k = 1")
    level = k.bit_length()
    position = k - (1 << (level - 1))
    return DyadicRational(2 * position + 1, level)


def dyadic_index(d: DyadicRational) -> int:
    """Inverse of :func:`dyadic_enumerate`."""
    if d.numerator == 0:
        raise ValueError("0 is not enumerated; the enumeration covers (0, 1)")
    return (1 << (d.level - 1)) + (d.numerator - 1) // 2


def dyadics_in_open_cell(m: int, cell: int, max_level: int) -> Iterator[DyadicRational]:
    """Dyadics of reduced level in (m, max_level] strictly inside
    (cell/2^m, (cell+1)/2^m), in enumeration order."""
    for level in range(m + 1, max_level + 1):
        shift = level - m
        lo = cell << shift
        for num in range(lo + 1, lo + (1 << shift), 2):
            yield DyadicRational(num, level)


# ---------------------------------------------------------------------------
# exact root enclosures


def iroot(n: int, k: int) -> int:
    """Largest integer r with r**k <= n."""
    if n < 0 or k < 1:
        raise ValueError("iroot needs n >= 0 and k >= 1")
    if n < 2 or k == 1:
        return n
    r = 1 << ((n.bit_length() + k - 1) // k)
    while True:
        s = ((k - 1) * r + n // r ** (k - 1)) // k
        if s >= r:
            break
        r = s
    while r ** k > n:
        r -= 1
    while (r + 1) ** k <= n:
        r += 1
    return r


def root_enclosure(q: Fraction, k: int, bits: int) -> tuple[Fraction, Fraction]:
    """Rationals lo <= q**(1/k) <= hi with hi - lo <= 2**-bits."""
    q = as_fraction(q)
    if q < 0:
        raise ValueError("root of a negative number")
    scaled = (q.numerator << (k * bits)) // q.denominator
    r = iroot(scaled, k)
    lo = Fraction(r, 1 << bits)
    if lo ** k == q:
        return lo, lo
    return lo, Fraction(r + 1, 1 << bits)


# ---------------------------------------------------------------------------
# finitely supported vectors


class FinVec:
    """Finitely supported vector with exact rational coefficients.

    Indices are positive integers; zero coefficients are never stored.
    Instances are immutable and hashable.
    """

    __slots__ = ("_items", "_hash")

    def __init__(self, entries: Mapping[int, Rational] | Iterable[tuple[int, Rational]] = ()):
        if isinstance(entries, Mapping):
            entries = entries.items()
        acc: dict[int, Fraction] = {}
        for i, c in entries:
            if not isinstance(i, int) or isinstance(i, bool) or i < 1:
                raise ValueError(f"index must be a positive integer, got {i!r}")
            acc[i] = acc.get(i, Fraction(0)) + as_fraction(c)
        self._items = tuple(sorted((i, c) for i, c in acc.items() if c != 0))
        self._hash = None

    @classmethod
    def _raw(cls, items) -> "FinVec":
        v = cls.__new__(cls)
        v._items = tuple(items)
        v._hash = None
        return v

    @classmethod
    def unit(cls, i: int) -> "FinVec":
        return cls({i: 1})

    @classmethod
    def ones(cls, indices: Iterable[int]) -> "FinVec":
        return cls({i: 1 for i in indices})

    @classmethod
    def parse(cls, text: str) -> "FinVec":
        """Parse whitespace-separated ``index:coefficient`` pairs."""
        entries = []
        for token in text.split():
            idx, sep, coef = token.partition(":")
            if not sep:
                raise ValueError(f"malformed entry {token!r}; expected index:coefficient")
            entries.append((int(idx), Fraction(coef)))
        return cls(entries)

    def __str__(self) -> str:
        return " ".join(f"{i}:{c}" for i, c in self._items)

    def __repr__(self) -> str:
        return f"FinVec({str(self)!r})"

    # mapping-ish access
    def items(self) -> tuple[tuple[int, Fraction], ...]:
        return self._items

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(i for i, _ in self._items)

    def coefficients(self) -> tuple[Fraction, ...]:
        return tuple(c for _, c in self._items)

    def __getitem__(self, i: int) -> Fraction:
        for j, c in self._items:
            if j == i:
                return c
        return Fraction(0)

    def __len__(self) -> int:
        return len(self._items)

    def __bool__(self) -> bool:
        return bool(self._items)

    def __iter__(self):
        return iter(self._items)

    def __eq__(self, other) -> bool:
        return isinstance(other, FinVec) and self._items == other._items

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self._items)
        return self._hash

    @property
    def min_support(self) -> int:
        if not self._items:
            raise ValueError("zero vector has empty support")
        return self._items[0][0]

    @property
    def max_support(self) -> int:
        if not self._items:
            raise ValueError("zero vector has empty support")
        return self._items[-1][0]

    # arithmetic
    def __add__(self, other: "FinVec") -> "FinVec":
        if not isinstance(other, FinVec):
            return NotImplemented
        acc = dict(self._items)
        for i, c in other._items:
            acc[i] = acc.get(i, Fraction(0)) + c
        return FinVec(acc)

    def __neg__(self) -> "FinVec":
        return FinVec._raw((i, -c) for i, c in self._items)

    def __sub__(self, other: "FinVec") -> "FinVec":
        if not isinstance(other, FinVec):
            return NotImplemented
        return self + (-other)

    def __mul__(self, scalar: Rational) -> "FinVec":
        s = as_fraction(scalar)
        if s == 0:
            return FinVec()
        return FinVec._raw((i, c * s) for i, c in self._items)

    __rmul__ = __mul__

    def __truediv__(self, scalar: Rational) -> "FinVec":
        return self * (1 / as_fraction(scalar))

    def abs(self) -> "FinVec":
        return FinVec._raw((i, abs(c)) for i, c in self._items)

    def restrict(self, lo: int | None = None, hi: int | None = None) -> "FinVec":
        """Coordinates with index in [lo, hi] (either end may be open)."""
        return FinVec._raw(
            (i, c) for i, c in self._items
            if (lo is None or i >= lo) and (hi is None or i <= hi)
        )

    def shift(self, k: int) -> "FinVec":
        return FinVec((i + k, c) for i, c in self._items)

    def l1(self) -> Fraction:
        return sum((abs(c) for _, c in self._items), Fraction(0))

    def linf(self) -> Fraction:
        return max((abs(c) for _, c in self._items), default=Fraction(0))

    def dot(self, other: "FinVec") -> Fraction:
        theirs = dict(other._items)
        return sum((c * theirs[i] for i, c in self._items if i in theirs), Fraction(0))


def vsum(vectors: Iterable[FinVec]) -> FinVec:
    acc: dict[int, Fraction] = {}
    for v in vectors:
        for i, c in v.items():
            acc[i] = acc.get(i, Fraction(0)) + c
    return FinVec(acc)


def is_block_sequence(vectors: Iterable[FinVec]) -> bool:
    """True iff all vectors are nonzero with max supp(v_k) < min supp(v_{k+1})."""
    prev_max = 0
    for v in vectors:
        if not v:
            return False
        if v.min_support <= prev_max:
            return False
        prev_max = v.max_support
    return True


class BlockSequence(tuple):
    """A tuple of nonzero FinVecs with strictly increasing supports."""

    def __new__(cls, vectors: Iterable[FinVec] = ()):
        vectors = tuple(vectors)
        if not is_block_sequence(vectors):
            raise ValueError("vectors do not form a block sequence")
        return super().__new__(cls, vectors)

    @property
    def min_supports(self) -> tuple[int, ...]:
        return tuple(v.min_support for v in self)

    def total(self) -> FinVec:
        return vsum(self)
