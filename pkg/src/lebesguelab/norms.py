"""Norm oracles: c0, l_p, l_1, the Schreier space, Tsirelson's space and
the l_1-sum of scaled copies of l_1.

Every oracle returns a :class:`NormValue`, a rational enclosure
``lower <= ||x|| <= upper`` flagged ``exact`` when the two coincide.
"""

from __future__ import annotations

from bisect import insort
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable

from .core import FinVec, Rational, as_fraction, root_enclosure


class NormBudgetError(RuntimeError):
    """A norm could not be computed within the configured budget.

    ``best`` carries the tightest enclosure that was reached, if any.
    """

    def __init__(self, message: str, best: "NormValue | None" = None):
        super().__init__(message)
        self.best = best


@dataclass(frozen=True)
class NormValue:
    lower: Fraction
    upper: Fraction
    exact: bool

    def __post_init__(self):
        if self.lower > self.upper:
            raise ValueError("enclosure with lower > upper")
        if self.exact and self.lower != self.upper:
            raise ValueError("exact value must have lower == upper")

    @classmethod
    def of(cls, value: Rational) -> "NormValue":
        v = as_fraction(value)
        return cls(v, v, True)

    @classmethod
    def between(cls, lower: Rational, upper: Rational) -> "NormValue":
        lo, hi = as_fraction(lower), as_fraction(upper)
        return cls(lo, hi, lo == hi)

    @property
    def value(self) -> Fraction:
        if not self.exact:
            raise ValueError(f"value is only enclosed in [{self.lower}, {self.upper}]")
        return self.lower

    @property
    def width(self) -> Fraction:
        return self.upper - self.lower

    def scaled(self, factor: Rational) -> "NormValue":
        f = as_fraction(factor)
        if f < 0:
            raise ValueError("norms scale by non-negative factors")
        return NormValue(self.lower * f, self.upper * f, self.exact)

    def to_json(self) -> dict:
        return {"lower": str(self.lower), "upper": str(self.upper), "exact": self.exact}

    @classmethod
    def from_json(cls, data: dict) -> "NormValue":
        return cls(Fraction(data["lower"]), Fraction(data["upper"]), bool(data["exact"]))

    def __str__(self) -> str:
        if self.exact:
            return str(self.lower)
        return f"[{self.lower}, {self.upper}]"


class NormOracle:
    """Base class.  Subclasses implement :meth:`eval`.

    ``spreading_invariant``: the value depends only on the coefficient
    sequence, not on which increasing indices carry it.
    ``unconditional``: flipping coefficient signs leaves the value unchanged.
    """

    identifier = "abstract"
    spreading_invariant = False
    unconditional = True

    def eval(self, x: FinVec) -> NormValue:
        raise NotImplementedError

    def lower_bound(self, x: FinVec) -> Fraction:
        """A certified lower bound, cheaper than :meth:`eval` where possible."""
        return self.eval(x).lower

    def enclose(self, x: FinVec) -> NormValue:
        """Like :meth:`eval`, but returns a looser enclosure instead of
        raising when the exact computation is over budget."""
        return self.eval(x)

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.identifier}>"


class C0Norm(NormOracle):
    identifier = "c0"
    spreading_invariant = True

    def eval(self, x):
        return NormValue.of(x.linf())


class L1Norm(NormOracle):
    identifier = "l1"
    spreading_invariant = True

    def eval(self, x):
        return NormValue.of(x.l1())


class LpNorm(NormOracle):
    """l_p for rational p > 1, enclosed by outward-rounded rational roots."""

    spreading_invariant = True

    def __init__(self, p: Rational, width: Rational = Fraction(1, 10 ** 12), max_bits: int = 4096):
        p = as_fraction(p)
        if p <= 1:
            raise ValueError("lp oracle needs p > 1; use l1 for p = 1")
        self.p = p
        self.width = as_fraction(width)
        self.max_bits = max_bits
        self.identifier = f"lp:{p}"

    def _enclose(self, x: FinVec, bits: int) -> NormValue:
        u, v = self.p.numerator, self.p.denominator
        lo_sum = hi_sum = Fraction(0)
        for _, c in x.items():
            a = abs(c) ** u
            lo, hi = (a, a) if v == 1 else root_enclosure(a, v, bits)
            lo_sum += lo
            hi_sum += hi
        lo, _ = root_enclosure(lo_sum ** v, u, bits)
        _, hi = root_enclosure(hi_sum ** v, u, bits)
        return NormValue(lo, hi, lo == hi)

    def eval(self, x):
        if not x:
            return NormValue.of(0)
        bits = 48
        best = None
        while bits <= self.max_bits:
            best = self._enclose(x, bits)
            if best.width <= self.width:
                return best
            bits *= 2
        raise NormBudgetError(f"{self.identifier}: width {self.width} not reached", best)


class SchreierNorm(NormOracle):
    """sup over F in S_1 of sum_{i in F} |x_i|."""

    identifier = "schreier"

    def eval(self, x):
        return NormValue.of(schreier_norm_value(x))


def schreier_norm_value(x: FinVec) -> Fraction:
    """Exact Schreier norm.

    For each candidate minimum m of F, the best F is m together with the
    m - 1 largest later coordinates.
    """
    items = x.items()
    best = Fraction(0)
    suffix: list[Fraction] = []  # sorted magnitudes right of the cursor
    suffix_total = Fraction(0)
    for idx, c in reversed(items):
        take = idx - 1
        if take >= len(suffix):
            extra = suffix_total
        else:
            extra = sum(suffix[len(suffix) - take:], Fraction(0))
        best = max(best, abs(c) + extra)
        insort(suffix, abs(c))
        suffix_total += abs(c)
    return best


class TsirelsonNorm(NormOracle):
    """Figiel-Johnson Tsirelson norm, the solution of

        ||x|| = max(||x||_inf, 1/2 sup sum_j ||E_j x||)

    over successive intervals d <= E_1 < ... < E_d, by dynamic programming
    over intervals of the support.
    """

    identifier = "tsirelson"

    def __init__(self, support_cap: int = 64):
        self.support_cap = support_cap
        self._cache: dict[FinVec, Fraction] = {}

    def eval(self, x):
        if len(x) > self.support_cap:
            raise NormBudgetError(
                f"tsirelson: support size {len(x)} exceeds cap {self.support_cap}",
                self.enclose(x),
            )
        key = x.abs()
        hit = self._cache.get(key)
        if hit is None:
            hit = tsirelson_dp(key)
            self._cache[key] = hit
        return NormValue.of(hit)

    def lower_bound(self, x):
        if len(x) <= self.support_cap:
            return self.eval(x).lower
        return max(x.linf(), schreier_norm_value(x) / 2)

    def enclose(self, x):
        if len(x) <= self.support_cap:
            return self.eval(x)
        return NormValue.between(self.lower_bound(x), x.l1())


def tsirelson_dp(x: FinVec) -> Fraction:
    """Exact Tsirelson norm of x.

    A single piece contributes at most half of the value being computed, so
    only splits into two or more pieces are searched; by 1-unconditionality
    the pieces may be taken to tile a final segment of the support.
    """
    idx = x.support
    mag = [abs(c) for c in x.coefficients()]
    k = len(idx)
    if k == 0:
        return Fraction(0)
    prefix = [Fraction(0)]
    for m in mag:
        prefix.append(prefix[-1] + m)
    half = Fraction(1, 2)

    @lru_cache(maxsize=None)
    def norm(i: int, j: int) -> Fraction:
        best = max(mag[i:j + 1])
        for a in range(i, j):
            if half * (prefix[j + 1] - prefix[a]) <= best:
                break  # remaining starts carry even less mass
            d = min(idx[a], j - a + 1)
            if d >= 2:
                best = max(best, half * multi(a, j, d))
        return best

    @lru_cache(maxsize=None)
    def upto(a: int, j: int, d: int) -> Fraction:
        # best sum over splits of positions a..j into at most d pieces
        whole = norm(a, j)
        if d == 1 or a == j:
            return whole
        return max(whole, multi(a, j, min(d, j - a + 1)))

    @lru_cache(maxsize=None)
    def multi(a: int, j: int, d: int) -> Fraction:
        # at least two pieces, at most d
        return max(norm(a, b) + upto(b + 1, j, d - 1) for b in range(a, j))

    return norm(0, k - 1)


def tsirelson_bruteforce(x: FinVec) -> Fraction:
    """Exhaustive evaluation of the Tsirelson implicit equation.

    Enumerates every family of disjoint runs of support points (gaps
    allowed, at most min E_1 runs) and recurses on each run.  Exponential;
    kept for cross-checking :func:`tsirelson_dp`.
    """

    @lru_cache(maxsize=None)
    def value(items: tuple[tuple[int, Fraction], ...]) -> Fraction:
        best = max(abs(c) for _, c in items)
        n = len(items)
        for family in _run_families(items):
            if len(family) == 1 and family[0] == (0, n):
                continue
            total = sum(value(items[lo:hi]) for lo, hi in family)
            best = max(best, total / 2)
        return best

    if not x:
        return Fraction(0)
    return value(x.abs().items())


def _run_families(items):
    """Families of disjoint nonempty runs [lo, hi) of positions whose count
    is at most the index at the first run's start."""
    n = len(items)

    def rec(pos: int, acc: list[tuple[int, int]], cap: int):
        if acc:
            yield tuple(acc)
        if len(acc) == cap:
            return
        for lo in range(pos, n):
            new_cap = items[lo][0] if not acc else cap
            for hi in range(lo + 1, n + 1):
                acc.append((lo, hi))
                yield from rec(hi, acc, new_cap)
                acc.pop()

    yield from rec(0, [], n)


# ---------------------------------------------------------------------------
# l_1-sum of (l_1, n ||.||_1)


def pair_index(block: int, i: int) -> int:
    """Bijection (block, i) -> positive integer, along anti-diagonals."""
    if block < 1 or i < 1:
        raise ValueError("block and position start at 1")
    diag = block + i - 1
    return diag * (diag - 1) // 2 + block


def unpair_index(k: int) -> tuple[int, int]:
    if k < 1:
        raise ValueError("index starts at 1")
    diag = 1
    while diag * (diag + 1) // 2 < k:
        diag += 1
    block = k - diag * (diag - 1) // 2
    return block, diag - block + 1


class WeightedL1SumNorm(NormOracle):
    """(sum_n X_n)_{l_1} with X_n = (l_1, n ||.||_1).

    Coordinates are raw: the coordinate at ``pair_index(n, i)`` is scaled
    by n.  The normalized basis vector of block n is unit / n.
    """

    identifier = "weighted-l1-sum"

    def eval(self, x):
        return NormValue.of(sum((unpair_index(k)[0] * abs(c) for k, c in x.items()), Fraction(0)))

    @staticmethod
    def basis_vector(block: int, i: int) -> FinVec:
        return FinVec({pair_index(block, i): Fraction(1, block)})


# ---------------------------------------------------------------------------

_FACTORIES: dict[str, Callable[[str], NormOracle]] = {
    "c0": lambda arg: C0Norm(),
    "l1": lambda arg: L1Norm(),
    "schreier": lambda arg: SchreierNorm(),
    "tsirelson": lambda arg: TsirelsonNorm() if not arg else TsirelsonNorm(int(arg)),
    "weighted-l1-sum": lambda arg: WeightedL1SumNorm(),
    "lp": lambda arg: LpNorm(Fraction(arg)),
}


def make_oracle(identifier: str) -> NormOracle:
    """Build an oracle from ``"c0"``, ``"lp:2"``, ``"l1"``, ``"schreier"``,
    ``"tsirelson"`` (optionally ``"tsirelson:<support cap>"``) or
    ``"weighted-l1-sum"``."""
    name, _, arg = identifier.strip().partition(":")
    if name not in _FACTORIES:
        raise ValueError(f"unknown norm oracle {identifier!r}")
    if name == "lp":
        if not arg:
            raise ValueError("lp oracle needs a parameter, e.g. 'lp:2'")
        if Fraction(arg) == 1:
            return L1Norm()
    return _FACTORIES[name](arg)
