"""Finite-scale estimators: adversarial Riemann sums over equal dyadic
meshes, Haar-l1+ witnesses, and spreading / asymptotic-model profiles.

Functions f : [0, 1] -> X considered here vanish off the dyadic rationals
D of (0, 1) and send the k-th dyadic d_k to a vector x_k.  Only dyadic
tags contribute to a Riemann sum, so tag choices are searched among
dyadics (plus "untagged", standing for any non-dyadic point).
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterator, Sequence

from .core import (
    BlockSequence,
    DyadicRational,
    FinVec,
    dyadic_enumerate,
    dyadic_index,
    dyadics_in_open_cell,
    vsum,
)
from .haar import HaarSystem, canonical_haar, load_haar_system, sigma
from .norms import NormOracle, NormValue


# ---------------------------------------------------------------------------
# functions on the dyadics


@dataclass(frozen=True)
class DyadicFunctionSpec:
    """f(d_k) = assignment(k), f = 0 off D.

    ``unit_basis`` records that every value is a distinct unit vector e_i
    (injective in k); estimators use it to shortcut searches.
    """

    assignment: Callable[[int], FinVec]
    description: dict
    unit_basis: bool = False

    def at(self, t: DyadicRational | None) -> FinVec:
        if t is None or t.numerator == 0:
            return FinVec()
        return self.assignment(dyadic_index(t))

    def to_json(self) -> dict:
        return dict(self.description)


def standard_function() -> DyadicFunctionSpec:
    """d_k -> e_k."""
    return DyadicFunctionSpec(FinVec.unit, {"kind": "standard"}, unit_basis=True)


def build_f_from_haar(system: HaarSystem, oracle: NormOracle | None = None) -> DyadicFunctionSpec:
    """d_k -> e_{sigma(d_k)}.

    ``oracle`` is accepted for symmetry with the other builders; unit
    vectors of the canonical bases all have norm 1.
    """

    def assign(k: int) -> FinVec:
        return FinVec.unit(sigma(dyadic_enumerate(k), system))

    return DyadicFunctionSpec(assign, {"kind": "haar", "system": system.to_json()}, unit_basis=True)


def function_from_json(data: dict | str) -> DyadicFunctionSpec:
    if isinstance(data, str):
        data = {"kind": data}
    kind = data.get("kind")
    if kind == "standard":
        return standard_function()
    if kind == "haar":
        return build_f_from_haar(load_haar_system(data.get("system", "canonical")))
    raise ValueError(f"unknown function kind {kind!r}")


@dataclass(frozen=True)
class TaggedDyadicPartition:
    """Equal mesh 2^-m with one tag per cell: a dyadic strictly inside
    ((i-1)/2^m, i/2^m), or None for a non-dyadic tag."""

    level: int
    tags: tuple[DyadicRational | None, ...]

    def __post_init__(self):
        object.__setattr__(self, "tags", tuple(self.tags))
        if self.level < 0:
            raise ValueError("mesh level must be non-negative")
        if len(self.tags) != 1 << self.level:
            raise ValueError(f"level {self.level} needs {1 << self.level} tags")
        for c, t in enumerate(self.tags):
            if t is None:
                continue
            if t.level <= self.level or t.cell(self.level) != c:
                raise ValueError(f"tag {t} is not interior to cell {c} at level {self.level}")

    @classmethod
    def untagged(cls, m: int) -> "TaggedDyadicPartition":
        return cls(m, (None,) * (1 << m))

    def to_json(self) -> list:
        return [None if t is None else str(t) for t in self.tags]

    @classmethod
    def from_json(cls, level: int, tags: Sequence[str | None]) -> "TaggedDyadicPartition":
        return cls(level, tuple(None if t is None else DyadicRational.parse(t) for t in tags))


def _signed_total(f: DyadicFunctionSpec, tags, signs=None) -> FinVec:
    parts = []
    for c, t in enumerate(tags):
        if t is None:
            continue
        v = f.at(t)
        parts.append(-v if signs is not None and signs[c] < 0 else v)
    return vsum(parts)


def riemann_sum(
    f: DyadicFunctionSpec,
    part: TaggedDyadicPartition,
    oracle: NormOracle,
    signs: Sequence[int] | None = None,
) -> NormValue:
    """|| 2^-m sum_i eps_i f(t_i) || (eps_i = 1 unless ``signs`` given)."""
    if signs is not None and len(signs) != len(part.tags):
        raise ValueError("one sign per cell")
    total = _signed_total(f, part.tags, signs)
    return oracle.enclose(total).scaled(Fraction(1, 1 << part.level))


# ---------------------------------------------------------------------------
# reports


@dataclass
class WitnessReport:
    """Result of a sup search.

    ``value`` is the norm enclosure of the witness itself, so ``value.lower``
    is always a certified lower bound for the sup.  ``exact_sup`` says the
    sup over the searched candidate set equals the witness value.
    """

    kind: str
    level: int
    value: NormValue
    exact_sup: bool
    witness: dict
    budget: dict = field(default_factory=dict)

    @property
    def heuristic(self) -> bool:
        return not self.exact_sup

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "level": self.level,
            "value": self.value.to_json(),
            "exact_sup": self.exact_sup,
            "witness": self.witness,
            "budget": self.budget,
        }


def _key(v: NormValue):
    # maximize the certified lower bound; prefer tighter enclosures on ties
    return (v.lower, -v.width)


def _min_key(v: NormValue):
    return (v.upper, v.width)


def _tag_candidates(m: int, depth: int) -> list[list[DyadicRational | None]]:
    return [[None] + list(dyadics_in_open_cell(m, c, m + depth)) for c in range(1 << m)]


def _ascent(cands, evaluate, start, max_evals):
    """Coordinate ascent over per-cell candidate lists.  Returns
    (best choice, best value, evaluations used)."""
    choice = list(start)
    best = evaluate(choice)
    evals = 1
    improved = True
    while improved and evals < max_evals:
        improved = False
        for c, options in enumerate(cands):
            for opt in options:
                if opt == choice[c]:
                    continue
                if evals >= max_evals:
                    break
                trial = choice.copy()
                trial[c] = opt
                val = evaluate(trial)
                evals += 1
                if _key(val) > _key(best):
                    choice, best, improved = trial, val, True
    return choice, best, evals


def riemann_sup(
    f: DyadicFunctionSpec,
    m: int,
    oracle: NormOracle,
    tag_depth: int = 4,
    enumeration_budget: int = 4096,
    search_budget: int = 2000,
    search_support: int = 16,
) -> WitnessReport:
    """Adversarial sup of ||2^-m sum f(t_i)|| over interior tag choices.

    Candidate tags in each cell are the dyadics of reduced level at most
    m + tag_depth, plus untagged.  Exact when f sends tags to distinct
    unit vectors and the oracle is spreading invariant (the value then
    only depends on how many cells are tagged), or when the full product
    of candidates fits ``enumeration_budget``.  Otherwise coordinate
    ascent from the deepest tags (skipped once 2^m exceeds
    ``search_support``), flagged heuristic.
    """
    if m < 1:
        raise ValueError("mesh level m must be >= 1")
    cands = _tag_candidates(m, tag_depth)
    scale = Fraction(1, 1 << m)

    def evaluate(choice):
        return oracle.enclose(_signed_total(f, choice)).scaled(scale)

    deepest = [opts[-1] for opts in cands]
    budget = {"tag_depth": tag_depth}
    if f.unit_basis and oracle.spreading_invariant:
        value = evaluate(deepest)
        return WitnessReport("riemann", m, value, value.exact, _tags_json(deepest), {**budget, "evaluations": 1})
    total = math.prod(len(c) for c in cands)
    if total <= enumeration_budget:
        best_choice, best = None, None
        for choice in itertools.product(*cands):
            val = evaluate(choice)
            if best is None or _key(val) > _key(best):
                best_choice, best = choice, val
        exact = all(v.exact for v in [best])
        return WitnessReport("riemann", m, best, exact, _tags_json(best_choice), {**budget, "evaluations": total})
    evals_cap = search_budget if (1 << m) <= search_support else 1
    choice, best, evals = _ascent(cands, evaluate, deepest, evals_cap)
    return WitnessReport("riemann", m, best, False, _tags_json(choice), {**budget, "evaluations": evals})


def riemann_signed_sup(
    f: DyadicFunctionSpec,
    m: int,
    oracle: NormOracle,
    tag_depth: int = 4,
    enumeration_budget: int = 4096,
    search_budget: int = 2000,
    search_support: int = 16,
) -> WitnessReport:
    """Like :func:`riemann_sup` with an extra sign per cell.

    For 1-unconditional oracles signs change nothing and the unsigned
    search is reused.
    """
    if oracle.unconditional:
        rep = riemann_sup(f, m, oracle, tag_depth, enumeration_budget, search_budget, search_support)
        rep.kind = "riemann-signed"
        rep.witness = {**rep.witness, "signs": [1] * (1 << m)}
        return rep
    cands = [
        [(None, 1)] + [(t, s) for t in opts[1:] for s in (1, -1)]
        for opts in _tag_candidates(m, tag_depth)
    ]
    scale = Fraction(1, 1 << m)

    def evaluate(choice):
        tags = [t for t, _ in choice]
        signs = [s for _, s in choice]
        return oracle.enclose(_signed_total(f, tags, signs)).scaled(scale)

    total = math.prod(len(c) for c in cands)
    budget = {"tag_depth": tag_depth}
    if total <= enumeration_budget:
        best_choice, best = None, None
        for choice in itertools.product(*cands):
            val = evaluate(choice)
            if best is None or _key(val) > _key(best):
                best_choice, best = choice, val
        exact, evals = best.exact, total
    else:
        start = [opts[-1] for opts in cands]
        evals_cap = search_budget if (1 << m) <= search_support else 1
        best_choice, best, evals = _ascent(cands, evaluate, start, evals_cap)
        exact = False
    witness = _tags_json([t for t, _ in best_choice])
    witness["signs"] = [s for _, s in best_choice]
    return WitnessReport("riemann-signed", m, best, exact, witness, {**budget, "evaluations": evals})


def _tags_json(choice) -> dict:
    return {"tags": [None if t is None else str(t) for t in choice]}


def partition_from_report(report: WitnessReport) -> TaggedDyadicPartition:
    return TaggedDyadicPartition.from_json(report.level, report.witness["tags"])


# ---------------------------------------------------------------------------
# Haar-l1+ witnesses


def _witness_candidates(system: HaarSystem, m: int, width: int) -> list[list[int]]:
    floor = 1 << m
    out = []
    for j in range(1 << m):
        first = system.first_member_at_least(m, j, floor)
        row = [first]
        k = 1
        while len(row) < width:
            k += 1
            nxt = system.first_member_at_least(m, j, row[-1] + 1)
            row.append(nxt)
        out.append(row)
    return out


def haar_level_value(
    oracle: NormOracle,
    system: HaarSystem,
    m: int,
    width: int = 2,
    search_budget: int = 64,
    search_support: int = 16,
) -> WitnessReport:
    """Best (1/2^m) ||sum_j e_{i_j}|| found with 2^m <= i_j in A^m_j.

    Each cell offers its ``width`` smallest members >= 2^m.  Spreading
    invariant oracles make the canonical choice exact; otherwise
    coordinate ascent within ``search_budget`` evaluations, for 2^m up
    to ``search_support``.
    """
    cands = _witness_candidates(system, m, 1 if oracle.spreading_invariant else width)
    scale = Fraction(1, 1 << m)

    def evaluate(choice):
        return oracle.enclose(vsum(map(FinVec.unit, choice))).scaled(scale)

    start = [row[0] for row in cands]
    if oracle.spreading_invariant:
        value = evaluate(start)
        return WitnessReport("haar-level", m, value, value.exact, {"indices": start}, {"evaluations": 1})
    evals_cap = search_budget if (1 << m) <= search_support else 1
    choice, best, evals = _ascent(cands, evaluate, start, evals_cap)
    return WitnessReport("haar-level", m, best, False, {"indices": list(choice)}, {"evaluations": evals, "width": width})


def haar_ell1_witness(
    oracle: NormOracle,
    system: HaarSystem,
    n: int,
    m_cap: int,
    width: int = 2,
    search_budget: int = 64,
    search_support: int = 16,
    _levels: dict | None = None,
) -> WitnessReport:
    """Lower bound for sup_{m >= n} (1/2^m) ||sum_j e_{i_j}|| over
    2^m <= i_j in A^m_j, restricted to n <= m <= m_cap."""
    if not 0 <= n <= m_cap:
        raise ValueError("need 0 <= n <= m_cap")
    levels = _levels if _levels is not None else {}
    best = None
    for m in range(n, m_cap + 1):
        if m not in levels:
            levels[m] = haar_level_value(oracle, system, m, width, search_budget, search_support)
        rep = levels[m]
        if best is None or _key(rep.value) > _key(best.value):
            best = rep
    exact = oracle.spreading_invariant and all(levels[m].value.exact for m in range(n, m_cap + 1))
    return WitnessReport(
        "haar-witness", n, best.value, exact,
        {"m": best.level, "indices": best.witness["indices"]},
        {"m_cap": m_cap, "width": width},
    )


def haar_witness_profile(oracle, system, levels: Sequence[int], m_cap: int, **kwargs) -> list[WitnessReport]:
    cache: dict = {}
    return [haar_ell1_witness(oracle, system, n, m_cap, _levels=cache, **kwargs) for n in levels]


def check_haar_witness(oracle: NormOracle, system: HaarSystem, m: int, indices: Sequence[int]) -> NormValue:
    """Re-validate a level-m witness and return its value; raises on an
    index outside its cell or below 2^m."""
    if len(indices) != 1 << m:
        raise ValueError(f"level {m} witness needs {1 << m} indices")
    for j, i in enumerate(indices):
        if i < 1 << m:
            raise ValueError(f"index {i} for cell {j} is below 2^{m}")
        if not system.membership(m, j, i):
            raise ValueError(f"index {i} is not in A^{m}_{j}")
    return oracle.enclose(vsum(map(FinVec.unit, indices))).scaled(Fraction(1, 1 << m))


# ---------------------------------------------------------------------------
# spreading and asymptotic-model profiles


@dataclass
class WindowProfile:
    minimum: NormValue
    maximum: NormValue
    argmin: tuple[int, ...]
    argmax: tuple[int, ...]
    windows: int
    exhaustive: bool

    def to_json(self) -> dict:
        return {
            "min": self.minimum.to_json(),
            "max": self.maximum.to_json(),
            "argmin": list(self.argmin),
            "argmax": list(self.argmax),
            "windows": self.windows,
            "exhaustive": self.exhaustive,
        }


def _windows(n: int, lo: int, hi: int, budget: int, seed: int) -> tuple[list[tuple[int, ...]], bool]:
    pool = range(lo, hi + 1)
    total = math.comb(len(pool), n)
    if total <= budget:
        return list(itertools.combinations(pool, n)), True
    rng = random.Random(seed)
    seen = set()
    out = []
    while len(out) < budget:
        w = tuple(sorted(rng.sample(pool, n)))
        if w not in seen:
            seen.add(w)
            out.append(w)
    return sorted(out), False


def spreading_window_profile(
    oracle: NormOracle,
    coefficients: Sequence,
    window_budget: int = 1000,
    max_index: int | None = None,
    seed: int = 0,
) -> WindowProfile:
    """Extremes of ||sum_j a_j e_{i_j}|| over windows n <= i_1 < ... < i_n
    <= max_index (default 4n); sampled with ``seed`` past the budget."""
    a = [Fraction(c) for c in coefficients]
    n = len(a)
    if n < 1:
        raise ValueError("need at least one coefficient")
    max_index = max_index or 4 * n
    if oracle.spreading_invariant:
        w = tuple(range(n, 2 * n))
        v = oracle.enclose(FinVec(zip(w, a)))
        return WindowProfile(v, v, w, w, 1, True)
    windows, exhaustive = _windows(n, n, max_index, window_budget, seed)
    return _extremes(windows, lambda w: oracle.enclose(FinVec(zip(w, a))), exhaustive)


def _extremes(windows, evaluate, exhaustive) -> WindowProfile:
    lo = hi = None
    for w in windows:
        v = evaluate(w)
        if lo is None or _min_key(v) < _min_key(lo[0]):
            lo = (v, w)
        if hi is None or _key(v) > _key(hi[0]):
            hi = (v, w)
    return WindowProfile(lo[0], hi[0], lo[1], hi[1], len(windows), exhaustive)


def natural_rows(count: int) -> list[tuple[int, int]]:
    """(level, j) of the first ``count`` sets A^1_0, A^1_1, A^2_0, ..."""
    out = []
    level = 1
    while len(out) < count:
        out.extend((level, j) for j in range(1 << level))
        level += 1
    return out[:count]


def array_diagonal(system: HaarSystem, window: Sequence[int]) -> FinVec:
    """sum_j e^j_{i_j} where row j is (e_i)_{i in A_j} in natural order."""
    rows = natural_rows(len(window))
    return vsum(FinVec.unit(system.kth_member(lv, j, i)) for (lv, j), i in zip(rows, window))


def asymptotic_array_profile(
    oracle: NormOracle,
    system: HaarSystem,
    n: int,
    window_budget: int = 1000,
    max_index: int | None = None,
    seed: int = 0,
) -> WindowProfile:
    """Extremes of (1/n) ||sum_{j <= n} e^j_{i_j}|| over diagonals
    n <= i_1 < ... < i_n <= max_index (default 3n).  The minimum bounds
    from above how l_1-like asymptotic models of this array can be."""
    if n < 1:
        raise ValueError("n must be positive")
    max_index = max_index or 3 * n
    windows, exhaustive = _windows(n, n, max_index, window_budget, seed)
    scale = Fraction(1, n)
    return _extremes(windows, lambda w: oracle.enclose(array_diagonal(system, w)).scaled(scale), exhaustive)


@dataclass(frozen=True)
class ScaledVector:
    """raw / ||raw||, kept unnormalized when the norm is only enclosed."""

    raw: FinVec
    norm: NormValue

    def normalized(self) -> FinVec:
        return self.raw / self.norm.value


def difference_sequence(oracle: NormOracle, start: int = 1) -> Iterator[ScaledVector]:
    """(e_{2i} - e_{2i+1}) / ||e_{2i} - e_{2i+1}|| for i = start, start+1, ..."""
    for i in itertools.count(start):
        raw = FinVec({2 * i: 1, 2 * i + 1: -1})
        yield ScaledVector(raw, oracle.enclose(raw))


def difference_block_sequence(oracle: NormOracle, count: int, start: int = 1) -> BlockSequence:
    """The first ``count`` normalized differences; needs exact norms."""
    return BlockSequence(v.normalized() for v in itertools.islice(difference_sequence(oracle, start), count))


@dataclass
class CyclicAverageReport:
    direct: NormValue    # ||sum a_i w_i||
    average: NormValue   # mean over cyclic shifts rho of ||sum a_rho(i) w_i||
    flat: NormValue      # ||(sum a / 2^m) sum w_i||
    triangle_holds: bool      # average >= flat, certified
    half_bound_holds: bool | None  # direct >= flat / 2; None if undecided

    def to_json(self) -> dict:
        return {
            "direct": self.direct.to_json(),
            "average": self.average.to_json(),
            "flat": self.flat.to_json(),
            "triangle_holds": self.triangle_holds,
            "half_bound_holds": self.half_bound_holds,
        }


def cyclic_average_check(oracle: NormOracle, ws: Sequence[FinVec], a: Sequence) -> CyclicAverageReport:
    """Compare ||sum a_i w_i|| with the cyclic-shift average and with
    ||(mean a) sum w_i||; the average dominates the last by the triangle
    inequality."""
    n = len(ws)
    if n == 0 or n & (n - 1):
        raise ValueError("need 2^m vectors")
    if len(a) != n:
        raise ValueError("one coefficient per vector")
    a = [Fraction(c) for c in a]
    if any(c < 0 for c in a):
        raise ValueError("coefficients must be non-negative")

    def combo(coefs):
        return oracle.enclose(vsum(w * c for w, c in zip(ws, coefs)))

    direct = combo(a)
    lo = hi = Fraction(0)
    for r in range(n):
        v = combo(a[r:] + a[:r])
        lo += v.lower
        hi += v.upper
    average = NormValue.between(lo / n, hi / n)
    mean = sum(a, Fraction(0)) / n
    flat = oracle.enclose(vsum(ws) * mean) if mean else NormValue.of(0)
    triangle = average.lower >= flat.upper
    if direct.lower >= flat.upper / 2:
        half = True
    elif direct.upper < flat.lower / 2:
        half = False
    else:
        half = None
    return CyclicAverageReport(direct, average, flat, triangle, half)
