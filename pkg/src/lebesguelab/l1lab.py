"""L_1[0, 1] at dyadic resolution: step functions, the Khintchine
square-function check, theta estimation and Dor-type disjointification.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Mapping, Sequence

import numpy as np
from scipy.optimize import linprog

from .core import FinVec, Rational, as_fraction, dyadic_enumerate, root_enclosure
from .experiments import DyadicFunctionSpec, standard_function
from .norms import NormOracle, NormValue


@dataclass(frozen=True)
class StepFunction:
    """Constant ``values[c]`` on [c/2^g, (c+1)/2^g), c = 0..2^g - 1."""

    level: int
    values: tuple[Fraction, ...]

    def __post_init__(self):
        vals = tuple(as_fraction(v) for v in self.values)
        object.__setattr__(self, "values", vals)
        if self.level < 0:
            raise ValueError("grid level must be non-negative")
        if len(vals) != 1 << self.level:
            raise ValueError(f"level {self.level} needs {1 << self.level} values, got {len(vals)}")

    @classmethod
    def constant(cls, c: Rational = 1, level: int = 0) -> "StepFunction":
        return cls(level, (as_fraction(c),) * (1 << level))

    @classmethod
    def indicator(cls, level: int, cells: Sequence[int], height: Rational = 1) -> "StepFunction":
        h = as_fraction(height)
        chosen = set(cells)
        return cls(level, tuple(h if c in chosen else Fraction(0) for c in range(1 << level)))

    def l1_norm(self) -> Fraction:
        return sum((abs(v) for v in self.values), Fraction(0)) / (1 << self.level)

    def refine(self, level: int) -> "StepFunction":
        if level < self.level:
            raise ValueError("can only refine to a finer grid")
        rep = 1 << (level - self.level)
        return StepFunction(level, tuple(v for v in self.values for _ in range(rep)))

    def cell_values(self, level: int) -> tuple[Fraction, ...]:
        return self.refine(level).values

    def support_cells(self, level: int | None = None) -> frozenset[int]:
        vals = self.values if level is None else self.cell_values(level)
        return frozenset(c for c, v in enumerate(vals) if v)

    def __add__(self, other: "StepFunction") -> "StepFunction":
        g = max(self.level, other.level)
        return StepFunction(g, tuple(a + b for a, b in zip(self.cell_values(g), other.cell_values(g))))

    def __mul__(self, c: Rational) -> "StepFunction":
        c = as_fraction(c)
        return StepFunction(self.level, tuple(c * v for v in self.values))

    __rmul__ = __mul__

    def __neg__(self) -> "StepFunction":
        return self * -1

    def __sub__(self, other: "StepFunction") -> "StepFunction":
        return self + (-other)

    def format(self) -> str:
        return f"level {self.level}\n" + " ".join(str(v) for v in self.values) + "\n"

    @classmethod
    def parse(cls, text: str) -> "StepFunction":
        tokens = text.split()
        if len(tokens) < 2 or tokens[0] != "level":
            raise ValueError("step function text starts with 'level g'")
        return cls(int(tokens[1]), tuple(Fraction(t) for t in tokens[2:]))


def common_level(fs: Sequence[StepFunction]) -> int:
    return max((f.level for f in fs), default=0)


def _grid(fs: Sequence[StepFunction]) -> tuple[int, list[tuple[Fraction, ...]]]:
    g = common_level(fs)
    return g, [f.cell_values(g) for f in fs]


def l1_norm(f: StepFunction) -> Fraction:
    return f.l1_norm()


def combination(fs: Sequence[StepFunction], coefficients: Sequence[Rational]) -> StepFunction:
    g, rows = _grid(fs)
    cs = [as_fraction(c) for c in coefficients]
    cells = [sum((c * r[k] for c, r in zip(cs, rows)), Fraction(0)) for k in range(1 << g)]
    return StepFunction(g, tuple(cells))


class StepL1Oracle(NormOracle):
    """||x|| = || sum_k x_k g_k ||_{L_1} for a dictionary k -> g_k.

    Not 1-unconditional in general: flipping signs can cancel mass.
    """

    identifier = "step-l1"
    unconditional = False

    def __init__(self, dictionary: Mapping[int, StepFunction] | Callable[[int], StepFunction]):
        self._lookup = dictionary.__getitem__ if isinstance(dictionary, Mapping) else dictionary

    def eval(self, x: FinVec) -> NormValue:
        if not x:
            return NormValue.of(0)
        fs = [self._lookup(i) for i in x.support]
        return NormValue.of(combination(fs, x.coefficients()).l1_norm())


def cancellation_instance() -> tuple[DyadicFunctionSpec, StepL1Oracle]:
    """d_k -> e_k, e_k -> +1 when d_k < 1/2 and -1 otherwise.

    At mesh 1/2 the two cells carry opposite constants, so unsigned sums
    cancel while a sign per cell recovers full mass.
    """
    one = StepFunction.constant(1)

    def g(k: int) -> StepFunction:
        return one if dyadic_enumerate(k).value < Fraction(1, 2) else -one

    return standard_function(), StepL1Oracle(g)


# ---------------------------------------------------------------------------
# Khintchine


@dataclass
class KhintchineReport:
    lhs: Fraction          # average over signs of ||sum eps_i f_i||_1
    rhs: NormValue         # integral of (sum f_i^2)^(1/2)
    sqrt_half_holds: bool  # lhs >= rhs / sqrt 2 - tolerance, certified
    constant_one_holds: bool | None  # lhs >= rhs; None if the enclosure straddles

    @property
    def ratio(self) -> tuple[float, float]:
        """Enclosure of lhs / rhs (floats)."""
        if self.rhs.upper == 0:
            return (math.inf, math.inf)
        lo = float(self.lhs / self.rhs.upper)
        hi = math.inf if not self.rhs.lower else float(self.lhs / self.rhs.lower)
        return lo, hi

    def to_json(self) -> dict:
        return {
            "lhs": str(self.lhs),
            "rhs": self.rhs.to_json(),
            "sqrt_half_holds": self.sqrt_half_holds,
            "constant_one_holds": self.constant_one_holds,
        }


KHINTCHINE_MAX_N = 16


def _sign_average(rows: list[tuple[Fraction, ...]]) -> Fraction:
    n = len(rows)
    den = math.lcm(*(v.denominator for r in rows for v in r))
    ints = [[int(v * den) for v in r] for r in rows]
    signs = np.array(list(itertools.product((1, -1), repeat=n)), dtype=np.int64)
    width = max((abs(v) for r in ints for v in r), default=0) * n
    dtype = np.int64 if width < 1 << 62 else object
    mat = np.array(ints, dtype=dtype)
    total = np.abs(signs.astype(dtype) @ mat).sum()
    return Fraction(int(total), den * len(signs))


def khintchine_check(
    fs: Sequence[StepFunction],
    tolerance: Rational = Fraction(1, 10 ** 9),
    bits: int = 64,
) -> KhintchineReport:
    """Sign-averaged L_1 norm of sum eps_i f_i against the square function."""
    n = len(fs)
    if not 1 <= n <= KHINTCHINE_MAX_N:
        raise ValueError(f"need 1 <= n <= {KHINTCHINE_MAX_N} functions, got {n}")
    tol = as_fraction(tolerance)
    g, rows = _grid(fs)
    cells = 1 << g
    lhs = _sign_average(rows) / cells
    lo = hi = Fraction(0)
    for c in range(cells):
        q = sum((r[c] ** 2 for r in rows), Fraction(0))
        a, b = root_enclosure(q, 2, bits)
        lo += a
        hi += b
    rhs = NormValue.between(lo / cells, hi / cells)
    # lhs + tol >= hi / sqrt 2  <=>  2 (lhs + tol)^2 >= hi^2
    sqrt_half = 2 * (lhs + tol) ** 2 >= rhs.upper ** 2
    if lhs >= rhs.upper:
        one = True
    elif lhs < rhs.lower:
        one = False
    else:
        one = None
    return KhintchineReport(lhs, rhs, sqrt_half, one)


# ---------------------------------------------------------------------------
# theta


@dataclass
class ThetaEstimate:
    """``value`` = ||sum a_i f_i||_1 at the witness a with sum |a_i| = 1,
    hence an upper bound on theta; ``certified`` marks value == theta."""

    value: Fraction
    witness: tuple[Fraction, ...]
    certified: bool
    reason: str

    def to_json(self) -> dict:
        return {
            "value": str(self.value),
            "witness": [str(a) for a in self.witness],
            "certified": self.certified,
            "reason": self.reason,
        }


def _disjoint(fs: Sequence[StepFunction]) -> bool:
    g = common_level(fs)
    seen: set[int] = set()
    for f in fs:
        s = f.support_cells(g)
        if seen & s:
            return False
        seen |= s
    return True


def _orthant_lp(weights: np.ndarray, signs: Sequence[int]) -> np.ndarray | None:
    # variables t_1..t_n >= 0 with sum 1, u_c >= |sum_i s_i t_i f_i(c)|
    n, cells = weights.shape
    signed = weights * np.asarray(signs, dtype=float)[:, None]
    cost = np.concatenate([np.zeros(n), np.full(cells, 1.0 / cells)])
    a_ub = np.block([[signed.T, -np.eye(cells)], [-signed.T, -np.eye(cells)]])
    b_ub = np.zeros(2 * cells)
    a_eq = np.concatenate([np.ones(n), np.zeros(cells)])[None, :]
    res = linprog(cost, A_ub=a_ub, b_ub=b_ub, A_eq=a_eq, b_eq=[1.0], bounds=(0, None), method="highs")
    return res.x[:n] if res.status == 0 else None


def _rationalize(t: np.ndarray, signs: Sequence[int], denominator: int) -> tuple[Fraction, ...]:
    raw = [Fraction(float(max(v, 0.0))).limit_denominator(denominator) for v in t]
    total = sum(raw, Fraction(0))
    if total == 0:
        raw = [Fraction(1)] + [Fraction(0)] * (len(t) - 1)
        total = Fraction(1)
    return tuple(s * v / total for s, v in zip(signs, raw))


def theta_lower_estimate(
    fs: Sequence[StepFunction],
    search_budget: int = 256,
    seed: int = 0,
    denominator: int = 1 << 20,
) -> ThetaEstimate:
    """Smallest ||sum a_i f_i||_1 found on the l_1 unit sphere.

    Each sign orthant is a simplex on which the objective is convex and
    piecewise linear; it is minimized by linear programming, the minimizer
    rounded to rationals and re-evaluated exactly.  Orthants (first sign
    fixed to +) are enumerated up to ``search_budget``, sampled beyond.
    Certified when the supports are disjoint (theta = min ||f_i||) or the
    value found is 0.
    """
    fs = list(fs)
    if not fs:
        raise ValueError("need at least one function")
    n = len(fs)
    if _disjoint(fs):
        norms = [f.l1_norm() for f in fs]
        i = min(range(n), key=lambda k: norms[k])
        a = tuple(Fraction(int(k == i)) for k in range(n))
        return ThetaEstimate(norms[i], a, True, "disjoint supports")
    _, rows = _grid(fs)
    weights = np.array([[float(v) for v in r] for r in rows])
    orthants = 1 << (n - 1)
    if orthants <= search_budget:
        patterns = [(1,) + p for p in itertools.product((1, -1), repeat=n - 1)]
    else:
        rng = random.Random(seed)
        picks = sorted(rng.sample(range(orthants), search_budget))
        patterns = [(1,) + tuple(-1 if (p >> b) & 1 else 1 for b in range(n - 1)) for p in picks]
    best: tuple[Fraction, tuple[Fraction, ...]] | None = None
    for signs in patterns:
        t = _orthant_lp(weights, signs)
        if t is None:
            continue
        a = _rationalize(t, signs, denominator)
        v = combination(fs, a).l1_norm()
        if best is None or v < best[0]:
            best = (v, a)
    if best is None:
        a = tuple(Fraction(int(k == 0)) for k in range(n))
        best = (fs[0].l1_norm(), a)
    value, a = best
    if value == 0:
        return ThetaEstimate(value, a, True, "zero combination")
    return ThetaEstimate(value, a, False, "orthant LP minimum")


# ---------------------------------------------------------------------------
# disjointification


@dataclass(frozen=True)
class CellAssignment:
    """``owners[c]`` is the function owning grid cell c, or None."""

    level: int
    owners: tuple[int | None, ...]

    def __post_init__(self):
        object.__setattr__(self, "owners", tuple(self.owners))
        if len(self.owners) != 1 << self.level:
            raise ValueError(f"level {self.level} needs {1 << self.level} owners")

    def cells_of(self, i: int) -> tuple[int, ...]:
        return tuple(c for c, o in enumerate(self.owners) if o == i)

    def masses(self, fs: Sequence[StepFunction]) -> tuple[Fraction, ...]:
        """integral over A_i of |f_i| for each i."""
        rows = [f.cell_values(self.level) for f in fs]
        out = [Fraction(0)] * len(fs)
        for c, o in enumerate(self.owners):
            if o is not None:
                out[o] += abs(rows[o][c])
        return tuple(m / (1 << self.level) for m in out)

    def to_csv(self) -> str:
        lines = ["cell,owner"]
        lines += [f"{c},{'' if o is None else o}" for c, o in enumerate(self.owners)]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_csv(cls, text: str) -> "CellAssignment":
        rows = [ln.split(",") for ln in text.strip().splitlines()[1:]]
        owners = [None if o.strip() == "" else int(o) for _, o in rows]
        level = len(owners).bit_length() - 1
        if [int(c) for c, _ in rows] != list(range(len(owners))) or 1 << level != len(owners):
            raise ValueError("assignment CSV must list cells 0..2^g - 1 in order")
        return cls(level, tuple(owners))


@dataclass
class DorResult:
    success: bool
    target: Fraction      # theta^2
    min_mass: Fraction
    assignment: CellAssignment
    mode: str

    def to_json(self) -> dict:
        return {
            "success": self.success,
            "target": str(self.target),
            "min_mass": str(self.min_mass),
            "mode": self.mode,
            "assignment": list(self.assignment.owners),
        }


DOR_MAX_CELLS = 32
DOR_MAX_FUNCTIONS = 8


def _greedy(mass: list[list[Fraction]], norms: list[Fraction], target: Fraction) -> list[int | None]:
    n, cells = len(mass), len(mass[0])
    rel = [[mass[i][c] / norms[i] if norms[i] else Fraction(0) for c in range(cells)] for i in range(n)]
    order = sorted(range(cells), key=lambda c: (-max(rel[i][c] for i in range(n)), c))
    got = [Fraction(0)] * n
    owners: list[int | None] = [None] * cells
    for c in order:
        live = [i for i in range(n) if mass[i][c]]
        if not live:
            continue
        hungry = [i for i in live if got[i] < target] or live
        i = max(hungry, key=lambda k: (rel[k][c], -k))
        owners[c] = i
        got[i] += mass[i][c]
    return owners


def _exact(mass: list[list[Fraction]], start: list[int | None]) -> list[int | None]:
    """Assignment maximizing min_i mass_i: keep asking for one that beats
    the incumbent until none exists."""
    n, cells = len(mass), len(mass[0])
    den = math.lcm(*(m.denominator for row in mass for m in row))
    w = [[int(m * den) for m in row] for row in mass]
    order = sorted(range(cells), key=lambda c: (-max(w[i][c] for i in range(n)), c))
    cols = [[w[i][c] for i in range(n)] for c in order]

    def score(owners):
        got = [0] * n
        for c, o in enumerate(owners):
            if o is not None:
                got[o] += w[o][c]
        return min(got)

    best_owners, best = list(start), score(start)
    while True:
        picks = _beat(cols, best + 1)
        if picks is None:
            return best_owners
        best_owners = [None] * cells
        for k, i in enumerate(picks):
            best_owners[order[k]] = i
        best = score(best_owners)


def _beat(cols: list[list[int]], target: int) -> list[int | None] | None:
    """Cells (in search order) -> owner with every owner reaching
    ``target``, or None.  Cells may stay unassigned."""
    cells, n = len(cols), len(cols[0])
    suffix = [[0] * n for _ in range(cells + 1)]
    for k in range(cells - 1, -1, -1):
        suffix[k] = [suffix[k + 1][i] + cols[k][i] for i in range(n)]
    got = [0] * n
    picks: list[int | None] = [None] * cells
    failed: set = set()

    def rec(k: int) -> bool:
        hungry = [i for i in range(n) if got[i] < target]
        if not hungry:
            return True
        if k == cells:
            return False
        if any(got[i] + suffix[k][i] < target for i in hungry):
            return False
        # every hungry owner needs cells worth >= 1 in units of its deficit,
        # and a cell serves one owner
        need = {i: target - got[i] for i in hungry}
        cover = sum(max(min(1.0, col[i] / need[i]) for i in hungry) for col in cols[k:])
        if cover < len(hungry) - 1e-9:
            return False
        key = (k, tuple(min(g, target) for g in got))
        if key in failed:
            return False
        col = cols[k]
        for i in sorted((i for i in hungry if col[i]), key=lambda i: (-col[i] / need[i], i)):
            got[i] += col[i]
            picks[k] = i
            if rec(k + 1):
                return True
            got[i] -= col[i]
        picks[k] = None
        if rec(k + 1):
            return True
        failed.add(key)
        return False

    return picks if rec(0) else None


def dor_disjointify(
    fs: Sequence[StepFunction],
    theta: Rational,
    mode: str = "exact",
    level: int | None = None,
) -> DorResult:
    """Disjoint cell sets A_i with integral over A_i of |f_i| >= theta^2.

    ``exact`` maximizes the smallest mass over all assignments; ``greedy``
    hands out cells in decreasing relative mass, preferring functions still
    below the target.  The grid is the common level of ``fs``, raised so
    there are at least as many cells as functions, unless ``level`` is given.
    """
    fs = list(fs)
    theta = as_fraction(theta)
    if not 0 < theta <= 1:
        raise ValueError("theta must lie in (0, 1]")
    if not fs:
        raise ValueError("need at least one function")
    if mode not in ("exact", "greedy"):
        raise ValueError(f"unknown mode {mode!r}")
    g = common_level(fs)
    if level is None:
        level = max(g, (len(fs) - 1).bit_length())
    elif level < g:
        raise ValueError(f"grid level {level} is coarser than the functions' level {g}")
    g = level
    rows = [f.cell_values(g) for f in fs]
    cells = 1 << g
    if mode == "exact" and (cells > DOR_MAX_CELLS or len(fs) > DOR_MAX_FUNCTIONS):
        raise ValueError(
            f"exact mode is capped at {DOR_MAX_CELLS} cells and {DOR_MAX_FUNCTIONS} functions"
        )
    target = theta * theta
    mass = [[abs(v) / cells for v in r] for r in rows]
    norms = [sum(m, Fraction(0)) for m in mass]
    owners = _greedy(mass, norms, target)
    if mode == "exact":
        owners = _exact(mass, owners)
        # leftover cells cannot lower any mass
        for c, o in enumerate(owners):
            if o is None and any(m[c] for m in mass):
                owners[c] = max(range(len(fs)), key=lambda i: (mass[i][c], -i))
    assignment = CellAssignment(g, tuple(owners))
    masses = assignment.masses(fs)
    low = min(masses)
    return DorResult(low >= target, target, low, assignment, mode)
