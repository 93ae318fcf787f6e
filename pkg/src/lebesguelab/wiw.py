"""The norming set W_iw: weighted functional trees, their validation and
evaluation, bounded exhaustive norm computation, and the two explicit
functional constructions used for block sequences.

A functional is either a leaf ``±e_i*`` (infinite weight) or a node

    f = (1 / (a_{k_1} ... a_{k_l})) * (f_1 + ... + f_r)

whose children are successive, very fast growing (max supp f_{q-1} <
w(f_q)) and S_{b_{k_1} + ... + b_{k_l}}-admissible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from itertools import count
from typing import Callable, Iterable, Sequence

from .core import FinVec, vsum
from .norms import NormValue
from .schreier import schreier_member


# ---------------------------------------------------------------------------
# weight schedules


def _default_a(k: int) -> int:
    return 2 ** k


class WeightSchedule:
    """Sequences a (weights, a_1 = 2) and b (admissibility orders, b_1 = 1).

    ``a`` and ``b`` may be callables k -> int (k >= 1) or finite lists; the
    default is a_k = 2^k and b_{k+1} = b_k * ceil(ln a_{k+1}^2) + 1.  With
    ``strict`` the growth condition b_{k+1} > b_k ln(a_{k+1}^2) is enforced
    on the first ``check_upto`` terms.
    """

    def __init__(
        self,
        a: Callable[[int], int] | Sequence[int] | None = None,
        b: Callable[[int], int] | Sequence[int] | None = None,
        strict: bool = True,
        check_upto: int = 8,
    ):
        self._a_src = a if a is not None else _default_a
        self._b_src = b
        self.strict = strict
        self._a_cache: dict[int, int] = {}
        self._b_cache: dict[int, int] = {}
        self._validate(check_upto)

    def _len(self) -> int | None:
        lens = [len(s) for s in (self._a_src, self._b_src) if isinstance(s, Sequence)]
        return min(lens) if lens else None

    def a(self, k: int) -> int:
        if k < 1:
            raise ValueError("weight indices start at 1")
        if k not in self._a_cache:
            src = self._a_src
            self._a_cache[k] = int(src[k - 1] if isinstance(src, Sequence) else src(k))
        return self._a_cache[k]

    def b(self, k: int) -> int:
        if k < 1:
            raise ValueError("weight indices start at 1")
        if k not in self._b_cache:
            src = self._b_src
            if src is None:
                self._b_cache[k] = 1 if k == 1 else self.b(k - 1) * math.ceil(math.log(self.a(k) ** 2)) + 1
            else:
                self._b_cache[k] = int(src[k - 1] if isinstance(src, Sequence) else src(k))
        return self._b_cache[k]

    @property
    def max_index(self) -> int | None:
        """Largest usable weight index for finite schedules, else None."""
        return self._len()

    def _validate(self, upto: int) -> None:
        n = self._len()
        upto = upto if n is None else min(upto, n)
        if upto < 1:
            raise ValueError("empty weight schedule")
        if self.a(1) != 2:
            raise ValueError("a_1 must be 2")
        if self.b(1) != 1:
            raise ValueError("b_1 must be 1")
        for k in range(1, upto):
            if self.a(k + 1) <= self.a(k):
                raise ValueError(f"a is not strictly increasing at k = {k}")
            if self.b(k + 1) <= self.b(k):
                raise ValueError(f"b is not strictly increasing at k = {k}")
            if self.strict and not self.b(k + 1) > self.b(k) * math.log(self.a(k + 1) ** 2):
                raise ValueError(f"b_{k + 1} <= b_{k} log(a_{k + 1}^2)")

    def weight(self, indices: Sequence[int]) -> int:
        return math.prod(self.a(k) for k in indices)

    def order(self, indices: Sequence[int]) -> int:
        return sum(self.b(k) for k in indices)

    def to_json(self) -> dict:
        if self._a_src is _default_a and self._b_src is None:
            return {"kind": "default", "strict": self.strict}
        n = self._len() or 8
        return {
            "kind": "explicit",
            "a": [self.a(k) for k in range(1, n + 1)],
            "b": [self.b(k) for k in range(1, n + 1)],
            "strict": self.strict,
        }

    @classmethod
    def from_json(cls, data: dict | None) -> "WeightSchedule":
        if not data or data.get("kind", "default") == "default":
            return cls(strict=(data or {}).get("strict", True))
        return cls(list(data["a"]), list(data["b"]), strict=data.get("strict", True))


# ---------------------------------------------------------------------------
# functionals


@dataclass(frozen=True)
class Leaf:
    sign: int
    index: int

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise ValueError("leaf sign must be +1 or -1")
        if self.index < 1:
            raise ValueError("leaf index must be positive")

    @property
    def min_support(self) -> int:
        return self.index

    @property
    def max_support(self) -> int:
        return self.index

    @property
    def depth(self) -> int:
        return 0

    @cached_property
    def encoding(self) -> str:
        return f"(leaf {'+' if self.sign > 0 else '-'} {self.index})"


@dataclass(frozen=True)
class Node:
    weight_indices: tuple[int, ...]
    children: tuple["Functional", ...]

    def __post_init__(self):
        object.__setattr__(self, "weight_indices", tuple(self.weight_indices))
        object.__setattr__(self, "children", tuple(self.children))

    @property
    def min_support(self) -> int:
        return self.children[0].min_support

    @property
    def max_support(self) -> int:
        return self.children[-1].max_support

    @cached_property
    def depth(self) -> int:
        return 1 + max((c.depth for c in self.children), default=0)

    @cached_property
    def encoding(self) -> str:
        ks = ",".join(str(k) for k in self.weight_indices)
        return f"(w {ks} " + " ".join(c.encoding for c in self.children) + ")"


Functional = Leaf | Node


def weight_of(f: Functional, sched: WeightSchedule) -> float | int:
    """w(f); leaves have infinite weight."""
    if isinstance(f, Leaf):
        return math.inf
    return sched.weight(f.weight_indices)


def encode(f: Functional) -> str:
    return f.encoding


def parse_functional(text: str) -> Functional:
    """Inverse of :func:`encode`, e.g. ``"(w 1 (leaf + 2) (leaf + 3))"``."""
    tokens = text.replace("(", " ( ").replace(")", " ) ").split()
    pos = 0

    def take() -> str:
        nonlocal pos
        if pos >= len(tokens):
            raise ValueError("unexpected end of functional encoding")
        tok = tokens[pos]
        pos += 1
        return tok

    def parse() -> Functional:
        if take() != "(":
            raise ValueError("expected '('")
        head = take()
        if head == "leaf":
            sign = take()
            if sign not in "+-" or len(sign) != 1:
                raise ValueError(f"bad leaf sign {sign!r}")
            idx = int(take())
            if take() != ")":
                raise ValueError("expected ')' after leaf")
            return Leaf(1 if sign == "+" else -1, idx)
        if head == "w":
            ks = tuple(int(k) for k in take().split(","))
            children = []
            while pos < len(tokens) and tokens[pos] != ")":
                children.append(parse())
            take()
            return Node(ks, tuple(children))
        raise ValueError(f"unknown functional head {head!r}")

    f = parse()
    if pos != len(tokens):
        raise ValueError("trailing tokens after functional")
    return f


@dataclass(frozen=True)
class Violation:
    path: tuple[int, ...]
    rule: str
    detail: str

    def __str__(self) -> str:
        where = "root" if not self.path else "child " + ".".join(map(str, self.path))
        return f"{where}: {self.rule}: {self.detail}"


@dataclass(frozen=True)
class Validation:
    ok: bool
    violation: Violation | None = None

    def __bool__(self) -> bool:
        return self.ok


class InvalidFunctional(ValueError):
    def __init__(self, violation: Violation):
        super().__init__(str(violation))
        self.violation = violation


def validate_functional(f: Functional, sched: WeightSchedule) -> Validation:
    """Check membership of f in W_iw; reports the first violation in
    pre-order (node rules before its children)."""
    v = _first_violation(f, sched, ())
    return Validation(v is None, v)


def _first_violation(f, sched, path):
    if isinstance(f, Leaf):
        return None
    if not isinstance(f, Node):
        return Violation(path, "type", f"not a functional: {f!r}")
    if not f.weight_indices:
        return Violation(path, "weight-index", "empty weight-index tuple")
    limit = sched.max_index
    for k in f.weight_indices:
        if k < 1 or (limit is not None and k > limit):
            return Violation(path, "weight-index", f"weight index {k} outside schedule")
    if not f.children:
        return Violation(path, "empty", "node without children")
    kids = f.children
    for q in range(1, len(kids)):
        if not kids[q - 1].max_support < kids[q].min_support:
            return Violation(
                path, "successive",
                f"children {q - 1} and {q} overlap (max supp {kids[q - 1].max_support} >= min supp {kids[q].min_support})",
            )
    for q in range(1, len(kids)):
        w = weight_of(kids[q], sched)
        if not kids[q - 1].max_support < w:
            return Violation(
                path, "very-fast-growing",
                f"max supp of child {q - 1} is {kids[q - 1].max_support}, not below weight {w} of child {q}",
            )
    order = sched.order(f.weight_indices)
    mins = [c.min_support for c in kids]
    if not schreier_member(mins, order):
        return Violation(path, "admissibility", f"minimal supports {mins} not in S_{order}")
    for q, c in enumerate(kids):
        v = _first_violation(c, sched, path + (q,))
        if v is not None:
            return v
    return None


def _evaluate(f: Functional, coef: dict[int, Fraction], sched: WeightSchedule) -> Fraction:
    if isinstance(f, Leaf):
        return f.sign * coef.get(f.index, Fraction(0))
    total = sum((_evaluate(c, coef, sched) for c in f.children), Fraction(0))
    return total / sched.weight(f.weight_indices)


def eval_functional(f: Functional, x: FinVec, sched: WeightSchedule) -> Fraction:
    """Exact f(x).  Raises :class:`InvalidFunctional` if f is not in W_iw."""
    check = validate_functional(f, sched)
    if not check:
        raise InvalidFunctional(check.violation)
    return _evaluate(f, dict(x.items()), sched)


def functional_vector(f: Functional, sched: WeightSchedule) -> FinVec:
    """f as a finitely supported coefficient vector."""
    if isinstance(f, Leaf):
        return FinVec({f.index: f.sign})
    return vsum(functional_vector(c, sched) for c in f.children) / sched.weight(f.weight_indices)


# ---------------------------------------------------------------------------
# certificates


@dataclass(frozen=True)
class NormCertificate:
    """``witness(target) == value``, hence ``value <= ||target||``."""

    value: Fraction
    witness: Functional
    target: FinVec

    def to_json(self) -> dict:
        return {"value": str(self.value), "witness": self.witness.encoding, "target": str(self.target)}

    @classmethod
    def from_json(cls, data: dict) -> "NormCertificate":
        return cls(Fraction(data["value"]), parse_functional(data["witness"]), FinVec.parse(data["target"]))


# ---------------------------------------------------------------------------
# bounded exhaustive search


@dataclass(frozen=True)
class WiwBudget:
    depth_cap: int = 2
    weight_cap: int = 16
    support_cap: int = 8


def _weight_options(sched: WeightSchedule, cap: int) -> list[tuple[int, int, tuple[int, ...]]]:
    """(weight, order, indices) for achievable weights <= cap, keeping the
    largest order per weight (S_s grows with s) and then the least tuple."""
    best: dict[int, tuple[int, tuple[int, ...]]] = {}

    def rec(start: int, acc: list[int], w: int):
        if acc:
            s = sched.order(acc)
            key = tuple(acc)
            cur = best.get(w)
            if cur is None or s > cur[0] or (s == cur[0] and key < cur[1]):
                best[w] = (s, key)
        limit = sched.max_index
        for k in count(start):
            if limit is not None and k > limit:
                break
            ak = sched.a(k)
            if w * ak > cap:
                break
            acc.append(k)
            rec(k, acc, w * ak)
            acc.pop()

    rec(1, [], 1)
    return sorted((w, s, ks) for w, (s, ks) in best.items())


def _min_weight_above(sched: WeightSchedule, t: int) -> int:
    """Smallest achievable weight strictly greater than t."""
    cap = 2 * max(t, 1) + 2
    opts = [w for w, _, _ in _weight_options(sched, cap) if w > t]
    if opts:
        return min(opts)
    return sched.a(1) ** (max(t, 1).bit_length() + 1)


def _better(a, b) -> bool:
    """Is candidate a = (value, functional) preferable to b?"""
    if b is None:
        return True
    if a[0] != b[0]:
        return a[0] > b[0]
    if a[1] is None or b[1] is None:
        return False
    return a[1].encoding < b[1].encoding


class _Search:
    """Exact sup of f(|x|) over functionals with support in supp(x), node
    depth <= depth_cap and node weights <= weight_cap.

    With ``relaxed`` the capped-out subtrees are replaced by the bound
    mass / w, which makes the result an upper bound for all of W_iw.
    """

    def __init__(self, x: FinVec, sched: WeightSchedule, depth_cap: int, weight_cap: int, relaxed: bool):
        self.idx = x.support
        self.sign = [1 if c > 0 else -1 for c in x.coefficients()]
        self.mag = [abs(c) for c in x.coefficients()]
        self.prefix = [Fraction(0)]
        for m in self.mag:
            self.prefix.append(self.prefix[-1] + m)
        self.sched = sched
        self.depth_cap = depth_cap
        self.weight_cap = weight_cap
        self.relaxed = relaxed
        self.options = _weight_options(sched, weight_cap)
        self._heavy: dict[int, int] = {}
        self.best = lru_cache(maxsize=None)(self._best)
        self.node = lru_cache(maxsize=None)(self._node)

    def mass(self, a: int, b: int) -> Fraction:
        return self.prefix[b + 1] - self.prefix[a]

    def heavy(self, t: int) -> int:
        if t not in self._heavy:
            self._heavy[t] = _min_weight_above(self.sched, t)
        return self._heavy[t]

    def leaf(self, a: int, b: int):
        p = max(range(a, b + 1), key=lambda i: (self.mag[i], -i))
        return self.mag[p], Leaf(self.sign[p], self.idx[p])

    def _best(self, a: int, b: int, tau: int, depth: int):
        """Best (value, functional) within positions a..b with weight > tau."""
        best = self.leaf(a, b)
        if self.relaxed:
            floor = tau if depth == 0 else max(tau, self.weight_cap)
            bound = (self.mass(a, b) / self.heavy(floor), None)
            if bound[0] > best[0]:
                best = bound
        if depth == 0:
            return best
        for w, s, ks in self.options:
            if w <= tau:
                continue
            if self.mass(a, b) / w <= best[0]:
                break  # heavier weights give smaller bounds
            cand = self.node(a, b, ks, s, w, depth)
            if cand is not None and _better(cand, best):
                best = cand
        return best

    def _node(self, a, b, ks, s, w, depth):
        best_sum = None
        best_kids = None
        mag = self.mag

        def chain(pos, tau, mins, total, kids):
            nonlocal best_sum, best_kids
            if kids:
                cand = (total, kids)
                if best_sum is None or total > best_sum or (
                    total == best_sum and self._kids_key(kids) < self._kids_key(best_kids)
                ):
                    best_sum, best_kids = total, list(kids)
            if pos > b:
                return
            if best_sum is not None and total + self.mass(pos, b) < best_sum:
                return
            for lo in range(pos, b + 1):
                new_mins = mins + (self.idx[lo],)
                if not schreier_member(new_mins, s):
                    continue  # a later, larger start may still be admissible
                for hi in range(lo, b + 1):
                    val, f = self.best(lo, hi, tau, depth - 1)
                    kids.append((val, f))
                    chain(hi + 1, self.idx[hi], new_mins, total + val, kids)
                    kids.pop()

        chain(a, 0, (), Fraction(0), [])
        if best_sum is None:
            return None
        if any(f is None for _, f in best_kids):
            return best_sum / w, None
        return best_sum / w, Node(ks, tuple(f for _, f in best_kids))

    @staticmethod
    def _kids_key(kids):
        return tuple("" if f is None else f.encoding for _, f in kids)

    def run(self):
        if not self.idx:
            return Fraction(0), None
        return self.best(0, len(self.idx) - 1, 0, self.depth_cap)


def wiw_exhaustive_norm(
    x: FinVec,
    sched: WeightSchedule | None = None,
    depth_cap: int = 3,
    weight_cap: int = 64,
    support_cap: int = 8,
) -> NormValue:
    """Enclosure of the X_iw norm of x.

    The lower end is the exact sup over functionals within the depth and
    weight caps.  The upper end comes from the same search with every
    capped-out subtree replaced by the bound ||x restricted||_1 / w; the
    value is exact when the two meet.
    """
    sched = sched or WeightSchedule()
    if len(x) > support_cap:
        return NormValue.between(x.linf(), x.l1())
    if not x:
        return NormValue.of(0)
    lo, _ = _Search(x, sched, depth_cap, weight_cap, relaxed=False).run()
    hi, _ = _Search(x, sched, depth_cap, weight_cap, relaxed=True).run()
    hi = min(hi, x.l1())
    return NormValue.between(lo, max(lo, hi))


def wiw_lower_bound(x: FinVec, sched: WeightSchedule | None = None, budget: WiwBudget | None = None) -> NormCertificate:
    """Best functional found within ``budget``, as a checkable certificate.

    Small supports get the exhaustive search; larger ones get the single
    leaf and greedy one-level functionals.
    """
    sched = sched or WeightSchedule()
    budget = budget or WiwBudget()
    if not x:
        raise ValueError("zero vector has no norming functional")
    if len(x) <= budget.support_cap:
        val, f = _Search(x, sched, budget.depth_cap, budget.weight_cap, relaxed=False).run()
    else:
        val, f = _greedy_functional(x, sched, budget)
    return NormCertificate(val, f, x)


def _greedy_functional(x: FinVec, sched: WeightSchedule, budget: WiwBudget):
    items = x.items()
    i, c = max(items, key=lambda t: (abs(t[1]), -t[0]))
    best = (abs(c), Leaf(1 if c > 0 else -1, i))
    if budget.depth_cap < 1:
        return best
    for w, s, ks in _weight_options(sched, budget.weight_cap):
        if x.l1() / w <= best[0]:
            break
        for start in range(len(items)):
            chosen = [items[start]]
            mins = [items[start][0]]
            rest = sorted(items[start + 1:], key=lambda t: (-abs(t[1]), t[0]))
            for cand in rest:
                trial = sorted(mins + [cand[0]])
                if schreier_member(trial, s):
                    mins = trial
                    chosen.append(cand)
            chosen.sort()
            total = sum(abs(cc) for _, cc in chosen)
            f = Node(ks, tuple(Leaf(1 if cc > 0 else -1, ii) for ii, cc in chosen))
            if _better((total / w, f), best):
                best = (total / w, f)
    return best


# ---------------------------------------------------------------------------
# explicit constructions on block sequences


class ConstructionError(ValueError):
    """A combined functional could not be formed; ``pair`` names the
    offending (block, child) positions."""

    def __init__(self, message: str, pair=None):
        super().__init__(message)
        self.pair = pair


@dataclass(frozen=True)
class Case1Result:
    functional: Node
    value: Fraction          # F(x_1 + ... + x_r)
    per_block: tuple[Fraction, ...]   # f_l(x_l) - f^l_1(x_l) / w
    per_block_floor: tuple[Fraction, ...]  # f_l(x_l) - 1 / w
    weight: int

    @property
    def chain_holds(self) -> bool:
        """value == (1/a_1) sum per_block, and each per_block >= floor."""
        # a_1 = 2 in every schedule
        return self.value == sum(self.per_block, Fraction(0)) / 2 and all(
            p >= q for p, q in zip(self.per_block, self.per_block_floor)
        )


def case1_functional(
    blocks: Sequence[FinVec],
    functionals: Sequence[Node],
    weight_indices: Sequence[int],
    sched: WeightSchedule | None = None,
) -> Case1Result:
    """Drop the first child of every f_l and gather all remaining children
    under one node of weight w * a_1, where w is the common weight of the
    f_l with index tuple ``weight_indices``.
    """
    sched = sched or WeightSchedule()
    ks = tuple(weight_indices)
    if len(blocks) != len(functionals) or not blocks:
        raise ConstructionError("need one functional per block")
    if any(not v for v in blocks):
        raise ConstructionError("blocks must be nonzero")
    for l in range(1, len(blocks)):
        if not blocks[l - 1].max_support < blocks[l].min_support:
            raise ConstructionError(f"blocks {l - 1} and {l} are not successive", (l - 1, l))
    for l, f in enumerate(functionals):
        if not isinstance(f, Node) or f.weight_indices != ks:
            raise ConstructionError(f"functional {l} does not carry weight indices {ks}", (l, None))
        check = validate_functional(f, sched)
        if not check:
            raise ConstructionError(f"functional {l} is invalid: {check.violation}", (l, None))
    w = sched.weight(ks)
    kept: list[Functional] = []
    origin: list[tuple[int, int]] = []
    for l, f in enumerate(functionals):
        for q, child in enumerate(f.children[1:], start=1):
            kept.append(child)
            origin.append((l, q))
    if not kept:
        raise ConstructionError("every functional has a single child; nothing left to combine")
    for q in range(1, len(kept)):
        prev, cur = kept[q - 1], kept[q]
        if not prev.max_support < cur.min_support:
            raise ConstructionError(f"children {origin[q - 1]} and {origin[q]} are not successive", (origin[q - 1], origin[q]))
        if not prev.max_support < weight_of(cur, sched):
            raise ConstructionError(
                f"child {origin[q]} has weight {weight_of(cur, sched)}, not above max supp {prev.max_support} of child {origin[q - 1]}",
                (origin[q - 1], origin[q]),
            )
    combined = Node(ks + (1,), tuple(kept))
    check = validate_functional(combined, sched)
    if not check:
        raise ConstructionError(f"combined functional invalid: {check.violation}")
    value = eval_functional(combined, vsum(blocks), sched)
    per_block = []
    floors = []
    for f, x in zip(functionals, blocks):
        coef = dict(x.items())
        fx = _evaluate(f, coef, sched)
        first = _evaluate(f.children[0], coef, sched)
        per_block.append(fx - first / w)
        floors.append(fx - Fraction(1, w))
    return Case1Result(combined, value, tuple(per_block), tuple(floors), w)


def case2_functional(
    blocks: Sequence[FinVec],
    functionals: Sequence[Functional],
    sched: WeightSchedule | None = None,
) -> NormCertificate:
    """F = (1/a_1) sum f_i for S_1-admissible blocks with very fast growing
    norming functionals; returns the certificate F(sum x_i)."""
    sched = sched or WeightSchedule()
    if len(blocks) != len(functionals) or not blocks:
        raise ConstructionError("need one functional per block")
    F = Node((1,), tuple(functionals))
    check = validate_functional(F, sched)
    if not check:
        raise ConstructionError(f"combined functional invalid: {check.violation}")
    target = vsum(blocks)
    return NormCertificate(eval_functional(F, target, sched), F, target)


def build_case2_instance(n: int, sched: WeightSchedule | None = None, weighted: bool = False):
    """2^n successive blocks starting at index 2^n with norming functionals.

    Plain instances use unit vectors and leaf functionals.  Weighted ones
    use two-point blocks x_i = (a_k / 2)(e_p + e_{p+1}) normed by
    (1/a_k)(e_p* + e_{p+1}*) with a_k above the previous block's maximum.
    Returns (blocks, functionals), each f_i(x_i) = 1.
    """
    sched = sched or WeightSchedule()
    size = 1 << n
    blocks: list[FinVec] = []
    funcs: list[Functional] = []
    p = max(size, 2)
    prev_max = 0
    for _ in range(size):
        if not weighted:
            blocks.append(FinVec.unit(p))
            funcs.append(Leaf(1, p))
            prev_max = p
            p += 1
            continue
        k = 1
        while sched.a(k) <= prev_max:
            k += 1
        ak = sched.a(k)
        blocks.append(FinVec({p: Fraction(ak, 2), p + 1: Fraction(ak, 2)}))
        funcs.append(Node((k,), (Leaf(1, p), Leaf(1, p + 1))))
        prev_max = p + 1
        p += 2
    return blocks, funcs


def build_case1_instance(sizes: Sequence[int], start: int, sched: WeightSchedule | None = None, nested: bool = False):
    """Blocks x_l normed by weight-a_1 functionals f_l with f_l(x_l) = 1.

    Block l covers ``sizes[l]`` consecutive indices; its functional is
    (1/2) times leaves on them (S_1-admissible, so sizes[l] must not exceed
    the block's first index).  With ``nested`` every child after the
    first is replaced by a one-leaf node of weight a_k exceeding the
    previous child's support, which exercises the growth rule.
    """
    sched = sched or WeightSchedule()
    blocks, funcs = [], []
    p = start
    for size in sizes:
        if size < 2:
            raise ValueError("blocks need at least two points so a child survives")
        if size > p:
            raise ValueError("block size exceeds its first index; not S_1-admissible")
        idx = list(range(p, p + size))
        children: list[Functional] = []
        prev = 0
        scale: list[Fraction] = []
        for q, i in enumerate(idx):
            if nested and q > 0:
                k = 1
                while sched.a(k) <= prev:
                    k += 1
                children.append(Node((k,), (Leaf(1, i),)))
                scale.append(Fraction(sched.a(k)))
            else:
                children.append(Leaf(1, i))
                scale.append(Fraction(1))
            prev = i
        f = Node((1,), tuple(children))
        # x_l = c * sum scale_i e_i with f(x_l) = (1/2) c * size = 1
        c = Fraction(2, size)
        blocks.append(FinVec({i: c * s for i, s in zip(idx, scale)}))
        funcs.append(f)
        p += size
    return blocks, funcs
