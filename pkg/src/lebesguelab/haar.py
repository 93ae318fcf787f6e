"""Haar systems of partitions of the positive integers and the sigma
embedding of dyadic rationals into them.

A Haar system assigns to every level n a partition of {1, 2, ...} into
2^n infinite cells A^n_0, ..., A^n_{2^n - 1}, with
A^n_j = A^{n+1}_{2j} ∪ A^{n+1}_{2j+1}.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Mapping, Sequence

from .core import DyadicRational, dyadic_enumerate


def bitreverse(j: int, n: int) -> int:
    """Reverse the n low bits of j."""
    out = 0
    for _ in range(n):
        out = (out << 1) | (j & 1)
        j >>= 1
    return out


class HaarSystem:
    """Interface: ``cell_of``, ``membership`` and ``kth_member``.

    Subclasses implement :meth:`cell_of` and :meth:`kth_member`.
    """

    description = "abstract"

    def cell_of(self, n: int, i: int) -> int:
        """The j with i in A^n_j."""
        raise NotImplementedError

    def membership(self, n: int, j: int, i: int) -> bool:
        _check_cell(n, j)
        return self.cell_of(n, i) == j

    def kth_member(self, n: int, j: int, k: int) -> int:
        """The k-th smallest element of A^n_j (k >= 1)."""
        raise NotImplementedError

    def first_member_at_least(self, n: int, j: int, lower: int) -> int:
        """Smallest element of A^n_j that is >= lower."""
        k = 1
        while True:
            i = self.kth_member(n, j, k)
            if i >= lower:
                return i
            k += 1

    def to_json(self) -> dict:
        raise NotImplementedError


def _check_cell(n: int, j: int) -> None:
    if n < 0 or not 0 <= j < 1 << n:
        raise ValueError(f"no cell A^{n}_{j}")


def _check_index(i: int) -> None:
    if i < 1:
        raise ValueError("members are positive integers")


class ResidueHaarSystem(HaarSystem):
    """A^n_j = {i : (i - 1) mod 2^n = r^n_j} for residues r^n_j.

    ``levels[n - 1]`` lists the 2^n residues of level n.  Levels past the
    given ones extend by r^{n+1}_{2j} = r^n_j, r^{n+1}_{2j+1} = r^n_j + 2^n.
    With no levels given this is the bit-reversal system.
    """

    def __init__(self, levels: Sequence[Sequence[int]] = (), description: str | None = None):
        self._levels: list[tuple[int, ...]] = [(0,)]
        for n, residues in enumerate(levels, start=1):
            residues = tuple(int(r) for r in residues)
            if len(residues) != 1 << n:
                raise ValueError(f"level {n} needs {1 << n} residues, got {len(residues)}")
            if sorted(residues) != list(range(1 << n)):
                raise ValueError(f"level {n} residues are not a permutation of 0..{(1 << n) - 1}")
            parent = self._levels[-1]
            mask = (1 << (n - 1)) - 1
            for j, r in enumerate(residues):
                if r & mask != parent[j // 2]:
                    raise ValueError(
                        f"level {n} cell {j}: residue {r} does not refine parent residue {parent[j // 2]}"
                    )
            self._levels.append(residues)
        self._given = len(self._levels) - 1
        self._inverse: dict[int, dict[int, int]] = {}
        self.description = description or ("canonical" if not levels else "residue")

    def residue(self, n: int, j: int) -> int:
        _check_cell(n, j)
        if n <= self._given:
            return self._levels[n][j]
        top = self._given
        # j's high `top` bits select the given ancestor; the remaining low
        # bits are appended in reversed order above bit `top`.
        extra = n - top
        anc = j >> extra
        low = j & ((1 << extra) - 1)
        return self._levels[top][anc] + (bitreverse(low, extra) << top)

    def cell_of(self, n: int, i: int) -> int:
        _check_index(i)
        if n < 0:
            raise ValueError("level must be non-negative")
        r = (i - 1) % (1 << n)
        if n <= self._given:
            inv = self._inverse.get(n)
            if inv is None:
                inv = {res: j for j, res in enumerate(self._levels[n])}
                self._inverse[n] = inv
            return inv[r]
        top = self._given
        extra = n - top
        base = r & ((1 << top) - 1)
        anc = self.cell_of(top, base + 1)
        return (anc << extra) | bitreverse(r >> top, extra)

    def kth_member(self, n: int, j: int, k: int) -> int:
        if k < 1:
            raise ValueError("k starts at 1")
        return self.residue(n, j) + 1 + (k - 1) * (1 << n)

    def first_member_at_least(self, n, j, lower):
        r = self.residue(n, j) + 1
        if lower <= r:
            return r
        step = 1 << n
        return r + -(-(lower - r) // step) * step

    def to_json(self) -> dict:
        if self._given == 0:
            return {"kind": "canonical"}
        return {"kind": "residue", "levels": [list(lv) for lv in self._levels[1:]]}


def canonical_haar() -> ResidueHaarSystem:
    """A^n_j = {i : (i - 1) mod 2^n = bitreverse_n(j)}."""
    return ResidueHaarSystem()


class DyadicLocationSystem(HaarSystem):
    """Cells read off from the positions of points d_i in (0, 1):
    i is in A^n_j when d_i lies in [j/2^n, (j+1)/2^n).

    ``points`` is a callable or mapping i -> DyadicRational; it must be a
    bijection onto the dyadic rationals of (0, 1), which is checked on the
    first ``check_prefix`` indices.  The default is the breadth-first
    enumeration 1/2, 1/4, 3/4, 1/8, ...
    """

    def __init__(
        self,
        points: Callable[[int], DyadicRational] | Mapping[int, DyadicRational] | None = None,
        check_prefix: int = 1 << 10,
        search_limit: int = 1 << 22,
    ):
        self.standard = points is None
        if points is None:
            self._point = dyadic_enumerate
            self._prefix = None
        elif isinstance(points, Mapping):
            self._prefix = len(points)
            self._point = lambda i, _m=points: _m[i]
            check_prefix = min(check_prefix, self._prefix)
        else:
            self._point = points
            self._prefix = None
        self.search_limit = search_limit
        self.description = "dyadic-locations" if self.standard else "custom-locations"
        if not self.standard:
            self._check(check_prefix)

    def _check(self, count: int) -> None:
        seen = set()
        for i in range(1, count + 1):
            d = self._point(i)
            if not isinstance(d, DyadicRational) or d.numerator == 0:
                raise ValueError(f"point {i} -> {d!r} is not a dyadic rational in (0, 1)")
            if d in seen:
                raise ValueError(f"points are not injective: {d} repeats at index {i}")
            seen.add(d)

    def point(self, i: int) -> DyadicRational:
        _check_index(i)
        if self._prefix is not None and i > self._prefix:
            raise IndexError(f"location map only defined up to index {self._prefix}")
        return self._point(i)

    def cell_of(self, n, i):
        if n < 0:
            raise ValueError("level must be non-negative")
        return self.point(i).cell(n)

    def kth_member(self, n, j, k):
        _check_cell(n, j)
        if k < 1:
            raise ValueError("k starts at 1")
        if self.standard:
            return _standard_kth(n, j, k)
        found = 0
        limit = self.search_limit if self._prefix is None else self._prefix
        for i in range(1, limit + 1):
            if self.cell_of(n, i) == j:
                found += 1
                if found == k:
                    return i
        raise LookupError(f"A^{n}_{j} has fewer than {k} members among the first {limit} indices")

    def to_json(self) -> dict:
        if not self.standard:
            raise ValueError("custom location maps are not serializable")
        return {"kind": "dyadic-locations"}


def _standard_kth(n: int, j: int, k: int) -> int:
    # Members of A^n_j in increasing index order are the dyadics of
    # [j/2^n, (j+1)/2^n) taken level by level, increasing within a level.
    # Levels <= n contribute at most one point each.
    from .core import dyadic_index

    for level in range(1, n + 1):
        shift = n - level
        if j % (1 << shift) == 0 and (j >> shift) % 2 == 1:
            k -= 1
            if k == 0:
                return dyadic_index(DyadicRational(j >> shift, level))
    level = n + 1
    while True:
        count = 1 << (level - n - 1)
        if k <= count:
            num = (j << (level - n)) + 2 * k - 1
            return dyadic_index(DyadicRational(num, level))
        k -= count
        level += 1


def haar_from_dyadic_locations(points=None, **kwargs) -> DyadicLocationSystem:
    return DyadicLocationSystem(points, **kwargs)


def sigma(d: DyadicRational | Fraction | str, system: HaarSystem) -> int:
    """The (2^n)-th member of A^n_j for d = j/2^n reduced; sigma(0) is the
    first member of A^0_0."""
    if isinstance(d, str):
        d = DyadicRational.parse(d)
    elif isinstance(d, Fraction):
        d = DyadicRational.from_fraction(d)
    elif not isinstance(d, DyadicRational):
        raise TypeError("sigma takes a dyadic rational in [0, 1)")
    return system.kth_member(d.level, d.numerator, 1 << d.level)


def load_haar_system(spec: dict | str) -> HaarSystem:
    """Build a system from ``"canonical"``, ``"dyadic-locations"`` or a
    mapping such as ``{"kind": "residue", "levels": [[0, 1], [0, 2, 1, 3]]}``."""
    if isinstance(spec, str):
        spec = {"kind": spec}
    kind = spec.get("kind")
    if kind == "canonical":
        return canonical_haar()
    if kind == "dyadic-locations":
        return haar_from_dyadic_locations()
    if kind == "residue":
        levels = spec.get("levels")
        if not isinstance(levels, list):
            raise ValueError("residue system needs a 'levels' list")
        return ResidueHaarSystem(levels)
    raise ValueError(f"unknown Haar system kind {kind!r}")
