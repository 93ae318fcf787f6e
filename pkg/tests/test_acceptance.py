"""Acceptance criteria 1-12, each at its stated tolerance and time limit.

Run with ``pytest tests/test_acceptance.py``; the terminal summary carries
one PASS/FAIL line per criterion.
"""

import copy
import itertools
import math
import random
import time
from fractions import Fraction

import pytest

from lebesguelab.cli import CHECKERS, digest_of, run, verify_record
from lebesguelab.core import FinVec, vsum
from lebesguelab.experiments import (
    build_f_from_haar,
    check_haar_witness,
    cyclic_average_check,
    haar_ell1_witness,
    haar_level_value,
    riemann_sup,
    standard_function,
)
from lebesguelab.haar import canonical_haar
from lebesguelab.l1lab import StepFunction, dor_disjointify, khintchine_check, theta_lower_estimate
from lebesguelab.norms import C0Norm, L1Norm, TsirelsonNorm, tsirelson_bruteforce, tsirelson_dp
from lebesguelab.schreier import schreier_member, schreier_member_exhaustive
from lebesguelab.wiw import (
    WeightSchedule,
    build_case1_instance,
    build_case2_instance,
    case1_functional,
    case2_functional,
    validate_functional,
)

CAN = canonical_haar()
STD = standard_function()
SCHED = WeightSchedule()
HALF = Fraction(1, 2)


class Clock:
    def __init__(self, record_property, limit=None):
        self.limit, self.record = limit, record_property

    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.t0
        self.record("detail", f"{self.elapsed:.2f} s" + (f" < {self.limit} s" if self.limit else ""))
        if exc[0] is None and self.limit is not None:
            assert self.elapsed < self.limit, f"took {self.elapsed:.2f} s, limit {self.limit} s"


# ---------------------------------------------------------------------------
# instance generators shared with the certificate-integrity criterion


def tsirelson_vectors():
    rng = random.Random(7)
    out = []
    for _ in range(100):
        idx = rng.sample(range(1, 31), rng.randint(1, 10))
        out.append(FinVec({i: Fraction(rng.choice([-1, 1]) * rng.randint(1, 9), rng.randint(1, 9)) for i in idx}))
    return out


def random_steps(rng, n, level):
    return [
        StepFunction(level, tuple(Fraction(rng.randint(-4, 4), rng.randint(1, 4)) for _ in range(1 << level)))
        for _ in range(n)
    ]


def khintchine_instances():
    rng = random.Random(9)
    return [random_steps(rng, rng.randint(1, 10), rng.randint(0, 6)) for _ in range(200)]


def certified_dor_instances():
    rng = random.Random(10)
    out = []
    for _ in range(40):
        n, level = rng.randint(1, 5), rng.randint(1, 4)
        cells = list(range(1 << level))
        rng.shuffle(cells)
        if n > len(cells):
            n = len(cells)
        # disjoint supports: each function lives on its own set of cells
        owners = [i % n for i in range(len(cells))]
        fs = []
        for i in range(n):
            mine = [c for c, o in zip(cells, owners) if o == i and rng.random() < 0.8] or [cells[i]]
            vals = [Fraction(0)] * (1 << level)
            for c in mine:
                vals[c] = Fraction(rng.choice([-1, 1]) * rng.randint(1, 5), rng.randint(1, 3))
            f = StepFunction(level, tuple(vals))
            scale = rng.choice([Fraction(1, 2), Fraction(3, 4), Fraction(1)]) / f.l1_norm()
            fs.append(StepFunction(level, tuple(v * scale for v in vals)))
        out.append(fs)
    return out


def general_dor_instances():
    rng = random.Random(11)
    return [random_steps(rng, rng.randint(1, 5), rng.randint(0, 4)) for _ in range(40)]


def cyclic_instances(oracle_seed):
    rng = random.Random(oracle_seed)
    out = []
    for _ in range(100):
        m = rng.randint(0, 3)
        pos, ws = rng.randint(1, 6), []
        for _ in range(1 << m):
            size = rng.randint(1, 3)
            ws.append(FinVec({pos + k: Fraction(rng.randint(-5, 5) or 1, rng.randint(1, 4)) for k in range(size)}))
            pos += size + rng.randint(0, 2)
        a = [Fraction(rng.randint(0, 6), rng.randint(1, 4)) for _ in ws]
        out.append((ws, a))
    return out


# ---------------------------------------------------------------------------


@pytest.mark.criterion(1, "c0 Riemann sup of the standard function is exactly 2^-m, m = 1..12, < 1 s")
def test_criterion_01(record_property):
    with Clock(record_property, 1):
        reps = [riemann_sup(STD, m, C0Norm()) for m in range(1, 13)]
    for m, rep in enumerate(reps, start=1):
        assert rep.exact_sup and rep.value.exact and rep.value.value == Fraction(1, 1 << m)


@pytest.mark.criterion(2, "l1 Riemann sup of the standard function is exactly 1, m = 1..12, < 1 s")
def test_criterion_02(record_property):
    with Clock(record_property, 1):
        reps = [riemann_sup(STD, m, L1Norm()) for m in range(1, 13)]
    assert all(rep.exact_sup and rep.value.exact and rep.value.value == 1 for rep in reps)


@pytest.mark.criterion(3, "Tsirelson Haar-l1 witness >= 1/2 with re-validating certificate, n <= 10, < 10 s")
def test_criterion_03(record_property):
    oracle = TsirelsonNorm()
    with Clock(record_property, 10):
        levels: dict = {}
        reps = [haar_ell1_witness(oracle, CAN, n, 10, _levels=levels) for n in range(0, 11)]
        for rep in reps:
            again = check_haar_witness(oracle, CAN, rep.witness["m"], rep.witness["indices"])
            assert again == rep.value
    assert all(rep.value.lower >= HALF for rep in reps)


@pytest.mark.criterion(4, "Case-2 functional validates and certifies average >= 1/2, n <= 6, exact, < 5 s")
def test_criterion_04(record_property):
    with Clock(record_property, 5):
        for weighted in (False, True):
            for n in range(0, 7):
                blocks, funcs = build_case2_instance(n, SCHED, weighted=weighted)
                cert = case2_functional(blocks, funcs, SCHED)
                assert validate_functional(cert.witness, SCHED)
                assert cert.target == vsum(blocks)
                assert isinstance(cert.value, Fraction)
                assert cert.value / (1 << n) >= HALF


@pytest.mark.criterion(5, "Case-1 functional reproduces the per-block lower-bound chain, 2 <= r <= 8, exact")
def test_criterion_05(record_property):
    with Clock(record_property):
        for r in range(2, 9):
            for nested in (False, True):
                sizes = [2 + (l % 3) for l in range(r)]
                blocks, funcs = build_case1_instance(sizes, 1 << 4, SCHED, nested=nested)
                res = case1_functional(blocks, funcs, (1,), SCHED)
                assert validate_functional(res.functional, SCHED)
                assert res.chain_holds
                assert all(p >= HALF for p in res.per_block)
                assert res.value >= Fraction(r, 4)


@pytest.mark.criterion(6, "f from Haar: l1 Riemann sup >= Haar level value; c0 profiles <= 2^-m; m <= 10, exact")
def test_criterion_06(record_property):
    f = build_f_from_haar(CAN)
    with Clock(record_property):
        for m in range(1, 11):
            riem = riemann_sup(f, m, L1Norm())
            haar = haar_level_value(L1Norm(), CAN, m)
            assert riem.exact_sup and haar.exact_sup
            assert riem.value.lower >= haar.value.upper
            riem = riemann_sup(f, m, C0Norm())
            haar = haar_level_value(C0Norm(), CAN, m)
            assert riem.exact_sup and haar.exact_sup
            assert riem.value.upper <= Fraction(1, 1 << m) and haar.value.upper <= Fraction(1, 1 << m)


@pytest.mark.criterion(7, "Tsirelson DP equals brute force on 100 random vectors, support <= 10, < 60 s")
def test_criterion_07(record_property):
    vectors = tsirelson_vectors()
    with Clock(record_property, 60):
        for x in vectors:
            assert tsirelson_dp(x) == tsirelson_bruteforce(x), x


UNIVERSE = [F for k in range(0, 13) for F in itertools.combinations(range(1, 13), k)]


@pytest.mark.criterion(8, "Schreier greedy equals exhaustive on all F in [1,12], n <= 3, with closure properties, < 30 s")
def test_criterion_08(record_property):
    with Clock(record_property, 30):
        members = {}
        for n in range(0, 4):
            members[n] = set()
            for F in UNIVERSE:
                got = schreier_member(F, n)
                assert got == schreier_member_exhaustive(F, n), (F, n)
                if got:
                    members[n].add(F)
        members[4] = {F for F in UNIVERSE if schreier_member(F, 4)}
        for n in range(0, 4):
            for F in members[n]:
                assert F in members[n + 1]
                for i in range(len(F)):
                    assert F[:i] + F[i + 1:] in members[n]
                    pushed = F[:i] + (F[i] + 1,) + F[i + 1:]
                    if pushed[i] <= 12 and (i + 1 == len(F) or pushed[i] < F[i + 1]):
                        assert pushed in members[n]


@pytest.mark.criterion(9, "Khintchine lhs >= rhs/sqrt2 - 1e-9 on 200 instances; equality instance within 1e-12")
def test_criterion_09(record_property):
    with Clock(record_property):
        for fs in khintchine_instances():
            rep = khintchine_check(fs, Fraction(1, 10 ** 9))
            assert rep.sqrt_half_holds, [f.format() for f in fs]
            one = StepFunction.constant(1)
        rep = khintchine_check([one, one])
        lo, hi = rep.ratio
    assert abs(lo - 1 / math.sqrt(2)) <= 1e-12 and abs(hi - 1 / math.sqrt(2)) <= 1e-12


@pytest.mark.criterion(10, "Dor: exact succeeds at theta^2 on certified instances; exact >= greedy; n <= 5, grid <= 16, < 60 s")
def test_criterion_10(record_property):
    with Clock(record_property, 60):
        certified = 0
        for fs in certified_dor_instances():
            est = theta_lower_estimate(fs)
            assert est.certified
            if est.value == 0:
                continue
            certified += 1
            assert dor_disjointify(fs, est.value).success
        for fs in certified_dor_instances() + general_dor_instances():
            theta = Fraction(1, 2)
            exact = dor_disjointify(fs, theta)
            greedy = dor_disjointify(fs, theta, "greedy")
            assert exact.min_mass >= greedy.min_mass
    assert certified == 40


@pytest.mark.criterion(11, "cyclic averaging triangle relation holds exactly on 100 instances per oracle, m <= 3")
def test_criterion_11(record_property):
    with Clock(record_property):
        for seed, oracle in enumerate((L1Norm(), C0Norm(), TsirelsonNorm())):
            for ws, a in cyclic_instances(seed):
                rep = cyclic_average_check(oracle, ws, a)
                assert rep.direct.exact and rep.average.exact and rep.flat.exact
                assert rep.triangle_holds


# ---------------------------------------------------------------------------
# certificate integrity


def records_by_criterion():
    """Run records for the criteria that a subcommand expresses."""
    out = {
        1: [run("riemann", {"oracle": "c0", "function": "standard", "levels": "1..12"})],
        2: [run("riemann", {"oracle": "l1", "function": "standard", "levels": "1..12"})],
        3: [run("haar-witness", {"oracle": "tsirelson", "system": "canonical", "levels": "0..10"})],
    }
    out[4] = []
    for weighted in (False, True):
        for n in range(0, 7):
            blocks, funcs = build_case2_instance(n, SCHED, weighted=weighted)
            cert = case2_functional(blocks, funcs, SCHED)
            out[4].append(run("wiw-cert", {"vector": str(cert.target), "functional": cert.witness.encoding}))
    out[5] = []
    for r in range(2, 9):
        blocks, funcs = build_case1_instance([2 + (l % 3) for l in range(r)], 1 << 4, SCHED, nested=True)
        res = case1_functional(blocks, funcs, (1,), SCHED)
        out[5].append(run("wiw-cert", {"vector": str(vsum(blocks)), "functional": res.functional.encoding}))
    out[6] = [
        run("riemann", {"oracle": o, "function": {"kind": "haar", "system": "canonical"}, "levels": "1..10"})
        for o in ("l1", "c0")
    ] + [run("haar-witness", {"oracle": o, "system": "canonical", "levels": "1..10"}) for o in ("l1", "c0")]
    out[7] = [run("norm", {"oracle": "tsirelson", "vector": str(x)}) for x in tsirelson_vectors()]
    one = StepFunction.constant(1).format()
    out[9] = [run("khintchine", {"functions": [one, one]})] + [
        run("khintchine", {"functions": [f.format() for f in fs]}) for fs in khintchine_instances()[:20]
    ]
    out[10] = [
        run("dor", {"functions": [f.format() for f in fs], "theta": str(theta_lower_estimate(fs).value)})
        for fs in certified_dor_instances()[:10]
    ]
    out[11] = [
        run("norm", {"oracle": o, "vector": str(vsum(a_i * w for a_i, w in zip(a, ws)))})
        for o, seed in (("l1", 0), ("c0", 1), ("tsirelson", 2))
        for ws, a in cyclic_instances(seed)[:5]
    ]
    return out


def _bump(text: str) -> str:
    """Change the last decimal digit: a single-byte edit."""
    for pos in range(len(text) - 1, -1, -1):
        if text[pos].isdigit():
            return text[:pos] + str((int(text[pos]) + 1) % 10) + text[pos + 1:]
    raise ValueError(f"no digit in {text!r}")


def tamperings(claim):
    """(description, tampered claim, claim must fail) for each witness
    value of a claim.  An edited index can land on another legal witness
    with the same value; only the digest is required to catch that."""
    if isinstance(claim.get("value"), dict):
        for key in ("lower", "upper"):
            c = copy.deepcopy(claim)
            c["value"][key] = _bump(c["value"][key])
            yield f"value.{key}", c, True
    elif isinstance(claim.get("value"), str):
        c = copy.deepcopy(claim)
        c["value"] = _bump(c["value"])
        yield "value", c, True
    if "lhs" in claim:
        c = copy.deepcopy(claim)
        c["lhs"] = _bump(c["lhs"])
        yield "lhs", c, True
    if "masses" in claim:
        for i in range(len(claim["masses"])):
            c = copy.deepcopy(claim)
            c["masses"][i] = _bump(c["masses"][i])
            yield f"masses[{i}]", c, True
    if "indices" in claim:
        c = copy.deepcopy(claim)
        c["indices"][-1] = int(_bump(str(c["indices"][-1])))
        yield "indices[-1]", c, False


@pytest.mark.criterion(12, "verify passes on the records of criteria 1-11 and fails on single-byte tampering of witness values")
def test_criterion_12(record_property):
    with Clock(record_property):
        records = records_by_criterion()
        tampered = 0
        for number, recs in records.items():
            for rec in recs:
                assert [cid for cid, reason in verify_record(rec) if reason is not None] == [], number
                for k, claim in enumerate(rec["claims"]):
                    for what, bad, claim_fails in tamperings(claim):
                        if claim_fails:
                            assert CHECKERS[bad["kind"]](bad) is not None, (number, claim["id"], what)
                        forged = copy.deepcopy(rec)
                        forged["claims"][k] = bad
                        assert digest_of(forged) != forged["digest"]
                        tampered += 1
        record_property("detail", f"{sum(map(len, records.values()))} records, {tampered} tamperings")
    assert tampered > 0
