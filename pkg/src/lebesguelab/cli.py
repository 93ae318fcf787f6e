"""Command-line front end.

Every run produces a JSON record holding the normalized config, results,
checkable claims and a digest of everything except timings.
``lebesguelab verify RECORD`` re-checks each claim."""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from typing import Any, Callable

from . import __version__
from .core import FinVec
from .experiments import (
    TaggedDyadicPartition,
    asymptotic_array_profile,
    function_from_json,
    haar_ell1_witness,
    haar_level_value,
    natural_rows,
    riemann_signed_sup,
    riemann_sum,
    riemann_sup,
    spreading_window_profile,
)
from .haar import load_haar_system
from .l1lab import CellAssignment, StepFunction, dor_disjointify, khintchine_check
from .norms import NormValue, make_oracle
from .wiw import (
    NormCertificate,
    WeightSchedule,
    WiwBudget,
    eval_functional,
    parse_functional,
    validate_functional,
    wiw_lower_bound,
)

RECORD_SCHEMA = "lebesguelab.run/1"
CONFIG_SCHEMA = 1

DEFAULT_BUDGETS = {
    "m_cap": 10,
    "tag_depth": 4,
    "enumeration_budget": 4096,
    "search_budget": 2000,
    "search_support": 16,
    "width": 2,
    "window_budget": 1000,
    "depth_cap": 2,
    "weight_cap": 16,
    "support_cap": 8,
}


class ConfigError(ValueError):
    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


# ---------------------------------------------------------------------------
# config validation


def parse_levels(spec: Any, path: str = "levels") -> list[int]:
    """'1..12', '3', '1,2,5', 'm=1..12' or a list of ints."""
    if isinstance(spec, list):
        levels = spec
    elif isinstance(spec, (str, int)) and not isinstance(spec, bool):
        text = str(spec).split("=", 1)[-1].strip()
        try:
            if ".." in text:
                lo, hi = text.split("..")
                levels = list(range(int(lo), int(hi) + 1))
            else:
                levels = [int(t) for t in text.split(",")]
        except ValueError:
            raise ConfigError(path, f"cannot read levels {spec!r}") from None
    else:
        raise ConfigError(path, "expected a range like '1..12' or a list of integers")
    if not levels or any(not isinstance(v, int) or isinstance(v, bool) or v < 0 for v in levels):
        raise ConfigError(path, "levels must be a nonempty list of non-negative integers")
    return sorted(set(levels))


def _require(cfg: dict, key: str) -> Any:
    if cfg.get(key) is None:
        raise ConfigError(key, "required")
    return cfg[key]


def _oracle_id(cfg: dict) -> str:
    ident = _require(cfg, "oracle")
    if not isinstance(ident, str):
        raise ConfigError("oracle", "expected an identifier string")
    try:
        make_oracle(ident)
    except (ValueError, ArithmeticError) as exc:
        raise ConfigError("oracle", str(exc)) from None
    return ident


def _system_spec(cfg: dict) -> Any:
    spec = cfg.get("system", "canonical")
    try:
        return load_haar_system(spec).to_json()
    except (ValueError, TypeError, AttributeError) as exc:
        raise ConfigError("system", str(exc)) from None


def _vector(cfg: dict, key: str = "vector") -> str:
    text = _require(cfg, key)
    try:
        return str(FinVec.parse(str(text)))
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(key, str(exc)) from None


def _rational(value: Any, path: str) -> str:
    if isinstance(value, bool) or isinstance(value, float):
        raise ConfigError(path, "give rationals as strings or integers")
    try:
        return str(Fraction(str(value)))
    except (ValueError, ZeroDivisionError):
        raise ConfigError(path, f"not a rational: {value!r}") from None


def _functions(cfg: dict) -> list[str]:
    raw = _require(cfg, "functions")
    if not isinstance(raw, list) or not raw:
        raise ConfigError("functions", "expected a nonempty list of step functions")
    out = []
    for i, text in enumerate(raw):
        try:
            out.append(StepFunction.parse(str(text)).format())
        except (ValueError, ZeroDivisionError) as exc:
            raise ConfigError(f"functions[{i}]", str(exc)) from None
    return out


def _positive_int(value: Any, path: str) -> int:
    if not isinstance(value, int) or isinstance(value, bool) or value < 1:
        raise ConfigError(path, "must be a positive integer")
    return value


def normalize_config(subcommand: str, raw: dict) -> dict:
    """Validate ``raw`` for ``subcommand``; returns the canonical config
    echoed into records.  Errors name the offending field."""
    if not isinstance(raw, dict):
        raise ConfigError("<root>", "config must be a JSON object")
    if subcommand not in HANDLERS:
        raise ConfigError("subcommand", f"unknown subcommand {subcommand!r}")
    if raw.get("schema", CONFIG_SCHEMA) != CONFIG_SCHEMA:
        raise ConfigError("schema", f"unsupported schema {raw.get('schema')!r}; expected {CONFIG_SCHEMA}")
    budgets = dict(DEFAULT_BUDGETS)
    given = raw.get("budgets", {}) or {}
    if not isinstance(given, dict):
        raise ConfigError("budgets", "expected an object")
    for key, value in given.items():
        if key not in DEFAULT_BUDGETS:
            raise ConfigError(f"budgets.{key}", "unknown budget")
        budgets[key] = _positive_int(value, f"budgets.{key}")
    seed = raw.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool) or not 0 <= seed < 1 << 64:
        raise ConfigError("seed", "must be an integer in [0, 2^64)")
    cfg: dict[str, Any] = {"schema": CONFIG_SCHEMA, "budgets": budgets, "seed": seed}
    cfg.update(FIELDS[subcommand](raw))
    known = set(cfg) | {"out"}
    for key in raw:
        if key not in known:
            raise ConfigError(key, f"unknown field for {subcommand}")
    return cfg


def _f_norm(raw):
    return {"oracle": _oracle_id(raw), "vector": _vector(raw)}


def _f_haar(raw):
    return {"oracle": _oracle_id(raw), "system": _system_spec(raw), "levels": parse_levels(raw.get("levels", "1..8"))}


def _f_riemann(raw):
    fn = raw.get("function", "standard")
    try:
        fn_json = function_from_json(fn).to_json()
    except (ValueError, TypeError, AttributeError) as exc:
        raise ConfigError("function", str(exc)) from None
    signed = raw.get("signed", False)
    if not isinstance(signed, bool):
        raise ConfigError("signed", "must be true or false")
    levels = parse_levels(raw.get("levels", "1..12"))
    if levels[0] < 1:
        raise ConfigError("levels", "mesh levels start at 1")
    return {"oracle": _oracle_id(raw), "function": fn_json, "levels": levels, "signed": signed}


def _f_wiw(raw):
    try:
        sched = WeightSchedule.from_json(raw.get("schedule")).to_json()
    except (ValueError, TypeError, KeyError) as exc:
        raise ConfigError("schedule", str(exc)) from None
    out = {"vector": _vector(raw), "schedule": sched}
    if raw.get("functional") is not None:
        try:
            out["functional"] = parse_functional(str(raw["functional"])).encoding
        except ValueError as exc:
            raise ConfigError("functional", str(exc)) from None
    return out


def _f_khintchine(raw):
    return {"functions": _functions(raw), "tolerance": _rational(raw.get("tolerance", "1/1000000000"), "tolerance")}


def _f_dor(raw):
    mode = raw.get("mode", "exact")
    if mode not in ("exact", "greedy"):
        raise ConfigError("mode", "expected 'exact' or 'greedy'")
    theta = _rational(_require(raw, "theta"), "theta")
    if not 0 < Fraction(theta) <= 1:
        raise ConfigError("theta", "must lie in (0, 1]")
    out = {"functions": _functions(raw), "theta": theta, "mode": mode}
    if raw.get("level") is not None:
        out["level"] = _positive_int(raw["level"], "level")
    return out


def _f_spreading(raw):
    coefs = _require(raw, "coefficients")
    if isinstance(coefs, str):
        coefs = [c for c in coefs.replace(",", " ").split()]
    if not isinstance(coefs, list) or not coefs:
        raise ConfigError("coefficients", "expected a nonempty list")
    out = {"oracle": _oracle_id(raw), "coefficients": [_rational(c, f"coefficients[{i}]") for i, c in enumerate(coefs)]}
    if raw.get("max_index") is not None:
        out["max_index"] = _positive_int(raw["max_index"], "max_index")
    return out


def _f_array(raw):
    out = {"oracle": _oracle_id(raw), "system": _system_spec(raw), "n": _positive_int(_require(raw, "n"), "n")}
    if raw.get("max_index") is not None:
        out["max_index"] = _positive_int(raw["max_index"], "max_index")
    return out


FIELDS: dict[str, Callable[[dict], dict]] = {
    "norm": _f_norm,
    "haar-witness": _f_haar,
    "riemann": _f_riemann,
    "wiw-cert": _f_wiw,
    "khintchine": _f_khintchine,
    "dor": _f_dor,
    "profile-spreading": _f_spreading,
    "profile-array": _f_array,
}


# ---------------------------------------------------------------------------
# runs


def _map(fn, items, threads: int):
    if threads <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def _run_norm(cfg, threads):
    value = make_oracle(cfg["oracle"]).enclose(FinVec.parse(cfg["vector"]))
    claim = {"id": "norm", "kind": "norm", "oracle": cfg["oracle"], "vector": cfg["vector"], "value": value.to_json()}
    return {"value": value.to_json()}, [claim], [str(value)]


def _run_haar(cfg, threads):
    oracle = make_oracle(cfg["oracle"])
    system = load_haar_system(cfg["system"])
    b = cfg["budgets"]
    m_cap = max(b["m_cap"], max(cfg["levels"]))
    ms = list(range(min(cfg["levels"]), m_cap + 1))
    reps = _map(lambda m: haar_level_value(oracle, system, m, b["width"], b["search_budget"], b["search_support"]), ms, threads)
    cache = dict(zip(ms, reps))
    rows, claims, lines = [], [], []
    for n in cfg["levels"]:
        rep = haar_ell1_witness(oracle, system, n, m_cap, b["width"], b["search_budget"], b["search_support"], _levels=cache)
        m = rep.witness["m"]
        rows.append({"n": n, "m": m, "value": rep.value.to_json(), "exact": rep.exact_sup})
        claims.append({
            "id": f"haar-witness-n{n}", "kind": "haar-witness", "oracle": cfg["oracle"],
            "system": cfg["system"], "m": m, "indices": rep.witness["indices"], "value": rep.value.to_json(),
        })
        lines.append(f"n={n} m={m} value={rep.value}{'' if rep.exact_sup else ' (lower bound)'}")
    return {"profile": rows, "m_cap": m_cap}, claims, lines


def _run_riemann(cfg, threads):
    oracle = make_oracle(cfg["oracle"])
    f = function_from_json(cfg["function"])
    b = cfg["budgets"]
    search = riemann_signed_sup if cfg["signed"] else riemann_sup
    reps = _map(
        lambda m: search(f, m, oracle, b["tag_depth"], b["enumeration_budget"], b["search_budget"], b["search_support"]),
        cfg["levels"], threads,
    )
    rows, claims, lines = [], [], []
    for rep in reps:
        m = rep.level
        rows.append({
            "m": m, "value": rep.value.to_json(), "exact": rep.exact_sup,
            "evaluations": rep.budget.get("evaluations"),
        })
        claim = {
            "id": f"riemann-m{m}", "kind": "riemann", "oracle": cfg["oracle"], "function": cfg["function"],
            "m": m, "tags": rep.witness["tags"], "value": rep.value.to_json(),
        }
        if "signs" in rep.witness:
            claim["signs"] = rep.witness["signs"]
        claims.append(claim)
        lines.append(f"m={m} value={rep.value}{'' if rep.exact_sup else ' (heuristic)'}")
    return {"profile": rows}, claims, lines


def _run_wiw(cfg, threads):
    sched = WeightSchedule.from_json(cfg["schedule"])
    x = FinVec.parse(cfg["vector"])
    if "functional" in cfg:
        f = parse_functional(cfg["functional"])
        check = validate_functional(f, sched)
        if not check:
            raise ConfigError("functional", f"not in W_iw: {check.violation}")
        cert = NormCertificate(eval_functional(f, x, sched), f, x)
    else:
        b = cfg["budgets"]
        cert = wiw_lower_bound(x, sched, WiwBudget(b["depth_cap"], b["weight_cap"], b["support_cap"]))
    claim = {"id": "wiw-cert", "kind": "wiw-cert", "schedule": cfg["schedule"], **cert.to_json()}
    return {"lower_bound": str(cert.value), "witness": cert.witness.encoding}, [claim], [
        f"lower bound {cert.value}", f"witness {cert.witness.encoding}",
    ]


def _run_khintchine(cfg, threads):
    fs = [StepFunction.parse(t) for t in cfg["functions"]]
    rep = khintchine_check(fs, Fraction(cfg["tolerance"]))
    claim = {"id": "khintchine", "kind": "khintchine", "functions": cfg["functions"],
             "tolerance": cfg["tolerance"], **rep.to_json()}
    lo, hi = rep.ratio
    return rep.to_json(), [claim], [
        f"lhs {rep.lhs}", f"rhs {rep.rhs}", f"ratio in [{lo:.15f}, {hi:.15f}]",
        f"1/sqrt2 bound {'holds' if rep.sqrt_half_holds else 'FAILS'}",
    ]


def _run_dor(cfg, threads):
    fs = [StepFunction.parse(t) for t in cfg["functions"]]
    res = dor_disjointify(fs, Fraction(cfg["theta"]), cfg["mode"], cfg.get("level"))
    masses = [str(m) for m in res.assignment.masses(fs)]
    claim = {
        "id": "dor", "kind": "dor", "functions": cfg["functions"], "level": res.assignment.level,
        "owners": list(res.assignment.owners), "masses": masses, "target": str(res.target),
        "success": res.success,
    }
    return {**res.to_json(), "masses": masses, "csv": res.assignment.to_csv()}, [claim], [
        f"{'success' if res.success else 'failure'}: min mass {res.min_mass} (target {res.target})",
    ]


def _window_claims(prefix, cfg, prof, extra):
    claims = []
    for name, window, value in (("min", prof.argmin, prof.minimum), ("max", prof.argmax, prof.maximum)):
        claims.append({"id": f"{prefix}-{name}", "oracle": cfg["oracle"], "window": list(window),
                       "value": value.to_json(), **extra})
    return claims


def _run_spreading(cfg, threads):
    oracle = make_oracle(cfg["oracle"])
    prof = spreading_window_profile(
        oracle, [Fraction(c) for c in cfg["coefficients"]], cfg["budgets"]["window_budget"],
        cfg.get("max_index"), cfg["seed"],
    )
    claims = _window_claims("spreading", cfg, prof, {"kind": "window", "coefficients": cfg["coefficients"]})
    return prof.to_json(), claims, [f"min {prof.minimum}", f"max {prof.maximum}",
                                    f"windows {prof.windows}{'' if prof.exhaustive else ' (sampled)'}"]


def _run_array(cfg, threads):
    oracle = make_oracle(cfg["oracle"])
    system = load_haar_system(cfg["system"])
    prof = asymptotic_array_profile(oracle, system, cfg["n"], cfg["budgets"]["window_budget"],
                                    cfg.get("max_index"), cfg["seed"])
    claims = _window_claims("array", cfg, prof, {"kind": "diagonal", "system": cfg["system"], "n": cfg["n"]})
    return prof.to_json(), claims, [f"min {prof.minimum}", f"max {prof.maximum}",
                                    f"windows {prof.windows}{'' if prof.exhaustive else ' (sampled)'}"]


HANDLERS = {
    "norm": _run_norm,
    "haar-witness": _run_haar,
    "riemann": _run_riemann,
    "wiw-cert": _run_wiw,
    "khintchine": _run_khintchine,
    "dor": _run_dor,
    "profile-spreading": _run_spreading,
    "profile-array": _run_array,
}


def _canonical(payload: dict) -> str:
    return json.dumps(payload, sort_keys=True, separators=(",", ":"))


def digest_of(record: dict) -> str:
    body = {k: record[k] for k in ("schema", "tool_version", "subcommand", "config", "results", "claims")}
    return hashlib.sha256(_canonical(body).encode()).hexdigest()


def run(subcommand: str, config: dict, threads: int = 1) -> dict:
    """Run ``subcommand`` on a raw config and return the record."""
    cfg = normalize_config(subcommand, config)
    cfg.pop("out", None)
    t0 = time.perf_counter()
    results, claims, lines = HANDLERS[subcommand](cfg, threads)
    record = {
        "schema": RECORD_SCHEMA,
        "tool_version": __version__,
        "subcommand": subcommand,
        "config": cfg,
        "results": results,
        "claims": claims,
    }
    record["digest"] = digest_of(record)
    record["timings"] = {"seconds": round(time.perf_counter() - t0, 6)}
    record["_summary"] = lines
    return record


def dump_record(record: dict) -> str:
    body = {k: v for k, v in record.items() if not k.startswith("_")}
    return json.dumps(body, sort_keys=True, indent=2) + "\n"


def profile_csv(record: dict) -> str | None:
    rows = record["results"].get("profile") if isinstance(record.get("results"), dict) else None
    if not rows:
        return None
    buf = io.StringIO()
    keys = [k for k in rows[0] if k != "value"]
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(keys + ["lower", "upper", "value_exact"])
    for r in rows:
        writer.writerow([r[k] for k in keys] + [r["value"]["lower"], r["value"]["upper"], r["value"]["exact"]])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# verification


def _check_norm(c):
    got = make_oracle(c["oracle"]).enclose(FinVec.parse(c["vector"]))
    return _same(got, c["value"])


def _same(got: NormValue, claimed) -> str | None:
    try:
        want = NormValue.from_json(claimed)
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
        return f"unreadable value: {exc}"
    if got != want:
        return f"re-evaluates to {got}, record claims {want}"
    return None


def _check_haar(c):
    system = load_haar_system(c["system"])
    m, idx = int(c["m"]), [int(i) for i in c["indices"]]
    if len(idx) != 1 << m:
        return f"expected {1 << m} indices at level {m}, got {len(idx)}"
    for j, i in enumerate(idx):
        if i < 1 << m:
            return f"index {i} for cell {j} is below 2^{m}"
        if not system.membership(m, j, i):
            return f"index {i} is not in A^{m}_{j}"
    total = FinVec()
    for i in idx:
        total = total + FinVec.unit(i)
    got = make_oracle(c["oracle"]).enclose(total).scaled(Fraction(1, 1 << m))
    return _same(got, c["value"])


def _check_riemann(c):
    f = function_from_json(c["function"])
    part = TaggedDyadicPartition.from_json(int(c["m"]), c["tags"])
    got = riemann_sum(f, part, make_oracle(c["oracle"]), c.get("signs"))
    return _same(got, c["value"])


def _check_wiw(c):
    sched = WeightSchedule.from_json(c["schedule"])
    f = parse_functional(c["witness"])
    check = validate_functional(f, sched)
    if not check:
        return f"witness not in W_iw at {check.violation}"
    got = eval_functional(f, FinVec.parse(c["target"]), sched)
    if got != Fraction(c["value"]):
        return f"witness evaluates to {got}, record claims {c['value']}"
    return None


def _check_khintchine(c):
    fs = [StepFunction.parse(t) for t in c["functions"]]
    rep = khintchine_check(fs, Fraction(c["tolerance"]))
    for key, got in rep.to_json().items():
        if c.get(key) != got:
            return f"{key} recomputes to {got}, record claims {c.get(key)}"
    return None


def _check_dor(c):
    fs = [StepFunction.parse(t) for t in c["functions"]]
    assignment = CellAssignment(int(c["level"]), tuple(c["owners"]))
    if any(o is not None and not 0 <= o < len(fs) for o in assignment.owners):
        return "owner index out of range"
    masses = [str(m) for m in assignment.masses(fs)]
    if masses != c["masses"]:
        return f"masses recompute to {masses}, record claims {c['masses']}"
    success = min(Fraction(m) for m in masses) >= Fraction(c["target"])
    if success != c["success"]:
        return f"success is {success}, record claims {c['success']}"
    return None


def _check_window(c):
    window = [int(i) for i in c["window"]]
    coefs = [Fraction(a) for a in c["coefficients"]]
    if len(window) != len(coefs) or window != sorted(set(window)) or window[0] < len(coefs):
        return "window must be n <= i_1 < ... < i_n"
    got = make_oracle(c["oracle"]).enclose(FinVec(zip(window, coefs)))
    return _same(got, c["value"])


def _check_diagonal(c):
    system = load_haar_system(c["system"])
    n = int(c["n"])
    window = [int(i) for i in c["window"]]
    if len(window) != n or window != sorted(set(window)) or window[0] < n:
        return "diagonal must be n <= i_1 < ... < i_n"
    total = FinVec()
    for (level, j), k in zip(natural_rows(n), window):
        total = total + FinVec.unit(system.kth_member(level, j, k))
    got = make_oracle(c["oracle"]).enclose(total).scaled(Fraction(1, n))
    return _same(got, c["value"])


CHECKERS = {
    "norm": _check_norm,
    "haar-witness": _check_haar,
    "riemann": _check_riemann,
    "wiw-cert": _check_wiw,
    "khintchine": _check_khintchine,
    "dor": _check_dor,
    "window": _check_window,
    "diagonal": _check_diagonal,
}


def verify_record(record: dict) -> list[tuple[str, str | None]]:
    """(claim id, failure reason or None) for the digest and every claim."""
    out: list[tuple[str, str | None]] = []
    try:
        ok = record.get("digest") == digest_of(record)
        out.append(("digest", None if ok else "payload does not match its digest"))
    except KeyError as exc:
        out.append(("digest", f"record lacks {exc}"))
    for n, c in enumerate(record.get("claims", [])):
        cid = c.get("id", f"claim-{n}") if isinstance(c, dict) else f"claim-{n}"
        checker = CHECKERS.get(c.get("kind")) if isinstance(c, dict) else None
        if checker is None:
            out.append((cid, f"unknown claim kind {c.get('kind') if isinstance(c, dict) else c!r}"))
            continue
        try:
            out.append((cid, checker(c)))
        except Exception as exc:  # a malformed claim fails, it does not crash verification
            out.append((cid, f"{type(exc).__name__}: {exc}"))
    return out


def verify(record_path: str) -> list[tuple[str, str | None]]:
    with open(record_path) as fh:
        return verify_record(json.load(fh))


# ---------------------------------------------------------------------------
# argument parsing


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file")
    common.add_argument("--out", help="write the run record here ('-' for stdout)")
    common.add_argument("--csv", help="write the per-level profile as CSV")
    common.add_argument("--seed-override", type=int, help="replace the config seed")
    common.add_argument("--threads", type=int, default=1)

    p = argparse.ArgumentParser(prog="lebesguelab", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"lebesguelab {__version__}")
    sub = p.add_subparsers(dest="subcommand", required=True)

    s = sub.add_parser("norm", parents=[common], help="evaluate a norm oracle on a vector")
    s.add_argument("oracle", nargs="?")
    s.add_argument("vector", nargs="?", help="e.g. '3:1 4:1 5:1'")

    for name in ("haar-witness", "profile-array"):
        s = sub.add_parser(name, parents=[common])
        s.add_argument("oracle", nargs="?")
        s.add_argument("system", nargs="?", help="canonical | dyadic-locations")
        if name == "haar-witness":
            s.add_argument("levels", nargs="?", help="e.g. 1..8")
            s.add_argument("--m-cap", type=int)
        else:
            s.add_argument("--n", type=int)
            s.add_argument("--max-index", type=int)

    s = sub.add_parser("riemann", parents=[common], help="adversarial Riemann-sum profile")
    s.add_argument("oracle", nargs="?")
    s.add_argument("function", nargs="?", help="standard | haar")
    s.add_argument("levels", nargs="?", help="e.g. 1..12")
    s.add_argument("--signed", action="store_true", default=None)
    s.add_argument("--system", help="Haar system for the haar function")

    s = sub.add_parser("wiw-cert", parents=[common], help="W_iw lower-bound certificate")
    s.add_argument("vector", nargs="?")
    s.add_argument("--functional", help="check this functional instead of searching")

    s = sub.add_parser("khintchine", parents=[common])
    s.add_argument("files", nargs="*", help="step-function files")

    s = sub.add_parser("dor", parents=[common])
    s.add_argument("files", nargs="*", help="step-function files")
    s.add_argument("--theta")
    s.add_argument("--mode", choices=["exact", "greedy"])
    s.add_argument("--level", type=int)

    s = sub.add_parser("profile-spreading", parents=[common])
    s.add_argument("oracle", nargs="?")
    s.add_argument("coefficients", nargs="?", help="e.g. 1,1,1,1")
    s.add_argument("--max-index", type=int)

    s = sub.add_parser("verify", help="re-check every claim of a run record")
    s.add_argument("record")
    return p


def _read_step_files(paths: list[str]) -> list[str]:
    out = []
    for path in paths:
        with open(path) as fh:
            chunks = fh.read().split("level")
        out.extend("level" + c for c in chunks if c.strip())
    return out


def _merge_args(args: argparse.Namespace) -> dict:
    cfg: dict = {}
    if args.config:
        with open(args.config) as fh:
            try:
                cfg = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ConfigError("<file>", f"invalid JSON: {exc}") from None
    simple = {
        "oracle": "oracle", "vector": "vector", "levels": "levels", "signed": "signed",
        "functional": "functional", "theta": "theta", "mode": "mode", "level": "level",
        "coefficients": "coefficients", "n": "n", "max_index": "max_index",
    }
    for attr, key in simple.items():
        value = getattr(args, attr, None)
        if value is not None:
            cfg[key] = value
    if getattr(args, "system", None) is not None:
        cfg["system"] = args.system
    if getattr(args, "function", None) is not None:
        cfg["function"] = args.function
    if args.subcommand == "riemann" and isinstance(cfg.get("function"), str) and cfg["function"] == "haar":
        cfg["function"] = {"kind": "haar", "system": cfg.pop("system", "canonical")}
    if getattr(args, "m_cap", None) is not None:
        cfg.setdefault("budgets", {})["m_cap"] = args.m_cap
    if getattr(args, "files", None):
        cfg["functions"] = _read_step_files(args.files)
    if args.seed_override is not None:
        cfg["seed"] = args.seed_override
    return cfg


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    if args.subcommand == "verify":
        try:
            results = verify(args.record)
        except (OSError, json.JSONDecodeError, AttributeError) as exc:
            print(f"cannot read record: {exc}", file=sys.stderr)
            return 1
        for cid, reason in results:
            print(f"PASS {cid}" if reason is None else f"FAIL {cid}: {reason}")
        return 0 if all(r is None for _, r in results) else 2
    if args.threads < 1:
        print("config error: threads: must be a positive integer", file=sys.stderr)
        return 1
    try:
        cfg = _merge_args(args)
        out = args.out or cfg.get("out")
        record = run(args.subcommand, cfg, args.threads)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    text = dump_record(record)
    if out == "-":
        sys.stdout.write(text)
    else:
        for line in record["_summary"]:
            print(line)
        if out:
            with open(out, "w") as fh:
                fh.write(text)
    if args.csv:
        table = profile_csv(record)
        if table is not None:
            with open(args.csv, "w") as fh:
                fh.write(table)
    return 0
