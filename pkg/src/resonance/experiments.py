"""Sweeps over (q, N, f, resonator) grids and the command-line entry point.

Config files are TOML::

    delta = 0.005
    primes = [1009, 10007]            # or a table: {start, count[, stop]}

    [n_rule]
    kind = "power"                    # "explicit" (values), "power" (alpha), "all" (alpha)
    alpha = 0.5

    [[f_specs]]
    kind = "random_unimodular"
    seed = 1

    [[resonator]]
    mode = "override"                 # or "canonical"
    band = [2, "X"]                   # "X" is replaced by each cell's X
    normalization = "sqrt_p"

    [paths]
    output_dir = "out"

    [flags]
    naive_only = false
    skip_brute_force = false
    threads = 1
    enforce_range = false

With ``primes = {start, count}`` the first ``count`` primes >= start are
used; adding ``stop`` spaces them geometrically between start and stop.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path

from .characters import all_char_sums, orthogonality_sum
from .coefficients import KINDS, PRNG_NAME, PRNG_VERSION, make_coefficients
from .errors import ConfigError, RangeError
from .moments import MomentReport, moment_report, theory_curve, validate_range
from .ntcore import is_prime, next_prime, prev_prime, prime_context
from .resonator import NORMALIZATIONS, build_resonator, canonical_lambda, canonical_spec, lemma_condition, override_spec

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

log = logging.getLogger(__name__)

EXIT_OK, EXIT_INVARIANT, EXIT_CONFIG, EXIT_IO = 0, 1, 2, 3

COLUMNS = [
    "q", "N", "X", "f_kind", "f_seed", "resonator_mode",
    "M1_direct", "M1_identity", "M2_direct", "M2_identity",
    "ratio_bound", "lower_bound", "brute_max", "argmax_j",
    "theory_curve", "condition_ok", "range_ok", "status",
]
# appended after the fixed columns
EXTRA_COLUMNS = [
    "lower_bound_over_sqrtN", "brute_max_over_sqrtN", "theory_curve_over_sqrtN",
    "lemma_curve", "support_size", "reason",
]

_TOP_KEYS = {"primes", "n_rule", "delta", "f_specs", "resonator", "paths", "flags"}


@dataclass(frozen=True)
class FSpec:
    kind: str
    seed: int = 0
    t: float | None = None


@dataclass(frozen=True)
class ResonatorChoice:
    mode: str = "canonical"
    band: tuple | None = None
    normalization: str = "sqrt_p"

    @property
    def label(self) -> str:
        if self.mode == "canonical":
            return f"canonical:{self.normalization}"
        lo, hi = self.band
        return f"override[{lo}..{hi}]:{self.normalization}"


@dataclass(frozen=True)
class NRule:
    kind: str
    values: tuple[int, ...] = ()
    alpha: float = 0.5

    def values_for(self, q: int) -> list[int]:
        if self.kind == "explicit":
            return list(self.values)
        top = math.isqrt(q) if self.alpha == 0.5 else math.floor(q ** self.alpha)
        top = max(top, 1)
        return [top] if self.kind == "power" else list(range(1, top + 1))


@dataclass(frozen=True)
class ExperimentConfig:
    primes: tuple[int, ...]
    n_rule: NRule
    f_specs: tuple[FSpec, ...]
    resonators: tuple[ResonatorChoice, ...] = (ResonatorChoice(),)
    delta: float = 0.005
    output_dir: str = "out"
    naive_only: bool = False
    skip_brute_force: bool = False
    threads: int = 1
    enforce_range: bool = False
    raw: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def method(self) -> str:
        return "naive" if self.naive_only else "fft"


def _reject_unknown(table: dict, allowed: set, where: str):
    extra = set(table) - allowed
    if extra:
        raise ConfigError(f"unknown key(s) in {where}: {', '.join(sorted(extra))}")


def _parse_primes(v) -> tuple[int, ...]:
    if isinstance(v, list):
        primes = [int(p) for p in v]
    elif isinstance(v, dict):
        _reject_unknown(v, {"start", "count", "stop"}, "primes")
        start, count = int(v.get("start", 3)), int(v.get("count", 0))
        if count < 1:
            raise ConfigError("primes.count must be >= 1")
        if "stop" in v and count > 1:
            stop = float(v["stop"])
            points = [start * (stop / start) ** (k / (count - 1)) for k in range(count)]
            if stop < start:
                raise ConfigError("primes.stop must be >= primes.start")
            primes = []
            for x in points:
                p = next_prime(math.ceil(x))
                primes.append(p if p <= stop else prev_prime(math.floor(x)))
            primes = sorted(set(primes))
        else:
            primes = []
            p = start
            while len(primes) < count:
                p = next_prime(p)
                primes.append(p)
                p += 1
    else:
        raise ConfigError("primes must be a list or a {start, count} table")
    if not primes:
        raise ConfigError("at least one prime is required")
    bad = [p for p in primes if p < 3 or not is_prime(p)]
    if bad:
        raise ConfigError(f"not odd primes: {bad}")
    return tuple(primes)


def _parse_n_rule(v: dict) -> NRule:
    _reject_unknown(v, {"kind", "values", "alpha"}, "n_rule")
    kind = v.get("kind")
    if kind == "explicit":
        values = tuple(int(n) for n in v.get("values", []))
        if not values or min(values) < 1:
            raise ConfigError("n_rule.values must be a nonempty list of positive integers")
        return NRule("explicit", values=values)
    if kind in ("power", "all"):
        alpha = float(v.get("alpha", 0.5))
        if not 0 < alpha <= 0.5:
            raise ConfigError(f"n_rule.alpha must lie in (0, 1/2], got {alpha}")
        return NRule(kind, alpha=alpha)
    raise ConfigError(f"n_rule.kind must be explicit, power or all; got {kind!r}")


def _parse_f(v: dict) -> FSpec:
    _reject_unknown(v, {"kind", "seed", "t"}, "f_specs entry")
    kind = v.get("kind")
    if kind not in KINDS:
        raise ConfigError(f"unknown coefficient kind {kind!r}; expected one of {KINDS}")
    if kind == "archimedean" and "t" not in v:
        raise ConfigError("archimedean coefficients need t")
    return FSpec(kind, int(v.get("seed", 0)), float(v["t"]) if "t" in v else None)


def _parse_resonator(v: dict) -> ResonatorChoice:
    _reject_unknown(v, {"mode", "band", "normalization"}, "resonator")
    mode = v.get("mode", "canonical")
    norm = v.get("normalization", "sqrt_p")
    if norm not in NORMALIZATIONS:
        raise ConfigError(f"unknown normalization {norm!r}; expected one of {NORMALIZATIONS}")
    if mode == "canonical":
        if "band" in v:
            raise ConfigError("canonical resonator takes no band; use mode = 'override'")
        return ResonatorChoice("canonical", None, norm)
    if mode == "override":
        band = v.get("band")
        if not isinstance(band, list) or len(band) != 2:
            raise ConfigError("override resonator needs band = [lo, hi]")
        for end in band:
            if not (end == "X" or isinstance(end, (int, float))):
                raise ConfigError(f"band ends must be numbers or 'X', got {end!r}")
        if all(end != "X" for end in band) and band[0] > band[1]:
            raise ConfigError(f"band lower end {band[0]} exceeds upper end {band[1]}")
        return ResonatorChoice("override", tuple(band), norm)
    raise ConfigError(f"resonator mode must be canonical or override, got {mode!r}")


def parse_config(raw: dict) -> ExperimentConfig:
    _reject_unknown(raw, _TOP_KEYS, "config")
    if "primes" not in raw:
        raise ConfigError("config needs primes")
    if "f_specs" not in raw or not raw["f_specs"]:
        raise ConfigError("config needs at least one f_specs entry")
    delta = float(raw.get("delta", 0.005))
    if not 0 < delta < 0.01:
        raise ConfigError(f"delta must lie in (0, 1/100), got {delta}")
    res = raw.get("resonator", {"mode": "canonical"})
    res = [res] if isinstance(res, dict) else list(res)
    paths = raw.get("paths", {})
    _reject_unknown(paths, {"output_dir"}, "paths")
    flags = raw.get("flags", {})
    _reject_unknown(flags, {"naive_only", "skip_brute_force", "threads", "enforce_range"}, "flags")
    threads = int(flags.get("threads", 1))
    if threads < 1:
        raise ConfigError("flags.threads must be >= 1")
    return ExperimentConfig(
        primes=_parse_primes(raw["primes"]),
        n_rule=_parse_n_rule(raw.get("n_rule", {"kind": "power", "alpha": 0.5})),
        f_specs=tuple(_parse_f(v) for v in raw["f_specs"]),
        resonators=tuple(_parse_resonator(v) for v in res) or (ResonatorChoice(),),
        delta=delta,
        output_dir=str(paths.get("output_dir", "out")),
        naive_only=bool(flags.get("naive_only", False)),
        skip_brute_force=bool(flags.get("skip_brute_force", False)),
        threads=threads,
        enforce_range=bool(flags.get("enforce_range", False)),
        raw=raw,
    )


def load_config(path: str | Path) -> ExperimentConfig:
    try:
        with open(path, "rb") as fh:
            raw = tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    return parse_config(raw)


@lru_cache(maxsize=64)
def _context(q: int):
    return prime_context(q)


def cell_X(q: int, N: int) -> int:
    # X = floor(q/N), kept below q so the support never meets a multiple of q
    return min(q // N, q - 1)


def resonator_spec_for(choice: ResonatorChoice, q: int, X: int):
    if choice.mode == "canonical":
        return canonical_spec(X, normalization=choice.normalization, q=q)
    lo, hi = (X if end == "X" else end for end in choice.band)
    return override_spec(X, (lo, hi), normalization=choice.normalization, q=q)


def _cell_key(q, N, f_spec, choice) -> dict:
    return {
        "q": q, "N": N, "f_kind": f_spec.kind, "f_seed": f_spec.seed,
        "f_t": f_spec.t, "resonator_mode": choice.label,
    }


def run_cell(cfg: ExperimentConfig, q: int, N: int, f_spec: FSpec, choice: ResonatorChoice) -> dict:
    """One grid cell as a record with ``status`` ok, failed or rejected."""
    rec = _cell_key(q, N, f_spec, choice)
    if N >= q:
        return {**rec, "status": "rejected", "reason": f"N={N} >= q"}
    X = cell_X(q, N)
    rec["X"] = X
    if N * X > q:
        return {**rec, "status": "rejected", "reason": f"N*X={N * X} > q"}
    rng = validate_range(q, N, cfg.delta)
    if cfg.enforce_range and not rng.ok:
        return {**rec, "status": "rejected",
                "reason": f"N outside [{rng.lower!r}, {rng.upper!r}]"}
    try:
        spec = resonator_spec_for(choice, q, X)
    except RangeError as exc:
        return {**rec, "status": "rejected", "reason": str(exc)}
    ctx = _context(q)
    f = make_coefficients(f_spec.kind, f_spec.seed, cap=max(N, X), t=f_spec.t)
    R = build_resonator(spec)
    rep = moment_report(ctx, f, R, N, method=cfg.method,
                        brute_force=not cfg.skip_brute_force, delta=cfg.delta)
    bad = rep.violations()
    rec.update(report_fields(rep))
    rec["lambda"] = spec.lam
    rec["band"] = list(spec.band)
    rec["status"] = "failed" if bad else "ok"
    rec["reason"] = "; ".join(bad)
    return rec


def report_fields(rep: MomentReport) -> dict:
    root = math.sqrt(rep.N)
    return {
        "X": rep.X,
        "M1_direct": rep.M1_direct, "M1_identity": rep.M1_identity,
        "M2_direct": rep.M2_direct, "M2_identity": rep.M2_identity,
        "M2_all_identity": rep.M2_all_identity,
        "principal_D": [rep.principal_D.real, rep.principal_D.imag],
        "principal_R": [rep.principal_R.real, rep.principal_R.imag],
        "l2": rep.l2, "quadruple_sum": rep.quadruple,
        "ratio_bound": rep.ratio_bound, "lower_bound": rep.lower_bound,
        "brute_max": rep.brute_max, "argmax_j": rep.argmax_j,
        "theory_curve": rep.theory_curve, "lemma_curve": rep.lemma_curve,
        "condition_ok": rep.condition_ok, "range_ok": rep.range_ok,
        "support_size": rep.support_size,
        "lower_bound_over_sqrtN": rep.lower_bound / root,
        "brute_max_over_sqrtN": None if rep.brute_max is None else rep.brute_max / root,
        "theory_curve_over_sqrtN": None if rep.theory_curve is None else rep.theory_curve / root,
        "timings": rep.timings,
    }


def grid(cfg: ExperimentConfig) -> list[tuple]:
    return [
        (q, N, f_spec, choice)
        for q in cfg.primes
        for N in cfg.n_rule.values_for(q)
        for f_spec in cfg.f_specs
        for choice in cfg.resonators
    ]


def _run_one(args):
    return run_cell(*args)


@dataclass
class SweepResult:
    records: list[dict]
    rejected: list[dict]

    @property
    def failed(self) -> list[dict]:
        return [r for r in self.records if r["status"] == "failed"]


def run_sweep(cfg: ExperimentConfig) -> SweepResult:
    cells = grid(cfg)
    jobs = [(cfg, *cell) for cell in cells]
    if cfg.threads > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=cfg.threads) as pool:
            out = list(pool.map(_run_one, jobs, chunksize=max(1, len(jobs) // (4 * cfg.threads))))
    else:
        out = [_run_one(job) for job in jobs]
    records, rejected = [], []
    for rec in out:
        if rec["status"] == "rejected":
            log.info("rejected q=%s N=%s %s: %s", rec["q"], rec["N"], rec["resonator_mode"], rec["reason"])
            rejected.append(rec)
        else:
            if rec["status"] == "failed":
                log.warning("invariant failure q=%s N=%s: %s", rec["q"], rec["N"], rec["reason"])
            records.append(rec)
    # python's sort is stable, so grid order breaks remaining ties
    records.sort(key=lambda r: (r["q"], r["N"], r["f_seed"]))
    return SweepResult(records, rejected)


def _fmt(v) -> str:
    if v is None:
        return "na"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def emit_reports(result: SweepResult, cfg: ExperimentConfig, out_dir: str | Path | None = None) -> tuple[Path, Path]:
    """Write ``cells.csv`` (one row per cell) and ``report.json`` (full record)."""
    if not result.records:
        raise RangeError("no records to emit")
    out = Path(cfg.output_dir if out_dir is None else out_dir)
    out.mkdir(parents=True, exist_ok=True)
    table = out / "cells.csv"
    with open(table, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(COLUMNS + EXTRA_COLUMNS)
        for rec in result.records:
            w.writerow([_fmt(rec.get(c)) for c in COLUMNS + EXTRA_COLUMNS])
    doc = {
        "config": cfg.raw,
        "threads": cfg.threads,
        "method": cfg.method,
        "prng": {"name": PRNG_NAME, "version": PRNG_VERSION},
        "columns": COLUMNS + EXTRA_COLUMNS,
        "summary": {
            "cells": len(result.records) + len(result.rejected),
            "ok": sum(r["status"] == "ok" for r in result.records),
            "failed": len(result.failed),
            "rejected": len(result.rejected),
        },
        "records": result.records,
        "rejected": result.rejected,
    }
    archive = out / "report.json"
    with open(archive, "w") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")
    return table, archive


def verify_primes(cfg: ExperimentConfig, pairs: int = 100, seed: int = 0) -> list[str]:
    """Orthogonality and bulk/naive agreement on every configured prime."""
    import numpy as np

    problems = []
    rng = np.random.default_rng(seed)
    for q in cfg.primes:
        ctx = _context(q)
        for _ in range(pairs):
            a, b = (int(x) for x in rng.integers(1, q, size=2))
            if rng.random() < 0.25:
                b = a + q
            got = orthogonality_sum(ctx, a, b)
            want = ctx.phi if (a - b) % q == 0 else 0
            if abs(got - want) > 1e-6 * ctx.phi:
                problems.append(f"q={q}: orthogonality({a},{b})={got} expected {want}")
        n = int(rng.integers(1, q))
        c = rng.normal(size=n) + 1j * rng.normal(size=n)
        fast = all_char_sums(ctx, c, method="fft")
        slow = all_char_sums(ctx, c, method="naive")
        err = np.max(np.abs(fast - slow)) / np.max(np.abs(slow))
        if err > 1e-6:
            problems.append(f"q={q}: bulk/naive relative disagreement {err:.3g}")
    return problems


def _curve_lines(q: int, N: int, delta: float) -> list[str]:
    rng = validate_range(q, N, delta)
    X = cell_X(q, N)
    curve = theory_curve(q, N)
    lines = [
        f"q={q} N={N} X={X} delta={delta!r}",
        f"theory_curve={_fmt(curve)}",
        f"theory_curve_over_sqrtN={_fmt(None if curve is None else curve / math.sqrt(N))}",
        f"range_lower={rng.lower!r} range_upper={rng.upper!r} range_ok={_fmt(rng.ok)}",
    ]
    try:
        lam = canonical_lambda(X)
    except RangeError as exc:
        lines.append(f"lambda=na ({exc})")
    else:
        cond = lemma_condition(lam, N)
        lines.append(f"lambda={lam!r} condition_ok={_fmt(cond.ok)}"
                     + (f" lhs={cond.lhs!r} rhs={cond.rhs!r}" if cond.ok is not None else f" ({cond.reason})"))
    return lines


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="resonance", description=__doc__.split("\n")[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run a sweep and write cells.csv / report.json")
    run.add_argument("config")
    run.add_argument("-o", "--output-dir", help="override paths.output_dir")
    ver = sub.add_parser("verify", help="check every invariant; write nothing")
    ver.add_argument("config")
    cur = sub.add_parser("curve", help="reference curve and range check for one (q, N)")
    cur.add_argument("--q", type=int, required=True)
    cur.add_argument("--n", type=int, required=True)
    cur.add_argument("--delta", type=float, default=0.005)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "curve":
            if args.n < 1 or args.q < 3:
                raise ConfigError("need q >= 3 and N >= 1")
            print("\n".join(_curve_lines(args.q, args.n, args.delta)))
            return EXIT_OK
        cfg = load_config(args.config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"cannot read config: {exc}", file=sys.stderr)
        return EXIT_IO

    result = run_sweep(cfg)
    n_ok = sum(r["status"] == "ok" for r in result.records)
    if args.command == "verify":
        problems = verify_primes(cfg) + [f"q={r['q']} N={r['N']} {r['f_kind']}/{r['f_seed']} "
                                         f"{r['resonator_mode']}: {r['reason']}" for r in result.failed]
        for line in problems:
            print(f"FAIL {line}")
        print(f"verify: {n_ok} cells ok, {len(result.failed)} failed, "
              f"{len(result.rejected)} rejected, {len(problems)} problems")
        return EXIT_INVARIANT if problems else EXIT_OK

    try:
        table, archive = emit_reports(result, cfg, args.output_dir)
    except OSError as exc:
        print(f"cannot write reports: {exc}", file=sys.stderr)
        return EXIT_IO
    except RangeError as exc:
        print(f"nothing to write: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    print(f"{len(result.records)} cells ({n_ok} ok, {len(result.failed)} failed), "
          f"{len(result.rejected)} rejected -> {table}, {archive}")
    return EXIT_INVARIANT if result.failed else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
