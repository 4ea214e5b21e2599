"""Command-line runner: ``randapprox <command> --config cfg.json --out DIR``.

Every command writes its CSV/JSON outputs plus ``manifest.json``.  CSV bodies
depend only on the configuration and seed; timestamps live in the manifest.
Failures exit nonzero with a JSON error record on stderr (and in
``error.json`` when the output directory is usable).
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import sys
import warnings
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable

from . import __version__
from .approxsets import build_E, expected_measure_Q, expected_overlap_Q, overlap_rows, qk_scan
from .circle import Arc
from .errors import ConfigError, InputError, RandApproxError, ResourceError
from .experiments import (
    DEFAULT_CONV_TAIL_TOL,
    ExperimentConfig,
    dichotomy_experiment,
    qia_experiment,
    window_coverage,
)
from .numtheory import s_set
from .randmodel import PRF_VERSION, MASK64
from .sequences import eval_psi, format_rational, parse_rational
from .stats import (
    build_pair_atoms,
    frozen_block,
    frozen_value,
    run_pair_mc,
    verify_lemma_S,
    verify_overlap_bound,
    verify_var_subadditivity,
    verify_vartwo_bound,
)

COMMANDS = ("sets", "measure", "overlap", "expect", "qia", "coverage", "dichotomy", "verify")
LEMMAS = ("lemma-S", "overlap-bound", "var-subadd", "vartwo", "qk-bound")
SECTION_KEYS = {
    "sets": {"kinds"},
    "overlap": {"monte_carlo"},
    "coverage": {"modes", "methods"},
    "dichotomy": {"convergent", "divergent", "tail_tol"},
    "lemma_S": {"n_min", "n_max", "J", "ci"},
    "overlap_bound": {"N_grid", "trend_tol", "ci"},
    "var_subadd": {"N", "tau"},
    "vartwo": {"N", "trend_tol", "ci"},
    "qk_bound": {"n_max"},
}
SECTIONS = tuple(SECTION_KEYS)

EXIT_FAIL = 1
EXIT_CODES = {"config_error": 2, "input_error": 3, "insufficient_divergence": 3, "resource_error": 4}


class UsageError(ConfigError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # route argparse failures through the JSON error record
        raise UsageError(message)


# -- configuration -------------------------------------------------------------


@dataclass
class RunConfig:
    experiment: ExperimentConfig
    sections: dict[str, dict[str, Any]] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        d = self.experiment.to_dict()
        d.update({k: self.sections[k] for k in sorted(self.sections)})
        return d

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "RunConfig":
        if not isinstance(d, dict):
            raise ConfigError("config must be a single JSON object")
        sections = {}
        for key in SECTIONS:
            if key in d:
                if not isinstance(d[key], dict):
                    raise ConfigError(f"section {key!r} must be an object")
                extra = set(d[key]) - SECTION_KEYS[key]
                if extra:
                    raise ConfigError(f"unknown keys in section {key!r}: {sorted(extra)}")
                sections[key] = d[key]
        base = {k: v for k, v in d.items() if k not in SECTIONS}
        return cls(ExperimentConfig.from_dict(base), sections)

    def section(self, name: str) -> dict[str, Any]:
        return self.sections.get(name, {})

    def digest(self) -> str:
        return hashlib.sha256(canonical_json(self.to_dict()).encode()).hexdigest()


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def load_config(path: str | None) -> RunConfig:
    if path is None:
        raise ConfigError("--config is required")
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    return RunConfig.from_dict(data)


def _get_int(sec: dict, key: str, default: int) -> int:
    v = sec.get(key, default)
    if isinstance(v, bool) or not isinstance(v, (int, str)):
        raise ConfigError(f"{key} must be an integer, got {v!r}")
    try:
        return int(v)
    except ValueError as exc:
        raise ConfigError(f"{key} must be an integer, got {v!r}") from exc


def _get_rational(sec: dict, key: str, default) -> Fraction:
    return parse_rational(sec[key]) if key in sec else Fraction(default)


def _get_arc(sec: dict, key: str, default: tuple) -> Arc:
    v = sec.get(key, default)
    if not isinstance(v, (list, tuple)) or len(v) != 2:
        raise ConfigError(f"{key} must be [lo, hi], got {v!r}")
    return Arc(parse_rational(v[0]), parse_rational(v[1]), half_open=True)


# -- output ----------------------------------------------------------------------


def _dec(x) -> str:
    return f"{float(x):.12g}"


def write_csv(path: Path, header: list[str], rows) -> None:
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow(row)


def write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


@dataclass
class Context:
    cfg: RunConfig
    out: Path
    files: list[str] = field(default_factory=list)
    frozen: list[str] = field(default_factory=list)
    status: str = "ok"

    def csv(self, name: str, header: list[str], rows) -> None:
        write_csv(self.out / name, header, rows)
        self.files.append(name)

    def json(self, name: str, obj) -> None:
        write_json(self.out / name, obj)
        self.files.append(name)


def _window_ns(cfg: ExperimentConfig) -> range:
    n0, n1 = cfg.window
    if n1 > cfg.exact_bound:
        raise ResourceError(f"window end {n1} exceeds the exact bound {cfg.exact_bound}")
    return range(n0, n1 + 1)


def _kinds(sec: dict) -> list[str]:
    kinds = sec.get("kinds", ["S", "P", "Q"])
    if not isinstance(kinds, list) or any(k not in ("S", "P", "Q") for k in kinds):
        raise ConfigError(f"kinds must be a list drawn from S, P, Q; got {kinds!r}")
    return kinds


def _sample(cfg: ExperimentConfig, kind: str, n: int):
    if kind == "S":
        return s_set(n, cfg.eps)
    o = cfg.oracle()
    return o.sample_P(n) if kind == "P" else o.sample_Q(n)


# -- commands --------------------------------------------------------------------


def cmd_sets(ctx: Context) -> None:
    cfg = ctx.cfg.experiment
    kinds = _kinds(ctx.cfg.section("sets"))
    rows = []
    for n in _window_ns(cfg):
        for kind in kinds:
            A = _sample(cfg, kind, n)
            rows.append([n, kind, len(A), " ".join(map(str, A.tolist()))])
    ctx.csv("sets.csv", ["n", "kind", "size", "members"], rows)


def cmd_measure(ctx: Context) -> None:
    cfg = ctx.cfg.experiment
    kinds = _kinds(ctx.cfg.section("sets"))
    rows = []
    for n in _window_ns(cfg):
        psi_n = eval_psi(cfg.psi, n)
        for kind in kinds:
            E = build_E(_sample(cfg, kind, n), psi_n)
            m = E.measure
            rows.append([n, kind, len(E.numerators), psi_n.numerator, psi_n.denominator, m.numerator, m.denominator, _dec(m)])
    ctx.csv("measures.csv", ["n", "kind", "size", "psi_num", "psi_den", "measure_num", "measure_den", "measure"], rows)


def cmd_overlap(ctx: Context) -> None:
    cfg = ctx.cfg.experiment
    sec = ctx.cfg.section("overlap")
    ns = _window_ns(cfg)
    o = cfg.oracle()
    sets = {n: build_E(o.sample_Q(n), eval_psi(cfg.psi, n)) for n in ns}
    rows = [
        [r.m, r.n, r.value.numerator, r.value.denominator, r.expected.numerator, r.expected.denominator]
        for r in overlap_rows(sets, cfg.psi, cfg.p, cfg.eps)
    ]
    ctx.csv("overlap.csv", ["m", "n", "lambda_exact_num", "lambda_exact_den", "expected_num", "expected_den"], rows)
    if sec.get("monte_carlo", False):
        if ns.start != 1:
            raise ConfigError("the Monte Carlo overlap check needs a window starting at 1")
        atoms = build_pair_atoms(ns.stop - 1, cfg.psi, cfg.p, cfg.eps, 1)
        res = run_pair_mc(atoms, cfg.trials, cfg.seed)
        mc_rows, worst = [], 0.0
        for i, (m, n) in enumerate(atoms.pairs):
            if m == n:
                continue
            exp = expected_overlap_Q(m, n, cfg.psi, cfg.p, cfg.eps)
            se = (float(res.var[i]) / res.trials) ** 0.5
            diff = float(res.mean[i] - exp)
            z = diff / se if se > 0 else (0.0 if res.mean[i] == exp else float("inf"))
            worst = max(worst, abs(z))
            mean = res.mean[i]
            mc_rows.append([m, n, mean.numerator, mean.denominator, exp.numerator, exp.denominator, repr(se), repr(z)])
        ctx.csv("overlap_mc.csv", ["m", "n", "mean_num", "mean_den", "expected_num", "expected_den", "stderr", "z"], mc_rows)
        ctx.json("overlap_mc.json", {"trials": res.trials, "max_abs_z": worst, "status": "pass" if worst <= 4 else "fail"})
        if worst > 4:
            ctx.status = "fail"


def cmd_expect(ctx: Context) -> None:
    cfg = ctx.cfg.experiment
    parts = Arc.partition(cfg.M)
    rows = []
    for n in _window_ns(cfg):
        for j, J in enumerate(parts):
            v = expected_measure_Q(n, cfg.psi, cfg.p, cfg.eps, J)
            rows.append([n, j, v.numerator, v.denominator, _dec(v)])
    ctx.csv("expect.csv", ["n", "J_index", "expected_num", "expected_den", "expected"], rows)


def cmd_qia(ctx: Context) -> None:
    cfg = ctx.cfg.experiment
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        series = qia_experiment(cfg)
    rows = []
    for r in series.reports:
        rows.append([
            r.t, r.N, r.j_index,
            format_rational(r.numerator), format_rational(r.denominator),
            "" if r.ratio is None else format_rational(r.ratio),
            "" if r.ratio_over_lambda is None else format_rational(r.ratio_over_lambda),
            "" if r.ratio is None else _dec(r.ratio),
            "" if r.ratio_over_lambda is None else _dec(r.ratio_over_lambda),
        ])
    ctx.csv(
        "qia.csv",
        ["t", "N_t", "J_index", "numerator", "denominator", "ratio", "ratio_over_lambdaJ", "ratio_decimal", "ratio_over_lambdaJ_decimal"],
        rows,
    )
    best, where = series.min_ratio_over_lambda()
    ctx.json("qia.json", {
        "checkpoints": series.checkpoints,
        "achieved_t": series.achieved_t,
        "truncated": series.truncated,
        "warnings": [str(w.message) for w in caught],
        "min_ratio_over_lambdaJ": None if best is None else format_rational(best),
        "min_ratio_over_lambdaJ_decimal": None if best is None else _dec(best),
        "argmin_t_J": where,
    })


def _coverage_rows(results) -> list[list]:
    rows = []
    for window, mode, method, g, frac in results:
        rows.append([f"{window[0]}:{window[1]}", mode, method, g, frac.numerator, frac.denominator, _dec(frac)])
    return rows


COVERAGE_HEADER = ["window", "mode", "method", "G", "fraction_num", "fraction_den", "fraction"]


def cmd_coverage(ctx: Context) -> None:
    cfg = ctx.cfg.experiment
    sec = ctx.cfg.section("coverage")
    modes = sec.get("modes", ["P"])
    methods = sec.get("methods", ["grid"])
    results = []
    for mode in modes:
        for method in methods:
            r = window_coverage(cfg, mode, method)
            results.append((cfg.window, mode, method, cfg.grid, r.fraction))
    ctx.csv("coverage.csv", COVERAGE_HEADER, _coverage_rows(results))


def _branch_config(base: ExperimentConfig, over: dict[str, Any]) -> ExperimentConfig:
    d = base.to_dict()
    d.update(over)
    return ExperimentConfig.from_dict(d)


def cmd_dichotomy(ctx: Context) -> None:
    base = ctx.cfg.experiment
    sec = ctx.cfg.section("dichotomy")
    conv = _branch_config(base, sec.get("convergent", {}))
    div = _branch_config(base, sec.get("divergent", {}))
    tol = _get_rational(sec, "tail_tol", DEFAULT_CONV_TAIL_TOL)
    rep = dichotomy_experiment(conv, div, tol)
    results = [(conv.window, "P", "grid", conv.grid, rep.convergent.coverage.fraction)]
    for n, frac in zip(rep.divergent.checkpoints, rep.divergent.trajectory):
        results.append(((div.window[0], n), "P", "grid", div.grid, frac))
    results.append((div.window, "P", "grid", div.grid, rep.divergent.coverage.fraction))
    ctx.csv("coverage.csv", COVERAGE_HEADER, _coverage_rows(results))
    ctx.json("dichotomy.json", rep.to_dict())


def verify_lemma_s(ctx: Context) -> None:
    cfg = ctx.cfg.experiment
    sec = ctx.cfg.section("lemma_S")
    n0 = _get_int(sec, "n_min", 100)
    n1 = _get_int(sec, "n_max", 10_000)
    J = _get_arc(sec, "J", ("0", "1/4"))
    ci = bool(sec.get("ci", False))
    frozen = frozen_value("lemma_S_min_ratio") if ci else None
    if ci:
        ctx.frozen.append("lemma_S_min_ratio")
    rep = verify_lemma_S((n0, n1), cfg.eps, J, frozen)
    ctx.csv(
        "lemma_S.csv",
        ["n", "count", "ratio_num", "ratio_den", "ratio"],
        [[n, c, r.numerator, r.denominator, _dec(r)] for n, c, r in rep.table],
    )
    out = rep.to_dict()
    if ci:
        out["frozen_threshold"] = format_rational(frozen)
    ctx.json("lemma_S.json", out)
    if rep.status == "fail":
        ctx.status = "fail"


def verify_overlap(ctx: Context) -> None:
    cfg = ctx.cfg.experiment
    sec = ctx.cfg.section("overlap_bound")
    grid = sec.get("N_grid", list(range(100, 2001, 100)))
    if not isinstance(grid, list) or not grid:
        raise ConfigError("N_grid must be a non-empty list")
    grid = [int(x) for x in grid]
    if max(grid) > cfg.exact_bound:
        raise ResourceError(f"N_grid reaches {max(grid)} beyond the exact bound {cfg.exact_bound}")
    ci = bool(sec.get("ci", False))
    frozen = frozen_value("overlap_bound_C") if ci else None
    if ci:
        ctx.frozen.append("overlap_bound_C")
    rep = verify_overlap_bound(grid, cfg.psi, cfg.p, cfg.eps, float(_get_rational(sec, "trend_tol", "1/10")), frozen)
    ctx.csv(
        "overlap_bound.csv",
        ["N", "lhs_num", "lhs_den", "rhs_core_num", "rhs_core_den", "rhs_linear_num", "rhs_linear_den", "C"],
        [[r.N, r.lhs.numerator, r.lhs.denominator, r.rhs_core.numerator, r.rhs_core.denominator,
          r.rhs_linear.numerator, r.rhs_linear.denominator, _dec(r.C) if r.C is not None else ""] for r in rep.rows],
    )
    ctx.json("overlap_bound.json", rep.to_dict())
    if rep.status == "fail":
        ctx.status = "fail"


def verify_var_subadd(ctx: Context) -> None:
    cfg = ctx.cfg.experiment
    sec = ctx.cfg.section("var_subadd")
    N = _get_int(sec, "N", 50)
    tau = _get_rational(sec, "tau", "1/10")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        rep = verify_var_subadditivity(N, cfg.M, cfg.trials, cfg.psi, cfg.p, cfg.eps, cfg.seed, tau)
    ctx.csv(
        "var_subadd.csv",
        ["N", "M", "trials", "lhs_var", "rhs_sum_var", "ratio", "tau", "status"],
        [[rep.N, rep.M, rep.trials, repr(rep.lhs_var), repr(rep.rhs_sum_var),
          "" if rep.ratio is None else repr(rep.ratio), format_rational(rep.tau), rep.status]],
    )
    ctx.json("var_subadd.json", rep.to_dict())
    if rep.status != "pass":
        ctx.status = rep.status


def verify_vartwo(ctx: Context) -> None:
    cfg = ctx.cfg.experiment
    sec = ctx.cfg.section("vartwo")
    N = _get_int(sec, "N", 50)
    rep = verify_vartwo_bound(
        N, cfg.psi, cfg.p, cfg.eps, cfg.M, cfg.trials, cfg.seed, trend_tol=float(_get_rational(sec, "trend_tol", "1/10"))
    )
    ctx.csv("vartwo.csv", ["m", "n", "var", "rhs_num", "rhs_den", "C"],
            [[r.m, r.n, repr(r.var), r.rhs.numerator, r.rhs.denominator, "" if r.C is None else repr(r.C)] for r in rep.rows])
    out = rep.to_dict()
    out.pop("rows")
    if sec.get("ci", False):
        ctx.frozen.append("vartwo_max_C")
        ref = float(frozen_value("vartwo_max_C"))
        out["frozen_max_C"] = ref
        out["matches_frozen"] = rep.C is not None and abs(rep.C - ref) <= 1e-9 * ref
        if not out["matches_frozen"]:
            ctx.status = "fail"
    ctx.json("vartwo.json", out)
    if rep.status == "fail":
        ctx.status = "fail"


def verify_qk(ctx: Context) -> None:
    cfg = ctx.cfg.experiment
    sec = ctx.cfg.section("qk_bound")
    n_max = _get_int(sec, "n_max", 300)
    rep = qk_scan(n_max, cfg.psi, cfg.eps)
    ctx.json("qk_bound.json", {
        "n_max": n_max,
        "pairs": rep.pairs,
        "bound_violations": rep.bound_violations,
        "single_intersection_violations": rep.single_violations,
        "max_q_over_bound": None if rep.max_slack is None else format_rational(rep.max_slack),
        "status": "pass" if rep.ok else "fail",
    })
    if not rep.ok:
        ctx.status = "fail"


VERIFIERS: dict[str, Callable[[Context], None]] = {
    "lemma-S": verify_lemma_s,
    "overlap-bound": verify_overlap,
    "var-subadd": verify_var_subadd,
    "vartwo": verify_vartwo,
    "qk-bound": verify_qk,
}

HANDLERS: dict[str, Callable[[Context], None]] = {
    "sets": cmd_sets,
    "measure": cmd_measure,
    "overlap": cmd_overlap,
    "expect": cmd_expect,
    "qia": cmd_qia,
    "coverage": cmd_coverage,
    "dichotomy": cmd_dichotomy,
}


# -- entry point -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", help="JSON config file")
    common.add_argument("--seed", type=int, help="override the config seed (unsigned 64-bit)")
    common.add_argument("--out", default="out", help="output directory (default: out)")
    common.add_argument("--threads", type=int, default=0, help="worker threads, 0 = auto (recorded only)")
    common.add_argument("--exact-bound", type=int, help="override the exact-materialisation bound")
    parser = _Parser(prog="randapprox", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"randapprox {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        p = sub.add_parser(name, parents=[common])
        if name == "verify":
            p.add_argument("lemma", choices=LEMMAS)
    return parser


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def _emit_error(exc: BaseException, out: Path | None) -> int:
    kind = getattr(exc, "kind", "internal_error")
    record = {"error": {"kind": kind, "type": type(exc).__name__, "message": str(exc)}}
    print(json.dumps(record, sort_keys=True), file=sys.stderr)
    if out is not None:
        try:
            out.mkdir(parents=True, exist_ok=True)
            write_json(out / "error.json", record)
        except OSError:
            pass
    return EXIT_CODES.get(kind, EXIT_FAIL if kind != "internal_error" else 70)


def main(argv: list[str] | None = None) -> int:
    out: Path | None = None
    try:
        args = build_parser().parse_args(argv)
        out = Path(args.out)
        cfg = load_config(args.config)
        overrides = {}
        if args.seed is not None:
            if not 0 <= args.seed <= MASK64:
                raise ConfigError(f"--seed must be an unsigned 64-bit value, got {args.seed}")
            overrides["seed"] = args.seed
        if args.exact_bound is not None:
            overrides["exact_bound"] = args.exact_bound
        if overrides:
            cfg = RunConfig(replace(cfg.experiment, **overrides), cfg.sections)
        if args.threads < 0:
            raise ConfigError("--threads must be >= 0")
        out.mkdir(parents=True, exist_ok=True)
        ctx = Context(cfg, out)
        started = _now()
        command = args.command if args.command != "verify" else f"verify {args.lemma}"
        if args.command == "verify":
            VERIFIERS[args.lemma](ctx)
        else:
            HANDLERS[args.command](ctx)
        manifest = {
            "tool": "randapprox",
            "tool_version": __version__,
            "command": command,
            "config": cfg.to_dict(),
            "config_sha256": cfg.digest(),
            "seed": cfg.experiment.seed,
            "prf_version": PRF_VERSION,
            "psi": cfg.experiment.psi.to_dict(),
            "p": cfg.experiment.p.to_dict(),
            "frozen_thresholds": frozen_block(*ctx.frozen),
            "threads": args.threads,
            "status": ctx.status,
            "outputs": {
                name: hashlib.sha256((out / name).read_bytes()).hexdigest() for name in sorted(ctx.files)
            },
            "started_at": started,
            "finished_at": _now(),
        }
        write_json(out / "manifest.json", manifest)
        return 0 if ctx.status in ("ok", "pass", "warning") else EXIT_FAIL
    except (RandApproxError, ValueError) as exc:
        return _emit_error(exc, out)


if __name__ == "__main__":
    raise SystemExit(main())
