"""Command-line front end: ``mhahn <command> [options]``.

Exit status: 0 when every reported identity holds, 1 when one fails,
2 for configuration, genericity or zero-denominator errors.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple

from . import __version__
from .bases import FAMILIES, build_all, check_bases
from .linalg import Matrix
from .overlaps import KINDS, ParamMap, canonical_kind, check_overlaps, overlap_table, overlap_tables
from .report import IdentityReport
from .repn import (
    GaugeInvalid,
    GenericityError,
    ModuleParams,
    build_repn,
    casimir,
    check_casimir,
    genericity_check,
    meta_relation_reports,
)
from .scalar import (
    Backend,
    BackendMismatch,
    ZeroDenominator,
    format_scalar,
    get_backend,
    parse_rational,
)
from .specfun import (
    HahnParams,
    RatParams,
    biorth_data,
    dual_hahn_R,
    hahn_Q,
    rat_U,
    rat_V,
)
from .suites import (
    SUITES,
    Job,
    aggregate,
    fixed_draw,
    job_rng,
    random_gauge,
    run_jobs,
    run_suite,
)

SCHEMA_VERSION = 1
EVAL_FAMILIES = ("hahn", "dual", "u", "v")
TABLE_FAMILIES = ("S", "S~", "U", "U~", "Q", "R", "u", "v", "weights")
PARAM_FLAGS = ("alpha", "beta", "mu", "a", "b", "alphaHat", "betaHat")


class ConfigError(ValueError):
    pass


# ---------------------------------------------------------------------------
# parsing


def _scalar(text: str, backend: Backend, flag: str):
    try:
        if backend.exact:
            return parse_rational(text)
        if "/" in text:
            return float(parse_rational(text))
        return float(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"--{flag}: cannot parse {text!r} as a rational 'p/q'") from exc


@dataclass
class RunConfig:
    command: str
    N: Optional[int]
    values: Dict[str, Any]
    gauge: str
    backend: Backend
    output: Optional[str]
    seed: int
    trials: int
    timing: bool

    @classmethod
    def from_args(cls, ns: argparse.Namespace) -> "RunConfig":
        bk = get_backend(ns.backend)
        vals = {}
        for k in PARAM_FLAGS:
            raw = getattr(ns, k, None)
            if raw is not None:
                vals[k] = _scalar(raw, bk, k)
        if ns.N is not None and ns.N < 0:
            raise ConfigError("--N must be non-negative")
        if ns.seed < 0:
            raise ConfigError("--seed must be a non-negative integer")
        trials = getattr(ns, "trials", 1)
        if trials is not None and trials < 1:
            raise ConfigError("--trials must be positive")
        return cls(ns.command, ns.N, vals, ns.gauge, bk, ns.output, ns.seed, trials or 1,
                   ns.timing)

    def echo(self, **extra) -> Dict[str, Any]:
        d: Dict[str, Any] = {"name": self.command}
        if self.N is not None:
            d["N"] = self.N
        for k, v in self.values.items():
            d[k] = format_scalar(v)
        d.update({"gauge": self.gauge, "backend": self.backend.name, "seed": self.seed})
        d.update(extra)
        return d

    def need_N(self) -> int:
        if self.N is None:
            raise ConfigError(f"{self.command} needs --N")
        return self.N

    def has(self, *keys) -> bool:
        return all(k in self.values for k in keys)


def _gauge(cfg: RunConfig, N: int):
    g = cfg.gauge
    if g == "ones":
        return None
    if g == "random":
        return random_gauge(job_rng(cfg.seed, N, 0), N, cfg.backend)
    parts = [p.strip() for p in g.split(",") if p.strip()]
    vals = [_scalar(p, cfg.backend, "gauge") for p in parts]
    if len(vals) not in (N, N + 1):
        raise ConfigError(f"--gauge needs {N} entries (a_0..a_(N-1)), got {len(vals)}")
    return vals


def resolve_module(cfg: RunConfig) -> Tuple[ModuleParams, Any]:
    """Module parameters and pencil value from whichever parameter set was given."""
    N = cfg.need_N()
    v = cfg.values
    sets = [k for k, keys in (("alpha/beta", ("alpha", "beta")), ("a/b", ("a", "b")),
                              ("alphaHat/betaHat", ("alphaHat", "betaHat")))
            if any(x in v for x in keys)]
    if len(sets) > 1:
        raise ConfigError(f"give exactly one parameter set, got {' and '.join(sets)}")
    if not sets:
        raise ConfigError("missing parameters: give --alpha/--beta, --a/--b or --alphaHat/--betaHat")
    g = _gauge(cfg, N)
    mu = v.get("mu")
    if sets[0] == "alpha/beta":
        if not cfg.has("alpha", "beta"):
            raise ConfigError("--alpha and --beta go together")
        return ModuleParams.make(N, v["alpha"], v["beta"], g, cfg.backend), mu
    if sets[0] == "a/b":
        if not cfg.has("a", "b"):
            raise ConfigError("--a and --b go together")
        return ModuleParams.from_rational(v["a"], v["b"], N, g, cfg.backend), mu
    if not cfg.has("alphaHat", "betaHat"):
        raise ConfigError("--alphaHat and --betaHat go together")
    if mu is not None:
        raise ConfigError("--mu is implied by --alphaHat/--betaHat")
    return ModuleParams.from_hahn(v["alphaHat"], v["betaHat"], N, g, cfg.backend)


def hahn_params(cfg: RunConfig) -> HahnParams:
    if cfg.has("alphaHat", "betaHat"):
        return HahnParams(cfg.values["alphaHat"], cfg.values["betaHat"], cfg.need_N())
    p, mu = resolve_module(cfg)
    if mu is None:
        raise ConfigError("Hahn functions need --alphaHat/--betaHat or a module with --mu")
    return ParamMap.from_module(p, mu).hahn()


def rat_params(cfg: RunConfig) -> RatParams:
    if cfg.has("a", "b"):
        return RatParams(cfg.values["a"], cfg.values["b"], cfg.need_N())
    p, _ = resolve_module(cfg)
    return ParamMap.from_module(p).rational()


def _generic(params: ModuleParams, mu, *, check_alpha=True, shifted=False):
    v = genericity_check(params, mu, check_alpha=check_alpha)
    if shifted:
        v += ["alpha+1 module: " + x for x in genericity_check(params.with_alpha(params.alpha + 1))]
    if v:
        raise GenericityError(v)


# ---------------------------------------------------------------------------
# output


def _matrix(m: Matrix) -> List[List[str]]:
    return m.tolist()


def _doc(cfg: RunConfig, reports: Sequence[IdentityReport], start: float,
         data: Optional[dict] = None, **echo) -> Dict[str, Any]:
    doc: Dict[str, Any] = {
        "version": SCHEMA_VERSION,
        "command": cfg.echo(**echo),
        "reports": [r.to_dict() for r in reports],
    }
    if data is not None:
        doc["data"] = data
    doc["elapsed_ms"] = round((time.perf_counter() - start) * 1000, 3) if cfg.timing else None
    return doc


def dumps(doc: Dict[str, Any]) -> str:
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def _csv(header: Sequence[str], rows) -> str:
    lines = [",".join(header)]
    lines += [",".join(str(x) for x in r) for r in rows]
    return "\n".join(lines) + "\n"


def _report_csv(reports: Sequence[IdentityReport]) -> str:
    return _csv(["name", "grid", "max_residual", "pass"],
                [(r.name, r.grid, format_scalar(r.max_residual), str(r.passed).lower())
                 for r in reports])


def _status(reports: Sequence[IdentityReport]) -> int:
    return 0 if all(r.passed for r in reports) else 1


# ---------------------------------------------------------------------------
# commands; each returns (text, exit status)


def cmd_repn(cfg: RunConfig) -> Tuple[str, int]:
    start = time.perf_counter()
    p, mu = resolve_module(cfg)
    R = build_repn(p, mu)
    reports = meta_relation_reports(R) + [check_casimir(R)]
    if cfg.output == "csv":
        rows = [(name, i, j, format_scalar(M[i, j]))
                for name, M in (("Z", R.Z), ("X", R.X), ("V", R.V))
                for i in range(R.dim) for j in range(R.dim)]
        return _csv(["matrix", "row", "col", "value"], rows), _status(reports)
    data = {"Z": _matrix(R.Z), "X": _matrix(R.X), "V": _matrix(R.V),
            "xi": format_scalar(R.xi), "eta": format_scalar(R.eta),
            "casimir": _matrix(casimir(R))}
    return dumps(_doc(cfg, reports, start, data)), _status(reports)


def cmd_bases(cfg: RunConfig, family: Optional[str]) -> Tuple[str, int]:
    start = time.perf_counter()
    p, mu = resolve_module(cfg)
    _generic(p, mu)
    R = build_repn(p, mu)
    B = build_all(R, mu)
    if family is not None:
        if family not in B:
            raise ConfigError(f"family {family} needs --mu" if family in FAMILIES
                              else f"unknown family {family!r}")
        B = {family: B[family]}
    reports = check_bases(R, mu)
    if cfg.output == "csv":
        rows = [(f, j, n, format_scalar(b.columns[j, n]))
                for f, b in B.items() for n in range(R.dim) for j in range(R.dim)]
        return _csv(["family", "row", "col", "value"], rows), _status(reports)
    data = {f: {"eigenvalues": [format_scalar(x) for x in b.eigenvalues],
                "columns": [[format_scalar(x) for x in c] for c in b.columns.columns()]}
            for f, b in B.items()}
    return dumps(_doc(cfg, reports, start, data, family=family)), _status(reports)


def cmd_overlaps(cfg: RunConfig, kind: Optional[str]) -> Tuple[str, int]:
    start = time.perf_counter()
    p, mu = resolve_module(cfg)
    _generic(p, mu)
    R = build_repn(p, mu)
    if kind is not None:
        kind = canonical_kind(kind)
        tables = {kind: overlap_table(R, mu, kind)}
    else:
        tables = overlap_tables(R, mu)
    reports = [check_overlaps(R, mu)]
    N = p.N
    if cfg.output == "csv":
        if kind is not None:
            rows = [(m, n, format_scalar(tables[kind][m, n]))
                    for m in range(N + 1) for n in range(N + 1)]
            return _csv(["m", "n", "value"], rows), _status(reports)
        rows = [(k, m, n, format_scalar(t[m, n])) for k, t in tables.items()
                for m in range(N + 1) for n in range(N + 1)]
        return _csv(["kind", "m", "n", "value"], rows), _status(reports)
    data = {k: _matrix(t.values) for k, t in tables.items()}
    pm = ParamMap.from_module(p, mu)
    data["params"] = {"a": format_scalar(pm.a), "b": format_scalar(pm.b)}
    if mu is not None:
        data["params"].update(alphaHat=format_scalar(pm.alpha_hat),
                              betaHat=format_scalar(pm.beta_hat))
    return dumps(_doc(cfg, reports, start, data, family=kind)), _status(reports)


def _eval_value(cfg: RunConfig, family: str, m: int, x):
    if family in ("hahn", "Q"):
        return hahn_Q(m, x, hahn_params(cfg))
    if family in ("dual", "R"):
        return dual_hahn_R(m, x, hahn_params(cfg))
    if family == "u":
        return rat_U(m, x, rat_params(cfg))
    if family == "v":
        return rat_V(m, x, rat_params(cfg))
    raise ConfigError(f"unknown family {family!r}")


def cmd_eval(cfg: RunConfig, family: str, m: Optional[int], x: Optional[str]) -> Tuple[str, int]:
    start = time.perf_counter()
    if m is None or x is None:
        raise ConfigError("eval needs --m and --x")
    xv = _scalar(x, cfg.backend, "x")
    value = format_scalar(_eval_value(cfg, family, m, xv))
    if cfg.output == "json":
        return dumps(_doc(cfg, [], start, {"value": value}, family=family, m=m, x=x)), 0
    if cfg.output == "csv":
        return _csv(["m", "x", "value"], [(m, format_scalar(xv), value)]), 0
    return value + "\n", 0


def cmd_table(cfg: RunConfig, family: Optional[str]) -> Tuple[str, int]:
    start = time.perf_counter()
    if family is None:
        raise ConfigError(f"table needs --family ({'|'.join(TABLE_FAMILIES)})")
    N = cfg.need_N()
    if family == "weights":
        rp = rat_params(cfg)
        w = biorth_data(rp).weights_w
        header = ["n", "weight"]
        rows = [(n, format_scalar(w[n])) for n in range(N + 1)]
    else:
        header = ["m", "n", "value"]
        if family in ("Q", "R", "u", "v"):
            fn = {"Q": hahn_Q, "R": dual_hahn_R, "u": rat_U, "v": rat_V}[family]
            fp = hahn_params(cfg) if family in ("Q", "R") else rat_params(cfg)
            rows = [(m, n, format_scalar(fn(m, n, fp)))
                    for m in range(N + 1) for n in range(N + 1)]
        else:
            try:
                kind = canonical_kind(family)
            except ValueError as exc:
                raise ConfigError(str(exc)) from exc
            p, mu = resolve_module(cfg)
            _generic(p, mu if kind in ("S", "S~") else None)
            t = overlap_table(build_repn(p, mu), mu, kind)
            rows = [(m, n, format_scalar(t[m, n])) for m in range(N + 1) for n in range(N + 1)]
    if cfg.output == "json":
        return dumps(_doc(cfg, [], start, {"header": header, "rows": [list(map(str, r)) for r in rows]},
                          family=family)), 0
    return _csv(header, rows), 0


def _n_range(cfg: RunConfig, nmin: Optional[int], nmax: Optional[int],
             default: Tuple[int, int]) -> List[int]:
    if cfg.N is not None:
        if nmin is not None or nmax is not None:
            raise ConfigError("give --N or --Nmin/--Nmax, not both")
        return [cfg.N]
    lo = default[0] if nmin is None else nmin
    hi = default[1] if nmax is None else nmax
    if lo < 0 or hi < lo:
        raise ConfigError(f"bad N range [{lo}, {hi}]")
    return list(range(lo, hi + 1))


def _random_jobs(cfg: RunConfig, suite: str, Ns: Sequence[int]) -> List[Job]:
    gauge: Any = cfg.gauge
    if gauge not in ("ones", "random"):
        if len(Ns) != 1:
            raise ConfigError("an explicit --gauge needs a single --N")
        gauge = tuple(_gauge(cfg, Ns[0]))
    return [Job(suite, N, i, cfg.seed, cfg.backend.name, gauge)
            for N in Ns for i in range(cfg.trials)]


def _emit_reports(cfg: RunConfig, reports, start, **echo) -> Tuple[str, int]:
    if cfg.output == "csv":
        return _report_csv(reports), _status(reports)
    return dumps(_doc(cfg, reports, start, **echo)), _status(reports)


def cmd_verify(cfg: RunConfig, suite: str, nmin=None, nmax=None) -> Tuple[str, int]:
    start = time.perf_counter()
    if suite != "all" and suite not in SUITES:
        raise ConfigError(f"unknown suite {suite!r}")
    explicit = any(k in cfg.values for k in PARAM_FLAGS)
    if explicit:
        if nmin is not None or nmax is not None:
            raise ConfigError("explicit parameters need a single --N")
        p, mu = resolve_module(cfg)
        needs_mu = suite in ("hahn", "all")
        if needs_mu and mu is None:
            raise ConfigError(f"suite {suite} needs the pencil value (--mu or --alphaHat/--betaHat)")
        _generic(p, mu, check_alpha=suite != "hahn", shifted=suite in ("rational", "all"))
        d = fixed_draw(p, mu, job_rng(cfg.seed, p.N, 0))
        reports = run_suite(suite, d)
        return _emit_reports(cfg, reports, start, suite=suite)
    Ns = _n_range(cfg, nmin, nmax, (1, 10))
    reports = aggregate(run_jobs(_random_jobs(cfg, suite, Ns)))
    return _emit_reports(cfg, reports, start, suite=suite, Nmin=Ns[0], Nmax=Ns[-1],
                         trials=cfg.trials)


def cmd_sweep(cfg: RunConfig, suite: str, nmin=None, nmax=None) -> Tuple[str, int]:
    start = time.perf_counter()
    if any(k in cfg.values for k in PARAM_FLAGS):
        raise ConfigError("sweep draws its own parameters; use verify for a fixed point")
    if suite != "all" and suite not in SUITES:
        raise ConfigError(f"unknown suite {suite!r}")
    Ns = _n_range(cfg, nmin, nmax, (1, 10))
    reports = aggregate(run_jobs(_random_jobs(cfg, suite, Ns)))
    return _emit_reports(cfg, reports, start, suite=suite, Nmin=Ns[0], Nmax=Ns[-1],
                         trials=cfg.trials)


# ---------------------------------------------------------------------------
# argument parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--N", type=int, help="module dimension is N+1")
    for k in PARAM_FLAGS:
        common.add_argument(f"--{k}", metavar="P/Q", help=f"{k} as an exact rational 'p/q'")
    common.add_argument("--gauge", default="ones",
                        help="ones | random | a0,a1,...  (gauge constants a_0..a_(N-1))")
    common.add_argument("--backend", choices=("exact", "float"), default="exact")
    common.add_argument("--output", choices=("json", "csv"), default=None,
                        help="output format (default: csv for table, the bare value for eval, "
                             "json otherwise)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--timing", action="store_true",
                        help="fill elapsed_ms (otherwise null, keeping output reproducible)")

    ranged = argparse.ArgumentParser(add_help=False)
    ranged.add_argument("--Nmin", type=int)
    ranged.add_argument("--Nmax", type=int)
    ranged.add_argument("--suite", choices=("all",) + SUITES)

    parser = argparse.ArgumentParser(
        prog="mhahn",
        description="Exact verification of the two-diagonal meta Hahn module, its eigenbases, "
                    "overlaps and the Hahn-type special functions.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("repn", parents=[common], help="matrices of Z, X, V and the algebra checks")
    p = sub.add_parser("bases", parents=[common], help="the six eigenbases")
    p.add_argument("--family", choices=FAMILIES)
    p = sub.add_parser("overlaps", parents=[common], help="overlap tables S, S~, U, U~")
    p.add_argument("--family", help="one of " + ", ".join(KINDS))
    p = sub.add_parser("eval", parents=[common], help="evaluate Q, R, U or V at one point")
    p.add_argument("family", choices=EVAL_FAMILIES)
    p.add_argument("--m", type=int)
    p.add_argument("--x")
    p = sub.add_parser("table", parents=[common], help="a full (m, n) grid as CSV")
    p.add_argument("--family", help=" | ".join(TABLE_FAMILIES))
    p = sub.add_parser("verify", parents=[common, ranged],
                       help="run a suite at given parameters or over random draws")
    p.add_argument("suite_pos", nargs="?", metavar="suite", choices=("all",) + SUITES)
    p.add_argument("--trials", type=int, default=1)
    p = sub.add_parser("sweep", parents=[common, ranged],
                       help="verify over N in [Nmin, Nmax] x trials random draws")
    p.add_argument("--trials", type=int, default=20)
    return parser


def run(argv: Optional[Sequence[str]] = None) -> Tuple[str, int]:
    ns = build_parser().parse_args(argv)
    cfg = RunConfig.from_args(ns)
    cmd = ns.command
    if cmd == "repn":
        return cmd_repn(cfg)
    if cmd == "bases":
        return cmd_bases(cfg, ns.family)
    if cmd == "overlaps":
        return cmd_overlaps(cfg, ns.family)
    if cmd == "eval":
        return cmd_eval(cfg, ns.family, ns.m, ns.x)
    if cmd == "table":
        return cmd_table(cfg, ns.family)
    if cmd == "verify":
        if ns.suite_pos and ns.suite and ns.suite_pos != ns.suite:
            raise ConfigError("suite given twice with different values")
        return cmd_verify(cfg, ns.suite_pos or ns.suite or "all", ns.Nmin, ns.Nmax)
    return cmd_sweep(cfg, ns.suite or "all", ns.Nmin, ns.Nmax)


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        text, status = run(argv)
    except (ConfigError, GenericityError, GaugeInvalid, BackendMismatch, ZeroDenominator,
            ZeroDivisionError) as exc:
        print(f"mhahn: error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"mhahn: error: {exc}", file=sys.stderr)
        return 2
    sys.stdout.write(text)
    return status


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
