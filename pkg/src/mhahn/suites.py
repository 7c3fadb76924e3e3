"""Random parameter draws and the verification suites run by the CLI."""

from __future__ import annotations

import os
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .bases import check_appendix_actions, check_bases
from .overlaps import ParamMap, check_gauge_covariance, check_overlaps
from .report import IdentityReport, merge
from .repn import (
    ModuleParams,
    build_repn,
    check_casimir,
    check_hahn_embedding,
    genericity_check,
    meta_relation_reports,
)
from .scalar import Backend, Scalar, format_scalar, get_backend
from .specfun import (
    check_biorthogonality,
    check_contiguity,
    check_duality,
    check_hahn_difference,
    check_hahn_orthogonality,
    check_hahn_recurrence,
    check_normalization_limit,
    check_U_difference,
    check_U_recurrence,
    check_V_difference,
    check_V_recurrence,
)

SUITES = ("algebra", "bases", "overlaps", "hahn", "rational", "appendix")
HEIGHT = 97  # numerators and denominators are drawn from [1, HEIGHT]
FLOAT_BOUND = 10  # float draws keep every parameter within [-10, 10]
RHO_DRAWS = 10
MAX_TRIES = 10_000


@dataclass(frozen=True)
class Draw:
    params: ModuleParams
    mu: Scalar
    rhos: Tuple[Scalar, ...]
    extra_gauge: Tuple[Scalar, ...] = ()  # second gauge for covariance checks
    label: Dict[str, str] = field(default_factory=dict)


def job_rng(seed: int, N: int, index: int) -> random.Random:
    """Independent, reproducible stream for one (N, draw) job."""
    return random.Random(f"{seed}:{N}:{index}")


def random_rational(rng: random.Random, backend: Backend, bound: Optional[float] = None):
    while True:
        num = rng.randint(1, HEIGHT) * rng.choice((-1, 1))
        den = rng.randint(1, HEIGHT)
        if bound is None or abs(num) <= bound * den:
            return backend.scalar(f"{num}/{den}")


def _bound(backend: Backend):
    return None if backend.exact else FLOAT_BOUND


def random_gauge(rng: random.Random, N: int, backend: Backend) -> List[Scalar]:
    return [random_rational(rng, backend, _bound(backend)) for _ in range(N)]


def _label(p: ModuleParams, mu) -> Dict[str, str]:
    return {"N": str(p.N), "alpha": format_scalar(p.alpha), "beta": format_scalar(p.beta),
            "mu": format_scalar(mu)}


def random_draw(rng: random.Random, N: int, backend: Backend, gauge="random") -> Draw:
    """Rejection-sample (alpha, beta, mu) until every genericity condition holds,
    including those of the alpha+1 module used by the contiguity checks."""
    bd = _bound(backend)
    for _ in range(MAX_TRIES):
        al = random_rational(rng, backend, bd)
        be = random_rational(rng, backend, bd)
        mu = random_rational(rng, backend, bd)
        if gauge == "random":
            g = random_gauge(rng, N, backend)
        elif gauge == "ones":
            g = None
        else:
            g = list(gauge)
        p = ModuleParams.make(N, al, be, g, backend)
        if genericity_check(p, mu) or genericity_check(p.with_alpha(p.alpha + 1)):
            continue
        rhos = tuple(random_rational(rng, backend, bd) for _ in range(RHO_DRAWS))
        return Draw(p, mu, rhos, tuple(random_gauge(rng, N, backend)), _label(p, mu))
    raise RuntimeError(f"no generic parameters found for N={N}")  # pragma: no cover


def fixed_draw(params: ModuleParams, mu, rng: random.Random) -> Draw:
    bk = params.backend
    bd = _bound(bk)
    rhos = tuple(random_rational(rng, bk, bd) for _ in range(RHO_DRAWS))
    return Draw(params, mu, rhos, tuple(random_gauge(rng, params.N, bk)), _label(params, mu))


# ---------------------------------------------------------------------------
# suites


def suite_algebra(d: Draw) -> List[IdentityReport]:
    R = build_repn(d.params)
    out = meta_relation_reports(R)
    out.append(check_casimir(R))
    out.append(merge("hahn_embedding", [check_hahn_embedding(R, rho) for rho in d.rhos]))
    return out


def suite_bases(d: Draw) -> List[IdentityReport]:
    return check_bases(build_repn(d.params, d.mu), d.mu)


def suite_overlaps(d: Draw) -> List[IdentityReport]:
    R = build_repn(d.params, d.mu)
    out = [check_overlaps(R, d.mu)]
    if d.params.N > 0:
        out.append(check_gauge_covariance(d.params, d.mu, d.extra_gauge))
    return out


def suite_hahn(d: Draw) -> List[IdentityReport]:
    hp = ParamMap.from_module(d.params, d.mu).hahn()
    return [check_hahn_orthogonality(hp), check_hahn_recurrence(hp),
            check_hahn_difference(hp), check_duality(hp)]


def suite_rational(d: Draw) -> List[IdentityReport]:
    rp = ParamMap.from_module(d.params).rational()
    return [check_biorthogonality(rp), check_U_recurrence(rp), check_U_difference(rp),
            check_V_recurrence(rp), check_V_difference(rp),
            check_contiguity(rp, module=d.params), check_normalization_limit(rp)]


def suite_appendix(d: Draw) -> List[IdentityReport]:
    return [check_appendix_actions(build_repn(d.params, d.mu), d.mu)]


SUITE_FUNCS: Dict[str, Callable[[Draw], List[IdentityReport]]] = {
    "algebra": suite_algebra,
    "bases": suite_bases,
    "overlaps": suite_overlaps,
    "hahn": suite_hahn,
    "rational": suite_rational,
    "appendix": suite_appendix,
}


def suite_names(suite: str) -> Sequence[str]:
    if suite == "all":
        return SUITES
    if suite not in SUITE_FUNCS:
        raise ValueError(f"unknown suite {suite!r}")
    return (suite,)


def run_suite(suite: str, d: Draw) -> List[IdentityReport]:
    out: List[IdentityReport] = []
    for name in suite_names(suite):
        out.extend(SUITE_FUNCS[name](d))
    return out


# ---------------------------------------------------------------------------
# jobs and aggregation


@dataclass(frozen=True)
class Job:
    suite: str
    N: int
    index: int
    seed: int
    backend: str
    gauge: object = "random"


def run_job(job: Job) -> Tuple[Dict[str, str], List[IdentityReport]]:
    rng = job_rng(job.seed, job.N, job.index)
    d = random_draw(rng, job.N, get_backend(job.backend), job.gauge)
    return d.label, run_suite(job.suite, d)


def worker_count(jobs: int) -> int:
    env = os.environ.get("MHAHN_THREADS")
    n = int(env) if env else (os.cpu_count() or 1)
    return max(1, min(n, jobs))


def run_jobs(jobs: Sequence[Job]) -> List[Tuple[Dict[str, str], List[IdentityReport]]]:
    """Results in job order, whatever the worker count."""
    workers = worker_count(len(jobs))
    if workers == 1:
        return [run_job(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(run_job, jobs, chunksize=max(1, len(jobs) // (4 * workers))))


def aggregate(results: Sequence[Tuple[Dict[str, str], List[IdentityReport]]]) -> List[IdentityReport]:
    """Fold per-draw reports into one report per identity name.

    Notes that agree across all draws are kept; the first failing draw
    provides the witness, tagged with its parameters.
    """
    order: List[str] = []
    acc: Dict[str, dict] = {}
    for index, (label, reports) in enumerate(results):
        for r in reports:
            a = acc.get(r.name)
            if a is None:
                order.append(r.name)
                a = acc[r.name] = {"grid": 0, "worst": r.max_residual, "witness": None,
                                   "draws": 0, "failed": 0, "notes": dict(r.notes)}
            a["grid"] += r.grid
            a["draws"] += 1
            if r.max_residual > a["worst"]:
                a["worst"] = r.max_residual
            if not r.passed:
                a["failed"] += 1
                if a["witness"] is None:
                    a["witness"] = {"draw": index, **label, **(r.witness or {})}
            for k in list(a["notes"]):
                if r.notes.get(k) != a["notes"][k]:
                    del a["notes"][k]
    out = []
    for name in order:
        a = acc[name]
        notes = {**a["notes"], "draws": a["draws"], "failed_draws": a["failed"]}
        out.append(IdentityReport(name, a["grid"], a["worst"], a["failed"] == 0,
                                  a["witness"], notes))
    return out
