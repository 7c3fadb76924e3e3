"""Acceptance criteria, one test per criterion.

Each test prints a single ``[PASS]`` or ``[FAIL]`` line with its numeric
evidence, then asserts. Criteria 3 and 8 include identities whose stated
form does not hold; they are checked exactly as stated and are expected to
fail, with the corrected form reported alongside.
"""

from __future__ import annotations

import json
import time
from collections import defaultdict

import pytest

from mhahn.bases import check_appendix_actions, check_bases
from mhahn.cli import main
from mhahn.overlaps import (
    ParamMap,
    check_overlap_contiguity,
    check_S_orthogonality,
    check_U_biorthogonality,
    match_closed_forms,
    overlap_tables,
)
from mhahn.repn import build_repn, check_casimir, check_hahn_embedding, meta_relation_reports
from mhahn.scalar import EXACT, FLOAT, format_scalar
from mhahn.specfun import (
    check_biorthogonality,
    check_contiguity,
    check_duality,
    check_hahn_difference,
    check_hahn_orthogonality,
    check_hahn_recurrence,
    check_U_difference,
    check_U_recurrence,
    check_V_difference,
    check_V_recurrence,
)
from mhahn.suites import SUITES, job_rng, random_draw, run_suite

SEED = 1
TRIALS = 20
ALGEBRA_N = range(1, 13)
SWEEP_N = range(1, 11)
FLOAT_N = range(1, 17)
FLOAT_TRIALS = 3


def emit(capsys, number: int, title: str, ok: bool, detail: str) -> None:
    with capsys.disabled():
        print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {number:2d}: {title} :: {detail}")


def draws(Ns, gauge="random", backend=EXACT, trials=TRIALS):
    return [random_draw(job_rng(SEED, N, i), N, backend, gauge) for N in Ns for i in range(trials)]


class Tally:
    """Per-identity pass counts and worst residual across draws."""

    def __init__(self):
        self.total = defaultdict(int)
        self.failed = defaultdict(int)
        self.worst = {}
        self.first = {}

    def add(self, rep, label=None):
        n = rep.name
        self.total[n] += 1
        if n not in self.worst or rep.max_residual > self.worst[n]:
            self.worst[n] = rep.max_residual
        if not rep.passed:
            self.failed[n] += 1
            self.first.setdefault(n, {**(label or {}), **(rep.witness or {})})

    def extend(self, reps, label=None):
        for r in reps:
            self.add(r, label)

    @property
    def ok(self):
        return not any(self.failed.values())

    def summary(self, names=None):
        names = names or list(self.total)
        return "; ".join(f"{n} {self.total[n] - self.failed[n]}/{self.total[n]} "
                         f"max={format_scalar(self.worst[n])}" for n in names)


@pytest.fixture(scope="module")
def algebra_draws():
    return {g: draws(ALGEBRA_N, gauge=g) for g in ("ones", "random")}


@pytest.fixture(scope="module")
def sweep_draws():
    return draws(SWEEP_N)


def test_criterion_01_algebra_relations(capsys, algebra_draws):
    t0 = time.perf_counter()
    t = Tally()
    for ds in algebra_draws.values():
        for d in ds:
            t.extend(meta_relation_reports(build_repn(d.params)), d.label)
    dt = time.perf_counter() - t0
    ok = t.ok and all(v == 0 for v in t.worst.values()) and dt < 10
    emit(capsys, 1, "algebra relations, N=1..12 x 20 draws x {ones, random} gauge", ok,
         f"{t.summary()}; {dt:.2f} s")
    assert ok


def test_criterion_02_casimir(capsys, algebra_draws):
    t = Tally()
    for ds in algebra_draws.values():
        for d in ds:
            t.add(check_casimir(build_repn(d.params)), d.label)
    emit(capsys, 2, "Casimir commutes with Z, X, V", t.ok, t.summary())
    assert t.ok


def test_criterion_03_hahn_embedding_stated_map(capsys, algebra_draws):
    stated, corrected = Tally(), Tally()
    for ds in algebra_draws.values():
        for d in ds:
            R = build_repn(d.params)
            for rho in d.rhos:
                stated.add(check_hahn_embedding(R, rho, printed=True), d.label)
                corrected.add(check_hahn_embedding(R, rho), d.label)
    ok = stated.ok
    emit(capsys, 3, "Hahn embedding with a=2, b=2rho-xi+2eta, 10 rho per draw", ok,
         f"stated map: {stated.summary()}; first failure {stated.first}; "
         f"with b=2rho+2eta, d1=-Q-xi+eta*rho: {corrected.summary()}")
    assert corrected.ok
    assert ok, "stated embedding constants do not satisfy the relations (see decisions ledger)"


def test_criterion_04_bases(capsys, sweep_draws):
    t = Tally()
    for d in sweep_draws:
        t.extend(check_bases(build_repn(d.params, d.mu), d.mu), d.label)
    emit(capsys, 4, "eigen-residuals, Gram identities and completeness", t.ok, t.summary())
    assert t.ok


def test_criterion_05_closed_form_overlaps(capsys, sweep_draws):
    t = Tally()
    for d in sweep_draws:
        tables = overlap_tables(build_repn(d.params, d.mu), d.mu)
        t.add(match_closed_forms(tables, ParamMap.from_module(d.params, d.mu)), d.label)
        t.add(check_S_orthogonality(tables["S"], tables["S~"]), d.label)
        t.add(check_U_biorthogonality(tables["U"], tables["U~"]), d.label)
    emit(capsys, 5, "dot-product S, S~, U, U~ equal the closed forms", t.ok, t.summary())
    assert t.ok


def test_criterion_06_hahn_orthogonality(capsys, sweep_draws):
    t = Tally()
    for d in sweep_draws:
        t.add(check_hahn_orthogonality(ParamMap.from_module(d.params, d.mu).hahn()), d.label)
    emit(capsys, 6, "Hahn orthogonality and dual orthogonality", t.ok, t.summary())
    assert t.ok


def test_criterion_07_biorthogonality(capsys, sweep_draws):
    t = Tally()
    norms = set()
    for d in sweep_draws:
        r = check_biorthogonality(ParamMap.from_module(d.params).rational())
        t.add(r, d.label)
        norms.add((format_scalar(r.notes["h0"]), format_scalar(r.notes["h*0"])))
    ok = t.ok and norms == {("1", "1")}
    emit(capsys, 7, "biorthogonality with h0 = h*0 = 1", ok,
         f"{t.summary()}; (h0, h*0) values seen: {sorted(norms)}")
    assert ok


def test_criterion_08_bispectral(capsys, sweep_draws):
    t = Tally()
    printed = Tally()
    for d in sweep_draws:
        hp = ParamMap.from_module(d.params, d.mu).hahn()
        rp = ParamMap.from_module(d.params).rational()
        t.extend([check_hahn_recurrence(hp), check_hahn_difference(hp), check_U_recurrence(rp),
                  check_U_difference(rp), check_V_recurrence(rp), check_V_difference(rp),
                  check_contiguity(rp, module=False),
                  check_overlap_contiguity(build_repn(d.params))], d.label)
        printed.add(check_contiguity(rp, module=False, as_printed=True), d.label)
    ok = t.ok and printed.ok
    emit(capsys, 8, "recurrence, difference and contiguity identities", ok,
         f"{t.summary()}; second contiguity relation as stated: {printed.summary()}, "
         f"first failure {printed.first}; with the opposite sign on the right it holds "
         f"(contiguity above)")
    assert t.ok
    assert printed.ok, "the stated second contiguity relation has the wrong sign (see ledger)"


def test_criterion_09_duality(capsys, sweep_draws):
    t = Tally()
    for d in sweep_draws:
        t.add(check_duality(ParamMap.from_module(d.params, d.mu).hahn()), d.label)
    emit(capsys, 9, "duality R_m(lambda(n)) = Q_n(m)", t.ok, t.summary())
    assert t.ok


def test_criterion_10_appendix(capsys, sweep_draws):
    t = Tally()
    eta1 = set()
    for d in sweep_draws:
        r = check_appendix_actions(build_repn(d.params, d.mu), d.mu)
        t.add(r, d.label)
        eta1.add(r.notes["eta1"])
    ok = t.ok and eta1 == {"0"}
    emit(capsys, 10, "basis actions: Hessenberg/tridiagonal structure and entries", ok,
         f"{t.summary()}; fitted eta1 values: {sorted(eta1)}")
    assert ok


def test_criterion_11_float_backend(capsys):
    t = Tally()
    for d in draws(FLOAT_N, backend=FLOAT, trials=FLOAT_TRIALS):
        t.extend(run_suite("all", d), d.label)
    norm = t.worst.get("normalization_limit")
    worst = max(float(v) for k, v in t.worst.items() if k != "normalization_limit")
    ok = t.ok and worst <= 1e-9 and norm is not None and float(norm) <= 1e-5
    emit(capsys, 11, f"float backend, N=1..16 x {FLOAT_TRIALS} draws, |params| <= 10", ok,
         f"{sum(t.total.values())} reports, failures {sum(t.failed.values())}; worst relative "
         f"residual {worst:.3g}; worst |U_m(1e8)-1| {float(norm):.3g}")
    assert ok


def test_criterion_12_determinism_and_runtime(capsys):
    import io
    import contextlib

    def sweep():
        buf = io.StringIO()
        t0 = time.perf_counter()
        with contextlib.redirect_stdout(buf):
            code = main(["sweep", "--seed", str(SEED)])
        return code, buf.getvalue(), time.perf_counter() - t0

    c1, out1, dt1 = sweep()
    c2, out2, dt2 = sweep()
    doc = json.loads(out1)
    same = out1 == out2
    round_trip = json.dumps(doc, indent=2, ensure_ascii=False) + "\n" == out1
    ok = c1 == 0 and same and round_trip and max(dt1, dt2) < 60
    suites = {r["name"] for r in doc["reports"]}
    emit(capsys, 12, "default sweep deterministic and under 60 s", ok,
         f"exit {c1}, byte-identical={same}, round-trip={round_trip}, "
         f"{len(out1)} bytes, {len(suites)} identities from {len(SUITES)} suites, "
         f"runs {dt1:.1f} s / {dt2:.1f} s")
    assert ok
