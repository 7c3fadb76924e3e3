"""Overlaps between the eigenbases and their special-function closed forms.

    S(m, n)  = <e_m | f*_n>        S~(m, n) = <e*_m | f_n>
    U(m, n)  = <e_m | d*_n>        U~(m, n) = <e*_m | Z d_n>

S and S~ are Hahn polynomials in n with parameters (alphaHat, betaHat);
U and U~ are the rational functions U_m, V_m with parameters (a, b).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Optional

from .bases import build_basis, gram, operator_in_basis, operator_scale
from .linalg import Matrix
from .report import Checker, IdentityReport, merge
from .repn import ModuleParams, Representation, build_repn, pencil, require_generic
from .scalar import Scalar, ZeroDenominator, factorial, poch, poch_signed
from .specfun import HahnParams, RatParams, _q, _u, _v

KINDS = ("S", "S~", "U", "U~")
_ALIASES = {"St": "S~", "Stilde": "S~", "Ut": "U~", "Utilde": "U~", "S̃": "S~", "Ũ": "U~"}


def canonical_kind(kind: str) -> str:
    k = _ALIASES.get(kind, kind)
    if k not in KINDS:
        raise ValueError(f"unknown overlap kind {kind!r}; expected one of {', '.join(KINDS)}")
    return k


@dataclass(frozen=True)
class ParamMap:
    """Special-function parameters carried by a module (and pencil value mu)."""

    alpha_hat: Optional[Scalar]
    beta_hat: Optional[Scalar]
    a: Scalar
    b: Scalar
    N: int

    @classmethod
    def from_module(cls, params: ModuleParams, mu=None) -> "ParamMap":
        be = params.beta
        ah = bh = None
        if mu is not None:
            mu = params.backend.scalar(mu)
            ah = -1 - be - mu
            bh = mu - be - 1
        return cls(ah, bh, params.alpha - be, params.N - 2 * be - 1, params.N)

    def hahn(self) -> HahnParams:
        if self.alpha_hat is None:
            raise ValueError("Hahn parameters need the pencil value mu")
        return HahnParams(self.alpha_hat, self.beta_hat, self.N)

    def rational(self) -> RatParams:
        return RatParams(self.a, self.b, self.N)


@dataclass(frozen=True)
class OverlapTable:
    kind: str
    values: Matrix  # values[m, n]
    params: ModuleParams
    mu: Optional[Scalar]
    provenance: str  # "dot-product" or "closed-form"
    magnitude: Optional[Matrix] = None  # float backend: per-entry cancellation scale

    def __getitem__(self, mn):
        return self.values[mn]

    @property
    def N(self) -> int:
        return self.params.N


def _needs_mu(kind: str) -> bool:
    return kind in ("S", "S~")


def overlap_table(repn: Representation, mu=None, kind: str = "U") -> OverlapTable:
    kind = canonical_kind(kind)
    if _needs_mu(kind):
        if mu is None:
            mu = repn.mu_pencil
        if mu is None:
            raise ValueError(f"overlap {kind} needs the pencil value mu")
        mu = repn.backend.scalar(mu)
    require_generic(repn.params, mu if _needs_mu(kind) else None)
    left, right, mid = {
        "S": ("e", "f*", None),
        "S~": ("e*", "f", None),
        "U": ("e", "d*", None),
        "U~": ("e*", "d", repn.Z),
    }[kind]
    L = build_basis(repn, left)
    R = build_basis(repn, right, mu)
    vals = gram(L, R, mid)
    mag = None
    if not repn.backend.exact:
        Rabs = R.columns.abs() if mid is None else mid.abs() @ R.columns.abs()
        mag = L.columns.abs().T @ Rabs
    return OverlapTable(kind, vals, repn.params, mu if _needs_mu(kind) else None,
                        "dot-product", mag)


def overlap_tables(repn: Representation, mu=None) -> Dict[str, OverlapTable]:
    out = {k: overlap_table(repn, mu, k) for k in ("U", "U~")}
    if mu is not None or repn.mu_pencil is not None:
        out.update({k: overlap_table(repn, mu, k) for k in ("S", "S~")})
    return out


# ---------------------------------------------------------------------------
# closed forms


def _prefactor(p: ModuleParams, pm: ParamMap, kind: str, m: int, n: int):
    N = p.N
    one = p.backend.one()
    fN = factorial(N, one)
    if kind == "S":
        ah, bh = pm.alpha_hat, pm.beta_hat
        num = p.gauge_ratio(n, m) * fN * (-1) ** n * poch(ah + 1, n)
        den = factorial(n, one) * factorial(N - m, one) * poch(m + ah + bh + 1, m)
        what = "(m+alphaHat+betaHat+1)_m"
    elif kind == "S~":
        ah, bh = pm.alpha_hat, pm.beta_hat
        num = p.tail_ratio(n, m) * fN * (-1) ** n * poch(ah + 1, m) * poch(bh + 1, N - n)
        den = (factorial(m, one) * factorial(N - n, one) * poch(bh + 1, m)
               * poch(2 * m + ah + bh + 2, N - m))
        what = "(betaHat+1)_m (2m+alphaHat+betaHat+2)_(N-m)"
    elif kind == "U":
        a, b = pm.a, pm.b
        num = p.gauge_ratio(n, m) * poch(1 - a, n) * poch(1 + b, m)
        den = factorial(n, one) * poch(m + b - N, m)
        what = "(m+b-N)_m"
    else:
        a, b = pm.a, pm.b
        num = -p.tail_ratio(n, m) * poch(m + one, N - m) * poch(a - b - 1, N - n)
        den = factorial(N - n, one) * poch(-N * one, m) * poch_signed(-b, N - 2 * m)
        what = "(-N)_m (-b)_(N-2m)"
    if den == 0:
        raise ZeroDenominator(f"{what} at m={m}")
    return num / den


def closed_form_table(params: ModuleParams, mu=None, kind: str = "U") -> OverlapTable:
    kind = canonical_kind(kind)
    if _needs_mu(kind):
        if mu is None:
            raise ValueError(f"overlap {kind} needs the pencil value mu")
        mu = params.backend.scalar(mu)
    pm = ParamMap.from_module(params, mu if _needs_mu(kind) else None)
    if _needs_mu(kind):
        fp = pm.hahn()
        fn = _q
    else:
        fp = pm.rational()
        fn = _u if kind == "U" else _v
    N = params.N
    bk = params.backend
    vals = Matrix.zeros(N + 1, bk)
    mag = None if bk.exact else Matrix.zeros(N + 1, bk)
    for m in range(N + 1):
        for n in range(N + 1):
            c = _prefactor(params, pm, kind, m, n)
            v, g = fn(m, n, fp)
            vals.rows[m][n] = c * v
            if mag is not None:
                mag.rows[m][n] = abs(c) * g
    return OverlapTable(kind, vals, params, mu if _needs_mu(kind) else None, "closed-form", mag)


# ---------------------------------------------------------------------------
# checks


def _pair_sum_check(name: str, left: OverlapTable, right: OverlapTable, weight,
                    over_m: bool) -> IdentityReport:
    """sum_k weight * left(k..) right(k..) == delta, summing over n or over m."""
    bk = left.params.backend
    exact = bk.exact
    N = left.N
    chk = Checker(name, bk)
    L, R = left.values, right.values
    LM = left.magnitude
    RM = right.magnitude
    for i in range(N + 1):
        for j in range(N + 1):
            s = 0
            scale = 0
            for k in range(N + 1):
                if over_m:
                    lv, rv = L[k, i], R[k, j]
                else:
                    lv, rv = L[i, k], R[j, k]
                s = s + weight * lv * rv
                if not exact:
                    lm = LM[k, i] if over_m else LM[i, k]
                    rm = RM[k, j] if over_m else RM[j, k]
                    scale += abs(weight) * max(lm, abs(lv)) * max(rm, abs(rv))
            want = 1 if i == j else 0
            chk.add(s - want, scale + want if not exact else None,
                    **({"n": i, "n2": j} if over_m else {"m": i, "m2": j}))
    return chk.report()


def check_S_orthogonality(S: OverlapTable, St: OverlapTable) -> IdentityReport:
    """sum_n S~(m,n) S(m',n) = delta and sum_m S~(m,n) S(m,n') = delta."""
    one = S.params.backend.one()
    return merge("S_orthogonality", [
        _pair_sum_check("S_orthogonality", St, S, one, over_m=False),
        _pair_sum_check("S_dual_orthogonality", St, S, one, over_m=True),
    ])


def check_U_biorthogonality(U: OverlapTable, Ut: OverlapTable, w=-1) -> IdentityReport:
    """sum_n w U~(m,n) U(m',n) = delta and the dual sum over m, with w = -1."""
    w = U.params.backend.scalar(w)
    return merge("U_biorthogonality", [
        _pair_sum_check("U_biorthogonality", Ut, U, w, over_m=False),
        _pair_sum_check("U_dual_biorthogonality", Ut, U, w, over_m=True),
    ])


def _mag(t: OverlapTable, m: int, n: int):
    """Cancellation scale of one table entry (float backend)."""
    return max(t.magnitude[m, n], abs(t.values[m, n]))


def _compare_tables(chk: Checker, got: OverlapTable, want: OverlapTable):
    exact = chk.backend.exact
    for n in range(got.N + 1):  # column-major
        for m in range(got.N + 1):
            g, w = got.values[m, n], want.values[m, n]
            s = None
            if not exact:
                s = max(got.magnitude[m, n], abs(g)) + max(want.magnitude[m, n], abs(w))
            chk.add(g - w, s, kind=got.kind, m=m, n=n)


def match_closed_forms(tables: Dict[str, OverlapTable], pmap: Optional[ParamMap] = None
                       ) -> IdentityReport:
    """Compare every dot-product table with its independently computed closed form."""
    parts = []
    for kind in KINDS:
        t = tables.get(kind)
        if t is None:
            continue
        if t.provenance != "dot-product":
            raise ValueError("match_closed_forms needs dot-product tables")
        cf = closed_form_table(t.params, t.mu, kind)
        if pmap is not None:
            mine = ParamMap.from_module(t.params, t.mu)
            if (mine.a, mine.b) != (pmap.a, pmap.b) or (
                    t.mu is not None and (mine.alpha_hat, mine.beta_hat)
                    != (pmap.alpha_hat, pmap.beta_hat)):
                raise ValueError("parameter map does not belong to these tables")
        chk = Checker(f"closed_form[{kind}]", t.params.backend)
        _compare_tables(chk, t, cf)
        parts.append(chk.report())
    return merge("closed_forms", parts)


def check_gauge_covariance(params: ModuleParams, mu, gauge) -> IdentityReport:
    """Recompute S with another gauge; S'(m,n) = r(n)/r(m) * S(m,n) with
    r(k) = (a'_0...a'_{k-1}) / (a_0...a_{k-1})."""
    bk = params.backend
    other = ModuleParams.make(params.N, params.alpha, params.beta, gauge, bk)
    S1 = overlap_table(build_repn(params, mu), mu, "S")
    S2 = overlap_table(build_repn(other, mu), mu, "S")
    chk = Checker("gauge_covariance", bk)
    N = params.N

    def r(k):
        return other.gauge_product(0, k) / params.gauge_product(0, k)

    for m in range(N + 1):
        for n in range(N + 1):
            f = r(n) / r(m)
            want = f * S1.values[m, n]
            got = S2.values[m, n]
            sc = None if bk.exact else _mag(S2, m, n) + abs(f) * _mag(S1, m, n)
            chk.add(got - want, sc, m=m, n=n)
    return chk.report()


def check_recurrence_S(repn: Representation, mu=None) -> IdentityReport:
    """rho_n S_m(n) = sum_k W(e)_{k,m} S_k(n), with W = X + mu Z in the e basis."""
    if mu is None:
        mu = repn.mu_pencil
    if mu is None:
        raise ValueError("the S recurrence needs the pencil value mu")
    mu = repn.backend.scalar(mu)
    S = overlap_table(repn, mu, "S")
    W = pencil(repn, mu)
    e = build_basis(repn, "e")
    We = operator_in_basis(repn, W, e)
    Ws = operator_scale(W, e)
    rho = build_basis(repn, "f*", mu).eigenvalues
    bk = repn.backend
    chk = Checker("S_recurrence", bk)
    N = repn.N
    for m in range(N + 1):
        for n in range(N + 1):
            # W(e) is tridiagonal, so the terms outside k = m-1..m+1 must cancel too
            r = -rho[n] * S.values[m, n]
            sc = 0
            if not bk.exact:
                sc = abs(rho[n]) * _mag(S, m, n)
            for k in range(N + 1):
                r = r + We[k, m] * S.values[k, n]
                if not bk.exact:
                    sc += Ws[k, m] * _mag(S, k, n) + abs(We[k, m]) * _mag(S, k, n)
            chk.add(r, None if bk.exact else sc, m=m, n=n)
    return chk.report()


def check_overlap_contiguity(repn: Representation) -> IdentityReport:
    """U at alpha+1 against U at alpha, two ways:
        U'_m(n) = U_m(n) - a_{n-1} U_m(n-1)
        U'_m(n) = -sum_k Z(e)_{k,m} U_k(n)
    """
    p = repn.params
    p1 = p.with_alpha(p.alpha + 1)
    require_generic(p1)
    Ut = overlap_table(repn, None, "U")
    U1t = overlap_table(build_repn(p1), None, "U")
    U, U1 = Ut.values, U1t.values
    e = build_basis(repn, "e")
    Ze = operator_in_basis(repn, repn.Z, e)
    Zs = operator_scale(repn.Z, e)
    bk = repn.backend
    ex = bk.exact
    c1 = Checker("overlap_contiguity_1", bk)
    c2 = Checker("overlap_contiguity_2", bk)
    N = p.N
    a = p.gauge
    for m in range(N + 1):
        for n in range(N + 1):
            r = U1[m, n] - U[m, n]
            sc = None if ex else _mag(U1t, m, n) + _mag(Ut, m, n)
            if n > 0:
                r = r + a[n - 1] * U[m, n - 1]
                if not ex:
                    sc += abs(a[n - 1]) * _mag(Ut, m, n - 1)
            c1.add(r, sc, m=m, n=n)
            r = U1[m, n]
            sc = None if ex else _mag(U1t, m, n)
            for k in range(N + 1):
                r = r + Ze[k, m] * U[k, n]
                if not ex:
                    sc += (Zs[k, m] + abs(Ze[k, m])) * _mag(Ut, k, n)
            c2.add(r, sc, m=m, n=n)
    return merge("overlap_contiguity", [c1.report(), c2.report()])


def check_overlaps(repn: Representation, mu=None) -> IdentityReport:
    """Everything in this module for one module/pencil."""
    tables = overlap_tables(repn, mu)
    parts = [check_U_biorthogonality(tables["U"], tables["U~"])]
    if "S" in tables:
        parts.append(check_S_orthogonality(tables["S"], tables["S~"]))
    parts.append(match_closed_forms(tables))
    if "S" in tables:
        parts.append(check_recurrence_S(repn, mu))
    return merge("overlaps", parts)
