"""Two-diagonal representation of the meta Hahn algebra.

The module has basis |0>, ..., |N> and generators

    Z|n> = -|n> + a_n |n+1>
    X|n> = (n - alpha)|n> - a_n (n - beta)|n+1>
    V|n> = (beta - n)(n - beta - 1)|n> - n (N + 1 - n) / a_{n-1} |n-1>

with gauge constants a_0..a_{N-1} nonzero and a_N = 0. The algebra
constants are xi = (beta + 1)(N - beta) and eta = 2 alpha - N.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import List, Optional, Sequence, Tuple

from .linalg import Matrix, anticommutator, commutator
from .report import Checker, IdentityReport, merge
from .scalar import (
    EXACT,
    Backend,
    BackendMismatch,
    Scalar,
    backend_of_all,
    format_scalar,
    get_backend,
)


class GaugeInvalid(ValueError):
    pass


class GenericityError(ValueError):
    def __init__(self, violations: Sequence[str]):
        self.violations = list(violations)
        super().__init__("non-generic parameters: " + "; ".join(self.violations))


@dataclass(frozen=True)
class ModuleParams:
    N: int
    alpha: Scalar
    beta: Scalar
    gauge: Tuple[Scalar, ...]
    backend: Backend = EXACT

    def __post_init__(self):
        if self.N < 0:
            raise ValueError("N must be non-negative")
        if len(self.gauge) != self.N + 1:
            raise GaugeInvalid(f"gauge needs {self.N + 1} entries, got {len(self.gauge)}")
        if self.gauge[self.N] != 0:
            raise GaugeInvalid("a_N must be 0")
        for n in range(self.N):
            if self.gauge[n] == 0:
                raise GaugeInvalid(f"a_{n} must be nonzero")
        found = backend_of_all([self.alpha, self.beta, *self.gauge])
        if found is not None and found is not self.backend:
            raise BackendMismatch("parameters do not match the declared backend")

    @classmethod
    def make(cls, N: int, alpha, beta, gauge=None, backend="exact") -> "ModuleParams":
        """Coerce raw numbers/strings; default gauge is a_n = 1 (n < N)."""
        b = get_backend(backend)
        if gauge is None:
            g = [b.one()] * N + [b.zero()]
        else:
            g = [b.scalar(x) for x in gauge]
            if len(g) == N:
                g.append(b.zero())
        return cls(N, b.scalar(alpha), b.scalar(beta), tuple(g), b)

    @classmethod
    def from_rational(cls, a, b, N: int, gauge=None, backend="exact") -> "ModuleParams":
        """Module whose rational-function parameters are (a, b)."""
        bk = get_backend(backend)
        a, b = bk.scalar(a), bk.scalar(b)
        beta = (N - 1 - b) / 2
        return cls.make(N, a + beta, beta, gauge, bk)

    @classmethod
    def from_hahn(cls, alpha_hat, beta_hat, N: int, gauge=None, backend="exact"):
        """Module and pencil value mu whose Hahn parameters are (alpha_hat, beta_hat).

        alpha is irrelevant to the Hahn overlaps; it is set to 0.
        """
        bk = get_backend(backend)
        ah, bh = bk.scalar(alpha_hat), bk.scalar(beta_hat)
        beta = -(ah + bh + 2) / 2
        mu = (bh - ah) / 2
        return cls.make(N, 0, beta, gauge, bk), mu

    def with_alpha(self, alpha) -> "ModuleParams":
        return replace(self, alpha=alpha)

    def gauge_product(self, lo: int, hi: int) -> Scalar:
        """a_lo a_{lo+1} ... a_{hi-1}; empty product is 1."""
        r = self.backend.one()
        for j in range(lo, hi):
            r = r * self.gauge[j]
        return r

    def gauge_ratio(self, num_lo: int, den_lo: int) -> Scalar:
        """(a_0...a_{num_lo-1}) / (a_0...a_{den_lo-1}) as a product over the index gap."""
        if num_lo >= den_lo:
            return self.gauge_product(den_lo, num_lo)
        return 1 / self.gauge_product(num_lo, den_lo)

    def tail_ratio(self, num_lo: int, den_lo: int) -> Scalar:
        """(a_{num_lo}...a_{N-1}) / (a_{den_lo}...a_{N-1}) over the index gap."""
        if num_lo <= den_lo:
            return self.gauge_product(num_lo, den_lo)
        return 1 / self.gauge_product(den_lo, num_lo)


@dataclass(frozen=True)
class Representation:
    params: ModuleParams
    Z: Matrix
    X: Matrix
    V: Matrix
    xi: Scalar
    eta: Scalar
    mu_pencil: Optional[Scalar] = None

    @property
    def backend(self) -> Backend:
        return self.params.backend

    @property
    def N(self) -> int:
        return self.params.N

    @property
    def dim(self) -> int:
        return self.params.N + 1


def build_repn(params: ModuleParams, mu=None) -> Representation:
    N, al, be, a = params.N, params.alpha, params.beta, params.gauge
    bk = params.backend
    n1 = N + 1
    Z = Matrix.zeros(n1, bk)
    X = Matrix.zeros(n1, bk)
    V = Matrix.zeros(n1, bk)
    for n in range(n1):
        Z.rows[n][n] = bk.scalar(-1)
        X.rows[n][n] = n - al
        V.rows[n][n] = (be - n) * (n - be - 1)
        if n < N:
            Z.rows[n + 1][n] = a[n]
            X.rows[n + 1][n] = -a[n] * (n - be)
        if n > 0:
            V.rows[n - 1][n] = -n * (N + 1 - n) / a[n - 1]
    xi = (be + 1) * (N - be)
    eta = 2 * al - N
    if mu is not None:
        mu = bk.scalar(mu)
    return Representation(params, Z, X, V, xi, eta, mu)


def transpose(m: Matrix) -> Matrix:
    return m.T


def pencil(repn: Representation, mu) -> Matrix:
    """W = X + mu Z."""
    return repn.X + repn.Z.scale(repn.backend.scalar(mu))


def casimir(repn: Representation) -> Matrix:
    Z, X, V = repn.Z, repn.X, repn.V
    Z2 = Z @ Z
    q = anticommutator(V, Z2 + Z) + (X @ X + Z2).scale(2 * repn.backend.one())
    q = q + X.scale(2 * repn.eta) + Z.scale(2 * (repn.xi + 1))
    return q


def _scalar_multiple(m: Matrix):
    """Return q if m == q I, else None."""
    q = m.rows[0][0] if m.dim else None
    for i in range(m.dim):
        for j in range(m.dim):
            want = q if i == j else 0
            if m.rows[i][j] != want:
                return None
    return q


def _input_scale(repn: Representation):
    return 1 + max(repn.Z.max_abs(), repn.X.max_abs(), repn.V.max_abs())


def _add_matrix(chk: Checker, residual: Matrix, scale, **where):
    # a single max-entry point per matrix relation
    worst = None
    wi = wj = 0
    for i, row in enumerate(residual.rows):
        for j, v in enumerate(row):
            if worst is None or abs(v) > abs(worst):
                worst, wi, wj = v, i, j
    if worst is None:
        worst = chk.backend.zero()
    chk.add(worst, scale, row=wi, col=wj, **where)


RELATIONS = {
    "ZX": "[Z,X] = Z^2 + Z",
    "XV": "[X,V] = {V,Z} + V + xi",
    "VZ": "[V,Z] = 2X + eta",
}


def meta_residuals(repn: Representation) -> List[Tuple[str, Matrix]]:
    """Residual matrices of the three defining relations, keyed as in RELATIONS."""
    Z, X, V = repn.Z, repn.X, repn.V
    r1 = commutator(Z, X) - Z @ Z - Z
    r2 = (commutator(X, V) - anticommutator(V, Z) - V).plus_identity(-repn.xi)
    r3 = (commutator(V, Z) - X.scale(2 * repn.backend.one())).plus_identity(-repn.eta)
    return [("ZX", r1), ("XV", r2), ("VZ", r3)]


def meta_relation_reports(repn: Representation) -> List[IdentityReport]:
    """One report per defining relation."""
    s = _input_scale(repn)
    out = []
    for label, r in meta_residuals(repn):
        chk = Checker(f"relation_{label}", repn.backend)
        chk.notes["relation"] = RELATIONS[label]
        _add_matrix(chk, r, s)
        out.append(chk.report())
    return out


def check_meta_relations(repn: Representation) -> IdentityReport:
    parts = meta_relation_reports(repn)
    r = merge("meta_relations", parts)
    r.notes = {"residuals": {RELATIONS[p.name[len("relation_"):]]: format_scalar(p.max_residual)
                          for p in parts}}
    return r


def check_casimir(repn: Representation) -> IdentityReport:
    """Q commutes with Z, X and V. Scalarness of Q is recorded, not asserted."""
    chk = Checker("casimir_central", repn.backend)
    Q = casimir(repn)
    s = _input_scale(repn)
    s = s * s * s
    for label, g in (("Z", repn.Z), ("X", repn.X), ("V", repn.V)):
        _add_matrix(chk, commutator(Q, g), s, generator=label)
    q = _scalar_multiple(Q)
    chk.notes["scalar"] = q is not None
    if q is not None:
        chk.notes["value"] = q
    return chk.report()


def embedding_constants(repn: Representation, rho, *, printed: bool = False):
    """Structure constants (a, b, c1, d1, c2, d2) of the Hahn algebra realized
    by K1 = X + rho Z, K2 = V. ``d1`` is returned as a matrix (it carries Q).

    Default: the constants that make both relations hold identically,
    b = 2 rho + 2 eta and d1 = -Q - xi + eta rho. With ``printed=True`` the
    alternative b = 2 rho - xi + 2 eta, d1 = -Q is used instead; that variant
    only holds when xi = 0 and eta * rho = 0.
    """
    bk = repn.backend
    rho = bk.scalar(rho)
    two = 2 * bk.one()
    Q = casimir(repn)
    if printed:
        b = 2 * rho - repn.xi + 2 * repn.eta
        d1 = -Q
    else:
        b = 2 * rho + 2 * repn.eta
        d1 = (-Q).plus_identity(-repn.xi + repn.eta * rho)
    return two, b, -bk.one(), d1, bk.zero(), 2 * repn.xi * rho


def hahn_embedding_residuals(repn: Representation, rho, *, d2=None, printed: bool = False):
    """Residuals of
        [K1, [K2, K1]] = a K1^2 + b K1 + c1 K2 + d1,
        [K2, [K1, K2]] = a {K1, K2} + b K2 + c2 K1 + d2,
    for K1 = X + rho Z, K2 = V. ``d2`` may be overridden (perturbation controls).
    """
    a, b, c1, d1, c2, d2_default = embedding_constants(repn, rho, printed=printed)
    if d2 is None:
        d2 = d2_default
    K1 = pencil(repn, rho)
    K2 = repn.V
    lhs1 = commutator(K1, commutator(K2, K1))
    rhs1 = (K1 @ K1).scale(a) + K1.scale(b) + K2.scale(c1) + d1
    lhs2 = commutator(K2, commutator(K1, K2))
    rhs2 = (anticommutator(K1, K2).scale(a) + K2.scale(b) + K1.scale(c2)).plus_identity(d2)
    return lhs1 - rhs1, lhs2 - rhs2


def check_hahn_embedding(repn: Representation, rho, *, printed: bool = False,
                         d2=None) -> IdentityReport:
    name = "hahn_embedding_printed_map" if printed else "hahn_embedding"
    chk = Checker(name, repn.backend)
    s = _input_scale(repn)
    s = s * s * s
    r1, r2 = hahn_embedding_residuals(repn, rho, d2=d2, printed=printed)
    _add_matrix(chk, r1, s, relation=1, rho=rho)
    _add_matrix(chk, r2, s, relation=2, rho=rho)
    return chk.report()


# ---------------------------------------------------------------------------
# genericity


def _int_in(x, lo: int, hi: int):
    """Integer value of x if x is an integer in [lo, hi], else None."""
    if x != int(x):
        return None
    k = int(x)
    return k if lo <= k <= hi else None


def genericity_check(params: ModuleParams, mu=None, *, check_alpha: bool = True) -> List[str]:
    """Named parameter coincidences that break the closed forms.

    Empty list means every eigenvalue family is simple and no denominator
    factor of the basis coefficients, overlap closed forms, weights or
    norms vanishes on the grid 0 <= m, n <= N. ``check_alpha=False`` drops
    the conditions involving alpha, which only the d bases and the rational
    functions need.
    """
    N, al, be = params.N, params.alpha, params.beta
    out = []
    t = 2 * be + 1
    k = _int_in(t, 1, 2 * N - 1)
    if k is not None:
        out.append(
            f"degenerate V spectrum: 2*beta+1 = {k} gives mu_i = mu_j with i+j = {k}"
            " (also kills (n-2*beta-1)_l in e/e* coefficients)")
    k = _int_in(t, 0, 2 * N) if N > 0 else None
    if k is not None and k in (0, 2 * N):
        out.append(
            f"2*beta+1 = {k}: (2m+alphaHat+betaHat+1) or (b+1)_m vanishes"
            " in Hahn/rational normalizations")
    k = _int_in(t, -1, 2 * N + 1)
    if k is not None and k in (-1, 2 * N + 1):
        out.append(
            f"2*beta+1 = {k}: (beta-n) or (beta-n+1) vanishes at the edge of the grid,"
            " a 0/0 in the e-basis action coefficients")
    k = _int_in(al - be, 1 - N, N) if check_alpha else None
    if k is not None and N > 0:
        out.append(
            f"alpha-beta = {k}: (-n+alpha-beta)_n vanishes in d* coefficients,"
            " i.e. (a-x)_k / (1-a)_n of the rational U family (a = alpha-beta)")
    k = _int_in(al + be, 1, N) if check_alpha else None
    if k is not None:
        out.append(
            f"alpha+beta = {k}: (a-b-1)_(N-n) and the (a'-x)_k denominators of the"
            " rational V family vanish (a' = b+2-a = N+1-alpha-beta)")
    if mu is not None:
        mu = params.backend.scalar(mu)
        k = _int_in(be + mu, 0, N - 1)
        if k is not None:
            out.append(
                f"beta+mu = {k}: (-beta-mu)_l = (alphaHat+1)_l vanishes in f*"
                " coefficients and Hahn denominators")
        k = _int_in(mu - be, 1 - N, 0)
        if k is not None:
            out.append(
                f"mu-beta = {k}: (mu-beta)_m = (betaHat+1)_m vanishes in Hahn norms")
    return out


def require_generic(params: ModuleParams, mu=None, *, check_alpha: bool = True) -> None:
    v = genericity_check(params, mu, check_alpha=check_alpha)
    if v:
        raise GenericityError(v)
