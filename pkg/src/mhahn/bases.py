"""The six (generalized) eigenbases of the two-diagonal module.

=======  =====================================  ======================  ==========
family   defining problem                       eigenvalue              support
=======  =====================================  ======================  ==========
d        (X - lam_n Z) d_n = 0                  lam_n = alpha - n       l >= n
d*       (X^T - lam_n Z^T) d*_n = 0             lam_n                   l <= n
e        V e_n = mu_n e_n                       (beta-n)(n-beta-1)      l <= n
e*       V^T e*_n = mu_n e*_n                   mu_n                    l >= n
f        (X + mu Z) f_n = rho_n f_n             rho_n = n - alpha - mu  l >= n
f*       (X^T + mu Z^T) f*_n = rho_n f*_n       rho_n                   l <= n
=======  =====================================  ======================  ==========

Every basis vector has coefficient 1 on |n>. Coefficients are built as
running products over the index gap between n and l, so the closed-form
Pochhammer ratios are never evaluated as 0/0.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence

from .linalg import Matrix, SingularBasis, solve_triangular
from .report import Checker, IdentityReport, merge
from .repn import ModuleParams, Representation, pencil
from .scalar import Scalar, ZeroDenominator

FAMILIES = ("d", "d*", "e", "e*", "f", "f*")
# rows j carrying nonzero coefficients of column n
LOWER_SUPPORT = {"d", "e*", "f"}  # j >= n
UPPER_SUPPORT = {"d*", "e", "f*"}  # j <= n


class MissingPencil(ValueError):
    pass


class ConsistencyFailure(AssertionError):
    pass


@dataclass(frozen=True)
class Basis:
    family: str
    columns: Matrix
    eigenvalues: List[Scalar]
    params: ModuleParams
    mu: Optional[Scalar] = None

    def vector(self, n: int) -> List[Scalar]:
        return self.columns.column(n)


def _div(num, den, factor: str):
    if den == 0:
        raise ZeroDenominator(factor)
    return num / den


def _col_d_like(p: ModuleParams, n: int, c) -> List[Scalar]:
    # coefficient on |l>: (a_n..a_{l-1}) * prod_{j=N-l}^{N-n-1} (c+j)/(n-N+j)
    N, a = p.N, p.gauge
    col = [p.backend.zero()] * (N + 1)
    col[n] = p.backend.one()
    for l in range(n + 1, N + 1):
        col[l] = col[l - 1] * a[l - 1] * (c + N - l) / (n - l)
    return col


def _col_dstar_like(p: ModuleParams, n: int, c) -> List[Scalar]:
    # coefficient on |l>: (a_l..a_{n-1}) * prod_{j=l}^{n-1} (c+j)/(j-n)
    N, a = p.N, p.gauge
    col = [p.backend.zero()] * (N + 1)
    col[n] = p.backend.one()
    for l in range(n, 0, -1):
        col[l - 1] = col[l] * a[l - 1] * (c + l - 1) / (l - 1 - n)
    return col


def _col_e(p: ModuleParams, n: int) -> List[Scalar]:
    # coefficient on |l>: prod_{j=l}^{n-1} (j+1)(j-N)/((j-n)(n-2beta-1+j)) / (a_l..a_{n-1})
    N, a, be = p.N, p.gauge, p.beta
    col = [p.backend.zero()] * (N + 1)
    col[n] = p.backend.one()
    for l in range(n, 0, -1):
        j = l - 1
        col[j] = _div(col[l] * (j + 1) * (j - N),
                      a[j] * (j - n) * (n - 2 * be - 1 + j),
                      f"(n-2*beta-1)_l in e_{n}")
    return col


def _col_estar(p: ModuleParams, n: int) -> List[Scalar]:
    # coefficient on |l>: prod_{j=N-l}^{N-n-1} (j+1)(j-N)/((n-N+j)(c+j)) / (a_n..a_{l-1})
    N, a, be = p.N, p.gauge, p.beta
    c = 2 * be + 1 - N - n
    col = [p.backend.zero()] * (N + 1)
    col[n] = p.backend.one()
    for l in range(n + 1, N + 1):
        j = N - l
        col[l] = _div(col[l - 1] * (j + 1) * (j - N),
                      a[l - 1] * (n - N + j) * (c + j),
                      f"(-N-n+2*beta+1)_(N-l) in e*_{n}")
    return col


def basis_columns(p: ModuleParams, family: str, mu=None) -> List[List[Scalar]]:
    N, al, be = p.N, p.alpha, p.beta
    cols = []
    for n in range(N + 1):
        if family == "d":
            cols.append(_col_d_like(p, n, n - N - al + be + 1))
        elif family == "d*":
            cols.append(_col_dstar_like(p, n, al - be - n))
        elif family == "e":
            cols.append(_col_e(p, n))
        elif family == "e*":
            cols.append(_col_estar(p, n))
        elif family == "f":
            cols.append(_col_d_like(p, n, -N + be + mu + 1))
        elif family == "f*":
            cols.append(_col_dstar_like(p, n, -be - mu))
        else:
            raise ValueError(f"unknown basis family {family!r}")
    return cols


def eigenvalues(p: ModuleParams, family: str, mu=None) -> List[Scalar]:
    al, be = p.alpha, p.beta
    if family in ("d", "d*"):
        return [al - n for n in range(p.N + 1)]
    if family in ("e", "e*"):
        return [(be - n) * (n - be - 1) for n in range(p.N + 1)]
    return [n - al - mu for n in range(p.N + 1)]


_CACHE: Dict[tuple, Basis] = {}
_CACHE_MAX = 256


def build_basis(repn: Representation, family: str, mu=None) -> Basis:
    if family not in FAMILIES:
        raise ValueError(f"unknown basis family {family!r}")
    p = repn.params
    if family in ("f", "f*"):
        if mu is None:
            mu = repn.mu_pencil
        if mu is None:
            raise MissingPencil(f"family {family} needs the pencil parameter mu")
        mu = p.backend.scalar(mu)
    else:
        mu = None
    key = (p, family, type(mu), mu)
    hit = _CACHE.get(key)
    if hit is not None:
        return hit
    cols = basis_columns(p, family, mu)
    b = Basis(family, Matrix.from_columns(cols, p.backend), eigenvalues(p, family, mu), p, mu)
    if len(_CACHE) >= _CACHE_MAX:
        _CACHE.clear()
    _CACHE[key] = b
    return b


def build_all(repn: Representation, mu=None) -> Dict[str, Basis]:
    out = {f: build_basis(repn, f) for f in ("d", "d*", "e", "e*")}
    if mu is not None or repn.mu_pencil is not None:
        out["f"] = build_basis(repn, "f", mu)
        out["f*"] = build_basis(repn, "f*", mu)
    return out


def z_on_d(repn: Representation, basis_d: Basis) -> Matrix:
    """Columns Z|d_n>, computed by matrix product and by the alpha -> alpha-1 rule."""
    if basis_d.family != "d":
        raise ValueError("z_on_d needs the d basis")
    direct = repn.Z @ basis_d.columns
    p = basis_d.params
    shifted = basis_columns(p.with_alpha(p.alpha - 1), "d")
    rule = -Matrix.from_columns(shifted, p.backend)
    if p.backend.exact:
        same = direct == rule
    else:
        scale = max(1.0, float(direct.max_abs()))
        same = float((direct - rule).max_abs()) <= 1e-9 * scale
    if not same:
        raise ConsistencyFailure("Z|d_n> disagrees with -|d_n>(alpha -> alpha-1)")
    return direct


def _problem_matrix(repn: Representation, basis: Basis, lam) -> Matrix:
    f = basis.family
    if f == "d":
        return repn.X - repn.Z.scale(lam)
    if f == "d*":
        return (repn.X - repn.Z.scale(lam)).T
    if f == "e":
        return repn.V.plus_identity(-lam)
    if f == "e*":
        return repn.V.T.plus_identity(-lam)
    W = pencil(repn, basis.mu).plus_identity(-lam)
    return W if f == "f" else W.T


def _add_vector_residual(chk: Checker, M: Matrix, v, **where):
    exact = chk.backend.exact
    for i, row in enumerate(M.rows):
        r = 0
        s = 0
        for a, b in zip(row, v):
            if a and b:
                t = a * b
                r = r + t
                if not exact:
                    s = s + abs(t)
        chk.add(r, s, row=i, **where)


def check_eigen_residuals(repn: Representation, basis: Basis) -> IdentityReport:
    chk = Checker(f"eigen_residual[{basis.family}]", repn.backend)
    for n, lam in enumerate(basis.eigenvalues):
        M = _problem_matrix(repn, basis, lam)
        _add_vector_residual(chk, M, basis.vector(n), n=n)
    return chk.report()


def check_triangular(basis: Basis, pivot=1) -> IdentityReport:
    """Sparsity pattern and unit pivots of the column matrix."""
    bk = basis.params.backend
    chk = Checker(f"triangular[{basis.family}]", bk)
    cols = basis.columns
    lower = basis.family in LOWER_SUPPORT
    for n in range(cols.dim):
        for j in range(cols.dim):
            v = cols[j, n]
            if j == n:
                chk.add(v - pivot, 1, row=j, col=n)
            elif (j < n) if lower else (j > n):
                chk.add(v, 1, row=j, col=n)
    return chk.report()


def check_zd_triangular(repn: Representation, basis_d: Basis) -> IdentityReport:
    """Z|d_n> = -|n> + (terms with j > n), and the two computations of it agree."""
    bk = repn.backend
    chk = Checker("triangular[Zd]", bk)
    try:
        zd = z_on_d(repn, basis_d)
    except ConsistencyFailure as exc:
        chk.add(bk.one(), 1, reason=str(exc))
        return chk.report()
    for n in range(zd.dim):
        for j in range(n + 1):
            want = -1 if j == n else 0
            chk.add(zd[j, n] - want, 1, row=j, col=n)
    return chk.report()


def gram(left: Basis, right: Basis, middle: Optional[Matrix] = None) -> Matrix:
    """G(m, n) = <left_m | middle | right_n> (bilinear)."""
    R = right.columns if middle is None else middle @ right.columns
    return left.columns.T @ R


def _matrix_identity(chk: Checker, got: Matrix, want: Matrix, scale_m: Optional[Matrix], **where):
    for i in range(got.dim):
        for j in range(got.dim):
            r = got[i, j] - want[i, j]
            s = None if scale_m is None else scale_m[i, j] + abs(want[i, j])
            chk.add(r, s, row=i, col=j, **where)


def check_gram(repn: Representation, bases: Dict[str, Basis]) -> IdentityReport:
    bk = repn.backend
    I = Matrix.identity(repn.dim, bk)
    exact = bk.exact
    parts = []
    pairs = [("e*", "e", None, I), ("f*", "f", None, I), ("d*", "d", repn.Z, -I)]
    for l, r, mid, want in pairs:
        if l not in bases or r not in bases:
            continue
        label = f"gram[{l}|Z|{r}]" if mid is not None else f"gram[{l}|{r}]"
        chk = Checker(label, bk)
        got = gram(bases[l], bases[r], mid)
        scale = None
        if not exact:
            R = bases[r].columns.abs() if mid is None else mid.abs() @ bases[r].columns.abs()
            scale = bases[l].columns.abs().T @ R
        _matrix_identity(chk, got, want, scale)
        parts.append(chk.report())
    return merge("gram", parts)


def completeness_sum(kets: Matrix, bras: Matrix, weight=1, skip: Sequence[int] = ()) -> Matrix:
    """sum_n weight * |ket_n><bra_n|, optionally leaving out some n."""
    n1 = kets.dim
    bk = kets.backend
    out = Matrix.zeros(n1, bk)
    for n in range(n1):
        if n in skip:
            continue
        k = kets.column(n)
        b = bras.column(n)
        for i in range(n1):
            if not k[i]:
                continue
            ki = weight * k[i]
            row = out.rows[i]
            for j in range(n1):
                if b[j]:
                    row[j] += ki * b[j]
    return out


def check_completeness(repn: Representation, bases: Dict[str, Basis], skip_e=()) -> IdentityReport:
    bk = repn.backend
    I = Matrix.identity(repn.dim, bk)
    exact = bk.exact
    parts = []
    specs = [("e", "e*", None, 1, skip_e), ("f", "f*", None, 1, ()), ("d", "d*", repn.Z, -1, ())]
    for k, b, op, w, skip in specs:
        if k not in bases or b not in bases:
            continue
        kets = bases[k].columns if op is None else op @ bases[k].columns
        chk = Checker(f"completeness[{k}]", bk)
        got = completeness_sum(kets, bases[b].columns, bk.scalar(w), skip)
        scale = None
        if not exact:
            scale = completeness_sum(kets.abs(), bases[b].columns.abs())
        _matrix_identity(chk, got, I, scale)
        parts.append(chk.report())
    return merge("completeness", parts)


def operator_scale(op: Matrix, basis: Basis) -> Optional[Matrix]:
    """|B^{-1}| |op| |B|: entrywise bound on the terms summed by
    :func:`operator_in_basis`, used as the float residual scale. None when exact."""
    if op.backend.exact:
        return None
    B = basis.columns
    Binv = solve_triangular(B, Matrix.identity(B.dim, B.backend))
    return Binv.abs() @ (op.abs() @ B.abs())


def operator_in_basis(repn: Representation, op: Matrix, basis: Basis) -> Matrix:
    """B^{-1} op B by triangular substitution against the column matrix."""
    try:
        return solve_triangular(basis.columns, op @ basis.columns)
    except SingularBasis:
        raise
    except ZeroDivisionError as exc:  # pragma: no cover - guarded by pivots
        raise SingularBasis(str(exc)) from exc


# ---------------------------------------------------------------------------
# operator actions on the bases


class _EntryChecks:
    """Entrywise comparisons of an operator matrix in a basis against formulas."""

    def __init__(self, chk: Checker, label: str, repn: Representation, op: Matrix, basis: Basis):
        self.chk = chk
        self.label = label
        self.M = operator_in_basis(repn, op, basis)
        self.S = operator_scale(op, basis)

    def scale(self, j: int, n: int):
        return None if self.S is None else self.S[j, n]

    def equals(self, j: int, n: int, want, what: str, want_scale=None):
        got = self.M[j, n]
        s = None
        if self.S is not None:
            s = self.S[j, n] + (abs(want) if want_scale is None else want_scale)
        self.chk.add(got - want, s, matrix=self.label, entry=what, row=j, col=n)

    def zero(self, j: int, n: int, what: str):
        self.chk.add(self.M[j, n], self.scale(j, n), matrix=self.label, entry=what, row=j, col=n)


def _fit_eta1(Vd: Matrix, p: ModuleParams):
    """Solve the V^(d) diagonal formula for eta1 at the first usable n."""
    al, be = p.alpha, p.beta
    for n in range(p.N + 1):
        c = n - be
        if c != 0:
            k = (n - al) * (al + 1 - n) + (al - be) * (al + be + 1 - p.N)
            return (Vd[n, n] - k) / c
    return None


def check_appendix_actions(repn: Representation, mu=None) -> IdentityReport:
    """Matrices of Z, X, V (and products) in the six bases against their closed forms.

    The V^(d) and (V^T Z^T)^(d*) formulas contain a free constant eta1; it is
    fitted from one diagonal entry of V^(d), reported in ``notes["eta1"]``, and
    then every eta1-dependent entry is checked against that single value.
    """
    p = repn.params
    N, al, be, a = p.N, p.alpha, p.beta, p.gauge
    G = p.gauge_product
    bk = repn.backend
    B = build_all(repn, mu)
    Z, X, V = repn.Z, repn.X, repn.V
    half = bk.scalar(1) / 2
    chk = Checker("appendix_actions", bk)

    # d and d*: Z, Z^T two-diagonal; V^(d) lower Hessenberg; products tridiagonal
    Zd = _EntryChecks(chk, "Z(d)", repn, Z, B["d"])
    Xd = _EntryChecks(chk, "X(d)", repn, X, B["d"])
    ZTds = _EntryChecks(chk, "ZT(d*)", repn, Z.T, B["d*"])
    Vd = _EntryChecks(chk, "V(d)", repn, V, B["d"])
    VTds = _EntryChecks(chk, "VT(d*)", repn, V.T, B["d*"])
    VZd = _EntryChecks(chk, "VZ(d)", repn, V @ Z, B["d"])
    VZTds = _EntryChecks(chk, "VTZT(d*)", repn, V.T @ Z.T, B["d*"])
    eta1 = _fit_eta1(Vd.M, p)
    if eta1 is None:
        eta1 = bk.zero()
    for n in range(N + 1):
        lam = al - n
        for j in range(N + 1):
            # Z|d_n> = -|d_n> + a_n |d_{n+1}>, X|d_n> = lam_n Z|d_n>
            zd = -1 if j == n else (a[n] if j == n + 1 else 0)
            Zd.equals(j, n, bk.scalar(zd), "two-diagonal")
            Xd.equals(j, n, lam * zd, "lam Z")
            zt = -1 if j == n else (a[n - 1] if j == n - 1 else 0)
            ZTds.equals(j, n, bk.scalar(zt), "two-diagonal")
            if j < n - 1:
                Vd.zero(j, n, "lower Hessenberg")
            if j > n + 1:
                VTds.zero(j, n, "upper Hessenberg")
            if abs(j - n) > 1:
                VZd.zero(j, n, "tridiagonal")
                VZTds.zero(j, n, "tridiagonal")
            # (VZ)^(d)_{j,n} = (V^T Z^T)^(d*)_{n,j}
            VZd.equals(j, n, VZTds.M[n, j], "transpose relation", VZTds.scale(n, j))
        if n > 0:
            Vd.equals(n - 1, n, n * (n - N - 1) / a[n - 1], "superdiagonal")
            VZTds.equals(n - 1, n, a[n - 1] * (al - n) * (n - al - eta1 - 1), "superdiagonal")
        Vd.equals(n, n, (n - al) * (al + eta1 + 1 - n) + (al - be) * (al + be + eta1 + 1 - N),
                  "diagonal")
        for j in range(n + 1, N + 1):
            Vd.equals(j, n, (al - be) * (al + be + eta1 + 1 - N) * G(n, j), "below diagonal")
        if n < N:
            VZTds.equals(n + 1, n, (n + 1) * (N - n) / a[n], "subdiagonal")
        VZTds.equals(n, n, (al - n) * (N - 2 * n) + (be - n) * eta1 + (be - N) * (be + 1),
                     "diagonal")

    # e: Z and X tridiagonal
    Ze = _EntryChecks(chk, "Z(e)", repn, Z, B["e"])
    Xe = _EntryChecks(chk, "X(e)", repn, X, B["e"])
    for n in range(N + 1):
        for j in range(N + 1):
            if abs(j - n) > 1:
                Ze.zero(j, n, "tridiagonal")
                Xe.zero(j, n, "tridiagonal")
        if n < N:
            Ze.equals(n + 1, n, a[n], "subdiagonal")
            Xe.equals(n + 1, n, a[n] * (be - n), "subdiagonal")
        ze = -1 - (n + 1) * (n - N) / (2 * (be - n)) + n * (n - N - 1) / (2 * (be - n + 1))
        Ze.equals(n, n, ze, "diagonal")
        Xe.equals(n, n, N * half - al, "diagonal")
        if n > 0:
            up = (n * (n - N - 1) * (be + (2 - n) * half) * (be + (1 - n - N) * half)
                  / (4 * a[n - 1] * (be - n + half) * (be - n + 1) ** 2 * (be - n + 3 * half)))
            Ze.equals(n - 1, n, up, "superdiagonal")
            Xe.equals(n - 1, n, -(be - n + 1) * up, "superdiagonal")

    notes = {"eta1": eta1, "eta": repn.eta}
    if "f" in B:
        m = B["f"].mu
        Zf = _EntryChecks(chk, "Z(f)", repn, Z, B["f"])
        Xf = _EntryChecks(chk, "X(f)", repn, X, B["f"])
        Vf = _EntryChecks(chk, "V(f)", repn, V, B["f"])
        VTfs = _EntryChecks(chk, "VT(f*)", repn, V.T, B["f*"])
        for n in range(N + 1):
            for j in range(N + 1):
                if j < n:
                    Zf.zero(j, n, "lower triangular")
                    Xf.zero(j, n, "lower triangular")
                else:
                    Zf.equals(j, n, (-1) ** (j + n + 1) * G(n, j), "gauge product")
                    xf = n - al if j == n else (-1) ** (j + n) * m * G(n, j)
                    Xf.equals(j, n, xf, "gauge product")
                if abs(j - n) > 1:
                    Vf.zero(j, n, "tridiagonal")
                VTfs.equals(j, n, Vf.M[n, j], "transpose relation", Vf.scale(n, j))
            if n < N:
                Vf.equals(n + 1, n, a[n] * (n - be - m) * (n - N + be - m + 1), "subdiagonal")
            Vf.equals(n, n, (N - 2 * n) * m - 2 * n * (N - n) + be * (N - be - 1), "diagonal")
            if n > 0:
                Vf.equals(n - 1, n, n * (n - N - 1) / a[n - 1], "superdiagonal")
        notes["mu"] = m
    chk.notes.update(notes)
    return chk.report()


def check_bases(repn: Representation, mu=None) -> List[IdentityReport]:
    """Eigen-residuals, supports, Gram identities and completeness for every family."""
    B = build_all(repn, mu)
    out = [check_eigen_residuals(repn, b) for b in B.values()]
    out.append(merge("triangular", [check_triangular(b) for b in B.values()]
                     + [check_zd_triangular(repn, B["d"])]))
    out.append(check_gram(repn, B))
    out.append(check_completeness(repn, B))
    return out
