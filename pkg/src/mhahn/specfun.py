"""Hahn polynomials, dual Hahn polynomials and the rational Hahn functions.

    Q_m(x; ah, bh, N)   = 3F2(-m, m+ah+bh+1, -x; -N, ah+1; 1)
    R_m(lam(x); ah, bh, N) = 3F2(-m, -x, x+ah+bh+1; -N, ah+1; 1)
    U_m(x; a, b, N)     = (-1)^m (-N)_m / (b+1)_m * 3F2(-x, -m, b+m-N; -N, a-x; 1)
    V_m(x; a, b, N)     = U_m(N-x; b+2-a, b, N)

The ``check_*`` functions verify orthogonality, recurrence, difference and
contiguity identities on the integer grid. Each identity is written with
all terms on one side; on the float backend the residual is compared with
the sum of term magnitudes (including cancellation inside each 3F2).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, List, Optional, Tuple

from .report import Checker, IdentityReport, merge
from .scalar import (
    FLOAT,
    Backend,
    Scalar,
    ZeroDenominator,
    backend_of_all,
    factorial,
    hyp3f2_with_mag,
    multi_poch,
    poch,
    poch_signed,
    termination_index,
)

NORMALIZATION_X = 10**8


@dataclass(frozen=True)
class HahnParams:
    alpha_hat: Scalar
    beta_hat: Scalar
    N: int

    @property
    def backend(self) -> Backend:
        return backend_of_all([self.alpha_hat, self.beta_hat]) or FLOAT


@dataclass(frozen=True)
class RatParams:
    a: Scalar
    b: Scalar
    N: int

    @property
    def backend(self) -> Backend:
        return backend_of_all([self.a, self.b]) or FLOAT

    def reflected(self) -> "RatParams":
        """Parameters of the partner family: a -> b + 2 - a."""
        return RatParams(self.b + 2 - self.a, self.b, self.N)

    def shifted(self, da: int = 1) -> "RatParams":
        return RatParams(self.a + da, self.b, self.N)


@dataclass
class BiorthData:
    h: List[Scalar]
    weights_w: List[Scalar]
    h_star: List[Scalar]
    weights_w_star: List[Scalar]


@dataclass
class CoefficientSet:
    """Recurrence/difference coefficients, indexed by m or n in [0, N]."""

    A: Optional[List[Scalar]] = None
    C: Optional[List[Scalar]] = None
    B: Optional[List[Scalar]] = None
    D: Optional[List[Scalar]] = None
    calA: Optional[List[Scalar]] = None
    calC: Optional[List[Scalar]] = None
    calB: Optional[List[Scalar]] = None
    calD: Optional[List[Scalar]] = None
    calDnm: Optional[List[List[Scalar]]] = None  # [n][m]
    tildeB: Optional[List[List[Scalar]]] = None  # [n][m]
    tildeD: Optional[List[Scalar]] = None


# ---------------------------------------------------------------------------
# evaluation


def _check_degree(m: int, p):
    if not 0 <= m <= p.N:
        raise ValueError(f"degree m={m} outside [0, {p.N}]")
    p.backend  # raises BackendMismatch for mixed exact/float parameters


def _q(m: int, x, p: HahnParams):
    ah, bh, N = p.alpha_hat, p.beta_hat, p.N
    x = ah - ah + x
    top = (-m + 0 * ah, m + ah + bh + 1, -x)
    return hyp3f2_with_mag(top, (-N + 0 * ah, ah + 1), termination_index(m, x))


def _r(m: int, x, p: HahnParams):
    ah, bh, N = p.alpha_hat, p.beta_hat, p.N
    x = ah - ah + x
    top = (-m + 0 * ah, -x, x + ah + bh + 1)
    return hyp3f2_with_mag(top, (-N + 0 * ah, ah + 1), termination_index(m, x))


def _u(m: int, x, p: RatParams):
    a, b, N = p.a, p.b, p.N
    x = a - a + x
    den = poch(b + 1, m)
    if den == 0:
        raise ZeroDenominator(f"(b+1)_{m}", b)
    pre = (-1) ** m * poch(-N + 0 * a, m) / den
    s, mag = hyp3f2_with_mag((-x, -m + 0 * a, b + m - N), (-N + 0 * a, a - x),
                             termination_index(m, x))
    return pre * s, abs(pre) * mag


def _v(m: int, x, p: RatParams):
    return _u(m, p.N - x, p.reflected())


def hahn_Q(m: int, x, p: HahnParams) -> Scalar:
    _check_degree(m, p)
    return _q(m, x, p)[0]


def dual_hahn_R(m: int, x, p: HahnParams) -> Scalar:
    """Dual Hahn polynomial at lambda(x) = x (x + ah + bh + 1), given x."""
    _check_degree(m, p)
    return _r(m, x, p)[0]


def rat_U(m: int, x, p: RatParams) -> Scalar:
    _check_degree(m, p)
    return _u(m, x, p)[0]


def rat_V(m: int, x, p: RatParams) -> Scalar:
    _check_degree(m, p)
    return _v(m, x, p)[0]


def hahn_weight(n: int, p: HahnParams) -> Scalar:
    ah, bh, N = p.alpha_hat, p.beta_hat, p.N
    return poch(ah + 1, n) * poch(bh + 1, N - n) / (factorial(n, ah) * factorial(N - n, ah))


def hahn_norm(m: int, p: HahnParams) -> Scalar:
    """Squared norm of Q_m against :func:`hahn_weight`."""
    ah, bh, N = p.alpha_hat, p.beta_hat, p.N
    s = ah + bh
    num = (-1) ** m * poch(m + s + 1, N + 1) * poch(bh + 1, m) * factorial(m, ah)
    den = (2 * m + s + 1) * poch(ah + 1, m) * poch(-N + 0 * ah, m) * factorial(N, ah)
    if den == 0:
        raise ZeroDenominator(f"(2m+ah+bh+1)(ah+1)_m at m={m}")
    return num / den


def biorth_data(p: RatParams) -> BiorthData:
    a, b, N = p.a, p.b, p.N
    z = a - a
    one = z + 1

    def div(num, den, what):
        if den == 0:
            raise ZeroDenominator(what)
        return num / den

    h, w, hs, ws = [], [], [], []
    for m in range(N + 1):
        num = multi_poch([one, -N + z, m - N + b], m) * poch_signed(2 * m - N + b + 1, N - 2 * m)
        h.append(div(num, poch(b + 1, m) * poch(b - N + 1, N), f"(b+1)_m (b-N+1)_N at m={m}"))
        den = multi_poch([one, -N + z, m + b - N], m) * poch_signed(2 * m + b - N + 1, N - 2 * m)
        ws.append(div(poch(2 - a + b - N, N) * poch(b + 1, m), den,
                      f"(1,-N,m+b-N)_m (2m+b-N+1)_(N-2m) at m={m}"))
    fN = factorial(N, a)
    for n in range(N + 1):
        num = poch(a - b - 1, N - n) * poch(1 - a, n) * fN
        w.append(div(num, poch(-b, N) * factorial(n, a) * factorial(N - n, a), "(-b)_N"))
        hs.append(div(multi_poch([one, 2 - a + b - N], n), multi_poch([-N + z, 1 - a], n),
                      f"(-N,1-a)_n at n={n}"))
    return BiorthData(h, w, hs, ws)


# ---------------------------------------------------------------------------
# coefficients


def hahn_coefficients(p: HahnParams) -> CoefficientSet:
    ah, bh, N = p.alpha_hat, p.beta_hat, p.N
    s = ah + bh
    z = ah - ah
    A, C, B, D = [], [], [], []
    for m in range(N + 1):
        if m == N:
            A.append(z)  # (N - m) factor
        else:
            A.append((m + s + 1) * (m + ah + 1) * (N - m) / ((2 * m + s + 1) * (2 * m + s + 2)))
        if m == 0:
            C.append(z)
        else:
            C.append(m * (m + s + N + 1) * (m + bh) / ((2 * m + s) * (2 * m + s + 1)))
    for n in range(N + 1):
        B.append((n + ah + 1) * (n - N))
        D.append(n * (n - bh - N - 1))
    return CoefficientSet(A=A, C=C, B=B, D=D)


def _calA(m, a, b, N):
    return (m + b + 1) * (m + b - N) / (2 * m + b - N + 1)


def _calC(m, a, b, N):
    return m * (m - N - 1) / (2 * m + b - N - 1) if m else a - a


def rational_coefficients(p: RatParams) -> CoefficientSet:
    a, b, N = p.a, p.b, p.N
    calA = [_calA(m, a, b, N) for m in range(N)]  # m = N is outside the recurrence grid
    calC = [_calC(m, a, b, N) for m in range(N + 1)]
    calB, calD, tD = [], [], []
    calDnm, tB = [], []
    for n in range(N + 1):
        calB.append((n - a) * (n - a + 1) * (n - N))
        calD.append((n - a) * (n - a + b - N) * n)
        tD.append(-(N - n + a - b - 2) * (N - n + a - b - 1) * n)
        calDnm.append([(n - m - a) * (n + m - a + b - N) * n for m in range(N + 1)])
        tB.append([(N - n - m + a - b - 2) * (-n + m + a - 2) * (N - n) for m in range(N + 1)])
    return CoefficientSet(calA=calA, calC=calC, calB=calB, calD=calD, calDnm=calDnm,
                          tildeB=tB, tildeD=tD)


# ---------------------------------------------------------------------------
# grid tables


Table = List[List[Tuple[Scalar, Scalar]]]


def _table(fn: Callable, p, N: int) -> Table:
    """t[m][n] = (value, magnitude) for m, n in [0, N]."""
    return [[fn(m, n, p) for n in range(N + 1)] for m in range(N + 1)]


class _Sum:
    """One-sided residual with its magnitude scale."""

    __slots__ = ("r", "s", "exact")

    def __init__(self, exact: bool):
        self.r = 0
        self.s = 0
        self.exact = exact

    def add(self, c, vg=None, mag=None):
        """Add ``c * value`` for a (value, magnitude) pair, or the plain term ``c``
        whose cancellation scale is ``mag`` (default ``|c|``)."""
        if vg is None:
            self.r = self.r + c
            if not self.exact:
                self.s = self.s + (abs(c) if mag is None else mag)
            return self
        v, g = vg
        self.r = self.r + c * v
        if not self.exact:
            self.s = self.s + abs(c) * g
        return self

    def into(self, chk: Checker, **where):
        return chk.add(self.r, self.s, **where)


def _exact(p) -> bool:
    return p.backend.exact


def _am(*xs):
    """Sum of absolute values: the magnitude of a sum of these addends."""
    return sum(abs(x) for x in xs)


# ---------------------------------------------------------------------------
# Hahn polynomial identities


def check_hahn_orthogonality(p: HahnParams) -> IdentityReport:
    N, ex = p.N, _exact(p)
    Q = _table(_q, p, N)
    w = [hahn_weight(n, p) for n in range(N + 1)]
    norm = [hahn_norm(m, p) for m in range(N + 1)]
    chk = Checker("hahn_orthogonality", p.backend)
    for m in range(N + 1):
        for k in range(m, N + 1):
            acc = _Sum(ex)
            for n in range(N + 1):
                v = Q[m][n][0] * Q[k][n][0]
                acc.add(w[n], (v, Q[m][n][1] * Q[k][n][1]))
            if m == k:
                acc.add(-norm[m])
            acc.into(chk, m=m, m2=k)
    dual = Checker("dual_hahn_orthogonality", p.backend)
    for n in range(N + 1):
        for k in range(n, N + 1):
            acc = _Sum(ex)
            for m in range(N + 1):
                v = Q[m][n][0] * Q[m][k][0]
                acc.add(1 / norm[m], (v, Q[m][n][1] * Q[m][k][1]))
            if n == k:
                acc.add(-1 / w[n])
            acc.into(dual, n=n, n2=k)
    return merge("hahn_orthogonality", [chk.report(), dual.report()])


def check_hahn_recurrence(p: HahnParams) -> IdentityReport:
    """n Q_m(n) = -A_m Q_{m+1}(n) + (A_m + C_m) Q_m(n) - C_m Q_{m-1}(n)."""
    N, ex = p.N, _exact(p)
    Q = _table(_q, p, N)
    cs = hahn_coefficients(p)
    chk = Checker("hahn_recurrence", p.backend)
    for m in range(N + 1):
        A, C = cs.A[m], cs.C[m]
        for n in range(N + 1):
            acc = _Sum(ex).add(-n, Q[m][n]).add(A + C, Q[m][n])
            if m < N:
                acc.add(-A, Q[m + 1][n])
            if m > 0:
                acc.add(-C, Q[m - 1][n])
            acc.into(chk, m=m, n=n)
    return chk.report()


def check_hahn_difference(p: HahnParams) -> IdentityReport:
    """m(m+ah+bh+1) Q_m(n) = B(n) Q_m(n+1) - (B(n)+D(n)) Q_m(n) + D(n) Q_m(n-1)."""
    N, ex = p.N, _exact(p)
    Q = _table(_q, p, N)
    cs = hahn_coefficients(p)
    s = p.alpha_hat + p.beta_hat
    chk = Checker("hahn_difference", p.backend)
    for m in range(N + 1):
        for n in range(N + 1):
            B, D = cs.B[n], cs.D[n]
            acc = _Sum(ex).add(m * (m + s + 1), Q[m][n]).add(B + D, Q[m][n])
            if n < N:
                acc.add(-B, Q[m][n + 1])
            if n > 0:
                acc.add(-D, Q[m][n - 1])
            acc.into(chk, m=m, n=n)
    return chk.report()


def check_duality(p: HahnParams) -> IdentityReport:
    """R_m(lam(n)) = Q_n(m) on the full grid."""
    N, ex = p.N, _exact(p)
    chk = Checker("dual_hahn_duality", p.backend)
    for m in range(N + 1):
        for n in range(N + 1):
            _Sum(ex).add(1, _r(m, n, p)).add(-1, _q(n, m, p)).into(chk, m=m, n=n)
    return chk.report()


# ---------------------------------------------------------------------------
# rational function identities


def check_biorthogonality(p: RatParams) -> IdentityReport:
    N, ex = p.N, _exact(p)
    U = _table(_u, p, N)
    Vt = _table(_v, p, N)
    bd = biorth_data(p)
    chk = Checker("biorthogonality", p.backend)
    for m in range(N + 1):
        for k in range(N + 1):
            acc = _Sum(ex)
            for n in range(N + 1):
                acc.add(bd.weights_w[n], (Vt[m][n][0] * U[k][n][0], Vt[m][n][1] * U[k][n][1]))
            if m == k:
                acc.add(-bd.h[m])
            acc.into(chk, m=m, m2=k)
    dual = Checker("dual_biorthogonality", p.backend)
    for n in range(N + 1):
        for k in range(N + 1):
            acc = _Sum(ex)
            for m in range(N + 1):
                acc.add(bd.weights_w_star[m], (Vt[m][n][0] * U[m][k][0], Vt[m][n][1] * U[m][k][1]))
            if n == k:
                acc.add(-bd.h_star[n])
            acc.into(dual, n=n, n2=k)
    r = merge("biorthogonality", [chk.report(), dual.report()])
    r.notes["h0"] = bd.h[0] if bd.h else None
    r.notes["h*0"] = bd.h_star[0] if bd.h_star else None
    return r


def _three_term(acc: _Sum, T, m, n, c_up, c_mid, c_down, N):
    """acc += c_up T_{m+1}(n) + c_mid T_m(n) + c_down T_{m-1}(n), dropping zero-coefficient ends."""
    acc.add(c_mid, T[m][n])
    if m < N and c_up != 0:
        acc.add(c_up, T[m + 1][n])
    if m > 0 and c_down != 0:
        acc.add(c_down, T[m - 1][n])
    return acc


def check_U_recurrence(p: RatParams) -> IdentityReport:
    """Recurrence in the degree for m in [0, N-1]: plain and GEVP forms.

    The top row m = N is excluded: it would reference U_{N+1}, which is
    undefined since (-N)_{N+1} = 0 meets the truncating denominator.
    """
    a, b, N, ex = p.a, p.b, p.N, _exact(p)
    U = _table(_u, p, N)
    alt = Checker("U_recurrence", p.backend)
    gevp = Checker("U_recurrence_gevp", p.backend)
    equiv = Checker("U_recurrence_forms_agree", p.backend)
    for m in range(N):
        cA, cC = _calA(m, a, b, N), _calC(m, a, b, N)
        for n in range(N + 1):
            # (n-m-a) A (U+ - U) + (n+m-a+b-N) C (U- - U) - a(2m+b-N) U = 0
            k1 = (n - m - a) * cA
            k2 = (n + m - a + b - N) * cC
            alt_c = (k1, -k1 - k2 - a * (2 * m + b - N), k2)
            _three_term(_Sum(ex), U, m, n, *alt_c, N).into(alt, m=m, n=n)
            # (2m+b-N)(A U+ - (A-C-2a) U - C U-) - (2n-2a+b-N)(A U+ - (A+C) U + C U-) = 0
            l = 2 * m + b - N
            r = 2 * n - 2 * a + b - N
            gevp_c = (l * cA - r * cA, -l * (cA - cC - 2 * a) + r * (cA + cC), -l * cC - r * cC)
            _three_term(_Sum(ex), U, m, n, *gevp_c, N).into(gevp, m=m, n=n)
            # the GEVP form is -2 times the plain form, coefficient by coefficient
            if ex:
                mags = (None,) * 3
            else:
                aA, aC = abs(cA), abs(cC)
                lm, rm = _am(2 * m - N, b), _am(2 * n - 2 * a, b - N)
                k1m = _am(n - m, a) * aA
                k2m = _am(n + m - N, b, a) * aC
                mags = ((lm + rm) * aA + 2 * k1m,
                        lm * (aA + aC + 2 * abs(a)) + rm * (aA + aC)
                        + 2 * (k1m + k2m + abs(a) * lm),
                        (lm + rm) * aC + 2 * k2m)
            for g, c, mg in zip(gevp_c, alt_c, mags):
                _Sum(ex).add(g, mag=mg).add(2 * c, mag=0).into(equiv, m=m, n=n)
    return merge("U_recurrence", [alt.report(), gevp.report(), equiv.report()])


def check_U_difference(p: RatParams) -> IdentityReport:
    a, b, N, ex = p.a, p.b, p.N, _exact(p)
    U = _table(_u, p, N)
    cs = rational_coefficients(p)
    main = Checker("U_difference", p.backend)
    alt = Checker("U_difference_two_term", p.backend)
    rel = Checker("U_difference_coefficients", p.backend)
    for m in range(N + 1):
        lam = m * (m + b - N)
        for n in range(N + 1):
            B, D, Dnm = cs.calB[n], cs.calD[n], cs.calDnm[n][m]
            # B U(n+1) - (B+D) U(n) + D U(n-1) - lam((a-n) U(n) + n U(n-1)) = 0
            acc = _Sum(ex).add(-(B + D) - lam * (a - n), U[m][n])
            if n < N:
                acc.add(B, U[m][n + 1])
            if n > 0:
                acc.add(D - lam * n, U[m][n - 1])
            acc.into(main, m=m, n=n)
            # B (U(n+1) - U(n)) + D_{n,m} (U(n-1) - U(n)) - a lam U(n) = 0
            acc = _Sum(ex).add(-B - Dnm - a * lam, U[m][n])
            if n < N:
                acc.add(B, U[m][n + 1])
            if n > 0:
                acc.add(Dnm, U[m][n - 1])
            acc.into(alt, m=m, n=n)
            mg = None if ex else n * (_am(n - m, a) * _am(n + m - N, a, b)
                                      + _am(n, a) * _am(n - N, a, b) + _am(m * m, m * (b - N)))
            _Sum(ex).add(Dnm, mag=mg).add(-D, mag=0).add(n * lam, mag=0).into(rel, m=m, n=n)
    return merge("U_difference", [main.report(), alt.report(), rel.report()])


def check_V_recurrence(p: RatParams) -> IdentityReport:
    a, b, N, ex = p.a, p.b, p.N, _exact(p)
    Vt = _table(_v, p, N)
    pr = p.reflected()
    chk = Checker("V_recurrence", p.backend)
    subst = Checker("V_recurrence_from_U", p.backend)
    for m in range(N):
        cA, cC = _calA(m, a, b, N), _calC(m, a, b, N)
        for n in range(N + 1):
            k1 = (N - n - m - b + a - 2) * cA
            k2 = (-n + m + a - 2) * cC
            coeffs = (k1, -k1 - k2 - (b - a + 2) * (2 * m + b - N), k2)
            _three_term(_Sum(ex), Vt, m, n, *coeffs, N).into(chk, m=m, n=n)
            # U recurrence coefficients under a -> b-a+2, n -> N-n
            ar, nr = pr.a, N - n
            u1 = (nr - m - ar) * _calA(m, ar, b, N)
            u2 = (nr + m - ar + b - N) * _calC(m, ar, b, N)
            ucoef = (u1, -u1 - u2 - ar * (2 * m + b - N), u2)
            if ex:
                mags = (None,) * 3
            else:
                aA, aC = abs(cA), abs(cC)
                k1m = _am(N - n - m - 2, a, b) * aA
                k2m = _am(m - n - 2, a) * aC
                mags = (2 * k1m, 2 * (k1m + k2m) + 2 * _am(b, a, 2) * _am(2 * m - N, b), 2 * k2m)
            for c, uc, mg in zip(coeffs, ucoef, mags):
                _Sum(ex).add(c, mag=mg).add(-uc, mag=0).into(subst, m=m, n=n)
    return merge("V_recurrence", [chk.report(), subst.report()])


def check_V_difference(p: RatParams) -> IdentityReport:
    a, b, N, ex = p.a, p.b, p.N, _exact(p)
    Vt = _table(_v, p, N)
    cs = rational_coefficients(p)
    main = Checker("V_difference", p.backend)
    gevp = Checker("V_difference_gevp", p.backend)
    rel = Checker("V_difference_coefficients", p.backend)
    for m in range(N + 1):
        lam = m * (m + b - N)
        for n in range(N + 1):
            Bt, Bt0, Dt = cs.tildeB[n][m], cs.tildeB[n][0], cs.tildeD[n]
            # Bt (V(n+1) - V(n)) + Dt (V(n-1) - V(n)) - lam (b-a+2) V(n) = 0
            acc = _Sum(ex).add(-Bt - Dt - lam * (b - a + 2), Vt[m][n])
            if n < N:
                acc.add(Bt, Vt[m][n + 1])
            if n > 0:
                acc.add(Dt, Vt[m][n - 1])
            acc.into(main, m=m, n=n)
            # Bt0 (V(n+1) - V(n)) + Dt (V(n-1) - V(n)) - lam((N-n) V(n+1) - (N-n+a-b-2) V(n)) = 0
            acc = _Sum(ex).add(-Bt0 - Dt + lam * (N - n + a - b - 2), Vt[m][n])
            if n < N:
                acc.add(Bt0 - lam * (N - n), Vt[m][n + 1])
            if n > 0:
                acc.add(Dt, Vt[m][n - 1])
            acc.into(gevp, m=m, n=n)
            mg = None if ex else (N - n) * (_am(N - n - m - 2, a, b) * _am(m - n - 2, a)
                                            + _am(N - n - 2, a, b) * _am(n + 2, a)
                                            + _am(m * m, m * (b - N)))
            _Sum(ex).add(Bt, mag=mg).add(-Bt0, mag=0).add(-lam * (n - N), mag=0).into(
                rel, m=m, n=n)
    return merge("V_difference", [main.report(), gevp.report(), rel.report()])


def check_contiguity(p: RatParams, module=None, *, as_printed: bool = False) -> IdentityReport:
    """Contiguity in a, plus the overlap-level forms.

        a U_m(n; a+1) = (a-n) U_m(n) + n U_m(n-1)
        a (2m+b-N)/(a-n) U_m(n; a+1) = -A_m U_{m+1}(n) + (A_m+C_m) U_m(n) - C_m U_{m-1}(n)

    The second relation is sometimes stated with the right-hand side of the
    opposite sign; ``as_printed=True`` checks that variant, which fails.

    ``module`` may be a :class:`~mhahn.repn.ModuleParams` whose (a, b) equal
    ``p``; by default one with unit gauge is derived from ``p``. Pass
    ``module=False`` to skip the overlap-level forms.
    """
    a, b, N, ex = p.a, p.b, p.N, _exact(p)
    U = _table(_u, p, N)
    p1 = p.shifted(1)
    U1 = _table(_u, p1, N)
    c1 = Checker("contiguity_1", p.backend)
    c2 = Checker("contiguity_2_printed" if as_printed else "contiguity_2", p.backend)
    for m in range(N + 1):
        for n in range(N + 1):
            # a U(n; a+1) - (a-n) U(n; a) - n U(n-1; a) = 0
            acc = _Sum(ex).add(a, U1[m][n]).add(-(a - n), U[m][n])
            if n > 0:
                acc.add(-n, U[m][n - 1])
            acc.into(c1, m=m, n=n)
            if m == N:
                continue
            if a - n == 0:
                c2.skip()
                continue
            cA, cC = _calA(m, a, b, N), _calC(m, a, b, N)
            sg = -1 if as_printed else 1
            acc = _Sum(ex).add(a * (2 * m + b - N) / (a - n), U1[m][n])
            _three_term(acc, U, m, n, sg * cA, -sg * (cA + cC), sg * cC, N)
            acc.into(c2, m=m, n=n)
    parts = [c1.report(), c2.report()]
    if module is not False:
        from .overlaps import check_overlap_contiguity
        from .repn import ModuleParams, build_repn

        if module is None:
            module = ModuleParams.from_rational(a, b, N, backend=p.backend)
        parts.append(check_overlap_contiguity(build_repn(module)))
    return merge("contiguity", parts)


def check_normalization_limit(p: RatParams, m: Optional[int] = None,
                              x=NORMALIZATION_X, tol: float = 1e-5) -> IdentityReport:
    """|U_m(x) - 1| <= tol at large x, evaluated in floating point."""
    pf = RatParams(float(p.a), float(p.b), p.N)
    chk = Checker("normalization_limit", FLOAT, tol=tol)
    ms = range(p.N + 1) if m is None else [m]
    for k in ms:
        chk.add(rat_U(k, float(x), pf) - 1.0, 1.0, m=k)
    return chk.report()
