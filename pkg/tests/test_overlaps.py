import pytest
import sympy as sp
from gmpy2 import mpq
from sympy import factorial as fac
from sympy import rf

from mhahn.linalg import Matrix
from mhahn.overlaps import (
    KINDS,
    OverlapTable,
    ParamMap,
    canonical_kind,
    check_gauge_covariance,
    check_overlap_contiguity,
    check_overlaps,
    check_recurrence_S,
    check_S_orthogonality,
    check_U_biorthogonality,
    closed_form_table,
    match_closed_forms,
    overlap_table,
    overlap_tables,
)
from mhahn.repn import ModuleParams, GenericityError, build_repn
from mhahn.scalar import ZeroDenominator

from conftest import generic_module


def Q(x):
    return sp.Rational(str(x))


def hyp(top, bot, K):
    return sum(sp.prod([rf(t, k) for t in top]) / sp.prod([rf(c, k) for c in bot]) / fac(k)
               for k in range(K + 1))


def oracle(p: ModuleParams, mu, kind):
    """Closed-form overlap tables written out from scratch in sympy."""
    N = p.N
    al, be = Q(p.alpha), Q(p.beta)
    g = [Q(x) for x in p.gauge]
    a, b = al - be, N - 2 * be - 1
    if mu is not None:
        mu = Q(mu)
        ah, bh = -1 - be - mu, mu - be - 1

    def head(k):  # a_0 ... a_{k-1}
        return sp.prod(g[:k], sp.Integer(1))

    def tail(k):  # a_k ... a_{N-1}
        return sp.prod(g[k:N], sp.Integer(1))

    def U(m, x, a):
        return ((-1) ** m * rf(-N, m) / rf(b + 1, m)
                * hyp((-x, -m, b + m - N), (-N, a - x), min(m, x)))

    def entry(m, n):
        if kind == "S":
            qv = hyp((-m, m + ah + bh + 1, -n), (-N, ah + 1), min(m, n))
            return (head(n) / head(m) * fac(N) * (-1) ** n * rf(ah + 1, n)
                    / (fac(n) * fac(N - m) * rf(m + ah + bh + 1, m)) * qv)
        if kind == "S~":
            qv = hyp((-m, m + ah + bh + 1, -n), (-N, ah + 1), min(m, n))
            return (tail(n) / tail(m) * fac(N) * (-1) ** n * rf(ah + 1, m) * rf(bh + 1, N - n)
                    / (fac(m) * fac(N - n) * rf(bh + 1, m) * rf(2 * m + ah + bh + 2, N - m)) * qv)
        if kind == "U":
            return (head(n) / head(m) * rf(1 - a, n) * rf(1 + b, m)
                    / (fac(n) * rf(m + b - N, m)) * U(m, n, a))
        vv = U(m, N - n, b + 2 - a)
        return (-tail(n) / tail(m) * rf(m + 1, N - m) * rf(a - b - 1, N - n)
                / (fac(N - n) * rf(-N, m) * rf(-b, N - 2 * m)) * vv)

    return sp.Matrix(N + 1, N + 1, lambda m, n: entry(m, n))


def as_sympy(t: OverlapTable):
    return sp.Matrix([[Q(x) for x in r] for r in t.values.rows])


@pytest.mark.parametrize("N", [0, 1, 2, 3, 5])
@pytest.mark.parametrize("kind", KINDS)
def test_dot_products_match_sympy_closed_forms(rng, N, kind):
    p, mu = generic_module(rng, N)
    t = overlap_table(build_repn(p, mu), mu, kind)
    assert t.provenance == "dot-product"
    assert as_sympy(t) == oracle(p, mu if kind.startswith("S") else None, kind)
    assert as_sympy(closed_form_table(p, mu, kind)) == as_sympy(t)


@pytest.mark.parametrize("N", range(0, 9))
def test_all_overlap_identities_exact(rng, N):
    p, mu = generic_module(rng, N)
    R = build_repn(p, mu)
    rep = check_overlaps(R, mu)
    assert rep.passed, rep.witness
    if N:
        assert check_overlap_contiguity(R).passed
        assert check_gauge_covariance(p, mu, [rational_from(rng) for _ in range(N)]).passed


def rational_from(rng):
    return mpq(rng.randint(1, 50), rng.randint(1, 50)) * rng.choice((-1, 1))


def test_corner_entries(rng):
    p, mu = generic_module(rng, 4)
    T = overlap_tables(build_repn(p, mu), mu)
    assert T["S"][0, 0] == 1 and T["U"][0, 0] == 1
    assert T["S~"][4, 4] == 1 and T["U~"][4, 4] == -1


def test_trivial_module():
    p = ModuleParams.make(0, "2/3", "1/5")
    T = overlap_tables(build_repn(p, "1/7"), "1/7")
    assert T["U"].values == Matrix([[mpq(1)]], p.backend)
    assert T["U~"][0, 0] == -1


def test_N1_by_hand():
    # N = 1, unit gauge: U row m = 0 is (1, 1-a); column sums of -U~ U give delta
    p = ModuleParams.make(1, "1/2", "1/3")
    U = overlap_table(build_repn(p), None, "U")
    a = mpq(1, 2) - mpq(1, 3)
    assert U[0, 0] == 1 and U[0, 1] == 1 - a


def test_perturbed_tables_fail(rng):
    p, mu = generic_module(rng, 3)
    T = overlap_tables(build_repn(p, mu), mu)
    bad = T["S"].values.copy()
    bad.rows[1][2] += mpq(1, 1000)
    badS = OverlapTable("S", bad, p, T["S"].mu, "dot-product")
    assert not check_S_orthogonality(badS, T["S~"]).passed
    assert not match_closed_forms({"S": badS}).passed
    assert check_U_biorthogonality(T["U"], T["U~"]).passed
    assert not check_U_biorthogonality(T["U"], T["U~"], w=1).passed


def test_param_map(rng):
    p = ModuleParams.make(5, "3/4", "1/6")
    pm = ParamMap.from_module(p, "2/7")
    be, mu = mpq(1, 6), mpq(2, 7)
    assert (pm.alpha_hat, pm.beta_hat) == (-1 - be - mu, mu - be - 1)
    assert (pm.a, pm.b) == (mpq(3, 4) - be, 5 - 2 * be - 1)
    with pytest.raises(ValueError):
        ParamMap.from_module(p).hahn()
    with pytest.raises(ValueError):
        match_closed_forms(overlap_tables(build_repn(p, "2/7"), "2/7"), ParamMap.from_module(p, "1/3"))


def test_kind_aliases():
    assert canonical_kind("Ut") == "U~"
    assert canonical_kind("Stilde") == "S~"
    with pytest.raises(ValueError):
        canonical_kind("W")


def test_nongeneric_rejected():
    p = ModuleParams.make(3, "1/2", "1")  # 2 beta + 1 = 3 collides with the V spectrum
    with pytest.raises(GenericityError):
        overlap_table(build_repn(p), None, "U")


def test_closed_form_zero_denominator_named():
    # beta = 1/2 gives alphaHat + betaHat + 1 = -2, so (m + ah + bh + 1)_m vanishes at m = 2
    p = ModuleParams.make(2, "1/3", "1/2")
    with pytest.raises(ZeroDenominator, match="m=2"):
        closed_form_table(p, mu="1/5", kind="S")


def test_S_recurrence_needs_matching_pencil(rng):
    p, mu = generic_module(rng, 3)
    assert check_recurrence_S(build_repn(p, mu), mu).passed
    with pytest.raises(ValueError):
        check_recurrence_S(build_repn(p), None)


@pytest.mark.parametrize("N", [4, 10, 16])
def test_float_overlaps(rng, N):
    p, mu = generic_module(rng, N, backend="float")
    R = build_repn(p, mu)
    assert check_overlaps(R, mu).passed
    assert check_overlap_contiguity(R).passed
