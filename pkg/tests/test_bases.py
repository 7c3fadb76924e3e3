import pytest
import sympy as sp
from gmpy2 import mpq

from mhahn.bases import (
    FAMILIES,
    MissingPencil,
    build_all,
    build_basis,
    check_appendix_actions,
    check_bases,
    check_completeness,
    check_eigen_residuals,
    check_triangular,
    gram,
    operator_in_basis,
    z_on_d,
)
from mhahn.linalg import Matrix
from mhahn.repn import ModuleParams, build_repn
from mhahn.scalar import EXACT

from conftest import generic_module


def sym(m: Matrix) -> sp.Matrix:
    return sp.Matrix([[sp.Rational(str(x)) for x in r] for r in m.rows])


def problem(R, family, lam, mu):
    Z, X, V = sym(R.Z), sym(R.X), sym(R.V)
    I = sp.eye(R.dim)
    mu = sp.Rational(str(mu)) if mu is not None else None
    return {
        "d": X - lam * Z,
        "d*": (X - lam * Z).T,
        "e": V - lam * I,
        "e*": V.T - lam * I,
        "f": X + mu * Z - lam * I if mu is not None else None,
        "f*": (X + mu * Z - lam * I).T if mu is not None else None,
    }[family]


@pytest.mark.parametrize("N", [1, 2, 4])
def test_bases_match_sympy_nullspaces(rng, N):
    """Each basis vector spans the one-dimensional kernel of its defining problem."""
    p, mu = generic_module(rng, N)
    R = build_repn(p, mu)
    for fam in FAMILIES:
        B = build_basis(R, fam, mu)
        for n, lam in enumerate(B.eigenvalues):
            ker = problem(R, fam, sp.Rational(str(lam)), mu).nullspace()
            assert len(ker) == 1
            k = ker[0] / ker[0][n]  # pivot at |n> is 1
            assert list(k) == [sp.Rational(str(x)) for x in B.vector(n)]


def test_eigenvalue_formulas():
    p = ModuleParams.make(3, "2/5", "1/7")
    R = build_repn(p, "3/11")
    al, be, mu = p.alpha, p.beta, mpq(3, 11)
    assert build_basis(R, "d").eigenvalues == [al - n for n in range(4)]
    assert build_basis(R, "e").eigenvalues == [(be - n) * (n - be - 1) for n in range(4)]
    assert build_basis(R, "f").eigenvalues == [n - al - mu for n in range(4)]


@pytest.mark.parametrize("N", range(0, 9))
def test_all_basis_identities_exact(rng, N):
    p, mu = generic_module(rng, N)
    reps = check_bases(build_repn(p, mu), mu)
    assert all(r.passed for r in reps), [r for r in reps if not r.passed]


def test_gram_values_and_negative_pivot(rng):
    p, mu = generic_module(rng, 4)
    R = build_repn(p, mu)
    B = build_all(R, mu)
    I = Matrix.identity(5, EXACT)
    assert gram(B["e*"], B["e"]) == I
    assert gram(B["f*"], B["f"]) == I
    assert gram(B["d*"], B["d"], R.Z) == -I


def test_broken_vector_is_caught(rng):
    p, mu = generic_module(rng, 3)
    R = build_repn(p, mu)
    B = build_basis(R, "e")
    cols = B.columns.copy()
    cols.rows[0][2] += 1
    bad = type(B)(B.family, cols, B.eigenvalues, B.params, B.mu)
    assert not check_eigen_residuals(R, bad).passed
    assert check_triangular(bad).passed  # still upper supported


def test_completeness_fails_when_a_term_is_dropped(rng):
    p, mu = generic_module(rng, 3)
    R = build_repn(p, mu)
    B = build_all(R, mu)
    assert check_completeness(R, B).passed
    assert not check_completeness(R, B, skip_e=(1,)).passed


def test_z_on_d_shift_rule(rng):
    p, mu = generic_module(rng, 5)
    R = build_repn(p)
    zd = z_on_d(R, build_basis(R, "d"))
    for n in range(6):
        assert zd[n, n] == -1
        assert all(zd[j, n] == 0 for j in range(n))


def test_missing_pencil():
    R = build_repn(ModuleParams.make(2, "1/3", "1/5"))
    with pytest.raises(MissingPencil):
        build_basis(R, "f")
    assert set(build_all(R)) == {"d", "d*", "e", "e*"}


def test_operator_in_basis_matches_sympy(rng):
    p, mu = generic_module(rng, 4)
    R = build_repn(p, mu)
    B = build_basis(R, "e")
    want = sym(B.columns).inv() * sym(R.X) * sym(B.columns)
    assert sym(operator_in_basis(R, R.X, B)) == want


@pytest.mark.parametrize("N", range(0, 8))
def test_appendix_actions_exact(rng, N):
    p, mu = generic_module(rng, N)
    rep = check_appendix_actions(build_repn(p, mu), mu)
    assert rep.passed, rep.witness
    assert rep.notes["eta1"] == "0"


def test_appendix_detects_wrong_matrix(rng):
    p, mu = generic_module(rng, 3)
    R = build_repn(p, mu)
    R.X.rows[1][1] += 1  # breaks the module
    assert not check_appendix_actions(R, mu).passed


def test_float_bases(rng):
    for N in (3, 10, 16):
        p, mu = generic_module(rng, N, backend="float")
        reps = check_bases(build_repn(p, mu), mu)
        assert all(r.passed for r in reps)
        assert check_appendix_actions(build_repn(p, mu), mu).passed
