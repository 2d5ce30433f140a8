from fractions import Fraction

import pytest
import sympy as sp

from conftest import SYMS, sympy_zero, to_sympy
from reflectk.linalg import Mat, flip, kron
from reflectk.rmatrix import (
    RC_from_definition,
    build,
    check_baxterisation,
    check_hecke,
    check_R21,
    check_Rbar,
    check_wR,
    check_wRC,
    is_symmetry,
    zrho,
)
from reflectk.scalar import Scalar

Ssym, Usym = SYMS["s"], SYMS["u"]


def sympy_R(N, q, x):
    """The affine R-matrix assembled directly in sympy from matrix units."""

    def E(i, j):
        m = sp.zeros(N, N)
        m[i, j] = 1
        return m

    def Rconst(q):
        out = sp.zeros(N * N, N * N)
        for i in range(N):
            for j in range(N):
                out += (q if i == j else 1) * sp.kronecker_product(E(i, i), E(j, j))
                if i < j:
                    out += (q - 1 / q) * sp.kronecker_product(E(i, j), E(j, i))
        return out

    P = sp.zeros(N * N, N * N)
    for i in range(N):
        for j in range(N):
            P += sp.kronecker_product(E(i, j), E(j, i))
    fq = 1 / (q - x / q)
    fqi = 1 / (1 / q - q / x)
    return fq * Rconst(q) + fqi * P * Rconst(1 / q) * P


@pytest.mark.parametrize("N", [2, 3])
def test_R_against_sympy(N):
    ours = build(N).R
    ref = sympy_R(N, -Ssym ** 2, Usym)
    for i in range(N * N):
        for j in range(N * N):
            assert sympy_zero(to_sympy(ours[(i + 1, j + 1)]) - ref[i, j]), (i, j)


@pytest.mark.parametrize("N", [2, 3])
def test_ybe_numeric_oracle(N):
    """Plain rational matrices at a sample point, no use of the verifier."""
    s0, u0, v0 = sp.Rational(2), sp.Rational(3), sp.Rational(-5, 7)
    q = -s0 ** 2
    I = sp.eye(N)
    P = sp.zeros(N * N, N * N)
    for i in range(N):
        for j in range(N):
            P[i * N + j, j * N + i] = 1

    def leg12(x):
        return sp.kronecker_product(x, I)

    def leg23(x):
        return sp.kronecker_product(I, x)

    P23 = leg23(P)

    def leg13(x):
        return P23 * leg12(x) * P23

    R = lambda x: sympy_R(N, q, x)
    lhs = leg12(R(u0)) * leg13(R(u0 * v0)) * leg23(R(v0))
    rhs = leg23(R(v0)) * leg13(R(u0 * v0)) * leg12(R(u0))
    assert lhs == rhs


@pytest.mark.parametrize("N", [2, 3, 4])
def test_structural_identities(N):
    assert check_hecke(N)
    assert check_baxterisation(N)
    assert check_Rbar(N)
    assert check_wR(N)
    assert check_wRC(N)


@pytest.mark.parametrize("N", [2, 3])
def test_R21_is_transpose(N):
    assert check_R21(N)


@pytest.mark.parametrize("N", [2, 3, 4])
def test_charge_conjugated_R_matches_definition(N):
    assert build(N).RC == RC_from_definition(N)


@pytest.mark.parametrize("N", [2, 3, 4])
def test_regular_at_one(N):
    b = build(N)
    # R(1) is proportional to P
    R1 = b.R_at(Scalar.of(1))
    lead = R1[(1, 1)]
    assert R1 == b.P.scale(lead)


@pytest.mark.parametrize("N", [2, 3, 4])
def test_unitarity_of_R(N):
    b = build(N)
    u = Scalar.var("u")
    prod = b.R @ flip(b.R_at(u.inv()))
    lead = prod[(1, 1)]
    assert prod == Mat.identity(N * N).scale(lead)


@pytest.mark.parametrize("N", [2, 3, 4])
def test_zrho(N):
    Z = zrho(N)
    assert Z ** N == Mat.identity(N).scale(Scalar.var("u"))
    assert is_symmetry(N, Z)


def test_diagonal_is_symmetry():
    Z = Mat.diag([Scalar.var("d_1"), Scalar.var("d_2"), Scalar.var("d_3")])
    assert is_symmetry(3, Z)


def test_non_symmetry():
    Z = Mat.unit(3, 1, 2) + Mat.unit(3, 2, 1) + Mat.unit(3, 3, 3)
    assert not is_symmetry(3, Z)


def test_perturbed_R_breaks_hecke_shape():
    b = build(3)
    bad = b.R_q + Mat.unit(9, 2, 3)
    I = Mat.identity(9)
    Rc = b.P @ bad
    q = -Scalar.var("s") ** 2
    assert not ((Rc - I.scale(q)) @ (Rc + I.scale(q.inv()))).is_zero()


def test_constant_entries_N2():
    Rq = build(2).R_q
    q = -Scalar.var("s") ** 2
    assert Rq[(1, 1)] == q
    assert Rq[(2, 3)] == q - q.inv()
    assert Rq[(3, 2)].is_zero()
    assert Rq[(2, 2)] == Scalar.of(1)
    assert Rq.evaluate({"s": 2})[(1, 1)] == Fraction(-4)
