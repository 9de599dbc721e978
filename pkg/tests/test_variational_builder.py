import pytest
from hypothesis import given, settings, strategies as st

from mrsreduce.constants import ConstantTower
from mrsreduce.errors import CurveMismatch, MalformedHamiltonian, ParseError, SingularGauge
from mrsreduce.matrix import Matrix
from mrsreduce.ratfunc import RationalFunctionField
from mrsreduce.variational import (Gauge, HamiltonianSystem, build_lve, first_variational,
                                   gauge_apply, lve_size, monomials, parse_curve,
                                   require_curve, sym_power, sym_power_gauge, verify_curve,
                                   verify_gauge)

from conftest import QX, qx_invertible, qx_matrices

x = QX.x


# -- gauge laws ---------------------------------------------------------------------


@settings(max_examples=50, deadline=None)
@given(qx_matrices(2), qx_invertible(2), qx_invertible(2))
def test_gauge_cocycle(A, P, Q):
    assert gauge_apply(P * Q, A) == gauge_apply(P, gauge_apply(Q, A))
    assert gauge_apply(Matrix.identity(QX, 2), A) == A
    assert gauge_apply(P.inverse(), gauge_apply(P, A)) == A


@settings(max_examples=20, deadline=None)
@given(qx_matrices(3), qx_invertible(3))
def test_gauge_object(A, P):
    g = Gauge(P)
    assert g.inverse().apply(g.apply(A)) == A
    assert (g * g.inverse()).apply(A) == A


def test_verify_gauge_examples():
    A = Matrix.from_rows(QX, [["1/x", 1], [0, "x"]])
    I = Matrix.identity(QX, 2)
    assert verify_gauge(A, I, A)[0]
    ok, diff = verify_gauge(A, I, A + Matrix.zeros(QX, 2).with_entry(0, 0, QX.one))
    assert not ok
    assert diff == Matrix.zeros(QX, 2).with_entry(0, 0, -QX.one)
    with pytest.raises(SingularGauge):
        verify_gauge(A, Matrix.zeros(QX, 2), A)


# -- symmetric powers ---------------------------------------------------------------


@settings(max_examples=15, deadline=None)
@given(st.sampled_from([2, 3]), qx_matrices(2), qx_invertible(2))
def test_sym_functoriality_2x2(p, A, P):
    lhs = sym_power(gauge_apply(P, A), p)
    rhs = gauge_apply(sym_power_gauge(P, p), sym_power(A, p))
    assert lhs == rhs


@settings(max_examples=8, deadline=None)
@given(st.sampled_from([2, 3]), qx_matrices(3, entries=st.sampled_from(
    [QX.zero, QX.one, x, 1 / x, 2 / (x + 1)])), qx_invertible(3))
def test_sym_functoriality_3x3(p, A, P):
    lhs = sym_power(gauge_apply(P, A), p)
    rhs = gauge_apply(sym_power_gauge(P, p), sym_power(A, p))
    assert lhs == rhs


def test_sym_power_small():
    A = Matrix.from_rows(QX, [[1, 0], [0, 2]])
    assert sym_power(A, 2) == Matrix.from_rows(QX, [[2, 0, 0], [0, 3, 0], [0, 0, 4]])
    assert sym_power(A, 1) == A
    assert monomials(2, 2) == ((2, 0), (1, 1), (0, 2))
    assert lve_size(4, 3) == 20 + 10 + 4


def test_sym_power_is_derivation():
    # (y1 y2)' for y' = A y matches row (1,1) of sym^2
    A = Matrix.from_rows(QX, [["x", 1], [0, "1/x"]])
    S = sym_power(A, 2)
    assert S.rows[1] == [QX.zero, x + 1 / x, QX.one]


# -- Hamiltonians and variational equations -------------------------------------------


def test_hamiltonian_field():
    T = ConstantTower(["m"])
    H = HamiltonianSystem(T, 1, "p1^2/2 + m*q1^4")
    assert H.vector_field_text() == ["p1", "-4*m*q1^3"]
    assert H.is_first_integral_preserved()
    with pytest.raises((ParseError, MalformedHamiltonian)):
        HamiltonianSystem(T, 1, "p1^2 + z")
    with pytest.raises(MalformedHamiltonian):
        HamiltonianSystem(T, 1, "p1^2", names=["a", "b", "c"])


def test_curve_check():
    T = ConstantTower()
    k = RationalFunctionField(T)
    H = HamiltonianSystem(T, 1, "p1^2/2")
    assert verify_curve(H, parse_curve(k, ["x", "1"]))[0]
    ok, (idx, res) = verify_curve(H, parse_curve(k, ["x", "2"]))
    assert not ok and idx == 1 and res == -1
    with pytest.raises(CurveMismatch):
        require_curve(H, parse_curve(k, ["x^2", "1"]))


def test_free_particle_lve():
    T = ConstantTower()
    k = RationalFunctionField(T)
    H = HamiltonianSystem(T, 1, "p1^2/2")
    curve = parse_curve(k, ["x", "1"])
    A1 = first_variational(H, curve)
    assert A1 == Matrix.from_rows(k, [[0, 1], [0, 0]])
    A3 = build_lve(H, curve, 3)
    assert A3.matrix.nrows == 9 and A3.sizes == [4, 3, 2]
    # linear field: no coupling between degrees
    assert A3.matrix.submatrix(4, 9, 0, 4).is_zero()
    assert A3.matrix.submatrix(0, 4, 0, 4) == sym_power(A1, 3)


def test_lve_block_structure():
    # anharmonic oscillator along an explicit solution q = 1/x of q'' = 2 q^3
    T = ConstantTower()
    k = RationalFunctionField(T)
    H = HamiltonianSystem(T, 1, "p1^2/2 - q1^4/2")
    curve = parse_curve(k, ["1/x", "-1/x^2"])
    assert verify_curve(H, curve)[0]
    A1 = first_variational(H, curve)
    assert A1 == Matrix.from_rows(k, [[0, 1], ["6/x^2", 0]])
    L2 = build_lve(H, curve, 2)
    L3 = build_lve(H, curve, 3, lower=L2)
    M = L3.matrix
    t = L3.top
    assert M.submatrix(0, t, 0, t) == sym_power(A1, 3)
    assert M.submatrix(0, t, t, M.ncols).is_zero()
    assert M.submatrix(t, M.nrows, t, M.ncols) == L2.matrix
    # p' = 2 q^3 gives xi_p' = 6 q^2 xi_q + 6 q xi_q^2 + 2 xi_q^3
    S2 = L2.matrix.submatrix(3, 5, 0, 3)
    assert S2.rows[1][0] == k.parse("6/x")
    # the cubic term xi_q^3 appears in S_3
    assert M.rows[t + 4][0] == 2


def test_vector_field_text_reparses():
    from mrsreduce.mpoly import parse_mfrac

    T = ConstantTower(["m"], [("i", "i^2+1")])
    H = HamiltonianSystem(T, 2, "(p1^2+p2^2)/2 + i*m*q2*(9*q1^2+q2^2)/(3*q1^3)")
    for text, f in zip(H.vector_field_text(), H.vector_field):
        assert parse_mfrac(text, T, H.names) == f
