import pytest
from hypothesis import given, settings, strategies as st

from mrsreduce.errors import EigenvalueOutsideTower, NonCommuting, NotOffDiagonal, SingularGauge
from mrsreduce.matrix import (Matrix, Span, joint_characteristic_spaces, kernel_basis,
                              minimal_polynomial, nilpotent_exp, nilpotent_log,
                              poly_eval_matrix, rref, solve)

from conftest import KT, QX, TOWER, qx_invertible, qx_matrices

x = QX.x


def M(rows, ring=QX):
    return Matrix.from_rows(ring, rows)


@settings(max_examples=30, deadline=None)
@given(qx_invertible(3))
def test_inverse(P):
    I = Matrix.identity(QX, 3)
    assert P * P.inverse() == I
    assert P.inverse() * P == I


@settings(max_examples=30, deadline=None)
@given(qx_matrices(2), qx_matrices(2), qx_matrices(2))
def test_ring_laws(A, B, C):
    assert (A * B) * C == A * (B * C)
    assert A * (B + C) == A * B + A * C
    assert (A * B).derive() == A.derive() * B + A * B.derive()
    assert A.bracket(B) == -B.bracket(A)


@settings(max_examples=30, deadline=None)
@given(qx_matrices(3))
def test_kernel_and_rank(A):
    for v in kernel_basis(A):
        assert not any(A.apply(v))
    assert A.rank() + len(kernel_basis(A)) == 3


def test_rref_and_solve():
    A = M([[1, 2, 3], [2, 4, 6], [1, "x", 0]])
    R, piv = rref(A)
    assert piv == [0, 1]
    v = solve(A, [QX(1), QX(2), QX(0)])
    assert A.apply(v) == [1, 2, 0]
    assert solve(A, [QX(1), QX(3), QX(0)]) is None


def test_singular():
    with pytest.raises(SingularGauge):
        M([[1, "x"], [2, "2*x"]]).inverse()


def test_span_coordinates():
    sp = Span(QX, 3)
    assert sp.add([QX(1), x, QX(0)])
    assert sp.add([QX(0), QX(1), QX(1)])
    assert not sp.add([QX(1), x + 1, QX(1)])
    assert sp.coordinates([QX(2), 2 * x + 3, QX(3)]) == [2, 3]
    assert sp.coordinates([QX(0), QX(0), QX(1)]) is None


def test_minimal_polynomial():
    T = TOWER
    J = Matrix.from_rows(T, [[2, 1, 0], [0, 2, 0], [0, 0, 3]])
    mp = minimal_polynomial(J)
    # (X - 2)^2 (X - 3) = X^3 - 7X^2 + 16X - 12
    assert mp == [T(-12), T(16), T(-7), T(1)]
    assert poly_eval_matrix(mp, J).is_zero()


def test_joint_spaces():
    T = TOWER
    A = Matrix.from_rows(T, [[1, 0, 0], [0, -1, 0], [0, 0, 1]])
    B = Matrix.from_rows(T, [[0, 0, 0], [0, 0, 0], [0, 0, 2]])
    dec = joint_characteristic_spaces([A, B], [KT.x, KT.one])
    assert sorted(sp.dim for sp in dec.spaces) == [1, 1, 1]
    assert dec.is_diagonalizable()
    N = Matrix.from_rows(T, [[0, 1], [0, 0]])
    dec = joint_characteristic_spaces([N], [KT.one])
    assert [sp.length for sp in dec.spaces] == [2]
    assert not dec.is_diagonalizable()


def test_joint_spaces_errors():
    T = TOWER
    A = Matrix.from_rows(T, [[0, 1], [0, 0]])
    B = Matrix.from_rows(T, [[0, 0], [1, 0]])
    with pytest.raises(NonCommuting):
        joint_characteristic_spaces([A, B], [KT.one, KT.one])
    rot = Matrix.from_rows(T, [[0, 1], [-2, 0]])
    with pytest.raises(EigenvalueOutsideTower):
        joint_characteristic_spaces([rot], [KT.one])
    # with the right generator available the candidates verify
    i = T.gen("i")
    rot = Matrix.from_rows(T, [[0, 1], [-1, 0]])
    dec = joint_characteristic_spaces([rot], [KT.one], candidates=[[i, -i]])
    assert len(dec.spaces) == 2


def test_nilpotent_exp_log():
    B = Matrix.zeros(QX, 3).with_entry(2, 0, x)
    P = nilpotent_exp(B, 2)
    assert nilpotent_log(P, 2) == B
    with pytest.raises(NotOffDiagonal):
        nilpotent_exp(Matrix.zeros(QX, 3).with_entry(0, 2, x), 2)


def test_blocks():
    A = M([[1, 2], [3, 4]])
    Z = Matrix.zeros(QX, 4).set_block(2, 0, A)
    assert Z.submatrix(2, 4, 0, 2) == A
    assert Z.submatrix(0, 2, 0, 2).is_zero()
    assert Matrix.block_diag(QX, [A, A]).submatrix(2, 4, 2, 4) == A
