import pytest
from hypothesis import given, settings

from mrsreduce.errors import DiagonalNotAbelian, UpperBlockNonzero
from mrsreduce.lie import (adjoint_action, coordinates_in, envelope_dimension, jordan_parts, lie_closure,
                           off_diagonal_algebra, split_diag_sub, wei_norman)
from mrsreduce.matrix import Matrix

from conftest import QX, TOWER, qx_matrices

x = QX.x


def C(rows, tower=QX.tower):
    return Matrix.from_rows(tower, rows)


@settings(max_examples=40, deadline=None)
@given(qx_matrices(3))
def test_wei_norman_reconstructs(A):
    wn = wei_norman(A)
    assert wn.reconstruct(QX, 3) == A
    # the constant matrices are independent, so their number is at most n^2
    assert len(lie_closure(wn.matrices).generators) == len(wn) <= 9
    assert len(lie_closure(wn.matrices).closed_basis) >= len(wn)


def test_wei_norman_small():
    A = Matrix.from_rows(QX, [["x", "1/x"], ["2*x", 0]])
    wn = wei_norman(A)
    assert len(wn) == 2
    assert wn.reconstruct(QX, 2) == A
    assert len(wei_norman(Matrix.zeros(QX, 2))) == 0


def test_lie_closure_sl2():
    e = C([[0, 1], [0, 0]])
    f = C([[0, 0], [1, 0]])
    lie = lie_closure([e, f])
    assert lie.dim == 3 and not lie.abelian
    i, j, Z = lie.witness()
    assert Z == lie.closed_basis[i].bracket(lie.closed_basis[j])
    h = lie_closure([C([[1, 0], [0, 2]]), C([[3, 0], [0, 1]])])
    assert h.abelian and h.witness() is None


def test_split_diag_sub():
    A = Matrix.from_rows(QX, [["1/x", 0, 0], [0, 0, 0], ["x", 1, "2/x"]])
    D, S = split_diag_sub(A, 2)
    assert D + S == A
    assert S.nonzero_positions() == [(2, 0), (2, 1)]
    with pytest.raises(UpperBlockNonzero):
        split_diag_sub(A.with_entry(0, 2, QX.one), 2)


def _two_block(top_diag, bottom_diag, sub):
    n = len(top_diag) + len(bottom_diag)
    A = Matrix.diag(QX, [QX(v) if isinstance(v, str) else v for v in top_diag + bottom_diag])
    for (i, j), v in sub.items():
        A = A.with_entry(i, j, QX(v) if isinstance(v, str) else v)
    return A


def test_off_diagonal_algebra_is_ad_closed():
    # diagonal blocks with two independent Wei-Norman matrices
    A = _two_block(["1/x", "x"], ["2/x"], {(2, 0): "1", (2, 1): "1"})
    D, S = split_diag_sub(A, 2)
    dmats = wei_norman(D).matrices
    sub = off_diagonal_algebra(S, dmats)
    assert sub.dim == 2 and sub.abelian
    for B in sub.closed_basis:
        for M in dmats:
            assert coordinates_in(sub.closed_basis, B.bracket(M)) is not None
    # without saturation the generator (1, x) alone would not be closed
    assert len(wei_norman(S).matrices) == 1


def test_adjoint_action_eigenvalues():
    A = _two_block(["0", "1/x"], ["2/x"], {(2, 0): "1", (2, 1): "x"})
    D, S = split_diag_sub(A, 2)
    sub = off_diagonal_algebra(S, wei_norman(D).matrices)
    dec = adjoint_action(D, sub)
    vals = sorted(str(v) for v in dec.eigenvalues)
    # [E_{20}, D] = (0 - 2/x) E_{20}, [E_{21}, D] = (1/x - 2/x) E_{21}
    assert vals == sorted(["-2/x", "-1/x"])
    assert dec.is_diagonalizable()
    assert [m for _, m in dec.minimal_polynomial()] == [1, 1]


def test_adjoint_action_jordan():
    # a nilpotent part in the top block gives a flag of length 2
    A = Matrix.from_rows(QX, [[0, 0, 0], [1, 0, 0], [1, 1, 0]])
    D, S = split_diag_sub(A, 2)
    sub = off_diagonal_algebra(S, wei_norman(D).matrices)
    dec = adjoint_action(D, sub)
    assert not dec.is_diagonalizable()
    assert [sp.length for sp in dec.spaces] == [2]
    assert dec.minimal_polynomial() == [(QX.zero, 2)]


def test_diagonal_not_abelian():
    A = Matrix.from_rows(QX, [["x", 1, 0], [0, 0, 0], [1, 0, 0]])
    D, S = split_diag_sub(A, 2)
    sub = off_diagonal_algebra(S, wei_norman(D).matrices)
    with pytest.raises(DiagonalNotAbelian):
        adjoint_action(D, sub)


def test_jordan_parts():
    M = C([[2, 0, 0], [1, 2, 0], [0, 0, 3]])
    S, N = jordan_parts(M)
    assert S + N == M
    assert S.bracket(N).is_zero()
    assert (N * N).is_zero() and not N.is_zero()
    assert S == C([[2, 0, 0], [0, 2, 0], [0, 0, 3]])


def test_envelope_dimension():
    # eigenvalue data (1, -1) spans a rank one lattice
    assert envelope_dimension([C([[1, 0], [0, -1]])]) == 1
    assert envelope_dimension([C([[1, 0], [0, 2]]), C([[0, 0], [0, 1]])]) == 2
    # nilpotent generators add their own dimension
    assert envelope_dimension([C([[0, 0], [1, 0]])]) == 1
    assert envelope_dimension([C([[1, 0, 0], [1, 1, 0], [0, 0, 1]])]) == 2
    assert envelope_dimension([]) == 0


def test_envelope_over_tower():
    m = TOWER.param("m")
    i = TOWER.gen("i")
    # eigenvalues m and i*m are independent over Q
    M = Matrix.diag(TOWER, [m, i * m, TOWER.zero])
    assert envelope_dimension([M]) == 2
    M = Matrix.diag(TOWER, [m, 2 * m, 3 * m])
    assert envelope_dimension([M]) == 1
