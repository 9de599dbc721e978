import pytest

from mrsreduce.constants import ConstantTower
from mrsreduce.errors import DegreeCapExceeded, Ve1NotReduced
from mrsreduce.lie import envelope_dimension, split_diag_sub
from mrsreduce.matrix import Matrix
from mrsreduce.ratfunc import RationalFunctionField
from mrsreduce.reducer import (ABELIAN_UP_TO, OBSTRUCTION, diagonalizing_gauge, full_reduce,
                               mrs_driver, reduce_order, removable_directions,
                               simplified_check, stopping_test, verify_ve1)
from mrsreduce.variational import (HamiltonianSystem, gauge_apply, parse_curve,
                                   verify_gauge)

from conftest import QX
from matrix_fixtures import formal_ve2, order2_obstruction
from oracle import oracle_parametrized
from synthetic import instances, recheck_steps

x = QX.x


@pytest.mark.parametrize("A,top", instances(20, seed=1))
def test_closed_form_matches_direct(A, top):
    res = full_reduce(A, top)
    A_diag, _ = split_diag_sub(A, top)
    assert recheck_steps(A, A_diag, res.steps) == res.matrix
    assert verify_gauge(A, res.gauge, res.matrix)[0]
    assert all(st.prop2_checked for st in res.steps if st.factor is not None)


@pytest.mark.parametrize("A,top", instances(10, seed=2))
def test_fixpoint_and_stopping(A, top):
    res = full_reduce(A, top)
    again = full_reduce(res.matrix, top)
    assert again.matrix == res.matrix
    assert again.gauge == Matrix.identity(QX, A.nrows)
    assert all(s == 0 for _, _, s in stopping_test(res.matrix, top))


def test_reduction_removes_what_it_can():
    # one coordinate with eigenvalue -1/x: y' = y/x + b
    A = Matrix.from_rows(QX, [[0, 0], ["x", "1/x"]])
    res = full_reduce(A, 1)
    # g = x^2 solves g' = g/x + x, so the entry is cleared by f = -x^2
    assert res.matrix == Matrix.from_rows(QX, [[0, 0], [0, "1/x"]])
    assert verify_gauge(A, res.gauge, res.matrix)[0]
    assert [(st.t, st.s) for st in res.steps] == [(1, 1)]


def test_removable_directions_counts():
    picked, _ = removable_directions(QX.zero, [1 / x, x, QX.one])
    # 1/x has no rational primitive; x and 1 do
    assert len(picked) == 2


def test_order2_obstruction_both_modes():
    A, top = order2_obstruction()
    full = reduce_order(A, top, 2, "full")
    assert (full.verdict.kind, full.verdict.order) == (OBSTRUCTION, 2)
    w = full.verdict.witness
    X = Matrix.from_rows(QX.tower, w["X"])
    Y = Matrix.from_rows(QX.tower, w["Y"])
    assert X.bracket(Y) == Matrix.from_rows(QX.tower, w["bracket"])
    assert not X.bracket(Y).is_zero()
    simp = reduce_order(A, top, 2, "simplified")
    assert (simp.verdict.kind, simp.verdict.order) == (OBSTRUCTION, 2)
    w = simp.verdict.witness
    assert (w["equation_coefficient"], w["b"], w["level"]) == ("1/x", "1", 1)
    # the level equation y' = y/x + c has no rational solution with c != 0
    sols = oracle_parametrized(QX(w["equation_coefficient"]), [QX(w["b"])])
    assert all(c == [0] for _, c in sols)


def test_formal_c2_exact():
    A, top, expected = formal_ve2()
    res = full_reduce(A, top)
    assert res.matrix.submatrix(top, 14, 0, top) == expected
    assert res.lie.abelian and res.lie.dim == 1
    assert envelope_dimension(res.lie.closed_basis) == 2
    assert [(st.t, st.s) for st in res.steps if st.s] == [(1, 1), (2, 2), (1, 1), (2, 1),
                                                          (1, 1), (2, 2), (1, 1)]
    assert verify_gauge(A, res.gauge, res.matrix)[0]


def test_simplified_agrees_on_reducible_input():
    A, top, _ = formal_ve2()
    res = simplified_check(A, top, order=2)
    assert res.verdict is None and res.lie.abelian


def test_free_particle_to_order_3():
    T = ConstantTower()
    k = RationalFunctionField(T)
    H = HamiltonianSystem(T, 1, "p1^2/2")
    curve = parse_curve(k, ["x", "1"])
    for mode in ("full", "simplified"):
        v, state = mrs_driver(H, curve, 3, mode)
        assert (v.kind, v.order) == (ABELIAN_UP_TO, 3)
        for p in (2, 3):
            rec = state.orders[p]
            assert verify_gauge(rec["lve"].matrix, rec["gauge"], rec["reduced"])[0]


def test_diagonalizing_gauge():
    A = Matrix.from_rows(QX, [["1/x", "1/x"], [0, "-1/x"]])
    P = diagonalizing_gauge(A)
    B = gauge_apply(P, A)
    assert B.rows[0][1] == 0 and B.rows[1][0] == 0
    assert diagonalizing_gauge(Matrix.from_rows(QX, [[0, 1], [0, 0]])) is None


def test_ve1_not_reduced():
    A = Matrix.from_rows(QX, [[0, 1], ["x", 0]])
    with pytest.raises(Ve1NotReduced):
        verify_ve1(A, Matrix.identity(QX, 2))
    with pytest.raises(Ve1NotReduced):
        verify_ve1(A, Matrix.identity(QX, 2), expected=Matrix.zeros(QX, 2))


def test_degree_cap_propagates():
    A = Matrix.from_rows(QX, [[0, 0], ["1/x", "-60/x"]])
    with pytest.raises(DegreeCapExceeded):
        full_reduce(A, 1, cap=10)
