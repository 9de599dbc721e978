"""Matrix-level fixtures shared by the reducer and acceptance tests."""

from mrsreduce.constants import ConstantTower
from mrsreduce.matrix import Matrix
from mrsreduce.ratfunc import RationalFunctionField
from mrsreduce.variational import sym_power

from conftest import QX


def order2_obstruction():
    """Order-2 layout over diag(0, 1/x) with a single sub entry 1 whose level
    equation is y' = y/x + 1. Returns (A, top)."""
    A1r = Matrix.from_rows(QX, [[0, 0], [0, "1/x"]])
    A = Matrix.zeros(QX, 5).set_block(0, 0, sym_power(A1r, 2)).set_block(3, 3, A1r)
    return A.with_entry(4, 0, QX.one), 3


FORMAL_TOWER = ConstantTower(["m", "c2"], [("i", "i^2+1"), ("s", "s^2-3")])
FK = RationalFunctionField(FORMAL_TOWER)


def formal_ve2():
    """Order-2 matrix over diag(0, 0, (m+1)/2x, -(m+1)/2x) with the sub-block of the
    reference system written with a formal constant c2. Returns (A, top, expected)."""
    A1r = Matrix.from_rows(FK, [[0] * 4, [0] * 4, [0, 0, "(m+1)/(2*x)", 0],
                                [0, 0, 0, "-(m+1)/(2*x)"]])
    ts = "10/3*i*s"
    rows = [
        [0, 0, 0, 0, 0, 0, 0, "1/x^3", "1/x^2", "1/x"],
        [0, 0, 0, 0, 0, 0, 0, "-1/x^2", "-1/x", "-1"],
        [0, 0, "1/(x*m)", "1/m", 0, "1/(m*x^2)", "1/(x*m)", f"{ts}/(m*x^2)", f"{ts}/(x*m)",
         f"{ts}/m"],
        [0, 0, "-1/(m*x^2)", "-1/(x*m)", 0, "-1/(m*x^3)", "-1/(m*x^2)", f"-{ts}/(m*x^3)",
         f"-{ts}/(m*x^2)", f"-{ts}/(x*m)"],
    ]
    S = Matrix.from_rows(FK, rows).scale(FK("c2"))
    A = Matrix.zeros(FK, 14).set_block(0, 0, sym_power(A1r, 2)).set_block(10, 10, A1r)
    A = A.set_block(10, 0, S)
    expected = (Matrix.zeros(FK, 4, 10)
                .with_entry(1, 8, FK("-c2/x"))
                .with_entry(2, 2, FK("c2/(m*x)"))
                .with_entry(3, 3, FK("-c2/(m*x)")))
    return A, 10, expected
