import sys
from pathlib import Path

import pytest
from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).parent))

from mrsreduce.constants import ConstantTower  # noqa: E402
from mrsreduce.matrix import Matrix  # noqa: E402
from mrsreduce.ratfunc import Poly, RationalFunctionField  # noqa: E402

FIXTURES = Path(__file__).parent / "fixtures"

QX = RationalFunctionField()

TOWER = ConstantTower(["m"], [("i", "i^2 + 1"), ("s", "s^2 - 3")])
KT = RationalFunctionField(TOWER)
_TBASIS = [TOWER.parse(t) for t in ["1", "i", "s", "i*s", "m", "m*i", "1/(m+1)", "s/m"]]

small = st.integers(-4, 4)


@st.composite
def qpoly(draw, max_deg=3):
    cs = draw(st.lists(small, min_size=1, max_size=max_deg + 1))
    t = QX.tower
    return Poly(t, [t(c) for c in cs])


@st.composite
def qx_elements(draw, max_deg=3):
    num = draw(qpoly(max_deg))
    den = draw(qpoly(2).filter(bool))
    return QX.frac(num, den)


@st.composite
def qx_nonzero(draw):
    return draw(qx_elements().filter(bool))


@st.composite
def tower_constants(draw):
    cs = draw(st.lists(small, min_size=len(_TBASIS), max_size=len(_TBASIS)))
    out = TOWER.zero
    for c, b in zip(cs, _TBASIS):
        if c:
            out = out + b * c
    return out


@st.composite
def kt_elements(draw):
    a = draw(tower_constants())
    b = draw(tower_constants())
    d = draw(st.integers(0, 3))
    return KT.from_const(a) + KT.from_const(b) / (KT.x + d) ** 2 + KT.x * draw(small)


@st.composite
def qx_matrices(draw, n, entries=None):
    entries = qx_elements(2) if entries is None else entries
    return Matrix(QX, [[draw(entries) for _ in range(n)] for _ in range(n)])


@st.composite
def qx_invertible(draw, n):
    """Products of unipotent and scaling factors, so always invertible."""
    M = Matrix.identity(QX, n)
    for _ in range(draw(st.integers(1, 3))):
        i = draw(st.integers(0, n - 1))
        j = draw(st.integers(0, n - 1))
        if i == j:
            E = Matrix.identity(QX, n).with_entry(i, i, draw(qx_nonzero()))
        else:
            E = Matrix.identity(QX, n).with_entry(i, j, draw(qx_elements(2)))
        M = M * E
    return M


# -- the reference system ----------------------------------------------------------

REFERENCE_DOC = FIXTURES / "reference_system.yaml"


@pytest.fixture(scope="session")
def reference():
    from mrsreduce.cli import load_document

    return load_document(REFERENCE_DOC)
