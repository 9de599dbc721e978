"""Seeded two-block instances with reduced diagonal a_i/x and simple sub-blocks."""

import random

from mrsreduce.matrix import Matrix
from mrsreduce.variational import gauge_apply

from conftest import QX

POOL = ["0", "1", "x", "1/x", "1/x^2", "1/(x+1)"]


def instance(seed):
    rng = random.Random(seed)
    top = rng.randint(2, 3)
    bottom = rng.randint(1, 2)
    n = top + bottom
    diag = [QX(rng.randint(-3, 3)) / QX.x for _ in range(n)]
    A = Matrix.diag(QX, diag)
    for i in range(top, n):
        for j in range(top):
            v = rng.choice(POOL)
            if v != "0":
                A = A.with_entry(i, j, QX(rng.choice([1, -1, 2])) * QX(v))
    return A, top


def instances(count, seed=0):
    return [instance(seed * 1000 + k) for k in range(count)]


def recheck_steps(A, A_diag, steps):
    """Replay the recorded factors and compare the closed form with the direct
    gauge action at every step. Returns the final matrix."""
    n = A.nrows
    I = Matrix.identity(QX if A.ring is QX else A.ring, n)
    cur = A
    for st in steps:
        if st.factor is None:
            continue
        F = st.factor
        closed = cur + F.bracket(A_diag) + F.derive()
        direct = gauge_apply(I + F, cur, I - F)
        assert closed == direct
        cur = direct
    return cur
