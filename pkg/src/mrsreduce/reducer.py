"""Reduction of variational equations to Kolchin-Kovacic reduced form and the
order-by-order abelianity driver.

Partial reductions use gauge matrices Id + F with F in the off-diagonal algebra,
for which P[A] = A + [F, A_diag] + F'. On a flag level of the eigenvalue lambda of
[., A_diag] the coefficient b of a basis matrix becomes b + lambda f + f', so the
level is cleared by solving g' = -lambda g + b and taking f = -g.
"""

import time
from dataclasses import dataclass, field as dc_field

from .errors import DiagonalNotAbelian, MRSError, Ve1NotReduced
from .lie import (adjoint_action, envelope_dimension, lie_closure,
                  off_diagonal_algebra, split_diag_sub, wei_norman)
from .matrix import Matrix, Span, check_lower_block
from .ode import (DEFAULT_DEGREE_CAP, first_order_rational_solution,
                  independent_functions, parametrized_first_order,
                  rational_primitive)
from .variational import (BlockSystem, build_lve, gauge_apply, sym_power,
                          sym_power_gauge)

OBSTRUCTION = "OBSTRUCTION"
ABELIAN_UP_TO = "ABELIAN_UP_TO"


@dataclass
class Verdict:
    kind: str
    order: int
    witness: dict = dc_field(default_factory=dict)

    def __str__(self):
        return f"{self.kind}({self.order})"


@dataclass
class Step:
    eigenvalue: object
    level: int
    t: int
    s: int
    factor: object = None        # F with P = Id + F
    prop2_checked: bool = False


@dataclass
class ReductionResult:
    matrix: Matrix              # reduced A
    gauge: Matrix               # P with P[A_in] = matrix
    lie: object                 # LieBasis of the reduced matrix
    steps: list
    decomposition: object       # AdjointDecomposition of the input
    verdict: Verdict = None


@dataclass
class ReductionState:
    """Driver state; ``orders[p]`` holds the per-order record."""

    system: object
    curve: list
    p: int = 1
    a1_red: Matrix = None
    p1: Matrix = None
    orders: dict = dc_field(default_factory=dict)

    def reduced(self, p):
        return self.orders[p]["reduced"]

    def gauge(self, p):
        return self.orders[p]["gauge"]


# -- one order --------------------------------------------------------------------


class _FlagCoordinates:
    """Coordinates of off-diagonal matrices on the concatenated flag bases."""

    def __init__(self, decomp):
        self.decomp = decomp
        self.slots = []      # (space index, level) per basis matrix
        self.mats = []
        for si, sp in enumerate(decomp.spaces):
            for li, lvl in enumerate(sp.levels):
                for v in lvl:
                    self.slots.append((si, li + 1))
                    self.mats.append(decomp.to_matrix(v))
        if self.mats:
            n = self.mats[0].nrows
            self.span = Span(self.mats[0].ring, n * n)
            for M in self.mats:
                if not self.span.add(M.vec()):
                    raise ArithmeticError("flag bases are dependent")

    def __call__(self, A_sub):
        """dict (space, level) -> list of k coefficients, ordered as the level basis."""
        field = A_sub.ring
        out = {}
        for si, sp in enumerate(self.decomp.spaces):
            for li, lvl in enumerate(sp.levels):
                out[(si, li + 1)] = [field.zero] * len(lvl)
        if not self.mats:
            return out
        wn = wei_norman(A_sub)
        pos = {}
        for idx, slot in enumerate(self.slots):
            pos.setdefault(slot, []).append(idx)
        for a, M in zip(wn.coefficients, wn.matrices):
            c = self.span.coordinates(M.vec())
            if c is None:
                raise ArithmeticError("off-diagonal part left the off-diagonal algebra")
            for slot, idxs in pos.items():
                row = out[slot]
                for k, idx in enumerate(idxs):
                    if c[idx]:
                        row[k] = row[k] + a * field.from_const(c[idx])
        return out


def _lift(M, field):
    return M.map(field.from_const, field)


def _closed_form(A, A_diag, coeffs, mats):
    """A + sum f_i [B_i, A_diag] + sum f_i' B_i."""
    field = A.ring
    out = A
    for f, B in zip(coeffs, mats):
        if not f:
            continue
        Bk = _lift(B, field)
        out = out + Bk.bracket(A_diag).scale(f) + Bk.scale(f.derive())
    return out


def _apply_level(A, A_diag, coeffs, mats, check_prop2=True):
    """Apply P = Id + sum f_i B_i; returns (new A, F, checked)."""
    field = A.ring
    n = A.nrows
    F = Matrix.zeros(field, n)
    for f, B in zip(coeffs, mats):
        if f:
            F = F + _lift(B, field).scale(f)
    new = _closed_form(A, A_diag, coeffs, mats)
    if check_prop2:
        P = Matrix.identity(field, n) + F
        P_inv = Matrix.identity(field, n) - F
        direct = gauge_apply(P, A, P_inv)
        if direct != new:
            raise ArithmeticError("closed-form update disagrees with direct gauge application")
    return new, F, check_prop2


def _complete_basis(tower, cols, t):
    """Columns ``cols`` extended greedily by standard basis vectors."""
    sp = Span(tower, t)
    out = []
    for c in cols:
        if sp.add(c):
            out.append(list(c))
    for i in range(t):
        e = [tower.one if j == i else tower.zero for j in range(t)]
        if sp.add(e):
            out.append(e)
    return out


def removable_directions(mu, b, cap=DEFAULT_DEGREE_CAP, token=None):
    """Solutions (g_j, c_j) of g' = mu g + c.b whose functions c_j.b are C-independent
    and nonzero; their number is the count s of removable directions."""
    basis = parametrized_first_order(mu, b, cap, token)
    field = mu.field
    picked, funcs = [], []
    for it in basis:
        if not any(it.c):
            continue
        fn = field.zero
        for ci, bi in zip(it.c, b):
            if ci:
                fn = fn + bi * ci
        if not fn:
            continue
        if len(independent_functions(funcs + [fn])) == len(funcs) + 1:
            funcs.append(fn)
            picked.append(it)
    return picked, basis


def partial_reduce_level(A, A_diag, decomp, coords, si, level, cap=DEFAULT_DEGREE_CAP,
                         token=None, check_prop2=True):
    """Remove every removable direction on one flag level. Returns (A, Step)."""
    sp = decomp.spaces[si]
    field = A.ring
    tower = field.tower
    lam = sp.value
    mats = decomp.level_matrices(sp, level)
    t = len(mats)
    b = coords(_sub_of(A, A_diag))[(si, level)]
    if not any(b):
        return A, Step(lam, level, t, 0)
    picked, _ = removable_directions(-lam, b, cap, token)
    s = len(picked)
    if s == 0:
        return A, Step(lam, level, t, 0)
    Qbar = _complete_basis(tower, [it.c for it in picked], t)   # columns
    Qm = Matrix(tower, [list(r) for r in zip(*Qbar)])
    gamma = Qm.inverse()
    f = []
    for i in range(t):
        acc = field.zero
        for j in range(s):
            gj = gamma.rows[j][i]
            if gj:
                acc = acc + picked[j].g * gj
        f.append(-acc)
    new, F, checked = _apply_level(A, A_diag, f, mats, check_prop2)
    return new, Step(lam, level, t, s, F, checked)


def _sub_of(A, A_diag):
    return A - A_diag


def analyse(A, top):
    """(A_diag, sub algebra, adjoint decomposition) for a two-block matrix."""
    A_diag, A_sub = split_diag_sub(A, top)
    diag_wn = wei_norman(A_diag)
    sub = off_diagonal_algebra(A_sub, diag_wn.matrices)
    decomp = adjoint_action(A_diag, sub)
    return A_diag, A_sub, sub, decomp


def full_reduce(A, top, cap=DEFAULT_DEGREE_CAP, token=None, check_prop2=True, analysis=None):
    """Reduced form of a two-block lower-triangular system with reduced abelian
    diagonal. Eigenvalues are processed in the decomposition's order, each from
    its top flag level down to level 1."""
    field = A.ring
    n = A.nrows
    A_diag, A_sub, sub, decomp = analysis or analyse(A, top)
    coords = _FlagCoordinates(decomp)
    steps = []
    cur = A
    total = Matrix.zeros(field, n)
    for si, sp in enumerate(decomp.spaces):
        for level in range(sp.length, 0, -1):
            if token is not None:
                token.check()
            cur, step = partial_reduce_level(cur, A_diag, decomp, coords, si, level,
                                             cap, token, check_prop2)
            steps.append(step)
            if step.factor is not None:
                # lower-left support makes every product of factors vanish, so the
                # partial gauges commute and compose to Id + sum of factors
                check_lower_block(step.factor, top)
                total = total + step.factor
    gauge = Matrix.identity(field, n) + total
    if check_prop2 and gauge_apply(gauge, A, Matrix.identity(field, n) - total) != cur:
        raise ArithmeticError("accumulated gauge does not reproduce the reduced matrix")
    lie = lie_closure(wei_norman(cur).matrices)
    return ReductionResult(cur, gauge, lie, steps, decomp)


def stopping_test(A, top, cap=DEFAULT_DEGREE_CAP, token=None):
    """Count of removable directions per (eigenvalue, level); all zero for a reduced form."""
    A_diag, A_sub, sub, decomp = analyse(A, top)
    coords = _FlagCoordinates(decomp)
    values = coords(A_sub)
    out = []
    for si, sp in enumerate(decomp.spaces):
        for level in range(1, sp.length + 1):
            b = values[(si, level)]
            s = len(removable_directions(-sp.value, b, cap, token)[0]) if any(b) else 0
            out.append((sp.value, level, s))
    return out


def simplified_check(A, top, cap=DEFAULT_DEGREE_CAP, token=None, iterate_unreduced=False,
                     check_prop2=True, order=None):
    """Obstruction-only pass: every coordinate outside (lambda = 0, level 1) must
    be removable on its own. Returns a ReductionResult whose verdict is set on
    failure."""
    field = A.ring
    n = A.nrows
    A_diag, A_sub, sub, decomp = analyse(A, top)
    coords = _FlagCoordinates(decomp)
    cur = A
    total = Matrix.zeros(field, n)
    steps = []
    for si, sp in enumerate(decomp.spaces):
        lam = sp.value
        for level in range(sp.length, 0, -1):
            if not lam and level == 1:
                continue
            mats = decomp.level_matrices(sp, level)
            b = coords(_sub_of(cur, A_diag))[(si, level)]
            f = []
            for i, bi in enumerate(b):
                if token is not None:
                    token.check()
                if not bi:
                    f.append(field.zero)
                    continue
                g = rational_primitive(bi) if not lam else first_order_rational_solution(-lam, bi, cap, token)
                if g is None:
                    witness = {
                        "eigenvalue": str(lam),
                        "equation_coefficient": str(-lam),
                        "level": level,
                        "coordinate": i,
                        "b": str(bi),
                        "basis_matrix": mats[i].to_strings(),
                    }
                    res = ReductionResult(cur, Matrix.identity(field, n) + total, None, steps, decomp)
                    res.verdict = Verdict(OBSTRUCTION, order, witness)
                    return res
                f.append(-g)
            if any(f):
                cur, F, checked = _apply_level(cur, A_diag, f, mats, check_prop2)
                total = total + F
                steps.append(Step(lam, level, len(mats), sum(1 for x in f if x), F, checked))
    if not iterate_unreduced:
        for si, sp in enumerate(decomp.spaces):
            if not sp.value:
                cur, step = partial_reduce_level(cur, A_diag, decomp, coords, si, 1,
                                                 cap, token, check_prop2)
                steps.append(step)
                if step.factor is not None:
                    total = total + step.factor
    gauge = Matrix.identity(field, n) + total
    lie = lie_closure(wei_norman(cur).matrices)
    return ReductionResult(cur, gauge, lie, steps, decomp)


def reduce_order(A, top, order, mode="full", cap=DEFAULT_DEGREE_CAP, token=None,
                 iterate_unreduced=False, check_prop2=True):
    """One order of the driver on a pre-reduced two-block matrix. The result always
    carries a verdict: OBSTRUCTION(order) with a witness, or ABELIAN_UP_TO(order)."""
    if mode == "full":
        res = full_reduce(A, top, cap, token, check_prop2)
    elif mode == "simplified":
        res = simplified_check(A, top, cap, token, iterate_unreduced, check_prop2, order=order)
        if res.verdict is not None:
            return res
    else:
        raise ValueError(f"unknown mode {mode!r}")
    if not res.lie.abelian:
        i, j, Z = res.lie.witness()
        witness = {"pair": [i, j], "X": res.lie.closed_basis[i].to_strings(),
                   "Y": res.lie.closed_basis[j].to_strings(), "bracket": Z.to_strings()}
        res.verdict = Verdict(OBSTRUCTION, order, witness)
    else:
        res.verdict = Verdict(ABELIAN_UP_TO, order)
    return res


# -- pre-reduction and the driver ---------------------------------------------------


def prereduce(A_p, P1, P_prev, A1_red=None, A_prev_red=None):
    """Q[A_p] with Q = diag(Sym^p(P1), P_prev); checks the diagonal blocks when the
    reduced forms are supplied. Returns (BlockSystem, Q)."""
    field = A_p.matrix.ring
    p = A_p.order
    Q = Matrix.block_diag(field, [sym_power_gauge(P1, p), P_prev])
    M = gauge_apply(Q, A_p.matrix)
    t = A_p.top
    if A1_red is not None and M.submatrix(0, t, 0, t) != sym_power(A1_red, p):
        raise ArithmeticError("top block is not the symmetric power of the reduced VE1")
    if A_prev_red is not None and M.submatrix(t, M.nrows, t, M.ncols) != A_prev_red:
        raise ArithmeticError("bottom block differs from the reduced lower-order system")
    diag, _ = split_diag_sub(M, t)
    mats = wei_norman(diag).matrices
    for i in range(len(mats)):
        for j in range(i + 1, len(mats)):
            Z = mats[i].bracket(mats[j])
            if not Z.is_zero():
                raise DiagonalNotAbelian((i, j, Z.to_strings()))
    return A_p.with_matrix(M), Q


def verify_ve1(A1, P1, expected=None):
    """Reduced VE1 from the supplied gauge; raises Ve1NotReduced on failure."""
    A1r = gauge_apply(P1, A1)
    if expected is not None and A1r != expected:
        raise Ve1NotReduced("the supplied gauge does not produce the expected reduced VE1")
    lie = lie_closure(wei_norman(A1r).matrices)
    if not lie.abelian:
        raise Ve1NotReduced("the gauged VE1 has a non-abelian Lie algebra; if the gauge is a "
                            "genuine reduction this is an obstruction at order 1")
    return A1r, lie


def diagonalizing_gauge(A1):
    """Gauge to diagonal form for a VE1 whose Wei-Norman matrices commute and are
    diagonalizable over the tower; None otherwise."""
    from .matrix import joint_characteristic_spaces

    field = A1.ring
    mats = wei_norman(A1).matrices
    if not mats:
        return Matrix.identity(field, A1.nrows)
    try:
        dec = joint_characteristic_spaces(mats, [None] * len(mats))
    except MRSError:
        return None
    if not dec.is_diagonalizable():
        return None
    cols = [v for sp in dec.spaces for v in sp.flag(1)]
    T = Matrix(mats[0].ring, [list(r) for r in zip(*cols)])
    return _lift(T.inverse(), field)


def mrs_driver(system, curve, p_max, mode="full", ve1_gauge=None, expected_a1_red=None,
               cap=DEFAULT_DEGREE_CAP, token=None, iterate_unreduced=False, check_prop2=True,
               progress=None):
    """Run orders 1..p_max; returns (Verdict, ReductionState)."""
    from .variational import require_curve

    require_curve(system, curve)
    field = curve[0].field
    state = ReductionState(system, curve)
    t0 = time.perf_counter()
    A1 = build_lve(system, curve, 1)
    P1 = ve1_gauge if ve1_gauge is not None else Matrix.identity(field, A1.size)
    try:
        A1r, lie1 = verify_ve1(A1.matrix, P1, expected_a1_red)
    except MRSError as e:
        raise e.with_order(1)
    state.a1_red, state.p1 = A1r, P1
    state.orders[1] = {"lve": A1, "prereduced": A1r, "reduced": A1r, "gauge": P1,
                       "lie": lie1, "envelope": _envelope(lie1), "decomposition": None,
                       "steps": [], "seconds": time.perf_counter() - t0}
    for p in range(2, p_max + 1):
        state.p = p
        t0 = time.perf_counter()
        try:
            Ap = build_lve(system, curve, p)
            pre, Q = prereduce(Ap, P1, state.gauge(p - 1), A1r, state.reduced(p - 1))
            res = reduce_order(pre.matrix, pre.top, p, mode, cap, token, iterate_unreduced,
                               check_prop2)
        except MRSError as e:
            raise e.with_order(p)
        record = {"lve": Ap, "prereduced": pre.matrix, "reduced": res.matrix,
                  "gauge": res.gauge * Q, "lie": res.lie, "decomposition": res.decomposition,
                  "steps": res.steps, "seconds": None}
        state.orders[p] = record
        if res.verdict.kind == OBSTRUCTION:
            record["seconds"] = time.perf_counter() - t0
            return res.verdict, state
        record["envelope"] = _envelope(res.lie)
        record["seconds"] = time.perf_counter() - t0
        if progress is not None:
            progress(p, record)
    return Verdict(ABELIAN_UP_TO, p_max), state


def _envelope(lie):
    try:
        return envelope_dimension(lie.closed_basis) if lie.abelian else None
    except MRSError:
        return None
