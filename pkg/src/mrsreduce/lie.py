"""Wei-Norman decompositions, Lie closures and the adjoint action on the
off-diagonal algebra.

All constant-matrix subspaces are handled through row-major vectorization and
:class:`Span`, so bases are deterministic.
"""

from dataclasses import dataclass, field as dc_field

from .errors import DiagonalNotAbelian, UpperBlockNonzero
from .matrix import Matrix, Span, joint_characteristic_spaces, rref
from .ode import coefficient_vectors
from .ratfunc import Poly, RatFunc


@dataclass
class WeiNorman:
    coefficients: list
    matrices: list

    def __len__(self):
        return len(self.coefficients)

    def reconstruct(self, field, n, m=None):
        out = Matrix.zeros(field, n, m)
        for a, M in zip(self.coefficients, self.matrices):
            out = out + M.map(field.from_const, field).scale(a)
        return out


def wei_norman(A):
    """A = sum a_i M_i with C-independent a_i and constant M_i."""
    field = A.ring
    tower = field.tower
    entries = [v for r in A.rows for v in r]
    if not any(entries):
        return WeiNorman([], [])
    den, vecs = coefficient_vectors(entries)
    # highest degree first so that the a_i come out with leading terms normalized
    vecs = [list(reversed(v)) for v in vecs]
    red, piv = rref(Matrix(tower, vecs))
    s = len(piv)
    L = len(vecs[0])
    coeffs = []
    for i in range(s):
        num = Poly(tower, list(reversed(red.rows[i])))
        coeffs.append(RatFunc.make(field, num, den))
    mats = []
    for i, p in enumerate(piv):
        vals = [v[p] for v in vecs]
        # entries are combinations of the rref rows with weights read at pivots
        mats.append(Matrix(tower, [vals[r * A.ncols:(r + 1) * A.ncols] for r in range(A.nrows)]))
    return WeiNorman(coeffs, mats)


@dataclass
class LieBasis:
    generators: list
    closed_basis: list
    abelian: bool

    @property
    def dim(self):
        return len(self.closed_basis)

    def witness(self):
        """First non-vanishing bracket (i, j, [B_i, B_j]) or None."""
        for i, X in enumerate(self.closed_basis):
            for j in range(i + 1, len(self.closed_basis)):
                Z = X.bracket(self.closed_basis[j])
                if not Z.is_zero():
                    return i, j, Z
        return None


def lie_closure(gens):
    gens = [g for g in gens]
    if not gens:
        return LieBasis([], [], True)
    ring, n = gens[0].ring, gens[0].nrows
    sp = Span(ring, n * n)
    basis = [g for g in gens if sp.add(g.vec())]
    frontier = list(range(len(basis)))
    abelian = True
    while frontier:
        new = []
        for i in frontier:
            for j in range(len(basis)):
                if j == i or (j in frontier and j < i):
                    continue
                Z = basis[i].bracket(basis[j])
                if Z.is_zero():
                    continue
                abelian = False
                if sp.add(Z.vec()):
                    basis.append(Z)
                    new.append(len(basis) - 1)
        frontier = new
    return LieBasis(gens, basis, abelian)


def split_diag_sub(A, top):
    """(A_diag, A_sub) for the two-block layout with the first ``top`` rows on top."""
    n = A.nrows
    diag = A.copy()
    sub = Matrix.zeros(A.ring, n)
    for i, j in A.nonzero_positions():
        if i < top and j >= top:
            raise UpperBlockNonzero(f"entry ({i}, {j}) of the upper-right block is nonzero")
        if i >= top and j < top:
            sub.rows[i][j] = A.rows[i][j]
            diag.rows[i][j] = A.ring.zero
    return diag, sub


def off_diagonal_algebra(A_sub, diag_matrices=()):
    """Constant basis of the k-algebra generated by A_sub: the span of its
    Wei-Norman matrices saturated under [., D] for every diagonal Wei-Norman
    matrix D. Products of off-diagonal matrices vanish, so it is abelian."""
    wn = wei_norman(A_sub)
    gens = list(wn.matrices)
    if not gens:
        return LieBasis([], [], True)
    ring, n = gens[0].ring, gens[0].nrows
    sp = Span(ring, n * n)
    basis = [g for g in gens if sp.add(g.vec())]
    k = 0
    while k < len(basis):
        for D in diag_matrices:
            Z = basis[k].bracket(D)
            if not Z.is_zero() and sp.add(Z.vec()):
                basis.append(Z)
        k += 1
    return LieBasis(gens, basis, True)


def coordinates_in(basis, M):
    """Coordinates of constant matrix M on ``basis`` (list of matrices), or None."""
    if not basis:
        return [] if M.is_zero() else None
    sp = Span(M.ring, M.nrows * M.ncols)
    for B in basis:
        sp.add(B.vec())
    return sp.coordinates(M.vec())


class _BasisCoords:
    """Cached coordinate map onto a fixed list of constant matrices."""

    def __init__(self, basis):
        self.basis = basis
        B0 = basis[0]
        self.span = Span(B0.ring, B0.nrows * B0.ncols)
        for B in basis:
            if not self.span.add(B.vec()):
                raise ValueError("basis matrices are dependent")

    def __call__(self, M):
        return self.span.coordinates(M.vec())


@dataclass
class AdjointDecomposition:
    field: object
    sub: LieBasis
    weights: list           # g_i in k
    diag_matrices: list     # D_i, constant
    psi_maps: list          # Psi_i on sub coordinates
    joint: object           # JointDecomposition
    meta: dict = dc_field(default_factory=dict)

    @property
    def spaces(self):
        return self.joint.spaces

    @property
    def eigenvalues(self):
        return self.joint.eigenvalues

    def is_diagonalizable(self):
        return self.joint.is_diagonalizable()

    def psi_matrix(self):
        """Psi = sum g_i Psi_i over k, in sub coordinates."""
        f = self.field
        s = self.sub.dim
        out = Matrix.zeros(f, s)
        for g, P in zip(self.weights, self.psi_maps):
            out = out + P.map(f.from_const, f).scale(g)
        return out

    def level_matrices(self, space, level):
        """Constant matrices B_1..B_t spanning E^(level) / E^(level-1) (1-based)."""
        return [self.to_matrix(v) for v in space.levels[level - 1]]

    def to_matrix(self, coords):
        ring = self.sub.closed_basis[0].ring
        n = self.sub.closed_basis[0].nrows
        out = Matrix.zeros(ring, n)
        for c, B in zip(coords, self.sub.closed_basis):
            if c:
                out = out + B.scale(c)
        return out

    def minimal_polynomial(self):
        """Factored minimal polynomial of Psi: list of (eigenvalue, multiplicity),
        multiplicity being the nilpotency index of Psi - lambda on the space."""
        f = self.field
        Psi = self.psi_matrix()
        out = []
        s = self.sub.dim
        for sp in self.spaces:
            basis = sp.flag(sp.length)
            N = Psi - Matrix.identity(f, s).scale(sp.value)
            vecs = [[f.from_const(a) for a in v] for v in basis]
            idx = 0
            while vecs and any(any(x) for x in vecs):
                vecs = [N.apply(v) for v in vecs]
                idx += 1
            out.append((sp.value, idx))
        return out


def _is_lower_triangular(M):
    return all(i >= j for i, j in M.nonzero_positions())


def adjoint_action(A_diag, sub, check=True):
    """Psi = [., A_diag] on the off-diagonal algebra ``sub``, split into joint
    characteristic spaces with their flags."""
    field = A_diag.ring
    tower = field.tower
    wn = wei_norman(A_diag)
    mats = wn.matrices
    if check:
        for i in range(len(mats)):
            for j in range(i + 1, len(mats)):
                Z = mats[i].bracket(mats[j])
                if not Z.is_zero():
                    raise DiagonalNotAbelian((i, j, Z.to_strings()))
    s = sub.dim
    if s == 0:
        return AdjointDecomposition(field, sub, list(wn.coefficients), mats, [], _empty_joint(), {})
    if not mats:
        # A_diag = 0: Psi vanishes
        zero = Matrix.zeros(tower, s)
        joint = joint_characteristic_spaces([zero], [field.zero], field, [[tower.zero]])
        return AdjointDecomposition(field, sub, [field.zero], [Matrix.zeros(tower, sub.closed_basis[0].nrows)],
                                    [zero], joint, {})
    coords = _BasisCoords(sub.closed_basis)
    psi = []
    for D in mats:
        cols = []
        for B in sub.closed_basis:
            c = coords(B.bracket(D))
            if c is None:
                raise ArithmeticError("[B, A_diag] left the off-diagonal algebra")
            cols.append(c)
        psi.append(Matrix(tower, [list(r) for r in zip(*cols)]))
    cands = None
    if all(_is_lower_triangular(D) for D in mats):
        cands = []
        for D in mats:
            d = [D.rows[a][a] for a in range(D.nrows)]
            diffs = []
            for a in d:
                for b in d:
                    v = a - b
                    if v not in diffs:
                        diffs.append(v)
            cands.append(diffs)
    joint = joint_characteristic_spaces(psi, list(wn.coefficients), field, cands)
    joint.spaces.sort(key=_ratio_key(joint.spaces))
    out = AdjointDecomposition(field, sub, list(wn.coefficients), mats, psi, joint, {})
    if check and cands is not None:
        diag_entries = [A_diag.rows[a][a] for a in range(A_diag.nrows)]
        for sp in joint.spaces:
            if not any(sp.value == a - b for a in diag_entries for b in diag_entries):
                raise ArithmeticError(f"eigenvalue {sp.value} is not a difference of diagonal entries")
    return out


def _ratio_key(spaces):
    """Sort key placing eigenvalues that are rational multiples of a common
    reference in increasing order of the multiple; others follow by text."""
    ref = None
    for sp in sorted(spaces, key=lambda s: str(s.eigen)):
        if any(sp.eigen):
            ref = sp.eigen
            break

    def ratio(eigen):
        if ref is None:
            return (0, 0, "")
        q = None
        for a, b in zip(eigen, ref):
            if b:
                r = a / b
                if not r.is_rational():
                    return (1, 0, str(eigen))
                q = r.to_fraction() if q is None else q
                if r.to_fraction() != q:
                    return (1, 0, str(eigen))
            elif a:
                return (1, 0, str(eigen))
        return (0, q, "")

    return lambda sp: ratio(sp.eigen)


def _empty_joint():
    from .matrix import JointDecomposition

    return JointDecomposition([], [], [])


# -- Jordan parts and envelope dimension -------------------------------------------


def jordan_parts(M, candidates=None, with_eigenvalues=False):
    """(S, N) with M = S + N, S semisimple, N nilpotent, [S, N] = 0."""
    ring = M.ring
    n = M.nrows
    if candidates is None and _is_lower_triangular(M):
        candidates = []
        for a in range(n):
            if M.rows[a][a] not in candidates:
                candidates.append(M.rows[a][a])
    dec = joint_characteristic_spaces([M], [None], None, None if candidates is None else [candidates])
    cols, vals = [], []
    for sp in dec.spaces:
        for v in sp.flag(sp.length):
            cols.append(v)
            vals.append(sp.eigen[0])
    T = Matrix(ring, [list(r) for r in zip(*cols)])
    S = T * Matrix.diag(ring, vals) * T.inverse()
    if with_eigenvalues:
        return S, M - S, [sp.eigen[0] for sp in dec.spaces]
    return S, M - S


def _rational_coordinates(values):
    """Q-linear coordinates: returns a list of rows, one per (tower key, parameter
    monomial), such that integer relations among ``values`` are exactly the common
    kernel of the rows."""
    keys = set()
    for v in values:
        keys |= set(v.terms)
    rows = []
    for key in sorted(keys):
        parts = [v.terms.get(key) for v in values]
        den = None
        for p in parts:
            if p is not None:
                den = p.den if den is None else (den * p.den) // den.gcd(p.den)
        by_mono = {}
        for j, p in enumerate(parts):
            if p is None:
                continue
            nm = p.num * (den // p.den)
            for mono, cf in nm.to_dict().items():
                from fractions import Fraction

                by_mono.setdefault(mono, {})[j] = Fraction(int(cf.p), int(cf.q)) if hasattr(cf, "p") else Fraction(int(cf))
        for mono in sorted(by_mono):
            rows.append([by_mono[mono].get(j, 0) for j in range(len(values))])
    return rows


def envelope_dimension(basis):
    """Dimension of the algebraic envelope of an abelian Lie algebra given by a
    basis of commuting constant matrices: Q-rank of the joint eigenvalue data of
    the semisimple parts plus the dimension of the span of the nilpotent parts."""
    if not basis:
        return 0
    from fractions import Fraction

    from .constants import ConstantTower

    ring = basis[0].ring
    n = basis[0].nrows
    parts = [jordan_parts(M, with_eigenvalues=True) for M in basis]
    semis = [S for S, _, _ in parts]
    nils = [N for _, N, _ in parts]
    cands = [ev for _, _, ev in parts]
    joint = joint_characteristic_spaces(semis, [None] * len(semis), None, cands)
    # a character is an integer vector over the joint spaces; it kills the torus
    # iff sum_j m_j eigen_i(j) = 0 for every i
    rows = []
    for i in range(len(semis)):
        vals = [sp.eigen[i] for sp in joint.spaces]
        rows.extend(_rational_coordinates(vals))
    qrows = [[Fraction(a) for a in r] for r in rows if any(r)]
    torus = 0
    if qrows:
        Q = ConstantTower()
        torus = len(rref(Matrix(Q, [[Q(a) for a in r] for r in qrows]))[1])
    sp = Span(ring, n * n)
    nil = sum(1 for N in nils if not N.is_zero() and sp.add(N.vec()))
    return torus + nil
