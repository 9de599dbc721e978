"""Exact dense matrices over the constants C or over k = C(x).

A ``ring`` is anything with ``zero``, ``one`` and a coercing ``__call__``: a
:class:`ConstantTower` for constant matrices or a :class:`RationalFunctionField`
for matrices over k. Elimination always takes the first nonzero entry of a column
as pivot, so every basis produced here is deterministic.
"""

from dataclasses import dataclass, field as dc_field
from fractions import Fraction

from .errors import (EigenvalueOutsideTower, NonCommuting, NotOffDiagonal,
                     SingularGauge)


class Matrix:
    __slots__ = ("ring", "rows", "nrows", "ncols")

    def __init__(self, ring, rows):
        self.ring = ring
        self.rows = [list(r) for r in rows]
        self.nrows = len(self.rows)
        self.ncols = len(self.rows[0]) if self.rows else 0

    # -- constructors ---------------------------------------------------------

    @classmethod
    def from_rows(cls, ring, rows):
        return cls(ring, [[ring(v) for v in r] for r in rows])

    @classmethod
    def zeros(cls, ring, n, m=None):
        m = n if m is None else m
        z = ring.zero
        return cls(ring, [[z] * m for _ in range(n)])

    @classmethod
    def identity(cls, ring, n):
        out = cls.zeros(ring, n)
        for i in range(n):
            out.rows[i][i] = ring.one
        return out

    @classmethod
    def diag(cls, ring, entries):
        entries = [ring(e) for e in entries]
        out = cls.zeros(ring, len(entries))
        for i, e in enumerate(entries):
            out.rows[i][i] = e
        return out

    @classmethod
    def block_diag(cls, ring, blocks):
        n = sum(b.nrows for b in blocks)
        out = cls.zeros(ring, n)
        off = 0
        for b in blocks:
            for i in range(b.nrows):
                out.rows[off + i][off:off + b.ncols] = b.rows[i]
            off += b.nrows
        return out

    @classmethod
    def from_vec(cls, ring, v, n, m=None):
        m = n if m is None else m
        return cls(ring, [list(v[i * m:(i + 1) * m]) for i in range(n)])

    # -- basic protocol ---------------------------------------------------------

    @property
    def shape(self):
        return (self.nrows, self.ncols)

    def is_square(self):
        return self.nrows == self.ncols

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def copy(self):
        return Matrix(self.ring, self.rows)

    def with_entry(self, i, j, v):
        out = self.copy()
        out.rows[i][j] = self.ring(v)
        return out

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.shape == other.shape and all(
            a == b for ra, rb in zip(self.rows, other.rows) for a, b in zip(ra, rb))

    def __hash__(self):
        return hash(tuple(tuple(r) for r in self.rows))

    def is_zero(self):
        return not any(v for r in self.rows for v in r)

    def nonzero_positions(self):
        return [(i, j) for i, r in enumerate(self.rows) for j, v in enumerate(r) if v]

    def vec(self):
        """Row-major vectorization."""
        return [v for r in self.rows for v in r]

    def map(self, fn, ring=None):
        return Matrix(ring or self.ring, [[fn(v) for v in r] for r in self.rows])

    def convert(self, ring):
        return self.map(ring, ring)

    def transpose(self):
        return Matrix(self.ring, [list(c) for c in zip(*self.rows)]) if self.rows else self

    T = property(transpose)

    def submatrix(self, r0, r1, c0, c1):
        return Matrix(self.ring, [r[c0:c1] for r in self.rows[r0:r1]])

    def set_block(self, r0, c0, block):
        out = self.copy()
        for i in range(block.nrows):
            out.rows[r0 + i][c0:c0 + block.ncols] = block.rows[i]
        return out

    # -- arithmetic ------------------------------------------------------------

    def __neg__(self):
        return Matrix(self.ring, [[-v for v in r] for r in self.rows])

    def __add__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")
        return Matrix(self.ring, [[a + b if b else a for a, b in zip(ra, rb)]
                                  for ra, rb in zip(self.rows, other.rows)])

    def __sub__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")
        return Matrix(self.ring, [[a - b if b else a for a, b in zip(ra, rb)]
                                  for ra, rb in zip(self.rows, other.rows)])

    def scale(self, s):
        if not s:
            return Matrix.zeros(self.ring, self.nrows, self.ncols)
        return Matrix(self.ring, [[v * s if v else v for v in r] for r in self.rows])

    def __mul__(self, other):
        if isinstance(other, Matrix):
            return self.matmul(other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def __matmul__(self, other):
        return self.matmul(other)

    def matmul(self, other):
        if self.ncols != other.nrows:
            raise ValueError(f"cannot multiply {self.shape} by {other.shape}")
        z = self.ring.zero
        # sparse rows of the right factor
        right = [[(j, v) for j, v in enumerate(r) if v] for r in other.rows]
        out = []
        for r in self.rows:
            acc = {}
            for k, a in enumerate(r):
                if not a:
                    continue
                for j, b in right[k]:
                    t = a * b
                    prev = acc.get(j)
                    acc[j] = t if prev is None else prev + t
            row = [z] * other.ncols
            for j, v in acc.items():
                row[j] = v
            out.append(row)
        return Matrix(self.ring, out)

    def apply(self, v):
        z = self.ring.zero
        out = []
        for r in self.rows:
            acc = z
            for a, b in zip(r, v):
                if a and b:
                    acc = acc + a * b
            out.append(acc)
        return out

    def __pow__(self, n):
        out = Matrix.identity(self.ring, self.nrows)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def bracket(self, other):
        """Commutator [self, other] = self*other - other*self."""
        return self * other - other * self

    def derive(self):
        return Matrix(self.ring, [[v.derive() if v else v for v in r] for r in self.rows])

    def inverse(self):
        if not self.is_square():
            raise SingularGauge("non-square matrix")
        n = self.nrows
        aug = Matrix(self.ring, [r + [self.ring.one if i == j else self.ring.zero for j in range(n)]
                                 for i, r in enumerate(self.rows)])
        red, piv = rref(aug)
        if piv[:n] != list(range(n)):
            raise SingularGauge("matrix is singular")
        return red.submatrix(0, n, n, 2 * n)

    def rank(self):
        return len(rref(self)[1])

    def trace(self):
        out = self.ring.zero
        for i in range(min(self.nrows, self.ncols)):
            out = out + self.rows[i][i]
        return out

    def __str__(self):
        return "[" + ",\n ".join("[" + ", ".join(str(v) for v in r) + "]" for r in self.rows) + "]"

    def __repr__(self):
        return f"Matrix({self.nrows}x{self.ncols})"

    def to_strings(self):
        return [[str(v) for v in r] for r in self.rows]


# -- elimination -------------------------------------------------------------


def rref(M):
    """Reduced row echelon form; returns (R, pivot_columns)."""
    rows = [list(r) for r in M.rows]
    pivots = []
    r = 0
    for c in range(M.ncols):
        p = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        inv = rows[r][c].inverse() if hasattr(rows[r][c], "inverse") else 1 / rows[r][c]
        rows[r] = [v * inv if v else v for v in rows[r]]
        piv = rows[r]
        nz = [j for j in range(c, M.ncols) if piv[j]]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                f = rows[i][c]
                ri = rows[i]
                for j in nz:
                    ri[j] = ri[j] - f * piv[j]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return Matrix(M.ring, rows) if rows else Matrix(M.ring, []), pivots


def kernel_basis(M):
    """Basis of the right kernel, one vector per free column (in column order)."""
    red, piv = rref(M)
    ring = M.ring
    free = [c for c in range(M.ncols) if c not in set(piv)]
    out = []
    for f in free:
        v = [ring.zero] * M.ncols
        v[f] = ring.one
        for i, p in enumerate(piv):
            if red.rows[i][f]:
                v[p] = -red.rows[i][f]
        out.append(v)
    return out


def solve(M, b):
    """One solution of M v = b, or None."""
    aug = Matrix(M.ring, [r + [bi] for r, bi in zip(M.rows, b)])
    red, piv = rref(aug)
    if M.ncols in piv:
        return None
    v = [M.ring.zero] * M.ncols
    for i, p in enumerate(piv):
        v[p] = red.rows[i][M.ncols]
    return v


class Span:
    """Subspace of ring^n kept in reduced echelon form for membership and
    coordinate queries."""

    def __init__(self, ring, n, vectors=()):
        self.ring = ring
        self.n = n
        self.basis = []      # echelon rows, normalized at pivot
        self.pivots = []
        self.original = []   # inserted vectors that were independent
        self._coord = []     # echelon row k = sum coord[k][j] * original[j]
        for v in vectors:
            self.add(v)

    def __len__(self):
        return len(self.original)

    @property
    def dim(self):
        return len(self.original)

    def _reduce(self, v):
        v = list(v)
        coord = {}
        for k, (row, p) in enumerate(zip(self.basis, self.pivots)):
            f = v[p]
            if f:
                for j in range(p, self.n):
                    if row[j]:
                        v[j] = v[j] - f * row[j]
                coord[k] = f
        return v, coord

    def contains(self, v):
        r, _ = self._reduce(v)
        return not any(r)

    def add(self, v):
        """Insert ``v``; returns True if it enlarged the span."""
        r, coord = self._reduce(v)
        p = next((j for j, a in enumerate(r) if a), None)
        if p is None:
            return False
        inv = r[p].inverse()
        r = [a * inv if a else a for a in r]
        # express the new echelon row in terms of originals
        m = len(self.original)
        combo = [self.ring.zero] * (m + 1)
        combo[m] = inv
        for k, f in coord.items():
            for j, c in enumerate(self._coord[k]):
                if c:
                    combo[j] = combo[j] - inv * f * c
        for row_c in self._coord:
            row_c.append(self.ring.zero)
        # keep full reduction: eliminate new pivot from existing rows
        for k, row in enumerate(self.basis):
            f = row[p]
            if f:
                self.basis[k] = [a - f * b if b else a for a, b in zip(row, r)]
                self._coord[k] = [a - f * b if b else a for a, b in zip(self._coord[k], combo)]
        pos = next((k for k, q in enumerate(self.pivots) if q > p), len(self.pivots))
        self.basis.insert(pos, r)
        self.pivots.insert(pos, p)
        self._coord.insert(pos, combo)
        self.original.append(list(v))
        return True

    def coordinates(self, v):
        """Coefficients of ``v`` on the inserted (original) vectors, or None."""
        r, coord = self._reduce(v)
        if any(r):
            return None
        out = [self.ring.zero] * len(self.original)
        for k, f in coord.items():
            for j, c in enumerate(self._coord[k]):
                if c:
                    out[j] = out[j] + f * c
        return out

    def echelon(self):
        return [list(r) for r in self.basis]


def independent_subset(ring, vectors):
    """Indices of a maximal independent prefix-greedy subset."""
    sp = Span(ring, len(vectors[0]) if vectors else 0)
    return [i for i, v in enumerate(vectors) if sp.add(v)]


# -- polynomials of matrices -------------------------------------------------------


def minimal_polynomial(M):
    """Monic minimal polynomial as a coefficient list, low degree first."""
    if not M.is_square():
        raise ValueError("minimal polynomial of a non-square matrix")
    ring = M.ring
    n = M.nrows
    sp = Span(ring, n * n)
    power = Matrix.identity(ring, n)
    sp.add(power.vec())
    for d in range(1, n + 1):
        power = power * M
        c = sp.coordinates(power.vec())
        if c is not None:
            return [-a for a in c] + [ring.one]
        sp.add(power.vec())
    raise ArithmeticError("minimal polynomial degree exceeds the dimension")


def poly_mul(ring, a, b):
    if not a or not b:
        return []
    out = [ring.zero] * (len(a) + len(b) - 1)
    for i, u in enumerate(a):
        for j, v in enumerate(b):
            if u and v:
                out[i + j] = out[i + j] + u * v
    return out


def poly_from_roots(ring, roots):
    """prod (X - r) for r in ``roots`` (with repetition) as a coefficient list."""
    out = [ring.one]
    for r in roots:
        out = poly_mul(ring, out, [-ring(r), ring.one])
    return out


def poly_eval_matrix(coeffs, M):
    out = Matrix.zeros(M.ring, M.nrows)
    for a in reversed(coeffs):
        out = out * M + Matrix.identity(M.ring, M.nrows).scale(a)
    return out


# -- joint characteristic spaces ---------------------------------------------------


@dataclass
class CharacteristicSpace:
    """One joint generalized eigenspace with its flag.

    ``levels[l]`` is a basis of a complement of E^(l) in E^(l+1) (0-based), so the
    flag E^(1) <= ... <= E^(m) has E^(l) spanned by levels[0..l-1]."""

    eigen: tuple          # constant eigenvalue of each map
    value: object         # sum_i g_i * eigen_i, an element of k
    levels: list = dc_field(default_factory=list)

    @property
    def length(self):
        return len(self.levels)

    @property
    def dim(self):
        return sum(len(l) for l in self.levels)

    def flag(self, level):
        """Basis of E^(level), 1-based."""
        return [v for l in self.levels[:level] for v in l]


@dataclass
class JointDecomposition:
    maps: list
    weights: list
    spaces: list

    @property
    def eigenvalues(self):
        return [s.value for s in self.spaces]

    def is_diagonalizable(self):
        return all(s.length <= 1 for s in self.spaces)


def _restrict(M, basis_span, basis):
    """Matrix of M on an invariant subspace, in coordinates of ``basis``."""
    cols = []
    for v in basis:
        c = basis_span.coordinates(M.apply(v))
        if c is None:
            raise ArithmeticError("subspace is not invariant")
        cols.append(c)
    return Matrix(M.ring, [list(r) for r in zip(*cols)]) if cols else Matrix(M.ring, [])


def _generalized_kernel(N, basis):
    """Vectors of span(basis) annihilated by a power of N (ambient coordinates)."""
    ring = N.ring
    n = N.nrows
    if not basis:
        return []
    power = N ** n
    # solve power * (sum a_j b_j) = 0 for a
    images = [power.apply(b) for b in basis]
    A = Matrix(ring, [list(r) for r in zip(*images)])
    out = []
    for a in kernel_basis(A):
        v = [ring.zero] * n
        for aj, b in zip(a, basis):
            if aj:
                v = [x + aj * y if y else x for x, y in zip(v, b)]
        out.append(v)
    return out


def _candidate_roots(minpoly, ring):
    """Roots of a constant minimal polynomial found without factoring over the
    tower: only available when the coefficients are rational."""
    import flint

    if not all(a.is_rational() for a in minpoly):
        return None, minpoly
    q = flint.fmpq_poly([flint.fmpq(f.numerator, f.denominator)
                         for f in (a.to_fraction() for a in minpoly)])
    roots, leftover = [], []
    for f, _ in q.factor()[1]:
        if f.degree() == 1:
            c = [Fraction(int(a.p), int(a.q)) for a in f.coeffs()]
            roots.append(ring(-c[0] / c[1]))
        else:
            leftover.append(f)
    return roots, leftover


def joint_characteristic_spaces(maps, weights, field=None, candidates=None):
    """Split the space into joint generalized eigenspaces of commuting constant maps.

    ``candidates`` optionally lists candidate constant eigenvalues per map; every
    candidate is verified by a kernel computation and the dimensions must add up.
    """
    if not maps:
        raise ValueError("at least one map is required")
    for i in range(len(maps)):
        for j in range(i + 1, len(maps)):
            if not maps[i].bracket(maps[j]).is_zero():
                raise NonCommuting(i, j)
    ring = maps[0].ring
    n = maps[0].nrows
    std = [[ring.one if a == b else ring.zero for b in range(n)] for a in range(n)]
    pieces = [((), std)]
    for idx, M in enumerate(maps):
        cands = None if candidates is None else candidates[idx]
        if cands is None:
            mp = minimal_polynomial(M)
            cands, leftover = _candidate_roots(mp, ring)
            if cands is None:
                raise EigenvalueOutsideTower(_poly_text(mp))
        cands = _dedupe(cands)
        nxt = []
        for key, basis in pieces:
            found = 0
            for lam in cands:
                N = M - Matrix.identity(ring, n).scale(lam)
                sub = _generalized_kernel(N, basis)
                if sub:
                    nxt.append((key + (lam,), sub))
                    found += len(sub)
            if found != len(basis):
                raise EigenvalueOutsideTower(_remaining_factor(M, basis, cands))
        pieces = nxt
    spaces = []
    for key, basis in pieces:
        value = None
        if field is not None:
            value = field.zero
            for g, lam in zip(weights, key):
                value = value + g * field.from_const(lam)
        nils = [M - Matrix.identity(ring, n).scale(lam) for M, lam in zip(maps, key)]
        spaces.append(CharacteristicSpace(key, value, _flag(nils, basis, ring, n)))
    if field is not None:
        spaces.sort(key=lambda s: _eigen_sort_key(s.eigen))
    return JointDecomposition(list(maps), list(weights), spaces)


def _dedupe(vals):
    out = []
    for v in vals:
        if v not in out:
            out.append(v)
    return out


def _eigen_sort_key(eigen):
    out = []
    for lam in eigen:
        if lam.is_rational():
            out.append((0, lam.to_fraction(), ""))
        else:
            out.append((1, Fraction(0), str(lam)))
    return tuple(out)


def _flag(nils, basis, ring, n):
    """Joint kernel filtration E^(l) = {v : every length-l product of the N_i kills v}
    inside span(basis); returns complement bases per level."""
    levels = []
    prev = Span(ring, n)
    total = len(basis)
    words = [Matrix.identity(ring, n)]
    while prev.dim < total:
        words = _dedupe_mats([N * W for W in words for N in nils])
        # v = sum a_j b_j with W v = 0 for all words W
        rows = []
        for W in words:
            imgs = [W.apply(b) for b in basis]
            rows.extend(list(r) for r in zip(*imgs))
        A = Matrix(ring, rows)
        ker = kernel_basis(A)
        vecs = []
        for a in ker:
            v = [ring.zero] * n
            for aj, b in zip(a, basis):
                if aj:
                    v = [x + aj * y if y else x for x, y in zip(v, b)]
            vecs.append(v)
        # echelonize the level space, then take a greedy complement of the previous one
        ech = Span(ring, n, vecs).echelon()
        new = [v for v in ech if prev.add(v)]
        if not new:
            raise ArithmeticError("flag failed to grow")
        levels.append(new)
    return levels


def _dedupe_mats(ms):
    out = []
    for m in ms:
        if not m.is_zero() and m not in out:
            out.append(m)
    return out or ms[:1]


def _poly_text(coeffs):
    from .ratfunc import join_terms, product_text

    pieces = []
    for k in range(len(coeffs) - 1, -1, -1):
        a = coeffs[k]
        if a:
            mon = "" if k == 0 else ("X" if k == 1 else f"X^{k}")
            pieces.append(product_text(str(a), mon))
    return join_terms(pieces)


def _remaining_factor(M, basis, cands):
    """Minimal polynomial of M on span(basis) with the found linear factors removed."""
    ring = M.ring
    n = M.nrows
    sp = Span(ring, n, basis)
    R = _restrict(M, sp, sp.original)
    mp = minimal_polynomial(R)
    for lam in cands:
        while True:
            # synthetic division by (X - lam)
            q, acc = [], ring.zero
            for a in reversed(mp):
                acc = acc * lam + a
                q.append(acc)
            if acc:
                break
            mp = list(reversed(q[:-1]))
            if len(mp) == 1:
                break
    return _poly_text(mp)


# -- nilpotent exp/log on the off-diagonal slot ----------------------------------


def check_lower_block(B, top):
    """Support check: only rows >= top and columns < top may be nonzero."""
    for i, j in B.nonzero_positions():
        if not (i >= top and j < top):
            raise NotOffDiagonal(f"entry ({i}, {j}) lies outside the lower-left block")


def nilpotent_exp(B, top):
    check_lower_block(B, top)
    return Matrix.identity(B.ring, B.nrows) + B


def nilpotent_log(P, top):
    B = P - Matrix.identity(P.ring, P.nrows)
    check_lower_block(B, top)
    return B
