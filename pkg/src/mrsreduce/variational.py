"""Hamiltonian vector fields, particular solutions, symmetric powers, the
linearized variational equations and the gauge action.

The order-p linearized variational equation is written on the monomials
xi^alpha, 1 <= |alpha| <= p, of the deviation xi from the curve: if
xi' = F(xi) = sum_beta F_beta(x) xi^beta is the Taylor expansion of X_H(phi + xi)
without its constant term, then

    (xi^alpha)' = sum_i alpha_i xi^(alpha - e_i) F_i(xi)   truncated at degree p.

Monomials are ordered by degree, heaviest block first, and inside one degree by
graded lexicographic order (heaviest in the first variable first). This gives the
block layout [[sym^p(A_1), 0], [S_p, A_(p-1)]].
"""

from math import comb
from functools import lru_cache

from .errors import CurveMismatch, DivisionByZero, MalformedHamiltonian, SingularGauge
from .matrix import Matrix
from .mpoly import MFrac, parse_mfrac
from .ratfunc import RatFunc


# -- monomial bases --------------------------------------------------------------


@lru_cache(maxsize=None)
def monomials(nvars, degree):
    """Exponent tuples of total ``degree`` in graded-lex order, heaviest first."""
    if nvars == 1:
        return ((degree,),)
    out = []
    for a in range(degree, -1, -1):
        for rest in monomials(nvars - 1, degree - a):
            out.append((a,) + rest)
    return tuple(out)


@lru_cache(maxsize=None)
def lve_basis(nvars, p):
    """Monomials of degrees p, p-1, ..., 1 in that order."""
    return tuple(e for d in range(p, 0, -1) for e in monomials(nvars, d))


def lve_size(nvars, p):
    return sum(comb(nvars + i - 1, nvars - 1) for i in range(1, p + 1))


# -- truncated Taylor jets in the deviation variables -----------------------------


class Jet:
    """Truncated multivariate power series with coefficients in k."""

    __slots__ = ("field", "nvars", "cap", "terms")

    def __init__(self, field, nvars, cap, terms):
        self.field = field
        self.nvars = nvars
        self.cap = cap
        self.terms = {e: c for e, c in terms.items() if c}

    @classmethod
    def scalar(cls, field, nvars, cap, c):
        return cls(field, nvars, cap, {(0,) * nvars: field(c)})

    def _lift(self, other):
        if isinstance(other, Jet):
            return other
        return Jet.scalar(self.field, self.nvars, self.cap, other)

    def __add__(self, other):
        o = self._lift(other)
        out = dict(self.terms)
        for e, c in o.terms.items():
            out[e] = out[e] + c if e in out else c
        return Jet(self.field, self.nvars, self.cap, out)

    __radd__ = __add__

    def __neg__(self):
        return Jet(self.field, self.nvars, self.cap, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Jet):
            c = self.field(other)
            return Jet(self.field, self.nvars, self.cap, {e: v * c for e, v in self.terms.items()})
        out = {}
        cap = self.cap
        items = [(e, sum(e), c) for e, c in other.terms.items()]
        for e1, c1 in self.terms.items():
            d1 = sum(e1)
            for e2, d2, c2 in items:
                if d1 + d2 > cap:
                    continue
                e = tuple(a + b for a, b in zip(e1, e2))
                t = c1 * c2
                out[e] = out[e] + t if e in out else t
        return Jet(self.field, self.nvars, cap, out)

    __rmul__ = __mul__

    def constant(self):
        return self.terms.get((0,) * self.nvars, self.field.zero)

    def inverse(self):
        b0 = self.constant()
        if not b0:
            raise DivisionByZero("the curve runs into a pole of the vector field")
        inv0 = b0.inverse()
        u = Jet(self.field, self.nvars, self.cap,
                {e: c * inv0 for e, c in self.terms.items() if any(e)})
        out = Jet.scalar(self.field, self.nvars, self.cap, 1)
        power = out
        for _ in range(self.cap):
            power = power * (-u)
            out = out + power
        return out * inv0

    def __truediv__(self, other):
        return self * self._lift(other).inverse()

    def __pow__(self, n):
        if n < 0:
            return self.inverse() ** (-n)
        out = Jet.scalar(self.field, self.nvars, self.cap, 1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def diff(self, k):
        out = {}
        for e, c in self.terms.items():
            if e[k]:
                out[e[:k] + (e[k] - 1,) + e[k + 1:]] = c * e[k]
        return Jet(self.field, self.nvars, self.cap - 1, out)

    def __bool__(self):
        return bool(self.terms)


# -- Hamiltonian systems -----------------------------------------------------------


class HamiltonianSystem:
    """H(q_1..q_n, p_1..p_n) over a constant tower and its field X_H = J grad H,
    ordered (q' components, then p' components)."""

    def __init__(self, tower, n, hamiltonian, names=None):
        self.tower = tower
        self.n = n
        self.names = list(names) if names else (
            [f"q{i + 1}" for i in range(n)] + [f"p{i + 1}" for i in range(n)])
        if len(self.names) != 2 * n:
            raise MalformedHamiltonian(f"expected {2 * n} variable names")
        self.text = str(hamiltonian)
        self.H = hamiltonian if isinstance(hamiltonian, MFrac) else parse_mfrac(
            hamiltonian, tower, self.names)
        self.vector_field = ([self.H.diff(n + i) for i in range(n)]
                             + [-self.H.diff(i) for i in range(n)])

    @property
    def dim(self):
        return 2 * self.n

    def vector_field_text(self):
        return [f.to_text(self.names) for f in self.vector_field]

    def is_first_integral_preserved(self):
        """X_H(H) = 0 symbolically."""
        total = MFrac(self.H.num * 0, self.H.den)
        for k in range(2 * self.n):
            total = total + self.H.diff(k) * self.vector_field[k]
        return not total

    def taylor(self, curve, cap):
        """Jets of X_H(phi + xi) truncated at degree ``cap``."""
        field = curve[0].field
        N = 2 * self.n
        jets = []
        for k in range(N):
            e = [0] * N
            e[k] = 1
            jets.append(Jet(field, N, cap + 1, {(0,) * N: curve[k], tuple(e): field.one}))
        one = Jet.scalar(field, N, cap + 1, 1)
        h = self.H.evaluate(jets, one)
        return [h.diff(self.n + i) for i in range(self.n)] + [-h.diff(i) for i in range(self.n)]

    def evaluate_field(self, curve):
        field = curve[0].field
        return [f.evaluate(curve, field.one) for f in self.vector_field]


def build_vector_field(tower, n, hamiltonian, names=None):
    return HamiltonianSystem(tower, n, hamiltonian, names)


def parse_curve(field, components):
    return [field.parse(c) if isinstance(c, str) else field(c) for c in components]


def verify_curve(system, curve):
    """(True, None) if phi' = X_H(phi), else (False, (index, residual)) for the
    first failing component (1-based index)."""
    if len(curve) != system.dim:
        raise CurveMismatch(0, f"expected {system.dim} components, got {len(curve)}")
    values = system.evaluate_field(curve)
    for k, (phi, v) in enumerate(zip(curve, values)):
        r = phi.derive() - v
        if r:
            return False, (k + 1, r)
    return True, None


def require_curve(system, curve):
    ok, witness = verify_curve(system, curve)
    if not ok:
        raise CurveMismatch(*witness)


# -- linear algebra on symmetric powers ---------------------------------------------


def sym_power(A, p):
    """Matrix of the derivation induced by Y' = AY on degree-p monomials."""
    N = A.nrows
    basis = monomials(N, p)
    index = {e: k for k, e in enumerate(basis)}
    out = Matrix.zeros(A.ring, len(basis))
    for r, alpha in enumerate(basis):
        row = out.rows[r]
        for i in range(N):
            if not alpha[i]:
                continue
            for j in range(N):
                a = A.rows[i][j]
                if not a:
                    continue
                beta = list(alpha)
                beta[i] -= 1
                beta[j] += 1
                c = index[tuple(beta)]
                row[c] = row[c] + a * alpha[i]
    return out


def _poly_mul(a, b, ring):
    out = {}
    for e1, c1 in a.items():
        for e2, c2 in b.items():
            e = tuple(x + y for x, y in zip(e1, e2))
            t = c1 * c2
            out[e] = out[e] + t if e in out else t
    return {e: c for e, c in out.items() if c}


def sym_power_gauge(P, p):
    """Matrix Q with (P xi)^alpha = sum_beta Q[alpha, beta] xi^beta, |alpha| = p."""
    if not P.is_square():
        raise SingularGauge("non-square gauge")
    N = P.nrows
    basis = monomials(N, p)
    index = {e: k for k, e in enumerate(basis)}
    ring = P.ring
    lin = []
    for i in range(N):
        terms = {}
        for j in range(N):
            if P.rows[i][j]:
                e = [0] * N
                e[j] = 1
                terms[tuple(e)] = P.rows[i][j]
        lin.append(terms)
    out = Matrix.zeros(ring, len(basis))
    for r, alpha in enumerate(basis):
        poly = {(0,) * N: ring.one}
        for i in range(N):
            for _ in range(alpha[i]):
                poly = _poly_mul(poly, lin[i], ring)
        for e, c in poly.items():
            out.rows[r][index[e]] = c
    return out


def sym_power_gauge_checked(P, p):
    Q = sym_power_gauge(P, p)
    P.inverse()  # raises SingularGauge
    return Q


# -- gauge action -----------------------------------------------------------------


def gauge_apply(P, A, P_inv=None):
    """P[A] = P A P^-1 + P' P^-1."""
    if P_inv is None:
        P_inv = P.inverse()
    return (P * A + P.derive()) * P_inv


def verify_gauge(A, P, B, inverse=False):
    """(ok, difference): whether P[A] = B, or P^-1[A] = B (that is, Y = P Z) when
    ``inverse`` is set. The difference is P[A] - B."""
    P_inv = P.inverse()
    got = gauge_apply(P_inv, A, P) if inverse else gauge_apply(P, A, P_inv)
    diff = got - B
    return diff.is_zero(), diff


class Gauge:
    """An invertible matrix over k together with its inverse."""

    def __init__(self, P, P_inv=None):
        self.P = P
        self.P_inv = P.inverse() if P_inv is None else P_inv

    @classmethod
    def identity(cls, ring, n):
        I = Matrix.identity(ring, n)
        return cls(I, I)

    def __mul__(self, other):
        return Gauge(self.P * other.P, other.P_inv * self.P_inv)

    def inverse(self):
        return Gauge(self.P_inv, self.P)

    def apply(self, A):
        return gauge_apply(self.P, A, self.P_inv)


# -- block systems ---------------------------------------------------------------


class BlockSystem:
    """LVE_p matrix with its block layout (diagonal block sizes top to bottom)."""

    def __init__(self, matrix, order, nvars):
        self.matrix = matrix
        self.order = order
        self.nvars = nvars
        self.sizes = [comb(nvars + d - 1, d) for d in range(order, 0, -1)]
        if sum(self.sizes) != matrix.nrows:
            raise ValueError("matrix size does not match the block layout")

    @property
    def top(self):
        """Size of the sym^p block, i.e. the row where the lower slot starts."""
        return self.sizes[0]

    @property
    def size(self):
        return self.matrix.nrows

    def with_matrix(self, M):
        return BlockSystem(M, self.order, self.nvars)

    def basis(self):
        return lve_basis(self.nvars, self.order)


def build_lve(system, curve, p, lower=None):
    """Block matrix of LVE_p along ``curve``. ``lower`` (the order p-1 system) is
    accepted for interface symmetry; the bottom-right block is rebuilt and checked
    against it when given."""
    field = curve[0].field
    N = system.dim
    F = system.taylor(curve, p)
    basis = lve_basis(N, p)
    index = {e: k for k, e in enumerate(basis)}
    zero = (0,) * N
    # linear-and-higher parts of the vector field, grouped by monomial
    parts = [[(e, c) for e, c in f.terms.items() if e != zero] for f in F]
    M = Matrix.zeros(field, len(basis))
    for r, alpha in enumerate(basis):
        row = M.rows[r]
        d = sum(alpha)
        for i in range(N):
            if not alpha[i]:
                continue
            lower_mon = list(alpha)
            lower_mon[i] -= 1
            for e, c in parts[i]:
                if d - 1 + sum(e) > p:
                    continue
                gamma = tuple(a + b for a, b in zip(lower_mon, e))
                col = index[gamma]
                row[col] = row[col] + c * alpha[i]
    out = BlockSystem(M, p, N)
    if lower is not None:
        t = out.top
        if M.submatrix(t, M.nrows, t, M.ncols) != lower.matrix:
            raise ArithmeticError("lower-order block does not match the supplied system")
    return out


def first_variational(system, curve):
    return build_lve(system, curve, 1).matrix
