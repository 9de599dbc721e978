"""Linear differential operators over k = C(x) and their rational solutions.

Rational solutions follow the usual two-step scheme: a universal denominator built
from the integer roots of local indicial equations at the singular factors, then
polynomial solutions of the transformed operator with a degree bound from the
indicial equation at infinity. Singular factors come from a gcd-free basis of the
squarefree parts of the coefficients, so no factorization over the tower is needed.
"""

from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from math import comb

import flint

from .errors import AllZero, Cancelled, DegreeCapExceeded
from .matrix import Matrix, Span, kernel_basis, solve
from .ratfunc import Poly, RatFunc, hermite_reduce, poly_gcd, squarefree_factorization

DEFAULT_DEGREE_CAP = 50


class CancelToken:
    """Cooperative cancellation flag checked inside long loops."""

    def __init__(self):
        self.cancelled = False

    def cancel(self):
        self.cancelled = True

    def check(self):
        if self.cancelled:
            raise Cancelled("computation cancelled")


def _check(token):
    if token is not None:
        token.check()


class DiffOperator:
    """sum_i a_i D^i with a_i in k, coefficients stored low to high."""

    def __init__(self, field, coeffs):
        c = [field(a) for a in coeffs]
        while c and not c[-1]:
            c.pop()
        if not c:
            raise ValueError("the zero operator has no order")
        self.field = field
        self.coeffs = c

    @classmethod
    def derivation(cls, field):
        return cls(field, [0, 1])

    @classmethod
    def first_order(cls, field, lam):
        """D - lam."""
        return cls(field, [-field(lam), 1])

    @property
    def order(self):
        return len(self.coeffs) - 1

    def __call__(self, y):
        out = self.field.zero
        d = y
        for k, a in enumerate(self.coeffs):
            if k:
                d = d.derive()
            if a:
                out = out + a * d
        return out

    def __mul__(self, other):
        """Ore product: (self * other)(y) = self(other(y))."""
        f = self.field
        out = [f.zero] * (self.order + other.order + 1)
        for i, a in enumerate(self.coeffs):
            if not a:
                continue
            for j, b in enumerate(other.coeffs):
                bd = b
                for k in range(i, -1, -1):
                    # a * C(i, i-k) * b^(i-k) * D^(j+k)
                    if bd:
                        out[j + k] = out[j + k] + a * bd * comb(i, i - k)
                    bd = bd.derive()
        return DiffOperator(f, out)

    def monic(self):
        inv = self.coeffs[-1].inverse()
        return DiffOperator(self.field, [a * inv for a in self.coeffs])

    def scale_left(self, r):
        return DiffOperator(self.field, [r * a for a in self.coeffs])

    def polynomial_coefficients(self):
        """Coefficients as polynomials after clearing denominators, content removed."""
        den = Poly(self.field.tower, [self.field.tower.one])
        for a in self.coeffs:
            den = _lcm(den, a.den)
        polys = [(a * RatFunc(self.field, den, Poly(den.tower, [den.tower.one]))).num
                 for a in self.coeffs]
        g = None
        for p in polys:
            if p:
                g = p if g is None else poly_gcd(g, p)
        if g is not None and g.degree() > 0:
            polys = [p.exact_div(g) for p in polys]
        return polys

    def __eq__(self, other):
        return isinstance(other, DiffOperator) and self.coeffs == other.coeffs

    def __str__(self):
        from .ratfunc import join_terms, product_text

        pieces = []
        for k in range(len(self.coeffs) - 1, -1, -1):
            a = self.coeffs[k]
            if a:
                mon = "" if k == 0 else ("D" if k == 1 else f"D^{k}")
                pieces.append(product_text(str(a), mon))
        return join_terms(pieces)

    __repr__ = __str__

    def to_strings(self):
        return [str(a) for a in self.coeffs]


def _lcm(a, b):
    if a.degree() <= 0:
        return b.monic()
    if b.degree() <= 0:
        return a.monic()
    g = poly_gcd(a, b)
    return (a.exact_div(g) * b).monic()


# -- C-linear algebra on rational functions ---------------------------------------


def coefficient_vectors(funcs):
    """(denominator, vectors): each f = (sum_k v[k] x^k) / denominator, with the
    vectors padded to a common length. C-linear relations among the f are exactly
    those among the vectors."""
    if not funcs:
        return None, []
    tower = funcs[0].field.tower
    den = Poly(tower, [tower.one])
    for f in funcs:
        den = _lcm(den, f.den)
    nums = [f.num * den.exact_div(f.den) for f in funcs]
    n = max([len(p.c) for p in nums] + [1])
    return den, [p.c + [tower.zero] * (n - len(p.c)) for p in nums]


def independent_functions(funcs):
    """Indices of a C-basis among ``funcs`` (first-come greedy)."""
    nz = [f for f in funcs if f]
    if not nz:
        return []
    tower = nz[0].field.tower
    _, vecs = coefficient_vectors(funcs)
    sp = Span(tower, len(vecs[0]))
    return [i for i, v in enumerate(vecs) if sp.add(v)]


def express_in(funcs, target):
    """Constants c with sum c_i funcs[i] = target, or None."""
    if not target:
        return [funcs[0].field.tower.zero] * len(funcs) if funcs else []
    if not funcs:
        return None
    tower = target.field.tower
    _, vecs = coefficient_vectors(list(funcs) + [target])
    *cols, b = vecs
    M = Matrix(tower, [list(r) for r in zip(*cols)])
    return solve(M, b)


# -- integer roots of polynomials with coefficients in the tower ------------------


def integer_roots(coeffs):
    """Integer roots of sum coeffs[k] X^k (coefficients in the tower). Returns None
    if the polynomial is identically zero."""
    if not any(coeffs):
        return None
    tower = next(c for c in coeffs if c).tower
    ctx = tower._ctx
    keys = set()
    for c in coeffs:
        keys |= set(c.terms)
    g = None
    for key in sorted(keys):
        parts = [c.terms.get(key) for c in coeffs]
        den = None
        for p in parts:
            if p is not None:
                den = p.den if den is None else _mpoly_lcm(den, p.den)
        nums = [None if p is None else p.num * (den // p.den) for p in parts]
        by_mono = {}
        for k, nm in enumerate(nums):
            if nm is None:
                continue
            for mono, cf in nm.to_dict().items():
                by_mono.setdefault(mono, {})[k] = int(cf)
        for mono, row in by_mono.items():
            poly = flint.fmpz_poly([row.get(k, 0) for k in range(len(coeffs))])
            if poly.is_zero():
                continue
            g = poly if g is None else g.gcd(poly)
    if g is None:
        return None
    roots = []
    if g.degree() < 1:
        return roots
    for f, _ in g.factor()[1]:
        if f.degree() == 1:
            a, b = int(f[0]), int(f[1])
            if a % b == 0:
                roots.append(-a // b)
    roots = sorted(set(roots))
    # symbolic verification
    out = []
    for r in roots:
        v = tower.zero
        for c in reversed(coeffs):
            v = v * r + c
        if not v:
            out.append(r)
    return out


def _mpoly_lcm(a, b):
    return (a * b) // a.gcd(b)


# -- rational solutions ----------------------------------------------------------


class Solutions(list):
    """List of solutions with a ``meta`` dict (degree bounds, cap use)."""

    def __init__(self, items=(), meta=None):
        super().__init__(items)
        self.meta = meta or {}


def _gcd_free_basis(polys):
    """Pairwise coprime squarefree polynomials such that every input factors over them."""
    basis = []
    for p in polys:
        for f, _ in squarefree_factorization(p):
            pending = [f]
            while pending:
                q = pending.pop()
                if q.degree() <= 0:
                    continue
                for idx, b in enumerate(basis):
                    g = poly_gcd(q, b)
                    if g.degree() > 0:
                        basis.pop(idx)
                        for piece in (g, b.exact_div(g), q.exact_div(g)):
                            if piece.degree() > 0:
                                pending.append(piece.monic())
                        break
                else:
                    basis.append(q.monic())
    return basis


def _valuation(p, g):
    v = 0
    while p:
        q, r = divmod(p, g)
        if r:
            break
        p = q
        v += 1
    return v, p


def _falling(ring_one, k):
    """Coefficients (low to high) of e(e-1)...(e-k+1)."""
    out = [ring_one]
    for j in range(k):
        # multiply by (e - j)
        nxt = [ring_one * 0] * (len(out) + 1)
        for i, c in enumerate(out):
            nxt[i + 1] = nxt[i + 1] + c
            nxt[i] = nxt[i] - c * j
        out = nxt
    return out


def _indicial_at(polys, g):
    """Indicial polynomial coefficients (in e) at the roots of squarefree g, as the
    determinant of multiplication by I(e) in C[x]/(g)."""
    tower = g.tower
    vals = []
    for p in polys:
        if p:
            v, rest = _valuation(p, g)
            vals.append((v, rest))
        else:
            vals.append(None)
    mu = min(v - i for i, vr in enumerate(vals) if vr is not None for v in [vr[0]])
    terms = {}
    # near a root a of g, g ~ g'(a) (x - a), so p_i contributes rest_i * g'^(v_i)
    dg = g.deriv()
    for i, vr in enumerate(vals):
        if vr is None or vr[0] - i != mu:
            continue
        lead = (vr[1] * dg ** i) % g
        for k, c in enumerate(_falling(tower.one, i)):
            if c:
                terms[k] = terms.get(k, Poly(tower, [])) + lead.scale(c)
    deg_e = max(terms)
    coeffs_e = [terms.get(k, Poly(tower, [])) for k in range(deg_e + 1)]
    d = g.degree()
    if d == 1:
        return [c(-g.c[0]) if c else tower.zero for c in coeffs_e]
    # det of sum_k e^k Mult(coeffs_e[k]) is a polynomial in e of degree <= d*deg_e;
    # evaluate at integer points and interpolate.
    npts = d * deg_e + 1
    xs = list(range(npts))
    ys = []
    for e in xs:
        elem = Poly(tower, [])
        for k, c in enumerate(coeffs_e):
            elem = elem + c.scale(tower(e ** k))
        elem = elem % g
        cols = []
        basis_elem = Poly(tower, [tower.one])
        for j in range(d):
            prod = (elem * basis_elem) % g
            cols.append(prod.c + [tower.zero] * (d - len(prod.c)))
            basis_elem = basis_elem.shift(1)
        M = Matrix(tower, [list(r) for r in zip(*cols)])
        ys.append(_det(M))
    return _interpolate(tower, xs, ys)


def _det(M):
    n = M.nrows
    rows = [list(r) for r in M.rows]
    det = M.ring.one
    for c in range(n):
        p = next((i for i in range(c, n) if rows[i][c]), None)
        if p is None:
            return M.ring.zero
        if p != c:
            rows[c], rows[p] = rows[p], rows[c]
            det = -det
        piv = rows[c][c]
        det = det * piv
        inv = piv.inverse()
        for i in range(c + 1, n):
            if rows[i][c]:
                f = rows[i][c] * inv
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[c])]
    return det


def _interpolate(tower, xs, ys):
    """Coefficients of the polynomial through (xs, ys), low to high."""
    n = len(xs)
    out = [tower.zero] * n
    for i in range(n):
        if not ys[i]:
            continue
        basis = [tower.one]
        denom = Fraction(1)
        for j in range(n):
            if j == i:
                continue
            nxt = [tower.zero] * (len(basis) + 1)
            for k, c in enumerate(basis):
                nxt[k + 1] = nxt[k + 1] + c
                nxt[k] = nxt[k] - c * xs[j]
            basis = nxt
            denom *= xs[i] - xs[j]
        scale = ys[i] * Fraction(1) / tower(denom)
        for k, c in enumerate(basis):
            out[k] = out[k] + c * scale
    return out


def _indicial_at_infinity(polys):
    tower = next(p for p in polys if p).tower
    M = max(p.degree() - i for i, p in enumerate(polys) if p)
    out = {}
    for i, p in enumerate(polys):
        if p and p.degree() - i == M:
            for k, c in enumerate(_falling(tower.one, i)):
                if c:
                    out[k] = out.get(k, tower.zero) + p.lc() * c
    return [out.get(k, tower.zero) for k in range(max(out) + 1)]


def universal_denominator(L):
    polys = L.polynomial_coefficients()
    tower = L.field.tower
    lead = polys[-1]
    U = Poly(tower, [tower.one])
    bounds = []
    if lead.degree() <= 0:
        return U, bounds
    basis = _gcd_free_basis([p for p in polys if p and p.degree() > 0])
    for g in basis:
        if lead % g:
            continue
        roots = integer_roots(_indicial_at(polys, g))
        if roots is None:
            raise DegreeCapExceeded(f"indicial equation at {g} vanishes identically")
        neg = [-r for r in roots if r < 0]
        if neg:
            N = max(neg)
            U = U * g ** N
            bounds.append((str(g), N))
    return U, bounds


def polynomial_solutions(L, cap=DEFAULT_DEGREE_CAP, token=None, meta=None):
    """C-basis of polynomial solutions of L."""
    polys = L.polynomial_coefficients()
    tower = L.field.tower
    roots = integer_roots(_indicial_at_infinity(polys))
    if roots is None:
        bound = cap
        if meta is not None:
            meta["degree_cap_used"] = cap
    else:
        nonneg = [r for r in roots if r >= 0]
        if not nonneg:
            return []
        bound = max(nonneg)
        if bound > cap:
            raise DegreeCapExceeded(f"degree bound {bound} exceeds the cap {cap}")
    if meta is not None:
        meta["degree_bound"] = bound
    field = L.field
    # images of monomials x^j
    images = []
    x = field.x
    mono = field.one
    for j in range(bound + 1):
        _check(token)
        images.append(L(mono))
        mono = mono * x
    den, vecs = coefficient_vectors(images)
    if den is None:
        return []
    M = Matrix(tower, [list(r) for r in zip(*vecs)])
    out = []
    for v in kernel_basis(M):
        out.append(field.from_poly(Poly(tower, v)))
    return out


def _transform(L, U):
    """Operator z -> L(z / U), multiplied through to polynomial coefficients."""
    field = L.field
    invU = RatFunc.make(field, Poly(U.tower, [U.tower.one]), U)
    derivs = [invU]
    for _ in range(L.order):
        derivs.append(derivs[-1].derive())
    out = [field.zero] * (L.order + 1)
    for i, a in enumerate(L.coeffs):
        if not a:
            continue
        for k in range(i + 1):
            out[k] = out[k] + a * derivs[i - k] * comb(i, k)
    return DiffOperator(field, out)


def rational_solutions(L, cap=DEFAULT_DEGREE_CAP, token=None):
    """C-basis of the rational solutions of L, each verified by substitution."""
    meta = {}
    U, bounds = universal_denominator(L)
    meta["denominator"] = str(U)
    meta["pole_bounds"] = bounds
    Lt = _transform(L, U) if U.degree() > 0 else L
    polys = polynomial_solutions(Lt, cap, token, meta)
    field = L.field
    out = []
    for z in polys:
        y = z / field.from_poly(U) if U.degree() > 0 else z
        if L(y):
            raise ArithmeticError(f"rational solution {y} failed verification")
        out.append(y)
    return Solutions(out, meta)


# -- annihilators and the parametrized first-order problem -------------------------


def annihilator_from_functions(funcs):
    """Monic operator of order dim span_C(funcs) whose solution space is that span."""
    if not funcs or not any(funcs):
        raise AllZero("every function is zero")
    field = funcs[0].field
    idx = independent_functions(funcs)
    basis = [funcs[i] for i in idx]
    r = len(basis)
    # rows: b, b', ..., b^(r)
    derivs = []
    for b in basis:
        ds = [b]
        for _ in range(r):
            ds.append(ds[-1].derive())
        derivs.append(ds)
    # solve sum_{j<r} a_j b^(j) = -b^(r) for each basis function
    M = Matrix(field, [[ds[j] for j in range(r)] for ds in derivs])
    rhs = [-ds[r] for ds in derivs]
    sol = solve(M, rhs)
    if sol is None:
        raise ArithmeticError("Wronskian system is singular")
    return DiffOperator(field, list(sol) + [field.one])


@dataclass
class ParamSolution:
    g: RatFunc
    c: list


@dataclass
class ParamSolutionBasis:
    lam: RatFunc
    b: list
    items: list = dc_field(default_factory=list)
    meta: dict = dc_field(default_factory=dict)

    def __len__(self):
        return len(self.items)

    def __iter__(self):
        return iter(self.items)

    def c_rank(self):
        """Dimension of the achievable constant vectors c."""
        if not self.items:
            return 0
        tower = self.lam.field.tower
        sp = Span(tower, len(self.b))
        for it in self.items:
            if any(it.c):
                sp.add(it.c)
        return sp.dim

    def verify(self):
        for it in self.items:
            rhs = self.lam * it.g
            for ci, bi in zip(it.c, self.b):
                if ci:
                    rhs = rhs + bi * ci
            if it.g.derive() != rhs:
                return False
        return True


def parametrized_first_order(lam, bs, cap=DEFAULT_DEGREE_CAP, token=None):
    """Basis of {(g, c) : g' = lam g + sum c_i b_i, g in k, c in C^t}."""
    field = lam.field
    tower = field.tower
    bs = [field(b) for b in bs]
    t = len(bs)
    zero_c = [tower.zero] * t
    D_lam = DiffOperator.first_order(field, lam)
    out = ParamSolutionBasis(lam, bs)
    idx = independent_functions(bs) if any(bs) else []
    if not idx:
        sols = rational_solutions(D_lam, cap, token)
        out.items = [ParamSolution(g, list(zero_c)) for g in sols]
        out.meta = sols.meta
    else:
        basis = [bs[i] for i in idx]
        L = annihilator_from_functions(basis) * D_lam
        sols = rational_solutions(L, cap, token)
        out.meta = sols.meta
        for g in sols:
            r = g.derive() - lam * g
            coords = express_in(basis, r)
            if coords is None:
                raise ArithmeticError("solution of the composed operator is not in the span")
            c = list(zero_c)
            for i, ci in zip(idx, coords):
                c[i] = ci
            out.items.append(ParamSolution(g, c))
    # relations among the b's give solutions with g = 0
    if t and any(bs):
        _, vecs = coefficient_vectors(bs)
        M = Matrix(tower, [list(r) for r in zip(*vecs)])
        for v in kernel_basis(M):
            out.items.append(ParamSolution(field.zero, list(v)))
    elif t:
        for i in range(t):
            c = list(zero_c)
            c[i] = tower.one
            out.items.append(ParamSolution(field.zero, c))
    return out


def first_order_rational_solution(lam, b, cap=DEFAULT_DEGREE_CAP, token=None):
    """Some rational solution of y' = lam y + b, or None."""
    field = lam.field
    b = field(b)
    if not b:
        return field.zero
    basis = parametrized_first_order(lam, [b], cap, token)
    for it in basis:
        if it.c[0]:
            return it.g / field.from_const(it.c[0])
    return None


def rational_primitive(b):
    """g in k with g' = b, or None when b has a nonzero residue."""
    g, h = hermite_reduce(b)
    if h:
        return None
    return g
