"""Brute-force ansatz oracle for rational solutions over Q(x).

A candidate y = N(x) / S(x)^E with S the squarefree part of the possible pole locus
and deg N bounded; the unknown coefficients of N (and the constants c) solve a
linear system over Q, done here with flint matrices rather than the package's own
kernel.
"""

from fractions import Fraction

import flint

from mrsreduce.ratfunc import Poly


def to_fmpq_poly(p):
    return flint.fmpq_poly([flint.fmpq(f.numerator, f.denominator)
                            for f in (a.to_fraction() for a in p.c)])


def from_fmpq_poly(field, q):
    t = field.tower
    return field.from_poly(Poly(t, [t.from_fraction(Fraction(int(c.p), int(c.q)))
                                    for c in q.coeffs()]))


def squarefree_part(q):
    if q.degree() <= 0:
        return flint.fmpq_poly([1])
    g = q.gcd(q.derivative())
    return q // g


def nullspace(rows, ncols):
    """Rational nullspace basis of the matrix given by its rows."""
    if not rows:
        return [[Fraction(int(i == j)) for i in range(ncols)] for j in range(ncols)]
    M = flint.fmpq_mat(len(rows), ncols, [v for r in rows for v in r])
    R, rank = M.rref()
    pivots = []
    for i in range(rank):
        for j in range(ncols):
            if R[i, j] != 0:
                pivots.append(j)
                break
    free = [j for j in range(ncols) if j not in pivots]
    out = []
    for f in free:
        v = [flint.fmpq(0)] * ncols
        v[f] = flint.fmpq(1)
        for i, pj in enumerate(pivots):
            v[pj] = -R[i, f]
        out.append([Fraction(int(a.p), int(a.q)) for a in v])
    return out


def _coefficient_rows(images):
    """Rows of the linear system 'sum_j u_j images[j] = 0' over Q."""
    den = flint.fmpq_poly([1])
    for im in images:
        d = to_fmpq_poly(im.den)
        den = den * d // den.gcd(d)
    nums = []
    for im in images:
        q = to_fmpq_poly(im.num) * (den // to_fmpq_poly(im.den))
        nums.append(q.coeffs())
    deg = max((len(c) for c in nums), default=0)
    return [[c[k] if k < len(c) else flint.fmpq(0) for c in nums] for k in range(deg)]


def _ansatz(field, S, E, B):
    x = field.x
    base = from_fmpq_poly(field, S) ** E if S.degree() > 0 else field.one
    top = E * max(S.degree(), 0) + B
    return [x ** j / base for j in range(top + 1)]


def oracle_rational_solutions(L, E=4, B=6):
    """Q-basis of the rational solutions of L inside the ansatz."""
    field = L.field
    lead = to_fmpq_poly(L.coeffs[-1].num)
    dens = flint.fmpq_poly([1])
    for a in L.coeffs:
        dens = dens * to_fmpq_poly(a.den)
    # poles of solutions sit among zeros of the leading coefficient or coefficient poles
    S = squarefree_part(lead * dens)
    phis = _ansatz(field, S, E, B)
    rows = _coefficient_rows([L(p) for p in phis])
    out = []
    for v in nullspace(rows, len(phis)):
        y = field.zero
        for a, p in zip(v, phis):
            if a:
                y = y + p * a
        out.append(y)
    return out


def oracle_parametrized(lam, bs, E=4, B=6):
    """Basis of {(g, c) : g' = lam g + sum c_i b_i} inside the ansatz, as (g, [c])."""
    field = lam.field
    bs = [field(b) for b in bs]
    den = to_fmpq_poly(lam.den)
    for b in bs:
        den = den * to_fmpq_poly(b.den)
    S = squarefree_part(den)
    phis = _ansatz(field, S, E, B)
    images = [p.derive() - lam * p for p in phis] + [-b for b in bs]
    n = len(phis)
    rows = _coefficient_rows(images)
    out = []
    for v in nullspace(rows, n + len(bs)):
        g = field.zero
        for a, p in zip(v[:n], phis):
            if a:
                g = g + p * a
        out.append((g, list(v[n:])))
    return out


def rank_of(vectors, ncols):
    if not vectors:
        return 0
    M = flint.fmpq_mat(len(vectors), ncols,
                       [flint.fmpq(Fraction(a).numerator, Fraction(a).denominator)
                        for v in vectors for a in v])
    return M.rank()


def function_vectors(funcs):
    """Coefficient vectors of rational functions over a common denominator."""
    if not funcs:
        return [], 0
    rows = _coefficient_rows(funcs)
    vecs = [[Fraction(int(r[j].p), int(r[j].q)) for r in rows] for j in range(len(funcs))]
    return vecs, len(rows)
