"""The constant field C: rational functions in formal parameters, extended by a
tower of monogenic algebraic layers.

An element of the tower is stored as a sparse dict mapping an exponent vector
``(e_1, ..., e_r)`` with ``0 <= e_j < deg_j`` to a coefficient in Q(parameters).
Products are reduced top layer first with the (monic) minimal polynomials, so the
representation is canonical and equality is a dict comparison.
"""

from fractions import Fraction
from functools import cached_property

import flint

from .errors import DivisionByZero, NonInvertibleAlgebraic, ParseError
from . import expr


class ParamFrac:
    """Element of Q(p_1, ..., p_k): coprime numerator/denominator in Z[p], with the
    denominator's leading coefficient positive."""

    __slots__ = ("num", "den")

    def __init__(self, num, den):
        self.num = num
        self.den = den

    @staticmethod
    def make(num, den):
        if den.is_zero():
            raise DivisionByZero(f"({num})/0")
        if num.is_zero():
            return ParamFrac(num, den.context().from_dict({(0,) * den.context().nvars(): 1}))
        if not den.is_one():
            g = num.gcd(den)
            if not g.is_one():
                num = num // g
                den = den // g
        if den.leading_coefficient() < 0:
            num, den = -num, -den
        return ParamFrac(num, den)

    def is_zero(self):
        return self.num.is_zero()

    def __bool__(self):
        return not self.num.is_zero()

    def __eq__(self, other):
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((str(self.num), str(self.den)))

    def __neg__(self):
        return ParamFrac(-self.num, self.den)

    def __add__(self, other):
        if self.num.is_zero():
            return other
        if other.num.is_zero():
            return self
        if self.den == other.den:
            if self.den.is_one():
                return ParamFrac(self.num + other.num, self.den)
            return ParamFrac.make(self.num + other.num, self.den)
        n1, d1, n2, d2 = self.num, self.den, other.num, other.den
        g = d1.gcd(d2)
        if g.is_one():
            num, den = n1 * d2 + n2 * d1, d1 * d2
        else:
            # only factors of g can cancel
            d1g, d2g = d1 // g, d2 // g
            num, den = n1 * d2g + n2 * d1g, d1 * d2g
            if num.is_zero():
                return ParamFrac.make(num, den)
            h = num.gcd(g)
            if not h.is_one():
                num, den = num // h, den // h
        if den.leading_coefficient() < 0:
            num, den = -num, -den
        return ParamFrac(num, den)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if self.num.is_zero():
            return self
        if other.num.is_zero():
            return other
        n1, d1, n2, d2 = self.num, self.den, other.num, other.den
        if d1.is_one() and d2.is_one():
            return ParamFrac(n1 * n2, d1)
        g1 = n1.gcd(d2)
        g2 = n2.gcd(d1)
        if not g1.is_one():
            n1, d2 = n1 // g1, d2 // g1
        if not g2.is_one():
            n2, d1 = n2 // g2, d1 // g2
        num, den = n1 * n2, d1 * d2
        if den.leading_coefficient() < 0:
            num, den = -num, -den
        return ParamFrac(num, den)

    def inverse(self):
        if self.num.is_zero():
            raise DivisionByZero("0")
        num, den = self.den, self.num
        if den.leading_coefficient() < 0:
            num, den = -num, -den
        return ParamFrac(num, den)

    def __truediv__(self, other):
        return self * other.inverse()

    def is_rational(self):
        return self.num.is_constant() and self.den.is_constant()

    def to_fraction(self):
        nv = self.num.context().nvars()
        z = (0,) * nv
        return Fraction(int(self.num.coefficient(0)) if nv == 0 else int(self.num.to_dict().get(z, 0)),
                        int(self.den.coefficient(0)) if nv == 0 else int(self.den.to_dict()[z]))

    def __str__(self):
        from .ratfunc import atomic, factor_text

        n = str(self.num)
        if self.den.is_one():
            return n
        d = str(self.den)
        return f"{factor_text(n)}/{d if atomic(d) else f'({d})'}"

    __repr__ = __str__


class ConstantTower:
    """Q(parameters)[a_1]/(mu_1)[a_2]/(mu_2)... with formal parameters at the bottom.

    ``generators`` is a sequence of ``(name, minpoly)`` pairs; ``minpoly`` is an
    expression string in ``name`` whose coefficients live in the tower built so far,
    e.g. ``("i", "i^2 + 1")``. Irreducibility is trusted, not checked.
    """

    def __init__(self, parameters=(), generators=()):
        self.parameters = tuple(parameters)
        names = list(self.parameters)
        self._ctx = flint.fmpz_mpoly_ctx.get(tuple(self.parameters), "lex")
        self._pzero = ParamFrac(self._ctx.from_dict({}), self._ctx.from_dict({(0,) * len(self.parameters): 1}))
        self._pone = ParamFrac(self._pzero.den, self._pzero.den)
        self.generator_names = []
        self.degrees = []
        self.minpoly_text = []
        # low-order coefficients mu_0..mu_{d-1} of each monic minimal polynomial,
        # each as a term dict over the lower layers (padded to full length later)
        self._minpolys = []
        for name, poly in generators:
            if name in names or name == "x":
                raise ParseError(f"duplicate symbol {name!r}")
            names.append(name)
            self._add_layer(name, poly)
        self._rank = len(self.degrees)

    # -- construction -----------------------------------------------------

    def _add_layer(self, name, poly):
        from .ratfunc import poly_from_expr  # local: ratfunc imports this module

        partial = _PartialTower(self)
        coeffs = poly_from_expr(poly, partial, name)
        if len(coeffs) < 2:
            raise ParseError(f"minimal polynomial of {name} must have degree >= 1")
        lead = coeffs[-1]
        coeffs = [c * lead.inverse() for c in coeffs]
        self.generator_names.append(name)
        self.degrees.append(len(coeffs) - 1)
        self.minpoly_text.append(str(poly))
        self._minpolys.append([dict(c.terms) for c in coeffs[:-1]])
        # pad existing term dicts to the new exponent length
        r = len(self.degrees)
        self._minpolys = [[{e + (0,) * (r - len(e)): v for e, v in c.items()} for c in mp]
                          for mp in self._minpolys]
        # cached unit elements were built with the shorter exponent length
        self.__dict__.pop("zero", None)
        self.__dict__.pop("one", None)

    # -- element constructors --------------------------------------------------

    @property
    def rank(self):
        return self._rank

    def _zero_exp(self):
        return (0,) * len(self.degrees)

    @cached_property
    def zero(self):
        return Const(self, {})

    @cached_property
    def one(self):
        return Const(self, {self._zero_exp(): self._pone})

    def from_fraction(self, q):
        q = Fraction(q)
        if q == 0:
            return self.zero
        ctx = self._ctx
        z = (0,) * len(self.parameters)
        return Const(self, {self._zero_exp(): ParamFrac.make(ctx.from_dict({z: q.numerator}),
                                                             ctx.from_dict({z: q.denominator}))})

    def param(self, name):
        k = self.parameters.index(name)
        ctx = self._ctx
        e = [0] * len(self.parameters)
        e[k] = 1
        return Const(self, {self._zero_exp(): ParamFrac(ctx.from_dict({tuple(e): 1}), self._pone.den)})

    def gen(self, name):
        j = self.generator_names.index(name)
        e = tuple(1 if t == j else 0 for t in range(len(self.degrees)))
        return Const(self, self._reduce({e: self._pone}))

    def symbols(self):
        return list(self.parameters) + list(self.generator_names)

    def symbol_env(self):
        env = {p: self.param(p) for p in self.parameters}
        env.update({g: self.gen(g) for g in self.generator_names})
        return env

    def __call__(self, value):
        """Coerce an int, Fraction, expression string or Const into the tower."""
        if isinstance(value, Const):
            if value.tower is not self:
                raise ValueError("constant belongs to a different tower")
            return value
        if isinstance(value, (int, Fraction)):
            return self.from_fraction(value)
        if isinstance(value, str):
            return self.parse(value)
        raise TypeError(f"cannot coerce {value!r} into the constant tower")

    def parse(self, text):
        return expr.evaluate(expr.parse(text), self.symbol_env(), self.from_fraction,
                             what="constant")

    def describe(self):
        return {
            "parameters": list(self.parameters),
            "generators": [{"name": n, "minpoly": t}
                           for n, t in zip(self.generator_names, self.minpoly_text)],
        }

    def __repr__(self):
        gens = ", ".join(self.generator_names)
        return f"ConstantTower(parameters={self.parameters}, generators=[{gens}])"

    # -- arithmetic on term dicts --------------------------------------------------

    def _reduce(self, terms):
        degs = self.degrees
        for j in range(len(degs) - 1, -1, -1):
            d = degs[j]
            mp = self._minpolys[j]
            while True:
                pending = [e for e in terms if e[j] >= d]
                if not pending:
                    break
                for e in pending:
                    c = terms.pop(e)
                    shift = e[j] - d
                    for k, mu in enumerate(mp):
                        for em, cm in mu.items():
                            e2 = tuple(a + b for a, b in zip(e, em))
                            e2 = e2[:j] + (shift + k,) + e2[j + 1:]
                            v = terms.get(e2)
                            t = -(c * cm)
                            v = t if v is None else v + t
                            if v:
                                terms[e2] = v
                            else:
                                terms.pop(e2, None)
        return terms

    def _add(self, a, b):
        if not a:
            return dict(b)
        out = dict(a)
        for e, c in b.items():
            v = out.get(e)
            if v is None:
                out[e] = c
            else:
                v = v + c
                if v:
                    out[e] = v
                else:
                    del out[e]
        return out

    def _mul(self, a, b):
        if not a or not b:
            return {}
        out = {}
        overflow = False
        degs = self.degrees
        for ea, ca in a.items():
            for eb, cb in b.items():
                e = tuple(x + y for x, y in zip(ea, eb))
                if not overflow:
                    for x, d in zip(e, degs):
                        if x >= d:
                            overflow = True
                            break
                v = out.get(e)
                t = ca * cb
                v = t if v is None else v + t
                if v:
                    out[e] = v
                else:
                    out.pop(e, None)
        return self._reduce(out) if overflow else out

    def _scale(self, a, c):
        if not c:
            return {}
        return {e: v * c for e, v in a.items()}

    def _inv(self, terms, level):
        """Inverse of an element involving only generators below ``level``."""
        if not terms:
            raise DivisionByZero("0")
        if level == 0:
            ((e, c),) = terms.items()
            return {e: c.inverse()}
        j = level - 1
        parts = {}
        for e, c in terms.items():
            parts.setdefault(e[j], {})[e[:j] + (0,) + e[j + 1:]] = c
        if set(parts) == {0}:
            return self._inv(parts[0], j)
        d = self.degrees[j]
        mp = self._minpolys[j]
        if d == 2:
            # (u + v a)^-1 = (u - p v - v a) / (u^2 - p u v + q v^2) for a^2 + p a + q = 0
            u = parts.get(0, {})
            v = parts.get(1, {})
            q, p = mp[0], mp[1]
            pv = self._mul(p, v)
            norm = self._add(self._add(self._mul(u, u), self._scale(self._mul(pv, u), -self._pone)),
                             self._mul(q, self._mul(v, v)))
            if not norm:
                raise NonInvertibleAlgebraic(self.generator_names[j],
                                             self._factor_text(j, [u, v]))
            ninv = self._inv(norm, j)
            first = self._add(u, self._scale(pv, -self._pone))
            out = self._mul(first, ninv)
            ea = tuple(1 if t == j else 0 for t in range(len(self.degrees)))
            second = self._mul({ea: -self._pone}, self._mul(v, ninv))
            return self._add(out, second)
        return self._inv_euclid(parts, j)

    def _inv_euclid(self, parts, j):
        """Extended Euclid in K_j[X] modulo the minimal polynomial of layer j."""
        d = self.degrees[j]
        one = {self._zero_exp(): self._pone}
        mu = [dict(c) for c in self._minpolys[j]] + [one]
        a = [parts.get(k, {}) for k in range(d)]

        def trim(p):
            while p and not p[-1]:
                p.pop()
            return p

        def sub(p, q):
            n = max(len(p), len(q))
            out = [self._add(p[k] if k < len(p) else {},
                             self._scale(q[k], -self._pone) if k < len(q) else {}) for k in range(n)]
            return trim(out)

        def mulp(p, q):
            if not p or not q:
                return []
            out = [{} for _ in range(len(p) + len(q) - 1)]
            for s, cp in enumerate(p):
                if not cp:
                    continue
                for t, cq in enumerate(q):
                    if cq:
                        out[s + t] = self._add(out[s + t], self._mul(cp, cq))
            return trim(out)

        def divmod_(p, q):
            p = list(p)
            inv_lead = self._inv(q[-1], j)
            quo = [{} for _ in range(max(len(p) - len(q) + 1, 1))]
            while len(p) >= len(q) and p:
                c = self._mul(p[-1], inv_lead)
                k = len(p) - len(q)
                quo[k] = c
                p = sub(p, [{}] * k + [self._mul(c, qq) for qq in q])
            return trim(quo), p

        r0, r1 = trim(mu), trim(a)
        s0, s1 = [], [one]
        while len(r1) > 1:
            qt, rem = divmod_(r0, r1)
            r0, r1 = r1, rem
            s0, s1 = s1, sub(s0, mulp(qt, s1))
        if not r1:
            raise NonInvertibleAlgebraic(self.generator_names[j], self._factor_text(j, r0))
        inv_c = self._inv(r1[0], j)
        out = {}
        for k, c in enumerate(s1):
            if not c:
                continue
            ek = tuple(k if t == j else 0 for t in range(len(self.degrees)))
            out = self._add(out, self._mul({ek: self._pone}, self._mul(c, inv_c)))
        return self._reduce(out)

    def _factor_text(self, j, coeffs):
        name = self.generator_names[j]
        pieces = []
        for k, c in enumerate(coeffs):
            if c:
                pieces.append(f"({Const(self, dict(c))})*{name}^{k}")
        return " + ".join(pieces) or "0"


class _PartialTower:
    """The tower restricted to the layers built so far, used while adding a layer."""

    def __init__(self, tower):
        self.tower = tower

    def symbol_env(self):
        t = self.tower
        env = {p: t.param(p) for p in t.parameters}
        for g in t.generator_names:
            env[g] = t.gen(g)
        return env

    def from_fraction(self, q):
        return self.tower.from_fraction(q)

    @property
    def zero(self):
        return self.tower.zero

    @property
    def one(self):
        return self.tower.one


class Const:
    """An element of a :class:`ConstantTower`. Immutable."""

    __slots__ = ("tower", "terms", "_hash")

    def __init__(self, tower, terms):
        self.tower = tower
        self.terms = terms
        self._hash = None

    # coercion helper
    def _c(self, other):
        if isinstance(other, Const):
            if other.tower is not self.tower:
                if _same_shape(other.tower, self.tower):
                    return Const(self.tower, other.terms)
                raise ValueError("mixing constants from different towers")
            return other
        if isinstance(other, (int, Fraction)):
            return self.tower.from_fraction(other)
        return NotImplemented

    def is_zero(self):
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        o = self._c(other)
        if o is NotImplemented:
            return NotImplemented
        return self.terms == o.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def __neg__(self):
        return Const(self.tower, {e: -c for e, c in self.terms.items()})

    def __add__(self, other):
        o = self._c(other)
        if o is NotImplemented:
            return NotImplemented
        if not o.terms:
            return self
        if not self.terms:
            return o
        return Const(self.tower, self.tower._add(self.terms, o.terms))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._c(other)
        if o is NotImplemented:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._c(other)
        if o is NotImplemented:
            return NotImplemented
        return Const(self.tower, self.tower._mul(self.terms, o.terms))

    __rmul__ = __mul__

    def inverse(self):
        if not self.terms:
            raise DivisionByZero("0")
        t = self.tower
        return Const(t, t._inv(self.terms, len(t.degrees)))

    def __truediv__(self, other):
        o = self._c(other)
        if o is NotImplemented:
            return NotImplemented
        if not o.terms:
            raise DivisionByZero(f"{self}/0")
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, n):
        if not isinstance(n, int):
            raise TypeError("integer exponents only")
        if n < 0:
            return self.inverse() ** (-n)
        out = self.tower.one
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    # -- inspection ------------------------------------------------------

    def is_rational(self):
        """True when the element lies in Q (no parameters, no generators)."""
        if not self.terms:
            return True
        if len(self.terms) != 1:
            return False
        (e, c), = self.terms.items()
        return not any(e) and c.is_rational()

    def to_fraction(self):
        if not self.terms:
            return Fraction(0)
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        (c,) = self.terms.values()
        return c.to_fraction()

    def is_integer(self):
        return self.is_rational() and self.to_fraction().denominator == 1

    def coordinates(self):
        """Coordinates over Q(parameters) in the power basis of the generators."""
        return dict(self.terms)

    def sort_key(self):
        return str(self)

    def __str__(self):
        from .ratfunc import join_terms, product_text

        names = self.tower.generator_names
        pieces = []
        for e in sorted(self.terms, reverse=True):
            mon = "*".join(n if k == 1 else f"{n}^{k}" for n, k in zip(names, e) if k)
            pieces.append(product_text(str(self.terms[e]), mon))
        return join_terms(pieces)

    def __repr__(self):
        return f"Const({self})"


def _same_shape(t1, t2):
    return (t1.parameters == t2.parameters and t1.generator_names == t2.generator_names
            and t1.minpoly_text == t2.minpoly_text)
