"""Sparse multivariate polynomials and fractions over the constant tower, used for
Hamiltonians and their vector fields. Fractions are not gcd-reduced; equality
cross-multiplies."""

from fractions import Fraction

from .constants import Const
from .errors import DivisionByZero, MalformedHamiltonian, ParseError
from . import expr


class MPoly:
    __slots__ = ("tower", "nvars", "terms")

    def __init__(self, tower, nvars, terms):
        self.tower = tower
        self.nvars = nvars
        self.terms = {e: c for e, c in terms.items() if c}

    @classmethod
    def const(cls, tower, nvars, c):
        return cls(tower, nvars, {(0,) * nvars: tower(c)})

    @classmethod
    def var(cls, tower, nvars, k):
        e = [0] * nvars
        e[k] = 1
        return cls(tower, nvars, {tuple(e): tower.one})

    def _lift(self, other):
        if isinstance(other, MPoly):
            return other
        if isinstance(other, (int, Fraction, Const)):
            return MPoly.const(self.tower, self.nvars, other)
        return NotImplemented

    def __bool__(self):
        return bool(self.terms)

    def is_constant(self):
        return all(not any(e) for e in self.terms)

    def __eq__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return NotImplemented
        return self.terms == o.terms

    def __neg__(self):
        return MPoly(self.tower, self.nvars, {e: -c for e, c in self.terms.items()})

    def __add__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return NotImplemented
        out = dict(self.terms)
        for e, c in o.terms.items():
            out[e] = out[e] + c if e in out else c
        return MPoly(self.tower, self.nvars, out)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return NotImplemented
        out = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in o.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                t = c1 * c2
                out[e] = out[e] + t if e in out else t
        return MPoly(self.tower, self.nvars, out)

    __rmul__ = __mul__

    def __pow__(self, n):
        out = MPoly.const(self.tower, self.nvars, 1)
        for _ in range(n):
            out = out * self
        return out

    def diff(self, k):
        out = {}
        for e, c in self.terms.items():
            if e[k]:
                e2 = e[:k] + (e[k] - 1,) + e[k + 1:]
                out[e2] = c * e[k]
        return MPoly(self.tower, self.nvars, out)

    def evaluate(self, values, one):
        """Evaluate at ``values`` (any ring supporting + and *); ``one`` is its unit."""
        cache = {}
        total = None
        for e, c in self.terms.items():
            term = one * c
            for k, a in enumerate(e):
                if a:
                    key = (k, a)
                    if key not in cache:
                        cache[key] = values[k] ** a
                    term = term * cache[key]
            total = term if total is None else total + term
        return total if total is not None else one * 0

    def to_text(self, names):
        from .ratfunc import join_terms, product_text

        pieces = []
        for e in sorted(self.terms, key=lambda e: (-sum(e), tuple(-a for a in e))):
            mon = "*".join(n if a == 1 else f"{n}^{a}" for n, a in zip(names, e) if a)
            pieces.append(product_text(str(self.terms[e]), mon))
        return join_terms(pieces)


class MFrac:
    """num/den with MPoly parts; no canonical form."""

    __slots__ = ("num", "den")

    def __init__(self, num, den):
        if not den:
            raise DivisionByZero("polynomial denominator is zero")
        self.num = num
        self.den = den

    def _lift(self, other):
        if isinstance(other, MFrac):
            return other
        if isinstance(other, MPoly):
            return MFrac(other, MPoly.const(other.tower, other.nvars, 1))
        if isinstance(other, (int, Fraction, Const)):
            t, n = self.num.tower, self.num.nvars
            return MFrac(MPoly.const(t, n, other), MPoly.const(t, n, 1))
        return NotImplemented

    def __bool__(self):
        return bool(self.num)

    def __eq__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return NotImplemented
        return self.num * o.den == o.num * self.den

    def __neg__(self):
        return MFrac(-self.num, self.den)

    def __add__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return NotImplemented
        if self.den == o.den:
            return MFrac(self.num + o.num, self.den)
        return MFrac(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return NotImplemented
        return MFrac(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return NotImplemented
        if not o.num:
            raise DivisionByZero("division by the zero rational function")
        return MFrac(self.num * o.den, self.den * o.num)

    def __rtruediv__(self, other):
        return self._lift(other) / self

    def __pow__(self, n):
        if n < 0:
            return MFrac(self.den ** (-n), self.num ** (-n))
        return MFrac(self.num ** n, self.den ** n)

    def diff(self, k):
        if self.den.is_constant():
            return MFrac(self.num.diff(k), self.den)
        return MFrac(self.num.diff(k) * self.den - self.num * self.den.diff(k), self.den * self.den)

    def evaluate(self, values, one):
        d = self.den.evaluate(values, one)
        if not d:
            raise DivisionByZero("denominator vanishes at the evaluation point")
        return self.num.evaluate(values, one) / d

    def simplified(self):
        """Cancel a single-term denominator into the numerator as far as possible."""
        if len(self.den.terms) != 1:
            return self
        (e, c), = self.den.terms.items()
        inv = c.inverse()
        common = [min([e[k]] + [f[k] for f in self.num.terms]) for k in range(len(e))]
        shift = lambda f: tuple(a - b for a, b in zip(f, common))
        num = MPoly(self.num.tower, self.num.nvars,
                    {shift(f): a * inv for f, a in self.num.terms.items()})
        den = MPoly(self.den.tower, self.den.nvars, {shift(e): self.den.tower.one})
        return MFrac(num, den)

    def to_text(self, names):
        f = self.simplified()
        n = f.num.to_text(names)
        if f.den.is_constant() and f.den.terms[(0,) * f.den.nvars] == 1:
            return n
        d = f.den.to_text(names)
        n = n if len(f.num.terms) == 1 and not n.startswith("-") else f"({n})"
        return f"{n}/({d})" if len(f.den.terms) > 1 or "*" in d else f"{n}/{d}"


def parse_mfrac(text, tower, names):
    """Parse an expression in the variables ``names`` over the tower."""
    nv = len(names)
    env = {k: MFrac(MPoly.const(tower, nv, v), MPoly.const(tower, nv, 1))
           for k, v in tower.symbol_env().items()}
    for k, name in enumerate(names):
        if name in env:
            raise ParseError(f"variable {name!r} clashes with a constant symbol")
        env[name] = MFrac(MPoly.var(tower, nv, k), MPoly.const(tower, nv, 1))

    def lift(q):
        return MFrac(MPoly.const(tower, nv, q), MPoly.const(tower, nv, 1))

    try:
        node = expr.parse(text)
    except ParseError as e:
        raise MalformedHamiltonian(str(e)) from None
    try:
        return expr.evaluate(node, env, lift, what="Hamiltonian")
    except ParseError as e:
        raise MalformedHamiltonian(str(e)) from None
