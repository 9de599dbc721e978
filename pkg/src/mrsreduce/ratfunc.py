"""Univariate polynomials over the constant tower and the differential field
k = C(x) with d/dx.

Field elements keep a coprime numerator/denominator pair with monic denominator.
Denominators that are pure powers of x (the common case along homothetic curves)
take a gcd-free fast path.
"""

from fractions import Fraction

from .constants import Const, ConstantTower
from .errors import DivisionByZero, ParseError
from . import expr


class Poly:
    """Dense polynomial in x, coefficients low to high, no trailing zeros."""

    __slots__ = ("tower", "c")

    def __init__(self, tower, coeffs):
        c = list(coeffs)
        while c and not c[-1]:
            c.pop()
        self.tower = tower
        self.c = c

    @classmethod
    def const(cls, tower, a):
        return cls(tower, [tower(a)])

    @classmethod
    def monomial(cls, tower, k, a=None):
        return cls(tower, [tower.zero] * k + [tower.one if a is None else a])

    def _lift(self, other):
        if isinstance(other, Poly):
            return other
        if isinstance(other, (int, Fraction, Const)):
            return Poly(self.tower, [self.tower(other)])
        return NotImplemented

    def degree(self):
        return len(self.c) - 1

    def is_zero(self):
        return not self.c

    def __bool__(self):
        return bool(self.c)

    def lc(self):
        return self.c[-1] if self.c else self.tower.zero

    def ord0(self):
        """Multiplicity of x as a factor (0 for the zero polynomial)."""
        for k, a in enumerate(self.c):
            if a:
                return k
        return 0

    def is_monomial(self):
        return bool(self.c) and not any(self.c[:-1])

    def is_x_power(self):
        return self.is_monomial() and self.c[-1] == 1

    def is_constant(self):
        return len(self.c) <= 1

    def __eq__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return NotImplemented
        return self.c == o.c

    def __hash__(self):
        return hash(tuple(self.c))

    def __neg__(self):
        return Poly(self.tower, [-a for a in self.c])

    def __add__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return NotImplemented
        a, b = self.c, o.c
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for k, v in enumerate(b):
            out[k] = out[k] + v
        return Poly(self.tower, out)

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
        a, b = self.c, o.c
        if not a or not b:
            return Poly(self.tower, [])
        if len(b) == 1:
            s = b[0]
            return Poly(self.tower, [v * s for v in a])
        if len(a) == 1:
            s = a[0]
            return Poly(self.tower, [v * s for v in b])
        out = [self.tower.zero] * (len(a) + len(b) - 1)
        for i, u in enumerate(a):
            if not u:
                continue
            for j, v in enumerate(b):
                if v:
                    out[i + j] = out[i + j] + u * v
        return Poly(self.tower, out)

    __rmul__ = __mul__

    def __pow__(self, n):
        out = Poly(self.tower, [self.tower.one])
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def shift(self, k):
        """Multiply by x^k (k may be negative when x^-k divides)."""
        if k >= 0:
            return Poly(self.tower, [self.tower.zero] * k + self.c)
        return Poly(self.tower, self.c[-k:])

    def scale(self, a):
        if not a:
            return Poly(self.tower, [])
        return Poly(self.tower, [v * a for v in self.c])

    def monic(self):
        if not self.c or self.c[-1] == 1:
            return self
        return self.scale(self.c[-1].inverse())

    def __divmod__(self, other):
        if not other.c:
            raise DivisionByZero(f"({self}) mod 0")
        r = list(self.c)
        db = len(other.c) - 1
        if len(r) - 1 < db:
            return Poly(self.tower, []), self
        inv = other.c[-1].inverse()
        b = other.c
        q = [self.tower.zero] * (len(r) - db)
        for k in range(len(r) - 1, db - 1, -1):
            if not r[k]:
                continue
            f = r[k] * inv
            q[k - db] = f
            for j in range(db + 1):
                if b[j]:
                    r[k - db + j] = r[k - db + j] - f * b[j]
        return Poly(self.tower, q), Poly(self.tower, r[:db])

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def exact_div(self, other):
        q, r = divmod(self, other)
        if r:
            raise ArithmeticError(f"{other} does not divide {self}")
        return q

    def deriv(self):
        return Poly(self.tower, [a * k for k, a in enumerate(self.c)][1:])

    def integrate(self):
        return Poly(self.tower, [self.tower.zero] + [a * Fraction(1, k + 1) for k, a in enumerate(self.c)])

    def __call__(self, v):
        out = self.tower.zero
        for a in reversed(self.c):
            out = out * v + a
        return out

    def compose(self, q):
        out = Poly(self.tower, [])
        for a in reversed(self.c):
            out = out * q + a
        return out

    def __str__(self):
        pieces = []
        for k in range(len(self.c) - 1, -1, -1):
            a = self.c[k]
            if a:
                mon = "" if k == 0 else ("x" if k == 1 else f"x^{k}")
                pieces.append(product_text(str(a), mon))
        return join_terms(pieces)

    __repr__ = __str__


def atomic(s):
    """True if ``s`` can be used as a factor without parentheses."""
    body = s[1:] if s.startswith("-") else s
    return bool(body) and all(ch.isalnum() or ch in "_^" for ch in body)


def wrapped(s):
    """True if ``s`` is one parenthesized group."""
    if not (s.startswith("(") and s.endswith(")")):
        return False
    depth = 0
    for k, ch in enumerate(s):
        depth += ch == "("
        depth -= ch == ")"
        if depth == 0 and k < len(s) - 1:
            return False
    return True


def factor_text(s):
    """``s`` made safe as the left operand of ``*`` or ``/``."""
    body = s[1:] if s.startswith("-") else s
    if wrapped(s) or all(atomic(p) for p in body.replace("/", "*").split("*")):
        return s
    return f"({s})"


def product_text(coeff, mon):
    if not mon:
        return factor_text(coeff)
    if coeff == "1":
        return mon
    if coeff == "-1":
        return "-" + mon
    return f"{factor_text(coeff)}*{mon}"


def join_terms(pieces):
    if not pieces:
        return "0"
    out = pieces[0]
    for p in pieces[1:]:
        out += f" - {p[1:]}" if p.startswith("-") else f" + {p}"
    return out


def poly_gcd(a, b):
    """Monic gcd (zero if both are zero)."""
    if not a:
        return b.monic()
    if not b:
        return a.monic()
    if a.is_monomial() or b.is_monomial():
        k = min(a.ord0(), b.ord0())
        return Poly.monomial(a.tower, k)
    if a.degree() < b.degree():
        a, b = b, a
    # monic remainders keep coefficient growth over parameter fields in check
    a, b = a.monic(), b.monic()
    while b:
        a, b = b, (a % b).monic()
    return a


def poly_xgcd(a, b):
    """(g, s, t) with s*a + t*b = g monic."""
    tower = a.tower
    r0, r1 = a, b
    s0, s1 = Poly(tower, [tower.one]), Poly(tower, [])
    t0, t1 = Poly(tower, []), Poly(tower, [tower.one])
    while r1:
        q, r = divmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if not r0:
        return r0, s0, t0
    inv = r0.lc().inverse()
    return r0.scale(inv), s0.scale(inv), t0.scale(inv)


def squarefree_factorization(p):
    """Yun's algorithm: list of (factor, multiplicity) with monic squarefree,
    pairwise coprime factors; the constant content is dropped."""
    p = p.monic()
    out = []
    if p.degree() <= 0:
        return out
    k0 = p.ord0()
    if k0:
        out.append((Poly.monomial(p.tower, 1), k0))
        p = p.shift(-k0)
        if p.degree() <= 0:
            return out
    dp = p.deriv()
    g = poly_gcd(p, dp)
    b = p.exact_div(g)
    c = dp.exact_div(g)
    d = c - b.deriv()
    k = 1
    while b.degree() > 0:
        a = poly_gcd(b, d)
        if a.degree() > 0:
            out.append((a, k))
        b = b.exact_div(a)
        c = d.exact_div(a)
        d = c - b.deriv()
        k += 1
    return out


def poly_from_expr(text, tower, var):
    """Coefficient list (low to high) of a polynomial expression in ``var``."""
    node = expr.parse(text)
    env = dict(tower.symbol_env())
    t = tower.tower if hasattr(tower, "tower") else tower
    env[var] = Poly.monomial(t, 1)
    env = {k: (v if isinstance(v, Poly) else Poly(t, [v])) for k, v in env.items()}

    def lift(q):
        return Poly(t, [t.from_fraction(q)])

    out = expr.evaluate(node, env, lift, what=f"minimal polynomial of {var}")
    if not isinstance(out, Poly):
        raise ParseError(f"minimal polynomial of {var} is not a polynomial")
    return list(out.c)


# Poly only supports division by constants, which is what minimal polynomials need.
def _poly_truediv(self, other):
    o = self._lift(other)
    if o is NotImplemented:
        return NotImplemented
    if o.degree() != 0:
        raise ParseError("division by a non-constant polynomial")
    return self.scale(o.c[0].inverse())


Poly.__truediv__ = _poly_truediv


class RationalFunctionField:
    """k = C(x); use ``k.x``, ``k(value)`` or ``k.parse(text)`` to make elements."""

    def __init__(self, tower=None):
        self.tower = tower if tower is not None else ConstantTower()
        t = self.tower
        self._pone = Poly(t, [t.one])
        self.zero = RatFunc(self, Poly(t, []), self._pone)
        self.one = RatFunc(self, self._pone, self._pone)
        self.x = RatFunc(self, Poly.monomial(t, 1), self._pone)

    def from_const(self, c):
        return RatFunc(self, Poly(self.tower, [self.tower(c)]), self._pone)

    def from_poly(self, p):
        return RatFunc(self, p, self._pone)

    def frac(self, num, den):
        return RatFunc.make(self, num, den)

    def __call__(self, value):
        if isinstance(value, RatFunc):
            if value.field is not self and value.field.tower is not self.tower:
                raise ValueError("element of a different field")
            return value if value.field is self else RatFunc(self, value.num, value.den)
        if isinstance(value, Poly):
            return self.from_poly(value)
        if isinstance(value, str):
            return self.parse(value)
        return self.from_const(value)

    def symbol_env(self):
        env = {k: self.from_const(v) for k, v in self.tower.symbol_env().items()}
        env["x"] = self.x
        return env

    def parse(self, text):
        return expr.evaluate(expr.parse(text), self.symbol_env(),
                             lambda q: self.from_const(q), what="field element")

    def __repr__(self):
        return f"RationalFunctionField({self.tower!r})"


class RatFunc:
    """An element of k = C(x). Immutable; canonical form makes == syntactic."""

    __slots__ = ("field", "num", "den", "_hash")

    def __init__(self, field, num, den):
        self.field = field
        self.num = num
        self.den = den
        self._hash = None

    @staticmethod
    def make(field, num, den):
        if not den:
            raise DivisionByZero(f"({num})/0")
        if not num:
            return field.zero
        if den.is_x_power():
            k = min(num.ord0(), den.degree())
            if k:
                num, den = num.shift(-k), den.shift(-k)
            return RatFunc(field, num, den)
        if den.is_monomial():
            inv = den.lc().inverse()
            num = num.scale(inv)
            k = min(num.ord0(), den.degree())
            return RatFunc(field, num.shift(-k), Poly.monomial(den.tower, den.degree() - k))
        g = poly_gcd(num, den)
        if g.degree() > 0:
            num, den = num.exact_div(g), den.exact_div(g)
        lc = den.lc()
        if lc != 1:
            inv = lc.inverse()
            num, den = num.scale(inv), den.scale(inv)
        return RatFunc(field, num, den)

    def _lift(self, other):
        if isinstance(other, RatFunc):
            return other
        if isinstance(other, (int, Fraction, Const)):
            return self.field.from_const(other)
        if isinstance(other, Poly):
            return self.field.from_poly(other)
        return NotImplemented

    @property
    def tower(self):
        return self.field.tower

    def is_zero(self):
        return not self.num

    def __bool__(self):
        return bool(self.num)

    def is_constant(self):
        return self.num.is_constant() and self.den.degree() == 0

    def constant(self):
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        return self.num.c[0] if self.num.c else self.tower.zero

    def is_polynomial(self):
        return self.den.degree() == 0

    def __eq__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return NotImplemented
        return self.num == o.num and self.den == o.den

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.num, self.den))
        return self._hash

    def __neg__(self):
        return RatFunc(self.field, -self.num, self.den)

    def __add__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return NotImplemented
        if not o.num:
            return self
        if not self.num:
            return o
        d1, d2 = self.den, o.den
        if d1 == d2:
            return RatFunc.make(self.field, self.num + o.num, d1)
        if d1.is_x_power() and d2.is_x_power():
            a, b = d1.degree(), d2.degree()
            if a >= b:
                return RatFunc.make(self.field, self.num + o.num.shift(a - b), d1)
            return RatFunc.make(self.field, self.num.shift(b - a) + o.num, d2)
        g = poly_gcd(d1, d2)
        if g.degree() > 0:
            c1 = d2.exact_div(g)
            c2 = d1.exact_div(g)
            return RatFunc.make(self.field, self.num * c1 + o.num * c2, d1 * c1)
        return RatFunc.make(self.field, self.num * d2 + o.num * d1, d1 * d2)

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
        if not self.num or not o.num:
            return self.field.zero
        if o.is_constant():
            return RatFunc(self.field, self.num.scale(o.num.c[0]), self.den)
        if self.is_constant():
            return RatFunc(self.field, o.num.scale(self.num.c[0]), o.den)
        if self.den.is_x_power() and o.den.is_x_power():
            return RatFunc.make(self.field, self.num * o.num, self.den.shift(o.den.degree()))
        g1 = poly_gcd(self.num, o.den)
        g2 = poly_gcd(o.num, self.den)
        n1, d2 = (self.num.exact_div(g1), o.den.exact_div(g1)) if g1.degree() > 0 else (self.num, o.den)
        n2, d1 = (o.num.exact_div(g2), self.den.exact_div(g2)) if g2.degree() > 0 else (o.num, self.den)
        return RatFunc.make(self.field, n1 * n2, d1 * d2)

    __rmul__ = __mul__

    def inverse(self):
        if not self.num:
            raise DivisionByZero("0")
        return RatFunc.make(self.field, self.den, self.num)

    def __truediv__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return NotImplemented
        if not o.num:
            raise DivisionByZero(f"({self})/0")
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, n):
        if n < 0:
            return self.inverse() ** (-n)
        return RatFunc.make(self.field, self.num ** n, self.den ** n)

    def derive(self):
        n, d = self.num, self.den
        if d.degree() == 0:
            return RatFunc(self.field, n.deriv(), d)
        if d.is_x_power():
            a = d.degree()
            return RatFunc.make(self.field, n.deriv().shift(1) - n.scale(self.tower(a)), d.shift(1))
        # with g = gcd(d, d') the quotient below is already in lowest terms
        dp = d.deriv()
        g = poly_gcd(d, dp)
        dg = d.exact_div(g) if g.degree() > 0 else d
        dpg = dp.exact_div(g) if g.degree() > 0 else dp
        num = n.deriv() * dg - n * dpg
        den = d * dg
        lc = den.lc()
        if lc != 1:
            inv = lc.inverse()
            num, den = num.scale(inv), den.scale(inv)
        return RatFunc(self.field, num, den)

    def __call__(self, v):
        """Evaluate at a constant ``v``."""
        dv = self.den(v)
        if not dv:
            raise DivisionByZero(f"pole of {self} at {v}")
        return self.num(v) / dv

    def substitute(self, q):
        """Compose with another field element: self(q(x))."""
        q = self.field(q)
        num = _compose(self.num, q)
        den = _compose(self.den, q)
        return num / den

    def __str__(self):
        n = str(self.num)
        if self.den.degree() == 0:
            return n
        d = str(self.den)
        n = factor_text(n)
        if "/" in n and not wrapped(n):
            n = f"({n})"
        return f"{n}/{d if atomic(d) else f'({d})'}"

    __repr__ = __str__

    def sort_key(self):
        return str(self)


def _compose(p, q):
    out = q.field.zero
    for a in reversed(p.c):
        out = out * q + q.field.from_const(a)
    return out


def partial_fractions(a):
    """Return ``(poly_part, parts)`` where ``parts`` lists ``(factor, j, numerator)``
    with a = poly_part + sum numerator / factor^j and deg numerator < deg factor.
    Factors come from the squarefree factorization of the denominator."""
    field = a.field
    q, r = divmod(a.num, a.den)
    parts = []
    if not r:
        return q, parts
    sqf = squarefree_factorization(a.den)
    den = a.den
    rem = r
    for idx, (f, mult) in enumerate(sqf):
        fk = f ** mult
        rest = den.exact_div(fk)
        if idx == len(sqf) - 1:
            ri = rem
        else:
            # rem/den = ri/fk + rj/rest with s*fk + t*rest = 1
            g, s, t = poly_xgcd(fk, rest)
            ri = (rem * t) % fk
            rem = (rem - ri * rest).exact_div(fk)
            den = rest
        # f-adic expansion of ri
        for j in range(mult, 0, -1):
            if not ri:
                break
            ri, c = divmod(ri, f)
            if c:
                parts.append((f, j, c))
        if ri:
            raise ArithmeticError("partial fraction split failed")
    return q, parts


def recombine(field, poly_part, parts):
    out = field.from_poly(poly_part)
    for f, j, c in parts:
        out = out + RatFunc.make(field, c, f ** j)
    return out


def hermite_reduce(a):
    """Split a = g' + h with h having a squarefree denominator and numerator of
    lower degree. Returns (g, h); the polynomial part of a is integrated into g."""
    field = a.field
    q, r = divmod(a.num, a.den)
    g = field.from_poly(q.integrate())
    if not r:
        return g, field.zero
    h = field.zero
    poly_part, parts = partial_fractions(RatFunc.make(field, r, a.den))
    by_factor = {}
    for f, j, c in parts:
        by_factor.setdefault(tuple(f.c), (f, {}))[1][j] = c
    for f, terms in by_factor.values():
        # integrate sum_j c_j/f^j, reducing the power by Hermite steps
        j = max(terms)
        fp = f.deriv()
        while j > 1:
            c = terms.pop(j, None)
            if c:
                # c/f^j = (s f' + t f)c / f^j with s f' + t f = 1
                _, s, t = poly_xgcd(fp, f)
                cs = (c * s) % f
                ct = (c - cs * fp).exact_div(f)
                # cs f'/f^j = -(cs/((j-1) f^{j-1}))' + cs'/((j-1) f^{j-1})
                scale = field.tower(Fraction(1, j - 1))
                g = g - RatFunc.make(field, cs.scale(scale), f ** (j - 1))
                extra = ct + cs.deriv().scale(scale)
                prev = terms.get(j - 1)
                terms[j - 1] = extra if prev is None else prev + extra
            j -= 1
        c1 = terms.get(1)
        if c1:
            qq, rr = divmod(c1, f)
            if qq:
                g = g + field.from_poly(qq.integrate())
            if rr:
                h = h + RatFunc.make(field, rr, f)
    return g, h
