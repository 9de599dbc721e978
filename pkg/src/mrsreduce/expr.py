"""Plain-text expression grammar shared by constants, field elements and documents.

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | '+' unary | power
    power  := atom ('^' unary)?
    atom   := INTEGER | NAME | '(' expr ')'

``**`` is accepted as a synonym for ``^``. Exponents must evaluate to integers.
"""

import re
from fractions import Fraction

from .errors import ParseError

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\*\*|[-+*/^()]))")


def tokenize(text):
    pos, out = 0, []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos:].lstrip()[:1]!r} in {text!r}")
        num, name, op = m.groups()
        if num is not None:
            out.append(("num", int(num)))
        elif name is not None:
            out.append(("name", name))
        else:
            out.append(("op", "^" if op == "**" else op))
        pos = m.end()
    return out


class _Parser:
    def __init__(self, text):
        self.text = text
        self.toks = tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None)

    def take(self, op=None):
        tok = self.peek()
        if tok[0] is None:
            raise ParseError(f"unexpected end of input in {self.text!r}")
        if op is not None and tok != ("op", op):
            raise ParseError(f"expected {op!r} in {self.text!r}")
        self.i += 1
        return tok

    def expr(self):
        node = self.term()
        while self.peek() in (("op", "+"), ("op", "-")):
            op = self.take()[1]
            node = ("add" if op == "+" else "sub", node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.peek() in (("op", "*"), ("op", "/")):
            op = self.take()[1]
            node = ("mul" if op == "*" else "div", node, self.unary())
        return node

    def unary(self):
        if self.peek() == ("op", "-"):
            self.take()
            return ("neg", self.unary())
        if self.peek() == ("op", "+"):
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek() == ("op", "^"):
            self.take()
            return ("pow", base, self.unary())
        return base

    def atom(self):
        kind, val = self.take()
        if kind == "num":
            return ("num", val)
        if kind == "name":
            return ("sym", val)
        if val == "(":
            node = self.expr()
            self.take(")")
            return node
        raise ParseError(f"unexpected {val!r} in {self.text!r}")


def parse(text):
    """Parse ``text`` into a nested-tuple syntax tree."""
    if not isinstance(text, str):
        text = str(text)
    p = _Parser(text)
    if not p.toks:
        raise ParseError("empty expression")
    node = p.expr()
    if p.i != len(p.toks):
        raise ParseError(f"trailing input in {text!r}")
    return node


def symbols(node):
    kind = node[0]
    if kind == "sym":
        return {node[1]}
    if kind == "num":
        return set()
    out = set()
    for child in node[1:]:
        out |= symbols(child)
    return out


def _int_exponent(node):
    kind = node[0]
    if kind == "num":
        return node[1]
    if kind == "neg":
        return -_int_exponent(node[1])
    raise ParseError("exponents must be integer literals")


def evaluate(node, env, lift, what="expression"):
    """Evaluate a syntax tree; ``env`` maps names to values, ``lift`` turns a
    Fraction into a value of the target ring."""
    kind = node[0]
    if kind == "num":
        return lift(Fraction(node[1]))
    if kind == "sym":
        try:
            return env[node[1]]
        except KeyError:
            raise ParseError(f"unknown symbol {node[1]!r} in {what}") from None
    if kind == "neg":
        return -evaluate(node[1], env, lift, what)
    if kind == "pow":
        return evaluate(node[1], env, lift, what) ** _int_exponent(node[2])
    a = evaluate(node[1], env, lift, what)
    b = evaluate(node[2], env, lift, what)
    if kind == "add":
        return a + b
    if kind == "sub":
        return a - b
    if kind == "mul":
        return a * b
    return a / b
