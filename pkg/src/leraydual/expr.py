"""Custom graph surfaces Im z_n = F(z', Re z_n) from expression strings.

The grammar is a minimal arithmetic language over the variables
``z1 ... z{n-1}`` and ``u`` (= Re z_n):

    expr   := term (('+'|'-') term)*
    term   := factor (('*'|'/') factor)*
    factor := unary ('^' factor)?          (right associative power)
    unary  := ('+'|'-') unary | atom
    atom   := NUMBER | VAR | FUNC '(' expr ')' | '(' expr ')'
    FUNC   := abs2 | re | im | conj

Expressions are polarized: ``conj(z_j)`` becomes an independent symbol, so
all Wirtinger jets are exact symbolic derivatives (the symbolic counterpart
of complex-step differentiation, with no step-size error).
"""

from __future__ import annotations

import re as _re

import numpy as np
import sympy as sp

from .geometry import GeometryError, Jet2
from .surfaces import GraphSurface

__all__ = ["SymbolicGraph", "parse_expression"]

_TOKEN = _re.compile(
    r"\s*(?:(?P<num>\d+\.?\d*(?:[eE][+-]?\d+)?)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^()]))"
)

_FUNCS = ("abs2", "re", "im", "conj")


def _tokenize(text: str):
    pos = 0
    out = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise GeometryError(f"bad token in expression at {text[pos:pos + 10]!r}")
        if m.group("num"):
            out.append(("num", float(m.group("num"))))
        elif m.group("name"):
            out.append(("name", m.group("name")))
        else:
            out.append(("op", m.group("op")))
        pos = m.end()
    out.append(("end", None))
    return out


class _Parser:
    """Recursive descent for the grammar above, emitting sympy expressions."""

    def __init__(self, tokens, symbols, conj_map):
        self.toks = tokens
        self.i = 0
        self.symbols = symbols
        self.conj_map = conj_map

    def peek(self):
        return self.toks[self.i]

    def eat(self, kind=None, value=None):
        tok = self.toks[self.i]
        if kind and tok[0] != kind or (value is not None and tok[1] != value):
            raise GeometryError(f"unexpected token {tok!r} in expression")
        self.i += 1
        return tok

    def parse(self):
        e = self.expr()
        self.eat("end")
        return e

    def expr(self):
        e = self.term()
        while self.peek() == ("op", "+") or self.peek() == ("op", "-"):
            op = self.eat("op")[1]
            rhs = self.term()
            e = e + rhs if op == "+" else e - rhs
        return e

    def term(self):
        e = self.factor()
        while self.peek() == ("op", "*") or self.peek() == ("op", "/"):
            op = self.eat("op")[1]
            rhs = self.factor()
            e = e * rhs if op == "*" else e / rhs
        return e

    def factor(self):
        e = self.unary()
        if self.peek() == ("op", "^"):
            self.eat("op")
            return e ** self.factor()
        return e

    def unary(self):
        if self.peek() == ("op", "-"):
            self.eat("op")
            return -self.unary()
        if self.peek() == ("op", "+"):
            self.eat("op")
            return self.unary()
        return self.atom()

    def atom(self):
        kind, val = self.peek()
        if kind == "num":
            self.eat()
            return sp.Float(val)
        if kind == "name":
            self.eat()
            if val in _FUNCS:
                self.eat("op", "(")
                inner = self.expr()
                self.eat("op", ")")
                return self.apply_func(val, inner)
            if val not in self.symbols:
                raise GeometryError(f"unknown variable {val!r} in expression")
            return self.symbols[val]
        if (kind, val) == ("op", "("):
            self.eat()
            inner = self.expr()
            self.eat("op", ")")
            return inner
        raise GeometryError(f"unexpected token {(kind, val)!r} in expression")

    def formal_conj(self, e):
        return e.subs(self.conj_map, simultaneous=True).conjugate()

    def apply_func(self, name, e):
        if name == "conj":
            return self.formal_conj(e)
        c = self.formal_conj(e)
        if name == "abs2":
            return sp.expand(e * c)
        if name == "re":
            return (e + c) / 2
        if name == "im":
            return (e - c) / (2 * sp.I)
        raise GeometryError(name)


def parse_expression(text: str, n: int):
    """Parse an expression into (sympy expr, z symbols, zbar symbols, u symbol)."""
    zs = [sp.Symbol(f"z{j + 1}") for j in range(n - 1)]
    zbs = [sp.Symbol(f"zb{j + 1}") for j in range(n - 1)]
    u = sp.Symbol("u", real=True)
    symbols = {f"z{j + 1}": zs[j] for j in range(n - 1)}
    symbols["u"] = u
    conj_map = {}
    for a, b in zip(zs, zbs):
        conj_map[a] = sp.conjugate(b)
        conj_map[b] = sp.conjugate(a)
    expr = _Parser(_tokenize(text), symbols, conj_map).parse()
    return expr, zs, zbs, u


class SymbolicGraph(GraphSurface):
    """Graph Im z_n = F(z', Re z_n) given by an expression string.

    Jets are exact symbolic Wirtinger derivatives of the polarized
    expression (z and conj(z) treated as independent variables).
    """

    def __init__(self, expression: str, n: int = 2, window: float = 1.0):
        super().__init__(n, window)
        self.expression = expression
        f, zs, zbs, u = parse_expression(expression, n)
        self._syms = zs + zbs + [u]
        m = n - 1
        grads = [sp.diff(f, zs[j]) for j in range(m)]
        hh = [[sp.diff(grads[j], zs[k]) for k in range(m)] for j in range(m)]
        hm = [[sp.diff(grads[j], zbs[k]) for k in range(m)] for j in range(m)]
        mods = ["numpy"]
        self._f = sp.lambdify(self._syms, f, mods)
        self._g = sp.lambdify(self._syms, grads, mods)
        self._hh = sp.lambdify(self._syms, hh, mods) if m else (lambda *a: [])
        self._hm = sp.lambdify(self._syms, hm, mods) if m else (lambda *a: [])

    def _args(self, zp, u):
        zp = np.atleast_1d(np.asarray(zp, dtype=complex))
        return list(zp) + [w.conjugate() for w in zp] + [float(u)]

    def _f_jet(self, zp, u):
        args = self._args(zp, u)
        f = complex(self._f(*args))
        if abs(f.imag) > 1e-9 * (1.0 + abs(f)):
            raise GeometryError("custom graph expression is not real valued")
        m = self.n - 1
        fg = np.asarray(self._g(*args), dtype=complex).reshape(m)
        fhh = np.asarray(self._hh(*args), dtype=complex).reshape(m, m)
        fhm = np.asarray(self._hm(*args), dtype=complex).reshape(m, m)
        return f.real, fg, 0.5 * (fhh + fhh.T), 0.5 * (fhm + fhm.conj().T)
