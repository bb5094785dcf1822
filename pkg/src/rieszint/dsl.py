"""A small expression language for integrands, measures and capacities.

Functions of ``x``::

    expr      := term (("+" | "-") term)*
    term      := unary (("*" | "/") unary)*
    unary     := "-" unary | power
    power     := atom ("^" unary)?
    atom      := NUMBER | "x" | "pi" | "e" | "(" expr ")" | call
    call      := sqrt|abs|exp|log|sin|cos "(" expr ")" | pow(expr, expr)
               | piecewise(expr CMP expr, expr, expr)
               | indicator(INTERVAL) | dyadic_indicator([INT])
               | vec(expr, ...) | elemseries(expr-in-i, dyadic)
    INTERVAL  := ("[" | "(") NUMBER "," NUMBER ("]" | ")")

Measures::

    length | length(INTERVAL) | counting | vector(measure, NUMBER, ...)
    | capacity(measure) | capacity(pow(measure, NUMBER))

Nodes are frozen dataclasses; :func:`to_text` prints a node so that
``parse_*(to_text(node)) == node``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np

from .errors import DSLError

# ------------------------------------------------------------------ AST


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Neg:
    arg: object


@dataclass(frozen=True)
class BinOp:
    op: str
    left: object
    right: object


@dataclass(frozen=True)
class Call:
    name: str
    args: tuple


@dataclass(frozen=True)
class Compare:
    op: str
    left: object
    right: object


@dataclass(frozen=True)
class Piecewise:
    cond: Compare
    then: object
    other: object


@dataclass(frozen=True)
class IntervalLit:
    a: float
    b: float
    left_closed: bool
    right_closed: bool


@dataclass(frozen=True)
class Indicator:
    interval: IntervalLit


@dataclass(frozen=True)
class DyadicIndicator:
    k: int = 40


@dataclass(frozen=True)
class Vec:
    items: tuple


@dataclass(frozen=True)
class ElemSeries:
    coef: object
    schedule: str = "dyadic"


@dataclass(frozen=True)
class LengthSpec:
    restrict: IntervalLit | None = None


@dataclass(frozen=True)
class CountingSpec:
    pass


@dataclass(frozen=True)
class VectorSpec:
    base: object
    scales: tuple


@dataclass(frozen=True)
class CapacitySpec:
    base: object
    power: float = 1.0


UNARY_FUNCS = ("sqrt", "abs", "exp", "log", "sin", "cos")
CONSTANTS = {"pi": math.pi, "e": math.e}
COMPARISONS = ("<=", ">=", "==", "<", ">")

# ------------------------------------------------------------------ lexer

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<id>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op><=|>=|==|[-+*/^(),\[\]<>]))"
)


def _tokenize(text):
    toks = []
    pos = 0
    while True:
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            rest = text[pos:]
            if rest.strip() == "":
                break
            bad = pos + len(rest) - len(rest.lstrip())
            raise DSLError(f"unexpected character {text[bad]!r}", bad, "a number, name or operator")
        kind = m.lastgroup
        start = m.start(kind)
        toks.append((kind, m.group(kind), start))
        pos = m.end()
    toks.append(("end", "", len(text)))
    return toks


class _Parser:
    def __init__(self, text, variables):
        self.text = text
        self.toks = _tokenize(text)
        self.k = 0
        self.variables = variables

    @property
    def tok(self):
        return self.toks[self.k]

    def peek(self, offset=1):
        return self.toks[min(self.k + offset, len(self.toks) - 1)]

    def take(self):
        t = self.toks[self.k]
        self.k += 1
        return t

    def expect(self, value, what=None):
        t = self.tok
        if t[1] != value or t[0] == "num":
            raise DSLError(f"unexpected {t[1]!r}" if t[1] else "unexpected end of input", t[2], what or repr(value))
        return self.take()

    def done(self):
        if self.tok[0] != "end":
            raise DSLError(f"unexpected {self.tok[1]!r}", self.tok[2], "end of input")

    # ---------------------------------------------------------- expressions

    def expr(self):
        node = self.term()
        while self.tok[1] in ("+", "-") and self.tok[0] == "op":
            op = self.take()[1]
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.tok[1] in ("*", "/") and self.tok[0] == "op":
            op = self.take()[1]
            node = BinOp(op, node, self.unary())
        return node

    def unary(self):
        if self.tok == ("op", "-", self.tok[2]):
            self.take()
            if self.tok[0] == "num" and self.peek()[1] != "^":
                return Num(-float(self.take()[1]))
            return Neg(self.unary())
        return self.power()

    def power(self):
        base = self.atom()
        if self.tok[0] == "op" and self.tok[1] == "^":
            self.take()
            return BinOp("^", base, self.unary())
        return base

    def number(self):
        neg = False
        if self.tok[0] == "op" and self.tok[1] == "-":
            self.take()
            neg = True
        t = self.tok
        if t[0] != "num":
            raise DSLError(f"unexpected {t[1]!r}" if t[1] else "unexpected end of input", t[2], "a number")
        self.take()
        v = float(t[1])
        return -v if neg else v

    def interval(self):
        t = self.tok
        if t[1] not in ("[", "("):
            raise DSLError(f"unexpected {t[1]!r}", t[2], "'[' or '(' opening an interval")
        lc = self.take()[1] == "["
        a = self.number()
        self.expect(",")
        b = self.number()
        t = self.tok
        if t[1] not in ("]", ")"):
            raise DSLError(f"unexpected {t[1]!r}", t[2], "']' or ')' closing an interval")
        rc = self.take()[1] == "]"
        if a > b:
            raise DSLError("interval bounds are reversed", t[2])
        return IntervalLit(a, b, lc, rc)

    def args(self, parse_one):
        self.expect("(")
        out = [parse_one()]
        while self.tok[1] == ",":
            self.take()
            out.append(parse_one())
        self.expect(")", "',' or ')'")
        return out

    def compare(self):
        left = self.expr()
        t = self.tok
        if t[1] not in COMPARISONS:
            raise DSLError(f"unexpected {t[1]!r}", t[2], "a comparison operator")
        op = self.take()[1]
        return Compare(op, left, self.expr())

    def atom(self):
        kind, val, pos = self.tok
        if kind == "num":
            self.take()
            return Num(float(val))
        if kind == "op" and val == "(":
            self.take()
            node = self.expr()
            self.expect(")")
            return node
        if kind != "id":
            raise DSLError(f"unexpected {val!r}" if val else "unexpected end of input", pos, "an expression")
        self.take()
        if val in self.variables:
            return Var(val)
        if val in CONSTANTS:
            return Num(CONSTANTS[val])
        if val in UNARY_FUNCS:
            args = self.args(self.expr)
            self._arity(val, args, 1, pos)
            return Call(val, tuple(args))
        if val == "pow":
            args = self.args(self.expr)
            self._arity(val, args, 2, pos)
            return BinOp("^", args[0], args[1])
        if val == "piecewise":
            self.expect("(")
            cond = self.compare()
            self.expect(",")
            a = self.expr()
            self.expect(",")
            b = self.expr()
            self.expect(")")
            return Piecewise(cond, a, b)
        if val == "indicator":
            self.expect("(")
            iv = self.interval()
            self.expect(")")
            return Indicator(iv)
        if val == "dyadic_indicator":
            if self.tok[1] != "(":
                return DyadicIndicator()
            self.expect("(")
            if self.tok[1] == ")":
                self.take()
                return DyadicIndicator()
            kpos = self.tok[2]
            k = self.number()
            if k != int(k) or not 0 <= k <= 1000:
                raise DSLError("dyadic_indicator needs an integer level", kpos)
            self.expect(")")
            return DyadicIndicator(int(k))
        if val == "vec":
            args = self.args(self.expr)
            return Vec(tuple(args))
        if val == "elemseries":
            self.expect("(")
            inner = _Parser.__new__(_Parser)
            inner.__dict__.update(self.__dict__)
            inner.variables = ("i",)
            coef = inner.expr()
            self.k = inner.k
            self.expect(",")
            t = self.tok
            if t[1] != "dyadic":
                raise DSLError(f"unknown cell schedule {t[1]!r}", t[2], "'dyadic'")
            self.take()
            self.expect(")")
            return ElemSeries(coef, "dyadic")
        raise DSLError(f"unknown identifier {val!r}", pos)

    def _arity(self, name, args, n, pos):
        if len(args) != n:
            raise DSLError(f"{name} takes {n} argument(s), got {len(args)}", pos)

    # ---------------------------------------------------------- measures

    def measure(self):
        kind, val, pos = self.tok
        if kind != "id":
            raise DSLError(f"unexpected {val!r}" if val else "unexpected end of input", pos, "a measure name")
        self.take()
        if val == "length":
            if self.tok[1] == "(":
                self.take()
                iv = self.interval()
                self.expect(")")
                return LengthSpec(iv)
            return LengthSpec()
        if val == "counting":
            return CountingSpec()
        if val == "vector":
            self.expect("(")
            base = self.measure()
            scales = []
            while self.tok[1] == ",":
                self.take()
                scales.append(self.number())
            self.expect(")", "',' or ')'")
            if not scales:
                raise DSLError("vector takes at least one scale", pos)
            return VectorSpec(base, tuple(scales))
        if val == "capacity":
            self.expect("(")
            power = 1.0
            if self.tok[1] == "pow":
                self.take()
                self.expect("(")
                base = self.measure()
                self.expect(",")
                power = self.number()
                self.expect(")")
            else:
                base = self.measure()
            self.expect(")")
            return CapacitySpec(base, power)
        raise DSLError(f"unknown measure {val!r}", pos, "length, counting, vector or capacity")


def parse_function(text):
    p = _Parser(text, ("x",))
    node = p.expr()
    p.done()
    return node


def parse_measure(text):
    p = _Parser(text, ())
    node = p.measure()
    p.done()
    return node


def parse_spec(text, kind="function"):
    if kind == "function":
        return parse_function(text)
    if kind == "measure":
        return parse_measure(text)
    raise DSLError(f"unknown spec kind {kind!r}")


# ------------------------------------------------------------------ printer


def _num(v):
    s = repr(float(v))
    return f"({s})" if v < 0 or s.startswith("-") else s


def _interval(iv):
    return f"{'[' if iv.left_closed else '('}{iv.a!r}, {iv.b!r}{']' if iv.right_closed else ')'}"


def to_text(node):
    if isinstance(node, Num):
        return _num(node.value)
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Neg):
        return f"(-{_wrap(node.arg)})"
    if isinstance(node, BinOp):
        return f"({to_text(node.left)} {node.op} {to_text(node.right)})"
    if isinstance(node, Call):
        return f"{node.name}({', '.join(to_text(a) for a in node.args)})"
    if isinstance(node, Compare):
        return f"{to_text(node.left)} {node.op} {to_text(node.right)}"
    if isinstance(node, Piecewise):
        return f"piecewise({to_text(node.cond)}, {to_text(node.then)}, {to_text(node.other)})"
    if isinstance(node, Indicator):
        return f"indicator({_interval(node.interval)})"
    if isinstance(node, DyadicIndicator):
        return f"dyadic_indicator({node.k})"
    if isinstance(node, Vec):
        return f"vec({', '.join(to_text(a) for a in node.items)})"
    if isinstance(node, ElemSeries):
        return f"elemseries({to_text(node.coef)}, {node.schedule})"
    if isinstance(node, LengthSpec):
        return "length" if node.restrict is None else f"length({_interval(node.restrict)})"
    if isinstance(node, CountingSpec):
        return "counting"
    if isinstance(node, VectorSpec):
        return f"vector({to_text(node.base)}, {', '.join(repr(float(s)) for s in node.scales)})"
    if isinstance(node, CapacitySpec):
        if node.power == 1.0:
            return f"capacity({to_text(node.base)})"
        return f"capacity(pow({to_text(node.base)}, {float(node.power)!r}))"
    raise DSLError(f"cannot print {node!r}")


def _wrap(node):
    text = to_text(node)
    if isinstance(node, Num) and not text.startswith("("):
        return f"({text})"
    return text


# ------------------------------------------------------------------ analysis


def free_vars(node):
    if isinstance(node, Var):
        return {node.name}
    if isinstance(node, (Num, IntervalLit, DyadicIndicator)):
        return set()
    if isinstance(node, (Indicator, ElemSeries)):
        return {"x"}
    if isinstance(node, Neg):
        return free_vars(node.arg)
    if isinstance(node, (BinOp, Compare)):
        return free_vars(node.left) | free_vars(node.right)
    if isinstance(node, Call):
        return set().union(*(free_vars(a) for a in node.args))
    if isinstance(node, Piecewise):
        return free_vars(node.cond) | free_vars(node.then) | free_vars(node.other)
    if isinstance(node, Vec):
        return set().union(*(free_vars(a) for a in node.items))
    return set()


def output_dim(node):
    if isinstance(node, Vec):
        return len(node.items)
    dims = set()
    for child in _children(node):
        d = output_dim(child)
        if d > 1:
            dims.add(d)
    if len(dims) > 1:
        raise DSLError("vector lengths do not match")
    return dims.pop() if dims else 1


def _children(node):
    if isinstance(node, Neg):
        return (node.arg,)
    if isinstance(node, (BinOp, Compare)):
        return (node.left, node.right)
    if isinstance(node, Call):
        return node.args
    if isinstance(node, Piecewise):
        return (node.cond, node.then, node.other)
    return ()


# ------------------------------------------------------------------ point evaluation


def _bc(a, b):
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.ndim == 2 and b.ndim == 1:
        b = b[:, None]
    elif b.ndim == 2 and a.ndim == 1:
        a = a[:, None]
    return a, b


_UNARY_NP = {"sqrt": np.sqrt, "abs": np.abs, "exp": np.exp, "log": np.log, "sin": np.sin, "cos": np.cos}


def _ipow(a, b):
    with np.errstate(all="ignore"):
        return np.power(a, b)


def _cmp(op, a, b):
    return {"<": np.less, "<=": np.less_equal, ">": np.greater, ">=": np.greater_equal, "==": np.equal}[op](a, b)


def elem_index(x):
    """Index n with x in [1 - 2**(1-n), 1 - 2**-n); 0 outside [0, 1)."""
    x = np.asarray(x, dtype=np.float64)
    inside = (x >= 0) & (x < 1)
    with np.errstate(all="ignore"):
        n = np.floor(-np.log2(np.where(inside, 1.0 - x, 1.0))) + 1
    n = np.clip(np.nan_to_num(n, nan=1.0), 1, 1100).astype(np.int64)
    for _ in range(2):
        lo = 1.0 - np.ldexp(1.0, 1 - n)
        hi = 1.0 - np.ldexp(1.0, -n)
        n = np.where(x < lo, n - 1, np.where(x >= hi, n + 1, n))
    return np.where(inside, np.maximum(n, 1), 0)


def elem_cell(n):
    """The n-th dyadic elementary cell [1 - 2**(1-n), 1 - 2**-n)."""
    n = np.asarray(n)
    return 1.0 - np.ldexp(1.0, 1 - n), 1.0 - np.ldexp(1.0, -n)


def evaluate(node, x, env=None):
    """Evaluate at the points x; scalar nodes give (n,), vec nodes (n, d)."""
    x = np.asarray(x, dtype=np.float64)
    env = env or {}
    if isinstance(node, Num):
        return np.full(x.shape, node.value)
    if isinstance(node, Var):
        if node.name == "x":
            return x
        if node.name in env:
            return np.broadcast_to(np.asarray(env[node.name], dtype=np.float64), x.shape).copy()
        raise DSLError(f"unbound variable {node.name!r}")
    if isinstance(node, Neg):
        return -evaluate(node.arg, x, env)
    if isinstance(node, BinOp):
        a, b = _bc(evaluate(node.left, x, env), evaluate(node.right, x, env))
        with np.errstate(all="ignore"):
            if node.op == "+":
                return a + b
            if node.op == "-":
                return a - b
            if node.op == "*":
                return a * b
            if node.op == "/":
                return a / b
            return _ipow(a, b)
    if isinstance(node, Call):
        with np.errstate(all="ignore"):
            return _UNARY_NP[node.name](evaluate(node.args[0], x, env))
    if isinstance(node, Compare):
        a, b = _bc(evaluate(node.left, x, env), evaluate(node.right, x, env))
        return _cmp(node.op, a, b)
    if isinstance(node, Piecewise):
        c = evaluate(node.cond, x, env)
        a, b = _bc(evaluate(node.then, x, env), evaluate(node.other, x, env))
        if a.ndim == 2 and c.ndim == 1:
            c = c[:, None]
        return np.where(c, a, b)
    if isinstance(node, Indicator):
        iv = node.interval
        lo = (x > iv.a) | ((x == iv.a) & iv.left_closed)
        hi = (x < iv.b) | ((x == iv.b) & iv.right_closed)
        return (lo & hi).astype(np.float64)
    if isinstance(node, DyadicIndicator):
        s = np.ldexp(x, node.k)
        return (np.isfinite(s) & (s == np.floor(s))).astype(np.float64)
    if isinstance(node, Vec):
        cols = [np.broadcast_to(evaluate(a, x, env), x.shape) for a in node.items]
        return np.stack(cols, axis=-1)
    if isinstance(node, ElemSeries):
        n = elem_index(x)
        out = np.zeros(x.shape)
        pos = n > 0
        if np.any(pos):
            out[pos] = evaluate(node.coef, np.zeros(int(pos.sum())), {"i": n[pos]})
        return out
    raise DSLError(f"cannot evaluate {type(node).__name__}")


# ------------------------------------------------------------------ interval enclosure


def _down(v):
    return np.nextafter(np.nextafter(v, -np.inf), -np.inf)


def _up(v):
    return np.nextafter(np.nextafter(v, np.inf), np.inf)


def _widen(lo, hi, exact):
    """Outward rounding except where both inputs were exact points."""
    lo = np.where(exact, lo, _down(lo))
    hi = np.where(exact, hi, _up(hi))
    bad = np.isnan(lo) | np.isnan(hi)
    return np.where(bad, -np.inf, lo), np.where(bad, np.inf, hi)


class Cells:
    """Cells an enclosure is taken over: endpoints and closure flags."""

    def __init__(self, left, right, left_closed=True, right_closed=True):
        self.left = np.asarray(left, dtype=np.float64)
        self.right = np.asarray(right, dtype=np.float64)
        self.left_closed = np.broadcast_to(np.asarray(left_closed, dtype=bool), self.left.shape)
        self.right_closed = np.broadcast_to(np.asarray(right_closed, dtype=bool), self.left.shape)


def _is_const(node):
    return not free_vars(node)


def _cmp_var_const(op, cells, c, flip=False):
    """(all true, all false) of ``x op c`` over each cell, using closure flags."""
    l, r, lc, rc = cells.left, cells.right, cells.left_closed, cells.right_closed
    if flip:
        op = {"<": ">", "<=": ">=", ">": "<", ">=": "<=", "==": "=="}[op]
    below = (r < c) | ((r == c) & ~rc)  # every x < c
    at_most = r <= c
    above = (l > c) | ((l == c) & ~lc)  # every x > c
    at_least = l >= c
    point = (l == r) & (l == c)
    if op == "<":
        return below, at_least
    if op == "<=":
        return at_most, above
    if op == ">":
        return above, at_most
    if op == ">=":
        return at_least, below
    return point, below | above


def enclose(node, cells, env=None):
    """Rigorous (lo, hi) enclosure of the node over each cell."""
    env = env or {}
    l, r = cells.left, cells.right
    if isinstance(node, Num):
        v = np.full(l.shape, node.value)
        return v, v.copy()
    if isinstance(node, Var):
        if node.name == "x":
            return l.copy(), r.copy()
        v = np.broadcast_to(np.asarray(env[node.name], dtype=np.float64), l.shape).copy()
        return v, v.copy()
    if isinstance(node, Neg):
        lo, hi = enclose(node.arg, cells, env)
        return -hi, -lo
    if isinstance(node, BinOp):
        a_lo, a_hi = enclose(node.left, cells, env)
        b_lo, b_hi = enclose(node.right, cells, env)
        a_lo, b_lo = _bc(a_lo, b_lo)
        a_hi, b_hi = _bc(a_hi, b_hi)
        exact = (a_lo == a_hi) & (b_lo == b_hi)
        with np.errstate(all="ignore"):
            if node.op == "+":
                return _widen(a_lo + b_lo, a_hi + b_hi, exact)
            if node.op == "-":
                return _widen(a_lo - b_hi, a_hi - b_lo, exact)
            if node.op == "*":
                c = np.stack([a_lo * b_lo, a_lo * b_hi, a_hi * b_lo, a_hi * b_hi])
                return _widen(c.min(axis=0), c.max(axis=0), exact)
            if node.op == "/":
                zero = (b_lo <= 0) & (b_hi >= 0)
                c = np.stack([a_lo / b_lo, a_lo / b_hi, a_hi / b_lo, a_hi / b_hi])
                lo, hi = _widen(c.min(axis=0), c.max(axis=0), exact)
                return np.where(zero & ~exact, -np.inf, lo), np.where(zero & ~exact, np.inf, hi)
            return _enclose_pow(a_lo, a_hi, b_lo, b_hi, exact)
    if isinstance(node, Call):
        lo, hi = enclose(node.args[0], cells, env)
        exact = lo == hi
        f = _UNARY_NP[node.name]
        with np.errstate(all="ignore"):
            if node.name in ("sqrt", "exp", "log"):
                if node.name == "sqrt":
                    lo_c = np.maximum(lo, 0.0)
                elif node.name == "log":
                    lo_c = np.where(lo > 0, lo, 0.0)
                else:
                    lo_c = lo
                out_lo, out_hi = f(lo_c), f(hi)
                out_lo = np.where(np.isnan(out_lo) & (hi >= 0), -np.inf if node.name == "log" else 0.0, out_lo)
                return _widen(out_lo, out_hi, exact)
            if node.name == "abs":
                a_lo = np.where(lo >= 0, lo, np.where(hi <= 0, -hi, 0.0))
                return a_lo, np.maximum(np.abs(lo), np.abs(hi))
            m = 0.5 * (lo + hi)
            w = 0.5 * (hi - lo)
            fm = f(m)
            out_lo, out_hi = _widen(np.maximum(fm - w, -1.0), np.minimum(fm + w, 1.0), exact)
            return np.where(exact, f(lo), out_lo), np.where(exact, f(lo), out_hi)
    if isinstance(node, Piecewise):
        yes, no = enclose_condition(node.cond, cells, env)
        a_lo, a_hi = enclose(node.then, cells, env)
        b_lo, b_hi = enclose(node.other, cells, env)
        a_lo, b_lo = _bc(a_lo, b_lo)
        a_hi, b_hi = _bc(a_hi, b_hi)
        if a_lo.ndim == 2:
            yes, no = yes[:, None], no[:, None]
        lo = np.where(yes, a_lo, np.where(no, b_lo, np.minimum(a_lo, b_lo)))
        hi = np.where(yes, a_hi, np.where(no, b_hi, np.maximum(a_hi, b_hi)))
        return lo, hi
    if isinstance(node, Indicator):
        iv = node.interval
        lc, rc = cells.left_closed, cells.right_closed
        inside_l = (iv.a < l) | ((iv.a == l) & (iv.left_closed | ~lc))
        inside_r = (r < iv.b) | ((r == iv.b) & (iv.right_closed | ~rc))
        inside = inside_l & inside_r
        outside = (
            (r < iv.a)
            | ((r == iv.a) & ~(rc & iv.left_closed))
            | (l > iv.b)
            | ((l == iv.b) & ~(lc & iv.right_closed))
        )
        return np.where(inside, 1.0, 0.0), np.where(outside, 0.0, 1.0)
    if isinstance(node, DyadicIndicator):
        pt = l == r
        v = evaluate(node, l)
        return np.where(pt, v, 0.0), np.where(pt, v, 1.0)
    if isinstance(node, Vec):
        parts = [enclose(a, cells, env) for a in node.items]
        lo = np.stack([np.broadcast_to(p[0], l.shape) for p in parts], axis=-1)
        hi = np.stack([np.broadcast_to(p[1], l.shape) for p in parts], axis=-1)
        return lo, hi
    if isinstance(node, ElemSeries):
        return _enclose_elemseries(node, cells)
    raise DSLError(f"cannot enclose {type(node).__name__}")


def _enclose_pow(a_lo, a_hi, b_lo, b_hi, exact):
    const_exp = b_lo == b_hi
    k = b_lo
    is_int = const_exp & np.isfinite(k) & (k == np.round(k))
    c = np.stack([_ipow(a_lo, b_lo), _ipow(a_lo, b_hi), _ipow(a_hi, b_lo), _ipow(a_hi, b_hi)])
    lo = np.nanmin(np.where(np.isnan(c), np.inf, c), axis=0)
    hi = np.nanmax(np.where(np.isnan(c), -np.inf, c), axis=0)
    even = is_int & (np.mod(k, 2) == 0) & (k > 0)
    straddle = (a_lo < 0) & (a_hi > 0)
    lo = np.where(even & straddle, 0.0, lo)
    neg_int_straddle = is_int & (k < 0) & (a_lo <= 0) & (a_hi >= 0)
    safe = (a_lo > 0) | is_int
    lo, hi = _widen(lo, hi, exact)
    bad = (~safe | neg_int_straddle) & ~exact
    return np.where(bad, -np.inf, lo), np.where(bad, np.inf, hi)


def enclose_condition(cond, cells, env=None):
    """(definitely true, definitely false) of a comparison over each cell."""
    left, right = cond.left, cond.right
    if isinstance(left, Var) and left.name == "x" and _is_const(right):
        c = float(evaluate(right, np.zeros(1), env)[0])
        return _cmp_var_const(cond.op, cells, c)
    if isinstance(right, Var) and right.name == "x" and _is_const(left):
        c = float(evaluate(left, np.zeros(1), env)[0])
        return _cmp_var_const(cond.op, cells, c, flip=True)
    a_lo, a_hi = enclose(left, cells, env)
    b_lo, b_hi = enclose(right, cells, env)
    op = cond.op
    if op == "<":
        return a_hi < b_lo, a_lo >= b_hi
    if op == "<=":
        return a_hi <= b_lo, a_lo > b_hi
    if op == ">":
        return a_lo > b_hi, a_hi <= b_lo
    if op == ">=":
        return a_lo >= b_hi, a_hi < b_lo
    exact = (a_lo == a_hi) & (b_lo == b_hi)
    return exact & (a_lo == b_lo), (a_hi < b_lo) | (a_lo > b_hi)


def _enclose_elemseries(node, cells):
    l, r = cells.left, cells.right
    r_eff = np.where(cells.right_closed | (l == r), r, np.nextafter(r, l))
    l_eff = np.where(cells.left_closed | (l == r), l, np.nextafter(l, r))
    nl = elem_index(l_eff)
    nr = elem_index(r_eff)
    # cells reaching past [0, 1) also see the value 0
    outside = (l_eff < 0) | (r_eff >= 1)
    lo = np.full(l.shape, np.inf)
    hi = np.full(l.shape, -np.inf)
    first = np.where(nl == 0, 1, nl)
    last = np.where(r_eff >= 1, 1100, nr)
    has_cells = (last >= first) & (r_eff >= 0) & (l_eff < 1)
    for a, b in set(zip(first[has_cells].tolist(), last[has_cells].tolist())):
        idx = np.arange(a, b + 1)
        vals = evaluate(node.coef, np.zeros(idx.size), {"i": idx})
        vals = vals[np.isfinite(vals)] if np.all(np.isfinite(vals)) else np.array([-np.inf, np.inf])
        sel = has_cells & (first == a) & (last == b)
        lo[sel] = np.minimum(lo[sel], vals.min())
        hi[sel] = np.maximum(hi[sel], vals.max())
    lo = np.where(outside, np.minimum(lo, 0.0), lo)
    hi = np.where(outside, np.maximum(hi, 0.0), hi)
    return lo, hi
