"""Scalar expression language used for integrands, derivatives and eta maps.

Grammar (EBNF)::

    expr      = term { ("+" | "-") term } ;
    term      = unary { ("*" | "/") unary } ;
    unary     = "-" unary | "+" unary | power ;
    power     = atom [ "^" unary ] ;
    atom      = number | ident | call | piecewise | "(" expr ")" ;
    call      = func "(" expr [ "," expr ] ")" ;
    func      = "exp" | "log" | "abs" | "sqrt" | "min" | "max" ;
    piecewise = "piecewise" "(" branch { "," branch } ")" ;
    branch    = "(" bound "," bound ")" ":" expr ;
    bound     = [ "-" ] ( number | "inf" ) ;

``^`` is right associative and binds tighter than unary minus, so ``-x^2``
is ``-(x^2)``. Piecewise guards test the variable ``x`` against half-open
intervals ``[lo, hi)``; the branch with the largest ``hi`` also owns ``hi``.
Error positions are 1-based character columns.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Sequence, Union

import numpy as np

from .dual import DualValue

UNARY_OPS = ("neg", "exp", "log", "abs", "sqrt")
BINARY_OPS = ("add", "sub", "mul", "div", "pow", "min", "max")
FUNCTIONS = {"exp": 1, "log": 1, "abs": 1, "sqrt": 1, "min": 2, "max": 2}
_INFIX = {"add": "+", "sub": "-", "mul": "*", "div": "/", "pow": "^"}
_PREC = {"add": 1, "sub": 1, "mul": 2, "div": 2, "neg": 3, "pow": 4}
# integer exponents up to this size use repeated squaring
_MAX_INT_POWER = 1 << 16


class ExprError(ValueError):
    """Base class for expression failures."""


class ParseError(ExprError):
    def __init__(self, message: str, position: int, expected: Sequence[str] = ()):
        self.position = position
        self.expected = tuple(expected)
        detail = f"{message} at offset {position}"
        if self.expected:
            detail += ", expected " + " or ".join(repr(t) for t in self.expected)
        super().__init__(detail)


class DomainError(ExprError):
    """Evaluation left the domain of an operation (log(0), 1/0, piecewise gap)."""


# --------------------------------------------------------------------------
# AST


class Expr:
    """Immutable expression node."""

    __slots__ = ()

    def __str__(self) -> str:
        return to_text(self)

    def variables(self) -> frozenset[str]:
        return frozenset(_collect_vars(self))


@dataclass(frozen=True, repr=False)
class Const(Expr):
    value: float

    def __repr__(self) -> str:
        return f"Const({self.value!r})"


@dataclass(frozen=True, repr=False)
class Var(Expr):
    name: str

    def __repr__(self) -> str:
        return f"Var({self.name!r})"


@dataclass(frozen=True, repr=False)
class Unary(Expr):
    op: str
    arg: Expr

    def __post_init__(self) -> None:
        if self.op not in UNARY_OPS:
            raise ExprError(f"unknown unary op {self.op!r}")

    def __repr__(self) -> str:
        return f"Unary({self.op!r}, {self.arg!r})"


@dataclass(frozen=True, repr=False)
class Binary(Expr):
    op: str
    left: Expr
    right: Expr

    def __post_init__(self) -> None:
        if self.op not in BINARY_OPS:
            raise ExprError(f"unknown binary op {self.op!r}")

    def __repr__(self) -> str:
        return f"Binary({self.op!r}, {self.left!r}, {self.right!r})"


@dataclass(frozen=True, repr=False)
class Piecewise(Expr):
    branches: tuple[tuple[float, float, Expr], ...]

    def __post_init__(self) -> None:
        if not self.branches:
            raise ExprError("piecewise needs at least one branch")
        spans = sorted((lo, hi) for lo, hi, _ in self.branches)
        for lo, hi in spans:
            if not lo < hi:
                raise ExprError(f"empty piecewise guard ({lo}, {hi})")
        for (_, hi0), (lo1, _) in zip(spans, spans[1:]):
            if lo1 < hi0:
                raise ExprError("piecewise guards overlap")

    @property
    def upper(self) -> float:
        return max(hi for _, hi, _ in self.branches)

    def breakpoints(self) -> list[float]:
        pts = {b for lo, hi, _ in self.branches for b in (lo, hi)}
        return sorted(p for p in pts if math.isfinite(p))

    def __repr__(self) -> str:
        return f"Piecewise({self.branches!r})"


def _collect_vars(e: Expr) -> Iterable[str]:
    if isinstance(e, Var):
        yield e.name
    elif isinstance(e, Unary):
        yield from _collect_vars(e.arg)
    elif isinstance(e, Binary):
        yield from _collect_vars(e.left)
        yield from _collect_vars(e.right)
    elif isinstance(e, Piecewise):
        yield "x"
        for _, _, br in e.branches:
            yield from _collect_vars(br)


# --------------------------------------------------------------------------
# Parsing

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^(),:]))"
)


@dataclass(frozen=True)
class _Token:
    kind: str  # num, ident, op, eof
    text: str
    pos: int  # 1-based


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    i = 0
    n = len(text)
    while i < n:
        if text[i].isspace():
            i += 1
            continue
        m = _TOKEN_RE.match(text, i)
        if not m or m.end() == i:
            raise ParseError(f"unexpected character {text[i]!r}", i + 1)
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append(_Token(kind, m.group(kind), start + 1))
        i = m.end()
    tokens.append(_Token("eof", "", n + 1))
    return tokens


class _Parser:
    def __init__(self, text: str, variables: Sequence[str], constants: Mapping[str, float]):
        self.tokens = _tokenize(text)
        self.i = 0
        self.variables = tuple(variables)
        self.constants = dict(constants)

    @property
    def tok(self) -> _Token:
        return self.tokens[self.i]

    def advance(self) -> _Token:
        t = self.tokens[self.i]
        self.i += 1
        return t

    def expect(self, text: str) -> _Token:
        t = self.tok
        if t.kind == "op" and t.text == text:
            return self.advance()
        found = "end of input" if t.kind == "eof" else repr(t.text)
        raise ParseError(f"unexpected {found}", t.pos, (text,))

    def at(self, text: str) -> bool:
        return self.tok.kind == "op" and self.tok.text == text

    def parse(self) -> Expr:
        e = self.expr()
        if self.tok.kind != "eof":
            raise ParseError(
                f"unexpected {self.tok.text!r}", self.tok.pos, ("+", "-", "*", "/", "^", "end of input")
            )
        return e

    def expr(self) -> Expr:
        e = self.term()
        while self.at("+") or self.at("-"):
            op = "add" if self.advance().text == "+" else "sub"
            e = Binary(op, e, self.term())
        return e

    def term(self) -> Expr:
        e = self.unary()
        while self.at("*") or self.at("/"):
            op = "mul" if self.advance().text == "*" else "div"
            e = Binary(op, e, self.unary())
        return e

    def unary(self) -> Expr:
        if self.at("-"):
            self.advance()
            return Unary("neg", self.unary())
        if self.at("+"):
            self.advance()
            return self.unary()
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.at("^"):
            self.advance()
            return Binary("pow", base, self.unary())
        return base

    def atom(self) -> Expr:
        t = self.tok
        if t.kind == "num":
            self.advance()
            return Const(float(t.text))
        if t.kind == "ident":
            self.advance()
            if t.text == "piecewise":
                return self.piecewise(t)
            if t.text in FUNCTIONS:
                return self.call(t)
            if t.text in self.variables:
                return Var(t.text)
            if t.text in self.constants:
                return Const(float(self.constants[t.text]))
            raise ParseError(f"unknown identifier {t.text!r}", t.pos, self.variables)
        if self.at("("):
            self.advance()
            e = self.expr()
            self.expect(")")
            return e
        found = "end of input" if t.kind == "eof" else repr(t.text)
        raise ParseError(f"unexpected {found}", t.pos, ("number", "identifier", "("))

    def call(self, name: _Token) -> Expr:
        self.expect("(")
        args = [self.expr()]
        while self.at(","):
            self.advance()
            args.append(self.expr())
        self.expect(")")
        arity = FUNCTIONS[name.text]
        if len(args) != arity:
            raise ParseError(
                f"{name.text} takes {arity} argument{'s' if arity > 1 else ''}, got {len(args)}",
                name.pos,
            )
        if arity == 1:
            return Unary(name.text, args[0])
        return Binary(name.text, args[0], args[1])

    def bound(self) -> float:
        sign = 1.0
        if self.at("-"):
            self.advance()
            sign = -1.0
        elif self.at("+"):
            self.advance()
        t = self.tok
        if t.kind == "num":
            self.advance()
            return sign * float(t.text)
        if t.kind == "ident" and t.text == "inf":
            self.advance()
            return sign * math.inf
        raise ParseError("bad piecewise bound", t.pos, ("number", "inf"))

    def piecewise(self, head: _Token) -> Expr:
        self.expect("(")
        branches = []
        while True:
            self.expect("(")
            lo = self.bound()
            self.expect(",")
            hi = self.bound()
            self.expect(")")
            self.expect(":")
            branches.append((lo, hi, self.expr()))
            if not self.at(","):
                break
            self.advance()
        self.expect(")")
        try:
            return Piecewise(tuple(branches))
        except ExprError as exc:
            raise ParseError(str(exc), head.pos) from None


def parse(
    text: str,
    variables: Sequence[str] = ("x",),
    constants: Mapping[str, float] | None = None,
) -> Expr:
    """Parse ``text`` into an :class:`Expr`.

    ``variables`` lists the identifiers allowed as free variables; ``constants``
    maps extra identifiers to fixed numbers (used for parametric families).
    """
    if not isinstance(text, str):
        raise TypeError("expression text must be a string")
    return _Parser(text, variables, constants or {}).parse()


# --------------------------------------------------------------------------
# Printing


def _fmt_const(v: float) -> str:
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    if v.is_integer() and abs(v) < 1e16:
        return str(int(v))
    return repr(v)


def to_text(e: Expr) -> str:
    """Render ``e`` so that ``parse(to_text(e))`` rebuilds an equal tree."""
    return _print(e, 0)


def _print(e: Expr, ctx: int) -> str:
    if isinstance(e, Const):
        s = _fmt_const(e.value)
        # negative literals parse as neg(const); keep them grouped
        return f"({s})" if e.value < 0 or s.startswith("-") else s
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Unary):
        if e.op == "neg":
            s = "-" + _print(e.arg, _PREC["neg"])
            return f"({s})" if ctx > _PREC["neg"] else s
        return f"{e.op}({_print(e.arg, 0)})"
    if isinstance(e, Binary):
        if e.op in ("min", "max"):
            return f"{e.op}({_print(e.left, 0)}, {_print(e.right, 0)})"
        p = _PREC[e.op]
        if e.op == "pow":
            # right associative: base must bind tighter than ^
            s = f"{_print(e.left, p + 1)}^{_print(e.right, p)}"
        else:
            s = f"{_print(e.left, p)} {_INFIX[e.op]} {_print(e.right, p + 1)}"
        return f"({s})" if ctx > p else s
    if isinstance(e, Piecewise):
        parts = [
            f"({_fmt_const(lo)}, {_fmt_const(hi)}): {_print(br, 0)}" for lo, hi, br in e.branches
        ]
        return "piecewise(" + ", ".join(parts) + ")"
    raise TypeError(f"not an Expr: {e!r}")


# --------------------------------------------------------------------------
# Evaluation backends


def _int_power(base, n: int, one):
    result = one
    b = base
    k = abs(n)
    while k:
        if k & 1:
            result = result * b
        k >>= 1
        if k:
            b = b * b
    return result


def _as_int_exponent(v: float) -> int | None:
    if float(v).is_integer() and abs(v) <= _MAX_INT_POWER:
        return int(v)
    return None


class _ScalarOps:
    """Plain float evaluation on the math module."""

    def const(self, v, env):
        return v

    def exp(self, u):
        try:
            return math.exp(u)
        except OverflowError:
            raise DomainError(f"exp overflow at {u!r}") from None

    def log(self, u):
        if u <= 0:
            raise DomainError(f"log of non-positive value {u!r}")
        return math.log(u)

    def sqrt(self, u):
        if u < 0:
            raise DomainError(f"sqrt of negative value {u!r}")
        return math.sqrt(u)

    def abs(self, u):
        return abs(u)

    def neg(self, u):
        return -u

    def add(self, u, v):
        return u + v

    def sub(self, u, v):
        return u - v

    def mul(self, u, v):
        return u * v

    def div(self, u, v):
        if v == 0:
            raise DomainError("division by zero")
        return u / v

    def min(self, u, v):
        return u if u <= v else v

    def max(self, u, v):
        return u if u >= v else v

    def pow(self, u, v):
        n = _as_int_exponent(v)
        if n is not None:
            if n < 0:
                if u == 0:
                    raise DomainError("zero raised to a negative power")
                return 1.0 / _int_power(u, n, 1.0)
            return _int_power(u, n, 1.0)
        if u < 0:
            raise DomainError(f"non-integer power {v!r} of negative base {u!r}")
        if u == 0:
            if v < 0:
                raise DomainError("zero raised to a negative power")
            return 0.0
        try:
            return math.pow(u, v)
        except OverflowError:
            raise DomainError(f"pow overflow {u!r}^{v!r}") from None

    def piecewise(self, node: Piecewise, env, walk):
        x = env["x"]
        top = node.upper
        for lo, hi, br in node.branches:
            if lo <= x < hi or (x == hi == top):
                return walk(br, env)
        raise DomainError(f"x = {x!r} falls in a piecewise gap")


class _ArrayOps(_ScalarOps):
    """Vectorised float64 evaluation; domain checks apply to every element."""

    def const(self, v, env):
        return np.full(np.shape(env["__shape__"]), v, dtype=float)

    @staticmethod
    def _bad(mask, u, what):
        if np.any(mask):
            idx = int(np.flatnonzero(mask)[0])
            raise DomainError(f"{what} at {np.ravel(u)[idx]!r}")

    def exp(self, u):
        with np.errstate(over="ignore"):
            r = np.exp(u)
        self._bad(~np.isfinite(r) & np.isfinite(u), u, "exp overflow")
        return r

    def log(self, u):
        self._bad(u <= 0, u, "log of non-positive value")
        return np.log(u)

    def sqrt(self, u):
        self._bad(u < 0, u, "sqrt of negative value")
        return np.sqrt(u)

    def abs(self, u):
        return np.abs(u)

    def div(self, u, v):
        self._bad(v == 0, v, "division by zero")
        return u / v

    def min(self, u, v):
        return np.where(u <= v, u, v)

    def max(self, u, v):
        return np.where(u >= v, u, v)

    def pow(self, u, v):
        v = np.asarray(v, dtype=float)
        if v.size and np.all(v == v.flat[0]):
            n = _as_int_exponent(float(v.flat[0]))
            if n is not None:
                if n < 0:
                    self._bad(u == 0, u, "zero raised to a negative power")
                    return 1.0 / _int_power(u, n, np.ones_like(u))
                return _int_power(u, n, np.ones_like(u))
        self._bad((u < 0) & (v != np.round(v)), u, "non-integer power of negative base")
        self._bad((u == 0) & (v < 0), u, "zero raised to a negative power")
        with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
            r = np.power(u, v)
        return r

    def piecewise(self, node: Piecewise, env, walk):
        x = np.asarray(env["x"], dtype=float)
        out = np.empty_like(x)
        covered = np.zeros(x.shape, dtype=bool)
        top = node.upper
        for lo, hi, br in node.branches:
            mask = ((x >= lo) & (x < hi)) | ((x == hi) & (hi == top))
            mask &= ~covered
            if not np.any(mask):
                continue
            sub = {k: (np.asarray(v)[mask] if np.ndim(v) else v) for k, v in env.items()}
            out[mask] = walk(br, sub)
            covered |= mask
        self._bad(~covered, x, "x falls in a piecewise gap")
        return out


class _DualOps:
    """Forward-mode rules layered over a value backend."""

    def __init__(self, base: _ScalarOps):
        self.b = base

    def _d(self, value, deriv, kink=False):
        return DualValue(value, deriv, kink)

    def const(self, v, env):
        val = self.b.const(v, env)
        return self._d(val, val * 0.0)

    def exp(self, u):
        e = self.b.exp(u.value)
        return self._d(e, e * u.deriv, u.kink)

    def log(self, u):
        return self._d(self.b.log(u.value), u.deriv / u.value, u.kink)

    def sqrt(self, u):
        s = self.b.sqrt(u.value)
        if np.any(s == 0):
            raise DomainError("sqrt is not differentiable at 0")
        return self._d(s, u.deriv / (2.0 * s), u.kink)

    def abs(self, u):
        sign = np.sign(u.value) if isinstance(self.b, _ArrayOps) else math.copysign(1.0, u.value) * (u.value != 0)
        kink = u.kink | np.any(u.value == 0) if isinstance(self.b, _ArrayOps) else u.kink or u.value == 0
        return self._d(self.b.abs(u.value), sign * u.deriv, bool(kink))

    def neg(self, u):
        return self._d(-u.value, -u.deriv, u.kink)

    def add(self, u, v):
        return self._d(u.value + v.value, u.deriv + v.deriv, u.kink or v.kink)

    def sub(self, u, v):
        return self._d(u.value - v.value, u.deriv - v.deriv, u.kink or v.kink)

    def mul(self, u, v):
        return self._d(u.value * v.value, u.deriv * v.value + u.value * v.deriv, u.kink or v.kink)

    def div(self, u, v):
        q = self.b.div(u.value, v.value)
        return self._d(q, (u.deriv - q * v.deriv) / v.value, u.kink or v.kink)

    def _select(self, u, v, take_u, tie):
        if isinstance(self.b, _ArrayOps):
            return self._d(
                np.where(take_u, u.value, v.value),
                np.where(take_u, u.deriv, v.deriv),
                bool(u.kink or v.kink or np.any(tie)),
            )
        if take_u:
            return self._d(u.value, u.deriv, u.kink or v.kink or tie)
        return self._d(v.value, v.deriv, u.kink or v.kink or tie)

    def min(self, u, v):
        return self._select(u, v, u.value <= v.value, u.value == v.value)

    def max(self, u, v):
        return self._select(u, v, u.value >= v.value, u.value == v.value)

    def pow(self, u, v):
        val = self.b.pow(u.value, v.value)
        kink = u.kink or v.kink
        const_exp = not np.any(v.deriv != 0)
        if const_exp:
            ev = v.value if not isinstance(self.b, _ArrayOps) else np.asarray(v.value)
            n = _as_int_exponent(float(np.ravel(ev)[0])) if np.ndim(ev) else _as_int_exponent(float(ev))
            if n is not None:
                if n == 0:
                    return self._d(val, val * 0.0, kink)
                return self._d(val, n * self.b.pow(u.value, ev - 1) * u.deriv, kink)
            if np.any(u.value == 0):
                if np.any(np.asarray(ev) < 1):
                    raise DomainError("power with exponent < 1 is not differentiable at 0")
                with np.errstate(divide="ignore", invalid="ignore"):
                    d = ev * self.b.pow(u.value, ev - 1) * u.deriv
                return self._d(val, d, kink)
            return self._d(val, ev * val / u.value * u.deriv, kink)
        # variable exponent: d(u^v) = u^v (v' ln u + v u'/u)
        lu = self.b.log(u.value)
        return self._d(val, val * (v.deriv * lu + v.value * u.deriv / u.value), kink)

    def piecewise(self, node: Piecewise, env, walk):
        x = env["x"]
        xv = x.value
        pts = node.breakpoints()
        if isinstance(self.b, _ArrayOps):
            hit = bool(np.any(np.isin(xv, pts)))
            xs = np.asarray(xv, dtype=float)
            val = np.empty_like(xs)
            der = np.empty_like(xs)
            covered = np.zeros(xs.shape, dtype=bool)
            kink = hit
            top = node.upper
            for lo, hi, br in node.branches:
                mask = (((xs >= lo) & (xs < hi)) | ((xs == hi) & (hi == top))) & ~covered
                if not np.any(mask):
                    continue
                sub = {
                    k: DualValue(np.asarray(d.value)[mask], np.asarray(d.deriv)[mask], d.kink)
                    if isinstance(d, DualValue)
                    else np.asarray(d)[mask]
                    for k, d in env.items()
                }
                r = walk(br, sub)
                val[mask] = r.value
                der[mask] = r.deriv
                kink = kink or r.kink
                covered |= mask
            self.b._bad(~covered, xs, "x falls in a piecewise gap")
            return self._d(val, der, kink)
        top = node.upper
        for lo, hi, br in node.branches:
            if lo <= xv < hi or (xv == hi == top):
                r = walk(br, env)
                return self._d(r.value, r.deriv, r.kink or xv in pts)
        raise DomainError(f"x = {xv!r} falls in a piecewise gap")


_SCALAR = _ScalarOps()
_ARRAY = _ArrayOps()
_DUAL = _DualOps(_SCALAR)
_DUAL_ARRAY = _DualOps(_ARRAY)


def _walk(e: Expr, env, ops) -> object:
    if isinstance(e, Const):
        return ops.const(e.value, env)
    if isinstance(e, Var):
        try:
            return env[e.name]
        except KeyError:
            raise ExprError(f"no value bound for variable {e.name!r}") from None
    if isinstance(e, Unary):
        return getattr(ops, e.op)(_walk(e.arg, env, ops))
    if isinstance(e, Binary):
        return getattr(ops, e.op)(_walk(e.left, env, ops), _walk(e.right, env, ops))
    if isinstance(e, Piecewise):
        return ops.piecewise(e, env, lambda node, sub: _walk(node, sub, ops))
    raise TypeError(f"not an Expr: {e!r}")


def _env(x, extra: Mapping[str, float] | None) -> dict:
    env = {"x": x}
    if extra:
        env.update(extra)
    return env


def evaluate(e: Expr, x: float, **bindings: float) -> float:
    """Evaluate at a real point. Extra variables (e.g. ``y``) go in ``bindings``."""
    env = _env(float(x), {k: float(v) for k, v in bindings.items()})
    r = _walk(e, env, _SCALAR)
    if not math.isfinite(r):
        raise DomainError(f"non-finite result {r!r}")
    return r


def evaluate_array(e: Expr, x, **bindings) -> np.ndarray:
    """Vectorised :func:`evaluate` over numpy arrays (broadcast together)."""
    arrays = np.broadcast_arrays(np.asarray(x, dtype=float), *(np.asarray(v, dtype=float) for v in bindings.values()))
    env = {"x": arrays[0], "__shape__": arrays[0]}
    env.update(zip(bindings, arrays[1:]))
    r = np.asarray(_walk(e, env, _ARRAY), dtype=float)
    if not np.all(np.isfinite(r)):
        raise DomainError("non-finite result")
    return r


def evaluate_dual(e: Expr, x: float, wrt: str = "x", **bindings: float) -> DualValue:
    """Value and exact first derivative with respect to ``wrt``."""
    env = {"x": DualValue(float(x), 1.0 if wrt == "x" else 0.0)}
    for k, v in bindings.items():
        env[k] = DualValue(float(v), 1.0 if wrt == k else 0.0)
    r = _walk(e, env, _DUAL)
    if not (math.isfinite(r.value) and math.isfinite(r.deriv)):
        raise DomainError("non-finite value or derivative")
    return DualValue(float(r.value), float(r.deriv), bool(r.kink))


def evaluate_dual_array(e: Expr, x) -> DualValue:
    """Vectorised :func:`evaluate_dual` in ``x``; ``kink`` is set if any point hits one."""
    xs = np.asarray(x, dtype=float)
    env = {"x": DualValue(xs, np.ones_like(xs)), "__shape__": xs}
    r = _walk(e, env, _DUAL_ARRAY)
    val = np.asarray(r.value, dtype=float) * np.ones_like(xs)
    der = np.asarray(r.deriv, dtype=float) * np.ones_like(xs)
    if not (np.all(np.isfinite(val)) and np.all(np.isfinite(der))):
        raise DomainError("non-finite value or derivative")
    return DualValue(val, der, bool(r.kink))


# --------------------------------------------------------------------------
# Utilities


def substitute(e: Expr, values: Mapping[str, float]) -> Expr:
    """Replace named variables by constants."""
    if isinstance(e, Var):
        return Const(float(values[e.name])) if e.name in values else e
    if isinstance(e, Unary):
        return Unary(e.op, substitute(e.arg, values))
    if isinstance(e, Binary):
        return Binary(e.op, substitute(e.left, values), substitute(e.right, values))
    if isinstance(e, Piecewise):
        return Piecewise(tuple((lo, hi, substitute(br, values)) for lo, hi, br in e.branches))
    return e


def rename(e: Expr, mapping: Mapping[str, str]) -> Expr:
    if isinstance(e, Var):
        return Var(mapping.get(e.name, e.name))
    if isinstance(e, Unary):
        return Unary(e.op, rename(e.arg, mapping))
    if isinstance(e, Binary):
        return Binary(e.op, rename(e.left, mapping), rename(e.right, mapping))
    if isinstance(e, Piecewise):
        return Piecewise(tuple((lo, hi, rename(br, mapping)) for lo, hi, br in e.branches))
    return e


def compose_affine(e: Expr, scale: float, shift: float) -> Expr:
    """Return ``e`` evaluated at ``shift + scale * x`` (piecewise-free only)."""
    if any(isinstance(n, Piecewise) for n in _nodes(e)):
        raise ExprError("affine composition of piecewise expressions is not supported")
    inner = Binary("add", Const(float(shift)), Binary("mul", Const(float(scale)), Var("x")))
    return _replace_x(e, inner)


def _replace_x(e: Expr, inner: Expr) -> Expr:
    if isinstance(e, Var):
        return inner if e.name == "x" else e
    if isinstance(e, Unary):
        return Unary(e.op, _replace_x(e.arg, inner))
    if isinstance(e, Binary):
        return Binary(e.op, _replace_x(e.left, inner), _replace_x(e.right, inner))
    return e


def _nodes(e: Expr) -> Iterable[Expr]:
    yield e
    if isinstance(e, Unary):
        yield from _nodes(e.arg)
    elif isinstance(e, Binary):
        yield from _nodes(e.left)
        yield from _nodes(e.right)
    elif isinstance(e, Piecewise):
        for _, _, br in e.branches:
            yield from _nodes(br)


def kink_points(e: Expr, lo: float, hi: float, samples: int = 257) -> list[float]:
    """Points in ``(lo, hi)`` where ``e`` may fail to be differentiable.

    Covers piecewise breakpoints, zeros of ``abs`` arguments and ties of
    ``min``/``max`` arguments. Zeros are located by sign changes on a uniform
    sample followed by bisection, so tangential zeros can be missed.
    """
    found: set[float] = set()
    grid = np.linspace(lo, hi, samples)
    for node in _nodes(e):
        if isinstance(node, Piecewise):
            found.update(p for p in node.breakpoints() if lo < p < hi)
        elif isinstance(node, Unary) and node.op == "abs":
            found.update(_sign_changes(lambda t, n=node.arg: evaluate_array(n, t), grid))
        elif isinstance(node, Binary) and node.op in ("min", "max"):
            diff = Binary("sub", node.left, node.right)
            found.update(_sign_changes(lambda t, n=diff: evaluate_array(n, t), grid))
    return sorted(p for p in found if lo < p < hi)


def _sign_changes(fn: Callable[[np.ndarray], np.ndarray], grid: np.ndarray) -> list[float]:
    try:
        vals = fn(grid)
    except ExprError:
        return []
    roots = [float(t) for t, v in zip(grid, vals) if v == 0]
    s = np.sign(vals)
    for i in np.flatnonzero(s[:-1] * s[1:] < 0):
        a, b = float(grid[i]), float(grid[i + 1])
        fa = float(vals[i])
        for _ in range(200):
            m = 0.5 * (a + b)
            if m == a or m == b:
                break
            fm = float(fn(np.array([m]))[0])
            if fm == 0:
                a = b = m
                break
            if (fm < 0) == (fa < 0):
                a, fa = m, fm
            else:
                b = m
        roots.append(0.5 * (a + b))
    return roots


def as_expr(f: Union[Expr, str], variables: Sequence[str] = ("x",)) -> Expr:
    return parse(f, variables) if isinstance(f, str) else f
