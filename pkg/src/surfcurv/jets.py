"""Truncated Taylor-jet arithmetic and the closed expression grammar.

Univariate jets carry a value and three derivatives (order 3 is what the
curve torsion determinant needs); bivariate jets stop at order 2, which is
all the curvature formulas consume.  Jets propagate derivatives exactly
through the chain rule, so downstream residuals are roundoff-limited.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

from .errors import DomainError, ParseError

Number = Union[int, float]


def _is_int(p: float) -> bool:
    return math.isfinite(p) and p == round(p)


# --------------------------------------------------------------------------
# univariate jets, order 3
# --------------------------------------------------------------------------

@dataclass(frozen=True, slots=True)
class UniJet3:
    """Value and first three derivatives w.r.t. one scalar parameter."""

    v: float
    d1: float
    d2: float
    d3: float

    @staticmethod
    def constant(c: float) -> "UniJet3":
        return UniJet3(float(c), 0.0, 0.0, 0.0)

    @staticmethod
    def seed(x: float) -> "UniJet3":
        """The identity variable at x."""
        return UniJet3(float(x), 1.0, 0.0, 0.0)

    def is_finite(self) -> bool:
        return (math.isfinite(self.v) and math.isfinite(self.d1)
                and math.isfinite(self.d2) and math.isfinite(self.d3))

    # -- ring operations ----------------------------------------------------

    def __add__(self, other):
        if isinstance(other, UniJet3):
            return UniJet3(self.v + other.v, self.d1 + other.d1,
                           self.d2 + other.d2, self.d3 + other.d3)
        return UniJet3(self.v + other, self.d1, self.d2, self.d3)

    __radd__ = __add__

    def __neg__(self):
        return UniJet3(-self.v, -self.d1, -self.d2, -self.d3)

    def __sub__(self, other):
        return self + (-other if isinstance(other, UniJet3) else -float(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, UniJet3):
            a, b = self, other
            return UniJet3(
                a.v * b.v,
                a.d1 * b.v + a.v * b.d1,
                a.d2 * b.v + 2.0 * a.d1 * b.d1 + a.v * b.d2,
                a.d3 * b.v + 3.0 * a.d2 * b.d1 + 3.0 * a.d1 * b.d2 + a.v * b.d3,
            )
        c = float(other)
        return UniJet3(self.v * c, self.d1 * c, self.d2 * c, self.d3 * c)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, UniJet3):
            return self * other._recip()
        c = float(other)
        if c == 0.0:
            raise DomainError("division by zero")
        return self * (1.0 / c)

    def __rtruediv__(self, other):
        return self._recip() * other

    def _compose(self, f0: float, f1: float, f2: float, f3: float) -> "UniJet3":
        """Chain rule for h = phi(u) given phi-derivatives at u.v."""
        u1, u2, u3 = self.d1, self.d2, self.d3
        return UniJet3(
            f0,
            f1 * u1,
            f2 * u1 * u1 + f1 * u2,
            f3 * u1 * u1 * u1 + 3.0 * f2 * u1 * u2 + f1 * u3,
        )

    def _recip(self) -> "UniJet3":
        t = self.v
        if t == 0.0:
            raise DomainError("division by zero")
        r = 1.0 / t
        return self._compose(r, -r * r, 2.0 * r ** 3, -6.0 * r ** 4)

    def __pow__(self, p: float) -> "UniJet3":
        p = float(p)
        if _is_int(p):
            k = int(round(p))
            if k < 0:
                return (self ** (-k))._recip()
            out = UniJet3.constant(1.0)
            for _ in range(k):
                out = out * self
            return out
        if self.v <= 0.0:
            raise DomainError(
                f"non-integer power {p} of non-positive base {self.v}")
        t = self.v
        return self._compose(
            math.pow(t, p),
            p * math.pow(t, p - 1.0),
            p * (p - 1.0) * math.pow(t, p - 2.0),
            p * (p - 1.0) * (p - 2.0) * math.pow(t, p - 3.0),
        )

    # -- elementary functions -----------------------------------------------

    def exp(self):
        try:
            e = math.exp(self.v)
        except OverflowError:
            raise DomainError(f"exp overflow at {self.v}") from None
        return self._compose(e, e, e, e)

    def log(self):
        t = self.v
        if t <= 0.0:
            raise DomainError(f"log of non-positive value {t}")
        r = 1.0 / t
        return self._compose(math.log(t), r, -r * r, 2.0 * r ** 3)

    def sin(self):
        s, c = math.sin(self.v), math.cos(self.v)
        return self._compose(s, c, -s, -c)

    def cos(self):
        s, c = math.sin(self.v), math.cos(self.v)
        return self._compose(c, -s, -c, s)

    def tan(self):
        T = math.tan(self.v)
        sec2 = 1.0 + T * T
        return self._compose(T, sec2, 2.0 * T * sec2, sec2 * (2.0 + 6.0 * T * T))

    def sinh(self):
        s, c = math.sinh(self.v), math.cosh(self.v)
        return self._compose(s, c, s, c)

    def cosh(self):
        s, c = math.sinh(self.v), math.cosh(self.v)
        return self._compose(c, s, c, s)


# --------------------------------------------------------------------------
# bivariate jets, order 2
# --------------------------------------------------------------------------

@dataclass(frozen=True, slots=True)
class BiJet2:
    """Value and partials to order 2 w.r.t. two parameters (s, t).

    A single dst slot makes mixed-partial symmetry structural.
    """

    v: float
    ds: float
    dt: float
    dss: float
    dst: float
    dtt: float

    @staticmethod
    def constant(c: float) -> "BiJet2":
        return BiJet2(float(c), 0.0, 0.0, 0.0, 0.0, 0.0)

    @staticmethod
    def seed_s(s: float) -> "BiJet2":
        return BiJet2(float(s), 1.0, 0.0, 0.0, 0.0, 0.0)

    @staticmethod
    def seed_t(t: float) -> "BiJet2":
        return BiJet2(float(t), 0.0, 1.0, 0.0, 0.0, 0.0)

    def is_finite(self) -> bool:
        return all(map(math.isfinite,
                       (self.v, self.ds, self.dt, self.dss, self.dst, self.dtt)))

    def __add__(self, other):
        if isinstance(other, BiJet2):
            return BiJet2(self.v + other.v, self.ds + other.ds, self.dt + other.dt,
                          self.dss + other.dss, self.dst + other.dst,
                          self.dtt + other.dtt)
        return BiJet2(self.v + other, self.ds, self.dt, self.dss, self.dst, self.dtt)

    __radd__ = __add__

    def __neg__(self):
        return BiJet2(-self.v, -self.ds, -self.dt, -self.dss, -self.dst, -self.dtt)

    def __sub__(self, other):
        return self + (-other if isinstance(other, BiJet2) else -float(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, BiJet2):
            a, b = self, other
            return BiJet2(
                a.v * b.v,
                a.ds * b.v + a.v * b.ds,
                a.dt * b.v + a.v * b.dt,
                a.dss * b.v + 2.0 * a.ds * b.ds + a.v * b.dss,
                a.dst * b.v + a.ds * b.dt + a.dt * b.ds + a.v * b.dst,
                a.dtt * b.v + 2.0 * a.dt * b.dt + a.v * b.dtt,
            )
        c = float(other)
        return BiJet2(self.v * c, self.ds * c, self.dt * c,
                      self.dss * c, self.dst * c, self.dtt * c)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, BiJet2):
            return self * other._recip()
        c = float(other)
        if c == 0.0:
            raise DomainError("division by zero")
        return self * (1.0 / c)

    def __rtruediv__(self, other):
        return self._recip() * other

    def _compose(self, f0: float, f1: float, f2: float) -> "BiJet2":
        us, ut = self.ds, self.dt
        return BiJet2(
            f0,
            f1 * us,
            f1 * ut,
            f2 * us * us + f1 * self.dss,
            f2 * us * ut + f1 * self.dst,
            f2 * ut * ut + f1 * self.dtt,
        )

    def _recip(self) -> "BiJet2":
        t = self.v
        if t == 0.0:
            raise DomainError("division by zero")
        r = 1.0 / t
        return self._compose(r, -r * r, 2.0 * r ** 3)

    def __pow__(self, p: float) -> "BiJet2":
        p = float(p)
        if _is_int(p):
            k = int(round(p))
            if k < 0:
                return (self ** (-k))._recip()
            out = BiJet2.constant(1.0)
            for _ in range(k):
                out = out * self
            return out
        if self.v <= 0.0:
            raise DomainError(
                f"non-integer power {p} of non-positive base {self.v}")
        t = self.v
        return self._compose(math.pow(t, p), p * math.pow(t, p - 1.0),
                             p * (p - 1.0) * math.pow(t, p - 2.0))

    def exp(self):
        try:
            e = math.exp(self.v)
        except OverflowError:
            raise DomainError(f"exp overflow at {self.v}") from None
        return self._compose(e, e, e)

    def log(self):
        t = self.v
        if t <= 0.0:
            raise DomainError(f"log of non-positive value {t}")
        r = 1.0 / t
        return self._compose(math.log(t), r, -r * r)

    def sin(self):
        s, c = math.sin(self.v), math.cos(self.v)
        return self._compose(s, c, -s)

    def cos(self):
        s, c = math.sin(self.v), math.cos(self.v)
        return self._compose(c, -s, -c)

    def tan(self):
        T = math.tan(self.v)
        sec2 = 1.0 + T * T
        return self._compose(T, sec2, 2.0 * T * sec2)

    def sinh(self):
        s, c = math.sinh(self.v), math.cosh(self.v)
        return self._compose(s, c, s)

    def cosh(self):
        s, c = math.sinh(self.v), math.cosh(self.v)
        return self._compose(c, s, c)


def lift_s(u: UniJet3) -> BiJet2:
    """Embed a univariate jet in s into the bivariate algebra."""
    return BiJet2(u.v, u.d1, 0.0, u.d2, 0.0, 0.0)


def lift_t(u: UniJet3) -> BiJet2:
    """Embed a univariate jet in t into the bivariate algebra."""
    return BiJet2(u.v, 0.0, u.d1, 0.0, 0.0, u.d2)


def bijet_combine(u: UniJet3, w: UniJet3, op: str) -> BiJet2:
    """Combine an s-jet and a t-jet into a bivariate jet.

    ``add`` yields dst = 0 exactly (a sum of univariate terms has no mixed
    partial); ``mul`` yields dst = u.d1 * w.d1 exactly.
    """
    if op == "add":
        return lift_s(u) + lift_t(w)
    if op == "mul":
        return lift_s(u) * lift_t(w)
    raise ValueError(f"unknown bijet combine op {op!r}")


# --------------------------------------------------------------------------
# expression grammar
# --------------------------------------------------------------------------

@dataclass(frozen=True, slots=True)
class Const:
    value: float


@dataclass(frozen=True, slots=True)
class Var:
    name: str


@dataclass(frozen=True, slots=True)
class Bin:
    op: str  # add | sub | mul | div
    a: "Expr"
    b: "Expr"


@dataclass(frozen=True, slots=True)
class Call:
    fn: str  # exp | log | sin | cos | tan | sinh | cosh | neg
    arg: "Expr"


@dataclass(frozen=True, slots=True)
class Pow:
    base: "Expr"
    exponent: float  # real constant exponent


Expr = Union[Const, Var, Bin, Call, Pow]

_BIN_OPS = ("add", "sub", "mul", "div")
_CALL_FNS = ("exp", "log", "sin", "cos", "tan", "sinh", "cosh", "neg")


def expr_vars(expr: Expr) -> set[str]:
    if isinstance(expr, Const):
        return set()
    if isinstance(expr, Var):
        return {expr.name}
    if isinstance(expr, Bin):
        return expr_vars(expr.a) | expr_vars(expr.b)
    if isinstance(expr, Call):
        return expr_vars(expr.arg)
    if isinstance(expr, Pow):
        return expr_vars(expr.base)
    raise TypeError(f"not an expression node: {expr!r}")


def eval_expr(expr: Expr, env: dict):
    """Evaluate an expression over any jet algebra (or plain floats).

    ``env`` maps variable names to seeded jets; constants are lifted
    through float-aware operators.  Every intermediate is checked finite
    so NaN/Inf surfaces as DomainError instead of poisoning statistics.
    """
    out = _eval(expr, env)
    return out


def _check(j):
    ok = j.is_finite() if hasattr(j, "is_finite") else math.isfinite(j)
    if not ok:
        raise DomainError("non-finite intermediate in expression evaluation")
    return j


def _eval(expr: Expr, env: dict):
    if isinstance(expr, Const):
        return expr.value
    if isinstance(expr, Var):
        try:
            return env[expr.name]
        except KeyError:
            raise DomainError(f"unbound variable {expr.name!r}") from None
    if isinstance(expr, Bin):
        a = _eval(expr.a, env)
        b = _eval(expr.b, env)
        if expr.op == "add":
            return _check(a + b)
        if expr.op == "sub":
            return _check(a - b)
        if expr.op == "mul":
            return _check(a * b)
        if expr.op == "div":
            if isinstance(b, float):
                if b == 0.0:
                    raise DomainError("division by zero")
                return _check(a / b)
            return _check(a / b)
        raise ValueError(f"unknown operator {expr.op!r}")
    if isinstance(expr, Call):
        u = _eval(expr.arg, env)
        if expr.fn == "neg":
            return _check(-u)
        if isinstance(u, float):
            u = UniJet3.constant(u)  # degenerate constant subtree
            return _check(getattr(u, expr.fn)()).v
        return _check(getattr(u, expr.fn)())
    if isinstance(expr, Pow):
        u = _eval(expr.base, env)
        if isinstance(u, float):
            return _check(UniJet3.constant(u) ** expr.exponent).v
        return _check(u ** expr.exponent)
    raise TypeError(f"not an expression node: {expr!r}")


def eval_value(expr: Expr, env: dict[str, float]) -> float:
    """Value-only evaluation with plain math; no jet machinery involved.

    Kept separate so finite-difference oracles and mesh export do not
    share a derivative path with the jet pipeline.
    """
    if isinstance(expr, Const):
        return expr.value
    if isinstance(expr, Var):
        try:
            return env[expr.name]
        except KeyError:
            raise DomainError(f"unbound variable {expr.name!r}") from None
    if isinstance(expr, Bin):
        a = eval_value(expr.a, env)
        b = eval_value(expr.b, env)
        if expr.op == "add":
            r = a + b
        elif expr.op == "sub":
            r = a - b
        elif expr.op == "mul":
            r = a * b
        elif expr.op == "div":
            if b == 0.0:
                raise DomainError("division by zero")
            r = a / b
        else:
            raise ValueError(f"unknown operator {expr.op!r}")
    elif isinstance(expr, Call):
        u = eval_value(expr.arg, env)
        if expr.fn == "neg":
            r = -u
        elif expr.fn == "log":
            if u <= 0.0:
                raise DomainError(f"log of non-positive value {u}")
            r = math.log(u)
        else:
            try:
                r = getattr(math, expr.fn)(u)
            except (ValueError, OverflowError) as exc:
                raise DomainError(str(exc)) from None
    elif isinstance(expr, Pow):
        u = eval_value(expr.base, env)
        p = expr.exponent
        if _is_int(p):
            k = int(round(p))
            if k < 0 and u == 0.0:
                raise DomainError("division by zero")
            r = u ** k
        else:
            if u <= 0.0:
                raise DomainError(
                    f"non-integer power {p} of non-positive base {u}")
            r = math.pow(u, p)
    else:
        raise TypeError(f"not an expression node: {expr!r}")
    if not math.isfinite(r):
        raise DomainError("non-finite intermediate in expression evaluation")
    return r


# --------------------------------------------------------------------------
# S-expression parsing / formatting
# --------------------------------------------------------------------------

def parse_sexpr(text: str) -> Expr:
    """Parse a prefix S-expression like ``(mul (pow (add (mul 0.5 x) 1.0) 2.0) 3.0)``.

    Atoms are numeric literals or variable names; operator arity is checked.
    Errors carry the character position of the offending token.
    """
    tokens = _tokenize(text)
    expr, pos = _parse_tokens(tokens, 0)
    if pos != len(tokens):
        tok, at = tokens[pos]
        raise ParseError(f"trailing input {tok!r} at position {at}")
    return expr


def _tokenize(text: str) -> list[tuple[str, int]]:
    out = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch.isspace():
            i += 1
        elif ch in "()":
            out.append((ch, i))
            i += 1
        else:
            j = i
            while j < len(text) and not text[j].isspace() and text[j] not in "()":
                j += 1
            out.append((text[i:j], i))
            i = j
    if not out:
        raise ParseError("empty expression")
    return out


def _atom(tok: str, at: int) -> Expr:
    try:
        return Const(float(tok))
    except ValueError:
        pass
    if tok.isidentifier():
        return Var(tok)
    raise ParseError(f"bad atom {tok!r} at position {at}")


def _parse_tokens(tokens, pos) -> tuple[Expr, int]:
    tok, at = tokens[pos]
    if tok == ")":
        raise ParseError(f"unexpected ')' at position {at}")
    if tok != "(":
        return _atom(tok, at), pos + 1
    pos += 1
    if pos >= len(tokens):
        raise ParseError(f"unterminated '(' at position {at}")
    head, head_at = tokens[pos]
    pos += 1
    args = []
    while pos < len(tokens) and tokens[pos][0] != ")":
        node, pos = _parse_tokens(tokens, pos)
        args.append(node)
    if pos >= len(tokens):
        raise ParseError(f"unterminated '(' at position {at}")
    pos += 1  # consume ')'
    if head in _BIN_OPS:
        if len(args) != 2:
            raise ParseError(
                f"operator {head!r} at position {head_at} takes 2 arguments, got {len(args)}")
        return Bin(head, args[0], args[1]), pos
    if head == "pow":
        if len(args) != 2:
            raise ParseError(
                f"'pow' at position {head_at} takes 2 arguments, got {len(args)}")
        if not isinstance(args[1], Const):
            raise ParseError(
                f"'pow' exponent at position {head_at} must be a numeric constant")
        return Pow(args[0], args[1].value), pos
    if head in _CALL_FNS:
        if len(args) != 1:
            raise ParseError(
                f"function {head!r} at position {head_at} takes 1 argument, got {len(args)}")
        return Call(head, args[0]), pos
    raise ParseError(f"unknown operator {head!r} at position {head_at}")


def format_sexpr(expr: Expr) -> str:
    if isinstance(expr, Const):
        return repr(expr.value)
    if isinstance(expr, Var):
        return expr.name
    if isinstance(expr, Bin):
        return f"({expr.op} {format_sexpr(expr.a)} {format_sexpr(expr.b)})"
    if isinstance(expr, Call):
        return f"({expr.fn} {format_sexpr(expr.arg)})"
    if isinstance(expr, Pow):
        return f"(pow {format_sexpr(expr.base)} {repr(expr.exponent)})"
    raise TypeError(f"not an expression node: {expr!r}")


# --------------------------------------------------------------------------
# one-variable smooth functions
# --------------------------------------------------------------------------

_UNBOUNDED = (-math.inf, math.inf)


@dataclass(frozen=True)
class SmoothFn1:
    """A one-variable function from the closed grammar plus its validity
    interval.  Immutable; safe to share across workers."""

    expr: Expr
    interval: tuple[float, float] = _UNBOUNDED

    def __post_init__(self):
        names = expr_vars(self.expr)
        if len(names) > 1:
            raise ParseError(
                f"one-variable function uses several variables: {sorted(names)}")
        lo, hi = self.interval
        if not lo < hi:
            raise ParseError(f"empty validity interval {self.interval}")

    @staticmethod
    def parse(text: str, interval: tuple[float, float] = _UNBOUNDED) -> "SmoothFn1":
        return SmoothFn1(parse_sexpr(text), interval)

    @staticmethod
    def constant(c: float) -> "SmoothFn1":
        return SmoothFn1(Const(float(c)))

    @staticmethod
    def identity(interval: tuple[float, float] = _UNBOUNDED) -> "SmoothFn1":
        return SmoothFn1(Var("x"), interval)

    @property
    def var_name(self) -> str:
        names = expr_vars(self.expr)
        return names.pop() if names else "x"

    def contains(self, x: float) -> bool:
        lo, hi = self.interval
        return lo <= x <= hi

    def jet(self, x: float) -> UniJet3:
        return jet_eval(self, x)

    def value(self, x: float) -> float:
        if not self.contains(x):
            raise DomainError(
                f"{x} outside validity interval {self.interval}")
        return eval_value(self.expr, {self.var_name: float(x)})

    def restricted(self, interval: tuple[float, float]) -> "SmoothFn1":
        return SmoothFn1(self.expr, interval)


def jet_eval(fn: SmoothFn1, x: float) -> UniJet3:
    """Exact value and derivatives of fn at x, up to roundoff."""
    if not fn.contains(x):
        raise DomainError(f"{x} outside validity interval {fn.interval}")
    out = eval_expr(fn.expr, {fn.var_name: UniJet3.seed(float(x))})
    if isinstance(out, float):  # constant expression
        out = UniJet3.constant(out)
    if not out.is_finite():
        raise DomainError("non-finite jet")
    return out


def poly_expr(coeffs, var: str = "x") -> Expr:
    """Horner-form expression for sum(coeffs[k] * var**k)."""
    coeffs = list(coeffs)
    if not coeffs:
        return Const(0.0)
    acc: Expr = Const(float(coeffs[-1]))
    for c in reversed(coeffs[:-1]):
        acc = Bin("add", Const(float(c)), Bin("mul", Var(var), acc))
    return acc
