"""Closed-form tail rules for sequences given as prefix + rule.

A tail rule answers "what is the entry at index p" on either scale (weight
entries M_p > 0, or their logs a_p = log M_p), and exposes the closed-form
limits that the regime classifier and the growth indicators need:

    slope limit   lim a_p / p          (None when the rule cannot say)
    root limit    lim M_p^(1/p)        (same information, weight scale)

The evaluation is scale-aware so a converted sequence keeps the same rule
object: ``FactorialPower(s, c)`` produces c*(p!)^s on the weight scale and
log c + s*log(p!) on the log scale.
"""

from __future__ import annotations

import ast
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional

from .errors import ParseError, TruncatedTail
from .extreal import ExtReal, POS_INF, ext, log_of_fraction

LOG = "log"
WEIGHT = "weight"


@dataclass(frozen=True)
class ExplicitOnly:
    """No rule: entries exist only inside the stored prefix."""

    def value(self, p: int, kind: str) -> ExtReal:
        raise TruncatedTail(p, 0)

    def slope_limit(self) -> Optional[ExtReal]:
        return None

    def root_limit(self) -> Optional[ExtReal]:
        return None

    def to_json(self) -> dict:
        return {"type": "explicit_only"}


@dataclass(frozen=True)
class FactorialPower:
    """Weight-scale rule M_p = c * (p!)^s with s > 0, c > 0."""

    s: Fraction
    c: Fraction

    def __post_init__(self):
        if self.s <= 0 or self.c <= 0:
            raise ValueError("FactorialPower needs s > 0 and c > 0")

    def value(self, p: int, kind: str) -> ExtReal:
        if kind == WEIGHT:
            if self.s.denominator == 1:
                return ext(self.c * Fraction(math.factorial(p)) ** int(self.s))
            return ext(math.exp(self._log_at(p)))
        return ext(self._log_at(p))

    def _log_at(self, p: int) -> float:
        return log_of_fraction(self.c) + float(self.s) * math.lgamma(p + 1)

    def slope_limit(self) -> Optional[ExtReal]:
        return POS_INF

    def root_limit(self) -> Optional[ExtReal]:
        return POS_INF

    def to_json(self) -> dict:
        return {"type": "factorial_power", "s": ext(self.s).to_json(), "c": ext(self.c).to_json()}


@dataclass(frozen=True)
class Geometric:
    """Weight-scale rule M_p = d^p with d > 0."""

    d: Fraction

    def __post_init__(self):
        if self.d <= 0:
            raise ValueError("Geometric needs d > 0")

    def value(self, p: int, kind: str) -> ExtReal:
        if kind == WEIGHT:
            return ext(self.d**p)
        if self.d == 1:
            return ext(Fraction(0))
        return ext(p * log_of_fraction(self.d))

    def slope_limit(self) -> Optional[ExtReal]:
        if self.d == 1:
            return ext(Fraction(0))
        return ext(log_of_fraction(self.d))

    def root_limit(self) -> Optional[ExtReal]:
        return ext(self.d)

    def to_json(self) -> dict:
        return {"type": "geometric", "d": ext(self.d).to_json()}


@dataclass(frozen=True)
class AffineLog:
    """Log-scale rule a_p = c * p (so M_p = e^{cp})."""

    c: Fraction

    def value(self, p: int, kind: str) -> ExtReal:
        if kind == LOG:
            return ext(self.c * p)
        return ext(self.c * p).exp()

    def slope_limit(self) -> Optional[ExtReal]:
        return ext(self.c)

    def root_limit(self) -> Optional[ExtReal]:
        return ext(self.c).exp()

    def to_json(self) -> dict:
        return {"type": "affine_log", "c": ext(self.c).to_json()}


@dataclass(frozen=True)
class Expression:
    """Arbitrary index -> value rule, natively on one scale.

    ``fn`` returns the entry on ``native`` scale; the other scale is obtained
    by exp/log.  A formula string (see :func:`compile_formula`) makes the rule
    serializable; rules built from bare callables are not.
    """

    fn: Callable[[int], ExtReal]
    native: str = LOG
    formula: Optional[str] = None

    def value(self, p: int, kind: str) -> ExtReal:
        v = ext(self.fn(p))
        if kind == self.native:
            return v
        return v.exp() if self.native == LOG else v.log()

    def slope_limit(self) -> Optional[ExtReal]:
        return None

    def root_limit(self) -> Optional[ExtReal]:
        return None

    def to_json(self) -> dict:
        if self.formula is None:
            raise ParseError("expression tail without a formula is not serializable")
        return {"type": "expression", "formula": self.formula, "native": self.native}


TailRule = ExplicitOnly | FactorialPower | Geometric | AffineLog | Expression


_ALLOWED_CALLS = {
    "log": math.log,
    "exp": math.exp,
    "sqrt": math.sqrt,
    "factorial": math.factorial,
    "lgamma": lambda x: math.lgamma(x),
}

_ALLOWED_NODES = (
    ast.Expression,
    ast.BinOp,
    ast.UnaryOp,
    ast.Constant,
    ast.Name,
    ast.Call,
    ast.Add,
    ast.Sub,
    ast.Mult,
    ast.Div,
    ast.Pow,
    ast.USub,
    ast.UAdd,
    ast.Load,
)


def compile_formula(formula: str) -> Callable[[int], ExtReal]:
    """Compile a small arithmetic formula in the variable p.

    Only +, -, *, /, **, numeric literals, p, inf, and the calls
    log/exp/sqrt/factorial/lgamma are admitted; anything else is a ParseError.
    Integer-valued subexpressions stay exact.
    """
    try:
        tree = ast.parse(formula, mode="eval")
    except SyntaxError as exc:
        raise ParseError(f"bad expression formula {formula!r}: {exc}") from exc
    for node in ast.walk(tree):
        if not isinstance(node, _ALLOWED_NODES):
            raise ParseError(f"disallowed construct {type(node).__name__} in formula {formula!r}")
        if isinstance(node, ast.Name) and node.id not in ("p", "inf") and node.id not in _ALLOWED_CALLS:
            raise ParseError(f"unknown name {node.id!r} in formula {formula!r}")
        if isinstance(node, ast.Call):
            if not isinstance(node.func, ast.Name) or node.func.id not in _ALLOWED_CALLS:
                raise ParseError(f"disallowed call in formula {formula!r}")
        if isinstance(node, ast.Constant) and not isinstance(node.value, (int, float)):
            raise ParseError(f"non-numeric literal in formula {formula!r}")
    code = compile(tree, "<tail formula>", "eval")
    env = dict(_ALLOWED_CALLS)
    env["inf"] = float("inf")

    def fn(p: int) -> ExtReal:
        value = eval(code, {"__builtins__": {}}, {**env, "p": p})
        if isinstance(value, float) and value.is_integer() and abs(value) < 2**53:
            # keep integers exact when the formula happens to produce them
            return ext(int(value))
        return ext(value)

    return fn


def tail_from_json(payload: dict) -> TailRule:
    if not isinstance(payload, dict) or "type" not in payload:
        raise ParseError(f"bad tail payload {payload!r}")
    kind = payload["type"]
    try:
        if kind == "explicit_only":
            return ExplicitOnly()
        if kind == "factorial_power":
            return FactorialPower(s=_frac(payload["s"]), c=_frac(payload["c"]))
        if kind == "geometric":
            return Geometric(d=_frac(payload["d"]))
        if kind == "affine_log":
            return AffineLog(c=_frac(payload["c"]))
        if kind == "expression":
            formula = payload["formula"]
            native = payload.get("native", LOG)
            if native not in (LOG, WEIGHT):
                raise ParseError(f"bad native scale {native!r}")
            return Expression(fn=compile_formula(formula), native=native, formula=formula)
    except (KeyError, ValueError, TypeError) as exc:
        raise ParseError(f"bad tail payload {payload!r}: {exc}") from exc
    raise ParseError(f"unknown tail type {kind!r}")


def _frac(payload) -> Fraction:
    v = ExtReal.from_json(payload)
    if not v.is_finite:
        raise ParseError("tail parameters must be finite")
    if isinstance(v.raw, Fraction):
        return v.raw
    return Fraction(v.raw).limit_denominator(10**12)
