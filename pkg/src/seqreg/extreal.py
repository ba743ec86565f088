"""Extended-real scalars with the conventions used throughout the package.

The conventions, fixed once here so every module agrees:

    0^0 = 1        1/(+inf) = 0        0 * (+-inf) = 0        p * (-inf) = -inf  (p >= 1)

Finite values constructed from int/Fraction/str are kept as exact ``Fraction``
objects; floats stay floats (and degrade mixed arithmetic to float).  The two
infinities are ordinary ``float('inf')`` payloads, so comparisons against exact
rationals remain exact.  ``nan`` is rejected everywhere.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Union

RawNumber = Union[int, float, Fraction]

_POS = float("inf")
_NEG = float("-inf")


def log_of_fraction(fr: Fraction) -> float:
    """Natural log of a positive Fraction, safe for huge numerators.

    Near 1 the direct difference of logs loses all relative accuracy, so that
    range goes through log1p instead.
    """
    num, den = fr.numerator, fr.denominator
    if num <= 0:
        raise ValueError("log of non-positive fraction")
    if num == den:
        return 0.0
    if 2 * den > num > den // 2:
        return math.log1p((num - den) / den)
    return math.log(num) - math.log(den)


class ExtReal:
    """Immutable extended-real number."""

    __slots__ = ("_v",)

    def __init__(self, value: "RawNumber | str | ExtReal"):
        if isinstance(value, ExtReal):
            self._v = value._v
        elif isinstance(value, bool):
            raise TypeError("bool is not a number here")
        elif isinstance(value, int):
            self._v = Fraction(value)
        elif isinstance(value, Fraction):
            self._v = value
        elif isinstance(value, float):
            if math.isnan(value):
                raise ValueError("nan is not an extended real")
            self._v = value
        elif isinstance(value, str):
            self._v = _parse_number(value)
        else:
            raise TypeError(f"cannot build ExtReal from {type(value).__name__}")

    # -- predicates ---------------------------------------------------------

    @property
    def raw(self) -> RawNumber:
        return self._v

    @property
    def is_pos_inf(self) -> bool:
        return self._v == _POS

    @property
    def is_neg_inf(self) -> bool:
        return self._v == _NEG

    @property
    def is_finite(self) -> bool:
        return not (self._v == _POS or self._v == _NEG)

    @property
    def is_exact(self) -> bool:
        return isinstance(self._v, Fraction)

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other) -> "ExtReal":
        a, b = self._v, _coerce(other)
        ainf, binf = _inf_sign(a), _inf_sign(b)
        if ainf or binf:
            if ainf and binf and ainf != binf:
                raise ArithmeticError("inf + (-inf) is indeterminate")
            return POS_INF if (ainf or binf) > 0 else NEG_INF
        return ExtReal(a + b)

    __radd__ = __add__

    def __neg__(self) -> "ExtReal":
        if self.is_pos_inf:
            return NEG_INF
        if self.is_neg_inf:
            return POS_INF
        return ExtReal(-self._v)

    def __sub__(self, other) -> "ExtReal":
        return self + (-_as_ext(other))

    def __rsub__(self, other) -> "ExtReal":
        return _as_ext(other) + (-self)

    def __mul__(self, other) -> "ExtReal":
        a, b = self._v, _coerce(other)
        ainf, binf = _inf_sign(a), _inf_sign(b)
        if ainf or binf:
            # the stated convention: anything times zero is zero
            if a == 0 or b == 0:
                return ZERO
            sign = (ainf or (1 if a > 0 else -1)) * (binf or (1 if b > 0 else -1))
            return POS_INF if sign > 0 else NEG_INF
        return ExtReal(a * b)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "ExtReal":
        a, b = self._v, _coerce(other)
        ainf, binf = _inf_sign(a), _inf_sign(b)
        if binf:
            if ainf:
                raise ArithmeticError("inf / inf is indeterminate")
            return ZERO  # the 1/inf = 0 convention, any finite numerator
        if b == 0:
            raise ZeroDivisionError("division by zero")
        if ainf:
            sign = ainf * (1 if b > 0 else -1)
            return POS_INF if sign > 0 else NEG_INF
        return ExtReal(a / b)

    def __rtruediv__(self, other) -> "ExtReal":
        return _as_ext(other) / self

    def __pow__(self, exponent: int) -> "ExtReal":
        if not isinstance(exponent, int) or exponent < 0:
            raise TypeError("only non-negative integer exponents are supported")
        if exponent == 0:
            return ONE  # includes 0^0 = 1 and inf^0 = 1
        if self.is_pos_inf:
            return POS_INF
        if self.is_neg_inf:
            return POS_INF if exponent % 2 == 0 else NEG_INF
        return ExtReal(self._v**exponent)

    # -- transcendental maps -------------------------------------------------

    def exp(self) -> "ExtReal":
        if self.is_neg_inf:
            return ZERO
        if self.is_pos_inf:
            return POS_INF
        try:
            return ExtReal(math.exp(float(self._v)))
        except OverflowError:
            return POS_INF

    def log(self) -> "ExtReal":
        if self.is_pos_inf:
            return POS_INF
        if self._v == 0:
            return NEG_INF
        if self._v < 0:
            raise ValueError("log of negative value")
        if isinstance(self._v, Fraction):
            return ExtReal(log_of_fraction(self._v))
        return ExtReal(math.log(self._v))

    def root(self, p: int) -> "ExtReal":
        """p-th root for positive values (float result unless trivial)."""
        if p <= 0:
            raise ValueError("root order must be >= 1")
        if self.is_pos_inf:
            return POS_INF
        if self._v == 0:
            return ZERO
        if self._v < 0:
            raise ValueError("root of negative value")
        if p == 1:
            return self
        if isinstance(self._v, Fraction):
            return ExtReal(math.exp(log_of_fraction(self._v) / p))
        return ExtReal(math.exp(math.log(self._v) / p))

    # -- ordering / identity --------------------------------------------------

    def __eq__(self, other) -> bool:
        try:
            return self._v == _coerce(other)
        except (TypeError, ValueError):
            return NotImplemented

    def __lt__(self, other) -> bool:
        return self._v < _coerce(other)

    def __le__(self, other) -> bool:
        return self._v <= _coerce(other)

    def __gt__(self, other) -> bool:
        return self._v > _coerce(other)

    def __ge__(self, other) -> bool:
        return self._v >= _coerce(other)

    def __hash__(self) -> int:
        return hash(self._v)

    def __float__(self) -> float:
        try:
            return float(self._v)
        except OverflowError:
            return _POS if self._v > 0 else _NEG

    def __repr__(self) -> str:
        if self.is_pos_inf:
            return "ExtReal(inf)"
        if self.is_neg_inf:
            return "ExtReal(-inf)"
        return f"ExtReal({self._v})"

    def __str__(self) -> str:
        if self.is_pos_inf:
            return "inf"
        if self.is_neg_inf:
            return "-inf"
        return str(self._v)

    # -- serialization ---------------------------------------------------------

    def to_json(self):
        """Canonical JSON payload: int, float, or "p/q"/"inf"/"-inf" string."""
        if self.is_pos_inf:
            return "inf"
        if self.is_neg_inf:
            return "-inf"
        v = self._v
        if isinstance(v, Fraction):
            if v.denominator == 1:
                return int(v)
            return f"{v.numerator}/{v.denominator}"
        return v

    @staticmethod
    def from_json(payload) -> "ExtReal":
        if isinstance(payload, (int, float, Fraction)) and not isinstance(payload, bool):
            return ExtReal(payload)
        if isinstance(payload, str):
            return ExtReal(_parse_number(payload))
        raise ValueError(f"cannot parse extended real from {payload!r}")


def _parse_number(text: str) -> RawNumber:
    s = text.strip()
    low = s.lower()
    if low in ("inf", "+inf", "infinity"):
        return _POS
    if low in ("-inf", "-infinity"):
        return _NEG
    try:
        # Fraction handles both "p/q" and exact decimal strings like "1.5"
        return Fraction(s)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"bad number literal {text!r}") from exc


def _inf_sign(v: RawNumber) -> int:
    if v == _POS:
        return 1
    if v == _NEG:
        return -1
    return 0


def _coerce(other) -> RawNumber:
    if isinstance(other, ExtReal):
        return other._v
    if isinstance(other, bool):
        raise TypeError("bool is not a number here")
    if isinstance(other, int):
        return Fraction(other)
    if isinstance(other, (float, Fraction)):
        if isinstance(other, float) and math.isnan(other):
            raise ValueError("nan is not an extended real")
        return other
    raise TypeError(f"cannot mix ExtReal with {type(other).__name__}")


def _as_ext(v) -> ExtReal:
    return v if isinstance(v, ExtReal) else ExtReal(v)


ext = _as_ext  # short public alias used all over the package

POS_INF = ExtReal(_POS)
NEG_INF = ExtReal(_NEG)
ZERO = ExtReal(0)
ONE = ExtReal(1)
