"""Associated weight function of a sequence, in three equivalent forms.

omega(t) = sup_p log(M_0 t^p / M_p), with 0^0 = 1 so that omega(0) = 0.

For log-convex sequences the supremum localizes: on [mu_p, mu_{p+1}] the
winning index is p, which gives the piecewise closed form and, after
telescoping the quotients, the counting-function integral.  The three routes
are kept as separate code paths; the piecewise and integral forms both reduce
to one log of an exact rational for exact inputs, so their agreement is exact
there (they arrange the same ratio differently), while the direct form scans
terms and cross-checks them.

The Young conjugate is computed geometrically: s -> omega(e^s) is piecewise
linear (the trace of the log sequence shifted by log M_0), so the conjugate
sup_s {ps - omega(e^s)} is exact over its breakpoints.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .errors import NonFiniteEntry, NotLogConvex, OutOfDomain, Unbounded, WindowTooShort
from .extreal import ExtReal, NEG_INF, POS_INF, ZERO, ext
from .minorant import trace_function
from .piecewise import Breakpoint, Interval, PiecewiseLinearFn, REAL_LINE, StepFunction
from .sequences import (
    CASE1,
    CASE2,
    SequenceSpec,
    classify_regime,
    is_log_convex,
    quotients,
    resolve_window,
    to_log_scale,
    to_weight_scale,
)
from .tails import LOG, WEIGHT, AffineLog, ExplicitOnly, Expression, FactorialPower, Geometric

_SCAN_CAP = 200_000
_EXACT_POWER_CAP = 512


@dataclass(frozen=True)
class OmegaValue:
    value: ExtReal
    argmax_index: Optional[int]
    boundary_attained: bool

    def to_json(self) -> dict:
        return {
            "value": self.value.to_json(),
            "argmax_index": self.argmax_index,
            "boundary_attained": self.boundary_attained,
        }


def _log_weights(M: SequenceSpec) -> SequenceSpec:
    return M if M.kind == LOG else to_log_scale(M)


def _weights(M: SequenceSpec) -> SequenceSpec:
    return M if M.kind == WEIGHT else to_weight_scale(M)


def _require_nonneg(t: ExtReal) -> None:
    if t < ZERO:
        raise OutOfDomain(f"associated function is defined for t >= 0, got {t}")


def _limit_root(seq: SequenceSpec, window: Optional[int]) -> Optional[ExtReal]:
    """M_iota when it is known exactly: from the tail rule or a declaration."""
    root = seq.tail.root_limit()
    if root is not None:
        return root
    regime = classify_regime(seq, window)
    if regime.regime == CASE2 and regime.a_iota is not None:
        return regime.a_iota.exp()
    return None


def _sup_scan(M: SequenceSpec, t: ExtReal, window: Optional[int],
              include_zero: bool, with_coeff: bool) -> OmegaValue:
    """sup over examined p of log(coeff * t^p / M_p), coeff = M_0 or 1, t > 0.

    Ties go to the larger index, matching the counting-function convention
    Sigma(t) = #{mu <= t} at the knots.  Closed-form tails extend the scan:
    geometric-type tails give an analytic +inf above the limit root and a
    constant-term plateau at it; factorial-type tails are scanned until the
    quotient passes t (terms fall forever after that).
    """
    a = _log_weights(M)
    Mw = _weights(M)
    w = resolve_window(a, window)
    if t.is_pos_inf:
        return OmegaValue(POS_INF, None, False)
    tail = a.tail
    closed_form = isinstance(tail, (Geometric, AffineLog, FactorialPower))
    base_end = max(w, len(a.prefix) + 1) if closed_form else w
    p_start = 0 if include_zero else 1

    root = _limit_root(Mw, window)
    if root is not None and root.is_finite:
        if t > root:
            return OmegaValue(POS_INF, None, False)

    avals = [a.value(p) for p in range(base_end)]
    if with_coeff and not avals[0].is_finite:
        raise NonFiniteEntry("M_0 must be positive and finite for the associated function")
    # a zero weight divides some term: the sup is +inf at every t > 0
    zero_from = p_start if not with_coeff else max(1, p_start)
    for p in range(zero_from, base_end):
        if avals[p].is_neg_inf:
            return OmegaValue(POS_INF, p, False)

    wvals = [Mw.value(p) for p in range(base_end)]
    exact_ok = (t.is_exact and base_end <= _EXACT_POWER_CAP
                and all(v.is_exact or v.is_pos_inf for v in wvals))
    best_val: Optional[ExtReal] = None
    best_p: Optional[int] = None
    if exact_ok:
        coeff = wvals[0].raw if with_coeff else Fraction(1)
        power = Fraction(1)
        best_r: Optional[Fraction] = None
        for p in range(base_end):
            if p > 0:
                power *= t.raw
            if p < p_start or wvals[p].is_pos_inf:
                continue
            r = coeff * power / wvals[p].raw
            if best_r is None or r >= best_r:
                best_r, best_p = r, p
        if best_r is not None:
            best_val = ext(best_r).log()
    else:
        off = float(avals[0]) if with_coeff else 0.0
        log_t = float(t.log())
        for p in range(p_start, base_end):
            if avals[p].is_pos_inf:
                continue
            term = off + p * log_t - float(avals[p])
            if best_val is None or term >= float(best_val):
                best_val, best_p = ext(term), p
    if best_val is None:
        return OmegaValue(NEG_INF, None, False)

    boundary = False
    if isinstance(tail, FactorialPower):
        off = float(avals[0]) if with_coeff else 0.0
        log_t = float(t.log())
        prev = float(a.value(base_end - 1))
        p = base_end
        scanned = 0
        while scanned < _SCAN_CAP:
            cur = float(a.value(p))
            if cur - prev > log_t:
                break  # quotient exceeded t: terms decrease from here on
            term = off + p * log_t - cur
            if term >= float(best_val):
                best_val, best_p = ext(term), p
            prev = cur
            p += 1
            scanned += 1
        else:
            boundary = True  # scan cap hit while terms could still rise
    elif isinstance(tail, (Geometric, AffineLog)):
        if root is not None and t == root:
            # beyond the prefix the terms are constant: log coeff exactly
            const = avals[0] if with_coeff else ZERO
            if const >= best_val:
                return OmegaValue(const, None, False)
    else:
        boundary = best_p == base_end - 1
    return OmegaValue(best_val, best_p, boundary)


def omega_direct(M: SequenceSpec, t, window: Optional[int] = None) -> OmegaValue:
    """sup_p log(M_0 t^p / M_p) over the window, with closed-form tail analysis.

    boundary_attained signals that the winning index sits at the edge of the
    examined range with nothing known beyond it, so the value may be a strict
    underestimate (possibly of +inf).
    """
    t = ext(t)
    _require_nonneg(t)
    if t == ZERO:
        return OmegaValue(ZERO, 0, False)
    return _sup_scan(M, t, window, include_zero=True, with_coeff=True)


def omega_tilde(M: SequenceSpec, t, window: Optional[int] = None) -> ExtReal:
    """sup_p log(t^p / M_p): the associated function without its M_0 factor."""
    t = ext(t)
    _require_nonneg(t)
    a = _log_weights(M)
    if t == ZERO:
        return ZERO - a.value(0)
    return _sup_scan(M, t, window, include_zero=True, with_coeff=False).value


def omega_double_tilde(M: SequenceSpec, t, window: Optional[int] = None) -> ExtReal:
    """sup over p >= 1 only; tends to -inf as t -> 0, so t = 0 is rejected."""
    t = ext(t)
    if t <= ZERO:
        raise OutOfDomain("sup over p >= 1 needs t > 0 (the limit at 0 is -inf)")
    return _sup_scan(M, t, window, include_zero=False, with_coeff=False).value


# -- piecewise / integral forms (log-convex inputs) -----------------------------


def _require_log_convex(Mw: SequenceSpec, window: Optional[int], tol: float) -> None:
    report = is_log_convex(Mw, window, tol)
    if not report.ok:
        raise NotLogConvex(
            f"piecewise evaluation needs log-convexity; violated at index "
            f"{report.violation_index}", report.violation_index)


def _case2_guard(Mw: SequenceSpec, t: ExtReal, window: Optional[int]) -> None:
    regime = classify_regime(Mw, window)
    if regime.regime != CASE2:
        return
    C = _limit_root(Mw, window)
    if C is not None and t >= C:
        raise OutOfDomain(
            f"bounded-quotient sequences admit the closed form on [0, C) only; "
            f"t = {t} >= C = {C}")


def _segment_index(Mw: SequenceSpec, t: ExtReal, window: Optional[int]) -> int:
    """Largest p with mu_p <= t over the examined range (0 when mu_1 > t).

    Factorial-type tails are scanned past the window until the quotients
    outgrow t; other tails rely on the window (geometric-type quotients are
    constant beyond the prefix, covered by one extra examined index).
    """
    w = resolve_window(Mw, window)
    tail = Mw.tail
    closed_form = isinstance(tail, (Geometric, AffineLog, FactorialPower))
    base_end = max(w, len(Mw.prefix) + 1) if closed_form else w
    mus = quotients(Mw, base_end)
    p = 0
    for q in range(1, len(mus)):
        if mus[q] <= t:
            p = q
    if isinstance(tail, FactorialPower) and p == base_end - 1:
        prev = Mw.value(base_end - 1)
        q = base_end
        scanned = 0
        while scanned < _SCAN_CAP:
            cur = Mw.value(q)
            mu = cur / prev
            if not mu <= t:
                return p
            p = q
            prev = cur
            q += 1
            scanned += 1
        raise WindowTooShort(f"quotients stayed below t = {t} for {_SCAN_CAP} extra indices")
    return p


def omega_piecewise(M: SequenceSpec, t, window: Optional[int] = None,
                    tol: float = 1e-9) -> ExtReal:
    """Closed form log(M_0 t^p / M_p) on the quotient segment [mu_p, mu_{p+1}]."""
    t = ext(t)
    _require_nonneg(t)
    Mw = _weights(M)
    _require_log_convex(Mw, window, tol)
    _case2_guard(Mw, t, window)
    if t.is_pos_inf:
        return POS_INF
    p = _segment_index(Mw, t, window)
    if p == 0:
        return ZERO
    M0, Mp = Mw.value(0), Mw.value(p)
    if t.is_exact and M0.is_exact and Mp.is_exact:
        return ext(M0.raw * t.raw ** p / Mp.raw).log()
    return ext(float(M0.log()) + p * float(t.log()) - float(Mp.log()))


def omega_integral(M: SequenceSpec, t, window: Optional[int] = None,
                   tol: float = 1e-9) -> ExtReal:
    """Integral of Sigma(s)/s from 0 to t, telescoped to a closed form.

    sum_{q<p} q log(mu_{q+1}/mu_q) + p log(t/mu_p), where p is the segment
    index of t.  No quadrature: the integrand is exactly integrable.  For
    exact inputs the product of the factors is accumulated as one rational,
    which makes the agreement with the piecewise form exact.
    """
    t = ext(t)
    _require_nonneg(t)
    Mw = _weights(M)
    _require_log_convex(Mw, window, tol)
    _case2_guard(Mw, t, window)
    if t.is_pos_inf:
        return POS_INF
    p = _segment_index(Mw, t, window)
    if p == 0:
        return ZERO
    wv = [Mw.value(q) for q in range(p + 1)]
    mus = [None] + [wv[q] / wv[q - 1] for q in range(1, p + 1)]
    if t.is_exact and all(v.is_exact for v in wv):
        product = Fraction(1)
        for q in range(1, p):
            product *= (mus[q + 1].raw / mus[q].raw) ** q
        product *= (t.raw / mus[p].raw) ** p
        return ext(product).log()
    terms = [q * (float(mus[q + 1].log()) - float(mus[q].log())) for q in range(1, p)]
    terms.append(p * (float(t.log()) - float(mus[p].log())))
    return ext(math.fsum(terms))


def counting_function(M: SequenceSpec, window: Optional[int] = None,
                      tol: float = 1e-9) -> StepFunction:
    """Sigma(t) = #{p >= 1 : mu_p <= t} over the window, as a step function.

    Repeated quotient values collapse into one jump of the full multiplicity.
    The domain is [0, +inf) except for bounded quotients, where the integral
    representation only holds on [0, C).
    """
    Mw = _weights(M)
    _require_log_convex(Mw, window, tol)
    w = resolve_window(Mw, window)
    mus = quotients(Mw, w)
    pairs = sorted((mus[q], q) for q in range(1, w))
    jumps = []
    level = 0
    for x, q in pairs:
        level = max(level, q)  # convexity makes this the running index already
        jumps.append((x, level))
    regime = classify_regime(Mw, window)
    hi = POS_INF
    if regime.regime == CASE2:
        C = _limit_root(Mw, window)
        if C is not None:
            hi = C
    domain = Interval(ZERO, hi, True, False)
    return StepFunction(jumps=tuple(jumps), initial_level=0, domain=domain)


# -- Young conjugate and the associated sequence ---------------------------------


def phi_omega(M: SequenceSpec, window: Optional[int] = None) -> PiecewiseLinearFn:
    """s -> omega(e^s) as a piecewise-linear function (trace shifted by log M_0).

    Vanishes at -inf (omega(0) = 0).  For bounded quotients the domain is
    (-inf, a_iota); beyond it omega is +inf, available through extended
    evaluation.
    """
    a = _log_weights(M)
    regime = classify_regime(a, window)
    if regime.regime == CASE1:
        raise Unbounded("omega is +inf for every t > 0 when the minorant collapses")
    tr = trace_function(a, window)
    a0 = a.value(0)
    bps = tuple(
        Breakpoint(b.x, b.left_value + a0, b.right_value + a0, b.slope_right)
        for b in tr.breakpoints)
    return PiecewiseLinearFn(
        breakpoints=bps,
        domain=tr.domain,
        slope_left=tr.slope_left,
        value_at_minus_inf=None if tr.value_at_minus_inf is None else tr.value_at_minus_inf + a0,
        constant=None if tr.constant is None else tr.constant + a0,
    )


def young_conjugate(M: SequenceSpec, p: int, window: Optional[int] = None,
                    domain: str = "full") -> ExtReal:
    """sup_s {p s - omega(e^s)}, exact over the breakpoints of phi_omega.

    domain="restricted" names the bounded-quotient convention (sup over
    s < a_iota); the value is the same either way because omega(e^s) = +inf
    beyond a_iota kills those s in the full sup.
    """
    if domain not in ("full", "restricted"):
        raise ValueError("domain must be 'full' or 'restricted'")
    if p < 0 or int(p) != p:
        raise ValueError("the conjugate is taken at integer p >= 0")
    if p == 0:
        return ZERO  # omega >= 0 with omega(0) = 0, so sup(-omega) = 0
    phi = phi_omega(M, window)
    return phi.conjugate_at(ext(int(p))).value


def underline_sequence(M: SequenceSpec, window: Optional[int] = None) -> SequenceSpec:
    """The sequence M_0 sup_t t^p / e^{omega(t)} = M_0 e^{conjugate at p}.

    Log-convex, elementwise <= M, fixes M_0, and reproduces M exactly when M
    is already log-convex.
    """
    Mw = _weights(M)
    phi = phi_omega(Mw, window)
    w = resolve_window(Mw, window)
    M0 = Mw.value(0)
    out = [M0]
    for p in range(1, w):
        out.append(M0 * phi.conjugate_at(ext(p)).value.exp())
    return SequenceSpec(kind=WEIGHT, prefix=tuple(out), tail=ExplicitOnly())
