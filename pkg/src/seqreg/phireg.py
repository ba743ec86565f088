"""Regularization of a log-scale sequence against a regularizing function.

A regularizing function phi gates which points S_p = (p, a_p) are visible at
slope t: exactly those with p <= phi(t).  D_t is the lowest line of slope t
through a visible point.  As t sweeps from -inf upward, the highest index on
D_t is the counting function m(t); its jump locations are the entry times t_i
of the principal indices p_i, and -intercept(D_t) is the trace A(t).

The sweep here is event-driven rather than grid-driven: with the current
principal index P, a later index q takes over at

    e_q = max( slope(S_P -> S_q), threshold(q) ),   threshold(q) = inf{t : phi(t) >= q}

because q must be both visible and at-or-below the current line.  The next
event is min_q e_q; everything (event times, intercept comparisons, hence the
principal / discontinuity classification) is exact rational arithmetic when
the inputs are.  Thresholds are rationalized once per (phi, p) so the engine
and the recovery conjugate use identical cutoffs.

Events where the entering point sits strictly below the old line are the
indices of discontinuity: visibility arrived later than tangency, so the trace
jumps up.  At a batch event (several points tied at the minimum intercept)
all tied points become principal and their intervals degenerate to a point.

phi identically +inf is the ungated case: the sweep reduces to the plain
convex minorant walk (standard regime), the slope-capped walk (bounded
quotients, cap a_iota), or the degenerate collapse (case 1).  It runs through
the same sweep code with -inf thresholds, which keeps it an independent
implementation from the minorant module and lets the two be cross-checked.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional

from .errors import (
    AxiomViolation,
    InfiniteEntryUnsupported,
    InfinityAtZero,
    NotComparable,
    ParseError,
)
from .extreal import ExtReal, NEG_INF, ONE, POS_INF, ZERO, ext
from .piecewise import (
    Breakpoint,
    EMPTY_INTERVAL,
    Interval,
    PiecewiseLinearFn,
    StepFunction,
)
from .sequences import (
    CASE1,
    CASE2,
    SequenceSpec,
    classify_regime,
    resolve_window,
    to_log_scale,
)
from .tails import LOG, ExplicitOnly


# -- regularizing functions ------------------------------------------------------


class RegularizingFunction:
    """phi: R -> [0, +inf], non-decreasing, 0 at -inf, +inf at blowup_T or +inf.

    threshold(p) = inf{t : phi(t) >= p} is the quantity the sweep actually
    uses; it is computed exactly (rational) per descriptor and cached, so all
    consumers see one consistent set of cutoffs.
    """

    def __init__(self, tag: str, eval_fn: Callable[[ExtReal], ExtReal],
                 threshold_fn: Callable[[int], ExtReal],
                 blowup_T: Optional[ExtReal] = None, infinite: bool = False,
                 descriptor: str = ""):
        self.tag = tag
        self.blowup_T = blowup_T
        self.infinite = infinite
        self.descriptor = descriptor or tag
        self._eval_fn = eval_fn
        self._threshold_fn = threshold_fn
        self._cache: dict[int, ExtReal] = {}

    def eval(self, t) -> ExtReal:
        t = ext(t)
        if self.blowup_T is not None and t >= self.blowup_T:
            return POS_INF
        return self._eval_fn(t)

    __call__ = eval

    def threshold(self, p: int) -> ExtReal:
        if p < 0:
            raise ValueError("threshold index must be >= 0")
        if p == 0:
            return NEG_INF  # phi >= 0 everywhere
        got = self._cache.get(p)
        if got is None:
            got = self._threshold_fn(p)
            self._cache[p] = got
        return got

    def to_json(self) -> dict:
        return {"descriptor": self.descriptor}

    def __repr__(self) -> str:
        return f"RegularizingFunction({self.descriptor})"


def _rational_log(p: int) -> ExtReal:
    if p == 1:
        return ZERO
    return ext(Fraction(math.log(p)))


def _parse_frac(text: str, what: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as e:
        raise ParseError(f"cannot read {what} from {text!r}: {e}") from None


def _piecewise_phi(knots: list[tuple[Fraction, Fraction]]) -> RegularizingFunction:
    if len(knots) < 2:
        raise AxiomViolation("III", None, "need at least two knots to grow to +inf")
    xs = [k[0] for k in knots]
    vs = [k[1] for k in knots]
    for i in range(1, len(xs)):
        if xs[i] <= xs[i - 1]:
            raise AxiomViolation("IV", float(xs[i]),
                                 "knot abscissae must be strictly increasing")
        if vs[i] < vs[i - 1]:
            raise AxiomViolation("I", float(xs[i]), "values must be non-decreasing")
    if vs[0] != 0:
        raise AxiomViolation("II", float(xs[0]),
                             "the first knot value must be 0 (phi -> 0 at -inf)")
    final_slope = (vs[-1] - vs[-2]) / (xs[-1] - xs[-2])
    if final_slope <= 0:
        raise AxiomViolation("III", float(xs[-1]),
                             "the last segment must rise (phi -> +inf)")

    def eval_fn(t: ExtReal) -> ExtReal:
        if t.is_neg_inf or (t.is_exact and t.raw <= xs[0]) or (not t.is_exact and float(t) <= xs[0]):
            return ext(vs[0])
        if t.is_pos_inf:
            return POS_INF
        x = t.raw if t.is_exact else Fraction(float(t))
        if x >= xs[-1]:
            return ext(vs[-1] + final_slope * (x - xs[-1]))
        for i in range(1, len(xs)):
            if x <= xs[i]:
                s = (vs[i] - vs[i - 1]) / (xs[i] - xs[i - 1])
                return ext(vs[i - 1] + s * (x - xs[i - 1]))
        raise AssertionError("unreachable")

    def threshold_fn(p: int) -> ExtReal:
        target = Fraction(p)
        if target > vs[-1]:
            return ext(xs[-1] + (target - vs[-1]) / final_slope)
        for i in range(1, len(xs)):
            if vs[i] >= target:
                if vs[i] == vs[i - 1]:
                    continue  # flat segment never reaches a strictly larger value
                s = (vs[i] - vs[i - 1]) / (xs[i] - xs[i - 1])
                x = xs[i - 1] + (target - vs[i - 1]) / s
                return ext(max(x, xs[i - 1]))
        return ext(xs[-1] + (target - vs[-1]) / final_slope)

    desc = "piecewise:" + ";".join(f"{x},{v}" for x, v in knots)
    return RegularizingFunction("piecewise", eval_fn, threshold_fn, descriptor=desc)


def make_phi(descriptor) -> RegularizingFunction:
    """Build a regularizing function from a descriptor.

    Accepted forms: "exp", "expaffine:ALPHA,BETA", "blowup:T", "infinite",
    "piecewise:[[x,v],...]" (or a dict {"kind": ..., ...}).  All numeric
    parameters are read as exact rationals.
    """
    if isinstance(descriptor, dict):
        kind = descriptor.get("kind")
        if kind == "piecewise":
            knots = [(Fraction(str(x)), Fraction(str(v))) for x, v in descriptor["knots"]]
            return _piecewise_phi(knots)
        arg = descriptor.get("args", "")
        descriptor = f"{kind}:{arg}" if arg else str(kind)
    if not isinstance(descriptor, str):
        raise ParseError(f"unsupported phi descriptor {descriptor!r}")
    text = descriptor.strip()
    head, _, arg = text.partition(":")
    head = head.lower()

    if head == "exp":
        return RegularizingFunction("exp", lambda t: t.exp(), _rational_log,
                                    descriptor="exp")
    if head == "expaffine":
        parts = arg.split(",")
        if len(parts) != 2:
            raise ParseError("expaffine needs two parameters: alpha,beta")
        alpha = _parse_frac(parts[0], "alpha")
        beta = _parse_frac(parts[1], "beta")
        if alpha < 0:
            raise AxiomViolation("I", None, f"alpha = {alpha} < 0 makes phi decreasing")
        if alpha == 0:
            raise AxiomViolation("III", None, "alpha = 0 makes phi constant, never +inf")

        def ea_eval(t: ExtReal, a=alpha, b=beta) -> ExtReal:
            return (ext(a) * t + ext(b)).exp()

        def ea_threshold(p: int, a=alpha, b=beta) -> ExtReal:
            return (_rational_log(p) - ext(b)) / ext(a)

        return RegularizingFunction("expaffine", ea_eval, ea_threshold,
                                    descriptor=f"expaffine:{alpha},{beta}")
    if head == "blowup":
        T = ext(_parse_frac(arg, "T"))

        def bu_eval(t: ExtReal, T=T) -> ExtReal:
            return ONE / (T - t) if t < T else POS_INF

        def bu_threshold(p: int, T=T) -> ExtReal:
            return T - ONE / ext(p)

        return RegularizingFunction("blowup", bu_eval, bu_threshold, blowup_T=T,
                                    descriptor=f"blowup:{arg}")
    if head == "infinite":
        return RegularizingFunction("infinite", lambda t: POS_INF,
                                    lambda p: NEG_INF, infinite=True,
                                    descriptor="infinite")
    if head == "piecewise":
        try:
            knots_raw = json.loads(arg)
        except json.JSONDecodeError as e:
            raise ParseError(f"piecewise knots must be JSON [[x,v],...]: {e}") from None
        knots = [(Fraction(str(x)), Fraction(str(v))) for x, v in knots_raw]
        return _piecewise_phi(knots)
    raise ParseError(f"unknown phi descriptor {text!r} "
                     "(use exp | expaffine:a,b | blowup:T | piecewise:... | infinite)")


# -- result records ----------------------------------------------------------------


@dataclass(frozen=True)
class PhiInterval:
    """[start, end): the slope range during which one index stays on top."""

    start: ExtReal
    end: ExtReal

    def to_json(self) -> dict:
        return {"start": self.start.to_json(), "end": self.end.to_json()}


@dataclass(frozen=True)
class PhiSegment:
    """Line of the given slope through (anchor_index, anchor_value), covering
    output indices [span_start, span_end)."""

    slope: ExtReal
    anchor_index: int
    anchor_value: ExtReal
    span_start: int
    span_end: int

    def value_at(self, p: int) -> ExtReal:
        return self.anchor_value + self.slope * (p - self.anchor_index)

    def to_json(self) -> dict:
        return {
            "slope": self.slope.to_json(),
            "anchor_index": self.anchor_index,
            "anchor_value": self.anchor_value.to_json(),
            "span": [self.span_start, self.span_end],
        }


@dataclass(frozen=True)
class PhiRegResult:
    regularized: SequenceSpec
    principal_indices: tuple[int, ...]
    discontinuity_indices: tuple[int, ...]
    intervals: tuple[PhiInterval, ...]
    segments: tuple[PhiSegment, ...]
    counting: StepFunction
    trace: PiecewiseLinearFn
    J_right: ExtReal
    finite_principal: bool
    window: int
    provisional_from: int
    phi_descriptor: str

    def to_json(self) -> dict:
        return {
            "regularized": [v.to_json() for v in self.regularized.prefix],
            "principal_indices": list(self.principal_indices),
            "discontinuity_indices": list(self.discontinuity_indices),
            "intervals": [iv.to_json() for iv in self.intervals],
            "segments": [s.to_json() for s in self.segments],
            "counting": self.counting.to_json(),
            "trace": self.trace.to_json(),
            "J_right": self.J_right.to_json(),
            "finite_principal": self.finite_principal,
            "window": self.window,
            "provisional_from": self.provisional_from,
            "phi": self.phi_descriptor,
        }


# -- the sweep ----------------------------------------------------------------------


def _case1_result(vals: list[ExtReal], w: int, phi: RegularizingFunction) -> PhiRegResult:
    # every real slope is eventually undercut: J is empty, only the -inf
    # conventions survive (m(-inf) = 0, A(-inf) = -a_0)
    out = [vals[0]] + [NEG_INF] * (w - 1)
    trace = PiecewiseLinearFn(breakpoints=(), domain=EMPTY_INTERVAL,
                              slope_left=ZERO, value_at_minus_inf=ZERO - vals[0])
    counting = StepFunction(jumps=(), initial_level=0, domain=EMPTY_INTERVAL)
    regularized = SequenceSpec(kind=LOG, prefix=tuple(out), tail=ExplicitOnly())
    return PhiRegResult(
        regularized=regularized,
        principal_indices=(0,),
        discontinuity_indices=(),
        intervals=(),
        segments=(),
        counting=counting,
        trace=trace,
        J_right=NEG_INF,
        finite_principal=True,
        window=w,
        provisional_from=w,
        phi_descriptor=phi.descriptor,
    )


def regularize_with_phi(a: SequenceSpec, phi: RegularizingFunction,
                        window: Optional[int] = None, tol: float = 1e-9) -> PhiRegResult:
    """Event-driven sweep computing the full regularization record.

    Preconditions: a_0 finite; -inf entries only under phi = infinite (where
    they collapse the construction); a window ending in +inf entries needs a
    blowup phi (the only class where cofinitely-+inf sequences make sense).
    """
    seq = to_log_scale(a)
    w = resolve_window(seq, window)
    vals = seq.values(w)
    if not vals[0].is_finite:
        raise InfinityAtZero(f"a_0 must be finite, got {vals[0]}")

    regime = None
    cap: Optional[ExtReal] = phi.blowup_T
    if phi.infinite:
        regime = classify_regime(seq, window, tol)
        if regime.regime == CASE1:
            return _case1_result(vals, w, phi)
        if regime.regime == CASE2:
            cap = regime.a_iota
    else:
        for p in range(1, w):
            if vals[p].is_neg_inf:
                raise InfiniteEntryUnsupported(
                    f"a_{p} = -inf: only the ungated phi handles collapsing sequences")
        if phi.blowup_T is None:
            last_finite = max((p for p in range(w) if vals[p].is_finite), default=0)
            if last_finite < w - 1:
                raise InfiniteEntryUnsupported(
                    "window ends in +inf entries; without a blowup point the "
                    "regularization of a cofinitely-infinite sequence is undefined")

    # sweep state: per principal index (index, entry time); batch members
    # share the entry time and all but the last get degenerate intervals
    principal: list[tuple[int, ExtReal]] = [(0, NEG_INF)]
    disc: list[int] = []
    events: list[tuple[ExtReal, ExtReal, ExtReal, int]] = []  # (time, left_A, right_A, top)
    P = 0
    stopped_by_cap = False

    while True:
        best: Optional[ExtReal] = None
        blocked = False
        for q in range(P + 1, w):
            v = vals[q]
            if v.is_pos_inf:
                continue
            slope = (v - vals[P]) / (q - P)
            e_q = slope if slope >= phi.threshold(q) else phi.threshold(q)
            if cap is not None and not e_q < cap:
                blocked = True
                continue
            if best is None or e_q < best:
                best = e_q
        if best is None:
            stopped_by_cap = blocked
            break
        tau = best
        cands = []
        for q in range(P + 1, w):
            v = vals[q]
            if v.is_pos_inf:
                continue
            slope = (v - vals[P]) / (q - P)
            e_q = slope if slope >= phi.threshold(q) else phi.threshold(q)
            if e_q == tau:
                assert tau >= phi.threshold(q)  # visibility always precedes takeover
                cands.append(q)
        c_P = vals[P] - ext(P) * tau
        c_min = c_P
        for q in cands:
            c_q = vals[q] - ext(q) * tau
            if c_q < c_min:
                c_min = c_q
        batch = sorted(q for q in cands if vals[q] - ext(q) * tau == c_min)
        if c_min < c_P:
            disc.append(batch[0])
        events.append((tau, ZERO - c_P, ZERO - c_min, batch[-1]))
        for q in batch:
            principal.append((q, tau))
        P = batch[-1]

    indices = [p for p, _ in principal]
    J_right = cap if cap is not None else POS_INF
    finite_principal = stopped_by_cap

    # intervals and segments
    intervals: list[PhiInterval] = []
    segments: list[PhiSegment] = []
    out = list(vals)
    n = len(principal)
    for i, (p_i, t_i) in enumerate(principal):
        if i + 1 < n:
            p_next, t_next = principal[i + 1]
            intervals.append(PhiInterval(t_i, t_next))
            segments.append(PhiSegment(t_next, p_i, vals[p_i], p_i, p_next))
            for p in range(p_i + 1, p_next):
                out[p] = vals[p_i] + t_next * (p - p_i)
        else:
            intervals.append(PhiInterval(t_i, J_right))
            if stopped_by_cap and cap is not None:
                # the limiting line of slope cap through the last principal point
                segments.append(PhiSegment(cap, p_i, vals[p_i], p_i, w))
                for p in range(p_i + 1, w):
                    out[p] = vals[p_i] + cap * (p - p_i)

    # trace and counting: one breakpoint per distinct event time
    bps: list[Breakpoint] = []
    jumps: list[tuple[ExtReal, int]] = []
    for tau, left, right, top in events:
        if bps and bps[-1].x == tau:
            prev = bps[-1]
            bps[-1] = Breakpoint(prev.x, prev.left_value, right, ext(top))
        else:
            bps.append(Breakpoint(tau, left, right, ext(top)))
        jumps.append((tau, top))
    domain = Interval(NEG_INF, J_right, False, False)
    trace = PiecewiseLinearFn(breakpoints=tuple(bps), domain=domain,
                              slope_left=ZERO, value_at_minus_inf=ZERO - vals[0],
                              constant=None if bps else ZERO - vals[0])
    counting = StepFunction(jumps=tuple(jumps), initial_level=0, domain=domain)

    declared = regime if phi.infinite else None
    regularized = SequenceSpec(kind=LOG, prefix=tuple(out), tail=ExplicitOnly(),
                               declared_regime=declared)

    provisional_from = _stable_boundary(phi, principal, indices, w, stopped_by_cap)
    return PhiRegResult(
        regularized=regularized,
        principal_indices=tuple(indices),
        discontinuity_indices=tuple(disc),
        intervals=tuple(intervals),
        segments=tuple(segments),
        counting=counting,
        trace=trace,
        J_right=J_right,
        finite_principal=finite_principal,
        window=w,
        provisional_from=provisional_from,
        phi_descriptor=phi.descriptor,
    )


def _stable_boundary(phi: RegularizingFunction, principal: list[tuple[int, ExtReal]],
                     indices: list[int], w: int, stopped_by_cap: bool) -> int:
    """First index whose value could change if the sequence were extended.

    For gated phi, a point beyond the window only becomes visible at
    threshold(w), so every event strictly before that time is final.  For the
    ungated phi the last accepted edge is always at risk (hull semantics).
    """
    if phi.infinite:
        if len(indices) >= 2:
            return indices[-2] + 1
        return indices[-1] + 1
    horizon = phi.threshold(w)
    stable = 0
    for i, (p_i, t_i) in enumerate(principal):
        end = principal[i + 1][1] if i + 1 < len(principal) else None
        if end is not None and end < horizon:
            stable = principal[i + 1][0]
        else:
            break
    return stable + 1


# -- evaluation of the stored record ------------------------------------------------


def counting_m_phi(result: PhiRegResult, t) -> int:
    """m(t): the highest index on D_t, from the stored step structure."""
    t = ext(t)
    if t.is_neg_inf:
        return 0
    return result.counting.value(t)


def trace_A_phi(result: PhiRegResult, t, extended: bool = False) -> ExtReal:
    """A(t) = t m(t) - a_{m(t)}; -a_0 at t = -inf; +inf outside J when extended."""
    return result.trace.evaluate(ext(t), extended=extended)


def recover_sequence(trace: PiecewiseLinearFn, phi: RegularizingFunction, p: int) -> ExtReal:
    """sup{p t - A(t) : t in J, phi(t) >= p}, exact over the trace breakpoints.

    Open right ends contribute their limit (a supremum attained only in the
    limit); p = 0 admits t = -inf, where the sup equals a_0 exactly.
    """
    if p < 0:
        raise ValueError("index must be >= 0")
    lower = phi.threshold(p)
    return trace.conjugate_at(ext(p), lower=lower).value


# -- comparisons ---------------------------------------------------------------------


_PROBE_GRID = [Fraction(n, 4) for n in range(-64, 65, 3)]


@dataclass(frozen=True)
class ComparisonReport:
    larger: str  # "phi1" | "phi2" | "equal"
    ordered_ok: bool
    convex_floor_ok: bool
    witness_index: Optional[int]

    def to_json(self) -> dict:
        return {
            "larger": self.larger,
            "ordered_ok": self.ordered_ok,
            "convex_floor_ok": self.convex_floor_ok,
            "witness_index": self.witness_index,
        }


def _dominates(phi_big: RegularizingFunction, phi_small: RegularizingFunction) -> bool:
    pts = [ext(x) for x in _PROBE_GRID]
    for T in (phi_big.blowup_T, phi_small.blowup_T):
        if T is not None:
            pts.extend([T - ext(Fraction(1, 100)), T, T + ext(Fraction(1, 100))])
    return all(phi_big.eval(t) >= phi_small.eval(t) for t in pts)


def _leq(x: ExtReal, y: ExtReal, tol: float) -> bool:
    if x <= y:
        return True
    if x.is_finite and y.is_finite:
        fx, fy = float(x), float(y)
        return fx <= fy + tol * max(1.0, abs(fx), abs(fy))
    return False


def compare_regularizations(a: SequenceSpec, phi1: RegularizingFunction,
                            phi2: RegularizingFunction, window: Optional[int] = None,
                            tol: float = 1e-9) -> ComparisonReport:
    """Order two regularizations: a larger phi sees more points, so it digs deeper.

    Checks a^{larger} <= a^{smaller} <= a elementwise, and that the ungated
    regularization (the convex minorant) floors both.
    """
    big, small, label = None, None, "equal"
    if _dominates(phi2, phi1) and _dominates(phi1, phi2):
        big, small, label = phi2, phi1, "equal"
    elif _dominates(phi2, phi1):
        big, small, label = phi2, phi1, "phi2"
    elif _dominates(phi1, phi2):
        big, small, label = phi1, phi2, "phi1"
    else:
        raise NotComparable("neither regularizing function dominates the other "
                            "on the probe grid")
    r_big = regularize_with_phi(a, big, window, tol)
    r_small = regularize_with_phi(a, small, window, tol)
    floor = regularize_with_phi(a, make_phi("infinite"), window, tol)
    seq = to_log_scale(a)
    w = min(r_big.window, r_small.window, floor.window)
    ordered_ok = True
    convex_floor_ok = True
    witness: Optional[int] = None
    for p in range(w):
        x_big = r_big.regularized.prefix[p]
        x_small = r_small.regularized.prefix[p]
        x_orig = seq.value(p)
        x_floor = floor.regularized.prefix[p]
        if not (_leq(x_big, x_small, tol) and _leq(x_small, x_orig, tol)):
            ordered_ok = False
            witness = p if witness is None else witness
        if not (_leq(x_floor, x_big, tol) and _leq(x_big, x_orig, tol)):
            convex_floor_ok = False
            witness = p if witness is None else witness
    return ComparisonReport(label, ordered_ok, convex_floor_ok, witness)


def trace_invariance_check(a: SequenceSpec, phi: RegularizingFunction,
                           window: Optional[int] = None, tol: float = 1e-9,
                           samples: int = 100) -> bool:
    """The trace computed from a and from a^phi must be the same function."""
    r1 = regularize_with_phi(a, phi, window, tol)
    r2 = regularize_with_phi(r1.regularized, phi, r1.window, tol)
    t1, t2 = r1.trace, r2.trace
    if t1.domain.is_empty != t2.domain.is_empty:
        return False

    def same(x: ExtReal, y: ExtReal) -> bool:
        if x == y:
            return True
        if x.is_finite and y.is_finite:
            fx, fy = float(x), float(y)
            return abs(fx - fy) <= tol * max(1.0, abs(fx), abs(fy))
        return False

    if not same(t1.evaluate(NEG_INF), t2.evaluate(NEG_INF)):
        return False
    if t1.domain.is_empty:
        return True
    probe = sorted({b.x for b in t1.breakpoints} | {b.x for b in t2.breakpoints})
    for x in probe:
        if not (same(t1.evaluate(x), t2.evaluate(x)) and same(t1.left_limit(x), t2.left_limit(x))):
            return False
    if probe:
        lo, hi = float(probe[0]) - 2.0, float(probe[-1]) + 2.0
        if t1.domain.hi.is_finite:
            hi = min(hi, float(t1.domain.hi) - 1e-6)
        step = (hi - lo) / max(samples, 1)
        for i in range(samples):
            x = ext(lo + step * i)
            if not t1.domain.contains(x):
                continue
            if not same(t1.evaluate(x), t2.evaluate(x)):
                return False
    return True
