"""Convex minorants of log-scale sequences and their traces.

The construction walks supporting lines of minimal slope: starting from the
anchor (0, a_0), each step finds the smallest chord slope to a later point
(ties resolved to the smallest index, so collinear points all become
principal).  Values between principal indices are the line values; points at
+inf project down onto the hull.  Everything is exact when the inputs are
rational.

Three regimes:

  standard   slopes grow without bound; the walk covers the whole window.
  case1      some entry is -inf (or liminf a_p/p = -inf): every supporting
             line can be pushed down forever, so the minorant collapses to
             (a_0, -inf, -inf, ...) and the trace degenerates.
  case2      slopes are capped at the limit slope a_iota: the walk accepts
             chords of slope < a_iota only and finishes with a segment of
             slope exactly a_iota through the last principal point.

The trace k -> sup_p (p*k - a_p) is assembled from the accepted edges; its
conjugate reproduces the minorant values (round trip exact on rationals).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .errors import InfinityAtZero, RegimeMismatch, UnknownAIota
from .extreal import ExtReal, NEG_INF, POS_INF, ZERO, ext
from .piecewise import (
    Breakpoint,
    EMPTY_INTERVAL,
    Interval,
    PiecewiseLinearFn,
    REAL_LINE,
)
from .sequences import (
    CASE1,
    CASE2,
    INDETERMINATE,
    STANDARD,
    RegimeClassification,
    SequenceSpec,
    classify_regime,
    resolve_window,
    to_log_scale,
)
from .tails import LOG, AffineLog, ExplicitOnly, FactorialPower, Geometric

_TAIL_SCAN_CAP = 200_000


@dataclass(frozen=True)
class SupportLine:
    """A line t -> slope * t + intercept lying below every window point."""

    slope: ExtReal
    intercept: ExtReal
    touching: tuple[int, ...]

    def value_at(self, p: int) -> ExtReal:
        return self.slope * p + self.intercept

    def to_json(self) -> dict:
        return {
            "slope": self.slope.to_json(),
            "intercept": self.intercept.to_json(),
            "touching": list(self.touching),
        }


@dataclass(frozen=True)
class MinorantResult:
    regularized: SequenceSpec
    principal_indices: tuple[int, ...]
    edges: tuple[SupportLine, ...]
    trace: PiecewiseLinearFn
    regime: RegimeClassification
    stable_prefix: int
    provisional_from: int
    window: int
    scale: str
    finite_principal: Optional[bool] = None

    def to_json(self) -> dict:
        return {
            "regularized": [v.to_json() for v in self.regularized.prefix],
            "scale": self.scale,
            "principal_indices": list(self.principal_indices),
            "slopes": [e.slope.to_json() for e in self.edges],
            "edges": [e.to_json() for e in self.edges],
            "trace": self.trace.to_json(),
            "regime": self.regime.to_json(),
            "stable_prefix": self.stable_prefix,
            "provisional_from": self.provisional_from,
            "window": self.window,
            "finite_principal": self.finite_principal,
        }


# -- helpers -----------------------------------------------------------------


def support_line(a: SequenceSpec, k, window: Optional[int] = None) -> SupportLine:
    """Lowest line of slope k below the window points: intercept inf_p (a_p - p k)."""
    seq = to_log_scale(a)
    w = resolve_window(seq, window)
    k = ext(k)
    vals = seq.values(w)
    best: Optional[ExtReal] = None
    for p in range(w):
        v = vals[p]
        if v.is_pos_inf:
            continue
        c = v - k * p
        if best is None or c < best:
            best = c
    if best is None:
        raise InfinityAtZero("no finite point to support")
    touching = tuple(p for p in range(w) if vals[p].is_finite and vals[p] - k * p == best)
    return SupportLine(k, best, touching)


def _touching_indices(vals: list[ExtReal], slope: ExtReal, intercept: ExtReal) -> tuple[int, ...]:
    out = []
    for p, v in enumerate(vals):
        if not v.is_finite:
            continue
        lv = slope * p + intercept
        if v == lv:
            out.append(p)
        elif not (v.is_exact and lv.is_exact):
            fv, fl = float(v), float(lv)
            if abs(fv - fl) <= 1e-12 * max(1.0, abs(fv), abs(fl)):
                out.append(p)
    return tuple(out)


def _min_window_chord(vals: list[ExtReal], P: int, w: int) -> Optional[tuple[ExtReal, int]]:
    aP = vals[P]
    best: Optional[tuple[ExtReal, int]] = None
    for q in range(P + 1, w):
        v = vals[q]
        if v.is_pos_inf:
            continue
        s = (v - aP) / (q - P)
        if best is None or s < best[0]:
            best = (s, q)
    return best


def _tail_chord(seq: SequenceSpec, P: int, aP: ExtReal, w: int):
    """Best chord from (P, aP) into the closed-form tail beyond the window.

    Returns ("event", slope, q) for an attained minimal chord, ("floor", c)
    when tail chords only approach c from above (never attained), or None when
    the tail admits no closed-form reasoning.
    """
    tail = seq.tail
    start = max(P + 1, w, len(seq.prefix))
    if isinstance(tail, (AffineLog, Geometric)):
        c = tail.slope_limit()
        diff = c * P - aP
        if diff >= ZERO:
            return ("floor", c)
        s = (tail.value(start, LOG) - aP) / (start - P)
        return ("event", s, start)
    if isinstance(tail, FactorialPower):
        prev: Optional[ExtReal] = None
        best: Optional[tuple[ExtReal, int]] = None
        q = start
        for _ in range(_TAIL_SCAN_CAP):
            s = (tail.value(q, LOG) - aP) / (q - P)
            if best is None or s < best[0]:
                best = (s, q)
            if prev is not None and s > prev:
                break
            prev = s
            q += 1
        if best is None:
            return None
        return ("event", best[0], best[1])
    return None


def _trace_from_edges(a0: ExtReal, edge_data: list[tuple[ExtReal, int, ExtReal, int]],
                      domain: Interval) -> PiecewiseLinearFn:
    """edge_data: (slope, anchor index, anchor value, target index), slopes non-decreasing."""
    if not edge_data:
        return PiecewiseLinearFn(
            breakpoints=(),
            domain=domain,
            slope_left=ZERO,
            value_at_minus_inf=ZERO - a0,
            constant=ZERO - a0,
        )
    bps: list[Breakpoint] = []
    for slope, anchor, a_anchor, target in edge_data:
        value = slope * anchor - a_anchor
        if bps and bps[-1].x == slope:
            # collinear continuation: same breakpoint, steeper outgoing slope
            prev = bps[-1]
            bps[-1] = Breakpoint(prev.x, prev.left_value, prev.right_value, ext(target))
        else:
            bps.append(Breakpoint(slope, value, value, ext(target)))
    return PiecewiseLinearFn(
        breakpoints=tuple(bps),
        domain=domain,
        slope_left=ZERO,
        value_at_minus_inf=ZERO - a0,
    )


def _stability(principal: list[int], w: int, proven: bool) -> tuple[int, int]:
    if proven:
        return w - 1, w
    if len(principal) >= 2:
        stable = principal[-2]
    else:
        stable = principal[-1]
    return stable, stable + 1


def _check_anchor(vals: list[ExtReal]) -> None:
    if not vals:
        raise InfinityAtZero("empty window")
    if not vals[0].is_finite:
        raise InfinityAtZero(f"index 0 must be finite, got {vals[0]}")


# -- the three regime constructions ------------------------------------------------


def convex_minorant(a: SequenceSpec, window: Optional[int] = None,
                    tol: float = 1e-9) -> MinorantResult:
    """Greatest convex minorant of a log-scale sequence (standard regime)."""
    seq = to_log_scale(a)
    regime = classify_regime(seq, window, tol)
    if regime.regime in (CASE1, CASE2):
        raise RegimeMismatch(
            f"{regime.describe()}: convex minorant needs the standard regime "
            f"(use the dedicated case operations)", regime.regime)
    w = resolve_window(seq, window)
    vals = seq.values(w)
    _check_anchor(vals)

    out = list(vals)
    principal = [0]
    edge_data: list[tuple[ExtReal, int, ExtReal, int]] = []
    edges: list[SupportLine] = []
    can_extend = isinstance(seq.tail, FactorialPower)
    proven = can_extend  # falsified below if the tail never got to prove the last edge
    P = 0

    while P < w - 1:
        window_best = _min_window_chord(vals, P, w)
        tail_best = _tail_chord(seq, P, vals[P], w) if can_extend else None
        use_tail = False
        if tail_best is not None and tail_best[0] == "event":
            if window_best is None or tail_best[1] < window_best[0]:
                use_tail = True
        if window_best is None and not use_tail:
            break  # only +inf entries remain and nothing proves the tail edge
        if use_tail:
            slope, q = tail_best[1], tail_best[2]
        else:
            slope, q = window_best
        aP = vals[P]
        edge_data.append((slope, P, aP, q))
        intercept = aP - slope * P
        edges.append(SupportLine(slope, intercept, _touching_indices(vals, slope, intercept)))
        for p in range(P + 1, min(q, w)):
            out[p] = aP + slope * (p - P)
        if q < w:
            principal.append(q)
            P = q
        else:
            P = w  # the edge provably runs past the window: done
            break
    if not can_extend:
        proven = False
    elif P < w - 1:
        proven = False

    stable, provisional = _stability(principal, w, proven and P >= w - 1)
    regularized = SequenceSpec(kind=LOG, prefix=tuple(out), tail=ExplicitOnly(),
                               declared_regime=regime)
    trace = _trace_from_edges(vals[0], edge_data, REAL_LINE)
    return MinorantResult(
        regularized=regularized,
        principal_indices=tuple(principal),
        edges=tuple(edges),
        trace=trace,
        regime=regime,
        stable_prefix=stable,
        provisional_from=provisional,
        window=w,
        scale=LOG,
    )


def case1_regularize(a: SequenceSpec, window: Optional[int] = None,
                     tol: float = 1e-9) -> MinorantResult:
    """Degenerate minorant (a_0, -inf, -inf, ...) for the collapsing regime."""
    seq = to_log_scale(a)
    regime = classify_regime(seq, window, tol)
    if regime.regime != CASE1:
        raise RegimeMismatch(
            f"{regime.describe()}: this operation is only for Case 1", regime.regime)
    w = resolve_window(seq, window)
    vals = seq.values(w)
    _check_anchor(vals)
    out = [vals[0]] + [NEG_INF] * (w - 1)
    trace = PiecewiseLinearFn(
        breakpoints=(),
        domain=EMPTY_INTERVAL,
        slope_left=ZERO,
        value_at_minus_inf=ZERO - vals[0],
    )
    regularized = SequenceSpec(kind=LOG, prefix=tuple(out), tail=ExplicitOnly(),
                               declared_regime=regime)
    return MinorantResult(
        regularized=regularized,
        principal_indices=(0,),
        edges=(),
        trace=trace,
        regime=regime,
        stable_prefix=w - 1,
        provisional_from=w,
        window=w,
        scale=LOG,
        finite_principal=True,
    )


def case2_regularize(a: SequenceSpec, window: Optional[int] = None,
                     a_iota=None, tol: float = 1e-9) -> MinorantResult:
    """Slope-capped minorant for sequences with finite limit slope a_iota.

    Chords of slope < a_iota are accepted exactly as in the standard walk;
    once no remaining point offers one, the construction closes with the
    segment of slope a_iota through the last principal point (the lowest
    admissible supporting line in the limit).
    """
    seq = to_log_scale(a)
    regime = classify_regime(seq, window, tol)
    if regime.regime in (STANDARD, CASE1):
        raise RegimeMismatch(
            f"{regime.describe()}: slope-capped minorant needs Case 2", regime.regime)
    cap = ext(a_iota) if a_iota is not None else regime.a_iota
    if cap is None:
        raise UnknownAIota(
            "Case 2 needs the limit slope a_iota: declare it or use a closed-form tail")
    if regime.a_iota is not None and a_iota is not None:
        gap = abs(float(cap) - float(regime.a_iota))
        if gap > tol * max(1.0, abs(float(regime.a_iota))):
            raise UnknownAIota(
                f"a_iota = {cap} contradicts the classified limit slope {regime.a_iota}")
    if regime.regime == INDETERMINATE:
        regime = RegimeClassification(CASE2, cap, regime.evidence_window, "declared")

    w = resolve_window(seq, window)
    vals = seq.values(w)
    _check_anchor(vals)

    out = list(vals)
    principal = [0]
    edge_data: list[tuple[ExtReal, int, ExtReal, int]] = []
    edges: list[SupportLine] = []
    closed_form_tail = isinstance(seq.tail, (AffineLog, Geometric))
    P = 0
    stopped_by_cap = False
    proven_stop = False

    while P < w - 1:
        window_best = _min_window_chord(vals, P, w)
        tail_best = _tail_chord(seq, P, vals[P], w) if closed_form_tail else None
        best: Optional[tuple[ExtReal, int]] = None
        if window_best is not None and window_best[0] < cap:
            best = window_best
        if tail_best is not None and tail_best[0] == "event" and tail_best[1] < cap:
            if best is None or tail_best[1] < best[0]:
                best = (tail_best[1], tail_best[2])
        if best is None:
            stopped_by_cap = True
            if closed_form_tail:
                # the tail chords never dip below the cap: the stop is final
                proven_stop = tail_best is None or tail_best[0] == "floor" or not tail_best[1] < cap
            break
        slope, q = best
        aP = vals[P]
        edge_data.append((slope, P, aP, q))
        intercept = aP - slope * P
        edges.append(SupportLine(slope, intercept, _touching_indices(vals, slope, intercept)))
        for p in range(P + 1, min(q, w)):
            out[p] = aP + slope * (p - P)
        if q < w:
            principal.append(q)
            P = q
        else:
            P = w
            break

    if stopped_by_cap:
        anchor = principal[-1]
        aP = vals[anchor]
        for p in range(anchor + 1, w):
            out[p] = aP + cap * (p - anchor)

    # stability: a proven cap stop pins everything; otherwise window evidence
    proven = stopped_by_cap and proven_stop
    stable, provisional = _stability(principal, w, proven)
    domain = Interval(NEG_INF, cap, False, False)
    trace = _trace_from_edges(vals[0], edge_data, domain)
    regularized = SequenceSpec(kind=LOG, prefix=tuple(out), tail=ExplicitOnly(),
                               declared_regime=regime)
    return MinorantResult(
        regularized=regularized,
        principal_indices=tuple(principal),
        edges=tuple(edges),
        trace=trace,
        regime=regime,
        stable_prefix=stable,
        provisional_from=provisional,
        window=w,
        scale=LOG,
        finite_principal=stopped_by_cap,
    )


# -- trace API ----------------------------------------------------------------------


def trace_function(a: SequenceSpec, window: Optional[int] = None,
                   tol: float = 1e-9) -> PiecewiseLinearFn:
    """The map k -> sup_p (p*k - a_p) as a piecewise-linear function.

    Standard regime: defined on all of R.  Case 2: defined on (-inf, a_iota).
    Case 1 degenerates (the sup is +inf at every real k) and raises; the
    conventional extension lives on the degenerate record of
    :func:`case1_regularize`.
    """
    seq = to_log_scale(a)
    regime = classify_regime(seq, window, tol)
    if regime.regime == CASE1:
        raise RegimeMismatch(
            f"{regime.describe()}: the trace is +inf at every real slope; "
            "only the value at -inf survives", regime.regime)
    if regime.regime == CASE2:
        return case2_regularize(a, window, tol=tol).trace
    return convex_minorant(a, window, tol).trace


def reconstruct_from_trace(trace: PiecewiseLinearFn, p: int) -> ExtReal:
    """Conjugate of the trace at integer p: sup_k (p*k - A(k)).

    Exact over the breakpoints; open right ends contribute their limit value
    (a supremum attained only in the limit), and the conventional point at
    -inf contributes a_0 for p = 0.
    """
    if p < 0:
        raise ValueError("index must be >= 0")
    return trace.conjugate_at(p).value


def log_convex_minorant(M: SequenceSpec, window: Optional[int] = None,
                        tol: float = 1e-9) -> MinorantResult:
    """Largest log-convex minorant on the weight scale, any regime.

    Dispatches on the regime, exponentiates the log-scale result, and copies
    the original entries at principal indices (where equality is exact).
    """
    if M.kind != "weight":
        raise ValueError("log-convex minorant expects a weight-scale sequence")
    a = to_log_scale(M)
    regime = classify_regime(a, window, tol)
    if regime.regime == CASE1:
        base = case1_regularize(a, window, tol)
    elif regime.regime == CASE2:
        base = case2_regularize(a, window, tol=tol)
    else:
        base = convex_minorant(a, window, tol)
    w = base.window
    weights = [v.exp() for v in base.regularized.prefix]
    originals = M.values(w)
    for p in base.principal_indices:
        weights[p] = originals[p]
    regularized = SequenceSpec(kind="weight", prefix=tuple(weights), tail=ExplicitOnly(),
                               declared_regime=base.regime)
    return MinorantResult(
        regularized=regularized,
        principal_indices=base.principal_indices,
        edges=base.edges,
        trace=base.trace,
        regime=base.regime,
        stable_prefix=base.stable_prefix,
        provisional_from=base.provisional_from,
        window=w,
        scale="weight",
        finite_principal=base.finite_principal,
    )


@dataclass(frozen=True)
class Case2LimitReport:
    root_at_window_end: ExtReal
    m_iota: ExtReal
    gap: float
    within_tol: bool
    witness_index: Optional[int]
    witness_ratio: Optional[ExtReal]

    def to_json(self) -> dict:
        return {
            "root_at_window_end": self.root_at_window_end.to_json(),
            "m_iota": self.m_iota.to_json(),
            "gap": self.gap,
            "within_tol": self.within_tol,
            "witness_index": self.witness_index,
            "witness_ratio": None if self.witness_ratio is None else self.witness_ratio.to_json(),
        }


def case2_limit_check(M: SequenceSpec, window: Optional[int] = None,
                      tol: float = 1e-2) -> Case2LimitReport:
    """Check the trend (M^lc_p)^(1/p) -> M_iota at the window end.

    Also looks for a non-equivalence witness: when M grows much faster than
    its minorant somewhere in the window (the limsup indicator is +inf), the
    index with the largest ratio M_p / M^lc_p is reported.
    """
    result = log_convex_minorant(M, window)
    if result.regime.regime != CASE2:
        raise RegimeMismatch(
            f"{result.regime.describe()}: the limit check is a Case 2 statement",
            result.regime.regime)
    w = result.window
    m_iota = result.regime.a_iota.exp()
    root = result.regularized.prefix[w - 1].root(w - 1)
    gap = abs(float(root) - float(m_iota))
    witness_index = None
    witness_ratio = None
    originals = M.values(w)
    best = None
    for p in range(1, w):
        lc = result.regularized.prefix[p]
        if lc == ZERO or not originals[p].is_finite:
            continue
        ratio = originals[p] / lc
        if best is None or ratio > best:
            best = ratio
            if ratio > ext(10) ** 3:
                witness_index, witness_ratio = p, ratio
    return Case2LimitReport(
        root_at_window_end=root,
        m_iota=m_iota,
        gap=gap,
        within_tol=gap <= tol,
        witness_index=witness_index,
        witness_ratio=witness_ratio,
    )
