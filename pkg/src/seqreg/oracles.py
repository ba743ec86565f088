"""Brute-force reference implementations for tests and the --verify flag.

Everything here is deliberately naive: pairwise line enumeration, plain
loops, dense slope grids.  None of the engine modules are imported; the
only shared vocabulary is the extended-real number type.  Quadratic or
cubic cost in the window length is accepted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .extreal import ExtReal, ZERO, ext

__all__ = [
    "OracleReport",
    "SweepResult",
    "brute_minorant",
    "brute_omega",
    "brute_phi_sweep",
    "compare_values",
]


# ---------------------------------------------------------------------------
# deviation reports


@dataclass(frozen=True)
class OracleReport:
    """Elementwise comparison between an engine quantity and its oracle."""

    quantity: str
    main_value: object
    oracle_value: object
    max_abs_deviation: float
    max_rel_deviation: float
    witness: object

    def within(self, tol: float) -> bool:
        return self.max_abs_deviation <= tol

    def to_json(self) -> dict:
        return {
            "quantity": self.quantity,
            "main_value": _jsonify(self.main_value),
            "oracle_value": _jsonify(self.oracle_value),
            "max_abs_deviation": self.max_abs_deviation,
            "max_rel_deviation": self.max_rel_deviation,
            "witness": _jsonify(self.witness),
        }


def _jsonify(value):
    if isinstance(value, ExtReal):
        return value.to_json()
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, (list, tuple)):
        return [_jsonify(v) for v in value]
    return value


def _pair_deviation(main, oracle) -> float:
    x, y = ext(main), ext(oracle)
    if not x.is_finite or not y.is_finite:
        return 0.0 if x == y else math.inf
    return abs(float(x) - float(y))


def compare_values(quantity: str, pairs, witnesses=None) -> OracleReport:
    """Build an OracleReport from (main, oracle) pairs.

    witnesses labels each pair; defaults to the pair's position.
    """

    pairs = list(pairs)
    if witnesses is None:
        witnesses = list(range(len(pairs)))
    if not pairs:
        return OracleReport(quantity, None, None, 0.0, 0.0, None)
    worst = 0
    worst_dev = -1.0
    for i, (m, o) in enumerate(pairs):
        dev = _pair_deviation(m, o)
        if dev > worst_dev:
            worst_dev, worst = dev, i
    m, o = pairs[worst]
    scale = max(1.0, _finite_abs(m), _finite_abs(o))
    rel = worst_dev / scale if math.isfinite(worst_dev) else math.inf
    return OracleReport(quantity, m, o, max(worst_dev, 0.0), rel, witnesses[worst])


def _finite_abs(v) -> float:
    e = ext(v)
    return abs(float(e)) if e.is_finite else 0.0


# ---------------------------------------------------------------------------
# convex minorant by exhaustive line enumeration


def _rationalize(values: Sequence, what: str) -> list[Fraction]:
    out = []
    for i, v in enumerate(values):
        e = ext(v)
        if not e.is_finite:
            raise ValueError(f"{what} must be finite at every index, got {e} at {i}")
        raw = e.raw
        out.append(raw if isinstance(raw, Fraction) else Fraction(raw))
    return out


def _rationalize_allow_pos_inf(values: Sequence, what: str) -> list[Fraction | None]:
    """Like _rationalize but +inf entries become None (no constraint)."""
    out: list[Fraction | None] = []
    for i, v in enumerate(values):
        e = ext(v)
        if e.is_pos_inf:
            out.append(None)
            continue
        if not e.is_finite:
            raise ValueError(f"{what} must avoid -inf, got {e} at index {i}")
        raw = e.raw
        out.append(raw if isinstance(raw, Fraction) else Fraction(raw))
    return out


def brute_minorant(a: Sequence, slope_cap=None) -> list[ExtReal]:
    """Largest convex sequence below a, computed two independent ways.

    Route one enumerates every line through a pair of points, plus the
    slope-cap line through each point when a cap is given, keeps the
    lines lying below the whole sequence, and takes the pointwise sup.
    Route two evaluates the double conjugate sup_k {kp - sup_q (qk - a_q)}
    over the same slope candidates.  Both run in exact rational
    arithmetic and must agree before anything is returned.

    +inf entries impose no constraint and anchor no line; they are
    projected down onto the hull like everything else.
    """

    vals = _rationalize_allow_pos_inf(a, "oracle input")
    n = len(vals)
    if n == 0:
        return []
    if vals[0] is None:
        raise ValueError("oracle input needs a finite anchor a_0")
    cap: Fraction | None = None
    if slope_cap is not None:
        cap_e = ext(slope_cap)
        if cap_e.is_finite:
            raw = cap_e.raw
            cap = raw if isinstance(raw, Fraction) else Fraction(raw)
        # an infinite cap is no cap at all
    finite = [(p, v) for p, v in enumerate(vals) if v is not None]
    if len(finite) == 1:
        return [ext(v) if v is not None else ext(vals[0]) for v in vals]

    # route one: explicit supporting lines
    lines: list[tuple[Fraction, Fraction]] = []
    for i, (p, vp) in enumerate(finite):
        for q, vq in finite[i + 1:]:
            k = Fraction(vq - vp, q - p)
            if cap is not None and k > cap:
                continue
            lines.append((k, vp - k * p))
    if cap is not None:
        for p, vp in finite:
            lines.append((cap, vp - cap * p))
    admissible = [
        (k, d) for (k, d) in lines if all(k * q + d <= vq for q, vq in finite)
    ]
    route_one = [max(k * p + d for (k, d) in admissible) for p in range(n)]

    # route two: double conjugate over the same slope candidates
    slopes = {
        Fraction(vq - vp, q - p)
        for i, (p, vp) in enumerate(finite)
        for q, vq in finite[i + 1:]
    }
    if cap is not None:
        slopes = {k for k in slopes if k <= cap}
        slopes.add(cap)
    route_two = []
    for p in range(n):
        best = None
        for k in slopes:
            trace = max(q * k - vq for q, vq in finite)
            cand = k * p - trace
            if best is None or cand > best:
                best = cand
        route_two.append(best)

    assert route_one == route_two, (
        "brute_minorant self-check failed: line enumeration and double "
        f"conjugate disagree ({route_one} vs {route_two})"
    )
    return [ext(v) for v in route_one]


# ---------------------------------------------------------------------------
# associated function by plain loop


def brute_omega(M: Sequence, t, p_max: int) -> ExtReal:
    """max over p <= p_max of log(M_0 t^p / M_p), evaluated term by term."""

    te = ext(t)
    if te < ZERO:
        raise ValueError("brute_omega needs t >= 0")
    weights = []
    for i, v in enumerate(M):
        e = ext(v)
        if not e.is_finite or e <= ZERO:
            raise ValueError(f"oracle weights must be positive and finite, got {e} at {i}")
        weights.append(e)
    if not weights:
        raise ValueError("empty weight list")
    last = min(p_max, len(weights) - 1)
    if te == ZERO:
        return ZERO  # the p = 0 term is log 1, every other term is log 0
    best = None
    for p in range(last + 1):
        ratio = weights[0] * te ** p / weights[p]
        if best is None or ratio > best:
            best = ratio
    return best.log()


# ---------------------------------------------------------------------------
# stripe construction on a dense slope grid


@dataclass(frozen=True)
class SweepResult:
    """Grid-resolution image of a stripe-limited regularization."""

    regularized: list[ExtReal]
    principal_indices: list[int]
    discontinuity_indices: list[int]
    discontinuity_slopes: list[float]
    grid_start: float
    grid_stop: float
    grid_step: float
    ts: np.ndarray
    ms: np.ndarray
    As: np.ndarray

    def to_json(self) -> dict:
        return {
            "regularized": [v.to_json() for v in self.regularized],
            "principal_indices": self.principal_indices,
            "discontinuity_indices": self.discontinuity_indices,
            "discontinuity_slopes": self.discontinuity_slopes,
            "grid": [self.grid_start, self.grid_stop, self.grid_step],
        }


_MAX_GRID = 4_000_000


def brute_phi_sweep(
    a: Sequence,
    phi: Callable,
    slope_grid_step: float,
    t_min: float | None = None,
    t_max: float | None = None,
    tie_tol: float = 1e-9,
) -> SweepResult:
    """Simulate the stripe construction on a dense grid of slopes.

    For each grid slope t the admissible indices are p <= phi(t); the
    supporting value is min over those p of a_p - p t.  Principal indices
    are every index attaining that minimum somewhere on the grid, the
    trace samples are the negated minima, and the regularized sequence is
    recovered by maximizing p t - A(t) over the admissible part of the
    grid.  Everything is float; accuracy is bounded by the grid step.
    """

    if slope_grid_step <= 0:
        raise ValueError("slope_grid_step must be positive")
    vals = [float(f) for f in _rationalize(a, "sweep input")]
    n = len(vals)
    if n == 1:
        t0 = t_min if t_min is not None else 0.0
        return SweepResult(
            regularized=[ext(a[0])],
            principal_indices=[0],
            discontinuity_indices=[],
            discontinuity_slopes=[],
            grid_start=t0,
            grid_stop=t0,
            grid_step=slope_grid_step,
            ts=np.array([t0]),
            ms=np.array([0]),
            As=np.array([-vals[0]]),
        )

    diffs = [vals[p + 1] - vals[p] for p in range(n - 1)]
    last_threshold = _phi_threshold_estimate(phi, n - 1, max(diffs))
    if t_min is None:
        t_min = min(min(diffs), last_threshold) - 1.0
    if t_max is None:
        t_max = max(max(diffs), last_threshold) + 1.0
    count = int(math.floor((t_max - t_min) / slope_grid_step)) + 1
    if count > _MAX_GRID:
        raise ValueError(
            f"grid of {count} points exceeds the oracle budget; "
            "pass explicit t_min/t_max or a coarser step"
        )
    ts = t_min + slope_grid_step * np.arange(count)

    phi_vals = np.array([_phi_float(phi, t) for t in ts])
    arr = np.array(vals)
    idx = np.arange(n)
    # matrix of a_p - p t, masked where p exceeds the stripe width
    mat = arr[:, None] - idx[:, None] * ts[None, :]
    mat = np.where(idx[:, None] <= phi_vals[None, :], mat, np.inf)

    d = mat.min(axis=0)
    As = -d
    hit = np.abs(mat - d[None, :]) <= tie_tol * np.maximum(1.0, np.abs(d[None, :]))
    ms = np.where(hit, idx[:, None], -1).max(axis=0)
    principal = sorted(int(p) for p in np.unique(np.where(hit)[0]))

    # jumps of the trace: the normal per-cell drift of d is at most
    # (n - 1) * step, anything far beyond that is a discontinuity
    drop = d[:-1] - d[1:]
    gap = max(16.0 * n * slope_grid_step, 1e-9)
    disc_cells = np.nonzero(drop > gap)[0]
    disc_indices: list[int] = []
    disc_slopes: list[float] = []
    for cell in disc_cells:
        entrants = np.where(hit[:, cell + 1], idx, n)
        disc_indices.append(int(entrants.min()))
        disc_slopes.append(float(ts[cell] + 0.5 * slope_grid_step))

    regularized: list[ExtReal] = []
    for p in range(n):
        mask = phi_vals >= p
        if not mask.any():
            regularized.append(ext(vals[p]))
            continue
        proj = (p * ts - As)[mask].max()
        regularized.append(ext(min(float(proj), vals[p])))

    return SweepResult(
        regularized=regularized,
        principal_indices=principal,
        discontinuity_indices=disc_indices,
        discontinuity_slopes=disc_slopes,
        grid_start=float(ts[0]),
        grid_stop=float(ts[-1]),
        grid_step=slope_grid_step,
        ts=ts,
        ms=ms,
        As=As,
    )


def _phi_float(phi: Callable, t: float) -> float:
    v = ext(phi(ext(float(t))))
    return math.inf if v.is_pos_inf else float(v)


def _phi_threshold_estimate(phi: Callable, p: int, fallback: float) -> float:
    """Smallest grid-relevant t with phi(t) >= p, by doubling then bisection."""

    lo, hi = -1.0, 1.0
    for _ in range(200):
        if _phi_float(phi, hi) >= p:
            break
        hi *= 2.0
    else:
        return fallback
    for _ in range(200):
        if _phi_float(phi, lo) < p:
            break
        lo *= 2.0
    else:
        return fallback
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        if _phi_float(phi, mid) >= p:
            hi = mid
        else:
            lo = mid
    return hi
