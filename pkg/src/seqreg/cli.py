"""Command-line front end.

Subcommands: classify | minorant | assoc | trace | phireg | compare.
Results go to stdout as canonical JSON (sorted keys, compact separators,
one document per input file) or as CSV plot data; diagnostics go to
stderr.  Exit codes: 0 success, 1 parse failure, 2 regime or precondition
failure, 3 verify-mode deviation beyond the tolerance.

Multiple input files are processed concurrently; output order always
matches input order.
"""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from typing import Callable, Optional

import click

from .errors import ParseError, SeqRegError
from .extreal import ExtReal, ext
from .minorant import (
    MinorantResult,
    case1_regularize,
    case2_regularize,
    convex_minorant,
    log_convex_minorant,
    trace_function,
)
from .oracles import (
    OracleReport,
    brute_minorant,
    brute_omega,
    brute_phi_sweep,
    compare_values,
)
from .phireg import (
    compare_regularizations,
    make_phi,
    regularize_with_phi,
    counting_m_phi,
    trace_A_phi,
)
from .sequences import (
    CASE1,
    CASE2,
    SequenceSpec,
    classify_regime,
    is_log_convex,
    resolve_window,
    to_log_scale,
    to_weight_scale,
)
from .weights import (
    omega_direct,
    omega_double_tilde,
    omega_integral,
    omega_piecewise,
    omega_tilde,
)

EXIT_OK = 0
EXIT_PARSE = 1
EXIT_PRECONDITION = 2
EXIT_VERIFY = 3

_SWEEP_STEP = 1e-3  # grid step used by the phireg verify oracle


# ---------------------------------------------------------------------------
# option plumbing


def _check_window(ctx, param, value):
    if value < 4:
        raise click.BadParameter("window must be >= 4")
    return value


def _check_tol(ctx, param, value):
    if not (0.0 < value <= 1e-3):
        raise click.BadParameter("tolerance must lie in (0, 1e-3]")
    return value


def _common(fn):
    fn = click.argument("files", nargs=-1, required=True, type=click.Path())(fn)
    fn = click.option(
        "--window", type=int, default=64, show_default=True,
        callback=_check_window, help="Evaluation window length.")(fn)
    fn = click.option(
        "--tol", type=float, default=1e-9, show_default=True,
        envvar="SEQREG_TOLERANCE", callback=_check_tol,
        help="Numerical tolerance (env SEQREG_TOLERANCE).")(fn)
    return fn


def _canonical(payload) -> str:
    return json.dumps(payload, sort_keys=True, separators=(",", ":"))


def _load_spec(path: str) -> SequenceSpec:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = fh.read()
    except OSError as exc:
        raise ParseError(f"{path}: {exc.strerror or exc}")
    try:
        payload = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}")
    try:
        return SequenceSpec.from_json(payload)
    except ParseError as exc:
        raise ParseError(f"{path}: {exc}")


def _run_files(files, worker: Callable[[str], tuple[str, int, list[str]]]) -> None:
    """Run worker per file concurrently, emit outputs in input order."""

    def guarded(path: str) -> tuple[str, int, list[str]]:
        try:
            return worker(path)
        except ParseError as exc:
            return "", EXIT_PARSE, [f"{path}: parse error: {exc}"]
        except SeqRegError as exc:
            return "", EXIT_PRECONDITION, [f"{path}: {exc}"]

    if len(files) == 1:
        results = [guarded(files[0])]
    else:
        with ThreadPoolExecutor(max_workers=min(8, len(files))) as pool:
            results = list(pool.map(guarded, files))

    code = EXIT_OK
    out = click.get_text_stream("stdout")
    for text, status, diagnostics in results:
        if text:
            out.write(text)
        for line in diagnostics:
            click.echo(line, err=True)
        code = max(code, status)
    out.flush()
    if code != EXIT_OK:
        raise SystemExit(code)


def _parse_grid(spec: str) -> list[Fraction]:
    parts = spec.split(":")
    if len(parts) != 3:
        raise click.BadParameter("grid must look like start:stop:step")
    try:
        start, stop, step = (Fraction(p) for p in parts)
    except (ValueError, ZeroDivisionError):
        raise click.BadParameter(f"bad grid numbers in {spec!r}")
    if step <= 0 or stop < start:
        raise click.BadParameter("grid needs step > 0 and stop >= start")
    ts = []
    t = start
    while t <= stop:
        ts.append(t)
        t += step
    return ts


def _parse_loggrid(spec: str) -> list[float]:
    parts = spec.split(":")
    if len(parts) != 3:
        raise click.BadParameter("loggrid must look like start:stop:count")
    try:
        start, stop = Fraction(parts[0]), Fraction(parts[1])
        count = int(parts[2])
    except (ValueError, ZeroDivisionError):
        raise click.BadParameter(f"bad loggrid numbers in {spec!r}")
    if start <= 0 or stop < start or count < 2:
        raise click.BadParameter("loggrid needs 0 < start <= stop and count >= 2")
    lo, hi = math.log(float(start)), math.log(float(stop))
    return [math.exp(lo + (hi - lo) * i / (count - 1)) for i in range(count)]


def _csv_cell(value: Optional[ExtReal]) -> str:
    if value is None:
        return ""
    if value.is_pos_inf:
        return "inf"
    if value.is_neg_inf:
        return "-inf"
    return repr(float(value))


# ---------------------------------------------------------------------------
# group


@click.group()
def main() -> None:
    """Regularization toolkit for weight sequences and their traces."""


# ---------------------------------------------------------------------------
# classify


@main.command()
@_common
def classify(files, window, tol):
    """Report the growth regime and convexity of each sequence."""

    def worker(path: str):
        seq = _load_spec(path)
        regime = classify_regime(seq, window=window, tol=tol)
        convexity = is_log_convex(seq, window=window, tol=tol)
        payload = {
            "classification": regime.to_json(),
            "convexity": convexity.to_json(),
            "window": resolve_window(to_log_scale(seq), window),
        }
        return _canonical(payload) + "\n", EXIT_OK, []

    _run_files(files, worker)


# ---------------------------------------------------------------------------
# minorant


def _dispatch_minorant(seq: SequenceSpec, window: int, tol: float) -> MinorantResult:
    if seq.kind == "weight":
        return log_convex_minorant(seq, window=window, tol=tol)
    regime = classify_regime(seq, window=window, tol=tol)
    if regime.regime == CASE1:
        return case1_regularize(seq, window=window, tol=tol)
    if regime.regime == CASE2:
        return case2_regularize(seq, window=window, tol=tol)
    return convex_minorant(seq, window=window, tol=tol)


def _minorant_payload(result: MinorantResult) -> dict:
    full = result.to_json()
    payload = {
        "regularized": full["regularized"],
        "principal_indices": full["principal_indices"],
        "slopes": full["slopes"],
        "trace_breakpoints": full["trace"]["breakpoints"],
        "regime": full["regime"],
        "stable_prefix": full["stable_prefix"],
        "provisional_from": full["provisional_from"],
        "scale": full["scale"],
        "window": full["window"],
    }
    return payload


def _verify_minorant(seq: SequenceSpec, result: MinorantResult,
                     window: int, tol: float) -> tuple[OracleReport, bool]:
    if result.regime.regime == CASE1:
        # degenerate output; only the anchor is comparable
        report = compare_values(
            "minorant anchor vs input",
            [(to_log_scale(result.regularized).prefix[0], to_log_scale(seq).values(1)[0])],
        )
        return report, report.within(tol)
    log_in = to_log_scale(seq)
    w = resolve_window(log_in, window)
    original = log_in.values(w)
    engine = to_log_scale(result.regularized).prefix
    cap = result.regime.a_iota if result.regime.regime == CASE2 else None
    oracle = brute_minorant(list(original), slope_cap=cap)
    stable = min(len(engine), result.stable_prefix + 1)
    report = compare_values(
        "minorant stable prefix vs pairwise-line oracle",
        list(zip(engine[:stable], oracle[:stable])),
    )
    return report, report.within(tol)


@main.command()
@_common
@click.option("--verify", is_flag=True, help="Cross-check against the brute oracle.")
def minorant(files, window, tol, verify):
    """Largest convex (log-convex) minorant, regime-dispatched."""

    def worker(path: str):
        seq = _load_spec(path)
        result = _dispatch_minorant(seq, window, tol)
        payload = _minorant_payload(result)
        status = EXIT_OK
        diagnostics: list[str] = []
        if verify:
            report, ok = _verify_minorant(seq, result, window, tol)
            payload["verify"] = [report.to_json()]
            if not ok:
                status = EXIT_VERIFY
                diagnostics.append(
                    f"{path}: verify deviation {report.max_abs_deviation} "
                    f"exceeds tolerance {tol}")
        return _canonical(payload) + "\n", status, diagnostics

    _run_files(files, worker)


# ---------------------------------------------------------------------------
# assoc


_ASSOC_COLUMNS = (
    "t",
    "omega_direct",
    "omega_piecewise",
    "omega_integral",
    "omega_tilde",
    "omega_double_tilde",
)


def _assoc_row(seq: SequenceSpec, t, window: int, tol: float) -> list[Optional[ExtReal]]:
    te = ext(t)
    row: list[Optional[ExtReal]] = [te]
    try:
        row.append(omega_direct(seq, te, window=window).value)
    except SeqRegError:
        row.append(None)
    for fn in (omega_piecewise, omega_integral):
        try:
            row.append(fn(seq, te, window=window, tol=tol))
        except SeqRegError:
            row.append(None)
    try:
        row.append(omega_tilde(seq, te, window=window))
    except SeqRegError:
        row.append(None)
    try:
        row.append(omega_double_tilde(seq, te, window=window))
    except SeqRegError:
        row.append(None)
    return row


@main.command()
@_common
@click.option("--grid", "grid_spec", default="0:10:1/2", show_default=True,
              help="Evaluation grid start:stop:step.")
@click.option("--loggrid", "loggrid_spec", default=None,
              help="Log-spaced grid start:stop:count (overrides --grid).")
@click.option("--emit", type=click.Choice(["csv", "json"]), default="csv",
              show_default=True, help="Output format.")
@click.option("--verify", is_flag=True, help="Cross-check against the loop oracle.")
def assoc(files, window, tol, grid_spec, loggrid_spec, emit, verify):
    """Associated function values over a grid (plot-ready)."""

    if loggrid_spec is not None:
        ts = _parse_loggrid(loggrid_spec)
    else:
        ts = _parse_grid(grid_spec)

    def worker(path: str):
        seq = _load_spec(path)
        rows = [_assoc_row(seq, t, window, tol) for t in ts]
        status = EXIT_OK
        diagnostics: list[str] = []
        reports: list[OracleReport] = []
        if verify:
            weights = to_weight_scale(seq)
            w = resolve_window(weights, window)
            mvals = weights.values(w)
            finite_end = w
            for i in range(w):
                if not mvals[i].is_finite:
                    finite_end = i
                    break
            pairs = []
            witnesses = []
            for row in rows:
                t = row[0]
                # the truncated loop cannot see analytic divergence, so +inf
                # engine values are outside the comparison domain
                if row[1] is None or row[1].is_pos_inf:
                    continue
                try:
                    oracle = brute_omega(mvals[:finite_end], t, p_max=finite_end - 1)
                except ValueError:
                    continue
                pairs.append((row[1], oracle))
                witnesses.append(float(t))
            report = compare_values("omega_direct vs plain-loop oracle", pairs, witnesses)
            reports.append(report)
            if not report.within(tol):
                status = EXIT_VERIFY
                diagnostics.append(
                    f"{path}: verify deviation {report.max_abs_deviation} "
                    f"exceeds tolerance {tol}")
        if emit == "json":
            payload = {
                "columns": list(_ASSOC_COLUMNS),
                "rows": [
                    [None if v is None else v.to_json() for v in row] for row in rows
                ],
                "window": window,
            }
            if verify:
                payload["verify"] = [r.to_json() for r in reports]
            return _canonical(payload) + "\n", status, diagnostics
        lines = [",".join(_ASSOC_COLUMNS)]
        for row in rows:
            lines.append(",".join(_csv_cell(v) for v in row))
        for r in reports:
            lines.append("# verify: " + _canonical(r.to_json()))
        return "\n".join(lines) + "\n", status, diagnostics

    _run_files(files, worker)


# ---------------------------------------------------------------------------
# trace


@main.command()
@_common
@click.option("--verify", is_flag=True, help="Cross-check against the direct sup.")
@click.option("--extended", is_flag=True,
              help="Evaluate outside the natural domain as +inf.")
def trace(files, window, tol, verify, extended):
    """Trace function A(k) = sup_p (p k - a_p) as breakpoint JSON."""

    def worker(path: str):
        seq = _load_spec(path)
        fn = trace_function(seq, window=window, tol=tol)
        regime = classify_regime(seq, window=window, tol=tol)
        payload = {"trace": fn.to_json(), "regime": regime.to_json()}
        status = EXIT_OK
        diagnostics: list[str] = []
        if verify:
            log_seq = to_log_scale(seq)
            w = resolve_window(log_seq, window)
            vals = log_seq.values(w)
            ks = _trace_sample_slopes(fn)
            pairs = []
            witnesses = []
            for k in ks:
                direct = max(
                    (ext(p) * k - vals[p] for p in range(w) if vals[p].is_finite),
                )
                try:
                    engine = fn.evaluate(k, extended=extended)
                except SeqRegError:
                    continue
                pairs.append((engine, direct))
                witnesses.append(float(k))
            report = compare_values("trace vs direct sup", pairs, witnesses)
            payload["verify"] = [report.to_json()]
            if not report.within(tol):
                status = EXIT_VERIFY
                diagnostics.append(
                    f"{path}: verify deviation {report.max_abs_deviation} "
                    f"exceeds tolerance {tol}")
        return _canonical(payload) + "\n", status, diagnostics

    _run_files(files, worker)


def _trace_sample_slopes(fn) -> list[ExtReal]:
    xs = [bp.x for bp in fn.breakpoints if bp.x.is_finite]
    if not xs:
        return [ext(Fraction(n, 2)) for n in range(-4, 5)]
    lo, hi = xs[0], xs[-1]
    span = hi - lo
    if span == ext(0):
        span = ext(1)
    out = list(xs)
    for i in range(1, 8):
        out.append(lo + span * Fraction(i, 8))
    out.append(lo - span * Fraction(1, 4))
    seen = fn.domain
    return [k for k in out if seen.contains(k)]


# ---------------------------------------------------------------------------
# phireg


def _resolve_phi_or_exit(descriptor: str):
    try:
        return _resolve_phi(descriptor)
    except ParseError as exc:
        click.echo(f"bad --phi descriptor: {exc}", err=True)
        raise SystemExit(EXIT_PARSE)
    except SeqRegError as exc:
        click.echo(f"bad --phi descriptor: {exc}", err=True)
        raise SystemExit(EXIT_PRECONDITION)


def _resolve_phi(descriptor: str):
    if descriptor.startswith("piecewise:"):
        payload = descriptor.split(":", 1)[1]
        if os.path.isfile(payload):
            try:
                with open(payload, "r", encoding="utf-8") as fh:
                    payload = fh.read()
            except OSError as exc:
                raise ParseError(f"{descriptor}: {exc.strerror or exc}")
        return make_phi("piecewise:" + payload)
    return make_phi(descriptor)


@main.command()
@_common
@click.option("--phi", "phi_descriptor", default="exp", show_default=True,
              help="exp | expaffine:a,b | blowup:T | infinite | piecewise:file")
@click.option("--emit", type=click.Choice(["json", "csv"]), default="json",
              show_default=True, help="Output format.")
@click.option("--grid", "grid_spec", default=None,
              help="Extra CSV sample slopes start:stop:step.")
@click.option("--extended", is_flag=True,
              help="Evaluate outside the natural domain as +inf.")
@click.option("--verify", is_flag=True, help="Cross-check against the sweep oracle.")
def phireg(files, window, tol, phi_descriptor, emit, grid_spec, extended, verify):
    """Stripe-limited regularization driven by a regularizing function."""

    phi = _resolve_phi_or_exit(phi_descriptor)
    grid = _parse_grid(grid_spec) if grid_spec else None

    def worker(path: str):
        seq = _load_spec(path)
        result = regularize_with_phi(seq, phi, window=window, tol=tol)
        status = EXIT_OK
        diagnostics: list[str] = []
        reports: list[OracleReport] = []
        if verify:
            report, ok = _verify_phireg(seq, phi, result, window, tol)
            reports.append(report)
            if not ok:
                status = EXIT_VERIFY
                diagnostics.append(
                    f"{path}: verify deviation {report.max_abs_deviation} "
                    "exceeds the sweep resolution bound")
        if emit == "json":
            payload = result.to_json()
            if verify:
                payload["verify"] = [r.to_json() for r in reports]
            return _canonical(payload) + "\n", status, diagnostics
        ts: list[ExtReal] = [bp.x for bp in result.trace.breakpoints if bp.x.is_finite]
        if grid is not None:
            ts.extend(ext(t) for t in grid)
        elif ts:
            lo, hi = ts[0], ts[-1]
            span = hi - lo if hi > lo else ext(1)
            ts.extend(lo + span * Fraction(i, 16) for i in range(-4, 21))
        ts = sorted(set(ts))
        lines = ["t,m,A"]
        for t in ts:
            try:
                a_val = trace_A_phi(result, t, extended=extended)
            except SeqRegError:
                lines.append(f"{_csv_cell(t)},,")
                continue
            m_val = counting_m_phi(result, t)
            lines.append(f"{_csv_cell(t)},{m_val},{_csv_cell(a_val)}")
        for r in reports:
            lines.append("# verify: " + _canonical(r.to_json()))
        return "\n".join(lines) + "\n", status, diagnostics

    _run_files(files, worker)


def _verify_phireg(seq: SequenceSpec, phi, result, window: int, tol: float):
    log_seq = to_log_scale(seq)
    w = resolve_window(log_seq, window)
    vals = log_seq.values(w)
    if not all(v.is_finite for v in vals):
        report = compare_values("phireg vs sweep oracle (skipped: non-finite window)", [])
        return report, True
    if (phi.infinite and result.J_right.is_finite) or result.J_right.is_neg_inf:
        # slope-capped and collapsing runs have no uncapped sweep analogue
        report = compare_values("phireg vs sweep oracle (skipped: capped regime)", [])
        return report, True
    sweep = brute_phi_sweep([v for v in vals], phi, _SWEEP_STEP)
    pairs = list(zip(result.regularized.prefix, sweep.regularized))
    report = compare_values("phireg regularized vs sweep oracle", pairs)
    # the sweep is exact only up to its grid resolution
    bound = max(tol, 8.0 * w * _SWEEP_STEP)
    ok = report.within(bound)
    engine_set = set(result.principal_indices)
    if not set(sweep.principal_indices) <= engine_set:
        ok = False
    wide = ext(2 * _SWEEP_STEP)
    for p, interval in zip(result.principal_indices, result.intervals):
        if interval.end - interval.start > wide and p not in sweep.principal_indices:
            ok = False
    return report, ok


# ---------------------------------------------------------------------------
# compare


@main.command()
@_common
@click.option("--phi", "phi_descriptor", required=True,
              help="First regularizing function.")
@click.option("--phi2", "phi2_descriptor", required=True,
              help="Second regularizing function.")
def compare(files, window, tol, phi_descriptor, phi2_descriptor):
    """Order two regularizations against each other and the convex floor."""

    phi1 = _resolve_phi_or_exit(phi_descriptor)
    phi2 = _resolve_phi_or_exit(phi2_descriptor)

    def worker(path: str):
        seq = _load_spec(path)
        report = compare_regularizations(seq, phi1, phi2, window=window, tol=tol)
        return _canonical(report.to_json()) + "\n", EXIT_OK, []

    _run_files(files, worker)


if __name__ == "__main__":
    main()
