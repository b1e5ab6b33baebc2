"""Command-line front end.

Subcommands: curve (correlation curves as CSV with reference columns),
verify (bound checks as JSON), sweep (deformed-family crossing tables),
search (harmonic colouring search), quantum (reference curves), slope
(the pi/2 slope probe).  Angles cross the boundary in units of pi;
radians stay internal.

Exit codes: 0 success, 1 a definite bound violation was found, 2 bad
usage or configuration, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from typing import Sequence

import numpy as np

from . import bounds as bounds_mod
from . import search as search_mod
from .colourings import load_colouring, make_catalogue
from .correlation import (
    ClosedFormDomainError,
    CorrelationCurve,
    QuadratureError,
    SamplingPlan,
    closed_form,
    curve_for,
    format_sig,
    read_curve_csv,
    write_curve_csv,
)
from .quantum import (
    TwoQubitState,
    mc_quantum_correlation,
    parse_state_text,
    singlet_correlation,
    twirl,
    werner_correlation,
)

PI = math.pi

DEFAULT_SEED = 0x42D
DEFAULT_N = 1_000_000
DEFAULT_TOL = 1e-8


class UsageError(ValueError):
    pass


def parse_grid(spec: str) -> np.ndarray:
    """Parse "start:stop:count" (units of pi) into a radian grid."""
    parts = spec.split(":")
    if len(parts) != 3:
        raise UsageError(f"grid {spec!r} must be start:stop:count")
    try:
        start, stop = float(parts[0]), float(parts[1])
        count = int(parts[2])
    except ValueError as exc:
        raise UsageError(f"bad grid {spec!r}: {exc}") from None
    if not 0.0 <= start < stop <= 1.0:
        raise UsageError(f"grid {spec!r} must satisfy 0 <= start < stop <= 1")
    if count < 2:
        raise UsageError(f"grid count {count} must be at least 2")
    return np.linspace(start * PI, stop * PI, count)


def _load_config(path: str | None) -> dict:
    if not path:
        return {}
    try:
        with open(path) as fh:
            config = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {path!r}: {exc}") from None
    if not isinstance(config, dict):
        raise UsageError(f"config {path!r} must hold a JSON object")
    return config


def _merged(args: argparse.Namespace, config: dict, key: str, default):
    value = getattr(args, key, None)
    if value is None:
        value = config.get(key, default)
    return value


def _resolve_colouring(label: str):
    if label.startswith("@"):
        return load_colouring(label[1:])
    if label.endswith(".json"):
        return load_colouring(label)
    return make_catalogue(label)


def _open_out(path: str | None):
    if path in (None, "-"):
        return sys.stdout, False
    return open(path, "w", newline=""), True


def _c1_extended(theta: float) -> float:
    if theta > PI / 2.0:
        return -closed_form("1", PI - theta)
    return closed_form("1", theta)


def _theorem1_pair(theta: float) -> tuple[float, float]:
    t = min(theta, PI - theta)
    if t < 1e-12:
        return -1.0, 1.0
    report = bounds_mod.theorem1_bounds(t)
    return report.lower, report.upper


REFERENCE_COLUMNS = {
    "c1": _c1_extended,
    "neg_c1": lambda t: -_c1_extended(t),
    "q_singlet": singlet_correlation,
    "theorem1_lower": lambda t: _theorem1_pair(t)[0],
    "theorem1_upper": lambda t: _theorem1_pair(t)[1],
}


def run_curve(args: argparse.Namespace) -> int:
    config = _load_config(args.config)
    label = _merged(args, config, "colouring", None)
    if label is None:
        raise UsageError("curve requires --colouring")
    method = _merged(args, config, "method", "closed_form")
    grid = parse_grid(_merged(args, config, "grid", "0:0.5:101"))
    jobs = int(_merged(args, config, "jobs", 1))
    colouring = _resolve_colouring(str(label))
    plan = None
    if method == "mc":
        plan = SamplingPlan(
            int(_merged(args, config, "seed", DEFAULT_SEED)),
            int(_merged(args, config, "n", DEFAULT_N)),
        )
    curve = curve_for(
        colouring,
        grid,
        method,
        plan=plan,
        tol=float(_merged(args, config, "tol", DEFAULT_TOL)),
        jobs=jobs,
    )
    fh, owned = _open_out(_merged(args, config, "out", None))
    try:
        write_curve_csv(curve, fh, references=REFERENCE_COLUMNS)
    finally:
        if owned:
            fh.close()
    return 0


def run_verify(args: argparse.Namespace) -> int:
    config = _load_config(args.config)
    curve_file = _merged(args, config, "curve_file", None)
    if curve_file:
        # pre-computed curve: check it as given, no recomputation
        try:
            with open(curve_file, newline="") as fh:
                curve = read_curve_csv(fh)
        except OSError as exc:
            raise UsageError(f"cannot read curve {curve_file!r}: {exc}") from None
        reports = bounds_mod.verify_curve(curve)
        label, method = curve.colouring_label, curve.method
    else:
        label = _merged(args, config, "colouring", None)
        if label is None:
            raise UsageError("verify requires --colouring or --curve-file")
        method = _merged(args, config, "method", "closed_form")
        grid = parse_grid(_merged(args, config, "grid", "0.005:0.5:100"))
        colouring = _resolve_colouring(str(label))
        plan = None
        if method == "mc":
            plan = SamplingPlan(
                int(_merged(args, config, "seed", DEFAULT_SEED)),
                int(_merged(args, config, "n", DEFAULT_N)),
            )
        reports = bounds_mod.verify_colouring(
            colouring,
            grid,
            method,
            plan=plan,
            tol=float(_merged(args, config, "tol", DEFAULT_TOL)),
            jobs=int(_merged(args, config, "jobs", 1)),
        )
        label = colouring.label
    text = bounds_mod.report_to_json(label, method, reports)
    fh, owned = _open_out(_merged(args, config, "out", None))
    try:
        fh.write(text + "\n")
    finally:
        if owned:
            fh.close()
    return 0 if all(r.satisfied for r in reports) else 1


def _parse_delta_grid(spec: str) -> np.ndarray:
    parts = spec.split(":")
    if len(parts) != 3:
        raise UsageError(f"delta grid {spec!r} must be start:stop:count")
    start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
    if count < 1:
        raise UsageError("delta grid count must be at least 1")
    return np.linspace(start * PI, stop * PI, count)


def run_sweep(args: argparse.Namespace) -> int:
    config = _load_config(args.config)
    family = _merged(args, config, "family", "3_delta")
    reference = _merged(args, config, "reference", "c1")
    tol = float(_merged(args, config, "tol", 1e-4))
    jobs = int(_merged(args, config, "jobs", 1))
    delta = _merged(args, config, "delta", None)
    fh, owned = _open_out(_merged(args, config, "out", None))
    try:
        if family == "3_delta" and delta is not None:
            # single-deformation mode: curve table plus crossing summary
            d = float(delta) * PI
            grid = parse_grid(_merged(args, config, "grid", "0.34:0.5:81"))
            fh.write("theta_over_pi,c_3_delta,c_3,c_1,q_singlet\n")
            for t in grid:
                row = (
                    format_sig(t / PI),
                    format_sig(closed_form("3_delta", t, delta=d)),
                    format_sig(closed_form("3", t)),
                    format_sig(closed_form("1", t)),
                    format_sig(singlet_correlation(t)),
                )
                fh.write(",".join(row) + "\n")
            hit = search_mod.find_crossing(
                lambda t: closed_form("3_delta", t, delta=d),
                search_mod._REFERENCES[reference],
                (PI / 3.0 + 1e-9, PI / 2.0 - 1e-4),
                tol,
            )
            print(
                f"crossing vs {reference}: theta/pi = {hit.theta_star / PI:.6f} "
                f"(bracket width {hit.bracket_width / PI:.2e} pi)",
                file=sys.stderr,
            )
        elif family == "3_delta":
            grid = _parse_delta_grid(
                _merged(args, config, "delta_grid", "-0.0556:0.0417:25")
            )
            result = search_mod.sweep_delta(grid, reference, tol, jobs=jobs)
            search_mod.sweep_to_csv(result, fh)
            print(
                f"best delta/pi = {result.best_delta / PI:.6f} with crossing "
                f"theta/pi = {result.best_theta / PI:.6f}",
                file=sys.stderr,
            )
        elif family == "2_Delta":
            from .correlation import correlation_quadrature

            grid = _parse_delta_grid(_merged(args, config, "delta_grid", "0:0.0833:13"))
            fh.write("Delta_over_pi,theta_star_over_pi,reference\n")
            best = None
            for cap in grid:
                colouring = make_catalogue("2_Delta", Delta=float(cap))
                try:
                    hit = search_mod.find_crossing(
                        lambda t: correlation_quadrature(colouring, t, 1e-6),
                        lambda t: -search_mod._REFERENCES[reference](t),
                        (PI / 3.0 + 1e-9, PI / 2.0 - 1e-4),
                        tol,
                    )
                    star = hit.theta_star
                    fh.write(f"{format_sig(cap / PI)},{format_sig(star / PI)},neg_{reference}\n")
                    if best is None or star < best[0]:
                        best = (star, cap)
                except search_mod.NoCrossingError:
                    fh.write(f"{format_sig(cap / PI)},,neg_{reference}\n")
            if best is not None:
                print(
                    f"best Delta/pi = {best[1] / PI:.6f} with exit theta/pi = "
                    f"{best[0] / PI:.6f}",
                    file=sys.stderr,
                )
        else:
            raise UsageError(f"unknown family {family!r}; expected 3_delta or 2_Delta")
    finally:
        if owned:
            fh.close()
    return 0


def run_search(args: argparse.Namespace) -> int:
    config = _load_config(args.config)
    theta = _merged(args, config, "theta", None)
    if theta is None:
        raise UsageError("search requires --theta (units of pi)")
    plan = SamplingPlan(
        int(_merged(args, config, "seed", DEFAULT_SEED)),
        int(_merged(args, config, "n", 20_000)),
    )
    outcome = search_mod.harmonic_search(
        float(theta) * PI,
        int(_merged(args, config, "lmax", 3)),
        restarts=int(_merged(args, config, "restarts", 16)),
        plan=plan,
        azimuthal_only=bool(_merged(args, config, "azimuthal_only", False)),
        max_iter=int(_merged(args, config, "max_iter", 400)),
        jobs=int(_merged(args, config, "jobs", 1)),
    )
    fh, owned = _open_out(_merged(args, config, "out", None))
    try:
        fh.write(search_mod.search_report_json(outcome) + "\n")
    finally:
        if owned:
            fh.close()
    return 0


def _resolve_state(args: argparse.Namespace, config: dict) -> TwoQubitState:
    state_file = _merged(args, config, "state_file", None)
    if state_file:
        try:
            with open(state_file) as fh:
                return parse_state_text(fh.read())
        except OSError as exc:
            raise UsageError(f"cannot read state file {state_file!r}: {exc}") from None
    name = _merged(args, config, "state", "singlet")
    return TwoQubitState.named(str(name))


def run_quantum(args: argparse.Namespace) -> int:
    config = _load_config(args.config)
    state = _resolve_state(args, config)
    grid = parse_grid(_merged(args, config, "grid", "0:0.5:51"))
    use_mc = bool(_merged(args, config, "mc", False))
    w = twirl(state)
    plan = SamplingPlan(
        int(_merged(args, config, "seed", DEFAULT_SEED)),
        int(_merged(args, config, "n", 100_000)),
    )
    fh, owned = _open_out(_merged(args, config, "out", None))
    try:
        fh.write("theta_over_pi,value,stderr,method,state_r\n")
        for t in grid:
            if use_mc:
                value, stderr = mc_quantum_correlation(state, t, plan)
                row = (
                    format_sig(t / PI),
                    format_sig(value),
                    format_sig(stderr),
                    "mc",
                    format_sig(w.r),
                )
            else:
                row = (
                    format_sig(t / PI),
                    format_sig(werner_correlation(w, t)),
                    "",
                    "werner",
                    format_sig(w.r),
                )
            fh.write(",".join(row) + "\n")
    finally:
        if owned:
            fh.close()
    return 0


def run_slope(args: argparse.Namespace) -> int:
    config = _load_config(args.config)
    label = str(_merged(args, config, "colouring", "3"))
    h = float(_merged(args, config, "h", 1e-3))
    estimate = search_mod.slope_at_half_pi(_resolve_colouring(label), h=h)
    payload = {
        "colouring": label,
        "slope": estimate.slope,
        "abs_slope": abs(estimate.slope),
        "step": estimate.step,
        "c_at_half_pi": estimate.c_at_half_pi,
        "reference_abs_slope": estimate.reference,
    }
    fh, owned = _open_out(_merged(args, config, "out", None))
    try:
        fh.write(json.dumps(payload, indent=2) + "\n")
    finally:
        if owned:
            fh.close()
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spherebell",
        description="Correlations of antipodal sphere colourings and their "
        "Bell-type bounds",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", help="JSON file with the same keys as the flags")
        p.add_argument("--out", help="output path (default: stdout)")
        p.add_argument("--jobs", type=int, help="worker threads (default 1)")

    p_curve = sub.add_parser("curve", help="correlation curve as CSV")
    common(p_curve)
    p_curve.add_argument("--colouring", help="catalogue label, label:param, or @file.json")
    p_curve.add_argument("--method", choices=("mc", "quadrature", "closed_form"))
    p_curve.add_argument("--grid", help="start:stop:count in units of pi")
    p_curve.add_argument("--seed", type=lambda s: int(s, 0))
    p_curve.add_argument("--n", type=int, help="Monte Carlo samples")
    p_curve.add_argument("--tol", type=float)
    p_curve.set_defaults(func=run_curve)

    p_verify = sub.add_parser("verify", help="bound verification as JSON")
    common(p_verify)
    p_verify.add_argument("--colouring")
    p_verify.add_argument(
        "--curve-file",
        dest="curve_file",
        help="verify a curve CSV as-is instead of computing one",
    )
    p_verify.add_argument("--method", choices=("mc", "quadrature", "closed_form"))
    p_verify.add_argument("--grid")
    p_verify.add_argument("--seed", type=lambda s: int(s, 0))
    p_verify.add_argument("--n", type=int)
    p_verify.add_argument("--tol", type=float)
    p_verify.set_defaults(func=run_verify)

    p_sweep = sub.add_parser("sweep", help="deformation sweeps and crossing tables")
    common(p_sweep)
    p_sweep.add_argument("--family", choices=("3_delta", "2_Delta"))
    p_sweep.add_argument("--delta", type=float, help="single deformation, units of pi")
    p_sweep.add_argument(
        "--delta-grid", dest="delta_grid", help="start:stop:count, units of pi"
    )
    p_sweep.add_argument("--reference", choices=("c1", "singlet"))
    p_sweep.add_argument("--grid", help="theta grid for single-delta tables")
    p_sweep.add_argument("--tol", type=float, help="crossing bisection tolerance")
    p_sweep.set_defaults(func=run_sweep)

    p_search = sub.add_parser("search", help="harmonic colouring search")
    common(p_search)
    p_search.add_argument("--theta", type=float, help="angle in units of pi")
    p_search.add_argument("--lmax", type=int)
    p_search.add_argument("--restarts", type=int)
    p_search.add_argument("--n", type=int, help="Monte Carlo samples per evaluation")
    p_search.add_argument("--seed", type=lambda s: int(s, 0))
    p_search.add_argument("--max-iter", dest="max_iter", type=int)
    p_search.add_argument(
        "--azimuthal-only",
        dest="azimuthal_only",
        action="store_const",
        const=True,
        help="restrict the ansatz to m = 0",
    )
    p_search.set_defaults(func=run_search)

    p_quantum = sub.add_parser("quantum", help="quantum reference curves")
    common(p_quantum)
    p_quantum.add_argument(
        "--state", help="singlet|phi+|phi-|psi+|mixed (default singlet)"
    )
    p_quantum.add_argument(
        "--state-file", dest="state_file", help="plain-text 4x4 density matrix"
    )
    p_quantum.add_argument("--grid")
    p_quantum.add_argument(
        "--mc", action="store_const", const=True, help="Monte Carlo instead of analytic"
    )
    p_quantum.add_argument("--n", type=int)
    p_quantum.add_argument("--seed", type=lambda s: int(s, 0))
    p_quantum.set_defaults(func=run_quantum)

    p_slope = sub.add_parser("slope", help="slope of C at pi/2")
    common(p_slope)
    p_slope.add_argument("--colouring")
    p_slope.add_argument("--h", type=float, help="finite-difference step (radians)")
    p_slope.set_defaults(func=run_slope)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (QuadratureError, search_mod.NoCrossingError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except ClosedFormDomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except RuntimeError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
