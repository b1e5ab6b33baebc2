"""Crossing detection and colouring searches.

Everything here asks one of two questions about correlation curves:
where does one curve pass another (the witness angles for beating the
linear law or the quantum curve, and the band-exit angles that cap the
monogamy thresholds), and how negative can C(theta) be made at a fixed
angle over a family of sign-of-harmonics colourings.  A slope probe at
theta = pi/2 backs the linear-response claim for the three-band
colouring.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import minimize

from .bounds import theorem1_bounds
from .colourings import (
    Colouring,
    ColouringPair,
    HarmonicColouring,
    make_catalogue,
)
from .correlation import (
    SamplingPlan,
    closed_form,
    correlation_mc,
    correlation_quadrature,
)
from .quantum import singlet_correlation

PI = math.pi
HALF_PI = math.pi / 2.0

SCAN_POINTS = 400


class NoCrossingError(RuntimeError):
    """The scan grid found no sign change of f - g."""


@dataclass(frozen=True)
class CrossingResult:
    theta_star: float
    left_sign: int  # sign of f - g just below the crossing
    bracket_width: float


def _bisect_crossing(
    diff: Callable[[float], float], lo: float, hi: float, d_lo: float, tol: float
) -> tuple[float, float]:
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        d_mid = diff(mid)
        if d_mid == 0.0:
            return mid, 0.0
        if (d_lo > 0.0) == (d_mid > 0.0):
            lo, d_lo = mid, d_mid
        else:
            hi = mid
    return 0.5 * (lo + hi), hi - lo


def all_crossings(
    f: Callable[[float], float],
    g: Callable[[float], float],
    bracket: tuple[float, float],
    tol: float = 1e-4,
    scan_points: int = SCAN_POINTS,
) -> list[CrossingResult]:
    """Every sign change of f - g on the bracket, smallest first.

    A fixed-density scan locates brackets; each is then bisected to the
    requested width.
    """
    lo, hi = float(bracket[0]), float(bracket[1])
    if not lo < hi:
        raise ValueError(f"empty bracket {bracket!r}")
    xs = np.linspace(lo, hi, scan_points)
    diff = lambda t: f(t) - g(t)
    ds = np.array([diff(t) for t in xs])
    out: list[CrossingResult] = []
    # sign changes between consecutive nonzero samples; exact zeros in
    # between belong to the same crossing, and an identically zero
    # difference is no crossing at all
    nonzero = [i for i in range(scan_points) if ds[i] != 0.0]
    for i, j in zip(nonzero, nonzero[1:]):
        a = ds[i]
        if (a > 0.0) != (ds[j] > 0.0):
            star, width = _bisect_crossing(diff, float(xs[i]), float(xs[j]), a, tol)
            out.append(CrossingResult(star, 1 if a > 0.0 else -1, width))
    return out


def find_crossing(
    f: Callable[[float], float],
    g: Callable[[float], float],
    bracket: tuple[float, float],
    tol: float = 1e-4,
    scan_points: int = SCAN_POINTS,
) -> CrossingResult:
    """Smallest crossing of f and g on the bracket.

    Raises :class:`NoCrossingError` when the scan finds no sign change.
    """
    crossings = all_crossings(f, g, bracket, tol, scan_points)
    if not crossings:
        raise NoCrossingError(
            f"no sign change of f - g on [{bracket[0]!r}, {bracket[1]!r}] "
            f"({scan_points}-point scan)"
        )
    return crossings[0]


# ---------------------------------------------------------------------------
# Family sweeps and the threshold estimates

# scan window for catalogue crossings: away from the pi/2 degeneracy
# where every curve pinches to zero and float noise owns the sign
_CROSS_LO = PI / 3.0 + 1e-9
_CROSS_HI = HALF_PI - 1e-4

_REFERENCES: dict[str, Callable[[float], float]] = {
    "c1": lambda t: closed_form("1", t),
    "singlet": singlet_correlation,
}


@dataclass(frozen=True)
class SweepRow:
    delta: float
    theta_star: float  # nan when the curves do not cross


@dataclass(frozen=True)
class SweepResult:
    reference: str
    rows: tuple[SweepRow, ...]
    best_delta: float
    best_theta: float


def sweep_delta(
    delta_grid: Sequence[float],
    reference: str = "c1",
    tol: float = 1e-4,
    jobs: int = 1,
) -> SweepResult:
    """Crossing angle of the deformed three-band family against a
    reference curve, for each deformation in the grid.

    Rows without a crossing carry nan; the arg-min row is reported
    alongside the table.
    """
    if reference not in _REFERENCES:
        raise ValueError(f"reference {reference!r} not one of {sorted(_REFERENCES)}")
    ref = _REFERENCES[reference]
    deltas = [float(d) for d in delta_grid]
    for d in deltas:
        if not -PI / 18.0 - 1e-12 <= d <= PI / 24.0 + 1e-12:
            raise ValueError(f"delta {d!r} outside [-pi/18, pi/24]")

    def row(d: float) -> SweepRow:
        fam = lambda t: closed_form("3_delta", t, delta=d)
        try:
            hit = find_crossing(fam, ref, (_CROSS_LO, _CROSS_HI), tol)
        except NoCrossingError:
            return SweepRow(d, math.nan)
        return SweepRow(d, hit.theta_star)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            rows = tuple(pool.map(row, deltas))
    else:
        rows = tuple(row(d) for d in deltas)
    finite = [(r.theta_star, r.delta) for r in rows if not math.isnan(r.theta_star)]
    if not finite:
        raise NoCrossingError(f"no delta in the grid crosses {reference}")
    best_theta, best_delta = min(finite)
    return SweepResult(
        reference=reference, rows=rows, best_delta=best_delta, best_theta=best_theta
    )


def sweep_to_csv(result: SweepResult, fh) -> None:
    from .correlation import format_sig

    fh.write("delta_over_pi,theta_star_over_pi,reference\n")
    for r in result.rows:
        star = "" if math.isnan(r.theta_star) else format_sig(r.theta_star / PI)
        fh.write(f"{format_sig(r.delta / PI)},{star},{result.reference}\n")


@dataclass(frozen=True)
class ThetaMaxEstimate:
    """Upper bounds on the last angle a colouring can beat the linear
    law (weak) or escape the linear band entirely (strong)."""

    upper_bound_w: float
    upper_bound_s: float
    witnesses: dict


def _first_crossing_with_sign(
    f: Callable[[float], float],
    g: Callable[[float], float],
    wanted_left_sign: int,
    bracket: tuple[float, float],
    tol: float,
) -> float | None:
    try:
        crossings = all_crossings(f, g, bracket, tol)
    except NoCrossingError:
        return None
    for hit in crossings:
        if hit.left_sign == wanted_left_sign:
            return hit.theta_star
    return None


def estimate_theta_max(
    include_two_delta: bool = False,
    delta_grid: Sequence[float] | None = None,
    two_delta_grid: Sequence[float] | None = None,
    tol: float = 1e-4,
    quad_tol: float = 1e-6,
    jobs: int = 1,
) -> ThetaMaxEstimate:
    """Threshold estimates from the catalogue plus the swept families.

    The weak bound is the smallest angle from which some perfectly
    anticorrelated colouring stays below the linear law: catalogue
    crossings against it, improved by the deformed three-band sweep.
    The strong bound is the smallest angle where any colouring exits
    the band between the linear law and its negative; the two-band
    upper exit supplies it from the catalogue, and the widened two-band
    family (no closed form, so evaluated by quadrature) pushes it lower
    when ``include_two_delta`` is set.
    """
    c1 = _REFERENCES["c1"]
    neg_c1 = lambda t: -c1(t)
    witnesses: dict = {}

    w_candidates: list[tuple[float, str]] = []
    s_candidates: list[tuple[float, str]] = []
    for label in ("2", "3", "4"):
        fam = lambda t, lab=label: closed_form(lab, t)
        below = _first_crossing_with_sign(fam, c1, +1, (_CROSS_LO, _CROSS_HI), tol)
        if below is not None:
            w_candidates.append((below, label))
            s_candidates.append((below, label))
        above = _first_crossing_with_sign(fam, neg_c1, -1, (_CROSS_LO, _CROSS_HI), tol)
        if above is not None:
            s_candidates.append((above, label))

    if delta_grid is None:
        delta_grid = np.linspace(-PI / 18.0, PI / 24.0, 25)
    sweep = sweep_delta(delta_grid, "c1", tol, jobs=jobs)
    w_candidates.append((sweep.best_theta, f"3_delta:{sweep.best_delta / PI:g}"))
    s_candidates.append((sweep.best_theta, f"3_delta:{sweep.best_delta / PI:g}"))

    if include_two_delta:
        if two_delta_grid is None:
            two_delta_grid = np.linspace(0.0, PI / 12.0, 13)

        def two_delta_exit(cap: float) -> tuple[float, str] | None:
            colouring = make_catalogue("2_Delta", Delta=cap)
            fam = lambda t: correlation_quadrature(colouring, t, quad_tol)
            # the widened family exits on the upper side, like colouring 2
            star = _first_crossing_with_sign(
                fam, neg_c1, -1, (_CROSS_LO, _CROSS_HI), tol
            )
            if star is None:
                return None
            return star, colouring.label

        caps = [float(v) for v in two_delta_grid]
        if jobs > 1:
            with ThreadPoolExecutor(max_workers=jobs) as pool:
                exits = list(pool.map(two_delta_exit, caps))
        else:
            exits = [two_delta_exit(v) for v in caps]
        s_candidates.extend(e for e in exits if e is not None)

    if not w_candidates or not s_candidates:
        raise NoCrossingError("catalogue produced no threshold witnesses")
    upper_w, w_witness = min(w_candidates)
    upper_s, s_witness = min(s_candidates)
    witnesses["weak"] = {"colouring": w_witness, "theta_star_over_pi": upper_w / PI}
    witnesses["strong"] = {"colouring": s_witness, "theta_star_over_pi": upper_s / PI}
    witnesses["candidates"] = {
        "weak": [(t / PI, lab) for t, lab in sorted(w_candidates)],
        "strong": [(t / PI, lab) for t, lab in sorted(s_candidates)],
    }
    return ThetaMaxEstimate(
        upper_bound_w=upper_w, upper_bound_s=upper_s, witnesses=witnesses
    )


# ---------------------------------------------------------------------------
# Slope at the zero crossing

SLOPE_REFERENCE_THREE_BANDS = (6.0 - 4.0 * (math.sqrt(3.0) - math.sqrt(2.0))) / PI


@dataclass(frozen=True)
class SlopeEstimate:
    slope: float  # d C(pi/2 - tau) / d tau at tau -> 0+
    step: float
    c_at_half_pi: float
    reference: float | None  # |slope| reference, three-band colouring only


def slope_at_half_pi(
    c: Colouring | str | int, h: float = 1e-3, tol: float = 1e-12
) -> SlopeEstimate:
    """One-sided slope of C just below pi/2, by quadrature.

    C(pi/2) = 0 is checked first; antisymmetry makes the one-sided
    quotient C(pi/2 - tau)/tau a genuine central difference.  Band
    edges entering or leaving the reachable ring produce half-power
    terms, so C(pi/2 - tau) expands in powers of sqrt(tau); the
    Richardson pass over steps h, 2h, 4h cancels both the tau^(1/2)
    and tau^1 error terms of the quotient.
    """
    colouring = make_catalogue(c) if isinstance(c, (str, int)) else c
    c_half = correlation_quadrature(colouring, HALF_PI, tol)
    if abs(c_half) > 1e-8:
        raise ValueError(
            f"slope probe needs C(pi/2) = 0, got {c_half!r} for {colouring.label!r}"
        )
    quotients = [
        correlation_quadrature(colouring, HALF_PI - k * h, tol) / (k * h)
        for k in (1, 2, 4)
    ]
    root2 = math.sqrt(2.0)
    slope = (
        (4.0 + 2.0 * root2) * quotients[0]
        - (4.0 + 3.0 * root2) * quotients[1]
        + (1.0 + root2) * quotients[2]
    )
    reference = (
        SLOPE_REFERENCE_THREE_BANDS if getattr(colouring, "label", "") == "3" else None
    )
    return SlopeEstimate(slope=slope, step=h, c_at_half_pi=c_half, reference=reference)


# ---------------------------------------------------------------------------
# Spherical-harmonic colouring search


@dataclass(frozen=True)
class SearchOutcome:
    colouring_params: tuple[tuple[int, int, float], ...]
    objective_theta: float
    objective_value: float
    objective_stderr: float
    evaluations: int
    seed: int
    l_max: int
    restarts: int

    def __post_init__(self) -> None:
        if not -1.0 <= self.objective_value <= 1.0:
            raise ValueError("objective outside [-1, 1]")

    def colouring(self) -> HarmonicColouring:
        return HarmonicColouring(self.colouring_params)


def _search_modes(l_max: int, azimuthal_only: bool) -> list[tuple[int, int]]:
    modes = []
    for l in range(1, l_max + 1, 2):
        ms = (0,) if azimuthal_only else range(-l, l + 1)
        modes.extend((l, m) for m in ms)
    return modes


def harmonic_search(
    theta: float,
    l_max: int,
    restarts: int = 16,
    plan: SamplingPlan | None = None,
    azimuthal_only: bool = False,
    max_iter: int = 400,
    jobs: int = 1,
) -> SearchOutcome:
    """Minimize C(theta) over sign-of-harmonics colourings.

    Coefficients run over odd l up to l_max (all m, or m = 0 only);
    the sign is scale invariant so winners are reported unit-norm.
    Each restart runs a Nelder-Mead simplex from a random start, with a
    fixed per-restart sampling plan so every comparison inside the
    simplex uses common random numbers.  The winning restart is
    re-evaluated at 10x samples, and the result is checked against the
    chain lower bound.
    """
    t = float(theta)
    if not 0.0 < t < HALF_PI:
        raise ValueError(f"theta {t!r} outside (0, pi/2)")
    if l_max < 1 or l_max % 2 == 0:
        raise ValueError(f"l_max {l_max} must be a positive odd integer")
    if plan is None:
        plan = SamplingPlan(master_seed=0x42D, n_samples=20_000)
    modes = _search_modes(l_max, azimuthal_only)
    dim = len(modes)

    def colouring_from(x: np.ndarray) -> HarmonicColouring:
        norm = float(np.linalg.norm(x))
        if norm < 1e-9:
            raise ValueError("degenerate coefficient vector")
        return HarmonicColouring(
            tuple((l, m, float(v / norm)) for (l, m), v in zip(modes, x))
        )

    def run_restart(k: int) -> tuple[float, np.ndarray, int]:
        seed = int(
            np.random.SeedSequence([plan.master_seed, 0x5EED, k]).generate_state(
                1, dtype=np.uint64
            )[0]
        )
        restart_plan = SamplingPlan(seed, plan.n_samples, plan.chunk_size)
        x0 = np.random.default_rng(
            np.random.SeedSequence([plan.master_seed, 0xD1CE, k])
        ).standard_normal(dim)
        x0 /= np.linalg.norm(x0)
        evals = 0

        def objective(x: np.ndarray) -> float:
            nonlocal evals
            if float(np.linalg.norm(x)) < 1e-9:
                return 2.0
            evals += 1
            pair = ColouringPair.anticorrelated(colouring_from(x))
            return correlation_mc(pair, t, restart_plan)[0]

        result = minimize(
            objective,
            x0,
            method="Nelder-Mead",
            options={
                "maxiter": max_iter,
                "xatol": 1e-3,
                "fatol": 1e-4,
                "adaptive": dim > 2,
            },
        )
        return float(result.fun), np.asarray(result.x), evals

    indices = list(range(restarts))
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(run_restart, indices))
    else:
        outcomes = [run_restart(k) for k in indices]

    best_k = min(indices, key=lambda k: (outcomes[k][0], k))
    best_x = outcomes[best_k][1]
    total_evals = sum(o[2] for o in outcomes)

    winner = colouring_from(best_x)
    pair = ColouringPair.anticorrelated(winner)
    value, stderr = correlation_mc(pair, t, plan.scaled(10))
    frame = theorem1_bounds(t)
    if value < frame.lower - 3.0 * stderr - 1e-9:
        raise RuntimeError(
            f"search produced {value!r} below the chain bound {frame.lower!r}: "
            "correlation engine inconsistency"
        )
    return SearchOutcome(
        colouring_params=winner.terms,
        objective_theta=t,
        objective_value=value,
        objective_stderr=stderr,
        evaluations=total_evals,
        seed=plan.master_seed,
        l_max=l_max,
        restarts=restarts,
    )


def search_report_json(outcome: SearchOutcome) -> str:
    payload = {
        "theta_over_pi": outcome.objective_theta / PI,
        "L_max": outcome.l_max,
        "best_coefficients": [
            {"l": l, "m": m, "a": a} for l, m, a in outcome.colouring_params
        ],
        "objective": outcome.objective_value,
        "objective_stderr": outcome.objective_stderr,
        "evaluations": outcome.evaluations,
        "seed": outcome.seed,
    }
    return json.dumps(payload, indent=2)
