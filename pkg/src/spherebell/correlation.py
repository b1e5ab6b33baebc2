"""Correlation of a colouring pair over random axis pairs at fixed angle.

The correlation C(theta) is the average of alice(a) * bob(b) over axis
pairs (a, b) separated by theta, with a uniform on the sphere and b
uniform on its circle of possible partners.  Three independent engines
compute it:

- ``correlation_mc``: direct Monte Carlo over sampled axis pairs, with
  deterministic chunked streams (bit-identical output for a given
  sampling plan, independent of scheduling),
- ``correlation_quadrature``: for azimuthally symmetric, antipodal,
  perfectly anticorrelated pairs, the average reduces to

      C(theta) = -(1/pi) * int_0^{pi/2} d eps sin(eps) a(eps)
                           * int_0^pi d omega a[alpha(theta, eps, omega)]

  where the inner integral is done analytically as a signed sum of
  circle arcs between band-edge crossings, and the outer integral by
  adaptive quadrature with mandatory breakpoints at the derivative
  kinks,
- ``closed_form``: exact piecewise expressions for the catalogue
  colourings (sums of cosines and of the band-overlap integral ``chi``).

Shared plumbing: gamma estimation, curve containers, antisymmetry
extension to [0, pi], finite mixtures, the exact circle-colouring
correlation, and the CSV schema.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy.integrate import quad

from .colourings import (
    BandColouring,
    Colouring,
    ColouringPair,
    HarmonicColouring,
    Negated,
    make_catalogue,
    negate,
)
from .geometry import arccos_clamped, partner_many, partner_polar_many

PI = math.pi
HALF_PI = math.pi / 2.0
SNAP = 1e-12

METHODS = ("mc", "quadrature", "closed_form")


class QuadratureError(RuntimeError):
    """Adaptive quadrature failed to reach tolerance.

    ``best_estimate`` carries the value the integrator got to.
    """

    def __init__(self, message: str, best_estimate: float):
        super().__init__(message)
        self.best_estimate = best_estimate


class ClosedFormDomainError(ValueError):
    """No closed-form branch covers the requested (label, theta, delta)."""


# ---------------------------------------------------------------------------
# Sampling plans and deterministic chunked Monte Carlo


@dataclass(frozen=True)
class SamplingPlan:
    """Deterministic Monte Carlo schedule.

    Samples are generated in chunks; each chunk gets its own generator
    seeded from (master_seed, chunk_index), and chunk results are
    reduced in index order, so the estimate depends only on the three
    fields here and never on worker count.
    """

    master_seed: int
    n_samples: int
    chunk_size: int = 65536

    def __post_init__(self) -> None:
        if not 0 <= int(self.master_seed) < 2**64:
            raise ValueError("master_seed must fit in 64 bits")
        if self.n_samples < 1:
            raise ValueError("n_samples must be at least 1")
        if self.chunk_size < 1:
            raise ValueError("chunk_size must be at least 1")

    def chunks(self) -> Iterable[tuple[int, int]]:
        """(chunk_index, chunk_length) pairs covering n_samples."""
        full, rest = divmod(self.n_samples, self.chunk_size)
        for i in range(full):
            yield i, self.chunk_size
        if rest:
            yield full, rest

    def chunk_rng(self, index: int) -> np.random.Generator:
        return np.random.default_rng(
            np.random.SeedSequence([int(self.master_seed), int(index)])
        )

    def scaled(self, factor: int) -> "SamplingPlan":
        return SamplingPlan(self.master_seed, self.n_samples * factor, self.chunk_size)


def _as_pair(c: Colouring | ColouringPair) -> ColouringPair:
    if isinstance(c, ColouringPair):
        return c
    return ColouringPair.anticorrelated(c)


def _chunk_product_sum(
    pair: ColouringPair, theta: float, rng: np.random.Generator, n: int
) -> int:
    cos_eps = rng.uniform(-1.0, 1.0, n)
    phi = rng.uniform(0.0, 2.0 * PI, n)
    omega = rng.uniform(0.0, 2.0 * PI, n)
    eps = np.arccos(cos_eps)
    a_vals = pair.alice.evaluate_many(eps, phi)
    if pair.bob.is_azimuthal:
        alpha = partner_polar_many(theta, eps, omega)
        b_vals = pair.bob.evaluate_many(alpha, phi)
    else:
        alpha, beta = partner_many(theta, eps, phi, omega)
        b_vals = pair.bob.evaluate_many(alpha, beta)
    return int(np.sum(a_vals * b_vals, dtype=np.int64))


def correlation_mc(
    c: Colouring | ColouringPair, theta: float, plan: SamplingPlan
) -> tuple[float, float]:
    """Monte Carlo estimate of C(theta): (value, standard error).

    The products alice * bob are exactly +-1, so the chunk sums are
    integers and the standard error has the closed form
    sqrt((1 - mean^2) / (n - 1)).
    """
    if not 0.0 <= theta <= PI + SNAP:
        raise ValueError(f"theta {theta!r} outside [0, pi]")
    pair = _as_pair(c)
    total = 0
    for index, length in plan.chunks():
        total += _chunk_product_sum(pair, theta, plan.chunk_rng(index), length)
    n = plan.n_samples
    value = total / n
    stderr = math.sqrt(max(0.0, 1.0 - value * value) / (n - 1)) if n > 1 else float("nan")
    return value, stderr


# ---------------------------------------------------------------------------
# Polar edge extraction (bands exactly; other azimuthal colourings by scan)

_EDGE_CACHE: dict = {}
_SCAN_N = 4096


def polar_edges(c: Colouring) -> tuple[float, ...]:
    """Sign-change polar angles of an azimuthally symmetric colouring.

    Band colourings report their band endpoints exactly; any other
    azimuthal colouring is scanned on a dense grid and each sign change
    is bisected to machine precision.
    """
    core = c.inner if isinstance(c, Negated) else c
    if isinstance(core, BandColouring):
        return core.edges
    if not c.is_azimuthal:
        raise ValueError("colouring is not azimuthally symmetric")
    try:
        cached = _EDGE_CACHE.get(c)
    except TypeError:
        cached = None
    if cached is not None:
        return cached
    grid = np.linspace(0.0, PI, _SCAN_N + 1)
    vals = c.evaluate_polar(grid)
    edges = []
    for i in np.nonzero(vals[:-1] != vals[1:])[0]:
        lo, hi = float(grid[i]), float(grid[i + 1])
        vlo = int(vals[i])
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            if int(c.evaluate_polar(np.array([mid]))[0]) == vlo:
                lo = mid
            else:
                hi = mid
        edges.append(0.5 * (lo + hi))
    result = tuple(edges)
    try:
        _EDGE_CACHE[c] = result
    except TypeError:
        pass
    return result


def _require_antipodal_azimuthal(c: Colouring) -> tuple[float, ...]:
    """Check the quadrature preconditions, returning the edge set."""
    if not c.is_azimuthal:
        raise ValueError(
            f"quadrature requires an azimuthally symmetric colouring, got {c.label!r}"
        )
    edges = polar_edges(c)
    raw = sorted({0.0, PI, *edges, *(PI - e for e in edges)})
    merged_list = [raw[0]]
    for v in raw[1:]:
        # collapse float twins of reflected edges so no midpoint lands
        # on an edge, where the tie-break convention is one-sided
        if v - merged_list[-1] > 1e-9:
            merged_list.append(v)
    merged = np.array(merged_list)
    mids = 0.5 * (merged[:-1] + merged[1:])
    direct = c.evaluate_polar(mids)
    mirrored = c.evaluate_polar(PI - mids)
    if np.any(direct != -mirrored):
        raise ValueError(f"colouring {c.label!r} is not antipodal")
    return edges


# ---------------------------------------------------------------------------
# Deterministic quadrature over the reduced integral


def _inner_arc_integral(
    theta: float,
    eps: float,
    edges: np.ndarray,
    value_at: Callable[[np.ndarray], np.ndarray],
) -> float:
    """int_0^pi a[alpha(theta, eps, omega)] d omega, analytically.

    As omega runs 0 -> pi the partner's polar angle alpha falls
    monotonically from theta + eps to |theta - eps|, so the integral is
    a signed sum of arcs between the crossings of the colouring's edge
    values, each crossing at
    omega = arccos((cos theta cos eps - cos v) / (sin theta sin eps)).
    """
    st, se = math.sin(theta), math.sin(eps)
    ct, ce = math.cos(theta), math.cos(eps)
    denom = st * se
    if denom < 1e-14:
        # collapsed circle: alpha is constant (removable limit)
        return PI * float(value_at(np.array([arccos_clamped(ct * ce)]))[0])
    lo, hi = abs(theta - eps), theta + eps
    i0, i1 = np.searchsorted(edges, lo, side="right"), np.searchsorted(
        edges, hi, side="left"
    )
    cuts = edges[i0:i1]
    if cuts.size:
        omegas = np.arccos(np.clip((ct * ce - np.cos(cuts)) / denom, -1.0, 1.0))
        # alpha decreasing in omega: descending cuts give ascending omegas
        bounds = np.concatenate(([0.0], omegas[::-1], [PI]))
        alphas = np.concatenate(([hi], cuts[::-1], [lo]))
    else:
        bounds = np.array([0.0, PI])
        alphas = np.array([hi, lo])
    mids = 0.5 * (alphas[:-1] + alphas[1:])
    return float(np.sum(value_at(mids) * np.diff(bounds)))


def _inner_gl_integral(
    theta: float,
    eps: float,
    value_many: Callable[[np.ndarray], np.ndarray],
    tol: float = 1e-9,
    max_doublings: int = 12,
) -> float:
    """Gauss-Legendre fallback for the omega integral, 64 nodes doubled
    until two successive levels agree within ``tol``.

    The integrand is piecewise constant in omega, so convergence is
    slow; this path is a cross-check and last resort, not the default.
    """
    prev = None
    n = 64
    for _ in range(max_doublings):
        x, w = np.polynomial.legendre.leggauss(n)
        omega = 0.5 * PI * (x + 1.0)
        alpha = partner_polar_many(theta, np.full(n, eps), omega)
        est = 0.5 * PI * float(np.sum(w * value_many(alpha)))
        if prev is not None and abs(est - prev) <= tol:
            return est
        prev = est
        n *= 2
    return est


def correlation_quadrature(
    c: Colouring | ColouringPair, theta: float, tol: float = 1e-8
) -> float:
    """Deterministic C(theta) for an anticorrelated azimuthal pair.

    ``c`` is the first party's colouring (the partner is its colour
    swap); it must be azimuthally symmetric and antipodal, and theta
    must lie in (0, pi/2].  Raises :class:`QuadratureError` carrying the
    best estimate if the outer integral does not converge.
    """
    if isinstance(c, ColouringPair):
        c = c.alice
    theta = float(theta)
    if not SNAP < theta <= HALF_PI + SNAP:
        raise ValueError(f"theta {theta!r} outside (0, pi/2]")
    theta = min(theta, HALF_PI)
    edge_list = _require_antipodal_azimuthal(c)
    edges = np.array(edge_list)
    value_at = c.evaluate_polar

    def f(eps: float) -> float:
        a_here = float(value_at(np.array([eps]))[0])
        return math.sin(eps) * a_here * _inner_arc_integral(theta, eps, edges, value_at)

    breaks = {theta}
    for v in edge_list:
        for candidate in (v, v - theta, theta - v, v + theta):
            breaks.add(candidate)
    # coincident candidates land one ulp apart (theta = pi/4 makes
    # theta - pi/6 and pi/3 - theta the same point for the three-band
    # colouring) and the sliver between them wrecks the subdivision
    pts: list[float] = []
    for candidate in sorted(breaks):
        if not 1e-12 < candidate < HALF_PI - 1e-12:
            continue
        if pts and candidate - pts[-1] < 1e-9:
            continue
        pts.append(candidate)
    result, abserr, info, *tail = quad(
        f,
        0.0,
        HALF_PI,
        points=pts,
        limit=max(200, 20 * len(pts) + 50),
        epsabs=tol,
        epsrel=0.0,
        full_output=1,
    )
    if tail:
        raise QuadratureError(
            f"outer integral did not converge: {tail[0]}", best_estimate=-result / PI
        )
    return -result / PI


# ---------------------------------------------------------------------------
# The band-overlap integral chi and the piecewise closed forms


def chi(theta: float, a: float, b: float, alpha: float, tol: float = 1e-9) -> float:
    """The overlap integral
    (2/pi) int_a^b d eps sin(eps) arccos((cos theta cos eps - cos alpha)
                                         / (sin theta sin eps)).

    Zero-width intervals return 0; otherwise theta must lie in
    (0, pi/2] and a, b, alpha in [0, pi].  The arccos argument is
    clamped to [-1, 1] (drift beyond 1e-6 raises).
    """
    a, b, alpha = float(a), float(b), float(alpha)
    if abs(b - a) < 1e-14:
        return 0.0
    if not SNAP < theta <= HALF_PI + SNAP:
        raise ValueError(f"theta {theta!r} outside (0, pi/2]")
    for name, v in (("a", a), ("b", b), ("alpha", alpha)):
        if not -1e-12 <= v <= PI + 1e-12:
            raise ValueError(f"{name}={v!r} outside [0, pi]")
    a, b = max(a, 0.0), min(b, PI)
    ct, st = math.cos(theta), math.sin(theta)
    ca = math.cos(alpha)

    def integrand(eps: float) -> float:
        se = math.sin(eps)
        return (2.0 / PI) * se * arccos_clamped((ct * math.cos(eps) - ca) / (st * se))

    lo, hi = (a, b) if a <= b else (b, a)
    pts = sorted(
        p for p in (abs(alpha - theta), alpha + theta) if lo + 1e-12 < p < hi - 1e-12
    )
    if len(pts) == 2 and pts[1] - pts[0] < 1e-9:
        pts = pts[:1]
    result, abserr, info, *tail = quad(
        integrand,
        lo,
        hi,
        points=pts or None,
        limit=200,
        epsabs=tol,
        epsrel=0.0,
        full_output=1,
    )
    if tail:
        raise QuadratureError(
            f"chi({theta}, {a}, {b}, {alpha}) did not converge: {tail[0]}",
            best_estimate=result if a <= b else -result,
        )
    return result if a <= b else -result


# Piecewise closed forms.  Each piece is a sum of cosines plus signed
# chi terms; the dispatcher in closed_form() picks the piece from theta
# (and, for the deformed family, delta).


def _c2_piece1(t: float, X) -> float:
    return (
        -1.0
        + 2.0 * (math.cos(PI / 4) - math.cos(PI / 4 + t))
        + X(PI / 4 - t, PI / 4, PI / 4)
        - X(PI / 4, PI / 4 + t, PI / 4)
        + X(PI / 2 - t, PI / 2, PI / 2)
    )


def _c2_piece2(t: float, X) -> float:
    return (
        1.0
        + 2.0 * (math.cos(PI / 4) - math.cos(t - PI / 4))
        + X(t - PI / 4, PI / 4, PI / 4)
        - X(PI / 2 - t, PI / 4, PI / 2)
        + X(PI / 4, PI / 2, PI / 2)
        - X(PI / 4, PI / 2, PI / 4)
        - X(3 * PI / 4 - t, PI / 2, 3 * PI / 4)
    )


def _c3_piece1(t: float, X) -> float:
    return (
        -1.0
        + 2.0
        * (
            math.cos(PI / 6)
            - math.cos(PI / 6 + t)
            + math.cos(PI / 3)
            - math.cos(PI / 3 + t)
        )
        + X(PI / 6 - t, PI / 6, PI / 6)
        - X(PI / 6, PI / 6 + t, PI / 6)
        + X(PI / 3 - t, PI / 3, PI / 3)
        - X(PI / 3, PI / 3 + t, PI / 3)
        + X(PI / 2 - t, PI / 2, PI / 2)
    )


def _c3_piece2(t: float, X) -> float:
    return (
        1.0
        + 2.0
        * (
            math.cos(PI / 6)
            - math.cos(t - PI / 6)
            + math.cos(PI / 6 + t)
            - math.cos(PI / 3)
        )
        + X(t - PI / 6, PI / 6, PI / 6)
        - X(PI / 3 - t, PI / 6, PI / 3)
        + X(PI / 6, PI / 2 - t, PI / 3)
        - X(PI / 6, PI / 3, PI / 6)
        + X(PI / 2 - t, PI / 3, PI / 3)
        - X(PI / 2 - t, PI / 3, PI / 2)
        + X(PI / 3, PI / 6 + t, PI / 6)
        + X(PI / 3, PI / 2, PI / 2)
        - X(PI / 3, PI / 2, PI / 3)
        - X(2 * PI / 3 - t, PI / 2, 2 * PI / 3)
    )


def _c3_piece3(t: float, X) -> float:
    return (
        1.0
        + 2.0
        * (
            math.cos(PI / 6)
            - math.cos(t - PI / 6)
            + math.cos(PI / 6 + t)
            - math.cos(PI / 3)
        )
        - X(PI / 3 - t, PI / 6, PI / 3)
        + X(t - PI / 6, PI / 6, PI / 6)
        + X(PI / 6, PI / 3, PI / 3)
        - X(PI / 6, PI / 3, PI / 6)
        - X(PI / 2 - t, PI / 3, PI / 2)
        + X(PI / 3, PI / 2, PI / 2)
        - X(PI / 3, PI / 2, PI / 3)
        + X(PI / 3, PI / 6 + t, PI / 6)
        - X(2 * PI / 3 - t, PI / 2, 2 * PI / 3)
    )


def _c3_piece4(t: float, X) -> float:
    return (
        -1.0
        + 2.0
        * (
            math.cos(t - PI / 3)
            - math.cos(PI / 6)
            + math.cos(t - PI / 6)
            - math.cos(PI / 3)
        )
        - X(t - PI / 3, PI / 6, PI / 3)
        + X(PI / 2 - t, PI / 6, PI / 2)
        + X(PI / 6, PI / 3, PI / 3)
        - X(PI / 6, PI / 3, PI / 2)
        - X(t - PI / 6, PI / 3, PI / 6)
        + X(2 * PI / 3 - t, PI / 3, 2 * PI / 3)
        - X(PI / 3, PI / 2, 2 * PI / 3)
        + X(PI / 3, PI / 2, PI / 2)
        - X(PI / 3, PI / 2, PI / 3)
        + X(PI / 3, PI / 2, PI / 6)
        + X(5 * PI / 6 - t, PI / 2, 5 * PI / 6)
    )


def _c4_piece1(t: float, X) -> float:
    return (
        -1.0
        + 2.0
        * (
            math.cos(PI / 8)
            - math.cos(PI / 8 + t)
            + math.cos(PI / 4)
            - math.cos(PI / 4 + t)
            + math.cos(3 * PI / 8)
            - math.cos(3 * PI / 8 + t)
        )
        + X(PI / 8 - t, PI / 8, PI / 8)
        - X(PI / 8, PI / 8 + t, PI / 8)
        + X(PI / 4 - t, PI / 4, PI / 4)
        - X(PI / 4, PI / 4 + t, PI / 4)
        + X(3 * PI / 8 - t, 3 * PI / 8, 3 * PI / 8)
        - X(3 * PI / 8, 3 * PI / 8 + t, 3 * PI / 8)
        + X(PI / 2 - t, PI / 2, PI / 2)
    )


def _c4_piece2(t: float, X) -> float:
    return (
        1.0
        + 2.0
        * (
            math.cos(PI / 8)
            - math.cos(t - PI / 8)
            + math.cos(t + PI / 8)
            - math.cos(PI / 4)
            + math.cos(t + PI / 4)
            - math.cos(3 * PI / 8)
        )
        + X(t - PI / 8, PI / 8, PI / 8)
        - X(PI / 4 - t, PI / 8, PI / 4)
        + X(PI / 8, PI / 4, PI / 4)
        - X(PI / 8, PI / 4, PI / 8)
        - X(3 * PI / 8 - t, PI / 4, 3 * PI / 8)
        + X(PI / 4, PI / 8 + t, PI / 8)
        + X(PI / 4, 3 * PI / 8, 3 * PI / 8)
        - X(PI / 4, 3 * PI / 8, PI / 4)
        - X(PI / 2 - t, 3 * PI / 8, PI / 2)
        + X(3 * PI / 8, PI / 4 + t, PI / 4)
        + X(3 * PI / 8, PI / 2, PI / 2)
        - X(3 * PI / 8, PI / 2, 3 * PI / 8)
        - X(5 * PI / 8 - t, PI / 2, 5 * PI / 8)
    )


def _c4_piece3(t: float, X) -> float:
    return (
        -1.0
        + 2.0
        * (
            math.cos(t - PI / 4)
            - math.cos(PI / 8)
            + math.cos(t - PI / 8)
            - math.cos(PI / 4)
            + math.cos(3 * PI / 8)
            - math.cos(t + PI / 8)
        )
        - X(t - PI / 4, PI / 8, PI / 4)
        + X(3 * PI / 8 - t, PI / 8, 3 * PI / 8)
        - X(PI / 8, PI / 4, 3 * PI / 8)
        + X(PI / 8, PI / 4, PI / 4)
        - X(t - PI / 8, PI / 4, PI / 8)
        + X(PI / 2 - t, PI / 4, PI / 2)
        - X(PI / 4, 3 * PI / 8, PI / 2)
        + X(PI / 4, 3 * PI / 8, 3 * PI / 8)
        - X(PI / 4, 3 * PI / 8, PI / 4)
        + X(PI / 4, 3 * PI / 8, PI / 8)
        + X(5 * PI / 8 - t, 3 * PI / 8, 5 * PI / 8)
        - X(3 * PI / 8, PI / 2, 5 * PI / 8)
        + X(3 * PI / 8, PI / 2, PI / 2)
        - X(3 * PI / 8, PI / 2, 3 * PI / 8)
        + X(3 * PI / 8, PI / 2, PI / 4)
        - X(3 * PI / 8, PI / 8 + t, PI / 8)
        + X(3 * PI / 4 - t, PI / 2, 3 * PI / 4)
    )


def _c4_piece4(t: float, X) -> float:
    return (
        1.0
        + 2.0
        * (
            math.cos(PI / 8)
            - math.cos(t - 3 * PI / 8)
            + math.cos(PI / 4)
            - math.cos(t - PI / 4)
            + math.cos(3 * PI / 8)
            - math.cos(t - PI / 8)
        )
        + X(t - 3 * PI / 8, PI / 8, 3 * PI / 8)
        - X(PI / 2 - t, PI / 8, PI / 2)
        + X(PI / 8, PI / 4, PI / 2)
        - X(PI / 8, PI / 4, 3 * PI / 8)
        + X(t - PI / 4, PI / 4, PI / 4)
        - X(5 * PI / 8 - t, PI / 4, 5 * PI / 8)
        + X(PI / 4, 3 * PI / 8, 5 * PI / 8)
        - X(PI / 4, 3 * PI / 8, PI / 2)
        + X(PI / 4, 3 * PI / 8, 3 * PI / 8)
        - X(PI / 4, 3 * PI / 8, PI / 4)
        + X(t - PI / 8, 3 * PI / 8, PI / 8)
        - X(3 * PI / 4 - t, 3 * PI / 8, 3 * PI / 4)
        + X(3 * PI / 8, PI / 2, 3 * PI / 4)
        - X(3 * PI / 8, PI / 2, 5 * PI / 8)
        + X(3 * PI / 8, PI / 2, PI / 2)
        - X(3 * PI / 8, PI / 2, 3 * PI / 8)
        + X(3 * PI / 8, PI / 2, PI / 4)
        - X(3 * PI / 8, PI / 2, PI / 8)
        - X(7 * PI / 8 - t, PI / 2, 7 * PI / 8)
    )


def _c3d_low_neg(t: float, d: float, X) -> float:
    return (
        -1.0
        + 2.0
        * (
            math.cos(t - PI / 3)
            - math.cos(PI / 6 + d)
            + math.cos(t - PI / 6 - d)
            - math.cos(PI / 3)
            + math.cos(t + PI / 6 + d)
        )
        - X(t - PI / 3, PI / 6 + d, PI / 3)
        + X(PI / 6 + d, PI / 3, PI / 3)
        - X(PI / 2 - t, PI / 3, PI / 2)
        - X(t - PI / 6 - d, PI / 3, PI / 6 + d)
        + X(2 * PI / 3 - t, PI / 3, 2 * PI / 3)
        - X(PI / 3, PI / 2, 2 * PI / 3)
        + X(PI / 3, PI / 2, PI / 2)
        - X(PI / 3, PI / 2, PI / 3)
        + X(PI / 3, t + PI / 6 + d, PI / 6 + d)
    )


def _c3d_mid(t: float, d: float, X) -> float:
    return (
        -1.0
        + 2.0
        * (
            math.cos(t - PI / 3)
            - math.cos(PI / 6 + d)
            + math.cos(t - PI / 6 - d)
            - math.cos(PI / 3)
        )
        - X(t - PI / 3, PI / 6 + d, PI / 3)
        + X(PI / 2 - t, PI / 6 + d, PI / 2)
        - X(PI / 6 + d, PI / 3, PI / 2)
        + X(PI / 6 + d, PI / 3, PI / 3)
        - X(t - PI / 6 - d, PI / 3, PI / 6 + d)
        + X(2 * PI / 3 - t, PI / 3, 2 * PI / 3)
        - X(PI / 3, PI / 2, 2 * PI / 3)
        + X(PI / 3, PI / 2, PI / 2)
        - X(PI / 3, PI / 2, PI / 3)
        + X(PI / 3, PI / 2, PI / 6 + d)
        + X(5 * PI / 6 - d - t, PI / 2, 5 * PI / 6 - d)
    )


def _c3d_cap_neg(t: float, d: float, X) -> float:
    return (
        -1.0
        + 2.0
        * (
            math.cos(PI / 6 + d)
            - math.cos(t - PI / 3)
            + math.cos(PI / 3)
            - math.cos(t - PI / 6 - d)
        )
        + X(PI / 2 - t, PI / 6 + d, PI / 2)
        - X(PI / 6 + d, PI / 3, PI / 2)
        + X(t - PI / 3, PI / 3, PI / 3)
        + X(2 * PI / 3 - t, PI / 3, 2 * PI / 3)
        - X(PI / 3, PI / 2, 2 * PI / 3)
        + X(PI / 3, PI / 2, PI / 2)
        - X(PI / 3, PI / 2, PI / 3)
        + X(t - PI / 6 - d, PI / 2, PI / 6 + d)
        + X(5 * PI / 6 - d - t, PI / 2, 5 * PI / 6 - d)
    )


def _c3d_low_pos(t: float, d: float, X) -> float:
    return (
        -1.0
        + 2.0
        * (
            math.cos(t - PI / 3)
            - math.cos(t - PI / 6 - d)
            + math.cos(PI / 6 + d)
            - math.cos(PI / 3)
        )
        - X(t - PI / 3, PI / 6 + d, PI / 3)
        + X(t - PI / 6 - d, PI / 6 + d, PI / 6 + d)
        + X(PI / 2 - t, PI / 6 + d, PI / 2)
        - X(PI / 6 + d, PI / 3, PI / 2)
        + X(PI / 6 + d, PI / 3, PI / 3)
        - X(PI / 6 + d, PI / 3, PI / 6 + d)
        + X(2 * PI / 3 - t, PI / 3, 2 * PI / 3)
        - X(PI / 3, PI / 2, 2 * PI / 3)
        + X(PI / 3, PI / 2, PI / 2)
        - X(PI / 3, PI / 2, PI / 3)
        + X(PI / 3, PI / 2, PI / 6 + d)
        + X(5 * PI / 6 - d - t, PI / 2, 5 * PI / 6 - d)
    )


def _c3d_cap_pos(t: float, d: float, X) -> float:
    return (
        -1.0
        + 2.0
        * (
            math.cos(t - PI / 3)
            - math.cos(PI / 6 + d)
            + math.cos(t - PI / 6 - d)
            - math.cos(PI / 3)
        )
        + X(PI / 2 - t, PI / 6 + d, PI / 2)
        - X(t - PI / 3, PI / 6 + d, PI / 3)
        - X(2 * PI / 3 - t, PI / 6 + d, 2 * PI / 3)
        + X(PI / 6 + d, PI / 3, 2 * PI / 3)
        - X(PI / 6 + d, PI / 3, PI / 2)
        + X(PI / 6 + d, PI / 3, PI / 3)
        - X(t - PI / 6 - d, PI / 3, PI / 6 + d)
        - X(5 * PI / 6 - d - t, PI / 3, 5 * PI / 6 - d)
        + X(PI / 3, PI / 2, 5 * PI / 6 - d)
        - X(PI / 3, PI / 2, 2 * PI / 3)
        + X(PI / 3, PI / 2, PI / 2)
        - X(PI / 3, PI / 2, PI / 3)
        + X(PI / 3, PI / 2, PI / 6 + d)
    )


def _parse_closed_form_label(
    label: str | int, delta: float | None
) -> tuple[str, float | None]:
    name = str(label).strip()
    if ":" in name:
        name, _, arg = name.partition(":")
        if name == "3_delta":
            delta = float(arg) * PI
        elif name == "2_Delta":
            pass  # handled below: no closed form either way
        else:
            raise ValueError(f"label {name!r} takes no parameter")
    if name == "hemisphere":
        name = "1"
    return name, delta


def closed_form(
    label: str | int,
    theta: float,
    delta: float | None = None,
    chi_tol: float = 1e-9,
) -> float:
    """Exact piecewise value of C(theta) for a catalogue colouring.

    Colouring 1 is the linear law -(1 - 2 theta / pi), evaluated with
    no quadrature at all.  Colourings 2-4 are covered on [0, pi/2] by
    two or four branches; the deformed family 3_delta only on
    [pi/3, pi/2] (by branch tables split on the sign of delta).
    Requests outside the branch tables raise
    :class:`ClosedFormDomainError` naming the missing branch.
    """
    name, delta = _parse_closed_form_label(label, delta)
    t = float(theta)
    if not -SNAP <= t <= HALF_PI + SNAP:
        raise ClosedFormDomainError(
            f"closed forms cover theta in [0, pi/2]; got theta={t / PI:g}*pi"
        )
    t = min(max(t, 0.0), HALF_PI)

    if name == "1":
        return -(1.0 - 2.0 * t / PI)
    if name == "2_Delta":
        raise ClosedFormDomainError(
            "colouring 2_Delta has no closed-form branches; use quadrature or mc"
        )

    def X(a: float, b: float, alpha: float) -> float:
        return chi(t, a, b, alpha, tol=chi_tol)

    if name == "2":
        return _c2_piece1(t, X) if t <= PI / 4 + SNAP else _c2_piece2(t, X)
    if name == "3":
        if t <= PI / 6 + SNAP:
            return _c3_piece1(t, X)
        if t <= PI / 4 + SNAP:
            return _c3_piece2(t, X)
        if t <= PI / 3 + SNAP:
            return _c3_piece3(t, X)
        return _c3_piece4(t, X)
    if name == "4":
        if t <= PI / 8 + SNAP:
            return _c4_piece1(t, X)
        if t <= PI / 4 + SNAP:
            return _c4_piece2(t, X)
        if t <= 3 * PI / 8 + SNAP:
            return _c4_piece3(t, X)
        return _c4_piece4(t, X)
    if name == "3_delta":
        if delta is None:
            raise ClosedFormDomainError("label 3_delta requires the delta parameter")
        d = float(delta)
        if not -PI / 18 - SNAP <= d <= PI / 24 + SNAP:
            raise ClosedFormDomainError(f"delta {d!r} outside [-pi/18, pi/24]")
        if t < PI / 3 - SNAP:
            raise ClosedFormDomainError(
                "colouring 3_delta has closed-form branches only for theta in "
                f"[pi/3, pi/2]; no branch covers theta={t / PI:g}*pi"
            )
        if d <= 0.0:
            if t <= PI / 3 - d + SNAP:
                return _c3d_low_neg(t, d, X)
            if t <= PI / 2 + d + SNAP:
                return _c3d_mid(t, d, X)
            return _c3d_cap_neg(t, d, X)
        if t <= PI / 3 + 2 * d + SNAP:
            return _c3d_low_pos(t, d, X)
        if t <= PI / 2 - d + SNAP:
            return _c3d_mid(t, d, X)
        return _c3d_cap_pos(t, d, X)
    raise ClosedFormDomainError(f"unknown catalogue label {label!r}")


# ---------------------------------------------------------------------------
# Curves, gamma, mixtures, the circle counterexample, CSV schema


@dataclass(frozen=True)
class CurvePoint:
    theta: float
    value: float
    stderr: float | None = None


@dataclass(frozen=True)
class CorrelationCurve:
    colouring_label: str
    method: str
    points: tuple[CurvePoint, ...]

    def __post_init__(self) -> None:
        if self.method not in METHODS:
            raise ValueError(f"method {self.method!r} not one of {METHODS}")
        pts = tuple(self.points)
        thetas = [p.theta for p in pts]
        if any(b < a for a, b in zip(thetas, thetas[1:])):
            raise ValueError("curve points must be sorted by theta")
        for p in pts:
            if not -1.0 - 1e-9 <= p.value <= 1.0 + 1e-9:
                raise ValueError(f"correlation value {p.value!r} outside [-1, 1]")
        object.__setattr__(self, "points", pts)

    def thetas(self) -> np.ndarray:
        return np.array([p.theta for p in self.points])

    def values(self) -> np.ndarray:
        return np.array([p.value for p in self.points])


def curve_for(
    c: Colouring | ColouringPair,
    thetas: Sequence[float],
    method: str,
    plan: SamplingPlan | None = None,
    tol: float = 1e-8,
    jobs: int = 1,
) -> CorrelationCurve:
    """Evaluate C(theta) on a grid with the requested engine.

    The deterministic engines are defined on [0, pi/2]; points beyond
    pi/2 are obtained from the antisymmetry C(pi - theta) = -C(theta),
    and theta = 0 returns -1 exactly (perfect anticorrelation).  Grid
    points are evaluated concurrently when jobs > 1; results are
    assembled by index, so the output is independent of jobs.
    """
    if method not in METHODS:
        raise ValueError(f"method {method!r} not one of {METHODS}")
    pair = _as_pair(c)
    label = pair.alice.label
    if method != "mc" and pair.bob != negate(pair.alice):
        raise ValueError(
            "deterministic engines assume the second party holds the colour swap"
        )
    grid = [float(t) for t in thetas]

    if method == "mc":
        if plan is None:
            raise ValueError("mc requires a sampling plan")

        def compute(t: float) -> CurvePoint:
            value, stderr = correlation_mc(pair, t, plan)
            return CurvePoint(t, value, stderr)

    elif method == "quadrature":

        def compute(t: float) -> CurvePoint:
            return CurvePoint(t, _deterministic_value(pair.alice, t, tol), None)

    else:

        def compute(t: float) -> CurvePoint:
            return CurvePoint(t, _closed_form_reflected(label, t), None)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            points = list(pool.map(compute, grid))
    else:
        points = [compute(t) for t in grid]
    return CorrelationCurve(colouring_label=label, method=method, points=tuple(points))


def _deterministic_value(c: Colouring, t: float, tol: float) -> float:
    if t < SNAP:
        _require_antipodal_azimuthal(c)
        return -1.0
    if t > HALF_PI + SNAP:
        if t > PI + SNAP:
            raise ValueError(f"theta {t!r} outside [0, pi]")
        if t >= PI - SNAP:
            _require_antipodal_azimuthal(c)
            return 1.0
        return -correlation_quadrature(c, PI - t, tol)
    return correlation_quadrature(c, t, tol)


def _closed_form_reflected(label: str, t: float) -> float:
    if t > HALF_PI + SNAP:
        if t > PI + SNAP:
            raise ValueError(f"theta {t!r} outside [0, pi]")
        return -closed_form(label, PI - min(t, PI))
    return closed_form(label, t)


def extend_to_pi(curve: CorrelationCurve) -> CorrelationCurve:
    """Extend a curve from [0, pi/2] to [0, pi] by antisymmetry."""
    thetas = curve.thetas()
    if thetas.size == 0 or thetas[-1] < HALF_PI - 1e-9:
        raise ValueError("curve must cover [0, pi/2] before extension")
    reflected = [
        CurvePoint(PI - p.theta, -p.value, p.stderr)
        for p in reversed(curve.points)
        if p.theta < HALF_PI - SNAP
    ]
    return CorrelationCurve(
        colouring_label=curve.colouring_label,
        method=curve.method,
        points=tuple(list(curve.points) + reflected),
    )


@dataclass(frozen=True)
class GammaEstimate:
    """Sampled gamma with its zero-angle consistency check.

    gamma is 1 minus the probability of opposite values at coincident
    axes; the correlation at theta = 0 must equal -1 + 2 gamma, and
    ``c0_value`` is an independent estimate of it from fresh samples.
    """

    gamma: float
    gamma_stderr: float
    c0_value: float
    c0_stderr: float

    @property
    def c0_predicted(self) -> float:
        return -1.0 + 2.0 * self.gamma


def gamma_of(
    pair: ColouringPair, n_samples: int, rng: np.random.Generator
) -> GammaEstimate:
    if n_samples < 1:
        raise ValueError("n_samples must be at least 1")
    n = int(n_samples)

    def batch() -> tuple[np.ndarray, np.ndarray]:
        eps = np.arccos(rng.uniform(-1.0, 1.0, n))
        phi = rng.uniform(0.0, 2.0 * PI, n)
        return pair.alice.evaluate_many(eps, phi), pair.bob.evaluate_many(eps, phi)

    a_vals, b_vals = batch()
    p_opposite = float(np.mean(a_vals == -b_vals))
    gamma = 1.0 - p_opposite
    gamma_stderr = math.sqrt(max(0.0, gamma * (1.0 - gamma)) / n)

    a2, b2 = batch()
    c0 = float(np.mean(a2 * b2))
    c0_stderr = math.sqrt(max(0.0, 1.0 - c0 * c0) / max(1, n - 1))
    return GammaEstimate(gamma, gamma_stderr, c0, c0_stderr)


def mixture_correlation(
    components: Sequence[tuple[float, CorrelationCurve]],
) -> CorrelationCurve:
    """Pointwise convex combination of curves sharing a theta grid."""
    if not components:
        raise ValueError("mixture needs at least one component")
    weights = np.array([w for w, _ in components], dtype=float)
    if np.any(weights < 0.0):
        raise ValueError("mixture weights must be non-negative")
    if abs(float(weights.sum()) - 1.0) > 1e-12:
        raise ValueError(f"mixture weights sum to {weights.sum()!r}, not 1")
    base = components[0][1].thetas()
    for _, curve in components[1:]:
        other = curve.thetas()
        if other.shape != base.shape or np.any(np.abs(other - base) > 1e-12):
            raise ValueError("mixture curves must share a theta grid")
    values = sum(w * curve.values() for w, curve in components)
    stderrs = [
        [p.stderr for p in curve.points] for _, curve in components
    ]
    combined_stderr: list[float | None]
    if all(all(s is not None for s in column) for column in stderrs):
        combined_stderr = [
            math.sqrt(sum((w * s) ** 2 for w, s in zip(weights, col)))
            for col in zip(*stderrs)
        ]
    else:
        combined_stderr = [None] * base.size
    methods = {curve.method for _, curve in components}
    for method in ("mc", "quadrature", "closed_form"):
        if method in methods:
            break
    label = "+".join(f"{w:g}*{curve.colouring_label}" for w, curve in components)
    points = tuple(
        CurvePoint(float(t), float(v), s)
        for t, v, s in zip(base, values, combined_stderr)
    )
    return CorrelationCurve(colouring_label=label, method=method, points=points)


def circle_correlation(n: int, theta: float) -> float:
    """Exact correlation of the circle's alternating arc pair.

    The pair a = -b = (-1)^floor(n eps / pi) has a piecewise-linear
    overlap correlation: node values -(-1)^k at theta = k pi / n and
    straight lines between, which is what the shift integral of two
    ideal square waves evaluates to.  Node hits (within 1e-12 of an
    integer multiple of pi/n) are snapped so that, e.g., separation
    2 pi / n returns -1 exactly.
    """
    n = int(n)
    if n <= 0 or n % 2 == 0:
        raise ValueError(f"arc count {n} must be an odd positive integer")
    t = float(theta)
    if not 0.0 <= t < 2.0 * PI:
        raise ValueError(f"theta {t!r} outside [0, 2pi)")
    u = n * t / PI
    nearest = round(u)
    if abs(u - nearest) < 1e-12:
        return -1.0 if nearest % 2 == 0 else 1.0
    k = math.floor(u)
    frac = u - k
    value = (1.0 - 2.0 * frac) if k % 2 == 0 else (2.0 * frac - 1.0)
    return -value


# ---------------------------------------------------------------------------
# CSV schema

CSV_COLUMNS = ("theta_over_pi", "value", "stderr", "method", "colouring_label")


def format_sig(x: float) -> str:
    """Floating-point formatting used in every CSV: 12 significant digits."""
    return f"{x:.12g}"


def write_curve_csv(
    curve: CorrelationCurve,
    fh,
    references: dict[str, Callable[[float], float]] | None = None,
) -> None:
    """Write a curve as CSV; optional reference columns are computed
    from theta via the given callables."""
    writer = csv.writer(fh, lineterminator="\n")
    ref_names = tuple(references or ())
    writer.writerow(CSV_COLUMNS + ref_names)
    for p in curve.points:
        row = [
            format_sig(p.theta / PI),
            format_sig(p.value),
            "" if p.stderr is None else format_sig(p.stderr),
            curve.method,
            curve.colouring_label,
        ]
        for name in ref_names:
            row.append(format_sig(references[name](p.theta)))
        writer.writerow(row)


def read_curve_csv(fh) -> CorrelationCurve:
    """Read back a curve CSV (reference columns are ignored)."""
    reader = csv.reader(fh)
    header = next(reader)
    if tuple(header[:5]) != CSV_COLUMNS:
        raise ValueError(f"unexpected CSV header {header!r}")
    points = []
    label = method = None
    for row in reader:
        if not row:
            continue
        theta = float(row[0]) * PI
        value = float(row[1])
        stderr = float(row[2]) if row[2] else None
        method = row[3]
        label = row[4]
        points.append(CurvePoint(theta, value, stderr))
    if label is None:
        raise ValueError("CSV contains no data rows")
    return CorrelationCurve(colouring_label=label, method=method, points=tuple(points))
