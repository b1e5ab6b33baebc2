"""Antipodal two-colourings of the sphere.

A colouring assigns +1 or -1 to every direction.  Two families are
provided: band colourings, which are azimuthally symmetric and defined
by the set of polar intervals where the value is +1, and harmonic-sign
colourings, the sign of a real linear combination of odd-degree real
spherical harmonics (odd degree makes them antipodal automatically).

The catalogue built by :func:`make_catalogue` contains the band
colourings used throughout: the hemisphere split (label 1), the
alternating families with 2, 3 and 4 northern bands per hemisphere
(labels 2, 3, 4), the one-parameter deformation of label 3 (label
3_delta, parameter delta in [-pi/18, pi/24]) and the one-parameter
deformation of label 2 (label 2_Delta, parameter Delta in [0, pi/12],
which narrows the polar cap band and widens its antipodal image).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Protocol, Sequence, runtime_checkable

import numpy as np
from scipy.special import lpmv

from .geometry import Direction, antipode

EDGE_TOL = 1e-9


@runtime_checkable
class Colouring(Protocol):
    """Anything that can be evaluated to +-1 on arrays of directions."""

    label: str
    is_azimuthal: bool

    def evaluate_many(self, eps: np.ndarray, phi: np.ndarray) -> np.ndarray: ...


def evaluate(c: Colouring, d: Direction) -> int:
    """Value of the colouring at one direction, +1 or -1."""
    out = c.evaluate_many(np.array([d.epsilon]), np.array([d.phi]))
    return int(out[0])


@dataclass(frozen=True)
class BandColouring:
    """Azimuthally symmetric colouring: +1 on closed polar bands.

    ``plus_bands`` are sorted intervals [lo, hi] within [0, pi] with
    disjoint interiors (touching endpoints are allowed).  Band edges
    take the value +1: edge points are a measure-zero set and may carry
    either colour, so a fixed convention keeps evaluation deterministic
    without affecting any integral.
    """

    plus_bands: tuple[tuple[float, float], ...]
    label: str = "bands"

    is_azimuthal = True

    def __post_init__(self) -> None:
        bands = tuple((float(lo), float(hi)) for lo, hi in self.plus_bands)
        if not bands:
            raise ValueError("at least one plus band is required")
        prev_hi = -math.inf
        for lo, hi in bands:
            if not (0.0 <= lo < hi <= math.pi):
                raise ValueError(f"band [{lo!r}, {hi!r}] not a proper interval in [0, pi]")
            if lo < prev_hi:
                raise ValueError("bands overlap or are out of order")
            prev_hi = hi
        object.__setattr__(self, "plus_bands", bands)

    @property
    def edges(self) -> tuple[float, ...]:
        """All band endpoints in (0, pi), sorted."""
        out = sorted(
            {v for band in self.plus_bands for v in band if EDGE_TOL < v < math.pi - EDGE_TOL}
        )
        return tuple(out)

    def evaluate_polar(self, eps: np.ndarray) -> np.ndarray:
        """Vectorized value from the polar angle alone."""
        eps = np.asarray(eps, dtype=float)
        inside = np.zeros(eps.shape, dtype=bool)
        for lo, hi in self.plus_bands:
            inside |= (eps >= lo) & (eps <= hi)
        return np.where(inside, 1, -1)

    def evaluate_many(self, eps: np.ndarray, phi: np.ndarray) -> np.ndarray:
        return self.evaluate_polar(eps)

    def value_at(self, eps: float) -> int:
        return int(self.evaluate_polar(np.array([eps]))[0])

    def minus_bands(self) -> tuple[tuple[float, float], ...]:
        """Complement intervals of the plus set within [0, pi]."""
        gaps = []
        cursor = 0.0
        for lo, hi in self.plus_bands:
            if lo - cursor > 0.0:
                gaps.append((cursor, lo))
            cursor = hi
        if math.pi - cursor > 0.0:
            gaps.append((cursor, math.pi))
        return tuple(gaps)

    def is_antipodal(self, tol: float = EDGE_TOL) -> bool:
        """Structural antipodality: the reflected complement is the plus set.

        Checked up to the measure-zero band edges, i.e. band endpoints
        compare within ``tol``.
        """
        reflected = sorted((math.pi - hi, math.pi - lo) for lo, hi in self.minus_bands())
        if len(reflected) != len(self.plus_bands):
            return False
        return all(
            abs(rlo - lo) <= tol and abs(rhi - hi) <= tol
            for (rlo, rhi), (lo, hi) in zip(reflected, self.plus_bands)
        )


@dataclass(frozen=True)
class HarmonicColouring:
    """Sign of a sum of real spherical harmonics of odd degree.

    ``terms`` is a sequence of (l, m, coefficient) with every l odd
    (odd-degree harmonics are odd under point inversion, which makes
    the sign function antipodal) and at least one nonzero coefficient.
    The tie value sgn(0) := +1 keeps evaluation deterministic on the
    measure-zero nodal set.
    """

    terms: tuple[tuple[int, int, float], ...]
    label: str = "harmonic"

    def __post_init__(self) -> None:
        terms = tuple((int(l), int(m), float(c)) for l, m, c in self.terms)
        if not terms:
            raise ValueError("at least one harmonic term is required")
        for l, m, _ in terms:
            if l < 0 or l % 2 == 0:
                raise ValueError(f"degree {l} must be odd and non-negative")
            if abs(m) > l:
                raise ValueError(f"order {m} exceeds degree {l}")
        if all(c == 0.0 for _, _, c in terms):
            raise ValueError("all coefficients are zero")
        object.__setattr__(self, "terms", terms)

    @property
    def is_azimuthal(self) -> bool:
        return all(m == 0 for _, m, _ in self.terms)

    def coefficient_norm(self) -> float:
        return math.sqrt(sum(c * c for _, _, c in self.terms))

    def amplitude(self, eps: np.ndarray, phi: np.ndarray) -> np.ndarray:
        """The underlying real harmonic sum, before taking the sign."""
        eps = np.asarray(eps, dtype=float)
        phi = np.asarray(phi, dtype=float)
        x = np.cos(eps)
        total = np.zeros(np.broadcast(eps, phi).shape)
        for l, m, c in self.terms:
            if c == 0.0:
                continue
            total += c * real_spherical_harmonic(l, m, x, phi)
        return total

    def evaluate_many(self, eps: np.ndarray, phi: np.ndarray) -> np.ndarray:
        amp = self.amplitude(eps, phi)
        return np.where(amp >= 0.0, 1, -1)

    def evaluate_polar(self, eps: np.ndarray) -> np.ndarray:
        if not self.is_azimuthal:
            raise ValueError("colouring is not azimuthally symmetric")
        return self.evaluate_many(eps, np.zeros(1))


def real_spherical_harmonic(
    l: int, m: int, x: np.ndarray, phi: np.ndarray
) -> np.ndarray:
    """Real orthonormal spherical harmonic Y_{lm} at cos(polar) = x.

    Standard tesseral convention: m > 0 pairs with cos(m phi), m < 0
    with sin(|m| phi), and the Condon-Shortley phase of the associated
    Legendre function is cancelled.
    """
    am = abs(m)
    norm = math.sqrt(
        (2 * l + 1) / (4.0 * math.pi) * math.factorial(l - am) / math.factorial(l + am)
    )
    leg = lpmv(am, l, x)
    if m == 0:
        return norm * leg
    base = math.sqrt(2.0) * (-1.0) ** am * norm * leg
    if m > 0:
        return base * np.cos(am * phi)
    return base * np.sin(am * phi)


@dataclass(frozen=True)
class Negated:
    """The colour swap of another colouring."""

    inner: Colouring

    @property
    def label(self) -> str:
        return f"-{self.inner.label}"

    @property
    def is_azimuthal(self) -> bool:
        return self.inner.is_azimuthal

    def evaluate_many(self, eps: np.ndarray, phi: np.ndarray) -> np.ndarray:
        return -self.inner.evaluate_many(eps, phi)

    def evaluate_polar(self, eps: np.ndarray) -> np.ndarray:
        return -self.inner.evaluate_polar(eps)


def negate(c: Colouring) -> Colouring:
    if isinstance(c, Negated):
        return c.inner
    return Negated(c)


@dataclass(frozen=True)
class ColouringPair:
    """The two parties' colourings, with an optional declared gamma.

    gamma is 1 minus the probability of opposite values at zero
    separation; pairs built by :meth:`anticorrelated` have gamma = 0 by
    construction (the partner is the colour swap of the first party).
    """

    alice: Colouring
    bob: Colouring
    gamma_declared: float | None = None

    def __post_init__(self) -> None:
        if self.gamma_declared is not None:
            g = float(self.gamma_declared)
            if not 0.0 <= g <= 1.0:
                raise ValueError(f"gamma {g!r} outside [0, 1]")
            object.__setattr__(self, "gamma_declared", g)

    @classmethod
    def anticorrelated(cls, alice: Colouring) -> "ColouringPair":
        return cls(alice=alice, bob=negate(alice), gamma_declared=0.0)


DELTA_RANGE = (-math.pi / 18.0, math.pi / 24.0)
DELTA_CAP_RANGE = (0.0, math.pi / 12.0)


def make_catalogue(
    label: str | int,
    delta: float | None = None,
    Delta: float | None = None,
) -> BandColouring:
    """Build a catalogue band colouring by label.

    Labels: 1 (or "hemisphere"), 2, 3, 4, "3_delta" (requires ``delta``
    in [-pi/18, pi/24] radians) and "2_Delta" (requires ``Delta`` in
    [0, pi/12] radians).  A parameter may also be inlined in the label
    after a colon, in units of pi, e.g. "3_delta:-0.038".
    """
    name = str(label).strip()
    if ":" in name:
        name, _, arg = name.partition(":")
        value = float(arg) * math.pi
        if name == "3_delta":
            delta = value
        elif name == "2_Delta":
            Delta = value
        else:
            raise ValueError(f"label {name!r} takes no parameter")
    if name == "hemisphere":
        name = "1"

    pi = math.pi
    if name == "1":
        return BandColouring(((0.0, pi / 2),), label="1")
    if name == "2":
        return BandColouring(((0.0, pi / 4), (pi / 2, 3 * pi / 4)), label="2")
    if name == "3":
        return BandColouring(
            ((0.0, pi / 6), (pi / 3, pi / 2), (2 * pi / 3, 5 * pi / 6)), label="3"
        )
    if name == "4":
        return BandColouring(
            (
                (0.0, pi / 8),
                (pi / 4, 3 * pi / 8),
                (pi / 2, 5 * pi / 8),
                (3 * pi / 4, 7 * pi / 8),
            ),
            label="4",
        )
    if name == "3_delta":
        if delta is None:
            raise ValueError("label 3_delta requires the delta parameter")
        d = float(delta)
        if not DELTA_RANGE[0] - 1e-12 <= d <= DELTA_RANGE[1] + 1e-12:
            raise ValueError(f"delta {d!r} outside [-pi/18, pi/24]")
        return BandColouring(
            ((0.0, pi / 6 + d), (pi / 3, pi / 2), (2 * pi / 3, 5 * pi / 6 - d)),
            label=f"3_delta:{d / pi:g}",
        )
    if name == "2_Delta":
        if Delta is None:
            raise ValueError("label 2_Delta requires the Delta parameter")
        d = float(Delta)
        if not DELTA_CAP_RANGE[0] - 1e-12 <= d <= DELTA_CAP_RANGE[1] + 1e-12:
            raise ValueError(f"Delta {d!r} outside [0, pi/12]")
        # The polar cap band shrinks by Delta; the southern bands are the
        # antipodal complement of the northern half, so the band starting
        # at pi/2 stretches to 3pi/4 + Delta.
        return BandColouring(
            ((0.0, pi / 4 - d), (pi / 2, 3 * pi / 4 + d)),
            label=f"2_Delta:{d / pi:g}",
        )
    raise ValueError(f"unknown catalogue label {label!r}")


def catalogue_labels() -> tuple[str, ...]:
    """The parameter-free catalogue labels."""
    return ("1", "2", "3", "4")


@dataclass(frozen=True)
class AntipodalReport:
    n_tested: int
    n_violations: int

    @property
    def violation_fraction(self) -> float:
        return self.n_violations / self.n_tested if self.n_tested else 0.0


def check_antipodal(
    c: Colouring, n_samples: int, rng: np.random.Generator
) -> AntipodalReport:
    """Sampled antipodality check: value(-d) must equal -value(d).

    Directions are uniform on the sphere, thinned to stay more than
    1e-9 away from the colouring's edge set (band edges, or the nodal
    set measured by the harmonic amplitude relative to the coefficient
    norm), where either colour is legitimate.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be at least 1")
    kept_eps: list[np.ndarray] = []
    kept_phi: list[np.ndarray] = []
    kept = 0
    while kept < n_samples:
        n = n_samples - kept
        eps = np.arccos(rng.uniform(-1.0, 1.0, n))
        phi = rng.uniform(0.0, 2.0 * math.pi, n)
        ok = np.ones(n, dtype=bool)
        core = c.inner if isinstance(c, Negated) else c
        if isinstance(core, BandColouring):
            for edge in core.edges:
                ok &= np.abs(eps - edge) > EDGE_TOL
                ok &= np.abs((math.pi - eps) - edge) > EDGE_TOL
        elif isinstance(core, HarmonicColouring):
            floor = EDGE_TOL * core.coefficient_norm()
            ok &= np.abs(core.amplitude(eps, phi)) > floor
            ok &= np.abs(core.amplitude(math.pi - eps, phi + math.pi)) > floor
        kept_eps.append(eps[ok])
        kept_phi.append(phi[ok])
        kept += int(np.count_nonzero(ok))
    eps = np.concatenate(kept_eps)[:n_samples]
    phi = np.concatenate(kept_phi)[:n_samples]
    direct = c.evaluate_many(eps, phi)
    mirrored = c.evaluate_many(math.pi - eps, (phi + math.pi) % (2.0 * math.pi))
    violations = int(np.count_nonzero(direct != -mirrored))
    return AntipodalReport(n_tested=n_samples, n_violations=violations)


def circle_colouring_value(n: int, epsilon: float) -> int:
    """The alternating arc colouring of the circle: (-1)^floor(n eps / pi).

    Only defined for odd n, where the 2n arcs of width pi/n form an
    antipodal colouring of the circle.
    """
    n = int(n)
    if n <= 0 or n % 2 == 0:
        raise ValueError(f"arc count {n} must be an odd positive integer")
    eps = float(epsilon)
    if not -1e-12 <= eps <= 2.0 * math.pi + 1e-12:
        raise ValueError(f"circle angle {eps!r} outside [0, 2pi]")
    return -1 if math.floor(n * eps / math.pi) % 2 else 1


def colouring_from_spec(spec: dict) -> Colouring:
    """Build a colouring from a description mapping.

    Exactly one of the content fields must be present:

    - ``kind: "catalogue"`` with ``label`` (and ``delta`` / ``Delta`` in
      units of pi for the parametric labels),
    - ``kind: "bands"`` with ``bands``, a list of [lo, hi] pairs in
      units of pi (optional ``label``),
    - ``kind: "harmonic"`` with ``terms``, a list of [l, m, coefficient].
    """
    kind = spec.get("kind")
    if kind == "catalogue":
        delta = spec.get("delta")
        Delta = spec.get("Delta")
        return make_catalogue(
            spec["label"],
            delta=None if delta is None else float(delta) * math.pi,
            Delta=None if Delta is None else float(Delta) * math.pi,
        )
    if kind == "bands":
        bands = tuple(
            (float(lo) * math.pi, float(hi) * math.pi) for lo, hi in spec["bands"]
        )
        return BandColouring(bands, label=str(spec.get("label", "bands")))
    if kind == "harmonic":
        terms = tuple((int(l), int(m), float(c)) for l, m, c in spec["terms"])
        return HarmonicColouring(terms, label=str(spec.get("label", "harmonic")))
    raise ValueError(f"unknown colouring kind {kind!r}")


def load_colouring(path: str) -> Colouring:
    """Read a colouring description file (JSON with the fields above)."""
    with open(path, "r", encoding="utf-8") as fh:
        return colouring_from_spec(json.load(fh))
