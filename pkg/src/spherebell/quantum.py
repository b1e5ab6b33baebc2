"""Quantum reference curves for the sphere-colouring correlations.

The singlet gives Q(theta) = -cos(theta); a Werner state with singlet
fidelity r gives -((4r - 1)/3) cos(theta), which spans every
rotationally averaged two-qubit curve: averaging joint spin
measurements along a Haar-random frame is the same as twirling the
state first, and the twirl of any state is the Werner state with the
same singlet fidelity.  The module provides the analytic curves, the
twirl, a Monte Carlo estimator over Haar-random measurement frames
(sharing the deterministic chunking of the classical engine), and the
PR-box curve as the no-signalling reference.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .correlation import SamplingPlan

PI = math.pi
SNAP = 1e-12

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
EIGENVALUE_FLOOR = -1e-10

# Bell basis, computational order |00>, |01>, |10>, |11>
_PSI_MINUS = np.array([0.0, 1.0, -1.0, 0.0]) / math.sqrt(2.0)
_PSI_PLUS = np.array([0.0, 1.0, 1.0, 0.0]) / math.sqrt(2.0)
_PHI_PLUS = np.array([1.0, 0.0, 0.0, 1.0]) / math.sqrt(2.0)
_PHI_MINUS = np.array([1.0, 0.0, 0.0, -1.0]) / math.sqrt(2.0)

_SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
_SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)


def _check_theta(theta: float) -> float:
    t = float(theta)
    if not -SNAP <= t <= PI + SNAP:
        raise ValueError(f"theta {t!r} outside [0, pi]")
    return min(max(t, 0.0), PI)


@dataclass(frozen=True)
class WernerParam:
    """Singlet fidelity r of a Werner state."""

    r: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.r <= 1.0:
            raise ValueError(f"r {self.r!r} outside [0, 1]")


@dataclass(frozen=True)
class TwoQubitState:
    """A two-qubit density operator in the |00>,|01>,|10>,|11> basis."""

    rho: np.ndarray

    def __post_init__(self) -> None:
        rho = np.asarray(self.rho, dtype=complex)
        if rho.shape != (4, 4):
            raise ValueError(f"density matrix must be 4x4, got {rho.shape}")
        if np.max(np.abs(rho - rho.conj().T)) > HERMITIAN_TOL:
            raise ValueError("density matrix is not Hermitian")
        if abs(np.trace(rho).real - 1.0) > TRACE_TOL or abs(np.trace(rho).imag) > TRACE_TOL:
            raise ValueError("density matrix trace is not 1")
        if float(np.min(np.linalg.eigvalsh(rho))) < EIGENVALUE_FLOOR:
            raise ValueError("density matrix has a negative eigenvalue")
        object.__setattr__(self, "rho", rho)

    @classmethod
    def pure(cls, vector: np.ndarray) -> "TwoQubitState":
        v = np.asarray(vector, dtype=complex).reshape(4)
        v = v / np.linalg.norm(v)
        return cls(np.outer(v, v.conj()))

    @classmethod
    def named(cls, name: str) -> "TwoQubitState":
        key = name.strip().lower()
        if key == "singlet" or key == "psi-":
            return cls.pure(_PSI_MINUS)
        if key == "psi+":
            return cls.pure(_PSI_PLUS)
        if key == "phi+":
            return cls.pure(_PHI_PLUS)
        if key == "phi-":
            return cls.pure(_PHI_MINUS)
        if key == "mixed":
            return cls(np.eye(4, dtype=complex) / 4.0)
        raise ValueError(
            f"unknown state name {name!r}; expected singlet|phi+|phi-|psi+|mixed"
        )

    @classmethod
    def werner(cls, r: float | WernerParam) -> "TwoQubitState":
        w = r if isinstance(r, WernerParam) else WernerParam(float(r))
        p_minus = np.outer(_PSI_MINUS, _PSI_MINUS)
        rest = np.eye(4) - p_minus
        return cls(w.r * p_minus + (1.0 - w.r) / 3.0 * rest)


def parse_state_text(text: str) -> TwoQubitState:
    """Parse a plain-text 4x4 density matrix, row-major, complex
    entries written like "0.25+0i" (whitespace or commas between)."""
    tokens = text.replace(",", " ").split()
    if len(tokens) != 16:
        raise ValueError(f"expected 16 matrix entries, got {len(tokens)}")
    values = [complex(tok.replace("i", "j")) for tok in tokens]
    return TwoQubitState(np.array(values, dtype=complex).reshape(4, 4))


def twirl(state: TwoQubitState) -> WernerParam:
    """Singlet fidelity of the state, which fully determines its
    rotation average (the twirled Werner state)."""
    r = float(np.real(_PSI_MINUS @ state.rho @ _PSI_MINUS))
    return WernerParam(min(1.0, max(0.0, r)))


def singlet_correlation(theta: float) -> float:
    return -math.cos(_check_theta(theta))


def _fidelity(w: float | WernerParam) -> float:
    return w.r if isinstance(w, WernerParam) else WernerParam(float(w)).r


def werner_correlation(w: float | WernerParam, theta: float) -> float:
    return -((4.0 * _fidelity(w) - 1.0) / 3.0) * math.cos(_check_theta(theta))


def werner_pp(w: float | WernerParam, theta: float) -> float:
    """Probability that both parties report +1 at separation theta."""
    r = _fidelity(w)
    t = _check_theta(theta)
    return (1.0 - r) / 3.0 + ((4.0 * r - 1.0) / 6.0) * math.sin(t / 2.0) ** 2


def pr_box_correlation(theta: float) -> float:
    t = _check_theta(theta)
    if t < PI / 2.0:
        return 1.0
    if t > PI / 2.0:
        return -1.0
    return 0.0


# ---------------------------------------------------------------------------
# Haar-random measurement frames


def haar_unitaries(rng: np.random.Generator, n: int) -> np.ndarray:
    """Batch of Haar-random 2x2 unitaries, shape (n, 2, 2).

    Euler construction Rz(phi) Ry(eps) Rz(omega) with cos(eps) uniform
    on [-1, 1] and phi, omega uniform on [0, 2pi).
    """
    phi = rng.uniform(0.0, 2.0 * PI, n)
    eps = np.arccos(rng.uniform(-1.0, 1.0, n))
    omega = rng.uniform(0.0, 2.0 * PI, n)
    half = eps / 2.0
    c, s = np.cos(half), np.sin(half)
    u = np.empty((n, 2, 2), dtype=complex)
    u[:, 0, 0] = np.exp(-0.5j * (phi + omega)) * c
    u[:, 0, 1] = -np.exp(-0.5j * (phi - omega)) * s
    u[:, 1, 0] = np.exp(0.5j * (phi - omega)) * s
    u[:, 1, 1] = np.exp(0.5j * (phi + omega)) * c
    return u


def _frame_expectations(
    rho4: np.ndarray, theta: float, u: np.ndarray
) -> np.ndarray:
    """Exact correlation Tr(rho A_U (x) B_U) for each frame U.

    A_U = U sigma_z U^dag is the difference of the up/down projectors
    U|0><0|U^dag; B_U likewise for |chi> = cos(theta/2)|0> +
    sin(theta/2)|1>, whose projector difference is
    sin(theta) sigma_x + cos(theta) sigma_z.
    """
    sigma_chi = math.sin(theta) * _SIGMA_X + math.cos(theta) * _SIGMA_Z
    udag = np.conj(np.swapaxes(u, 1, 2))
    a_ops = u @ _SIGMA_Z @ udag
    b_ops = u @ sigma_chi @ udag
    # (A (x) B)[2a+b, 2c+d] = A[a,c] B[b,d]; trace against rho reshaped
    return np.real(np.einsum("abcd,nca,ndb->n", rho4, a_ops, b_ops))


def mc_quantum_correlation(
    state: TwoQubitState, theta: float, plan: SamplingPlan
) -> tuple[float, float]:
    """Monte Carlo estimate of the frame-averaged correlation.

    Each sample draws one Haar frame and contributes the exact quantum
    expectation in that frame, so the estimator converges to
    werner_correlation(twirl(state), theta).  Chunked like the
    classical engine: the result depends only on the plan.
    """
    t = _check_theta(theta)
    rho4 = state.rho.reshape(2, 2, 2, 2)
    total = 0.0
    total_sq = 0.0
    for index, length in plan.chunks():
        e = _frame_expectations(rho4, t, haar_unitaries(plan.chunk_rng(index), length))
        total += float(np.sum(e))
        total_sq += float(np.sum(e * e))
    n = plan.n_samples
    mean = total / n
    if n > 1:
        variance = max(0.0, (total_sq - n * mean * mean) / (n - 1))
        stderr = math.sqrt(variance / n)
    else:
        stderr = float("nan")
    return mean, stderr


def random_state(rng: np.random.Generator) -> TwoQubitState:
    """A random full-rank density operator (Ginibre construction)."""
    g = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    rho = g @ g.conj().T
    rho /= np.trace(rho).real
    rho = 0.5 * (rho + rho.conj().T)
    return TwoQubitState(rho)
