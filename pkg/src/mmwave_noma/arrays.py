"""Half-wavelength uniform linear array: steering vectors, beam patterns, channels.

Directions live in the cosine-angle domain, phi = cos(physical angle) in [-1, 1].
A steered N-element array has its first pattern null at offset 2/N from the
steering direction, which is the narrowest usable beam width in this domain.

Antenna weight vectors (AWVs) are normalized to unit total power so that
transmit power is carried entirely by the allocation variables downstream.
"""

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

UNIT_NORM_TOL = 1e-9


def check_direction(phi: float) -> float:
    phi = float(phi)
    if not -1.0 <= phi <= 1.0:
        raise ValueError(f"direction cosine {phi} outside [-1, 1]")
    return phi


@dataclass(frozen=True)
class ArrayGeometry:
    """Uniform linear array with half-wavelength element spacing."""

    n_antennas: int

    def __post_init__(self):
        if int(self.n_antennas) < 1:
            raise ValueError("array needs at least one antenna")
        object.__setattr__(self, "n_antennas", int(self.n_antennas))

    @property
    def min_beam_width(self) -> float:
        """Narrowest beam width (first-null offset times two) in cosine angle."""
        return 2.0 / self.n_antennas


@dataclass(frozen=True)
class Awv:
    """Complex antenna weight vector, unit Euclidean norm.

    ``cm`` marks constant-modulus weights (every element magnitude 1/sqrt(N)),
    the phase-shifter-only hardware constraint.
    """

    weights: np.ndarray
    cm: bool = False

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.complex128)
        object.__setattr__(self, "weights", w)
        nrm = np.linalg.norm(w)
        if abs(nrm - 1.0) > UNIT_NORM_TOL:
            raise ValueError(f"AWV norm {nrm} is not 1 within {UNIT_NORM_TOL}")
        if self.cm:
            mags = np.abs(w)
            target = 1.0 / np.sqrt(w.size)
            if np.max(np.abs(mags - target)) > UNIT_NORM_TOL:
                raise ValueError("cm flag set but weights are not constant modulus")

    def __len__(self):
        return self.weights.size


@dataclass(frozen=True)
class UserSpec:
    """What a channel draw needs to know about a user."""

    user_id: int
    direction: float
    avg_power: float

    def __post_init__(self):
        check_direction(self.direction)
        if self.avg_power < 0:
            raise ValueError("avg_power must be nonnegative")


@dataclass(frozen=True)
class ChannelState:
    """Single-path channel of one user: direction, complex gain, average power."""

    user_id: int
    direction: float
    gain: complex
    avg_power: float

    def __post_init__(self):
        check_direction(self.direction)
        if self.avg_power < 0:
            raise ValueError("avg_power must be nonnegative")

    @property
    def power(self) -> float:
        """Instantaneous channel power |g|^2."""
        return abs(self.gain) ** 2


def steering_vector(geom: ArrayGeometry, phi: float) -> np.ndarray:
    """a(phi): entry n is exp(j*pi*n*phi); squared norm equals N."""
    check_direction(phi)
    n = np.arange(geom.n_antennas)
    return np.exp(1j * np.pi * n * phi)


def steering_matrix(geom: ArrayGeometry, phis: np.ndarray) -> np.ndarray:
    """Columns a(phi) for each phi, shape (N, len(phis))."""
    phis = np.asarray(phis, dtype=float)
    n = np.arange(geom.n_antennas)
    return np.exp(1j * np.pi * np.outer(n, phis))


def beam_gain(w: Awv, phi: float) -> float:
    """Power gain |w^H a(phi)|^2 of a unit-norm AWV; bounded by [0, N]."""
    a = steering_vector(ArrayGeometry(len(w)), phi)
    return float(np.abs(np.vdot(w.weights, a)) ** 2)


def beam_gains(w: Awv, phis: np.ndarray) -> np.ndarray:
    """Vectorized beam_gain over many directions."""
    geom = ArrayGeometry(len(w))
    A = steering_matrix(geom, phis)
    return np.abs(w.weights.conj() @ A) ** 2


def pattern(w: Awv, grid_size: int):
    """Gain samples on a uniform phi grid over [-1, 1], endpoints included.

    Returns (phis, gains) as ascending arrays.
    """
    if grid_size < 2:
        raise ValueError("grid_size must be at least 2")
    phis = np.linspace(-1.0, 1.0, grid_size)
    return phis, beam_gains(w, phis)


def average_gain(w: Awv, grid_size: int = 4096) -> float:
    """Quadrature of (1/2) * integral of G(phi) over [-1, 1].

    Equals 1 for any unit-norm AWV (the pattern is a trigonometric polynomial,
    so the trapezoid rule on a fine grid is exact up to rounding).
    """
    phis, gains = pattern(w, grid_size)
    return float(np.trapezoid(gains, phis) / 2.0)


def sample_channel(spec: UserSpec, seed, random_fading: bool = False) -> ChannelState:
    """Draw the user's single-path complex gain.

    Deterministic mode fixes |g|^2 = avg_power and randomizes only the phase;
    ``random_fading`` draws g complex Gaussian with E|g|^2 = avg_power.
    The same seed always reproduces the same channel.
    """
    rng = np.random.default_rng(seed)
    if random_fading:
        re, im = rng.standard_normal(2)
        g = np.sqrt(spec.avg_power / 2.0) * (re + 1j * im)
    else:
        phase = rng.uniform(0.0, 2.0 * np.pi)
        g = np.sqrt(spec.avg_power) * np.exp(1j * phase)
    return ChannelState(spec.user_id, spec.direction, complex(g), spec.avg_power)
