"""Idealized flat-top beam model: gain 2/width inside the beam, zero outside.

This is the analytic abstraction used by the sum-rate sweeps; physical
constant-modulus patterns live in beam_design.
"""

from dataclasses import dataclass

from .arrays import ArrayGeometry, check_direction

BUDGET = 2.0  # integral of gain over the cosine-angle domain for unit power
BUDGET_TOL = 1e-9


def ideal_gain(width: float) -> float:
    """Flat-top beam gain 2/B for width B."""
    if width <= 0:
        raise ValueError("beam width must be positive")
    return 2.0 / width


def required_width(directions, geom: ArrayGeometry) -> float:
    """Width needed to cover all directions with one flat-top beam.

    Span of the directions plus a 2/N guard so edge users sit inside the
    flat top; a single user needs just the narrowest width 2/N.
    """
    phis = [check_direction(p) for p in directions]
    if not phis:
        raise ValueError("need at least one direction")
    span = max(phis) - min(phis)
    return max(span + geom.min_beam_width, geom.min_beam_width)


@dataclass(frozen=True)
class BeamSpec:
    """One flat-top beam: center direction, width, power gain."""

    center: float
    width: float
    gain: float

    def __post_init__(self):
        check_direction(self.center)
        if self.width <= 0:
            raise ValueError("beam width must be positive")
        if self.gain < 0:
            raise ValueError("beam gain must be nonnegative")

    @property
    def lo(self) -> float:
        return self.center - self.width / 2.0

    @property
    def hi(self) -> float:
        return self.center + self.width / 2.0

    def contains(self, phi: float) -> bool:
        return self.lo <= phi <= self.hi


@dataclass(frozen=True)
class IdealMultibeam:
    """Several flat-top beams with disjoint intervals, joint budget sum(G*B) <= 2."""

    beams: tuple

    def __post_init__(self):
        beams = tuple(self.beams)
        object.__setattr__(self, "beams", beams)
        if not beams:
            raise ValueError("need at least one beam")
        budget = sum(b.gain * b.width for b in beams)
        if budget > BUDGET + BUDGET_TOL:
            raise ValueError(
                f"gain-width budget {budget:.6f} exceeds {BUDGET} (infeasible multibeam)"
            )
        ordered = sorted(beams, key=lambda b: b.lo)
        for a, b in zip(ordered, ordered[1:]):
            if b.lo < a.hi - BUDGET_TOL:
                raise ValueError("beam intervals overlap")


def ideal_gain_at(mb: IdealMultibeam, phi: float) -> float:
    """Gain of the beam whose interval contains phi, else 0.

    A phi on a shared boundary belongs to the lower-indexed beam.
    """
    check_direction(phi)
    for beam in mb.beams:
        if beam.contains(phi):
            return beam.gain
    return 0.0
