"""
Pump enhancement cavity: power build-up, finesse, impedance matching and
the single-/two-photon rate curves that follow from them.

Reflectivities are power reflectivities. ``r_loop`` lumps every intracavity
loss (mirrors, crystal, lenses) into one effective round-trip reflectivity.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple

import numpy as np
from scipy.optimize import minimize_scalar

from .exceptions import DivergenceError, DomainError

DEFAULT_R_IN = (0.90, 0.99)


@dataclass(frozen=True)
class CavitySpec:
    r_in: float
    r_loop: float

    def __post_init__(self):
        for name in ("r_in", "r_loop"):
            v = getattr(self, name)
            if not 0 <= v < 1:
                raise DomainError(f"{name} must lie in [0, 1), got {v}")

    @property
    def round_trip(self) -> float:
        """Amplitude round-trip factor sqrt(R_i R_m)."""
        return float(np.sqrt(self.r_in * self.r_loop))


def _round_trip(spec: CavitySpec) -> float:
    g = spec.round_trip
    if g >= 1:
        raise DivergenceError("sqrt(r_in * r_loop) == 1: lossless closed cavity")
    return g


def enhancement(spec: CavitySpec) -> float:
    """Intracavity power build-up (1 - R_i) / (1 - sqrt(R_i R_m))^2."""
    g = _round_trip(spec)
    return (1 - spec.r_in) / (1 - g) ** 2


def finesse(spec: CavitySpec) -> float:
    """Finesse pi (R_i R_m)^(1/4) / (1 - sqrt(R_i R_m))."""
    g = _round_trip(spec)
    return np.pi * np.sqrt(g) / (1 - g)


def optimal_input_coupler(r_loop: float, xatol: float = 1e-10) -> float:
    """Input-coupler reflectivity that maximizes the build-up for a given loop."""
    if not 0 <= r_loop < 1:
        raise DomainError(f"r_loop must lie in [0, 1), got {r_loop}")
    res = minimize_scalar(lambda ri: -enhancement(CavitySpec(ri, r_loop)),
                          bounds=(0.0, 1.0 - 1e-12), method="bounded",
                          options={"xatol": xatol})
    # bounded Brent never evaluates the endpoint exactly
    if r_loop == 0 or enhancement(CavitySpec(0.0, r_loop)) >= -res.fun:
        return 0.0
    return float(res.x)


class RateRow(NamedTuple):
    r_m: float
    r_i: float
    enhancement: float
    rate1_hz: float
    rate2_hz: float
    rate1_gain: float
    rate2_gain: float


RATE_COLUMNS = RateRow._fields


def default_loop_sweep() -> np.ndarray:
    """R_m from 0.80 to 0.999 in steps of 1e-3."""
    return np.round(np.linspace(0.80, 0.999, 200), 3)


def rate_curves(r_in_list: Iterable[float] = DEFAULT_R_IN, r_loop_range=None,
                baseline: tuple[float, float] = (1.0, 1.0)) -> list[RateRow]:
    """Cavity-enhanced rates over a reflectivity sweep.

    Single-photon rates scale with pump power and two-photon rates with its
    square, so each row carries ``E`` and ``E**2`` times the single-pass
    ``baseline = (R1, R2)``.
    """
    b1, b2 = baseline
    if b1 <= 0 or b2 <= 0:
        raise DomainError("baseline rates must be positive")
    r_loops = default_loop_sweep() if r_loop_range is None else np.atleast_1d(np.asarray(r_loop_range, float))
    rows = []
    for ri in r_in_list:
        for rm in r_loops:
            e = enhancement(CavitySpec(float(ri), float(rm)))
            rows.append(RateRow(float(rm), float(ri), e, b1 * e, b2 * e * e, e, e * e))
    return rows


def nearest_row(rows: list[RateRow], r_m: float, r_i: float) -> int:
    """Index of the row closest to (r_m, r_i)."""
    d = [(row.r_m - r_m) ** 2 + (row.r_i - r_i) ** 2 for row in rows]
    return int(np.argmin(d))
