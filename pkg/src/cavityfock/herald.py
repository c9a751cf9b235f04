"""
Heralded Fock-state preparation with two on/off detectors behind a beam
splitter in the idler arm.

The source emits perfectly photon-number-correlated pairs, so conditioning
on an idler click pattern leaves the signal in a diagonal state whose
weights are the pair distribution times the pattern probability.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace

import numpy as np

from .cavity import CavitySpec, enhancement
from .exceptions import DomainError, ImpossibleHeraldError, NonPhysicalGainError
from .fock import DensityMatrix, source_weights


class Pattern(str, enum.Enum):
    NONE = "NONE"
    A_ONLY = "A_ONLY"
    B_ONLY = "B_ONLY"
    #: exactly one of the two detectors fired
    A_OR_B_SINGLE = "A_OR_B_SINGLE"
    BOTH = "BOTH"


EXCLUSIVE_PATTERNS = (Pattern.NONE, Pattern.A_ONLY, Pattern.B_ONLY, Pattern.BOTH)


@dataclass(frozen=True)
class HeraldSpec:
    split: float = 0.5
    eta_click: float = 1.0
    dark: float = 0.0
    pattern: Pattern = Pattern.BOTH

    def __post_init__(self):
        object.__setattr__(self, "pattern", Pattern(self.pattern))
        if not 0 < self.split < 1:
            raise DomainError(f"split must lie in (0, 1), got {self.split}")
        if not 0 <= self.eta_click <= 1:
            raise DomainError(f"eta_click must lie in [0, 1], got {self.eta_click}")
        if not 0 <= self.dark < 1:
            raise DomainError(f"dark must lie in [0, 1), got {self.dark}")


@dataclass(frozen=True)
class RateModel:
    rep_rate: float
    base_gain: float

    def __post_init__(self):
        if self.rep_rate <= 0:
            raise DomainError("rep_rate must be positive")
        if self.base_gain < 0:
            raise DomainError("base_gain must be nonnegative")
        if self.base_gain >= 1:
            raise NonPhysicalGainError(f"gain {self.base_gain} >= 1 is not physical")


@dataclass(frozen=True)
class HeraldOutcome:
    state: DensityMatrix
    prob_per_pulse: float
    rate_hz: float | None = None


def click_probability(pattern, n, spec: HeraldSpec):
    """Probability of ``pattern`` given ``n`` idler photons (vectorized over ``n``).

    Each photon goes to A with probability ``split`` and is detected with
    ``eta_click``; each detector also fires spuriously with ``dark``.
    """
    pattern = Pattern(pattern)
    n = np.asarray(n)
    if np.any(n < 0):
        raise ValueError("photon number must be nonnegative")
    s, eta, d = spec.split, spec.eta_click, spec.dark
    quiet_a = (1 - d) * (1 - s * eta) ** n
    quiet_b = (1 - d) * (1 - (1 - s) * eta) ** n
    quiet_ab = (1 - d) ** 2 * (1 - eta) ** n
    if pattern is Pattern.NONE:
        out = quiet_ab
    elif pattern is Pattern.A_ONLY:
        out = quiet_b - quiet_ab
    elif pattern is Pattern.B_ONLY:
        out = quiet_a - quiet_ab
    elif pattern is Pattern.A_OR_B_SINGLE:
        out = quiet_a + quiet_b - 2 * quiet_ab
    else:
        out = 1 - quiet_a - quiet_b + quiet_ab
    out = np.clip(out, 0.0, 1.0)
    return float(out) if out.ndim == 0 else out


def herald_state(lam: float, spec: HeraldSpec, dim: int = 5, rep_rate: float | None = None) -> HeraldOutcome:
    """Signal state conditioned on ``spec.pattern`` for a source of gain ``lam``.

    ``prob_per_pulse`` uses the unnormalized pair distribution, so photon
    numbers at or above ``dim`` simply do not contribute.
    """
    if lam < 0:
        raise DomainError(f"gain must be nonnegative, got {lam}")
    if lam >= 1:
        raise NonPhysicalGainError(f"gain {lam} >= 1 is not physical")
    w = source_weights(lam, dim) * click_probability(spec.pattern, np.arange(dim), spec)
    total = float(w.sum())
    if total <= 0:
        raise ImpossibleHeraldError(f"pattern {spec.pattern.value} never fires at gain {lam}")
    rate = None if rep_rate is None else total * rep_rate
    return HeraldOutcome(DensityMatrix.from_diagonal(w / total), total, rate)


def _herald_prob(lam, spec, pattern, dim):
    if lam == 0 and spec.dark == 0:
        return 0.0
    w = source_weights(lam, dim) * click_probability(pattern, np.arange(dim), spec)
    return float(w.sum())


def predicted_rates(model: RateModel, spec: HeraldSpec, dim: int = 40) -> tuple[float, float]:
    """Single-click and double-click herald rates (Hz) for ``model``."""
    r1 = model.rep_rate * _herald_prob(model.base_gain, spec, Pattern.A_OR_B_SINGLE, dim)
    r2 = model.rep_rate * _herald_prob(model.base_gain, spec, Pattern.BOTH, dim)
    return r1, r2


def two_photon_rate_from_single(rate1: float, rep_rate: float) -> float:
    """Low-gain double-click rate implied by a single-click rate: R1^2 / (2 R)."""
    return rate1**2 / (2 * rep_rate)


def apply_cavity(model: RateModel, cavity: CavitySpec) -> RateModel:
    """Scale the gain by sqrt(E): the cavity boosts pump power, gain follows amplitude."""
    gain = model.base_gain * np.sqrt(enhancement(cavity))
    if gain >= 1:
        raise NonPhysicalGainError(f"cavity-enhanced gain {gain:.4g} >= 1 is not physical")
    return replace(model, base_gain=float(gain))
