"""
Seeded Monte Carlo homodyne data.

Samples are drawn by inverting a tabulated cumulative distribution. The
density p(x | theta) is a trigonometric polynomial in theta, so the CDF for
any phase is a fixed linear combination of a few cumulative tables; tables
for many phases are built in batches from those.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .exceptions import DomainError
from .fock import StateLike, apply_loss, as_matrix, fock_wavefunctions

X_LIMIT = 10.0
TABLE_POINTS = 4096
_BATCH = 256


@dataclass(frozen=True)
class QuadratureDataset:
    theta: np.ndarray
    x: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        th = np.array(self.theta, dtype=float)
        xs = np.array(self.x, dtype=float)
        if th.shape != xs.shape or th.ndim != 1:
            raise ValueError("theta and x must be 1-D arrays of equal length")
        if not (np.all(np.isfinite(th)) and np.all(np.isfinite(xs))):
            raise ValueError("dataset contains non-finite values")
        th.setflags(write=False)
        xs.setflags(write=False)
        object.__setattr__(self, "theta", th)
        object.__setattr__(self, "x", xs)

    def __len__(self):
        return self.x.size

    @property
    def records(self):
        return list(zip(self.theta.tolist(), self.x.tolist()))


def phase_schedule(kind: str, n: int, steps: int = 12, seed: int | None = None) -> np.ndarray:
    """Local-oscillator phases for ``n`` shots.

    ``"uniform-random"`` draws i.i.d. phases in [0, pi); ``"stepped"`` cycles
    through ``steps`` equispaced phases k pi / steps.
    """
    if n <= 0:
        raise ValueError("n must be positive")
    if kind == "uniform-random":
        return np.random.default_rng(seed).uniform(0.0, np.pi, n)
    if kind == "stepped":
        if steps <= 0:
            raise ValueError("stepped schedule needs steps >= 1")
        return np.arange(n) % steps * (np.pi / steps)
    raise ValueError(f"unknown phase schedule {kind!r}")


class CdfTable:
    """Cumulative quadrature distributions of one state on a fixed x grid."""

    def __init__(self, rho: StateLike, x_limit: float = X_LIMIT, points: int = TABLE_POINTS):
        mat = as_matrix(rho)
        dim = mat.shape[0]
        self.grid = np.linspace(-x_limit, x_limit, points)
        psi = fock_wavefunctions(dim - 1, self.grid)
        # harmonic d of p(x|theta) collects rho[m, m+d] psi_m psi_{m+d}
        harmonics = np.zeros((dim, points), dtype=np.complex128)
        for d in range(dim):
            m = np.arange(dim - d)
            harmonics[d] = np.einsum("m,mx->x", mat[m, m + d], psi[m] * psi[m + d])
        self.diagonal = bool(np.all(harmonics[1:] == 0))
        self._cum = cumulative_trapezoid(harmonics, self.grid, axis=1, initial=0)

    def tables(self, thetas) -> np.ndarray:
        """Normalized, nondecreasing CDF rows, one per phase."""
        thetas = np.atleast_1d(np.asarray(thetas, float))
        base = self._cum[0].real
        if self.diagonal or self._cum.shape[0] == 1:
            cdf = np.broadcast_to(base, (thetas.size, base.size)).copy()
        else:
            d = np.arange(1, self._cum.shape[0])
            phases = np.exp(1j * np.outer(thetas, d))
            cdf = base + 2 * (phases @ self._cum[1:]).real
        cdf = np.maximum.accumulate(np.maximum(cdf, 0.0), axis=1)
        return cdf / cdf[:, -1:]

    def invert(self, u: np.ndarray, thetas: np.ndarray) -> np.ndarray:
        """Map uniforms ``u`` to quadratures, one phase per draw."""
        u = np.asarray(u, float)
        thetas = np.asarray(thetas, float)
        out = np.empty_like(u)
        if self.diagonal:
            return self._invert_rows(self.tables([0.0]), u, np.zeros(u.size, dtype=int))
        uniq, inv = np.unique(thetas, return_inverse=True)
        for start in range(0, uniq.size, _BATCH):
            sel = (inv >= start) & (inv < start + _BATCH)
            if not np.any(sel):
                continue
            tab = self.tables(uniq[start:start + _BATCH])
            out[sel] = self._invert_rows(tab, u[sel], inv[sel] - start)
        return out

    def _invert_rows(self, tab: np.ndarray, u: np.ndarray, rows: np.ndarray) -> np.ndarray:
        npts = self.grid.size
        # offset each row by 2*row so one flat searchsorted serves every phase
        flat = (tab + 2.0 * np.arange(tab.shape[0])[:, None]).ravel()
        pos = np.searchsorted(flat, u + 2.0 * rows, side="right") - rows * npts - 1
        pos = np.clip(pos, 0, npts - 2)
        c0 = tab[rows, pos]
        c1 = tab[rows, pos + 1]
        width = c1 - c0
        frac = np.divide(u - c0, width, out=np.full_like(u, 0.5), where=width > 0)
        h = self.grid[1] - self.grid[0]
        return self.grid[pos] + np.clip(frac, 0.0, 1.0) * h


def sample(rho: StateLike, eta_d: float, phases, n: int | None = None, seed: int = 0,
           partitions: int = 1, workers: int = 1, description: str = "") -> QuadratureDataset:
    """Draw homodyne quadratures of ``rho`` seen through detection efficiency ``eta_d``.

    Parameters
    ----------
    phases:
        Array of phases, one per shot, or a scalar phase used for all ``n``.
    partitions:
        Number of index blocks. Block ``k`` draws from the stream spawned with
        key ``(k,)`` off ``seed``, which never coincides with the root stream
        ``phase_schedule`` uses for the same seed. The dataset depends on
        ``partitions`` but not on ``workers``.
    """
    if not 0 <= eta_d <= 1:
        raise DomainError(f"eta_d must lie in [0, 1], got {eta_d}")
    phases = np.asarray(phases, dtype=float)
    if phases.ndim == 0:
        if n is None:
            raise ValueError("n is required with a scalar phase")
        phases = np.full(n, float(phases))
    elif n is not None and n != phases.size:
        raise ValueError(f"n={n} does not match {phases.size} scheduled phases")
    n = phases.size
    if n <= 0:
        raise ValueError("n must be positive")

    table = CdfTable(apply_loss(rho, eta_d) if eta_d < 1 else as_matrix(rho))
    bounds = np.linspace(0, n, partitions + 1).astype(int)

    def run(k):
        lo, hi = bounds[k], bounds[k + 1]
        u = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(k,))).random(hi - lo)
        return table.invert(u, phases[lo:hi])

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(run, range(partitions)))
    else:
        parts = [run(k) for k in range(partitions)]

    meta = {"seed": int(seed), "n_samples": int(n), "eta_d": float(eta_d),
            "eta_d_applied": bool(eta_d < 1), "partitions": int(partitions),
            "source": description}
    return QuadratureDataset(phases, np.concatenate(parts), meta)
