"""
Maximum-likelihood reconstruction from homodyne data.

Detection inefficiency is handled on the measurement side: every projector
|x_theta><x_theta| is replaced by its image under the adjoint loss channel,
so the estimate is the state *before* detection losses.

Two estimators share one convergence contract:

* ``maxlik``: the iterative R rho R update over full density matrices,
  with a diluted step whenever the plain step would lose likelihood;
* ``diagonal_maxlik``: expectation maximization over photon-number
  populations, enough for phase-randomized data.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .exceptions import DomainError, NumericalSupportError
from .fock import DensityMatrix, PhotonDistribution, fock_wavefunctions, loss_kraus
from .homodyne import QuadratureDataset

SUPPORT_FLOOR = 1e-300
LOGLIK_SLACK = 1e-12


@dataclass(frozen=True)
class TomoConfig:
    dim: int = 5
    eta_d: float = 1.0
    tol: float = 1e-9
    max_iter: int = 5000
    mode: str = "full"
    #: histogram bins along x; ``None`` keeps one POVM element per sample
    bins: Optional[int] = None
    phase_bins: int = 32

    def __post_init__(self):
        if self.dim < 2:
            raise DomainError("dim must be at least 2")
        if not 0 < self.eta_d <= 1:
            raise DomainError(f"eta_d must lie in (0, 1], got {self.eta_d}")
        if self.mode not in ("full", "diagonal"):
            raise DomainError(f"mode must be 'full' or 'diagonal', got {self.mode!r}")
        if self.bins is not None and self.bins < 1:
            raise DomainError("bins must be positive")


@dataclass
class Diagnostics:
    iterations: int
    loglik: float
    converged: bool
    loglik_trace: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"iterations": self.iterations, "loglik": self.loglik, "converged": self.converged}


def _povm_vectors(x, theta, dim, eta):
    """Vectors u_jk with Pi_j = sum_k |u_jk><u_jk|, shape (N, K, dim)."""
    x = np.atleast_1d(np.asarray(x, float))
    theta = np.atleast_1d(np.asarray(theta, float))
    psi = fock_wavefunctions(dim - 1, x).T
    v = psi * np.exp(1j * np.outer(theta, np.arange(dim)))
    if eta == 1:
        return v[:, None, :]
    ks = loss_kraus(eta, dim)
    # u_k = E_k^dag v
    return np.einsum("kab,ja->jkb", ks, v)


def povm_element(x: float, theta: float, cfg: TomoConfig) -> np.ndarray:
    """Efficiency-corrected homodyne effect for outcome ``x`` at phase ``theta``.

    Tr(rho Pi) equals the quadrature density of rho after loss ``cfg.eta_d``.
    """
    u = _povm_vectors(x, theta, cfg.dim, cfg.eta_d)[0]
    return np.einsum("ka,kb->ab", u, u.conj())


def _measurement(data: QuadratureDataset, cfg: TomoConfig):
    if len(data) == 0:
        raise ValueError("dataset is empty")
    theta, x = data.theta, data.x
    if cfg.bins is None:
        weights = np.ones(x.size)
    else:
        theta, x, weights = _histogram(theta, x, cfg.bins, cfg.phase_bins)
    return _povm_vectors(x, theta, cfg.dim, cfg.eta_d), weights


def _histogram(theta, x, bins, phase_bins):
    x_edges = np.linspace(x.min(), x.max() + 1e-12, bins + 1)
    uniq = np.unique(theta)
    if uniq.size <= phase_bins:
        t_centers, t_idx = uniq, np.searchsorted(uniq, theta)
    else:
        t_edges = np.linspace(0.0, np.pi, phase_bins + 1)
        t_idx = np.clip(np.digitize(np.mod(theta, np.pi), t_edges) - 1, 0, phase_bins - 1)
        t_centers = 0.5 * (t_edges[1:] + t_edges[:-1])
    x_idx = np.clip(np.digitize(x, x_edges) - 1, 0, bins - 1)
    counts = np.zeros((t_centers.size, bins))
    np.add.at(counts, (t_idx, x_idx), 1.0)
    ti, xi = np.nonzero(counts)
    x_centers = 0.5 * (x_edges[1:] + x_edges[:-1])
    return t_centers[ti], x_centers[xi], counts[ti, xi]


def _effects(u):
    return np.einsum("jka,jkb->jab", u, u.conj())


def _probs(effects, rho):
    return np.einsum("jab,ba->j", effects, rho).real


def _loglik(p, w):
    bad = np.flatnonzero(p < SUPPORT_FLOOR)
    if bad.size:
        raise NumericalSupportError(int(bad[0]), float(p[bad[0]]))
    return float(np.dot(w, np.log(p)))


def _converged(new, old, tol):
    return (new - old) <= tol * max(abs(old), 1e-300)


def rrho(effects: np.ndarray, weights=None, tol: float = 1e-9, max_iter: int = 5000,
         callback: Optional[Callable] = None) -> tuple[DensityMatrix, Diagnostics]:
    """R rho R iteration over an explicit stack of POVM effects ``(N, dim, dim)``.

    Starts from the maximally mixed state. When the plain update would lower
    the log-likelihood, the diluted update (1 + e R) rho (1 + e R) is used
    with ``e`` halved until the likelihood increases; if no step size helps
    the iterate is a fixed point and the loop stops.
    """
    effects = np.asarray(effects, dtype=np.complex128)
    n, dim, _ = effects.shape
    w = np.ones(n) if weights is None else np.asarray(weights, float)
    wn = w / w.sum()
    rho = np.eye(dim, dtype=np.complex128) / dim
    ll = _loglik(_probs(effects, rho), w)
    trace = [ll]
    if callback is not None:
        callback(0, rho, ll)
    eye = np.eye(dim)
    converged = False
    it = 0
    while it < max_iter:
        p = _probs(effects, rho)
        R = np.einsum("j,jab->ab", wn / p, effects)
        step = None
        for eps in [None] + [2.0**-k for k in range(0, 40)]:
            G = R if eps is None else eye + eps * R
            cand = G @ rho @ G.conj().T
            cand = 0.5 * (cand + cand.conj().T)
            cand /= np.trace(cand).real
            try:
                ll_new = _loglik(_probs(effects, cand), w)
            except NumericalSupportError:
                continue
            if ll_new >= ll - LOGLIK_SLACK:
                step = cand
                break
        if step is None:
            converged = True
            break
        it += 1
        rho, ll_old, ll = step, ll, ll_new
        trace.append(ll)
        if callback is not None:
            callback(it, rho, ll)
        if _converged(ll, ll_old, tol):
            converged = True
            break
    return DensityMatrix(rho), Diagnostics(it, ll, converged, trace)


def maxlik(data: QuadratureDataset, cfg: TomoConfig = TomoConfig(),
           callback: Optional[Callable] = None) -> tuple[DensityMatrix, Diagnostics]:
    """Full density-matrix estimate in ``cfg.dim`` dimensions."""
    u, w = _measurement(data, cfg)
    return rrho(_effects(u), w, cfg.tol, cfg.max_iter, callback)


def em_diagonal(likelihoods: np.ndarray, weights=None, tol: float = 1e-9, max_iter: int = 5000,
                callback: Optional[Callable] = None) -> tuple[np.ndarray, Diagnostics]:
    """EM over mixture weights; ``likelihoods[j, n]`` is record j's density under |n>."""
    h = np.asarray(likelihoods, float)
    n, dim = h.shape
    w = np.ones(n) if weights is None else np.asarray(weights, float)
    wn = w / w.sum()
    pop = np.full(dim, 1.0 / dim)
    ll = _loglik(h @ pop, w)
    trace = [ll]
    if callback is not None:
        callback(0, pop, ll)
    converged = False
    it = 0
    while it < max_iter:
        mix = h @ pop
        pop = pop * ((wn / mix) @ h)
        pop /= pop.sum()
        it += 1
        ll_old, ll = ll, _loglik(h @ pop, w)
        trace.append(ll)
        if callback is not None:
            callback(it, pop, ll)
        if _converged(ll, ll_old, tol):
            converged = True
            break
    return pop, Diagnostics(it, ll, converged, trace)


def diagonal_maxlik(data: QuadratureDataset, cfg: TomoConfig = TomoConfig(),
                    callback: Optional[Callable] = None) -> tuple[PhotonDistribution, Diagnostics]:
    """Photon-number populations only; phases are ignored."""
    u, w = _measurement(data, cfg)
    h = np.einsum("jka->ja", np.abs(u) ** 2)
    pop, diag = em_diagonal(h, w, cfg.tol, cfg.max_iter, callback)
    return PhotonDistribution(np.clip(pop, 0.0, None) / np.clip(pop, 0.0, None).sum()), diag


def reconstruct(data: QuadratureDataset, cfg: TomoConfig = TomoConfig()) -> tuple[DensityMatrix, Diagnostics]:
    """Dispatch on ``cfg.mode``; always returns a density matrix."""
    if cfg.mode == "diagonal":
        dist, diag = diagonal_maxlik(data, cfg)
        return dist.to_density(), diag
    return maxlik(data, cfg)
