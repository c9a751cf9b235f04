"""
Single-mode Fock-space numerics.

States live in a truncated basis |0>, ..., |dim-1>. Quadratures follow one
fixed convention everywhere in the package::

    x_theta = (a exp(-i theta) + a^dag exp(i theta)) / sqrt(2)

so the vacuum has quadrature variance 1/2, the ground-state wavefunction is
pi^(-1/4) exp(-x^2/2) and the vacuum Wigner function peaks at 1/pi.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.special import comb, eval_genlaguerre, gammaln

from .exceptions import CutoffError, DomainError, NonPhysicalGainError, TruncationError, UnsupportedStateError

#: Largest photon number the wavefunction recurrence accepts.
MAX_WAVEFUNCTION_N = 170

VACUUM_VARIANCE = 0.5

_LEAKAGE_WARN = 1e-4
_RENORM_LIMIT = 1e-6


@dataclass(frozen=True)
class DensityMatrix:
    """Immutable density operator in a truncated Fock basis."""

    elements: np.ndarray

    def __post_init__(self):
        arr = np.array(self.elements, dtype=np.complex128)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] < 1:
            raise ValueError(f"density matrix must be square, got shape {arr.shape}")
        arr.setflags(write=False)
        object.__setattr__(self, "elements", arr)

    @property
    def dim(self) -> int:
        return self.elements.shape[0]

    def diag(self) -> np.ndarray:
        return self.elements.diagonal().real.copy()

    def trace(self) -> float:
        return float(np.trace(self.elements).real)

    def is_diagonal(self, atol: float = 1e-12) -> bool:
        off = self.elements - np.diag(self.elements.diagonal())
        return bool(np.all(np.abs(off) <= atol))

    def check(self, herm_tol=1e-12, trace_tol=1e-10, psd_tol=1e-10) -> None:
        """Raise ``DomainError`` if the matrix is not a valid state."""
        rho = self.elements
        if not np.allclose(rho, rho.conj().T, atol=herm_tol, rtol=0):
            raise DomainError("density matrix is not Hermitian")
        if abs(np.trace(rho) - 1) > trace_tol:
            raise DomainError(f"density matrix trace is {np.trace(rho).real:.12g}, expected 1")
        lo = np.linalg.eigvalsh(rho).min()
        if lo < -psd_tol:
            raise DomainError(f"density matrix has negative eigenvalue {lo:.3g}")

    def to_dict(self) -> dict:
        return {"dim": self.dim, "re": self.elements.real.tolist(), "im": self.elements.imag.tolist()}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, obj: dict) -> "DensityMatrix":
        re = np.asarray(obj["re"], dtype=float)
        im = np.asarray(obj["im"], dtype=float)
        dm = cls(re + 1j * im)
        if dm.dim != int(obj["dim"]):
            raise ValueError(f"dim field {obj['dim']} does not match matrix size {dm.dim}")
        return dm

    @classmethod
    def from_json(cls, text: str) -> "DensityMatrix":
        return cls.from_dict(json.loads(text))

    @classmethod
    def from_diagonal(cls, probs) -> "DensityMatrix":
        return cls(np.diag(np.asarray(probs, dtype=float)))


@dataclass(frozen=True)
class PhotonDistribution:
    """Photon-number probabilities p(0), ..., p(dim-1)."""

    probs: np.ndarray

    def __post_init__(self):
        p = np.array(self.probs, dtype=float)
        if p.ndim != 1 or p.size < 1:
            raise ValueError("photon distribution must be a non-empty vector")
        if np.any(p < 0) or abs(p.sum() - 1) > 1e-10:
            raise DomainError("photon distribution must be nonnegative and sum to 1")
        p.setflags(write=False)
        object.__setattr__(self, "probs", p)

    @property
    def dim(self) -> int:
        return self.probs.size

    def to_density(self) -> DensityMatrix:
        return DensityMatrix.from_diagonal(self.probs)


StateLike = Union[DensityMatrix, PhotonDistribution, np.ndarray]


def as_matrix(rho: StateLike) -> np.ndarray:
    """Complex ndarray view of a state given as any of the accepted forms."""
    if isinstance(rho, DensityMatrix):
        return rho.elements
    if isinstance(rho, PhotonDistribution):
        return np.diag(rho.probs).astype(np.complex128)
    arr = np.asarray(rho)
    if arr.ndim == 1:
        return np.diag(arr).astype(np.complex128)
    return arr.astype(np.complex128)


def fock_state(n: int, dim: int) -> DensityMatrix:
    if not 0 <= n < dim:
        raise CutoffError(f"photon number {n} does not fit in cutoff dim={dim}")
    rho = np.zeros((dim, dim))
    rho[n, n] = 1.0
    return DensityMatrix(rho)


def squeezed_marginal(lam: float, dim: int = 5) -> PhotonDistribution:
    """Photon-number marginal of a two-mode squeezed vacuum with gain ``lam``.

    Each mode carries p(n) = (1 - lam^2) lam^(2n); the vector is renormalized
    over the cutoff and a warning is issued when the discarded tail exceeds 1e-4.
    """
    if lam < 0:
        raise DomainError(f"gain must be nonnegative, got {lam}")
    if lam >= 1:
        raise NonPhysicalGainError(f"gain {lam} >= 1 is not physical")
    w = source_weights(lam, dim)
    tail = lam ** (2 * dim)
    if tail > _LEAKAGE_WARN:
        warnings.warn(f"photon-number mass {tail:.3g} above cutoff dim={dim} is discarded", RuntimeWarning, stacklevel=2)
    return PhotonDistribution(w / w.sum())


def source_weights(lam: float, dim: int) -> np.ndarray:
    """Unnormalized per-pulse pair-number probabilities (1 - lam^2) lam^(2n), n < dim."""
    n = np.arange(dim)
    return (1 - lam**2) * float(lam) ** (2 * n)


def loss_kraus(eta: float, dim: int) -> np.ndarray:
    """Kraus operators of the pure-loss channel, stacked as ``(k, out, in)``.

    E_k |n> = sqrt(C(n, k) eta^(n-k) (1-eta)^k) |n-k>.
    """
    if not 0 <= eta <= 1:
        raise DomainError(f"transmission must lie in [0, 1], got {eta}")
    ops = np.zeros((dim, dim, dim))
    for k in range(dim):
        n = np.arange(k, dim)
        ops[k, n - k, n] = np.sqrt(comb(n, k) * eta ** (n - k) * (1 - eta) ** k)
    return ops


def apply_loss(rho: StateLike, eta: float) -> DensityMatrix:
    """Send ``rho`` through a beam splitter of transmission ``eta``.

    The channel keeps the cutoff, so the output trace matches the input
    trace; a deficit below 1e-6 is renormalized and a larger one raises.
    """
    mat = as_matrix(rho)
    ks = loss_kraus(eta, mat.shape[0])
    out = np.einsum("kab,bc,kdc->ad", ks, mat, ks)
    return DensityMatrix(_fix_trace(out))


def apply_loss_adjoint(op: np.ndarray, eta: float) -> np.ndarray:
    """Heisenberg-picture loss map, Tr(rho L*(op)) == Tr(L(rho) op)."""
    op = np.asarray(op, dtype=np.complex128)
    ks = loss_kraus(eta, op.shape[0])
    return np.einsum("kba,bc,kcd->ad", ks, op, ks)


def _fix_trace(mat: np.ndarray) -> np.ndarray:
    tr = np.trace(mat).real
    deficit = abs(1 - tr)
    if deficit <= 1e-12:
        return mat
    if deficit < _RENORM_LIMIT:
        return mat / tr
    raise TruncationError(f"trace deficit {deficit:.3g} after truncation; raise the cutoff")


def phase_average(rho: StateLike) -> DensityMatrix:
    """Dephased copy of ``rho`` (diagonal part only)."""
    return DensityMatrix(np.diag(as_matrix(rho).diagonal().real))


def fock_wavefunctions(nmax: int, x) -> np.ndarray:
    """psi_0(x), ..., psi_nmax(x) stacked along axis 0.

    Uses the normalized recurrence
    psi_{n+1} = sqrt(2/(n+1)) x psi_n - sqrt(n/(n+1)) psi_{n-1},
    which never forms H_n(x) or n! explicitly.
    """
    if nmax < 0:
        raise ValueError("nmax must be nonnegative")
    if nmax > MAX_WAVEFUNCTION_N:
        raise CutoffError(f"wavefunction order {nmax} exceeds {MAX_WAVEFUNCTION_N}")
    x = np.asarray(x, dtype=float)
    out = np.empty((nmax + 1,) + x.shape)
    out[0] = np.pi**-0.25 * np.exp(-0.5 * x * x)
    if nmax >= 1:
        out[1] = np.sqrt(2.0) * x * out[0]
    for n in range(1, nmax):
        out[n + 1] = np.sqrt(2.0 / (n + 1)) * x * out[n] - np.sqrt(n / (n + 1)) * out[n - 1]
    return out


def fock_wavefunction(n: int, x):
    if n < 0:
        raise ValueError("photon number must be nonnegative")
    return fock_wavefunctions(n, x)[n]


def quadrature_pdf(rho: StateLike, theta: float, x):
    """Homodyne density p(x | theta) = <x_theta| rho |x_theta>."""
    mat = as_matrix(rho)
    dim = mat.shape[0]
    x = np.asarray(x, dtype=float)
    psi = fock_wavefunctions(dim - 1, x)
    v = psi * np.exp(1j * theta * np.arange(dim)).reshape((dim,) + (1,) * x.ndim)
    val = np.einsum("m...,mn,n...->...", v.conj(), mat, v)
    return val.real


def wigner(rho: StateLike, xvec=None, pvec=None) -> np.ndarray:
    """Wigner function on the grid ``xvec`` x ``pvec`` (``ij`` indexing).

    Defaults to 121 x 121 points over [-4, 4]^2.
    """
    if xvec is None:
        xvec = np.linspace(-4, 4, 121)
    if pvec is None:
        pvec = xvec
    X, P = np.meshgrid(np.asarray(xvec, float), np.asarray(pvec, float), indexing="ij")
    return wigner_at(rho, X, P)


def wigner_at(rho: StateLike, x, p):
    """Pointwise Wigner function, broadcasting over ``x`` and ``p``."""
    mat = as_matrix(rho)
    dim = mat.shape[0]
    x, p = np.broadcast_arrays(np.asarray(x, float), np.asarray(p, float))
    r2 = x * x + p * p
    gauss = np.exp(-r2) / np.pi
    # |m><n| with m > n carries conj(alpha)^(m-n), alpha = (x + ip)/sqrt(2)
    alpha2 = np.sqrt(2.0) * (x - 1j * p)
    W = np.zeros(x.shape)
    for n in range(dim):
        for m in range(n, dim):
            c = mat[m, n]
            if c == 0:
                continue
            d = m - n
            scale = (-1) ** n * np.exp(0.5 * (gammaln(n + 1) - gammaln(m + 1)))
            kernel = scale * eval_genlaguerre(n, d, 2 * r2) * gauss
            if d == 0:
                W += c.real * kernel
            else:
                W += 2 * (c * alpha2**d * kernel).real
    return W


def wigner_radial(probs, r):
    """Radial Wigner profile of a diagonal state with photon probabilities ``probs``."""
    probs = np.asarray(probs, dtype=float)
    r2 = np.asarray(r, dtype=float) ** 2
    acc = np.zeros(r2.shape)
    for n, pn in enumerate(probs):
        if pn != 0:
            acc += pn * (-1) ** n * eval_genlaguerre(n, 0, 2 * r2)
    return acc * np.exp(-r2) / np.pi


def wigner_min(rho: StateLike, r_max: float = 6.0, n_scan: int = 6001) -> tuple[float, float]:
    """Minimum of the radial Wigner profile and the radius where it occurs.

    Only defined for diagonal states; for anything else evaluate ``wigner``
    on a grid or dephase first with ``phase_average``.
    """
    mat = as_matrix(rho)
    off = mat - np.diag(mat.diagonal())
    if np.any(np.abs(off) > 1e-12):
        raise UnsupportedStateError("wigner_min needs a diagonal state")
    probs = mat.diagonal().real
    rs = np.linspace(0.0, r_max, n_scan)
    prof = wigner_radial(probs, rs)
    i = int(np.argmin(prof))
    lo, hi = rs[max(i - 1, 0)], rs[min(i + 1, n_scan - 1)]
    if hi > lo:
        res = minimize_scalar(lambda r: float(wigner_radial(probs, r)), bounds=(lo, hi),
                              method="bounded", options={"xatol": 1e-10})
        if res.fun < prof[i]:
            return float(res.fun), float(res.x)
    return float(prof[i]), float(rs[i])
