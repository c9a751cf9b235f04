import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import dblquad, quad
from scipy.special import comb, eval_hermite, factorial

from cavityfock.exceptions import CutoffError, DomainError, NonPhysicalGainError, TruncationError, UnsupportedStateError
from cavityfock.fock import (
    DensityMatrix,
    PhotonDistribution,
    apply_loss,
    apply_loss_adjoint,
    fock_state,
    fock_wavefunction,
    fock_wavefunctions,
    phase_average,
    quadrature_pdf,
    squeezed_marginal,
    wigner,
    wigner_at,
    wigner_min,
)

from .helpers import random_density, random_diagonal

# closed-form radial Wigner of diag(p0, p1, p2) with L2(y) = 1 - 2y + y^2/2, dense scan on [0, 6]
RING_081 = (-0.06108746209406325, 0.79269)
RING_0543 = (-0.0019896052422989315, 0.38883)


def test_fock_state():
    np.testing.assert_array_equal(fock_state(0, 5).elements, np.diag([1, 0, 0, 0, 0]))
    np.testing.assert_array_equal(fock_state(2, 5).elements, np.diag([0, 0, 1, 0, 0]))
    with pytest.raises(CutoffError):
        fock_state(5, 5)


def test_density_matrix_is_immutable():
    rho = fock_state(1, 3)
    with pytest.raises(ValueError):
        rho.elements[0, 0] = 1


def test_density_json_round_trip():
    rho = DensityMatrix(random_density(4, np.random.default_rng(3)))
    back = DensityMatrix.from_json(rho.to_json())
    np.testing.assert_array_equal(back.elements, rho.elements)
    assert set(rho.to_dict()) == {"dim", "re", "im"}


def test_check_rejects_invalid():
    with pytest.raises(DomainError):
        DensityMatrix(np.diag([0.5, 0.6])).check()
    with pytest.raises(DomainError):
        DensityMatrix(np.array([[0.5, 0.7], [0.7, 0.5]])).check()
    DensityMatrix(random_density(5, np.random.default_rng(0))).check()


class TestSqueezedMarginal:
    def test_zero_gain_is_vacuum(self):
        np.testing.assert_array_equal(squeezed_marginal(0, 5).probs, [1, 0, 0, 0, 0])

    def test_ratio(self):
        p = squeezed_marginal(0.1, 5).probs
        assert p[1] / p[0] == pytest.approx(0.01, rel=1e-12)

    def test_closed_form_large_cutoff(self):
        p = squeezed_marginal(0.5, 80).probs
        n = np.arange(10)
        np.testing.assert_allclose(p[:10], 0.75 * 0.25**n, rtol=1e-12)

    def test_monotone(self):
        assert np.all(np.diff(squeezed_marginal(0.7, 30).probs) < 0)

    def test_nonphysical(self):
        with pytest.raises(NonPhysicalGainError):
            squeezed_marginal(1.0, 5)

    def test_leakage_warning(self):
        with pytest.warns(RuntimeWarning):
            squeezed_marginal(0.5, 5)
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            squeezed_marginal(0.1, 5)


def _loss_oracle(rho, eta):
    """Direct double sum over the generalized binomial loss formula."""
    d = rho.shape[0]
    out = np.zeros_like(rho, dtype=complex)
    for m in range(d):
        for n in range(d):
            for k in range(d - max(m, n)):
                c = math.sqrt(comb(m + k, k, exact=True) * comb(n + k, k, exact=True))
                out[m, n] += c * eta ** ((m + n) / 2) * (1 - eta) ** k * rho[m + k, n + k]
    return out


class TestLoss:
    def test_single_photon(self):
        for eta in (0.0, 0.3, 0.81, 1.0):
            np.testing.assert_allclose(apply_loss(fock_state(1, 2), eta).diag(), [1 - eta, eta], atol=1e-15)

    def test_two_photon_after_prep_loss(self):
        np.testing.assert_allclose(apply_loss(fock_state(2, 3), 0.81).diag(), [0.0361, 0.3078, 0.6561], atol=1e-12)

    def test_identity(self):
        rho = random_density(5, np.random.default_rng(1))
        np.testing.assert_allclose(apply_loss(rho, 1.0).elements, rho, atol=1e-15)

    def test_domain(self):
        with pytest.raises(DomainError):
            apply_loss(fock_state(1, 3), 1.2)
        with pytest.raises(DomainError):
            apply_loss(fock_state(1, 3), -0.1)

    @pytest.mark.parametrize("seed", range(5))
    def test_matches_explicit_sum(self, seed):
        rng = np.random.default_rng(seed)
        rho = random_density(6, rng)
        eta = rng.uniform()
        np.testing.assert_allclose(apply_loss(rho, eta).elements, _loss_oracle(rho, eta), atol=1e-13)

    def test_diagonal_reduces_to_binomial(self):
        rng = np.random.default_rng(7)
        p = random_diagonal(6, rng)
        eta = 0.37
        expect = [sum(comb(j, m) * eta**m * (1 - eta) ** (j - m) * p[j] for j in range(m, 6)) for m in range(6)]
        np.testing.assert_allclose(apply_loss(p, eta).diag(), expect, atol=1e-14)

    @settings(max_examples=50, deadline=None)
    @given(st.integers(2, 10), st.floats(0, 1), st.floats(0, 1), st.integers(0, 2**32 - 1))
    def test_composition(self, dim, e1, e2, seed):
        rho = np.diag(random_diagonal(dim, np.random.default_rng(seed)))
        twice = apply_loss(apply_loss(rho, e1), e2).elements
        once = apply_loss(rho, e1 * e2).elements
        np.testing.assert_allclose(twice, once, atol=1e-10, rtol=0)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(1, 8), st.floats(0, 1), st.integers(0, 2**32 - 1))
    def test_preserves_state_properties(self, dim, eta, seed):
        out = apply_loss(random_density(dim, np.random.default_rng(seed)), eta)
        out.check(herm_tol=1e-12, trace_tol=1e-10, psd_tol=1e-10)

    def test_adjoint_duality(self):
        rng = np.random.default_rng(11)
        rho = random_density(5, rng)
        op = random_density(5, rng) * 3 - np.eye(5)
        for eta in (0.2, 0.67):
            lhs = np.trace(rho @ apply_loss_adjoint(op, eta))
            rhs = np.trace(apply_loss(rho, eta).elements @ op)
            assert lhs == pytest.approx(rhs, abs=1e-13)

    def test_trace_deficit_rules(self):
        slightly_off = np.diag([0.5, 0.5 + 5e-7])
        assert apply_loss(slightly_off, 0.5).trace() == pytest.approx(1, abs=1e-15)
        with pytest.raises(TruncationError):
            apply_loss(np.diag([0.5, 0.4]), 0.5)


class TestWavefunction:
    def test_ground_state(self):
        assert fock_wavefunction(0, 0.0) == pytest.approx(np.pi**-0.25, abs=1e-15)
        assert fock_wavefunction(0, 0.0) == pytest.approx(0.7511, abs=1e-4)

    def test_odd_parity_zero(self):
        assert fock_wavefunction(1, 0.0) == 0.0

    def test_orthogonality_quadrature(self):
        val, _ = quad(lambda x: fock_wavefunction(2, x) * fock_wavefunction(0, x), -np.inf, np.inf)
        assert abs(val) < 1e-12

    @pytest.mark.parametrize("n", [0, 1, 5, 20])
    def test_normalized(self, n):
        val, _ = quad(lambda x: fock_wavefunction(n, x) ** 2, -np.inf, np.inf, limit=200)
        assert val == pytest.approx(1, abs=1e-10)

    def test_matches_hermite_formula(self):
        x = np.linspace(-6, 6, 101)
        psi = fock_wavefunctions(30, x)
        for n in range(31):
            ref = eval_hermite(n, x) * np.exp(-x * x / 2) / (np.pi**0.25 * np.sqrt(2.0**n * factorial(n)))
            np.testing.assert_allclose(psi[n], ref, rtol=1e-9, atol=1e-14)

    def test_recurrence_identity(self):
        x = np.linspace(-8, 8, 77)
        psi = fock_wavefunctions(40, x)
        for n in range(1, 40):
            rhs = x * np.sqrt(2 / (n + 1)) * psi[n] - np.sqrt(n / (n + 1)) * psi[n - 1]
            np.testing.assert_allclose(psi[n + 1], rhs, rtol=0, atol=1e-15)

    def test_high_order_finite(self):
        psi = fock_wavefunction(170, np.linspace(-20, 20, 11))
        assert np.all(np.isfinite(psi))
        with pytest.raises(CutoffError):
            fock_wavefunction(171, 0.0)


class TestQuadraturePdf:
    def test_vacuum_gaussian(self):
        x = np.linspace(-4, 4, 41)
        for theta in (0.0, 1.1, 2.9):
            np.testing.assert_allclose(quadrature_pdf(fock_state(0, 3), theta, x), np.exp(-x * x) / np.sqrt(np.pi), atol=1e-15)

    def test_single_photon_node(self):
        assert abs(quadrature_pdf(fock_state(1, 3), 0.4, 0.0)) < 1e-15

    @pytest.mark.parametrize("seed", range(5))
    def test_phase_invariance_diagonal(self, seed):
        rng = np.random.default_rng(seed)
        rho = random_diagonal(6, rng)
        x = np.linspace(-5, 5, 51)
        t1, t2 = rng.uniform(0, 2 * np.pi, 2)
        np.testing.assert_allclose(quadrature_pdf(rho, t1, x), quadrature_pdf(rho, t2, x), atol=1e-14)

    @settings(max_examples=25, deadline=None)
    @given(st.integers(1, 8), st.floats(0, 2 * np.pi), st.integers(0, 2**32 - 1))
    def test_nonnegative_and_normalized(self, dim, theta, seed):
        rho = random_density(dim, np.random.default_rng(seed))
        x = np.linspace(-6, 6, 241)
        assert quadrature_pdf(rho, theta, x).min() >= -1e-12
        total, _ = quad(lambda v: quadrature_pdf(rho, theta, v), -6, 6, limit=200, epsabs=1e-12)
        assert total == pytest.approx(1, abs=1e-6)

    def test_mean_of_coherent_superposition(self):
        # (|0> + |1>)/sqrt(2): <x_theta> = cos(theta)/sqrt(2)
        rho = np.full((2, 2), 0.5)
        for theta in (0.0, 0.7, np.pi / 2):
            mean, _ = quad(lambda v: v * quadrature_pdf(rho, theta, v), -np.inf, np.inf)
            assert mean == pytest.approx(np.cos(theta) / np.sqrt(2), abs=1e-10)


class TestWigner:
    def test_anchors(self):
        assert wigner_at(fock_state(0, 3), 0, 0) == pytest.approx(1 / np.pi, abs=1e-15)
        assert wigner_at(fock_state(1, 3), 0, 0) == pytest.approx(-1 / np.pi, abs=1e-15)
        assert wigner_at(fock_state(2, 3), 0, 0) == pytest.approx(1 / np.pi, abs=1e-15)

    def test_two_photon_first_zero(self):
        r = np.sqrt((2 - np.sqrt(2)) / 2)
        assert abs(wigner_at(fock_state(2, 3), r, 0)) < 1e-15
        assert wigner_at(fock_state(2, 3), 0.9 * r, 0) > 0
        assert wigner_at(fock_state(2, 3), 1.1 * r, 0) < 0

    def test_default_grid(self):
        W = wigner(fock_state(0, 2))
        assert W.shape == (121, 121)
        assert W[60, 60] == pytest.approx(1 / np.pi)

    @pytest.mark.parametrize("seed", range(3))
    def test_normalization(self, seed):
        rho = random_density(5, np.random.default_rng(seed))
        xs = np.linspace(-7, 7, 281)
        W = wigner(rho, xs, xs)
        h = xs[1] - xs[0]
        assert W.sum() * h * h == pytest.approx(1, abs=1e-4)

    @pytest.mark.parametrize("seed", range(4))
    def test_x_marginal_diagonal(self, seed):
        rho = random_diagonal(6, np.random.default_rng(seed))
        for x in np.linspace(-4, 4, 9):
            marg, _ = quad(lambda p: wigner_at(rho, x, p), -np.inf, np.inf)
            assert marg == pytest.approx(quadrature_pdf(rho, 0, x), abs=1e-4)

    @pytest.mark.parametrize("seed", range(3))
    def test_marginals_full_state(self, seed):
        rho = random_density(5, np.random.default_rng(100 + seed))
        for v in (-1.3, 0.0, 0.6, 2.1):
            mx, _ = quad(lambda p: wigner_at(rho, v, p), -np.inf, np.inf)
            mp, _ = quad(lambda x: wigner_at(rho, x, v), -np.inf, np.inf)
            assert mx == pytest.approx(quadrature_pdf(rho, 0, v), abs=1e-8)
            assert mp == pytest.approx(quadrature_pdf(rho, np.pi / 2, v), abs=1e-8)

    def test_full_state_normalization_quad(self):
        rho = random_density(3, np.random.default_rng(9))
        val, _ = dblquad(lambda p, x: wigner_at(rho, x, p), -8, 8, -8, 8, epsabs=1e-9)
        assert val == pytest.approx(1, abs=1e-6)

    @pytest.mark.parametrize("seed", range(4))
    def test_origin_parity(self, seed):
        rho = random_density(6, np.random.default_rng(seed))
        expect = np.sum((-1) ** np.arange(6) * rho.diagonal().real) / np.pi
        assert wigner_at(rho, 0, 0) == pytest.approx(expect, abs=1e-14)

    @pytest.mark.parametrize("eta", [0.3, 0.5, 0.5427, 0.67, 0.81, 1.0])
    def test_lossy_two_photon_origin_and_ring(self, eta):
        rho = apply_loss(fock_state(2, 3), eta)
        origin = wigner_at(rho, 0, 0)
        assert origin == pytest.approx((1 - 2 * eta) ** 2 / np.pi, abs=1e-14)
        assert origin >= -1e-15
        if eta > 0.5:
            assert wigner_min(rho)[0] < 0


class TestWignerMin:
    def test_vacuum_positive(self):
        assert wigner_min(fock_state(0, 3))[0] >= 0

    def test_single_photon(self):
        val, r = wigner_min(fock_state(1, 3))
        assert val == pytest.approx(-1 / np.pi, abs=1e-12)
        assert r == pytest.approx(0, abs=1e-6)

    @pytest.mark.parametrize("eta, ring", [(0.81, RING_081), (0.81 * 0.67, RING_0543)])
    def test_lossy_two_photon_against_scan(self, eta, ring):
        val, r = wigner_min(apply_loss(fock_state(2, 3), eta))
        assert val == pytest.approx(ring[0], abs=1e-10)
        assert r == pytest.approx(ring[1], abs=1e-4)

    def test_rejects_coherences(self):
        with pytest.raises(UnsupportedStateError):
            wigner_min(np.full((2, 2), 0.5))
        val, r = wigner_min(phase_average(np.full((2, 2), 0.5)))
        assert val == pytest.approx(0, abs=1e-15) and r == pytest.approx(0, abs=1e-6)


def test_photon_distribution_validation():
    with pytest.raises(DomainError):
        PhotonDistribution([0.5, 0.6])
    assert PhotonDistribution([0.25, 0.75]).to_density().dim == 2
