import numpy as np
import pytest

from conftest import toy_derived
from twincav.dynamics import TrajectoryConfig, integrate
from twincav.model import MeanState, drift_matrix
from twincav.oracles import (
    lyapunov_solve_algebraic,
    poly_real_roots_scan,
    stochastic_covariance_estimate,
)

class TestPolyScan:
    def test_factored_quartic(self):
        coeffs = np.polynomial.polynomial.polyfromroots([-2.0, -1.0, 1.0, 2.0])
        roots = poly_real_roots_scan(coeffs, -10.0, 10.0, 2000)
        np.testing.assert_allclose(roots, [-2, -1, 1, 2], atol=1e-10)

    def test_no_real_roots_gives_empty(self):
        # q^4 + q^2 + 1 has a negative biquadratic discriminant
        assert poly_real_roots_scan([1.0, 0.0, 1.0, 0.0, 1.0], -10, 10, 2000) == []

    def test_construct_then_recover(self, rng):
        for _ in range(25):
            roots = np.sort(rng.uniform(-5, 5, size=4))
            if np.min(np.diff(roots)) < 1e-2:
                continue
            coeffs = np.polynomial.polynomial.polyfromroots(roots)
            found = poly_real_roots_scan(coeffs, -10.0, 10.0, 5000)
            assert len(found) == 4
            np.testing.assert_allclose(found, roots, atol=1e-10)

    def test_input_validation(self):
        with pytest.raises(ValueError, match="n >= 1000"):
            poly_real_roots_scan([1.0, 1.0], -1, 1, 10)
        with pytest.raises(ValueError, match="lo < hi"):
            poly_real_roots_scan([1.0, 1.0], 1, -1, 2000)


class TestLyapunovSolve:
    def test_isotropic_decay(self):
        kappa = 0.8
        v = lyapunov_solve_algebraic(-kappa * np.eye(6), kappa * np.eye(6))
        np.testing.assert_allclose(v, 0.5 * np.eye(6), atol=1e-13)

    def test_decoupled_modes(self):
        rates = np.array([1.0, 2.0, 3.0, 4.0, 5.0, 6.0])
        inject = np.array([0.5, 1.0, 0.0, 2.0, 3.0, 0.25])
        v = lyapunov_solve_algebraic(np.diag(-rates), np.diag(inject))
        np.testing.assert_allclose(v, np.diag(inject / (2 * rates)), atol=1e-13)

    def test_rejects_unstable(self):
        a = np.diag([-1.0, -1.0, -1.0, -1.0, -1.0, 0.5])
        with pytest.raises(ValueError, match="not strictly stable"):
            lyapunov_solve_algebraic(a, np.eye(6))

    def test_residual_of_solution(self, rng):
        for _ in range(10):
            q = rng.normal(size=(6, 6))
            a = -q @ q.T - np.eye(6)
            d = np.diag(rng.uniform(0.1, 2.0, size=6))
            v = lyapunov_solve_algebraic(a, d)
            res = a @ v + v @ a.T + d
            assert np.max(np.abs(res)) < 1e-10 * max(1.0, np.max(np.abs(v)))


class TestStochasticEstimate:
    def test_rejects_small_ensembles_and_coarse_steps(self):
        d = toy_derived()
        cfg = TrajectoryConfig(t_end=1.0, dt=1e-3)
        with pytest.raises(ValueError, match="n_traj"):
            stochastic_covariance_estimate(d, cfg, n_traj=10, seed=0)
        coarse = TrajectoryConfig(t_end=1.0, dt=0.5)
        with pytest.raises(ValueError, match="guard"):
            stochastic_covariance_estimate(d, coarse, n_traj=1000, seed=0)

    def test_noise_free_collapses_to_propagated_initial(self):
        # all damping/leakage zero: D = 0 and the flow is a pure rotation,
        # so the sample covariance is the deterministically propagated V(0)
        # up to ensemble sampling error
        d = toy_derived(
            omega_m=1.0, gamma_m=0.0, kappa=0.0, kappa_r=0.0, g0=0.0, g0_r=0.0,
            eps=0.0, eps_r=0.0, delta0=2.0, delta0_r=2.0,
        )
        v0 = np.diag([2.0, 0.5, 1.0, 1.0, 0.5, 0.5])
        cfg = TrajectoryConfig(t_end=2.0, dt=5e-3, initial_cov=v0)
        est = stochastic_covariance_estimate(d, cfg, n_traj=4000, seed=3)
        a = drift_matrix(d, MeanState.zero())
        from scipy.linalg import expm

        prop = expm(a * 2.0)
        expected = prop @ v0 @ prop.T
        dev = np.abs(est.cov - expected) / np.maximum(est.stderr, 1e-12)
        assert np.max(dev) < 5.0

    def test_undriven_cavity_reaches_vacuum(self):
        d = toy_derived(eps=0.0, eps_r=0.0, kappa=1.0, kappa_r=1.0, nbar=0.0)
        v0 = np.diag([0.5, 0.5, 2.0, 2.0, 2.0, 2.0])
        cfg = TrajectoryConfig(t_end=8.0, dt=5e-3, initial_cov=v0)
        est = stochastic_covariance_estimate(d, cfg, n_traj=3000, seed=11)
        for i in (2, 3, 4, 5):
            assert abs(est.cov[i, i] - 0.5) < 3 * est.stderr[i, i]

    def test_matches_lyapunov_integration(self):
        # short-horizon cross-check between the two covariance routes
        d = toy_derived(eps=1.4, eps_r=1.4, nbar=0.3)
        t_end = 6.0
        cfg = TrajectoryConfig(t_end=t_end, dt=4e-3)
        samples = integrate(d, cfg)
        v_ode = samples[-1].cov
        est = stochastic_covariance_estimate(d, cfg, n_traj=4000, seed=21)
        dev = np.abs(est.cov - v_ode) / np.maximum(est.stderr, 1e-12)
        assert np.max(dev) < 5.0

    def test_deterministic_given_seed(self):
        d = toy_derived(eps=1.0, eps_r=1.0)
        cfg = TrajectoryConfig(t_end=0.5, dt=2e-3)
        a = stochastic_covariance_estimate(d, cfg, n_traj=1000, seed=5)
        b = stochastic_covariance_estimate(d, cfg, n_traj=1000, seed=5)
        np.testing.assert_array_equal(a.cov, b.cov)
        c = stochastic_covariance_estimate(d, cfg, n_traj=1000, seed=6)
        assert np.any(c.cov != a.cov)

    def test_standard_errors_scale_with_ensemble(self):
        d = toy_derived(eps=1.0, eps_r=1.0)
        cfg = TrajectoryConfig(t_end=0.5, dt=2e-3)
        small = stochastic_covariance_estimate(d, cfg, n_traj=1000, seed=5)
        large = stochastic_covariance_estimate(d, cfg, n_traj=4000, seed=5)
        ratio = np.median(small.stderr / large.stderr)
        assert ratio == pytest.approx(2.0, rel=0.2)
