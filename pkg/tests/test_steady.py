import math

import numpy as np
import pytest

from conftest import paper_params, toy_derived
from twincav.model import MeanState, derive_params, drift_matrix
from twincav.oracles import poly_real_roots_scan
from twincav.steady import (
    ThresholdRegime,
    characteristic_polynomial,
    fixed_points,
    stability,
    stability_report,
    symmetric_quartic_roots,
    threshold_report,
    _force_balance,
    _force_polynomial,
)


def symmetric_toy(s_drive, kappa=1.0, delta0=1.0, omega_m=1.0):
    """Nondimensional symmetric setup with sqrt(2) g0 eps = s_drive and
    g0 = 1/sqrt(2), so the detuning shift equals q itself."""
    g0 = 1.0 / math.sqrt(2.0)
    return toy_derived(
        omega_m=omega_m, kappa=kappa, delta0=delta0, g0=g0, eps=s_drive
    )


class TestFixedPoints:
    def test_undriven_system_rests_at_origin(self):
        d = toy_derived(eps=0.0, eps_r=0.0)
        states = fixed_points(d)
        assert len(states) == 1
        st = states[0]
        assert st.q == 0.0 and st.alpha_l == 0 and st.alpha_r == 0
        assert st.residual == 0.0 and st.stable

    def test_symmetric_inclusive_has_three_or_five_roots_with_trivial(self):
        # reduced inequality strictly satisfied
        d = symmetric_toy(s_drive=1.2)
        assert threshold_report(d).reduced_inequality
        states = fixed_points(d)
        assert len(states) in (3, 5)
        assert min(abs(s.q) for s in states) < 1e-12

    def test_symmetric_stringent_window_has_five_roots(self):
        # kappa < Delta0 with the drive inside the stringent window
        d = symmetric_toy(s_drive=math.sqrt(2.5), kappa=1.0, delta0=2.0)
        rep = threshold_report(d)
        assert rep.regime_label is ThresholdRegime.STRINGENT_WINDOW
        states = fixed_points(d)
        assert len(states) == 5
        qs = sorted(s.q for s in states)
        # the quartic factors as (u^2-1)(u^2-5) at these parameters
        np.testing.assert_allclose(
            qs, [-math.sqrt(5), -1.0, 0.0, 1.0, math.sqrt(5)], atol=1e-9
        )

    def test_single_sided_drive_matches_scan_oracle(self):
        d = toy_derived(eps=2.0, eps_r=0.0, kappa=0.6, delta0=1.5, g0=0.9)
        states = fixed_points(d)
        assert 1 <= len(states) <= 3
        assert all(s.residual < 1e-9 for s in states)
        coeffs = _force_polynomial(d)
        oracle = poly_real_roots_scan(coeffs, -50.0, 50.0, 20000)
        assert len(oracle) == len(states)
        np.testing.assert_allclose([s.q for s in states], oracle, atol=1e-6)

    def test_every_root_satisfies_force_balance(self):
        d = symmetric_toy(s_drive=1.5, kappa=0.7, delta0=1.3)
        for st in fixed_points(d):
            f, scale = _force_balance(d, st.q)
            assert abs(f) <= 1e-9 * max(scale, 1e-30)

    def test_roots_sorted_ascending(self):
        d = symmetric_toy(s_drive=1.5, kappa=0.7, delta0=1.3)
        qs = [s.q for s in fixed_points(d)]
        assert qs == sorted(qs)

    def test_paper_scale_symmetric_preset_is_multistable(self):
        # the experiment-scale symmetric configuration sits in the stringent
        # window: five steady states, with the trivial one stable
        d = derive_params(paper_params())
        rep = threshold_report(d)
        assert rep.regime_label is ThresholdRegime.STRINGENT_WINDOW
        states = fixed_points(d)
        assert len(states) == 5
        trivial = min(states, key=lambda s: abs(s.q))
        assert abs(trivial.q) < 1e-9
        assert trivial.stable


class TestSymmetricQuartic:
    def test_negative_discriminant_gives_empty(self):
        d = symmetric_toy(s_drive=0.1, kappa=1.0, delta0=1.0)
        assert symmetric_quartic_roots(d) == []

    def test_boundary_gives_repeated_pair(self):
        # discriminant exactly zero (condition-i boundary) with binary-exact
        # inputs: g0 = 1/2, eps = 1, kappa = 1/2, delta0 = 2 give
        # 8 g0^2 eps^2 delta0 = 4 kappa^2 delta0^2 = 4 without round-off;
        # the double root of q^2 collapses the two pairs onto one pair
        d = toy_derived(omega_m=1.0, kappa=0.5, delta0=2.0, g0=0.5, eps=1.0)
        roots = symmetric_quartic_roots(d)
        q = math.sqrt((2.0**2 - 0.5**2) / (2 * 0.5**2))
        np.testing.assert_allclose(roots, [-q, q], rtol=1e-12)

    def test_above_reduced_boundary_two_pairs_off_origin(self):
        kappa = delta0 = 1.0
        boundary = math.sqrt(delta0 / 4) * (kappa**2 + delta0**2) / math.sqrt(delta0)
        d = symmetric_toy(s_drive=1.1 * boundary, kappa=kappa, delta0=delta0)
        roots = symmetric_quartic_roots(d)
        assert len(roots) == 2  # only the + branch is non-negative here
        oracle = poly_real_roots_scan(_quartic_coeffs(d), -10.0, 10.0, 4000)
        np.testing.assert_allclose(roots, oracle, atol=1e-8)

    def test_stringent_window_four_roots_match_oracle(self):
        d = symmetric_toy(s_drive=math.sqrt(2.5), kappa=1.0, delta0=2.0)
        roots = symmetric_quartic_roots(d)
        assert len(roots) == 4
        oracle = poly_real_roots_scan(_quartic_coeffs(d), -10.0, 10.0, 4000)
        np.testing.assert_allclose(roots, oracle, atol=1e-8)

    def test_rejects_asymmetric_inputs(self):
        d = toy_derived(kappa=1.0, kappa_r=1.2)
        with pytest.raises(ValueError, match="not symmetric"):
            symmetric_quartic_roots(d)

    def test_union_with_trivial_equals_fixed_points(self):
        d = symmetric_toy(s_drive=math.sqrt(2.5), kappa=1.0, delta0=2.0)
        union = sorted(symmetric_quartic_roots(d) + [0.0])
        qs = [s.q for s in fixed_points(d)]
        np.testing.assert_allclose(qs, union, atol=1e-8)

    def test_pm_pair_symmetry(self):
        d = symmetric_toy(s_drive=1.4, kappa=0.9, delta0=1.7)
        roots = symmetric_quartic_roots(d)
        np.testing.assert_allclose(roots, sorted(-r for r in roots), rtol=1e-12)


def _quartic_coeffs(d):
    """Ascending coefficients of the symmetric biquadratic in q (for g0 =
    1/sqrt(2) the detuning shift u equals q)."""
    kappa, delta0 = d.kappa_l, d.delta0_l
    g = math.sqrt(2.0) * d.g0_l
    c0 = (kappa**2 + delta0**2) ** 2 - 8 * d.g0_l**2 * d.eps_l**2 * delta0 / d.omega_m
    return [c0, 0.0, 2 * (kappa**2 - delta0**2) * g**2, 0.0, g**4]


class TestThresholdReport:
    def test_zero_drive(self):
        d = symmetric_toy(s_drive=0.0)
        rep = threshold_report(d)
        assert not rep.condition_i and not rep.reduced_inequality
        assert rep.regime_label is ThresholdRegime.NO_REAL_ROOTS

    def test_reduced_implies_condition_i(self, rng):
        for _ in range(500):
            d = symmetric_toy(
                s_drive=rng.uniform(0, 5),
                kappa=rng.uniform(0.05, 3),
                delta0=rng.uniform(0.05, 3),
            )
            rep = threshold_report(d)
            if rep.reduced_inequality:
                assert rep.condition_i

    def test_rejects_nonpositive_detuning(self):
        d = toy_derived(delta0=-1.0, delta0_r=-1.0)
        with pytest.raises(ValueError, match="Delta_0 > 0"):
            threshold_report(d)

    def test_regime_matches_root_count(self, rng):
        for _ in range(300):
            d = symmetric_toy(
                s_drive=rng.uniform(0.1, 4),
                kappa=rng.uniform(0.1, 2.5),
                delta0=rng.uniform(0.1, 2.5),
            )
            rep = threshold_report(d)
            n = len(symmetric_quartic_roots(d))
            if rep.regime_label is ThresholdRegime.NO_REAL_ROOTS:
                assert n == 0
            else:
                assert n > 0


class TestStability:
    def test_minus_identity_is_stable(self):
        assert stability(-np.eye(6))

    def test_zero_row_is_marginal_and_not_stable(self):
        a = -np.eye(6)
        a[3, :] = 0.0
        stable, marginal = stability_report(a)
        assert marginal and not stable
        assert not stability(a)

    def test_pure_rotation_is_marginal(self):
        a = np.zeros((6, 6))
        a[0, 1], a[1, 0] = 1.0, -1.0
        a[2:, 2:] = -np.eye(4)
        assert not stability(a)

    def test_characteristic_polynomial_against_numpy(self, rng):
        for _ in range(50):
            a = rng.normal(size=(6, 6))
            mine = characteristic_polynomial(a)
            ref = np.poly(a)
            np.testing.assert_allclose(mine, ref, rtol=1e-8, atol=1e-8)

    def test_random_matrices_agree_with_spectral_oracle(self, rng):
        n_checked = 0
        for _ in range(300):
            q = rng.normal(size=(6, 6))
            skew = rng.normal(size=(6, 6))
            skew = skew - skew.T
            # mixture of clearly stable and unstable constructions
            if rng.random() < 0.5:
                a = -q @ q.T - skew + 0.05 * rng.normal(size=(6, 6))
            else:
                a = rng.normal(size=(6, 6))
            max_re = np.max(np.linalg.eigvals(a).real)
            if abs(max_re) < 1e-6:
                continue  # too close to marginal for a sign test
            n_checked += 1
            assert stability(a) == (max_re < 0.0)
        assert n_checked > 200

    def test_dominant_growth_rate_oracle(self, rng):
        # repeated application of I + tau*A estimates the dominant real part
        a = rng.normal(size=(6, 6))
        a = -a @ a.T - 3.0 * np.eye(6)
        tau = 1e-3 / np.max(np.abs(a))
        m = np.eye(6) + tau * a
        v = rng.normal(size=6)
        for _ in range(5000):
            v = m @ v
            v /= np.linalg.norm(v)
        growth = math.log(np.linalg.norm(m @ v)) / tau
        assert stability(a)
        assert growth < 0
        assert growth == pytest.approx(np.max(np.linalg.eigvals(a).real), rel=0.05)

    def test_drift_matrix_of_damped_system_is_stable(self):
        d = toy_derived()
        s = MeanState(q=0.1, p=0.0, alpha_l=1 + 0.5j, alpha_r=0.8 - 0.2j)
        assert stability(drift_matrix(d, s)) == (
            np.max(np.linalg.eigvals(drift_matrix(d, s)).real) < 0
        )
