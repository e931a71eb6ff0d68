import math

import numpy as np
import pytest

from conftest import paper_params, toy_derived
from twincav.constants import C_LIGHT, HBAR
from twincav.dynamics import integrate, mean_field_rhs, TrajectoryConfig
from twincav.model import (
    CavityParams,
    MeanState,
    MechanicalParams,
    derive_params,
    diffusion_matrix,
    drift_matrix,
    thermal_occupation,
    to_angular,
)


class TestDeriveParams:
    def test_kappa_from_finesse_and_length(self):
        d = derive_params(paper_params())
        expected = math.pi * C_LIGHT / (2 * 2.6e5 * 22e-3)
        assert d.kappa_l == pytest.approx(expected, rel=1e-12)
        assert d.kappa_l == pytest.approx(8.24e4, rel=5e-3)

    def test_zero_temperature_occupation_is_exactly_zero(self):
        d = derive_params(paper_params(temperature=0.0))
        assert d.nbar == 0.0

    def test_single_photon_coupling_magnitude(self):
        # lambda = 1064 nm, l = 22 mm, m = 10 ng, Omega_M = 2pi x 1 MHz
        d = derive_params(paper_params(convention="ordinary"))
        omega_c = 2 * math.pi * C_LIGHT / 1064e-9
        expected = (omega_c / 22e-3) * math.sqrt(
            HBAR / (2 * 1e-11 * 2 * math.pi * 1e6)
        )
        assert d.g0_l == pytest.approx(expected, rel=1e-12)
        assert d.g0_l == pytest.approx(74.0, rel=1e-2)

    def test_drive_strength_squared_matches_power_relation(self):
        d = derive_params(paper_params())
        omega_c = 2 * math.pi * C_LIGHT / 1064e-9
        omega_d = omega_c - 6.5e6
        assert d.eps_l**2 == pytest.approx(
            2 * d.kappa_l * 70e-6 / (HBAR * omega_d), rel=1e-12
        )

    def test_gamma_from_quality_factor(self):
        d = derive_params(paper_params())
        assert d.gamma_m == pytest.approx(d.omega_m / 2e4, rel=1e-15)

    def test_frequency_convention(self):
        assert to_angular(1e6, "ordinary") == pytest.approx(2 * math.pi * 1e6)
        assert to_angular(1e6, "angular") == 1e6
        with pytest.raises(ValueError):
            to_angular(1.0, "radians")

    def test_nbar_monotone_in_temperature(self):
        om = 2 * math.pi * 1e6
        temps = np.linspace(1e-4, 1.0, 40)
        occ = [thermal_occupation(om, t) for t in temps]
        assert all(b > a for a, b in zip(occ, occ[1:]))

    @pytest.mark.parametrize(
        "field,value",
        [
            ("length", -1.0),
            ("length", 0.0),
            ("finesse", 0.0),
            ("wavelength", -2e-9),
            ("drive_power", -1e-6),
        ],
    )
    def test_rejects_invalid_cavity_inputs(self, field, value):
        kwargs = dict(
            length=22e-3,
            finesse=2.6e5,
            wavelength=1064e-9,
            drive_power=70e-6,
            drive_detuning=6.5e6,
        )
        kwargs[field] = value
        with pytest.raises(ValueError):
            CavityParams(**kwargs)

    def test_rejects_invalid_mechanical_inputs(self):
        with pytest.raises(ValueError):
            MechanicalParams(mass=0.0, frequency=1e6, quality_factor=1e4, bath_temperature=0.0)
        with pytest.raises(ValueError):
            MechanicalParams(mass=1e-11, frequency=-1e6, quality_factor=1e4, bath_temperature=0.0)
        with pytest.raises(ValueError):
            MechanicalParams(mass=1e-11, frequency=1e6, quality_factor=1e4, bath_temperature=-0.1)


class TestDriftMatrix:
    def test_zero_means_gives_block_diagonal(self):
        d = toy_derived()
        a = drift_matrix(d, MeanState.zero())
        # mechanical rotation-damping block
        assert a[0, 1] == d.omega_m and a[1, 0] == -d.omega_m
        assert a[1, 1] == -d.gamma_m
        # no coupling entries anywhere
        coupling = a.copy()
        coupling[:2, :2] = 0.0
        coupling[2:4, 2:4] = 0.0
        coupling[4:6, 4:6] = 0.0
        assert np.all(coupling == 0.0)
        assert a[2, 3] == d.delta0_l and a[4, 5] == d.delta0_r

    def test_real_left_amplitude_structure(self):
        d = toy_derived()
        s = MeanState(q=0.0, p=0.0, alpha_l=1.5 + 0j, alpha_r=0j)
        a = drift_matrix(d, s)
        assert a[2, 0] == 0.0  # G_yL = 0 for real alpha
        assert a[3, 0] == -2 * d.g0_l * 1.5  # -G_xL
        # right cavity fully decoupled from the mechanics row
        assert np.all(a[4:6, 0:2] == 0.0) and np.all(a[1, 4:6] == 0.0)

    def test_jacobian_consistency(self, rng):
        # A(s) is the Jacobian of the mean-field field in the quadrature
        # basis; MeanState carries alpha components, so the numerical
        # Jacobian needs the X = sqrt(2) Re(alpha) change of basis
        d = toy_derived()
        basis = np.diag([1.0, 1.0] + [math.sqrt(2.0)] * 4)
        basis_inv = np.linalg.inv(basis)
        for _ in range(20):
            v = rng.normal(scale=2.0, size=6)
            s = MeanState.from_vector(v)
            a = drift_matrix(d, s)
            scale = max(1.0, np.max(np.abs(v)))
            h = 1e-6 * scale
            num = np.empty((6, 6))
            for j in range(6):
                vp, vm = v.copy(), v.copy()
                vp[j] += h
                vm[j] -= h
                fp = mean_field_rhs(d, MeanState.from_vector(vp)).as_vector()
                fm = mean_field_rhs(d, MeanState.from_vector(vm)).as_vector()
                num[:, j] = (fp - fm) / (2 * h)
            jac = basis @ num @ basis_inv
            assert np.max(np.abs(a - jac)) <= 1e-5 * max(1.0, np.max(np.abs(a)))

    def test_time_rescaling_covariance(self):
        # scaling all rates by s and time by 1/s leaves trajectories invariant
        d = toy_derived()
        s = 7.3
        d_scaled = toy_derived(
            omega_m=d.omega_m * s,
            gamma_m=d.gamma_m * s,
            kappa=d.kappa_l * s,
            delta0=d.delta0_l * s,
            g0=d.g0_l * s,
            eps=d.eps_l * s,
        )
        cfg = TrajectoryConfig(t_end=5.0, dt=2e-3, sample_every=100)
        cfg_scaled = TrajectoryConfig(t_end=5.0 / s, dt=2e-3 / s, sample_every=100)
        run = integrate(d, cfg)
        run_scaled = integrate(d_scaled, cfg_scaled)
        assert len(run) == len(run_scaled)
        for a, b in zip(run, run_scaled):
            assert b.t == pytest.approx(a.t / s, rel=1e-12)
            np.testing.assert_allclose(
                b.mean.as_vector(), a.mean.as_vector(), rtol=1e-9, atol=1e-12
            )
            np.testing.assert_allclose(b.cov, a.cov, rtol=1e-9, atol=1e-12)


class TestDiffusionMatrix:
    def test_zero_temperature(self):
        d = toy_derived(nbar=0.0, kappa=0.7)
        np.testing.assert_array_equal(
            diffusion_matrix(d),
            np.diag([0.0, d.gamma_m, 0.7, 0.7, 0.7, 0.7]),
        )

    def test_lossless_mechanics(self):
        d = toy_derived(gamma_m=0.0)
        assert diffusion_matrix(d)[1, 1] == 0.0

    def test_thermal_entry(self):
        d = toy_derived(gamma_m=50.0, nbar=1.0)
        assert diffusion_matrix(d)[1, 1] == 150.0
