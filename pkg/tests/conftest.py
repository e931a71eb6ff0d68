import numpy as np
import pytest

from twincav.model import (
    CavityParams,
    DerivedParams,
    MechanicalParams,
    PhysicalParams,
)


def paper_params(
    drive="both",
    power=70e-6,
    finesse=2.6e5,
    length_l=22e-3,
    length_r=22e-3,
    temperature=0.0,
    convention="angular",
):
    """The experiment-scale parameter set used by the scenario presets."""
    om = 1e6 if convention == "angular" else 1e6  # raw input value
    om_ang = om * (2 * np.pi if convention == "ordinary" else 1.0)
    pl = power if drive in ("both", "left_only") else 0.0
    pr = power if drive in ("both", "right_only") else 0.0
    return PhysicalParams(
        left=CavityParams(length_l, finesse, 1064e-9, pl, 6.5 * om_ang),
        right=CavityParams(length_r, finesse, 1064e-9, pr, 6.5 * om_ang),
        mechanical=MechanicalParams(1e-11, om_ang, 2e4, temperature),
        frequency_convention=convention,
    )


def toy_derived(
    omega_m=1.0,
    gamma_m=0.02,
    kappa=0.8,
    delta0=2.0,
    g0=0.3,
    eps=2.0,
    nbar=0.0,
    kappa_r=None,
    eps_r=None,
    delta0_r=None,
    g0_r=None,
):
    """Small nondimensional parameter set for fast integration tests."""
    return DerivedParams(
        omega_m=omega_m,
        gamma_m=gamma_m,
        kappa_l=kappa,
        kappa_r=kappa if kappa_r is None else kappa_r,
        g0_l=g0,
        g0_r=g0 if g0_r is None else g0_r,
        eps_l=eps,
        eps_r=eps if eps_r is None else eps_r,
        delta0_l=delta0,
        delta0_r=delta0 if delta0_r is None else delta0_r,
        nbar=nbar,
    )


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
