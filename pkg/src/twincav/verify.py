"""Self-contained oracle cross-checks behind ``twincav verify``.

Each check prints one PASS/FAIL line; the suite succeeds only if all pass.
These duplicate key test-suite assertions in a form that runs against an
installed package without pytest.
"""

from __future__ import annotations

import numpy as np

from .dynamics import TrajectoryConfig, propagate_covariance
from .entanglement import symplectic_eigenvalues_pt
from .model import (
    CavityParams,
    MechanicalParams,
    PhysicalParams,
    derive_params,
    diffusion_matrix,
    drift_matrix,
)
from .oracles import (
    lyapunov_solve_algebraic,
    poly_real_roots_scan,
    stochastic_covariance_estimate,
)
from .steady import fixed_points
from .testmat import random_physical_cov, symplectic_form
from .cli import load_preset


def _check(name: str, ok: bool, detail: str = "") -> bool:
    status = "PASS" if ok else "FAIL"
    suffix = f"  ({detail})" if detail else ""
    print(f"[{status}] {name}{suffix}")
    return ok


def run_verification(quick: bool = False) -> bool:
    ok = True

    # polynomial scan: construct-then-recover round trip
    roots = np.array([-2.0, -1.0, 1.0, 2.0])
    coeffs = np.polynomial.polynomial.polyfromroots(roots)
    found = poly_real_roots_scan(coeffs, -10.0, 10.0, 4000)
    err = max(abs(a - b) for a, b in zip(found, roots)) if len(found) == 4 else np.inf
    ok &= _check("poly scan recovers (q^2-1)(q^2-4) roots", err < 1e-10, f"err={err:.2g}")

    # algebraic Lyapunov identities
    v = lyapunov_solve_algebraic(-2.0 * np.eye(6), 2.0 * np.eye(6))
    ok &= _check(
        "lyapunov solve: A=-kI, D=kI gives V=I/2",
        bool(np.allclose(v, 0.5 * np.eye(6), atol=1e-12)),
    )

    # fig2-sym steady drift: time integration matches algebraic solve
    scenario = load_preset("fig2-sym")
    d = derive_params(scenario.params)
    trivial = min(fixed_points(d), key=lambda s: abs(s.q))
    a = drift_matrix(d, trivial.mean_state())
    diff = diffusion_matrix(d)
    v_alg = lyapunov_solve_algebraic(a, diff)
    lam = np.abs(np.linalg.eigvals(a))
    dt = 0.5 / (2.0 * lam.max())
    t_relax = 20.0 / np.min(-np.linalg.eigvals(a).real)
    v_int = propagate_covariance(a, np.diag(diff), 0.5 * np.eye(6), dt, t_relax)
    err = np.max(np.abs(v_int - v_alg))
    ok &= _check(
        "Lyapunov integration relaxes onto algebraic steady state",
        err < 1e-6,
        f"max-abs err={err:.2g}",
    )

    # symplectic eigenvalues: closed form vs i*Omega*V^PT spectrum
    rng = np.random.default_rng(20240817)
    pt = np.diag([1.0, 1.0, 1.0, -1.0])
    worst = 0.0
    for _ in range(300):
        vs = random_physical_cov(rng)
        vm, vp = symplectic_eigenvalues_pt(vs)
        spec = np.abs(np.linalg.eigvals(1j * symplectic_form() @ (pt @ vs @ pt)))
        spec.sort()
        worst = max(
            worst,
            abs(spec[0] - vm) / vm,
            abs(spec[-1] - vp) / vp,
        )
    ok &= _check(
        "closed-form symplectic spectrum matches PT spectral oracle",
        worst < 1e-10,
        f"worst rel err={worst:.2g}",
    )

    if not quick:
        # undriven damped cavity: Monte Carlo relaxes to vacuum variance
        om = 1e6
        p = PhysicalParams(
            left=CavityParams(22e-3, 2.6e5, 1064e-9, 0.0, 6.5 * om),
            right=CavityParams(22e-3, 2.6e5, 1064e-9, 0.0, 6.5 * om),
            mechanical=MechanicalParams(1e-11, om, 2e4, 0.0),
            frequency_convention="angular",
        )
        du = derive_params(p)
        v0 = np.diag([0.5, 0.5, 1.5, 1.5, 1.5, 1.5])
        cfg = TrajectoryConfig(t_end=6.0 / du.kappa_l, dt=2e-9, initial_cov=v0)
        est = stochastic_covariance_estimate(du, cfg, n_traj=4000, seed=7)
        dev = abs(est.cov[2, 2] - 0.5) / est.stderr[2, 2]
        ok &= _check(
            "Monte Carlo: undriven cavity variance -> 1/2 within 3 SE",
            dev < 3.0,
            f"deviation={dev:.2f} SE",
        )

    print("verification:", "all checks passed" if ok else "FAILURES detected")
    return bool(ok)
