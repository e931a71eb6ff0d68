"""Independent brute-force checks for the main simulation path.

Everything here validates results produced elsewhere and shares no numerical
kernel with the production code: polynomial roots come from a dense
sign-change scan, the algebraic Lyapunov equation is solved as a plain
36x36 linear system, and the covariance dynamics is re-derived by
Monte Carlo over explicit noise realizations.

The stochastic oracle propagates the linearized fluctuations around its own
mean trajectory with per-step Gaussian increments of covariance D dt (the
symmetrized fluctuation-dissipation normalization that makes the ensemble
covariance obey the Lyapunov equation).  The deterministic part of each step
uses the exact matrix-exponential propagator: a plain forward-Euler update
is unconditionally biased here (relative equilibrium error
(kappa^2 + Delta^2) dt / 2 kappa, which exceeds 100% at any step satisfying
the resolution guard), while the exponential variant keeps the step bias far
below the Monte Carlo standard error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .dynamics import TrajectoryConfig, auto_dt, fastest_rate, STEP_GUARD_FRACTION
from .model import SQRT2, DerivedParams, diffusion_matrix

__all__ = [
    "MonteCarloCovariance",
    "poly_real_roots_scan",
    "lyapunov_solve_algebraic",
    "stochastic_covariance_estimate",
]


def poly_real_roots_scan(coeffs, lo: float, hi: float, n: int) -> list[float]:
    """Real roots of a polynomial (ascending coefficients) on [lo, hi] by a
    dense n+1-point scan and bisection of every sign-change bracket.

    Tangential (even-multiplicity) roots are missed by design; that is the
    point of using it as an independent existence check.
    """
    if n < 1000:
        raise ValueError(f"scan needs n >= 1000 points, got {n}")
    if not lo < hi:
        raise ValueError(f"need lo < hi, got [{lo}, {hi}]")
    c = np.asarray(coeffs, dtype=float)
    xs = np.linspace(lo, hi, n + 1)
    ys = np.polynomial.polynomial.polyval(xs, c)
    roots = [float(x) for x, y in zip(xs, ys) if y == 0.0]
    sign_change = np.where(ys[:-1] * ys[1:] < 0.0)[0]
    for i in sign_change:
        a, b = xs[i], xs[i + 1]
        fa = ys[i]
        for _ in range(200):
            if b - a <= 1e-12:
                break
            m = 0.5 * (a + b)
            fm = np.polynomial.polynomial.polyval(m, c)
            if fm == 0.0:
                a = b = m
                break
            if fa * fm < 0.0:
                b = m
            else:
                a, fa = m, fm
        roots.append(0.5 * (a + b))
    return sorted(roots)


def lyapunov_solve_algebraic(a: np.ndarray, d: np.ndarray) -> np.ndarray:
    """Steady covariance from A V + V A^T + D = 0 as a dense linear system.

    Builds (A (x) I + I (x) A) once and solves it by Gaussian elimination
    with partial pivoting; rejects unstable or marginal drift matrices.
    """
    from .steady import stability_report

    a = np.asarray(a, dtype=float)
    d = np.asarray(d, dtype=float)
    n = a.shape[0]
    if a.shape != (n, n) or d.shape != (n, n):
        raise ValueError("A and D must be square matrices of equal size")
    stable, marginal = stability_report(a)
    if not stable or marginal:
        raise ValueError("drift matrix is not strictly stable; no steady covariance")
    eye = np.eye(n)
    k = np.kron(a, eye) + np.kron(eye, a)
    v = np.linalg.solve(k, -d.reshape(n * n)).reshape(n, n)
    return 0.5 * (v + v.T)


@dataclass(frozen=True)
class MonteCarloCovariance:
    """Sample covariance of the fluctuation ensemble at t_end, with the
    Gaussian-statistics standard error of every entry."""

    cov: np.ndarray
    stderr: np.ndarray
    n_traj: int


def _mean_rhs(d: DerivedParams, y: np.ndarray) -> np.ndarray:
    q, p, xl, yl, xr, yr = y
    dl = d.delta0_l + SQRT2 * d.g0_l * q
    dr = d.delta0_r - SQRT2 * d.g0_r * q
    return np.array(
        [
            d.omega_m * p,
            -d.omega_m * q - d.gamma_m * p
            - SQRT2 * d.g0_l * (xl * xl + yl * yl)
            + SQRT2 * d.g0_r * (xr * xr + yr * yr),
            -d.kappa_l * xl + dl * yl + d.eps_l,
            -d.kappa_l * yl - dl * xl,
            -d.kappa_r * xr + dr * yr + d.eps_r,
            -d.kappa_r * yr - dr * xr,
        ]
    )


def _drift_at(d: DerivedParams, y: np.ndarray) -> np.ndarray:
    q = y[0]
    dl = d.delta0_l + SQRT2 * d.g0_l * q
    dr = d.delta0_r - SQRT2 * d.g0_r * q
    glx, gly = 2.0 * d.g0_l * y[2], 2.0 * d.g0_l * y[3]
    grx, gry = 2.0 * d.g0_r * y[4], 2.0 * d.g0_r * y[5]
    return np.array(
        [
            [0.0, d.omega_m, 0.0, 0.0, 0.0, 0.0],
            [-d.omega_m, -d.gamma_m, -glx, -gly, grx, gry],
            [gly, 0.0, -d.kappa_l, dl, 0.0, 0.0],
            [-glx, 0.0, -dl, -d.kappa_l, 0.0, 0.0],
            [-gry, 0.0, 0.0, 0.0, -d.kappa_r, dr],
            [grx, 0.0, 0.0, 0.0, -dr, -d.kappa_r],
        ]
    )


def stochastic_covariance_estimate(
    d: DerivedParams, cfg: TrajectoryConfig, n_traj: int, seed: int
) -> MonteCarloCovariance:
    """Monte Carlo covariance at t_end from n_traj noise realizations.

    Initial fluctuations are drawn from cfg.initial_cov; every step applies
    the exact linear propagator exp(A(t) dt) built from this module's own
    mean-field integration, then adds Gaussian increments of covariance
    D dt.  Deterministic for a fixed (seed, n_traj, dt).
    """
    if n_traj < 1000:
        raise ValueError(f"need n_traj >= 1000 for a usable estimate, got {n_traj}")
    dt = cfg.dt if cfg.dt > 0 else auto_dt(d)
    guard = STEP_GUARD_FRACTION / fastest_rate(d)
    if dt > guard * (1.0 + 1e-12):
        raise ValueError(
            f"dt = {dt:g} s violates the resolution guard ({guard:g} s)"
        )
    n_steps = max(1, int(math.ceil(cfg.t_end / dt - 1e-9)))

    v0 = (
        np.asarray(cfg.initial_cov, dtype=float)
        if cfg.initial_cov is not None
        else np.diag([d.nbar + 0.5] * 2 + [0.5] * 4)
    )
    rng = np.random.default_rng(seed)
    # initial ensemble: exact draw from the initial Gaussian
    evals, evecs = np.linalg.eigh(v0)
    sqrt_v0 = evecs @ np.diag(np.sqrt(np.clip(evals, 0.0, None)))
    u = sqrt_v0 @ rng.standard_normal((6, n_traj))

    # increment covariance D dt: the symmetrized fluctuation-dissipation
    # relation <n_i(t) n_j(t')>_sym = delta(t-t') D_ij feeds the Lyapunov
    # equation Vdot = A V + V A^T + D, so the per-step noise must inject
    # exactly D dt for the ensemble covariance to obey it
    noise_amp = np.sqrt(np.diag(diffusion_matrix(d)) * dt)
    noisy = np.nonzero(noise_amp > 0.0)[0]

    y = cfg.initial_mean.as_vector()
    a_prev = None
    prop = None
    for _ in range(n_steps):
        a = _drift_at(d, y)
        if a_prev is None or not np.allclose(a, a_prev, rtol=1e-12, atol=0.0):
            prop = expm(a * dt)
            a_prev = a
        u = prop @ u
        u[noisy] += noise_amp[noisy, None] * rng.standard_normal(
            (len(noisy), n_traj)
        )
        # RK4 for the 6 deterministic means, same step
        k1 = _mean_rhs(d, y)
        k2 = _mean_rhs(d, y + 0.5 * dt * k1)
        k3 = _mean_rhs(d, y + 0.5 * dt * k2)
        k4 = _mean_rhs(d, y + dt * k3)
        y = y + (dt / 6.0) * (k1 + 2.0 * (k2 + k3) + k4)

    uc = u - u.mean(axis=1, keepdims=True)
    cov = (uc @ uc.T) / (n_traj - 1)
    var = np.diag(cov)
    stderr = np.sqrt((np.outer(var, var) + cov**2) / (n_traj - 1))
    return MonteCarloCovariance(cov=cov, stderr=stderr, n_traj=n_traj)
