"""Coupled integration of the mean-field ODEs and the Lyapunov covariance equation.

The deterministic means (noise terms dropped from the Langevin equations) and
the 6x6 covariance of the quadrature fluctuations are advanced together with
classical fixed-step RK4; the drift matrix is re-evaluated from the current
mean at every stage.  The covariance is carried as its 21 unique entries, so
every sampled matrix is symmetric by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._backend import BACKEND, kernel
from .model import (
    SQRT2,
    DerivedParams,
    MeanState,
    diffusion_matrix,
    dynamic_detunings,
)

__all__ = [
    "BACKEND",
    "DivergenceError",
    "TrajectoryConfig",
    "TrajectorySample",
    "auto_dt",
    "covariance_rhs",
    "default_initial_cov",
    "integrate",
    "mean_field_rhs",
    "pack_cov",
    "propagate_covariance",
    "uniform_thermal_cov",
    "unpack_cov",
]

#: default step = this fraction of the fastest timescale; hard guard at 0.05.
#: 0.01 keeps the RK4 phase drift of the detuning rotation below 1e-6 of the
#: trajectory scale over the shipped scenario horizons (it grows ~ dt^4 T)
STEP_FRACTION = 0.01
STEP_GUARD_FRACTION = 0.05
DIVERGENCE_GUARD = 1e12

_IU, _JU = np.triu_indices(6)


class DivergenceError(RuntimeError):
    """The integrator state left the finite / magnitude-guard region."""

    def __init__(self, step: int, t: float):
        self.step = step
        self.t = t
        super().__init__(
            f"trajectory diverged at step {step} (t = {t:.6g} s): "
            f"state exceeded {DIVERGENCE_GUARD:g} or became non-finite"
        )


def pack_cov(v: np.ndarray) -> np.ndarray:
    """Upper-triangle entries of a symmetric 6x6 matrix, row-major (21,)."""
    v = np.asarray(v, dtype=float)
    return v[_IU, _JU].copy()


def unpack_cov(v21: np.ndarray) -> np.ndarray:
    """Inverse of :func:`pack_cov`; the result is exactly symmetric."""
    full = np.zeros((6, 6))
    full[_IU, _JU] = v21
    full[_JU, _IU] = v21
    return full


def default_initial_cov(d: DerivedParams) -> np.ndarray:
    """Pre-drive state: mechanical mode thermalized with its bath, cavities in vacuum."""
    t = d.nbar + 0.5
    return np.diag([t, t, 0.5, 0.5, 0.5, 0.5])


def uniform_thermal_cov(d: DerivedParams) -> np.ndarray:
    """All six quadratures at the mechanical-bath variance.

    Used by the delayed-build-up scenario presets: starting the cavity
    fluctuations at the bath variance makes the entanglement onset wait for
    the excess cavity noise to drain at rate 2 kappa, which is what produces
    onset delays inversely proportional to the cavity leakage.
    """
    return (d.nbar + 0.5) * np.eye(6)


@dataclass(frozen=True)
class TrajectoryConfig:
    """Integration window and initial conditions.

    ``dt = 0`` selects the default step (STEP_FRACTION of the fastest
    timescale).  ``initial_cov = None`` selects :func:`default_initial_cov`.
    """

    t_end: float
    dt: float = 0.0
    sample_every: int = 1
    initial_mean: MeanState = field(default_factory=MeanState.zero)
    initial_cov: np.ndarray | None = None

    def __post_init__(self):
        if not self.t_end > 0:
            raise ValueError(f"t_end must be positive, got {self.t_end}")
        if self.dt < 0:
            raise ValueError(f"dt must be >= 0, got {self.dt}")
        if 0 < self.t_end <= self.dt:
            raise ValueError(f"need dt < t_end, got dt={self.dt}, t_end={self.t_end}")
        if self.sample_every < 1:
            raise ValueError(f"sample_every must be >= 1, got {self.sample_every}")
        if self.initial_cov is not None:
            c = np.asarray(self.initial_cov, dtype=float)
            if c.shape != (6, 6) or not np.allclose(c, c.T, rtol=1e-12, atol=0.0):
                raise ValueError("initial_cov must be a symmetric 6x6 matrix")


@dataclass(frozen=True)
class TrajectorySample:
    t: float
    mean: MeanState
    cov: np.ndarray


def fastest_rate(d: DerivedParams) -> float:
    return max(d.kappa_l, d.kappa_r, d.omega_m, abs(d.delta0_l), abs(d.delta0_r))


def auto_dt(d: DerivedParams) -> float:
    """Default integrator step: resolves cavity decay, detuning rotation and
    the mechanical oscillation."""
    return STEP_FRACTION / fastest_rate(d)


def mean_field_rhs(d: DerivedParams, s: MeanState) -> MeanState:
    """Deterministic part of the Langevin equations (noise dropped)."""
    dl, dr = dynamic_detunings(d, s.q)
    dq = d.omega_m * s.p
    dp = (
        -d.omega_m * s.q
        - d.gamma_m * s.p
        - SQRT2 * d.g0_l * abs(s.alpha_l) ** 2
        + SQRT2 * d.g0_r * abs(s.alpha_r) ** 2
    )
    dal = -(d.kappa_l + 1j * dl) * s.alpha_l + d.eps_l
    dar = -(d.kappa_r + 1j * dr) * s.alpha_r + d.eps_r
    return MeanState(q=dq, p=dp, alpha_l=dal, alpha_r=dar)


def covariance_rhs(a: np.ndarray, v: np.ndarray, d: np.ndarray) -> np.ndarray:
    """dV/dt = A V + V A^T + D, symmetrized to suppress round-off drift."""
    m = a @ v + v @ a.T + d
    return 0.5 * (m + m.T)


def _step_count(t_end: float, dt: float) -> int:
    # ceil with protection against 1-ulp overshoot from the division
    n = int(math.ceil(t_end / dt - 1e-9))
    return max(n, 1)


def integrate(d: DerivedParams, cfg: TrajectoryConfig) -> list[TrajectorySample]:
    """Advance means and covariance to t_end, recording every
    ``sample_every``-th step plus the initial and final states.

    Raises :class:`DivergenceError` if the state blows up, and ValueError if
    the step does not resolve the fastest system timescale.
    """
    dt = cfg.dt if cfg.dt > 0 else auto_dt(d)
    guard = STEP_GUARD_FRACTION / fastest_rate(d)
    if dt > guard * (1.0 + 1e-12):
        raise ValueError(
            f"dt = {dt:g} s too coarse: must be <= {guard:g} s "
            f"(0.05 / fastest rate) to resolve the dynamics"
        )
    if dt >= cfg.t_end:
        raise ValueError(f"need dt < t_end, got dt={dt}, t_end={cfg.t_end}")
    v0 = cfg.initial_cov if cfg.initial_cov is not None else default_initial_cov(d)
    y0 = np.concatenate([cfg.initial_mean.as_vector(), pack_cov(np.asarray(v0))])
    n_steps = _step_count(cfg.t_end, dt)
    times, states, fail = kernel.run_trajectory(
        d.as_vector(), y0, dt, n_steps, int(cfg.sample_every), DIVERGENCE_GUARD
    )
    if fail >= 0:
        raise DivergenceError(int(fail), float(fail) * dt)
    return [
        TrajectorySample(
            t=float(t),
            mean=MeanState.from_vector(row[:6]),
            cov=unpack_cov(row[6:]),
        )
        for t, row in zip(times, states)
    ]


def propagate_covariance(
    a: np.ndarray, d_diag: np.ndarray, v0: np.ndarray, dt: float, t_end: float
) -> np.ndarray:
    """Integrate the Lyapunov equation alone, holding the drift matrix fixed.

    Suited to relaxation onto the algebraic steady state: an equilibrium of
    the ODE is an exact fixed point of the RK4 map, so the step only needs to
    keep the scheme stable (|lambda_max| * dt well inside the RK4 region),
    not to resolve every rotation to sampling accuracy.
    """
    a = np.ascontiguousarray(a, dtype=float)
    d_diag = np.ascontiguousarray(d_diag, dtype=float)
    n_steps = _step_count(t_end, dt)
    v21 = kernel.run_constant_cov(a, d_diag, pack_cov(np.asarray(v0)), dt, n_steps)
    return unpack_cov(v21)


def steady_diffusion_diag(d: DerivedParams) -> np.ndarray:
    """Diagonal of the diffusion matrix as a vector (kernel input layout)."""
    return np.diag(diffusion_matrix(d)).copy()


def mirror_params_and_state(d: DerivedParams, s: MeanState) -> tuple[DerivedParams, MeanState]:
    """L<->R relabeling with the mechanical axes negated; maps trajectories of
    the original system onto trajectories of the mirrored one."""
    return d.mirrored(), MeanState(q=-s.q, p=-s.p, alpha_l=s.alpha_r, alpha_r=s.alpha_l)
