"""Physical parameters and system matrices for the double-cavity optomechanical model.

A mechanical resonator is coupled by radiation pressure to one cavity mode on
each side.  Everything downstream works in the rotating frames of the two
drive lasers and in *dimensionless* quadratures:

* mechanics: q, p scaled by the zero-point width, so the free evolution is a
  rotation at ``omega_m`` damped at ``gamma_m``;
* cavities: X = (a + a*)/sqrt(2), Y = (a - a*)/(i sqrt(2)), vacuum variance 1/2.

All rates stored in :class:`DerivedParams` are angular (rad/s).  The sign
conventions follow the mirror geometry: the two radiation pressures push the
resonator in opposite directions, so the left cavity couples with +q and the
right cavity with -q.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constants import C_LIGHT, HBAR, K_B

SQRT2 = math.sqrt(2.0)

#: quadrature ordering used for every 6x6 matrix in the package
QUADRATURE_ORDER = ("q", "p", "X_L", "Y_L", "X_R", "Y_R")

FREQUENCY_CONVENTIONS = ("ordinary", "angular")


def to_angular(value: float, convention: str) -> float:
    """Interpret a raw frequency input: 'ordinary' inputs are in Hz (x 2pi)."""
    if convention not in FREQUENCY_CONVENTIONS:
        raise ValueError(f"unknown frequency convention {convention!r}")
    return 2.0 * math.pi * value if convention == "ordinary" else value


@dataclass(frozen=True)
class CavityParams:
    """One Fabry-Perot cavity and its drive laser.

    length, wavelength in meters, drive_power in watts, drive_detuning in
    rad/s (Delta_0 = omega_cavity - omega_drive).
    """

    length: float
    finesse: float
    wavelength: float
    drive_power: float
    drive_detuning: float

    def __post_init__(self):
        if not self.length > 0:
            raise ValueError(f"cavity length must be positive, got {self.length}")
        if not self.finesse > 0:
            raise ValueError(f"finesse must be positive, got {self.finesse}")
        if not self.wavelength > 0:
            raise ValueError(f"wavelength must be positive, got {self.wavelength}")
        if self.drive_power < 0:
            raise ValueError(f"drive power must be >= 0, got {self.drive_power}")


@dataclass(frozen=True)
class MechanicalParams:
    """Mechanical resonator: mass in kg, frequency in rad/s, bath temperature in K."""

    mass: float
    frequency: float
    quality_factor: float
    bath_temperature: float

    def __post_init__(self):
        if not self.mass > 0:
            raise ValueError(f"mass must be positive, got {self.mass}")
        if not self.frequency > 0:
            raise ValueError(f"mechanical frequency must be positive, got {self.frequency}")
        if not self.quality_factor > 0:
            raise ValueError(f"quality factor must be positive, got {self.quality_factor}")
        if self.bath_temperature < 0:
            raise ValueError(f"bath temperature must be >= 0, got {self.bath_temperature}")


@dataclass(frozen=True)
class PhysicalParams:
    """Lab-facing inputs.  Frequencies in the typed fields are always angular;
    ``frequency_convention`` records how raw numeric inputs were interpreted."""

    left: CavityParams
    right: CavityParams
    mechanical: MechanicalParams
    frequency_convention: str = "ordinary"

    def __post_init__(self):
        if self.frequency_convention not in FREQUENCY_CONVENTIONS:
            raise ValueError(
                f"unknown frequency convention {self.frequency_convention!r}"
            )


@dataclass(frozen=True)
class DerivedParams:
    """Simulation-facing rates, all angular (rad/s).

    kappa_*: cavity amplitude decay; eps_*: drive strengths; g0_*:
    single-photon optomechanical coupling; gamma_m: mechanical damping;
    nbar: thermal phonon occupation; delta0_*: static laser detunings.
    """

    omega_m: float
    gamma_m: float
    kappa_l: float
    kappa_r: float
    g0_l: float
    g0_r: float
    eps_l: float
    eps_r: float
    delta0_l: float
    delta0_r: float
    nbar: float

    def as_vector(self) -> np.ndarray:
        """Flat layout consumed by the integration kernels."""
        return np.array(
            [
                self.omega_m,
                self.gamma_m,
                self.kappa_l,
                self.kappa_r,
                self.g0_l,
                self.g0_r,
                self.eps_l,
                self.eps_r,
                self.delta0_l,
                self.delta0_r,
                self.nbar,
            ]
        )

    def mirrored(self) -> "DerivedParams":
        """Swap the left and right cavity parameters (L<->R relabeling)."""
        return DerivedParams(
            omega_m=self.omega_m,
            gamma_m=self.gamma_m,
            kappa_l=self.kappa_r,
            kappa_r=self.kappa_l,
            g0_l=self.g0_r,
            g0_r=self.g0_l,
            eps_l=self.eps_r,
            eps_r=self.eps_l,
            delta0_l=self.delta0_r,
            delta0_r=self.delta0_l,
            nbar=self.nbar,
        )


@dataclass(frozen=True)
class MeanState:
    """Classical means: mechanical quadratures plus complex cavity amplitudes."""

    q: float
    p: float
    alpha_l: complex
    alpha_r: complex

    def __post_init__(self):
        vals = (self.q, self.p, self.alpha_l, self.alpha_r)
        if not all(np.isfinite(v).all() for v in np.atleast_1d(np.asarray(vals))):
            raise ValueError(f"mean state has non-finite components: {vals}")

    def as_vector(self) -> np.ndarray:
        """Real 6-vector (q, p, Re aL, Im aL, Re aR, Im aR)."""
        return np.array(
            [
                self.q,
                self.p,
                self.alpha_l.real,
                self.alpha_l.imag,
                self.alpha_r.real,
                self.alpha_r.imag,
            ]
        )

    @classmethod
    def from_vector(cls, v) -> "MeanState":
        v = np.asarray(v, dtype=float)
        return cls(
            q=float(v[0]),
            p=float(v[1]),
            alpha_l=complex(v[2], v[3]),
            alpha_r=complex(v[4], v[5]),
        )

    @classmethod
    def zero(cls) -> "MeanState":
        return cls(0.0, 0.0, 0j, 0j)


def thermal_occupation(omega_m: float, temperature: float) -> float:
    """Bose occupation of the mechanical bath; exactly 0 at T = 0."""
    if temperature < 0:
        raise ValueError(f"temperature must be >= 0, got {temperature}")
    if temperature == 0.0:
        return 0.0
    return 1.0 / math.expm1(HBAR * omega_m / (K_B * temperature))


def derive_params(p: PhysicalParams) -> DerivedParams:
    """Reduce lab inputs to the angular rates driving the simulation.

    kappa = pi c / (2 F l); |eps|^2 = 2 kappa P / (hbar omega_drive);
    g0 = (omega_cavity / l) sqrt(hbar / (2 m omega_m)); gamma_m = omega_m/Q.
    """
    mech = p.mechanical
    omega_m = mech.frequency
    gamma_m = omega_m / mech.quality_factor
    nbar = thermal_occupation(omega_m, mech.bath_temperature)

    def one_side(c: CavityParams):
        kappa = math.pi * C_LIGHT / (2.0 * c.finesse * c.length)
        omega_c = 2.0 * math.pi * C_LIGHT / c.wavelength
        omega_d = omega_c - c.drive_detuning
        if omega_d <= 0:
            raise ValueError("drive detuning exceeds the optical frequency")
        eps = math.sqrt(2.0 * kappa * c.drive_power / (HBAR * omega_d))
        g0 = (omega_c / c.length) * math.sqrt(HBAR / (2.0 * mech.mass * omega_m))
        return kappa, eps, g0

    kappa_l, eps_l, g0_l = one_side(p.left)
    kappa_r, eps_r, g0_r = one_side(p.right)
    return DerivedParams(
        omega_m=omega_m,
        gamma_m=gamma_m,
        kappa_l=kappa_l,
        kappa_r=kappa_r,
        g0_l=g0_l,
        g0_r=g0_r,
        eps_l=eps_l,
        eps_r=eps_r,
        delta0_l=p.left.drive_detuning,
        delta0_r=p.right.drive_detuning,
        nbar=nbar,
    )


def dynamic_detunings(d: DerivedParams, q: float) -> tuple[float, float]:
    """Instantaneous cavity detunings, shifted by the mechanical displacement
    with opposite signs for the two sides."""
    return (
        d.delta0_l + SQRT2 * d.g0_l * q,
        d.delta0_r - SQRT2 * d.g0_r * q,
    )


def drift_matrix(d: DerivedParams, s: MeanState) -> np.ndarray:
    """Drift matrix A(t) of the linearized fluctuation dynamics at mean state s.

    A is the Jacobian of the mean-field vector field in the quadrature basis
    (q, p, X_L, Y_L, X_R, Y_R).  The field couplings are the real/imaginary
    parts of G_sigma = 2 g0_sigma <a_sigma>, and the detunings are the dynamic
    ones evaluated at <q>.
    """
    gl = 2.0 * d.g0_l * s.alpha_l
    gr = 2.0 * d.g0_r * s.alpha_r
    dl, dr = dynamic_detunings(d, s.q)
    a = np.zeros((6, 6))
    a[0, 1] = d.omega_m
    a[1, 0] = -d.omega_m
    a[1, 1] = -d.gamma_m
    a[1, 2] = -gl.real
    a[1, 3] = -gl.imag
    a[1, 4] = gr.real
    a[1, 5] = gr.imag
    a[2, 0] = gl.imag
    a[2, 2] = -d.kappa_l
    a[2, 3] = dl
    a[3, 0] = -gl.real
    a[3, 2] = -dl
    a[3, 3] = -d.kappa_l
    a[4, 0] = -gr.imag
    a[4, 4] = -d.kappa_r
    a[4, 5] = dr
    a[5, 0] = gr.real
    a[5, 4] = -dr
    a[5, 5] = -d.kappa_r
    return a


def diffusion_matrix(d: DerivedParams) -> np.ndarray:
    """Noise-injection matrix D = diag(0, gamma_m (2 nbar + 1), kL, kL, kR, kR)
    in the vacuum-variance-1/2 convention."""
    return np.diag(
        [
            0.0,
            d.gamma_m * (2.0 * d.nbar + 1.0),
            d.kappa_l,
            d.kappa_l,
            d.kappa_r,
            d.kappa_r,
        ]
    )
