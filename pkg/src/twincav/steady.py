"""Steady states of the coupled system, their stability, and the existence
thresholds for the symmetric configuration.

Eliminating the cavity amplitudes from the fixed-point equations leaves a
single real equation in the displacement q,

    f(q) = omega_m q + sqrt(2) g0_l |a_l(q)|^2 - sqrt(2) g0_r |a_r(q)|^2 = 0,
    a_s(q) = eps_s / (kappa_s + i Delta_s(q)),

whose polynomial form has degree <= 5 (degree 3 with one drive off, the
single-cavity limit).  Real roots are isolated by recursive derivative
bracketing + bisection and polished by damped Newton; no polynomial
eigensolver is involved.  Stability is decided by Routh-Hurwitz on the
degree-6 characteristic polynomial of the drift matrix.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as npoly

from .model import SQRT2, DerivedParams, MeanState, drift_matrix, dynamic_detunings

__all__ = [
    "SteadyState",
    "ThresholdRegime",
    "ThresholdReport",
    "RootPolishError",
    "fixed_points",
    "symmetric_quartic_roots",
    "threshold_report",
    "stability",
    "stability_report",
    "characteristic_polynomial",
]

RESIDUAL_TOL = 1e-9
POLISH_TOL = 1e-12
SYMMETRY_RTOL = 1e-12
ROUTH_PIVOT_TOL = 1e-12


class RootPolishError(RuntimeError):
    """Newton polishing failed to reach the residual tolerance."""


@dataclass(frozen=True)
class SteadyState:
    """One real steady state; p = 0 always.  residual is the max-abs of the
    fixed-point equations relative to their scale."""

    q: float
    alpha_l: complex
    alpha_r: complex
    stable: bool
    residual: float
    multiplicity: int = 1

    def mean_state(self) -> MeanState:
        return MeanState(q=self.q, p=0.0, alpha_l=self.alpha_l, alpha_r=self.alpha_r)


class ThresholdRegime(str, enum.Enum):
    NO_REAL_ROOTS = "no_real_roots"
    STRINGENT_WINDOW = "stringent_window"
    INCLUSIVE = "inclusive"


@dataclass(frozen=True)
class ThresholdReport:
    """Existence conditions for nontrivial symmetric steady states.

    condition_i: non-negative discriminant of the biquadratic;
    condition_ii_negative_branch: the minus-branch root of q^2 is admissible
    (requires kappa < Delta_0); condition_ii_positive_branch: the plus-branch
    root is admissible; reduced_inequality: the positive-detuning reduction
    of the positive-branch condition.
    """

    condition_i: bool
    condition_ii_negative_branch: bool
    condition_ii_positive_branch: bool
    reduced_inequality: bool
    regime_label: ThresholdRegime


def steady_alpha(d: DerivedParams, q: float) -> tuple[complex, complex]:
    """Cavity amplitudes at fixed displacement q."""
    dl, dr = dynamic_detunings(d, q)
    return (
        d.eps_l / (d.kappa_l + 1j * dl),
        d.eps_r / (d.kappa_r + 1j * dr),
    )


def _pressure_terms(d: DerivedParams, q: float) -> tuple[float, float]:
    dl, dr = dynamic_detunings(d, q)
    pl = SQRT2 * d.g0_l * d.eps_l**2 / (d.kappa_l**2 + dl * dl)
    pr = SQRT2 * d.g0_r * d.eps_r**2 / (d.kappa_r**2 + dr * dr)
    return pl, pr


def _force_balance(d: DerivedParams, q: float) -> tuple[float, float]:
    """(f(q), scale) with scale = sum of term magnitudes."""
    pl, pr = _pressure_terms(d, q)
    f = d.omega_m * q + pl - pr
    scale = abs(d.omega_m * q) + pl + pr
    return f, scale


def _force_balance_deriv(d: DerivedParams, q: float) -> float:
    dl, dr = dynamic_detunings(d, q)
    # d/dq of eps^2/(kappa^2 + Delta(q)^2), with dDelta/dq = +/- sqrt2 g0
    dpl = -SQRT2 * d.g0_l * d.eps_l**2 * 2.0 * dl * (SQRT2 * d.g0_l) / (
        d.kappa_l**2 + dl * dl
    ) ** 2
    dpr = -SQRT2 * d.g0_r * d.eps_r**2 * 2.0 * dr * (-SQRT2 * d.g0_r) / (
        d.kappa_r**2 + dr * dr
    ) ** 2
    return d.omega_m + dpl - dpr


def _force_polynomial(d: DerivedParams) -> np.ndarray:
    """Ascending coefficients of f(q) * (kL^2 + DL^2)(kR^2 + DR^2)."""
    # Delta_l = delta0_l + sqrt2 g0_l q, Delta_r = delta0_r - sqrt2 g0_r q
    dl = np.array([d.delta0_l, SQRT2 * d.g0_l])
    dr = np.array([d.delta0_r, -SQRT2 * d.g0_r])
    denom_l = npoly.polyadd(np.array([d.kappa_l**2]), npoly.polymul(dl, dl))
    denom_r = npoly.polyadd(np.array([d.kappa_r**2]), npoly.polymul(dr, dr))
    spring = npoly.polymul(np.array([0.0, d.omega_m]), npoly.polymul(denom_l, denom_r))
    press_l = SQRT2 * d.g0_l * d.eps_l**2 * denom_r
    press_r = SQRT2 * d.g0_r * d.eps_r**2 * denom_l
    return npoly.polyadd(spring, npoly.polysub(press_l, press_r))


def _poly_real_roots(coeffs: np.ndarray, scale: float = 1.0) -> list[float]:
    """All real roots of a low-degree polynomial by recursive derivative
    bracketing: between consecutive stationary points the polynomial is
    monotone, so bisection on each sign change finds every simple root.

    ``scale`` nondimensionalizes the variable first; coefficients of
    different powers carry different units, so degree detection is only
    meaningful after q -> scale * x.
    """
    if scale > 0.0 and scale != 1.0:
        c = np.asarray(coeffs, dtype=float) * scale ** np.arange(len(coeffs))
        return [r * scale for r in _poly_real_roots(c)]
    c = np.asarray(coeffs, dtype=float)
    if np.max(np.abs(c)) == 0.0:
        return []
    c = np.trim_zeros(c, trim="b")
    while len(c) > 1 and abs(c[-1]) < 1e-14 * np.max(np.abs(c)):
        c = c[:-1]
    if len(c) <= 1:
        return []
    if len(c) == 2:
        return [-c[0] / c[1]]
    bound = 1.0 + np.max(np.abs(c[:-1])) / abs(c[-1])
    crit = _poly_real_roots(npoly.polyder(c))
    nodes = sorted([-bound] + [x for x in crit if -bound < x < bound] + [bound])
    roots = []
    for lo, hi in zip(nodes[:-1], nodes[1:]):
        flo, fhi = npoly.polyval(lo, c), npoly.polyval(hi, c)
        if flo == 0.0:
            roots.append(lo)
            continue
        if flo * fhi > 0:
            continue
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            fmid = npoly.polyval(mid, c)
            if fmid == 0.0 or hi - lo <= 1e-15 * max(1.0, abs(mid)):
                break
            if flo * fmid < 0:
                hi = mid
            else:
                lo, flo = mid, fmid
        roots.append(0.5 * (lo + hi))
    if nodes and npoly.polyval(nodes[-1], c) == 0.0:
        roots.append(nodes[-1])
    return sorted(set(roots))


def _polish_root(d: DerivedParams, q0: float, q_scale: float) -> float:
    """Damped Newton on the force balance down to POLISH_TOL residual."""
    q = q0
    f, scale = _force_balance(d, q)
    for _ in range(100):
        if abs(f) <= POLISH_TOL * max(scale, d.omega_m * q_scale * 1e-16):
            return q
        df = _force_balance_deriv(d, q)
        if df == 0.0:
            break
        step = -f / df
        lam = 1.0
        for _ in range(60):
            q_new = q + lam * step
            f_new, scale_new = _force_balance(d, q_new)
            if abs(f_new) < abs(f):
                q, f, scale = q_new, f_new, scale_new
                break
            lam *= 0.5
        else:
            break
    if abs(f) <= RESIDUAL_TOL * max(scale, d.omega_m * q_scale * 1e-16):
        return q
    raise RootPolishError(
        f"Newton polishing stalled at q = {q:.6g} with residual {abs(f):.3g} "
        f"(scale {scale:.3g})"
    )


def fixed_points(d: DerivedParams) -> list[SteadyState]:
    """All real steady states, ascending in q, with stability flags.

    Near-coincident roots (within 1e-8 of the displacement scale) are merged
    into a single entry with a multiplicity counter.
    """
    if d.eps_l == 0.0 and d.eps_r == 0.0:
        a = drift_matrix(d, MeanState.zero())
        return [
            SteadyState(
                q=0.0, alpha_l=0j, alpha_r=0j, stable=stability(a), residual=0.0
            )
        ]
    q_scale = sum(
        SQRT2 * g0 * eps**2 / (d.omega_m * kap**2)
        for g0, eps, kap in (
            (d.g0_l, d.eps_l, d.kappa_l),
            (d.g0_r, d.eps_r, d.kappa_r),
        )
        if eps > 0
    )
    raw = _poly_real_roots(_force_polynomial(d), scale=q_scale)
    if _force_balance(d, 0.0)[0] == 0.0:
        raw.append(0.0)
    # drop rediscoveries of the same root before polishing
    deduped: list[float] = []
    for q in sorted(raw):
        if not deduped or abs(q - deduped[-1]) > 1e-10 * max(q_scale, abs(q)):
            deduped.append(q)
    polished = sorted(_polish_root(d, q, q_scale) for q in deduped)

    merged: list[tuple[float, int]] = []
    for q in polished:
        if merged and abs(q - merged[-1][0]) <= 1e-8 * max(q_scale, abs(q)):
            merged[-1] = (merged[-1][0], merged[-1][1] + 1)
        else:
            merged.append((q, 1))

    states = []
    for q, mult in merged:
        al, ar = steady_alpha(d, q)
        f, scale = _force_balance(d, q)
        residual = abs(f) / scale if scale > 0 else 0.0
        a = drift_matrix(d, MeanState(q=q, p=0.0, alpha_l=al, alpha_r=ar))
        states.append(
            SteadyState(
                q=q,
                alpha_l=al,
                alpha_r=ar,
                stable=stability(a),
                residual=residual,
                multiplicity=mult,
            )
        )
    return states


def _require_symmetric(d: DerivedParams) -> tuple[float, float, float, float]:
    pairs = {
        "kappa": (d.kappa_l, d.kappa_r),
        "delta0": (d.delta0_l, d.delta0_r),
        "eps": (d.eps_l, d.eps_r),
        "g0": (d.g0_l, d.g0_r),
    }
    for name, (l, r) in pairs.items():
        if abs(l - r) > SYMMETRY_RTOL * max(abs(l), abs(r), 1e-300):
            raise ValueError(
                f"configuration is not symmetric: {name} differs ({l:g} vs {r:g})"
            )
    return d.kappa_l, d.delta0_l, d.eps_l, d.g0_l


def symmetric_quartic_roots(d: DerivedParams) -> list[float]:
    """Nontrivial real roots q of the symmetric biquadratic, in closed form.

    With u = sqrt(2) g0 q, the force balance off q = 0 reduces to
    u^4 + 2 (kappa^2 - Delta0^2) u^2 + (kappa^2 + Delta0^2)^2
      - 8 g0^2 eps^2 Delta0 / omega_m = 0,
    a quadratic in u^2.  Returns 0, 2 or 4 roots; the trivial q = 0 is
    reported by fixed_points, not here.
    """
    kappa, delta0, eps, g0 = _require_symmetric(d)
    if eps == 0.0 or g0 == 0.0:
        return []
    disc = 8.0 * g0**2 * eps**2 * delta0 / d.omega_m - 4.0 * kappa**2 * delta0**2
    if disc < 0.0:
        return []
    root = math.sqrt(disc)
    base = delta0**2 - kappa**2
    qs = []
    for w in {base - root, base + root}:
        if w > 0.0:
            q = math.sqrt(w) / (SQRT2 * g0)
            qs.extend([-q, q])
    return sorted(qs)


def threshold_report(d: DerivedParams) -> ThresholdReport:
    """Evaluate the symmetric-configuration existence conditions.

    Requires Delta_0 > 0 (the analysis is confined to positive detunings).
    condition_i uses the non-strict discriminant form; the reduced
    inequality implies it, including on the degenerate kappa = Delta_0
    boundary.
    """
    kappa, delta0, eps, g0 = _require_symmetric(d)
    if delta0 <= 0.0:
        raise ValueError(f"threshold analysis requires Delta_0 > 0, got {delta0:g}")
    s2 = 2.0 * (g0 * eps) ** 2  # (sqrt(2) g0 eps)^2, the eta*eps analogue
    cond_i = s2 >= d.omega_m * kappa**2 * delta0
    upper = d.omega_m * (kappa**2 + delta0**2) ** 2 / (4.0 * delta0)
    cond_ii_neg = kappa**2 < delta0**2 and s2 < upper
    cond_ii_pos = s2 >= upper
    reduced = SQRT2 * g0 * eps >= math.sqrt(d.omega_m / (4.0 * delta0)) * (
        kappa**2 + delta0**2
    )
    if reduced:
        regime = ThresholdRegime.INCLUSIVE
    elif cond_i and cond_ii_neg:
        regime = ThresholdRegime.STRINGENT_WINDOW
    else:
        regime = ThresholdRegime.NO_REAL_ROOTS
    return ThresholdReport(
        condition_i=cond_i,
        condition_ii_negative_branch=cond_ii_neg,
        condition_ii_positive_branch=cond_ii_pos,
        reduced_inequality=reduced,
        regime_label=regime,
    )


def characteristic_polynomial(a: np.ndarray) -> np.ndarray:
    """Coefficients of det(sI - A), descending, via the Leverrier-Faddeev
    recursion (no eigensolver)."""
    a = np.asarray(a, dtype=float)
    n = a.shape[0]
    coeffs = np.empty(n + 1)
    coeffs[0] = 1.0
    m = np.array(a)
    for k in range(1, n + 1):
        c = -np.trace(m) / k
        coeffs[k] = c
        if k < n:
            m = a @ (m + c * np.eye(n))
    return coeffs


def stability_report(a: np.ndarray) -> tuple[bool, bool]:
    """(stable, marginal) by the Routh-Hurwitz first-column test.

    marginal = a pivot fell below 1e-12 of the polynomial scale, so the sign
    test is indeterminate; such matrices are reported not stable.
    """
    coeffs = characteristic_polynomial(a)
    n = len(coeffs) - 1
    if not np.all(np.isfinite(coeffs)):
        raise ValueError("drift matrix has non-finite entries")
    # rescale s -> lam * s so the table entries are O(1); otherwise the pivot
    # tolerance is meaningless for rates far from unity
    mags = [abs(coeffs[k]) ** (1.0 / k) for k in range(1, n + 1) if coeffs[k] != 0.0]
    lam = max(mags) if mags else 1.0
    if lam > 0.0:
        coeffs = coeffs / lam ** np.arange(n + 1)
    scale = np.max(np.abs(coeffs))
    if scale == 0.0:
        return False, True
    width = n // 2 + 1
    rows = np.zeros((n + 1, width + 1))
    rows[0, : len(coeffs[0::2])] = coeffs[0::2]
    rows[1, : len(coeffs[1::2])] = coeffs[1::2]
    for i in range(2, n + 1):
        pivot = rows[i - 1, 0]
        if abs(pivot) < ROUTH_PIVOT_TOL * scale:
            return False, True
        for j in range(width):
            rows[i, j] = (
                pivot * rows[i - 2, j + 1] - rows[i - 2, 0] * rows[i - 1, j + 1]
            ) / pivot
    first_col = rows[: n + 1, 0]
    if np.min(np.abs(first_col)) < ROUTH_PIVOT_TOL * scale:
        return False, True
    return bool(np.all(first_col > 0.0)), False


def stability(a: np.ndarray) -> bool:
    """True iff every eigenvalue of A has strictly negative real part;
    marginal (indeterminate) cases count as not stable."""
    stable, marginal = stability_report(a)
    return stable and not marginal
