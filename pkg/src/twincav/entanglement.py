"""Pairwise Gaussian entanglement from covariance matrices.

For each of the three component pairs (mechanics-left, mechanics-right,
left-right) the 4x4 submatrix of the full covariance is reduced to the
smaller symplectic eigenvalue of its partial transpose; logarithmic
negativity follows as E_N = max(0, -ln(2 v_minus)) in the
vacuum-variance-1/2 convention, so a pair is entangled iff v_minus < 1/2.

The transfer analysis (onset delay, saturation, death/revival) works on the
one-mechanical-period running maximum of E_N, which smooths out the
intercavity oscillations the raw series carries.
"""

from __future__ import annotations

import bisect
import enum
import math
from collections import deque
from dataclasses import dataclass

import numpy as np

from .dynamics import TrajectorySample

__all__ = [
    "NonPhysicalCovariance",
    "Pair",
    "Pattern",
    "NegativitySeries",
    "TransferReport",
    "rolling_max",
    "submatrix",
    "symplectic_eigenvalues_pt",
    "log_negativity",
    "negativity_series",
    "transfer_report",
]

#: tolerance for clamping slightly-negative discriminants / brackets
PT_CLAMP_TOL = 1e-10

#: default onset threshold on E_N and hold requirement (mechanical periods)
DEFAULT_EPS_ON = 1e-4
DEFAULT_HOLD_PERIODS = 10


class NonPhysicalCovariance(ValueError):
    """Submatrix is not the covariance of any physical Gaussian state."""


class Pair(enum.Enum):
    """Bipartitions of the tripartite system (1-based row/col selections
    {1,2,3,4}, {1,2,5,6} and {3,4,5,6} of the 6x6 covariance)."""

    ML = (0, 1, 2, 3)
    MR = (0, 1, 4, 5)
    LR = (2, 3, 4, 5)

    @property
    def indices(self) -> tuple[int, ...]:
        return self.value


class Pattern(str, enum.Enum):
    NEVER_ENTANGLED = "never_entangled"
    SATURATING = "saturating"
    DEATH_REVIVAL = "death_revival"


def submatrix(v: np.ndarray, pair: Pair) -> np.ndarray:
    """4x4 covariance of one bipartition (rows/cols of the selected modes)."""
    v = np.asarray(v, dtype=float)
    idx = np.asarray(pair.indices)
    return v[np.ix_(idx, idx)]


def symplectic_eigenvalues_pt(vs: np.ndarray) -> tuple[float, float]:
    """Symplectic spectrum (v_minus, v_plus) of the partially transposed
    two-mode covariance.

    Uses the closed form v_mp^2 = (S -/+ sqrt(S^2 - 4 det Vs))/2 with
    S = det V_a + det V_b - 2 det V_ab.  Raises NonPhysicalCovariance when
    the discriminant or the v_minus bracket is negative beyond round-off
    (values within PT_CLAMP_TOL of zero are clamped).
    """
    vs = np.asarray(vs, dtype=float)
    if vs.shape != (4, 4):
        raise ValueError(f"expected a 4x4 matrix, got shape {vs.shape}")
    det_a = float(np.linalg.det(vs[:2, :2]))
    det_b = float(np.linalg.det(vs[2:, 2:]))
    det_ab = float(np.linalg.det(vs[:2, 2:]))
    det_vs = float(np.linalg.det(vs))
    sigma = det_a + det_b - 2.0 * det_ab

    scale = max(sigma * sigma, abs(4.0 * det_vs), 1e-300)
    disc = sigma * sigma - 4.0 * det_vs
    if disc < -PT_CLAMP_TOL * scale:
        raise NonPhysicalCovariance(
            f"negative discriminant {disc:g} (sigma={sigma:g}, det={det_vs:g})"
        )
    root = math.sqrt(max(disc, 0.0))
    lo = 0.5 * (sigma - root)
    hi = 0.5 * (sigma + root)
    if lo < -PT_CLAMP_TOL * max(abs(sigma), 1e-300):
        raise NonPhysicalCovariance(f"negative v_minus bracket {lo:g}")
    return math.sqrt(max(lo, 0.0)), math.sqrt(max(hi, 0.0))


def log_negativity(v_minus: float) -> float:
    """E_N = max(0, -ln(2 v_minus)); entangled iff v_minus < 1/2."""
    if not v_minus > 0:
        raise ValueError(f"v_minus must be positive, got {v_minus}")
    return max(0.0, -math.log(2.0 * v_minus))


@dataclass(frozen=True)
class NegativitySeries:
    """Time series of v_minus and E_N for one pair.

    Samples whose covariance was non-physical beyond round-off are reported
    as separable (v_minus = 1/2, E_N = 0) and marked in ``flagged``.
    """

    pair: Pair
    times: np.ndarray
    v_minus: np.ndarray
    e_n: np.ndarray
    flagged: np.ndarray

    def __len__(self) -> int:
        return len(self.times)


def negativity_series(samples: list[TrajectorySample], pair: Pair) -> NegativitySeries:
    """Map the symplectic-eigenvalue pipeline over a sampled trajectory."""
    if not samples:
        raise ValueError("empty trajectory")
    n = len(samples)
    times = np.empty(n)
    v_minus = np.empty(n)
    e_n = np.empty(n)
    flagged = np.zeros(n, dtype=bool)
    bad = 0
    for i, s in enumerate(samples):
        times[i] = s.t
        try:
            vm, _ = symplectic_eigenvalues_pt(submatrix(s.cov, pair))
            if vm <= 0.0:
                raise NonPhysicalCovariance("v_minus collapsed to zero")
            v_minus[i] = vm
            e_n[i] = log_negativity(vm)
        except NonPhysicalCovariance:
            v_minus[i] = 0.5
            e_n[i] = 0.0
            flagged[i] = True
            bad += 1
    if bad == n:
        raise NonPhysicalCovariance(
            f"every sample of pair {pair.name} had a non-physical covariance"
        )
    return NegativitySeries(pair=pair, times=times, v_minus=v_minus, e_n=e_n, flagged=flagged)


@dataclass(frozen=True)
class TransferReport:
    """Onset / saturation / death-revival classification of one pair."""

    pair: Pair
    onset_time: float | None
    saturation_value: float | None
    pattern: Pattern
    zero_interval_count: int
    insufficient_horizon: bool = False


def rolling_max(values: np.ndarray, times: np.ndarray, window: float) -> np.ndarray:
    """env[i] = max of values over t in [times[i], times[i] + window]."""
    n = len(values)
    env = np.empty(n)
    j_hi = 0
    # monotone deque over indices of a sliding forward window
    dq: deque[int] = deque()
    for i in range(n):
        t_hi = times[i] + window
        while j_hi < n and times[j_hi] <= t_hi:
            while dq and values[dq[-1]] <= values[j_hi]:
                dq.pop()
            dq.append(j_hi)
            j_hi += 1
        while dq and dq[0] < i:
            dq.popleft()
        env[i] = values[dq[0]] if dq else values[i]
    return env


def transfer_report(
    series: NegativitySeries,
    omega_m: float,
    eps_on: float = DEFAULT_EPS_ON,
    hold_window: float | None = None,
) -> TransferReport:
    """Classify one negativity series.

    onset_time is the first raw crossing of eps_on whose one-period envelope
    then stays above eps_on for hold_window.  After onset, a saturating
    series is one whose envelope never drops back to <= eps_on; any full
    envelope return to <= eps_on counts as a death interval (revived or
    not), giving the death_revival pattern.
    """
    if not eps_on > 0:
        raise ValueError(f"eps_on must be positive, got {eps_on}")
    period = 2.0 * math.pi / omega_m
    if hold_window is None:
        hold_window = DEFAULT_HOLD_PERIODS * period
    if not hold_window > 0:
        raise ValueError(f"hold_window must be positive, got {hold_window}")

    t = series.times
    en = series.e_n
    env = rolling_max(en, t, period)
    # drop the trailing stretch whose forward window is only partially
    # covered; its envelope would dip spuriously at oscillation nulls
    full = t <= t[-1] - period
    if full.sum() >= 2:
        t, en, env = t[full], en[full], env[full]
    t_last = t[-1]

    onset = None
    insufficient = False
    i = 0
    n = len(t)
    while i < n:
        if en[i] > eps_on:
            if t[i] + hold_window > t_last:
                insufficient = True
                break
            j_end = bisect.bisect_right(t, t[i] + hold_window)
            held = np.all(env[i:j_end] > eps_on)
            if held:
                onset = float(t[i])
                onset_idx = i
                break
            # skip past the first envelope failure inside the window
            fail = i + int(np.argmax(env[i:j_end] <= eps_on))
            i = fail + 1
            while i < n and env[i] <= eps_on:
                i += 1
        else:
            i += 1

    if onset is None:
        return TransferReport(
            pair=series.pair,
            onset_time=None,
            saturation_value=None,
            pattern=Pattern.NEVER_ENTANGLED,
            zero_interval_count=0,
            insufficient_horizon=insufficient,
        )

    # death intervals: maximal runs of envelope <= eps_on after onset, each
    # spanning at least one full mechanical period
    below = env[onset_idx:] <= eps_on
    t_after = t[onset_idx:]
    zero_intervals = 0
    run_start = None
    for k in range(len(below)):
        if below[k] and run_start is None:
            run_start = t_after[k]
        elif not below[k] and run_start is not None:
            if t_after[k] - run_start >= period:
                zero_intervals += 1
            run_start = None
    if run_start is not None and t_after[-1] - run_start >= period:
        zero_intervals += 1

    if zero_intervals == 0:
        tail = t_after >= t_after[0] + 0.9 * (t_after[-1] - t_after[0])
        saturation = float(np.mean(env[onset_idx:][tail]))
        return TransferReport(
            pair=series.pair,
            onset_time=onset,
            saturation_value=saturation,
            pattern=Pattern.SATURATING,
            zero_interval_count=0,
        )
    return TransferReport(
        pair=series.pair,
        onset_time=onset,
        saturation_value=None,
        pattern=Pattern.DEATH_REVIVAL,
        zero_interval_count=zero_intervals,
    )
