"""Pure-NumPy fallback for the compiled integration kernels.

Same call surface as ``_core``; used automatically when the extension is not
built (and forced by ``TWINCAV_PURE_PYTHON=1``).  Numerically equivalent but
roughly two orders of magnitude slower, which only matters for long runs.
"""

import numpy as np

SQ2 = np.sqrt(2.0)

_IU, _JU = np.triu_indices(6)


def _expand_sym(v21):
    full = np.zeros((6, 6))
    full[_IU, _JU] = v21
    full[_JU, _IU] = v21
    return full


def _pack_sym(full):
    return full[_IU, _JU]


def _drift(pp, y):
    om, gm, kl, kr, g0l, g0r, _, _, d0l, d0r, _ = pp
    q = y[0]
    dl = d0l + SQ2 * g0l * q
    dr = d0r - SQ2 * g0r * q
    glx, gly = 2.0 * g0l * y[2], 2.0 * g0l * y[3]
    grx, gry = 2.0 * g0r * y[4], 2.0 * g0r * y[5]
    a = np.zeros((6, 6))
    a[0, 1] = om
    a[1] = (-om, -gm, -glx, -gly, grx, gry)
    a[2, 0] = gly
    a[2, 2] = -kl
    a[2, 3] = dl
    a[3, 0] = -glx
    a[3, 2] = -dl
    a[3, 3] = -kl
    a[4, 0] = -gry
    a[4, 4] = -kr
    a[4, 5] = dr
    a[5, 0] = grx
    a[5, 4] = -dr
    a[5, 5] = -kr
    return a


def _rhs(pp, ddiag, y):
    om, gm, kl, kr, g0l, g0r, el, er, d0l, d0r, _ = pp
    q, p, xl, yl, xr, yr = y[:6]
    dl = d0l + SQ2 * g0l * q
    dr = d0r - SQ2 * g0r * q
    dy = np.empty(27)
    dy[0] = om * p
    dy[1] = (-om * q - gm * p
             - SQ2 * g0l * (xl * xl + yl * yl)
             + SQ2 * g0r * (xr * xr + yr * yr))
    dy[2] = -kl * xl + dl * yl + el
    dy[3] = -kl * yl - dl * xl
    dy[4] = -kr * xr + dr * yr + er
    dy[5] = -kr * yr - dr * xr
    a = _drift(pp, y)
    m = a @ _expand_sym(y[6:])
    m += m.T
    m[np.diag_indices(6)] += ddiag
    dy[6:] = _pack_sym(m)
    return dy


def _diffusion_diag(pp):
    _, gm, kl, kr, _, _, _, _, _, _, nb = pp
    return np.array([0.0, gm * (2.0 * nb + 1.0), kl, kl, kr, kr])


def run_trajectory(params, y0, dt, n_steps, sample_every, guard):
    """See ``_core.run_trajectory``."""
    pp = np.asarray(params, dtype=float)
    y = np.array(y0, dtype=float)
    if pp.shape != (11,) or y.shape != (27,):
        raise ValueError("bad kernel input shapes")
    ddiag = _diffusion_diag(pp)
    max_samples = int(n_steps) // int(sample_every) + 2
    times = np.empty(max_samples)
    states = np.empty((max_samples, 27))
    times[0] = 0.0
    states[0] = y
    ns = 1
    fail = -1
    for step in range(1, int(n_steps) + 1):
        k1 = _rhs(pp, ddiag, y)
        k2 = _rhs(pp, ddiag, y + 0.5 * dt * k1)
        k3 = _rhs(pp, ddiag, y + 0.5 * dt * k2)
        k4 = _rhs(pp, ddiag, y + dt * k3)
        y = y + (dt / 6.0) * (k1 + 2.0 * (k2 + k3) + k4)
        if not np.all(np.isfinite(y)) or np.max(np.abs(y)) > guard:
            fail = step
            break
        if step % sample_every == 0 or step == n_steps:
            times[ns] = step * dt
            states[ns] = y
            ns += 1
    return times[:ns].copy(), states[:ns].copy(), fail


def run_constant_cov(a, ddiag, v0, dt, n_steps):
    """See ``_core.run_constant_cov``."""
    a = np.asarray(a, dtype=float)
    ddiag = np.asarray(ddiag, dtype=float)
    y = np.array(v0, dtype=float)
    if a.shape != (6, 6) or ddiag.shape != (6,) or y.shape != (21,):
        raise ValueError("bad kernel input shapes")

    def rhs(v21):
        m = a @ _expand_sym(v21)
        m += m.T
        m[np.diag_indices(6)] += ddiag
        return _pack_sym(m)

    for _ in range(int(n_steps)):
        k1 = rhs(y)
        k2 = rhs(y + 0.5 * dt * k1)
        k3 = rhs(y + 0.5 * dt * k2)
        k4 = rhs(y + dt * k3)
        y = y + (dt / 6.0) * (k1 + 2.0 * (k2 + k3) + k4)
    if not np.all(np.isfinite(y)):
        raise FloatingPointError("constant-A covariance integration diverged")
    return y
