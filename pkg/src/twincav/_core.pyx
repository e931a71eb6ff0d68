# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled integration kernels.

Fixed-step RK4 over the stacked state (6 mean components + 21 packed
covariance entries).  The NumPy fallback in ``_core_py`` implements the same
interface; ``_backend`` picks whichever is importable.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport isfinite

cnp.import_array()

cdef double SQ2 = 1.4142135623730951

# start offset of packed upper-triangle row i (row-major, 6x6)
cdef int ROW_OFF[6]
ROW_OFF[0] = 0; ROW_OFF[1] = 6; ROW_OFF[2] = 11
ROW_OFF[3] = 15; ROW_OFF[4] = 18; ROW_OFF[5] = 20


cdef inline void _expand_sym(const double* v, double* full) noexcept nogil:
    cdef int i, j, k = 0
    for i in range(6):
        for j in range(i, 6):
            full[6 * i + j] = v[k]
            full[6 * j + i] = v[k]
            k += 1


cdef inline void _drift(const double* pp, const double* y, double* a) noexcept nogil:
    """Fill the 6x6 drift matrix (row-major) at the mean state y[0:6]."""
    cdef double om = pp[0], gm = pp[1], kl = pp[2], kr = pp[3]
    cdef double g0l = pp[4], g0r = pp[5], d0l = pp[8], d0r = pp[9]
    cdef double q = y[0]
    cdef double dl = d0l + SQ2 * g0l * q
    cdef double dr = d0r - SQ2 * g0r * q
    cdef double glx = 2.0 * g0l * y[2], gly = 2.0 * g0l * y[3]
    cdef double grx = 2.0 * g0r * y[4], gry = 2.0 * g0r * y[5]
    cdef int i
    for i in range(36):
        a[i] = 0.0
    a[1] = om
    a[6] = -om; a[7] = -gm; a[8] = -glx; a[9] = -gly; a[10] = grx; a[11] = gry
    a[12] = gly; a[14] = -kl; a[15] = dl
    a[18] = -glx; a[20] = -dl; a[21] = -kl
    a[24] = -gry; a[28] = -kr; a[29] = dr
    a[30] = grx; a[34] = -dr; a[35] = -kr


cdef inline void _rhs(const double* pp, const double* y, double* dy) noexcept nogil:
    """Time derivative of the stacked state: mean field + Lyapunov equation."""
    cdef double om = pp[0], gm = pp[1], kl = pp[2], kr = pp[3]
    cdef double g0l = pp[4], g0r = pp[5], el = pp[6], er = pp[7]
    cdef double d0l = pp[8], d0r = pp[9], nb = pp[10]
    cdef double q = y[0], p = y[1]
    cdef double xl = y[2], yl = y[3], xr = y[4], yr = y[5]
    cdef double dl = d0l + SQ2 * g0l * q
    cdef double dr = d0r - SQ2 * g0r * q

    dy[0] = om * p
    dy[1] = (-om * q - gm * p
             - SQ2 * g0l * (xl * xl + yl * yl)
             + SQ2 * g0r * (xr * xr + yr * yr))
    dy[2] = -kl * xl + dl * yl + el
    dy[3] = -kl * yl - dl * xl
    dy[4] = -kr * xr + dr * yr + er
    dy[5] = -kr * yr - dr * xr

    cdef double a[36]
    cdef double v[36]
    cdef double m[36]
    cdef double ddiag[6]
    cdef double s
    cdef int i, j, k, n

    _drift(pp, y, a)
    _expand_sym(y + 6, v)
    for i in range(6):
        for j in range(6):
            s = 0.0
            for k in range(6):
                s += a[6 * i + k] * v[6 * k + j]
            m[6 * i + j] = s
    ddiag[0] = 0.0
    ddiag[1] = gm * (2.0 * nb + 1.0)
    ddiag[2] = kl; ddiag[3] = kl; ddiag[4] = kr; ddiag[5] = kr
    n = 6
    for i in range(6):
        for j in range(i, 6):
            s = m[6 * i + j] + m[6 * j + i]
            if i == j:
                s += ddiag[i]
            dy[n] = s
            n += 1


cdef inline void _rk4_step(const double* pp, double* y, double dt,
                           double* k1, double* k2, double* k3, double* k4,
                           double* tmp) noexcept nogil:
    cdef int i
    cdef double half = 0.5 * dt, sixth = dt / 6.0
    _rhs(pp, y, k1)
    for i in range(27):
        tmp[i] = y[i] + half * k1[i]
    _rhs(pp, tmp, k2)
    for i in range(27):
        tmp[i] = y[i] + half * k2[i]
    _rhs(pp, tmp, k3)
    for i in range(27):
        tmp[i] = y[i] + dt * k3[i]
    _rhs(pp, tmp, k4)
    for i in range(27):
        y[i] = y[i] + sixth * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i])


def run_trajectory(double[::1] params, double[::1] y0, double dt,
                   long n_steps, long sample_every, double guard):
    """Integrate the stacked mean+covariance state for n_steps of size dt.

    Records step 0, every ``sample_every``-th step and the final step.
    Returns (times, states, fail_step); fail_step is -1 on success, else the
    first step at which the state left the finite/guard region (recorded
    samples up to the previous step are returned).
    """
    if params.shape[0] != 11 or y0.shape[0] != 27:
        raise ValueError("bad kernel input shapes")
    cdef long max_samples = n_steps // sample_every + 2
    times_arr = np.empty(max_samples, dtype=np.float64)
    states_arr = np.empty((max_samples, 27), dtype=np.float64)
    cdef double[::1] times = times_arr
    cdef double[:, ::1] states = states_arr
    cdef double y[27]
    cdef double k1[27], k2[27], k3[27], k4[27], tmp[27]
    cdef double v
    cdef long i, step, ns = 0, fail = -1
    cdef const double* pp = &params[0]
    cdef bint bad

    for i in range(27):
        y[i] = y0[i]
    times[0] = 0.0
    for i in range(27):
        states[0, i] = y[i]
    ns = 1

    with nogil:
        for step in range(1, n_steps + 1):
            _rk4_step(pp, y, dt, k1, k2, k3, k4, tmp)
            bad = False
            for i in range(27):
                v = y[i]
                if not isfinite(v) or v > guard or v < -guard:
                    bad = True
                    break
            if bad:
                fail = step
                break
            if step % sample_every == 0 or step == n_steps:
                times[ns] = step * dt
                for i in range(27):
                    states[ns, i] = y[i]
                ns += 1

    return times_arr[:ns].copy(), states_arr[:ns].copy(), fail


def run_constant_cov(double[:, ::1] a, double[::1] ddiag, double[::1] v0,
                     double dt, long n_steps):
    """RK4 for dV/dt = A V + V A^T + D with fixed A; packed 21-entry state."""
    if a.shape[0] != 6 or a.shape[1] != 6 or ddiag.shape[0] != 6 or v0.shape[0] != 21:
        raise ValueError("bad kernel input shapes")
    cdef double af[36]
    cdef double y[21], k1[21], k2[21], k3[21], k4[21], tmp[21]
    cdef double vfull[36], m[36]
    cdef int i, j, k, n
    cdef long step
    cdef double s, half = 0.5 * dt, sixth = dt / 6.0

    for i in range(6):
        for j in range(6):
            af[6 * i + j] = a[i, j]
    for i in range(21):
        y[i] = v0[i]

    with nogil:
        for step in range(n_steps):
            _cov_rhs(af, &ddiag[0], y, k1, vfull, m)
            for i in range(21):
                tmp[i] = y[i] + half * k1[i]
            _cov_rhs(af, &ddiag[0], tmp, k2, vfull, m)
            for i in range(21):
                tmp[i] = y[i] + half * k2[i]
            _cov_rhs(af, &ddiag[0], tmp, k3, vfull, m)
            for i in range(21):
                tmp[i] = y[i] + dt * k3[i]
            _cov_rhs(af, &ddiag[0], tmp, k4, vfull, m)
            for i in range(21):
                y[i] = y[i] + sixth * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i])

    out = np.empty(21, dtype=np.float64)
    for i in range(21):
        out[i] = y[i]
        if not isfinite(y[i]):
            raise FloatingPointError("constant-A covariance integration diverged")
    return out


cdef inline void _cov_rhs(const double* a, const double* ddiag, const double* v21,
                          double* dv, double* vfull, double* m) noexcept nogil:
    cdef int i, j, k, n
    cdef double s
    _expand_sym(v21, vfull)
    for i in range(6):
        for j in range(6):
            s = 0.0
            for k in range(6):
                s += a[6 * i + k] * vfull[6 * k + j]
            m[6 * i + j] = s
    n = 0
    for i in range(6):
        for j in range(i, 6):
            s = m[6 * i + j] + m[6 * j + i]
            if i == j:
                s += ddiag[i]
            dv[n] = s
            n += 1
