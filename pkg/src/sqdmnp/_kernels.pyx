# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled backend: right-hand side and Dormand-Prince 5(4) driver.

Same algorithm and parameter layout as ``_pykernels``; the whole time loop
runs without the GIL.
"""

import numpy as np

from libc.math cimport exp, fabs, sqrt, pow, nextafter, INFINITY

ctypedef double complex cplx

NAME = "compiled"

cdef double Cc[6]
cdef double Ac[6][5]
cdef double Bc[6]
cdef double Ec[7]
cdef double Pc[7][4]

Cc[:] = [0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0]
Ac[0][:] = [0.0, 0.0, 0.0, 0.0, 0.0]
Ac[1][:] = [1.0 / 5, 0.0, 0.0, 0.0, 0.0]
Ac[2][:] = [3.0 / 40, 9.0 / 40, 0.0, 0.0, 0.0]
Ac[3][:] = [44.0 / 45, -56.0 / 15, 32.0 / 9, 0.0, 0.0]
Ac[4][:] = [19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729, 0.0]
Ac[5][:] = [9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656]
Bc[:] = [35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84]
Ec[:] = [-71.0 / 57600, 0.0, 71.0 / 16695, -71.0 / 1920, 17253.0 / 339200, -22.0 / 525, 1.0 / 40]
Pc[0][:] = [1.0, -8048581381.0 / 2820520608, 8663915743.0 / 2820520608, -12715105075.0 / 11282082432]
Pc[1][:] = [0.0, 0.0, 0.0, 0.0]
Pc[2][:] = [0.0, 131558114200.0 / 32700410799, -68118460800.0 / 10900136933, 87487479700.0 / 32700410799]
Pc[3][:] = [0.0, -1754552775.0 / 470086768, 14199869525.0 / 1410260304, -10690763975.0 / 1880347072]
Pc[4][:] = [0.0, 127303824393.0 / 49829197408, -318862633887.0 / 49829197408, 701980252875.0 / 199316789632]
Pc[5][:] = [0.0, -282668133.0 / 205662961, 2019193451.0 / 616988883, -1453857185.0 / 822651844]
Pc[6][:] = [0.0, 40617522.0 / 29380423, -110615467.0 / 29380423, 69997945.0 / 29380423]

cdef double SAFETY = 0.9
cdef double MIN_FACTOR = 0.2
cdef double MAX_FACTOR = 10.0
cdef Py_ssize_t NPAR = 22


cdef inline double _envelope(double t, const double* p) noexcept nogil:
    cdef double x, e
    if t >= p[21]:
        return 0.0
    if p[18] == 0.0:
        return 1.0
    x = fabs((t - p[19]) / p[20])
    e = exp(-x)
    return 2.0 * e / (1.0 + e * e)


cdef void _rhs(const cplx* r, double t, const double* p, cplx* out) noexcept nogil:
    cdef cplx H[16]
    cdef cplx H1, H2, H1c, H2c, p1, p2, acc
    cdef double f = _envelope(t, p)
    cdef double damp, sz_i, sz_j
    cdef int i, j, k, bi, bj, li, lj

    p1 = r[1] + r[11]
    p2 = r[2] + r[7]
    H1 = (p[9] + 1j * p[10]) * f + (p[3] + 1j * p[4]) * p1 + (p[7] + 1j * p[8]) * p2
    H2 = (p[11] + 1j * p[12]) * f + (p[5] + 1j * p[6]) * p2 + (p[7] + 1j * p[8]) * p1
    H1c = H1.conjugate()
    H2c = H2.conjugate()

    H[0] = 0.0;  H[1] = -H1;   H[2] = -H2;   H[3] = 0.0
    H[4] = -H1c; H[5] = p[0];  H[6] = p[13]; H[7] = -H2
    H[8] = -H2c; H[9] = p[13]; H[10] = p[1]; H[11] = -H1
    H[12] = 0.0; H[13] = -H2c; H[14] = -H1c; H[15] = p[2]

    for i in range(4):
        bi = i // 2
        li = i % 2
        sz_i = 1.0 if li == 0 else -1.0
        for j in range(4):
            bj = j // 2
            lj = j % 2
            acc = 0.0
            for k in range(4):
                acc = acc + (r[i * 4 + k] * H[k * 4 + j] - H[i * 4 + k] * r[k * 4 + j])
            acc = 1j * acc
            damp = 0.0
            if li != lj:
                damp = damp + p[14]
            if bi != bj:
                damp = damp + p[15]
            acc = acc - damp * r[i * 4 + j]
            # exciton decay of the first factor (1/tau2) and of the second (1/tau1)
            if bi == bj:
                acc = acc + p[17] * (1.0 if bi == 0 else -1.0) * r[(2 + li) * 4 + 2 + lj]
            if li == lj:
                acc = acc + p[16] * sz_i * r[(2 * bi + 1) * 4 + 2 * bj + 1]
            out[i * 4 + j] = acc


cdef inline double _norm(const cplx* x, const double* scale) noexcept nogil:
    cdef double s = 0.0, a, b
    cdef int i
    for i in range(16):
        a = x[i].real / scale[i]
        b = x[i].imag / scale[i]
        s += a * a + b * b
    return sqrt(s / 16.0)


cdef inline double _cabs(cplx z) noexcept nogil:
    return sqrt(z.real * z.real + z.imag * z.imag)


def rhs(y, double t, p):
    """Flattened ``d rho/dt`` for a flattened 4x4 ``rho``."""
    cdef cplx[::1] yv = np.ascontiguousarray(y, dtype=complex)
    cdef double[::1] pv = np.ascontiguousarray(p, dtype=np.float64)
    out = np.empty(16, dtype=complex)
    cdef cplx[::1] ov = out
    if yv.shape[0] != 16 or pv.shape[0] != NPAR:
        raise ValueError("expected 16 state entries and %d parameters" % NPAR)
    _rhs(&yv[0], t, &pv[0], &ov[0])
    return out


cdef double _initial_step(const cplx* y0, const cplx* f0, double t0, const double* p,
                          double rtol, double atol, double span) noexcept nogil:
    cdef double scale[16]
    cdef cplx y1[16]
    cdef cplx f1[16]
    cdef cplx df[16]
    cdef double d0, d1, d2, h0, h1
    cdef int i
    for i in range(16):
        scale[i] = atol + _cabs(y0[i]) * rtol
    d0 = _norm(y0, scale)
    d1 = _norm(f0, scale)
    if d0 < 1e-5 or d1 < 1e-5:
        h0 = 1e-6
    else:
        h0 = 0.01 * d0 / d1
    if h0 > span:
        h0 = span
    for i in range(16):
        y1[i] = y0[i] + h0 * f0[i]
    _rhs(y1, t0 + h0, p, f1)
    for i in range(16):
        df[i] = f1[i] - f0[i]
    d2 = _norm(df, scale) / h0
    if d1 <= 1e-15 and d2 <= 1e-15:
        h1 = h0 * 1e-3
        if h1 < 1e-6:
            h1 = 1e-6
    else:
        h1 = pow(0.01 / (d1 if d1 > d2 else d2), 0.2)
    if 100 * h0 < h1:
        h1 = 100 * h0
    if span < h1:
        h1 = span
    return h1


cdef int _drive(cplx* y, const double* p, const double* times, Py_ssize_t n_out,
                double rtol, double atol, long max_steps, cplx* out,
                Py_ssize_t* k_done, long* steps, long* rejects, double* t_last) noexcept nogil:
    cdef cplx K[7][16]
    cdef cplx ytmp[16]
    cdef cplx ynew[16]
    cdef cplx errv[16]
    cdef cplx Q[16][4]
    cdef double scale[16]
    cdef double t = times[0], t_end = times[n_out - 1], t_new
    cdef double h, h_min, err, factor, x, a, b, pw[4]
    cdef bint rejected
    cdef Py_ssize_t k_out = 1
    cdef long n_steps = 0, n_rejected = 0
    cdef int i, s, m, status = 0

    for i in range(16):
        out[i] = y[i]
    _rhs(y, t, p, K[0])
    h = _initial_step(y, K[0], t, p, rtol, atol, t_end - t)

    while k_out < n_out:
        if n_steps >= max_steps:
            status = 2
            break
        h_min = 10.0 * fabs(nextafter(t, INFINITY) - t)
        rejected = False
        while True:
            if h < h_min:
                status = 1
                break
            if h > t_end - t:
                h = t_end - t
            for s in range(1, 6):
                for i in range(16):
                    ytmp[i] = y[i]
                    for m in range(s):
                        ytmp[i] = ytmp[i] + h * Ac[s][m] * K[m][i]
                _rhs(ytmp, t + Cc[s] * h, p, K[s])
            for i in range(16):
                ynew[i] = y[i]
                for m in range(6):
                    ynew[i] = ynew[i] + h * Bc[m] * K[m][i]
            _rhs(ynew, t + h, p, K[6])
            for i in range(16):
                a = _cabs(y[i])
                b = _cabs(ynew[i])
                scale[i] = atol + (a if a > b else b) * rtol
                errv[i] = 0.0
                for m in range(7):
                    errv[i] = errv[i] + Ec[m] * K[m][i]
                errv[i] = h * errv[i]
            err = _norm(errv, scale)
            if err < 1.0:
                if err == 0.0:
                    factor = MAX_FACTOR
                else:
                    factor = SAFETY * pow(err, -0.2)
                    if factor > MAX_FACTOR:
                        factor = MAX_FACTOR
                if rejected and factor > 1.0:
                    factor = 1.0
                break
            factor = SAFETY * pow(err, -0.2)
            if factor < MIN_FACTOR:
                factor = MIN_FACTOR
            h = h * factor
            rejected = True
            n_rejected += 1
        if status != 0:
            break

        t_new = t + h if t_end - t > h else t_end
        if times[k_out] <= t_new:
            for i in range(16):
                for m in range(4):
                    Q[i][m] = 0.0
                    for s in range(7):
                        Q[i][m] = Q[i][m] + K[s][i] * Pc[s][m]
            while k_out < n_out and times[k_out] <= t_new:
                x = (times[k_out] - t) / h
                pw[0] = x
                pw[1] = x * x
                pw[2] = x * x * x
                pw[3] = x * x * x * x
                for i in range(16):
                    ytmp[i] = Q[i][0] * pw[0] + Q[i][1] * pw[1] + Q[i][2] * pw[2] + Q[i][3] * pw[3]
                    out[k_out * 16 + i] = y[i] + h * ytmp[i]
                k_out += 1
        for i in range(16):
            y[i] = ynew[i]
            K[0][i] = K[6][i]
        t = t_new
        n_steps += 1
        h = h * factor

    k_done[0] = k_out
    steps[0] = n_steps
    rejects[0] = n_rejected
    t_last[0] = t
    return status


def integrate(y0, p, times, double rtol, double atol, long max_steps):
    """Adaptive integration sampled at ``times`` (``times[0]`` is the start).

    Returns ``(status, samples, n_steps, n_rejected, t_fail, y_fail)``;
    status 0 = ok, 1 = step underflow, 2 = step budget exhausted.
    """
    y = np.array(y0, dtype=complex).reshape(16).copy()
    cdef cplx[::1] yv = y
    cdef double[::1] pv = np.ascontiguousarray(p, dtype=np.float64)
    cdef double[::1] tv = np.ascontiguousarray(times, dtype=np.float64)
    cdef Py_ssize_t n_out = tv.shape[0]
    if pv.shape[0] != NPAR:
        raise ValueError("expected %d parameters" % NPAR)
    if n_out < 1:
        raise ValueError("need at least one sample time")
    out = np.empty((n_out, 16), dtype=complex)
    cdef cplx[:, ::1] ov = out
    cdef Py_ssize_t k_done = 1
    cdef long steps = 0, rejects = 0
    cdef double t_last = tv[0]
    cdef int status = 0
    if n_out == 1:
        ov[0, :] = yv
        return 0, out, 0, 0, t_last, y
    with nogil:
        status = _drive(&yv[0], &pv[0], &tv[0], n_out, rtol, atol, max_steps,
                        &ov[0, 0], &k_done, &steps, &rejects, &t_last)
    return status, out[:k_done], steps, rejects, t_last, y
