"""Pure-Python backend: right-hand side and Dormand-Prince 5(4) driver.

Mirrors ``_kernels.pyx`` operation for operation; used when the compiled
extension is unavailable or explicitly requested.
"""

import math

import numpy as np

NAME = "python"

# Dormand-Prince 5(4) tableau
C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0])
A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
]
B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84])
# difference between the 5th- and 4th-order weights (7 stages, FSAL)
E = np.array([-71 / 57600, 0.0, 71 / 16695, -71 / 1920, 17253 / 339200, -22 / 525, 1 / 40])
# Shampine's continuous extension: y(t + x h) = y + h K^T P [x, x^2, x^3, x^4]
P = np.array(
    [
        [1.0, -8048581381 / 2820520608, 8663915743 / 2820520608, -12715105075 / 11282082432],
        [0.0, 0.0, 0.0, 0.0],
        [0.0, 131558114200 / 32700410799, -68118460800 / 10900136933, 87487479700 / 32700410799],
        [0.0, -1754552775 / 470086768, 14199869525 / 1410260304, -10690763975 / 1880347072],
        [0.0, 127303824393 / 49829197408, -318862633887 / 49829197408, 701980252875 / 199316789632],
        [0.0, -282668133 / 205662961, 2019193451 / 616988883, -1453857185 / 822651844],
        [0.0, 40617522 / 29380423, -110615467 / 29380423, 69997945 / 29380423],
    ]
)

SAFETY = 0.9
MIN_FACTOR = 0.2
MAX_FACTOR = 10.0

_SZ = np.array([1.0, -1.0])
_MASK_1 = np.array([[(i % 2) != (j % 2) for j in range(4)] for i in range(4)], dtype=float)
_MASK_2 = np.array([[(i // 2) != (j // 2) for j in range(4)] for i in range(4)], dtype=float)
_OUTER_SZ = np.outer(_SZ, _SZ)


def _envelope(t, p):
    if t >= p[21]:
        return 0.0
    if p[18] == 0.0:
        return 1.0
    x = abs((t - p[19]) / p[20])
    e = math.exp(-x)
    return 2.0 * e / (1.0 + e * e)


def rhs(y, t, p):
    """Flattened ``d rho/dt`` for a flattened 4x4 ``rho``."""
    r = y.reshape(4, 4)
    f = _envelope(t, p)
    p1 = r[0, 1] + r[2, 3]
    p2 = r[0, 2] + r[1, 3]
    G1 = complex(p[3], p[4])
    G2 = complex(p[5], p[6])
    F = complex(p[7], p[8])
    H1 = complex(p[9], p[10]) * f + G1 * p1 + F * p2
    H2 = complex(p[11], p[12]) * f + G2 * p2 + F * p1
    H1c = H1.conjugate()
    H2c = H2.conjugate()
    d = p[13]
    H = np.array(
        [
            [0.0, -H1, -H2, 0.0],
            [-H1c, p[0], d, -H2],
            [-H2c, d, p[1], -H1],
            [0.0, -H2c, -H1c, p[2]],
        ]
    )
    out = 1j * (r @ H - H @ r)

    out -= (p[14] * _MASK_1 + p[15] * _MASK_2) * r
    # exciton decay of the first factor (rate 1/tau2) and the second (1/tau1)
    s34 = r[2:4, 2:4]
    s24 = r[1::2, 1::2]
    out += p[17] * np.kron(np.diag(_SZ), s34)
    out += p[16] * np.kron(s24, np.diag(_SZ))
    return out.reshape(16)


def _norm(x):
    return math.sqrt(float(np.mean(x.real**2 + x.imag**2)))


def _initial_step(y0, f0, t0, p, rtol, atol, span):
    scale = atol + np.abs(y0) * rtol
    d0 = _norm(y0 / scale)
    d1 = _norm(f0 / scale)
    h0 = 1e-6 if (d0 < 1e-5 or d1 < 1e-5) else 0.01 * d0 / d1
    h0 = min(h0, span)
    y1 = y0 + h0 * f0
    f1 = rhs(y1, t0 + h0, p)
    d2 = _norm((f1 - f0) / scale) / h0
    if d1 <= 1e-15 and d2 <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** (1 / 5)
    return min(100 * h0, h1, span)


def integrate(y0, p, times, rtol, atol, max_steps):
    """Adaptive integration sampled at ``times`` (``times[0]`` is the start).

    Returns ``(status, samples, n_steps, n_rejected, t_fail, y_fail)``;
    status 0 = ok, 1 = step underflow, 2 = step budget exhausted.
    """
    y = np.array(y0, dtype=complex)
    times = np.asarray(times, dtype=float)
    n_out = times.size
    out = np.empty((n_out, 16), dtype=complex)
    out[0] = y
    k_out = 1
    t = float(times[0])
    t_end = float(times[-1])
    n_steps = n_rejected = 0
    if n_out == 1:
        return 0, out, 0, 0, t, y

    K = np.empty((7, 16), dtype=complex)
    K[0] = rhs(y, t, p)
    h = _initial_step(y, K[0], t, p, rtol, atol, t_end - t)

    while k_out < n_out:
        if n_steps >= max_steps:
            return 2, out[:k_out], n_steps, n_rejected, t, y
        h_min = 10 * abs(math.nextafter(t, math.inf) - t)
        rejected = False
        while True:
            if h < h_min:
                return 1, out[:k_out], n_steps, n_rejected, t, y
            h = min(h, t_end - t)
            for s in range(1, 6):
                dy = np.dot(A[s], K[:s]) * h
                K[s] = rhs(y + dy, t + C[s] * h, p)
            y_new = y + h * np.dot(B, K[:6])
            K[6] = rhs(y_new, t + h, p)
            scale = atol + np.maximum(np.abs(y), np.abs(y_new)) * rtol
            err = _norm(h * np.dot(E, K) / scale)
            if err < 1.0:
                if err == 0.0:
                    factor = MAX_FACTOR
                else:
                    factor = min(MAX_FACTOR, SAFETY * err ** -0.2)
                if rejected:
                    factor = min(1.0, factor)
                break
            h *= max(MIN_FACTOR, SAFETY * err ** -0.2)
            rejected = True
            n_rejected += 1

        t_new = t + h if t_end - t > h else t_end
        if k_out < n_out and times[k_out] <= t_new:
            Q = K.T @ P
            while k_out < n_out and times[k_out] <= t_new:
                x = (times[k_out] - t) / h
                out[k_out] = y + h * (Q @ np.array([x, x * x, x**3, x**4]))
                k_out += 1
        y = y_new
        t = t_new
        K[0] = K[6]
        n_steps += 1
        h *= factor

    return 0, out, n_steps, n_rejected, t, y
