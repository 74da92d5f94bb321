"""Fixed-step RK4 kernels.

``rk4_numba`` is the scalar-unrolled compiled kernel; ``rk4_numpy`` is an
independent array formulation kept as the fallback and as a cross-check.
Both take the same flat arguments and return ``(samples, blowup_step)`` where
``blowup_step`` is -1 unless a non-finite state appeared.

Noise is a per-step array of field deviations (nT) with 0, 1 (common-mode)
or 2 (per-cell) columns, held constant over each step.
"""

import numpy as np

from ._backend import USE_NUMBA, njit


@njit
def _n_samples(n_steps, stride, first):
    if first > n_steps:
        return 0
    return (n_steps - first) // stride + 1


def _rk4_scalar(y0, w1, w2, alpha, r1, r2, m0, dt, n_steps, stride, first,
                noise, gamma):
    n_out = _n_samples(n_steps, stride, first)
    out = np.empty((n_out, 6))
    x1, y1, z1, x2, y2, z2 = y0[0], y0[1], y0[2], y0[3], y0[4], y0[5]
    ncol = noise.shape[1]
    h = 0.5 * dt
    k = 0
    for i in range(n_steps + 1):
        if i >= first and (i - first) % stride == 0:
            out[k, 0] = x1
            out[k, 1] = y1
            out[k, 2] = z1
            out[k, 3] = x2
            out[k, 4] = y2
            out[k, 5] = z2
            k += 1
        s = x1 + y1 + z1 + x2 + y2 + z2
        if not (s - s == 0.0):
            return out[:k], i
        if i == n_steps:
            break
        a1 = w1
        a2 = w2
        if ncol == 1:
            a1 = w1 + gamma * noise[i, 0]
            a2 = w2 + gamma * noise[i, 0]
        elif ncol == 2:
            a1 = w1 + gamma * noise[i, 0]
            a2 = w2 + gamma * noise[i, 1]

        # stage 1
        mx = x1 + x2
        dx1 = a1 * y1 + alpha * mx * z1 - x1 * r2
        dy1 = -a1 * x1 - y1 * r2
        dz1 = -alpha * mx * x1 + (m0 - z1) * r1
        dx2 = a2 * y2 + alpha * mx * z2 - x2 * r2
        dy2 = -a2 * x2 - y2 * r2
        dz2 = -alpha * mx * x2 + (m0 - z2) * r1
        sx1, sy1, sz1, sx2, sy2, sz2 = dx1, dy1, dz1, dx2, dy2, dz2

        # stage 2
        u1 = x1 + h * dx1
        v1 = y1 + h * dy1
        q1 = z1 + h * dz1
        u2 = x2 + h * dx2
        v2 = y2 + h * dy2
        q2 = z2 + h * dz2
        mx = u1 + u2
        dx1 = a1 * v1 + alpha * mx * q1 - u1 * r2
        dy1 = -a1 * u1 - v1 * r2
        dz1 = -alpha * mx * u1 + (m0 - q1) * r1
        dx2 = a2 * v2 + alpha * mx * q2 - u2 * r2
        dy2 = -a2 * u2 - v2 * r2
        dz2 = -alpha * mx * u2 + (m0 - q2) * r1
        sx1 += 2.0 * dx1
        sy1 += 2.0 * dy1
        sz1 += 2.0 * dz1
        sx2 += 2.0 * dx2
        sy2 += 2.0 * dy2
        sz2 += 2.0 * dz2

        # stage 3
        u1 = x1 + h * dx1
        v1 = y1 + h * dy1
        q1 = z1 + h * dz1
        u2 = x2 + h * dx2
        v2 = y2 + h * dy2
        q2 = z2 + h * dz2
        mx = u1 + u2
        dx1 = a1 * v1 + alpha * mx * q1 - u1 * r2
        dy1 = -a1 * u1 - v1 * r2
        dz1 = -alpha * mx * u1 + (m0 - q1) * r1
        dx2 = a2 * v2 + alpha * mx * q2 - u2 * r2
        dy2 = -a2 * u2 - v2 * r2
        dz2 = -alpha * mx * u2 + (m0 - q2) * r1
        sx1 += 2.0 * dx1
        sy1 += 2.0 * dy1
        sz1 += 2.0 * dz1
        sx2 += 2.0 * dx2
        sy2 += 2.0 * dy2
        sz2 += 2.0 * dz2

        # stage 4
        u1 = x1 + dt * dx1
        v1 = y1 + dt * dy1
        q1 = z1 + dt * dz1
        u2 = x2 + dt * dx2
        v2 = y2 + dt * dy2
        q2 = z2 + dt * dz2
        mx = u1 + u2
        sx1 += a1 * v1 + alpha * mx * q1 - u1 * r2
        sy1 += -a1 * u1 - v1 * r2
        sz1 += -alpha * mx * u1 + (m0 - q1) * r1
        sx2 += a2 * v2 + alpha * mx * q2 - u2 * r2
        sy2 += -a2 * u2 - v2 * r2
        sz2 += -alpha * mx * u2 + (m0 - q2) * r1

        c = dt / 6.0
        x1 += c * sx1
        y1 += c * sy1
        z1 += c * sz1
        x2 += c * sx2
        y2 += c * sy2
        z2 += c * sz2
    return out[:k], -1


rk4_numba = njit(_rk4_scalar)


def _field_rows(m, w, alpha, r1, r2, m0):
    """Vector field on a (2, 3) per-cell view; ``w`` holds both Larmor frequencies."""
    x, y, z = m[:, 0], m[:, 1], m[:, 2]
    mx = x.sum()
    d = np.empty_like(m)
    d[:, 0] = w * y + alpha * mx * z - x * r2
    d[:, 1] = -w * x - y * r2
    d[:, 2] = -alpha * mx * x + (m0 - z) * r1
    return d


def rk4_numpy(y0, w1, w2, alpha, r1, r2, m0, dt, n_steps, stride, first,
              noise, gamma):
    n_out = _n_samples(n_steps, stride, first)
    out = np.empty((n_out, 6))
    m = np.array(y0, dtype=np.float64).reshape(2, 3)
    base_w = np.array([w1, w2])
    ncol = noise.shape[1]
    if ncol:
        # (n_steps, 2) frequency offsets; a single column broadcasts to both cells
        offsets = gamma * np.broadcast_to(noise, (noise.shape[0], 2))
    k = 0
    for i in range(n_steps + 1):
        if i >= first and (i - first) % stride == 0:
            out[k] = m.reshape(6)
            k += 1
        if not np.isfinite(m).all():
            return out[:k], i
        if i == n_steps:
            break
        w = base_w + offsets[i] if ncol else base_w
        k1 = _field_rows(m, w, alpha, r1, r2, m0)
        k2 = _field_rows(m + 0.5 * dt * k1, w, alpha, r1, r2, m0)
        k3 = _field_rows(m + 0.5 * dt * k2, w, alpha, r1, r2, m0)
        k4 = _field_rows(m + dt * k3, w, alpha, r1, r2, m0)
        m = m + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return out[:k], -1


rk4_run = rk4_numba if USE_NUMBA else rk4_numpy
