"""Pure-Python twin of the compiled RK4 kernel (same signature and results)."""

import math


def _force(q, m, rs, c2, kappa, near):
    if near:
        return -m * kappa
    return -0.5 * m * c2 * rs / ((rs + q) * (rs + q))


def _energy(q, p, m, rs, c2, kappa, near):
    if near:
        return 0.5 * p * p / m + m * kappa * q
    return 0.5 * p * p / m + 0.5 * m * c2 * q / (rs + q)


def rk4_radial(q0, p0, m, rs, c2, kappa, near, step, n_steps, q_floor, tau, q, p, h):
    """Fill ``tau, q, p, h`` (length n_steps + 1); return (n_filled, status).

    status: 0 completed, 1 stopped at the horizon floor, 2 non-finite state.
    """
    qi, pi, half = q0, p0, 0.5 * step
    tau[0], q[0], p[0] = 0.0, qi, pi
    h[0] = _energy(qi, pi, m, rs, c2, kappa, near)
    for i in range(1, n_steps + 1):
        k1q = pi / m
        k1p = _force(qi, m, rs, c2, kappa, near)
        k2q = (pi + half * k1p) / m
        k2p = _force(qi + half * k1q, m, rs, c2, kappa, near)
        k3q = (pi + half * k2p) / m
        k3p = _force(qi + half * k2q, m, rs, c2, kappa, near)
        k4q = (pi + step * k3p) / m
        k4p = _force(qi + step * k3q, m, rs, c2, kappa, near)
        qi = qi + step / 6.0 * (k1q + 2.0 * k2q + 2.0 * k3q + k4q)
        pi = pi + step / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p)
        tau[i] = i * step
        q[i] = qi
        p[i] = pi
        h[i] = _energy(qi, pi, m, rs, c2, kappa, near)
        if not (math.isfinite(qi) and math.isfinite(pi)):
            return i + 1, 2
        if qi <= q_floor:
            return i + 1, 1
    return n_steps + 1, 0
