# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled fixed-step RK4 for radial (L = 0) infall in proper time."""

from libc.math cimport isfinite

cdef inline double _force(double q, double m, double rs, double c2, double kappa, int near) nogil:
    # -dh/dq
    if near:
        return -m * kappa
    return -0.5 * m * c2 * rs / ((rs + q) * (rs + q))


cdef inline double _energy(double q, double p, double m, double rs, double c2, double kappa, int near) nogil:
    if near:
        return 0.5 * p * p / m + m * kappa * q
    return 0.5 * p * p / m + 0.5 * m * c2 * q / (rs + q)


def rk4_radial(double q0, double p0, double m, double rs, double c2, double kappa,
               int near, double step, long n_steps, double q_floor,
               double[::1] tau, double[::1] q, double[::1] p, double[::1] h):
    """Fill ``tau, q, p, h`` (length n_steps + 1); return (n_filled, status).

    status: 0 completed, 1 stopped at the horizon floor, 2 non-finite state.
    """
    cdef long i
    cdef double qi = q0, pi = p0, half = 0.5 * step
    cdef double k1q, k1p, k2q, k2p, k3q, k3p, k4q, k4p
    cdef int status = 0
    tau[0] = 0.0
    q[0] = qi
    p[0] = pi
    h[0] = _energy(qi, pi, m, rs, c2, kappa, near)
    with nogil:
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
            if not (isfinite(qi) and isfinite(pi)):
                status = 2
                break
            if qi <= q_floor:
                status = 1
                break
    if status == 0:
        return n_steps + 1, status
    return i + 1, status
