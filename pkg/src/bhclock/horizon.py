"""Radial Schwarzschild dynamics in proper time and the near-horizon chart.

Two unit systems are supported: ``natural`` (G = c = hbar = k_B = 1) and
``si``.  Everything downstream takes a :class:`SchwarzschildParams`, so
conversions happen only in :func:`schwarzschild_params`.
"""

import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy import constants as _const

from .errors import DomainError, NumericalError, ParameterError
from .kernels import rk4_radial

SOLAR_MASS_KG = 1.98892e30

UNIT_SYSTEMS = {
    "natural": dict(G=1.0, c=1.0, hbar=1.0, k_B=1.0),
    "si": dict(G=_const.G, c=_const.c, hbar=_const.hbar, k_B=_const.k),
}


class NearHorizonWarning(UserWarning):
    """Height above the horizon is not small compared to r_s."""


@dataclass(frozen=True)
class SchwarzschildParams:
    M: float
    G: float = 1.0
    c: float = 1.0
    hbar: float = 1.0
    k_B: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.M) and self.M > 0):
            raise DomainError(f"mass M must be positive, got {self.M!r}")

    @property
    def r_s(self):
        return 2.0 * self.G * self.M / self.c ** 2

    @property
    def kappa(self):
        """Surface gravity c^4 / (4 G M), an acceleration."""
        return self.c ** 4 / (4.0 * self.G * self.M)

    @property
    def T_H(self):
        return hawking_temperature(self)


def schwarzschild_params(M, units="natural"):
    try:
        consts = UNIT_SYSTEMS[units]
    except KeyError:
        raise ParameterError(f"units must be one of {sorted(UNIT_SYSTEMS)}, got {units!r}") from None
    return SchwarzschildParams(M=float(M), **consts)


def hawking_temperature(params):
    """``c^3 hbar / (8 pi G M)`` as an energy (k_B = 1 convention)."""
    if not params.M > 0:
        raise DomainError("M must be positive")
    return params.c ** 3 * params.hbar / (8.0 * math.pi * params.G * params.M)


def hawking_temperature_kelvin(params):
    return hawking_temperature(params) / params.k_B


def full_radial_hamiltonian(p, r, m, L, params):
    """``p^2/2m + (m/2)(L^2/r^2 + c^2)(1 - r_s/r)`` outside the horizon."""
    if not r > params.r_s:
        raise DomainError(f"r = {r!r} is not outside the horizon r_s = {params.r_s!r}")
    if not m > 0:
        raise ParameterError("m must be positive")
    return p * p / (2.0 * m) + 0.5 * m * (L * L / (r * r) + params.c ** 2) * (1.0 - params.r_s / r)


def near_horizon_hamiltonian(p, q, m, kappa):
    """Uniformly accelerated particle ``p^2/2m + m kappa q`` (q > 0)."""
    if not q > 0:
        raise DomainError(f"height q must be > 0, got {q!r}")
    return p * p / (2.0 * m) + m * kappa * q


# --------------------------------------------------------------------------
# Integration
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Trajectory:
    tau: np.ndarray
    q: np.ndarray
    p: np.ndarray
    h: np.ndarray
    status: str  # "completed" or "horizon-floor"

    @property
    def energy_drift(self):
        """max |h(tau) - h(0)| / |h(0)|"""
        return float(np.max(np.abs(self.h - self.h[0])) / abs(self.h[0]))

    def rows(self):
        return zip(self.tau, self.q, self.p, self.h)


def integrate_radial_geodesic(params, m, q0, p0, tau_end, step, q_floor=None,
                              hamiltonian="full"):
    """Fixed-step RK4 for radial infall, ``q = r - r_s``.

    Parameters
    ----------
    params : SchwarzschildParams
    m : float
        Test mass.
    q0, p0 : float
        Initial height above the horizon and radial momentum.
    tau_end, step : float
        Proper-time span and nominal step; the step is shrunk slightly so
        that an integer number of steps lands on ``tau_end``.
    q_floor : float, optional
        Stop once ``q <= q_floor``; defaults to ``1e-12 r_s``.
    hamiltonian : {"full", "near"}
        Exact L = 0 Hamiltonian or its first-order near-horizon form.

    Returns
    -------
    Trajectory
    """
    if not (step > 0 and math.isfinite(step)):
        raise NumericalError(f"step must be positive and finite, got {step!r}")
    if not (tau_end > 0 and math.isfinite(tau_end)):
        raise ParameterError(f"tau_end must be positive, got {tau_end!r}")
    if not q0 > 0:
        raise DomainError(f"q0 must be > 0, got {q0!r}")
    if not m > 0:
        raise ParameterError("m must be positive")
    if hamiltonian not in ("full", "near"):
        raise ParameterError(f"hamiltonian must be 'full' or 'near', got {hamiltonian!r}")
    rs = params.r_s
    if q0 / rs > 0.1:
        warnings.warn(f"q0/r_s = {q0 / rs:.3g} is outside the near-horizon regime",
                      NearHorizonWarning, stacklevel=2)
    if q_floor is None:
        q_floor = rs * 1e-12
    n = max(1, int(math.ceil(tau_end / step - 1e-9)))
    dt = tau_end / n
    tau, q, p, h = (np.empty(n + 1) for _ in range(4))
    filled, status = rk4_radial(float(q0), float(p0), float(m), rs, params.c ** 2,
                                params.kappa, 1 if hamiltonian == "near" else 0,
                                dt, n, float(q_floor), tau, q, p, h)
    if status == 2:
        raise NumericalError(f"non-finite state at tau = {tau[filled - 1]!r}")
    return Trajectory(tau[:filled], q[:filled], p[:filled], h[:filled],
                      "horizon-floor" if status == 1 else "completed")


class ComparisonRow(NamedTuple):
    tau: float
    q_full: float
    q_approx: float
    rel_err: float


def geodesic_comparison(params, m=1.0, q0_ratio=1e-3, steps=4000):
    """Full RK4 infall from rest vs ``q0 - kappa tau^2/2``, until ``q = q0/2``.

    Returns ``(rows, trajectory)``; ``rel_err = |q_full - q_approx| / q_full``.
    """
    q0 = q0_ratio * params.r_s
    tau_half = math.sqrt(q0 / params.kappa)  # closed form reaches q0/2 here
    tau_end = 1.25 * tau_half
    traj = integrate_radial_geodesic(params, m, q0, 0.0, tau_end, tau_end / steps)
    keep = traj.q >= 0.5 * q0
    tau = traj.tau[keep]
    q_full = traj.q[keep]
    q_approx = q0 - 0.5 * params.kappa * tau ** 2
    rel = np.abs(q_full - q_approx) / q_full
    rows = [ComparisonRow(*r) for r in zip(tau, q_full, q_approx, rel)]
    return rows, traj


# --------------------------------------------------------------------------
# Half-plane -> particle phase space
# --------------------------------------------------------------------------

class PhasePoint(NamedTuple):
    p: float
    q: float
    valid: bool


def halfplane_to_phase_space(pt, m, a, J):
    """Map ``(v, w)`` to ``(p, q) = (m a v/J, J w/(m a) - a v^2/(2 J^2))``.

    The image satisfies ``p^2/2m + m a q = J w``.  ``valid`` is False when
    ``q <= 0``, i.e. outside the near-horizon chart.
    """
    v, w = float(pt[0]), float(pt[1])
    if not w > 0:
        raise DomainError(f"w must be > 0, got {w!r}")
    if not (m > 0 and a > 0 and J > 0):
        raise ParameterError("m, a and J must be positive")
    p = m * a * v / J
    q = J * w / (m * a) - 0.5 * a * v * v / (J * J)
    return PhasePoint(p, q, q > 0)


class EmergentSample(NamedTuple):
    t: float
    p: float
    q: float
    beyond_horizon: bool


def horizon_crossing_time(E, m, a):
    return math.sqrt(2.0 * E / (m * a) / a)


def emergent_trajectory(E, m, a, ts):
    """``p = m a t``, ``q = q0 - a t^2 / 2`` with ``q0 = E/(m a)``.

    Samples past the horizon crossing ``t* = sqrt(2 q0 / a)`` are flagged.
    Note the sign convention: q decreases while p grows, i.e. the flow is
    the standard Hamilton flow with ``p -> -p``.
    """
    if not (E > 0 and m > 0 and a > 0):
        raise ParameterError("E, m and a must be positive")
    q0 = E / (m * a)
    t_star = horizon_crossing_time(E, m, a)
    out = []
    for t in ts:
        t = float(t)
        out.append(EmergentSample(t, m * a * t, q0 - 0.5 * a * t * t, abs(t) > t_star))
    return out
