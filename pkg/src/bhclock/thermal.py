"""Two-mode bosonic realisation of the source and its thermal sector.

Each of the ``N_xi`` pairs ``(a_i, b_i)`` carries the K = 1/2 piece of the
algebra; with no unpaired excitations the total index is ``K = N_xi/2``.
Units: hbar = k_B = 1, so frequencies and temperatures are energies.
"""

import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np
import scipy.sparse as sp

from .coherent import as_disk_point, disk_to_halfplane
from .errors import NumericalError, ParameterError, TruncationError


class OutOfModelWarning(RuntimeWarning):
    """Effective frequency is non-positive; the thermal reading breaks down."""


class ZeroTemperatureWarning(RuntimeWarning):
    """xi = 0 is the vacuum, i.e. the T -> 0 limit."""


@dataclass(frozen=True)
class TwoModeConfig:
    N_xi: int = 1
    J: float = 1.0
    n_cut: int = 40
    delta_n: int = 0

    def __post_init__(self):
        if int(self.N_xi) != self.N_xi or self.N_xi < 1:
            raise ParameterError(f"N_xi must be an integer >= 1, got {self.N_xi!r}")
        if not math.isfinite(self.J) or self.J <= 0:
            raise ParameterError(f"J must be finite and > 0, got {self.J!r}")
        if int(self.n_cut) != self.n_cut or self.n_cut < 2:
            raise ParameterError(f"n_cut must be an integer >= 2, got {self.n_cut!r}")
        if self.delta_n != 0:
            raise ParameterError("only delta_n = 0 (no unpaired excitations) is modelled")

    @property
    def K(self):
        return self.N_xi / 2.0


@dataclass(frozen=True)
class TwoModePairState:
    xi: complex
    n_cut: int
    joint: np.ndarray  # index n_a * (n_cut + 1) + n_b

    def amplitude_matrix(self):
        d = self.n_cut + 1
        return self.joint.reshape(d, d)


@dataclass(frozen=True)
class ThermalState:
    probs: np.ndarray
    rho: Optional[np.ndarray] = None
    omega: Optional[float] = None
    T: Optional[float] = None
    Z0: Optional[float] = None
    status: str = "ok"

    @property
    def purity(self):
        return float(np.sum(self.probs ** 2))


def _ladder(n_cut):
    return sp.diags(np.sqrt(np.arange(1, n_cut + 1, dtype=float)), 1, format="csr")


def pair_hamiltonian(cfg):
    """Sparse matrix of one pair Hamiltonian on the truncated two-mode Fock space.

    ``(J/N_xi) [1 + a^dag a + b^dag b - i (a^dag b^dag - a b)]``, basis index
    ``n_a * (n_cut + 1) + n_b``.
    """
    d = cfg.n_cut + 1
    one = sp.identity(d, format="csr")
    lower = _ladder(cfg.n_cut)
    a = sp.kron(lower, one, format="csr")
    b = sp.kron(one, lower, format="csr")
    ad, bd = a.conj().T, b.conj().T
    H = sp.identity(d * d, format="csr") + ad @ a + bd @ b - 1j * (ad @ bd - a @ b)
    return ((cfg.J / cfg.N_xi) * H).tocsr()


def required_n_cut(xi_abs, tail_tol):
    """Smallest ``n_cut`` with ``|xi|^(2(n_cut+1)) <= tail_tol``."""
    lam = xi_abs * xi_abs
    if lam == 0.0:
        return 2
    return max(2, math.ceil(math.log(tail_tol) / math.log(lam)) - 1)


def two_mode_squeezed(xi, cfg, tail_tol=1e-12):
    """Pair coherent state ``sqrt(1-|xi|^2) sum_n xi^n |n>_A |n>_B``."""
    xi = as_disk_point(xi)
    lam = abs(xi) ** 2
    tail = lam ** (cfg.n_cut + 1)
    if tail > tail_tol:
        need = required_n_cut(abs(xi), tail_tol)
        raise TruncationError(
            f"n_cut {cfg.n_cut} leaves tail {tail:.3g} > {tail_tol:.3g}; need n_cut >= {need}",
            required_cutoff=need,
        )
    d = cfg.n_cut + 1
    n = np.arange(d)
    amp = math.sqrt(1.0 - lam) * xi ** n if xi != 0 else (n == 0).astype(complex)
    psi = np.zeros((d, d), dtype=complex)
    psi[n, n] = amp
    joint = psi.reshape(-1)
    joint.setflags(write=False)
    return TwoModePairState(xi=xi, n_cut=cfg.n_cut, joint=joint)


def pair_energy(state, cfg):
    H = pair_hamiltonian(cfg)
    return float(np.vdot(state.joint, H @ state.joint).real)


def two_mode_energy_check(xi, cfg, tail_tol=1e-14):
    """``|<xi| sum_i H_i |xi> - J w(xi)|`` for the product of ``N_xi`` identical pairs.

    Pairs do not interact and the state is a product, so the total is
    ``N_xi`` times one pair's expectation.
    """
    state = two_mode_squeezed(xi, cfg, tail_tol)
    total = cfg.N_xi * pair_energy(state, cfg)
    return abs(total - cfg.J * disk_to_halfplane(xi).w)


def reduce_to_R(state):
    """Reduced state of the escaping boson (mode B) after tracing out its partner."""
    psi = state.amplitude_matrix()
    rho = psi.T @ psi.conj()
    probs = np.real(np.diag(rho)).copy()
    return ThermalState(probs=probs, rho=rho)


def effective_frequency(xi, cfg):
    """``omega = (J/N_xi)(1 - 2 Im xi / (1 + |xi|^2))``.

    Non-positive values are reported with :class:`OutOfModelWarning`; for
    points strictly inside the disk this cannot happen, since
    ``Im xi <= |xi| < (1 + |xi|^2)/2``.
    """
    xi = as_disk_point(xi)
    omega = cfg.J / cfg.N_xi * (1.0 - 2.0 * xi.imag / (1.0 + abs(xi) ** 2))
    if omega <= 0:
        warnings.warn(f"non-positive effective frequency at xi={xi}", OutOfModelWarning, stacklevel=2)
    return omega


def _temperature(omega, r):
    # T = omega / ln |xi|^-2, written with log(r) to keep precision near r = 1
    return omega / (-2.0 * math.log(r))


def effective_temperature(xi, cfg):
    """Temperature with ``exp(-omega/T) = |xi|^2``; 0 at the vacuum, nan out of model."""
    xi = as_disk_point(xi)
    if xi == 0:
        warnings.warn("xi = 0 is the zero-temperature limit", ZeroTemperatureWarning, stacklevel=2)
        return 0.0
    omega = effective_frequency(xi, cfg)
    if omega <= 0:
        return math.nan
    return _temperature(omega, abs(xi))


def energy_split_residual(xi, cfg):
    """``|omega N_xi coth(omega/2T) - J w|``; zero when the pair energy survives the split."""
    xi = as_disk_point(xi)
    omega = effective_frequency(xi, cfg)
    T = effective_temperature(xi, cfg)
    if not (T > 0):
        return math.nan
    lhs = omega * cfg.N_xi / math.tanh(omega / (2.0 * T))
    return abs(lhs - cfg.J * disk_to_halfplane(xi).w)


def entropy_of_R(xi):
    xi = as_disk_point(xi)
    lam = abs(xi) ** 2
    if lam == 0.0:
        return 0.0
    return -math.log1p(-lam) - lam / (1.0 - lam) * math.log(lam)


def thermal_state(xi, cfg):
    """Closed-form thermal description of the escaping mode.

    ``probs`` holds ``(1 - |xi|^2)|xi|^(2n)`` for ``n <= cfg.n_cut``.
    """
    xi = as_disk_point(xi)
    lam = abs(xi) ** 2
    probs = (1.0 - lam) * lam ** np.arange(cfg.n_cut + 1)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ZeroTemperatureWarning)
        omega = effective_frequency(xi, cfg)
        T = effective_temperature(xi, cfg)
    if xi == 0:
        status = "zero-temperature"
    elif omega <= 0:
        status = "out-of-model"
    else:
        status = "ok"
    return ThermalState(probs=probs, omega=omega, T=T, Z0=1.0 / (1.0 - lam), status=status)


def thermal_report(xi, cfg):
    """JSON-ready summary ``{xi, omega, T, Z0, purity, entropy}``."""
    xi = as_disk_point(xi)
    th = thermal_state(xi, cfg)
    lam = abs(xi) ** 2
    return {
        "xi": [xi.real, xi.imag],
        "omega": th.omega,
        "T": th.T,
        "Z0": th.Z0,
        "purity": (1.0 - lam) / (1.0 + lam),
        "entropy": entropy_of_R(xi),
        "status": th.status,
    }


# --------------------------------------------------------------------------
# Hawking matching
# --------------------------------------------------------------------------

class IsothermPoint(NamedTuple):
    angle_deg: float
    xi: Optional[complex]
    T: float
    residual: float
    status: str


def _ray_temperature(u, direction, cfg):
    """T on the ray ``xi = e^-u * direction``; nan where omega <= 0."""
    r = math.exp(-u)
    xi = r * direction
    omega = cfg.J / cfg.N_xi * (1.0 - 2.0 * xi.imag / (1.0 + r * r))
    if omega <= 0:
        return math.nan
    return omega / (2.0 * u)


def solve_isotherm_ray(T_target, cfg, angle_deg, max_iter=200, rtol=1e-12):
    """Innermost point on one ray from the origin where T(xi) = T_target.

    The ray is parametrised by ``u = -ln|xi|`` and scanned geometrically
    from deep inside the disk (``T -> 0``) outwards; the first sign change
    is refined by bisection.
    """
    direction = complex(math.cos(math.radians(angle_deg)), math.sin(math.radians(angle_deg)))
    # u = 2^k for k = 40 .. -60 covers |xi| from exp(-2^40) to 1 - 1e-18
    grid = [2.0 ** k for k in range(40, -61, -1)]
    prev_u, prev_f = None, None
    bracket = None
    for u in grid:
        T = _ray_temperature(u, direction, cfg)
        f = T - T_target if T == T else math.nan
        if prev_f is not None and f == f and prev_f < 0 <= f:
            bracket = (u, prev_u)  # f(lo) >= 0 > f(hi), lo < hi in u
            break
        prev_u, prev_f = u, f
    if bracket is None:
        return IsothermPoint(angle_deg, None, math.nan, math.nan, "no-solution")
    lo, hi = bracket
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        f = _ray_temperature(mid, direction, cfg) - T_target
        if f >= 0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= rtol * lo:
            break
    else:
        raise NumericalError(f"isotherm bisection did not converge on ray {angle_deg} deg")
    u = 0.5 * (lo + hi)
    xi = math.exp(-u) * direction
    T = _ray_temperature(u, direction, cfg)
    residual = abs(T - T_target)
    if not residual <= 1e-10 * T_target:
        raise NumericalError(
            f"isotherm residual {residual:.3g} too large on ray {angle_deg} deg"
        )
    return IsothermPoint(angle_deg, xi, T, residual, "ok")


def microstate_isotherm(T_target, cfg, ray_angles):
    """Disk points whose effective temperature equals ``T_target``, one per ray."""
    if not (T_target > 0 and math.isfinite(T_target)):
        raise ParameterError(f"T_target must be positive, got {T_target!r}")
    return [solve_isotherm_ray(T_target, cfg, float(a)) for a in ray_angles]
