"""Pseudo-spin coherent states and the geometry of their parameter space.

Points of the Poincare disk are plain Python complex numbers; the
upper half-plane is reached through the Cayley-type map

    1/w - i v = (i + xi) / (i - xi).
"""

import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np
from scipy.special import gammaln, roots_jacobi
from scipy.stats import nbinom

from .errors import DomainError, ParameterError, TruncationError, UnsupportedMeasureError
from .su11 import build_H_xi, build_rep, check_bargmann


class HalfPlanePoint(NamedTuple):
    v: float
    w: float


@dataclass(frozen=True)
class CoherentState:
    K: float
    xi: complex
    coeffs: np.ndarray
    tail_mass: float

    @property
    def norm(self):
        return float(np.linalg.norm(self.coeffs))


class UnderResolvedQuadratureWarning(RuntimeWarning):
    pass


def as_disk_point(xi, name="xi"):
    """Validate and return ``xi`` as a complex number with ``|xi| < 1``."""
    try:
        z = complex(xi)
    except (TypeError, ValueError):
        raise DomainError(f"{name} is not a complex number: {xi!r}") from None
    if not (math.isfinite(z.real) and math.isfinite(z.imag)) or abs(z) >= 1.0:
        raise DomainError(f"{name} must lie in the open unit disk, got {z!r}")
    return z


# --------------------------------------------------------------------------
# Fock expansion and truncation control
# --------------------------------------------------------------------------

def tail_mass(xi_abs, K, cutoff):
    """Probability weight of ``|xi>`` carried by Fock labels above ``cutoff``.

    The weights ``|c_m|^2`` form a negative-binomial distribution with
    ``2K`` successes and success probability ``1 - |xi|^2``.
    """
    lam = float(xi_abs) ** 2
    if lam == 0.0:
        return 0.0
    return float(nbinom.sf(cutoff, 2.0 * K, 1.0 - lam))


def min_cutoff(xi_abs, K, tail_tol):
    """Smallest cutoff (>= 2) whose truncation tail is at most ``tail_tol``."""
    K = check_bargmann(K)
    if not 0.0 <= xi_abs < 1.0:
        raise DomainError(f"|xi| must be in [0, 1), got {xi_abs!r}")
    if tail_tol <= 0:
        raise ParameterError("tail_tol must be positive")
    lo = 2
    if tail_mass(xi_abs, K, lo) <= tail_tol:
        return lo
    hi = 4
    while tail_mass(xi_abs, K, hi) > tail_tol:
        lo, hi = hi, 2 * hi
        if hi > 10_000_000:
            raise TruncationError("no reasonable cutoff reaches the tail tolerance")
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if tail_mass(xi_abs, K, mid) <= tail_tol:
            hi = mid
        else:
            lo = mid
    return hi


def fock_coefficients(K, xi, cutoff):
    """``c_m = (1-|xi|^2)^K sqrt(Gamma(2K+m) / (m! Gamma(2K))) xi^m`` for m <= cutoff."""
    m = np.arange(cutoff + 1, dtype=float)
    r = abs(xi)
    if r == 0.0:
        out = np.zeros(cutoff + 1, dtype=complex)
        out[0] = 1.0
        return out
    logmag = (K * math.log1p(-r * r)
              + 0.5 * (gammaln(2.0 * K + m) - gammaln(m + 1.0) - gammaln(2.0 * K))
              + m * math.log(r))
    phase = np.exp(1j * m * np.angle(xi))
    return np.exp(logmag) * phase


def coherent_state(rep, xi, tail_tol=1e-12):
    """Truncated coherent state ``|xi>`` in the Fock basis of ``rep``.

    Raises
    ------
    DomainError
        If ``|xi| >= 1``.
    TruncationError
        If the weight beyond ``rep.cutoff`` exceeds ``tail_tol``.  The
        exception carries the minimal admissible cutoff.
    """
    xi = as_disk_point(xi)
    if not 0.0 < tail_tol <= 1e-6:
        raise ParameterError(f"tail_tol must lie in (0, 1e-6], got {tail_tol!r}")
    tail = tail_mass(abs(xi), rep.K, rep.cutoff)
    if tail > tail_tol:
        need = min_cutoff(abs(xi), rep.K, tail_tol)
        raise TruncationError(
            f"cutoff {rep.cutoff} leaves tail mass {tail:.3g} > {tail_tol:.3g} "
            f"for |xi|={abs(xi):.6g}, K={rep.K:g}; need cutoff >= {need}",
            required_cutoff=need,
        )
    coeffs = fock_coefficients(rep.K, xi, rep.cutoff)
    coeffs.setflags(write=False)
    return CoherentState(K=rep.K, xi=xi, coeffs=coeffs, tail_mass=tail)


# --------------------------------------------------------------------------
# Closed forms
# --------------------------------------------------------------------------

def overlap(xi1, xi2, K):
    """Inner product ``<xi1|xi2>`` for Bargmann index ``K`` (principal branch)."""
    xi1 = as_disk_point(xi1, "xi1")
    xi2 = as_disk_point(xi2, "xi2")
    num = ((1.0 - abs(xi1) ** 2) * (1.0 - abs(xi2) ** 2)) ** K
    return complex(num / (1.0 - xi1.conjugate() * xi2) ** (2.0 * K))


def log_overlap_slope(xi1, xi2):
    """d log|<xi1|xi2>| / dK, which is <= 0 with equality iff xi1 == xi2."""
    xi1 = as_disk_point(xi1, "xi1")
    xi2 = as_disk_point(xi2, "xi2")
    return math.log((1.0 - abs(xi1) ** 2) * (1.0 - abs(xi2) ** 2)
                    / abs(1.0 - xi1.conjugate() * xi2) ** 2)


def disk_to_halfplane(xi):
    xi = as_disk_point(xi)
    x, y = xi.real, xi.imag
    d = x * x + (1.0 - y) ** 2
    return HalfPlanePoint(v=2.0 * x / d, w=d / (1.0 - abs(xi) ** 2))


def halfplane_to_disk(p):
    v, w = float(p[0]), float(p[1])
    if not (math.isfinite(v) and math.isfinite(w)) or w <= 0:
        raise DomainError(f"half-plane point needs finite v and w > 0, got ({v!r}, {w!r})")
    zeta = complex(1.0 / w, -v)
    return 1j * (zeta - 1.0) / (zeta + 1.0)


def expect_generators(xi, K=None):
    """Coherent-state averages ``(<k0>, <k+>, <k->)``; independent of ``K``."""
    xi = as_disk_point(xi)
    den = 1.0 - abs(xi) ** 2
    kminus = 2.0 * xi / den
    return (1.0 + abs(xi) ** 2) / den, kminus.conjugate(), kminus


def classical_energy(xi, J):
    xi = as_disk_point(xi)
    return J * (1.0 + abs(xi) ** 2 - 2.0 * xi.imag) / (1.0 - abs(xi) ** 2)


# --------------------------------------------------------------------------
# Resolution of the identity
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class QuadSpec:
    """Tensor product rule: Gauss-Jacobi in ``|xi|^2``, Gauss-Legendre in ``arg xi``.

    With ``adaptive`` set, both orders are doubled until successive
    estimates agree to ``tol`` or ``max_order`` is reached.
    """

    radial_order: int = 16
    angular_order: int = 16
    adaptive: bool = True
    tol: float = 1e-9
    max_order: int = 1024
    target: float = 1e-6


DEFAULT_PROBES = (0.0, 0.3 + 0.2j, -0.45 + 0.1j)


def _resolution_integral(K, xi0, n_s, n_th):
    # (2K-1)/pi d^2xi / (1-s)^2 |<xi0|xi>|^2 = (2K-1)/(2 pi) (1-s)^(2K-2) g(s, th) ds dth,
    # the power of (1-s) is absorbed into a Gauss-Jacobi rule in s = |xi|^2
    alpha = 2.0 * K - 2.0
    xs, ws = roots_jacobi(n_s, alpha, 0.0)
    s = 0.5 * (xs + 1.0)
    ws = ws * 0.5 ** (alpha + 1.0)
    xt, wt = np.polynomial.legendre.leggauss(n_th)
    th = math.pi * (xt + 1.0)
    wt = math.pi * wt
    S, TH = np.meshgrid(s, th, indexing="ij")
    xi = np.sqrt(S) * np.exp(1j * TH)
    logg = (2.0 * K * math.log1p(-abs(xi0) ** 2)
            - 4.0 * K * np.log(np.abs(1.0 - np.conj(xi0) * xi)))
    f = (2.0 * K - 1.0) / (2.0 * math.pi) * np.exp(logg)
    return float(ws @ f @ wt)


def identity_resolution_residual(K, quad_spec=None, probes=DEFAULT_PROBES):
    """Max over probe states of ``|<xi0| (int dmu |xi><xi|) |xi0> - 1|``.

    The invariant measure is ``dmu = (2K-1)/pi d^2xi / (1-|xi|^2)^2``,
    normalisable only for ``K > 1/2``.  A residual above
    ``quad_spec.target`` triggers an :class:`UnderResolvedQuadratureWarning`.
    """
    K = check_bargmann(K)
    if K <= 0.5:
        raise UnsupportedMeasureError("the disk measure is not normalisable at K = 1/2")
    q = quad_spec or QuadSpec()
    probes = [as_disk_point(p, "probe") for p in probes]
    n_s, n_th = q.radial_order, q.angular_order
    vals = np.array([_resolution_integral(K, p, n_s, n_th) for p in probes])
    while q.adaptive:
        n_s2, n_th2 = min(2 * n_s, q.max_order), min(2 * n_th, q.max_order)
        if (n_s2, n_th2) == (n_s, n_th):
            break
        finer = np.array([_resolution_integral(K, p, n_s2, n_th2) for p in probes])
        done = np.max(np.abs(finer - vals)) < q.tol
        n_s, n_th, vals = n_s2, n_th2, finer
        if done:
            break
    residual = float(np.max(np.abs(vals - 1.0)))
    if residual > q.target:
        warnings.warn(
            f"identity resolution residual {residual:.3g} exceeds {q.target:g} "
            f"(orders {n_s}x{n_th}); quadrature is under-resolved",
            UnderResolvedQuadratureWarning,
            stacklevel=2,
        )
    return residual


# --------------------------------------------------------------------------
# Crossover diagnostics
# --------------------------------------------------------------------------

class OverlapRow(NamedTuple):
    K: float
    xi1: complex
    xi2: complex
    abs_overlap: float
    log_abs_overlap: float


class FluctuationRow(NamedTuple):
    K: float
    mean: float
    stddev: float
    ratio: float


def overlap_decay_scan(xi1, xi2, Ks: Sequence[float]):
    """|<xi1|xi2>| over increasing ``K``; its logarithm is linear in ``K``."""
    Ks = [float(k) for k in Ks]
    if not Ks:
        raise ParameterError("Ks must be non-empty")
    if any(b <= a for a, b in zip(Ks, Ks[1:])):
        raise ParameterError("Ks must be strictly ascending")
    xi1 = as_disk_point(xi1, "xi1")
    xi2 = as_disk_point(xi2, "xi2")
    rows = []
    for K in Ks:
        a = abs(overlap(xi1, xi2, check_bargmann(K)))
        rows.append(OverlapRow(K, xi1, xi2, a, math.log(a)))
    return rows


def fit_log_overlap(rows):
    """Least-squares line through ``(K, log|overlap|)``.

    Returns ``(slope, intercept, max_abs_residual)``.
    """
    K = np.array([r.K for r in rows])
    y = np.array([r.log_abs_overlap for r in rows])
    if K.size < 2:
        raise ParameterError("need at least two K values to fit a slope")
    slope, intercept = np.polyfit(K, y, 1)
    resid = y - (slope * K + intercept)
    return float(slope), float(intercept), float(np.max(np.abs(resid)))


def energy_moments(xi, K, J, tail_tol=1e-12, margin=8):
    """Mean and standard deviation of the source Hamiltonian in ``|xi>``."""
    xi = as_disk_point(xi)
    cutoff = min_cutoff(abs(xi), K, tail_tol) + margin
    rep = build_rep(K, cutoff)
    H = build_H_xi(rep, J).matrix
    c = coherent_state(rep, xi, tail_tol).coeffs
    hc = H @ c
    mean = float(np.vdot(c, hc).real)
    second = float(np.vdot(hc, hc).real)
    return mean, math.sqrt(max(second - mean * mean, 0.0))


def energy_fluctuation_scan(xi, J, Ks, tail_tol=1e-12):
    """Rows ``(K, mean, stddev, stddev/mean)`` from truncated matrices."""
    rows = []
    for K in Ks:
        mean, sd = energy_moments(xi, check_bargmann(K), J, tail_tol)
        rows.append(FluctuationRow(float(K), mean, sd, sd / mean))
    return rows
