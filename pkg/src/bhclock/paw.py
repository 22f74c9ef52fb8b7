"""Finite-dimensional Page-Wootters constraint for particle and source.

The composite Hamiltonian is ``I (x) H_xi - H_gamma (x) I`` on
``H_gamma (x) H_xi``; admissible global states are its (near-)kernel.
Amplitude vectors are stored row-major as ``d_gamma x d_xi`` matrices.
"""

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import NamedTuple

import numpy as np

from .coherent import as_disk_point, coherent_state, disk_to_halfplane, halfplane_to_disk
from .errors import NumericalError, ParameterError
from .su11 import build_H_xi, build_rep, hermiticity_residual


class SchmidtTerm(NamedTuple):
    c: float
    gamma_vec: np.ndarray
    xi_vec: np.ndarray


class ClockPoint(NamedTuple):
    t: float
    E: float


@dataclass(frozen=True)
class BipartiteSystem:
    H_gamma: np.ndarray
    H_xi: np.ndarray
    H_psi: np.ndarray
    J: float = 1.0
    epsilon: float = 0.0

    @property
    def d_gamma(self):
        return self.H_gamma.shape[0]

    @property
    def d_xi(self):
        return self.H_xi.shape[0]


@dataclass(frozen=True, eq=False)
class GlobalState:
    amplitudes: np.ndarray
    d_gamma: int
    d_xi: int
    eigenvalue: float = field(default=0.0)

    @property
    def matrix(self):
        return self.amplitudes.reshape(self.d_gamma, self.d_xi)

    @cached_property
    def schmidt(self):
        return schmidt_decompose(self)


def _check_hermitian(mat, name):
    mat = np.asarray(mat, dtype=complex)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ParameterError(f"{name} must be a square matrix")
    scale = max(1.0, float(np.max(np.abs(mat))))
    if hermiticity_residual(mat) > 1e-12 * scale:
        raise ParameterError(f"{name} is not Hermitian")
    return mat


def build_composite(H_gamma, H_xi, J=None):
    """Assemble ``I (x) H_xi - H_gamma (x) I``.

    ``H_xi`` may be a plain matrix or a :class:`~bhclock.su11.HamiltonianXi`,
    whose coupling then becomes the clock's energy unit.
    """
    if hasattr(H_xi, "matrix"):
        J = H_xi.J if J is None else J
        H_xi = H_xi.matrix
    J = 1.0 if J is None else float(J)
    Hg = _check_hermitian(H_gamma, "H_gamma")
    Hx = _check_hermitian(H_xi, "H_xi")
    dg, dx = Hg.shape[0], Hx.shape[0]
    if not dg < dx:
        raise ParameterError(f"need dim H_gamma < dim H_xi, got {dg} >= {dx}")
    H_psi = np.kron(np.eye(dg), Hx) - np.kron(Hg, np.eye(dx))
    return BipartiteSystem(H_gamma=Hg, H_xi=Hx, H_psi=H_psi, J=J)


def kronecker_difference_spectrum(sys):
    lam_x = np.linalg.eigvalsh(sys.H_xi)
    lam_g = np.linalg.eigvalsh(sys.H_gamma)
    return np.sort((lam_x[None, :] - lam_g[:, None]).ravel())


def spectrum_residual(sys):
    """Max deviation between the spectrum of H_psi and {lambda_xi - lambda_gamma}."""
    direct = np.linalg.eigvalsh(sys.H_psi)
    return float(np.max(np.abs(direct - kronecker_difference_spectrum(sys))))


def kernel_states(sys, tol=1e-10):
    """Orthonormal eigenvectors of H_psi with ``|eigenvalue| <= tol``.

    An empty list is a legitimate answer: truncated spectra need not meet.
    """
    if not tol > 0:
        raise ParameterError("tol must be positive")
    try:
        lam, vecs = np.linalg.eigh(sys.H_psi)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigensolver failed: {exc}") from exc
    out = []
    for k in np.flatnonzero(np.abs(lam) <= tol):
        out.append(GlobalState(vecs[:, k].copy(), sys.d_gamma, sys.d_xi, float(lam[k])))
    return out


def constraint_residual(sys, state):
    return float(np.linalg.norm(sys.H_psi @ state.amplitudes))


def schmidt_decompose(state, rank_tol=1e-12):
    """Schmidt terms ``(c, gamma, xi)`` with ``c`` descending; rank >= 2 means entangled."""
    u, s, vh = np.linalg.svd(state.matrix, full_matrices=False)
    keep = s > rank_tol * max(s[0], 1e-300)
    return [SchmidtTerm(float(s[k]), u[:, k], vh[k, :]) for k in np.flatnonzero(keep)]


def schmidt_rank(state):
    return len(state.schmidt)


def product_state(gamma_vec, xi_vec):
    g = np.asarray(gamma_vec, dtype=complex)
    x = np.asarray(xi_vec, dtype=complex)
    amp = np.kron(g, x)
    amp /= np.linalg.norm(amp)
    return GlobalState(amp, g.size, x.size)


def amplitude_z(state, gamma_vec, xi, rep, tail_tol=1e-12):
    """``z = (<xi| (x) <gamma|) |Psi>>`` using the truncated coherent state."""
    if rep.dim != state.d_xi:
        raise ParameterError(f"rep dimension {rep.dim} does not match d_xi = {state.d_xi}")
    c = coherent_state(rep, xi, tail_tol).coeffs
    g = np.asarray(gamma_vec, dtype=complex)
    return complex(g.conj() @ state.matrix @ c.conj())


def clock_coordinates(xi, J):
    """Clock reading ``t = v/J`` and energy ``E = J w`` of a disk point."""
    v, w = disk_to_halfplane(xi)
    return ClockPoint(v / J, J * w)


def clock_family(E, J, ts):
    """Disk points ``xi(t)`` on the constant-energy line ``w = E/J``, ``v = J t``."""
    return [halfplane_to_disk((J * float(t), E / J)) for t in ts]


class FidelityRow(NamedTuple):
    t: float
    fidelity: float
    status: str


def _conditional(state, rep, xi, tail_tol):
    c = coherent_state(rep, xi, tail_tol).coeffs
    return state.matrix @ c.conj()


def conditional_evolution(sys, kernel_state, clock_family, rep, time_scale=None,
                          tail_tol=1e-12, norm_floor=1e-12):
    """Fidelity between clock-conditioned particle states and unitary evolution.

    For each clock point the conditional state ``<xi(t)|Psi>>`` is compared
    with ``exp(-i H_gamma s) phi(0)``.  The rescaled algebra has an
    effective Planck constant ``1/K``, so the evolution parameter conjugate
    to the clock reading ``t = v/J`` is ``s = K t``; ``time_scale``
    overrides that factor.

    Returns a list of ``(t, fidelity, status)``; status is ``"undefined"``
    where the conditional amplitude vanishes.
    """
    if not clock_family:
        raise ParameterError("clock_family is empty")
    scale = rep.K if time_scale is None else float(time_scale)
    points = [clock_coordinates(as_disk_point(x), sys.J) for x in clock_family]
    E0 = points[0].E
    if any(abs(p.E - E0) > 1e-9 * E0 for p in points):
        raise ParameterError("clock family must lie on a curve of constant energy")
    xi0 = halfplane_to_disk((0.0, E0 / sys.J))
    phi0 = _conditional(kernel_state, rep, xi0, tail_tol)
    n0 = np.linalg.norm(phi0)
    if n0 < norm_floor:
        raise NumericalError("conditional state at t = 0 vanishes")
    phi0 = phi0 / n0
    mu, U = np.linalg.eigh(sys.H_gamma)
    phi0_e = U.conj().T @ phi0
    rows = []
    for xi, pt in zip(clock_family, points):
        phi = _conditional(kernel_state, rep, xi, tail_tol)
        nrm = np.linalg.norm(phi)
        if nrm < norm_floor:
            rows.append(FidelityRow(pt.t, math.nan, "undefined"))
            continue
        ref = U @ (np.exp(-1j * mu * scale * pt.t) * phi0_e)
        rows.append(FidelityRow(pt.t, float(abs(np.vdot(ref, phi / nrm)) ** 2), "ok"))
    return rows


# --------------------------------------------------------------------------
# Engineered resonance and the demo
# --------------------------------------------------------------------------

def resonant_gamma(H_xi, d_gamma, n_match, E):
    """Diagonal particle Hamiltonian sharing ``n_match`` levels with ``H_xi``.

    The shared levels are the ``H_xi`` eigenvalues closest to ``E``; any
    remaining levels sit half-way between neighbouring ``H_xi`` eigenvalues
    so they cannot resonate.
    """
    if not 0 <= n_match <= d_gamma:
        raise ParameterError("need 0 <= n_match <= d_gamma")
    lam = np.linalg.eigvalsh(H_xi)
    order = np.argsort(np.abs(lam - E), kind="stable")
    levels = list(np.sort(lam[order[:n_match]]))
    mids = 0.5 * (lam[:-1] + lam[1:])
    mids = mids[np.argsort(np.abs(mids - E), kind="stable")]
    levels += list(mids[: d_gamma - n_match])
    return np.diag(np.array(levels, dtype=complex))


def min_level_mismatch(sys):
    lam_x = np.linalg.eigvalsh(sys.H_xi)
    lam_g = np.linalg.eigvalsh(sys.H_gamma)
    return float(np.min(np.abs(lam_x[None, :] - lam_g[:, None])))


def superpose(states):
    """Normalised sum of kernel basis states (still in the kernel)."""
    amp = np.sum([s.amplitudes for s in states], axis=0)
    amp = amp / np.linalg.norm(amp)
    s0 = states[0]
    return GlobalState(amp, s0.d_gamma, s0.d_xi)


def resonant_system(K=0.5, d_xi=80, J=1.0, d_gamma=2, n_match=None, E=None):
    """Truncated source of dimension ``d_xi`` plus an engineered resonant particle.

    Returns ``(rep, sys)``.
    """
    n_match = d_gamma if n_match is None else n_match
    E = J if E is None else E
    rep = build_rep(K, d_xi - 1)
    Hx = build_H_xi(rep, J)
    return rep, build_composite(resonant_gamma(Hx.matrix, d_gamma, n_match, E), Hx)


def paw_demo(K=0.5, d_xi=80, J=1.0, d_gamma=2, n_match=None, E=None,
             t_max=0.5, n_t=21, tol=1e-10, tail_tol=1e-12):
    """Resonant PaW construction and its conditional-evolution trace.

    The global state is the normalised sum of the kernel basis.  Returns
    ``(report, psi, rep, sys)`` where ``report`` is JSON-ready:
    ``{d_gamma, d_xi, kernel_dim, max_residual, fidelity_trace, ...}``.
    """
    n_match = d_gamma if n_match is None else n_match
    E = J if E is None else E
    rep, sys = resonant_system(K, d_xi, J, d_gamma, n_match, E)
    kern = kernel_states(sys, tol)
    residuals = [constraint_residual(sys, s) for s in kern]
    report = {
        "K": float(K),
        "J": float(J),
        "E": float(E),
        "d_gamma": int(d_gamma),
        "d_xi": int(d_xi),
        "n_match": int(n_match),
        "kernel_dim": len(kern),
        "max_residual": max(residuals) if residuals else None,
        "spectrum_residual": spectrum_residual(sys),
        "schmidt_rank": None,
        "min_fidelity": None,
        "fidelity_trace": [],
    }
    psi = None
    if kern:
        psi = superpose(kern)
        report["schmidt_rank"] = schmidt_rank(psi)
        ts = np.linspace(-t_max / J, t_max / J, n_t)
        rows = conditional_evolution(sys, psi, clock_family(E, J, ts), rep, tail_tol=tail_tol)
        report["fidelity_trace"] = [[r.t, r.fidelity] for r in rows]
        report["min_fidelity"] = min(r.fidelity for r in rows if r.status == "ok")
    return report, psi, rep, sys


# --------------------------------------------------------------------------
# Spacetime support
# --------------------------------------------------------------------------

class SupportCell(NamedTuple):
    t: float
    q: float
    abs_z2: float
    marked: bool


def spacetime_support(state, rep, H_gamma, t_grid, q_grid, threshold=1e-8,
                      m=1.0, a=1.0, J=1.0, E=None, tail_tol=1e-12):
    """Mark grid points ``(t, q)`` where ``|z|^2 > threshold``.

    The clock side is fixed by ``E`` (default ``J``): ``t`` selects
    ``xi(t)`` with ``(v, w) = (J t, E/J)``.  The particle side uses the
    eigenbasis of ``H_gamma``: level ``mu_j`` is pinned through the
    half-plane map to its turning height ``q_j = mu_j/(m a)`` (the image of
    ``(0, mu_j/J)``), and each ``q`` is assigned the level with the nearest
    turning height.

    Returns ``(mask, cells)`` with ``mask[i, k]`` for ``t_grid[i], q_grid[k]``.
    """
    if not threshold > 0:
        raise ParameterError("threshold must be positive")
    E = J if E is None else E
    mu, U = np.linalg.eigh(np.asarray(H_gamma, dtype=complex))
    # F(0, mu/J) has p = 0 and q = mu/(m a); written out so non-positive levels pass through
    heights = mu / (m * a)
    q_grid = np.asarray(q_grid, dtype=float)
    level = np.argmin(np.abs(q_grid[:, None] - heights[None, :]), axis=1)
    # z(t, q) = gamma_j^dag Psi c(xi(t))^*, computed for all levels at once
    gam_psi = U.conj().T @ state.matrix
    absz2 = np.empty((len(t_grid), q_grid.size))
    for i, xi in enumerate(clock_family(E, J, t_grid)):
        c = coherent_state(rep, xi, tail_tol).coeffs
        z_levels = gam_psi @ c.conj()
        absz2[i] = np.abs(z_levels[level]) ** 2
    mask = absz2 > threshold
    cells = [SupportCell(float(t), float(q), float(absz2[i, k]), bool(mask[i, k]))
             for i, t in enumerate(t_grid) for k, q in enumerate(q_grid)]
    return mask, cells
