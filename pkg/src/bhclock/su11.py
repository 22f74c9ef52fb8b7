"""Truncated matrix representation of the rescaled su(1,1) algebra.

Generators are normalised by the Bargmann index, so that

    [k+, k-] = -(2/K) k0,    [k0, k+-] = +-(1/K) k+-,

and ``1/K`` plays the role of the quantumness parameter.  Basis states
``|K, m>`` are labelled by ``m = 0 .. cutoff``; the representation is the
positive discrete series with real, non-negative ladder elements.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError


@dataclass(frozen=True)
class Su11Rep:
    """Rescaled generators ``k0, k+, k-`` on a Fock space of ``cutoff + 1`` states."""

    K: float
    cutoff: int
    k0: np.ndarray
    kplus: np.ndarray
    kminus: np.ndarray

    @property
    def dim(self):
        return self.cutoff + 1

    @property
    def quantumness(self):
        return 1.0 / self.K


@dataclass(frozen=True)
class HamiltonianXi:
    matrix: np.ndarray
    J: float


def check_bargmann(K):
    K = float(K)
    if not np.isfinite(K) or K < 0.5:
        raise ParameterError(f"Bargmann index K must be >= 1/2, got {K!r}")
    return K


def build_rep(K, cutoff):
    """Build the truncated representation for Bargmann index ``K``.

    Parameters
    ----------
    K : float
        Bargmann index, ``K >= 1/2`` (half-integers allowed).
    cutoff : int
        Largest Fock label kept, ``cutoff >= 2``.

    Returns
    -------
    Su11Rep
    """
    K = check_bargmann(K)
    if int(cutoff) != cutoff or cutoff < 2:
        raise ParameterError(f"cutoff must be an integer >= 2, got {cutoff!r}")
    cutoff = int(cutoff)

    m = np.arange(cutoff + 1, dtype=float)
    k0 = np.diag(1.0 + m / K).astype(complex)
    # <K, m+1| k+ |K, m> = sqrt((m + 1)(2K + m)) / K
    ladder = np.sqrt((m[:-1] + 1.0) * (2.0 * K + m[:-1])) / K
    kplus = np.diag(ladder, k=-1).astype(complex)
    kminus = kplus.conj().T.copy()
    for a in (k0, kplus, kminus):
        a.setflags(write=False)
    return Su11Rep(K=K, cutoff=cutoff, k0=k0, kplus=kplus, kminus=kminus)


def _interior(rep):
    if rep.cutoff < 2:
        raise ParameterError("commutator checks need cutoff >= 2")
    return slice(0, rep.cutoff - 1)


def _maxabs(a):
    return float(np.max(np.abs(a))) if a.size else 0.0


def commutator_residual(rep):
    """Largest violation of the three commutation rules away from the cutoff.

    Only the block ``m <= cutoff - 2`` is inspected, where truncation does
    not touch the products.
    """
    s = _interior(rep)
    K = rep.K
    kp, km, k0 = rep.kplus, rep.kminus, rep.k0
    r1 = kp @ km - km @ kp + (2.0 / K) * k0
    r2 = k0 @ kp - kp @ k0 - kp / K
    r3 = k0 @ km - km @ k0 + km / K
    return max(_maxabs(r[s, s]) for r in (r1, r2, r3))


def casimir_matrix(rep):
    """``k0^2 - (k+ k- + k- k+)/2``; equals ``(K - 1)/K`` times identity in the interior."""
    kp, km, k0 = rep.kplus, rep.kminus, rep.k0
    return k0 @ k0 - 0.5 * (kp @ km + km @ kp)


def casimir_interior_error(rep):
    """Max deviation of the interior Casimir block from ``(K - 1)/K * I``."""
    s = _interior(rep)
    block = casimir_matrix(rep)[s, s]
    target = (rep.K - 1.0) / rep.K
    return _maxabs(block - target * np.eye(block.shape[0]))


def build_H_xi(rep, J):
    """Source Hamiltonian ``J [k0 - (i/2)(k+ - k-)]`` on the truncated space."""
    J = float(J)
    if not np.isfinite(J) or J <= 0:
        raise ParameterError(f"coupling J must be finite and > 0, got {J!r}")
    mat = J * (rep.k0 - 0.5j * (rep.kplus - rep.kminus))
    mat.setflags(write=False)
    return HamiltonianXi(matrix=mat, J=J)


def hermiticity_residual(mat):
    return _maxabs(mat - mat.conj().T)
