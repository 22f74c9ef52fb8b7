import cmath

import numpy as np
import pytest

from bhclock.coherent import coherent_state
from bhclock.errors import ParameterError
from bhclock.paw import (
    GlobalState,
    amplitude_z,
    build_composite,
    clock_coordinates,
    clock_family,
    conditional_evolution,
    constraint_residual,
    kernel_states,
    kronecker_difference_spectrum,
    min_level_mismatch,
    paw_demo,
    product_state,
    resonant_system,
    schmidt_decompose,
    schmidt_rank,
    spacetime_support,
    spectrum_residual,
    superpose,
)
from bhclock.su11 import build_H_xi, build_rep


@pytest.fixture(scope="module")
def demo():
    return paw_demo(K=0.5, d_xi=80, J=1.0, d_gamma=2)


def random_state(rng, dg, dx):
    amp = rng.normal(size=dg * dx) + 1j * rng.normal(size=dg * dx)
    return GlobalState(amp / np.linalg.norm(amp), dg, dx)


def test_small_spectrum():
    sys = build_composite(np.diag([0.0, 1.0]), np.diag([0.0, 1.0, 2.0]))
    np.testing.assert_allclose(kronecker_difference_spectrum(sys), [-1, 0, 0, 1, 1, 2])
    assert spectrum_residual(sys) <= 1e-14
    kern = kernel_states(sys)
    assert len(kern) == 2
    for s in kern:
        assert constraint_residual(sys, s) <= 1e-14


def test_random_spectrum_residual():
    rng = np.random.default_rng(1)
    A = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    B = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
    sys = build_composite(A + A.conj().T, B + B.conj().T)
    assert spectrum_residual(sys) <= 1e-12


def test_mismatched_spectra_give_empty_kernel():
    sys = build_composite(np.diag([0.5]), np.diag([0.0, 1.0]))
    assert kernel_states(sys) == []
    assert min_level_mismatch(sys) == pytest.approx(0.5)


def test_no_resonance_in_truncated_source():
    rep, sys = resonant_system(K=1.0, d_xi=30, d_gamma=2, n_match=0)
    assert kernel_states(sys) == []
    assert min_level_mismatch(sys) > 1e-6


def test_kernel_orthonormal_and_annihilated(demo):
    _, _, rep, sys = demo
    kern = kernel_states(sys)
    V = np.array([s.amplitudes for s in kern])
    np.testing.assert_allclose(V.conj() @ V.T, np.eye(len(kern)), atol=1e-12)
    assert max(constraint_residual(sys, s) for s in kern) <= 1e-10


def test_partial_match_kernel_dimension():
    _, sys = resonant_system(K=0.5, d_xi=40, d_gamma=3, n_match=2)
    assert len(kernel_states(sys)) == 2


def test_dimension_order_enforced():
    with pytest.raises(ParameterError):
        build_composite(np.eye(3), np.eye(3))


def test_non_hermitian_rejected():
    with pytest.raises(ParameterError):
        build_composite(np.array([[0, 1], [0, 0]]), np.eye(3))


def test_accepts_hamiltonian_object():
    H = build_H_xi(build_rep(1.0, 5), 2.5)
    sys = build_composite(np.eye(2), H)
    assert sys.J == 2.5
    np.testing.assert_array_equal(sys.H_xi, H.matrix)


# --- Schmidt decomposition and amplitudes -------------------------------------

def test_product_state_rank_one():
    rng = np.random.default_rng(2)
    s = product_state(rng.normal(size=3), rng.normal(size=8) + 1j)
    assert schmidt_rank(s) == 1
    assert s.schmidt[0].c == pytest.approx(1.0)


def test_schmidt_reconstructs_state():
    s = random_state(np.random.default_rng(3), 3, 7)
    terms = schmidt_decompose(s)
    assert len(terms) == 3
    rebuilt = sum(t.c * np.outer(t.gamma_vec, t.xi_vec) for t in terms)
    np.testing.assert_allclose(rebuilt, s.matrix, atol=1e-13)
    assert sum(t.c ** 2 for t in terms) == pytest.approx(1.0)
    assert [t.c for t in terms] == sorted((t.c for t in terms), reverse=True)


def _z_table(state, rep, xis):
    basis = np.eye(state.d_gamma)
    return np.array([[amplitude_z(state, g, x, rep) for x in xis] for g in basis])


def test_z_factorises_for_product_state():
    rep = build_rep(1.0, 79)
    rng = np.random.default_rng(4)
    g = rng.normal(size=2) + 1j * rng.normal(size=2)
    x = coherent_state(rep, 0.2 - 0.1j).coeffs
    s = product_state(g, x)
    xis = [0.1, -0.3j, 0.4 + 0.2j, 0.05]
    Z = _z_table(s, rep, xis)
    sv = np.linalg.svd(Z, compute_uv=False)
    assert sv[1] <= 1e-12 * sv[0]


def test_z_does_not_factorise_when_entangled(demo):
    _, psi, rep, _ = demo
    assert schmidt_rank(psi) == 2
    Z = _z_table(psi, rep, clock_family(1.0, 1.0, np.linspace(-0.5, 0.5, 6)))
    sv = np.linalg.svd(Z, compute_uv=False)
    assert sv[1] > 1e-3 * sv[0]


def test_amplitude_bounded():
    rng = np.random.default_rng(5)
    rep = build_rep(0.5, 39)
    s = random_state(rng, 2, 40)
    for _ in range(20):
        g = rng.normal(size=2) + 1j * rng.normal(size=2)
        g /= np.linalg.norm(g)
        xi = 0.6 * cmath.exp(2j * np.pi * rng.uniform())
        assert abs(amplitude_z(s, g, xi, rep)) ** 2 <= 1 + 1e-12


def test_global_phase_invariance(demo):
    _, psi, rep, sys = demo
    shifted = GlobalState(psi.amplitudes * cmath.exp(1.234j), psi.d_gamma, psi.d_xi)
    g = np.array([1.0, 0.0])
    for xi in (0.1, 0.3j, -0.2 + 0.4j):
        assert abs(amplitude_z(shifted, g, xi, rep)) == pytest.approx(abs(amplitude_z(psi, g, xi, rep)), rel=1e-13)
    fam = clock_family(1.0, 1.0, np.linspace(-0.3, 0.3, 5))
    f1 = [r.fidelity for r in conditional_evolution(sys, psi, fam, rep)]
    f2 = [r.fidelity for r in conditional_evolution(sys, shifted, fam, rep)]
    np.testing.assert_allclose(f1, f2, atol=1e-13)


def test_dimension_mismatch_rejected():
    s = random_state(np.random.default_rng(6), 2, 10)
    with pytest.raises(ParameterError):
        amplitude_z(s, [1, 0], 0.1, build_rep(1.0, 5))


# --- clock ------------------------------------------------------------------

def test_clock_coordinates_origin():
    assert clock_coordinates(0, 2.0) == (0.0, 2.0)


def test_clock_family_round_trip():
    ts = np.linspace(-2, 2, 9)
    for t, xi in zip(ts, clock_family(1.5, 0.7, ts)):
        pt = clock_coordinates(xi, 0.7)
        assert pt.t == pytest.approx(t, abs=1e-12)
        assert pt.E == pytest.approx(1.5, rel=1e-12)


def test_demo_report(demo):
    report, psi, _, _ = demo
    assert report["kernel_dim"] == 2
    assert report["max_residual"] <= 1e-10
    assert report["spectrum_residual"] <= 1e-10
    assert report["schmidt_rank"] == 2
    assert report["min_fidelity"] >= 0.99
    assert len(report["fidelity_trace"]) == 21


@pytest.mark.parametrize("K", [1.0, 2.0])
def test_demo_other_indices(K):
    report, *_ = paw_demo(K=K, d_xi=80)
    assert report["kernel_dim"] == 2
    assert report["min_fidelity"] >= 0.99


def test_wrong_time_scale_breaks_evolution(demo):
    _, psi, rep, sys = demo
    fam = clock_family(1.0, 1.0, np.linspace(-1.0, 1.0, 11))
    good = conditional_evolution(sys, psi, fam, rep)
    assert min(r.fidelity for r in good) >= 1 - 1e-9
    for scale in (-rep.K, 1.0, 2.0 * rep.K):
        rows = conditional_evolution(sys, psi, fam, rep, time_scale=scale)
        assert min(r.fidelity for r in rows) < 1 - 1e-3


def test_trivial_particle_gives_unit_fidelity():
    rep = build_rep(1.0, 59)
    sys = build_composite(np.zeros((2, 2)), build_H_xi(rep, 1.0))
    s = product_state([0.6, 0.8j], coherent_state(rep, 0.3 + 0.1j).coeffs)
    rows = conditional_evolution(sys, s, clock_family(1.0, 1.0, np.linspace(-1, 1, 9)), rep)
    assert all(r.fidelity == pytest.approx(1.0, abs=1e-12) for r in rows)


def test_conditional_requires_constant_energy(demo):
    _, psi, rep, sys = demo
    with pytest.raises(ParameterError):
        conditional_evolution(sys, psi, [0.1, 0.5j], rep)


def test_superpose_stays_in_kernel(demo):
    _, _, _, sys = demo
    s = superpose(kernel_states(sys))
    assert np.linalg.norm(s.amplitudes) == pytest.approx(1.0)
    assert constraint_residual(sys, s) <= 1e-10


# --- support ------------------------------------------------------------------

def test_support_of_product_state_is_cartesian():
    rep = build_rep(1.0, 199)
    Hg = np.diag([0.5, 1.5])
    s = product_state([1.0, 0.0], coherent_state(rep, 0.2 + 0.1j).coeffs)
    ts = np.linspace(-1.5, 1.5, 13)
    qs = np.linspace(0.0, 2.0, 8)
    mask, cells = spacetime_support(s, rep, Hg, ts, qs, threshold=1e-3)
    t_on = mask.any(axis=1)
    q_on = mask.any(axis=0)
    np.testing.assert_array_equal(mask, np.outer(t_on, q_on))
    # level 0.5 owns heights below 1.0
    np.testing.assert_array_equal(q_on, qs < 1.0)
    assert len(cells) == ts.size * qs.size


def test_support_amplitudes_factorise_for_product_state():
    rep = build_rep(1.0, 59)
    Hg = np.diag([0.5, 1.5])
    s = product_state([0.6, 0.8], coherent_state(rep, -0.1j).coeffs)
    ts = np.linspace(-1, 1, 5)
    qs = np.linspace(0.0, 2.0, 6)
    _, cells = spacetime_support(s, rep, Hg, ts, qs)
    Z = np.array([c.abs_z2 for c in cells]).reshape(ts.size, qs.size)
    sv = np.linalg.svd(Z, compute_uv=False)
    assert sv[1] <= 1e-12 * sv[0]


def test_support_threshold(demo):
    _, psi, rep, sys = demo
    ts, qs = np.linspace(-0.5, 0.5, 5), np.linspace(0.0, 3.0, 7)
    mask, _ = spacetime_support(psi, rep, sys.H_gamma, ts, qs, threshold=2.0)
    assert not mask.any()
    mask, _ = spacetime_support(psi, rep, sys.H_gamma, ts, qs, threshold=1e-12)
    assert mask.any()
    with pytest.raises(ParameterError):
        spacetime_support(psi, rep, sys.H_gamma, ts, qs, threshold=0.0)
