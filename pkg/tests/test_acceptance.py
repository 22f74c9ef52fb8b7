"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -s`` to see the lines, or
``python tests/test_acceptance.py`` for the bare table.
"""

import cmath
import contextlib
import io
import math

import numpy as np
import pytest

from bhclock import cli, coherent, horizon, paw, su11, thermal

KS = (0.5, 1.0, 2.5, 10.0)


def _report(num, title, ok, detail):
    print(f"{'PASS' if ok else 'FAIL'}  criterion {num:>2}  {title}: {detail}")
    return ok


def _random_disk(rng, n, rmax):
    return rmax * np.sqrt(rng.uniform(size=n)) * np.exp(2j * np.pi * rng.uniform(size=n))


def criterion_1():
    worst_c = worst_cas = 0.0
    for K in KS:
        rep = su11.build_rep(K, 60)
        worst_c = max(worst_c, su11.commutator_residual(rep))
        worst_cas = max(worst_cas, su11.casimir_interior_error(rep))
    ok = worst_c <= 1e-10 and worst_cas <= 1e-10
    return _report(1, "algebra exactness", ok,
                   f"commutator {worst_c:.2e}, Casimir {worst_cas:.2e} (limit 1e-10)")


def criterion_2():
    rng = np.random.default_rng(2)
    worst = 0.0
    for K in (0.5, 1.0, 2.5):
        cut = coherent.min_cutoff(0.8, K, 1e-17)
        a, b = _random_disk(rng, 200, 0.8), _random_disk(rng, 200, 0.8)
        for x1, x2 in zip(a, b):
            series = np.vdot(coherent.fock_coefficients(K, x1, cut), coherent.fock_coefficients(K, x2, cut))
            worst = max(worst, abs(coherent.overlap(x1, x2, K) - series))
    return _report(2, "overlap vs Fock series", worst <= 1e-10, f"max dev {worst:.2e} (limit 1e-10)")


def criterion_3():
    radii = np.linspace(0.0, 0.85, 15)
    angles = np.linspace(0.0, 2 * np.pi, 15, endpoint=False)
    J = 1.0
    worst = 0.0
    for K in KS:
        rep = su11.build_rep(K, coherent.min_cutoff(radii[-1], K, 1e-15) + 8)
        H = su11.build_H_xi(rep, J).matrix
        for r in radii:
            for th in angles:
                xi = cmath.rect(r, th)
                c = coherent.coherent_state(rep, xi, 1e-12).coeffs
                e = np.vdot(c, H @ c).real
                target = J * coherent.disk_to_halfplane(xi).w
                worst = max(worst, abs(e - target) / target)
    return _report(3, "energy identity", worst <= 1e-8, f"max rel err {worst:.2e} (limit 1e-8)")


def criterion_4():
    rows = coherent.overlap_decay_scan(0, 0.6, [1, 2, 4, 8, 16, 32])
    slope, _, _ = coherent.fit_log_overlap(rows)
    dslope = abs(slope - math.log(0.64))
    fl = coherent.energy_fluctuation_scan(0.4 + 0.1j, 1.0, [4, 16])
    ratio = fl[1].ratio / fl[0].ratio
    ok = dslope <= 1e-6 and abs(ratio - 0.5) <= 0.05 * 0.5
    return _report(4, "crossover concentration", ok,
                   f"slope err {dslope:.2e} (limit 1e-6), ratio(16)/ratio(4) = {ratio:.6f} (0.5 +/- 5%)")


def criterion_5():
    cfg = thermal.TwoModeConfig(N_xi=1, J=1.0, n_cut=120)
    geo = 0.0
    for xi in (0.3, 0.6 * cmath.exp(0.4j), -0.5j):
        th = thermal.reduce_to_R(thermal.two_mode_squeezed(xi, cfg))
        lam = abs(xi) ** 2
        ref = (1 - lam) * lam ** np.arange(cfg.n_cut + 1)
        geo = max(geo, float(np.max(np.abs(th.rho - np.diag(ref)))))
    boltz = split = 0.0
    for N in (1, 3):
        tcfg = thermal.TwoModeConfig(N_xi=N, J=1.0)
        for r in np.linspace(0.05, 0.9, 12):
            for a in np.linspace(0.0, 2 * np.pi, 12, endpoint=False):
                xi = cmath.rect(r, a)
                om, T = thermal.effective_frequency(xi, tcfg), thermal.effective_temperature(xi, tcfg)
                if om <= 0:
                    continue
                boltz = max(boltz, abs(math.exp(-om / T) - r * r))
                split = max(split, thermal.energy_split_residual(xi, tcfg))
    spot = abs(thermal.effective_temperature(0.5, thermal.TwoModeConfig()) - 1 / math.log(4))
    ok = geo <= 1e-12 and boltz <= 1e-12 and split <= 1e-12 and spot <= 1e-12
    return _report(5, "two-mode chain", ok,
                   f"geometric {geo:.1e}, Boltzmann {boltz:.1e}, split {split:.1e}, T(0.5) {spot:.1e} (limit 1e-12)")


def criterion_6():
    rng = np.random.default_rng(6)
    rmax = 0.8
    cfg = thermal.TwoModeConfig(N_xi=1, J=1.0, n_cut=thermal.required_n_cut(rmax, 1e-16))
    rep = su11.build_rep(0.5, coherent.min_cutoff(rmax, 0.5, 1e-16) + 2)
    H = su11.build_H_xi(rep, 1.0).matrix
    worst = 0.0
    for xi in _random_disk(rng, 50, rmax):
        c = coherent.coherent_state(rep, xi).coeffs
        e_alg = np.vdot(c, H @ c).real
        e_pair = thermal.pair_energy(thermal.two_mode_squeezed(xi, cfg), cfg)
        worst = max(worst, abs(e_alg - e_pair))
    return _report(6, "two-mode vs algebra", worst <= 1e-10, f"max dev {worst:.2e} (limit 1e-10)")


def criterion_7():
    nat = horizon.schwarzschild_params(1.0)
    T_H = horizon.hawking_temperature(nat)
    worst = 0.0
    for N in (1, 2, 5):
        cfg = thermal.TwoModeConfig(N_xi=N, J=1.0)
        pt = thermal.solve_isotherm_ray(T_H, cfg, 0.0)
        exact = math.exp(-1.0 / (2 * N * T_H))
        worst = max(worst, abs(abs(pt.xi) - exact) / exact)
    nat_txt = f"{T_H:.6g}"
    sun = horizon.schwarzschild_params(horizon.SOLAR_MASS_KG, "si")
    si_txt = f"{horizon.hawking_temperature_kelvin(sun):.3g}"
    ok = worst <= 1e-10 and nat_txt == "0.0397887" and si_txt == "6.17e-08"
    return _report(7, "Hawking matching", ok,
                   f"root rel err {worst:.1e} (limit 1e-10), T_H natural {nat_txt}, solar {si_txt} K")


def criterion_8():
    nat = horizon.schwarzschild_params(1.0)
    rows, traj = horizon.geodesic_comparison(nat, q0_ratio=1e-3)
    err = max(r.rel_err for r in rows)
    rows2, traj2 = horizon.geodesic_comparison(nat, q0_ratio=5e-4)
    err2 = max(r.rel_err for r in rows2)
    drift = max(traj.energy_drift, traj2.energy_drift)
    ratio = err2 / err
    ok = err <= 0.01 and drift <= 1e-9 and 0.4 <= ratio <= 0.6
    return _report(8, "geodesic limit", ok,
                   f"max rel err {err:.3e} (limit 0.01), drift {drift:.1e} (limit 1e-9), halving ratio {ratio:.3f}")


def criterion_9():
    rng = np.random.default_rng(9)
    m, a, J = 1.0, 0.25, 1.0
    worst, used = 0.0, 0
    while used < 1000:
        v, w = rng.uniform(-3.0, 3.0), rng.uniform(0.05, 20.0)
        p, q, valid = horizon.halfplane_to_phase_space((v, w), m, a, J)
        if not valid:
            continue
        used += 1
        worst = max(worst, abs(horizon.near_horizon_hamiltonian(p, q, m, a) - J * w) / (J * w))
    E = 0.8
    t_star = horizon.horizon_crossing_time(E, m, a)
    samples = horizon.emergent_trajectory(E, m, a, np.linspace(-t_star, t_star, 201)[1:-1])
    drift = max(abs(s.p ** 2 / (2 * m) + m * a * s.q - E) / E for s in samples)
    ok = worst <= 1e-12 and drift <= 1e-12
    return _report(9, "map pullback", ok, f"pullback {worst:.1e}, emergent drift {drift:.1e} (limit 1e-12)")


def criterion_10():
    report, *_ = paw.paw_demo(K=0.5, d_xi=80, J=1.0, d_gamma=2, t_max=0.5)
    _, sys3 = paw.resonant_system(K=0.5, d_xi=80, d_gamma=3, n_match=2)
    kern3 = paw.kernel_states(sys3)
    res3 = max((paw.constraint_residual(sys3, s) for s in kern3), default=math.inf)
    resid = max(report["max_residual"] if report["max_residual"] is not None else math.inf, res3)
    spectrum = max(report["spectrum_residual"], paw.spectrum_residual(sys3))
    dims_ok = report["kernel_dim"] == 2 and len(kern3) == 2
    fid = report["min_fidelity"] if report["min_fidelity"] is not None else math.nan
    ok = dims_ok and resid <= 1e-12 and fid >= 0.99 and spectrum <= 1e-10
    return _report(10, "PaW demo", ok,
                   f"kernel dims {report['kernel_dim']},{len(kern3)} (engineered 2,2), residual {resid:.1e}, "
                   f"min fidelity {fid:.12f}, spectrum {spectrum:.1e}")


def criterion_11(tmp_root):
    differing = []
    for command in cli.COMMANDS:
        outs = []
        for rep in ("a", "b"):
            d = tmp_root / command / rep
            with contextlib.redirect_stdout(io.StringIO()):
                code = cli.main([command, "--seed", "11", "--out", str(d)])
            if code != 0:
                differing.append(f"{command} exit {code}")
            outs.append({p.name: p.read_bytes() for p in sorted(d.iterdir())})
        if outs[0] != outs[1]:
            differing.append(command)
    return _report(11, "determinism", not differing,
                   "all artifacts byte-identical" if not differing else f"differs: {', '.join(differing)}")


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
            criterion_6, criterion_7, criterion_8, criterion_9, criterion_10]


@pytest.mark.parametrize("crit", CRITERIA, ids=[f"criterion_{i}" for i in range(1, 11)])
def test_criterion(crit):
    assert crit()


def test_criterion_11(tmp_path):
    assert criterion_11(tmp_path)


if __name__ == "__main__":
    import tempfile
    from pathlib import Path

    results = [c() for c in CRITERIA]
    with tempfile.TemporaryDirectory() as d:
        results.append(criterion_11(Path(d)))
    raise SystemExit(0 if all(results) else 1)
