"""Acceptance suite: one test per ship criterion, each printing a PASS line
with its measured margin.  Run with `pytest -v tests/test_acceptance.py`
(add -s to see the margin lines on passing runs)."""

import math
import time

import numpy as np
import pytest

from qptscale import (DickeParams, SqueezeMap, SymmetricMatrix, collapse_check,
                      convergence_gap, critical_coupling, echo_exact, eigh_dense,
                      fidelity_gaussian, fidelity_lmg, fidelity_scaling,
                      fit_envelope, ground_expansion, lanczos_ground, min_echo,
                      mode_energies, mp_scaling, overlap_matrix,
                      semiclassical_envelope, spectral_propagate,
                      squeeze_fidelity, survival_closed)
from qptscale.echo import EchoSeries, SemiclassicalParams
from conftest import random_sparse_symmetric


def ratio_map(eta):
    return SqueezeMap(math.atanh((math.sqrt(eta) - 1.0) / (math.sqrt(eta) + 1.0)))


def test_criterion_1_fidelity_scaling_law():
    start = time.perf_counter()
    lc = critical_coupling(1.0, 1.0)
    worst = {1e-3: 0.0, 1e-4: 0.0}
    for scale, tol in ((1e-3, 1e-3), (1e-4, 1e-4)):
        for eta in (1e-3, 1e-2, 1e-1, 0.5):
            for sign in (-1.0, 1.0):  # normal and super-radiant sides
                l1 = lc * (1.0 + sign * eta * scale)
                l2 = lc * (1.0 + sign * scale)
                got = fidelity_gaussian(DickeParams(1.0, 1.0, l1),
                                        DickeParams(1.0, 1.0, l2))
                dev = abs(got - fidelity_scaling(eta))
                worst[scale] = max(worst[scale], dev)
                assert dev <= tol
    elapsed = time.perf_counter() - start
    assert elapsed < 1.0
    print(f"ACCEPTANCE 1 PASS fidelity scaling law: worst dev "
          f"{worst[1e-3]:.2e} @1e-3, {worst[1e-4]:.2e} @1e-4 ({elapsed:.2f}s)")


def test_criterion_2_lmg_dicke_universality():
    start = time.perf_counter()
    worst = 0.0
    for gamma in (0.0, 0.5):
        for eta in (1e-2, 1e-1):
            h2 = 1.0 + 1e-3
            h1 = 1.0 + eta * 1e-3
            dev = abs(fidelity_lmg(gamma, h1, h2) - fidelity_scaling(eta))
            worst = max(worst, dev)
            assert dev <= 1e-3
    elapsed = time.perf_counter() - start
    assert elapsed < 1.0
    print(f"ACCEPTANCE 2 PASS lmg/dicke universality: worst dev {worst:.2e} "
          f"({elapsed:.2f}s)")


def test_criterion_3_convergence_study():
    start = time.perf_counter()
    series = convergence_gap(1.0, 1.0, 0.495, 0.45, [8, 16, 32, 64, 128])
    gaps = np.array([entry.gap for entry in series.entries])
    assert np.all(np.diff(gaps) < 0.0), "D must decrease strictly"
    slopes = np.diff(np.log(gaps)) / np.diff(np.log([8, 16, 32, 64, 128]))
    margins = -np.diff(slopes)
    assert np.all(margins > 0.0), "successive log-log slopes must steepen"
    elapsed = time.perf_counter() - start
    assert elapsed < 300.0
    print(f"ACCEPTANCE 3 PASS convergence study: D {gaps[0]:.3e} -> {gaps[-1]:.3e}, "
          f"slopes {np.round(slopes, 3)}, min concavity margin {margins.min():.3f} "
          f"({elapsed:.1f}s)")


def test_criterion_4_echo_minimum_law():
    start = time.perf_counter()
    worst = 0.0
    for eta in (1e-4, 1e-3, 1e-2, 1e-1):
        t = np.linspace(0.0, math.pi, 20001)
        series = survival_closed(ratio_map(eta), 1.0, t)
        dev = abs(min_echo(series) - mp_scaling(eta))
        worst = max(worst, dev)
        assert dev <= 1e-6
    elapsed = time.perf_counter() - start
    assert elapsed < 1.0
    print(f"ACCEPTANCE 4 PASS echo minimum law: worst dev {worst:.2e} "
          f"({elapsed:.2f}s)")


def test_criterion_5_echo_collapse():
    start = time.perf_counter()
    lc = critical_coupling(1.0, 1.0)
    tau = np.linspace(0.0, math.pi, 257)

    def singlemode(eta, scale):
        l1 = lc * (1.0 - eta * scale)
        l2 = lc * (1.0 - scale)
        e1a = mode_energies(DickeParams(1.0, 1.0, l1)).e1
        e1b = mode_energies(DickeParams(1.0, 1.0, l2)).e1
        m = SqueezeMap(0.5 * math.log(e1b / e1a))
        return survival_closed(m, e1a, tau / e1a, meta={"scale": scale})

    groups = [(eta, [singlemode(eta, s) for s in (1e-2, 1e-3)])
              for eta in (1e-2, 1e-3)]
    report = collapse_check(groups)
    worst = max(group.spread for group in report.groups)
    assert worst <= 1e-4

    def exact_member(n_atoms, eta, scale):
        l1 = lc * (1.0 - eta * scale)
        l2 = lc * (1.0 - scale)
        e1 = mode_energies(DickeParams(1.0, 1.0, l1)).e1
        return echo_exact(1.0, 1.0, n_atoms, n_atoms, l1, l2, tau / e1)

    spreads = {}
    for n_atoms in (32, 64):
        members = [exact_member(n_atoms, 0.5, s) for s in (0.5, 0.25)]
        spreads[n_atoms] = collapse_check([(0.5, members)]).groups[0].spread
    assert spreads[64] < spreads[32]
    elapsed = time.perf_counter() - start
    assert elapsed < 600.0
    print(f"ACCEPTANCE 5 PASS echo collapse: single-mode spread {worst:.2e}, "
          f"exact spread {spreads[32]:.3e} (N=32) -> {spreads[64]:.3e} (N=64) "
          f"({elapsed:.1f}s)")


def test_criterion_6_echo_shape():
    start = time.perf_counter()
    # near-critical pair: eta = 0.3 with the second coupling 0.1% below
    # critical, echo built from the exact zero-mode frequencies
    lc = critical_coupling(1.0, 1.0)
    eta, scale = 0.3, 1e-3
    l1 = lc * (1.0 - eta * scale)
    spectrum = mode_energies(DickeParams(1.0, 1.0, l1))
    t_fast = 2.0 * math.pi / spectrum.e2
    t_echo = math.pi / spectrum.e1
    t = np.linspace(0.0, 0.5 * t_echo, 4001)
    series = survival_closed(ratio_map(eta), spectrum.e1, t)
    fit = fit_envelope(series, (t_fast, 0.4 * t_echo))
    assert fit.max_log_residual <= 0.05

    grid = np.linspace(0.0, 20.0, 400)
    synthetic = semiclassical_envelope(SemiclassicalParams(0.5, 0.2, 1.0), grid)
    round_trip = fit_envelope(
        EchoSeries(t=grid, tau=grid, echo=synthetic, omega1=1.0, meta={}),
        (0.0, 20.0))
    assert round_trip.params.gamma == pytest.approx(0.5, rel=0.01)
    assert round_trip.params.xi == pytest.approx(0.2, rel=0.01)
    elapsed = time.perf_counter() - start
    assert elapsed < 60.0
    print(f"ACCEPTANCE 6 PASS echo shape: envelope residual "
          f"{fit.max_log_residual:.3f} (<= 0.05), round-trip gamma "
          f"{round_trip.params.gamma:.4f}, xi {round_trip.params.xi:.4f} "
          f"({elapsed:.1f}s)")


def test_criterion_7_solver_integrity():
    start = time.perf_counter()
    rng = np.random.default_rng(7)

    worst_rec, worst_orth = 0.0, 0.0
    for _ in range(100):
        dim = int(rng.integers(5, 201))
        a = rng.standard_normal((dim, dim))
        m = eigh_dense((a + a.T) / 2.0)
        sym = SymmetricMatrix.from_dense((a + a.T) / 2.0)
        rec = (m.vectors * m.values) @ m.vectors.T
        worst_rec = max(worst_rec, float(np.max(np.abs(rec - sym.dense))
                                         / sym.frobenius()))
        worst_orth = max(worst_orth, float(np.max(np.abs(
            m.vectors.T @ m.vectors - np.eye(dim)))))
    assert worst_rec <= 1e-9
    assert worst_orth <= 1e-10

    worst_gap = 0.0
    for k in range(100):
        dim = int(rng.integers(20, 501))
        sym = random_sparse_symmetric(rng, dim)
        e_dense = eigh_dense(sym).values[0]
        e_kry, _ = lanczos_ground(sym, dim, 1e-10, seed=k)
        worst_gap = max(worst_gap, abs(e_dense - e_kry))
    assert worst_gap <= 1e-8

    worst_unit = 0.0
    for _ in range(100):
        dim = int(rng.integers(4, 120))
        a = rng.standard_normal((dim, dim))
        dec = eigh_dense((a + a.T) / 2.0)
        psi = rng.standard_normal(dim)
        psi /= np.linalg.norm(psi)
        weights = (dec.vectors.T @ psi) ** 2
        worst_unit = max(worst_unit, abs(float(weights.sum()) - 1.0))
        assert abs(spectral_propagate(dec, psi, 1.3)) <= 1.0 + 1e-12
    assert worst_unit <= 1e-10

    elapsed = time.perf_counter() - start
    assert elapsed < 120.0
    print(f"ACCEPTANCE 7 PASS solver integrity: rec {worst_rec:.2e}, orth "
          f"{worst_orth:.2e}, lanczos/dense {worst_gap:.2e}, unitarity "
          f"{worst_unit:.2e} ({elapsed:.1f}s)")


def test_criterion_8_cross_module_identities():
    worst_fid, worst_col = 0.0, 0.0
    for eta in (1e-4, 1e-3, 1e-2, 1e-1, 0.5, 1.0, 2.0, 10.0):
        m = ratio_map(eta)
        worst_fid = max(worst_fid,
                        abs(fidelity_scaling(eta) - squeeze_fidelity(m)))
    assert worst_fid <= 1e-12
    for r in (0.1, -0.6, 1.2):
        m = SqueezeMap(r)
        column = overlap_matrix(m, 400, m_max=0)[0::2, 0]
        amps = np.abs(ground_expansion(m, 200).amplitudes)
        worst_col = max(worst_col, float(np.max(np.abs(column - amps))))
    assert worst_col <= 1e-12
    print(f"ACCEPTANCE 8 PASS cross-module identities: fidelity dev "
          f"{worst_fid:.2e}, overlap column dev {worst_col:.2e}")
