"""Acceptance battery: one test per shipped guarantee.

Each test is a single pass/fail line under pytest -v.  Numerical
thresholds are intentionally the shipped ones, not looser stand-ins;
wall-clock budgets are asserted where a guarantee carries one.
"""

import math
import time

import numpy as np
import pytest

from dirac_hardy import (SpinorPair, apply_hamiltonian, assemble_form,
                         build_grid, check_coercivity_bound,
                         check_gamma_equivalence, default_grid,
                         dirac_coulomb_energy, domain_diagnostics,
                         eigenfunction_exponent, find_eigenvalue,
                         lowest_eigenpairs, lowest_eigenvalues, make_coulomb,
                         mu1_gamma_derivative, pointwise_shift_inequality,
                         shooting_energy, solve_resolvent, symmetry_defect,
                         verify_hardy)

GRID = default_grid()
CHANNELS = (-1, 1, -2, 2)


def _weighted_norm(f1, f2, grid):
    w = grid.weights
    mw = grid.staggered()[1]
    return math.sqrt(float(np.dot(f1, w * f1) + np.dot(f2, mw * f2)))


def test_criterion_01_sharp_shift_holds_across_couplings():
    start = time.perf_counter()
    for nu in (0.3, 0.6, 0.9, 1.0):
        c = math.sqrt((1.0 - nu) * (1.0 + nu))
        report = verify_hardy(make_coulomb(nu), c, channels=CHANNELS,
                              grid=GRID, tol=1e-6)
        assert report.verdict == "holds", (nu, report.mu1)
    assert time.perf_counter() - start <= 60.0


def test_criterion_02_verdict_flips_across_sharp_constant():
    start = time.perf_counter()
    pot = make_coulomb(0.6)
    below = verify_hardy(pot, 0.79, channels=CHANNELS, grid=GRID, tol=1e-6)
    above = verify_hardy(pot, 0.81, channels=CHANNELS, grid=GRID, tol=1e-6)
    assert below.verdict == "holds", below.mu1
    assert above.verdict == "fails", above.mu1
    # The flip is driven by the binding channel alone.
    assert above.mu1[-1] < -1e-3
    assert min(above.mu1[ch] for ch in (1, -2, 2)) > 0.0
    assert time.perf_counter() - start <= 30.0


def test_criterion_03_ground_state_converges_with_regular_profile():
    start = time.perf_counter()
    exact = dirac_coulomb_energy(0.5, -1, 1)
    errs = []
    final = None
    for n in (1000, 2000, 4000):
        g = build_grid(1e-6, 60.0, n, "log-uniform")
        final = find_eigenvalue(make_coulomb(0.5), -1, 1, grid=g)
        errs.append(abs(final.E - exact))
    assert errs[0] > errs[1] > errs[2]
    assert errs[2] / exact <= 1e-3
    slope = eigenfunction_exponent(final.pair.phi, final.pair.grid)
    assert abs(slope - math.sqrt(0.75)) <= 0.05
    assert time.perf_counter() - start <= 60.0


def test_criterion_04_excited_level_with_shooting_cross_check():
    # The independent integrator must agree with the closed form before
    # the mesh result is compared against either.
    for k in (1, 2):
        assert abs(shooting_energy(0.5, -1, k)
                   - dirac_coulomb_energy(0.5, -1, k)) <= 1e-6
    res = find_eigenvalue(make_coulomb(0.5), -1, 2, grid=GRID)
    exact = dirac_coulomb_energy(0.5, -1, 2)
    assert abs(res.E - exact) / exact <= 5e-3


def test_criterion_05_critical_coupling_pinned_at_zero():
    pot = make_coulomb(1.0)
    magnitudes = []
    res = None
    for n in (1000, 2000, 4000):
        g = build_grid(1e-6, 60.0, n, "log-uniform")
        res = find_eigenvalue(pot, -1, 1, grid=g)
        assert res.flag == "endpoint"
        magnitudes.append(abs(res.E))
    assert magnitudes[2] <= 5e-2
    assert magnitudes[0] >= magnitudes[1] >= magnitudes[2]
    slope = eigenfunction_exponent(res.pair.phi, res.pair.grid)
    assert abs(slope - 0.0) <= 0.05
    # Contrast: at nu = 0.5 the profile keeps the regular power law.
    sub = find_eigenvalue(make_coulomb(0.5), -1, 1, grid=GRID)
    sub_slope = eigenfunction_exponent(sub.pair.phi, sub.pair.grid)
    assert abs(sub_slope - math.sqrt(0.75)) <= 0.05


def test_criterion_06_resolvent_roundtrip_seeded_battery():
    start = time.perf_counter()
    pot = make_coulomb(0.5)
    worst = 0.0
    for gamma in (1.1, 1.3, 1.5):
        rng = np.random.default_rng(20260815)
        for _ in range(100):
            f1 = rng.standard_normal(GRID.n)
            f2 = rng.standard_normal(GRID.n + 1)
            pair = solve_resolvent(f1, f2, pot, gamma, -1, GRID)
            g1, g2 = apply_hamiltonian(pair, pot)
            r1 = g1 + (1.0 - gamma) * pair.phi - f1
            r2 = g2 + (1.0 - gamma) * pair.chi - f2
            worst = max(worst, _weighted_norm(r1, r2, GRID)
                        / _weighted_norm(f1, f2, GRID))
    assert worst <= 1e-8, worst
    zero = solve_resolvent(np.zeros(GRID.n), np.zeros(GRID.n + 1), pot, 1.3,
                           -1, GRID)
    assert np.all(zero.phi == 0.0) and np.all(zero.chi == 0.0)
    assert time.perf_counter() - start <= 60.0


def test_criterion_07_shifted_operator_is_weighted_symmetric():
    # States are drawn from the operator domain by construction: each is
    # the resolvent image of a random right-hand side.
    rng = np.random.default_rng(42)
    worst = 0.0
    for nu, gamma in ((0.5, 1.3), (1.0, 0.7)):
        pot = make_coulomb(nu)
        for _ in range(100):
            p = solve_resolvent(rng.standard_normal(GRID.n),
                                rng.standard_normal(GRID.n + 1), pot, gamma,
                                -1, GRID)
            q = solve_resolvent(rng.standard_normal(GRID.n),
                                rng.standard_normal(GRID.n + 1), pot, gamma,
                                -1, GRID)
            worst = max(worst, symmetry_defect(p, q, pot, gamma).defect)
    assert worst <= 1e-10, worst


def test_criterion_08_shift_comparison_and_coercivity_battery():
    pot = make_coulomb(0.5)
    gamma, gamma_prime = 1.5, 1.2
    # Pointwise kernel bound at every node comes first; the vector
    # inequalities inherit from it.
    lhs, rhs = pointwise_shift_inequality(pot, gamma, gamma_prime, GRID)
    assert np.all(lhs <= rhs)
    c = math.sqrt(0.75)
    rng = np.random.default_rng(7)
    for _ in range(100):
        u = rng.standard_normal(GRID.n)
        assert check_gamma_equivalence(u, pot, gamma, gamma_prime, -1, GRID)
        for g in (1.2, 1.5):
            check = check_coercivity_bound(u, pot, g, c, -1, GRID)
            assert check.pointwise_ok
            assert check.holds


def test_criterion_09_coulomb_chain_and_critical_log_moment():
    rng = np.random.default_rng(11)
    for nu in (0.5, 0.9):
        pot = make_coulomb(nu)
        for _ in range(100):
            phi = rng.standard_normal(GRID.n)
            pair = SpinorPair(phi=phi, chi=np.zeros(GRID.n + 1), kappa=-1,
                              grid=GRID)
            diag = domain_diagnostics(pair, pot, nu)
            assert diag.chain_applicable
            assert diag.chain_margin >= 0.0
        ground = find_eigenvalue(pot, -1, 1, grid=GRID)
        diag = domain_diagnostics(ground.pair, pot, nu)
        assert diag.chain_applicable
        assert diag.chain_margin > 0.0
    # At critical coupling the 1/r moment of the pinned state diverges
    # logarithmically: constant increment per decade of cutoff.
    pot = make_coulomb(1.0)
    res = find_eigenvalue(pot, -1, 1, grid=GRID)
    diag = domain_diagnostics(res.pair, pot, 1.0 - 1e-6)
    tail = [s for (cut, s) in diag.log_slope_points if cut <= 1e-3]
    assert len(tail) >= 5
    spread = (max(tail) - min(tail)) / abs(np.mean(tail))
    assert spread <= 0.2, (spread, tail)


def test_criterion_10_level_monotone_with_analytic_shift_derivative():
    pot = make_coulomb(0.5)
    gammas = np.linspace(0.2, 1.8, 20)
    mus = []
    h = 1e-5
    for gamma in gammas:
        form = assemble_form(pot, float(gamma), -1, GRID)
        mu1, u1 = lowest_eigenpairs(form, 1)[0]
        mus.append(mu1)
        analytic = mu1_gamma_derivative(form, u1)
        plus = lowest_eigenvalues(
            assemble_form(pot, float(gamma) + h, -1, GRID), 1)[0]
        minus = lowest_eigenvalues(
            assemble_form(pot, float(gamma) - h, -1, GRID), 1)[0]
        centered = (plus - minus) / (2.0 * h)
        assert abs(analytic - centered) / abs(centered) <= 1e-4
    assert all(a > b for a, b in zip(mus, mus[1:]))
