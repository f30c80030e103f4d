"""Hamiltonian action, Schur resolvent, symmetry, domain indicators."""

import math
import warnings

import numpy as np
import pytest

from dirac_hardy import (PreconditionError, ResolventConditioningWarning,
                         SingularResolventError, SpinorPair, apply_hamiltonian,
                         assemble_form, build_grid, domain_diagnostics,
                         find_eigenvalue, lowest_eigenpairs, make_coulomb,
                         solve_resolvent, symmetry_defect)

GRID = build_grid(1e-6, 60.0, 1200, "log-uniform")


def _random_pair(rng, kappa, grid):
    return SpinorPair(phi=rng.standard_normal(grid.n),
                      chi=rng.standard_normal(grid.n + 1),
                      kappa=kappa, grid=grid)


def _weighted_norm(f1, f2, grid):
    w = grid.weights
    mw = grid.staggered()[1]
    return math.sqrt(float(np.dot(f1, w * f1) + np.dot(f2, mw * f2)))


def test_hamiltonian_action_is_linear():
    rng = np.random.default_rng(1)
    pot = make_coulomb(0.5)
    p = _random_pair(rng, -1, GRID)
    q = _random_pair(rng, -1, GRID)
    s = SpinorPair(phi=p.phi + 2.0 * q.phi, chi=p.chi + 2.0 * q.chi,
                   kappa=-1, grid=GRID)
    gp1, gp2 = apply_hamiltonian(p, pot)
    gq1, gq2 = apply_hamiltonian(q, pot)
    gs1, gs2 = apply_hamiltonian(s, pot)
    assert np.allclose(gs1, gp1 + 2.0 * gq1, rtol=1e-12, atol=1e-9)
    assert np.allclose(gs2, gp2 + 2.0 * gq2, rtol=1e-12, atol=1e-9)


def test_resolvent_roundtrip_small_residual():
    rng = np.random.default_rng(2)
    pot = make_coulomb(0.5)
    for gamma in (1.1, 1.5):
        f1 = rng.standard_normal(GRID.n)
        f2 = rng.standard_normal(GRID.n + 1)
        pair = solve_resolvent(f1, f2, pot, gamma, -1, GRID)
        g1, g2 = apply_hamiltonian(pair, pot)
        r1 = g1 + (1.0 - gamma) * pair.phi - f1
        r2 = g2 + (1.0 - gamma) * pair.chi - f2
        assert _weighted_norm(r1, r2, GRID) <= 1e-10 * _weighted_norm(f1, f2, GRID)


def test_resolvent_of_zero_is_exactly_zero():
    pot = make_coulomb(0.5)
    pair = solve_resolvent(np.zeros(GRID.n), np.zeros(GRID.n + 1), pot, 1.3,
                           -1, GRID)
    assert np.all(pair.phi == 0.0)
    assert np.all(pair.chi == 0.0)


def test_resolvent_rejects_shift_past_first_level():
    # Above the ground crossing the Schur matrix loses definiteness and
    # the banded Cholesky factorization must report it, not crash.
    pot = make_coulomb(0.5)
    rng = np.random.default_rng(3)
    f1 = rng.standard_normal(GRID.n)
    f2 = rng.standard_normal(GRID.n + 1)
    with pytest.raises(SingularResolventError):
        solve_resolvent(f1, f2, pot, 1.95, -1, GRID)


def test_resolvent_shape_mismatch_rejected():
    pot = make_coulomb(0.5)
    with pytest.raises(PreconditionError):
        solve_resolvent(np.zeros(GRID.n), np.zeros(GRID.n), pot, 1.3, -1, GRID)


def test_symmetry_defect_at_rounding_level():
    rng = np.random.default_rng(4)
    for nu, gamma in ((0.5, 1.3), (1.0, 0.7)):
        pot = make_coulomb(nu)
        for _ in range(5):
            p = _random_pair(rng, -1, GRID)
            q = _random_pair(rng, -1, GRID)
            rep = symmetry_defect(p, q, pot, gamma)
            assert abs(rep.defect) <= 1e-12
            assert rep.pairing_pq == pytest.approx(rep.pairing_qp, rel=1e-10)


def test_symmetry_defect_schur_decomposition_consistency():
    # The diagonal shifted pairing equals the eliminated-channel form
    # minus the weighted remainder of the lower component, exactly.
    rng = np.random.default_rng(5)
    pot = make_coulomb(0.5)
    p = _random_pair(rng, -1, GRID)
    rep = symmetry_defect(p, p, pot, 1.3)
    assert rep.schur_value == pytest.approx(rep.pairing_pq, rel=1e-12)
    assert rep.schur_value == pytest.approx(
        rep.schur_part_form - rep.schur_part_weighted, rel=1e-12)


def test_ground_state_diagnostics_subcritical():
    pot = make_coulomb(0.5)
    res = find_eigenvalue(pot, -1, 1, grid=GRID)
    diag = domain_diagnostics(res.pair, pot, 0.5)
    assert diag.chain_applicable
    assert diag.chain_lhs <= diag.chain_rhs
    assert diag.chain_margin > 0.1
    assert diag.r_inv_integral > 0.0
    # At the root shift the lower component is exactly the eliminated
    # one, so the Schur remainder vanishes there (not at other shifts).
    at_root = domain_diagnostics(res.pair, pot, res.gamma_star)
    assert at_root.schur_defect < 1e-9
    assert diag.schur_defect > at_root.schur_defect
    # A subcritical state has an integrable 1/r moment: the truncated
    # integrals converge, so the interval slopes die away.
    slopes = [s for _, s in diag.log_slope_points]
    assert abs(slopes[-1]) < 0.1 * max(abs(s) for s in slopes)


def test_diagnostics_chain_marked_inapplicable_above_coupling():
    pot = make_coulomb(0.5)
    res = find_eigenvalue(pot, -1, 1, grid=GRID)
    diag = domain_diagnostics(res.pair, pot, 1.2)
    assert not diag.chain_applicable


def test_critical_truncated_moment_grows_logarithmically():
    # At nu = 1 the pinned state carries |phi|^2/r ~ 1/r at the origin:
    # each decade of cutoff adds the same increment, so the interval
    # slopes stabilize instead of dying.
    pot = make_coulomb(1.0)
    res = find_eigenvalue(pot, -1, 1, grid=GRID)
    diag = domain_diagnostics(res.pair, pot, 1.0 - 1e-6)
    tail = [s for (cut, s) in diag.log_slope_points if cut <= 1e-3]
    assert len(tail) >= 5
    spread = (max(tail) - min(tail)) / abs(np.mean(tail))
    assert spread < 0.2
    assert min(tail) > 0.5


def test_diagnostics_custom_cutoffs_rejects_bad_input():
    pot = make_coulomb(0.5)
    res = find_eigenvalue(pot, -1, 1, grid=GRID)
    with pytest.raises(PreconditionError):
        domain_diagnostics(res.pair, pot, 0.5, cutoffs=np.array([0.5]))
