"""Bound-state solver against closed-form and shooting oracles."""

import math

import numpy as np
import pytest

from dirac_hardy import (NoEigenvalueError, PreconditionError,
                         apply_hamiltonian, build_grid, default_grid,
                         dirac_coulomb_energy, eigenfunction_exponent,
                         find_eigenvalue, make_coulomb, regular_exponent,
                         shooting_energy)

GRID = default_grid()


def test_closed_form_ground_energies():
    assert dirac_coulomb_energy(0.5, -1, 1) == pytest.approx(
        math.sqrt(0.75), rel=1e-15)
    assert dirac_coulomb_energy(0.9, -1, 1) == pytest.approx(
        math.sqrt(0.19), rel=1e-15)
    assert dirac_coulomb_energy(1.0, -1, 1) == 0.0
    assert dirac_coulomb_energy(0.5, -1, 2) == pytest.approx(
        0.9659258262890683, rel=1e-12)


def test_ground_energy_matches_sqrt_identity_across_couplings():
    # E(nu, -1, 1) = sqrt(1 - nu^2) must hold to near machine accuracy
    # on the whole subcritical range including the endpoint.
    for nu in np.linspace(0.01, 1.0, 97):
        got = dirac_coulomb_energy(float(nu), -1, 1)
        want = math.sqrt((1.0 - nu) * (1.0 + nu))
        assert abs(got - want) <= 1e-14


def test_positive_kappa_degenerates_with_next_negative_level():
    for nu in (0.3, 0.5, 0.9):
        for k in (1, 2):
            assert dirac_coulomb_energy(nu, 1, k) == pytest.approx(
                dirac_coulomb_energy(nu, -1, k + 1), rel=1e-15)


def test_closed_form_guards():
    with pytest.raises(PreconditionError):
        dirac_coulomb_energy(0.5, 0, 1)
    with pytest.raises(PreconditionError):
        dirac_coulomb_energy(0.5, -1, 0)
    with pytest.raises(PreconditionError):
        dirac_coulomb_energy(1.2, -1, 1)
    with pytest.raises(PreconditionError):
        dirac_coulomb_energy(-0.5, -1, 1)
    # |kappa| = 2 admits couplings up to 2.
    assert dirac_coulomb_energy(1.5, -2, 1) == pytest.approx(
        math.sqrt(4.0 - 2.25) / 2.0, rel=1e-14)


def test_shooting_oracle_agrees_with_closed_form():
    # Independent integration oracle, validated for kappa = -1, k <= 2.
    for nu in (0.3, 0.5, 0.8):
        for k in (1, 2):
            assert abs(shooting_energy(nu, -1, k)
                       - dirac_coulomb_energy(nu, -1, k)) <= 1e-6


def test_shooting_guards():
    with pytest.raises(PreconditionError):
        shooting_energy(0.5, kappa=1)
    with pytest.raises(PreconditionError):
        shooting_energy(0.5, k=3)
    with pytest.raises(PreconditionError):
        shooting_energy(1.0)


def test_solver_ground_state_subcritical():
    pot = make_coulomb(0.5)
    res = find_eigenvalue(pot, -1, 1, grid=GRID)
    exact = dirac_coulomb_energy(0.5, -1, 1)
    assert abs(res.E - exact) / exact < 1e-6
    assert res.k == 1 and res.kappa == -1
    assert res.gamma_star == pytest.approx(1.0 + res.E, rel=1e-15)
    # Bracketed root: tight bracket with a tracked level at zero.
    assert res.bracket[1] - res.bracket[0] <= 1e-8
    assert abs(res.mu_at_root) <= 1e-7
    # The ground root sits within mesh bias of the certified top, which
    # is exactly the sharpness of the underlying inequality.
    assert res.flag == "endpoint"


def test_solver_eigenpair_residual_within_mesh_error():
    pot = make_coulomb(0.5)
    res = find_eigenvalue(pot, -1, 1, grid=GRID)
    exact = dirac_coulomb_energy(0.5, -1, 1)
    pair = res.pair
    g1, g2 = apply_hamiltonian(pair, pot)
    w = GRID.weights
    mw = GRID.staggered()[1]
    r1 = g1 - res.E * pair.phi
    r2 = g2 - res.E * pair.chi
    resid = math.sqrt(float(np.dot(r1, w * r1) + np.dot(r2, mw * r2)))
    norm = math.sqrt(float(np.dot(pair.phi, w * pair.phi)
                           + np.dot(pair.chi, mw * pair.chi)))
    assert resid / norm <= 10.0 * abs(res.E - exact)


def test_solver_excited_and_positive_kappa_levels():
    pot = make_coulomb(0.5)
    res2 = find_eigenvalue(pot, -1, 2, grid=GRID)
    assert abs(res2.E - dirac_coulomb_energy(0.5, -1, 2)) < 5e-6
    res_pos = find_eigenvalue(pot, 1, 1, grid=GRID)
    assert abs(res_pos.E - dirac_coulomb_energy(0.5, 1, 1)) < 5e-6
    # Degenerate pair of levels from opposite kappa signs.
    assert res_pos.E == pytest.approx(res2.E, abs=5e-6)


def test_gamma_star_strictly_increasing_in_level_index():
    pot = make_coulomb(0.5)
    stars = [find_eigenvalue(pot, -1, k, grid=GRID).gamma_star
             for k in (1, 2, 3)]
    assert stars[0] < stars[1] < stars[2]


def test_mesh_error_decreases_with_refinement():
    exact = dirac_coulomb_energy(0.9, -1, 1)
    errs = []
    for n in (1000, 2000, 4000):
        g = build_grid(1e-6, 60.0, n, "log-uniform")
        res = find_eigenvalue(make_coulomb(0.9), -1, 1, grid=g)
        errs.append(abs(res.E - exact))
    assert errs[0] > errs[1] > errs[2]


def test_critical_level_pinned_at_endpoint():
    pot = make_coulomb(1.0)
    res = find_eigenvalue(pot, -1, 1, grid=GRID)
    assert res.E == 0.0
    assert res.flag == "endpoint"
    assert res.bracket == (1.0, 1.0)
    # The pinned level carries the residual window-top margin, the
    # truncation floor of order 1/log(1/r_min), instead of a root value.
    assert 0.1 < res.mu_at_root < 0.2
    w = GRID.weights
    assert float(np.sum(w * res.pair.phi ** 2)) == pytest.approx(1.0, rel=1e-12)
    assert abs(eigenfunction_exponent(res.pair.phi, GRID)) < 1e-3


def test_pinned_subcritical_level_is_exact_with_regular_profile():
    # At nu = 0.9 on the default mesh the level pins at the certified
    # top, so the returned energy is the closed form to the last bit and
    # the state carries the regular branch exponent.
    pot = make_coulomb(0.9)
    res = find_eigenvalue(pot, -1, 1, grid=GRID)
    assert res.flag == "endpoint"
    assert abs(res.E - dirac_coulomb_energy(0.9, -1, 1)) < 1e-12
    slope = eigenfunction_exponent(res.pair.phi, GRID)
    assert slope == pytest.approx(regular_exponent(-1, 0.9), abs=1e-3)


def test_no_eigenvalue_reports_margin():
    pot = make_coulomb(0.5)
    with pytest.raises(NoEigenvalueError) as info:
        find_eigenvalue(pot, 1, 1, grid=GRID, window=(0.5, 0.9))
    assert info.value.margin is not None
    assert info.value.margin > 0.5


def test_window_preconditions():
    pot = make_coulomb(0.5)
    for bad in ((1.5, 1.2), (-0.1, 1.5), (1.2, 2.5)):
        with pytest.raises(PreconditionError):
            find_eigenvalue(pot, -1, 1, grid=GRID, window=bad)
    with pytest.raises(PreconditionError):
        find_eigenvalue(pot, -1, 0, grid=GRID)
    with pytest.raises(PreconditionError):
        find_eigenvalue(pot, 0, 1, grid=GRID)


def test_exponent_fit_recovers_exact_powers():
    assert eigenfunction_exponent(GRID.nodes ** 1.0, GRID) == pytest.approx(
        1.0, abs=1e-10)
    s = 0.43588989
    assert eigenfunction_exponent(GRID.nodes ** s, GRID) == pytest.approx(
        s, abs=1e-10)


def test_exponent_fit_window_validation():
    phi = GRID.nodes ** 0.5
    with pytest.raises(PreconditionError):
        eigenfunction_exponent(phi, GRID, window=(1e-8, 1e-5))
    with pytest.raises(PreconditionError):
        eigenfunction_exponent(phi, GRID, window=(1.0, 0.5))
