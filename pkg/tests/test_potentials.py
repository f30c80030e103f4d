"""Potential factories: coupling guards, sup bounds, cell averages."""

import math

import numpy as np
import pytest

from dirac_hardy import (CRITICAL_COUPLING, ESSENTIAL_SA_COUPLING,
                         KATO_COUPLING, PreconditionError,
                         TheoremHypothesisError, build_grid,
                         make_bounded_perturbed_coulomb, make_coulomb)


def test_named_coupling_thresholds():
    assert KATO_COUPLING == pytest.approx(2.0 / math.pi, rel=1e-15)
    assert ESSENTIAL_SA_COUPLING == pytest.approx(math.sqrt(3.0) / 2.0, rel=1e-15)
    assert CRITICAL_COUPLING == 1.0


def test_coulomb_basic_fields():
    pot = make_coulomb(0.5)
    assert pot.nu == 0.5
    assert pot.Gamma == 0.0
    assert pot.cV_hint == pytest.approx(math.sqrt(0.75), rel=1e-15)
    assert pot.params == {"type": "coulomb", "nu": 0.5}
    r = np.array([0.5, 1.0, 2.0])
    assert np.allclose(pot.eval(r), -0.5 / r, rtol=1e-15)


def test_coulomb_critical_hint_degenerates_to_zero():
    assert make_coulomb(1.0).cV_hint == 0.0


def test_coulomb_coupling_guards():
    for bad in (0.0, -0.2, 1.0 + 1e-12, 2.0):
        with pytest.raises(PreconditionError):
            make_coulomb(bad)


def test_perturbed_coulomb_eval_and_sup():
    pot = make_bounded_perturbed_coulomb(0.5, 0.3, 0.4)
    r = np.geomspace(1e-4, 30.0, 50)
    expected = np.minimum(-0.5 / r - 0.3 * np.exp(-r), 0.4)
    assert np.allclose(pot.eval(r), expected, rtol=1e-14)
    assert pot.Gamma == 0.0
    assert pot.cV_hint is None
    assert pot.params["type"] == "perturbed-coulomb"


def test_perturbed_coulomb_admissibility_guard():
    # c1 + gamma_cap - 1 must stay below sqrt(1 - nu^2).
    with pytest.raises(TheoremHypothesisError):
        make_bounded_perturbed_coulomb(0.5, 0.9, 0.99)
    make_bounded_perturbed_coulomb(0.5, 0.9, 0.95)  # 0.85 < 0.866 passes


def test_cell_averages_match_exact_coulomb_moments():
    # The nodal value is the average of V over the node's dual cell;
    # for -nu/r the exact average is -nu log(b/a)/(b - a).
    pot = make_coulomb(0.7)
    g = build_grid(1e-5, 20.0, 500, "log-uniform")
    mids, _ = g.staggered()
    a, b = mids[:-1], mids[1:]
    exact = -0.7 * np.log(b / a) / (b - a)
    avg = pot.averaged_on_nodes(g)
    assert np.max(np.abs(avg / exact - 1.0)) < 5e-8


def test_cell_average_correction_is_scale_invariant_second_order():
    # -nu/r has no scale, so on a geometric mesh the relative gap
    # between cell average and node value is the same at every node,
    # and it contracts like the square of the step.
    pot = make_coulomb(1.0)
    rels = []
    for n in (1000, 2000):
        g = build_grid(1e-6, 60.0, n, "log-uniform")
        avg = pot.averaged_on_nodes(g)
        point = pot.eval(g.nodes)
        rel = np.abs(avg - point) / np.abs(point)
        assert rel.max() < 1.02 * rel.min()
        assert np.all(avg < 0.0)
        rels.append(rel.max())
    assert rels[1] < 0.3 * rels[0]
