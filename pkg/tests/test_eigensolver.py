import math

import numpy as np
import pytest

from aimwell.aim import normalized_delta
from aimwell.eigensolver import (
    NOT_STABLE,
    ScanConfig,
    find_roots,
    plateau_scan,
    spectrum,
    wavefunction,
    wavefunction_model,
)
from aimwell.errors import DomainError, PrecisionExhaustedError, WavefunctionUnavailableError
from aimwell.oracle import oracle_spectrum
from aimwell.potential import PotentialParams, make_well_problem
from aimwell.reference import TABLES

FLAT = PotentialParams(0, 0, 0, 2)
TABLE1 = PotentialParams(4, 4, 8, 2)
TRA = np.array(TABLES["table1tra"].values)


@pytest.fixture(scope="module")
def table1_roots():
    return find_roots(make_well_problem(TABLE1), ScanConfig(0, 160))


@pytest.fixture(scope="module")
def flat_states():
    return spectrum(FLAT, 3, ScanConfig(0, 15, grid_points=300, n_max=60, tol=1e-10))


def test_square_well_levels(flat_states):
    exact = math.pi ** 2 / 8 * np.arange(1, 4) ** 2
    assert flat_states.complete
    assert np.allclose([r.energy for r in flat_states], exact, rtol=1e-9)
    assert all(r.converged and r.warnings == () for r in flat_states)


def test_table1_levels_match_grid_reference(table1_roots):
    assert len(table1_roots) == 10
    e = np.array([r.energy for r in table1_roots])
    assert np.all(np.abs(e - TRA) / TRA < 1e-9)
    oracle = oracle_spectrum(TABLE1).best
    assert np.all(np.abs(e - oracle) / oracle < 1e-7)


def test_results_ordered_with_valid_brackets(table1_roots):
    problem = make_well_problem(TABLE1)
    assert [r.index for r in table1_roots] == list(range(10))
    assert all(a.energy < b.energy for a, b in zip(table1_roots, table1_roots[1:]))
    for r in table1_roots[:3]:
        lo, hi = r.bracket
        assert lo <= r.energy <= hi and hi - lo <= 1.0001e-8
        assert normalized_delta(problem, 0.0, lo, r.iterations_used) * normalized_delta(problem, 0.0, hi, r.iterations_used) <= 0


def test_converged_roots_are_stable_in_depth(table1_roots):
    problem = make_well_problem(TABLE1)
    for r in table1_roots[:3]:
        assert r.converged and r.iterations_used == 120
        lo, hi = r.bracket
        assert normalized_delta(problem, 0.0, lo, 119) * normalized_delta(problem, 0.0, hi, 119) <= 0


def test_plain_formulation_roots_are_flagged():
    roots = find_roots(make_well_problem(TABLE1, "plain"), ScanConfig(0, 25, n_max=60, grid_points=400))
    assert roots and all(not r.converged and NOT_STABLE in r.warnings for r in roots)


def test_harmonic_style_window_growth():
    s = spectrum(TABLE1, 3, ScanConfig(0, 5, grid_points=200))
    assert s.complete
    assert np.allclose([r.energy for r in s], TRA[:3], rtol=1e-9)


def test_incomplete_spectrum_is_reported():
    s = spectrum(TABLE1, 3, ScanConfig(0, 2, grid_points=50, max_windows=2))
    assert not s.complete
    assert len(s) == 1
    assert s.notes and s.notes[0].startswith("incomplete: found 1 of 3")
    assert s.notes[0] in s[0].warnings


def test_supercritical_roots_carry_warning():
    roots = find_roots(make_well_problem(TABLES["table3"].params), ScanConfig(-10, 20, grid_points=300, n_max=60))
    assert roots
    assert all("supercritical: regularization-dependent" in r.warnings for r in roots)


def test_plateau_over_central_range():
    e0 = TRA[0]
    base = ScanConfig(e0 - 1e-3, e0 + 1e-3, grid_points=4, n_max=60)
    rep = plateau_scan(make_well_problem(TABLE1), base, -0.3, 0.3, 7, 0)
    assert not rep.missing.any()
    assert rep.plateau_range == (-0.3, 0.3)
    assert rep.max_spread_on_plateau < 1e-8
    assert np.all(np.abs(rep.energies - e0) < 1e-8)


def test_precision_exhausted_near_origin_endpoint():
    with pytest.raises(PrecisionExhaustedError):
        find_roots(make_well_problem(TABLE1), ScanConfig(0, 40, y0=-0.95, grid_points=200))


def test_precision_exhausted_for_deep_supercritical_level():
    problem = make_well_problem(TABLES["table3"].params, "plain")
    with pytest.raises(PrecisionExhaustedError):
        find_roots(problem, ScanConfig(-2e5, -1e3, n_max=300))


@pytest.mark.parametrize("kwargs,exc", [
    ({"e_min": 1, "e_max": 1}, ValueError),
    ({"grid_points": 1}, ValueError),
    ({"tol": 0}, ValueError),
    ({"y0": 1.0}, DomainError),
    ({"n_max": 1}, ValueError),
    ({"growth": 1.0}, ValueError),
])
def test_scan_config_validation(kwargs, exc):
    with pytest.raises(exc):
        ScanConfig(**kwargs)


def test_spectrum_needs_positive_k():
    with pytest.raises(ValueError):
        spectrum(FLAT, 0, ScanConfig())


# -- wavefunction -----------------------------------------------------------------

def test_square_well_wavefunction_shape(flat_states):
    for state in flat_states:
        model = wavefunction_model(FLAT, state)
        x = np.linspace(0.01, 1.99, 200)
        exact = np.sin((state.index + 1) * np.pi * x / 2)
        assert np.max(np.abs(model.at_x(x) - exact)) < 1e-4  # unit norm on (0, 2) is sin itself
        assert model.node_count() == state.index
        assert model.norm_error < 1e-10


def test_wavefunction_nodes_and_residual(table1_roots):
    x = np.linspace(0.1, 1.9, 40)
    for state in table1_roots[:3]:
        model = wavefunction_model(TABLE1, state)
        assert model.node_count() == state.index
        assert model.residual(x) < 1e-3


def test_wavefunction_origin_power_law(table1_roots):
    model = wavefunction_model(TABLE1, table1_roots[0])
    x = np.array([1e-3, 2e-3])
    p = model.at_x(x)
    slope = math.log(p[1] / p[0]) / math.log(2)
    assert abs(slope - 2.0) < 0.05


def test_wavefunction_samples_are_positive_near_origin(table1_roots):
    v = wavefunction(TABLE1, table1_roots[1], [-0.99, 0.0, 0.9])
    assert v[0] > 0 and v.shape == (3,)


def test_wavefunction_unavailable():
    sc = TABLES["table3"].params
    roots = find_roots(make_well_problem(sc), ScanConfig(-10, 20, grid_points=300, n_max=60))
    with pytest.raises(WavefunctionUnavailableError):
        wavefunction_model(sc, roots[0])
    plain = find_roots(make_well_problem(TABLE1, "plain"), ScanConfig(0, 8, n_max=60, grid_points=200))
    with pytest.raises(WavefunctionUnavailableError):
        wavefunction_model(TABLE1, plain[0])
