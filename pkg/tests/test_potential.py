import math

import numpy as np
import pytest
import sympy as sp

from aimwell.errors import DomainError, SingularExpansionError
from aimwell.jets import DOUBLE, Precision
from aimwell.potential import (
    PotentialParams,
    characteristic_exponents,
    lambda0_jet,
    make_well_problem,
    s0_denominator,
    s0_jet,
    s0_numerator,
    to_x,
    to_y,
    v_of_x,
)

TABLE1 = PotentialParams(4, 4, 8, 2)
TABLE3 = PotentialParams(-4, -4, -8, 2)
y = sp.symbols("y")


def _symbolic_plain(params, E):
    """lambda_0, s_0 of the y-form of -psi''/2 + V psi = E psi, derived by the chain rule."""
    L = sp.nsimplify(params.L)
    A, B, C = (sp.nsimplify(v) for v in (params.A, params.B, params.C))
    x2 = L ** 2 * (1 + y) / 2
    w = L ** 2 - x2
    V = A / w + B / (x2 * w) + C / w ** 2
    dy2 = (4 / L ** 2) ** 2 * x2  # (dy/dx)^2
    return sp.cancel(-(4 / L ** 2) / dy2), sp.cancel(2 * (V - E) / dy2)


def test_potential_values():
    assert math.isclose(v_of_x(TABLE1, 1.0), 32 / 9, rel_tol=1e-15)
    assert v_of_x(PotentialParams(0, 0, 0, 2), 0.7) == 0.0
    xs = np.linspace(0.1, 1.9, 7)
    assert v_of_x(TABLE1, xs).shape == (7,)


@pytest.mark.parametrize("x", [0.0, 2.0, -0.5, 3.0])
def test_potential_outside_well(x):
    with pytest.raises(DomainError):
        v_of_x(TABLE1, x)


def test_width_must_be_positive():
    with pytest.raises(DomainError):
        PotentialParams(1, 1, 1, 0)
    with pytest.raises(DomainError):
        PotentialParams(1, 1, 1, -2)


def test_transform_roundtrip():
    xs = np.linspace(0.01, 1.99, 50)
    assert np.allclose(to_x(to_y(xs, 2.0), 2.0), xs, rtol=1e-14)
    assert to_y(1.0, 2.0) == -0.5
    assert math.isclose(to_x(0.0, 2.0), math.sqrt(2))
    with pytest.raises(DomainError):
        to_y(0.0, 2.0)
    with pytest.raises(DomainError):
        to_x(1.0, 2.0)


def test_lambda0_jet():
    j = lambda0_jet(0.0, 3, DOUBLE)
    assert np.allclose(j.coeffs, [-0.5, 0.5, -0.5, 0.5], atol=1e-16)
    j = lambda0_jet(0.5, 0, DOUBLE)
    assert math.isclose(float(j.coeffs[0]), -1 / 3)
    with pytest.raises(SingularExpansionError):
        lambda0_jet(-1.0, 3)


def test_s0_at_origin():
    assert math.isclose(float(s0_jet(TABLE1, 0.0, 0.0, 0, DOUBLE).coeffs[0]), 5.0, rel_tol=1e-15)
    with pytest.raises(SingularExpansionError):
        s0_jet(TABLE1, 0.0, 1.0, 3)


def test_s0_consistent_with_potential():
    rng = np.random.default_rng(7)
    for params in (TABLE1, TABLE3, PotentialParams(1.5, 0.3, 2.5, 1.3)):
        for E in (-3.0, 0.0, 11.0):
            for y0 in rng.uniform(-0.95, 0.95, 17):
                x = to_x(y0, params.L)
                expected = params.L ** 2 * (v_of_x(params, x) - E) / (4 * (1 + y0))
                got = float(s0_jet(params, E, y0, 0, DOUBLE).coeffs[0])
                assert math.isclose(got, expected, rel_tol=1e-12, abs_tol=1e-12)


@pytest.mark.parametrize("params", [TABLE1, TABLE3, PotentialParams(0.5, 1.25, 3, 1.5)])
def test_plain_coefficients_match_chain_rule(params):
    E = sp.Rational(13, 4)
    lam, s0 = _symbolic_plain(params, E)
    num = sum(sp.nsimplify(c) * y ** k for k, c in enumerate(s0_numerator(params, float(E))))
    den = sum(sp.nsimplify(c) * y ** k for k, c in enumerate(s0_denominator(params)))
    assert sp.simplify(num / den - s0) == 0
    assert sp.simplify(lam + 1 / (2 * (1 + y))) == 0


def test_flat_well_numerator_factorizes():
    L, E = sp.symbols("L E", positive=True)
    # only the energy term survives: -E L^4 (y^3 - y^2 - y + 1) = -E L^4 (1 + y)(1 - y)^2
    cubic = y ** 3 - y ** 2 - y + 1
    assert sp.expand((1 + y) * (1 - y) ** 2 - cubic) == 0
    # the same check rejects a doubled quadratic term
    wrong = y ** 3 - 2 * y ** 2 - y + 1
    assert sp.rem(wrong, (1 - y) ** 2, y) != 0
    coeffs = s0_numerator(PotentialParams(0, 0, 0, 2), 1.0)
    assert np.allclose(coeffs, [-16, 16, 16, -16])


def test_factored_coefficients_match_direct_derivation():
    params = PotentialParams(1.5, 0.75, 2.5, 1.3)
    problem = make_well_problem(params)
    ex = characteristic_exponents(params)
    a, b = sp.nsimplify(problem.wall_exponent), sp.nsimplify(problem.origin_exponent)
    assert math.isclose(problem.origin_exponent, ex.beta / 2, rel_tol=1e-15)
    assert math.isclose(problem.wall_exponent, ex.gamma, rel_tol=1e-15)
    E = sp.Rational(9, 2)
    lam_psi, s_psi = _symbolic_plain(params, E)
    u = b / (1 + y) - a / (1 - y)
    lam_f = lam_psi - 2 * u
    s_f = s_psi + lam_psi * u - sp.diff(u, y) - u ** 2
    p = Precision(30)
    for y0 in (-0.6, 0.0, 0.45):
        with p.context():
            c = p.real(y0)
            lj = problem.lambda0_at(c, 0, p.real(float(E)))
            sj = problem.s0_at(c, 0, p.real(float(E)))
        at = {y: sp.Rational(y0)}
        assert math.isclose(float(lj.coeffs[0]), float(lam_f.subs(at)), rel_tol=1e-12)
        assert math.isclose(float(sj.coeffs[0]), float(s_f.subs(at)), rel_tol=1e-12, abs_tol=1e-12)


def test_characteristic_exponents():
    ex = characteristic_exponents(TABLE1)
    assert ex.beta == 2.0 and ex.beta_small == -1.0
    assert math.isclose(ex.gamma, (1 + math.sqrt(5)) / 2, rel_tol=1e-15)
    assert not ex.any_supercritical
    ex3 = characteristic_exponents(TABLE3)
    assert ex3.supercritical_origin and ex3.supercritical_wall
    assert ex3.beta is None and ex3.gamma is None


def test_supercritical_thresholds():
    L = 2.0
    edge_b = -L * L / 8
    edge_c = -L * L / 2
    assert not characteristic_exponents(PotentialParams(0, edge_b, 0, L)).supercritical_origin
    assert characteristic_exponents(PotentialParams(0, edge_b - 1e-9, 0, L)).supercritical_origin
    assert not characteristic_exponents(PotentialParams(0, 0, edge_c, L)).supercritical_wall
    assert characteristic_exponents(PotentialParams(0, 0, edge_c - 1e-9, L)).supercritical_wall
    assert characteristic_exponents(PotentialParams(0, edge_b, 0, L)).beta == 0.5


def test_make_well_problem_variants():
    plain = make_well_problem(TABLE1, "plain")
    assert plain.origin_exponent == 0 and plain.wall_exponent == 0 and plain.warnings == ()
    even = make_well_problem(PotentialParams(4, 0, 8, 2), origin_branch="even")
    assert even.origin_exponent == 0.0
    dirichlet = make_well_problem(PotentialParams(4, 0, 8, 2))
    assert dirichlet.origin_exponent == 0.5
    sc = make_well_problem(TABLE3)
    assert sc.origin_exponent == 0 and sc.wall_exponent == 0
    assert "supercritical: regularization-dependent" in sc.warnings
    with pytest.raises(ValueError):
        make_well_problem(TABLE1, "exact")
    with pytest.raises(ValueError):
        make_well_problem(TABLE1, origin_branch="odd")
    with pytest.raises(ValueError):
        make_well_problem(TABLE1, "plain", origin_branch="even")
    with pytest.raises(SingularExpansionError):
        make_well_problem(TABLE1).rational_at(1.0, 3, 1.0)


def test_exponents_follow_working_precision():
    problem = make_well_problem(TABLE1)
    p = Precision(40)
    with p.context():
        E = p.real(3)
        lj = problem.lambda0_at(p.real("0.1"), 2, E)
    # wall exponent enters lambda_0 linearly, so a float-rounded golden ratio would show at 1e-16
    gold = (1 + sp.sqrt(5)) / 2
    u = 1 / (1 + y) - gold / (1 - y)
    lam_f = -1 / (2 * (1 + y)) - 2 * u
    expected = sp.N(lam_f.subs(y, sp.Rational(1, 10)), 45)
    assert abs(sp.Float(str(lj.coeffs[0]), 45) - expected) < 1e-36
