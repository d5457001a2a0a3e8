"""Infinite well with a non-flat bottom and its transformed SOLDE.

The potential on 0 < x < L is

    V(x) = A/(L^2 - x^2) + B/(x^2 (L^2 - x^2)) + C/(L^2 - x^2)^2

and is infinite outside.  With hbar = m = 1 and y = 2(x/L)^2 - 1 the
Schroedinger equation becomes f'' = lambda_0 f' + s_0 f on (-1, 1).

Two formulations are provided:

* ``"plain"``: psi(y) itself is the AIM unknown, lambda_0 = -1/(2(1+y)).
* ``"asymptotic"`` (default): psi = (1+y)^b (1-y)^a f(y) with the endpoint
  exponents peeled off, so that f is analytic on [-1, 1] at the eigenvalues
  and the quantization condition converges geometrically in the depth.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

import gmpy2
import numpy as np

from .aim import SoldeProblem
from .errors import DomainError, SingularExpansionError
from .jets import Jet, Precision, jet_div, jet_from_rational, polynomial_jet, precision_for

FORMULATIONS = ("asymptotic", "plain")
ORIGIN_BRANCHES = ("dirichlet", "even")


@dataclass(frozen=True)
class PotentialParams:
    A: float
    B: float
    C: float
    L: float

    def __post_init__(self):
        if not self.L > 0:
            raise DomainError(f"well width L must be positive, got {self.L!r}")

    @property
    def is_flat(self) -> bool:
        return self.A == 0 and self.B == 0 and self.C == 0


def v_of_x(params: PotentialParams, x):
    """Potential inside the well; raises DomainError for x outside (0, L)."""
    x = np.asarray(x, dtype=float)
    L = params.L
    if np.any((x <= 0) | (x >= L)):
        raise DomainError(f"x must lie strictly inside (0, {L}); the potential is infinite elsewhere")
    w = L * L - x * x
    v = params.A / w + params.B / (x * x * w) + params.C / (w * w)
    return v if v.ndim else float(v)


def to_y(x, L: float):
    x = np.asarray(x, dtype=float)
    if np.any((x <= 0) | (x >= L)):
        raise DomainError(f"x must lie in (0, {L})")
    y = 2.0 * (x / L) ** 2 - 1.0
    return y if y.ndim else float(y)


def to_x(y, L: float):
    y = np.asarray(y, dtype=float)
    if np.any((y <= -1) | (y >= 1)):
        raise DomainError("y must lie in (-1, 1)")
    x = L * np.sqrt((1.0 + y) / 2.0)
    return x if x.ndim else float(x)


# -- polynomial helpers (low-to-high coefficient lists; entries may be arrays) --

def _pmul(p, q):
    out = [0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        for j, b in enumerate(q):
            out[i + j] = out[i + j] + a * b
    return out


def _padd(*ps):
    out = [0] * max(len(p) for p in ps)
    for p in ps:
        for i, a in enumerate(p):
            out[i] = out[i] + a
    return out


def _pscale(c, p):
    return [c * a for a in p]


def s0_numerator(params: PotentialParams, E, one=1.0) -> list:
    """Numerator N(y) of s_0 = N / (4 L^2 (1 - y^2)^2), low-to-high in y.

    N = -[E L^4 (y^3 - y^2 - y + 1) + 2 A L^2 (y^2 - 1) + 4 (B - C) y - 4 (B + C)]
    ``one`` sets the scalar type of the parameters (float or mpfr).
    """
    A, B, C, L = (one * params.A, one * params.B, one * params.C, one * params.L)
    L2 = L * L
    L4 = L2 * L2
    EL4 = E * L4
    return [
        -(EL4 - 2 * A * L2 - 4 * (B + C)),
        -(-EL4 + 4 * (B - C)),
        -(-EL4 + 2 * A * L2),
        -EL4,
    ]


def s0_denominator(params: PotentialParams, one=1.0) -> list:
    L2 = one * params.L * params.L
    return [4 * L2, 0 * L2, -8 * L2, 0 * L2, 4 * L2]


def lambda0_jet(y0, order: int, precision: Precision | None = None) -> Jet:
    """Jet of -1/(2(1+y)) about y0."""
    if y0 == -1:
        raise SingularExpansionError("lambda_0 is singular at y = -1")
    return jet_from_rational([-1], [2, 2], y0, order, precision)


def s0_jet(params: PotentialParams, E, y0, order: int, precision: Precision | None = None) -> Jet:
    """Jet of s_0(y) = L^2 (V - E) / (4 (1 + y)) about y0 (plain formulation)."""
    if abs(y0) >= 1:
        raise SingularExpansionError(f"s_0 is singular at y = {y0}; expand inside (-1, 1)")
    one = _one(y0, precision)
    return jet_from_rational(s0_numerator(params, E, one), s0_denominator(params, one), y0, order, precision)


def _one(center, precision: Precision | None):
    p = precision if precision is not None else precision_for(center)
    return p.real(1)


@dataclass(frozen=True)
class CharacteristicExponents:
    """Endpoint power laws psi ~ x^beta (x -> 0) and psi ~ (L - x)^gamma (x -> L).

    ``beta`` and ``gamma`` are the larger indicial roots, or None when the
    roots are complex (the corresponding ``supercritical_*`` flag is set).
    ``beta_small`` is the smaller origin root, used for the even branch.
    """

    beta: float | None
    gamma: float | None
    supercritical_origin: bool
    supercritical_wall: bool
    beta_small: float | None = None

    @property
    def any_supercritical(self) -> bool:
        return self.supercritical_origin or self.supercritical_wall


def characteristic_exponents(params: PotentialParams) -> CharacteristicExponents:
    L2 = params.L ** 2
    disc_o = 1 + 8 * params.B / L2
    disc_w = 1 + 2 * params.C / L2
    beta = beta_small = gamma = None
    if disc_o >= 0:
        beta = (1 + math.sqrt(disc_o)) / 2
        beta_small = (1 - math.sqrt(disc_o)) / 2
    if disc_w >= 0:
        gamma = (1 + math.sqrt(disc_w)) / 2
    return CharacteristicExponents(beta, gamma, disc_o < 0, disc_w < 0, beta_small)


@dataclass(frozen=True)
class WellProblem(SoldeProblem):
    """SOLDE for the well, with the prefactor exponents that were removed.

    ``psi = (1 + y)**origin_exponent * (1 - y)**wall_exponent * f``.
    """

    params: PotentialParams = None
    formulation: str = "asymptotic"
    origin_exponent: Any = 0.0
    wall_exponent: Any = 0.0
    warnings: tuple = field(default_factory=tuple)


def _coefficient_polys(params: PotentialParams, E, a, b, one):
    """(lambda0_num, lambda0_den, s0_num, s0_den) after removing (1+y)^b (1-y)^a."""
    L2 = one * params.L * params.L
    om, op = [one, -one], [one, one]
    if a == 0 and b == 0:
        return [-one], [2 * one, 2 * one], s0_numerator(params, E, one), s0_denominator(params, one)
    u = _padd(_pscale(b, om), _pscale(-a, op))  # b(1-y) - a(1+y)
    lam_num = _padd(_pscale(-(one / 2 + 2 * b), om), _pscale(2 * a, op))
    lam_den = [one, 0 * one, -one]
    num = _padd(
        s0_numerator(params, E, one),
        _pscale(-2 * L2, _pmul(om, u)),
        _pscale(4 * L2, _padd(_pscale(b, _pmul(om, om)), _pscale(a, _pmul(op, op)))),
        _pscale(-4 * L2, _pmul(u, u)),
    )
    return lam_num, lam_den, num, s0_denominator(params, one)


def make_well_problem(params: PotentialParams, formulation: str = "asymptotic",
                      origin_branch: str = "dirichlet") -> WellProblem:
    """Package the well's transformed SOLDE for the AIM engine.

    ``formulation="asymptotic"`` removes the endpoint factors; on a
    supercritical side the exponent is complex, nothing is removed there and a
    warning is attached.  ``origin_branch="even"`` uses the smaller origin
    exponent, which for B = 0 selects states even under x -> -x.
    """
    if formulation not in FORMULATIONS:
        raise ValueError(f"formulation must be one of {FORMULATIONS}")
    if origin_branch not in ORIGIN_BRANCHES:
        raise ValueError(f"origin_branch must be one of {ORIGIN_BRANCHES}")
    ex = characteristic_exponents(params)
    notes = []
    if ex.any_supercritical:
        notes.append("supercritical: regularization-dependent")
    peel_origin = formulation == "asymptotic" and not ex.supercritical_origin
    peel_wall = formulation == "asymptotic" and not ex.supercritical_wall
    if formulation == "asymptotic":
        if ex.supercritical_origin:
            notes.append("origin exponent complex; origin factor not removed")
        if ex.supercritical_wall:
            notes.append("wall exponent complex; wall factor not removed")
    elif origin_branch != "dirichlet":
        raise ValueError("origin_branch applies to the asymptotic formulation only")
    sign = 1 if origin_branch == "dirichlet" else -1

    def exponents(one):
        """(a, b) evaluated in the scalar type of ``one``."""
        sqrt = np.sqrt if isinstance(one, np.floating) else gmpy2.sqrt
        L2 = one * params.L * params.L
        b = (1 + sign * sqrt(1 + 8 * params.B / L2)) / 4 if peel_origin else 0
        a = (1 + sqrt(1 + 2 * params.C / L2)) / 2 if peel_wall else 0
        return a, b

    def polys(center, E):
        one = _one(center, None)
        a, b = exponents(one)
        return _coefficient_polys(params, E, a, b, one)

    a, b = (float(v) for v in exponents(np.float64(1)))

    def rational_at(center, order, E):
        if abs(center) >= 1:
            raise SingularExpansionError(f"coefficients are singular at y = {center}")
        p = precision_for(center)
        return tuple(polynomial_jet(c, center, order, p) for c in polys(center, E))

    def lambda0_at(center, order, E):
        ln, ld, _, _ = rational_at(center, order, E)
        return jet_div(ln, ld)

    def s0_at(center, order, E):
        _, _, sn, sd = rational_at(center, order, E)
        return jet_div(sn, sd)

    label = f"well A={params.A} B={params.B} C={params.C} L={params.L} ({formulation})"
    return WellProblem(lambda0_at, s0_at, label, rational_at, params, formulation, b, a, tuple(notes))
