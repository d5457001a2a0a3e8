"""Asymptotic iteration for second-order linear ODEs f'' = lambda_0 f' + s_0 f.

The recursion

    lambda_n = lambda_{n-1}' + s_{n-1} + lambda_0 lambda_{n-1}
    s_n      = s_{n-1}'      + s_0 lambda_{n-1}

is carried out on jets about the evaluation point ``y0``.  Each step consumes
one Taylor order, so the coefficient functions are requested at order
``n_max + 2``.  The termination function

    Delta_n = lambda_n s_{n-1} - lambda_{n-1} s_n

evaluated at ``y0`` vanishes at the eigenvalues.

Every iterate is rescaled by an exact power of two so that float64 runs do not
overflow; ``AimIterate.exponent`` records the accumulated scale.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable, Iterator, Optional

import gmpy2
import numpy as np

from .errors import InvalidEvaluationPointError, OrderExhaustedError
from .jets import (
    DEFAULT_PRECISION,
    Jet,
    Precision,
    jet_add,
    jet_differentiate,
    jet_div,
    jet_mul,
    polynomial_jet,
    precision_for,
)

JetFactory = Callable[[Any, int, Any], Jet]
RationalFactory = Callable[[Any, int, Any], "tuple[Jet, Jet, Jet, Jet]"]


@dataclass(frozen=True)
class SoldeProblem:
    """Coefficient functions of f'' = lambda_0(y) f' + s_0(y) f.

    ``lambda0_at(center, order, E)`` and ``s0_at`` return jets.  When the
    coefficients are rational functions, ``rational_at`` may return the jets
    ``(lambda0_num, lambda0_den, s0_num, s0_den)`` of their numerator and
    denominator polynomials; the engine then multiplies by lambda_0 and s_0
    as (x * num) / den, which costs O(order) per step instead of O(order^2).
    """

    lambda0_at: JetFactory
    s0_at: JetFactory
    description: str = ""
    rational_at: Optional[RationalFactory] = None


@dataclass(frozen=True, eq=False)
class AimIterate:
    n: int
    lambda_n: Jet
    s_n: Jet
    exponent: Any
    delta_n: Any
    delta_normalized: Any
    alpha_n: Any

    @property
    def lambda_value(self):
        """lambda_n(y0) without the power-of-two rescaling."""
        return _ldexp(self.lambda_n.value, self.exponent)

    @property
    def s_value(self):
        return _ldexp(self.s_n.value, self.exponent)


def _exponent_of(x):
    """Binary exponent e with 2**(e-1) <= |x| < 2**e (0 for zero)."""
    if isinstance(x, np.ndarray) and x.dtype != object:
        return np.frexp(x)[1]
    if isinstance(x, np.ndarray):
        return np.array([gmpy2.get_exp(v) if v else 0 for v in x.reshape(-1)]).reshape(x.shape)
    if isinstance(x, (float, np.floating)):
        return int(np.frexp(x)[1])
    return gmpy2.get_exp(x) if x else 0


def _ldexp(x, e):
    if isinstance(x, np.ndarray) and x.dtype != object or isinstance(x, np.floating):
        with np.errstate(over="ignore"):
            return np.ldexp(x, e)
    if isinstance(x, np.ndarray):
        e = np.broadcast_to(e, x.shape)
        out = np.empty(x.shape, dtype=object)
        for idx in np.ndindex(x.shape):
            out[idx] = gmpy2.mul_2exp(x[idx], int(e[idx]))
        return out
    return gmpy2.mul_2exp(x, int(e))


def _rescale(lam: Jet, s: Jet):
    """Divide both jets by a common power of two close to their largest entry."""
    big = np.maximum(np.max(np.abs(lam.coeffs), axis=-1), np.max(np.abs(s.coeffs), axis=-1))
    e = _exponent_of(big)
    if lam.coeffs.dtype == object:
        if np.ndim(e) == 0:
            f = gmpy2.mul_2exp(gmpy2.mpfr(1), -int(e))
        else:
            f = np.array([gmpy2.mul_2exp(gmpy2.mpfr(1), -int(v)) for v in np.ravel(e)], dtype=object).reshape(np.shape(e))
            f = f[..., None]
        return Jet(lam.center, lam.coeffs * f), Jet(s.center, s.coeffs * f), e
    ee = np.asarray(-e)[..., None]
    return Jet(lam.center, np.ldexp(lam.coeffs, ee)), Jet(s.center, np.ldexp(s.coeffs, ee)), e


def _normalized(p, q):
    d = p - q
    scale = np.maximum(np.abs(p), np.abs(q)) if isinstance(p, np.ndarray) else max(abs(p), abs(q))
    if isinstance(d, np.ndarray):
        out = d * 0
        nz = scale != 0
        out[nz] = d[nz] / scale[nz]
        return out
    return d / scale if scale else d * 0


def _prepare(precision: Precision, y0, E):
    y0 = precision.real(y0)
    if np.ndim(E):
        E = precision.array(E)
    else:
        E = precision.real(E)
    return y0, E


def iterate(problem: SoldeProblem, y0, E, n_max: int, precision: Precision = DEFAULT_PRECISION,
            extra_order: int = 2) -> Iterator[AimIterate]:
    """Yield the AIM iterates n = 1..n_max (lazily, inside the precision context).

    ``E`` may be a 1-D array, in which case every jet carries a batch axis.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    order = n_max + extra_order
    with precision.context():
        y0, E = _prepare(precision, y0, E)
        lam0 = problem.lambda0_at(y0, order, E)
        s0 = problem.s0_at(y0, order, E)
        if min(lam0.order, s0.order) < n_max:
            raise OrderExhaustedError(
                f"coefficient jets of order {min(lam0.order, s0.order)} cannot support {n_max} iterations")
        if not np.any(lam0.coeffs != 0):
            raise InvalidEvaluationPointError(f"lambda_0 vanishes identically about y0={y0}")
        if problem.rational_at is not None:
            ln, ld, sn, sd = problem.rational_at(y0, order, E)
            times_lam0 = lambda x: jet_div(jet_mul(x, ln), ld)
            times_s0 = lambda x: jet_div(jet_mul(x, sn), sd)
        else:
            times_lam0 = lambda x: jet_mul(x, lam0)
            times_s0 = lambda x: jet_mul(x, s0)

        lam, s, exponent = _rescale(lam0, s0)
        for n in range(1, n_max + 1):
            if lam.order < 1:
                raise OrderExhaustedError(f"jets exhausted at iteration {n}")
            lam_new = jet_add(jet_add(jet_differentiate(lam), s), times_lam0(lam))
            s_new = jet_add(jet_differentiate(s), times_s0(lam))
            lam_new, s_new, e = _rescale(lam_new, s_new)
            p = lam_new.value * s.value
            q = lam.value * s_new.value
            new_exponent = exponent + e
            delta = _ldexp(p - q, exponent + new_exponent)
            lv = lam_new.value
            with np.errstate(divide="ignore", invalid="ignore"):
                if isinstance(lv, np.ndarray):
                    alpha = np.where(np.abs(lv) > precision.floor * np.abs(s_new.value), s_new.value / np.where(lv == 0, 1, lv), np.nan)
                else:
                    alpha = s_new.value / lv if abs(lv) > precision.floor * abs(s_new.value) else None
            yield AimIterate(n, lam_new, s_new, new_exponent, delta, _normalized(p, q), alpha)
            lam, s, exponent = lam_new, s_new, new_exponent


def run_recursion(problem: SoldeProblem, y0, E, n_max: int,
                  precision: Precision = DEFAULT_PRECISION) -> list[AimIterate]:
    return list(iterate(problem, y0, E, n_max, precision))


def _last(problem, y0, E, n, precision) -> AimIterate:
    it = None
    for it in iterate(problem, y0, E, n, precision):
        pass
    return it


def delta_at(problem: SoldeProblem, y0, E, n: int, precision: Precision = DEFAULT_PRECISION):
    """Delta_n(y0, E) = lambda_n s_{n-1} - lambda_{n-1} s_n (unscaled; may be inf in float64)."""
    return _last(problem, y0, E, n, precision).delta_n


def normalized_delta(problem: SoldeProblem, y0, E, n: int, precision: Precision = DEFAULT_PRECISION):
    """Delta_n divided by max(|lambda_n s_{n-1}|, |lambda_{n-1} s_n|), in [-2, 2]."""
    return _last(problem, y0, E, n, precision).delta_normalized


def delta_sequence(problem: SoldeProblem, y0, E, n_max: int, precision: Precision = DEFAULT_PRECISION) -> np.ndarray:
    """Normalized Delta_n for n = 1..n_max (leading axis n)."""
    return np.array([it.delta_normalized for it in iterate(problem, y0, E, n_max, precision)])


def alpha_sequence(problem: SoldeProblem, y0, E, n_max: int, precision: Precision = DEFAULT_PRECISION) -> list:
    """alpha_n = s_n(y0)/lambda_n(y0) for n = 1..n_max; None where lambda_n(y0) vanishes."""
    return [it.alpha_n for it in iterate(problem, y0, E, n_max, precision)]


def harmonic_problem() -> SoldeProblem:
    """Oscillator -psi'' + y^2 psi = E psi after psi = exp(-y^2/2) f.

    f'' = 2y f' + (1 - E) f; terminates exactly at E = 1, 3, 5, ...
    """

    def lambda0_at(center, order, E):
        return _poly_like([0, 2], center, order, E)

    def s0_at(center, order, E):
        return _poly_like([1 - E], center, order, E)

    def rational_at(center, order, E):
        one = _poly_like([1], center, order, E)
        return lambda0_at(center, order, E), one, s0_at(center, order, E), one

    return SoldeProblem(lambda0_at, s0_at, "harmonic oscillator (exact test problem)", rational_at)


def _poly_like(coeffs, center, order, E):
    """Polynomial jet whose scalar type and batch shape follow ``center`` and ``E``."""
    return polynomial_jet([c + 0 * E for c in coeffs], center, order, precision=precision_for(center))
