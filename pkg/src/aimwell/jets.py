"""Configurable-precision scalars and truncated Taylor series (jets).

A :class:`Jet` holds the Taylor coefficients ``c_k`` of a function about a
``center`` so that the function is ``sum(c_k * (y - center)**k)``.  The
coefficient array may carry leading batch dimensions (one jet per energy in
a vectorized scan); all operations act on the last axis.

Scalars are numpy ``float64`` when the requested precision is at most 15
decimal digits and ``gmpy2.mpfr`` (held in object arrays) otherwise.  mpfr
arithmetic rounds to the *active* gmpy2 context, so multi-precision work must
run inside ``with precision.context():``.
"""

from __future__ import annotations

import math
from contextlib import contextmanager
from dataclasses import dataclass
from functools import cached_property
from typing import Any, Iterator, Sequence

import gmpy2
import numpy as np

from .errors import CenterMismatchError, InsufficientOrderError, SingularExpansionError

_LOG2_10 = math.log2(10.0)
DOUBLE_DIGITS = 15


@dataclass(frozen=True)
class Precision:
    """Number of significant decimal digits carried by every real scalar."""

    decimal_digits: int = 30

    def __post_init__(self):
        if int(self.decimal_digits) != self.decimal_digits or self.decimal_digits < DOUBLE_DIGITS:
            raise ValueError(f"decimal_digits must be an integer >= {DOUBLE_DIGITS}, got {self.decimal_digits!r}")

    @property
    def is_double(self) -> bool:
        return self.decimal_digits <= DOUBLE_DIGITS

    @property
    def bits(self) -> int:
        if self.is_double:
            return 53
        return int(math.ceil(self.decimal_digits * _LOG2_10)) + 4

    @property
    def floor(self) -> float:
        """Relative magnitude below which a value is treated as zero."""
        return 10.0 ** (-self.decimal_digits + 4)

    @property
    def dtype(self):
        return np.float64 if self.is_double else object

    @contextmanager
    def context(self) -> Iterator["Precision"]:
        if self.is_double:
            yield self
            return
        with gmpy2.context(gmpy2.get_context(), precision=self.bits):
            yield self

    def real(self, x) -> Any:
        """Convert ``x`` (number or decimal string) to this precision's scalar type.

        For mpfr the conversion rounds in the active context; call inside
        :meth:`context`.
        """
        if self.is_double:
            return np.float64(x)
        return gmpy2.mpfr(x)

    def array(self, values) -> np.ndarray:
        values = np.asarray(values, dtype=object if not self.is_double else None)
        if self.is_double:
            return np.asarray(values, dtype=np.float64)
        out = np.empty(values.shape, dtype=object)
        flat = out.reshape(-1)
        for i, v in enumerate(values.reshape(-1)):
            flat[i] = gmpy2.mpfr(v)
        return out


DEFAULT_PRECISION = Precision(30)
DOUBLE = Precision(DOUBLE_DIGITS)


def precision_of(arr: np.ndarray) -> Precision:
    """Infer the precision of a coefficient array from its dtype and gmpy2 context."""
    if arr.dtype != object:
        return DOUBLE
    digits = max(DOUBLE_DIGITS + 1, int((gmpy2.get_context().precision - 4) / _LOG2_10))
    return Precision(digits)


def precision_for(center) -> Precision:
    """Precision matching a scalar handed to a coefficient callback."""
    if isinstance(center, (float, np.floating)):
        return DOUBLE
    return precision_of(np.empty(0, dtype=object))


def _abs_max(arr: np.ndarray):
    """Largest absolute value along the last axis (keeps batch dims)."""
    if arr.shape[-1] == 0:
        return np.zeros(arr.shape[:-1])
    return np.max(np.abs(arr), axis=-1)


@dataclass(frozen=True, eq=False)
class Jet:
    center: Any
    coeffs: np.ndarray

    def __post_init__(self):
        coeffs = self.coeffs
        if not isinstance(coeffs, np.ndarray):
            coeffs = np.asarray(coeffs, dtype=object if _has_mpfr(coeffs) else np.float64)
            object.__setattr__(self, "coeffs", coeffs)
        if coeffs.ndim == 0 or coeffs.shape[-1] == 0:
            raise ValueError("a jet needs at least one coefficient")

    @property
    def order(self) -> int:
        return self.coeffs.shape[-1] - 1

    @property
    def batch_shape(self) -> tuple:
        return self.coeffs.shape[:-1]

    @property
    def value(self):
        """Function value at the center (the constant Taylor coefficient)."""
        return self.coeffs[0] if self.coeffs.ndim == 1 else self.coeffs[..., 0]

    @cached_property
    def support(self) -> int:
        """Number of leading coefficients up to the last nonzero one (>= 1)."""
        nz = np.nonzero(np.any(self.coeffs != 0, axis=tuple(range(self.coeffs.ndim - 1))))[0]
        return int(nz[-1]) + 1 if nz.size else 1

    def truncate(self, order: int) -> "Jet":
        if order > self.order:
            raise InsufficientOrderError(f"cannot raise jet order from {self.order} to {order}")
        return Jet(self.center, self.coeffs[..., : order + 1])

    def derivative(self, k: int) -> Any:
        """k-th derivative at the center."""
        return self.coeffs[..., k] * math.factorial(k)

    def evaluate(self, y):
        """Sum the truncated series at ``y`` (Horner)."""
        t = y - self.center
        acc = self.coeffs[..., -1]
        for k in range(self.order - 1, -1, -1):
            acc = acc * t + self.coeffs[..., k]
        return acc

    def __add__(self, other):
        return jet_add(self, _coerce(other, self))

    __radd__ = __add__

    def __sub__(self, other):
        return jet_add(self, -_coerce(other, self))

    def __rsub__(self, other):
        return jet_add(_coerce(other, self), -self)

    def __neg__(self):
        return Jet(self.center, -self.coeffs)

    def __mul__(self, other):
        if isinstance(other, Jet):
            return jet_mul(self, other)
        return Jet(self.center, self.coeffs * np.asarray(other)[..., None] if np.ndim(other) else self.coeffs * other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return jet_div(self, _coerce(other, self))

    def __repr__(self):
        return f"Jet(center={self.center!r}, order={self.order}, coeffs={self.coeffs!r})"


def _has_mpfr(values) -> bool:
    return any(isinstance(v, type(gmpy2.mpfr(0))) for v in np.ravel(np.asarray(values, dtype=object)))


def _to_mpfr(v):
    if isinstance(v, np.ndarray):
        return np.vectorize(gmpy2.mpfr, otypes=[object])(v)
    return gmpy2.mpfr(v)


def _coerce(x, like: Jet) -> Jet:
    if isinstance(x, Jet):
        return x
    return constant_jet(x, like.center, like.order, dtype=like.coeffs.dtype)


def _check_centers(a: Jet, b: Jet) -> None:
    if a.center != b.center:
        raise CenterMismatchError(f"jets expanded about {a.center!r} and {b.center!r}")


def constant_jet(value, center, order: int, dtype=None) -> Jet:
    value = np.asarray(value, dtype=dtype if dtype is not None else None)
    if dtype is None:
        dtype = object if value.dtype == object else np.float64
    coeffs = np.zeros(value.shape + (order + 1,), dtype=dtype)
    if dtype == object:
        coeffs[...] = value[..., None] * 0
    coeffs[..., 0] = value
    return Jet(center, coeffs)


def unit_jet(center, order: int, dtype=np.float64) -> Jet:
    return constant_jet(1 if dtype != object else gmpy2.mpfr(1), center, order, dtype=dtype)


def jet_add(a: Jet, b: Jet) -> Jet:
    _check_centers(a, b)
    n = min(a.order, b.order) + 1
    return Jet(a.center, a.coeffs[..., :n] + b.coeffs[..., :n])


def jet_mul(a: Jet, b: Jet) -> Jet:
    """Truncated Cauchy product, c_k = sum_i a_i b_{k-i}.

    The loop runs over the shorter *support* so multiplying by a
    low-degree polynomial jet costs O(order * degree).
    """
    _check_centers(a, b)
    n = min(a.order, b.order) + 1
    x, y = a.coeffs[..., :n], b.coeffs[..., :n]
    ms = (min(a.support, n), min(b.support, n))
    if ms[0] < ms[1]:
        x, y, ms = y, x, (ms[1], ms[0])
    out = x * y[..., :1]
    for j in range(1, ms[1]):
        out[..., j:] += y[..., j : j + 1] * x[..., : n - j]
    return Jet(a.center, out)


def jet_div(a: Jet, b: Jet) -> Jet:
    """Series quotient q with q * b == a through the common order."""
    _check_centers(a, b)
    n = min(a.order, b.order) + 1
    x, y = a.coeffs[..., :n], b.coeffs[..., :n]
    floor = precision_of(y).floor
    lead = y[..., 0]
    scale = _abs_max(y)
    if np.any(np.abs(lead) <= floor * scale) or np.any(scale == 0):
        raise SingularExpansionError("divisor's constant term is below the precision floor")
    m = min(b.support, n)
    shape = np.broadcast_shapes(x.shape, y.shape)
    dtype = np.result_type(x.dtype, y.dtype)
    inv = 1 / lead
    if len(shape) == 1:
        # unbatched: plain Python scalars beat per-element numpy dispatch
        xl, yl, ql = x.tolist(), y[:m].tolist(), [None] * n
        for k in range(n):
            s = xl[k]
            for j in range(1, min(k, m - 1) + 1):
                s = s - yl[j] * ql[k - j]
            ql[k] = s * inv
        return Jet(a.center, np.array(ql, dtype=dtype))
    q = np.empty(shape, dtype=dtype)
    xb = np.broadcast_to(x, shape)
    for k in range(n):
        s = xb[..., k]
        for j in range(1, min(k, m - 1) + 1):
            s = s - y[..., j] * q[..., k - j]
        q[..., k] = s * inv
    return Jet(a.center, q)


def jet_differentiate(a: Jet) -> Jet:
    if a.order < 1:
        raise InsufficientOrderError("cannot differentiate an order-0 jet")
    k = np.arange(1, a.order + 1)
    if a.coeffs.dtype == object:
        k = k.astype(object)
    return Jet(a.center, a.coeffs[..., 1:] * k)


def shift_polynomial(coeffs: Sequence, center) -> list:
    """Re-expand ``sum(p_i * y**i)`` in powers of ``(y - center)``.

    Coefficients may be scalars or arrays (batched polynomials); binomial
    weights are exact integers.
    """
    n = len(coeffs)
    out = []
    for k in range(n):
        acc = 0
        for i in range(n - 1, k - 1, -1):
            acc = acc * center + math.comb(i, k) * coeffs[i]
        out.append(acc)
    return out


def _dtype_for(precision: Precision | None, values) -> Any:
    if precision is None:
        return object if _has_mpfr(values) else np.float64
    return precision.dtype


def polynomial_jet(coeffs: Sequence, center, order: int, precision: Precision | None = None,
                   shifted: bool = False) -> Jet:
    """Jet of a polynomial given by low-to-high coefficients in ``y``.

    With ``shifted=True`` the coefficients are already in powers of
    ``(y - center)``.
    """
    dtype = _dtype_for(precision, list(coeffs) + [center])
    if dtype == object:
        coeffs = [_to_mpfr(v) for v in coeffs]
        center = gmpy2.mpfr(center)
    c = list(coeffs) if shifted else shift_polynomial(list(coeffs), center)
    batch = np.broadcast_shapes(*(np.shape(v) for v in c)) if c else ()
    out = np.zeros(batch + (order + 1,), dtype=dtype)
    if dtype == object:
        out[...] = gmpy2.mpfr(0)
    for k, v in enumerate(c[: order + 1]):
        out[..., k] = v
    return Jet(center, out)


def jet_from_rational(num_coeffs: Sequence, den_coeffs: Sequence, center, order: int,
                      precision: Precision | None = None) -> Jet:
    """Taylor expansion about ``center`` of num(y)/den(y) (low-to-high coefficients).

    Without ``precision`` the scalar type follows the inputs (mpfr if any
    input is mpfr, float64 otherwise).
    """
    if precision is None and _has_mpfr(list(num_coeffs) + list(den_coeffs) + [center]):
        precision = precision_of(np.empty(0, dtype=object))
    num = polynomial_jet(num_coeffs, center, order, precision)
    den = polynomial_jet(den_coeffs, center, order, precision)
    try:
        return jet_div(num, den)
    except SingularExpansionError as exc:
        raise SingularExpansionError(f"denominator vanishes at the expansion point {center!r}") from exc
