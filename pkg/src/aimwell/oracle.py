"""Finite-difference reference spectrum of the well.

Interior grid x_i = i h (h = L/M, i = 1..M-1) with Dirichlet walls; the
Hamiltonian -1/2 d^2/dx^2 + V is the symmetric tridiagonal matrix with
diagonal 1/h^2 + V(x_i) and off-diagonal -1/(2 h^2).  The lowest k
eigenvalues come from Sturm-count bisection, and successive grids are combined
by h^2 Richardson extrapolation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .potential import PotentialParams, v_of_x

_TINY = 1e-300


@dataclass(frozen=True)
class OracleConfig:
    grid_sizes: tuple = (1024, 2048, 4096)
    k: int = 10
    extrapolate: bool = True
    origin: str = "dirichlet"

    def __post_init__(self):
        sizes = tuple(int(m) for m in self.grid_sizes)
        object.__setattr__(self, "grid_sizes", sizes)
        if not sizes or any(m < 64 for m in sizes):
            raise ValueError("every grid size must be >= 64")
        if any(b <= a for a, b in zip(sizes, sizes[1:])):
            raise ValueError("grid sizes must be strictly increasing")
        if self.k < 1 or self.k >= sizes[0] - 1:
            raise ValueError(f"k must satisfy 1 <= k < M-1 for every grid (got k={self.k})")
        if self.origin not in ("dirichlet", "neumann"):
            raise ValueError("origin must be 'dirichlet' or 'neumann'")


@dataclass(frozen=True)
class OracleSpectrum:
    grid_sizes: tuple
    per_grid: np.ndarray                 # shape (len(grids), k)
    extrapolated: Optional[np.ndarray]
    convergence_order_estimate: np.ndarray
    cutoff_sensitivity: np.ndarray

    @property
    def best(self) -> np.ndarray:
        return self.extrapolated if self.extrapolated is not None else self.per_grid[-1]


def sturm_count(diag: Sequence[float], offdiag: Sequence[float], threshold) -> np.ndarray | int:
    """Number of eigenvalues strictly below ``threshold``.

    Counts negative pivots of the LDL^T factorization of T - threshold*I.
    ``threshold`` may be an array; counts are returned elementwise.  A zero
    pivot is replaced by a tiny positive number, the same as counting at a
    threshold just below, so ``threshold`` itself is not counted.
    """
    d = np.asarray(diag, dtype=float)
    e2 = np.asarray(offdiag, dtype=float) ** 2
    t = np.asarray(threshold, dtype=float)
    count = np.zeros(t.shape, dtype=int)
    q = d[0] - t
    with np.errstate(over="ignore", divide="ignore"):
        return _count_pivots(d, e2, t, q, count)


def _count_pivots(d, e2, t, q, count):
    for i in range(d.size):
        if i:
            q = (d[i] - t) - e2[i - 1] / q
        q = np.where(q == 0, _TINY, q)
        count += q < 0
    return int(count) if count.ndim == 0 else count


def gershgorin_bounds(diag, offdiag) -> tuple[float, float]:
    d = np.asarray(diag, dtype=float)
    r = np.zeros_like(d)
    e = np.abs(np.asarray(offdiag, dtype=float))
    r[:-1] += e
    r[1:] += e
    return float(np.min(d - r)), float(np.max(d + r))


def lowest_eigenvalues(diag, offdiag, k: int, rtol: float = 4e-16) -> np.ndarray:
    """Lowest k eigenvalues by simultaneous bisection on Sturm counts."""
    lo_b, hi_b = gershgorin_bounds(diag, offdiag)
    lo = np.full(k, lo_b)
    hi = np.full(k, hi_b)
    idx = np.arange(k)
    atol = 1e-17 * (hi_b - lo_b)
    for _ in range(200):
        if np.all(hi - lo <= rtol * np.maximum(np.abs(lo), np.abs(hi)) + atol):
            break
        mid = 0.5 * (lo + hi)
        # eigenvalue j lies below mid iff more than j eigenvalues do
        left = sturm_count(diag, offdiag, mid) > idx
        hi = np.where(left, mid, hi)
        lo = np.where(left, lo, mid)
    return 0.5 * (lo + hi)


def hamiltonian(params: PotentialParams, M: int, origin: str = "dirichlet") -> tuple[np.ndarray, np.ndarray]:
    """(diag, offdiag) of the discretized Hamiltonian on M intervals."""
    L = params.L
    h = L / M
    if origin == "neumann":
        if params.B != 0:
            raise ValueError("a Neumann origin needs a potential finite at x = 0 (B = 0)")
        x = np.arange(0, M) * h
        w = L * L - x * x
        v = params.A / w + params.C / (w * w)
        off = np.full(M - 1, -0.5 / h ** 2)
        # mirror ghost point psi_{-1} = psi_1, symmetrized by rescaling psi_0
        off[0] = -1.0 / (np.sqrt(2.0) * h ** 2)
        return 1.0 / h ** 2 + v, off
    x = np.arange(1, M) * h
    return 1.0 / h ** 2 + v_of_x(params, x), np.full(M - 2, -0.5 / h ** 2)


def grid_eigenvalues(params: PotentialParams, M: int, k: int, origin: str = "dirichlet") -> np.ndarray:
    d, e = hamiltonian(params, M, origin)
    return lowest_eigenvalues(d, e, k)


def richardson(coarse: np.ndarray, fine: np.ndarray, ratio: float = 2.0, order: float = 2.0) -> np.ndarray:
    f = ratio ** order
    return (f * fine - coarse) / (f - 1)


def oracle_spectrum(params: PotentialParams, config: OracleConfig = OracleConfig()) -> OracleSpectrum:
    grids = config.grid_sizes
    per = np.array([grid_eigenvalues(params, M, config.k, config.origin) for M in grids])
    extrap = None
    if config.extrapolate and len(grids) >= 2:
        ratio = grids[-1] / grids[-2]
        extrap = richardson(per[-2], per[-1], ratio)
    if len(grids) >= 3:
        d1 = per[-3] - per[-2]
        d2 = per[-2] - per[-1]
        with np.errstate(divide="ignore", invalid="ignore"):
            order = np.log(np.abs(d1 / d2)) / np.log(grids[-1] / grids[-2])
    else:
        order = np.full(config.k, np.nan)
    if len(grids) >= 2:
        sens = np.abs(per[-1] - per[-2]) / np.maximum(np.abs(per[-1]), 1e-300)
    else:
        sens = np.full(config.k, np.nan)
    return OracleSpectrum(grids, per, extrap, order, sens)
