"""Eigenvalues from the AIM quantization condition.

Roots of the normalized Delta_N(y0, E) are bracketed on a uniform energy grid
and refined by bisection.  The grid scan and the first refinement run over the
whole batch of energies at once, in double precision when that resolves the
signs and at the configured precision otherwise; every root is then re-checked
at the configured precision, at depths N and N-1, on [E - tol/2, E + tol/2].
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Any, Callable, Optional, Sequence

import numpy as np

from .aim import SoldeProblem, iterate
from .errors import DomainError, PrecisionExhaustedError, WavefunctionUnavailableError
from .jets import DEFAULT_PRECISION, DOUBLE, Precision, jet_div
from .potential import PotentialParams, characteristic_exponents, make_well_problem, v_of_x

NOT_STABLE = "not stable under N -> N-1 at tol"
_SECTIONS = 16


@dataclass(frozen=True)
class ScanConfig:
    e_min: float = 0.0
    e_max: float = 50.0
    grid_points: int = 2000
    y0: float = 0.0
    n_max: int = 120
    tol: float = 1e-8
    precision: Precision = DEFAULT_PRECISION
    growth: float = 2.0
    max_windows: int = 12

    def __post_init__(self):
        if not self.e_min < self.e_max:
            raise ValueError("e_min must be below e_max")
        if self.grid_points < 2:
            raise ValueError("grid_points must be >= 2")
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if not -1 < self.y0 < 1:
            raise DomainError("y0 must lie in (-1, 1)")
        if self.n_max < 2:
            raise ValueError("n_max must be >= 2 (the N-1 check needs two depths)")
        if self.growth <= 1:
            raise ValueError("growth must exceed 1")

    def with_window(self, e_min: float, e_max: float) -> "ScanConfig":
        return replace(self, e_min=e_min, e_max=e_max)


@dataclass(frozen=True)
class EigenResult:
    index: int
    energy: float
    converged: bool
    iterations_used: int
    delta_residual: float
    bracket: tuple
    warnings: tuple = ()


class Spectrum(list):
    """List of EigenResult with a completeness flag."""

    def __init__(self, results=(), complete: bool = True, notes: Sequence[str] = ()):
        super().__init__(results)
        self.complete = complete
        self.notes = tuple(notes)


@dataclass(frozen=True)
class StabilityReport:
    y0_samples: np.ndarray
    energies: np.ndarray
    plateau_range: Optional[tuple]
    max_spread_on_plateau: float
    tol: float

    @property
    def missing(self) -> np.ndarray:
        return self.y0_samples[np.isnan(self.energies)]


def _sign(v) -> np.ndarray:
    return np.sign(np.asarray(v, dtype=float))


def delta_pair(problem: SoldeProblem, y0, energies, n: int, precision: Precision):
    """Normalized Delta at depths n-1 and n for an array of energies (as floats)."""
    energies = np.asarray(energies, dtype=float)
    prev = last = None
    for it in iterate(problem, y0, energies, n, precision):
        prev, last = last, it
    return (np.asarray(prev.delta_normalized, dtype=float),
            np.asarray(last.delta_normalized, dtype=float))


def _multisection(f: Callable, lo, hi, s_lo, width: float):
    """Shrink each bracket [lo_i, hi_i] to at most ``width``, batched over i."""
    lo = np.array(lo, dtype=float)
    hi = np.array(hi, dtype=float)
    frac = np.arange(1, _SECTIONS) / _SECTIONS
    while lo.size and np.max(hi - lo) > width:
        pts = lo[:, None] + (hi - lo)[:, None] * frac
        sg = _sign(f(pts.ravel())).reshape(pts.shape)
        flip = sg != s_lo[:, None]
        first = np.where(flip.any(axis=1), flip.argmax(axis=1), _SECTIONS - 1)
        full = np.concatenate([lo[:, None], pts, hi[:, None]], axis=1)
        rows = np.arange(lo.size)
        lo, hi = full[rows, first], full[rows, first + 1]
    return lo, hi


def _grid(config: ScanConfig) -> np.ndarray:
    return np.linspace(config.e_min, config.e_max, config.grid_points)


def _at_floor(d: np.ndarray, precision: Precision) -> bool:
    """True when the normalized Delta carries no usable sign information."""
    finite = np.isfinite(d)
    if not finite.all():
        return True
    eps = np.finfo(float).eps if precision.is_double else 10.0 ** (-precision.decimal_digits)
    return bool(np.median(np.abs(d)) < 1e4 * eps)


def _brackets(problem, config: ScanConfig):
    """Sign-change brackets on the grid and the precision the scan needed.

    The scan runs in double precision; if that is at its rounding floor (as
    happens away from y0 = 0, where Delta_N decays), a 16-point probe at the
    configured precision decides between rescanning at full precision and
    giving up.
    """
    energies = _grid(config)
    scan = DOUBLE
    _, d = delta_pair(problem, config.y0, energies, config.n_max, DOUBLE)
    if _at_floor(d, DOUBLE) and not config.precision.is_double:
        probe = energies[np.linspace(0, energies.size - 1, min(16, energies.size)).astype(int)]
        _, dp = delta_pair(problem, config.y0, probe, config.n_max, config.precision)
        if not _at_floor(dp, config.precision):
            scan = config.precision
            _, d = delta_pair(problem, config.y0, energies, config.n_max, scan)
    if _at_floor(d, scan):
        raise PrecisionExhaustedError(
            "normalized Delta is at the rounding floor over the window; raise the precision")
    finite = np.isfinite(d)
    s = np.where(d >= 0, 1.0, -1.0)
    ok = finite[:-1] & finite[1:]
    idx = np.nonzero(ok & (s[:-1] != s[1:]))[0]
    return energies[idx], energies[idx + 1], s[idx], scan


def find_roots(problem: SoldeProblem, config: ScanConfig) -> list[EigenResult]:
    """All sign changes of the normalized Delta_{n_max} on the grid, refined and verified."""
    y0, n, tol, prec = config.y0, config.n_max, config.tol, config.precision
    glo, ghi, gs, scan = _brackets(problem, config)
    if glo.size == 0:
        return []
    f_scan = lambda e: delta_pair(problem, y0, e, n, scan)[1]
    lo, hi = _multisection(f_scan, glo, ghi, gs, tol / 2)
    roots = 0.5 * (lo + hi)

    def check(r):
        pts = np.stack([r - tol / 2, r, r + tol / 2], axis=1)
        prev, last = delta_pair(problem, y0, pts.ravel(), n, prec)
        return prev.reshape(pts.shape), last.reshape(pts.shape), pts

    prev, last, pts = check(roots)
    bad = _sign(last[:, 0]) * _sign(last[:, 2]) > 0
    if np.any(bad):
        # double-precision bracket did not survive: redo from the grid at full precision
        sl = _sign(delta_pair(problem, y0, glo[bad], n, prec)[1])
        sh = _sign(delta_pair(problem, y0, ghi[bad], n, prec)[1])
        real = sl * sh < 0
        f_full = lambda e: delta_pair(problem, y0, e, n, prec)[1]
        blo, bhi = _multisection(f_full, glo[bad][real], ghi[bad][real], sl[real], tol / 2)
        keep = ~bad
        roots = np.concatenate([roots[keep], 0.5 * (blo + bhi)])
        if real.any():
            p2, l2, q2 = check(0.5 * (blo + bhi))
            prev, last, pts = (np.concatenate([prev[keep], p2]), np.concatenate([last[keep], l2]),
                               np.concatenate([pts[keep], q2]))
        else:
            prev, last, pts = prev[keep], last[keep], pts[keep]

    base_notes = tuple(getattr(problem, "warnings", ()))
    found = []
    for i in np.argsort(roots, kind="stable"):
        stable = bool(_sign(prev[i, 0]) * _sign(prev[i, 2]) <= 0)
        valid = bool(_sign(last[i, 0]) * _sign(last[i, 2]) <= 0)
        if not valid:
            continue
        notes = base_notes + (() if stable else (NOT_STABLE,))
        found.append(EigenResult(0, float(roots[i]), stable, n, float(abs(last[i, 1])),
                                 (float(pts[i, 0]), float(pts[i, 2])), notes))
    return _renumber(_dedup(found, 10 * tol))


def _dedup(results: list[EigenResult], radius: float) -> list[EigenResult]:
    out: list[EigenResult] = []
    for r in results:
        if out and r.energy - out[-1].energy < radius:
            keep = min((out[-1], r), key=lambda x: (not x.converged, x.delta_residual))
            out[-1] = keep
        else:
            out.append(r)
    return out


def _renumber(results):
    return [EigenResult(i, r.energy, r.converged, r.iterations_used, r.delta_residual, r.bracket, r.warnings)
            for i, r in enumerate(results)]


def spectrum(params: PotentialParams, k: int, config: ScanConfig, formulation: str = "asymptotic",
             origin_branch: str = "dirichlet", problem: SoldeProblem | None = None) -> Spectrum:
    """Lowest k eigenvalues, growing the window upward until k roots are found."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if problem is None:
        problem = make_well_problem(params, formulation, origin_branch)
    lo, hi = config.e_min, config.e_max
    found: list[EigenResult] = []
    for _ in range(config.max_windows):
        new = find_roots(problem, config.with_window(lo, hi))
        found = _dedup(sorted(found + new, key=lambda r: r.energy), 10 * config.tol)
        if len(found) >= k:
            return Spectrum(_renumber(found[:k]), True)
        width = hi - lo
        lo, hi = hi, hi + width * config.growth
    note = f"incomplete: found {len(found)} of {k} states below E = {lo:g}"
    results = [EigenResult(r.index, r.energy, r.converged, r.iterations_used, r.delta_residual,
                           r.bracket, r.warnings + (note,)) for r in _renumber(found)]
    return Spectrum(results, False, (note,))


def plateau_scan(problem: SoldeProblem, base_config: ScanConfig, y0_min: float, y0_max: float,
                 samples: int, state_index: int) -> StabilityReport:
    """Recompute one state at evenly spaced y0 and locate the plateau of stability."""
    if not -1 < y0_min < y0_max < 1:
        raise DomainError("the y0 range must lie inside (-1, 1)")
    ys = np.linspace(y0_min, y0_max, samples)
    energies = np.full(samples, np.nan)
    for i, y in enumerate(ys):
        try:
            roots = find_roots(problem, replace(base_config, y0=float(y)))
        except (ArithmeticError, ValueError):
            continue
        if len(roots) > state_index:
            energies[i] = roots[state_index].energy
    rng, spread = _plateau(ys, energies, base_config.tol)
    return StabilityReport(ys, energies, rng, spread, base_config.tol)


def _plateau(ys, energies, tol):
    best = (0, None, np.nan)
    n = len(ys)
    for i in range(n):
        if np.isnan(energies[i]):
            continue
        lo = hi = energies[i]
        for j in range(i, n):
            e = energies[j]
            if np.isnan(e):
                break
            lo, hi = min(lo, e), max(hi, e)
            if hi - lo >= tol:
                break
            if j - i + 1 > best[0]:
                best = (j - i + 1, (float(ys[i]), float(ys[j])), hi - lo)
    return best[1], float(best[2])


# -- wavefunction (experimental) ------------------------------------------------

@dataclass(frozen=True, eq=False)
class WavefunctionModel:
    """psi(y) = norm * (1+y)^b (1-y)^a f(y), f a Taylor series about y = 0."""

    params: PotentialParams
    energy: Any
    origin_exponent: float
    wall_exponent: float
    series: tuple
    norm: float = 1.0
    norm_error: float = float("nan")

    def f(self, y) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        with DEFAULT_PRECISION.context():
            yy = np.array([DEFAULT_PRECISION.real(float(v)) for v in y.ravel()], dtype=object)
            acc = yy * 0
            for c in reversed(self.series):
                acc = acc * yy + c
        return np.array([float(v) for v in acc]).reshape(y.shape)

    def __call__(self, y) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        pref = (1 + y) ** self.origin_exponent * (1 - y) ** self.wall_exponent
        return self.norm * pref * self.f(y)

    def at_x(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return self(2 * (x / self.params.L) ** 2 - 1)

    def node_count(self, samples: int = 2001) -> int:
        x = np.linspace(0, self.params.L, samples + 2)[1:-1]
        v = self.at_x(x)
        v = v[np.abs(v) > 1e-12 * np.max(np.abs(v))]
        return int(np.sum(np.sign(v[1:]) != np.sign(v[:-1])))

    def residual(self, x, h: float = 1e-4) -> float:
        """max |(-psi''/2 + V psi - E psi)| / max |E psi| on interior points x."""
        x = np.asarray(x, dtype=float)
        p0, pm, pp = self.at_x(x), self.at_x(x - h), self.at_x(x + h)
        lap = (pp - 2 * p0 + pm) / h ** 2
        E = float(self.energy)
        r = -0.5 * lap + (v_of_x(self.params, x) - E) * p0
        return float(np.max(np.abs(r)) / max(abs(E) * np.max(np.abs(p0)), 1e-300))


def _refine(problem, E: float, n: int, tol: float, precision: Precision):
    """A few secant steps on Delta_n at full precision, starting from E +- tol."""
    with precision.context():
        a, b = precision.real(E - tol), precision.real(E + tol)
        fa = _scalar_delta(problem, a, n, precision)
        fb = _scalar_delta(problem, b, n, precision)
        for _ in range(6):
            if fb == fa:
                break
            a, b, fa = b, b - fb * (b - a) / (fb - fa), fb
            fb = _scalar_delta(problem, b, n, precision)
            if abs(b - a) <= precision.floor * abs(b):
                break
        return b


def _scalar_delta(problem, E, n, precision):
    it = None
    for it in iterate(problem, 0, E, n, precision):
        pass
    return it.delta_n


def _series(problem, E, alpha0, order: int, precision: Precision) -> list:
    """Taylor coefficients of the solution of f'' = lambda_0 f' + s_0 f with f(0)=1, f'(0)=-alpha0."""
    with precision.context():
        zero = precision.real(0)
        ln, ld, sn, sd = problem.rational_at(zero, order, E)
        lam = list(jet_div(ln, ld).coeffs)
        s = list(jet_div(sn, sd).coeffs)
        c = [precision.real(1), -alpha0]
        for k in range(order - 1):
            acc = zero
            for i in range(k + 1):
                acc += lam[i] * (k - i + 1) * c[k - i + 1] + s[i] * c[k - i]
            c.append(acc / ((k + 2) * (k + 1)))
        return c


def wavefunction_model(params: PotentialParams, eigen: EigenResult, order: int = 240,
                       precision: Precision = DEFAULT_PRECISION, quad_nodes: int = 400) -> WavefunctionModel:
    if not eigen.converged:
        raise WavefunctionUnavailableError("the eigenvalue is not converged in N")
    ex = characteristic_exponents(params)
    if ex.any_supercritical:
        raise WavefunctionUnavailableError("endpoint exponents are complex (supercritical coupling)")
    problem = make_well_problem(params)
    n = eigen.iterations_used
    E = _refine(problem, eigen.energy, n, max(eigen.bracket[1] - eigen.bracket[0], 1e-12), precision)
    last = None
    for last in iterate(problem, 0, E, n, precision):
        pass
    if last.alpha_n is None:
        raise WavefunctionUnavailableError("s_N/lambda_N is undefined at y = 0 (lambda_N vanishes)")
    coeffs = _series(problem, E, last.alpha_n, order, precision)
    tail = max(abs(float(c)) for c in coeffs[-5:])
    head = max(abs(float(c)) for c in coeffs)
    if not tail <= 1e-12 * head:
        raise WavefunctionUnavailableError(f"Taylor series of f has not converged at order {order}")
    model = WavefunctionModel(params, E, problem.origin_exponent, problem.wall_exponent, tuple(coeffs))
    norm, err = _normalize(model, quad_nodes)
    return WavefunctionModel(params, E, model.origin_exponent, model.wall_exponent, model.series, norm, err)


def _normalize(model: WavefunctionModel, nodes: int):
    L = model.params.L

    def integral(m):
        t, w = np.polynomial.legendre.leggauss(m)
        x = 0.5 * L * (t + 1)
        return 0.5 * L * float(np.sum(w * model.at_x(x) ** 2))

    full, half = integral(nodes), integral(nodes // 2)
    x_probe = np.linspace(0, L, 203)[1:-1]
    probe = model.at_x(x_probe)
    sign = np.sign(probe[np.argmax(np.abs(probe) > 1e-8 * np.max(np.abs(probe)))])
    return sign / math.sqrt(full), abs(full - half) / full


def wavefunction(params: PotentialParams, eigen: EigenResult, y_samples) -> np.ndarray:
    """Unit-normalized psi at the given y samples (positive next to the origin)."""
    return wavefunction_model(params, eigen)(np.asarray(y_samples, dtype=float))
