"""Relocalization catastrophes along one-parameter families.

The gap ``Delta = E0(outer wells) - E0(inner/central wells)`` changes sign
where the ground state jumps between well families.  It is estimated either
from the harmonic formulas or from grid eigenstates classified by their
localization weights.

The ratio called mu in the k=5 analysis is named ``r`` here so it cannot be
confused with the particle mass.
"""
from __future__ import annotations

import concurrent.futures
import enum
import math
import os
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from .errors import NoCatastropheError, NumericalError, ValidationError
from .perturbation import ground_energy_estimates_k5, k7_level_estimates
from .potential import ShiftParameters, build_potential
from .spectral import Parity, SpectralResult, auto_grid, solve


class PathKind(str, enum.Enum):
    K5_MU_RATIO = "k5_mu_ratio"  # alpha = r beta, beta fixed, sweep r
    K5_ALPHA_BETA = "k5_alpha_beta"  # alpha fixed, sweep beta
    K7_ETA = "k7_eta"  # beta = alpha, gamma = (1 + eta) alpha, sweep eta
    K7_SIGMA = "k7_sigma"  # beta = gamma = sigma alpha, sweep sigma


class Estimator(str, enum.Enum):
    HARMONIC = "harmonic"
    NUMERIC = "numeric"


_FIXED = {
    PathKind.K5_MU_RATIO: ("beta", "r"),
    PathKind.K5_ALPHA_BETA: ("alpha", "beta"),
    PathKind.K7_ETA: ("alpha", "eta"),
    PathKind.K7_SIGMA: ("alpha", "sigma"),
}


def threads() -> int:
    """Worker cap from ``ARNOLD_CAT_THREADS`` (default: CPU count, at most 8)."""
    env = os.environ.get("ARNOLD_CAT_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ValidationError(f"ARNOLD_CAT_THREADS={env!r} is not an integer")
    return min(8, os.cpu_count() or 1)


def _pmap(fn, items):
    items = list(items)
    n = min(threads(), len(items))
    if n <= 1:
        return [fn(it) for it in items]
    with concurrent.futures.ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


@dataclass(frozen=True)
class FamilyPath:
    """A one-parameter family of shift parameters.

    ``fixed`` is the held parameter (alpha, or beta for the ratio path);
    ``interval`` bounds the swept parameter.
    """

    kind: PathKind
    fixed: float
    interval: Tuple[float, float] = (0.0, 1.0)
    lambda_sq: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "kind", PathKind(self.kind))
        if not self.fixed > 0:
            raise ValidationError(f"fixed {self.fixed_name} must be positive")
        lo, hi = self.interval
        if not lo < hi:
            raise ValidationError(f"empty interval {self.interval}")

    @property
    def fixed_name(self) -> str:
        return _FIXED[self.kind][0]

    @property
    def swept_name(self) -> str:
        return _FIXED[self.kind][1]

    @property
    def N(self) -> int:
        return 2 if self.kind in (PathKind.K5_MU_RATIO, PathKind.K5_ALPHA_BETA) else 3

    def params(self, value: float) -> Tuple[float, ...]:
        f = self.fixed
        if self.kind == PathKind.K5_MU_RATIO:
            return (value * f, f)
        if self.kind == PathKind.K5_ALPHA_BETA:
            return (f, value)
        if self.kind == PathKind.K7_ETA:
            return (f, f, (1.0 + value) * f)
        return (f, value * f, value * f)

    def shift(self, value: float) -> ShiftParameters:
        p = self.params(value)
        if any(not q > 0 for q in p):
            raise ValidationError(
                f"{self.swept_name}={value} leaves the multi-well regime (params {p})")
        return ShiftParameters.from_params(p)


@dataclass(frozen=True)
class LocusSample:
    value: float
    delta: float
    estimator: Estimator
    bracketing: bool = False
    bracket: Optional[Tuple[float, float]] = None


@dataclass(frozen=True)
class NumericOptions:
    n_states: int = 8
    points: Optional[int] = None
    max_states: int = 64  # the gap estimator doubles n_states up to this


def class_weights(result: SpectralResult, N: int) -> Tuple[np.ndarray, np.ndarray]:
    """Per-state ``(inner, outer)`` probabilities.

    Inner is the central well for even N and the innermost pair for odd N;
    outer is the outermost pair.
    """
    loc = result.localization
    k = loc.shape[1]
    if k != N + 1:
        raise NumericalError(f"expected {N + 1} well regions, found {k}")
    if N % 2 == 0:
        inner = loc[:, N // 2]
    else:
        inner = loc[:, N // 2] + loc[:, N // 2 + 1]
    outer = loc[:, 0] + loc[:, -1]
    return inner, outer


def _numeric_solve(path: FamilyPath, value: float, opts: NumericOptions) -> SpectralResult:
    pot = build_potential(path.shift(value), path.lambda_sq)
    grid = auto_grid(pot, opts.n_states, points=opts.points)
    return solve(pot, grid, opts.n_states)


def _harmonic_delta(path: FamilyPath, value: float) -> float:
    lam = math.sqrt(path.lambda_sq)
    shift = path.shift(value)
    if path.N == 2:
        central, outer = ground_energy_estimates_k5(shift, lam)
        return outer - central
    inner, outer = k7_level_estimates(shift, 0, lam)
    return outer - inner


def _numeric_delta(path: FamilyPath, value: float, opts: NumericOptions) -> float:
    n = opts.n_states
    while True:
        res = _numeric_solve(path, value, NumericOptions(n, opts.points, opts.max_states))
        inner, outer = class_weights(res, path.N)
        ins = np.where(inner > 0.5)[0]
        outs = np.where(outer > 0.5)[0]
        if len(ins) and len(outs):
            return float(res.energies[outs[0]] - res.energies[ins[0]])
        if n >= opts.max_states:
            missing = "inner" if not len(ins) else "outer"
            raise NumericalError(
                f"no {missing}-localized state among the lowest {n} "
                f"at {path.swept_name}={value}")
        n = min(2 * n, opts.max_states)


def gap(path: FamilyPath, value: float, estimator=Estimator.HARMONIC,
        options: NumericOptions = NumericOptions()) -> LocusSample:
    """Outer-minus-inner ground-energy gap at one point of the path.

    ``delta > 0`` means the inner (central) candidate is the ground state.
    """
    estimator = Estimator(estimator)
    if estimator == Estimator.HARMONIC:
        d = _harmonic_delta(path, value)
    else:
        d = _numeric_delta(path, value, options)
    return LocusSample(float(value), float(d), estimator)


def critical_root(path: FamilyPath, interval: Optional[Tuple[float, float]] = None,
                  estimator=Estimator.HARMONIC, tol: float = 1e-8,
                  options: NumericOptions = NumericOptions()) -> LocusSample:
    """Bisect the gap to a bracket narrower than ``tol``."""
    estimator = Estimator(estimator)
    a, b = interval if interval is not None else path.interval
    fa = gap(path, a, estimator, options).delta
    fb = gap(path, b, estimator, options).delta
    if fa == 0.0:
        return LocusSample(a, 0.0, estimator, True, (a, a))
    if fb == 0.0:
        return LocusSample(b, 0.0, estimator, True, (b, b))
    if (fa > 0) == (fb > 0):
        raise NoCatastropheError(
            f"no catastrophe on path: gap keeps sign on [{a}, {b}] ({fa:.3g}, {fb:.3g})")
    while b - a > tol:
        m = 0.5 * (a + b)
        fm = gap(path, m, estimator, options).delta
        if fm == 0.0:
            a = b = m
            break
        if (fm > 0) == (fa > 0):
            a, fa = m, fm
        else:
            b, fb = m, fm
    mid = 0.5 * (a + b)
    # the residual is reported at the midpoint; bisection never needs it
    resid = gap(path, mid, estimator, options).delta
    return LocusSample(mid, resid, estimator, True, (a, b))


def find_roots(path: FamilyPath, estimator=Estimator.HARMONIC, samples: int = 400,
               tol: float = 1e-8, options: NumericOptions = NumericOptions()) -> List[LocusSample]:
    """Every sign change of the gap on a uniform scan of the path interval."""
    lo, hi = path.interval
    xs = np.linspace(lo, hi, samples + 1)
    vals = _pmap(lambda v: gap(path, float(v), estimator, options).delta, xs)
    roots = []
    for i in range(samples):
        if (vals[i] > 0) != (vals[i + 1] > 0):
            roots.append(critical_root(path, (float(xs[i]), float(xs[i + 1])),
                                       estimator, tol, options))
    return roots


@dataclass(frozen=True)
class LocusPoint:
    fixed: float
    branch: Optional[str]
    critical: float
    residual: float


def default_interval(kind: PathKind, fixed: float) -> Tuple[float, float]:
    """Scan window per path: wide enough for every root the gap can have."""
    kind = PathKind(kind)
    if kind == PathKind.K5_ALPHA_BETA:
        return (1e-3 * fixed, 3.0 * fixed + 2.0)
    if kind == PathKind.K5_MU_RATIO:
        return (1e-3, 3.0)
    if kind == PathKind.K7_ETA:
        return (0.0, 2.0)
    return (1e-2, 3.0)


def _branch_names(kind: PathKind, count: int) -> List[str]:
    if count == 1:
        return ["upper" if kind == PathKind.K5_ALPHA_BETA else "main"]
    if count == 2:
        return ["lower", "upper"]
    return [f"root{i}" for i in range(count)]


def locus_curve(kind, fixed_values: Sequence[float], estimator=Estimator.HARMONIC,
                interval: Optional[Callable[[float], Tuple[float, float]]] = None,
                samples: int = 400, tol: float = 1e-8, lambda_sq: float = 1.0,
                options: NumericOptions = NumericOptions()) -> List[LocusPoint]:
    """Critical values of the swept parameter for each fixed value.

    Fixed values without a root yield a gap record (branch ``None``, NaN).
    """
    kind = PathKind(kind)
    interval = interval or (lambda f: default_interval(kind, f))

    def one(f):
        path = FamilyPath(kind, float(f), interval(float(f)), lambda_sq)
        try:
            roots = find_roots(path, estimator, samples, tol, options)
        except (ValidationError, NumericalError):
            roots = []
        if not roots:
            return [LocusPoint(float(f), None, math.nan, math.nan)]
        names = _branch_names(kind, len(roots))
        return [LocusPoint(float(f), n, r.value, r.delta) for n, r in zip(names, roots)]

    rows = []
    for chunk in _pmap(one, fixed_values):
        rows.extend(chunk)
    return rows


@dataclass(frozen=True)
class ScanSample:
    value: float
    ground_energy: float
    weights: Tuple[float, ...]
    inner: float
    outer: float
    parity: Parity
    ground_doublet: bool  # states 0 and 1 form a tunnelling doublet

    @property
    def dominant(self) -> str:
        return "inner" if self.inner > 0.5 else "outer" if self.outer > 0.5 else "mixed"


@dataclass
class ScanResult:
    path: FamilyPath
    samples: List[ScanSample] = field(default_factory=list)
    flip_value: Optional[float] = None

    @property
    def monotone(self) -> bool:
        return self.flip_value is None


def relocalization_scan(path: FamilyPath, values: Sequence[float],
                        options: NumericOptions = NumericOptions()) -> ScanResult:
    """Ground-state localization along the path and where it flips.

    The flip is interpolated linearly where the inner weight crosses 0.5.
    """

    def one(v):
        res = _numeric_solve(path, float(v), options)
        inner, outer = class_weights(res, path.N)
        doublet = any(d.lower == 0 for d in res.splittings)
        return ScanSample(float(v), float(res.energies[0]),
                          tuple(float(w) for w in res.localization[0]),
                          float(inner[0]), float(outer[0]), res.parities[0], doublet)

    samples = _pmap(one, values)
    result = ScanResult(path, samples)
    for s0, s1 in zip(samples, samples[1:]):
        if (s0.inner > 0.5) != (s1.inner > 0.5):
            t = (0.5 - s0.inner) / (s1.inner - s0.inner)
            result.flip_value = s0.value + t * (s1.value - s0.value)
            break
    return result
