"""Finite-difference bound states of ``-Lambda^2 psi'' + V psi = E psi``.

The box ``[-L, L]`` carries ``M`` interior nodes with Dirichlet ends.  The
Hamiltonian is the symmetric tridiagonal three-point stencil; its lowest
eigenpairs come from Sturm-sequence bisection followed by inverse iteration
(LAPACK ``stebz``/``stein`` through :func:`scipy.linalg.eigh_tridiagonal`).
"""
from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import BoundaryLeakError, NumericalError, ValidationError
from .potential import ArnoldPotential, evaluate

PotentialLike = Union[ArnoldPotential, Callable[[np.ndarray], np.ndarray]]

LEAK_TOL = 1e-6
DEGENERATE_SPLIT = 1e-12
WKB_ACTION = 20.0
# pairs closer than this multiple of eps*||H|| are not resolved by inverse iteration
DEGENERATE_EPS_FACTOR = 1e4


class Parity(str, enum.Enum):
    EVEN = "even"
    ODD = "odd"
    INDETERMINATE = "indeterminate"


@dataclass(frozen=True)
class GridSpec:
    """Uniform grid of ``points`` interior nodes on ``[offset-L, offset+L]``.

    ``lambda_sq`` overrides the potential's own mass term when given.  A
    nonzero ``offset`` breaks the mirror symmetry of the grid.
    """

    half_width: float
    points: int
    lambda_sq: Optional[float] = None
    offset: float = 0.0

    def __post_init__(self):
        if not self.half_width > 0:
            raise ValidationError("half_width must be positive")
        if not isinstance(self.points, int) or self.points < 64:
            raise ValidationError("points must be an integer >= 64")
        if self.points % 2 == 0:
            raise ValidationError("points must be odd so that x = 0 is a node")
        if self.lambda_sq is not None and not self.lambda_sq > 0:
            raise ValidationError("lambda_sq must be positive")

    @property
    def step(self) -> float:
        return 2.0 * self.half_width / (self.points + 1)

    def nodes(self) -> np.ndarray:
        i = np.arange(1, self.points + 1)
        return self.offset - self.half_width + i * self.step

    def refined(self) -> "GridSpec":
        """Same box with the step halved."""
        return GridSpec(self.half_width, 2 * self.points + 1, self.lambda_sq, self.offset)

    @property
    def symmetric(self) -> bool:
        return self.offset == 0.0


@dataclass(frozen=True)
class Doublet:
    lower: int
    upper: int
    splitting: float
    odd_minus_even: float


@dataclass
class SpectralResult:
    x: np.ndarray
    energies: np.ndarray
    wavefunctions: np.ndarray  # shape (n_states, points)
    grid: GridSpec
    lambda_sq: float
    parities: List[Parity] = field(default_factory=list)
    cuts: Tuple[float, ...] = ()
    localization: Optional[np.ndarray] = None  # shape (n_states, n_regions)
    splittings: List[Doublet] = field(default_factory=list)

    @property
    def n_states(self) -> int:
        return len(self.energies)

    def regions(self) -> List[Tuple[float, float]]:
        return cuts_to_regions(self.grid, self.cuts)


def _potential_values(pot: PotentialLike, x: np.ndarray) -> np.ndarray:
    if isinstance(pot, ArnoldPotential):
        return evaluate(pot, x)
    return np.asarray(pot(x), dtype=float)


def _lambda_sq(pot: PotentialLike, grid: GridSpec) -> float:
    if grid.lambda_sq is not None:
        return float(grid.lambda_sq)
    if isinstance(pot, ArnoldPotential):
        return float(pot.lambda_sq)
    return 1.0


def sturm_count(diag: np.ndarray, off: float | np.ndarray, sigma: float) -> int:
    """Number of eigenvalues below ``sigma`` (Sturm sequence of LDL^T pivots)."""
    off = np.broadcast_to(np.asarray(off, dtype=float), (len(diag) - 1,))
    count = 0
    q = 1.0
    tiny = np.finfo(float).tiny
    for i, d in enumerate(diag):
        e2 = off[i - 1] ** 2 if i else 0.0
        q = (d - sigma) - (e2 / q if i else 0.0)
        if q == 0.0:
            q = -tiny
        if q < 0:
            count += 1
    return count


def hamiltonian(pot: PotentialLike, grid: GridSpec):
    """Diagonal, off-diagonal and nodes of the three-point Hamiltonian."""
    x = grid.nodes()
    lam = _lambda_sq(pot, grid)
    h = grid.step
    diag = _potential_values(pot, x) + 2.0 * lam / h ** 2
    off = np.full(grid.points - 1, -lam / h ** 2)
    return diag, off, x


def barrier_cuts(pot: PotentialLike) -> Tuple[float, ...]:
    """Positions of the local maxima of an Arnold potential (sorted)."""
    if not isinstance(pot, ArnoldPotential):
        return ()
    coeffs = [float(c) for c in pot.c_polynomial()]
    roots = np.roots(coeffs) if pot.N else np.array([])
    xis = sorted(r.real for r in roots if abs(r.imag) < 1e-9 * max(1.0, abs(r)) and r.real > 0)
    cand = [0.0] + [math.sqrt(x) for x in xis]
    cuts = []
    for c in cand:
        d = 1e-6 * max(1.0, c)
        if evaluate(pot, c) > evaluate(pot, c + d) and evaluate(pot, c) > evaluate(pot, c - d):
            cuts.extend({-c, c})
    return tuple(sorted(set(cuts)))


def cuts_to_regions(grid: GridSpec, cuts: Sequence[float]) -> List[Tuple[float, float]]:
    lo = grid.offset - grid.half_width
    hi = grid.offset + grid.half_width
    edges = [lo] + [c for c in sorted(cuts) if lo < c < hi] + [hi]
    return list(zip(edges[:-1], edges[1:]))


def _cumulative(x_full, rho):
    seg = 0.5 * (rho[:, 1:] + rho[:, :-1]) * np.diff(x_full)
    return np.concatenate([np.zeros((rho.shape[0], 1)), np.cumsum(seg, axis=1)], axis=1)


def _integral_to(x_full, rho, cum, t):
    k = int(np.clip(np.searchsorted(x_full, t, side="right") - 1, 0, len(x_full) - 2))
    x0, x1 = x_full[k], x_full[k + 1]
    frac = (t - x0) / (x1 - x0)
    rt = rho[:, k] + frac * (rho[:, k + 1] - rho[:, k])
    return cum[:, k] + 0.5 * (rho[:, k] + rt) * (t - x0)


def localization_weights(result: SpectralResult,
                         regions: Optional[Sequence[Tuple[float, float]]] = None) -> np.ndarray:
    """Probability in each region, by trapezoid rule on ``|psi|^2``.

    ``regions`` must partition the box; the default cuts at the barrier maxima.
    """
    grid = result.grid
    if regions is None:
        regions = result.regions()
    regions = [tuple(map(float, r)) for r in regions]
    lo = grid.offset - grid.half_width
    hi = grid.offset + grid.half_width
    scale = 1e-12 * max(1.0, grid.half_width)
    ok = bool(regions) and abs(regions[0][0] - lo) <= scale and abs(regions[-1][1] - hi) <= scale
    ok = ok and all(a < b for a, b in regions)
    ok = ok and all(abs(regions[i][1] - regions[i + 1][0]) <= scale for i in range(len(regions) - 1))
    if not ok:
        raise ValidationError(f"regions {regions} do not partition [{lo}, {hi}]")
    x_full = np.concatenate([[lo], result.x, [hi]])
    psi = result.wavefunctions
    zeros = np.zeros((psi.shape[0], 1))
    rho = np.concatenate([zeros, psi ** 2, zeros], axis=1)
    cum = _cumulative(x_full, rho)
    out = np.empty((psi.shape[0], len(regions)))
    for j, (a, b) in enumerate(regions):
        out[:, j] = _integral_to(x_full, rho, cum, b) - _integral_to(x_full, rho, cum, a)
    return out


def classify_parity(result: SpectralResult, tol: float = 1e-6) -> List[Parity]:
    """Even/odd under ``x -> -x``; indeterminate on asymmetric grids or mixed states."""
    x = result.x
    if not np.allclose(x, -x[::-1], rtol=0, atol=1e-12 * max(1.0, result.grid.half_width)):
        return [Parity.INDETERMINATE] * result.n_states
    out = []
    for psi in result.wavefunctions:
        scale = np.max(np.abs(psi))
        mirror = psi[::-1]
        if np.max(np.abs(psi - mirror)) <= tol * scale:
            out.append(Parity.EVEN)
        elif np.max(np.abs(psi + mirror)) <= tol * scale:
            out.append(Parity.ODD)
        else:
            out.append(Parity.INDETERMINATE)
    return out


def doublet_splittings(result: SpectralResult, gap_factor: float = 0.1) -> List[Doublet]:
    """Opposite-parity neighbours separated by much less than the local spacing.

    The local spacing is the smaller of the gaps to the adjacent levels; a pair
    at the edge of the computed ladder uses the one neighbour it has.
    """
    E = result.energies
    par = result.parities or classify_parity(result)
    out = []
    n = 0
    while n + 1 < len(E):
        pair = {par[n], par[n + 1]}
        if pair == {Parity.EVEN, Parity.ODD}:
            neighbours = []
            if n > 0:
                neighbours.append(E[n] - E[n - 1])
            if n + 2 < len(E):
                neighbours.append(E[n + 2] - E[n + 1])
            gap = E[n + 1] - E[n]
            if neighbours and gap < gap_factor * min(neighbours):
                sign = 1.0 if par[n] == Parity.EVEN else -1.0
                out.append(Doublet(n, n + 1, float(gap), float(sign * gap)))
                n += 2
                continue
        n += 1
    return out


def _fix_sign(psi: np.ndarray, x: np.ndarray) -> np.ndarray:
    right = np.where(x >= 0)[0]
    idx = right[np.argmax(np.abs(psi[right]))] if len(right) else np.argmax(np.abs(psi))
    return psi if psi[idx] >= 0 else -psi


def _parity_project(vecs: np.ndarray, h: float, first_index: int):
    """Rotate a numerically mixed quasi-degenerate pair onto parity eigenstates.

    Returns ``None`` when the pair does not span a parity-invariant plane
    (two states of equal parity).  Otherwise the pair is ordered by the
    oscillation theorem: state ``k`` has parity ``(-1)^k``.  Their energies
    agree to solver precision, so the Rayleigh quotient cannot order them.
    """
    mirror = vecs[:, ::-1]
    A = h * vecs @ mirror.T
    A = 0.5 * (A + A.T)
    evals, evecs = np.linalg.eigh(A)
    if not (abs(evals[0] + 1) < 1e-6 and abs(evals[1] - 1) < 1e-6):
        return None
    odd, even = evecs.T @ vecs
    return np.array([even, odd] if first_index % 2 == 0 else [odd, even])


def _degenerate_threshold(diag: np.ndarray, off: np.ndarray) -> float:
    norm = float(np.max(np.abs(diag)) + 2 * np.max(np.abs(off)))
    return max(DEGENERATE_SPLIT, DEGENERATE_EPS_FACTOR * np.finfo(float).eps * norm)


def solve(pot: PotentialLike, grid: GridSpec, n_states: int,
          cuts: Optional[Sequence[float]] = None,
          check_leak: bool = True) -> SpectralResult:
    """Lowest ``n_states`` eigenpairs on ``grid``.

    Raises :class:`NumericalError` when fewer than ``n_states`` levels lie
    below the potential at the box edge and :class:`BoundaryLeakError` when a
    wavefunction has not decayed at the edge nodes.
    """
    if n_states < 1:
        raise ValidationError("n_states must be >= 1")
    diag, off, x = hamiltonian(pot, grid)
    lam = _lambda_sq(pot, grid)
    h = grid.step
    v_edge = float(min(_potential_values(pot, np.array([x[0], x[-1]]))))
    safe = sturm_count(diag, off, v_edge)
    if safe < n_states:
        raise NumericalError(
            f"only {safe} levels lie below V at the box edge ({v_edge:.6g}); "
            f"requested {n_states}: enlarge half_width")
    w, v = eigh_tridiagonal(diag, off, select="i", select_range=(0, n_states - 1),
                            lapack_driver="stebz")
    psi = v.T / math.sqrt(h)
    if grid.symmetric:
        thresh = _degenerate_threshold(diag, off)
        k = 0
        while k + 1 < n_states:
            if w[k + 1] - w[k] < thresh:
                fixed = _parity_project(psi[k:k + 2], h, k)
                if fixed is not None:
                    psi[k:k + 2] = fixed
                k += 2
            else:
                k += 1
    psi = np.array([_fix_sign(p, x) for p in psi])
    if check_leak:
        edge = np.maximum(np.abs(psi[:, 0]), np.abs(psi[:, -1]))
        peak = np.max(np.abs(psi), axis=1)
        bad = np.where(edge > LEAK_TOL * peak)[0]
        if len(bad):
            raise BoundaryLeakError(
                f"states {bad.tolist()} leak through the box edge at L={grid.half_width}: "
                f"max |psi(edge)|/max|psi| = {float(np.max(edge[bad] / peak[bad])):.3g}")
    result = SpectralResult(x=x, energies=w, wavefunctions=psi, grid=grid, lambda_sq=lam)
    result.parities = classify_parity(result)
    result.cuts = tuple(barrier_cuts(pot) if cuts is None else cuts)
    result.localization = localization_weights(result)
    result.splittings = doublet_splittings(result)
    return result


def node_count(psi: np.ndarray, rel: float = 1e-8) -> int:
    """Interior sign changes, ignoring the numerically zero tails."""
    big = psi[np.abs(psi) > rel * np.max(np.abs(psi))]
    return int(np.count_nonzero(np.signbit(big[1:]) != np.signbit(big[:-1])))


@dataclass
class ConvergenceTable:
    steps: List[float]
    points: List[int]
    energies: np.ndarray  # shape (levels, n_grids)
    ratios: np.ndarray  # shape (levels, n_grids - 2)
    extrapolated: np.ndarray  # Richardson value from the two finest grids


def convergence_study(pot: PotentialLike, grid: GridSpec, refinements: int = 3,
                      n_states: int = 1) -> ConvergenceTable:
    """Energies under repeated step halving with Richardson ratios.

    ``ratios[:, k] = (E(2h) - E(4h)) / (E(h) - E(2h))`` tends to 4 for the
    second-order stencil.  Non-monotone convergence only warns.
    """
    grids = [grid]
    for _ in range(refinements):
        grids.append(grids[-1].refined())
    E = np.array([solve(pot, g, n_states, cuts=()).energies for g in grids]).T
    diffs = np.diff(E, axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = diffs[:, :-1] / diffs[:, 1:]
    extrap = E[:, -1] + (E[:, -1] - E[:, -2]) / 3.0
    for lvl in range(E.shape[0]):
        d = np.abs(diffs[lvl])
        same_sign = np.all(np.sign(diffs[lvl]) == np.sign(diffs[lvl][0]))
        if not (same_sign and np.all(d[1:] < d[:-1])):
            warnings.warn(f"non-monotone grid convergence for level {lvl}: "
                          f"differences {diffs[lvl].tolist()}", RuntimeWarning)
    return ConvergenceTable([g.step for g in grids], [g.points for g in grids], E, ratios, extrap)


def auto_grid(pot: ArnoldPotential, n_states: int, lambda_sq: Optional[float] = None,
              points: Optional[int] = None, max_points: int = 40001) -> GridSpec:
    """Box and resolution from the well geometry.

    ``L`` is the larger of the half-width where ``V`` exceeds a harmonic
    estimate of the highest requested level by ``10 Lambda sqrt(t2)`` of the
    outer well, and the point where the WKB decay exponent beyond that level's
    turning point reaches ``WKB_ACTION``.  The step resolves the stiffest
    well's oscillator length 25-fold.
    """
    from .potential import curvature

    lam = float(pot.lambda_sq if lambda_sq is None else lambda_sq)
    Lam = math.sqrt(lam)
    coeffs = [float(c) for c in pot.c_polynomial()]
    roots = np.roots(coeffs)
    xis = sorted(r.real for r in roots if abs(r.imag) < 1e-9 * max(1.0, abs(r)) and r.real >= 0)
    minima = []
    for xi in [0.0] + xis:
        xm = math.sqrt(xi)
        t2 = float(curvature(pot, xm))
        if t2 > 0:
            minima.append((xm, float(evaluate(pot, xm)), t2))
    if not minima:  # flat quartic bottom etc.
        minima = [(0.0, 0.0, 1.0)]
    e_top = max(v + (2 * n_states + 1) * Lam * math.sqrt(t2) for _, v, t2 in minima)
    outer = max(minima, key=lambda m: m[0])
    target = e_top + 10.0 * Lam * math.sqrt(outer[2])
    L = max(outer[0], 1e-3) * 1.05 + 0.1
    while evaluate(pot, L) < target:
        L *= 1.05
    # WKB decay exp(-int sqrt(V - E)/Lambda) past the turning point of e_top
    x = max(outer[0], 1e-3)
    while evaluate(pot, x) < e_top:
        x += 1e-3 * max(1.0, x)
    dx = 1e-3 * max(1.0, x)
    action = 0.0
    while action < WKB_ACTION:
        action += math.sqrt(max(evaluate(pot, x) - e_top, 0.0)) / Lam * dx
        x += dx
    L = max(L, x)
    ell = min(math.sqrt(Lam / math.sqrt(t2)) for _, _, t2 in minima)
    if points is None:
        points = int(2 * L / (ell / 25.0))
        points = min(max(points, 2001), max_points)
    if points % 2 == 0:
        points += 1
    return GridSpec(L, points, lam)
