"""Leading-order harmonic estimates for deep wells.

Every minimum at ``x_min`` with Taylor curvature ``t2`` supports the ladder
``E_n ~ V(x_min) + (2n+1) Lambda sqrt(t2)``; the cubic term's first-order
shift vanishes by parity, so nothing beyond that order is computed.
"""
from __future__ import annotations

import enum
import math
from fractions import Fraction
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from .diophantine import PUBLISHED_WEIGHTS
from .errors import ValidationError
from .potential import (ArnoldPotential, ExtremumKind, ShiftParameters, build_potential,
                        couplings_to_shifts, curvature, curvature_at_xi, extrema)


class Multiplicity(str, enum.Enum):
    CENTRAL = "central"
    PAIR = "pair"


@dataclass(frozen=True)
class WellModel:
    position: float
    depth: float
    omega_sq: float
    multiplicity: Multiplicity
    lambda_: float = 1.0

    @property
    def omega(self) -> float:
        return math.sqrt(self.omega_sq)


def well_models(pot: ArnoldPotential, shift: Optional[ShiftParameters] = None) -> List[WellModel]:
    """One model per well (x >= 0), innermost first."""
    if shift is None:
        shift = couplings_to_shifts(pot)
    lam = math.sqrt(float(pot.lambda_sq))
    out = []
    for rec in extrema(shift, pot):
        if rec.kind != ExtremumKind.MINIMUM or rec.position < 0:
            continue
        mult = Multiplicity.CENTRAL if rec.position == 0 else Multiplicity.PAIR
        out.append(WellModel(rec.position, float(rec.value),
                             float(curvature(pot, rec.position)), mult, lam))
    return out


def harmonic_levels(well: WellModel, n_max: int) -> np.ndarray:
    """``E_n = depth + (2n+1) Lambda omega`` for ``n = 0..n_max``."""
    if not well.omega_sq > 0:
        raise ValidationError(f"curvature {well.omega_sq} <= 0: not a well")
    n = np.arange(n_max + 1)
    return well.depth + (2 * n + 1) * well.lambda_ * well.omega


@dataclass(frozen=True)
class PerturbationCoupling:
    rho: float
    lambda_cubic: float
    lower: float
    upper: float
    hypothesis: bool  # alpha^2 < beta^2
    within: bool  # lower < lambda_cubic < upper


def _k5(shift: ShiftParameters):
    if shift.N != 2 or shift.weights != PUBLISHED_WEIGHTS[2]:
        raise ValidationError("expected an N=2 shift with default weights")
    a2, b2 = (float(s) for s in shift.squares)
    return a2, b2, a2 + 2.0 * b2


def cubic_coupling(shift: ShiftParameters) -> PerturbationCoupling:
    """Rescaled cubic anharmonicity of the outer N=2 wells and its bounds."""
    a2, b2, R2 = _k5(shift)
    if b2 <= 0:
        raise ValidationError("beta = 0: the outer wells merge with the barrier")
    R = math.sqrt(R2)
    rho = (1.0 / (12.0 * R2 * b2)) ** 0.25
    lam = 4.0 * R * rho ** 5 * (2.0 * R2 + 3.0 * b2)
    lower = 7.0 * rho / (3.0 * R)
    upper = 9.0 * rho / (3.0 * R)
    return PerturbationCoupling(rho, lam, lower, upper, a2 < b2, lower < lam < upper)


def ground_energy_estimates_k5(shift: ShiftParameters, lambda_: float = 1.0) -> Tuple[float, float]:
    """``(E0_central, E0_outer)`` for the N=2 triple well."""
    a2, b2, R2 = _k5(shift)
    a, b, R = math.sqrt(a2), math.sqrt(b2), math.sqrt(R2)
    central = lambda_ * math.sqrt(3.0) * a * R
    outer = (a2 - b2) * R2 * R2 + lambda_ * 2.0 * math.sqrt(3.0) * b * R
    return central, outer


def _k7(shift: ShiftParameters):
    if shift.N != 3 or shift.weights != PUBLISHED_WEIGHTS[3]:
        raise ValidationError("expected an N=3 shift with default weights")
    return tuple(float(s) for s in shift.squares)


def k7_curvatures(shift: ShiftParameters) -> Tuple[float, float]:
    """``(omega^2, Omega^2)`` at the inner (x = alpha) and outer (x = R) minima."""
    a2, b2, g2 = _k7(shift)
    R2 = a2 + 3.0 * b2 + 3.0 * g2
    return 72.0 * b2 * (b2 + g2) * a2, 72.0 * g2 * (b2 + g2) * R2


def k7_level_estimates(shift: ShiftParameters, n: int = 0, lambda_: float = 1.0) -> Tuple[float, float]:
    """``(E_n inner-wells, E_n outer-wells)`` for the N=3 quadruple well."""
    a2, b2, g2 = _k7(shift)
    R2 = a2 + 3.0 * b2 + 3.0 * g2
    v_inner = -(a2 * a2 + 8 * a2 * b2 + 4 * a2 * g2 + 18 * b2 * b2 + 18 * b2 * g2) * a2 * a2
    v_outer = -(a2 * a2 + 2 * a2 * b2 + 3 * g2 * g2 - 3 * b2 * b2 - 2 * a2 * g2) * R2 * R2
    w2, W2 = k7_curvatures(shift)
    k = (2 * n + 1) * lambda_
    return v_inner + k * math.sqrt(w2), v_outer + k * math.sqrt(W2)


def _on_sigma_path(shift: ShiftParameters):
    a2, b2, g2 = _k7(shift)
    if a2 <= 0:
        raise ValidationError("alpha must be positive")
    if abs(b2 - g2) > 1e-12 * max(b2, g2, 1e-300):
        raise ValidationError("gap formula holds only on beta = gamma")
    return math.sqrt(a2), math.sqrt(b2 / a2)


def doublet_gap_formula(shift: ShiftParameters, n: int = 0) -> float:
    """``Delta_n = 12 (2n+1) alpha^3 sigma^2 (sqrt(1+6 sigma^2) - 1)`` on beta = gamma = sigma alpha."""
    alpha, sigma = _on_sigma_path(shift)
    s2 = sigma * sigma
    return 12.0 * (2 * n + 1) * alpha ** 3 * s2 * (math.sqrt(1.0 + 6.0 * s2) - 1.0)


def doublet_gap_curvature(shift: ShiftParameters, n: int = 0) -> float:
    """Same gap from Taylor curvatures of the constructed potential.

    The curvatures are evaluated exactly (floats are exact binary rationals)
    and ``Omega - omega`` is formed as ``(Omega^2 - omega^2) / (Omega + omega)``
    to avoid cancellation at small sigma.
    """
    _on_sigma_path(shift)
    exact = ShiftParameters(shift.N, tuple(Fraction(s) for s in shift.squares), shift.weights)
    pot = build_potential(exact)
    s0, s2 = exact.shifts[0], exact.shifts[2]
    w2 = curvature_at_xi(pot, s0)
    W2 = curvature_at_xi(pot, s2)
    return float(W2 - w2) / (math.sqrt(W2) + math.sqrt(w2)) * (2 * n + 1)


def sigma_path_shift(alpha: float, sigma: float) -> ShiftParameters:
    return ShiftParameters.from_params([alpha, sigma * alpha, sigma * alpha])
