"""Symmetric Arnold potentials in coupling and shift-parameter form.

With ``xi = x**2`` every potential handled here reads

    V(x) = sum_{m=0}^{N} (-1)^m binom(N+1, m) c_m^2 x^(2(N+1-m)),   c_0^2 = 1,

so that ``V'(x) = 2(N+1) x C(xi)`` with the monic ``C(xi) = prod_j (xi - s_j)``.
Couplings and shifts stay exact (``int``/``Fraction``) whenever the squared
shift parameters are rational, and fall back to ``float`` otherwise.
"""
from __future__ import annotations

import enum
import math
import numbers
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import diophantine
from .errors import DivisibilityError, NotMultiWellError, ValidationError

#: relative tolerance for treating two float shifts as one shell
SHELL_RTOL = 1e-12


def as_number(value):
    """Coerce JSON-ish input to ``int``, ``Fraction`` or ``float``.

    Strings such as ``"61/25"`` become exact fractions.
    """
    if isinstance(value, bool):
        raise ValidationError(f"expected a number, got {value!r}")
    if isinstance(value, (int, Fraction)):
        return value
    if isinstance(value, str):
        try:
            frac = Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValidationError(f"cannot parse number {value!r}") from exc
        return frac.numerator if frac.denominator == 1 else frac
    if isinstance(value, numbers.Real):
        f = float(value)
        if not math.isfinite(f):
            raise ValidationError(f"non-finite number {value!r}")
        return f
    raise ValidationError(f"expected a number, got {value!r}")


def is_exact(values) -> bool:
    return all(isinstance(v, (int, Fraction)) and not isinstance(v, bool)
               for v in values)


def _sqrt(v) -> float:
    return math.sqrt(float(v))


@dataclass(frozen=True)
class ShiftParameters:
    """Well-geometry parametrization of an N-barrier potential.

    ``squares`` holds ``(alpha^2, beta^2, ...)``; the squared shell positions
    are ``s_0 = alpha^2`` and ``s_j = s_{j-1} + weights[j-1] * squares[j]``.
    """

    N: int
    squares: Tuple
    weights: Tuple[int, ...]

    def __post_init__(self):
        if not isinstance(self.N, int) or self.N < 1:
            raise ValidationError(f"N must be a positive integer, got {self.N!r}")
        squares = tuple(as_number(s) for s in self.squares)
        if len(squares) != self.N:
            raise ValidationError(
                f"N={self.N} needs {self.N} parameters, got {len(squares)}")
        if any(s < 0 for s in squares):
            raise ValidationError("squared parameters must be nonnegative")
        weights = tuple(self.weights)
        if len(weights) != self.N - 1 or any(
                not isinstance(w, int) or isinstance(w, bool) or w < 1
                for w in weights):
            raise ValidationError(
                f"N={self.N} needs {self.N - 1} positive integer weights, "
                f"got {weights!r}")
        object.__setattr__(self, "squares", squares)
        object.__setattr__(self, "weights", weights)

    @classmethod
    def from_params(cls, params: Sequence, weights: Optional[Sequence[int]] = None):
        """Build from the unsquared ``(alpha, beta, ...)``."""
        params = [as_number(p) for p in params]
        if any(p < 0 for p in params):
            raise ValidationError("parameters must be nonnegative")
        N = len(params)
        if weights is None:
            weights = diophantine.default_weights(N)
        return cls(N, tuple(p * p for p in params), tuple(weights))

    @classmethod
    def from_squares(cls, squares: Sequence, weights: Optional[Sequence[int]] = None):
        squares = tuple(squares)
        N = len(squares)
        if weights is None:
            weights = diophantine.default_weights(N)
        return cls(N, squares, tuple(weights))

    @property
    def params(self) -> Tuple[float, ...]:
        return tuple(_sqrt(s) for s in self.squares)

    @property
    def exact(self) -> bool:
        return is_exact(self.squares)

    @property
    def shifts(self) -> Tuple:
        out = [self.squares[0]]
        for w, p2 in zip(self.weights, self.squares[1:]):
            out.append(out[-1] + w * p2)
        return tuple(out)

    @property
    def degenerate(self) -> bool:
        """True when two shells coincide or the inner shell sits at the origin."""
        s = self.shifts
        if s[0] == 0:
            return True
        return any(_same_shell(a, b) for a, b in zip(s, s[1:]))


def _same_shell(a, b) -> bool:
    if is_exact((a, b)):
        return a == b
    return abs(float(a) - float(b)) <= SHELL_RTOL * max(abs(float(a)), abs(float(b)), 1e-300)


@dataclass(frozen=True)
class ArnoldPotential:
    """``V(x)`` of degree ``2N+2`` given by its squared couplings ``c_1^2..c_N^2``."""

    N: int
    couplings: Tuple
    lambda_sq: object = 1

    def __post_init__(self):
        if not isinstance(self.N, int) or self.N < 1:
            raise ValidationError(f"N must be a positive integer, got {self.N!r}")
        couplings = tuple(as_number(c) for c in self.couplings)
        if len(couplings) != self.N:
            raise ValidationError(
                f"N={self.N} needs {self.N} couplings, got {len(couplings)}")
        lam = as_number(self.lambda_sq)
        if lam <= 0:
            raise ValidationError("lambda_sq must be positive")
        object.__setattr__(self, "couplings", couplings)
        object.__setattr__(self, "lambda_sq", lam)

    @property
    def exact(self) -> bool:
        return is_exact(self.couplings)

    @property
    def degree(self) -> int:
        return 2 * self.N + 2

    def xi_coefficients(self) -> List:
        """Coefficients of ``P`` (descending in xi) with ``V = xi * P(xi)``."""
        N = self.N
        full = (1,) + self.couplings
        return [(-1) ** m * math.comb(N + 1, m) * full[m] for m in range(N + 1)]

    def coefficients(self) -> List:
        """Coefficients of ``V`` in ascending powers of ``x`` (length ``2N+3``)."""
        out = [0] * (self.degree + 1)
        for m, c in enumerate(self.xi_coefficients()):
            out[2 * (self.N + 1 - m)] = c
        return out

    def derivative_coefficients(self) -> List:
        c = self.coefficients()
        return [k * c[k] for k in range(1, len(c))]

    def c_polynomial(self) -> List:
        """Monic ``C(xi)`` (descending) with ``V'(x) = 2(N+1) x C(x^2)``."""
        N = self.N
        full = (1,) + self.couplings
        return [(-1) ** m * math.comb(N, m) * full[m] for m in range(N + 1)]

    def value_at_xi(self, xi):
        """``V`` at ``x = sqrt(xi)``; exact for rational ``xi`` and couplings."""
        acc = 0
        for c in self.xi_coefficients():
            acc = acc * xi + c
        return acc * xi

    def __call__(self, x):
        return evaluate(self, x)

    def with_lambda_sq(self, lambda_sq) -> "ArnoldPotential":
        return ArnoldPotential(self.N, self.couplings, lambda_sq)


class ExtremumKind(str, enum.Enum):
    MINIMUM = "minimum"
    MAXIMUM = "maximum"
    INFLECTION = "inflection"


@dataclass(frozen=True)
class ExtremumRecord:
    position: float
    value: object
    kind: ExtremumKind
    ring_index: int
    xi: object = 0
    degenerate: bool = False


def build_potential(shift: ShiftParameters, lambda_sq=1, strict: bool = False) -> ArnoldPotential:
    """Couplings from shift parameters by expanding ``prod_j (xi - s_j)``.

    With ``strict=True`` the weight tuple must pass the divisibility check,
    otherwise :class:`DivisibilityError` names the offending monomial.
    """
    N = shift.N
    if strict:
        cand = diophantine.check_divisibility(
            diophantine.WeightCandidate(N, shift.weights))
        if not cand.valid:
            raise DivisibilityError(
                f"weights {shift.weights} give fractional couplings: {cand.witness}",
                cand.witness)
    poly = [1]
    for s in shift.shifts:
        nxt = poly + [0]
        for i, c in enumerate(poly):
            nxt[i + 1] = nxt[i + 1] - s * c
        poly = nxt
    couplings = []
    for m in range(1, N + 1):
        div = (-1) ** m * math.comb(N, m)
        c = poly[m]
        if isinstance(c, (int, Fraction)):
            q = Fraction(c, div)
            couplings.append(q.numerator if q.denominator == 1 else q)
        else:
            couplings.append(c / div)
    return ArnoldPotential(N, tuple(couplings), lambda_sq)


def _horner(coeffs, x):
    acc = 0
    for c in coeffs:
        acc = acc * x + c
    return acc


def _polish(coeffs, root, steps=3):
    dcoeffs = [c * (len(coeffs) - 1 - i) for i, c in enumerate(coeffs[:-1])]
    for _ in range(steps):
        d = _horner(dcoeffs, root)
        if d == 0:
            break
        step = _horner(coeffs, root) / d
        if not math.isfinite(step):
            break
        root = root - step
    return root


def xi_roots(pot: ArnoldPotential, imag_tol: float = 1e-7) -> List:
    """Real roots of ``C(xi)`` via companion-matrix eigenvalues plus Newton.

    Raises :class:`NotMultiWellError` for complex or negative roots.  Roots
    that are exactly rational for an exact potential are returned exactly.
    """
    coeffs = pot.c_polynomial()
    fco = [float(c) for c in coeffs]
    N = pot.N
    comp = np.zeros((N, N))
    comp[0, :] = [-c for c in fco[1:]]
    if N > 1:
        comp[1:, :-1] = np.eye(N - 1)
    eig = np.linalg.eigvals(comp)
    scale = max(1.0, max(abs(e) for e in eig))
    roots = []
    for e in eig:
        if abs(e.imag) > imag_tol * scale:
            raise NotMultiWellError(
                f"not an N-barrier potential: complex xi-root {e:.6g}")
        roots.append(float(e.real))
    polished = []
    for r in sorted(roots):
        r = _polish(fco, r)
        if r < -imag_tol * scale:
            raise NotMultiWellError(
                f"not an N-barrier potential: negative xi-root {r:.6g}")
        polished.append(max(r, 0.0))
    if pot.exact:
        snapped = []
        for r in polished:
            q = Fraction(r).limit_denominator(10 ** 9)
            snapped.append(q if _horner(coeffs, q) == 0 else None)
        if all(q is not None for q in snapped):
            return [q.numerator if q.denominator == 1 else q for q in snapped]
    return polished


def couplings_to_shifts(pot: ArnoldPotential,
                        weights: Optional[Sequence[int]] = None) -> ShiftParameters:
    """Invert :func:`build_potential` for a potential with real shells."""
    if weights is None:
        weights = diophantine.default_weights(pot.N)
    weights = tuple(weights)
    s = xi_roots(pot)
    squares = [s[0]]
    for w, lo, hi in zip(weights, s, s[1:]):
        squares.append((hi - lo) / w if not is_exact((hi, lo)) else Fraction(hi - lo, w))
    squares = [max(q, 0.0) if isinstance(q, float) else
               (q.numerator if isinstance(q, Fraction) and q.denominator == 1 else q)
               for q in squares]
    return ShiftParameters(pot.N, tuple(squares), weights)


def evaluate(pot: ArnoldPotential, x):
    """``V(x)`` by Horner in ``xi = x^2``; accepts scalars or numpy arrays."""
    if isinstance(x, np.ndarray):
        xi = x * x
        acc = np.zeros_like(xi, dtype=float)
        for c in pot.xi_coefficients():
            acc = acc * xi + float(c)
        return acc * xi
    if isinstance(x, (int, Fraction)) and pot.exact:
        return pot.value_at_xi(x * x)
    xi = float(x) * float(x)
    acc = 0.0
    for c in pot.xi_coefficients():
        acc = acc * xi + float(c)
    return acc * xi


def extrema(shift: ShiftParameters, pot: Optional[ArnoldPotential] = None) -> List[ExtremumRecord]:
    """All stationary points sorted by position.

    Coinciding shells are merged into one record flagged ``degenerate``; an
    even multiplicity turns it into an inflection point.
    """
    if pot is None:
        pot = build_potential(shift)
    shifts = shift.shifts
    groups: List[List[int]] = []
    for j, s in enumerate(shifts):
        if groups and _same_shell(shifts[groups[-1][0]], s):
            groups[-1].append(j)
        else:
            groups.append([j])
    n_zero = sum(1 for s in shifts if s == 0)
    positive = len(shifts) - n_zero
    origin_kind = ExtremumKind.MINIMUM if positive % 2 == 0 else ExtremumKind.MAXIMUM
    records = [ExtremumRecord(0.0, pot.value_at_xi(0), origin_kind, 0, 0, n_zero > 0)]
    for grp in groups:
        s = shifts[grp[0]]
        if s == 0:
            continue
        mult = len(grp)
        greater = sum(1 for t in shifts if t > s and not _same_shell(t, s))
        if mult % 2 == 0:
            kind = ExtremumKind.INFLECTION
        else:
            kind = ExtremumKind.MINIMUM if greater % 2 == 0 else ExtremumKind.MAXIMUM
        value = pot.value_at_xi(s)
        pos = _sqrt(s)
        for sign in (-1.0, 1.0):
            records.append(ExtremumRecord(sign * pos, value, kind, grp[0] + 1, s, mult > 1))
    records.sort(key=lambda r: r.position)
    return records


@dataclass(frozen=True)
class Landmark:
    name: str
    position: float
    value: float


def closed_form_landmarks(shift: ShiftParameters) -> Dict[str, Landmark]:
    """Printed closed-form depths and heights for N = 1, 2, 3.

    Only defined for the default weights, which the formulas assume.
    """
    N = shift.N
    if N not in (1, 2, 3):
        raise ValidationError(f"closed forms exist for N in {{1, 2, 3}}, not N={N}")
    if shift.weights != diophantine.PUBLISHED_WEIGHTS[N]:
        raise ValidationError("closed forms assume the default weights")
    q = [float(s) for s in shift.squares]
    a2 = q[0]
    a = math.sqrt(a2)
    if N == 1:
        return {"minimum": Landmark("minimum", a, -a2 * a2)}
    b2 = q[1]
    if N == 2:
        R2 = a2 + 2 * b2
        return {
            "barrier": Landmark("barrier", a, a2 * a2 * (a2 + 3 * b2)),
            "outer_min": Landmark("outer_min", math.sqrt(R2), (a2 - b2) * R2 * R2),
        }
    g2 = q[2]
    T2 = a2 + 3 * b2
    R2 = a2 + 3 * b2 + 3 * g2
    inner = -(a2 * a2 + 8 * a2 * b2 + 4 * a2 * g2 + 18 * b2 * b2 + 18 * b2 * g2) * a2 * a2
    barrier = (3 * b2 * b2 + 6 * b2 * g2 - a2 * (a2 + 2 * b2 + 4 * g2)) * T2 * T2
    outer = -(a2 * a2 + 2 * a2 * b2 + 3 * g2 * g2 - 3 * b2 * b2 - 2 * a2 * g2) * R2 * R2
    return {
        "inner_min": Landmark("inner_min", a, inner),
        "barrier": Landmark("barrier", math.sqrt(T2), barrier),
        "outer_min": Landmark("outer_min", math.sqrt(R2), outer),
    }


def taylor_at(pot: ArnoldPotential, x0) -> List:
    """Exact recentering ``V(x0 + y) = sum_j t_j y^j`` (ascending ``t``).

    Repeated synthetic division; exact when ``x0`` and the couplings are
    rational.
    """
    t = list(pot.coefficients())
    if not (isinstance(x0, (int, Fraction)) and pot.exact):
        x0 = float(x0)
        t = [float(c) for c in t]
    n = len(t) - 1
    for k in range(n):
        for j in range(n - 1, k - 1, -1):
            t[j] = t[j] + x0 * t[j + 1]
    return t


def curvature(pot: ArnoldPotential, x0) -> float:
    """Quadratic Taylor coefficient ``t_2`` (the well's omega^2)."""
    return taylor_at(pot, x0)[2]


def curvature_at_xi(pot: ArnoldPotential, xi):
    """``t_2`` at ``x0 = sqrt(xi)``; ``V''`` is even, so this is a polynomial in ``xi``.

    Exact for rational ``xi`` and couplings, even when ``x0`` is irrational.
    """
    c = pot.coefficients()
    total = 0
    for k in range(2, len(c), 2):
        if c[k]:
            total = total + c[k] * (k * (k - 1) // 2) * xi ** ((k - 2) // 2)
    return total


def _json_number(v):
    return float(v)


def potential_to_dict(pot: ArnoldPotential, shift: Optional[ShiftParameters] = None) -> dict:
    """JSON form ``{"N", "params", "weights", "couplings", "lambda_sq"}``."""
    if shift is None:
        try:
            shift = couplings_to_shifts(pot)
        except NotMultiWellError:
            shift = None
    out = {"N": pot.N}
    if shift is not None:
        out["params"] = [float(p) for p in shift.params]
        out["weights"] = list(shift.weights)
    out["couplings"] = [_json_number(c) for c in pot.couplings]
    out["lambda_sq"] = _json_number(pot.lambda_sq)
    return out


def potential_from_dict(data: dict):
    """Inverse of :func:`potential_to_dict`; returns ``(pot, shift_or_None)``.

    Couplings are derived from ``params`` when absent; when both are present
    they must agree.
    """
    N = data.get("N")
    lam = as_number(data.get("lambda_sq", 1))
    weights = data.get("weights")
    shift = None
    if data.get("params") is not None:
        shift = ShiftParameters.from_params(data["params"], weights)
    elif data.get("params_sq") is not None:
        shift = ShiftParameters.from_squares(data["params_sq"], weights)
    if shift is not None:
        pot = build_potential(shift, lam)
        if N is not None and N != shift.N:
            raise ValidationError(f"N={N} disagrees with {shift.N} parameters")
        if data.get("couplings") is not None:
            given = [float(as_number(c)) for c in data["couplings"]]
            if not np.allclose(given, [float(c) for c in pot.couplings], rtol=1e-9, atol=0):
                raise ValidationError("couplings disagree with params")
        return pot, shift
    if data.get("couplings") is None:
        raise ValidationError("potential needs params or couplings")
    couplings = tuple(as_number(c) for c in data["couplings"])
    pot = ArnoldPotential(N if N is not None else len(couplings), couplings, lam)
    return pot, None


def from_raw_coefficients(raw: Sequence, lambda_sq=1) -> ArnoldPotential:
    """Potential from ``x^(2N+2) + c_1 x^(2N) + c_2 x^(2N-1) + ... + c_2N x``.

    Odd-index couplings must vanish (symmetric potentials only).
    """
    raw = [as_number(c) for c in raw]
    if len(raw) % 2 or not raw:
        raise ValidationError("raw coefficients must list c_1..c_2N (even length)")
    N = len(raw) // 2
    for j in range(2, 2 * N + 1, 2):
        if raw[j - 1] != 0:
            raise ValidationError(f"c_{j} = {raw[j - 1]} breaks V(x) = V(-x)")
    couplings = []
    for m in range(1, N + 1):
        c = raw[2 * m - 2] * (-1) ** m
        div = math.comb(N + 1, m)
        if isinstance(c, (int, Fraction)):
            q = Fraction(c, div)
            couplings.append(q.numerator if q.denominator == 1 else q)
        else:
            couplings.append(c / div)
    return ArnoldPotential(N, tuple(couplings), lambda_sq)
