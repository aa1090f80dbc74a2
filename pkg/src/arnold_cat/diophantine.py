"""Integer weight tuples that keep the coupling formulas free of fractions.

The stationary shells of the symmetric Arnold potential sit at the roots of

    C(xi) = prod_j (xi - s_j),    s_0 = alpha^2,  s_j = s_{j-1} + w_j p_j^2,

and the squared couplings are the coefficients of ``xi^(N-m)`` divided by
``(-1)^m binom(N, m)``.  Treating ``alpha^2, beta^2, ...`` as independent
formal variables, a weight tuple is *valid* when every one of those divisions
is exact for every monomial.

Polynomials over the squared parameters are plain ``dict`` objects mapping an
exponent tuple ``(a_0, ..., a_{N-1})`` to a Python ``int``; exponent ``a_k``
counts powers of ``p_k^2``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import DivisibilityError, ValidationError

Monomial = Tuple[int, ...]
Poly = Dict[Monomial, int]

MAX_N = 10
DEFAULT_BOUND = 512

PARAM_NAMES = ("alpha", "beta", "gamma", "delta", "epsilon",
               "zeta", "eta", "theta", "iota", "kappa")

# Weight tuples printed for N = 2..8 (N = 1 has no increments).
PUBLISHED_WEIGHTS: Dict[int, Tuple[int, ...]] = {
    1: (),
    2: (2,),
    3: (3, 3),
    4: (4, 6, 12),
    5: (5, 10, 10, 10),
    6: (6, 15, 20, 30, 60),
    7: (7, 21, 105, 35, 105, 105),
    8: (8, 28, 56, 70, 280, 140, 280),
}


@dataclass(frozen=True)
class Witness:
    """First monomial whose coefficient is not divisible by the binomial."""

    m: int
    monomial: Monomial
    coefficient: int
    divisor: int

    def __str__(self):
        N = len(self.monomial)
        return (f"coefficient of {format_monomial(self.monomial) or '1'} at "
                f"xi^{N - self.m} is {self.coefficient}, "
                f"not divisible by {self.divisor}")


@dataclass(frozen=True)
class WeightCandidate:
    N: int
    weights: Tuple[int, ...]
    valid: Optional[bool] = None
    witness: Optional[Witness] = field(default=None, compare=False)


def _check_n(N):
    if not isinstance(N, int) or N < 1:
        raise ValidationError(f"N must be a positive integer, got {N!r}")
    if N > MAX_N:
        raise ValidationError(f"N={N} exceeds the supported maximum {MAX_N}")


def _check_weights(N, weights):
    weights = tuple(weights)
    if len(weights) != N - 1:
        raise ValidationError(
            f"N={N} needs {N - 1} weights, got {len(weights)}")
    for w in weights:
        if not isinstance(w, int) or isinstance(w, bool) or w < 1:
            raise ValidationError(f"weights must be positive integers, got {w!r}")
    return weights


def expand_roots(roots: Sequence[Sequence[int]]) -> List[Poly]:
    """Expand ``prod_j (xi - L_j)`` for integer linear forms ``L_j``.

    Each root is the coefficient vector of a linear form in the squared
    parameters.  Returns ``coeffs`` with ``coeffs[m]`` the (signed) coefficient
    of ``xi^(len(roots) - m)``.
    """
    if not roots:
        return [{(): 1}]
    nvars = len(roots[0])
    zero = (0,) * nvars
    # coeffs[m] is the coefficient of xi^(deg - m) of the running product
    coeffs: List[Poly] = [{zero: 1}]
    for root in roots:
        new: List[Poly] = [dict() for _ in range(len(coeffs) + 1)]
        for m, poly in enumerate(coeffs):
            acc = new[m]
            for mono, c in poly.items():
                acc[mono] = acc.get(mono, 0) + c
            acc = new[m + 1]
            for k, r in enumerate(root):
                if r == 0:
                    continue
                for mono, c in poly.items():
                    bumped = mono[:k] + (mono[k] + 1,) + mono[k + 1:]
                    acc[bumped] = acc.get(bumped, 0) - r * c
        coeffs = [{k: v for k, v in p.items() if v != 0} for p in new]
    return coeffs


def cumulative_roots(N: int, weights: Sequence[int]) -> List[Tuple[int, ...]]:
    """Linear forms of the shells ``s_j = s_{j-1} + w_j p_j^2``."""
    full = (1,) + tuple(weights)
    return [tuple(full[k] if k <= j else 0 for k in range(N)) for j in range(N)]


def expand_factored(N: int, weights: Sequence[int]) -> List[Poly]:
    """Exact expansion of ``C^(N)(xi)`` for the cumulative ansatz.

    ``result[m]`` maps monomials to the integer coefficient of ``xi^(N-m)``.

    >>> expand_factored(2, (2,))[1] == {(1, 0): -2, (0, 1): -2}
    True
    """
    _check_n(N)
    weights = _check_weights(N, weights)
    return expand_roots(cumulative_roots(N, weights))


def _ordered(poly: Poly):
    return sorted(poly.items(), key=lambda kv: kv[0], reverse=True)


def _first_violation(coeffs: List[Poly], N: int) -> Optional[Witness]:
    for m in range(1, N):
        b = math.comb(N, m)
        for mono, c in _ordered(coeffs[m]):
            if c % b:
                return Witness(m, mono, c, b)
    return None


def check_divisibility(cand: WeightCandidate) -> WeightCandidate:
    """Return ``cand`` with ``valid`` (and ``witness`` on failure) filled in."""
    coeffs = expand_factored(cand.N, cand.weights)
    witness = _first_violation(coeffs, cand.N)
    return WeightCandidate(cand.N, tuple(cand.weights), witness is None, witness)


def _constraints_by_depth(N: int):
    """Group the divisibility constraints by the last weight they involve.

    Every monomial coefficient factorizes as ``count(a) * prod_k w_k^a_k``
    where ``count`` is the coefficient obtained with all weights equal to 1.
    A monomial whose highest non-alpha variable is ``j`` only constrains
    ``w_1..w_j``, so it can prune the search at depth ``j``.
    """
    unit = expand_roots(cumulative_roots(N, (1,) * (N - 1)))
    by_depth: Dict[int, List[Tuple[Monomial, int]]] = {j: [] for j in range(1, N)}
    for m in range(1, N):
        b = math.comb(N, m)
        for mono, count in unit[m].items():
            d = b // math.gcd(b, count)
            if d == 1:
                continue
            last = max(k for k, a in enumerate(mono) if a)
            # pure alpha^2 monomials have count == binom(N, m)
            by_depth[last].append((mono, d))
    return by_depth


def minimal_weights(N: int, bound: int = DEFAULT_BOUND) -> WeightCandidate:
    """Lexicographically smallest valid weight tuple with entries <= bound.

    Depth-first search, ascending at every position, backtracking when a
    position admits no value.  The result is re-verified by direct expansion.
    """
    _check_n(N)
    if bound < 1:
        raise ValidationError("bound must be >= 1")
    if N == 1:
        return WeightCandidate(1, (), True, None)
    by_depth = _constraints_by_depth(N)
    chosen: List[int] = [1] * N  # chosen[0] is the implicit alpha weight

    def ok(j):
        for mono, d in by_depth[j]:
            prod = 1
            for k in range(1, j + 1):
                if mono[k]:
                    prod *= chosen[k] ** mono[k]
            if prod % d:
                return False
        return True

    def dfs(j):
        if j == N:
            return True
        for w in range(1, bound + 1):
            chosen[j] = w
            if ok(j) and dfs(j + 1):
                return True
        return False

    if not dfs(1):
        raise ValidationError(f"no valid tuple <= {bound} for N={N}")
    result = check_divisibility(WeightCandidate(N, tuple(chosen[1:])))
    if not result.valid:  # pragma: no cover - the two routes must agree
        raise AssertionError(f"search produced invalid tuple: {result}")
    return result


def default_weights(N: int) -> Tuple[int, ...]:
    """Published tuple for N <= 8, otherwise the lexicographic minimum."""
    _check_n(N)
    if N in PUBLISHED_WEIGHTS:
        return PUBLISHED_WEIGHTS[N]
    return minimal_weights(N).weights


def coupling_formulas(N: int, weights: Sequence[int]) -> List[Poly]:
    """Squared couplings ``c_1^2..c_N^2`` as integer polynomials.

    Raises :class:`DivisibilityError` carrying the witness when a division is
    not exact.
    """
    coeffs = expand_factored(N, weights)
    witness = _first_violation(coeffs, N)
    if witness is not None:
        raise DivisibilityError(f"weights {tuple(weights)} invalid: {witness}",
                                witness)
    out = []
    for m in range(1, N + 1):
        div = (-1) ** m * math.comb(N, m)
        out.append({mono: c // div for mono, c in coeffs[m].items()})
    return out


def evaluate_formula(poly: Poly, squares: Sequence) -> Fraction | float:
    """Evaluate a monomial map at numeric squared parameters."""
    total = 0
    for mono, c in poly.items():
        term = c
        for a, s in zip(mono, squares):
            if a:
                term = term * s ** a
        total = total + term
    return total


def format_monomial(mono: Monomial, names: Sequence[str] = PARAM_NAMES) -> str:
    parts = []
    for k, a in enumerate(mono):
        if a:
            parts.append(f"{names[k]}^{2 * a}")
    return "*".join(parts)


def format_polynomial(poly: Poly, names: Sequence[str] = PARAM_NAMES) -> str:
    """Canonical text form, monomials in descending exponent order."""
    if not poly:
        return "0"
    out = []
    for i, (mono, c) in enumerate(_ordered(poly)):
        body = format_monomial(mono, names)
        mag = abs(c)
        if not body:
            term = str(mag)
        elif mag == 1:
            term = body
        else:
            term = f"{mag}*{body}"
        if i == 0:
            out.append(term if c > 0 else f"-{term}")
        else:
            out.append(("+ " if c > 0 else "- ") + term)
    return " ".join(out)


def n3_general_ansatz_solutions(max_sum: int = 6, max_r: int = 6):
    """Exhaustive scan of ``(xi-a2)(xi-a2-P b2)(xi-a2-Q b2-R g2)``.

    Returns every ``(P, Q, R)`` with ``P + Q <= max_sum`` and ``R <= max_r``
    whose xi^2 and xi coefficients are divisible by 3.
    """
    found = []
    for P in range(1, max_sum):
        for Q in range(1, max_sum - P + 1):
            for R in range(1, max_r + 1):
                coeffs = expand_roots([(1, 0, 0), (1, P, 0), (1, Q, R)])
                if all(c % 3 == 0 for m in (1, 2) for c in coeffs[m].values()):
                    found.append((P, Q, R))
    return found
