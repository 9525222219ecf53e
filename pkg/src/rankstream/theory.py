"""Recovery bounds for fading Borda after a drift of the modal ranking.

The drift model throughout is a single adjacent transposition: items ``i``
and ``j`` with ``pi(i) < pi(j)`` swap places, and ``m`` rankings have been
drawn from the new model since.

Notes:
    Deviation windows are half-open, ``r <= t < s``. The windows before and
    after the drift satisfy ``eps(m, inf) + eps(0, m) >= eps(0, inf)`` rather
    than equality (square roots are sub-additive); the high-probability bound
    only relies on this inequality.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .mallows import MAX_EXACT_RANK_SIZE, MallowsModel, exact_probabilities, expected_rank_vector
from .permutation import identity

INF = math.inf
RHO_SEARCH = (1e-4, 1 - 1e-6)
_GUARD = 1e-15


def _check_rho(rho: float) -> None:
    if not 0 < rho < 1:
        raise ValueError(f"rho must lie in (0, 1), got {rho}")


def _check_delta(delta: float) -> None:
    if not 0 < delta < 1:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")


@dataclass(frozen=True)
class DriftBoundInputs:
    n: int
    rho: float
    theta: float
    delta: float
    pair: tuple[int, int]
    m: int = 1

    def __post_init__(self):
        _check_rho(self.rho)
        _check_delta(self.delta)
        if self.m < 1:
            raise ValueError("m must be at least 1")
        i, j = self.pair
        if i == j or not (1 <= i <= self.n and 1 <= j <= self.n):
            raise ValueError(f"invalid item pair {self.pair} for n={self.n}")


def delta_ij_paths(model: MallowsModel, i: int, j: int) -> tuple[float, float]:
    """Expected rank gap ``E[sigma(j)] - E[sigma(i)]`` computed two ways.

    Returns the difference of expected ranks and the paired sum over
    ``{sigma : sigma(i) < sigma(j)}`` of ``(sigma(j) - sigma(i)) (p(sigma) - p(sigma tau))``.
    """
    if model.n > MAX_EXACT_RANK_SIZE:
        raise ValueError(f"exact gap needs n <= {MAX_EXACT_RANK_SIZE}, got {model.n}")
    if i == j:
        raise ValueError("items must differ")
    expected = expected_rank_vector(model)
    by_means = float(expected[j - 1] - expected[i - 1])

    perms, p = exact_probabilities(model)
    n = model.n
    # row index of a rank vector in lexicographic enumeration
    radix = np.array([np.prod(np.arange(1, n - k)) for k in range(n)], dtype=np.int64)
    swapped = perms.copy()
    swapped[:, [i - 1, j - 1]] = perms[:, [j - 1, i - 1]]
    p_swapped = p[_lex_index(swapped, radix)]
    gap = perms[:, j - 1] - perms[:, i - 1]
    keep = gap > 0
    by_pairs = float(np.sum(gap[keep] * (p[keep] - p_swapped[keep])))
    return by_means, by_pairs


def _lex_index(perms: np.ndarray, radix: np.ndarray) -> np.ndarray:
    # Lehmer code: count of later entries smaller than each entry
    n = perms.shape[1]
    code = np.zeros_like(perms)
    for k in range(n):
        code[:, k] = (perms[:, k + 1 :] < perms[:, k : k + 1]).sum(axis=1)
    return code @ radix


def delta_ij(model: MallowsModel, i: int, j: int) -> float:
    by_means, by_pairs = delta_ij_paths(model, i, j)
    if abs(by_means - by_pairs) > 1e-10:
        raise ArithmeticError(f"gap paths disagree: {by_means} vs {by_pairs}")
    return by_means


def window_spread(rho: float, r: float, s: float) -> float:
    """``(1 - rho) * sqrt((rho^{2r} - rho^{2s}) / (2 (1 - rho^2)))``; ``s`` may be ``INF``.

    ``sum_{r <= t < s} rho^{2t} = (rho^{2r} - rho^{2s}) / (1 - rho^2)``, so the
    window covers ages ``r`` up to but excluding ``s``.
    """
    _check_rho(rho)
    if not 0 <= r <= s:
        raise ValueError(f"need 0 <= r <= s, got r={r}, s={s}")
    tail = 0.0 if math.isinf(s) else rho ** (2 * s)
    return (1 - rho) * math.sqrt(max(rho ** (2 * r) - tail, 0.0) / (2 * (1 - rho**2)))


def epsilon(n: int, rho: float, delta: float, r: float, s: float) -> float:
    """Hoeffding deviation of the normalized fading score over window ``r..s``."""
    _check_delta(delta)
    return (n - 1) * window_spread(rho, r, s) * math.sqrt(math.log(2 / delta))


def expected_recovery_bound(rho: float) -> float:
    """Rankings needed since the drift for recovery in expectation: ``log_rho 0.5``."""
    _check_rho(rho)
    return math.log(0.5) / math.log(rho)


def hp_recovery_bound(inputs: DriftBoundInputs, gap: float | None = None) -> float:
    """Rankings needed since the drift for recovery with probability ``1 - delta``.

    ``gap`` overrides the expected-rank gap of the swapped pair; by default it is
    computed exactly on ``MM(identity, theta)`` for ``inputs.pair``. Returns
    ``INF`` when no finite number of rankings satisfies the bound.
    """
    rho, n = inputs.rho, inputs.n
    if gap is None:
        i, j = sorted(inputs.pair)
        gap = delta_ij(MallowsModel(identity(n), inputs.theta), i, j)
    if not gap > 0:
        raise ValueError(f"expected-rank gap must be positive, got {gap}")
    arg = (
        -((1 - rho) ** 2) / math.sqrt(1 - rho**2)
        * n * math.sqrt(0.5 * math.log(1 / inputs.delta)) / gap
        + 0.5
    )
    if arg <= 0:
        return INF
    if arg >= 1:
        return 0.0
    return math.log(arg) / math.log(rho)


def _guard(x: float) -> float:
    if abs(x) >= _GUARD:
        return x
    return _GUARD if x >= 0 else -_GUARD


def f_objective(rho: float, m: int) -> float:
    """Recovery margin per unit of deviation after ``m`` rankings.

    ``(2 rho^m - 1) / (rho - 1)`` (the expected score gap, in units of the
    rank-gap) divided by the spread of the pre-drift window ``m..inf`` plus
    the post-drift window ``0..m-1`` (that is, ``[0, m)``). Larger is better; the maximizer gives
    the fading factor that recovers with the smallest failure probability.
    """
    _check_rho(rho)
    if m < 1:
        raise ValueError("m must be at least 1")
    signal = (2 * rho**m - 1) / _guard(rho - 1)
    spread = window_spread(rho, m, INF) + window_spread(rho, 0, m)
    return signal / _guard(spread)


def optimal_rho(m: int, tol: float = 1e-6) -> float:
    """Golden-section maximization of :func:`f_objective` over ``RHO_SEARCH``."""
    if m < 1:
        raise ValueError("m must be at least 1")
    inv_phi = (math.sqrt(5) - 1) / 2
    a, b = RHO_SEARCH
    c = b - inv_phi * (b - a)
    d = a + inv_phi * (b - a)
    fc, fd = f_objective(c, m), f_objective(d, m)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - inv_phi * (b - a)
            fc = f_objective(c, m)
        else:
            a, c, fc = c, d, fd
            d = a + inv_phi * (b - a)
            fd = f_objective(d, m)
    return 0.5 * (a + b)


def failure_probability(f_value: float, n: int, gap: float) -> float:
    """Experimental: ``exp((2 n sqrt(2) / (f gap))^2)`` exactly as written.

    The expression exceeds 1 for every input (a sign is evidently lost), so it
    is not a probability; kept only for comparison.
    """
    warnings.warn("failure_probability is not a valid probability as written", RuntimeWarning)
    return math.exp((2 * n * math.sqrt(2) / (f_value * gap)) ** 2)
