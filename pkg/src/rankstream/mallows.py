"""Mallows model under the Kendall distance.

Exact PMF through the product form of the normalizer, exact sampling through
the inversion-vector decomposition, and the mean distance used to calibrate
the concentration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .permutation import (
    MAX_ENUMERATION_SIZE,
    Permutation,
    enumerate_permutations,
    kendall_distance,
)

SMALL_THETA = 1e-9
MAX_EXACT_RANK_SIZE = 8


@dataclass(frozen=True)
class MallowsModel:
    center: Permutation
    theta: float

    def __post_init__(self):
        if not self.theta >= 0:
            raise ValueError(f"theta must be non-negative, got {self.theta}")

    @property
    def n(self) -> int:
        return len(self.center)


def log_psi(n: int, theta: float) -> float:
    """Log normalizer: sum over j of log((1 - e^{-j theta}) / (1 - e^{-theta})), j = 2..n."""
    if theta < 0:
        raise ValueError("theta must be non-negative")
    if theta < SMALL_THETA:
        return math.lgamma(n + 1)
    denom = math.expm1(-theta)
    return sum(math.log(math.expm1(-k * theta) / denom) for k in range(2, n + 1))


def pmf(model: MallowsModel, s: Permutation) -> float:
    if len(s) != model.n:
        raise ValueError(f"size mismatch: {len(s)} vs {model.n}")
    return math.exp(-model.theta * kendall_distance(s, model.center) - log_psi(model.n, model.theta))


def expected_distance(n: int, theta: float) -> float:
    """Mean Kendall distance to the center.

    The distance is a sum of independent truncated geometrics on ``0..k-1``
    for ``k = 2..n``, each with mean ``1/(e^theta - 1) - k/(e^{k theta} - 1)``.
    """
    if theta < 0:
        raise ValueError("theta must be non-negative")
    if theta < SMALL_THETA:
        return n * (n - 1) / 4
    if theta > 700:
        return 0.0
    base = 1.0 / math.expm1(theta)
    total = 0.0
    for k in range(2, n + 1):
        kt = k * theta
        if kt < 1e-3:
            # series of 1/(e^x - 1); the closed form cancels badly here
            total += (
                (k - 1) / 2
                - (k**2 - 1) * theta / 12
                + (k**4 - 1) * theta**3 / 720
                - (k**6 - 1) * theta**5 / 30240
            )
        else:
            total += base - (k / math.expm1(kt) if kt < 700 else 0.0)
    return total


def calibrate_theta(n: int, target_distance: float, tol: float = 1e-10) -> float:
    """Find theta whose expected distance equals ``target_distance``, by bisection."""
    uniform = n * (n - 1) / 4
    if not 0 < target_distance < uniform:
        raise ValueError(f"target distance must lie in (0, {uniform}), got {target_distance}")
    lo, hi = SMALL_THETA, 50.0
    if expected_distance(n, lo) < target_distance:
        return lo
    while expected_distance(n, hi) > target_distance:
        hi *= 2
    for _ in range(400):
        mid = 0.5 * (lo + hi)
        gap = expected_distance(n, mid) - target_distance
        if abs(gap) <= tol or hi - lo < 1e-15:
            return mid
        if gap > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@lru_cache(maxsize=None)
def _insertion_cdfs(n: int, theta: float) -> tuple[np.ndarray, ...]:
    # position j (0-based) picks among n - j remaining ranks with weight e^{-theta r}
    cdfs = []
    for j in range(n - 1):
        w = np.exp(-theta * np.arange(n - j))
        c = np.cumsum(w)
        cdfs.append(c / c[-1])
    return tuple(cdfs)


def sample_inversion_vectors(n: int, theta: float, size: int, rng: np.random.Generator) -> np.ndarray:
    """Draw ``size`` independent inversion vectors, shape ``(size, n - 1)``."""
    cdfs = _insertion_cdfs(n, float(theta))
    out = np.empty((size, max(n - 1, 0)), dtype=np.int64)
    for j, cdf in enumerate(cdfs):
        u = rng.random(size)
        out[:, j] = np.minimum(np.searchsorted(cdf, u, side="right"), n - 1 - j)
    return out


def decode_inversion_vectors(v: np.ndarray, n: int) -> np.ndarray:
    """Turn inversion vectors into rank vectors of permutations around the identity.

    Item ``j`` takes the ``v[j]``-th smallest rank still free, so ``v[j]`` counts
    the later items ranked ahead of it and the row sum is the distance to the identity.
    """
    size = v.shape[0]
    free = np.ones((size, n), dtype=bool)
    ranks = np.empty((size, n), dtype=np.int64)
    rows = np.arange(size)
    for j in range(n):
        pick = v[:, j] if j < n - 1 else np.zeros(size, dtype=np.int64)
        # index of the (pick+1)-th free slot
        slot = np.argmax(np.cumsum(free, axis=1) > pick[:, None], axis=1)
        ranks[:, j] = slot + 1
        free[rows, slot] = False
    return ranks


def sample_many(model: MallowsModel, size: int, rng: np.random.Generator) -> np.ndarray:
    """Draw ``size`` rank vectors from the model as an int array ``(size, n)``."""
    n = model.n
    if n == 1:
        return np.ones((size, 1), dtype=np.int64)
    around_identity = decode_inversion_vectors(
        sample_inversion_vectors(n, model.theta, size, rng), n
    )
    # right-invariance: d(r o pi, pi) = d(r, id)
    center = np.asarray(model.center.ranks) - 1
    return around_identity[:, center]


def sample(model: MallowsModel, rng: np.random.Generator) -> Permutation:
    return Permutation(tuple(sample_many(model, 1, rng)[0]))


@lru_cache(maxsize=None)
def all_rank_vectors(n: int) -> np.ndarray:
    """Every permutation of size ``n`` as rows of a read-only int array."""
    arr = np.array([p.ranks for p in enumerate_permutations(n)], dtype=np.int64)
    arr.setflags(write=False)
    return arr


def distances_to(center: Permutation, perms: np.ndarray) -> np.ndarray:
    """Kendall distance from each row of ``perms`` to ``center`` (O(n^2) per row)."""
    c = np.asarray(center.ranks)
    n = len(c)
    iu, ju = np.triu_indices(n, k=1)
    disagree = (perms[:, iu] - perms[:, ju]) * (c[iu] - c[ju]) < 0
    return disagree.sum(axis=1)


def exact_probabilities(model: MallowsModel) -> tuple[np.ndarray, np.ndarray]:
    """All permutations (rows) and their probabilities, by enumeration."""
    if model.n > MAX_ENUMERATION_SIZE:
        raise ValueError(f"n={model.n} too large for enumeration")
    perms = all_rank_vectors(model.n)
    d = distances_to(model.center, perms)
    return perms, np.exp(-model.theta * d - log_psi(model.n, model.theta))


def expected_rank_vector(model: MallowsModel) -> np.ndarray:
    """Expected rank of every item, by exact enumeration (n <= 8)."""
    if model.n > MAX_EXACT_RANK_SIZE:
        raise ValueError(
            f"exact expected ranks enumerate n! permutations; n={model.n} exceeds {MAX_EXACT_RANK_SIZE}"
        )
    perms, p = exact_probabilities(model)
    return p @ perms
