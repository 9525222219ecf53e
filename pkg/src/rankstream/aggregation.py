"""Voting rules: Borda, fading Borda (uBorda), weighted pairwise matrices,
exact Kemeny and Copeland.

Ties are broken everywhere in favour of the lower item index.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .permutation import MAX_ENUMERATION_SIZE, Permutation


def ranking_from_scores(scores: Sequence[float]) -> Permutation:
    """Rank items by increasing score; equal scores keep item order."""
    order = np.argsort(np.asarray(scores), kind="stable")
    ranks = np.empty(len(order), dtype=np.int64)
    ranks[order] = np.arange(1, len(order) + 1)
    return Permutation(tuple(ranks))


def _as_rank_matrix(sample: Iterable[Permutation]) -> np.ndarray:
    rows = [p.ranks for p in sample]
    if not rows:
        raise ValueError("empty sample")
    n = len(rows[0])
    if any(len(r) != n for r in rows):
        raise ValueError("all rankings must have the same size")
    return np.array(rows, dtype=np.int64)


def borda(sample: Sequence[Permutation]) -> tuple[np.ndarray, Permutation]:
    """Average rank per item and the ranking that sorts items by it."""
    ranks = _as_rank_matrix(sample)
    scores = ranks.sum(axis=0) / ranks.shape[0]
    return scores, ranking_from_scores(scores)


@dataclass
class UBordaState:
    """Fading Borda accumulator.

    For ``rho < 1`` the raw recurrence ``B <- sigma + rho * B`` is stored; it is
    bounded by ``n / (1 - rho)``. For ``rho == 1`` exact integer rank sums are
    kept and :attr:`scores` reports their average, so the state matches
    :func:`borda` exactly on any stream.
    """

    n: int
    rho: float
    count: int = 0
    _acc: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if not 0 < self.rho <= 1:
            raise ValueError(f"rho must lie in (0, 1], got {self.rho}")
        if self.n < 1:
            raise ValueError("n must be at least 1")
        dtype = np.int64 if self.rho == 1 else np.float64
        self._acc = np.zeros(self.n, dtype=dtype)

    @property
    def scores(self) -> np.ndarray:
        if self.rho == 1:
            return self._acc / max(self.count, 1)
        return self._acc.copy()

    def normalized_scores(self) -> np.ndarray:
        """Scores scaled by ``1 - rho`` (for ``rho == 1``, the plain average)."""
        if self.rho == 1:
            return self.scores
        return (1 - self.rho) * self._acc

    def copy(self) -> UBordaState:
        out = UBordaState(self.n, self.rho, self.count)
        out._acc = self._acc.copy()
        return out

    def update(self, incoming: Permutation | Sequence[int]) -> UBordaState:
        """Absorb one ranking in place, O(n)."""
        ranks = incoming.ranks if isinstance(incoming, Permutation) else incoming
        if len(ranks) != self.n:
            raise ValueError(f"size mismatch: {len(ranks)} vs {self.n}")
        acc = self._acc
        if self.rho != 1:
            np.multiply(acc, self.rho, out=acc)
        np.add(acc, ranks, out=acc)
        self.count += 1
        return self

    def absorb(self, block: np.ndarray) -> UBordaState:
        """Absorb the rows of ``block`` (oldest first) in place.

        Equivalent to calling :meth:`update` once per row; still O(n) work per
        ranking, but one vectorised pass instead of a Python loop.
        """
        block = np.asarray(block)
        if block.ndim != 2 or block.shape[1] != self.n:
            raise ValueError(f"expected a (k, {self.n}) block, got shape {block.shape}")
        k = block.shape[0]
        if k == 0:
            return self
        if self.rho == 1:
            self._acc += block.sum(axis=0, dtype=np.int64)
        else:
            weights = self.rho ** np.arange(k - 1, -1, -1, dtype=np.float64)
            self._acc *= self.rho**k
            self._acc += weights @ block
        self.count += k
        return self

    def ranking(self) -> Permutation:
        if self.count == 0:
            raise ValueError("no rankings absorbed yet")
        return ranking_from_scores(self.scores)


def uborda_update(state: UBordaState, incoming: Permutation) -> UBordaState:
    """Functional form of :meth:`UBordaState.update`; ``state`` is left untouched."""
    return state.copy().update(incoming)


def uborda_ranking(state: UBordaState) -> Permutation:
    return state.ranking()


@dataclass(frozen=True)
class WeightedVote:
    ranking: Permutation
    weight: float = 1.0

    def __post_init__(self):
        if not self.weight >= 0:
            raise ValueError(f"vote weight must be non-negative, got {self.weight}")


def weighted_borda(votes: Sequence[WeightedVote]) -> tuple[np.ndarray, Permutation]:
    """Weighted average rank per item; integer weights act as replicated votes."""
    ranks = _as_rank_matrix(v.ranking for v in votes)
    weights = np.array([v.weight for v in votes], dtype=np.float64)
    total = weights.sum()
    if not total > 0:
        raise ValueError("total vote weight must be positive")
    scores = (weights @ ranks) / total
    return scores, ranking_from_scores(scores)


def fading_votes(rankings: Sequence[Permutation], rho: float) -> list[WeightedVote]:
    """Weight an oldest-first sequence by ``rho ** age`` (newest has weight 1)."""
    k = len(rankings)
    return [WeightedVote(r, rho ** (k - 1 - t)) for t, r in enumerate(rankings)]


@dataclass(frozen=True)
class PairwiseMatrices:
    """``n_matrix[i, j]``: weight preferring item i+1 to j+1; ``m_matrix = N - N.T``."""

    n_matrix: np.ndarray
    m_matrix: np.ndarray
    total_weight: float

    @property
    def n(self) -> int:
        return self.n_matrix.shape[0]


def pairwise_matrices(votes: Sequence[WeightedVote]) -> PairwiseMatrices:
    ranks = _as_rank_matrix(v.ranking for v in votes)
    weights = np.array([v.weight for v in votes], dtype=np.float64)
    if np.any(weights < 0):
        raise ValueError("vote weights must be non-negative")
    prefers = ranks[:, :, None] < ranks[:, None, :]
    n_matrix = np.einsum("v,vij->ij", weights, prefers.astype(np.float64))
    return PairwiseMatrices(n_matrix, n_matrix - n_matrix.T, float(weights.sum()))


def _permutation_blocks(n: int, block: int = 40320):
    perms = itertools.permutations(range(1, n + 1))
    while True:
        chunk = list(itertools.islice(perms, block))
        if not chunk:
            return
        yield np.array(chunk, dtype=np.int8)


def kemeny_objective(matrices: PairwiseMatrices, ranks: np.ndarray) -> np.ndarray:
    """Sum of ``M[i, j]`` over pairs with ``sigma(i) > sigma(j)``, per row of ``ranks``."""
    m = matrices.m_matrix
    iu, ju = np.triu_indices(matrices.n, k=1)
    flipped = ranks[:, iu] > ranks[:, ju]
    return np.where(flipped, m[iu, ju], m[ju, iu]).sum(axis=1)


def kemeny_exact(votes: Sequence[WeightedVote]) -> Permutation:
    """Exhaustive Kemeny ranking over all ``n!`` candidates (n <= 10).

    Cost grows as ``n! * n^2``; n=10 takes tens of seconds. Ties go to the
    lexicographically smallest rank vector.
    """
    matrices = pairwise_matrices(votes)
    n = matrices.n
    if n > MAX_ENUMERATION_SIZE:
        raise ValueError(f"exact Kemeny refused for n={n} > {MAX_ENUMERATION_SIZE}")
    best_value, best = np.inf, None
    for ranks in _permutation_blocks(n):
        obj = kemeny_objective(matrices, ranks)
        k = int(np.argmin(obj))
        if obj[k] < best_value:
            best_value, best = obj[k], ranks[k]
    return Permutation(tuple(best))


def copeland(matrices: PairwiseMatrices) -> Permutation:
    """Rank by number of pairwise majority wins, most wins first."""
    wins = (matrices.m_matrix > 0).sum(axis=1)
    order = sorted(range(matrices.n), key=lambda i: (-wins[i], i))
    return Permutation.from_ordering([i + 1 for i in order])
