"""Permutations in rank-vector form and the Kendall distance.

A ranking over items ``1..n`` is stored as its rank vector: ``ranks[i - 1]``
is the rank of item ``i``. Lower rank means more preferred. The item sitting
at each rank (the "ordering") is the inverse permutation.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterator, Sequence

MAX_ENUMERATION_SIZE = 10


@dataclass(frozen=True)
class Permutation:
    """A bijection of ``{1..n}``; ``ranks[i - 1]`` is the rank of item ``i``."""

    ranks: tuple[int, ...]

    def __post_init__(self):
        ranks = tuple(int(r) for r in self.ranks)
        object.__setattr__(self, "ranks", ranks)
        n = len(ranks)
        if n < 1:
            raise ValueError("a permutation needs at least one item")
        if sorted(ranks) != list(range(1, n + 1)):
            raise ValueError(f"{ranks} is not a permutation of 1..{n}")

    @classmethod
    def parse(cls, text: str) -> Permutation:
        """Parse the comma-separated text form, e.g. ``"2,1,3"``."""
        try:
            return cls(tuple(int(tok) for tok in text.strip().split(",")))
        except ValueError as exc:
            raise ValueError(f"cannot parse permutation {text!r}: {exc}") from None

    @classmethod
    def from_ordering(cls, ordering: Sequence[int]) -> Permutation:
        """Build from the list of items sorted from most to least preferred."""
        ranks = [0] * len(ordering)
        for position, item in enumerate(ordering, start=1):
            ranks[item - 1] = position
        return cls(tuple(ranks))

    def __len__(self) -> int:
        return len(self.ranks)

    def __str__(self) -> str:
        return ",".join(map(str, self.ranks))

    def __call__(self, item: int) -> int:
        """Rank of ``item`` (1-based)."""
        return self.ranks[item - 1]

    def ordering(self) -> tuple[int, ...]:
        """Items listed from rank 1 to rank n."""
        return inverse(self).ranks


def _check_sizes(a: Permutation, b: Permutation) -> None:
    if len(a) != len(b):
        raise ValueError(f"size mismatch: {len(a)} vs {len(b)}")


def identity(n: int) -> Permutation:
    return Permutation(tuple(range(1, n + 1)))


def reverse(n: int) -> Permutation:
    return Permutation(tuple(range(n, 0, -1)))


def inverse(p: Permutation) -> Permutation:
    out = [0] * len(p)
    for item, rank in enumerate(p.ranks, start=1):
        out[rank - 1] = item
    return Permutation(tuple(out))


def compose(a: Permutation, b: Permutation) -> Permutation:
    """``(a o b)(i) = a(b(i))``."""
    _check_sizes(a, b)
    return Permutation(tuple(a.ranks[r - 1] for r in b.ranks))


def adjacent_swap(p: Permutation, i: int, j: int) -> Permutation:
    """Exchange the ranks of items ``i`` and ``j``, which must hold adjacent ranks.

    This is ``p o tau`` for the transposition ``tau`` of ``i`` and ``j``; the
    result is at Kendall distance exactly 1 from ``p``.
    """
    n = len(p)
    if not (1 <= i <= n and 1 <= j <= n) or i == j:
        raise ValueError(f"invalid item pair ({i}, {j}) for n={n}")
    if abs(p(i) - p(j)) != 1:
        raise ValueError(f"items {i} and {j} hold ranks {p(i)} and {p(j)}, not adjacent")
    ranks = list(p.ranks)
    ranks[i - 1], ranks[j - 1] = ranks[j - 1], ranks[i - 1]
    return Permutation(tuple(ranks))


def count_inversions(seq: Sequence[int]) -> int:
    """Number of pairs ``k < l`` with ``seq[k] > seq[l]``, by merge sort."""
    seq = list(seq)
    buf = seq[:]
    total = 0
    width = 1
    n = len(seq)
    # bottom-up merge sort, ping-ponging between seq and buf
    while width < n:
        for lo in range(0, n, 2 * width):
            mid = min(lo + width, n)
            hi = min(lo + 2 * width, n)
            a, b, k = lo, mid, lo
            while a < mid and b < hi:
                if seq[a] <= seq[b]:
                    buf[k] = seq[a]
                    a += 1
                else:
                    buf[k] = seq[b]
                    b += 1
                    total += mid - a
                k += 1
            buf[k:hi] = seq[a:mid] if a < mid else seq[b:hi]
        seq, buf = buf, seq
        width *= 2
    return total


def kendall_distance(a: Permutation, b: Permutation) -> int:
    """Number of item pairs ordered differently by ``a`` and ``b``.

    O(n log n): relabel items by their rank in ``b`` and count inversions of
    the resulting sequence of ``a`` ranks.
    """
    _check_sizes(a, b)
    relabeled = [0] * len(a)
    for ra, rb in zip(a.ranks, b.ranks):
        relabeled[rb - 1] = ra
    return count_inversions(relabeled)


def kendall_distance_naive(a: Permutation, b: Permutation) -> int:
    """O(n^2) pair-by-pair reference for :func:`kendall_distance`."""
    _check_sizes(a, b)
    x, y = a.ranks, b.ranks
    n = len(x)
    return sum(
        1
        for i in range(n)
        for j in range(i + 1, n)
        if (x[i] - x[j]) * (y[i] - y[j]) < 0
    )


def max_distance(n: int) -> int:
    return n * (n - 1) // 2


def enumerate_permutations(n: int) -> Iterator[Permutation]:
    """Yield all ``n!`` rank vectors of size ``n`` in lexicographic order."""
    if n < 1:
        raise ValueError("n must be at least 1")
    if n > MAX_ENUMERATION_SIZE:
        raise ValueError(
            f"refusing to enumerate {math.factorial(n)} permutations (n={n} > {MAX_ENUMERATION_SIZE})"
        )
    for ranks in itertools.permutations(range(1, n + 1)):
        yield Permutation(ranks)
