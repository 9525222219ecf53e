"""Evolving-Mallows streams and test-then-train evaluation of fading Borda."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Sequence

import numpy as np

from .aggregation import UBordaState, ranking_from_scores
from .mallows import MallowsModel, calibrate_theta, expected_rank_vector, sample_many
from .permutation import Permutation, adjacent_swap, count_inversions, identity

STREAM_CHUNK = 256


def default_theta(n: int) -> float:
    """Concentration whose mean distance is a third of the uniform one."""
    return calibrate_theta(n, n * (n - 1) / 12)


@dataclass(frozen=True)
class DriftSchedule:
    segments: tuple[tuple[Permutation, int], ...]
    theta: float

    def __post_init__(self):
        object.__setattr__(self, "segments", tuple((c, int(k)) for c, k in self.segments))
        if not self.segments:
            raise ValueError("schedule needs at least one segment")
        n = len(self.segments[0][0])
        for center, length in self.segments:
            if len(center) != n:
                raise ValueError("all centers must have the same size")
            if length < 1:
                raise ValueError("segment lengths must be positive")
        if not self.theta >= 0:
            raise ValueError("theta must be non-negative")

    @property
    def n(self) -> int:
        return len(self.segments[0][0])

    @property
    def length(self) -> int:
        return sum(k for _, k in self.segments)

    def to_json(self) -> str:
        return json.dumps(
            {
                "theta": self.theta,
                "segments": [{"center": str(c), "length": k} for c, k in self.segments],
            }
        )

    @classmethod
    def from_json(cls, text: str) -> DriftSchedule:
        data = json.loads(text)
        segments = tuple((Permutation.parse(s["center"]), s["length"]) for s in data["segments"])
        return cls(segments, float(data["theta"]))


def reversal_path(n: int) -> list[Permutation]:
    """Adjacent-transposition path from the identity to its reverse.

    Bubble sort on the ordering with left-to-right passes: each step swaps two
    neighbouring items in the preference order, so consecutive rankings are at
    Kendall distance 1.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    ordering = list(range(1, n + 1))
    path = [Permutation.from_ordering(ordering)]
    for end in range(n - 1, 0, -1):
        for k in range(end):
            ordering[k], ordering[k + 1] = ordering[k + 1], ordering[k]
            path.append(Permutation.from_ordering(ordering))
    return path


def incremental_reversal_schedule(n: int, T: int, theta: float | None = None) -> DriftSchedule:
    """Segments of length ``T`` walking from the identity to its reverse.

    The walk has ``n(n-1)/2`` drifts, hence ``n(n-1)/2 + 1`` concepts; the
    first and last centers are at the maximum distance ``n(n-1)/2``.
    ``theta`` defaults to :func:`default_theta`.
    """
    if T < 1:
        raise ValueError("T must be at least 1")
    if theta is None:
        theta = default_theta(n)
    return DriftSchedule(tuple((c, T) for c in reversal_path(n)), theta)


def generate_stream(
    schedule: DriftSchedule, rng: np.random.Generator
) -> Iterator[tuple[Permutation, Permutation]]:
    """Yield ``(ranking, truth)`` pairs lazily, segment by segment."""
    for block, truth in _blocks(schedule, rng):
        for row in block:
            yield Permutation(tuple(row)), truth


def _blocks(schedule: DriftSchedule, rng: np.random.Generator):
    for center, length in schedule.segments:
        model = MallowsModel(center, schedule.theta)
        for start in range(0, length, STREAM_CHUNK):
            yield sample_many(model, min(STREAM_CHUNK, length - start), rng), center


@dataclass(frozen=True)
class ExperimentConfig:
    n: int = 7
    T: int = 100
    rho_values: tuple[float, ...] = (0.8, 0.9295, 1.0)
    runs: int = 30
    seed: int = 0
    m_target: int = 20
    schedule: DriftSchedule | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.runs < 1 or self.T < 1:
            raise ValueError("runs and T must be at least 1")
        for rho in self.rho_values:
            if not 0 < rho <= 1:
                raise ValueError(f"rho must lie in (0, 1], got {rho}")

    def resolved_schedule(self) -> DriftSchedule:
        if self.schedule is not None:
            return self.schedule
        return incremental_reversal_schedule(self.n, self.T)


@dataclass(frozen=True)
class EvaluationRecord:
    step: int
    run: int
    rho: float
    error: int
    since_drift: int


def _kendall(a: Sequence[int], b: Sequence[int]) -> int:
    relabeled = [0] * len(a)
    for ra, rb in zip(a, b):
        relabeled[rb - 1] = ra
    return count_inversions(relabeled)


def prequential(
    state: UBordaState, stream: Iterable[tuple[Permutation, Permutation]]
) -> Iterator[tuple[Permutation, Permutation]]:
    """For each arriving ranking, yield ``(estimate, truth)`` and only then absorb it.

    Before anything is absorbed the estimate is the identity (all scores tie).
    """
    for ranking, truth in stream:
        yield ranking_from_scores(state.scores), truth
        state.update(ranking)


def _run_one(schedule: DriftSchedule, rho: float, run: int, rng: np.random.Generator):
    state = UBordaState(schedule.n, rho)
    step = 0
    boundaries = _segment_starts(schedule)
    for block, truth in _blocks(schedule, rng):
        t = truth.ranks
        for row in block:
            estimate = np.argsort(state.scores, kind="stable")
            ranks = [0] * len(t)
            for pos, item in enumerate(estimate, start=1):
                ranks[item] = pos
            yield EvaluationRecord(step, run, rho, _kendall(ranks, t), step - boundaries[step])
            state.update(row)
            step += 1


def _segment_starts(schedule: DriftSchedule) -> list[int]:
    starts = []
    offset = 0
    for _, length in schedule.segments:
        starts.extend([offset] * length)
        offset += length
    return starts


def substream(seed: int, run: int, rho_index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, run, rho_index]))


def run_experiment(config: ExperimentConfig) -> list[EvaluationRecord]:
    """Test-then-train error of fading Borda for every run and fading factor.

    Records are ordered by ``(rho, run, step)``; each ``(run, rho)`` pair draws
    its own stream from an independent generator, so results are reproducible.
    """
    schedule = config.resolved_schedule()
    records: list[EvaluationRecord] = []
    for k, rho in enumerate(config.rho_values):
        for run in range(config.runs):
            records.extend(_run_one(schedule, rho, run, substream(config.seed, run, k)))
    return records


@dataclass(frozen=True)
class SummaryRow:
    rho: float
    step: int
    mean_error: float
    ci_low: float
    ci_high: float


def summarize(records: Sequence[EvaluationRecord]) -> list[SummaryRow]:
    """Per-(rho, step) mean error across runs with a normal 95% band.

    A single run gives a zero-width band.
    """
    if not records:
        raise ValueError("no records to summarize")
    groups: dict[tuple[float, int], list[int]] = {}
    for r in records:
        groups.setdefault((r.rho, r.step), []).append(r.error)
    rows = []
    for (rho, step), errors in sorted(groups.items()):
        e = np.asarray(errors, dtype=np.float64)
        mean = float(e.mean())
        half = 1.96 * float(e.std(ddof=1)) / math.sqrt(len(e)) if len(e) > 1 else 0.0
        rows.append(SummaryRow(rho, step, mean, mean - half, mean + half))
    return rows


def error_matrix(records: Sequence[EvaluationRecord], rho: float, segment_length: int) -> np.ndarray:
    """Errors for one fading factor as ``(runs, segments, segment_length)``."""
    rows = sorted((r for r in records if r.rho == rho), key=lambda r: (r.run, r.step))
    runs = len({r.run for r in rows})
    e = np.array([r.error for r in rows], dtype=np.float64)
    return e.reshape(runs, -1, segment_length)


RECORD_HEADER = ("rho", "run", "step", "since_drift", "error")
SUMMARY_HEADER = ("rho", "step", "mean_error", "ci_low", "ci_high")


def write_records_csv(records: Iterable[EvaluationRecord], path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(RECORD_HEADER)
        for r in records:
            w.writerow((repr(r.rho), r.run, r.step, r.since_drift, r.error))


def write_summary_csv(rows: Iterable[SummaryRow], path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SUMMARY_HEADER)
        for r in rows:
            w.writerow((repr(r.rho), r.step, repr(r.mean_error), repr(r.ci_low), repr(r.ci_high)))


# Monte Carlo helpers for the recovery theory


def _history_length(rho: float, tiny: float = 1e-16) -> int:
    return int(math.ceil(math.log(tiny) / math.log(rho)))


def fading_sums(draws: np.ndarray, rho: float, offset: int = 0) -> np.ndarray:
    """``sum_t rho^(offset + t) * draws[:, t, :]`` for draws shaped ``(streams, k, n)``."""
    k = draws.shape[1]
    weights = rho ** (offset + np.arange(k, dtype=np.float64))
    return np.einsum("t,stn->sn", weights, draws)


def swap_drift_scores(
    n: int,
    theta: float,
    rho: float,
    m: int,
    streams: int,
    rng: np.random.Generator,
    pair: tuple[int, int] = (1, 2),
) -> np.ndarray:
    """Fading scores after ``m`` rankings from a model whose center swapped ``pair``.

    Age 0 is the newest ranking; ages ``< m`` come from ``MM(pi tau, theta)``
    and older ones from ``MM(pi, theta)`` with ``pi`` the identity. The
    infinite past is truncated once ``rho^age`` drops below 1e-16.
    """
    old = MallowsModel(identity(n), theta)
    new = MallowsModel(adjacent_swap(old.center, *pair), theta)
    history = _history_length(rho)
    recent = sample_many(new, streams * m, rng).reshape(streams, m, n)
    past = sample_many(old, streams * history, rng).reshape(streams, history, n)
    return fading_sums(recent, rho) + fading_sums(past, rho, offset=m)


def expected_swap_gap(gap: float, rho: float, m: int) -> float:
    """Exact ``E[B(j) - B(i)]`` of the infinite fading score for the swap drift."""
    return gap * (2 * rho**m - 1) / (1 - rho)


def window_deviations(
    model: MallowsModel, rho: float, r: int, s: int, streams: int, rng: np.random.Generator
) -> np.ndarray:
    """``(1-rho) sum_{r <= t < s} rho^t (sigma_t - E sigma)`` per stream and item."""
    k = s - r
    draws = sample_many(model, streams * k, rng).reshape(streams, k, model.n)
    mean = expected_rank_vector(model)
    return (1 - rho) * fading_sums(draws - mean, rho, offset=r)
