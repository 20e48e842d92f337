"""Ensemble-level statistics: z-scores, engagement classes, user rankings."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .engagement import EngagementMetrics, engagement_index, node_centralities
from .errors import DegenerateEnsembleError, InsufficientDataError, ParameterError
from .netbuild import NetworkEnsemble

AVG_ZERO = "zero"  # absent users count as 0 in class means
AVG_PRESENT = "present"  # mean over networks the user appears in

STD_POPULATION = "population"
STD_SAMPLE = "sample"


class EngagementClass(str, Enum):
    HIGH = "HIGH"
    MEDIUM = "MEDIUM"
    LOW = "LOW"
    GLOBAL = "GLOBAL"  # ranking scope only, never a network label


@dataclass(frozen=True, slots=True)
class WindowMetrics:
    """Engagement metrics joined with the window they belong to."""

    window_start: int
    window_index: int
    metrics: EngagementMetrics


def conversation_metrics(ensemble: NetworkEnsemble) -> list[WindowMetrics]:
    """Metrics for every conversation network, in window order."""
    return [
        WindowMetrics(net.window_start, net.window_index, engagement_index(net))
        for net in ensemble.conversations
    ]


@dataclass(frozen=True, slots=True)
class EnsembleStats:
    mean_ei: float
    std_ei: float
    count: int


def ensemble_stats(
    windows, *, std: str = STD_POPULATION
) -> EnsembleStats:
    """Mean and standard deviation of ei over conversation networks."""
    if std not in (STD_POPULATION, STD_SAMPLE):
        raise ParameterError(f"std must be 'population' or 'sample', got {std!r}")
    eis = [w.metrics.ei for w in windows]
    k = len(eis)
    if k < 2:
        raise InsufficientDataError(
            f"z-scores need at least 2 conversation networks, got {k}"
        )
    mean = math.fsum(eis) / k
    denom = k if std == STD_POPULATION else k - 1
    var = math.fsum((x - mean) ** 2 for x in eis) / denom
    return EnsembleStats(mean_ei=mean, std_ei=math.sqrt(var), count=k)


@dataclass(frozen=True, slots=True)
class ClassifiedNetwork:
    window_index: int
    ei: float
    z: float
    label: EngagementClass


def zscore_classify(
    windows,
    stats: EnsembleStats,
    *,
    low: float = -1.0,
    high: float = 1.0,
) -> list[ClassifiedNetwork]:
    """Label each network HIGH (z >= high), LOW (z <= low) or MEDIUM.

    Both boundaries are inclusive for their extreme class.
    """
    if stats.std_ei == 0:
        raise DegenerateEnsembleError(
            "all conversation networks have identical engagement; z-scores undefined"
        )
    if low >= high:
        raise ParameterError(f"need low < high, got ({low}, {high})")
    out = []
    for w in windows:
        z = (w.metrics.ei - stats.mean_ei) / stats.std_ei
        if z >= high:
            label = EngagementClass.HIGH
        elif z <= low:
            label = EngagementClass.LOW
        else:
            label = EngagementClass.MEDIUM
        out.append(
            ClassifiedNetwork(window_index=w.window_index, ei=w.metrics.ei, z=z, label=label)
        )
    return out


def centrality_table(ensemble: NetworkEnsemble) -> dict[int, dict[int, float]]:
    """window_index -> {user -> ei centrality}, conversation networks only."""
    table: dict[int, dict[int, float]] = {}
    for net in ensemble.conversations:
        metrics = engagement_index(net)
        table[net.window_index] = {
            ne.user: ne.ei_centrality for ne in node_centralities(net, metrics)
        }
    return table


@dataclass(frozen=True)
class UserRanking:
    scope: EngagementClass
    entries: tuple[tuple[int, float], ...]  # (user, mean ei centrality), descending


def rank_users(
    ensemble: NetworkEnsemble,
    classified,
    scope: EngagementClass,
    top_k: int,
    *,
    avg: str = AVG_ZERO,
    table: dict[int, dict[int, float]] | None = None,
) -> UserRanking:
    """Rank users by mean ei centrality over the networks of one class.

    With avg='zero' (default) a user absent from a network contributes 0 and
    the denominator is the class size, which rewards sustained participation;
    avg='present' averages over appearances only.
    """
    if top_k < 1:
        raise ParameterError(f"top_k must be >= 1, got {top_k}")
    if avg not in (AVG_ZERO, AVG_PRESENT):
        raise ParameterError(f"avg must be 'zero' or 'present', got {avg!r}")
    if table is None:
        table = centrality_table(ensemble)

    if scope == EngagementClass.GLOBAL:
        indices = list(table)
    else:
        indices = [c.window_index for c in classified if c.label == scope]
    if not indices:
        return UserRanking(scope=scope, entries=())

    sums: dict[int, float] = {}
    appearances: dict[int, int] = {}
    for idx in indices:
        for user, c in table[idx].items():
            sums[user] = sums.get(user, 0.0) + c
            appearances[user] = appearances.get(user, 0) + 1

    if avg == AVG_ZERO:
        population = {user for row in table.values() for user in row}
        means = {user: sums.get(user, 0.0) / len(indices) for user in population}
    else:
        means = {user: sums[user] / appearances[user] for user in sums}

    ordered = sorted(means.items(), key=lambda kv: (-kv[1], kv[0]))
    return UserRanking(scope=scope, entries=tuple(ordered[:top_k]))


HIST_LO = -3.0
HIST_HI = 3.0
HIST_WIDTH = 0.5


def zscore_histogram(classified) -> dict[str, list[float] | list[int]]:
    """Fixed-bin z-score histogram (width 0.5 over [-3, 3], clamped tails)."""
    nbins = int(round((HIST_HI - HIST_LO) / HIST_WIDTH))
    edges = [HIST_LO + i * HIST_WIDTH for i in range(nbins + 1)]
    counts = [0] * nbins
    for c in classified:
        pos = int((c.z - HIST_LO) // HIST_WIDTH)
        counts[min(max(pos, 0), nbins - 1)] += 1
    return {"edges": edges, "counts": counts}
