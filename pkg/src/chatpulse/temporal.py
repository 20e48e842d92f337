"""Per-user engagement time series and period-over-period comparison.

The comparison splits an ensemble at a boundary timestamp (the boundary
window belongs to the second period), takes each user's mean ei centrality
over the whole range and over each period, normalizes the three vectors by
their own maxima, and reports diff = p2 - p1 per user. Normalizing by the
per-period maximum makes diffs sensitive to whoever tops each period; that is
a property of the method, not an artifact.
"""

from __future__ import annotations

from dataclasses import dataclass

from .ensemble import AVG_PRESENT, AVG_ZERO, centrality_table
from .errors import InsufficientDataError, ParameterError
from .netbuild import NetworkEnsemble


@dataclass(frozen=True)
class UserSeries:
    user: int
    points: tuple[tuple[int, float], ...]  # (window_start, ei centrality)


def user_series(
    ensemble: NetworkEnsemble,
    user: int,
    *,
    table: dict[int, dict[int, float]] | None = None,
) -> UserSeries:
    """All (window_start, ei centrality) points for one user; gaps where absent."""
    if table is None:
        table = centrality_table(ensemble)
    points = tuple(
        (net.window_start, table[net.window_index][user])
        for net in ensemble.conversations
        if user in table[net.window_index]
    )
    return UserSeries(user=user, points=points)


@dataclass(frozen=True, slots=True)
class ComparisonRow:
    user: int
    whole: float
    p1: float
    p2: float
    diff: float


@dataclass(frozen=True)
class PeriodComparison:
    split: int
    rows: tuple[ComparisonRow, ...]  # descending by whole-period value


def _mean_vector(table, indices, population, avg) -> dict[int, float]:
    sums: dict[int, float] = {}
    appearances: dict[int, int] = {}
    for idx in indices:
        for user, c in table[idx].items():
            sums[user] = sums.get(user, 0.0) + c
            appearances[user] = appearances.get(user, 0) + 1
    if avg == AVG_ZERO:
        return {u: sums.get(u, 0.0) / len(indices) for u in population}
    return {u: sums.get(u, 0.0) / appearances.get(u, 1) for u in population}


def period_means(
    ensemble: NetworkEnsemble,
    split: int,
    *,
    avg: str = AVG_ZERO,
    table: dict[int, dict[int, float]] | None = None,
) -> tuple[dict[int, float], dict[int, float], dict[int, float]]:
    """Raw per-user mean ei centrality over (whole, p1, p2).

    Periods are half-open around the split: a window starting exactly at the
    split belongs to p2. Raises when either period has no conversation.
    """
    if avg not in (AVG_ZERO, AVG_PRESENT):
        raise ParameterError(f"avg must be 'zero' or 'present', got {avg!r}")
    if table is None:
        table = centrality_table(ensemble)
    p1_idx = [n.window_index for n in ensemble.conversations if n.window_start < split]
    p2_idx = [n.window_index for n in ensemble.conversations if n.window_start >= split]
    if not p1_idx or not p2_idx:
        raise InsufficientDataError(
            f"both periods need at least one conversation network "
            f"(p1={len(p1_idx)}, p2={len(p2_idx)})"
        )
    population = {user for row in table.values() for user in row}
    whole = _mean_vector(table, p1_idx + p2_idx, population, avg)
    p1 = _mean_vector(table, p1_idx, population, avg)
    p2 = _mean_vector(table, p2_idx, population, avg)
    return whole, p1, p2


def _normalized(vec: dict[int, float]) -> dict[int, float]:
    peak = max(vec.values(), default=0.0)
    if peak <= 0.0:
        return dict(vec)
    return {u: v / peak for u, v in vec.items()}


def period_compare(
    ensemble: NetworkEnsemble,
    split: int,
    *,
    top_k: int | None = None,
    avg: str = AVG_ZERO,
    table: dict[int, dict[int, float]] | None = None,
) -> PeriodComparison:
    """Max-normalized per-user engagement difference between two periods.

    Users with zero whole-period engagement are dropped before normalization
    (their p1 and p2 means are necessarily zero too). Rows are ordered by
    descending whole-period value, ties by ascending user; top_k=None keeps
    every user.
    """
    if top_k is not None and top_k < 1:
        raise ParameterError(f"top_k must be >= 1, got {top_k}")
    whole, p1, p2 = period_means(ensemble, split, avg=avg, table=table)
    users = [u for u, v in whole.items() if v > 0.0]
    whole_n = _normalized({u: whole[u] for u in users})
    p1_n = _normalized({u: p1[u] for u in users})
    p2_n = _normalized({u: p2[u] for u in users})
    rows = [
        ComparisonRow(
            user=u,
            whole=whole_n[u],
            p1=p1_n[u],
            p2=p2_n[u],
            diff=p2_n[u] - p1_n[u],
        )
        for u in users
    ]
    rows.sort(key=lambda r: (-r.whole, r.user))
    if top_k is not None:
        rows = rows[:top_k]
    return PeriodComparison(split=split, rows=tuple(rows))


def engagement_drop_report(
    comparison: PeriodComparison, threshold: float
) -> list[ComparisonRow]:
    """Users whose normalized difference dropped to <= threshold, worst first."""
    hits = [row for row in comparison.rows if row.diff <= threshold]
    hits.sort(key=lambda r: (r.diff, r.user))
    return hits
