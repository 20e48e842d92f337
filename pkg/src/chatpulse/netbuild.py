"""Fixed-interval window slicing and per-window interaction networks.

A window's network links two users whenever they sent messages one after the
other inside that window; repeated transitions fold into integer edge
weights. Same-sender runs contribute nothing, so a monologue window has no
edges and is not a conversation. Transitions never span window boundaries.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from . import _kernels
from .chatlog import MessageEvent, MessageLog
from .errors import ParameterError, SchemaError

ALIGN_WALL = "wall"
ALIGN_FIRST = "first"


@dataclass(frozen=True)
class WindowSpec:
    """How to cut a log into half-open [start, start + delta_t) windows."""

    delta_t: int = 600
    alignment: str = ALIGN_WALL
    time_range: tuple[int | None, int | None] = (None, None)

    def __post_init__(self) -> None:
        if self.delta_t <= 0:
            raise ParameterError(f"delta_t must be positive, got {self.delta_t}")
        if self.alignment not in (ALIGN_WALL, ALIGN_FIRST):
            raise ParameterError(
                f"alignment must be {ALIGN_WALL!r} or {ALIGN_FIRST!r},"
                f" got {self.alignment!r}"
            )
        lo, hi = self.time_range
        if lo is not None and hi is not None and hi <= lo:
            raise ParameterError(f"empty time range [{lo}, {hi})")


@dataclass(frozen=True)
class WindowSlice:
    start: int
    index: int
    events: tuple[MessageEvent, ...]


def slice_windows(log: MessageLog, spec: WindowSpec) -> list[WindowSlice]:
    """Assign every in-range event to the window floor((t - origin) / delta_t).

    Empty windows are omitted, but indices stay gap-aware: index arithmetic is
    anchored to the origin, not to the previous nonempty window.
    """
    lo, hi = spec.time_range
    events = [
        e
        for e in log.events
        if (lo is None or e.timestamp >= lo) and (hi is None or e.timestamp < hi)
    ]
    if not events:
        return []
    if spec.alignment == ALIGN_WALL:
        anchor = lo if lo is not None else events[0].timestamp
        origin = (anchor // spec.delta_t) * spec.delta_t
    else:
        origin = events[0].timestamp

    slices: list[WindowSlice] = []
    current_index: int | None = None
    bucket: list[MessageEvent] = []
    for e in events:
        idx = (e.timestamp - origin) // spec.delta_t
        if idx != current_index:
            if bucket:
                slices.append(
                    WindowSlice(
                        start=origin + current_index * spec.delta_t,
                        index=current_index,
                        events=tuple(bucket),
                    )
                )
            current_index = idx
            bucket = []
        bucket.append(e)
    slices.append(
        WindowSlice(
            start=origin + current_index * spec.delta_t,
            index=current_index,
            events=tuple(bucket),
        )
    )
    return slices


@dataclass(frozen=True)
class InteractionNetwork:
    """One window's weighted undirected simple graph of sender transitions.

    ``nodes`` holds interacting participants only; senders who spoke but never
    adjacent to a different sender are kept in ``isolated`` for diagnostics
    and excluded from the participant count.
    """

    window_start: int
    window_index: int
    nodes: frozenset[int]
    edges: dict[tuple[int, int], int]
    isolated: frozenset[int] = field(default_factory=frozenset)
    message_count: int | None = None

    @property
    def n(self) -> int:
        return len(self.nodes)

    @property
    def total_weight(self) -> int:
        return sum(self.edges.values())

    @property
    def is_conversation(self) -> bool:
        return len(self.nodes) >= 2

    def weight(self, u: int, v: int) -> int:
        key = (u, v) if u < v else (v, u)
        return self.edges.get(key, 0)

    def strengths(self) -> dict[int, int]:
        """Weighted degree per interacting node."""
        acc = {u: 0 for u in self.nodes}
        for (u, v), w in self.edges.items():
            acc[u] += w
            acc[v] += w
        return acc


def network_from_senders(
    senders, *, window_start: int = 0, window_index: int = 0,
    message_count: int | None = None,
) -> InteractionNetwork:
    """Build a window network from an ordered sequence of sender IDs."""
    senders = list(senders)
    edges = _kernels.pair_counts(senders)
    nodes = frozenset(u for pair in edges for u in pair)
    return InteractionNetwork(
        window_start=window_start,
        window_index=window_index,
        nodes=nodes,
        edges=edges,
        isolated=frozenset(senders) - nodes,
        message_count=len(senders) if message_count is None else message_count,
    )


def build_network(
    events, *, window_start: int = 0, window_index: int = 0
) -> InteractionNetwork:
    """Build the interaction network of one window's chronological events."""
    return network_from_senders(
        (e.user for e in events),
        window_start=window_start,
        window_index=window_index,
    )


@dataclass(frozen=True)
class NetworkEnsemble:
    """Ordered sequence of per-window networks for one group."""

    spec: WindowSpec | None
    group_name: str
    networks: tuple[InteractionNetwork, ...]

    def __post_init__(self) -> None:
        prev: InteractionNetwork | None = None
        for net in self.networks:
            if prev is not None:
                if net.window_start <= prev.window_start:
                    raise SchemaError(
                        f"window starts not strictly increasing at {net.window_start}"
                    )
                if self.spec is not None:
                    expect = prev.window_index + (
                        net.window_start - prev.window_start
                    ) // self.spec.delta_t
                    if net.window_index != expect:
                        raise SchemaError(
                            f"window index {net.window_index} inconsistent with "
                            f"start {net.window_start} (expected {expect})"
                        )
            prev = net

    @property
    def conversations(self) -> tuple[InteractionNetwork, ...]:
        return tuple(net for net in self.networks if net.is_conversation)

    def __len__(self) -> int:
        return len(self.networks)


def build_ensemble(
    log: MessageLog, spec: WindowSpec, *, group_name: str | None = None
) -> NetworkEnsemble:
    """One network per nonempty window; deterministic for a fixed log + spec."""
    networks = tuple(
        build_network(w.events, window_start=w.start, window_index=w.index)
        for w in slice_windows(log, spec)
    )
    return NetworkEnsemble(
        spec=spec,
        group_name=log.group_name if group_name is None else group_name,
        networks=networks,
    )


def dump_ensemble(ensemble: NetworkEnsemble) -> str:
    """Serialize as JSONL, one network per line, edges in (u < v) order."""
    lines = []
    for net in ensemble.networks:
        obj = {
            "w": net.window_start,
            "i": net.window_index,
            "nodes": sorted(net.nodes),
            "edges": [[u, v, w] for (u, v), w in sorted(net.edges.items())],
        }
        lines.append(json.dumps(obj, separators=(",", ":")))
    return "".join(line + "\n" for line in lines)


def write_ensemble(ensemble: NetworkEnsemble, path: str | Path) -> None:
    Path(path).write_text(dump_ensemble(ensemble), encoding="utf-8")


def load_ensemble(path: str | Path, *, group_name: str | None = None) -> NetworkEnsemble:
    """Read an ensemble JSONL file.

    The line schema carries no window spec or message counts, so the loaded
    ensemble has spec=None and message_count=None per network; every metric
    downstream works from nodes and edges alone.
    """
    path = Path(path)
    networks: list[InteractionNetwork] = []
    for line_no, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"{path}: line {line_no}: invalid JSON") from exc
        try:
            edges = {}
            for u, v, w in obj["edges"]:
                if not (u < v) or w <= 0:
                    raise SchemaError(
                        f"{path}: line {line_no}: bad edge [{u},{v},{w}]"
                    )
                edges[(u, v)] = w
            endpoints = {u for pair in edges for u in pair}
            if endpoints != set(obj["nodes"]):
                raise SchemaError(
                    f"{path}: line {line_no}: nodes do not match edge endpoints"
                )
            networks.append(
                InteractionNetwork(
                    window_start=obj["w"],
                    window_index=obj["i"],
                    nodes=frozenset(obj["nodes"]),
                    edges=edges,
                )
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError(f"{path}: line {line_no}: malformed network") from exc
    return NetworkEnsemble(
        spec=None,
        group_name=path.stem if group_name is None else group_name,
        networks=tuple(networks),
    )
