"""Equality, Intensity, Engagement Index, and per-node engagement centrality.

For a conversation network with n interacting participants, total simplified
edge weight m, and edge-weight multiset W:

    equality  = 1 - gini(W)
    intensity = log2(n * m)
    ei        = equality * intensity

A node's engagement centrality is n * strength * ei / (2 m), so the mean over
nodes recovers the network ei exactly. Networks without two interacting users
have no metrics; callers treat them as excluded.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import _kernels
from .errors import NotAConversationError
from .netbuild import InteractionNetwork


@dataclass(frozen=True, slots=True)
class EngagementMetrics:
    n: int
    total_weight: int
    gini: float
    equality: float
    intensity: float
    ei: float


@dataclass(frozen=True, slots=True)
class NodeEngagement:
    user: int
    strength: int
    ei_centrality: float


def gini(values) -> float:
    """Gini coefficient of a nonempty multiset of positive weights, in [0, 1)."""
    values = list(values)
    if not values:
        raise ValueError("gini requires at least one weight")
    if min(values) <= 0:
        raise ValueError("gini weights must be strictly positive")
    return _kernels.gini_sorted(values)


def _require_conversation(net: InteractionNetwork) -> None:
    if not net.is_conversation:
        raise NotAConversationError(
            f"window {net.window_index} has {net.n} interacting participants;"
            " metrics need at least two"
        )


def equality(net: InteractionNetwork) -> float:
    """1 - gini over the edge-weight multiset; 1 means perfectly even."""
    _require_conversation(net)
    return 1.0 - gini(net.edges.values())


def intensity(net: InteractionNetwork) -> float:
    """log2(participants x total edge weight); 1 for a single exchanged pair."""
    _require_conversation(net)
    return math.log2(net.n * net.total_weight)


def engagement_index(net: InteractionNetwork) -> EngagementMetrics:
    """All scalar engagement metrics for one conversation network."""
    _require_conversation(net)
    g = gini(net.edges.values())
    eq = 1.0 - g
    total = net.total_weight
    inten = math.log2(net.n * total)
    return EngagementMetrics(
        n=net.n,
        total_weight=total,
        gini=g,
        equality=eq,
        intensity=inten,
        ei=eq * inten,
    )


def node_centralities(
    net: InteractionNetwork, metrics: EngagementMetrics
) -> list[NodeEngagement]:
    """Per-node engagement, proportional to strength; averages to metrics.ei."""
    scale = metrics.n * metrics.ei / (2.0 * metrics.total_weight)
    return [
        NodeEngagement(user=user, strength=s, ei_centrality=s * scale)
        for user, s in sorted(net.strengths().items())
    ]
