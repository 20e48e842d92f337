"""Engagement analytics for encrypted group chats from message metadata.

The pipeline never reads message content. From a (user, timestamp) log it
builds one weighted undirected interaction network per fixed time window
(consecutive senders are linked), scores each window's conversation with the
engagement index (equality x intensity), classifies windows by ei z-score,
ranks users by mean ei centrality per class, and compares user engagement
between two date ranges.
"""

__version__ = "0.1.0"

from .chatlog import (
    AnonymizedLog,
    MessageEvent,
    MessageLog,
    ParsedTranscript,
    PROFILES,
    anonymize,
    dump_log,
    load_log,
    parse_export,
    parse_transcript,
    read_mapping,
    write_log,
    write_mapping,
)
from .engagement import (
    EngagementMetrics,
    NodeEngagement,
    engagement_index,
    equality,
    gini,
    intensity,
    node_centralities,
)
from .ensemble import (
    ClassifiedNetwork,
    EngagementClass,
    EnsembleStats,
    UserRanking,
    WindowMetrics,
    centrality_table,
    conversation_metrics,
    ensemble_stats,
    rank_users,
    zscore_classify,
    zscore_histogram,
)
from .errors import (
    ChatpulseError,
    DegenerateEnsembleError,
    InsufficientDataError,
    MappingConflictError,
    NotAConversationError,
    OrderingError,
    ParameterError,
    ParseError,
    SchemaError,
)
from .netbuild import (
    InteractionNetwork,
    NetworkEnsemble,
    WindowSlice,
    WindowSpec,
    build_ensemble,
    build_network,
    dump_ensemble,
    load_ensemble,
    network_from_senders,
    slice_windows,
    write_ensemble,
)
from .synth import Regime, SynthResult, WindowTruth, generate, write_ground_truth
from .temporal import (
    ComparisonRow,
    PeriodComparison,
    UserSeries,
    engagement_drop_report,
    period_compare,
    period_means,
    user_series,
)
