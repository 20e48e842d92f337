from __future__ import annotations

import random

import pytest

from chatpulse import MessageEvent, MessageLog, _kernels


@pytest.fixture(params=_kernels.available_backends())
def kernel_backend(request):
    """Run a test once per available kernel backend, restoring the default."""
    previous = _kernels.BACKEND
    _kernels.use_backend(request.param)
    yield request.param
    _kernels.use_backend(previous)


def make_log(rows, group_name="test") -> MessageLog:
    """Build a log from (user, timestamp) pairs in order."""
    events = [
        MessageEvent(user=u, timestamp=t, seq=i) for i, (u, t) in enumerate(rows)
    ]
    return MessageLog.from_events(events, group_name=group_name)


def random_log(seed=0, users=6, count=400, horizon=6 * 3600, start=0) -> MessageLog:
    rng = random.Random(seed)
    times = sorted(rng.randrange(horizon) for _ in range(count))
    return make_log([(rng.randrange(users), start + t) for t in times])
