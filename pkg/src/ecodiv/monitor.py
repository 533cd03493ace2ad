"""Diversity over time: tracking, trend estimation and drop alarms.

An :class:`EcosystemSeries` is a chronologically ordered set of community
snapshots of one ecosystem.  :func:`evaluate` applies an
:class:`AlarmPolicy` and reports every snapshot where diversity has sat
below the policy threshold for at least ``min_consecutive`` snapshots in
a row; market-share feeds are noisy, so the debounce suppresses
single-snapshot glitches.  Only drops are alarming - rising diversity
never is - so ``below`` is the only direction a policy can have.
Thresholds are always caller-supplied; there is no defensible universal
default.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from datetime import datetime
from typing import NamedTuple

from .community import Community
from .errors import (
    DuplicateTimestampError,
    TooFewSnapshotsError,
    ValidationError,
)
from .indices import hill_number, _check_order

SECONDS_PER_DAY = 86400.0


class Snapshot(NamedTuple):
    timestamp: datetime
    community: Community


@dataclass(frozen=True)
class EcosystemSeries:
    """Time-ordered snapshots of one ecosystem's community."""

    name: str
    snapshots: tuple[Snapshot, ...]

    def __post_init__(self):
        if not self.snapshots:
            raise ValidationError(f"series {self.name!r} has no snapshots")
        for ts, _ in self.snapshots:
            if ts.tzinfo is None:
                raise ValidationError(
                    f"series {self.name!r}: timestamp {ts!r} is not "
                    "timezone-aware"
                )
        for (a, _), (b, _) in zip(self.snapshots, self.snapshots[1:]):
            if a == b:
                raise DuplicateTimestampError(
                    f"series {self.name!r}: duplicate timestamp {a.isoformat()}"
                )
            if a > b:
                raise ValidationError(
                    f"series {self.name!r}: snapshots out of order at "
                    f"{b.isoformat()}"
                )

    def __len__(self) -> int:
        return len(self.snapshots)


@dataclass(frozen=True)
class AlarmPolicy:
    """Alarm when order-q diversity drops below ``threshold``.

    ``min_consecutive`` snapshots must violate in a row before the first
    alarm fires; a recovering snapshot resets the count.
    """

    q: float
    threshold: float
    direction: str = "below"
    min_consecutive: int = 1

    def __post_init__(self):
        _check_order(self.q)
        if not math.isfinite(self.threshold) or self.threshold <= 0.0:
            raise ValidationError(f"threshold must be > 0, got {self.threshold!r}")
        if self.direction != "below":
            raise ValidationError(
                f"only 'below' alarms exist, got direction {self.direction!r}"
            )
        if not isinstance(self.min_consecutive, int) or self.min_consecutive < 1:
            raise ValidationError(
                f"min_consecutive must be a positive integer, "
                f"got {self.min_consecutive!r}"
            )


@dataclass(frozen=True)
class Alarm:
    timestamp: datetime
    observed: float
    threshold: float
    policy: AlarmPolicy

    def __post_init__(self):
        if not self.observed < self.threshold:
            raise ValidationError(
                f"alarm with observed {self.observed!r} >= threshold "
                f"{self.threshold!r}"
            )


def series_diversity(
    s: EcosystemSeries, q: float
) -> list[tuple[datetime, float]]:
    """Order-q effective species number of every snapshot, in series order."""
    q = _check_order(q)
    return [(ts, hill_number(community, q)) for ts, community in s.snapshots]


def evaluate(s: EcosystemSeries, policy: AlarmPolicy) -> list[Alarm]:
    """Apply ``policy`` to the series and return the alarms it raises.

    An alarm is emitted at the ``min_consecutive``-th consecutive
    violating snapshot and at every further violating snapshot until the
    run is broken by a snapshot at or above the threshold.
    """
    alarms: list[Alarm] = []
    run = 0
    for ts, observed in series_diversity(s, policy.q):
        if observed < policy.threshold:
            run += 1
            if run >= policy.min_consecutive:
                alarms.append(Alarm(ts, observed, policy.threshold, policy))
        else:
            run = 0
    return alarms


def trend(s: EcosystemSeries, q: float) -> float:
    """Least-squares slope of diversity against time, per day.

    Time enters as days since the first snapshot, so the slope is exactly
    invariant under shifting the whole series in time, and irregular
    sampling intervals are handled naturally.
    """
    if len(s) < 2:
        raise TooFewSnapshotsError(
            f"series {s.name!r} has {len(s)} snapshot(s); a trend needs 2"
        )
    t0 = s.snapshots[0].timestamp
    points = series_diversity(s, q)
    xs = [(ts - t0).total_seconds() / SECONDS_PER_DAY for ts, _ in points]
    ys = [value for _, value in points]
    n = len(xs)
    x_mean = math.fsum(xs) / n
    y_mean = math.fsum(ys) / n
    sxx = math.fsum((x - x_mean) ** 2 for x in xs)
    sxy = math.fsum((x - x_mean) * (y - y_mean) for x, y in zip(xs, ys))
    return sxy / sxx
