"""Change-frequency and release-proximity analyses over a ChangeDB."""
from __future__ import annotations

import math
import warnings
from collections import Counter
from dataclasses import dataclass, field
from datetime import date, datetime, timedelta, timezone
from typing import Iterable, Optional, Sequence

from .changedb import ChangeRecord
from .kernels import dominance_counts, rank_sum_distribution
from .releases import ReleaseEvent

__all__ = [
    "FrequencyReport",
    "DailySeries",
    "TestResult",
    "ProximityRow",
    "NoReleasesWarning",
    "EXACT_LIMIT",
    "frequency_report",
    "daily_series",
    "near_release_partition",
    "mann_whitney",
    "cliffs_delta",
    "magnitude",
    "release_proximity_report",
    "timeseries_rows",
]

# combined sample size up to which mann_whitney enumerates exactly
EXACT_LIMIT = 12

NEGLIGIBLE, SMALL, MEDIUM = 0.147, 0.33, 0.47


class NoReleasesWarning(UserWarning):
    pass


@dataclass
class FrequencyReport:
    per_type: dict[str, float]
    per_category: dict[str, float]
    total_changes: int
    counts: dict[str, int] = field(default_factory=dict)
    top: list[tuple[str, float]] = field(default_factory=list)

    @property
    def top_share(self) -> float:
        return sum(f for _, f in self.top)

    def to_dict(self) -> dict:
        return {
            "total_changes": self.total_changes,
            "per_type": self.per_type,
            "per_category": self.per_category,
            "counts": self.counts,
            "top": [{"change_type": t, "frequency": f} for t, f in self.top],
            "top_share": self.top_share,
        }


def frequency_report(records: Iterable[ChangeRecord], top_n: int = 10) -> FrequencyReport:
    """Relative frequency of each change type and category."""
    types: Counter[str] = Counter()
    cats: Counter[str] = Counter()
    for rec in records:
        types[rec.change_type] += 1
        cats[rec.category] += 1
    total = sum(types.values())
    if total == 0:
        return FrequencyReport({}, {}, 0)
    per_type = {t: n / total for t, n in sorted(types.items())}
    per_category = {c: n / total for c, n in sorted(cats.items())}
    ranked = sorted(per_type.items(), key=lambda kv: (-kv[1], kv[0]))[:top_n]
    return FrequencyReport(per_type, per_category, total, dict(sorted(types.items())), ranked)


@dataclass
class DailySeries:
    entries: list[tuple[date, int]]
    k: int = 1

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ValueError("window must be at least one day")

    @property
    def dates(self) -> list[date]:
        return [d for d, _ in self.entries]

    @property
    def counts(self) -> list[int]:
        return [c for _, c in self.entries]


def _utc_day(timestamp: int) -> date:
    return datetime.fromtimestamp(timestamp, tz=timezone.utc).date()


def daily_counts(records: Iterable[ChangeRecord]) -> dict[date, int]:
    per_day: Counter[date] = Counter()
    for rec in records:
        per_day[_utc_day(rec.timestamp)] += 1
    return dict(per_day)


def daily_series(records: Iterable[ChangeRecord], k: int = 1, *,
                 active_days_only: bool = False,
                 span: Optional[tuple[date, date]] = None) -> DailySeries:
    """Per-day change totals, summed over a trailing ``k``-day window.

    Calendar days without changes count as zero.  With ``active_days_only``
    only days that have changes are kept (after windowing).
    """
    if k < 1:
        raise ValueError("window must be at least one day")
    return _windowed(daily_counts(records), k, active_days_only, span)


def _windowed(per_day: dict[date, int], k: int, active_days_only: bool = False,
              span: Optional[tuple[date, date]] = None) -> DailySeries:
    if not per_day:
        return DailySeries([], k)
    first, last = span if span else (min(per_day), max(per_day))
    n_days = (last - first).days + 1
    raw = [per_day.get(first + timedelta(days=i), 0) for i in range(n_days)]
    windowed = []
    running = 0
    for i, c in enumerate(raw):
        running += c
        if i >= k:
            running -= raw[i - k]
        windowed.append(running)
    entries = [(first + timedelta(days=i), windowed[i]) for i in range(n_days)
               if not active_days_only or raw[i] > 0]
    return DailySeries(entries, k)


def _near_days(releases: Sequence[ReleaseEvent], k: int) -> set[date]:
    near = set()
    for rel in releases:
        for back in range(k):
            near.add(rel.date - timedelta(days=back))
    return near


def near_release_partition(series: DailySeries, releases: Sequence[ReleaseEvent],
                           k: int) -> tuple[list[int], list[int]]:
    """Split counts into days within ``k`` days up to and including a release, and the rest."""
    if not releases:
        warnings.warn("no releases given; every day is far from a release", NoReleasesWarning,
                      stacklevel=2)
    near_days = _near_days(releases, k)
    near, far = [], []
    for day, count in series.entries:
        (near if day in near_days else far).append(count)
    return near, far


def _midranks(values: Sequence[float]) -> list[float]:
    order = sorted(range(len(values)), key=values.__getitem__)
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        rank = (i + j) / 2.0 + 1.0
        for t in range(i, j + 1):
            ranks[order[t]] = rank
        i = j + 1
    return ranks


def _tie_term(values: Sequence[float]) -> float:
    return float(sum(t ** 3 - t for t in Counter(values).values()))


def _exact_p(x: Sequence[float], y: Sequence[float], alternative: str) -> float:
    n1 = len(x)
    ranks = _midranks(list(x) + list(y))
    doubled = [int(round(2 * r)) for r in ranks]
    observed = sum(doubled[:n1])
    counts = rank_sum_distribution(doubled, n1)
    n = len(doubled)
    center = n1 * (n + 1)  # twice the expected rank sum, an integer
    total = float(sum(counts))
    if alternative == "greater":
        hit = sum(c for s, c in enumerate(counts) if s >= observed)
    elif alternative == "less":
        hit = sum(c for s, c in enumerate(counts) if s <= observed)
    else:
        dev = abs(observed - center)
        hit = sum(c for s, c in enumerate(counts) if abs(s - center) >= dev)
    return min(1.0, hit / total)


def _normal_p(x: Sequence[float], y: Sequence[float], alternative: str) -> float:
    n1, n2 = len(x), len(y)
    n = n1 + n2
    pooled = list(x) + list(y)
    ranks = _midranks(pooled)
    u = sum(ranks[:n1]) - n1 * (n1 + 1) / 2.0
    mu = n1 * n2 / 2.0
    var = n1 * n2 / 12.0 * ((n + 1) - _tie_term(pooled) / (n * (n - 1)))
    if var <= 0:
        return 1.0
    sigma = math.sqrt(var)
    if alternative == "greater":
        z = (u - mu - 0.5) / sigma
        return min(1.0, 0.5 * math.erfc(z / math.sqrt(2)))
    if alternative == "less":
        z = (u - mu + 0.5) / sigma
        return min(1.0, 0.5 * math.erfc(-z / math.sqrt(2)))
    z = max(abs(u - mu) - 0.5, 0.0) / sigma
    return min(1.0, math.erfc(z / math.sqrt(2)))


def mann_whitney(x: Sequence[float], y: Sequence[float], *, alternative: str = "two-sided",
                 exact: Optional[bool] = None) -> float:
    """Mann-Whitney-Wilcoxon rank-sum p-value.

    Ties get midranks.  Small samples (``len(x) + len(y) <= EXACT_LIMIT``)
    are enumerated exactly; larger ones use the normal approximation with
    tie-corrected variance and continuity correction.  ``alternative`` is
    ``"two-sided"``, ``"greater"`` (x tends larger) or ``"less"``.
    Identical values throughout give p = 1.
    """
    if not x or not y:
        raise ValueError("both samples need at least one value")
    if alternative not in ("two-sided", "greater", "less"):
        raise ValueError(f"unknown alternative {alternative!r}")
    if len(set(x) | set(y)) == 1:
        return 1.0
    if exact is None:
        exact = len(x) + len(y) <= EXACT_LIMIT
    if exact:
        return _exact_p(x, y, alternative)
    return _normal_p(x, y, alternative)


def magnitude(delta: float) -> str:
    d = abs(delta)
    if d < NEGLIGIBLE:
        return "negligible"
    if d < SMALL:
        return "small"
    if d < MEDIUM:
        return "medium"
    return "large"


def cliffs_delta(x: Sequence[float], y: Sequence[float]) -> tuple[float, str]:
    """Cliff's delta of x over y with its magnitude label."""
    if not x or not y:
        raise ValueError("both samples need at least one value")
    greater, less = dominance_counts(list(map(float, x)), list(map(float, y)))
    delta = (greater - less) / (len(x) * len(y))
    return delta, magnitude(delta)


@dataclass
class TestResult:
    p_value: float
    delta: float
    magnitude: str
    n_near: int
    n_far: int

    __test__ = False  # not a pytest class

    @property
    def significant(self) -> bool:
        return self.p_value < 0.01


@dataclass
class ProximityRow:
    k: int
    result: Optional[TestResult]
    flag: Optional[str] = None

    def to_dict(self) -> dict:
        row: dict = {"k": self.k, "flag": self.flag}
        if self.result is not None:
            row.update({
                "p_value": self.result.p_value,
                "delta": self.result.delta,
                "magnitude": self.result.magnitude,
                "n_near": self.result.n_near,
                "n_far": self.result.n_far,
                "significant": self.result.significant,
            })
        return row


def release_proximity_report(records: Sequence[ChangeRecord], releases: Sequence[ReleaseEvent],
                             ks: Sequence[int] = (1, 5, 7, 9), *,
                             alternative: str = "two-sided",
                             active_days_only: bool = False) -> list[ProximityRow]:
    """Compare change counts near releases against all other days, per window size."""
    if not ks:
        raise ValueError("need at least one window size")
    rows = []
    per_day = daily_counts(records)
    for k in ks:
        if k < 1:
            raise ValueError("window must be at least one day")
        if not releases:
            rows.append(ProximityRow(k, None, "NoReleases"))
            continue
        series = _windowed(per_day, k, active_days_only)
        near, far = near_release_partition(series, releases, k)
        if not near or not far:
            rows.append(ProximityRow(k, None, "EmptySample"))
            continue
        p = mann_whitney(near, far, alternative=alternative)
        d, mag = cliffs_delta(near, far)
        rows.append(ProximityRow(k, TestResult(p, d, mag, len(near), len(far))))
    return rows


def timeseries_rows(series: DailySeries,
                    releases: Sequence[ReleaseEvent]) -> list[tuple[str, int, int]]:
    """``(date, count, is_release)`` rows for plotting."""
    release_days = {r.date for r in releases}
    return [(d.isoformat(), c, int(d in release_days)) for d, c in series.entries]
