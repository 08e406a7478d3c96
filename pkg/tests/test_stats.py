import itertools
import random
import warnings
from datetime import date, datetime, timedelta, timezone
from fractions import Fraction

import pytest

from builddiff.changedb import ChangeRecord
from builddiff.releases import ReleaseEvent
from builddiff.stats import (NoReleasesWarning, cliffs_delta, daily_series, frequency_report,
                             magnitude, mann_whitney, near_release_partition,
                             release_proximity_report, timeseries_rows)

DAY0 = date(2016, 6, 1)


def stamp(day: date, hour: int = 12) -> int:
    return int(datetime(day.year, day.month, day.day, hour, tzinfo=timezone.utc).timestamp())


def rec(change_type="MODULE_INSERT", category="General Changes", day=DAY0, hour=12, commit="c"):
    return ChangeRecord(commit.ljust(40, "0"), "f" * 40, stamp(day, hour), "pom.xml", change_type,
                        category, "project/modules/module", None, "m")


# --- oracles ----------------------------------------------------------------

def oracle_ranks(values):
    """Midranks via counting: rank = #smaller + (#equal + 1) / 2."""
    return [sum(w < v for w in values) + Fraction(sum(w == v for w in values) + 1, 2)
            for v in values]


def oracle_mw_p(x, y, alternative="two-sided"):
    pooled = list(x) + list(y)
    ranks = oracle_ranks(pooled)
    n1, n = len(x), len(pooled)
    center = Fraction(n1 * (n + 1), 2)
    observed = sum(ranks[:n1])
    hits = total = 0
    for combo in itertools.combinations(range(n), n1):
        s = sum(ranks[i] for i in combo)
        total += 1
        if alternative == "greater":
            hits += s >= observed
        elif alternative == "less":
            hits += s <= observed
        else:
            hits += abs(s - center) >= abs(observed - center)
    return float(Fraction(hits, total))


def oracle_delta(x, y):
    gt = sum(a > b for a in x for b in y)
    lt = sum(a < b for a in x for b in y)
    return (gt - lt) / (len(x) * len(y))


# --- frequency --------------------------------------------------------------

def test_frequency_worked_ratio():
    records = [rec("MODULE_INSERT")] * 222 + [rec("DEPENDENCY_INSERT", "Dependency Changes")] * (
        9534 - 222)
    report = frequency_report(records)
    assert report.total_changes == 9534
    assert report.per_type["MODULE_INSERT"] == pytest.approx(0.0233, abs=1e-4)
    assert report.counts["MODULE_INSERT"] == 222
    assert sum(report.per_type.values()) == pytest.approx(1.0, abs=1e-9)
    assert sum(report.per_category.values()) == pytest.approx(1.0, abs=1e-9)


def test_frequency_uniform_top_ten():
    records = [rec(f"TYPE_{i}") for i in range(10) for _ in range(10)]
    report = frequency_report(records)
    assert all(f == pytest.approx(0.1) for f in report.per_type.values())
    assert report.top_share == pytest.approx(1.0)
    assert len(report.top) == 10


def test_frequency_single_type_and_empty():
    assert frequency_report([rec()] * 3).per_type == {"MODULE_INSERT": 1.0}
    empty = frequency_report([])
    assert (empty.total_changes, empty.per_type, empty.per_category) == (0, {}, {})


def test_category_is_sum_of_members():
    records = ([rec("A", "Build Changes")] * 3 + [rec("B", "Build Changes")] * 2
               + [rec("C", "Team Changes")] * 5)
    report = frequency_report(records)
    assert report.per_category["Build Changes"] == pytest.approx(
        report.per_type["A"] + report.per_type["B"])


# --- daily series -----------------------------------------------------------

def test_same_day_commits_add_up():
    records = [rec(day=date(2016, 6, 23), commit="a")] * 10 + [
        rec(day=date(2016, 6, 23), hour=20, commit="b")] * 15
    series = daily_series(records)
    assert series.entries == [(date(2016, 6, 23), 25)]


def test_gaps_filled_and_window():
    records = []
    for i, n in enumerate([1, 2, 3, 4]):
        records += [rec(day=DAY0 + timedelta(days=i))] * n
    assert daily_series(records, 1).counts == [1, 2, 3, 4]
    assert daily_series(records, 2).counts == [1, 3, 5, 7]
    gappy = [rec(day=DAY0), rec(day=DAY0 + timedelta(days=3))]
    series = daily_series(gappy)
    assert series.counts == [1, 0, 0, 1]
    assert series.dates == [DAY0 + timedelta(days=i) for i in range(4)]
    assert daily_series(gappy, active_days_only=True).counts == [1, 1]


def test_window_linearity_with_padding():
    rng = random.Random(3)
    counts = [rng.randint(0, 5) for _ in range(30)]
    records = [rec(day=DAY0 + timedelta(days=i)) for i, c in enumerate(counts) for _ in range(c)]
    k = 4
    span = (DAY0 - timedelta(days=k - 1), DAY0 + timedelta(days=29 + k - 1))
    series = daily_series(records, k, span=span)
    assert sum(series.counts) == k * sum(counts)


def test_utc_day_boundary():
    late = ChangeRecord("a" * 40, "b" * 40, stamp(DAY0, 23) + 3599, "pom.xml", "X", "Y", "p")
    early = ChangeRecord("a" * 40, "b" * 40, stamp(DAY0, 23) + 3600, "pom.xml", "X", "Y", "p")
    assert daily_series([late, early]).entries == [(DAY0, 1), (DAY0 + timedelta(days=1), 1)]


def test_bad_window():
    with pytest.raises(ValueError):
        daily_series([rec()], 0)


# --- partition --------------------------------------------------------------

def _series(n_days):
    return daily_series([rec(day=DAY0 + timedelta(days=i)) for i in range(n_days)])


def test_partition_single_release_k1():
    series = _series(20)
    rel = [ReleaseEvent(DAY0 + timedelta(days=10), "v1")]
    near, far = near_release_partition(series, rel, 1)
    assert (len(near), len(far)) == (1, 19)


def test_partition_overlapping_windows():
    counts_by_day = list(range(1, 21))  # day i has i changes, so values identify days
    records = [rec(day=DAY0 + timedelta(days=i - 1)) for i in counts_by_day for _ in range(i)]
    series = daily_series(records)
    rel = [ReleaseEvent(DAY0 + timedelta(days=9), "a"), ReleaseEvent(DAY0 + timedelta(days=11), "b")]
    near, far = near_release_partition(series, rel, 7)
    assert near == list(range(4, 13))  # days 4..12 (1-based)
    assert len(near) + len(far) == 20


def test_partition_no_releases_warns():
    with pytest.warns(NoReleasesWarning):
        near, far = near_release_partition(_series(5), [], 3)
    assert near == [] and len(far) == 5


# --- Mann-Whitney -----------------------------------------------------------

def test_mw_worked_examples():
    assert mann_whitney([1, 2, 3], [4, 5, 6]) == pytest.approx(0.1, abs=1e-12)
    assert mann_whitney([1, 2, 3], [1, 2, 3]) == pytest.approx(1.0, abs=1e-9)
    assert mann_whitney([2, 2], [2, 2, 2]) == 1.0


def test_mw_exact_matches_enumeration_all_sizes():
    rng = random.Random(42)
    for n in range(2, 11):
        for n1 in range(1, n):
            for _ in range(3):
                pool = rng.choice([3, 5, 20])
                x = [rng.randint(0, pool) for _ in range(n1)]
                y = [rng.randint(0, pool) for _ in range(n - n1)]
                if len(set(x) | set(y)) == 1:
                    continue
                for alt in ("two-sided", "greater", "less"):
                    assert mann_whitney(x, y, alternative=alt, exact=True) == pytest.approx(
                        oracle_mw_p(x, y, alt), abs=1e-12), (x, y, alt)


def test_mw_normal_close_to_exact_for_tied_samples():
    rng = random.Random(9)
    for shift in (0, 1):
        x = [rng.randint(0, 4) for _ in range(30)]
        y = [rng.randint(0, 4) + shift for _ in range(30)]
        exact = mann_whitney(x, y, exact=True)
        approx = mann_whitney(x, y, exact=False)
        assert abs(exact - approx) < 0.01


def test_mw_large_disjoint():
    rng = random.Random(1)
    x = [rng.gauss(0, 1) for _ in range(100)]
    y = [rng.gauss(10, 1) for _ in range(100)]
    assert mann_whitney(x, y) < 1e-6


def test_mw_translation_invariant():
    x, y = [1, 4, 4, 7, 9, 2, 2], [3, 3, 8, 10, 11, 12, 4, 5]
    assert mann_whitney(x, y) == pytest.approx(mann_whitney([v + 100 for v in x],
                                                            [v + 100 for v in y]))


def test_mw_one_sided_consistent():
    x, y = [5, 6, 7, 8, 9, 10, 11], [1, 2, 3, 4, 5, 6]
    assert mann_whitney(x, y, alternative="greater") < mann_whitney(x, y, alternative="less")


def test_mw_errors():
    with pytest.raises(ValueError):
        mann_whitney([], [1])
    with pytest.raises(ValueError):
        mann_whitney([1], [2], alternative="sideways")


# --- Cliff's delta ----------------------------------------------------------

def test_delta_examples():
    assert cliffs_delta([5, 6], [1, 2]) == (1.0, "large")
    assert cliffs_delta([1, 2, 3], [1, 2, 3]) == (0.0, "negligible")
    assert cliffs_delta([1, 3, 5], [2, 4]) == (0.0, "negligible")


def test_delta_matches_pair_count_and_antisymmetry():
    rng = random.Random(0)
    for _ in range(300):
        x = [rng.randint(0, 9) for _ in range(rng.randint(1, 25))]
        y = [rng.randint(0, 9) for _ in range(rng.randint(1, 25))]
        d, _ = cliffs_delta(x, y)
        assert d == pytest.approx(oracle_delta(x, y), abs=1e-12)
        assert cliffs_delta(y, x)[0] == pytest.approx(-d, abs=1e-12)


@pytest.mark.parametrize("d, label", [
    (0.0, "negligible"), (0.1469, "negligible"), (0.147, "small"), (-0.147, "small"),
    (0.3299, "small"), (0.33, "medium"), (0.4699, "medium"), (0.47, "large"), (-1.0, "large"),
])
def test_magnitude_thresholds(d, label):
    assert magnitude(d) == label


# --- report -----------------------------------------------------------------

def test_report_flags():
    records = [rec(day=DAY0 + timedelta(days=i)) for i in range(10)]
    rows = release_proximity_report(records, [], ks=(1, 5))
    assert [(r.k, r.result, r.flag) for r in rows] == [(1, None, "NoReleases"), (5, None, "NoReleases")]
    # release window covering the whole span leaves no far days
    rows = release_proximity_report(records, [ReleaseEvent(DAY0 + timedelta(days=9), "v")], ks=(10,))
    assert rows[0].flag == "EmptySample"
    with pytest.raises(ValueError):
        release_proximity_report(records, [], ks=())


def test_report_separates_release_weeks():
    records = []
    releases = []
    for week in range(10):
        release_day = DAY0 + timedelta(days=week * 30 + 20)
        releases.append(ReleaseEvent(release_day, f"v{week}"))
        for i in range(30):
            day = DAY0 + timedelta(days=week * 30 + i)
            n = 50 if release_day - timedelta(days=6) <= day <= release_day else 1
            records += [rec(day=day)] * n
    rows = release_proximity_report(records, releases, ks=(1, 5, 7))
    for row in rows:
        assert row.result.p_value < 0.01
        assert row.result.magnitude == "large"
        assert row.to_dict()["significant"] is True


def test_timeseries_rows():
    records = [rec(day=DAY0), rec(day=DAY0 + timedelta(days=2))]
    rows = timeseries_rows(daily_series(records), [ReleaseEvent(DAY0 + timedelta(days=1), "v")])
    assert rows == [("2016-06-01", 1, 0), ("2016-06-02", 0, 1), ("2016-06-03", 1, 0)]


def test_no_warning_with_releases():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        near_release_partition(_series(3), [ReleaseEvent(DAY0, "v")], 1)
