import numpy as np
import pytest
from scipy.stats import ks_2samp

from adaptest.core import RngSpec
from adaptest.errors import InputError
from adaptest.nulldist import (
    DEFAULT_TABLE_SEED,
    EMBEDDED_QUANTILES,
    NullTable,
    default_table,
    p_value,
    quantiles,
    simulate_null_paths,
    simulate_null_series,
)

M = 200_000


@pytest.fixture(scope="module")
def paths():
    return simulate_null_paths(M, 2000, RngSpec(7))


@pytest.fixture(scope="module")
def series():
    return simulate_null_series(M, 200, RngSpec(8))


def _mean_ok(table):
    s = table.samples
    return abs(s.mean() - 0.5) <= 3 * s.std(ddof=1) / np.sqrt(s.size)


def test_means(paths, series):
    assert _mean_ok(paths) and _mean_ok(series)


def test_series_variance_is_one_third(series):
    s = series.samples
    # MC sd of the sample variance from the fourth central moment
    mu4 = np.mean((s - s.mean()) ** 4)
    se = np.sqrt((mu4 - s.var() ** 2) / s.size)
    assert abs(s.var(ddof=1) - 1 / 3) <= 3 * se


def test_cross_oracle_quantiles_and_distance(paths, series):
    probs = [0.90, 0.95, 0.99]
    np.testing.assert_allclose(quantiles(paths, probs), quantiles(series, probs), atol=0.02)
    assert ks_2samp(paths.samples, series.samples).statistic <= 0.01


def test_embedded_quantiles_match_live_simulation(paths):
    live = default_table()
    assert live.seed == DEFAULT_TABLE_SEED and live.m == M
    for prob, value in EMBEDDED_QUANTILES.items():
        assert abs(float(quantiles(live, [prob])[0]) - value) < 5e-4
        assert abs(float(quantiles(paths, [prob])[0]) - value) < 0.02


def test_tables_sorted_nonnegative_readonly(series):
    s = series.samples
    assert np.all(np.diff(s) >= 0) and s[0] >= 0
    with pytest.raises(ValueError):
        s[0] = 1.0


def test_single_sample_reproducible():
    a = simulate_null_paths(1, 100, RngSpec(3)).samples
    b = simulate_null_paths(1, 100, RngSpec(3)).samples
    assert a.shape == (1,) and a[0] == b[0]
    assert simulate_null_series(1, 50, RngSpec(3)).samples[0] == simulate_null_series(
        1, 50, RngSpec(3)).samples[0]


def test_argument_checks():
    with pytest.raises(InputError):
        simulate_null_paths(10, 99)
    with pytest.raises(InputError):
        simulate_null_series(10, 49)
    with pytest.raises(InputError):
        simulate_null_paths(0, 100)


def test_p_value_examples():
    table = simulate_null_series(20_000, 100, RngSpec(1))
    m = table.m
    assert p_value(0.0, table) == 1.0
    assert abs(p_value(float(np.median(table.samples)), table) - 0.5) < 0.01
    assert p_value(1e9, table) == 1 / (m + 1)
    ws = np.linspace(0, 4, 50)
    pv = [p_value(w, table) for w in ws]
    assert all(b <= a for a, b in zip(pv, pv[1:]))
    with pytest.raises(InputError):
        p_value(float("nan"), table)


def test_p_value_counts_ties():
    table = NullTable(np.array([1.0, 2.0, 2.0, 3.0]), "series", 4, 50)
    assert p_value(2.0, table) == (3 + 1) / 5
