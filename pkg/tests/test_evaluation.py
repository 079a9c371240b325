import math
from datetime import datetime, timezone

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import two_sine_series
from wrnn.evaluation import (ForecastReport, emit_plot_data, evaluate, read_plot_data,
                             recommend_capacity, relative_error, rmse, split_series)
from wrnn.ingest import TimeSeries
from wrnn.network import TrainConfig, train

T0 = datetime(2012, 1, 1, tzinfo=timezone.utc)


def test_rmse_examples(rng):
    x = rng.standard_normal(10)
    assert rmse(x, x) == 0
    assert rmse([0, 0], [3, 4]) == pytest.approx(math.sqrt(12.5), rel=1e-15)
    a, p = rng.standard_normal((2, 500))
    assert abs(rmse(a, p) - math.sqrt(sum((u - v) ** 2 for u, v in zip(a, p)) / 500)) < 1e-12
    with pytest.raises(ValueError):
        rmse([1, 2], [1])


@given(st.lists(st.integers(-10**6, 10**6), min_size=1, max_size=50), st.integers(-1000, 1000))
def test_rmse_detects_translation(values, c):
    x = np.array(values, dtype=float)
    assert rmse(x, x + c) == abs(c)


def test_relative_error_examples():
    assert relative_error(0.0, [5, 6]) == 0
    assert relative_error(5.0, [1000.0]) == 0.005
    with pytest.raises(ValueError):
        relative_error(1.0, [0.0, 0.0])


def test_relative_error_reported_magnitude():
    # an RMSE of 1.3156e4 requests at 6e-4 relative error implies a mean hourly
    # volume of about 2.19e7; only the arithmetic is checked here
    assert relative_error(1.3156e4, [1.3156e4 / 6.0e-4]) == pytest.approx(6.0e-4, rel=1e-12)
    assert 1.3156e4 / 6.0e-4 == pytest.approx(2.193e7, rel=1e-3)


@given(st.floats(0.01, 1e6))
def test_relative_error_scale_invariant(lam):
    r = np.random.default_rng(0)
    a = r.uniform(10, 20, 50)
    p = a + r.normal(0, 1, 50)
    base = relative_error(rmse(a, p), a)
    assert abs(relative_error(rmse(lam * a, lam * p), lam * a) - base) < 1e-12


def test_split_series():
    s = TimeSeries(T0, np.arange(1000.0))
    train_, test = split_series(s, 500)
    assert len(train_) == len(test) == 500
    assert np.array_equal(np.concatenate([train_.values, test.values]), s.values)
    assert test.start_time == T0 + 500 * s.step
    with pytest.raises(ValueError):
        split_series(s, 1000)


def test_plot_data_round_trip(tmp_path, rng):
    rep = ForecastReport(6, [10, 11, 12], rng.uniform(1e6, 2e7, 3), rng.uniform(1e6, 2e7, 3))
    emit_plot_data(rep, tmp_path / "p.csv")
    lines = (tmp_path / "p.csv").read_text().splitlines()
    assert lines[0] == "hour,actual,predicted,abs_error" and len(lines) == 4
    back = read_plot_data(tmp_path / "p.csv")
    assert back.hours.tolist() == [10, 11, 12]
    np.testing.assert_allclose(back.actual, rep.actual, rtol=1e-9)
    np.testing.assert_allclose(back.predicted, rep.predicted, rtol=1e-9)


def test_empty_plot_data(tmp_path):
    emit_plot_data(ForecastReport(6, [], [], []), tmp_path / "e.csv")
    assert (tmp_path / "e.csv").read_text() == "hour,actual,predicted,abs_error\n"
    assert read_plot_data(tmp_path / "e.csv").hours.size == 0


def test_recommend_capacity():
    assert recommend_capacity([100.0], 0.0).capacity.tolist() == [100]
    assert recommend_capacity([100.0], 0.1).capacity.tolist() == [110]
    assert recommend_capacity([100.2], 0.0).capacity.tolist() == [101]
    with pytest.raises(ValueError):
        recommend_capacity([100.0], -0.1)


@given(st.lists(st.floats(0, 1e8), min_size=1, max_size=20), st.floats(0, 2))
def test_capacity_never_below_forecast(pred, headroom):
    plan = recommend_capacity(pred, headroom)
    assert np.all(plan.capacity >= np.array(pred) - 1e-9 * np.maximum(1, np.array(pred)))


def test_capacity_plan_csv(tmp_path):
    plan = recommend_capacity(ForecastReport(6, [5, 6], [1, 1], [10.0, 20.5]), 0.0)
    plan.to_csv(tmp_path / "c.csv")
    assert (tmp_path / "c.csv").read_text() == "hour,capacity\n5,10\n6,21\n"


@pytest.fixture(scope="module")
def two_sine_report():
    s = TimeSeries(T0, two_sine_series(2000, seed=1))
    train_, _ = split_series(s, 500)
    model, _ = train(train_, TrainConfig(epochs=3000, seed=0))
    return evaluate(model, s, 500)


def test_evaluate_scores_holdout_only(two_sine_report):
    rep = two_sine_report
    assert rep.hours.min() >= 1500 and rep.hours.max() == 1999
    assert rep.hours.size == 500
    assert set(rep.summary()) >= {"rmse", "relative_error"}


def test_headroom_coverage(two_sine_report):
    rep = two_sine_report
    plan = recommend_capacity(rep, 3 * rep.relative_error)
    coverage = np.mean(plan.capacity >= rep.actual)
    assert coverage >= 0.99
