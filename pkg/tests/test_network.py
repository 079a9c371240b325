import math
from datetime import datetime, timezone

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import two_sine_series
from wrnn import dwt
from wrnn.evaluation import rmse
from wrnn.ingest import NormStats, TimeSeries
from wrnn.network import (PARAM_NAMES, TrainConfig, WrnnModel, WrnnTopology, build_input_vector,
                          forward, gradient, load_model, min_series_length, predict_series,
                          save_model, train, training_pairs)

TOPO = WrnnTopology()
T0 = datetime(2020, 1, 1, tzinfo=timezone.utc)


def test_topology_widths():
    assert TOPO.coeff_row_width == 5
    assert TOPO.input_width == 19
    assert TOPO.hidden == (16, 16)
    assert TOPO.horizon == 6
    assert TOPO.warmup == 15 * 15 + 2


# -- input assembly --------------------------------------------------------

def test_input_vector_zero():
    v = build_input_vector(np.zeros((10, 5)), np.zeros(10), 4)
    assert v.shape == (19,) and not v.any()


def test_input_vector_index_order():
    rows = np.repeat(np.arange(10.0)[:, None], 5, axis=1)
    outputs = 100.0 + np.arange(10)
    v = build_input_vector(rows, outputs, 5)
    expected = [5] * 5 + [4] * 5 + [3] * 5 + [104, 103, 102, 101]
    assert v.tolist() == expected


def test_input_vector_preconditions():
    with pytest.raises(ValueError):
        build_input_vector(np.zeros((10, 5)), np.zeros(10), 1)
    with pytest.raises(ValueError):
        build_input_vector(np.zeros((10, 5)), np.zeros(10), 3)  # only 3 past outputs
    with pytest.raises(ValueError):
        build_input_vector(np.zeros((10, 4)), np.zeros(10), 5)


# -- forward ---------------------------------------------------------------

def naive_forward(params, x):
    """Triple loop over neurons and inputs."""
    def layer(W, b, v, squash):
        out = []
        for i in range(len(b)):
            s = b[i]
            for j in range(len(v)):
                s += W[i][j] * v[j]
            out.append(math.exp(-s * s) if squash else s)
        return out
    h1 = layer(params["W1"], params["b1"], list(x), True)
    h2 = layer(params["W2"], params["b2"], h1, True)
    return layer(params["W3"], params["b3"], h2, False)[0]


def test_forward_zero_model(rng):
    m = WrnnModel.zeros()
    assert forward(m, rng.standard_normal(19)) == 0.0


def test_forward_bias_only(rng):
    m = WrnnModel.zeros()
    m.params["b3"][:] = 2.5
    assert forward(m, rng.standard_normal(19)) == 2.5


def test_forward_matches_naive(rng):
    for seed in range(5):
        m = WrnnModel.initialize(seed=seed)
        for k in m.params:
            m.params[k] = m.params[k] * 4  # push units off their peak
        x = rng.standard_normal(19)
        assert abs(forward(m, x) - naive_forward(m.params, x)) < 1e-12


def test_forward_width_mismatch():
    with pytest.raises(ValueError):
        forward(WrnnModel.zeros(), np.zeros(18))


# -- gradient ----------------------------------------------------------------

def fd_gradient(model, x, target, h=1e-6):
    grads = {}
    for name in PARAM_NAMES:
        p = model.params[name]
        g = np.zeros_like(p)
        for idx in np.ndindex(p.shape):
            old = p[idx]
            p[idx] = old + h
            up = (forward(model, x) - target) ** 2
            p[idx] = old - h
            down = (forward(model, x) - target) ** 2
            p[idx] = old
            g[idx] = (up - down) / (2 * h)
        grads[name] = g
    return grads


def assert_grad_close(an, fd, rel=1e-5):
    for name in PARAM_NAMES:
        a, f = an[name].ravel(), fd[name].ravel()
        scale = np.maximum(np.abs(a), np.abs(f))
        # entries near zero compared in absolute terms at the same tolerance
        err = np.abs(a - f) / np.maximum(scale, 1e-3)
        assert np.max(err) < rel, name


def test_gradient_zero_at_exact_target(rng):
    m = WrnnModel.initialize(seed=3)
    x = rng.standard_normal(19)
    g = gradient(m, x, forward(m, x))
    assert all(not v.any() for v in g.values())


def test_gradient_finite_difference_small_model(rng):
    topo = WrnnTopology(hidden=(3, 2))
    m = WrnnModel.initialize(topo, seed=1)
    for k in m.params:
        m.params[k] = m.params[k] * 3
    x = rng.standard_normal(19)
    assert_grad_close(gradient(m, x, 0.7), fd_gradient(m, x, 0.7))


def test_gradient_zero_w2_blocks_first_layer(rng):
    m = WrnnModel.initialize(seed=2)
    m.params["W2"][:] = 0
    g = gradient(m, rng.standard_normal(19), 1.0)
    assert not g["W1"].any() and not g["b1"].any()
    assert g["b3"].any()


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 10_000))
def test_gradient_property(seed):
    r = np.random.default_rng(seed)
    m = WrnnModel.initialize(WrnnTopology(hidden=(4, 3)), seed=seed)
    for k in m.params:
        m.params[k] = m.params[k] * r.uniform(1, 4)
    x = r.standard_normal(19)
    t = float(r.standard_normal())
    assert_grad_close(gradient(m, x, t), fd_gradient(m, x, t))


# -- training ------------------------------------------------------------------

def test_batch_order_does_not_change_update():
    from wrnn.network import _batch_gradient
    r = np.random.default_rng(0)
    m = WrnnModel.initialize(seed=0)
    X = r.standard_normal((64, 19))
    y = r.standard_normal(64)
    g1, e1 = _batch_gradient(m.params, X, y)
    perm = r.permutation(64)
    g2, e2 = _batch_gradient(m.params, X[perm], y[perm])
    for k in g1:
        np.testing.assert_allclose(g1[k], g2[k], rtol=1e-12, atol=1e-15)
    assert e1 == pytest.approx(e2, rel=1e-12)


def test_training_pairs_targets_are_shifted_series():
    x = two_sine_series(600)
    s = TimeSeries(T0, x)
    stats = NormStats(float(x.mean()), float(x.std(ddof=1)))
    X, y = training_pairs(s, TOPO, stats)
    z = (x - stats.mean) / stats.std
    n0 = TOPO.warmup
    assert X.shape == (600 - n0 - 6, 19)
    np.testing.assert_array_equal(y, z[n0 + 6:])
    np.testing.assert_array_equal(X[0, 15:], z[n0 - 4:n0][::-1])


def test_train_rejects_short_series():
    need = min_series_length(TOPO)
    with pytest.raises(ValueError, match=str(need)):
        train(TimeSeries(T0, two_sine_series(need - 1)), TrainConfig(epochs=1))


def test_train_config_validation():
    for bad in ({"momentum": 1.0}, {"lr_increase": 0.9}, {"lr_decrease": 1.2}, {"epochs": 0}):
        with pytest.raises(ValueError):
            TrainConfig(**bad)


def test_near_constant_series_converges():
    n = min_series_length(TOPO) + 200
    x = 100 + 0.01 * (-1.0) ** np.arange(n)
    model, rep = train(TimeSeries(T0, x), TrainConfig(epochs=400, seed=0))
    assert rep.mse[-1] < 1e-3
    # momentum overshoot makes the first ~20 epochs oscillate within the
    # accepted growth ratio; after that the error only goes down
    tail = np.array(rep.mse[20:])
    assert np.all(np.diff(tail) <= 1e-12)


def test_training_is_deterministic(tmp_path):
    s = TimeSeries(T0, two_sine_series(700))
    cfg = TrainConfig(epochs=60, seed=7)
    m1, r1 = train(s, cfg)
    m2, r2 = train(s, cfg)
    assert r1.mse == r2.mse
    for k in PARAM_NAMES:
        assert np.array_equal(m1.params[k], m2.params[k])
    save_model(m1, tmp_path / "a.model")
    save_model(m2, tmp_path / "b.model")
    assert (tmp_path / "a.model").read_bytes() == (tmp_path / "b.model").read_bytes()


def test_adaptive_rate_moves_both_ways():
    s = TimeSeries(T0, two_sine_series(700))
    _, rep = train(s, TrainConfig(epochs=300, learning_rate=0.5, seed=0))
    lr = np.array(rep.learning_rate)
    assert np.any(np.diff(lr) > 0) and np.any(np.diff(lr) < 0)
    # rejected steps never raise the recorded error by more than the growth ratio
    mse = np.array(rep.mse)
    assert np.all(mse[1:] <= mse[:-1] * 1.04 + 1e-15)


def test_validation_curve_recorded():
    s = TimeSeries(T0, two_sine_series(900))
    _, rep = train(s, TrainConfig(epochs=20, train_fraction=0.8))
    assert len(rep.validation_mse) == 20 and len(rep.mse) == 20
    assert rep.final_epoch == 20


@pytest.fixture(scope="module")
def sine_model():
    x = 1000 + 300 * np.sin(2 * np.pi * np.arange(2000) / 24)
    s = TimeSeries(T0, x)
    model, rep = train(s.slice(0, 1500), TrainConfig(epochs=3000, seed=0))
    return s, model, rep


def test_sinusoid_forecast(sine_model):
    s, model, rep = sine_model
    pred = predict_series(model, s)
    keep = pred.indices >= 1500
    actual = s.values[pred.indices[keep]]
    assert rmse(actual, pred.values[keep]) / actual.mean() < 0.01
    assert rep.final_epoch <= 3000


def test_closed_loop_prediction_runs(sine_model):
    s, model, _ = sine_model
    pred = predict_series(model, s, closed_loop=True)
    keep = pred.indices >= 1500
    actual = s.values[pred.indices[keep]]
    assert rmse(actual, pred.values[keep]) / actual.mean() < 0.05


def test_prediction_count(sine_model):
    s, model, _ = sine_model
    pred = predict_series(model, s)
    assert len(pred) == len(s) - TOPO.warmup - 6
    assert pred.indices[0] == TOPO.warmup + 6 and pred.indices[-1] == len(s) - 1


def test_zero_model_predicts_training_mean():
    stats = NormStats(1234.5, 10.0)
    model = WrnnModel.zeros(stats=stats)
    pred = predict_series(model, two_sine_series(400))
    assert np.all(pred.values == 1234.5)


def test_horizon_mismatch(sine_model):
    s, model, _ = sine_model
    with pytest.raises(ValueError, match="horizon"):
        predict_series(model, s, horizon=3)


def test_model_round_trip_bit_exact(tmp_path):
    m = WrnnModel.initialize(seed=11, stats=NormStats(2.19e7, 3.3e6))
    save_model(m, tmp_path / "m.txt")
    back = load_model(tmp_path / "m.txt")
    assert back.topology == m.topology and back.stats == m.stats and back.seed == 11
    for k in PARAM_NAMES:
        assert np.array_equal(back.params[k], m.params[k])
    save_model(back, tmp_path / "m2.txt")
    assert (tmp_path / "m.txt").read_bytes() == (tmp_path / "m2.txt").read_bytes()


def test_model_version_checked(tmp_path):
    p = tmp_path / "m.txt"
    save_model(WrnnModel.zeros(), p)
    p.write_text(p.read_text().replace("format_version = 1", "format_version = 99"))
    with pytest.raises(ValueError, match="version"):
        load_model(p)
