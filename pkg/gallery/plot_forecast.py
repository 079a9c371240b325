"""
Six-hour-ahead forecasts and a capacity plan
============================================

Train the network on a synthetic request series, score the last 500 hours
and turn the forecasts into per-hour capacity with some headroom.
"""

# %%
from datetime import datetime, timezone

import numpy as np

from wrnn import TimeSeries, evaluate, recommend_capacity, split_series, train
from wrnn.network import TrainConfig

rng = np.random.default_rng(6)
t = np.arange(2000)
x = 1000 + 200 * np.sin(2 * np.pi * t / 24) + 100 * np.sin(2 * np.pi * t / 168)
x += rng.normal(0, 10, t.size)  # 1% noise
series = TimeSeries(datetime(2012, 1, 1, tzinfo=timezone.utc), x)

# %%
# The first 1500 hours train the model, the last 500 are held out.
train_part, _ = split_series(series, 500)
model, curve = train(train_part, TrainConfig(epochs=3000, seed=0))
print(f"{curve.final_epoch} epochs, final training mse {curve.mse[-1]:.5f} ({curve.stop_reason})")

# %%
report = evaluate(model, series, 500)
print(f"rmse {report.rmse:.2f} requests, relative error {100 * report.relative_error:.2f}%")
print("noise floor:", 10 / x[-500:].mean())

# %%
# Headroom of three relative errors covers nearly every hour.
plan = recommend_capacity(report, 3 * report.relative_error)
print("hours covered: %.1f%%" % (100 * np.mean(plan.capacity >= report.actual)))

# %%
from _plotting import plt, save

if plt is not None:
    fig, ax = plt.subplots(figsize=(9, 3.5))
    ax.plot(report.hours, report.actual, lw=0.8, label="actual")
    ax.plot(report.hours, report.predicted, lw=0.8, label="forecast, r = 6")
    ax.step(plan.hours, plan.capacity, lw=0.6, where="mid", label="capacity")
    ax.set_xlabel("hour")
    ax.legend()
    save(fig, "forecast.png")
