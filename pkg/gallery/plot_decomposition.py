"""
Undecimated bior3.7 decomposition of an hourly series
=====================================================

Four detail levels and the residual approximation of a synthetic week of
traffic, followed by the exact round trip of the decimated transform.
"""

# %%
# A traffic-like series: a daily cycle, a weekly cycle and some noise.
import numpy as np

from wrnn import dwt

rng = np.random.default_rng(0)
t = np.arange(24 * 28)
x = 1000 + 200 * np.sin(2 * np.pi * t / 24) + 100 * np.sin(2 * np.pi * t / 168)
x += rng.normal(0, 10, t.size)

# %%
# One row per hour: ``d1 .. d4`` then the residual ``a4``.  Centred filters
# are easiest to look at; the model itself uses the causal version.
bank = dwt.bior37()
coeffs = dwt.decompose_undecimated(x, 4, bank)
print(",".join(coeffs.header()))
print(coeffs.matrix[:3].round(3))

# Energy per column shows where the daily cycle ends up.
energy = (coeffs.matrix ** 2).mean(axis=0)
for name, e in zip(coeffs.header(), energy):
    print(f"{name}: {e:12.1f}")

# %%
# Causal coefficients only use the past; the first rows touch the left
# boundary extension and are dropped before training.
causal = dwt.decompose_undecimated(x, 4, bank, causal=True)
print("causal warm-up rows:", dwt.causal_support(bank, 4))

# %%
# The decimated pyramid reconstructs the input to rounding error.
pyr = dwt.decompose_decimated(x, 4, bank)
print("pyramid lengths:", [d.size for d in pyr.details], pyr.approx.size)
print("round-trip error: %.2e" % np.max(np.abs(dwt.reconstruct(pyr, bank) - x)))

report = dwt.verify_biorthogonality(bank)
print(report)

# %%
from _plotting import plt, save

if plt is not None:
    fig, axes = plt.subplots(6, 1, figsize=(9, 10), sharex=True)
    axes[0].plot(t, x, lw=0.8)
    axes[0].set_ylabel("x")
    for ax, name, col in zip(axes[1:], coeffs.header(), coeffs.matrix.T):
        ax.plot(t, col, lw=0.8)
        ax.set_ylabel(name)
    axes[-1].set_xlabel("hour")
    save(fig, "decomposition.png")
