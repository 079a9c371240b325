"""
An RBF-built mother wavelet
===========================

Two compressed copies of a Gaussian RBF, one flipped, give a period-2
function with zero mean over every period.
"""

# %%
import numpy as np

from wrnn import activation

w = activation.CompositeMotherWavelet().normalized()
print("norm over one period: %.12f" % activation.mother_norm(w))

# %%
# Integrals over [2h + 1, 2k + 1] cover whole periods and vanish.
for h, k in [(-1, 0), (-2, 1), (-3, 2)]:
    print(h, k, activation.check_admissibility(w, h, k))

# %%
# psi(-x) = -psi(x)
x = np.linspace(-3, 3, 1201)
print("antisymmetry:", np.max(np.abs(w(x) + w(-x))))

# %%
from _plotting import plt, save

if plt is not None:
    fig, ax = plt.subplots(figsize=(8, 3))
    ax.plot(x, w(x))
    ax.axhline(0, color="k", lw=0.5)
    ax.set_xlabel("x")
    ax.set_ylabel("psi(x)")
    save(fig, "mother_wavelet.png")
