"""
Lifting: split, predict, update
===============================

Haar and linear lifting stages on integer request counts, where the
inverse recovers the input bit for bit.
"""

# %%
import numpy as np

from wrnn import lifting

counts = np.array([120, 131, 150, 149, 162, 170, 181, 178, 190], dtype=float)
even, odd = lifting.split(counts)
print("even:", even, "odd:", odd)

# %%
# Haar predicts each odd sample by its left neighbour, the linear stage by
# the mean of both neighbours.
for stage in (lifting.HAAR, lifting.LINEAR):
    r = lifting.lift_forward(counts, stage)
    back = lifting.lift_inverse(r, stage)
    print(f"{stage.name:6s} d = {r.d}")
    print(f"{stage.name:6s} a = {r.a}")
    print("       exact inverse:", np.array_equal(back, counts))

# %%
# A ramp has no detail under the linear stage, away from the right edge.
ramp = 3.0 + 0.5 * np.arange(16)
print(lifting.lift_forward(ramp, lifting.LINEAR).d)

# %%
# Several levels, then the way the CLI writes them: each coefficient held
# over the samples it covers.
rng = np.random.default_rng(1)
y = rng.integers(0, 10 ** 6, 200).astype(float)
details, approx = lifting.lift_multilevel(y, lifting.LINEAR, 4)
print([d.size for d in details], approx.size)
print("bit-exact:", np.array_equal(lifting.inverse_multilevel(details, approx, lifting.LINEAR), y))
held = lifting.hold_expand(details, approx, y.size)
print(held.shape)
