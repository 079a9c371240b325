"""Second-generation wavelets: split, predict, update.

A lifting step maps a series ``x`` to a coarse part ``a`` and a detail part
``d``::

    d = x_odd  - P(x_even)
    a = x_even + U(d)

and is undone by running the same two steps backwards.  The inverse
recomputes exactly the same ``P`` and ``U`` values as the forward pass, so
whenever the additions involved are exact in floating point (e.g. integer
request counts) the round trip reproduces the input bit for bit; for general
real input it is exact up to rounding of the two additions.

Odd-length input leaves one even sample without an odd partner; it goes
into ``a`` unchanged.  Stencils that reach past either end use symmetric
(whole-sample) reflection.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np


@dataclass(frozen=True)
class LiftingStage:
    """A predict/update pair.

    ``predict(even, n_odd)`` returns the prediction at each of the ``n_odd``
    odd positions; ``update(detail, n_even)`` returns the correction at each of
    the ``n_even`` even positions.  ``order`` is the number of polynomial
    degrees (0 .. order-1) the predictor reproduces exactly.
    """

    name: str
    predict: Callable[[np.ndarray, int], np.ndarray]
    update: Callable[[np.ndarray, int], np.ndarray]
    order: int


@dataclass
class LiftingResult:
    a: np.ndarray
    d: np.ndarray

    # the coarse part holds the even samples, including an unpaired last one
    parity = "even-first"

    def __post_init__(self):
        self.a = np.asarray(self.a, dtype=float)
        self.d = np.asarray(self.d, dtype=float)
        if self.a.size not in (self.d.size, self.d.size + 1):
            raise ValueError(f"inconsistent lengths: len(a)={self.a.size}, len(d)={self.d.size}")

    @property
    def original_length(self):
        return self.a.size + self.d.size


def _haar_predict(even, n_odd):
    return even[:n_odd]


def _haar_update(d, n_even):
    out = np.zeros(n_even)
    out[:d.size] = d / 2
    return out


def _linear_predict(even, n_odd):
    left = even[:n_odd]
    # right neighbour of the last odd sample of an even-length series is
    # reflected back onto its left neighbour
    right = np.append(even[1:], even[-1])[:n_odd]
    return (left + right) / 2


def _linear_update(d, n_even):
    out = np.zeros(n_even)
    if d.size == 0:
        return out
    left = np.concatenate([d[:1], d[:-1]])  # d[-1] reflects onto d[0]
    out[:d.size] = (left + d) / 4
    return out


HAAR = LiftingStage("haar", _haar_predict, _haar_update, order=1)
LINEAR = LiftingStage("linear", _linear_predict, _linear_update, order=2)

STAGES = {"haar": HAAR, "linear": LINEAR}


def split(series):
    x = np.asarray(getattr(series, "values", series), dtype=float).ravel()
    if x.size < 2:
        raise ValueError(f"split needs at least 2 samples, got {x.size}")
    return x[0::2].copy(), x[1::2].copy()


def interleave(even, odd):
    even = np.asarray(even, dtype=float)
    odd = np.asarray(odd, dtype=float)
    if even.size not in (odd.size, odd.size + 1):
        raise ValueError(f"cannot interleave {even.size} even with {odd.size} odd samples")
    out = np.empty(even.size + odd.size)
    out[0::2] = even
    out[1::2] = odd
    return out


def lift_forward(series, stage=HAAR):
    even, odd = split(series)
    d = odd - stage.predict(even, odd.size)
    a = even + stage.update(d, even.size)
    return LiftingResult(a, d)


def lift_inverse(result, stage=HAAR):
    a, d = result.a, result.d
    if a.size not in (d.size, d.size + 1):
        raise ValueError(f"inconsistent lengths: len(a)={a.size}, len(d)={d.size}")
    even = a - stage.update(d, a.size)
    odd = d + stage.predict(even, d.size)
    return interleave(even, odd)


def lift_multilevel(series, stage=HAAR, levels=1):
    """Apply :func:`lift_forward` ``levels`` times to successive coarse parts.

    Returns
    -------
    details : list of ndarray
        Finest level first.
    approx : ndarray
    """
    x = np.asarray(getattr(series, "values", series), dtype=float).ravel()
    if int(levels) != levels or levels < 1:
        raise ValueError(f"levels must be a positive integer, got {levels}")
    if x.size < 2 ** levels:
        raise ValueError(f"{levels} levels need at least {2 ** levels} samples, got {x.size}")
    details = []
    a = x
    for _ in range(levels):
        res = lift_forward(a, stage)
        details.append(res.d)
        a = res.a
    return details, a


def inverse_multilevel(details, approx, stage=HAAR):
    a = np.asarray(approx, dtype=float)
    for d in reversed(details):
        a = lift_inverse(LiftingResult(a, d), stage)
    return a


def hold_expand(details, approx, length):
    """Per-time-step view of a lifting pyramid.

    Row ``t`` holds, for every level ``i``, the coefficient whose support
    contains ``t`` (each level-``i`` coefficient repeated ``2**i`` times), in
    the column order ``d1 ... dM, aM``.
    """
    t = np.arange(length)
    cols = [d[np.minimum(t >> (i + 1), d.size - 1)] for i, d in enumerate(details)]
    cols.append(approx[np.minimum(t >> len(details), approx.size - 1)])
    return np.column_stack(cols)
