"""Gaussian RBF transfer functions and the RBF-composed mother wavelet.

The mother wavelet is built from two mirrored, compressed copies of an RBF
``f`` on one period and repeated with period 2::

    psi(x) = +f(2x + 1)    for x in [-1, 0)
    psi(x) = -f(2x - 1)    for x in (0, 1]
    psi(x + 2l) = psi(x)

It is set to zero at the integers, the only values compatible with both the
period and the antisymmetry about every even integer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate


@dataclass(frozen=True)
class RbfFunction:
    """Gaussian ``exp(-((x - center) / width)**2)``."""

    center: float = 0.0
    width: float = 1.0

    def __post_init__(self):
        if not self.width > 0:
            raise ValueError(f"width must be positive, got {self.width}")

    def __call__(self, x):
        return rbf_eval(self, x)


def rbf_eval(f, x):
    u = (np.asarray(x, dtype=float) - f.center) / f.width
    return np.exp(-u * u)


def rbf_grad(f, x):
    u = (np.asarray(x, dtype=float) - f.center) / f.width
    return -2.0 * u / f.width * np.exp(-u * u)


def hidden_activation(z):
    """Transfer function of the hidden neurons, ``exp(-z**2)``."""
    z = np.asarray(z, dtype=float)
    return np.exp(-z * z)


def hidden_activation_grad(z):
    z = np.asarray(z, dtype=float)
    return -2.0 * z * np.exp(-z * z)


@dataclass(frozen=True)
class CompositeMotherWavelet:
    base: RbfFunction = RbfFunction()
    scale: float = 1.0

    def __call__(self, x):
        return mother_eval(self, x)

    def normalized(self):
        """Copy rescaled to unit energy over one period."""
        return CompositeMotherWavelet(self.base, self.scale / mother_norm(self))


def mother_eval(w, x):
    x = np.asarray(x, dtype=float)
    # reduce to one period [-1, 1)
    y = x - 2.0 * np.floor((x + 1.0) / 2.0)
    out = np.where(y < 0, w.base(2.0 * y + 1.0), -w.base(2.0 * y - 1.0))
    out = np.where(y == 0.0, 0.0, out)
    out = np.where(y == -1.0, 0.0, out)
    return w.scale * out


def _quad_unit_pieces(func, lo, hi):
    """Integrate over [lo, hi] split at the integers, where psi jumps."""
    cuts = [lo] + list(range(math.floor(lo) + 1, math.ceil(hi))) + [hi]
    parts = []
    for a, b in zip(cuts, cuts[1:]):
        if b > a:
            val, _ = integrate.quad(func, a, b, epsabs=1e-12, epsrel=1e-12, limit=200)
            parts.append(val)
    return math.fsum(parts)


def integrate_mother(w, lo, hi):
    return _quad_unit_pieces(lambda t: float(mother_eval(w, t)), lo, hi)


def check_admissibility(w, h, k):
    """Integral of the mother wavelet over ``[2h + 1, 2k + 1]``.

    A whole number of periods is covered, so the result should vanish up to
    quadrature error.
    """
    if int(h) != h or int(k) != k:
        raise ValueError("h and k must be integers")
    if not h < k:
        raise ValueError(f"need h < k, got h={h}, k={k}")
    return integrate_mother(w, 2 * h + 1, 2 * k + 1)


def mother_norm(w):
    """Energy norm over one period, ``sqrt(int_{-1}^{1} psi(x)**2 dx)``."""
    return math.sqrt(_quad_unit_pieces(lambda t: float(mother_eval(w, t)) ** 2, -1.0, 1.0))
