"""Biorthogonal two-channel filter banks and wavelet transforms.

Two multi-level transforms are provided:

* :func:`decompose_decimated` / :func:`reconstruct` -- the Mallat cascade,
  perfectly invertible under symmetric or periodic extension.
* :func:`decompose_undecimated` -- the stationary ("a trous") transform,
  which keeps one coefficient per level and per time step, giving the
  ``N x (M+1)`` matrix ``[d1 ... dM, aM]`` used as network input.

Convolution follows ``y[n] = sum_k h[k] x[n - k]``.  The decimated transform
keeps the samples ``y[2i + L/2]`` (``L`` the common filter length), which for
the symmetric filters shipped here centres coefficient ``i`` on the sample
pair ``(2i, 2i + 1)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

POLICIES = ("symmetric", "periodic", "zero")

_SQRT2 = math.sqrt(2.0)

# bior3.7 taps as exact rationals; every tap is scaled by sqrt(2).
_BIOR37_DEC_LO = np.array([35, -105, -195, 865, 363, -3489, -307, 11025,
                           11025, -307, -3489, 363, 865, -195, -105, 35]) / 16384.0
_BIOR37_REC_LO = np.array([0, 0, 0, 0, 0, 0, 1, 3, 3, 1, 0, 0, 0, 0, 0, 0]) / 8.0


class FilterBank:
    """Analysis/synthesis FIR quadruple plus a boundary-extension policy.

    All four filters are zero-padded to a common even length ``L``.
    """

    def __init__(self, analysis_lowpass, analysis_highpass, synthesis_lowpass,
                 synthesis_highpass, extension_policy="symmetric", name=None):
        taps = [np.asarray(f, dtype=float).ravel() for f in
                (analysis_lowpass, analysis_highpass, synthesis_lowpass, synthesis_highpass)]
        if any(t.size == 0 for t in taps):
            raise ValueError("filters must be non-empty")
        if extension_policy not in POLICIES:
            raise ValueError(f"extension_policy must be one of {POLICIES}")
        length = max(t.size for t in taps)
        length += length % 2
        padded = []
        for t in taps:
            pad = length - t.size
            padded.append(np.pad(t, (pad // 2, pad - pad // 2)))
        self.dec_lo, self.dec_hi, self.rec_lo, self.rec_hi = padded
        self.extension_policy = extension_policy
        self.name = name

    @property
    def length(self):
        return self.dec_lo.size

    @property
    def phase(self):
        return self.length // 2

    def with_policy(self, policy):
        return FilterBank(self.dec_lo, self.dec_hi, self.rec_lo, self.rec_hi, policy, self.name)

    def symmetry_signs(self):
        """Sign of the half-sample symmetry of the analysis filters.

        Returns ``(+1, -1)`` for a symmetric lowpass and antisymmetric highpass,
        which is what the non-expansive symmetric extension relies on.
        """
        signs = []
        for h in (self.dec_lo, self.dec_hi):
            if np.allclose(h, h[::-1], atol=1e-15):
                signs.append(1)
            elif np.allclose(h, -h[::-1], atol=1e-15):
                signs.append(-1)
            else:
                signs.append(0)
        return tuple(signs)

    def __repr__(self):
        label = self.name or "custom"
        return f"FilterBank({label!r}, L={self.length}, policy={self.extension_policy!r})"


def haar(extension_policy="symmetric"):
    s = 1 / _SQRT2
    return FilterBank([s, s], [s, -s], [s, s], [-s, s], extension_policy, name="haar")


def bior37(extension_policy="symmetric"):
    """Biorthogonal 3.7 bank (7 vanishing moments on the analysis side)."""
    dec_lo = _SQRT2 * _BIOR37_DEC_LO
    rec_lo = _SQRT2 * _BIOR37_REC_LO
    alt = (-1.0) ** np.arange(16)
    # quadrature mirror relations: g~[n] = (-1)^(n+1) h[L-1-n], g[n] = (-1)^n h~[L-1-n]
    dec_hi = -alt * rec_lo[::-1]
    rec_hi = alt * dec_lo[::-1]
    return FilterBank(dec_lo, dec_hi, rec_lo, rec_hi, extension_policy, name="bior3.7")


WAVELETS = {"haar": haar, "bior3.7": bior37}


def get_bank(name, extension_policy="symmetric"):
    try:
        return WAVELETS[name](extension_policy)
    except KeyError:
        raise ValueError(f"unknown wavelet {name!r}; choose from {sorted(WAVELETS)}") from None


def extension_indices(idx, n, policy):
    """Map arbitrary integer positions onto ``range(n)`` under an extension.

    For ``policy="zero"`` positions outside the signal map to ``-1``.
    Symmetric extension is half-sample: ``x[-1] = x[0]``, ``x[n] = x[n - 1]``.
    """
    idx = np.asarray(idx)
    if policy == "periodic":
        return np.mod(idx, n)
    if policy == "symmetric":
        m = np.mod(idx, 2 * n)
        return np.where(m < n, m, 2 * n - 1 - m)
    if policy == "zero":
        return np.where((idx >= 0) & (idx < n), idx, -1)
    raise ValueError(f"unknown extension policy {policy!r}")


def _gather(x, idx, policy):
    j = extension_indices(idx, x.size, policy)
    if policy == "zero":
        return np.where(j >= 0, x[np.maximum(j, 0)], 0.0)
    return x[j]


def _filter(x, taps, positions, policy, dilation=1):
    """``y[p] = sum_k taps[k] * x_ext[p - k*dilation]`` at the given positions.

    Taps are accumulated one at a time in index order so results do not depend
    on BLAS reduction order.
    """
    y = np.zeros(positions.size)
    for k, t in enumerate(taps):
        if t != 0.0:
            y += t * _gather(x, positions - k * dilation, policy)
    return y


def _prepare(signal, bank):
    """Signal actually transformed: odd lengths are padded (repeat last sample)
    for symmetric/periodic, zero padding is made explicit for ``zero``."""
    x = np.asarray(signal, dtype=float).ravel()
    policy = bank.extension_policy
    if policy == "zero":
        pad = bank.length - 1
        right = pad + (x.size + 2 * pad) % 2
        return np.concatenate([np.zeros(pad), x, np.zeros(right)]), "periodic"
    if x.size % 2:
        x = np.append(x, x[-1])
    if policy == "symmetric" and bank.symmetry_signs() != (1, -1):
        raise ValueError("symmetric extension needs a symmetric lowpass and antisymmetric highpass")
    return x, policy


def analysis_step(signal, bank):
    """One level of the decimated filter bank.

    Parameters
    ----------
    signal : array_like
        Input samples, at least ``bank.length`` long.
    bank : FilterBank

    Returns
    -------
    approx, detail : ndarray
        Both of length ``ceil(N/2)`` under symmetric or periodic extension, and
        ``ceil(N/2) + L - 1`` under zero extension.
    """
    x0 = np.asarray(signal, dtype=float).ravel()
    if x0.size < bank.length:
        raise ValueError(f"signal of length {x0.size} is shorter than the filter; "
                         f"need at least {bank.length} samples")
    x, policy = _prepare(x0, bank)
    positions = 2 * np.arange(x.size // 2) + bank.phase
    return (_filter(x, bank.dec_lo, positions, policy),
            _filter(x, bank.dec_hi, positions, policy))


def _periodic_synthesis(approx, detail, bank):
    """Inverse of the periodic analysis on a length ``2*len(approx)`` signal."""
    n = 2 * approx.size
    lag = bank.length - 1
    out = np.zeros(n)
    up_a = np.zeros(n)
    up_d = np.zeros(n)
    up_a[bank.phase % 2::2] = np.roll(approx, bank.phase // 2)
    up_d[bank.phase % 2::2] = np.roll(detail, bank.phase // 2)
    positions = np.arange(n) + lag
    out += _filter(up_a, bank.rec_lo, positions, "periodic")
    out += _filter(up_d, bank.rec_hi, positions, "periodic")
    return out


def synthesis_step(approx, detail, bank, length=None):
    """Invert :func:`analysis_step`.

    ``length`` is the length of the original signal; it defaults to
    ``2 * len(approx)`` (resp. the matching length for zero extension).
    """
    a = np.asarray(approx, dtype=float).ravel()
    d = np.asarray(detail, dtype=float).ravel()
    if a.size != d.size:
        raise ValueError(f"approx and detail lengths differ ({a.size} vs {d.size})")
    policy = bank.extension_policy
    if policy == "zero":
        pad = bank.length - 1
        full = 2 * a.size
        if length is None:
            length = full - 2 * pad
        if length < 1 or full != length + 2 * pad + (length + 2 * pad) % 2:
            raise ValueError(f"coefficient length {a.size} does not match a signal of length {length}")
        return _periodic_synthesis(a, d, bank)[pad:pad + length]
    if length is None:
        length = 2 * a.size
    if length not in (2 * a.size, 2 * a.size - 1):
        raise ValueError(f"coefficient length {a.size} does not match a signal of length {length}")
    if policy == "periodic":
        return _periodic_synthesis(a, d, bank)[:length]
    # Symmetric: the half-sample symmetric extension of the signal has period
    # 2N and its subband coefficients are symmetric (lowpass) / antisymmetric
    # (highpass) in that period, so the kept half determines the other half.
    lo_sign, hi_sign = bank.symmetry_signs()
    a_full = np.concatenate([a, lo_sign * a[::-1]])
    d_full = np.concatenate([d, hi_sign * d[::-1]])
    return _periodic_synthesis(a_full, d_full, bank)[:length]


@dataclass
class DecimatedPyramid:
    details: list
    approx: np.ndarray
    lengths: list = field(default_factory=list)  # input length at each level

    @property
    def levels(self):
        return len(self.details)


def _check_levels(levels):
    if int(levels) != levels or levels < 1:
        raise ValueError(f"levels must be a positive integer, got {levels}")


def decompose_decimated(series, levels, bank):
    """Mallat cascade of :func:`analysis_step` on successive approximations."""
    _check_levels(levels)
    a = np.asarray(getattr(series, "values", series), dtype=float).ravel()
    details, lengths = [], []
    for level in range(1, levels + 1):
        if a.size < bank.length:
            raise ValueError(f"level {level} input has {a.size} samples, fewer than the "
                             f"filter length {bank.length}; use fewer levels")
        lengths.append(a.size)
        a, d = analysis_step(a, bank)
        details.append(d)
    return DecimatedPyramid(details, a, lengths)


def reconstruct(pyramid, bank):
    a = pyramid.approx
    for d, n in zip(reversed(pyramid.details), reversed(pyramid.lengths)):
        a = synthesis_step(a, d, bank, length=n)
    return a


@dataclass
class WaveletCoeffs:
    """Per-time-step coefficient matrix; row ``t`` is ``[d1(t) ... dM(t), aM(t)]``."""

    levels: int
    matrix: np.ndarray

    def __post_init__(self):
        self.matrix = np.asarray(self.matrix, dtype=float)
        if self.matrix.ndim != 2 or self.matrix.shape[1] != self.levels + 1:
            raise ValueError(f"matrix must have {self.levels + 1} columns")

    @property
    def source_length(self):
        return self.matrix.shape[0]

    @property
    def details(self):
        return self.matrix[:, :-1]

    @property
    def approx(self):
        return self.matrix[:, -1]

    def header(self):
        return [f"d{i}" for i in range(1, self.levels + 1)] + [f"a{self.levels}"]

    def to_csv(self, path):
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(",".join(self.header()) + "\n")
            for row in self.matrix:
                fh.write(",".join(repr(float(v)) for v in row) + "\n")

    @classmethod
    def from_csv(cls, path):
        with open(path, encoding="utf-8") as fh:
            header = fh.readline().strip().split(",")
            rows = [[float(v) for v in line.split(",")] for line in fh if line.strip()]
        return cls(len(header) - 1, np.array(rows).reshape(-1, len(header)))


def causal_support(bank, levels):
    """Number of leading rows of a causal undecimated transform that touch the
    left boundary extension."""
    return (bank.length - 1) * (2 ** levels - 1)


def decompose_undecimated(series, levels, bank, causal=False):
    """Stationary wavelet transform, one row per time step.

    At level ``i`` the filters are dilated by ``2**(i-1)`` (holes inserted
    between taps) and nothing is downsampled.

    Parameters
    ----------
    series : TimeSeries or array_like
    levels : int
        Number of detail levels ``M``.
    bank : FilterBank
    causal : bool
        If True, ``y[t] = sum_k h[k] x[t - k*2**(i-1)]`` so row ``t`` only uses
        samples up to ``t`` (apart from the first :func:`causal_support` rows,
        which see the left boundary extension).  Otherwise filters are centred,
        which is what one wants for plotting.

    Returns
    -------
    WaveletCoeffs
    """
    _check_levels(levels)
    x = np.asarray(getattr(series, "values", series), dtype=float).ravel()
    need = 2 ** levels * bank.length
    if x.size < need:
        raise ValueError(f"series of length {x.size} is too short for {levels} levels; "
                         f"need at least {need} samples")
    policy = bank.extension_policy
    n = np.arange(x.size)
    cols = []
    a = x
    for level in range(1, levels + 1):
        dil = 2 ** (level - 1)
        pos = n if causal else n + bank.phase * dil
        d = _filter(a, bank.dec_hi, pos, policy, dil)
        a = _filter(a, bank.dec_lo, pos, policy, dil)
        cols.append(d)
    cols.append(a)
    return WaveletCoeffs(levels, np.column_stack(cols))


@dataclass(frozen=True)
class BiorthogonalityReport:
    max_pr_residual: float
    lowpass_sum_dev: float
    highpass_sum_dev: float

    def ok(self, tol=1e-8):
        return max(self.max_pr_residual, self.lowpass_sum_dev, self.highpass_sum_dev) < tol


def verify_biorthogonality(bank, trials=100, length=256, seed=0):
    """Numerically check perfect reconstruction and the discrete zero-mean
    condition of a bank.

    ``lowpass_sum_dev`` is ``|sum(dec_lo) - sqrt(2)|`` and ``highpass_sum_dev``
    is ``|sum(dec_hi)|``.
    """
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(trials):
        x = rng.standard_normal(length)
        a, d = analysis_step(x, bank)
        worst = max(worst, float(np.max(np.abs(synthesis_step(a, d, bank, len(x)) - x))))
    return BiorthogonalityReport(worst,
                                 abs(float(np.sum(bank.dec_lo)) - _SQRT2),
                                 abs(float(np.sum(bank.dec_hi))))
