"""Classical Gowers norms on the finite group ``Z_N^d``, by brute force.

All integrals are averages (Haar probability), so ``||c||_{U^k} = |c|``.
The recursion conjugates the shifted copy::

    Delta^{k+1} f(x; u) = Delta^k f(x; u') * conj(Delta^k f(x - u_{k+1}; u'))
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .spectral import check_budget, squared_moduli

DEFAULT_ORACLE_BUDGET = 2 ** 26


@dataclass(frozen=True)
class CyclicFunction:
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.complex128)
        if v.ndim == 0 or len(set(v.shape)) != 1:
            raise ValueError(f"values must be an N^d array, got shape {v.shape}")
        object.__setattr__(self, "values", v)

    @property
    def N(self):
        return self.values.shape[0]

    @property
    def d(self):
        return self.values.ndim


def _values(f):
    return f.values if isinstance(f, CyclicFunction) else np.asarray(f, dtype=np.complex128)


@dataclass(frozen=True)
class DeltaArray:
    """``Delta^k f(x; u_1..u_k)``; axes ordered ``x, u_1, ..., u_k``."""

    k: int
    d: int
    values: np.ndarray


def _budget(N, d, k, budget):
    check_budget(N ** (d * (k + 1)), DEFAULT_ORACLE_BUDGET if budget is None else budget,
                 what=f"Delta^{k} on Z_{N}^{d}")


def discrete_delta(f, k, budget=None):
    """``Delta^k f`` on ``Z_N^{d(k+1)}`` via the recursion."""
    v = _values(f)
    N, d = v.shape[0], v.ndim
    _budget(N, d, k, budget)
    D = v
    x_axes = tuple(range(d))
    for _ in range(k):
        shifted = np.empty(D.shape + (N,) * d, dtype=np.complex128)
        for u in np.ndindex(*((N,) * d)):
            # np.roll by +u gives D(x - u)
            shifted[(Ellipsis,) + u] = np.roll(D, u, axis=x_axes)
        D = D[(Ellipsis,) + (None,) * d] * np.conj(shifted)
    return DeltaArray(k, d, D)


def discrete_delta_product(f, k, budget=None):
    """``prod_{iota in {0,1}^k} C^{|iota|} f(x - iota.u)``, evaluated directly."""
    v = _values(f)
    N, d = v.shape[0], v.ndim
    _budget(N, d, k, budget)
    grids = np.indices((N,) * (d * (k + 1)), sparse=True)
    x = grids[:d]
    us = [grids[d * (m + 1): d * (m + 2)] for m in range(k)]
    out = np.ones((N,) * (d * (k + 1)), dtype=np.complex128)
    for iota in itertools.product((0, 1), repeat=k):
        idx = tuple((x[i] - sum(b * u[i] for b, u in zip(iota, us))) % N for i in range(d))
        term = v[idx]
        out = out * (np.conj(term) if sum(iota) % 2 else term)
    return DeltaArray(k, d, out)


def _real_average(values, what):
    avg = values.mean()
    scale = max(1.0, abs(avg.real))
    if abs(avg.imag) > 1e-12 * scale:
        raise ArithmeticError(f"{what}: average has imaginary part {avg.imag:.3e}")
    return max(avg.real, 0.0)


def discrete_uk_norm(f, k, budget=None):
    """``||f||_{U^k(Z_N^d)}`` as the ``2^k``-th root of the mean of ``Delta^k f``."""
    if k < 1:
        raise ValueError("k must be >= 1")
    D = discrete_delta(f, k, budget).values
    return _real_average(D, f"U^{k} average") ** (1.0 / 2 ** k)


def normalized_dft(f):
    v = _values(f)
    return np.fft.fftn(v) / v.size


def _cyclic_step(T0, T1, d, j, N):
    """Delta step on ``Z_N``: frequencies mod ``N``, circular correlation, no padding."""
    c_axes = tuple(range(d, d + j * d))
    out = np.empty((N,) * (d * (j + 2)), dtype=np.complex128)
    F0 = np.fft.fftn(T0, axes=c_axes) if j else T0
    F1c = np.conj(np.fft.fftn(T1, axes=c_axes) if j else T1)
    xi_axes = tuple(range(d))
    for w in np.ndindex(*((N,) * d)):
        rows = np.roll(F0, tuple(-s for s in w), axis=xi_axes)  # rows[xi] = F0[xi + w]
        prod = rows * F1c[w]
        if j:
            prod = np.fft.ifftn(prod, axes=c_axes)
        out[(Ellipsis,) + w] = prod
    return out


def discrete_uk_fourier(f, k, budget=None):
    """``||f||_{U^k(Z_N^d)}`` via the frequency-side Delta recursion."""
    if k < 1:
        raise ValueError("k must be >= 1")
    v = _values(f)
    N, d = v.shape[0], v.ndim
    _budget(N, d, k - 1, budget)
    T = normalized_dft(v)
    for j in range(k - 1):
        T = _cyclic_step(T, T, d, j, N)
    row = T[(0,) * d]
    return float(squared_moduli(row).sum()) ** (1.0 / 2 ** k)


def discrete_inner_product(family, k, budget=None):
    """Mean over ``Z_N^{d(k+2)}`` of ``prod_iota C^{|iota|} f_iota(x - iota.u)``.

    ``family[i]`` carries ``iota_m = (i >> (m - 1)) & 1`` for ``m = 1..k+1``.
    """
    fs = [_values(f) for f in family]
    if len(fs) != 2 ** (k + 1):
        raise ValueError(f"family of size {len(fs)} given, order {k} needs {2 ** (k + 1)}")
    N, d = fs[0].shape[0], fs[0].ndim
    if any(f.shape != fs[0].shape for f in fs):
        raise ValueError("family members must share N and d")
    _budget(N, d, k + 1, budget)
    grids = np.indices((N,) * (d * (k + 2)), sparse=True)
    x = grids[:d]
    us = [grids[d * (m + 1): d * (m + 2)] for m in range(k + 1)]
    out = np.ones((N,) * (d * (k + 2)), dtype=np.complex128)
    for i, f in enumerate(fs):
        iota = [(i >> m) & 1 for m in range(k + 1)]
        idx = tuple((x[a] - sum(b * u[a] for b, u in zip(iota, us))) % N for a in range(d))
        term = f[idx]
        out = out * (np.conj(term) if sum(iota) % 2 else term)
    return complex(out.mean())


def sample_oracle(oracle, N):
    """Point values on the ``N^d`` grid of a band-limited measure's density."""
    d = oracle.d
    if oracle.support_radius is None:
        raise ValueError("sampling needs a band-limited oracle")
    B = oracle.support_radius
    if N <= 2 * B:
        raise ValueError(f"N={N} aliases a density of band limit {B}")
    freqs = np.arange(-B, B + 1)
    grid = np.stack(np.meshgrid(*[freqs] * d, indexing="ij"), axis=-1)
    coeffs = oracle(grid)
    spec = np.zeros((N,) * d, dtype=np.complex128)
    spec[tuple(np.mod(grid, N)[..., i] for i in range(d))] = coeffs
    return np.fft.ifftn(spec) * N ** d
