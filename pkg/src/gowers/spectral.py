"""Truncated frequency lattices and the correlation kernel behind every Delta step.

A :class:`SpectralTensor` stores Fourier coefficients ``T(xi; eta_1, ..., eta_r)``
for ``xi`` and every ``eta_j`` in ``{-M..M}^d``.  The array layout is plain
row-major numpy with ``d * (r + 1)`` axes of length ``2M + 1``: the ``xi``
block comes first (slowest) and ``eta_r`` last (fastest).  Coordinate ``c``
lives at array offset ``c + M`` along its axis.

Everything outside the box is treated as exactly zero.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np
import scipy.fft

DEFAULT_BUDGET = 2 ** 26
BUDGET_ENV = "GM_BUDGET_ELEMENTS"


class BudgetExceeded(MemoryError):
    """Raised when an array would exceed the element budget."""

    def __init__(self, required, allowed, what="tensor", level=None):
        self.required = int(required)
        self.allowed = int(allowed)
        self.level = level
        where = f" at level {level}" if level is not None else ""
        super().__init__(
            f"{what}{where} needs {self.required} elements, budget allows {self.allowed}"
        )


def resolve_budget(budget=None):
    """Explicit argument, then ``$GM_BUDGET_ELEMENTS``, then the default."""
    if budget is not None:
        budget = int(budget)
    else:
        env = os.environ.get(BUDGET_ENV)
        budget = int(env) if env else DEFAULT_BUDGET
    if budget <= 0:
        raise ValueError(f"element budget must be positive, got {budget}")
    return budget


def check_budget(required, budget=None, what="tensor", level=None):
    allowed = resolve_budget(budget)
    if required > allowed:
        raise BudgetExceeded(required, allowed, what=what, level=level)


@dataclass(frozen=True)
class FreqBox:
    """The index set ``{-M..M}^d x ({-M..M}^d)^r``."""

    d: int
    r: int
    M: int

    def __post_init__(self):
        for name in ("d", "r", "M"):
            if not isinstance(getattr(self, name), (int, np.integer)):
                raise TypeError(f"{name} must be an integer")
        if self.d < 1 or self.r < 0 or self.M < 0:
            raise ValueError(f"invalid box d={self.d} r={self.r} M={self.M}")

    @property
    def n(self):
        """Points per axis."""
        return 2 * self.M + 1

    @property
    def ndim(self):
        return self.d * (self.r + 1)

    @property
    def shape(self):
        return (self.n,) * self.ndim

    @property
    def eta_shape(self):
        return (self.n,) * (self.d * self.r)

    @property
    def size(self):
        return self.n ** self.ndim

    def with_r(self, r):
        return FreqBox(self.d, r, self.M)

    def contains(self, point):
        point = np.asarray(point)
        return bool(np.all(np.abs(point) <= self.M))

    def frequencies(self):
        """The 1-D coordinate range ``-M..M``."""
        return np.arange(-self.M, self.M + 1)


def make_freq_box(d, r, M, budget=None):
    box = FreqBox(int(d), int(r), int(M))
    check_budget(box.size, budget, what=f"FreqBox(d={d}, r={r}, M={M})")
    return box


class IndexLayout:
    """Bijection between lattice points ``(xi; eta_1..eta_r)`` and flat offsets.

    ``xi`` is the slowest block, ``eta_r`` the fastest, row-major inside a block.
    """

    def __init__(self, box: FreqBox):
        self.box = box

    def offset(self, xi, etas=()):
        coords = np.concatenate([np.atleast_1d(xi)] + [np.atleast_1d(e) for e in etas])
        if coords.shape != (self.box.ndim,):
            raise ValueError(f"expected {self.box.ndim} coordinates, got {coords.shape}")
        if not self.box.contains(coords):
            raise IndexError(f"point {coords.tolist()} outside box M={self.box.M}")
        return int(np.ravel_multi_index(tuple(coords + self.box.M), self.box.shape))

    def point(self, offset):
        """Inverse of :meth:`offset`; returns ``(xi, [eta_1, ..., eta_r])``."""
        if not 0 <= offset < self.box.size:
            raise IndexError(f"offset {offset} outside 0..{self.box.size - 1}")
        coords = np.array(np.unravel_index(offset, self.box.shape)) - self.box.M
        d = self.box.d
        return coords[:d], [coords[d * (j + 1): d * (j + 2)] for j in range(self.box.r)]


@dataclass(frozen=True)
class SpectralTensor:
    """Fourier coefficients of a measure on ``T^d x T^{dr}`` over a :class:`FreqBox`.

    ``real_measure`` marks tensors derived from real (signed) measures, for
    which ``T(-xi; -eta) == conj(T(xi; eta))``.
    """

    box: FreqBox
    coeffs: np.ndarray
    real_measure: bool = False
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        arr = np.array(self.coeffs, dtype=np.complex128)
        if arr.size != self.box.size:
            raise ValueError(f"{arr.size} coefficients for a box of {self.box.size} points")
        arr = arr.reshape(self.box.shape)
        arr.flags.writeable = False
        object.__setattr__(self, "coeffs", arr)

    @property
    def d(self):
        return self.box.d

    @property
    def r(self):
        return self.box.r

    @property
    def M(self):
        return self.box.M

    def at(self, xi, etas=()):
        off = IndexLayout(self.box).offset(xi, etas)
        return complex(self.coeffs.reshape(-1)[off])

    @property
    def origin(self):
        """The coefficient at ``(0; 0, ..., 0)``, i.e. the total mass."""
        return complex(self.coeffs[(self.M,) * self.box.ndim])

    def hermitian_defect(self):
        """``max |T(-p) - conj T(p)|`` over the box."""
        flipped = self.coeffs[(slice(None, None, -1),) * self.box.ndim]
        return float(np.max(np.abs(flipped - np.conj(self.coeffs))))


def _xi_index(box, xi):
    xi = np.atleast_1d(np.asarray(xi, dtype=int))
    if xi.shape != (box.d,):
        raise ValueError(f"xi must have {box.d} components")
    if not box.contains(xi):
        raise IndexError(f"xi={xi.tolist()} outside box M={box.M}")
    return tuple(xi + box.M)


def slice_xi(T: SpectralTensor, xi):
    """The read-only eta-row ``T(xi; .)`` as an array of shape ``box.eta_shape``."""
    return T.coeffs[_xi_index(T.box, xi)]


def squared_moduli(z):
    z = np.asarray(z)
    return z.real * z.real + z.imag * z.imag


def pairwise_sum(values):
    """Sum in a fixed pairwise order.

    numpy's ``add.reduce`` over a contiguous 1-D buffer uses blocked pairwise
    summation, so flattening first makes the order depend only on the length.
    """
    flat = np.ascontiguousarray(values).reshape(-1)
    return flat.sum()


def plancherel_mass(T: SpectralTensor):
    """``sum_eta |T(0; eta)|^2``: the truncated self-pairing of the measure."""
    row = slice_xi(T, np.zeros(T.d, dtype=int))
    return float(pairwise_sum(squared_moduli(row)))


def _check_vectors(a, b, box):
    a = np.asarray(a, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    shape = box.eta_shape
    if a.size != box.n ** len(shape) or b.size != a.size:
        raise ValueError(f"vectors of size {a.size}, {b.size} do not match box eta size")
    return a.reshape(shape), b.reshape(shape)


def fft_length(n):
    """Padded transform length per axis: at least ``2n - 1`` so nothing wraps."""
    return scipy.fft.next_fast_len(2 * n - 1)


def _shift_slices(shift, n):
    """Overlap of ``c`` and ``c - shift`` inside ``0..n-1`` along one axis."""
    lo, hi = max(0, shift), min(n, n + shift)
    return slice(lo, hi), slice(lo - shift, hi - shift)


def _cross_correlate_naive(a, b, M):
    n = 2 * M + 1
    out = np.zeros(a.shape, dtype=np.complex128)
    bc = np.conj(b)
    for idx in np.ndindex(*a.shape):
        shift = [i - M for i in idx]
        sa, sb = zip(*(_shift_slices(s, n) for s in shift))
        out[idx] = pairwise_sum(a[sa] * bc[sb])
    return out


def _unwrap_lags(res, M, axes):
    """Pick lags ``-M..M`` out of a circular correlation along ``axes``."""
    n = 2 * M + 1
    for ax in axes:
        res = np.roll(res, M, axis=ax)
        res = np.take(res, np.arange(n), axis=ax)
    return res


def _cross_correlate_fft(a, b, M):
    n = 2 * M + 1
    axes = tuple(range(a.ndim))
    L = [fft_length(n)] * a.ndim
    fa = scipy.fft.fftn(a, s=L, axes=axes)
    fb = scipy.fft.fftn(b, s=L, axes=axes)
    res = scipy.fft.ifftn(fa * np.conj(fb), axes=axes)
    return _unwrap_lags(res, M, axes)


BACKENDS = ("naive", "fft", "auto")


def choose_backend(backend, row_size):
    if backend not in BACKENDS:
        raise ValueError(f"unknown backend {backend!r}; expected one of {BACKENDS}")
    if backend == "auto":
        return "fft" if row_size > 64 else "naive"
    return backend


def cross_correlate(a, b, box: FreqBox, backend="auto"):
    """Truncated cross-correlation over the eta-lattice of ``box``.

    Returns ``out(s) = sum_c a(c) * conj(b(c - s))`` for ``s`` in the eta box,
    where only ``c`` and ``c - s`` inside the box contribute.

    The FFT path zero-pads every axis to ``fft_length(2M + 1)`` so the
    correlation is linear, never circular.
    """
    a, b = _check_vectors(a, b, box)
    if a.ndim == 0:
        return a * np.conj(b)
    backend = choose_backend(backend, a.size)
    if backend == "naive":
        return _cross_correlate_naive(a, b, box.M)
    return _cross_correlate_fft(a, b, box.M)
