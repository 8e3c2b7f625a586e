"""Delta towers and U^k norms computed entirely in frequency space.

One Delta step pairs two level-``j`` tensors into a level-``j+1`` tensor::

    out(xi; eta', eta_last) = sum_c T0(xi + eta_last; c) * conj(T1(eta_last; c - eta'))

with every sum restricted to the truncation box (out-of-box reads are zero).
Iterating the step on a measure with itself gives ``Delta^k mu``; the norm is

    ||mu||_{U^k} = (sum_c |Delta^{k-1} mu_hat(0; c)|^2) ** (1 / 2^k).
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.fft
from numpy.lib.stride_tricks import sliding_window_view

from .measures import CoeffOracle, embed_tensor
from .spectral import (
    FreqBox,
    SpectralTensor,
    _unwrap_lags,
    check_budget,
    choose_backend,
    fft_length,
    make_freq_box,
    pairwise_sum,
    plancherel_mass,
    slice_xi,
    squared_moduli,
)


def _xi_windows(arr, d, M):
    """View ``V[w, c, e]`` with ``V = arr[xi + eta_last]`` where ``w = eta_last + M``
    and ``e = xi + M``; reads outside the box are zero."""
    n = 2 * M + 1
    pad = [(M, M)] * d + [(0, 0)] * (arr.ndim - d)
    padded = np.pad(arr, pad)
    return sliding_window_view(padded, (n,) * d, axis=tuple(range(d)))


def _step_naive(T0, T1, d, j, M):
    n = 2 * M + 1
    V = _xi_windows(T0, d, M)
    conj1 = np.conj(T1)
    lead = (slice(None),) * d
    tail = (None,) * d
    if j == 0:
        return V * conj1[lead + tail]
    c_axes = tuple(range(d, d + j * d))
    out = np.empty((n,) * (d * (j + 2)), dtype=np.complex128)
    for idx in np.ndindex(*((n,) * (j * d))):
        sa, sb = [], []
        for i in idx:
            lo, hi = max(0, i - M), min(n, n + i - M)
            sa.append(slice(lo, hi))
            sb.append(slice(lo - i + M, hi - i + M))
        prod = V[lead + tuple(sa)] * conj1[lead + tuple(sb) + tail]
        out[lead + idx] = np.sum(prod, axis=c_axes)
    return out


def _step_fft(T0, T1, d, j, M):
    n = 2 * M + 1
    lead = (slice(None),) * d
    tail = (None,) * d
    if j == 0:
        return _xi_windows(T0, d, M) * np.conj(T1)[lead + tail]
    c_axes = tuple(range(d, d + j * d))
    L = [fft_length(n)] * (j * d)
    F0 = scipy.fft.fftn(T0, s=L, axes=c_axes)
    F1c = np.conj(scipy.fft.fftn(T1, s=L, axes=c_axes))
    VF = _xi_windows(F0, d, M)
    out = np.empty((n,) * (d * (j + 2)), dtype=np.complex128)
    lag_axes = tuple(range(j * d))
    for w in np.ndindex(*((n,) * d)):
        prod = VF[w] * F1c[w][(Ellipsis,) + tail]
        res = scipy.fft.ifftn(prod, axes=lag_axes)
        out[w] = _unwrap_lags(res, M, lag_axes)
    return out


def delta_step(T0: SpectralTensor, T1: SpectralTensor, backend="auto", budget=None):
    """Pair two level-``j`` tensors into the level-``j+1`` tensor of their
    intersection measure.  ``T0`` and ``T1`` may differ (family towers)."""
    if T0.box != T1.box:
        raise ValueError(f"box mismatch: {T0.box} vs {T1.box}")
    box = T0.box
    d, j, M = box.d, box.r, box.M
    out_box = box.with_r(j + 1)
    check_budget(out_box.size, budget, level=j + 1)
    row = box.n ** (j * d)
    backend = choose_backend(backend, row)
    if backend == "fft" and j > 0:
        check_budget(box.n ** d * fft_length(box.n) ** (j * d), budget,
                     what="FFT workspace", level=j + 1)
        tmp = _step_fft(T0.coeffs, T1.coeffs, d, j, M)
    else:
        tmp = _step_naive(T0.coeffs, T1.coeffs, d, j, M)
    # tmp axes are (eta_last, eta', xi); reorder to (xi, eta', eta_last)
    w_axes = list(range(d))
    s_axes = list(range(d, d + j * d))
    e_axes = list(range(d + j * d, d * (j + 2)))
    coeffs = np.ascontiguousarray(np.transpose(tmp, e_axes + s_axes + w_axes))
    return SpectralTensor(out_box, coeffs, real_measure=T0.real_measure and T1.real_measure)


@dataclass
class DeltaTower:
    """``Delta^0 mu, ..., Delta^k mu`` over a shared radius ``M``."""

    levels: list
    spec: object = None
    backend: str = "auto"

    @property
    def k_max(self):
        return len(self.levels) - 1

    @property
    def d(self):
        return self.levels[0].d

    @property
    def M(self):
        return self.levels[0].M

    @property
    def boxes(self):
        return [T.box for T in self.levels]

    def __getitem__(self, j):
        return self.levels[j]


def _level0(spec, d, M, budget):
    oracle = spec if isinstance(spec, CoeffOracle) else spec.oracle()
    if d is not None and d != oracle.d:
        raise ValueError(f"spec lives on T^{oracle.d}, not T^{d}")
    box = make_freq_box(oracle.d, 0, M, budget)
    return embed_tensor(oracle, box)


def build_tower(spec, k, M, d=None, budget=None, backend="auto"):
    """Levels ``0..k`` of the Delta tower of ``spec`` (a measure spec, oracle,
    or level-0 :class:`SpectralTensor`)."""
    if k < 0:
        raise ValueError("k must be >= 0")
    if isinstance(spec, SpectralTensor):
        T = spec
    else:
        T = _level0(spec, d, M, budget)
    levels = [T]
    for j in range(1, k + 1):
        T = delta_step(T, T, backend=backend, budget=budget)
        levels.append(T)
    return DeltaTower(levels, None if isinstance(spec, SpectralTensor) else spec, backend)


def uk_power(tower: DeltaTower, k):
    """``||mu||_{U^k}^{2^k}``, the Plancherel mass of level ``k-1``."""
    if k < 1:
        raise ValueError("U^k is defined for k >= 1")
    if k - 1 > tower.k_max:
        raise ValueError(f"level {k - 1} missing: tower built to level {tower.k_max}")
    return plancherel_mass(tower.levels[k - 1])


def uk_norm(tower: DeltaTower, k):
    """Truncated ``||mu||_{U^k}``."""
    return uk_power(tower, k) ** (1.0 / 2 ** k)


def family_delta(tensors, backend="auto", budget=None):
    """``Delta^j`` of a family of ``2^j`` level-0 tensors.

    Index ``i`` of the family holds the bit-string ``iota`` with
    ``iota_m = (i >> (m - 1)) & 1``; the top bit ``iota_j`` is the outermost
    split, so the first half is the unconjugated side.
    """
    tensors = list(tensors)
    size = len(tensors)
    if size == 0 or size & (size - 1):
        raise ValueError(f"family size must be a power of two, got {size}")
    if size == 1:
        return tensors[0]
    half = size // 2
    return delta_step(family_delta(tensors[:half], backend, budget),
                      family_delta(tensors[half:], backend, budget),
                      backend=backend, budget=budget)


def family_tensors(specs, M, d=None, budget=None):
    return [s if isinstance(s, SpectralTensor) else _level0(s, d, M, budget) for s in specs]


def inner_product(specs, k, M, d=None, backend="auto", budget=None):
    """The order-``k`` Gowers inner product of ``2^{k+1}`` measures,
    ``sum_eta Delta^k(first half)(0; eta) * conj(Delta^k(second half)(0; eta))``."""
    specs = list(specs)
    if len(specs) != 2 ** (k + 1):
        raise ValueError(f"family of size {len(specs)} given, order {k} needs {2 ** (k + 1)}")
    tensors = family_tensors(specs, M, d, budget)
    half = len(tensors) // 2
    T0 = family_delta(tensors[:half], backend, budget)
    T1 = family_delta(tensors[half:], backend, budget)
    zero = np.zeros(T0.d, dtype=int)
    return complex(pairwise_sum(slice_xi(T0, zero) * np.conj(slice_xi(T1, zero))))


# --------------------------------------------------------------------------
# tail / convergence reports

GROWING, CONVERGED, UNDETERMINED = "growing", "converged", "undetermined"


def classify(values, growth=0.01, tol=1e-6):
    """Heuristic verdict on a sequence of truncated norms.

    ``growing`` when each of the last (up to three) relative increments is at
    least ``growth``; ``converged`` when the last relative increment is at most
    ``tol``; otherwise ``undetermined``.
    """
    v = np.asarray(values, dtype=float)
    if len(v) < 2:
        return UNDETERMINED
    scale = np.maximum(np.abs(v[:-1]), np.finfo(float).tiny)
    incs = np.diff(v) / scale
    if abs(incs[-1]) <= tol:
        return CONVERGED
    if np.all(incs[-3:] >= growth):
        return GROWING
    return UNDETERMINED


@dataclass
class NormReport:
    spec: Optional[dict]
    ks: list
    schedule: list
    values: dict
    powers: dict
    verdicts: dict
    backend: str
    timing: dict = field(default_factory=dict)

    def payload(self):
        """Deterministic part of the report (no timings)."""
        return {
            "spec": self.spec,
            "schedule": list(self.schedule),
            "backend": self.backend,
            "norms": {f"U{k}": {"values": self.values[k], "power": self.powers[k],
                                "verdict": self.verdicts[k]} for k in self.ks},
        }

    def to_json(self):
        return {"report": self.payload(), "timing": self.timing}


def tail_report(spec, k, schedule, growth=0.01, tol=1e-6, backend="auto", budget=None):
    """U^1..U^k of ``spec`` along an increasing schedule of truncation radii."""
    schedule = [int(m) for m in schedule]
    if not schedule or any(b <= a for a, b in zip(schedule, schedule[1:])):
        raise ValueError(f"schedule must be non-empty and strictly increasing: {schedule}")
    if k < 1:
        raise ValueError("k must be >= 1")
    ks = list(range(1, k + 1))
    values = {j: [] for j in ks}
    seconds = []
    for M in schedule:
        t0 = time.perf_counter()
        tower = build_tower(spec, k - 1, M, budget=budget, backend=backend)
        for j in ks:
            values[j].append(uk_norm(tower, j))
        seconds.append(time.perf_counter() - t0)
    verdicts = {j: classify(values[j], growth, tol) for j in ks}
    spec_json = spec.to_json() if hasattr(spec, "to_json") else None
    return NormReport(spec_json, ks, schedule, values, {j: 2 ** j for j in ks}, verdicts,
                      backend, {"seconds_per_M": seconds})
