"""Approximate identities and the composite mollifiers ``phi^[n]``.

For kernels ``phi^0, ..., phi^n`` on ``T^d`` the composite kernel on
``T^d x T^{dn}`` is

    phi^[n](t) = int phi^0(t_0 + sum_j c_j) prod_j phi^j(-c_j) phi^j(-t_j - c_j) dc

and its Fourier transform factorises as

    phi^[n]^(xi; eta) = phi^0^(xi) * prod_j phi^j^(-eta_j) * phi^j^(xi + eta_j).

Mollifiers act on :class:`SpectralTensor` objects by pointwise multiplication
with the product of the 1-D profile over every lattice coordinate.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .spectral import SpectralTensor, pairwise_sum, slice_xi


@dataclass(frozen=True)
class Mollifier:
    """A kernel on ``T^d`` described by its 1-D Fourier profile.

    ``kind`` is ``"fejer"``, ``"dirichlet"`` or ``"custom"``; a custom kernel
    carries ``table``, its coefficients at ``-K..K`` (zero beyond).
    Multivariate coefficients are products of the profile over coordinates.
    """

    kind: str
    M: int
    table: Optional[tuple] = None

    def __post_init__(self):
        if self.kind not in ("fejer", "dirichlet", "custom"):
            raise ValueError(f"unknown mollifier kind {self.kind!r}")
        if self.M < 0:
            raise ValueError("radius must be >= 0")
        if self.kind == "custom":
            t = np.asarray(self.table, dtype=np.complex128)
            if t.ndim != 1 or len(t) != 2 * self.M + 1:
                raise ValueError("custom table must have 2M+1 entries")
            if abs(t[self.M] - 1) > 1e-12:
                raise ValueError("mollifier must have unit mass (coefficient 1 at 0)")
            object.__setattr__(self, "table", tuple(t.tolist()))

    def profile(self, k):
        k = np.asarray(k)
        if self.kind == "fejer":
            return np.maximum(0.0, 1.0 - np.abs(k) / (self.M + 1.0))
        if self.kind == "dirichlet":
            return (np.abs(k) <= self.M).astype(float)
        t = np.asarray(self.table)
        inside = np.abs(k) <= self.M
        return np.where(inside, t[np.clip(k + self.M, 0, 2 * self.M)], 0)

    def hat(self, xi):
        """Coefficient at a frequency (scalar, or trailing axis of coordinates)."""
        xi = np.asarray(xi)
        if xi.ndim == 0:
            return self.profile(xi)[()]
        return np.prod(self.profile(xi), axis=-1)

    def kernel(self, x):
        """Physical-space values ``sum_k phi^(k) exp(2 pi i k x)`` on ``T^1``."""
        ks = np.arange(-self.M, self.M + 1)
        x = np.asarray(x, dtype=float)
        vals = np.exp(2j * np.pi * np.multiply.outer(x, ks)) @ self.profile(ks)
        return vals.real if self.kind != "custom" else vals

    @property
    def is_positive(self):
        return self.kind == "fejer"


def fejer_kernel(M):
    return Mollifier("fejer", int(M))


def dirichlet_kernel(M):
    return Mollifier("dirichlet", int(M))


def custom_kernel(table):
    t = tuple(table)
    if len(t) % 2 != 1:
        raise ValueError("table length must be odd")
    return Mollifier("custom", (len(t) - 1) // 2, t)


@dataclass(frozen=True)
class PhiBracket:
    """The kernels ``phi^0, ..., phi^n`` defining ``phi^[n]``."""

    kernels: tuple

    def __post_init__(self):
        if not self.kernels:
            raise ValueError("phi bracket needs at least phi^0")
        object.__setattr__(self, "kernels", tuple(self.kernels))

    @property
    def n(self):
        return len(self.kernels) - 1


def phi_bracket_transform(pb: PhiBracket, xi, etas=()):
    etas = list(etas)
    if len(etas) != pb.n:
        raise ValueError(f"phi^[{pb.n}] takes {pb.n} eta blocks, got {len(etas)}")
    xi = np.asarray(xi)
    out = pb.kernels[0].hat(xi)
    for phi, eta in zip(pb.kernels[1:], etas):
        eta = np.asarray(eta)
        out = out * phi.hat(-eta) * phi.hat(xi + eta)
    return complex(out)


def phi_bracket_quadrature(pb: PhiBracket, xi, etas=(), grid=128):
    """``phi^[n]^(xi; eta)`` by Riemann sums of the defining integral on ``T^1``.

    Exact up to rounding for trigonometric-polynomial kernels whose degree is
    small against ``grid``.  Cost is ``grid^(2n+1)``.
    """
    n = pb.n
    etas = [int(np.squeeze(e)) for e in etas]
    if len(etas) != n:
        raise ValueError(f"phi^[{n}] takes {n} eta blocks, got {len(etas)}")
    if grid ** (2 * n + 1) > 2 ** 25:
        raise ValueError("quadrature grid too large for this n")
    xs = np.arange(grid) / grid
    tabs = [phi.kernel(xs) for phi in pb.kernels]
    # axes: t_0, t_1..t_n, c_1..c_n   (integer grid indices, arithmetic mod grid)
    ix = np.indices((grid,) * (2 * n + 1), sparse=True)
    t0, ts, cs = ix[0], ix[1:n + 1], ix[n + 1:]
    vals = tabs[0][(t0 + sum(cs)) % grid]
    for j in range(n):
        vals = vals * tabs[j + 1][(-cs[j]) % grid] * tabs[j + 1][(-ts[j] - cs[j]) % grid]
    bracket = vals.mean(axis=tuple(range(n + 1, 2 * n + 1))) if n else vals
    phase = int(np.squeeze(xi)) * xs
    e = np.exp(-2j * np.pi * phase)
    for j in range(n):
        e = np.multiply.outer(e, np.exp(-2j * np.pi * etas[j] * xs))
    return complex((bracket * e).mean())


def box_weights(moll: Mollifier, box):
    """``phi^(xi; eta)`` over a whole box: the profile multiplied over every axis."""
    prof = moll.profile(box.frequencies()).astype(np.complex128)
    out = np.ones((), dtype=np.complex128)
    for _ in range(box.ndim):
        out = np.multiply.outer(out, prof)
    return out


def convolve_spec(moll: Mollifier, T: SpectralTensor):
    """``phi * nu`` in frequency space."""
    return SpectralTensor(T.box, box_weights(moll, T.box) * T.coeffs,
                          real_measure=T.real_measure and moll.kind != "custom")


def mollified_pairing(T0: SpectralTensor, T1: SpectralTensor, moll: Mollifier):
    """Pre-limit pairing ``sum_eta phi^(0; eta) T0(0; eta) conj(T1(0; eta))``."""
    if T0.box != T1.box:
        raise ValueError(f"box mismatch: {T0.box} vs {T1.box}")
    zero = np.zeros(T0.d, dtype=int)
    w = box_weights(moll, T0.box.with_r(T0.r - 1)) if T0.r else np.ones(())
    return complex(pairwise_sum(w * slice_xi(T0, zero) * np.conj(slice_xi(T1, zero))))


# --------------------------------------------------------------------------
# kernels on the cyclic group Z_N (tables of point values, mean 1 = unit mass)


def cyclic_convolve(phi, f):
    """``(phi * f)(x) = mean_y phi(y) f(x - y)`` on ``Z_N^d``, along the leading
    ``phi.ndim`` axes of ``f``."""
    phi = np.asarray(phi)
    axes = tuple(range(phi.ndim))
    F = np.fft.fftn(f, axes=axes)
    P = np.fft.fftn(phi)
    P = P.reshape(P.shape + (1,) * (np.ndim(f) - phi.ndim))
    out = np.fft.ifftn(F * P, axes=axes) / phi.size
    if np.isrealobj(f) and np.isrealobj(phi):
        out = out.real
    return out


def cyclic_bracket(tables):
    """``phi^[n]`` on ``Z_N^{n+1}`` from 1-D tables ``phi^0..phi^n``.

    Built with the recursion
    ``phi^[m+1](t) = mean_c phi^{m+1}(-t_{m+1} - c) phi^{m+1}(-c) phi^[m](t_0 + c; t_1..t_m)``.
    """
    tables = [np.asarray(t, dtype=float) for t in tables]
    N = len(tables[0])
    out = tables[0]
    for phi in tables[1:]:
        new = np.zeros(out.shape + (N,))
        neg = phi[(-np.arange(N)) % N]  # neg[c] = phi(-c)
        for c in range(N):
            shifted = np.roll(out, -c, axis=0)  # shifted[t0] = out[t0 + c]
            # phi(-t_{m+1} - c) as a function of t_{m+1}
            row = phi[(-np.arange(N) - c) % N]
            new += neg[c] * np.multiply.outer(shifted, row)
        out = new / N
    return out
