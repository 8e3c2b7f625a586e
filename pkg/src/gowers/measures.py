"""Finite measures on the torus ``T^d`` with exact Fourier-coefficient oracles.

Transform convention: ``mu_hat(xi) = integral of exp(-2 pi i xi.x) dmu(x)``,
with Haar measure normalised to total mass one.

Five spec variants are supported:

* :class:`Atomic`      -- finitely many weighted point masses.
* :class:`GridDensity` -- a density sampled on the uniform ``N^d`` grid,
  read as its trigonometric interpolant (so it is band-limited).
* :class:`SelfSimilar` -- the depth-``J`` stage of a self-similar (Cantor-type)
  measure, i.e. ``|D|^J`` equally weighted atoms.
* :class:`Scaled`, :class:`Sum` -- linear combinators.

Every spec round-trips through a small JSON schema, see :func:`spec_from_json`.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional

import numpy as np

from .spectral import FreqBox, SpectralTensor


class SpecError(ValueError):
    """Malformed or unsupported measure spec."""


def as_points(xi, d):
    """Coerce frequencies to an integer array with trailing axis ``d``."""
    arr = np.asarray(xi)
    if not np.issubdtype(arr.dtype, np.integer):
        if not np.all(np.equal(np.mod(arr, 1), 0)):
            raise ValueError("frequencies must be integers")
        arr = arr.astype(np.int64)
    if d == 1 and (arr.ndim == 0 or arr.shape[-1] != 1):
        arr = arr[..., None]
    if arr.shape[-1] != d:
        raise ValueError(f"frequency points must have {d} components, got shape {arr.shape}")
    return arr.astype(np.int64)


class CoeffOracle:
    """Callable ``xi -> mu_hat(xi)``, vectorised over leading axes.

    ``band_limit`` is set when coefficients vanish for ``max|xi_i| > band_limit``.
    ``real`` records that the underlying measure is real, so the oracle is
    conjugate-symmetric.
    """

    def __init__(self, func: Callable, d: int, band_limit: Optional[int] = None,
                 real: bool = False, support_radius: Optional[int] = None):
        self._func = func
        self.d = d
        self.band_limit = band_limit
        self.real = real
        # tightest known radius containing the support; may beat band_limit
        self.support_radius = band_limit if support_radius is None else support_radius

    def __call__(self, xi):
        pts = as_points(xi, self.d)
        return np.asarray(self._func(pts), dtype=np.complex128)

    def at(self, xi):
        return complex(self(np.asarray(xi).reshape(1, -1) if self.d > 1 else [xi])[0])

    @property
    def total_mass(self):
        return complex(self(np.zeros((1, self.d), dtype=np.int64))[0])

    def __add__(self, other):
        if other.d != self.d:
            raise ValueError("dimension mismatch")
        return CoeffOracle(lambda p: self._func(p) + other._func(p), self.d,
                           _max_or_none(self.band_limit, other.band_limit),
                           self.real and other.real,
                           _max_or_none(self.support_radius, other.support_radius))

    def scaled(self, c):
        c = complex(c)
        return CoeffOracle(lambda p: c * self._func(p), self.d, self.band_limit,
                           self.real and c.imag == 0, self.support_radius)


def _max_or_none(a, b):
    return None if a is None or b is None else max(a, b)


def _parse_scalar(v, field):
    """Number, decimal/fraction string, or ``[re, im]`` pair."""
    try:
        if isinstance(v, (list, tuple)):
            if len(v) != 2:
                raise SpecError(f"{field}: complex values are [re, im] pairs")
            return complex(_parse_scalar(v[0], field).real, _parse_scalar(v[1], field).real)
        if isinstance(v, str):
            return complex(float(Fraction(v.strip())))
        if isinstance(v, bool) or v is None:
            raise SpecError(f"{field}: expected a number, got {v!r}")
        return complex(v)
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise SpecError(f"{field}: cannot parse {v!r}") from exc


def _scalar_json(z):
    z = complex(z)
    return z.real if z.imag == 0 else [z.real, z.imag]


# --------------------------------------------------------------------------
# spec variants


@dataclass(frozen=True, eq=False)
class Atomic:
    weights: tuple
    positions: tuple

    def __post_init__(self):
        w = tuple(complex(x) for x in self.weights)
        pos = np.atleast_2d(np.asarray(self.positions, dtype=float))
        if pos.ndim != 2 or len(w) != pos.shape[0]:
            raise SpecError("atomic: need one position per weight")
        if len(w) == 0:
            raise SpecError("atomic: empty atom list")
        if np.any(pos < 0) or np.any(pos >= 1):
            raise SpecError(f"atomic: positions must lie in [0, 1)^d, got {pos.tolist()}")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "positions", tuple(map(tuple, pos.tolist())))

    @property
    def d(self):
        return len(self.positions[0])

    @property
    def is_real(self):
        return all(w.imag == 0 for w in self.weights)

    def oracle(self):
        return fourier_atoms(zip(self.weights, self.positions))

    def merged(self):
        """Same measure with coincident atoms combined (weights summed)."""
        acc = {}
        for w, x in zip(self.weights, self.positions):
            acc[x] = acc.get(x, 0) + w
        keys = sorted(acc)
        return Atomic(tuple(acc[k] for k in keys), tuple(keys))

    def to_json(self):
        return {"variant": "atomic",
                "atoms": [{"w": _scalar_json(w), "x": list(x)}
                          for w, x in zip(self.weights, self.positions)]}


@dataclass(frozen=True, eq=False)
class GridDensity:
    samples: np.ndarray

    def __post_init__(self):
        s = np.array(self.samples)
        if s.ndim == 0 or s.size == 0:
            raise SpecError("grid: samples must be a non-empty N^d array")
        if len(set(s.shape)) != 1:
            raise SpecError(f"grid: samples must be an N^d cube, got shape {s.shape}")
        s = s.astype(np.float64 if np.isrealobj(s) else np.complex128)
        s.flags.writeable = False
        object.__setattr__(self, "samples", s)

    @property
    def d(self):
        return self.samples.ndim

    @property
    def N(self):
        return self.samples.shape[0]

    @property
    def is_real(self):
        return np.isrealobj(self.samples)

    def oracle(self):
        return fourier_density_grid(self.samples)

    def to_json(self):
        out = {"variant": "grid", "samples": np.real(self.samples).tolist()}
        if not self.is_real:
            out["samples_imag"] = np.imag(self.samples).tolist()
        return out


@dataclass(frozen=True, eq=False)
class SelfSimilar:
    base: int
    digits: tuple
    depth: int

    def __post_init__(self):
        digits = np.asarray(self.digits, dtype=int)
        if digits.ndim == 1:
            digits = digits[:, None]
        if digits.size == 0:
            raise SpecError("self_similar: empty digit set")
        if self.base < 2 or self.depth < 1:
            raise SpecError(f"self_similar: need base >= 2 and depth >= 1")
        if np.any(digits < 0) or np.any(digits >= self.base):
            raise SpecError("self_similar: digits must lie in {0..base-1}^d")
        as_tuples = tuple(map(tuple, digits.tolist()))
        if len(set(as_tuples)) != len(as_tuples):
            raise SpecError("self_similar: digits must be distinct")
        object.__setattr__(self, "digits", as_tuples)

    @property
    def d(self):
        return len(self.digits[0])

    is_real = True

    def oracle(self):
        return fourier_self_similar(self.base, self.digits, self.depth)

    def atoms(self):
        """The ``|D|^J`` atoms of the depth-``J`` stage as an :class:`Atomic`."""
        digits = np.asarray(self.digits, dtype=np.int64)
        pts = np.zeros((1, self.d), dtype=np.int64)
        for _ in range(self.depth):
            pts = (pts[:, None, :] * self.base + digits[None, :, :]).reshape(-1, self.d)
        pos = pts / float(self.base) ** self.depth
        w = np.full(len(pos), 1.0 / len(pos))
        return Atomic(tuple(w), tuple(map(tuple, pos)))

    def to_json(self):
        digits = [list(a) for a in self.digits]
        if self.d == 1:
            digits = [a[0] for a in digits]
        return {"variant": "self_similar", "base": self.base, "digits": digits,
                "depth": self.depth}


@dataclass(frozen=True, eq=False)
class Scaled:
    factor: complex
    spec: object

    @property
    def d(self):
        return self.spec.d

    @property
    def is_real(self):
        return complex(self.factor).imag == 0 and self.spec.is_real

    def oracle(self):
        return self.spec.oracle().scaled(self.factor)

    def to_json(self):
        return {"variant": "scaled", "factor": _scalar_json(self.factor),
                "spec": self.spec.to_json()}


@dataclass(frozen=True, eq=False)
class Sum:
    terms: tuple

    def __post_init__(self):
        terms = tuple(self.terms)
        if not terms:
            raise SpecError("sum: needs at least one term")
        if len({t.d for t in terms}) != 1:
            raise SpecError("sum: all terms must share the dimension d")
        object.__setattr__(self, "terms", terms)

    @property
    def d(self):
        return self.terms[0].d

    @property
    def is_real(self):
        return all(t.is_real for t in self.terms)

    def oracle(self):
        out = self.terms[0].oracle()
        for t in self.terms[1:]:
            out = out + t.oracle()
        return out

    def to_json(self):
        return {"variant": "sum", "terms": [t.to_json() for t in self.terms]}


MeasureSpec = (Atomic, GridDensity, SelfSimilar, Scaled, Sum)


def total_mass(spec):
    """``mu_hat(0)``; not forced to one."""
    return spec.oracle().total_mass


def lebesgue(d=1):
    """Haar probability measure as the constant density 1."""
    return GridDensity(np.ones((1,) * d))


def dirac(d=1, weight=1.0):
    return Atomic((weight,), ((0.0,) * d,))


def zero_measure(d=1):
    return GridDensity(np.zeros((1,) * d))


def cantor(base=3, digits=(0, 2), depth=6):
    return SelfSimilar(base, tuple(digits), depth)


def trig_density(coeffs, N=None):
    """Density ``sum_k c_k exp(2 pi i k.x)`` from a ``{k: c_k}`` mapping (1-D keys
    may be ints).  Stored as grid samples with ``N`` odd and ``N > 2 * degree``,
    which reproduces the coefficients exactly.
    """
    keys = [np.atleast_1d(np.asarray(k, dtype=int)) for k in coeffs]
    d = len(keys[0])
    deg = max(int(np.max(np.abs(k))) for k in keys)
    if N is None:
        N = 2 * deg + 1
    if N <= 2 * deg:
        raise SpecError(f"trig: N={N} too small for degree {deg}")
    spec_arr = np.zeros((N,) * d, dtype=np.complex128)
    for k, c in zip(keys, coeffs.values()):
        spec_arr[tuple(k % N)] += c
    samples = np.fft.ifftn(spec_arr) * N ** d
    if all(np.isclose(coeffs.get(_key(-k, d), 0), np.conj(c), rtol=0, atol=0)
           for k, c in zip(keys, coeffs.values())):
        samples = samples.real
    return GridDensity(samples)


def _key(k, d):
    return int(k[0]) if d == 1 else tuple(int(v) for v in k)


# --------------------------------------------------------------------------
# coefficient oracles


def fourier_atoms(atoms):
    """Oracle for ``sum_j w_j delta_{x_j}``: ``xi -> sum_j w_j exp(-2 pi i xi.x_j)``."""
    atoms = list(atoms)
    if not atoms:
        raise SpecError("atomic: empty atom list")
    w = np.array([complex(a[0]) for a in atoms])
    x = np.atleast_2d(np.array([np.atleast_1d(np.asarray(a[1], dtype=float)) for a in atoms]))
    if np.any(x < 0) or np.any(x >= 1):
        raise SpecError("atomic: positions must lie in [0, 1)^d")
    d = x.shape[1]

    def coeffs(pts):
        # reduce xi.x mod 1 before exponentiating to keep phases accurate at large xi
        phase = np.mod(pts.astype(float) @ x.T, 1.0)
        return np.exp(-2j * np.pi * phase) @ w

    return CoeffOracle(coeffs, d, None, bool(np.all(w.imag == 0)))


def fourier_density_grid(samples):
    """Oracle for the density sampled on the uniform grid of ``N^d`` points.

    Coefficients are the DFT of the samples divided by ``N^d``, so ``mu_hat(0)``
    is the sample mean.  For even ``N`` the Nyquist coefficient is split evenly
    between ``+N/2`` and ``-N/2`` (per axis), keeping real data conjugate
    symmetric.  Declared band limit is ``floor(N/2)``.
    """
    s = np.asarray(samples)
    d, N = s.ndim, s.shape[0]
    if N < 1:
        raise SpecError("grid: N must be >= 1")
    spectrum = np.fft.fftn(s) / s.size
    real = np.isrealobj(s)
    half = N // 2
    nyquist = N % 2 == 0

    def coeffs(pts):
        out = spectrum[tuple(np.mod(pts, N)[..., i] for i in range(d))]
        inside = np.all(np.abs(pts) <= half, axis=-1)
        if nyquist:
            out = out * np.prod(np.where(np.abs(pts) == half, 0.5, 1.0), axis=-1)
        return np.where(inside, out, 0)

    mags = np.abs(spectrum)
    tol = 1e-13 * max(mags.max(), 1e-300)
    idx = np.argwhere(mags > tol)
    if len(idx):
        signed = np.where(idx > half, idx - N, idx)
        support = int(np.abs(signed).max())
    else:
        support = 0
    return CoeffOracle(coeffs, d, half, real, support)


def fourier_self_similar(base, digits, depth):
    """Oracle for the depth-``J`` stage of a self-similar measure.

    ``mu_hat(xi) = prod_{j=1..J} mean_{a in D} exp(-2 pi i xi.a / base^j)``, the
    exact transform of the ``|D|^J`` equally weighted stage-``J`` atoms.
    """
    D = np.asarray(digits, dtype=np.int64)
    if D.size == 0:
        raise SpecError("self_similar: empty digit set")
    if D.ndim == 1:
        D = D[:, None]
    d = D.shape[1]
    base = int(base)
    if base < 2 or depth < 1:
        raise SpecError("self_similar: need base >= 2 and depth >= 1")

    def coeffs(pts):
        dots = pts @ D.T  # integer xi.a, exact
        out = np.ones(pts.shape[:-1], dtype=np.complex128)
        for j in range(1, depth + 1):
            q = base ** j
            out = out * np.exp(-2j * np.pi * (np.mod(dots, q) / q)).mean(axis=-1)
        return out

    return CoeffOracle(coeffs, d, None, True)


def total_variation_spec(spec):
    """The spec of ``|mu|`` where it has a closed form."""
    if isinstance(spec, Atomic):
        m = spec.merged()
        return Atomic(tuple(abs(w) for w in m.weights), m.positions)
    if isinstance(spec, GridDensity):
        return GridDensity(np.abs(spec.samples))
    if isinstance(spec, SelfSimilar):
        return spec
    if isinstance(spec, Scaled):
        return Scaled(abs(complex(spec.factor)), total_variation_spec(spec.spec))
    raise SpecError(f"no total-variation companion for {type(spec).__name__}")


def total_variation_oracle(spec):
    return total_variation_spec(spec).oracle()


def embed_tensor(oracle: CoeffOracle, box: FreqBox):
    """Materialise ``mu_hat`` over a level-0 box (``r == 0``)."""
    if box.r != 0:
        raise ValueError(f"embed_tensor needs a box with r=0, got r={box.r}")
    if box.d != oracle.d:
        raise ValueError(f"box has d={box.d} but the measure lives on T^{oracle.d}")
    grid = np.stack(np.meshgrid(*[box.frequencies()] * box.d, indexing="ij"), axis=-1)
    return SpectralTensor(box, oracle(grid), real_measure=oracle.real)


# --------------------------------------------------------------------------
# JSON


_FIELDS = {
    "atomic": {"variant", "atoms"},
    "grid": {"variant", "samples", "samples_imag"},
    "self_similar": {"variant", "base", "digits", "depth"},
    "scaled": {"variant", "factor", "spec"},
    "sum": {"variant", "terms"},
    "lebesgue": {"variant", "d"},
    "dirac": {"variant", "d", "w"},
    "trig": {"variant", "coeffs", "N"},
}


def spec_from_json(obj):
    """Parse a spec from a JSON string or an already-decoded dict.

    Examples of each variant::

        {"variant": "atomic", "atoms": [{"w": [1, 0], "x": [0.5]}, {"w": "-0.5", "x": ["1/4"]}]}
        {"variant": "grid", "samples": [1, 2, 1, 0]}          # optional "samples_imag"
        {"variant": "self_similar", "base": 3, "digits": [0, 2], "depth": 6}
        {"variant": "scaled", "factor": 2, "spec": {...}}
        {"variant": "sum", "terms": [{...}, {...}]}
        {"variant": "lebesgue", "d": 1}
        {"variant": "dirac", "d": 1}
        {"variant": "trig", "coeffs": [{"k": [1], "c": 0.5}, {"k": [-1], "c": 0.5}]}
    """
    if isinstance(obj, str):
        try:
            obj = json.loads(obj)
        except json.JSONDecodeError as exc:
            raise SpecError(f"spec is not valid JSON: {exc}") from exc
    return _parse(obj, "spec")


def _parse(obj, path):
    if not isinstance(obj, dict):
        raise SpecError(f"{path}: expected an object")
    variant = obj.get("variant")
    if variant not in _FIELDS:
        raise SpecError(f"{path}.variant: unknown variant {variant!r}")
    extra = set(obj) - _FIELDS[variant]
    if extra:
        raise SpecError(f"{path}.{sorted(extra)[0]}: unknown field for variant {variant!r}")

    def need(key):
        if key not in obj:
            raise SpecError(f"{path}.{key}: missing")
        return obj[key]

    if variant == "atomic":
        atoms = need("atoms")
        if not isinstance(atoms, list) or not atoms:
            raise SpecError(f"{path}.atoms: expected a non-empty list")
        ws, xs = [], []
        for i, a in enumerate(atoms):
            p = f"{path}.atoms[{i}]"
            if not isinstance(a, dict) or set(a) != {"w", "x"}:
                raise SpecError(f"{p}: expected exactly the fields 'w' and 'x'")
            ws.append(_parse_scalar(a["w"], f"{p}.w"))
            x = a["x"] if isinstance(a["x"], list) else [a["x"]]
            xs.append(tuple(_parse_scalar(v, f"{p}.x").real for v in x))
        try:
            return Atomic(tuple(ws), tuple(xs))
        except SpecError as exc:
            raise SpecError(f"{path}.atoms: {exc}") from exc
    if variant == "grid":
        try:
            s = np.asarray(need("samples"), dtype=float)
            if "samples_imag" in obj:
                s = s + 1j * np.asarray(obj["samples_imag"], dtype=float)
        except (ValueError, TypeError) as exc:
            raise SpecError(f"{path}.samples: {exc}") from exc
        return GridDensity(s)
    if variant == "self_similar":
        try:
            return SelfSimilar(int(need("base")), tuple(map(_tuple_or_int, need("digits"))),
                               int(need("depth")))
        except (TypeError, ValueError) as exc:
            raise SpecError(f"{path}: {exc}") from exc
    if variant == "scaled":
        return Scaled(_parse_scalar(need("factor"), f"{path}.factor"),
                      _parse(need("spec"), f"{path}.spec"))
    if variant == "sum":
        terms = need("terms")
        if not isinstance(terms, list):
            raise SpecError(f"{path}.terms: expected a list")
        return Sum(tuple(_parse(t, f"{path}.terms[{i}]") for i, t in enumerate(terms)))
    if variant == "lebesgue":
        return lebesgue(int(obj.get("d", 1)))
    if variant == "dirac":
        return dirac(int(obj.get("d", 1)), _parse_scalar(obj.get("w", 1), f"{path}.w"))
    # trig
    coeffs = {}
    for i, t in enumerate(need("coeffs")):
        p = f"{path}.coeffs[{i}]"
        if not isinstance(t, dict) or set(t) != {"k", "c"}:
            raise SpecError(f"{p}: expected exactly the fields 'k' and 'c'")
        k = t["k"] if isinstance(t["k"], list) else [t["k"]]
        key = int(k[0]) if len(k) == 1 else tuple(int(v) for v in k)
        coeffs[key] = _parse_scalar(t["c"], f"{p}.c")
    if not coeffs:
        raise SpecError(f"{path}.coeffs: empty")
    return trig_density(coeffs, obj.get("N"))


def _tuple_or_int(v):
    return tuple(v) if isinstance(v, list) else int(v)


def spec_to_json(spec):
    return spec.to_json()
