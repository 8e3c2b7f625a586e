"""Executable checks of the identities and inequalities for U^k of measures.

Each check returns a :class:`CheckResult` carrying the measured slack or
ratio, the tolerance it was judged at, and a digest of its inputs, so any
failure can be replayed from ``(seed, spec JSON)``.

Truncation is lossless for band-limited inputs once the radius is large
enough (see :func:`exact_radius`), so tolerances below are rounding
allowances.  Singular inputs only enter checks whose truncated statement is
itself exact.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field

import numpy as np

from . import delta
from .discrete import discrete_delta, discrete_inner_product, discrete_uk_norm, sample_oracle
from .measures import (
    Atomic,
    GridDensity,
    SpecError,
    Sum,
    cantor,
    dirac,
    lebesgue,
    total_variation_spec,
    trig_density,
)
from .mollifiers import (
    PhiBracket,
    cyclic_bracket,
    cyclic_convolve,
    fejer_kernel,
    phi_bracket_quadrature,
    phi_bracket_transform,
)
from .spectral import pairwise_sum, plancherel_mass, slice_xi, squared_moduli

PASS, FAIL, SKIPPED = "pass", "fail", "skipped"


@dataclass
class CheckResult:
    check: str
    status: str
    measured: float
    tolerance: float
    seed: int | None = None
    spec_digest: str = ""
    details: dict = field(default_factory=dict)

    @property
    def passed(self):
        return self.status == PASS

    def to_json(self):
        return json.dumps(_jsonable(asdict(self)), sort_keys=True)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, np.generic):
        return _jsonable(obj.item())
    if isinstance(obj, float) and not np.isfinite(obj):
        return str(obj)
    return obj


def digest(*parts):
    """Short stable hash of JSON-able inputs."""
    blob = json.dumps(_jsonable([_spec_json(p) for p in parts]), sort_keys=True)
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def _spec_json(p):
    if hasattr(p, "to_json"):
        return p.to_json()
    if isinstance(p, np.ndarray):
        return {"re": p.real.tolist(), "im": p.imag.tolist()}
    return p


def _status(ok):
    return PASS if ok else FAIL


def _scale(*values):
    return max([1.0] + [abs(v) for v in values])


def support_radius(spec):
    r = spec.oracle().support_radius
    if r is None:
        raise SpecError(f"{type(spec).__name__} spec is not band-limited")
    return r


def exact_radius(k, band):
    """Smallest truncation radius at which the U^k value of a measure with
    coefficients supported in ``|xi_i| <= band`` is computed without loss."""
    return 2 ** max(k - 2, 0) * band


def _require_radius(specs, k, M):
    band = max(support_radius(s) for s in specs)
    need = exact_radius(k, band)
    if M < need:
        raise SpecError(f"radius M={M} too small for U^{k} of band {band}: need M >= {need}")
    return band


def _norm(spec, k, M, backend):
    return delta.uk_norm(delta.build_tower(spec, k - 1, M, backend=backend), k)


# --------------------------------------------------------------------------
# torus-side checks


def check_gcs(specs, k, M, tol=1e-9, seed=None, backend="auto"):
    """``|<mu>| <= prod ||mu_iota||_{U^{k+1}}`` for ``2^{k+1}`` band-limited measures."""
    specs = list(specs)
    _require_radius(specs, k + 1, M)
    ip = delta.inner_product(specs, k, M, backend=backend)
    norms = [_norm(s, k + 1, M, backend) for s in specs]
    bound = float(np.prod(norms))
    if bound == 0:
        ratio = 0.0 if abs(ip) == 0 else float("inf")
    else:
        ratio = abs(ip) / bound
    return CheckResult("gcs", _status(ratio <= 1 + tol), ratio, tol, seed, digest(*specs),
                       {"k": k, "M": M, "inner_product": ip, "norm_product": bound})


def check_triangle(spec1, spec2, k, M, tol=1e-9, seed=None, backend="auto"):
    """``||mu1 + mu2||_{U^k} <= ||mu1||_{U^k} + ||mu2||_{U^k}``."""
    _require_radius([spec1, spec2], k, M)
    lhs = _norm(Sum((spec1, spec2)), k, M, backend)
    rhs = _norm(spec1, k, M, backend) + _norm(spec2, k, M, backend)
    slack = rhs - lhs
    return CheckResult("triangle", _status(slack >= -tol * _scale(lhs, rhs)), slack, tol, seed,
                       digest(spec1, spec2), {"k": k, "M": M, "lhs": lhs, "rhs": rhs})


def check_monotonicity(spec, k_max, M, tol=1e-12, seed=None, backend="auto"):
    """Tower identity and the monotone chain, level by level.

    For each ``k <= k_max``: ``Delta^k(0; 0) == plancherel_mass(level k-1)``
    (relative ``tol``) and ``sum_c |Delta^{k-1}(0; c)|^2 >= |Delta^{k-1}(0; 0)|^2``
    with no tolerance at all.
    """
    tower = delta.build_tower(spec, k_max, M, backend=backend)
    worst, chain_ok, rows = 0.0, True, []
    for k in range(1, k_max + 1):
        prev = tower[k - 1]
        mass = plancherel_mass(prev)
        ident = abs(tower[k].origin - mass) / max(mass, np.finfo(float).tiny)
        origin_sq = float(squared_moduli(prev.origin))
        chain = mass >= origin_sq
        if k >= 2:
            # |Delta^{k-1}(0;0)|^2 == plancherel_mass(level k-2)^2
            pm = plancherel_mass(tower[k - 2])
            ident = max(ident, abs(origin_sq - pm * pm) / max(pm * pm, np.finfo(float).tiny))
        worst = max(worst, ident)
        chain_ok = chain_ok and chain
        rows.append({"k": k, "power": mass, "lower": origin_sq, "identity_error": ident})
    ok = worst <= tol and chain_ok
    return CheckResult("monotonicity", _status(ok), worst, tol, seed, digest(spec),
                       {"M": M, "chain_holds": chain_ok, "levels": rows})


def _atomic_delta1_variation(spec: Atomic):
    """Total variation of ``Delta^1 mu`` for atomic ``mu``, by enumerating its atoms
    ``w_j conj(w_l)`` at ``(x_j, x_j - x_l)``."""
    m = spec.merged()
    atoms = {}
    for wj, xj in zip(m.weights, m.positions):
        for wl, xl in zip(m.weights, m.positions):
            key = (xj, tuple(round((a - b) % 1.0, 15) for a, b in zip(xj, xl)))
            atoms[key] = atoms.get(key, 0) + wj * np.conj(wl)
    return float(pairwise_sum(np.abs(np.array(list(atoms.values())))))


def _grid_delta1_variation(spec: GridDensity, M, backend):
    """``mean |Delta^1 f|`` over the sampling grid, with the ``Delta^1`` density
    rebuilt from the level-1 Fourier tensor."""
    T = delta.build_tower(spec, 1, M, backend=backend)[1]
    N, d = spec.N, spec.d
    dense = np.zeros((N,) * (2 * d), dtype=np.complex128)
    freqs = np.mod(np.arange(-M, M + 1), N)
    np.add.at(dense, np.ix_(*[freqs] * (2 * d)), T.coeffs)
    values = np.fft.ifftn(dense) * dense.size
    return float(np.abs(values).mean())


def check_abs_value(spec, M, tol=None, seed=None, backend="auto"):
    """``<|mu|, |mu|> == ||Delta^1 mu||`` (total variation).

    ``A`` is read off the tower of ``|mu|`` as ``Delta^1|mu|(0; 0)``.  ``B`` comes
    from the atoms of ``Delta^1 mu`` (atomic input, tolerance 1e-9) or from grid
    quadrature of ``|Delta^1 f|`` (grid input, tolerance 1e-6).
    """
    tv = total_variation_spec(spec)
    A = delta.build_tower(tv, 1, M, backend=backend)[1].origin.real
    if isinstance(spec, Atomic):
        B = _atomic_delta1_variation(spec)
        tol = 1e-9 if tol is None else tol
    elif isinstance(spec, GridDensity):
        band = support_radius(spec)
        if M < 2 * band:
            raise SpecError(f"radius M={M} too small to rebuild Delta^1 of band {band}")
        B = _grid_delta1_variation(spec, M, backend)
        tol = 1e-6 if tol is None else tol
    else:
        raise SpecError(f"abs-value check supports atomic or grid specs, not {type(spec).__name__}")
    err = abs(A - B)
    return CheckResult("abs_value", _status(err <= tol * _scale(A, B)), err, tol, seed,
                       digest(spec), {"M": M, "A": A, "B": B})


def check_mon_bound(spec, xis, M, fejer_radius=None, tol=1e-9, seed=None, backend="auto"):
    """Fejer-weighted form of ``sum_eta |nu^(xi; eta)|^2 <= sum_eta ||nu|^(0; eta)|^2``
    for ``nu = Delta^1 mu``, where ``|nu| = Delta^1 |mu|``.

    Both sides carry the weight ``|F^(eta)|^2`` of a Fejer kernel of radius
    ``M - max|xi|``, which keeps every term inside the box and the truncated
    inequality exact.
    """
    xis = [np.atleast_1d(np.asarray(x, dtype=int)) for x in xis]
    reach = max(int(np.abs(x).max()) for x in xis)
    R = M - reach if fejer_radius is None else fejer_radius
    if R < 0 or R + reach > M:
        raise SpecError(f"need fejer radius + max|xi| <= M, got {R} + {reach} > {M}")
    nu = delta.build_tower(spec, 1, M, backend=backend)[1]
    absnu = delta.build_tower(total_variation_spec(spec), 1, M, backend=backend)[1]
    prof = fejer_kernel(R).profile(nu.box.frequencies()) ** 2
    w = prof
    for _ in range(nu.d - 1):
        w = np.multiply.outer(w, prof)
    rhs = float(pairwise_sum(w * squared_moduli(slice_xi(absnu, np.zeros(nu.d, dtype=int)))))
    worst, rows = np.inf, []
    for xi in xis:
        lhs = float(pairwise_sum(w * squared_moduli(slice_xi(nu, xi))))
        worst = min(worst, rhs - lhs)
        rows.append({"xi": xi.tolist(), "lhs": lhs})
    ok = worst >= -tol * _scale(rhs)
    return CheckResult("mon_bound", _status(ok), worst, tol, seed, digest(spec),
                       {"M": M, "fejer_radius": R, "rhs": rhs, "rows": rows})


def check_ac_equivalence(spec, k, N, M, tol=1e-6, seed=None, backend="auto"):
    """Frequency-tower ``U^k`` of ``f dx`` against the brute-force ``U^k`` of ``f``
    sampled on ``Z_N``."""
    if isinstance(spec, np.ndarray):
        spec = GridDensity(spec)
    band = _require_radius([spec], k, M)
    if N <= 2 ** k * band:
        raise SpecError(f"Z_{N} aliases U^{k} of a band-{band} density: need N > {2 ** k * band}")
    torus = _norm(spec, k, M, backend)
    samples = sample_oracle(spec.oracle(), N)
    disc = discrete_uk_norm(samples, k)
    rel = abs(torus - disc) / max(abs(disc), np.finfo(float).tiny)
    return CheckResult("ac_equivalence", _status(rel <= tol), rel, tol, seed, digest(spec),
                       {"k": k, "N": N, "M": M, "torus": torus, "discrete": disc})


def check_mollifier_transform(pb: PhiBracket, points, grid=128, tol=1e-6, seed=None):
    """Factorised transform of ``phi^[n]`` against quadrature of its definition."""
    worst, rows = 0.0, []
    for xi, etas in points:
        fast = phi_bracket_transform(pb, xi, etas)
        slow = phi_bracket_quadrature(pb, xi, etas, grid)
        worst = max(worst, abs(fast - slow))
        rows.append({"xi": int(xi), "etas": [int(e) for e in etas], "transform": fast})
    kernels = [{"kind": p.kind, "M": p.M} for p in pb.kernels]
    return CheckResult("mollifier_transform", _status(worst <= tol), worst, tol, seed,
                       digest(kernels, [[int(x), [int(e) for e in es]] for x, es in points]),
                       {"grid": grid, "rows": rows})


# --------------------------------------------------------------------------
# cyclic-group checks


def _check_tables(tables):
    for t in tables:
        t = np.asarray(t, dtype=float)
        if np.any(t < 0):
            raise ValueError("non-positive mollifier table")
        if abs(t.mean() - 1) > 1e-12:
            raise ValueError("mollifier tables must have unit mass (mean 1)")


def check_phin_chain(family, mollifiers, k, tol=1e-12, seed=None):
    """The two-step chain on ``Z_N`` for positive functions ``f_iota``:

    ``|<g>|  <=  prod_i <g_i, g_i>^(1/2)  <=  prod_iota (mass of phi_iota^[k+1] * Delta^{k+1} f_iota)^(1/2^{k+1})``

    where ``g_iota = phi_iota^1 * ... * phi_iota^{k+1} * f_iota`` and ``g_i`` is the
    ``i``-th half of the family paired with itself.  ``mollifiers[iota]`` lists
    the 1-D tables ``phi^0..phi^{k+1}`` (positive, mean one).
    """
    fs = [np.asarray(f, dtype=float) for f in family]
    if len(fs) != 2 ** (k + 1) or len(mollifiers) != len(fs):
        raise ValueError("need 2^(k+1) functions and as many mollifier lists")
    if any(f.ndim != 1 for f in fs):
        raise ValueError("the chain check runs on Z_N (d = 1)")
    for tabs in mollifiers:
        if len(tabs) != k + 2:
            raise ValueError(f"each mollifier list needs phi^0..phi^{k + 1}")
        _check_tables(tabs)
    gs = []
    for f, tabs in zip(fs, mollifiers):
        g = f
        for t in tabs[1:]:
            g = cyclic_convolve(t, g)
        gs.append(g)
    lhs = abs(discrete_inner_product(gs, k))
    half = len(gs) // 2
    mid = 1.0
    for part in (gs[:half], gs[half:]):
        mid *= max(discrete_inner_product(part + part, k).real, 0.0) ** 0.5
    rhs = 1.0
    for f, tabs in zip(fs, mollifiers):
        D = discrete_delta(f, k + 1).values
        mass = cyclic_convolve(cyclic_bracket(tabs), D).mean().real
        rhs *= max(mass, 0.0) ** (1.0 / 2 ** (k + 1))
    s1, s2 = mid - lhs, rhs - mid
    scale = _scale(lhs, mid, rhs)
    ok = s1 >= -tol * scale and s2 >= -tol * scale
    return CheckResult("phin_chain", _status(ok), min(s1, s2), tol, seed,
                       digest([f.tolist() for f in fs]),
                       {"k": k, "lhs": lhs, "mid": mid, "rhs": rhs, "slack_left": s1,
                        "slack_right": s2})


def check_bracket_convolution(f, tables, tol=1e-12, seed=None):
    """``phi^[n] * Delta(phi^{n+1} * f) == phi^[n+1] * Delta f`` on ``Z_N^{n+2}``.

    ``f`` lives on ``Z_N x Z_N^n``; the inner convolution acts on ``x`` only,
    the outer one on ``(x; v')``.
    """
    f = np.asarray(f, dtype=np.complex128)
    n = f.ndim - 1
    if len(tables) != n + 2:
        raise ValueError(f"f on Z_N^{n + 1} needs tables phi^0..phi^{n + 1}")
    N = f.shape[0]

    def one_step(g):
        # Delta g(x; v', v) = g(x; v') conj(g(x - v; v'))
        shifted = np.stack([np.roll(g, v, axis=0) for v in range(N)], axis=-1)
        return g[..., None] * np.conj(shifted)

    inner = cyclic_convolve(np.asarray(tables[n + 1], dtype=float), f)
    lhs = cyclic_convolve(cyclic_bracket(tables[: n + 1]), one_step(inner))
    rhs = cyclic_convolve(cyclic_bracket(tables), one_step(f))
    err = float(np.max(np.abs(lhs - rhs)))
    scale = _scale(float(np.max(np.abs(rhs))))
    return CheckResult("bracket_convolution", _status(err <= tol * scale), err, tol, seed,
                       digest(f), {"n": n, "N": N})


# --------------------------------------------------------------------------
# random inputs and the suite


def random_trig_spec(rng, degree, d=1, real=True, positive=False):
    """Random trigonometric-polynomial density of the given degree.

    ``positive`` lifts the constant term above the sum of the other moduli.
    """
    ks = list(np.ndindex(*((2 * degree + 1,) * d)))
    coeffs = {}
    for idx in ks:
        k = tuple(i - degree for i in idx)
        coeffs[k] = complex(rng.normal(), rng.normal()) / (1 + sum(abs(v) for v in k))
    if real or positive:
        for k in list(coeffs):
            neg = tuple(-v for v in k)
            if k < neg:
                coeffs[neg] = np.conj(coeffs[k])
        zero = (0,) * d
        coeffs[zero] = complex(coeffs[zero].real)
    if positive:
        zero = (0,) * d
        coeffs[zero] = 1.0 + sum(abs(c) for k, c in coeffs.items() if k != zero)
    if d == 1:
        coeffs = {k[0]: c for k, c in coeffs.items()}
    return trig_density(coeffs)


def random_positive_table(rng, N):
    t = rng.random(N) + 0.05
    return t / t.mean()


def instance_seed(seed, name, i):
    h = hashlib.sha256(f"{seed}:{name}:{i}".encode()).hexdigest()
    return int(h[:8], 16)


SUITES = ("gcs", "triangle", "monotonicity", "abs_value", "mon_bound", "ac_equivalence",
          "mollifier_transform", "phin_chain", "bracket_convolution")


def run_suite(suite="all", seed=0, N=16, k=2, trials=3, backend="auto"):
    """Run a seeded batch of checks.  ``k`` is the Gowers order U^k under test.

    Results are returned in declaration order.
    """
    names = SUITES if suite == "all" else (suite,)
    unknown = set(names) - set(SUITES)
    if unknown:
        raise ValueError(f"unknown suite {sorted(unknown)[0]!r}; choose from {SUITES + ('all',)}")
    if k < 1:
        raise ValueError("k must be >= 1")
    results = []
    for name in names:
        for i in range(trials):
            s = instance_seed(seed, name, i)
            rng = np.random.default_rng(s)
            results.append(_run_one(name, rng, s, N, k, backend))
    return results


def _run_one(name, rng, s, N, k, backend):
    if name == "gcs":
        fam_k = max(k - 1, 1)
        deg = 2
        specs = [random_trig_spec(rng, deg, real=False) for _ in range(2 ** (fam_k + 1))]
        return check_gcs(specs, fam_k, exact_radius(fam_k + 1, deg) + 1, seed=s, backend=backend)
    if name == "triangle":
        deg = 2
        a, b = random_trig_spec(rng, deg), random_trig_spec(rng, deg)
        return check_triangle(a, b, k, exact_radius(k, deg) + 1, seed=s, backend=backend)
    if name == "monotonicity":
        pool = [lebesgue(), dirac(), trig_density({0: 1, 1: 0.5, -1: 0.5}), cantor(3, (0, 2), 6)]
        spec = pool[int(rng.integers(len(pool)))]
        return check_monotonicity(spec, min(k, 3), 8, seed=s, backend=backend)
    if name == "abs_value":
        if rng.random() < 0.5:
            n_atoms = int(rng.integers(2, 5))
            pos = np.sort(rng.choice(64, n_atoms, replace=False)) / 64.0
            w = rng.normal(size=n_atoms)
            spec = Atomic(tuple(w), tuple((p,) for p in pos))
            return check_abs_value(spec, 8, seed=s, backend=backend)
        spec = random_trig_spec(rng, 1, positive=False)
        spec = GridDensity(sample_oracle(spec.oracle(), 32).real)
        return check_abs_value(spec, 2 * support_radius(spec), seed=s, backend=backend)
    if name == "mon_bound":
        n_atoms = int(rng.integers(2, 5))
        pos = np.sort(rng.choice(64, n_atoms, replace=False)) / 64.0
        spec = Atomic(tuple(rng.normal(size=n_atoms)), tuple((p,) for p in pos))
        return check_mon_bound(spec, range(-4, 5), 12, seed=s, backend=backend)
    if name == "ac_equivalence":
        deg = max(1, min(3, (N - 1) // 2 ** k))
        spec = random_trig_spec(rng, deg, positive=True)
        return check_ac_equivalence(spec, k, N, max(exact_radius(k, deg), (k + 1) * deg),
                                    seed=s, backend=backend)
    if name == "mollifier_transform":
        M = int(rng.integers(1, 4))
        pb = PhiBracket((fejer_kernel(M), fejer_kernel(M)))
        pts = [(int(rng.integers(-4, 5)), (int(rng.integers(-4, 5)),)) for _ in range(5)]
        return check_mollifier_transform(pb, pts, grid=64, seed=s)
    if name == "phin_chain":
        Nc = min(N, 8)
        fam_k = 1
        fam = [rng.random(Nc) + 0.1 for _ in range(2 ** (fam_k + 1))]
        tabs = [[random_positive_table(rng, Nc) for _ in range(fam_k + 2)] for _ in fam]
        return check_phin_chain(fam, tabs, fam_k, seed=s)
    if name == "bracket_convolution":
        Nc = min(N, 8)
        f = rng.normal(size=(Nc, Nc)) + 1j * rng.normal(size=(Nc, Nc))
        tabs = [random_positive_table(rng, Nc) for _ in range(3)]
        return check_bracket_convolution(f, tabs, seed=s)
    raise ValueError(name)
