import json

import numpy as np
import pytest

from conftest import random_trig
from gowers.delta import (
    CONVERGED,
    GROWING,
    UNDETERMINED,
    build_tower,
    classify,
    delta_step,
    family_delta,
    family_tensors,
    inner_product,
    tail_report,
    uk_norm,
    uk_power,
)
from gowers.discrete import discrete_inner_product, discrete_uk_fourier, discrete_uk_norm, sample_oracle
from gowers.measures import Atomic, Scaled, cantor, dirac, lebesgue, trig_density
from gowers.spectral import BudgetExceeded, SpectralTensor


@pytest.mark.parametrize("M", [2, 4, 8, 16])
def test_dirac_u2_counts_box(M):
    assert uk_norm(build_tower(dirac(), 1, M), 2) == pytest.approx((2 * M + 1) ** 0.25, rel=1e-14)


def test_one_plus_cos_u2():
    f = trig_density({0: 1, 1: 0.5, -1: 0.5})
    assert uk_norm(build_tower(f, 1, 8), 2) == pytest.approx(1.125 ** 0.25, rel=1e-13)


def test_lebesgue_all_ones():
    t = build_tower(lebesgue(), 3, 4)
    for k in range(1, 5):
        assert uk_norm(t, k) == pytest.approx(1.0, abs=1e-15)


def test_level_one_formula(rng):
    spec = Atomic(tuple(rng.normal(size=3) + 1j * rng.normal(size=3)), ((0.1,), (0.35,), (0.8,)))
    M = 5
    t = build_tower(spec, 1, M)
    mu = spec.oracle()
    for xi in range(-M, M + 1):
        for eta in range(-M, M + 1):
            expect = mu.at([xi + eta]) * np.conj(mu.at([eta])) if abs(xi + eta) <= M else 0
            assert t[1].at([xi], [[eta]]) == pytest.approx(expect, abs=1e-13)


@pytest.mark.parametrize("spec,d,k,M", [
    (cantor(), 1, 3, 6),
    (Atomic((1, -0.5j, 2), ((0.0,), (0.3,), (0.77,))), 1, 3, 5),
    (Atomic((1, -0.5), ((0.1, 0.2), (0.5, 0.9))), 2, 2, 3),
])
def test_backends_agree_on_towers(spec, d, k, M):
    a = build_tower(spec, k, M, backend="naive")
    b = build_tower(spec, k, M, backend="fft")
    for j in range(k + 1):
        assert a[j].box == b[j].box
        scale = np.abs(a[j].coeffs).max()
        assert np.max(np.abs(a[j].coeffs - b[j].coeffs)) < 1e-12 * scale


def test_real_measure_stays_hermitian():
    t = build_tower(cantor(), 2, 5)
    assert t[2].real_measure
    assert t[2].hermitian_defect() < 1e-13


@pytest.mark.parametrize("degree,k", [(1, 2), (1, 3), (2, 3), (1, 4)])
def test_band_limited_exact_against_discrete(rng, degree, k):
    spec = random_trig(rng, degree, real=False)
    M = 2 ** max(k - 2, 0) * degree
    torus = uk_norm(build_tower(spec, k - 1, M), k)
    assert uk_norm(build_tower(spec, k - 1, M + 2), k) == pytest.approx(torus, rel=1e-12)
    N = 2 ** k * degree + 1
    disc = discrete_uk_norm(sample_oracle(spec.oracle(), N), k)
    assert torus == pytest.approx(disc, rel=1e-10)


def test_tower_matches_cyclic_fourier(rng):
    spec = random_trig(rng, 2, real=True)
    samples = sample_oracle(spec.oracle(), 11)
    torus = uk_norm(build_tower(spec, 2, 4), 3)
    assert torus == pytest.approx(discrete_uk_fourier(samples, 3), rel=1e-10)


def test_homogeneity():
    base = cantor(3, (0, 2), 4)
    c = -2.5 + 1j
    for k in (1, 2, 3):
        a = uk_norm(build_tower(base, k - 1, 6), k)
        b = uk_norm(build_tower(Scaled(c, base), k - 1, 6), k)
        assert b == pytest.approx(abs(c) * a, rel=1e-12)


def test_inner_product_of_equal_family_is_power():
    spec = trig_density({0: 1, 1: 0.3 - 0.2j, -2: 0.4})
    for k in (1, 2):
        ip = inner_product([spec] * 2 ** (k + 1), k, 8)
        norm = uk_norm(build_tower(spec, k, 8), k + 1)
        assert ip.real == pytest.approx(norm ** 2 ** (k + 1), rel=1e-12)
        assert abs(ip.imag) < 1e-12


def test_inner_product_matches_discrete(rng):
    for k in (1, 2):
        specs = [random_trig(rng, 2) for _ in range(2 ** (k + 1))]
        ip = inner_product(specs, k, 2 ** k * 2)
        N = 2 ** (k + 1) * 2 + 1
        disc = discrete_inner_product([sample_oracle(s.oracle(), N) for s in specs], k)
        assert ip == pytest.approx(disc, rel=1e-10, abs=1e-12)


def test_family_delta_size_checks():
    T = family_tensors([dirac()], 2)
    with pytest.raises(ValueError):
        family_delta(T * 3)
    with pytest.raises(ValueError):
        inner_product([dirac()] * 3, 1, 2)


def test_box_mismatch():
    a, b = build_tower(dirac(), 0, 2)[0], build_tower(dirac(), 0, 3)[0]
    with pytest.raises(ValueError):
        delta_step(a, b)


def test_budget_reports_level():
    with pytest.raises(BudgetExceeded) as err:
        build_tower(dirac(), 3, 8, budget=20000)
    assert err.value.level == 3
    assert err.value.required == 17 ** 4


def test_uk_power_missing_level():
    t = build_tower(dirac(), 1, 2)
    with pytest.raises(ValueError):
        uk_power(t, 3)
    with pytest.raises(ValueError):
        uk_norm(t, 0)


def test_tower_from_level0_tensor():
    T = build_tower(cantor(), 0, 4)[0]
    again = build_tower(T, 2, 4)
    assert np.array_equal(again[2].coeffs, build_tower(cantor(), 2, 4)[2].coeffs)


def test_classify():
    assert classify([1.0]) == UNDETERMINED
    assert classify([1.0, 1.0]) == CONVERGED
    assert classify([1.0, 1.1, 1.2, 1.3]) == GROWING
    assert classify([1.0, 1.1, 1.1001]) == UNDETERMINED


def test_tail_report_verdicts_and_determinism():
    r = tail_report(dirac(), 2, [4, 8, 16])
    assert r.verdicts[2] == GROWING
    assert r.verdicts[1] == CONVERGED
    np.testing.assert_allclose(r.values[2], [(2 * M + 1) ** 0.25 for M in (4, 8, 16)], rtol=1e-14)
    again = tail_report(dirac(), 2, [4, 8, 16])
    assert json.dumps(r.payload(), sort_keys=True) == json.dumps(again.payload(), sort_keys=True)
    assert "timing" in r.to_json()
    with pytest.raises(ValueError):
        tail_report(dirac(), 2, [8, 4])
