import json

import numpy as np
import pytest

from conftest import random_trig
from gowers import checks, delta
from gowers.checks import (
    check_abs_value,
    check_ac_equivalence,
    check_bracket_convolution,
    check_gcs,
    check_mollifier_transform,
    check_mon_bound,
    check_monotonicity,
    check_phin_chain,
    check_triangle,
    exact_radius,
    run_suite,
)
from gowers.discrete import discrete_inner_product, discrete_uk_norm, sample_oracle
from gowers.measures import (
    Atomic,
    GridDensity,
    SpecError,
    cantor,
    dirac,
    lebesgue,
    trig_density,
    zero_measure,
)
from gowers.mollifiers import PhiBracket, fejer_kernel
from gowers.spectral import SpectralTensor

ONE_PLUS_COS = trig_density({0: 1, 1: 0.5, -1: 0.5})


def test_gcs_equal_family_is_tight():
    spec = trig_density({0: 1, 1: 0.4j, -2: 0.3})
    for k in (1, 2):
        r = check_gcs([spec] * 2 ** (k + 1), k, 8)
        assert r.passed
        assert r.measured == pytest.approx(1.0, abs=1e-12)


def test_gcs_zero_member():
    r = check_gcs([ONE_PLUS_COS] * 3 + [zero_measure()], 1, 4)
    assert r.passed and r.measured == 0


def test_gcs_ratio_matches_discrete_oracle(rng):
    for _ in range(10):
        specs = [random_trig(rng, 3) for _ in range(4)]
        r = check_gcs(specs, 1, 8)
        fs = [sample_oracle(s.oracle(), 32) for s in specs]
        disc = abs(discrete_inner_product(fs, 1)) / np.prod([discrete_uk_norm(f, 2) for f in fs])
        assert r.passed
        assert r.measured == pytest.approx(disc, rel=1e-9)


def test_gcs_rejects_singular_or_small_radius():
    with pytest.raises(SpecError):
        check_gcs([dirac()] * 4, 1, 8)
    with pytest.raises(SpecError, match="too small"):
        check_gcs([random_trig(np.random.default_rng(0), 3)] * 8, 2, 3)


def test_triangle_equality_cases():
    r = check_triangle(ONE_PLUS_COS, zero_measure(), 2, 4)
    assert r.passed and r.measured == pytest.approx(0, abs=1e-12)
    r = check_triangle(ONE_PLUS_COS, ONE_PLUS_COS, 2, 4)
    assert r.passed and r.measured == pytest.approx(0, abs=1e-12)


def test_triangle_matches_discrete(rng):
    a, b = random_trig(rng, 2, real=True), random_trig(rng, 2, real=True)
    r = check_triangle(a, b, 2, 4)
    fa, fb = (sample_oracle(s.oracle(), 32) for s in (a, b))
    slack = discrete_uk_norm(fa, 2) + discrete_uk_norm(fb, 2) - discrete_uk_norm(fa + fb, 2)
    assert r.measured == pytest.approx(slack, rel=1e-9)


def test_monotonicity_dirac_counts():
    r = check_monotonicity(dirac(), 3, 4)
    assert r.passed
    lvl2 = r.details["levels"][1]
    assert lvl2["power"] == 9 and lvl2["lower"] == 1


@pytest.mark.parametrize("spec", [lebesgue(), ONE_PLUS_COS, cantor()])
def test_monotonicity_holds(spec):
    assert check_monotonicity(spec, 3, 8).passed


def test_monotonicity_lebesgue_equalities():
    r = check_monotonicity(lebesgue(), 3, 4)
    for row in r.details["levels"]:
        assert row["power"] == row["lower"] == 1


def test_abs_value_two_atoms():
    spec = Atomic((1.0, -1.0), ((0.0,), (0.5,)))
    r = check_abs_value(spec, 6)
    assert r.passed
    assert r.details["A"] == pytest.approx(4.0)
    assert r.details["B"] == pytest.approx(4.0)


def test_abs_value_positive_atoms_and_cos_grid():
    assert check_abs_value(Atomic((0.2, 0.8), ((0.1,), (0.6,))), 3).passed
    x = np.arange(32) / 32
    r = check_abs_value(GridDensity(np.cos(2 * np.pi * x)), 8)
    assert r.passed and r.tolerance == 1e-6
    assert r.details["A"] == pytest.approx(np.abs(np.cos(2 * np.pi * x)).mean() ** 2, rel=1e-12)


def test_abs_value_unsupported():
    with pytest.raises(SpecError):
        check_abs_value(cantor(), 4)


def test_mon_bound_dirac_and_positive():
    r = check_mon_bound(dirac(), range(-3, 4), 8)
    assert r.passed and r.measured == pytest.approx(0, abs=1e-12)
    r = check_mon_bound(Atomic((0.3, 0.7), ((0.2,), (0.9,))), [0], 8)
    assert r.measured == pytest.approx(0, abs=1e-12)


def test_mon_bound_signed_atoms(rng):
    for _ in range(5):
        spec = Atomic(tuple(rng.normal(size=3)), ((0.1,), (0.45,), (0.8,)))
        assert check_mon_bound(spec, range(-4, 5), 12).passed


def test_unweighted_truncated_bound_can_fail():
    # Without the Fejer weights the truncated bound is false: nu has weight on
    # odd eta and |nu| on even eta, and the box keeps four odd but three even.
    spec = Atomic((1.0, -1.0), ((0.0,), (0.5,)))
    M = 3
    nu = delta.build_tower(spec, 1, M)[1]
    absnu = delta.build_tower(Atomic((1.0, 1.0), ((0.0,), (0.5,))), 1, M)[1]
    lhs = np.sum(np.abs(nu.coeffs[M]) ** 2)
    rhs = np.sum(np.abs(absnu.coeffs[M]) ** 2)
    assert (lhs, rhs) == (64, 48)
    assert check_mon_bound(spec, [0], M).passed


def test_ac_equivalence_examples():
    r = check_ac_equivalence(ONE_PLUS_COS, 2, 64, 8)
    assert r.passed
    assert r.details["torus"] == pytest.approx(1.0298835, abs=1e-7)
    assert check_ac_equivalence(lebesgue(), 3, 16, 4).details["torus"] == 1.0
    with pytest.raises(SpecError, match="aliases"):
        check_ac_equivalence(ONE_PLUS_COS, 3, 8, 8)


def test_mollifier_transform_check():
    pb = PhiBracket((fejer_kernel(3), fejer_kernel(3)))
    r = check_mollifier_transform(pb, [(0, (0,)), (1, (1,)), (-2, (3,))], grid=64)
    assert r.passed and r.measured < 1e-12


def test_phin_chain_trivial_cases(rng):
    tabs = [[rng.random(8) + 0.1 for _ in range(3)] for _ in range(4)]
    tabs = [[t / t.mean() for t in row] for row in tabs]
    r = check_phin_chain([np.ones(8)] * 4, tabs, 1)
    assert r.passed
    assert r.details["lhs"] == pytest.approx(1) and r.details["rhs"] == pytest.approx(1)
    fam = [rng.random(8) for _ in range(3)] + [np.zeros(8)]
    r = check_phin_chain(fam, tabs, 1)
    assert r.passed and r.details["lhs"] == 0


def test_phin_chain_rejects_bad_tables():
    bad = [[np.r_[-1.0, np.full(7, 9 / 7)]] * 3] * 4
    with pytest.raises(ValueError, match="non-positive"):
        check_phin_chain([np.ones(8)] * 4, bad, 1)
    with pytest.raises(ValueError):
        check_phin_chain([np.ones(8)] * 4, [[np.full(8, 2.0)] * 3] * 4, 1)


def test_phin_chain_order_two(rng):
    fam = [rng.random(6) + 0.1 for _ in range(8)]
    tabs = [[checks.random_positive_table(rng, 6) for _ in range(4)] for _ in fam]
    assert check_phin_chain(fam, tabs, 2).passed


def test_bracket_convolution_identity(rng):
    f = rng.normal(size=(5, 5, 5)) + 1j * rng.normal(size=(5, 5, 5))
    tabs = [checks.random_positive_table(rng, 5) for _ in range(4)]
    assert check_bracket_convolution(f, tabs).passed


def test_results_serialise_and_replay():
    a = run_suite("all", seed=3, N=16, k=2, trials=1)
    b = run_suite("all", seed=3, N=16, k=2, trials=1)
    assert [r.to_json() for r in a] == [r.to_json() for r in b]
    assert [r.check for r in a] == list(checks.SUITES)
    for r in a:
        line = r.to_json()
        assert "\n" not in line
        assert set(json.loads(line)) >= {"check", "status", "measured", "tolerance", "seed",
                                         "spec_digest"}
    assert all(r.passed for r in a)


def test_suite_validation():
    with pytest.raises(ValueError):
        run_suite("nonsense")
    with pytest.raises(ValueError):
        run_suite("gcs", k=0)


def test_exact_radius():
    assert [exact_radius(k, 3) for k in (1, 2, 3, 4, 5)] == [3, 3, 6, 12, 24]


def test_dropping_conjugation_is_caught(monkeypatch):
    """A corrupted Delta step must not slip through the suite."""
    honest = delta.delta_step

    def corrupted(T0, T1, backend="auto", budget=None):
        T1 = SpectralTensor(T1.box, np.conj(T1.coeffs), real_measure=T1.real_measure)
        return honest(T0, T1, backend, budget)

    monkeypatch.setattr(delta, "delta_step", corrupted)
    results = run_suite("ac_equivalence", seed=7, N=16, k=3) + run_suite("gcs", seed=7, k=3)
    assert any(r.status == checks.FAIL for r in results)
