import csv
import math
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from needlet_density.cubature import build_rule, integrate, product_rule
from needlet_density.experiments import lattice
from needlet_density.frame import (BesovParams, CoefficientPyramid, NeedletAtom, PyramidParseError,
                                   analyze, besov_norm, coefficient_covariance, covariance_profile,
                                   default_rules, l2_norm_squared, load_pyramid, needlet_eval,
                                   needlet_matrix, save_pyramid, synthesize, zero_sums)
from needlet_density.sphere import FOUR_PI, geodesic_distance, legendre_kernel, projector_kernel_sum

from conftest import random_unit
from oracles import zonal_series

DATA = Path(__file__).parent / "data"


def typical_atom(j):
    """Atom at the node whose weight is closest to the level's mean weight."""
    rule = build_rule(j)
    k = int(np.argmin(np.abs(rule.weights - FOUR_PI / len(rule))))
    return NeedletAtom.from_rule(rule, k)


def reference_profiles():
    with open(DATA / "reference_profiles.csv") as fh:
        rows = list(csv.DictReader(line for line in fh if not line.startswith("#")))
    out = {}
    for r in rows:
        out.setdefault((int(r["j"]), r["kind"]), []).append((float(r["theta"]), float(r["value"])))
    return {k: np.array(v) for k, v in out.items()}


@pytest.mark.parametrize("j,peak", [(3, 1.476), (4, 2.876)])
def test_needlet_peak(window, j, peak):
    atom = typical_atom(j)
    assert needlet_eval(atom, atom.center, window) == pytest.approx(peak, rel=0.20)


def test_profiles_match_reference_with_weight_four_to_minus_j(window):
    # the tabulated curves are reproduced exactly when lambda = 2^(-2j)
    for (j, kind), data in reference_profiles().items():
        lam = 2.0 ** (-2 * j)
        t = np.cos(data[:, 0])
        if kind == "needlet":
            got = math.sqrt(lam) * projector_kernel_sum(window.level_weights(j), t)
        else:
            got = covariance_profile(j, data[:, 0], window, lam)
        np.testing.assert_allclose(got, data[:, 1], atol=2e-6)


def test_needlet_band(window):
    atom = typical_atom(2)
    x = random_unit(np.random.default_rng(0), 50)
    coeffs = window.level_weights(2)
    assert np.all(coeffs[:3] == 0) and coeffs[-1] == 0
    direct = math.sqrt(atom.weight) * sum(coeffs[l] * legendre_kernel(l, x @ atom.center)
                                          for l in range(3, 8))
    np.testing.assert_allclose(needlet_eval(atom, x, window), direct, atol=1e-13)


@pytest.mark.parametrize("j", [0, 2, 4])
def test_needlet_integrates_to_zero(window, j):
    atom = typical_atom(j)
    assert abs(integrate(build_rule(j + 1), needlet_eval(atom, build_rule(j + 1).nodes, window))) < 1e-12


@pytest.mark.parametrize("j", [1, 3, 4])
def test_l2_norm_against_cubature(window, j):
    atom = typical_atom(j)
    rule = build_rule(j + 1)
    psi = needlet_eval(atom, rule.nodes, window)
    assert integrate(rule, psi**2) == pytest.approx(l2_norm_squared(atom, window), abs=1e-8)


def test_l2_norm_bounded_in_j(window):
    vals = [l2_norm_squared(typical_atom(j), window) for j in range(2, 6)]
    # level 6 has no shipped spiral grid; use its nominal weight 4 pi / ceil(1.2 * 2^16)
    nominal = FOUR_PI / math.ceil(1.2 * 2**16)
    vals.append(l2_norm_squared(NeedletAtom(6, 0, np.array([0.0, 0.0, 1.0]), nominal), window))
    assert 0.08 < min(vals) and max(vals) < 0.11
    assert vals[-1] == pytest.approx(0.107, rel=0.25)


def test_covariance_diagonal_is_l2(window):
    rule = build_rule(3)
    for k in (0, 100, 1000):
        atom = NeedletAtom.from_rule(rule, k)
        assert coefficient_covariance(3, k, k, window, rule) == pytest.approx(
            l2_norm_squared(atom, window), rel=1e-13)


@pytest.mark.xfail(strict=True, reason="the reference value assumes lambda = 2^(-2j); weights that "
                                        "sum to 4 pi put the j=3 diagonal near 0.094")
def test_covariance_peak_reference(window):
    atom = typical_atom(3)
    rule = build_rule(3)
    assert coefficient_covariance(3, atom.index, atom.index, window, rule) == pytest.approx(0.144, rel=0.2)


def test_covariance_symmetric_and_decays(window):
    rule = build_rule(4)
    assert coefficient_covariance(4, 3, 70, window, rule) == coefficient_covariance(4, 70, 3, window, rule)
    lam = FOUR_PI / len(rule)
    assert abs(covariance_profile(4, 0.6, window, lam)) <= 0.15 * covariance_profile(4, 0.0, window, lam)


def test_localization_bound_stable(window):
    x = random_unit(np.random.default_rng(4), 10_000)
    bounds = {}
    for j in (3, 4, 5):
        atom = typical_atom(j)
        d = geodesic_distance(x, atom.center)
        pts = np.vstack([x, atom.center])
        d = np.append(d, 0.0)
        ratio = np.abs(needlet_eval(atom, pts, window)) * (1 + 2**j * d) ** 3 / 2**j
        bounds[j] = ratio.max()
    assert max(bounds[4], bounds[5]) <= 2 * bounds[3]


def test_analyze_constant_gives_zero(window):
    pyr = analyze(lambda x: np.full(len(x), 1 / FOUR_PI), 3, window, band_limit=0)
    assert pyr.kind == "exact"
    assert pyr.constant == pytest.approx(1 / FOUR_PI, rel=1e-14)
    assert max(np.abs(b).max() for b in pyr.levels) < 1e-15


@pytest.mark.parametrize("j0", [1, 2, 3])
def test_analyze_needlet_recovers_norm(window, j0):
    atom = typical_atom(j0)
    pyr = analyze(lambda x: needlet_eval(atom, x, window), 3, window, band_limit=2 ** (j0 + 1))
    assert pyr.levels[j0][atom.index] == pytest.approx(l2_norm_squared(atom, window), rel=1e-10)


def test_analyze_rejects_non_finite(window):
    with pytest.raises(ValueError):
        analyze(lambda x: np.full(len(x), np.inf), 1, window, band_limit=0)


def test_zero_sums_exact_pyramid(window):
    f = zonal_series(np.random.default_rng(9), 20, terms=6)
    pyr = analyze(f, 4, window, band_limit=20)
    assert np.all(np.abs(zero_sums(pyr, default_rules(4))) < 1e-9)


def test_reconstruction_degree_three(window):
    f = lambda x: 1 / FOUR_PI + 0.01 * legendre_kernel(3, np.atleast_2d(x)[:, 2])
    pyr = analyze(f, 3, window, band_limit=3)
    x = random_unit(np.random.default_rng(1), 100)
    np.testing.assert_allclose(synthesize(pyr, x, window), f(x), atol=1e-7)


def test_reconstruction_up_to_two_to_the_J(window):
    # levels 0..J cover every degree 1..2^J exactly
    f = zonal_series(np.random.default_rng(2), 8, terms=8)
    pyr = analyze(f, 3, window, band_limit=8)
    x = random_unit(np.random.default_rng(3), 200)
    np.testing.assert_allclose(synthesize(pyr, x, window), f(x), atol=1e-7)


def test_degree_above_two_to_the_J_not_reconstructed(window):
    f = lambda x: legendre_kernel(12, np.atleast_2d(x)[:, 2])
    pyr = analyze(f, 3, window, band_limit=12)
    x = random_unit(np.random.default_rng(3), 50)
    assert np.max(np.abs(synthesize(pyr, x, window) - f(x))) > 1e-3


def test_synthesis_routes_agree(window):
    f = zonal_series(np.random.default_rng(5), 15, terms=4)
    pyr = analyze(f, 3, window, band_limit=15)
    x = random_unit(np.random.default_rng(6), 300)
    a = synthesize(pyr, x, window, method="direct")
    b = synthesize(pyr, x, window, method="harmonic")
    np.testing.assert_allclose(a, b, atol=1e-12)


def test_synthesis_of_zero_pyramid(window):
    rules = default_rules(2)
    pyr = CoefficientPyramid([np.zeros(len(r)) for r in rules])
    assert synthesize(pyr, np.array([0.0, 0.6, 0.8]), window) == pytest.approx(1 / FOUR_PI, abs=1e-17)


def test_synthesis_linear_in_beta(window):
    f = zonal_series(np.random.default_rng(7), 6, terms=3)
    pyr = analyze(f, 2, window, band_limit=6)
    x = random_unit(np.random.default_rng(8), 20)
    c = pyr.constant
    lhs = synthesize(pyr.scaled(2.5), x, window) - c
    rhs = 2.5 * (synthesize(pyr, x, window) - c)
    np.testing.assert_allclose(lhs, rhs, atol=1e-13)


def test_frame_inequality_constant_stable(window):
    rng = np.random.default_rng(11)
    ls = np.arange(1, 64)
    u = random_unit(rng, len(ls))
    amp = rng.standard_normal(len(ls)) / ls

    def f(x):
        x = np.atleast_2d(x)
        return sum(a * legendre_kernel(int(l), x @ v) for a, l, v in zip(amp, ls, u))

    pyr = analyze(f, 5, window, band_limit=63)
    rule = product_rule(254)
    vals = f(rule.nodes)
    grid = lattice((128, 256))[2]
    norms = {1: integrate(rule, np.abs(vals)), 2: math.sqrt(integrate(rule, vals**2)),
             math.inf: float(np.abs(f(grid)).max())}
    for p, fnorm in norms.items():
        inv = 0.0 if math.isinf(p) else 1 / p
        c = [np.linalg.norm(pyr.levels[j], ord=p) * 2.0 ** (2 * j * (0.5 - inv)) / fnorm for j in range(2, 6)]
        assert max(c) <= 4 * c[0] and min(c) >= c[0] / 4, (p, c)


def test_besov_norm_zero_and_single():
    rules = default_rules(3)
    levels = [np.zeros(len(r)) for r in rules]
    assert besov_norm(CoefficientPyramid(levels), BesovParams(1.0)) == 0.0
    levels[2][5] = -0.3
    for r, q in [(2, 2), (1, math.inf), (math.inf, 1), (3, 7)]:
        s = 0.7
        inv = 0.0 if math.isinf(r) else 1 / r
        want = 2.0 ** (2 * (s + 2 * (0.5 - inv))) * 0.3
        assert besov_norm(CoefficientPyramid(levels), BesovParams(s, r, q)) == pytest.approx(want)


def test_besov_params_validation():
    with pytest.raises(ValueError):
        BesovParams(0.0)
    with pytest.raises(ValueError):
        BesovParams(1.0, r=0.5)


@settings(max_examples=50)
@given(arrays(np.float64, st.integers(1, 40), elements=st.floats(-10, 10)),
       st.floats(1.0, 8.0), st.floats(0.0, 8.0))
def test_level_norm_monotone(v, r, extra):
    p = r + extra
    assert np.linalg.norm(v, ord=p) <= np.linalg.norm(v, ord=r) * (1 + 1e-12) + 1e-300


def test_pyramid_roundtrip(tmp_path, window):
    f = zonal_series(np.random.default_rng(12), 7, terms=3)
    pyr = analyze(f, 2, window, band_limit=7)
    path = tmp_path / "c.txt"
    save_pyramid(pyr, path)
    back = load_pyramid(path)
    assert back.kind == "exact" and back.J == 2 and back.constant == pyr.constant
    for a, b in zip(back.levels, pyr.levels):
        np.testing.assert_array_equal(a, b)


def test_pyramid_parse_errors(tmp_path):
    path = tmp_path / "c.txt"
    path.write_text("needlet-coeffs v1 J=1 kind=exact\nconst 0.1\n0 99 1.0\n")
    with pytest.raises(PyramidParseError):
        load_pyramid(path)
    path.write_text("garbage\n")
    with pytest.raises(PyramidParseError):
        load_pyramid(path)


def test_pyramid_level_lengths_checked():
    with pytest.raises(ValueError):
        CoefficientPyramid([np.zeros(20), np.zeros(10)]).check_rules(default_rules(1))


def test_needlet_matrix_matches_eval(window):
    rule = build_rule(2)
    x = random_unit(np.random.default_rng(13), 30)
    mat = needlet_matrix(rule, x, window)
    np.testing.assert_allclose(mat[:, 17], needlet_eval(NeedletAtom.from_rule(rule, 17), x, window),
                               atol=1e-14)
