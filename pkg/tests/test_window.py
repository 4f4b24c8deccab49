import csv

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from needlet_density.window import build_window, localization_integral, partition_of_unity_defect


def test_plateau_and_support(window):
    assert window.phi(0.3) == 1.0
    assert window.b(1.0) == pytest.approx(1.0, abs=1e-15)
    assert window.b(0.4) == 0.0
    assert window.phi(1.0) == 0.0 and window.phi(0.5) == 1.0


@pytest.mark.parametrize("xi", [1.0, 3.7, 100.0])
def test_partition_examples(window, xi):
    assert partition_of_unity_defect(window, xi, 10) < 1e-12


def test_partition_rejects_small_xi(window):
    with pytest.raises(ValueError):
        partition_of_unity_defect(window, 0.9, 10)


@given(st.floats(1.0, 1000.0))
def test_partition_property(xi):
    w = build_window()
    assert partition_of_unity_defect(w, xi, 12) < 1e-10


def test_b_bounded_and_supported(window):
    xi = np.linspace(0, 3, 10_000)
    b = window.b(xi)
    assert np.all((b >= 0) & (b <= 1))
    outside = (xi < 0.5) | (xi > 2)
    assert np.all(b[outside] == 0)


def test_phi_symmetric_nonincreasing(window):
    xi = np.linspace(0, 2, 10_001)
    phi = window.phi(xi)
    assert np.all(np.diff(phi) <= 1e-14)
    np.testing.assert_array_equal(window.phi(-xi), phi)


def test_phi_smooth_bridge(window):
    # the bridge is flat at both ends (all derivatives of the bump vanish)
    h = 1e-3
    assert 1.0 - window.phi(0.5 + h) < 1e-12
    assert window.phi(1.0 - h) < 1e-12


def test_localization_integral_value(window):
    assert localization_integral(window) == pytest.approx(0.107, abs=0.003)


def test_localization_integral_indicator(window):
    assert localization_integral(window, b2=lambda t: np.ones_like(t)) == pytest.approx(15 / 64, rel=1e-14)


def test_localization_integral_resolution_doubling():
    a = localization_integral(build_window(4096))
    b = localization_integral(build_window(8192))
    assert abs(a - b) < 1e-10


def test_level_weights_cover_band(window):
    w = window.level_weights(3)
    assert len(w) == 17
    nz = np.flatnonzero(w)
    assert nz.min() > 4 and nz.max() < 16


def test_dump_csv(window, tmp_path):
    path = tmp_path / "b.csv"
    window.dump_csv(path, xi=[0.25, 1.0, 1.5])
    rows = list(csv.reader(open(path)))
    assert rows[0] == ["xi", "phi", "b"]
    assert float(rows[2][2]) == pytest.approx(1.0)
