import numpy as np
import pytest

from fraclab.errors import PreconditionError
from fraclab.estimators import (ball_mass_profile, box_counting, box_counts,
                                frostman_exponent, geometric_scales)
from fraclab.ifs import ifs_measure, middle_third_spec
from fraclab.measures import (dirac, measure_from_points, product_measure,
                              uniform_interval_measure)

LOG2_OVER_LOG3 = np.log(2.0) / np.log(3.0)


def test_cantor_triadic_ball_masses_exact():
    mu = ifs_measure(middle_third_spec(12))
    prof = ball_mass_profile(mu, [3.0 ** -k for k in range(1, 8)])
    assert np.array_equal(prof.max_mass, [2.0 ** -k for k in range(1, 8)])


def test_cantor_frostman_exponent():
    mu = ifs_measure(middle_third_spec(12))
    est = frostman_exponent(mu, (3.0 ** -7, 1 / 3), base=3.0)
    assert est.dim_value == pytest.approx(LOG2_OVER_LOG3, abs=0.05)
    assert est.residual < 1e-10


def test_uniform_frostman_exponent():
    mu = uniform_interval_measure(0, 1, 10_000)
    est = frostman_exponent(mu, (2.0 ** -8, 2.0 ** -3))
    assert est.dim_value == pytest.approx(1.0, abs=0.05)


def test_dirac_frostman_exponent_zero():
    mu = dirac([0.0])
    est = frostman_exponent(mu, (2.0 ** -8, 2.0 ** -2))
    assert est.dim_value == 0.0


def test_frostman_needs_six_scales():
    mu = uniform_interval_measure(0, 1, 10_000)
    with pytest.raises(PreconditionError):
        frostman_exponent(mu, (2.0 ** -4, 2.0 ** -2))


def test_frostman_refuses_subatomic_radii():
    mu = uniform_interval_measure(0, 1, 100)
    with pytest.raises(PreconditionError):
        frostman_exponent(mu, (2.0 ** -12, 2.0 ** -2))


def test_cantor_box_counts_exact():
    mu = ifs_measure(middle_third_spec(12))
    counts = box_counts(mu, [3.0 ** -k for k in range(1, 11)])
    assert list(counts) == [2 ** k for k in range(1, 11)]


def test_uniform_box_dimension():
    mu = uniform_interval_measure(0, 1, 10_000)
    est = box_counting(mu, (2.0 ** -9, 2.0 ** -2))
    assert est.dim_value == pytest.approx(1.0, abs=0.05)


def test_cantor_box_dimension():
    mu = ifs_measure(middle_third_spec(12))
    est = box_counting(mu, (3.0 ** -7, 1 / 3), base=3.0)
    assert est.dim_value == pytest.approx(LOG2_OVER_LOG3, abs=0.05)
    assert est.extras["lower_proxy"] == pytest.approx(LOG2_OVER_LOG3, abs=0.05)
    assert est.extras["upper_proxy"] == pytest.approx(LOG2_OVER_LOG3, abs=0.05)


def test_cantor_square_box_dimension():
    c8 = ifs_measure(middle_third_spec(8))
    mu = product_measure(c8, c8)
    est = box_counting(mu, (3.0 ** -6, 1 / 3), base=3.0)
    assert est.dim_value == pytest.approx(2 * LOG2_OVER_LOG3, abs=0.08)


def test_ball_mass_kernel_matches_bruteforce_2d():
    rng = np.random.default_rng(3)
    pts = rng.random((400, 2))
    w = rng.random(400) + 0.05
    mu = measure_from_points(w, pts)
    for r in (0.31, 0.11, 0.043):
        prof = ball_mass_profile(mu, [r], grid_spacing=0.5, validate_window=False)
        brute = max(w[((pts - c) ** 2).sum(axis=1) <= r * r].sum() for c in pts)
        assert prof.max_mass[0] == pytest.approx(brute, rel=1e-12)


def test_ball_masses_deterministic():
    rng = np.random.default_rng(5)
    mu = measure_from_points(rng.random(2000) + 0.01, rng.random((2000, 2)))
    a = frostman_exponent(mu, (2.0 ** -6, 2.0 ** -1))
    b = frostman_exponent(mu, (2.0 ** -6, 2.0 ** -1))
    assert a.dim_value == b.dim_value
    assert a.extras["max_mass"] == b.extras["max_mass"]


def test_geometric_scales_ladder():
    s = geometric_scales(1 / 64, 0.5)
    assert np.allclose(s, [0.5 / 2 ** k for k in range(6)])
    with pytest.raises(PreconditionError):
        geometric_scales(0.5, 0.25)
