import math

import numpy as np
import pytest

from fraclab.constructions import (FiberRule, KakeyaSpec, LineFamily,
                                   arc_directions, brownian_image,
                                   brownian_image_1d, brownian_path, bump_weights,
                                   cantor_directions, full_circle_directions,
                                   furstenberg_measure, kakeya_measure,
                                   line_family_from_measure, product_kakeya,
                                   radial_kakeya, strip_mass)
from fraclab.errors import ConfigError, PreconditionError
from fraclab.fitting import loglog_fit
from fraclab.fourier import nudft, transform_values
from fraclab.ifs import ifs_measure, middle_third_spec
from fraclab.measures import dirac, product_measure, uniform_interval_measure


def test_single_direction_is_segment_measure():
    dirs = arc_directions(1, span=(0.0, 1e-9))
    mu = radial_kakeya(dirs, 64)
    # one horizontal fiber: y ~ 0, x = fiber midpoints
    assert np.allclose(mu.points[:, 1], 0.0, atol=1e-8)
    ref = uniform_interval_measure(0, 1, 64)
    assert np.allclose(np.sort(mu.points[:, 0]), ref.points[:, 0], atol=1e-12)
    assert mu.total_mass == pytest.approx(1.0, rel=1e-12)


def test_kakeya_mass_bookkeeping():
    dirs = arc_directions(37)
    mu = kakeya_measure(KakeyaSpec(dirs, FiberRule(kind="smooth", atoms=55)))
    rel = abs(mu.total_mass - 1.0)
    assert rel <= 1e-12


def test_kakeya_support_containment_from_tags():
    dirs = cantor_directions(0.5, 4)
    mu = kakeya_measure(KakeyaSpec(dirs, FiberRule(kind="uniform", atoms=17)))
    th = mu.tags["theta"]
    r = mu.tags["fiber_r"]
    rebuilt = np.column_stack([r * np.cos(th), r * np.sin(th)])
    assert np.array_equal(rebuilt, mu.points)


def test_kakeya_rotation_covariance():
    phi = 0.37
    base = arc_directions(24, span=(0.1, 0.9))
    rotated = arc_directions(24, span=(0.1 + phi, 0.9 + phi))
    fib = FiberRule(kind="uniform", atoms=33)
    mu = kakeya_measure(KakeyaSpec(base, fib))
    mu_rot = kakeya_measure(KakeyaSpec(rotated, fib))
    rng = np.random.default_rng(12)
    f = rng.normal(0, 40, size=(100, 2))
    rot = np.array([[math.cos(phi), math.sin(phi)],
                    [-math.sin(phi), math.cos(phi)]])
    a = nudft(mu_rot, f)
    b = nudft(mu, f @ rot.T)
    assert np.max(np.abs(a - b)) <= 1e-10


def test_full_circle_transform_is_radial():
    mu = radial_kakeya(full_circle_directions(512), 128)
    radius = 37.25
    angles = np.arange(8) * (2 * np.pi / 8)
    f = radius * np.column_stack([np.cos(angles), np.sin(angles)])
    vals = np.abs(transform_values(mu, f))
    assert np.max(vals) - np.min(vals) <= 1e-10


def test_radial_fiber_profiles():
    dirs = arc_directions(8)
    uni = radial_kakeya(dirs, 32, fiber_profile="uniform")
    smo = radial_kakeya(dirs, 32, fiber_profile="smooth")
    assert np.allclose(np.unique(uni.weights), 1 / (8 * 32))
    assert smo.total_mass == pytest.approx(1.0, rel=1e-12)
    with pytest.raises(ConfigError):
        radial_kakeya(dirs, 32, fiber_profile="cantor")


def test_product_kakeya_with_dirac_factor():
    mu = product_kakeya(dirac([0.25]), vertical_atoms=50)
    assert mu.n_atoms == 50
    assert np.allclose(mu.points[:, 0], 0.25)


def test_bump_weights_shape():
    w = bump_weights(np.linspace(0, 1, 101))
    assert w.sum() == pytest.approx(1.0, rel=1e-12)
    assert w[0] == 0.0 and w[-1] == 0.0
    assert np.argmax(w) == 50


def test_line_family_validation():
    with pytest.raises(ConfigError):
        LineFamily(np.array([0.0]), np.array([9.0]), np.array([1.0]))
    with pytest.raises(ConfigError):
        LineFamily(np.array([-0.1]), np.array([0.0]), np.array([1.0]))
    with pytest.raises(ConfigError):
        LineFamily(np.array([0.0]), np.array([0.0]), np.array([0.0]))


def test_furstenberg_single_line():
    fam = LineFamily(np.array([0.0]), np.array([0.0]), np.array([1.0]))
    mu = furstenberg_measure(fam, FiberRule(kind="uniform", atoms=25))
    assert np.allclose(mu.points[:, 1], 0.0, atol=1e-15)
    assert mu.total_mass == pytest.approx(1.0, rel=1e-12)


def test_furstenberg_mass_equals_family_mass():
    rng = np.random.default_rng(6)
    fam = LineFamily(rng.random(40) * math.pi * 0.999, rng.random(40),
                     rng.random(40) + 0.1)
    mu = furstenberg_measure(fam, FiberRule(kind="cantor", atoms=16,
                                            dimension=0.6))
    assert mu.total_mass == pytest.approx(fam.total_mass, rel=1e-12)


def test_furstenberg_line_geometry():
    # atoms of each fiber satisfy x . (-sin t, cos t) = a
    fam = LineFamily(np.array([0.7]), np.array([0.4]), np.array([1.0]))
    mu = furstenberg_measure(fam, FiberRule(kind="uniform", atoms=11))
    normal = np.array([-math.sin(0.7), math.cos(0.7)])
    assert np.allclose(mu.points @ normal, 0.4, atol=1e-12)


def test_strip_mass_full_when_alpha_near_one():
    fam = LineFamily(np.linspace(0.01, 3.0, 100), np.zeros(100), np.full(100, 0.01))
    xi = np.array([0.3, 0.7])
    assert strip_mass(fam, xi, 1 - 1e-12) == pytest.approx(fam.total_mass, rel=1e-12)


def test_strip_mass_degenerate_perpendicular_family():
    fam = LineFamily(np.zeros(10), np.linspace(0, 1, 10), np.full(10, 0.1))
    # all directions (1, 0) are orthogonal to (0, 1)
    assert strip_mass(fam, np.array([0.0, 1.0]), 0.01) == pytest.approx(1.0, rel=1e-12)


def test_strip_mass_arcsin_oracle():
    n = 10_000
    fam = LineFamily((np.arange(n) + 0.5) * math.pi / n, np.zeros(n),
                     np.full(n, 1.0 / n))
    alpha = math.sin(math.pi / 64)
    mass = strip_mass(fam, np.array([1.0, 0.0]), alpha)
    assert mass == pytest.approx(1.0 / 32.0, rel=0.1)


def test_strip_mass_monotone_in_alpha():
    rng = np.random.default_rng(7)
    fam = LineFamily(rng.random(500) * math.pi * 0.999, rng.random(500),
                     rng.random(500) + 0.05)
    xi = np.array([0.6, -0.3])
    masses = [strip_mass(fam, xi, a) for a in np.linspace(0.01, 0.99, 25)]
    assert np.all(np.diff(masses) >= 0)


def test_strip_mass_rejects_zero_frequency():
    fam = LineFamily(np.array([0.1]), np.array([0.0]), np.array([1.0]))
    with pytest.raises(ConfigError):
        strip_mass(fam, np.array([0.0, 0.0]), 0.5)
    with pytest.raises(ConfigError):
        strip_mass(fam, np.array([1.0, 0.0]), 1.5)


def test_cantor_line_family_strip_scaling():
    c7 = ifs_measure(middle_third_spec(7))
    pm = product_measure(c7, c7)
    fam = LineFamily(pm.points[:, 0] * math.pi * (1 - 1e-12), pm.points[:, 1],
                     pm.weights.copy())
    alphas = 2.0 ** -np.arange(2, 9)
    masses = np.array([strip_mass(fam, np.array([0.0, 1.0]), a) for a in alphas])
    slope, _, _ = loglog_fit(alphas, masses)
    t = 2 * math.log(2) / math.log(3)
    assert slope >= t - 1 - 0.15


def test_line_family_from_measure_roundtrip():
    c4 = ifs_measure(middle_third_spec(4))
    pm = product_measure(c4, c4)
    fam = line_family_from_measure(pm)
    assert fam.n_lines == pm.n_atoms
    assert fam.total_mass == pytest.approx(pm.total_mass, rel=1e-15)


def test_brownian_dirac_image():
    img = brownian_image(dirac([0.5]), 1.0, seed=3, steps=2 ** 14)
    assert img.n_atoms == 1
    assert img.weights[0] == 1.0


def test_brownian_determinism_and_seed_sensitivity():
    A = ifs_measure(middle_third_spec(6))
    a = brownian_image(A, 1.0, seed=5, steps=2 ** 14)
    b = brownian_image(A, 1.0, seed=5, steps=2 ** 14)
    c = brownian_image(A, 1.0, seed=6, steps=2 ** 14)
    assert np.array_equal(a.points, b.points)
    assert not np.array_equal(a.points, c.points)


def test_brownian_resolution_floor():
    with pytest.raises(PreconditionError):
        brownian_path(2 ** 12, 0, 2)


def test_brownian_1d_rescaled_to_unit_interval():
    A = ifs_measure(middle_third_spec(6))
    img = brownian_image_1d(A, 0.5, seed=9, steps=2 ** 14)
    assert img.bbox[0, 0] == 0.0 and img.bbox[0, 1] == 1.0
    assert img.points.min() >= 0.0 and img.points.max() <= 1.0


def test_kakeya_direction_mass_must_be_one():
    bad = uniform_interval_measure(0, 1, 4)
    doubled = bad.weights * 2
    from fraclab.measures import measure_from_points
    dirs = measure_from_points(doubled, bad.points)
    with pytest.raises(ConfigError):
        KakeyaSpec(directions=dirs)
