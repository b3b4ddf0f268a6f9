import numpy as np
import pytest

from fraclab.errors import ConfigError, PreconditionError
from fraclab.estimators import ball_mass_profile
from fraclab.measures import (dirac, load_measure, measure_from_points,
                              product_measure, pushforward, save_measure,
                              uniform_interval_measure)


def test_uniform_partition_atoms():
    mu = uniform_interval_measure(0.0, 1.0, 4)
    assert np.allclose(mu.points[:, 0], [0.125, 0.375, 0.625, 0.875])
    assert np.allclose(mu.weights, 0.25)
    assert mu.total_mass == pytest.approx(1.0, abs=1e-15)


def test_uniform_single_atom():
    mu = uniform_interval_measure(0.0, 1.0, 1)
    assert mu.points[0, 0] == pytest.approx(0.5)
    assert mu.weights[0] == 1.0


def test_uniform_shifted_interval():
    mu = uniform_interval_measure(2.0, 3.0, 10)
    assert mu.total_mass == pytest.approx(1.0, rel=1e-15)
    assert np.all(mu.points >= 2.0) and np.all(mu.points <= 3.0)


def test_uniform_rejects_bad_input():
    with pytest.raises(ConfigError):
        uniform_interval_measure(1.0, 0.0, 5)
    with pytest.raises(ConfigError):
        uniform_interval_measure(0.0, 1.0, 0)
    with pytest.raises(ConfigError):
        uniform_interval_measure(0.0, float("inf"), 5)


def test_measure_invariants():
    with pytest.raises(ConfigError):
        measure_from_points([1.0, -1.0], [[0.0], [1.0]])
    with pytest.raises(ConfigError):
        measure_from_points([], np.empty((0, 1)))
    with pytest.raises(ConfigError):
        measure_from_points([1.0], [[0.0, 0.0, 0.0]])
    # bounding box sides are capped at 16
    with pytest.raises(ConfigError):
        measure_from_points([1.0, 1.0], [[0.0], [17.0]])


def test_pushforward_identity():
    mu = uniform_interval_measure(0.0, 1.0, 64)
    out = pushforward(mu, lambda p: p)
    assert np.array_equal(out.points, mu.points)
    assert np.array_equal(out.weights, mu.weights)


def test_pushforward_circle_embedding():
    mu = uniform_interval_measure(0.0, np.pi / 2, 100)
    out = pushforward(mu, lambda p: np.column_stack([np.cos(p[:, 0]),
                                                     np.sin(p[:, 0])]))
    assert out.dim == 2
    assert out.n_atoms == 100
    assert out.total_mass == mu.total_mass  # weights untouched
    radii = np.sqrt((out.points ** 2).sum(axis=1))
    assert np.allclose(radii, 1.0, atol=1e-12)


def test_pushforward_rejects_nonfinite_images():
    mu = uniform_interval_measure(0.0, 1.0, 8)
    with pytest.raises(ConfigError):
        pushforward(mu, lambda p: np.full_like(p, np.nan))


def test_projection_ball_masses_match_1d_lebesgue():
    # project the product of two uniform measures onto the x-axis and
    # compare per-scale ball masses against the 1-D uniform measure
    square = product_measure(uniform_interval_measure(0.0, 1.0, 100),
                             uniform_interval_measure(0.0, 1.0, 100))
    proj = pushforward(square, lambda p: p[:, 0])
    line = uniform_interval_measure(0.0, 1.0, 100)
    scales = [2.0 ** -k for k in range(2, 6)]
    pa = ball_mass_profile(proj, scales, validate_window=False)
    pb = ball_mass_profile(line, scales, validate_window=False)
    tol = 2.0 / np.sqrt(square.n_atoms)
    assert np.all(np.abs(pa.max_mass - pb.max_mass) <= tol)


def test_product_of_diracs():
    mu = product_measure(dirac([0.3]), dirac([0.7]))
    assert mu.n_atoms == 1
    assert np.allclose(mu.points[0], [0.3, 0.7])
    assert mu.weights[0] == 1.0


def test_product_grid():
    mu = product_measure(uniform_interval_measure(0, 1, 10),
                         uniform_interval_measure(0, 1, 10))
    assert mu.n_atoms == 100
    assert np.allclose(mu.weights, 0.01)


def test_product_mass_multiplies_exactly():
    a = measure_from_points([0.3, 0.9], [[0.1], [0.9]])
    b = measure_from_points([0.2, 0.5, 1.1], [[0.2], [0.5], [0.8]])
    mu = product_measure(a, b)
    rel = abs(mu.total_mass - a.total_mass * b.total_mass) / mu.total_mass
    assert rel <= 1e-12


def test_product_atom_cap():
    a = uniform_interval_measure(0, 1, 2100)
    with pytest.raises(PreconditionError):
        product_measure(a, a)


def test_product_dimension_check():
    sq = product_measure(uniform_interval_measure(0, 1, 4),
                         uniform_interval_measure(0, 1, 4))
    with pytest.raises(ConfigError):
        product_measure(sq, uniform_interval_measure(0, 1, 4))


def test_measure_file_roundtrip(tmp_path):
    rng = np.random.default_rng(11)
    mu = measure_from_points(rng.random(37) + 0.01, rng.random((37, 2)))
    path = tmp_path / "m.txt"
    save_measure(mu, path)
    header = path.read_text().splitlines()[0]
    assert header.startswith("dim=2 mass=") and header.endswith("n=37")
    back = load_measure(path)
    # 17 significant digits round-trip float64 exactly
    assert np.array_equal(back.points, mu.points)
    assert np.array_equal(back.weights, mu.weights)


def test_measure_file_rejects_garbage(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("dim=2 mass=1.0\n1.0 0.0 0.0\n")
    with pytest.raises(ConfigError):
        load_measure(path)
    path.write_text("dim=1 mass=1.0 n=2\n0.5 0.1\n")
    with pytest.raises(ConfigError):
        load_measure(path)


def test_builders_are_deterministic():
    a = uniform_interval_measure(0, 1, 123)
    b = uniform_interval_measure(0, 1, 123)
    assert np.array_equal(a.points, b.points)
    assert np.array_equal(a.weights, b.weights)
