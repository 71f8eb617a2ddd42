import math

import numpy as np
import pytest
from scipy.integrate import quad

from quadnls.grid import (
    FieldPair,
    RadialField,
    RadialGrid,
    gamma_half_integer,
    gaussian_pair,
    integrate,
    laplacian,
    pair_from_samples,
    unit_sphere_area,
)
from quadnls.functionals import charge, evaluate, kinetic


def radial_oracle(f, n, upper=40.0):
    """Independent quadrature of int f dx over R^n for radial f."""
    val, _ = quad(lambda r: f(r) * r ** (n - 1), 0.0, upper, limit=400)
    return unit_sphere_area(n) * val


def test_gamma_half_integer():
    for n in range(1, 8):
        assert gamma_half_integer(n) == pytest.approx(math.gamma(n / 2), rel=1e-15)


def test_unit_sphere_areas():
    # circumference 2*pi, sphere 4*pi, and the n=1 even-function convention
    assert unit_sphere_area(1) == pytest.approx(2.0)
    assert unit_sphere_area(2) == pytest.approx(2 * math.pi)
    assert unit_sphere_area(3) == pytest.approx(4 * math.pi)
    assert unit_sphere_area(5) == pytest.approx(8 * math.pi**2 / 3)


def test_ball_volume_constant_integrand():
    # oracle: V_5(2) = omega_4 * 2^5 / 5 = 256 pi^2 / 15
    grid = RadialGrid(5, 2.0, 2048)
    exact = 256 * math.pi**2 / 15
    assert exact == pytest.approx(168.4412484452584, rel=1e-12)
    got = grid.integrate(np.ones(grid.num_nodes))
    assert got == pytest.approx(exact, rel=10 * (grid.h / grid.r_max) ** 2)


def test_weights_sum_all_dimensions():
    for n in range(1, 6):
        grid = RadialGrid(n, 7.5, 600)
        exact = unit_sphere_area(n) * grid.r_max**n / n
        rel = abs(grid.integrate(np.ones(grid.num_nodes)) - exact) / exact
        assert rel <= 10 * (grid.h / grid.r_max) ** 2


def test_zero_integrand():
    grid = RadialGrid(3, 5.0, 128)
    assert grid.integrate(np.zeros(128)) == 0.0


def test_gaussian_moment():
    # oracle: int e^{-2 r^2} dx over R^5 = (pi/2)^{5/2}
    grid = RadialGrid(5, 8.0, 4096)
    expected = radial_oracle(lambda r: math.exp(-2 * r * r), 5)
    assert expected == pytest.approx((math.pi / 2) ** 2.5, rel=1e-12)
    assert expected == pytest.approx(3.0924286813991433, rel=1e-12)
    got = grid.integrate(np.exp(-2 * grid.nodes**2))
    assert got == pytest.approx(expected, rel=1e-8)


def test_low_order_polynomial_quadrature():
    for n in range(1, 6):
        grid = RadialGrid(n, 4.0, 512)
        for k in (0, 1, 2):
            exact = unit_sphere_area(n) * grid.r_max ** (n + k) / (n + k)
            got = grid.integrate(grid.nodes**k)
            assert got == pytest.approx(exact, rel=10 * (grid.h / grid.r_max) ** 2)


def test_non_finite_rejected():
    grid = RadialGrid(2, 1.0, 16)
    bad = np.ones(16)
    bad[3] = np.nan
    with pytest.raises(ValueError, match="finite"):
        integrate(grid, bad)


def test_dimension_bounds():
    with pytest.raises(ValueError):
        RadialGrid(0, 1.0, 16)
    with pytest.raises(ValueError):
        RadialGrid(6, 1.0, 16)


def test_laplacian_constant():
    grid = RadialGrid(5, 10.0, 256)
    field = RadialField(grid, np.ones(256))
    lap = laplacian(field).samples
    # interior rows annihilate constants up to band-assembly rounding; the
    # Dirichlet boundary row acts at full O(1/h^2) strength
    row_scale = 2.0 / grid.h**2
    assert np.max(np.abs(lap[:-1])) <= 1e-12 * row_scale
    assert abs(lap[-1]) > 0.1 * row_scale


def test_laplacian_quadratic():
    # Lap r^2 = 2n, second-order away from origin and boundary
    for n in (1, 2, 3, 4, 5):
        grid = RadialGrid(n, 10.0, 1000)
        lap = grid.apply_laplacian(grid.nodes**2)
        mid = slice(300, 700)
        assert np.max(np.abs(lap[mid] - 2 * n)) < 2 * n * 1e-4


def test_laplacian_needs_three_nodes():
    grid = RadialGrid(3, 1.0, 2)
    with pytest.raises(ValueError, match="3 nodes"):
        grid.laplacian_diagonals()


def test_laplacian_self_adjoint():
    rng = np.random.default_rng(7)
    for n in (1, 3, 5):
        grid = RadialGrid(n, 9.0, 400)
        f = rng.standard_normal(400)
        g = rng.standard_normal(400)
        lhs = grid.inner(grid.apply_laplacian(f), g)
        rhs = grid.inner(f, grid.apply_laplacian(g))
        assert abs(lhs - rhs) <= 1e-12 * abs(lhs)


def test_kinetic_two_routes_agree():
    rng = np.random.default_rng(11)
    grid = RadialGrid(5, 12.0, 512)
    pair = pair_from_samples(grid, rng.standard_normal(512), rng.standard_normal(512))
    from quadnls.functionals import kinetic_via_laplacian

    k1 = kinetic(pair, 0.5)
    k2 = kinetic_via_laplacian(pair, 0.5)
    assert abs(k1 - k2) <= 1e-10 * k1


def test_materialize_invariance():
    grid = RadialGrid(4, 10.0, 256)
    pair = gaussian_pair(grid)
    lazy = FieldPair(pair.u.scaled(2.5, 0.7), pair.v.scaled(2.5, 0.7))
    a = evaluate(lazy, 0.5)
    b = evaluate(lazy.materialized(), 0.5)
    assert a.Q == pytest.approx(b.Q, rel=1e-13)
    assert a.K == pytest.approx(b.K, rel=1e-13)
    assert a.P == pytest.approx(b.P, rel=1e-13)


def test_field_validation():
    grid = RadialGrid(3, 4.0, 64)
    with pytest.raises(ValueError, match="shape"):
        RadialField(grid, np.zeros(32))
    with pytest.raises(ValueError, match="amp"):
        RadialField(grid, np.zeros(64), amp=0.0)
    with pytest.raises(ValueError, match="dilation"):
        RadialField(grid, np.zeros(64), dilation=-1.0)


def test_pair_grid_mismatch():
    g1 = RadialGrid(3, 4.0, 64)
    g2 = RadialGrid(3, 5.0, 64)
    with pytest.raises(ValueError, match="different effective grids"):
        FieldPair(RadialField(g1, np.zeros(64)), RadialField(g2, np.zeros(64)))


def test_n1_full_line_convention():
    # the measure doubles each half-line cell: int_{-3}^{3} 1 dx = 6
    grid = RadialGrid(1, 3.0, 300)
    assert grid.integrate(np.ones(300)) == pytest.approx(6.0, rel=1e-12)
    # charge of exp(-r^2) on the line: sqrt(pi/2)
    pair = pair_from_samples(grid, np.exp(-grid.nodes**2), np.zeros(300))
    assert charge(pair) == pytest.approx(math.sqrt(math.pi / 2), rel=1e-6)
