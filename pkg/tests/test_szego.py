"""Szego kernels, Blaschke products, TM systems, and the selection lattice."""

import numpy as np
import pytest

from afdkit import (
    CircleSignal,
    DiscGrid,
    blaschke_at,
    blaschke_product,
    inner_product,
    multiple_kernel,
    norm,
    reproducing_value,
    szego_eval,
    tm_phase,
    tm_system,
    to_spectrum,
)
from afdkit.szego import unit_circle
from conftest import fd_multiple_kernel, random_analytic

N = 256


def test_szego_kernel_at_origin_is_constant():
    e0 = szego_eval(0.0, N)
    assert np.max(np.abs(e0.samples - 1.0)) <= 1e-14


def test_szego_kernel_norm_deficit():
    # grid norm is sqrt(1 - |a|^n): unit well inside, a known deficit at the rim
    for a in (0.2, 0.5j, -0.6 + 0.3j, 0.85, 0.99):
        e = szego_eval(a, N)
        assert norm(e) == pytest.approx(np.sqrt(1.0 - abs(a) ** N), abs=1e-12)
    assert norm(szego_eval(0.85, N)) == pytest.approx(1.0, abs=1e-12)


def test_szego_kernel_rejects_rim_points():
    with pytest.raises(ValueError):
        szego_eval(1.0, N)
    with pytest.raises(ValueError):
        szego_eval(0.8 + 0.8j, N)


def test_reproducing_identity_frozen_value():
    z = CircleSignal(unit_circle(N))
    val = inner_product(z, szego_eval(0.5, N))
    assert val == pytest.approx(0.4330127018922193, abs=1e-15)
    assert reproducing_value(z, 0.5) == pytest.approx(val, abs=1e-15)


def test_reproducing_value_examples():
    one = CircleSignal(np.ones(N))
    assert reproducing_value(one, 0.8) == pytest.approx(0.6, abs=1e-12)
    zsq = CircleSignal(unit_circle(N) ** 2)
    assert reproducing_value(zsq, 0.5j) == pytest.approx(-0.21650635094610965, abs=1e-15)


def test_reproducing_identity_matches_quadrature(rng):
    # the truncated-kernel convention keeps this exact at any radius
    for a in (0.3 + 0.4j, -0.7, 0.9j, 0.96, 0.998):
        g = random_analytic(rng, N)
        lhs = inner_product(g, szego_eval(a, N))
        assert abs(lhs - reproducing_value(g, a)) <= 1e-12 * (1.0 + abs(lhs))


def test_reproducing_identity_sees_only_analytic_part(rng):
    # the kernel is analytic, so <g, e_a> only picks up g's analytic band
    g = CircleSignal(rng.normal(size=N) + 1j * rng.normal(size=N))
    a = 0.4 - 0.3j
    lhs = inner_product(g, szego_eval(a, N))
    assert abs(lhs - reproducing_value(g, a)) <= 1e-12 * (1.0 + abs(lhs))


def test_blaschke_single_zero_at_origin():
    b = blaschke_product((0.0,), N)
    assert np.max(np.abs(b.samples - unit_circle(N))) <= 1e-14


def test_blaschke_unimodular(rng):
    for _ in range(5):
        params = 0.95 * np.sqrt(rng.uniform(size=4)) * np.exp(2j * np.pi * rng.uniform(size=4))
        b = blaschke_product(params, N)
        assert np.max(np.abs(np.abs(b.samples) - 1.0)) <= 1e-12


def test_blaschke_empty_product_is_one():
    b = blaschke_product((), N)
    assert np.max(np.abs(b.samples - 1.0)) == 0.0
    assert blaschke_at((), 0.3 + 0.1j) == 1.0


def test_blaschke_at_point_value():
    assert blaschke_at((0.5, 0.5), 1.0) == pytest.approx(1.0, abs=1e-15)
    # interior zero
    assert abs(blaschke_at((0.3 + 0.2j, -0.4), 0.3 + 0.2j)) <= 1e-15


def test_multiple_kernel_order_one_is_szego():
    for a in (0.0, 0.5, -0.3 + 0.6j):
        k1 = multiple_kernel(a, 1, N)
        e = szego_eval(a, N)
        scale = np.sqrt(1.0 - abs(a) ** 2)
        assert np.max(np.abs(k1.samples * scale - e.samples)) <= 1e-12


def test_multiple_kernel_at_origin():
    z = unit_circle(N)
    k2 = multiple_kernel(0.0, 2, N)
    assert np.max(np.abs(k2.samples - z)) <= 1e-12
    k3 = multiple_kernel(0.0, 3, N)
    assert np.max(np.abs(k3.samples - 2.0 * z**2)) <= 1e-12


def test_multiple_kernel_matches_difference_quotient():
    # 4th-order central stencil in conj(a) applied to the order-1 lower kernel
    for a in (0.3, -0.45 + 0.3j, 0.6j, 0.75):
        for order in (2, 3, 4):
            exact = multiple_kernel(a, order, N).samples
            approx = fd_multiple_kernel(a, order, N)
            scale = np.max(np.abs(exact))
            assert np.max(np.abs(approx - exact)) <= 1e-6 * scale


def test_multiple_kernel_validation():
    with pytest.raises(ValueError):
        multiple_kernel(0.5, 0, N)
    with pytest.raises(ValueError):
        multiple_kernel(0.5, N // 2 + 1, N)


def test_tm_system_fourier_special_case():
    tm = tm_system((0.0, 0.0, 0.0), N)
    z = unit_circle(N)
    for k in range(3):
        assert np.max(np.abs(tm.basis[k] - z**k)) <= 1e-12


def test_tm_system_orthonormal():
    tm = tm_system((0.5, 0.3j, 0.5), N)
    assert tm.gram_deviation() <= 1e-8


def test_tm_system_first_function_is_kernel():
    a = 0.4 - 0.2j
    tm = tm_system((a,), N)
    e = szego_eval(a, N)
    assert np.max(np.abs(tm.basis[0] - e.samples)) <= 1e-10


def test_tm_system_spans_its_kernels():
    params = (0.5, -0.3 + 0.4j, 0.2j, 0.6)
    tm = tm_system(params, N)
    for a in params:
        e = szego_eval(a, N)
        recon = tm.synthesize(tm.coeffs(e))
        assert np.max(np.abs(recon.samples - e.samples)) <= 1e-8


def test_tm_system_coeff_matrix_matches_rows(rng):
    tm = tm_system((0.5, 0.3j, -0.2), N)
    rows = rng.normal(size=(4, N)) + 1j * rng.normal(size=(4, N))
    mat = tm.coeff_matrix(rows)
    for w in range(4):
        single = tm.coeffs(CircleSignal(rows[w]))
        assert np.max(np.abs(mat[w] - single)) <= 1e-13


def test_tm_system_synthesize_validation():
    tm = tm_system((0.5,), N)
    with pytest.raises(ValueError):
        tm.synthesize([1.0, 2.0])
    with pytest.raises(ValueError):
        tm.coeffs(CircleSignal(np.ones(128)))


def test_tm_phase_is_unimodular():
    for q, priors in (
        (0.3, (0.5, -0.2j)),
        (0.7j, (0.1, 0.1)),
        (-0.4 + 0.4j, (0.3 + 0.2j,)),
    ):
        assert abs(abs(tm_phase(q, priors)) - 1.0) <= 1e-15


def test_tm_phase_trivial_cases():
    assert tm_phase(0.5, ()) == 1.0
    # repeats of q itself contribute no phase
    assert tm_phase(0.5, (0.5, 0.5)) == 1.0


def test_disc_grid_shape_and_order():
    grid = DiscGrid.make(4, 8, 0.9)
    assert grid.size == 1 + 3 * 8
    assert grid.points[0] == 0.0
    radii = np.abs(grid.points)
    # radius-major: each ring's points share one radius, rings ascend
    assert np.allclose(radii[1:9], 0.3)
    assert np.allclose(radii[9:17], 0.6)
    assert np.allclose(radii[17:], 0.9)
    # angle-minor within a ring
    angles = np.angle(grid.points[1:9])
    assert angles[0] == 0.0
    assert np.allclose(np.diff(np.unwrap(angles)), 2.0 * np.pi / 8)


def test_disc_grid_boundary_mask():
    grid = DiscGrid.make(4, 8, 0.9)
    mask = grid.boundary_mask()
    assert mask.sum() == 8
    assert np.allclose(np.abs(grid.points[mask]), 0.9)
    origin_only = DiscGrid.make(1, 8, 0.9)
    assert origin_only.size == 1
    assert origin_only.boundary_mask().all()


def test_disc_grid_eval_matrix_cached():
    grid = DiscGrid.make(3, 4, 0.5)
    mat = grid.eval_matrix(8)
    assert mat is grid.eval_matrix(8)
    ks = np.arange(8)
    assert np.allclose(mat, grid.points[:, None] ** ks[None, :])


def test_disc_grid_validation():
    with pytest.raises(ValueError):
        DiscGrid.make(0, 8, 0.9)
    with pytest.raises(ValueError):
        DiscGrid.make(4, 0, 0.9)
    with pytest.raises(ValueError):
        DiscGrid.make(4, 8, 1.0)
    with pytest.raises(ValueError):
        DiscGrid.make(4, 8, 0.0)


def test_spectrum_of_kernel_is_truncated_geometric():
    a = 0.6 - 0.2j
    spec = to_spectrum(szego_eval(a, N)).analytic_coeffs()
    expect = np.sqrt(1.0 - abs(a) ** 2) * np.conj(a) ** np.arange(N // 2)
    assert np.max(np.abs(spec - expect)) <= 1e-12
