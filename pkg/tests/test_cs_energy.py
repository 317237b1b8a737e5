import numpy as np
import pytest

from src.cs_energy import (
    CsParams,
    EnergyBreakdown,
    a0_tail,
    coercivity_bound,
    cs_inequality_gap,
    el_residual,
    energy_gradient,
    energy_I,
    gauge_h,
    lumped_mass,
    nehari_value,
    nonexistence_threshold,
    pointwise_density,
    pointwise_profile,
)
from src.errors import DomainError
from src.limit_problem import omega1
from src.radial_core import Field, Mesh1D, Weight, prefix_integral
from src.verify import random_radial_field


@pytest.mark.parametrize("p", [1.0, 1.0005, 2.9995, 3.0, 3.5, np.nan])
def test_params_reject_exponents_outside_band(p):
    with pytest.raises(DomainError):
        CsParams(p, 0.1)


def test_params_reject_negative_omega():
    with pytest.raises(DomainError):
        CsParams(2.0, -0.01)


def test_breakdown_total_and_dict():
    e = EnergyBreakdown.from_terms(1.0, 2.0, 3.0, -4.0)
    assert e.total == 2.0
    assert e.as_dict() == {"kinetic": 1.0, "mass": 2.0, "nonlocal": 3.0, "potential": -4.0, "total": 2.0}


def test_gauge_h_of_gaussian():
    mesh = Mesh1D.radial(12.0, 4800)
    u = Field.from_function(mesh, lambda r: np.exp(-r ** 2 / 2.0))
    h = gauge_h(u)
    np.testing.assert_allclose(h.values, (1.0 - np.exp(-mesh.nodes ** 2)) / 4.0, atol=1e-6)
    assert h.values[0] == 0.0
    assert np.all(np.diff(h.values) >= 0.0)


def test_gauge_h_matches_inner_integral(gaussian):
    inner = prefix_integral(gaussian.with_values(gaussian.values ** 2), Weight.TIMES_R).values
    np.testing.assert_allclose(inner ** 2, 4.0 * gauge_h(gaussian).values ** 2, rtol=1e-14)


def test_gauge_h_needs_radial_mesh():
    with pytest.raises(DomainError):
        gauge_h(Field.zeros(Mesh1D.line(1.0, 10)))


def test_a0_tail_of_constant():
    mesh = Mesh1D.radial(1.0, 200)
    u = Field.from_function(mesh, np.ones_like)
    tail = a0_tail(u, gauge_h(u))
    np.testing.assert_allclose(tail.values, (1.0 - mesh.nodes ** 2) / 8.0, atol=1e-12)
    assert tail.values[-1] == 0.0


def test_zero_profile_has_zero_energy(radial_mesh, p2):
    e = energy_I(Field.zeros(radial_mesh), p2)
    assert (e.kinetic, e.mass, e.nonlocal_, e.potential, e.total) == (0.0, 0.0, 0.0, 0.0, 0.0)
    assert np.all(el_residual(Field.zeros(radial_mesh), p2).values == 0.0)
    assert cs_inequality_gap(Field.zeros(radial_mesh)) == 0.0


def test_omega_enters_only_the_mass_term(gaussian):
    e1 = energy_I(gaussian, CsParams(2.0, 0.1))
    e2 = energy_I(gaussian, CsParams(2.0, 0.2))
    assert e2.mass == pytest.approx(2.0 * e1.mass, rel=1e-14)
    assert (e2.kinetic, e2.nonlocal_, e2.potential) == (e1.kinetic, e1.nonlocal_, e1.potential)
    l2 = 2.0 * np.pi * np.dot(gaussian.mesh.weights, gaussian.values ** 2 * gaussian.nodes)
    assert e2.total - e1.total == pytest.approx(0.05 * l2, rel=1e-12)


def test_energy_terms_signs(rng, radial_mesh, p2):
    for _ in range(10):
        e = energy_I(random_radial_field(rng, radial_mesh), p2)
        assert e.kinetic >= 0.0 and e.mass >= 0.0 and e.nonlocal_ >= 0.0
        assert e.potential <= 0.0


def test_el_residual_positive_where_gauge_dominates():
    mesh = Mesh1D.radial(10.0, 1000)
    u = Field.from_function(mesh, np.ones_like)
    residual = el_residual(u, CsParams(2.0, 0.1))
    assert residual.values[0] == 0.0 and residual.values[-1] == 0.0
    assert np.all(residual.values[mesh.nodes > 8.0][:-1] > 0.0)


def test_gradient_matches_finite_differences(rng):
    mesh = Mesh1D.radial(20.0, 4000)
    params = CsParams(2.0, 0.1)
    u = random_radial_field(rng, mesh)
    grad = energy_gradient(u, params)
    eps = np.finfo(float).eps ** (1.0 / 3.0)
    for _ in range(10):
        v = random_radial_field(rng, mesh).values
        plus = energy_I(u.with_values(u.values + eps * v), params).total
        minus = energy_I(u.with_values(u.values - eps * v), params).total
        numeric = (plus - minus) / (2.0 * eps)
        assert numeric == pytest.approx(np.dot(grad, v), rel=1e-4)


def test_el_residual_is_the_scaled_gradient(rng, radial_mesh):
    params = CsParams(1.5, 0.3)
    u = random_radial_field(rng, radial_mesh)
    scaled = energy_gradient(u, params) / lumped_mass(radial_mesh)
    residual = el_residual(u, params).values
    np.testing.assert_allclose(residual[1:-1], scaled[1:-1], rtol=1e-9, atol=1e-9 * np.max(np.abs(scaled)))


def test_nehari_value_is_gradient_against_u(gaussian, p2):
    assert nehari_value(gaussian, p2) == pytest.approx(np.dot(energy_gradient(gaussian, p2), gaussian.values), rel=1e-10)


@pytest.mark.parametrize("omega", [0.0, 0.05, 0.3])
def test_coercivity_bound_is_a_lower_bound(rng, radial_mesh, omega):
    params = CsParams(2.0, omega)
    for _ in range(10):
        u = random_radial_field(rng, radial_mesh)
        assert energy_I(u, params).total >= coercivity_bound(u, params)


def test_cs_inequality_gap_of_gaussian():
    mesh = Mesh1D.radial(12.0, 10_000)
    assert cs_inequality_gap(Field.from_function(mesh, lambda r: np.exp(-r ** 2))) > 0.0


def test_cs_inequality_on_random_fields(rng, radial_mesh):
    gaps = [cs_inequality_gap(random_radial_field(rng, radial_mesh)) for _ in range(100)]
    assert min(gaps) >= -1e-8


def test_pointwise_profile_empty_for_large_omega():
    profile = pointwise_profile(CsParams(2.0, 10.0))
    assert not profile.exists_negative
    assert (profile.alpha, profile.beta, profile.c0) == (0.0, 0.0, 0.0)


@pytest.mark.parametrize("p, omega", [(2.0, 0.05), (1.5, 0.2), (2.5, 0.01)])
def test_pointwise_profile_roots(p, omega):
    params = CsParams(p, omega)
    profile = pointwise_profile(params)
    assert profile.exists_negative
    assert 0.0 < profile.alpha < profile.beta
    f_ends = pointwise_density(np.array([profile.alpha, profile.beta]), params)
    np.testing.assert_allclose(f_ends, 0.0, atol=1e-10)
    inside = np.linspace(profile.alpha, profile.beta, 102)[1:-1]
    assert np.all(pointwise_density(inside, params) < 0.0)


def test_pointwise_profile_against_grid_scan():
    params = CsParams(2.0, 0.05)
    t = np.linspace(1e-5, 10.0, 1_000_000)
    f = pointwise_density(t, params)
    flips = np.nonzero(np.diff(np.sign(f)))[0]
    # linear interpolation inside the sign-change cells
    roots = t[flips] - f[flips] * (t[flips + 1] - t[flips]) / (f[flips + 1] - f[flips])
    profile = pointwise_profile(params)
    assert profile.alpha == pytest.approx(roots[0], abs=1e-6)
    assert profile.beta == pytest.approx(roots[1], abs=1e-6)
    assert profile.c0 == pytest.approx(-f.min(), abs=1e-6)


def test_pointwise_profile_at_zero_frequency():
    profile = pointwise_profile(CsParams(2.0, 0.0))
    assert profile.exists_negative
    assert profile.alpha == 0.0
    assert profile.beta > 0.0


def test_nonexistence_threshold_at_p2():
    assert nonexistence_threshold(2.0) == pytest.approx(1.0 / 3.0, abs=1e-12)


@pytest.mark.parametrize("p", [1.5, 2.0, 2.5])
def test_nonexistence_threshold_above_omega1(p):
    assert nonexistence_threshold(p) > omega1(p)


def test_nonexistence_threshold_is_continuous():
    values = np.array([nonexistence_threshold(p) for p in np.linspace(1.2, 2.8, 400)])
    assert np.all(values > 0.0)
    assert np.max(np.abs(np.diff(values))) < 0.05


def test_nonexistence_threshold_rejects_band_edges():
    with pytest.raises(DomainError):
        nonexistence_threshold(3.0)
