import math
import warnings

import numpy as np
import pytest
from hypothesis import given, strategies as st

from cftk.geometry import (
    AnnulusSpec, BandLimitWarning, CircleFlow, GeometryError, KoenigsMap, Mobius,
    SemigroupSpec, annulus_interior, circle_points, evolve_phi, interior_samples,
    koenigs_functional_check, parse_koenigs, phi_closed_form, real_part_fourier,
    rho_from_koenigs, split_rho,
)

MOB = SemigroupSpec(parse_koenigs("mobius:a=1/2"))
IDENT = SemigroupSpec(parse_koenigs("identity"))
Z = interior_samples(64, seed=3)


def test_rho_fourier_examples():
    assert IDENT.rho_coeffs() == pytest.approx({0: 1})
    c = MOB.rho_coeffs()
    assert set(c) == {0, 1}
    assert c[0] == pytest.approx(1, abs=1e-14) and c[1] == pytest.approx(-0.5, abs=1e-14)


def test_normalization_is_enforced():
    with pytest.raises(GeometryError):
        KoenigsMap.series([2, 0.1])
    with pytest.raises(GeometryError):
        parse_koenigs("nonsense")


def test_band_limit_warning():
    # rho = (1 + 0.3 z)/(1 + 0.6 z) has Fourier tail 0.6^n: too wide for 32 samples
    with pytest.warns(BandLimitWarning):
        rho_from_koenigs(KoenigsMap.series([1, 0.3]), log2_samples=5)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        rho_from_koenigs(KoenigsMap.series([1, 0.3]), log2_samples=9)


def test_rho_reconstruction_from_fourier():
    spec = SemigroupSpec(KoenigsMap.series([1, 0.2, -0.05]))
    z = circle_points(2 ** spec.log2_samples)
    theta = np.angle(z)
    recon = sum(a * np.exp(1j * n * theta) for n, a in spec.rho_hat.items())
    assert np.max(np.abs(recon - spec.rho_samples)) < 1e-10


def test_evolve_examples():
    assert np.array_equal(evolve_phi(MOB, 0, Z), Z)
    t = 0.7
    assert np.max(np.abs(evolve_phi(IDENT, t, Z) - math.exp(-t) * Z)) < 1e-9
    assert np.max(np.abs(evolve_phi(MOB, t, Z) - phi_closed_form(MOB.koenigs, t, Z))) < 1e-9


def test_functional_examples():
    assert koenigs_functional_check(IDENT, 0.5, Z) < 1e-9
    assert koenigs_functional_check(MOB, math.log(2), interior_samples(64)) < 1e-8
    assert koenigs_functional_check(MOB, 0, Z) == 0.0


@given(st.floats(0, 1), st.floats(0, 1))
def test_semigroup_law(s, t):
    z = interior_samples(16, seed=1)
    lhs = evolve_phi(MOB, t, evolve_phi(MOB, s, z))
    rhs = evolve_phi(MOB, s + t, z)
    assert np.max(np.abs(lhs - rhs)) < 10 * MOB.tol


def test_normalization_by_richardson():
    z = interior_samples(16, seed=2, radius=0.8)
    est = {}
    for h in (1e-2, 1e-3, 1e-4):
        est[h] = (evolve_phi(MOB, h, z) - z) / h
    # first-order error in h: two Richardson steps
    r1 = (10 * est[1e-3] - est[1e-2]) / 9
    r2 = (10 * est[1e-4] - est[1e-3]) / 9
    target = MOB.koenigs.vector_field(z)
    assert np.max(np.abs(r2 - target)) < 1e-6
    assert np.max(np.abs(r2 - target)) <= np.max(np.abs(r1 - target)) + 1e-9


@given(st.floats(0.05, 2))
def test_contraction(t):
    z = interior_samples(16, seed=4)
    s = MOB.koenigs.sigma
    assert np.allclose(np.abs(s(evolve_phi(MOB, t, z))), math.exp(-t) * np.abs(s(z)), atol=1e-9)


def test_split_examples():
    f, g, flow = split_rho(IDENT.rho_samples)
    assert np.allclose(f, 1) and np.allclose(g, 0) and flow.trivial
    theta = np.angle(circle_points(2 ** MOB.log2_samples))
    f, g, flow = split_rho(MOB.rho_samples)
    assert np.allclose(f, 1 - np.cos(theta) / 2, atol=1e-12)
    assert np.allclose(g, -np.sin(theta) / 2, atol=1e-12)
    f_hat, g_hat = real_part_fourier(MOB.rho_coeffs())
    assert f_hat == pytest.approx({0: 1, 1: -0.25, -1: -0.25}, abs=1e-14)
    assert g_hat == pytest.approx({1: 0.25j, -1: -0.25j}, abs=1e-14)


@given(st.floats(0, 1), st.floats(0, 1))
def test_circle_flow_composition(s, u):
    flow = CircleFlow({1: 0.25j, -1: -0.25j})
    th = np.linspace(0, 2 * np.pi, 9, endpoint=False)
    assert np.allclose(flow.gamma(s + u, th), flow.gamma(s, flow.gamma(u, th)), atol=1e-9)


def test_circle_flow_derivative_matches_finite_difference():
    flow = CircleFlow({1: 0.25j, -1: -0.25j})
    th = np.linspace(0, 2 * np.pi, 7, endpoint=False)
    h = 1e-6
    fd = (flow.gamma(0.4, th + h) - flow.gamma(0.4, th - h)) / (2 * h)
    assert np.allclose(flow.derivative(0.4, th), fd, atol=1e-7)


def test_interior_examples():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        assert annulus_interior(AnnulusSpec(Mobius(), MOB, 0)).empty
    region = annulus_interior(AnnulusSpec(Mobius(), IDENT, math.log(2)))
    assert region.contains(0.75) == "inside"
    assert region.contains(0.25) == "outside"
    assert region.contains(0.5) == "indeterminate"


@given(st.floats(0, 2 * np.pi), st.floats(0.05, 0.98), st.floats(0, 2 * np.pi))
def test_interior_rotation_equivariance(beta, r, arg):
    z = r * np.exp(1j * arg)
    base = annulus_interior(AnnulusSpec(Mobius(), MOB, 0.5), 2e-2)
    rot = annulus_interior(AnnulusSpec(Mobius(0j, beta), MOB, 0.5), 2e-2)
    assert base.contains(z) == rot.contains(z * np.exp(1j * beta))


def test_mobius_validation():
    with pytest.raises(GeometryError):
        Mobius(1.0)
    with pytest.raises(GeometryError):
        AnnulusSpec(Mobius(), MOB, -1)
