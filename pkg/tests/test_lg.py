import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from semijost.lg import build_lg_map, build_zeta, large_nu_transform, normal_form_V1, symbol_class_check, v2
from semijost.params import DomainError, SpecValidationError, derive_params, exponential_family, regge_wheeler

ZETA_001 = -3.46413527035329794  # mpmath quad of the defining relation


@pytest.fixture(scope="module")
def zeta():
    return build_zeta()


def test_zeta_reference_values(zeta):
    assert zeta(1.0)[0] == 0.0
    assert zeta(0.01)[0] == pytest.approx(ZETA_001, rel=1e-12)
    assert zeta(1e4)[0] / 1e4 ** (2 / 3) == pytest.approx(1.310233476, rel=1e-6)


def test_zeta_defining_relation(zeta):
    x = np.concatenate([np.geomspace(1e-3, 0.95, 40), np.geomspace(1.05, 1e3, 40)])
    z = zeta(x)
    z1 = zeta.derivs(x, 1)
    assert np.max(np.abs(z1**2 * z / (1 - x**-2) - 1)) <= 1e-12


def test_zeta_across_turning_point(zeta):
    x = np.linspace(0.9, 1.1, 41)
    z1 = zeta.derivs(x, 1)
    assert np.all(z1 > 0)
    assert zeta.derivs(1.0, 1)[0] == pytest.approx(2 ** (1 / 3), rel=1e-12)


@given(st.floats(min_value=-30, max_value=30))
def test_zeta_inverse_roundtrip(y):
    zm = build_zeta()
    x = zm.inverse(y)
    assert zm(x)[0] == pytest.approx(y, abs=1e-12 * max(1.0, abs(y)))


def test_zeta_rejects_nonpositive(zeta):
    with pytest.raises(Exception):
        zeta(0.0)


def test_v2_finite_at_turning_point(zeta):
    x = np.array([0.95, 0.999, 1.0, 1.001, 1.05])
    vals = v2(zeta, x)
    assert np.all(np.isfinite(vals))
    assert np.max(np.abs(np.diff(vals))) < 0.05


@pytest.fixture(scope="module")
def pure_map():
    return build_lg_map(exponential_family(), derive_params(0.1, 0.1))


@pytest.fixture(scope="module")
def pert_map():
    return build_lg_map(exponential_family(coeffs=[0.5]), derive_params(0.1, 0.1))


def test_pure_exponential_map_is_identity(pure_map):
    z = np.geomspace(1e-3, pure_map.z_end, 50)
    assert pure_map.z_t == pytest.approx(1.0, rel=1e-14)
    assert np.max(np.abs(pure_map.phi(z) / z - 1)) <= 1e-12
    assert np.max(np.abs(normal_form_V1(pure_map, [0.1, 1.0, 5.0]))) <= 1e-8


def test_turning_point_fixed(pert_map):
    assert pert_map.Q(pert_map.z_t) == pytest.approx(0.0, abs=1e-13)
    assert pert_map.phi(pert_map.z_t)[0] == pytest.approx(1.0, abs=1e-12)
    assert pert_map.tau(pert_map.z_t)[0] == pytest.approx(0.0, abs=1e-11)


def test_phi_monotone_and_positive(pert_map):
    z = np.geomspace(1e-4, pert_map.z_end, 300)
    d = pert_map.phi_derivs(z)
    assert np.all(d[0] > 0) and np.all(d[1] > 0)
    assert np.all(np.diff(d[0]) > 0)


def test_phi_solves_the_mapping_equation(pert_map):
    # φ'² (1 - 1/φ²) = Q away from the window
    z = np.concatenate([np.geomspace(1e-3, 0.5, 20), np.geomspace(2.0, pert_map.z_end, 20)])
    p, d1 = pert_map.phi_derivs(z)[:2]
    assert np.max(np.abs(d1**2 * (1 - p**-2) / pert_map.Q(z) - 1)) <= 1e-9


def test_phi_derivatives_consistent(pert_map):
    z = np.array([0.3, 0.9, 1.0, 1.3, 3.0])
    z = z[z < pert_map.z_end * 0.99]
    h = 1e-5
    d = pert_map.phi_derivs(z)
    fd = (pert_map.phi(z + h) - pert_map.phi(z - h)) / (2 * h)
    assert np.max(np.abs(fd / d[1] - 1)) <= 1e-7


def test_inverse_roundtrip(pert_map):
    w = np.array([1e-3, 0.1, 0.9, 1.0, 2.0, 0.5 * pert_map.w0])
    assert np.max(np.abs(pert_map.phi(pert_map.inverse(w)) / w - 1)) <= 1e-12


def test_eps2_bounded(pert_map):
    z = np.geomspace(pert_map.z_t + 0.01, pert_map.z_end, 60)
    e = pert_map.eps2(z)
    assert np.all(np.isfinite(e))
    assert np.max(np.abs(e)) < 1.0


def test_normal_form_perturbation_order_one(pert_map):
    w = np.geomspace(0.01, 0.9 * pert_map.w0, 40)
    V1 = normal_form_V1(pert_map, w)
    assert np.all(np.isfinite(V1))
    assert 1e-6 < np.max(np.abs(V1)) < 10.0


def test_normal_form_domain(pert_map):
    for w in (0.0, -1.0, pert_map.w0, 2 * pert_map.w0):
        with pytest.raises(DomainError):
            normal_form_V1(pert_map, w)


def test_phi_domain(pert_map):
    with pytest.raises(DomainError):
        pert_map.phi(2 * pert_map.z_end)


def test_alpha_limit():
    with pytest.raises(DomainError):
        build_lg_map(exponential_family(), derive_params(1.0, 0.1))


def test_rw_right_side_has_no_tail():
    with pytest.raises(SpecValidationError):
        build_lg_map(regge_wheeler(2), derive_params(0.1, 0.2), side=1)


def test_rw_left_map():
    lg = build_lg_map(regge_wheeler(2), derive_params(0.1, 0.2), side=-1)
    z = np.geomspace(1e-3, lg.z_end, 60)
    assert np.all(np.isfinite(lg.phi(z)))
    assert np.all(np.isfinite(lg.V1_at_z(z)))


def test_large_nu_transform(pert_map):
    p = derive_params(0.1, 0.1)
    T = large_nu_transform(pert_map, p)
    assert T.scale == pytest.approx(pert_map.hbar1 * p.nu)
    z = np.geomspace(0.05, 0.9 * pert_map.z_end, 20)
    assert np.all(np.isfinite(T.V3_at_z(z)))


def test_symbol_class_examples():
    rep = symbol_class_check(lambda x: x ** (2 / 3), 2 / 3, (1.0, 1e4))
    assert rep.ok
    rep = symbol_class_check(lambda x: np.sin(x), 0.0, (1.0, 1e3))
    assert not rep.ok


def test_symbol_class_power_mismatch():
    assert not symbol_class_check(lambda x: x**2, 1.0, (1.0, 1e3)).ok


def test_symbol_constants_uniform_in_alpha():
    # phi/z and V1 are bounded by C_k <z>^{-k} on a domain that grows like 1/alpha;
    # the constants must not grow as alpha shrinks
    spec = exponential_family(coeffs=[0.5])
    consts = []
    for alpha in (0.2, 0.1, 0.05):
        h = alpha / 2.5
        lg = build_lg_map(spec, derive_params(math.sqrt((alpha**2 - h * h / 4) / 4), h))
        v = symbol_class_check(lambda w: normal_form_V1(lg, w), 0.0, (1.0, 0.98 * lg.w0)).constants
        q = symbol_class_check(lambda z: lg.phi(z) / z, 0.0, (1.0, 0.98 * lg.z_end)).constants
        consts.append(np.array(v + q))
    for a, b in zip(consts, consts[1:]):
        assert np.all(b <= 1.25 * a)
