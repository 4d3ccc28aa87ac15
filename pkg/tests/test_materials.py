import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from casimir_layers.errors import DomainError, ModelError
from casimir_layers.materials import (
    DielectricModel,
    FreeElectronTerm,
    OscillatorTerm,
    SheetModel,
    epsilon_cm_imag,
    epsilon_lorentz_imag,
    epsilon_static,
    reference_dielectric,
    zeta_imag,
)


def test_six_term_static_value():
    m = reference_dielectric()
    expected = 1 + sum(0.0025 / kr**2 for kr in (0.01, 0.02, 0.03, 0.04, 0.05, 0.08))
    assert epsilon_lorentz_imag(m, 0.0) == pytest.approx(expected, rel=1e-12)
    assert epsilon_lorentz_imag(m, 0.0) == pytest.approx(37.981, abs=5e-4)


def test_six_term_high_k():
    assert epsilon_lorentz_imag(reference_dielectric(), 10.0) == pytest.approx(1.000150, abs=1e-6)


def test_vacuum_and_empty_sum_are_one():
    k = np.geomspace(1e-6, 1e3, 7)
    assert np.all(DielectricModel.vacuum()(k) == 1.0)
    assert np.all(DielectricModel.lorentz([])(k) == 1.0)
    assert DielectricModel.lorentz([]).is_vacuum


def test_negative_k_rejected():
    with pytest.raises(DomainError):
        reference_dielectric()(-1.0)


def test_unregularized_free_term_is_singular_at_zero():
    m = DielectricModel.lorentz([], FreeElectronTerm(k_p=0.05))
    with pytest.raises(ModelError):
        m(0.0)
    assert m(1.0) == pytest.approx(1 + 0.0025)


def test_free_term_uses_plus_collision_sign():
    m = DielectricModel.lorentz([], FreeElectronTerm(k_p=1.0, k_c=0.5, k_s=0.1))
    assert m(2.0) == pytest.approx(1 + 1 / (0.01 + 4 + 1.0))


def test_clausius_mossotti_single_term():
    # k_p^2 / k_r^2 = 0.01
    m = DielectricModel.clausius_mossotti([OscillatorTerm(0.1, 1.0)])
    assert epsilon_cm_imag(m, 0.0) == pytest.approx((1 + 0.02 / 3) / (1 - 0.01 / 3), rel=1e-12)
    assert epsilon_cm_imag(m, 0.0) == pytest.approx(1.010033, abs=1e-6)
    assert epsilon_cm_imag(DielectricModel.clausius_mossotti([]), 3.0) == 1.0


def test_clausius_mossotti_singular_sum():
    m = DielectricModel.clausius_mossotti([OscillatorTerm(1.0, 1.0)] * 3)
    with pytest.raises(ModelError):
        epsilon_cm_imag(m, 0.0)


def test_static_values():
    e0, eo = epsilon_static(reference_dielectric())
    assert e0 == pytest.approx(37.981, abs=5e-4) and eo == pytest.approx(e0, rel=1e-12)
    assert epsilon_static(DielectricModel.vacuum()) == (1.0, 1.0)
    assert epsilon_static(DielectricModel.lorentz([OscillatorTerm(0.3, 0.3)])) == (2.0, 2.0)
    with pytest.raises(ModelError):
        epsilon_static(DielectricModel.lorentz([], FreeElectronTerm(k_p=0.1, k_c=1e-3)))


def test_chi_matches_eps_minus_one_without_cancellation():
    m = reference_dielectric()
    k = 1e4
    assert m.chi(k) == pytest.approx(6 * 0.0025 / k**2, rel=1e-6)


def test_invalid_parameters():
    with pytest.raises(ModelError):
        OscillatorTerm(0.1, 0.0)
    with pytest.raises(ModelError):
        SheetModel(0.1, nu=3)
    with pytest.raises(ModelError):
        DielectricModel.static(0.5)


def test_sheet_static_conductivity():
    sheet = SheetModel(mu_c=0.0783, omega_c0=1e12)
    closed = 4 * 6.085e-5 * 376.73 * (0.0783 * 1.60218e-19) / (math.pi * 1.054571817e-34 * 1e12)
    assert sheet.zeta0 == pytest.approx(closed, rel=1e-12)
    assert sheet.zeta0 == pytest.approx(3.472, abs=0.01)
    assert zeta_imag(sheet, 0.0) == pytest.approx(sheet.zeta0, rel=1e-12)


def test_sheet_half_value_at_collision_wavenumber():
    sheet = SheetModel(mu_c=0.0783, omega_c0=1e12)
    assert zeta_imag(sheet, sheet.k_c0) == pytest.approx(sheet.zeta0 / 2, rel=1e-9)
    assert zeta_imag(sheet, 1e6) < 1e-20


def test_sheet_finite_temperature_reduces_to_zero_temperature():
    cold = SheetModel(mu_c=0.2, T=0.0).zeta0
    assert SheetModel(mu_c=0.2, T=1.0).zeta0 == pytest.approx(cold, rel=1e-12)
    assert SheetModel(mu_c=0.2, T=300.0).zeta0 > cold


positive = st.floats(1e-3, 1.0)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(positive, positive, st.floats(0, 1e-2)), min_size=1, max_size=6))
def test_lorentz_monotone_and_bounded(params):
    m = DielectricModel.lorentz([OscillatorTerm(*p) for p in params])
    k = np.geomspace(1e-6, 1e3, 200)
    eps = m(k)
    assert np.all(eps >= 1.0)
    assert np.all(np.diff(eps) <= 1e-15 * eps[:-1])


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(positive, positive, st.floats(0, 0.05)), min_size=1, max_size=6))
def test_lorentz_high_k_asymptote(params):
    # collision wavenumber drawn as a fraction (up to 5%) of the resonance
    params = [(kp, kr, f * kr) for kp, kr, f in params]
    m = DielectricModel.lorentz([OscillatorTerm(*p) for p in params])
    k = 100 * max(p[1] for p in params) * np.array([1.0, 10.0, 100.0])
    s = sum(p[0] ** 2 for p in params)
    assert np.all(np.abs(m.chi(k) * k**2 / s - 1) < 1e-3)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(st.floats(1e-3, 0.03), st.floats(0.5, 1.0)), min_size=1, max_size=4))
def test_clausius_mossotti_vs_dilute(params):
    terms = [OscillatorTerm(kp, kr) for kp, kr in params]
    s0 = sum(kp**2 / kr**2 for kp, kr in params)
    if s0 >= 0.01:
        return
    cm = epsilon_cm_imag(DielectricModel.clausius_mossotti(terms), 0.0)
    dilute = epsilon_lorentz_imag(DielectricModel.lorentz(terms), 0.0)
    assert abs(cm - dilute) / (dilute - 1) < s0


@settings(max_examples=30, deadline=None)
@given(st.floats(1e-3, 1.0), st.sampled_from([2, 4, 6]))
def test_zeta_positive_strictly_decreasing(mu, nu):
    sheet = SheetModel(mu_c=mu, nu=nu)
    z = zeta_imag(sheet, np.geomspace(1e-9, 1e3, 300))
    assert np.all(z > 0)
    assert np.all(np.diff(z) < 0)
