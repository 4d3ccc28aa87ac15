import math

import numpy as np
import pytest
from scipy import integrate

from casimir_layers import dispersion as disp
from casimir_layers.asymptotics import casimir_closed_form
from casimir_layers.constants import CONST
from casimir_layers.engine import (
    MatsubaraGrid,
    Method,
    QuadratureSpec,
    ThermalWeight,
    analytic_tail,
    chi_grid,
    pressure_high_temperature,
    pressure_matsubara,
    pressure_zero_temperature,
    reflection_kernel,
)
from casimir_layers.errors import DomainError, NumericalError
from casimir_layers.materials import DielectricModel, reference_dielectric

M = reference_dielectric()


@pytest.mark.parametrize("d, expected", [(10.0, -1.3001e5), (100.0, -13.001)])
def test_casimir_values(d, expected):
    r = pressure_zero_temperature(disp.pair_casimir(), d)
    assert abs(r.P / expected - 1) < 1e-3
    assert r.method is Method.VAN_KAMPEN_T0
    assert r.P == pytest.approx(r.P_e + r.P_h, rel=1e-15)
    assert r.err_estimate >= 0


def test_casimir_polarizations_split_evenly():
    r = pressure_zero_temperature(disp.pair_casimir(), 7.0)
    assert r.P_e == pytest.approx(r.P_h, rel=1e-12)


def test_sentinel_pair_gives_exact_zero():
    r = pressure_zero_temperature(disp.pair_finite_plates(M, 0.0), 10.0)
    assert (r.P, r.P_e, r.P_h) == (0.0, 0.0, 0.0)
    assert pressure_matsubara(disp.pair_halfspaces(DielectricModel.vacuum()), 10.0, 300.0).P == 0.0
    assert pressure_high_temperature(disp.pair_halfspaces(DielectricModel.vacuum()), 10.0, 300.0).P == 0.0


def test_distance_guards():
    with pytest.raises(DomainError):
        pressure_zero_temperature(disp.pair_casimir(), 0.0)
    with pytest.raises(DomainError):
        pressure_zero_temperature(disp.pair_casimir(), 5e-4)
    with pytest.raises(DomainError):
        pressure_matsubara(disp.pair_casimir(), 10.0, 0.0)


def test_non_finite_integrand_is_reported():
    def bad(kappa, k):
        nan = np.full(np.broadcast(kappa, k).shape, np.nan)
        return nan, nan

    with pytest.raises(NumericalError, match="chi="):
        pressure_zero_temperature(disp.DispersionPair(bad, name="bad"), 10.0)


def test_reflection_form_agrees_with_phi_form():
    pair = disp.pair_halfspaces(M)
    a = pressure_zero_temperature(pair, 20.0)
    b = pressure_zero_temperature(pair, 20.0, form="reflection")
    assert b.method is Method.REFLECTION_T0
    assert b.P == pytest.approx(a.P, rel=1e-12)


def test_reflection_kernel_examples():
    pair = disp.pair_halfspaces(DielectricModel.static(2.0))
    for a, b in zip(reflection_kernel(pair, 1.0, 1.0, 1.5), pair.inv_f(1.0, 1.0, 1.5)):
        assert a == pytest.approx(b, rel=1e-12)
    small = reflection_kernel(pair, 3.0, 0.2, 20.0)
    ip = pair.inv_phi(3.0, 0.2)
    lam = pair.lam(3.0, 0.2)
    for s, r2 in zip(small, ip):
        assert s == pytest.approx(r2 * math.exp(-2 * lam * 20.0), rel=1e-8)
    transparent = disp.pair_finite_plates(M, 0.0)
    assert reflection_kernel(transparent, 1.0, 1.0, 1.0) == (0.0, 0.0)


def test_analytic_tail_example():
    assert analytic_tail(1.0, 1.0, 1.0, 1.0) == pytest.approx(2.5 * math.exp(-2), rel=1e-15)
    assert analytic_tail(1.0, 1.0, 1e3, 1.0) == 0.0


def test_analytic_tail_identity_random():
    rng = np.random.default_rng(11)
    for _ in range(20):
        chi0, d = rng.uniform(0.05, 5.0), rng.uniform(0.1, 20.0)
        phi_e, phi_h = rng.uniform(1.0, 50.0, 2)
        num, _ = integrate.quad(lambda x: x**2 * math.exp(-2 * x * d), chi0, np.inf, epsabs=0, epsrel=1e-13, limit=200)
        ref = num * (1 / phi_e + 1 / phi_h)
        assert analytic_tail(phi_e, phi_h, chi0, d) == pytest.approx(ref, rel=1e-10)


def test_analytic_tail_scaling():
    # chi0 d fixed, d doubled: every term picks up 1/d^3
    a = analytic_tail(2.0, 3.0, 1.0, 1.0)
    b = analytic_tail(2.0, 3.0, 0.5, 2.0)
    assert b == pytest.approx(a / 8, rel=1e-14)


def test_chi_grid_rule_and_anchors():
    x, w, chi_max = chi_grid(M.scales, 10.0, QuadratureSpec())
    assert chi_max == pytest.approx(1 + 10 * 0.08 + 0.1)
    assert w.sum() == pytest.approx(chi_max, rel=1e-12)
    assert 4000 <= x.size <= 6000


def test_quadrature_spec_validation():
    with pytest.raises(DomainError):
        QuadratureSpec(n_theta=0)
    with pytest.raises(DomainError):
        QuadratureSpec(theta0=1.0)


def test_refinement_within_error_estimate():
    pair = disp.pair_finite_plates(M, 1.0)
    base = pressure_zero_temperature(pair, 5.0)
    fine = pressure_zero_temperature(pair, 5.0, QuadratureSpec(n_theta=1200, n_chi=10000))
    assert abs(fine.P - base.P) <= base.err_estimate


def test_attractive_for_symmetric_structures(pairs):
    for name in ("casimir", "halfspaces", "finite_plates", "gap_medium", "graphene", "stack"):
        assert pressure_zero_temperature(pairs[name], 30.0, QuadratureSpec(n_theta=160, n_chi=800)).P < 0, name


def test_thermal_weight():
    w = ThermalWeight(300.0)
    k = np.geomspace(1e-5, 10, 50)
    assert np.all(w(k) >= 1.0)
    assert w(10.0) == pytest.approx(1.0, abs=1e-12)
    assert np.all(ThermalWeight(0.0)(k) == 1.0)


def test_matsubara_grid():
    g = MatsubaraGrid(300.0)
    assert g.node(1) == pytest.approx(8.232e-4, rel=1e-3)
    assert g.node(0) == 0.0
    assert list(g.weight([0, 1, 2])) == [0.5, 1.0, 1.0]
    with pytest.raises(DomainError):
        MatsubaraGrid(0.0)


def test_matsubara_room_temperature_exceeds_zero_temperature():
    pair = disp.pair_casimir()
    hot = pressure_matsubara(pair, 1000.0, 300.0)
    cold = pressure_zero_temperature(pair, 1000.0)
    assert abs(hot.P) > abs(cold.P)
    assert hot.info["n_terms"] >= 50


def test_high_temperature_linear_and_classical_value():
    pair = disp.pair_casimir()
    a = pressure_high_temperature(pair, 3000.0, 1e4)
    b = pressure_high_temperature(pair, 3000.0, 2e4)
    assert b.P == pytest.approx(2 * a.P, rel=1e-14)
    # both polarizations reflect perfectly at zero frequency
    zeta3 = 1.2020569031595942
    classical = -CONST.k_B * 1e4 * zeta3 / (4 * math.pi * (3000e-9) ** 3)
    assert a.P == pytest.approx(classical, rel=1e-9)


def test_high_temperature_matches_matsubara_when_hot():
    pair = disp.pair_casimir()
    d, T = 3000.0, 1e4
    assert CONST.thermal_wavenumber(T) * d > 10
    ht = pressure_high_temperature(pair, d, T)
    ms = pressure_matsubara(pair, d, T)
    assert ht.P == pytest.approx(ms.P, rel=0.05)
