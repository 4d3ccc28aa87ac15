"""Mode-summation pressure for two free-standing conducting sheets.

The symmetric two-sheet cavity splits into four mode families: E (TM) and H
(TE) polarization, each with an electric or a magnetic wall in the mid-plane.
Radiated modes have a real normal wavenumber k and are counted through the
phase shift theta(k, d) they pick up from the sheet; Phi = 2 d(theta)/dd + k is
the shift of the mode density per unit gap change. Evanescent modes (bound
TM plasmons, real k0 < kappa) are summed directly.

On the real frequency axis the sheet is taken collisionless, zeta = -i z with
z = zeta_reactive(k0) > 0, so every kernel is real.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from .constants import CONST
from .engine import Method, PressureResult, QuadratureSpec, ThermalWeight, _gl, _panels
from .errors import DomainError, NumericalError
from .materials import SheetModel, zeta_reactive


class WallType(IntEnum):
    ELECTRIC = 1
    MAGNETIC = -1


@dataclass(frozen=True)
class ModeSumSpec:
    sheet: SheetModel
    d: float
    T: float = 0.0
    quad: QuadratureSpec = QuadratureSpec()
    k_upper: float | None = None  # integration cutoff in 1/nm, default 6 k_p

    def __post_init__(self):
        if not self.d > 0:
            raise DomainError("gap width d must be > 0")
        if self.T < 0:
            raise DomainError("T must be >= 0")

    @property
    def cutoff(self) -> float:
        return self.k_upper if self.k_upper is not None else 6.0 * self.sheet.k_p

    @property
    def transparent(self) -> bool:
        return self.sheet.zeta0 == 0


def delta_of(sheet: SheetModel, kappa, k):
    """delta = k0 / z on the real axis, with k0 = sqrt(kappa^2 + k^2).

    delta * k0 * y equals 1/w below, so delta = 0 is a perfect conductor and
    delta = inf (returned when the sheet is absent) removes the sheet.
    """
    k0 = np.hypot(np.asarray(kappa, dtype=float), np.asarray(k, dtype=float))
    if sheet.zeta0 == 0:
        return np.full_like(k0, np.inf)
    return k0 / zeta_reactive(sheet, k0)


def _admittance(pol: str, k0, k):
    with np.errstate(divide="ignore", invalid="ignore"):
        return k0 / k if pol == "e" else k / k0


def _w(sheet, pol, kappa, k):
    k0 = np.hypot(kappa, k)
    with np.errstate(divide="ignore", invalid="ignore"):
        return zeta_reactive(sheet, k0) / _admittance(pol, k0, k)


def alpha_kernel(w, k, d):
    """Electric-wall kernel -u/(1 + w u), u = tan(kd/2)."""
    u = np.tan(0.5 * k * d)
    return -u / (1.0 + w * u)


def beta_kernel(w, k, d):
    """Magnetic-wall kernel 1/(u - w)."""
    u = np.tan(0.5 * k * d)
    return 1.0 / (u - w)


def phi_from_w(w, k, d, wall: WallType):
    """Phi = 2 d/dd arctan(kernel) + k in a form free of tan poles."""
    s = np.sin(k * d)
    if wall is WallType.ELECTRIC:
        h = np.sin(0.5 * k * d) ** 2
        return k * (w * s + w * w * h) / (1.0 + w * s + w * w * h)
    c = np.cos(0.5 * k * d) ** 2
    return k * (w * w * c - w * s) / (1.0 - w * s + w * w * c)


def d_theta_dd(w, k, d, wall: WallType):
    """Analytic d/dd of arctan(kernel), i.e. (Phi - k)/2."""
    return 0.5 * (phi_from_w(w, k, d, wall) - k)


def phi_kernels(spec: ModeSumSpec, kappa, k) -> dict[tuple[str, WallType], np.ndarray]:
    """Phi for the four (polarization, wall) families at real (kappa, k)."""
    kappa, k = np.broadcast_arrays(np.asarray(kappa, dtype=float), np.asarray(k, dtype=float))
    out = {}
    for pol in ("e", "h"):
        w = _w(spec.sheet, pol, kappa, k)
        for wall in WallType:
            out[(pol, wall)] = phi_from_w(w, k, spec.d, wall)
    return out


def _radiated_integrals(spec: ModeSumSpec):
    """int kappa dkappa int dk (k/k0) Phi for both polarizations, both walls summed."""
    d, order = spec.d, spec.quad.order
    top = spec.cutoff
    # k: geometric grading near zero, then panels of half an oscillation period
    k_small = min(math.pi / d, top)
    k_edges = np.concatenate(
        [[0.0], np.geomspace(1e-9 * k_small, k_small, 24), np.arange(k_small, top, math.pi / d)[1:], [top]]
    )
    k, wk = _panels(np.unique(k_edges), order)
    kap_edges = np.unique(np.concatenate([[0.0], np.geomspace(1e-9, top, 48)]))
    kap, wkap = _panels(kap_edges, order)
    weight = ThermalWeight(spec.T)
    total = np.zeros(2)
    block = max(1, 2_000_000 // k.size)
    for s in range(0, kap.size, block):
        ka = kap[s : s + block, None]
        k0 = np.hypot(ka, k)
        base = ka * (k / k0) * wk * wkap[s : s + block, None] * weight(k0)
        for j, pol in enumerate(("e", "h")):
            w = _w(spec.sheet, pol, ka, k)
            phi = phi_from_w(w, k, d, WallType.ELECTRIC) + phi_from_w(w, k, d, WallType.MAGNETIC)
            g = phi * base
            if not np.all(np.isfinite(g)):
                raise NumericalError("non-finite radiated mode-sum integrand")
            total[j] += g.sum()
    return total


def pressure_radiated(spec: ModeSumSpec) -> PressureResult:
    """Pressure from the radiated (real normal wavenumber) modes only."""
    if spec.transparent:
        return PressureResult(0.0, 0.0, 0.0, Method.MODESUM_RADIATED)
    pref = CONST.pressure_unit / (8.0 * math.pi**2)
    fine = _radiated_integrals(spec) * pref
    coarse_spec = ModeSumSpec(spec.sheet, spec.d, spec.T, QuadratureSpec(order=max(spec.quad.order // 2, 4)), spec.k_upper)
    coarse = _radiated_integrals(coarse_spec) * pref
    err = max(abs(fine.sum() - coarse.sum()), 1e-10 * abs(fine.sum()))
    return PressureResult(float(fine[0]), float(fine[1]), float(err), Method.MODESUM_RADIATED)


def _bound_roots(sheet: SheetModel, kappa, d, wall: WallType, iters: int = 200):
    """Real k0 in (0, kappa) of z(k0) K / k0 = 1 + coth(Kd/2) (electric) or 1 + tanh(Kd/2) (magnetic)."""
    g = (lambda x: 1.0 / np.tanh(x)) if wall is WallType.ELECTRIC else np.tanh

    def resid(k0):
        K = np.sqrt(np.maximum(kappa**2 - k0**2, 0.0))
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            return zeta_reactive(sheet, k0) * K / k0 - 1.0 - g(0.5 * K * d)

    lo = np.log(kappa) - 80.0
    hi = np.log(kappa)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        r = resid(np.exp(mid))
        pos = r > 0
        lo, hi = np.where(pos, mid, lo), np.where(pos, hi, mid)
        if np.all(hi - lo < 1e-15):
            break
    return np.exp(0.5 * (lo + hi))


def _dk0_dd(sheet: SheetModel, kappa, k0, d, wall: WallType):
    K = np.sqrt(kappa**2 - k0**2)
    x = 0.5 * K * d
    gp = -1.0 / np.sinh(x) ** 2 if wall is WallType.ELECTRIC else 1.0 / np.cosh(x) ** 2
    z = zeta_reactive(sheet, k0)
    nu, kpn = sheet.nu, sheet.k_p**sheet.nu
    dz = z * (-1.0 / k0 - nu * k0 ** (nu - 1) / (kpn + k0**nu))
    dK = -k0 / K
    G_k0 = dz * K / k0 + z * dK / k0 - z * K / k0**2 - gp * 0.5 * d * dK
    G_d = -gp * 0.5 * K
    return -G_d / G_k0


def bound_mode_integral(spec: ModeSumSpec):
    """int kappa dkappa sum_b dk0_b/dd over the two bound TM branches."""
    d, order = spec.d, spec.quad.order
    top = min(80.0 / d, spec.cutoff)
    edges = np.unique(np.concatenate([[0.0], np.geomspace(1e-9, top, 40)]))
    kap, wkap = _panels(edges, order)
    weight = ThermalWeight(spec.T)
    total = 0.0
    for wall in WallType:
        k0 = _bound_roots(spec.sheet, kap, d, wall)
        g = kap * _dk0_dd(spec.sheet, kap, k0, d, wall) * weight(k0) * wkap
        if not np.all(np.isfinite(g)):
            raise NumericalError("non-finite bound-mode integrand")
        total += g.sum()
    return total


@dataclass(frozen=True)
class ModeSumResult:
    radiated: PressureResult
    evanescent: float

    @property
    def P(self) -> float:
        return self.radiated.P + self.evanescent

    def as_pressure(self) -> PressureResult:
        return PressureResult(
            self.radiated.P_e + self.evanescent,
            self.radiated.P_h,
            self.radiated.err_estimate,
            Method.MODESUM_TOTAL,
            {"radiated": self.radiated.P, "evanescent": self.evanescent},
        )


def pressure_with_evanescent(spec: ModeSumSpec) -> ModeSumResult:
    """Radiated modes plus the bound plasmon branches."""
    rad = pressure_radiated(spec)
    if spec.transparent:
        return ModeSumResult(rad, 0.0)
    ev = -CONST.pressure_unit / (4.0 * math.pi) * bound_mode_integral(spec)
    return ModeSumResult(rad, float(ev))
