"""Dispersion-function pairs (f_e, f_h) on the imaginary-frequency axis.

A pair is stored in "phi form": f(kappa, k, d) = exp(2 Lambda d) * phi(kappa, k) - 1,
where Lambda is the normal decay constant in the gap and 1/phi is the product of
the two squared-or-mixed reflection coefficients seen from the gap. Pairs keep
1/phi rather than phi so that transparent structures are simply 1/phi = 0.

All admittance differences are written in cancellation-free closed forms; the
naive difference of two nearly equal admittances loses most of its digits once
eps(ik) approaches 1 at large k.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError
from .materials import DielectricModel, SheetModel, zeta_imag

VACUUM = DielectricModel.vacuum()
# eps == 1 to this accuracy is treated as "no material"
EPS_ONE_TOL = 1e-12
# k floor used by the stack builder so that E admittances and H impedances stay finite ratios at k = 0
_K_FLOOR = 1e-150

ReflectFn = Callable[[np.ndarray, np.ndarray], tuple[np.ndarray, np.ndarray]]


def _arrays(kappa, k):
    kappa, k = np.broadcast_arrays(np.asarray(kappa, dtype=float), np.asarray(k, dtype=float))
    if np.any(k < 0) or np.any(kappa < 0):
        raise DomainError("kappa and k must be >= 0")
    return kappa, k


def _chi(model: DielectricModel, k):
    chi = np.asarray(model.chi(k), dtype=float)
    return np.where(np.abs(chi) < EPS_ONE_TOL, 0.0, chi)


@dataclass(frozen=True)
class KinematicFactors:
    kappa: np.ndarray
    k: np.ndarray

    @property
    def K0(self):
        return np.hypot(self.kappa, self.k)

    def K(self, eps):
        return np.sqrt(self.kappa**2 + eps * self.k**2)


def impedance_pair(kappa, k, eps):
    """Imaginary-axis normalized impedances (rho_e, rho_h) = (K/(k eps), k/K)."""
    kappa, k = _arrays(kappa, k)
    K = np.sqrt(kappa**2 + eps * k**2)
    with np.errstate(divide="ignore", invalid="ignore"):
        return K / (k * eps), k / K


@dataclass(frozen=True)
class DispersionPair:
    """Structure factor 1/phi for both polarizations plus the gap medium."""

    reflect: ReflectFn
    gap: DielectricModel = VACUUM
    scales: tuple[float, ...] = ()
    name: str = ""
    d: float | None = None

    def with_d(self, d: float) -> "DispersionPair":
        if not d > 0:
            raise DomainError("gap width d must be > 0")
        return replace(self, d=float(d))

    def _gap_width(self, d):
        d = self.d if d is None else d
        if d is None or not d > 0:
            raise DomainError("gap width d must be given and > 0")
        return d

    def lam(self, kappa, k):
        """Normal decay constant Lambda in the gap (K0 for vacuum)."""
        kappa, k = _arrays(kappa, k)
        if self.gap.is_vacuum:
            return np.hypot(kappa, k)
        return np.sqrt(kappa**2 + self.gap(k) * k**2)

    def inv_phi(self, kappa, k):
        kappa, k = _arrays(kappa, k)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            return self.reflect(kappa, k)

    def phi(self, kappa, k):
        ip_e, ip_h = self.inv_phi(kappa, k)
        with np.errstate(divide="ignore"):
            return 1.0 / ip_e, 1.0 / ip_h

    def f(self, kappa, k, d=None):
        d = self._gap_width(d)
        ph_e, ph_h = self.phi(kappa, k)
        x = 2.0 * self.lam(kappa, k) * d
        with np.errstate(over="ignore", invalid="ignore"):
            em1 = np.expm1(x)
            # phi*e^x - 1 = phi*(e^x - 1) + (phi - 1)
            return tuple(np.where(np.isinf(p), np.inf, p * em1 + (p - 1.0)) for p in (ph_e, ph_h))

    def inv_f(self, kappa, k, d=None):
        """(1/f_e, 1/f_h); an infinite f (transparent structure) gives exactly 0."""
        f_e, f_h = self.f(kappa, k, d)
        with np.errstate(divide="ignore"):
            return 1.0 / f_e, 1.0 / f_h

    @property
    def is_sentinel(self) -> bool:
        return self.name.endswith("(transparent)")


def _bind(pair: DispersionPair, d: float | None) -> DispersionPair:
    return pair if d is None else pair.with_d(d)


def _transparent(gap: DielectricModel = VACUUM, name: str = "") -> DispersionPair:
    def reflect(kappa, k):
        z = np.zeros(np.broadcast(kappa, k).shape)
        return z, z.copy()

    return DispersionPair(reflect, gap, (), f"{name} (transparent)")


def pair_casimir(d: float | None = None) -> DispersionPair:
    """Ideal mirrors: phi_e = phi_h = 1."""

    def reflect(kappa, k):
        one = np.ones(np.broadcast(kappa, k).shape)
        return one, one.copy()

    return _bind(DispersionPair(reflect, name="casimir"), d)


def pair_halfspaces(eps: DielectricModel, d: float | None = None) -> DispersionPair:
    """Vacuum gap between two identical dielectric half-spaces."""
    if eps.is_vacuum:
        return _bind(_transparent(name="halfspaces"), d)

    def reflect(kappa, k):
        chi = _chi(eps, k)
        e = 1.0 + chi
        K0 = np.hypot(kappa, k)
        K = np.sqrt(kappa**2 + e * k**2)
        # K - K0 and K - eps K0 with the difference of squares taken analytically
        r_h = chi * k**2 / (K + K0) ** 2
        r_e = chi * ((2.0 + chi) * kappa**2 + e * k**2) / (K + e * K0) ** 2
        return r_e**2, r_h**2

    return _bind(DispersionPair(reflect, scales=eps.scales, name="halfspaces"), d)


def _admittance_gaps(kappa, k, chi_a, chi_b):
    """Y_a - Y_b for both polarizations, in k-free scaled form.

    E: Y = eps/K, H: Y = K (both normalized admittances divided by k or
    multiplied by k respectively, which cancels in any reflection ratio).
    """
    ea, eb = 1.0 + chi_a, 1.0 + chi_b
    Ka = np.sqrt(kappa**2 + ea * k**2)
    Kb = np.sqrt(kappa**2 + eb * k**2)
    dchi = chi_a - chi_b
    dY_h = dchi * k**2 / (Ka + Kb)
    dY_e = dchi * ((ea + eb) * kappa**2 + ea * eb * k**2) / ((ea * Kb + eb * Ka) * Ka * Kb)
    return dY_e, dY_h


def _slab_reflection(kappa, k, chi_g, chi_s, t):
    """Reflection seen from a gap medium off a slab (thickness t) backed by vacuum."""
    eg, es = 1.0 + chi_g, 1.0 + chi_s
    K0 = np.hypot(kappa, k)
    Kg = np.sqrt(kappa**2 + eg * k**2)
    Ks = np.sqrt(kappa**2 + es * k**2)
    T = np.tanh(Ks * t) if np.isfinite(t) else np.ones_like(Ks)
    zero = np.zeros_like(chi_g)
    dg0_e, dg0_h = _admittance_gaps(kappa, k, chi_g, zero)
    dgs_e, dgs_h = _admittance_gaps(kappa, k, chi_g, chi_s)
    out = []
    for Yg, Y0, Ys, dg0, dgs in (
        (eg / Kg, 1.0 / K0, es / Ks, dg0_e, dgs_e),
        (Kg, K0, Ks, dg0_h, dgs_h),
    ):
        num = (Yg + Y0) * Ys + T * (Yg * Y0 + Ys * Ys)
        # Yg*Y0 - Ys^2 = -Yg*(Yg - Y0) + (Yg - Ys)(Yg + Ys)
        den = dg0 * Ys + T * (dgs * (Yg + Ys) - Yg * dg0)
        out.append(den / num)
    return out[0], out[1]


def _gap_medium_pair(eps, eps_gap, t, name):
    if t < 0:
        raise DomainError("plate thickness must be >= 0")

    def reflect(kappa, k):
        chi_g = _chi(eps_gap, k) * np.ones_like(kappa)
        chi_s = _chi(eps, k) * np.ones_like(kappa)
        r_e, r_h = _slab_reflection(kappa, k, chi_g, chi_s, t)
        return r_e**2, r_h**2

    scales = tuple(sorted(set(eps.scales) | set(eps_gap.scales)))
    return DispersionPair(reflect, eps_gap, scales, name)


def pair_finite_plates(eps: DielectricModel, t: float, d: float | None = None) -> DispersionPair:
    """Two identical plates of thickness t (nm) across a vacuum gap."""
    if t < 0:
        raise DomainError("plate thickness must be >= 0")
    if t == 0 or eps.is_vacuum:
        return _bind(_transparent(name="finite_plates"), d)
    return _bind(_gap_medium_pair(eps, VACUUM, t, "finite_plates"), d)


def pair_gap_medium(
    eps: DielectricModel, eps_gap: DielectricModel, t: float, d: float | None = None
) -> DispersionPair:
    """Two plates of thickness t with a dielectric eps_gap filling the gap."""
    if t < 0:
        raise DomainError("plate thickness must be >= 0")
    if eps_gap.is_vacuum and (t == 0 or eps.is_vacuum):
        return _bind(_transparent(eps_gap, "gap_medium"), d)
    return _bind(_gap_medium_pair(eps, eps_gap, t, "gap_medium"), d)


def pair_graphene_sheets(sheet: SheetModel, d: float | None = None) -> DispersionPair:
    """Two free-standing conducting sheets: r = -zeta / (2 y0 + zeta)."""
    if sheet.zeta0 == 0:
        return _bind(_transparent(name="graphene"), d)

    def reflect(kappa, k):
        z = zeta_imag(sheet, k)
        K0 = np.hypot(kappa, k)
        # y0_e = k/K0 and y0_h = K0/k, multiplied through to stay finite at k = 0
        r_e = z * K0 / (2.0 * k + z * K0)
        r_h = z * k / (2.0 * K0 + z * k)
        return r_e**2, r_h**2

    return _bind(DispersionPair(reflect, scales=(sheet.k_c0, sheet.k_p), name="graphene"), d)


@dataclass(frozen=True)
class Layer:
    """A layer on one side of the gap, listed from the gap outward.

    thickness=None marks a semi-infinite layer (must be last). A sheet sits on
    the layer's gap-facing surface.
    """

    model: DielectricModel = VACUUM
    thickness: float | None = None
    sheet: SheetModel | None = None


@dataclass(frozen=True)
class StackSpec:
    d: float
    gap: DielectricModel = VACUUM
    left: tuple[Layer, ...] = ()
    right: tuple[Layer, ...] = ()

    def __post_init__(self):
        if not self.d > 0:
            raise DomainError("gap width d must be > 0")
        for side in (self.left, self.right):
            for i, layer in enumerate(side):
                if layer.thickness is None and i != len(side) - 1:
                    raise DomainError("a semi-infinite layer must be the last on its side")
                if layer.thickness is not None and layer.thickness < 0:
                    raise DomainError("layer thickness must be >= 0")


def _side_reflection(kappa, k, chi_gap, layers: Sequence[Layer]):
    """Reflection of one side by impedance transformation from the outside in.

    E polarization runs on admittances Y = eps k / K, H polarization on
    impedances Z = k / K; each quantity is carried as its difference from the
    current layer's own value so that weak contrasts keep full precision.
    """
    k = np.maximum(k, _K_FLOOR)
    layers = list(layers)
    chis = [_chi(layer.model, k) * np.ones_like(kappa) for layer in layers]
    zero = np.zeros_like(kappa)
    outer_chi = chis[-1] if layers and layers[-1].thickness is None else zero

    def admittances(chi):
        e = 1.0 + chi
        K = np.sqrt(kappa**2 + e * k**2)
        return e * k / K, k / K

    def diff(chi_a, chi_b):
        # Y_a - Y_b (E) and Z_a - Z_b (H) in closed form
        dY_e, dY_h = _admittance_gaps(kappa, k, chi_a, chi_b)
        Ka = np.sqrt(kappa**2 + (1.0 + chi_a) * k**2)
        Kb = np.sqrt(kappa**2 + (1.0 + chi_b) * k**2)
        return k * dY_e, -k * dY_h / (Ka * Kb)

    # state: load value relative to the medium "cur" it is expressed against
    cur = outer_chi
    rel_e, rel_h = zero.copy(), zero.copy()
    for layer, chi in zip(reversed(layers), reversed(chis)):
        if layer.thickness is not None:
            de, dh = diff(cur, chi)
            rel_e, rel_h = rel_e + de, rel_h + dh
            cur = chi
            Ye, Zh = admittances(chi)
            Ks = np.sqrt(kappa**2 + (1.0 + chi) * k**2)
            T = np.tanh(Ks * layer.thickness)
            one_m_T = 2.0 / (np.exp(np.minimum(2.0 * Ks * layer.thickness, 700.0)) + 1.0)
            # Y' - Y_L = Y_L (Y - Y_L)(1 - T) / (Y_L + Y T)
            rel_e = Ye * rel_e * one_m_T / (Ye + (Ye + rel_e) * T)
            rel_h = Zh * rel_h * one_m_T / (Zh + (Zh + rel_h) * T)
        if layer.sheet is not None:
            z = zeta_imag(layer.sheet, k)
            Ye, Zh = admittances(cur)
            rel_e = rel_e + z
            Zl = Zh + rel_h
            # Zl/(1 + z Zl) - Zh without the subtraction
            rel_h = (rel_h - z * Zl * Zh) / (1.0 + z * Zl)
    de, dh = diff(chi_gap, cur)
    Yg, Zg = admittances(chi_gap)
    Ye, Zh = admittances(cur)
    # r_e = (Yg - Yin)/(Yg + Yin), r_h = (Zin - Zg)/(Zin + Zg)
    r_e = (de - rel_e) / (Yg + Ye + rel_e)
    r_h = (-dh + rel_h) / (Zg + Zh + rel_h)
    return r_e, r_h


def pair_from_stack(stack: StackSpec) -> DispersionPair:
    """General plane-layered structure built by impedance transformation."""
    scales = set(stack.gap.scales)
    for layer in stack.left + stack.right:
        scales |= set(layer.model.scales)
        if layer.sheet is not None:
            scales |= {layer.sheet.k_c0, layer.sheet.k_p}

    def reflect(kappa, k):
        chi_gap = _chi(stack.gap, k) * np.ones_like(kappa)
        rl_e, rl_h = _side_reflection(kappa, k, chi_gap, stack.left)
        rr_e, rr_h = _side_reflection(kappa, k, chi_gap, stack.right)
        return rl_e * rr_e, rl_h * rr_h

    return DispersionPair(reflect, stack.gap, tuple(sorted(scales)), "stack", stack.d)
