"""Permittivity and sheet-conductivity models on the imaginary-frequency axis.

Every evaluator takes k = xi/c >= 0 in 1/nm and returns a real number.
Oscillator denominators are written k_r^2 + k^2 + k_c*k, which is the
Wick-rotated Lorentz form and keeps eps(ik) >= 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np

from .constants import CONST
from .errors import DomainError, ModelError


@dataclass(frozen=True)
class OscillatorTerm:
    k_p: float
    k_r: float
    k_c: float = 0.0

    def __post_init__(self):
        if self.k_p < 0 or self.k_r <= 0 or self.k_c < 0:
            raise ModelError(f"invalid oscillator {self}: need k_p>=0, k_r>0, k_c>=0")


@dataclass(frozen=True)
class FreeElectronTerm:
    k_p: float
    k_c: float = 0.0
    k_s: float = 0.0

    def __post_init__(self):
        if min(self.k_p, self.k_c, self.k_s) < 0:
            raise ModelError(f"invalid free-electron term {self}")


class Kind(str, Enum):
    VACUUM = "vacuum"
    LORENTZ = "lorentz"
    CLAUSIUS_MOSSOTTI = "clausius_mossotti"
    STATIC = "static"


@dataclass(frozen=True)
class DielectricModel:
    kind: Kind = Kind.VACUUM
    terms: tuple[OscillatorTerm, ...] = ()
    free: FreeElectronTerm | None = None
    eps0: float = 1.0

    @classmethod
    def vacuum(cls) -> "DielectricModel":
        return cls()

    @classmethod
    def lorentz(cls, terms: Sequence[OscillatorTerm], free: FreeElectronTerm | None = None):
        return cls(Kind.LORENTZ, tuple(terms), free)

    @classmethod
    def clausius_mossotti(cls, terms: Sequence[OscillatorTerm], free: FreeElectronTerm | None = None):
        return cls(Kind.CLAUSIUS_MOSSOTTI, tuple(terms), free)

    @classmethod
    def static(cls, eps0: float) -> "DielectricModel":
        if eps0 < 1:
            raise ModelError("static permittivity must be >= 1")
        return cls(Kind.STATIC, eps0=float(eps0))

    @property
    def is_vacuum(self) -> bool:
        if self.kind is Kind.VACUUM:
            return True
        if self.kind is Kind.STATIC:
            return self.eps0 == 1.0
        return not any(t.k_p > 0 for t in self.terms) and (self.free is None or self.free.k_p == 0)

    @property
    def scales(self) -> tuple[float, ...]:
        """Characteristic wavenumbers, used to anchor quadrature panels."""
        out = []
        for t in self.terms:
            out += [t.k_r, t.k_c]
        if self.free is not None:
            out += [self.free.k_c, self.free.k_s]
        return tuple(sorted({s for s in out if s > 0}))

    def __call__(self, k):
        if self.kind is Kind.LORENTZ:
            return epsilon_lorentz_imag(self, k)
        return 1.0 + self.chi(k)

    def chi(self, k):
        """Susceptibility eps(ik) - 1, evaluated without forming eps first."""
        if self.kind is Kind.VACUUM:
            return _check_k(k) * 0.0
        if self.kind is Kind.STATIC:
            return _check_k(k) * 0.0 + (self.eps0 - 1.0)
        if self.kind is Kind.LORENTZ:
            return oscillator_sum(self, k)
        s = _cm_sum(self, k)
        return s / (1.0 - s / 3.0)


def _check_k(k):
    k = np.asarray(k, dtype=float)
    if np.any(k < 0) or np.any(np.isnan(k)):
        raise DomainError("imaginary-axis wavenumber k must be >= 0")
    return k


def _free_term(free: FreeElectronTerm | None, k):
    if free is None or free.k_p == 0:
        return 0.0
    den = free.k_s**2 + k * k + free.k_c * k
    if np.any(den == 0):
        raise ModelError("free-electron term is singular at k=0 (set k_s or k_c > 0)")
    return free.k_p**2 / den


def oscillator_sum(model: DielectricModel, k):
    """Sum of Wick-rotated oscillator terms plus the free-electron term."""
    k = _check_k(k)
    s = np.zeros_like(k)
    for t in model.terms:
        s = s + t.k_p**2 / (t.k_r**2 + k * k + t.k_c * k)
    return s + _free_term(model.free, k)


def epsilon_lorentz_imag(model: DielectricModel, k):
    """eps(ik) = 1 + chi_e(k) + sum k_p^2 / (k_r^2 + k^2 + k_c k)."""
    if model.kind not in (Kind.LORENTZ, Kind.VACUUM):
        raise ModelError(f"expected a Lorentz-sum model, got {model.kind.value}")
    return 1.0 + oscillator_sum(model, k)


def epsilon_cm_imag(model: DielectricModel, k):
    """Clausius-Mossotti form (1 + 2S/3) / (1 - S/3) of the same oscillator sum S."""
    if model.kind is not Kind.CLAUSIUS_MOSSOTTI:
        raise ModelError(f"expected a Clausius-Mossotti model, got {model.kind.value}")
    s = _cm_sum(model, k)
    return (1.0 + 2.0 * s / 3.0) / (1.0 - s / 3.0)


def _cm_sum(model, k):
    s = oscillator_sum(model, k)
    if np.any(s >= 3.0):
        raise ModelError("oscillator sum reaches 3: Clausius-Mossotti permittivity is infinite")
    return s


def epsilon_static(model: DielectricModel) -> tuple[float, float]:
    """(eps at k=0, optical part 1 + sum k_p^2/k_r^2 of the bound oscillators)."""
    if model.kind is Kind.STATIC:
        return model.eps0, model.eps0
    free = model.free
    if free is not None and free.k_p > 0 and free.k_s == 0:
        raise ModelError("static permittivity undefined for unbound free electrons (k_s = 0)")
    eps_opt = 1.0 + sum(t.k_p**2 / t.k_r**2 for t in model.terms)
    return float(model(0.0)), float(eps_opt)


@dataclass(frozen=True)
class SheetModel:
    """Graphene-like sheet with a frequency-dependent collision rate.

    mu_c is in eV, omega_c0 in 1/s, k_p in 1/nm. A positive temperature
    switches the static conductivity to its finite-temperature intraband form.
    """

    mu_c: float
    omega_c0: float = 1e12
    k_p: float = 10.0
    nu: int = 4
    T: float = 0.0
    zeta0: float = field(init=False)

    def __post_init__(self):
        if self.nu <= 0 or self.nu % 2:
            raise ModelError("only even positive nu is supported")
        if self.mu_c < 0 or self.omega_c0 <= 0 or self.k_p <= 0 or self.T < 0:
            raise ModelError(f"invalid sheet parameters {self}")
        object.__setattr__(self, "zeta0", _static_zeta(self.mu_c, self.omega_c0, self.T))

    @property
    def k_c0(self) -> float:
        """Collision wavenumber omega_c0 / c in 1/nm."""
        return self.omega_c0 / CONST.c * 1e-9


def _static_zeta(mu_c: float, omega_c0: float, T: float) -> float:
    pref = 4 * CONST.sigma0 * CONST.eta0 / (np.pi * CONST.hbar * omega_c0)
    if T == 0:
        return pref * mu_c * CONST.eV_to_J
    kT = CONST.k_B * T
    x = mu_c * CONST.eV_to_J / kT
    # ln(2 + 2 cosh x) = 2 ln(2 cosh(x/2))
    return pref * kT * 2.0 * np.logaddexp(x / 2, -x / 2)


def zeta_imag(sheet: SheetModel, k):
    """Normalized sheet conductivity sigma*eta0 at imaginary frequency ck."""
    k = _check_k(k)
    kpn = sheet.k_p**sheet.nu
    a = sheet.k_c0 * kpn
    return sheet.zeta0 * a / (a + k * (kpn + k**sheet.nu))


def zeta_reactive(sheet: SheetModel, k0):
    """Magnitude of the purely inductive sheet impedance at real frequency ck0.

    This is the collisionless continuation of zeta_imag: on the real axis
    zeta = -i * zeta_reactive, and zeta_reactive(k) -> zeta_imag(k) for k >> k_c0.
    """
    k0 = np.asarray(k0, dtype=float)
    kpn = sheet.k_p**sheet.nu
    with np.errstate(divide="ignore"):
        return sheet.zeta0 * sheet.k_c0 * kpn / (k0 * (kpn + k0**sheet.nu))


def reference_dielectric() -> DielectricModel:
    """Six-oscillator dielectric used for the plate calculations (1/nm units)."""
    return DielectricModel.lorentz(
        [OscillatorTerm(0.05, kr, 1e-6) for kr in (0.01, 0.02, 0.03, 0.04, 0.05, 0.08)]
    )


def reference_conductor() -> DielectricModel:
    """The same dielectric with a weakly bound free-electron term (k_p = 0.05)."""
    base = reference_dielectric()
    return DielectricModel.lorentz(base.terms, FreeElectronTerm(k_p=0.05, k_c=1e-6, k_s=1e-6))
