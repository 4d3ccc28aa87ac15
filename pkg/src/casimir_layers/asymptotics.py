"""Closed-form pressure limits used as oracles and quick estimates.

All functions take distances in nm and wavenumbers in 1/nm and return N/m^2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constants import CONST
from .errors import DomainError


def _check_d(d):
    if not d > 0:
        raise DomainError("gap width d must be > 0")


def s_of_p(p, eps):
    """Normal-wavenumber ratio s(p, eps) = sqrt(p^2 - 1 + eps), so s(1) = sqrt(eps)."""
    return np.sqrt(np.asarray(p, dtype=float) ** 2 - 1.0 + eps)


def casimir_closed_form(d: float) -> float:
    """Ideal-mirror pressure -hbar c pi^2 / (240 d^4)."""
    _check_d(d)
    return -CONST.pressure_unit * math.pi**2 / (240.0 * d**4)


def small_gap_lowfreq(eps0: float, d: float) -> float:
    """Static-permittivity estimate -(3 hbar c / 8 pi^2 d^4) ((1 - sqrt eps0)/(1 + sqrt eps0))^2.

    Meaningful only for d well below 1/k_max of the material's absorption band.
    """
    _check_d(d)
    if eps0 < 1:
        raise DomainError("eps0 must be >= 1")
    if math.isinf(eps0):
        rho = 1.0
    else:
        rho = (1.0 - math.sqrt(eps0)) / (1.0 + math.sqrt(eps0))
    return -3.0 * CONST.pressure_unit / (8.0 * math.pi**2 * d**4) * rho**2


@dataclass(frozen=True)
class NonretardedResult:
    P: float
    terms: dict[str, float]
    leading: float


def nonretarded_expansion(eps0: float, d: float, k_cut: float) -> NonretardedResult:
    """Two-reflection non-retarded pressure with the frequency band cut at k_cut = xi_cut/c.

    The x-integral keeps its lower limit 2 k d; integrating the exp(-2kd) and
    exp(-4kd) pieces over 0 < k < k_cut in closed form gives groups that carry
    explicit powers d^-2, d^-3 and d^-4 (each with its exponential weight).
    ``leading`` is the d -> 0 limit, which is a pure 1/d^3 law.
    """
    _check_d(d)
    if eps0 < 1:
        raise DomainError("eps0 must be >= 1")
    if not k_cut > 0:
        raise DomainError("k_cut must be > 0")
    rho2 = ((1.0 - eps0) / (1.0 + eps0)) ** 2
    U = 2.0 * k_cut * d
    e1, e2 = math.exp(-U), math.exp(-2.0 * U)
    pref = -CONST.pressure_unit * rho2 / (16.0 * math.pi**2)
    # (1/2d)[6 - e1(U^2 + 4U + 6)] + rho2 (1/2d)[3/8 - e2(U^2/4 + U/2 + 3/8)]
    g4 = 3.0 * (1.0 - e1) / d + rho2 * 3.0 * (1.0 - e2) / (16.0 * d)
    g3 = -4.0 * k_cut * e1 - rho2 * 0.5 * k_cut * e2
    g2 = -2.0 * d * k_cut**2 * e1 - rho2 * 0.5 * d * k_cut**2 * e2
    terms = {"d^-4": pref * g4 / d**3, "d^-3": pref * g3 / d**3, "d^-2": pref * g2 / d**3}
    leading = pref * k_cut * (2.0 + rho2 / 4.0) / d**3
    return NonretardedResult(sum(terms.values()), terms, leading)


@dataclass(frozen=True)
class ThinFilmResult:
    P: float
    valid: bool


def thin_film_plasma_correction(k_max: float, d: float) -> ThinFilmResult:
    """-(hbar c / 24 pi^2 d^4)(1 - 10 d^2 k_max^2); flagged invalid once 2 d k_max >= 1."""
    _check_d(d)
    if k_max < 0:
        raise DomainError("k_max must be >= 0")
    P = -CONST.pressure_unit / (24.0 * math.pi**2 * d**4) * (1.0 - 10.0 * d**2 * k_max**2)
    return ThinFilmResult(P, 2.0 * d * k_max < 1.0)
