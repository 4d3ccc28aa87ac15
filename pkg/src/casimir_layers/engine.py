"""Pressure integrals over the imaginary-frequency quarter plane.

The zero-temperature integral is taken in polar coordinates
kappa = chi cos(theta), k = chi sin(theta) on composite Gauss-Legendre panels,
with the region chi > chi_max added in closed form. Finite temperature goes
through the Matsubara sum; the classical limit keeps only its n = 0 term.

Pressures are negative for attraction and reported in N/m^2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Callable

import numpy as np

from .constants import CONST
from .dispersion import DispersionPair
from .errors import DomainError, NumericalError

D_MIN = 1e-3  # nm; below this the integral is dominated by the cutoff


class Method(str, Enum):
    VAN_KAMPEN_T0 = "vankampen_t0"
    REFLECTION_T0 = "reflection_t0"
    MATSUBARA = "matsubara"
    HIGH_T = "high_t"
    MODESUM_RADIATED = "modesum_radiated"
    MODESUM_TOTAL = "modesum_total"


def default_chi_max(scales: tuple[float, ...], d: float) -> float:
    return 1.0 + 10.0 * max(scales, default=0.0) + 1.0 / d


@dataclass(frozen=True)
class QuadratureSpec:
    n_theta: int = 600
    n_chi: int = 5000
    n_subdomains: int = 6
    theta0: float = 1e-3
    order: int = 16
    chi_max_rule: Callable[[tuple[float, ...], float], float] = default_chi_max

    def __post_init__(self):
        if min(self.n_theta, self.n_chi, self.n_subdomains, self.order) < 1:
            raise DomainError("quadrature counts must be >= 1")
        if not 0 < self.theta0 < math.pi / 4:
            raise DomainError("theta0 must lie in (0, pi/4)")

    def halved(self) -> "QuadratureSpec":
        return QuadratureSpec(
            max(self.n_theta // 2, 2 * self.order),
            max(self.n_chi // 2, 2 * self.order),
            self.n_subdomains,
            self.theta0,
            self.order,
            self.chi_max_rule,
        )


@dataclass(frozen=True)
class PressureResult:
    P_e: float
    P_h: float
    err_estimate: float
    method: Method
    info: dict = field(default_factory=dict, compare=False)

    @property
    def P(self) -> float:
        return self.P_e + self.P_h


@dataclass(frozen=True)
class ThermalWeight:
    """coth(hbar c k / 2 k_B T), equal to 1 at T = 0."""

    T: float = 0.0

    def __call__(self, k):
        k = np.asarray(k, dtype=float)
        if self.T == 0:
            return np.ones_like(k)
        x = k / (2.0 * CONST.thermal_wavenumber(self.T))
        with np.errstate(divide="ignore"):
            return 1.0 / np.tanh(x)


@dataclass(frozen=True)
class MatsubaraGrid:
    T: float

    def __post_init__(self):
        if not self.T > 0:
            raise DomainError("Matsubara grid needs T > 0")

    @property
    def spacing(self) -> float:
        """k_1 = 2 pi k_B T / (hbar c) in 1/nm."""
        return 2.0 * math.pi * CONST.thermal_wavenumber(self.T)

    def node(self, n):
        return self.spacing * np.asarray(n, dtype=float)

    @staticmethod
    def weight(n):
        return np.where(np.asarray(n) == 0, 0.5, 1.0)


@lru_cache(maxsize=None)
def _gl(order: int):
    return np.polynomial.legendre.leggauss(order)


def _panels(edges, order):
    """Gauss-Legendre nodes and weights on consecutive intervals."""
    x, w = _gl(order)
    edges = np.asarray(edges, dtype=float)
    a, b = edges[:-1, None], edges[1:, None]
    half = 0.5 * (b - a)
    return (a + half * (x + 1.0)).ravel(), (half * w).ravel()


def _split(a, b, n_panels):
    """Panel edges on [a, b]: geometric when the interval spans a wide ratio."""
    n_panels = max(int(n_panels), 1)
    if a > 0 and b / a > 4:
        return np.geomspace(a, b, n_panels + 1)
    return np.linspace(a, b, n_panels + 1)


def _chi_edges(scales, d, chi_max, n_sub):
    anchors = set(s for s in scales if s > 0) | {0.5 / d, 2.0 / d, 8.0 / d}
    edges = sorted({0.0, chi_max} | {s for s in anchors if s < chi_max})
    # refine geometrically until there are at least n_sub intervals
    while len(edges) - 1 < n_sub:
        gaps = [(b / a if a > 0 else b / max(edges[1] * 1e-3, 1e-300), i) for i, (a, b) in enumerate(zip(edges, edges[1:]))]
        _, i = max(gaps)
        a, b = edges[i], edges[i + 1]
        edges.insert(i + 1, math.sqrt(a * b) if a > 0 else 0.5 * b)
    return edges


def chi_grid(scales, d, spec: QuadratureSpec):
    chi_max = spec.chi_max_rule(tuple(scales), d)
    edges = _chi_edges(scales, d, chi_max, spec.n_subdomains)
    per = max(spec.n_chi // (len(edges) - 1) // spec.order, 1)
    all_edges = np.unique(np.concatenate([_split(a, b, per) for a, b in zip(edges, edges[1:])]))
    x, w = _panels(all_edges, spec.order)
    return x, w, chi_max


def theta_grid(spec: QuadratureSpec):
    n_low = max(spec.n_theta // 10 // spec.order, 1)
    n_high = max((spec.n_theta - n_low * spec.order) // spec.order, 1)
    low = np.linspace(0.0, spec.theta0, n_low + 1)
    high = np.geomspace(spec.theta0, 0.5 * math.pi, n_high + 1)
    return _panels(np.concatenate([low, high[1:]]), spec.order)


def _moment(p: int, a, b):
    """Integral of x^p exp(-b x) over (a, inf) for p in {2, 3}."""
    ab = a * b
    if p == 2:
        poly = ab**2 + 2 * ab + 2
    elif p == 3:
        poly = ab**3 + 3 * ab**2 + 6 * ab + 6
    else:
        raise ValueError("moment order must be 2 or 3")
    return np.exp(-ab) * poly / b ** (p + 1)


def analytic_tail(phi_e0, phi_h0, chi0, d):
    """Closed form of the remainder integral of chi^2 exp(-2 chi d)(1/phi_e + 1/phi_h) over (chi0, inf)."""
    with np.errstate(divide="ignore"):
        s = 1.0 / np.asarray(phi_e0, dtype=float) + 1.0 / np.asarray(phi_h0, dtype=float)
    return np.exp(-2 * d * chi0) * s * (chi0**2 / (2 * d) + chi0 / (2 * d**2) + 1 / (4 * d**3))


def _series_tail(ip, lam, chi0, d, p=3, tol=1e-17):
    """Sum over n >= 1 of ip^n * moment_p(chi0, 2 n lam d), the geometric expansion of 1/f."""
    total = np.zeros(np.broadcast(ip, lam).shape)
    term_pow = np.ones_like(total)
    for n in range(1, 400):
        term_pow = term_pow * ip
        term = term_pow * _moment(p, chi0, 2 * n * lam * d)
        total = total + term
        if np.all(np.abs(term) <= tol * np.abs(total)):
            break
    return total


def _resolve_d(pair: DispersionPair, d):
    d = pair.d if d is None else d
    if d is None:
        raise DomainError("gap width d must be given")
    if not d > 0:
        raise DomainError("gap width d must be > 0")
    if d < D_MIN:
        raise DomainError(f"d = {d} nm is below the supported minimum {D_MIN} nm")
    return float(d)


def reflection_kernel(pair: DispersionPair, kappa, k, d=None):
    """Per-polarization r^2 e^{-2 Lambda d} / (1 - r^2 e^{-2 Lambda d})."""
    d = pair.d if d is None else d
    ip_e, ip_h = pair.inv_phi(kappa, k)
    e = np.exp(-2.0 * pair.lam(kappa, k) * d)
    return tuple(ip * e / (1.0 - ip * e) for ip in (ip_e, ip_h))


def _check_finite(values, where):
    bad = ~np.isfinite(values)
    if np.any(bad):
        idx = np.argwhere(bad)[0]
        raise NumericalError(f"non-finite integrand at {where(idx)}")


def _polar_integral(pair, d, spec, form):
    chi, wchi, chi_max = chi_grid(pair.scales, d, spec)
    th, wth = theta_grid(spec)
    out = np.zeros(2)
    block = max(1, 400_000 // chi.size)
    for s in range(0, th.size, block):
        t, wt = th[s : s + block, None], wth[s : s + block, None]
        kappa, k = chi * np.cos(t), chi * np.sin(t)
        if form == "reflection":
            vals = reflection_kernel(pair, kappa, k, d)
        else:
            vals = pair.inv_f(kappa, k, d)
        lam = pair.lam(kappa, k)
        weight = np.cos(t) * lam * chi**2 * wchi * wt
        for j, v in enumerate(vals):
            g = v * weight
            _check_finite(g, lambda idx: f"chi={chi[idx[1]]:.6g}, theta={t[idx[0], 0]:.6g}")
            out[j] += g.sum()
        # remainder beyond chi_max with 1/phi and Lambda/chi frozen at chi_max
        k0, kap0 = chi_max * np.sin(t[:, 0]), chi_max * np.cos(t[:, 0])
        ips = pair.inv_phi(kap0, k0)
        lam0 = pair.lam(kap0, k0) / chi_max
        for j, ip in enumerate(ips):
            tail = np.cos(t[:, 0]) * lam0 * _series_tail(ip, lam0, chi_max, d)
            out[j] += np.sum(tail * wt[:, 0])
    return out


def pressure_zero_temperature(
    pair: DispersionPair, d: float | None = None, spec: QuadratureSpec | None = None, form: str = "phi"
) -> PressureResult:
    """Zero-temperature pressure -(hbar c / 2 pi^2) * integral of kappa Lambda (1/f_e + 1/f_h)."""
    d = _resolve_d(pair, d)
    spec = spec or QuadratureSpec()
    method = Method.REFLECTION_T0 if form == "reflection" else Method.VAN_KAMPEN_T0
    if pair.is_sentinel:
        return PressureResult(0.0, 0.0, 0.0, method)
    scale = -CONST.pressure_unit / (2 * math.pi**2)
    fine = _polar_integral(pair, d, spec, form) * scale
    coarse = _polar_integral(pair, d, spec.halved(), form) * scale
    P = fine.sum()
    err = max(abs(P - coarse.sum()), 1e-10 * abs(P))
    return PressureResult(float(fine[0]), float(fine[1]), float(err), method)


def _lambda_edges(d):
    return np.array([0.0, 0.01, 0.03, 0.1, 0.3, 1.0, 2.0, 4.0, 8.0, 15.0, 30.0]) / d


def _matsubara_terms(pair: DispersionPair, d: float, k_n: np.ndarray, order: int):
    """Per-polarization kappa-integrals int Lambda^2 q/(1-q) dLambda for a block of nodes."""
    u, wu = _panels(_lambda_edges(d), order)
    k = k_n[:, None] * np.ones_like(u)
    eg = pair.gap(k_n)[:, None] if not pair.gap.is_vacuum else 1.0
    lam_min = np.sqrt(eg) * k_n[:, None]
    lam = lam_min + u
    kappa = np.sqrt(np.maximum(lam**2 - lam_min**2, 0.0))
    ips = pair.inv_phi(kappa, k)
    q_fac = np.exp(-2.0 * lam * d)
    res = []
    lam_end = lam_min[:, 0] + _lambda_edges(d)[-1]
    kap_end = np.sqrt(lam_end**2 - lam_min[:, 0] ** 2)
    ip_end = pair.inv_phi(kap_end, k_n)
    for ip, ipe in zip(ips, ip_end):
        q = ip * q_fac
        g = lam**2 * q / (1.0 - q) * wu
        _check_finite(g, lambda idx: f"k_n={k_n[idx[0]]:.6g}, Lambda={lam[tuple(idx)]:.6g}")
        res.append(g.sum(axis=1) + _series_tail(ipe, 1.0, lam_end, d, p=2))
    return np.array(res)


def pressure_matsubara(
    pair: DispersionPair,
    d: float | None = None,
    T: float = 300.0,
    spec: QuadratureSpec | None = None,
    rel_tol: float = 1e-8,
    n_min: int = 50,
    n_max: int = 10_000_000,
) -> PressureResult:
    """Finite-temperature pressure as a Matsubara sum with half weight at n = 0.

    The pair is evaluated directly at each node k_n; its k-dependence carries
    the material dispersion.
    """
    d = _resolve_d(pair, d)
    if not T > 0:
        raise DomainError("Matsubara summation needs T > 0; use pressure_zero_temperature")
    spec = spec or QuadratureSpec()
    if pair.is_sentinel:
        return PressureResult(0.0, 0.0, 0.0, Method.MATSUBARA, {"n_terms": 0})
    grid = MatsubaraGrid(T)
    order = spec.order
    total = np.zeros(2)
    last = np.zeros(2)
    n0, block = 0, 256
    while True:
        n = np.arange(n0, n0 + block)
        terms = _matsubara_terms(pair, d, grid.node(n), order) * grid.weight(n)
        for i in range(n.size):
            total += terms[:, i]
            last = terms[:, i]
            if n[i] >= n_min and abs(last.sum()) < rel_tol * abs(total.sum()):
                n_used = int(n[i]) + 1
                break
        else:
            n0 += block
            if n0 > n_max:
                raise NumericalError("Matsubara sum did not converge")
            block = min(block * 2, 8192)
            continue
        break
    scale = -CONST.k_B * T / math.pi * 1e27
    P_e, P_h = total * scale
    err = max(abs(last.sum() * scale) * n_used, 1e-10 * abs(P_e + P_h))
    return PressureResult(float(P_e), float(P_h), float(err), Method.MATSUBARA, {"n_terms": n_used})


def pressure_high_temperature(
    pair: DispersionPair, d: float | None = None, T: float = 300.0, spec: QuadratureSpec | None = None
) -> PressureResult:
    """Classical limit: only the static (n = 0) Matsubara term, linear in T."""
    d = _resolve_d(pair, d)
    if not T > 0:
        raise DomainError("T must be > 0")
    spec = spec or QuadratureSpec()
    if pair.is_sentinel:
        return PressureResult(0.0, 0.0, 0.0, Method.HIGH_T)
    terms = _matsubara_terms(pair, d, np.zeros(1), spec.order)[:, 0]
    P_e, P_h = -CONST.k_B * T / (2 * math.pi) * 1e27 * terms
    return PressureResult(float(P_e), float(P_h), float(1e-10 * abs(P_e + P_h)), Method.HIGH_T)
