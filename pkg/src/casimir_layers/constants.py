"""Physical constants shared by every module.

Wavenumbers are in 1/nm and distances in nm throughout the package; the
conversion to SI happens only where a pressure is reported.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class PhysicalConstants:
    hbar_c: float = 3.16152677e-26  # J*m
    hbar: float = 1.054571817e-34  # J*s
    c: float = 299_792_458.0  # m/s
    k_B: float = 1.380649e-23  # J/K
    eta0: float = 376.730  # ohm
    sigma0: float = 6.085e-5  # S, e^2 / (4 hbar)
    eV_to_J: float = 1.60218e-19

    @property
    def pressure_unit(self) -> float:
        """N/m^2 carried by hbar*c times 1 nm^-4."""
        return self.hbar_c * 1e36

    def thermal_wavenumber(self, T: float) -> float:
        """k_B T / (hbar c) in 1/nm."""
        return self.k_B * T / self.hbar_c * 1e-9


CONST = PhysicalConstants()
