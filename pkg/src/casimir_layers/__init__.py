"""Casimir-Lifshitz pressure between plane-layered structures."""

from .asymptotics import (
    casimir_closed_form,
    nonretarded_expansion,
    small_gap_lowfreq,
    thin_film_plasma_correction,
)
from .constants import CONST, PhysicalConstants
from .dispersion import (
    DispersionPair,
    Layer,
    StackSpec,
    pair_casimir,
    pair_finite_plates,
    pair_from_stack,
    pair_gap_medium,
    pair_graphene_sheets,
    pair_halfspaces,
)
from .engine import (
    Method,
    PressureResult,
    QuadratureSpec,
    analytic_tail,
    pressure_high_temperature,
    pressure_matsubara,
    pressure_zero_temperature,
    reflection_kernel,
)
from .errors import CasimirError, DomainError, ModelError, NumericalError
from .materials import (
    DielectricModel,
    FreeElectronTerm,
    OscillatorTerm,
    SheetModel,
    reference_conductor,
    reference_dielectric,
    zeta_imag,
)
from .modesum import ModeSumSpec, pressure_radiated, pressure_with_evanescent

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
