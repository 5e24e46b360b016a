"""Waveguide QED of giant atoms in a flux-modulated SQUID-chain waveguide."""

from .atom import CouplingLinearization, GiantAtom, coupling_gk, linearize_atom
from .bloch import (
    BandStructure,
    EffectiveMass,
    ModulationProfile,
    band_structure,
    bz_grid,
    effective_mass_fit,
)
from .boundstate import (
    bound_state,
    chirality,
    matched_strength_ratio,
    solve_bound_energy,
    visibility,
)
from .circuit import (
    CircuitParams,
    calibrated_params,
    chain_eigenmodes,
    linear_dispersion,
    nominal_params,
    squid_dispersion,
)
from .interactions import Dimer, coupling_pair, find_poles, self_energy, simplified_sigma
from .topo import PumpSchedule, evolve_pump, ssh_hamiltonian, winding_number

__version__ = "0.1.0"

__all__ = [
    "BandStructure",
    "CircuitParams",
    "CouplingLinearization",
    "Dimer",
    "EffectiveMass",
    "GiantAtom",
    "ModulationProfile",
    "PumpSchedule",
    "__version__",
    "band_structure",
    "bound_state",
    "bz_grid",
    "calibrated_params",
    "chain_eigenmodes",
    "chirality",
    "coupling_gk",
    "coupling_pair",
    "effective_mass_fit",
    "evolve_pump",
    "find_poles",
    "linear_dispersion",
    "linearize_atom",
    "matched_strength_ratio",
    "nominal_params",
    "self_energy",
    "simplified_sigma",
    "solve_bound_energy",
    "squid_dispersion",
    "ssh_hamiltonian",
    "visibility",
    "winding_number",
]
