"""Transient buildup dynamics in double-barrier resonant structures.

Stationary scattering and complex resonance poles for piecewise-constant
potentials, the exact internal time-dependent solution for a cutoff
plane-wave (shutter) initial state, its one-level closed forms, and a
Crank-Nicolson reference propagator for validation.
"""

__version__ = "0.1.0"

from .dynamics import (
    BuildupCurve,
    SnapshotSet,
    crank_nicolson_reference,
    internal_wavefunction,
    snapshot,
    time_series,
)
from .onelevel import OneLevelParams, breit_wigner, envelope, omega_from_gamma, one_level_density
from .potential import (
    PotentialProfile,
    load_profile,
    parse_profile,
    potential_at,
    preset,
    serialize_profile,
    well_center,
)
from .resonances import Resonance, locate_resonances, partial_widths, resonant_state
from .scattering import (
    ScatteringSolution,
    TransferMatrix,
    solve_energy_for_gamma,
    stationary_wavefunction,
    transfer_matrix,
    transmission,
)
from .specialfn import MoshinskyArgument, faddeeva, faddeeva_flagged, moshinsky
from .units import (
    CONSTANTS,
    HBAR2_OVER_2ME,
    HBAR_EV_PS,
    PhysicalConstants,
    energy_from_wavenumber,
    lifetime_from_width,
    wavenumber_from_energy,
)

__all__ = [
    "BuildupCurve",
    "CONSTANTS",
    "HBAR2_OVER_2ME",
    "HBAR_EV_PS",
    "MoshinskyArgument",
    "OneLevelParams",
    "PhysicalConstants",
    "PotentialProfile",
    "Resonance",
    "ScatteringSolution",
    "SnapshotSet",
    "TransferMatrix",
    "breit_wigner",
    "crank_nicolson_reference",
    "envelope",
    "energy_from_wavenumber",
    "faddeeva",
    "faddeeva_flagged",
    "internal_wavefunction",
    "lifetime_from_width",
    "load_profile",
    "locate_resonances",
    "moshinsky",
    "omega_from_gamma",
    "one_level_density",
    "parse_profile",
    "partial_widths",
    "potential_at",
    "preset",
    "resonant_state",
    "serialize_profile",
    "snapshot",
    "solve_energy_for_gamma",
    "stationary_wavefunction",
    "time_series",
    "transfer_matrix",
    "transmission",
    "wavenumber_from_energy",
    "well_center",
]
