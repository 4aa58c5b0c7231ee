"""Physical constants and unit conversions.

Everything in the package computes in one unit system: energies in eV,
lengths in nm, times in ps, masses as ratios to the free electron mass.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass

from .errors import DomainError

#: hbar in eV ps (CODATA 2018)
HBAR_EV_PS = 6.582119569e-4

#: hbar^2 / (2 m_e) in eV nm^2 (CODATA 2018 derived)
HBAR2_OVER_2ME = 3.80998e-2


@dataclass(frozen=True)
class PhysicalConstants:
    hbar: float = HBAR_EV_PS
    hbar2_over_2me: float = HBAR2_OVER_2ME
    electron_mass_ratio_reference: float = 1.0


CONSTANTS = PhysicalConstants()


def wavenumber_from_energy(energy, mass_ratio: float) -> complex:
    """Wavenumber k in nm^-1 for kinetic energy E = hbar^2 k^2 / 2m.

    Accepts complex energy (analytic continuation).  Branch: Re k >= 0,
    and for E in the lower half plane (eps - i Gamma/2) the root lands in
    the fourth quadrant.
    """
    if not (cmath.isfinite(complex(energy)) and mass_ratio > 0):
        raise DomainError(f"need finite E and mass_ratio > 0, got {energy!r}, {mass_ratio!r}")
    k = cmath.sqrt(complex(energy) * mass_ratio / HBAR2_OVER_2ME)
    if k.real < 0:
        k = -k
    return k


def energy_from_wavenumber(k, mass_ratio: float) -> complex:
    """Inverse of :func:`wavenumber_from_energy` (no branch ambiguity)."""
    if mass_ratio <= 0:
        raise DomainError(f"mass_ratio must be positive, got {mass_ratio!r}")
    return complex(k) ** 2 * HBAR2_OVER_2ME / mass_ratio


def lifetime_from_width(gamma_ev: float) -> float:
    """Resonance lifetime hbar / Gamma in ps, for Gamma in eV."""
    if not gamma_ev > 0:
        raise DomainError(f"width must be positive, got {gamma_ev!r}")
    return HBAR_EV_PS / gamma_ev
