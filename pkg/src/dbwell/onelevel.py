"""Closed-form one-level analytics for the normalized buildup.

The normalized density at the well center follows

    |Psi(tau)/phi|^2 = 1 + e^{-tau} - 2 e^{-tau/2} cos(omega tau)

with tau in lifetime units and omega the detuning in widths.  Its lower
envelope is the capacitor law (1 - e^{-tau/2})^2: the transient constant
is two lifetimes regardless of detuning.  Valid from tau of about 0.5
(shorter times need more than one resonance term).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

#: transient time constant in lifetime units
TAU0 = 2.0


@dataclass(frozen=True)
class OneLevelParams:
    """Dimensionless frequency omega (stored as |omega|; the density is
    even in omega) and the fixed transient constant."""

    omega: float
    tau0: float = TAU0

    def __post_init__(self):
        object.__setattr__(self, "omega", abs(self.omega))
        if self.tau0 != TAU0:
            raise DomainError(f"tau0 is fixed at {TAU0}")

    @classmethod
    def from_gamma(cls, gamma: float) -> "OneLevelParams":
        return cls(omega=omega_from_gamma(gamma))


def one_level_density(tau, omega: float):
    """Normalized density 1 + e^{-tau} - 2 e^{-tau/2} cos(omega tau)."""
    tau = np.asarray(tau, dtype=float)
    if np.any(tau < 0):
        raise DomainError("tau must be >= 0")
    return (1.0 + np.exp(-tau) - 2.0 * np.exp(-0.5 * tau) * np.cos(omega * tau))[()]


def envelope(tau):
    """Capacitor-law lower envelope (1 - e^{-tau/2})^2."""
    tau = np.asarray(tau, dtype=float)
    if np.any(tau < 0):
        raise DomainError("tau must be >= 0")
    return ((1.0 - np.exp(-tau / TAU0)) ** 2)[()]


def omega_from_gamma(gamma: float) -> float:
    """Detuning frequency omega = sqrt(1/gamma - 1)/2 for a lineshape ratio gamma."""
    if not 0 < gamma <= 1:
        raise DomainError(f"gamma must be in (0, 1], got {gamma!r}")
    return math.sqrt(1.0 / gamma - 1.0) / 2.0


def breit_wigner(energy, eps_n: float, gamma_n: float, gamma_n0: float, gamma_nL: float):
    """Transmission lineshape Gamma0 GammaL / ((E - eps)^2 + Gamma^2/4).

    The partial widths must be positive and sum to gamma_n.
    Peak value: T(eps_n) = 4 Gamma0 GammaL / Gamma^2.
    """
    if not (gamma_n > 0 and gamma_n0 > 0 and gamma_nL > 0):
        raise DomainError("widths must be positive")
    if abs(gamma_n0 + gamma_nL - gamma_n) > 1e-9 * gamma_n:
        raise DomainError(
            f"partial widths must sum to the total: {gamma_n0} + {gamma_nL} != {gamma_n}"
        )
    energy = np.asarray(energy, dtype=float)
    return (gamma_n0 * gamma_nL / ((energy - eps_n) ** 2 + 0.25 * gamma_n**2))[()]
