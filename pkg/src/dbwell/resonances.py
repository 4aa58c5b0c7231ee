"""Complex S-matrix poles, normalized resonant (Gamow) states, widths.

Poles k_n sit in the fourth quadrant of the k plane and satisfy
m22(k_n) = 0; the associated energy is E_n = eps_n - i Gamma_n / 2.
Resonant states u_n solve the stationary equation at k_n with purely
outgoing boundary conditions and the normalization

    int_0^L u_n^2 dx + i (u_n(0)^2 + u_n(L)^2) / (2 k_n) = 1

(note u^2, not |u|^2).  Under it the expansion coefficients
2 k u_n(0) u_n(x) / (k^2 - k_n^2) used by the dynamics module come out
with the right residues; the convention is cross-checked end to end by
the grid-propagation oracle test rather than assumed.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import curve_fit

from .errors import DomainError, NumericsError
from .potential import PotentialProfile
from .scattering import PiecewiseSolution, pole_function, transmission
from .units import HBAR2_OVER_2ME, energy_from_wavenumber, wavenumber_from_energy

_NEWTON_STEP = 1e-6          # central-difference step in k, nm^-1
_NEWTON_TOL = 1e-12
_NEWTON_MAXITER = 50
_GAUSS_NODES = np.polynomial.legendre.leggauss(64)


@dataclass(frozen=True)
class Resonance:
    """One S-matrix pole with its normalized Gamow state and widths."""

    k_pole: complex
    energy: complex              # eps - i Gamma/2, eV
    grid: np.ndarray
    u_samples: np.ndarray
    u_at_0: complex
    u_at_L: complex
    gamma0: float                # partial width through the left barrier, eV
    gammaL: float                # partial width through the right barrier, eV
    fit_rel_err: float           # Breit-Wigner cross-check on gamma0*gammaL
    fit_warning: bool
    state: PiecewiseSolution = field(repr=False)

    @property
    def eps(self) -> float:
        return self.energy.real

    @property
    def gamma(self) -> float:
        return -2.0 * self.energy.imag

    def u(self, x):
        """Normalized u_n evaluated anywhere in [0, L]."""
        return self.state(x)


def _gamow_norm_squared(profile: PotentialProfile, sol: PiecewiseSolution, k_pole: complex) -> complex:
    xs, ws = _GAUSS_NODES
    edges = profile.boundaries
    acc = 0.0 + 0.0j
    for j in range(len(profile.segments)):
        half = 0.5 * (edges[j + 1] - edges[j])
        mid = 0.5 * (edges[j + 1] + edges[j])
        vals = sol(mid + half * xs)
        acc += half * np.sum(ws * vals * vals)
    u0 = sol(np.array([0.0]))[0]
    uL = sol(np.array([profile.length]))[0]
    return acc + 1j * (u0 * u0 + uL * uL) / (2.0 * k_pole)


def resonant_state(profile: PotentialProfile, k_pole: complex, grid=None):
    """Normalized Gamow state at a converged pole.

    Returns (samples, solution).  The raw state starts from u(0) = 1,
    u'(0) = -i k (outgoing to the left); the outgoing condition at x = L
    then holds automatically at a true pole and is verified to 1e-8.
    The global phase is fixed by dividing the u(0) = 1 start by the
    principal square root of the normalization integral.
    """
    k_pole = complex(k_pole)
    if grid is None:
        grid = np.linspace(0.0, profile.length, 513)
    grid = np.asarray(grid, dtype=float)
    sol = PiecewiseSolution(profile, k_pole, 1.0, -1j * k_pole)
    vL, dL = sol.value_and_derivative(np.array([profile.length]))
    residual = abs(dL[0] - 1j * k_pole * vL[0]) / (abs(k_pole) * abs(vL[0]))
    if residual > 1e-8:
        raise NumericsError(
            f"outgoing-condition residual {residual:.2e} at x=L: k={k_pole} is not a pole"
        )
    norm2 = _gamow_norm_squared(profile, sol, k_pole)
    norm = np.sqrt(norm2)  # principal branch fixes the global phase
    normalized = PiecewiseSolution(profile, k_pole, 1.0 / norm, -1j * k_pole / norm)
    return normalized(grid), normalized


def _breit_wigner_product_check(profile, eps, gamma, product):
    """Relative error of gamma0*gammaL against a lineshape fit of T(E)."""
    e_lo = max(eps - 3.0 * gamma, 0.2 * eps)
    e_hi = eps + 3.0 * gamma
    energies = np.linspace(e_lo, e_hi, 61)
    t_vals = np.array([transmission(profile, e) for e in energies])

    def model(e, height, center, width):
        return height * 0.25 * width**2 / ((e - center) ** 2 + 0.25 * width**2)

    try:
        popt, _ = curve_fit(
            model, energies, t_vals, p0=(max(t_vals), eps, gamma), maxfev=10000
        )
    except RuntimeError:
        return math.inf
    height, _, width = popt
    fit_product = abs(height) * width**2 / 4.0
    return abs(fit_product / product - 1.0) if product > 0 else math.inf


def _build_resonance(profile: PotentialProfile, k_pole: complex, grid=None) -> Resonance:
    samples, sol = resonant_state(profile, k_pole, grid)
    if grid is None:
        grid = np.linspace(0.0, profile.length, 513)
    grid = np.asarray(grid, dtype=float)
    energy = energy_from_wavenumber(k_pole, profile.mass_ratio)
    gamma = -2.0 * energy.imag
    u0 = complex(sol(np.array([0.0]))[0])
    uL = complex(sol(np.array([profile.length]))[0])
    w0, wL = abs(u0) ** 2, abs(uL) ** 2
    gamma0 = gamma * w0 / (w0 + wL)
    gammaL = gamma - gamma0
    fit_err = _breit_wigner_product_check(profile, energy.real, gamma, gamma0 * gammaL)
    return Resonance(
        k_pole=k_pole,
        energy=energy,
        grid=grid,
        u_samples=samples,
        u_at_0=u0,
        u_at_L=uL,
        gamma0=gamma0,
        gammaL=gammaL,
        fit_rel_err=fit_err,
        fit_warning=fit_err > 0.05,
        state=sol,
    )


def partial_widths(resonance: Resonance) -> tuple[float, float]:
    """(Gamma_n^0, Gamma_n^L); they sum to Gamma_n exactly by construction."""
    return resonance.gamma0, resonance.gammaL


def refine_pole(profile: PotentialProfile, k_start: complex) -> tuple[complex, float, bool]:
    """Newton iteration on m22(k) = 0 with a central-difference derivative.

    Returns (k, |m22(k)|, converged).  Converged means the residual
    dropped below 1e-12 or the step stagnated at machine level (thick
    barriers put the evaluation noise floor slightly above 1e-12).
    """
    k = complex(k_start)
    f = pole_function(profile, k)
    for _ in range(_NEWTON_MAXITER):
        if abs(f) < _NEWTON_TOL:
            return k, abs(f), True
        df = (pole_function(profile, k + _NEWTON_STEP) - pole_function(profile, k - _NEWTON_STEP)) / (
            2.0 * _NEWTON_STEP
        )
        if df == 0:
            return k, abs(f), False
        step = f / df
        k_next = k - step
        f_next = pole_function(profile, k_next)
        if abs(step) < 1e-15 * max(abs(k), 1.0):
            # at the double-precision floor; accept if the zero is resolved
            return k_next, abs(f_next), abs(f_next) < 1e-9
        k, f = k_next, f_next
    return k, abs(f), abs(f) < 1e-9


def _scan_transmission_peaks(profile: PotentialProfile, e_min: float, e_max: float, points: int):
    """(eps_estimate, gamma_estimate) for each local maximum of T(E)."""
    energies = np.linspace(e_min, e_max, points)
    t_vals = np.array([transmission(profile, e) for e in energies])
    de = energies[1] - energies[0]
    peaks = []
    for i in range(1, points - 1):
        if not (t_vals[i] > t_vals[i - 1] and t_vals[i] >= t_vals[i + 1]):
            continue
        # half-maximum width where resolvable, else curvature of a Lorentzian
        half = 0.5 * t_vals[i]
        lo = i
        while lo > 0 and t_vals[lo] > half:
            lo -= 1
        hi = i
        while hi < points - 1 and t_vals[hi] > half:
            hi += 1
        if t_vals[lo] <= half and t_vals[hi] <= half:
            gamma_est = energies[hi] - energies[lo]
        else:
            d2 = (t_vals[i + 1] - 2.0 * t_vals[i] + t_vals[i - 1]) / de**2
            gamma_est = math.sqrt(-8.0 * t_vals[i] / d2) if d2 < 0 else 0.1 * energies[i]
        gamma_est = min(gamma_est, 0.5 * energies[i])
        peaks.append((energies[i], gamma_est))
    return peaks


def locate_resonances(
    profile: PotentialProfile,
    e_max: float,
    max_count: int = 8,
    e_min: float = 1e-4,
    scan_points: int = 20000,
) -> list[Resonance]:
    """Poles with Re E up to e_max, sorted by energy.

    Intended for the isolated-resonance regime (e_max below the lowest
    barrier top); scanning above the tops is allowed and finds the broad
    upper poles, which matter only for very-short-time dynamics.
    Initial guesses come from transmission maxima; each is polished by
    Newton iteration in complex k.  Guesses that diverge or leave the
    fourth quadrant are reported via warnings and skipped.
    """
    if not e_max > e_min > 0:
        raise DomainError(f"need e_max > e_min > 0, got {e_max!r}, {e_min!r}")
    if max_count < 1:
        raise DomainError("max_count must be >= 1")
    found: list[Resonance] = []
    for eps_est, gamma_est in _scan_transmission_peaks(profile, e_min, e_max, scan_points):
        k0 = wavenumber_from_energy(complex(eps_est, -0.5 * gamma_est), profile.mass_ratio)
        k_pole, residual, converged = refine_pole(profile, k0)
        if not converged:
            warnings.warn(
                f"pole search from eps={eps_est:.6g} eV did not converge (|m22|={residual:.2e})",
                stacklevel=2,
            )
            continue
        if not (k_pole.real > 0 and k_pole.imag < 0):
            warnings.warn(
                f"pole from eps={eps_est:.6g} eV left the fourth quadrant: {k_pole}",
                stacklevel=2,
            )
            continue
        if any(abs(k_pole - r.k_pole) < 1e-9 for r in found):
            continue
        found.append(_build_resonance(profile, k_pole))
    found.sort(key=lambda r: r.eps)
    return found[:max_count]
