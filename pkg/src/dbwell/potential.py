"""Piecewise-constant 1-D potentials vanishing outside [0, L].

Includes the three double-barrier presets used throughout (A, B, C) and a
plain-text config format for user-defined profiles.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

from .errors import ConfigError, ProfileParseError


@dataclass(frozen=True)
class PotentialProfile:
    """Ordered (width_nm, height_eV) segments on [0, L]; V = 0 outside."""

    segments: tuple[tuple[float, float], ...]
    mass_ratio: float
    label: str = ""

    def __post_init__(self):
        if len(self.segments) == 0:
            raise ConfigError("profile needs at least one segment")
        for i, (w, _) in enumerate(self.segments):
            if not w > 0:
                raise ConfigError(f"segment {i}: width must be positive, got {w!r}")
        if not self.mass_ratio > 0:
            raise ConfigError(f"mass_ratio must be positive, got {self.mass_ratio!r}")

    @property
    def length(self) -> float:
        return sum(w for w, _ in self.segments)

    @property
    def boundaries(self) -> tuple[float, ...]:
        """Interface positions 0 = x_0 < x_1 < ... < x_n = L."""
        xs = [0.0]
        for w, _ in self.segments:
            xs.append(xs[-1] + w)
        return tuple(xs)

    @property
    def min_barrier_top(self) -> float:
        """Smallest positive segment height (0 if none are positive)."""
        tops = [h for _, h in self.segments if h > 0]
        return min(tops) if tops else 0.0

    def digest(self) -> str:
        """Short content hash used in output metadata."""
        return hashlib.sha256(serialize_profile(self).encode()).hexdigest()[:12]


def potential_at(profile: PotentialProfile, x: float) -> float:
    """V(x) in eV.  Segments are half-open [x_i, x_{i+1}); 0 outside [0, L]."""
    if x < 0.0 or x >= profile.length:
        return 0.0
    xs = profile.boundaries
    for i, (_, h) in enumerate(profile.segments):
        if xs[i] <= x < xs[i + 1]:
            return h
    return 0.0


_PRESETS = {
    "A": (((5.0, 0.23), (5.0, 0.0), (5.0, 0.23)), 0.067),
    "B": (((3.0, 0.50), (10.0, 0.0), (3.0, 0.50)), 0.067),
    "C": (((3.0, 0.45), (8.0, 0.0), (10.0, 0.35)), 0.067),
}


def preset(name: str) -> PotentialProfile:
    """Double-barrier presets: A (symmetric), B (symmetric), C (asymmetric)."""
    key = name.strip().upper()
    if key not in _PRESETS:
        raise ConfigError(f"unknown preset {name!r}; choose from {sorted(_PRESETS)}")
    segments, mass_ratio = _PRESETS[key]
    return PotentialProfile(segments=segments, mass_ratio=mass_ratio, label=f"system {key}")


def well_center(profile: PotentialProfile) -> float:
    """Midpoint of the widest zero-height segment (the quantum well).

    Falls back to L/2 when the profile has no interior well.
    """
    xs = profile.boundaries
    best = None
    for i, (w, h) in enumerate(profile.segments):
        if h == 0.0 and (best is None or w > best[0]):
            best = (w, 0.5 * (xs[i] + xs[i + 1]))
    return best[1] if best is not None else 0.5 * profile.length


def parse_profile(text: str) -> PotentialProfile:
    """Parse the plain-text profile config format.

    Schema: ``label = <text>``, ``mass_ratio = <float>``, and one
    ``segment = <width_nm> <height_eV>`` line per segment, in order.
    ``#`` starts a comment.
    """
    label = ""
    mass_ratio = None
    segments: list[tuple[float, float]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ProfileParseError(f"expected 'key = value', got {raw.strip()!r}", lineno)
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key == "label":
            label = value
        elif key == "mass_ratio":
            try:
                mass_ratio = float(value)
            except ValueError:
                raise ProfileParseError(f"mass_ratio is not a number: {value!r}", lineno) from None
            if not mass_ratio > 0:
                raise ProfileParseError(f"mass_ratio must be positive, got {value}", lineno)
        elif key == "segment":
            parts = value.split()
            if len(parts) != 2:
                raise ProfileParseError(f"segment needs '<width_nm> <height_eV>', got {value!r}", lineno)
            try:
                width, height = float(parts[0]), float(parts[1])
            except ValueError:
                raise ProfileParseError(f"segment values are not numbers: {value!r}", lineno) from None
            if not width > 0:
                raise ProfileParseError(f"segment width must be positive, got {parts[0]}", lineno)
            segments.append((width, height))
        else:
            raise ProfileParseError(f"unknown key {key!r}", lineno)
    if mass_ratio is None:
        raise ProfileParseError("missing required key 'mass_ratio'")
    if not segments:
        raise ProfileParseError("no 'segment' lines; at least one is required")
    return PotentialProfile(segments=tuple(segments), mass_ratio=mass_ratio, label=label)


def serialize_profile(profile: PotentialProfile) -> str:
    """Inverse of :func:`parse_profile`; floats kept at full precision."""
    lines = [f"label = {profile.label}", f"mass_ratio = {profile.mass_ratio!r}"]
    for w, h in profile.segments:
        lines.append(f"segment = {w!r} {h!r}")
    return "\n".join(lines) + "\n"


def load_profile(path) -> PotentialProfile:
    with open(path, encoding="utf-8") as fh:
        return parse_profile(fh.read())
