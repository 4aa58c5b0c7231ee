"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ConfigError(ValueError):
    """Invalid configuration value (unknown preset, bad run parameters)."""


class ProfileParseError(ValueError):
    """Malformed potential-profile config text.

    Carries the 1-based line number when attributable to a single line.
    """

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class NumericsError(RuntimeError):
    """A numerical procedure failed (no bracket, divergence, inconsistency)."""


class DegenerateEnergyError(NumericsError):
    """Incidence energy coincides with a resonance pole energy."""


class OracleInvalidError(NumericsError):
    """Reference-propagation parameters outside their validated regime."""
