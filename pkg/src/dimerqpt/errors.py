"""Exception types shared across the package."""


class DimerQptError(Exception):
    """Base class for package-specific failures."""


class DegenerateDimerError(DimerQptError):
    """Both site energies equal and no coupling: the exciton basis is ill posed."""


class SingularToolboxError(DimerQptError):
    """The pulse-frequency probability matrix cannot be inverted."""


class SingularGeometryError(DimerQptError):
    """A dipole-geometry block is numerically singular."""


class ConfigError(DimerQptError):
    """An experiment configuration failed validation; names the field."""
