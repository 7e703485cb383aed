"""Unit conventions.

Frequencies and energies are stored in wavenumbers (cm^-1) throughout the
model layer; time is in femtoseconds.  Propagators convert to angular
frequency (rad/fs) at the point of use, with hbar = 1.
"""

from dataclasses import dataclass
import math

# speed of light in cm/fs
_C_CM_PER_FS = 2.99792458e-5

#: rad/fs per cm^-1
WAVENUMBER_TO_RAD_PER_FS = 2.0 * math.pi * _C_CM_PER_FS

#: Boltzmann constant in cm^-1 per kelvin
KB_WAVENUMBER_PER_K = 0.6950348004


@dataclass(frozen=True)
class UnitSystem:
    wavenumber_to_angular_freq: float = WAVENUMBER_TO_RAD_PER_FS
    kB_in_wavenumbers: float = KB_WAVENUMBER_PER_K

    def to_angular(self, freq_wavenumber):
        """cm^-1 -> rad/fs."""
        return freq_wavenumber * self.wavenumber_to_angular_freq

    def thermal_energy(self, temperature_K):
        """k_B * T in cm^-1."""
        return self.kB_in_wavenumbers * temperature_K


UNITS = UnitSystem()
