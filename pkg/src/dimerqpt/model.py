"""Excitonic dimer model: parameters, exciton basis and transition dipoles.

The dimer is two coupled two-level chromophores.  Diagonalizing the
one-excitation block of the Hamiltonian gives two single-exciton states
(labelled ``e`` and ``ep``, with ``e`` the higher-energy one) and a doubly
excited state ``f`` whose energy is the sum of the two exciton energies.
All four allowed transition dipoles lie in the xz plane of the molecular
frame; the reference axis is chosen so that mu_eg points along z.
"""

from dataclasses import dataclass, field, replace
import math

import numpy as np

from .errors import DegenerateDimerError

# exciton index convention used across the package
E, EP = 0, 1
EXCITON_LABELS = ("e", "ep")

# transition-dipole labels (the four optically allowed transitions)
DIPOLE_LABELS = ("eg", "epg", "fe", "fep")


@dataclass(frozen=True)
class DimerParams:
    """Site-basis parameters of the dimer.

    Energies and coupling are in cm^-1, the inter-dipole angle ``dipole_angle_phi``
    in radians.  ``quantum_yield_gamma`` is the fluorescence weight of the doubly
    excited state in the detection operator (2 for an ideal two-photon cascade).
    """

    site_energy_1: float
    site_energy_2: float
    coupling_j: float
    dipole_d1: float = 1.0
    dipole_ratio_d2_over_d1: float = 2.0
    dipole_angle_phi: float = 0.3
    quantum_yield_gamma: float = 2.0

    def __post_init__(self):
        if self.site_energy_1 == self.site_energy_2 and self.coupling_j == 0.0:
            raise DegenerateDimerError(
                "degenerate sites with zero coupling: exciton basis undefined"
            )
        if not 0.0 <= self.quantum_yield_gamma <= 2.0:
            raise ValueError(
                f"quantum_yield_gamma must lie in [0, 2], got {self.quantum_yield_gamma}"
            )

    @property
    def dipole_d2(self):
        return self.dipole_d1 * self.dipole_ratio_d2_over_d1


@dataclass(frozen=True)
class ExcitonBasis:
    """Closed-form exciton basis of the dimer.

    Dipole vectors are 3-vectors in the molecular frame (y component zero).
    ``angle_*`` are the angles of the other three transition dipoles relative
    to mu_eg, each in [0, pi).
    """

    mixing_angle_theta: float
    average_freq: float
    half_difference_delta: float
    energy_e: float
    energy_ep: float
    energy_f: float
    mu_eg: np.ndarray = field(default=None)
    mu_epg: np.ndarray = field(default=None)
    mu_fe: np.ndarray = field(default=None)
    mu_fep: np.ndarray = field(default=None)
    angle_epg: float = None
    angle_fe: float = None
    angle_fep: float = None

    def dipole(self, label):
        return {"eg": self.mu_eg, "epg": self.mu_epg,
                "fe": self.mu_fe, "fep": self.mu_fep}[label]

    def exciton_energy(self, index):
        return self.energy_e if index == E else self.energy_ep

    def splitting(self):
        """Energy gap between the two single-exciton states, cm^-1."""
        return self.energy_e - self.energy_ep

    def transition_freq(self, pair):
        """Frequency (cm^-1) of the coherence |i><j| for optical state pairs."""
        energies = {"g": 0.0, "e": self.energy_e, "ep": self.energy_ep,
                    "f": self.energy_f}
        i, j = pair
        return energies[i] - energies[j]


def _dipole_angle(reference, vec):
    """Angle of ``vec`` relative to ``reference`` via atan2(|cross|, dot), in [0, pi]."""
    cross = np.linalg.norm(np.cross(reference, vec))
    dot = float(np.dot(reference, vec))
    return math.atan2(cross, dot)


def build_exciton_basis(dimer: DimerParams) -> ExcitonBasis:
    """Diagonalize the one-exciton block and attach transition dipoles.

    The mixing angle is theta = arctan2(J, Delta) / 2, which keeps
    energy_e >= energy_ep for either sign of the site-energy difference.
    """
    avg = 0.5 * (dimer.site_energy_1 + dimer.site_energy_2)
    delta = 0.5 * (dimer.site_energy_1 - dimer.site_energy_2)
    j = dimer.coupling_j
    if delta == 0.0 and j == 0.0:
        raise DegenerateDimerError("degenerate dimer: cannot build exciton basis")
    theta = 0.5 * math.atan2(j, delta)
    split = math.hypot(delta, j)  # = Delta * sec(2 theta), made sign-safe
    basis = ExcitonBasis(
        mixing_angle_theta=theta,
        average_freq=avg,
        half_difference_delta=delta,
        energy_e=avg + split,
        energy_ep=avg - split,
        energy_f=dimer.site_energy_1 + dimer.site_energy_2,
    )
    return transition_dipoles(dimer, basis)


def transition_dipoles(dimer: DimerParams, basis: ExcitonBasis) -> ExcitonBasis:
    """Fill in the four exciton transition dipoles and their relative angles.

    Site dipoles are d1 along z and d2 rotated by phi in the xz plane; the
    exciton dipoles follow from the orthogonal rotation by the mixing angle.
    """
    d1 = dimer.dipole_d1
    d2 = dimer.dipole_d2
    phi = dimer.dipole_angle_phi
    ct, st = math.cos(basis.mixing_angle_theta), math.sin(basis.mixing_angle_theta)
    cp, sp = math.cos(phi), math.sin(phi)

    vec_d1 = np.array([0.0, 0.0, d1])
    vec_d2 = np.array([d2 * sp, 0.0, d2 * cp])

    mu_eg = ct * vec_d1 + st * vec_d2
    mu_epg = -st * vec_d1 + ct * vec_d2
    mu_fe = st * vec_d1 + ct * vec_d2
    mu_fep = ct * vec_d1 - st * vec_d2

    if np.linalg.norm(mu_eg) == 0.0:
        raise DegenerateDimerError("mu_eg vanishes: angle reference undefined")

    return replace(
        basis,
        mu_eg=mu_eg,
        mu_epg=mu_epg,
        mu_fe=mu_fe,
        mu_fep=mu_fep,
        angle_epg=_dipole_angle(mu_eg, mu_epg),
        angle_fe=_dipole_angle(mu_eg, mu_fe),
        angle_fep=_dipole_angle(mu_eg, mu_fep),
    )
