"""Physical constants (CODATA 2018), SI units.

Fixed values, never user-configurable: every other quantity in the
package is derived from the experimental configuration plus these.
"""
from dataclasses import dataclass


@dataclass(frozen=True)
class PhysicalConstants:
    c: float = 299792458.0            # speed of light, m/s (exact)
    hbar: float = 1.054571817e-34     # reduced Planck constant, J s
    eps0: float = 8.8541878128e-12    # vacuum permittivity, F/m
    kB: float = 1.380649e-23          # Boltzmann constant, J/K (exact)
    e0: float = 1.602176634e-19       # elementary charge, C (exact)
    u: float = 1.66053906660e-27      # atomic mass unit, kg

    def __post_init__(self):
        for name, value in self.__dict__.items():
            if not value > 0.0:
                raise ValueError(f"constant {name} must be positive")


CODATA2018 = PhysicalConstants()
