"""Physical constants and unit conversions shared by every module.

All values are CODATA 2018. Energies inside the sampler are carried in
wavenumbers (cm^-1); the transport layer works in eV and volts.
"""

import math

SPEED_OF_LIGHT = 2.99792458e8  # m/s
HBAR_JS = 1.054571817e-34  # J s
HBAR_EVS = 6.582119569e-16  # eV s
AMU_KG = 1.66053907e-27  # kg
ANGSTROM_M = 1e-10  # m
ELEMENTARY_CHARGE = 1.602176634e-19  # C
BOLTZMANN_EV = 8.617333262e-5  # eV/K
CM1_TO_EV = 1.239841984e-4  # eV per cm^-1

# cm^-1 -> angular frequency in rad/s
CM1_TO_RAD_S = 2.0 * math.pi * SPEED_OF_LIGHT * 100.0


def cm1_to_ev(value):
    return value * CM1_TO_EV


def ev_to_cm1(value):
    return value / CM1_TO_EV
