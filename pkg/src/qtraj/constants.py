"""Physical constants (CODATA 2018) and unit conversions.

Internal units are eV for energy, angstrom for length and femtosecond for
time. Everything that crosses the I/O boundary goes through the helpers here.
"""

import math

# exact SI values
ELEMENTARY_CHARGE = 1.602176634e-19  # C, also J per eV
PLANCK_H_SI = 6.62607015e-34  # J s
HBAR_SI = PLANCK_H_SI / (2.0 * math.pi)
SPEED_OF_LIGHT_SI = 299792458.0  # m/s
ELECTRON_MASS_SI = 9.1093837015e-31  # kg

ANGSTROM = 1e-10  # m
FEMTOSECOND = 1e-15  # s

# internal units
HBAR = HBAR_SI / ELEMENTARY_CHARGE / FEMTOSECOND  # eV fs
PLANCK_H = 2.0 * math.pi * HBAR  # eV fs
# kg -> eV fs^2 / A^2 :  J s^2/m^2 / (J/eV) * (fs/s)^-2 * (A/m)^2
_KG = 1.0 / ELEMENTARY_CHARGE / FEMTOSECOND**2 * ANGSTROM**2
ELECTRON_MASS = ELECTRON_MASS_SI * _KG


def force_si_to_internal(g_newton):
    """Force in N (= J/m) to eV/A."""
    return g_newton / ELEMENTARY_CHARGE * ANGSTROM


def inverse_length_si_to_internal(value_per_m):
    """Quantities in 1/m (such as the harmonic-state ``a`` constant) to 1/A."""
    return value_per_m * ANGSTROM


def metres(x_angstrom):
    return x_angstrom * ANGSTROM


def seconds(t_fs):
    return t_fs * FEMTOSECOND


def as_dict():
    """Constants and conversions recorded alongside every run."""
    return {
        "hbar_eV_fs": HBAR,
        "planck_h_eV_fs": PLANCK_H,
        "electron_mass_eV_fs2_per_A2": ELECTRON_MASS,
        "electron_mass_kg": ELECTRON_MASS_SI,
        "eV_J": ELEMENTARY_CHARGE,
        "angstrom_m": ANGSTROM,
        "femtosecond_s": FEMTOSECOND,
        "source": "CODATA 2018",
    }
