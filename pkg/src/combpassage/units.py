"""Unit conventions and conversions.

Internal units throughout the package:

    time               fs
    angular frequency  rad/fs
    rates              1/fs

Quantities quoted in THz are, by default, ordinary frequencies nu and enter
the dynamics as omega = 2*pi*nu.  1 THz = 1e-3 cycles/fs, so

    omega[rad/fs] = 2*pi * 1e-3 * value[THz]        (ordinary convention)
    omega[rad/fs] =        1e-3 * value[THz]        (angular convention)

The ``angular`` flag selects the second reading, in which quoted THz values
are taken to be angular frequencies already (divided by 1e3 to reach rad/fs).
Rates quoted in 1/s convert as 1/s = 1e-15/fs.
"""

import math

TWO_PI = 2.0 * math.pi

#: multiply a THz value by this to get cycles/fs
THZ_TO_PER_FS = 1.0e-3

#: multiply a 1/s rate by this to get 1/fs
PER_S_TO_PER_FS = 1.0e-15

NS_TO_FS = 1.0e6


def freq_to_radfs(value_thz: float, angular: bool = False) -> float:
    """Convert a quoted THz frequency to an internal angular frequency."""
    if angular:
        return value_thz * THZ_TO_PER_FS
    return TWO_PI * value_thz * THZ_TO_PER_FS


def radfs_to_freq(omega: float, angular: bool = False) -> float:
    """Inverse of :func:`freq_to_radfs`."""
    if angular:
        return omega / THZ_TO_PER_FS
    return omega / (TWO_PI * THZ_TO_PER_FS)


def rate_to_perfs(value_per_s: float) -> float:
    """Convert a 1/s rate to 1/fs."""
    return value_per_s * PER_S_TO_PER_FS


def rate_to_pers(value_per_fs: float) -> float:
    """Inverse of :func:`rate_to_perfs`."""
    return value_per_fs / PER_S_TO_PER_FS
