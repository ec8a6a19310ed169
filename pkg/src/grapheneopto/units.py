"""Conversions between ordinary and angular frequency.

Everything inside the package is SI with angular frequencies in rad/s.
Values quoted as "2pi x 55 MHz" enter through :func:`hz` and leave through
:func:`to_hz`.
"""
import numpy as np

TWO_PI = 2.0 * np.pi


def hz(f):
    """Angular frequency (rad/s) of an ordinary frequency given in Hz."""
    return TWO_PI * np.asarray(f, dtype=float) if np.ndim(f) else TWO_PI * float(f)


def to_hz(omega):
    """Ordinary frequency (Hz) of an angular frequency in rad/s."""
    return np.asarray(omega, dtype=float) / TWO_PI if np.ndim(omega) else float(omega) / TWO_PI
