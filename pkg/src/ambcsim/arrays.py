"""Uniform linear array geometry: directional cosines and spatial signatures.

Angles are measured in degrees from the array axis, so broadside is 90 deg
and end-fire is 0/180 deg.  The per-element phase progression for an arrival
angle phi is captured by the directional cosine

    omega = 2 * pi * (spacing / wavelength) * cos(phi)

and the array response ("steering vector") to a plane wave from that angle
is a complex N-vector with entries exp(1j * n * omega).  Derivatives of the
response with respect to omega are used to widen beamformer nulls against
angle uncertainty.
"""

from dataclasses import dataclass

import numpy as np

MAX_DERIVATIVE_ORDER = 2


@dataclass(frozen=True)
class ArrayConfig:
    """Uniform linear array with element spacing in carrier wavelengths."""

    n_antennas: int
    spacing_wavelengths: float = 0.5

    def __post_init__(self):
        if self.n_antennas < 2:
            raise ValueError(f"n_antennas must be >= 2, got {self.n_antennas}")
        if not self.spacing_wavelengths > 0:
            raise ValueError(
                f"spacing_wavelengths must be > 0, got {self.spacing_wavelengths}"
            )


def directional_cosine(aoa_degrees: float, config: ArrayConfig) -> float:
    """Map an arrival angle in [0, 180] degrees to its directional cosine.

    Returns omega = 2*pi*spacing_wavelengths*cos(aoa) in radians per element.
    """
    if not 0.0 <= aoa_degrees <= 180.0:
        raise ValueError(f"arrival angle must be in [0, 180] deg, got {aoa_degrees}")
    return 2.0 * np.pi * config.spacing_wavelengths * np.cos(np.radians(aoa_degrees))


def steering_vector(omega: float, order: int, config: ArrayConfig) -> np.ndarray:
    """Array response at directional cosine ``omega``, or its omega-derivative.

    Entry n of the order-m vector is (1j*n)**m * exp(1j*n*omega) for
    n = 0 .. N-1.  Only orders 0..2 are supported; the receiver uses the
    response and its first two derivatives as null constraints.
    """
    if not 0 <= order <= MAX_DERIVATIVE_ORDER:
        raise ValueError(f"derivative order must be in 0..{MAX_DERIVATIVE_ORDER}, got {order}")
    n = np.arange(config.n_antennas)
    base = np.exp(1j * n * omega)
    if order == 0:
        return base
    return (1j * n) ** order * base
