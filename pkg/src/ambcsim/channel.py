"""Deterministic two-path channel: placement geometry and complex path gains.

The receiver sits at the origin.  The RF source and the backscatter tag are
placed by (distance, arrival angle) pairs, which fixes the source-to-tag
distance through the law of cosines.  Each propagation segment contributes
a Friis factor (lambda / (4*pi*d))**2 and a phase rotation exp(-2j*pi*d/lambda);
the scattered path is the product of two segments, which is why it is so much
weaker than the direct one.
"""

import math
from dataclasses import dataclass

SPEED_OF_LIGHT = 2.99792458e8


def wavelength_m(frequency_hz: float) -> float:
    """Carrier wavelength in meters for a frequency in Hz."""
    if not frequency_hz > 0:
        raise ValueError(f"frequency must be > 0, got {frequency_hz}")
    return SPEED_OF_LIGHT / frequency_hz


@dataclass(frozen=True)
class Geometry:
    """Two-path placement: source->receiver, tag->receiver, source->tag."""

    d0_m: float
    d1_m: float
    d2_m: float
    aoa_direct_deg: float
    aoa_scattered_deg: float

    def __post_init__(self):
        for name in ("d0_m", "d1_m", "d2_m"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be > 0, got {getattr(self, name)}")


def derive_geometry(
    d0_m: float,
    d1_m: float,
    aoa_direct_deg: float = 60.0,
    aoa_scattered_deg: float = 90.0,
) -> Geometry:
    """Place source and tag around the receiver and derive their separation.

    The source lies at distance ``d0_m`` along ``aoa_direct_deg`` and the tag
    at ``d1_m`` along ``aoa_scattered_deg``; the source-to-tag distance follows
    from the law of cosines with the included angle between the two bearings.
    Coincident source and tag positions are rejected.
    """
    if not d0_m > 0 or not d1_m > 0:
        raise ValueError("distances must be > 0")
    for angle in (aoa_direct_deg, aoa_scattered_deg):
        if not 0.0 <= angle <= 180.0:
            raise ValueError(f"arrival angle must be in [0, 180] deg, got {angle}")
    included = math.radians(abs(aoa_direct_deg - aoa_scattered_deg))
    d2_sq = d0_m * d0_m + d1_m * d1_m - 2.0 * d0_m * d1_m * math.cos(included)
    d2_m = math.sqrt(max(d2_sq, 0.0))
    if d2_m < 1e-9:
        raise ValueError("source and tag positions coincide")
    return Geometry(d0_m, d1_m, d2_m, aoa_direct_deg, aoa_scattered_deg)


@dataclass(frozen=True)
class PathGains:
    """Complex baseband gains of the direct (g0) and scattered (g1) paths.

    The magnitudes are Friis power factors: |g0| = (lambda/4pi)^2 / d0^2 and
    |g1| = (lambda/4pi)^4 / (d1^2 d2^2).  Power ratios in dB therefore use
    10*log10 of the magnitude ratio.
    """

    g0: complex
    g1: complex


def path_gains(geometry: Geometry, lambda_m: float) -> PathGains:
    """Evaluate both path gains, including propagation phase rotations."""
    if not lambda_m > 0:
        raise ValueError(f"lambda_m must be > 0, got {lambda_m}")
    unit = (lambda_m / (4.0 * math.pi)) ** 2
    g0 = unit / geometry.d0_m**2 * _phase(geometry.d0_m, lambda_m)
    g1 = (
        unit**2
        / (geometry.d1_m**2 * geometry.d2_m**2)
        * _phase(geometry.d1_m + geometry.d2_m, lambda_m)
    )
    return PathGains(g0, g1)


def relative_loss_db(geometry: Geometry, lambda_m: float) -> float:
    """Extra propagation loss of the scattered path over the direct path, in dB.

    Equals 10*log10(|g0| / |g1|); the gains are power factors, so this is the
    dB gap between the received direct and scattered signal powers (and hence
    between their per-antenna SNRs).
    """
    gains = path_gains(geometry, lambda_m)
    return 10.0 * math.log10(abs(gains.g0) / abs(gains.g1))


def _phase(distance_m: float, lambda_m: float) -> complex:
    return complex(math.cos(-2.0 * math.pi * distance_m / lambda_m),
                   math.sin(-2.0 * math.pi * distance_m / lambda_m))
