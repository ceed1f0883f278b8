"""Angle-of-arrival estimation with the conventional (Bartlett) beamformer.

The estimator scans the Rayleigh quotient of the sample covariance over
candidate steering vectors on an angle grid.  Only the strong direct path
needs to be located; the receiver finds the scattered path implicitly later,
so the default is a single peak.
"""

from dataclasses import dataclass

import numpy as np

from .arrays import ArrayConfig, directional_cosine, steering_vector
from .linalg import sample_covariance

LOW_CONFIDENCE_PEAK_TO_MEAN = 2.0


@dataclass(frozen=True)
class AngularSpectrum:
    grid_degrees: np.ndarray
    power: np.ndarray


@dataclass(frozen=True)
class AoaEstimate:
    angles_deg: tuple[float, ...]
    low_confidence: bool
    spectrum: AngularSpectrum

    @property
    def angle_deg(self) -> float:
        return self.angles_deg[0]


def scan_grid(grid_step_deg: float = 0.5) -> np.ndarray:
    """Angle grid over [0, 180] degrees with the given step."""
    if not grid_step_deg > 0:
        raise ValueError(f"grid step must be > 0, got {grid_step_deg}")
    n_steps = int(round(180.0 / grid_step_deg))
    return np.linspace(0.0, n_steps * grid_step_deg, n_steps + 1)


def bartlett_spectrum(
    r_hat: np.ndarray, grid_degrees: np.ndarray, config: ArrayConfig
) -> AngularSpectrum:
    """Output power of a beam steered to each grid angle.

    power[g] = Re( a(g)^H R a(g) ) / (a^H a) with a the steering vector at
    grid angle g; the denominator is the element count N.
    """
    grid = np.asarray(grid_degrees, dtype=float)
    if grid.size == 0:
        raise ValueError("angle grid is empty")
    r = np.asarray(r_hat)
    n = config.n_antennas
    if r.shape != (n, n):
        raise ValueError(f"covariance shape {r.shape} does not match {n} antennas")
    scale = np.linalg.norm(r)
    if scale > 0 and np.linalg.norm(r - r.conj().T) > 1e-8 * scale:
        raise ValueError("covariance matrix is not Hermitian")
    omegas = 2.0 * np.pi * config.spacing_wavelengths * np.cos(np.radians(grid))
    a = np.exp(1j * np.outer(np.arange(n), omegas))
    power = np.real(np.einsum("ig,ig->g", a.conj(), r @ a)) / n
    return AngularSpectrum(grid, power)


def estimate_aoa(
    samples,
    config: ArrayConfig,
    grid_step_deg: float = 0.5,
    n_peaks: int = 1,
    refine: bool = True,
) -> AoaEstimate:
    """Estimate arrival angle(s) from one frame of array samples.

    ``samples`` is an (N, M) array of chip vectors (a ChipFrame works too).
    The grid argmax is refined once by parabolic interpolation around the
    peak.  The estimate is flagged low-confidence when the peak-to-mean power
    ratio falls below 2, which happens for noise-only input.
    """
    y = np.asarray(getattr(samples, "samples", samples))
    if y.ndim != 2 or y.shape[1] == 0:
        raise ValueError("need a non-empty (N, M) sample block")
    spectrum = bartlett_spectrum(sample_covariance(y), scan_grid(grid_step_deg), config)
    order = _peak_indices(spectrum.power)[:n_peaks]
    angles = []
    for idx in order:
        if refine:
            angles.append(_parabolic_refine(spectrum.grid_degrees, spectrum.power, idx))
        else:
            angles.append(float(spectrum.grid_degrees[idx]))
    mean_power = float(np.mean(spectrum.power))
    peak_power = float(spectrum.power[order[0]])
    low_confidence = mean_power <= 0 or peak_power / mean_power < LOW_CONFIDENCE_PEAK_TO_MEAN
    return AoaEstimate(tuple(angles), low_confidence, spectrum)


def steering_for_angle(angle_deg: float, order: int, config: ArrayConfig) -> np.ndarray:
    """Steering vector (or derivative) at an angle given in degrees."""
    return steering_vector(directional_cosine(angle_deg, config), order, config)


def _peak_indices(power: np.ndarray) -> list[int]:
    """Local maxima sorted by descending power; falls back to the argmax."""
    p = power
    interior = np.flatnonzero((p[1:-1] >= p[:-2]) & (p[1:-1] >= p[2:])) + 1
    candidates = list(interior)
    if p.size >= 2 and p[0] >= p[1]:
        candidates.append(0)
    if p.size >= 2 and p[-1] >= p[-2]:
        candidates.append(p.size - 1)
    if not candidates:
        candidates = [int(np.argmax(p))]
    return sorted(candidates, key=lambda i: -p[i])


def _parabolic_refine(grid: np.ndarray, power: np.ndarray, idx: int) -> float:
    """Three-point parabolic peak interpolation; no-op at grid edges."""
    if idx == 0 or idx == power.size - 1:
        return float(grid[idx])
    left, mid, right = power[idx - 1], power[idx], power[idx + 1]
    denom = left - 2.0 * mid + right
    if denom >= 0:
        return float(grid[idx])
    shift = 0.5 * (left - right) / denom
    step = grid[idx] - grid[idx - 1]
    return float(grid[idx] + np.clip(shift, -0.5, 0.5) * step)
