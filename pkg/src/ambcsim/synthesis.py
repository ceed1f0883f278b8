"""Received-signal synthesis for one spread codeword.

Each chip i of a codeword produces an N-vector across the array:

    y[i] = (alpha0 * p0 * a_direct + alpha1 * p1 * a_scatter * chip[i]) * s[i] + z[i]

where s[i] is the unknown unit-power ambient symbol (fresh every chip), z[i]
is unit-variance circular complex Gaussian receiver noise per antenna, p0/p1
are the unit-modulus propagation phases of the two paths, and alpha0/alpha1
set the per-antenna SNRs.

SNR calibration: the sweep axis is the received per-antenna SNR of the direct
link against unit-variance noise, so alpha0 = 10**(snr_db/20) directly.  The
absolute channel gains only enter through the direct-to-scattered power ratio:
alpha1 = alpha0 * 10**(-relative_loss_db/20), which makes the scattered
per-antenna SNR exactly snr_db - relative_loss_db.  This avoids carrying
astronomically small absolute amplitudes while preserving everything the
detector sees.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .arrays import ArrayConfig, directional_cosine, steering_vector
from .channel import Geometry, path_gains, relative_loss_db
from .codes import MAX_ORDER, CodewordPair, spread

AMBIENT_MODELS = ("complex_gaussian", "unit_modulus")

_SQRT_HALF = 1.0 / np.sqrt(2.0)


@dataclass(frozen=True)
class Scenario:
    """Full physical configuration of one simulated link."""

    array: ArrayConfig
    geometry: Geometry
    lambda_m: float
    snr_db: float
    code_order: int
    ambient_model: str = "complex_gaussian"
    noise_enabled: bool = True
    seed: int = 0

    def __post_init__(self):
        if not self.lambda_m > 0:
            raise ValueError(f"lambda_m must be > 0, got {self.lambda_m}")
        if not np.isfinite(self.snr_db):
            raise ValueError(f"snr_db must be finite, got {self.snr_db}")
        if not 0 <= self.code_order <= MAX_ORDER:
            raise ValueError(f"code_order must be in 0..{MAX_ORDER}, got {self.code_order}")
        if self.ambient_model not in AMBIENT_MODELS:
            raise ValueError(
                f"ambient_model must be one of {AMBIENT_MODELS}, got {self.ambient_model!r}"
            )

    @property
    def codeword_len(self) -> int:
        return 1 << self.code_order


@dataclass(frozen=True)
class ChipFrame:
    """Received samples for one codeword: column i is the chip-i array vector."""

    samples: np.ndarray
    truth_symbol: int
    truth_chips: np.ndarray


def amplitudes_from_loss(snr_db: float, loss_db: float) -> tuple[float, float]:
    """Per-antenna signal amplitudes for given direct SNR and relative loss (dB)."""
    alpha0 = 10.0 ** (snr_db / 20.0)
    alpha1 = alpha0 * 10.0 ** (-loss_db / 20.0)
    return alpha0, alpha1


def amplitude_calibration(scenario: Scenario) -> tuple[float, float]:
    """Direct and scattered per-antenna amplitudes for a scenario.

    alpha0**2 is the direct per-antenna SNR; alpha1 is alpha0 reduced by the
    geometry's relative path loss, so 20*log10(alpha1) = snr_db - loss_db.
    """
    loss_db = relative_loss_db(scenario.geometry, scenario.lambda_m)
    return amplitudes_from_loss(scenario.snr_db, loss_db)


def ambient_sequence(scenario: Scenario, n_chips: int, rng: np.random.Generator) -> np.ndarray:
    """Draw the per-chip ambient symbols s[i], i.i.d. with unit power."""
    if scenario.ambient_model == "complex_gaussian":
        return rng.standard_normal(2 * n_chips).view(np.complex128) * _SQRT_HALF
    phases = rng.random(n_chips) * (2.0 * np.pi)
    return np.exp(1j * phases)


def complex_noise(shape: tuple[int, ...], rng: np.random.Generator) -> np.ndarray:
    """Circular complex Gaussian noise, unit variance per entry."""
    n = int(np.prod(shape))
    return (rng.standard_normal(2 * n).view(np.complex128) * _SQRT_HALF).reshape(shape)


@lru_cache(maxsize=64)
def _link_vectors(
    array: ArrayConfig, geometry: Geometry, lambda_m: float
) -> tuple[np.ndarray, np.ndarray]:
    """Phase-rotated steering vectors of both paths (cached per link)."""
    gains = path_gains(geometry, lambda_m)
    omega_direct = directional_cosine(geometry.aoa_direct_deg, array)
    omega_scatter = directional_cosine(geometry.aoa_scattered_deg, array)
    direct = (gains.g0 / abs(gains.g0)) * steering_vector(omega_direct, 0, array)
    scatter = (gains.g1 / abs(gains.g1)) * steering_vector(omega_scatter, 0, array)
    direct.setflags(write=False)
    scatter.setflags(write=False)
    return direct, scatter


def synthesize_codeword(
    scenario: Scenario,
    symbol: int,
    pair: CodewordPair,
    rng: np.random.Generator,
    *,
    ambient: np.ndarray | None = None,
    amplitudes: tuple[float, float] | None = None,
) -> ChipFrame:
    """Synthesize the received chip frame for one spread BPSK symbol.

    Draw order is fixed (ambient sequence first, then noise) so results are
    reproducible for a given generator state.  ``ambient`` substitutes an
    explicit s sequence and ``amplitudes`` overrides the calibrated
    (alpha0, alpha1); both exist for controlled experiments.
    """
    chips = spread(symbol, pair)
    m = chips.shape[0]
    alpha0, alpha1 = amplitudes if amplitudes is not None else amplitude_calibration(scenario)
    a_direct, a_scatter = _link_vectors(scenario.array, scenario.geometry, scenario.lambda_m)

    if ambient is None:
        s = ambient_sequence(scenario, m, rng)
    else:
        s = np.asarray(ambient, dtype=np.complex128)
        if s.shape != (m,):
            raise ValueError(f"ambient sequence must have shape ({m},), got {s.shape}")

    signal = alpha0 * a_direct[:, None] + alpha1 * a_scatter[:, None] * chips[None, :]
    samples = signal * s[None, :]
    if scenario.noise_enabled:
        samples = samples + complex_noise((scenario.array.n_antennas, m), rng)
    return ChipFrame(samples, symbol, chips)
