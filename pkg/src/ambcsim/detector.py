"""Two-phase correlator detection.

Phase one multiplies the conjugated phase-reference output with the
null-stream output chip by chip, which cancels the unknown ambient phase
(|s|^2 is real).  Phase two correlates the result against both codewords and
compares energies; the larger one decides the symbol, with ties going to +1
so the rule is total.
"""

from dataclasses import dataclass

import numpy as np

from .codes import CodewordPair


@dataclass(frozen=True)
class DetectionResult:
    gamma_plus: float
    gamma_minus: float
    decision: int


def cross_correlate(nu0: np.ndarray, nu1: np.ndarray) -> np.ndarray:
    """Element-wise conj(nu0) * nu1; the ambient phase drops out."""
    nu0 = np.asarray(nu0)
    nu1 = np.asarray(nu1)
    if nu0.shape != nu1.shape:
        raise ValueError(f"length mismatch: {nu0.shape} vs {nu1.shape}")
    return np.conj(nu0) * nu1


def codeword_energies(nu_tilde: np.ndarray, pair: CodewordPair) -> tuple[float, float]:
    """Squared correlation magnitude against each codeword.

    The inner product is accumulated first and squared once, so large
    codewords and gains cannot overflow intermediate values.
    """
    nu = np.asarray(nu_tilde)
    if nu.shape != (pair.length,):
        raise ValueError(f"expected {pair.length} chips, got shape {nu.shape}")
    gamma_plus = abs(np.dot(nu, pair.code_plus)) ** 2
    gamma_minus = abs(np.dot(nu, pair.code_minus)) ** 2
    return float(gamma_plus), float(gamma_minus)


def decide(gamma_plus: float, gamma_minus: float) -> int:
    """+1 when gamma_plus >= gamma_minus, else -1."""
    if gamma_plus < 0 or gamma_minus < 0:
        raise ValueError("correlation energies must be non-negative")
    return 1 if gamma_plus >= gamma_minus else -1


def detect(nu0: np.ndarray, nu1: np.ndarray, pair: CodewordPair) -> DetectionResult:
    """Run both correlator phases and decide one symbol."""
    gamma_plus, gamma_minus = codeword_energies(cross_correlate(nu0, nu1), pair)
    return DetectionResult(gamma_plus, gamma_minus, decide(gamma_plus, gamma_minus))
