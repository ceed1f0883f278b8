"""Hadamard channelization codes and BPSK symbol spreading.

The tag spreads each +/-1 symbol over a row of a Sylvester Hadamard matrix;
two distinct rows encode the two symbol values.  Distinct rows are orthogonal,
so the receiver can decide by comparing codeword correlation energies without
knowing the channel.
"""

from dataclasses import dataclass

import numpy as np

MAX_ORDER = 16

# Full materialization of a 2^K x 2^K matrix; rows alone scale to MAX_ORDER.
MAX_FULL_MATRIX_ORDER = 13


def hadamard_matrix(order: int) -> np.ndarray:
    """Sylvester Hadamard matrix of size 2**order, entries +/-1 (float64).

    Capped at order 13 (a 64 Mi-entry matrix); codeword selection never needs
    the full matrix and uses ``hadamard_row`` beyond that.
    """
    if not 0 <= order <= MAX_FULL_MATRIX_ORDER:
        raise ValueError(f"order must be in 0..{MAX_FULL_MATRIX_ORDER}, got {order}")
    h = np.ones((1, 1))
    for _ in range(order):
        h = np.block([[h, h], [h, -h]])
    return h


def hadamard_row(order: int, row: int) -> np.ndarray:
    """Row ``row`` of the Sylvester Hadamard matrix of size 2**order.

    Uses the closed form H[i, j] = (-1)**popcount(i & j), which is exactly the
    row the recursive doubling construction produces, without materializing
    the matrix.
    """
    if not 0 <= order <= MAX_ORDER:
        raise ValueError(f"order must be in 0..{MAX_ORDER}, got {order}")
    m = 1 << order
    if not 0 <= row < m:
        raise ValueError(f"row index {row} out of range for codeword length {m}")
    j = np.arange(m, dtype=np.uint32)
    bits = np.bitwise_count(j & np.uint32(row)).astype(np.int64)
    return 1.0 - 2.0 * (bits & 1)


@dataclass(frozen=True)
class CodewordPair:
    """Two orthogonal +/-1 codewords, one per BPSK symbol value."""

    code_plus: np.ndarray
    code_minus: np.ndarray

    @property
    def length(self) -> int:
        return self.code_plus.shape[0]


def select_pair(order: int, row_plus: int = 1, row_minus: int = 2) -> CodewordPair:
    """Pick two distinct Hadamard rows as the +/-1 codewords.

    The defaults skip row 0 (all ones) so both codewords are zero mean,
    which keeps any DC bias out of the correlator input.
    """
    if row_plus == row_minus:
        raise ValueError("row_plus and row_minus must be distinct")
    return CodewordPair(hadamard_row(order, row_plus), hadamard_row(order, row_minus))


def spread(symbol: int, pair: CodewordPair) -> np.ndarray:
    """Chip sequence for one BPSK symbol: the matching codeword."""
    if symbol == 1:
        return pair.code_plus
    if symbol == -1:
        return pair.code_minus
    raise ValueError(f"symbol must be +1 or -1, got {symbol}")
