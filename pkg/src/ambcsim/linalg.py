"""Hermitian eigendecomposition and sample covariance for the receiver.

Thin contract layer over LAPACK (numpy.linalg.eigh): eigenvalues come back
sorted descending with matching eigenvector columns, inputs are validated and
symmetrized, and the principal eigenvector gets a canonical phase so tests
can compare vectors deterministically.
"""

from dataclasses import dataclass

import numpy as np

HERMITIAN_RTOL = 1e-10


@dataclass(frozen=True)
class HermitianEigenResult:
    eigenvalues: np.ndarray   # real, sorted descending
    eigenvectors: np.ndarray  # unitary; column k pairs with eigenvalues[k]


def eigh(matrix: np.ndarray) -> HermitianEigenResult:
    """Eigendecomposition of a Hermitian matrix, eigenvalues descending."""
    q = np.asarray(matrix)
    if q.ndim != 2 or q.shape[0] != q.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {q.shape}")
    if not np.all(np.isfinite(q.view(float) if np.iscomplexobj(q) else q)):
        raise ValueError("matrix has non-finite entries")
    scale = np.linalg.norm(q)
    if scale > 0 and np.linalg.norm(q - q.conj().T) > HERMITIAN_RTOL * scale:
        raise ValueError("matrix is not Hermitian within tolerance")
    q = 0.5 * (q + q.conj().T)
    values, vectors = np.linalg.eigh(q)
    return HermitianEigenResult(values[::-1].copy(), vectors[:, ::-1].copy())


def sample_covariance(samples: np.ndarray) -> np.ndarray:
    """Sample covariance (1/M) * sum_i y_i y_i^H of column vectors.

    ``samples`` holds one N-vector per column (shape N x M).  The result is
    exactly Hermitian.
    """
    y = np.asarray(samples)
    if y.ndim == 1:
        y = y[:, None]
    if y.shape[1] == 0:
        raise ValueError("need at least one sample")
    r = y @ y.conj().T / y.shape[1]
    return 0.5 * (r + r.conj().T)


def principal_eigenvector(matrix: np.ndarray) -> tuple[np.ndarray, float]:
    """Unit-norm eigenvector of the largest eigenvalue, and that eigenvalue.

    The eigenvector phase is fixed by making its largest-magnitude entry real
    and positive; downstream detection statistics are phase invariant, but a
    canonical representative keeps results reproducible.
    """
    result = eigh(matrix)
    return _canonical_phase(result.eigenvectors[:, 0]), float(result.eigenvalues[0])


def principal_eigenvector_unchecked(matrix: np.ndarray) -> tuple[np.ndarray, float]:
    """As principal_eigenvector, for input already known exactly Hermitian.

    Skips validation and symmetrization, which matter on the Monte Carlo hot
    path; the result is identical to the checked variant for Hermitian input.
    """
    values, vectors = np.linalg.eigh(matrix)
    return _canonical_phase(vectors[:, -1]), float(values[-1])


def _canonical_phase(v: np.ndarray) -> np.ndarray:
    k = int(np.argmax(np.abs(v)))
    pivot = v[k]
    if np.abs(pivot) > 0:
        v = v * (np.conj(pivot) / np.abs(pivot))
    return v
