"""Two-stage null-steering beamformer.

Stage one is a fixed unitary split: the constraint matrix stacks the direct
path's steering vector and its first two derivatives, and the eigenvectors of
its outer product separate the array space into a range part (holding the
direct path, with slack against angle error) and a null part (holding the
scattered path).  Projecting the received chips onto the two bases yields the
streams u0 and u1.

Stage two is data adaptive: for each stream the weight vector is the
principal eigenvector of its sample covariance, which maximizes captured
power under a unit-norm constraint.  The scalar outputs nu0 (ambient phase
reference) and nu1 (scattered signal) feed the correlator.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from .aoa import steering_for_angle
from .arrays import ArrayConfig
from .linalg import eigh, principal_eigenvector_unchecked, sample_covariance

DERIVATIVE_ORDERS = (0, 1, 2)
DEFAULT_RANK_TOL = 1e-8


def constraint_matrix(aoa_deg: float, config: ArrayConfig) -> np.ndarray:
    """N x 3 matrix of the steering vector and derivatives at the null angle.

    Needs N > 3 antennas, otherwise no null space would remain after the
    constraints.
    """
    n = config.n_antennas
    if n <= len(DERIVATIVE_ORDERS):
        raise ValueError(f"need more than {len(DERIVATIVE_ORDERS)} antennas, got {n}")
    return np.stack(
        [steering_for_angle(aoa_deg, order, config) for order in DERIVATIVE_ORDERS], axis=1
    )


@dataclass(frozen=True)
class EigenSplit:
    """Orthonormal bases of the constraint range space and its complement."""

    range_basis: np.ndarray  # N x rank
    null_basis: np.ndarray   # N x (N - rank)
    rank: int


def eigensplit(constraints: np.ndarray, rank_tol: float = DEFAULT_RANK_TOL) -> EigenSplit:
    """Split the array space along the eigenvectors of C C^H.

    Eigenvalues below ``rank_tol`` times the largest are treated as zero;
    their eigenvectors span the null space used to cancel the constrained
    path.
    """
    c = np.asarray(constraints)
    if c.ndim != 2:
        raise ValueError(f"constraint matrix must be 2-D, got shape {c.shape}")
    result = eigh(c @ c.conj().T)
    top = result.eigenvalues[0]
    if not top > 0:
        raise ValueError("constraint matrix has no signal subspace")
    rank = int(np.sum(result.eigenvalues > rank_tol * top))
    if rank == c.shape[0]:
        raise ValueError("constraints span the whole array space; no null space left")
    return EigenSplit(
        result.eigenvectors[:, :rank].copy(),
        result.eigenvectors[:, rank:].copy(),
        rank,
    )


def stage1_project(split: EigenSplit, samples) -> tuple[np.ndarray, np.ndarray]:
    """Project chip vectors onto the range and null bases.

    The full received signal goes through both projections; nothing is
    discarded at this stage.
    """
    y = np.asarray(getattr(samples, "samples", samples))
    return split.range_basis.conj().T @ y, split.null_basis.conj().T @ y


def stage2_weights(u_samples: np.ndarray) -> tuple[np.ndarray, float]:
    """Max-power combining weights for one projected stream.

    Returns the principal eigenvector of the stream's sample covariance and
    the corresponding eigenvalue.  Warns when there are fewer samples than
    dimensions, where the covariance estimate is rank deficient.
    """
    u = np.asarray(u_samples)
    if u.ndim == 1:
        u = u[:, None]
    if u.shape[1] == 0:
        raise ValueError("need at least one sample")
    if u.shape[1] < u.shape[0]:
        warnings.warn(
            f"covariance estimated from {u.shape[1]} samples in {u.shape[0]} dimensions",
            stacklevel=2,
        )
    # sample_covariance output is exactly Hermitian, so the unchecked
    # eigensolver path gives identical results without validation cost.
    return principal_eigenvector_unchecked(sample_covariance(u))


@dataclass(frozen=True)
class BeamformerState:
    """Eigensplit plus the adapted second-stage weights for both streams."""

    split: EigenSplit
    v0: np.ndarray
    v1: np.ndarray
    mu0: float
    mu1: float


def adapt_state(split: EigenSplit, samples) -> BeamformerState:
    """Build the full beamformer state from one frame of chips."""
    u0, u1 = stage1_project(split, samples)
    v0, mu0 = stage2_weights(u0)
    v1, mu1 = stage2_weights(u1)
    return BeamformerState(split, v0, v1, mu0, mu1)


def beamform_outputs(state: BeamformerState, samples) -> tuple[np.ndarray, np.ndarray]:
    """Scalar beamformer outputs per chip: nu0 from u0, nu1 from u1."""
    u0, u1 = stage1_project(state.split, samples)
    return state.v0.conj() @ u0, state.v1.conj() @ u1
