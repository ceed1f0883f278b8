import numpy as np
import numpy.testing as npt
import pytest

from ambcsim import (
    ArrayConfig,
    adapt_state,
    constraint_matrix,
    eigensplit,
    select_pair,
    stage1_project,
    stage2_weights,
    synthesize_codeword,
)
from ambcsim.aoa import steering_for_angle
from ambcsim.beamformer import beamform_outputs
from ambcsim.synthesis import amplitude_calibration
from ambcsim.channel import path_gains

from conftest import reference_scenario

CFG8 = ArrayConfig(8, 0.5)


def leakage(split, vector):
    return np.sum(np.abs(split.null_basis.conj().T @ vector) ** 2)


def test_constraint_matrix_at_broadside():
    cfg = ArrayConfig(4, 0.5)
    c = constraint_matrix(90.0, cfg)  # omega = 0
    npt.assert_allclose(c[:, 0], np.ones(4))
    npt.assert_allclose(c[:, 1], [0, 1j, 2j, 3j])
    npt.assert_allclose(c[:, 2], [0, -1, -4, -9])


def test_constraint_matrix_has_rank_three():
    c = constraint_matrix(60.0, CFG8)
    assert c.shape == (8, 3)
    eigenvalues = np.linalg.eigvalsh(c @ c.conj().T)
    assert np.sum(eigenvalues > 1e-8 * eigenvalues.max()) == 3


def test_constraint_matrix_needs_enough_antennas():
    with pytest.raises(ValueError):
        constraint_matrix(60.0, ArrayConfig(3, 0.5))


def test_eigensplit_invariants():
    split = eigensplit(constraint_matrix(60.0, CFG8))
    assert split.rank == 3
    assert split.range_basis.shape == (8, 3)
    assert split.null_basis.shape == (8, 5)
    npt.assert_allclose(
        split.range_basis.conj().T @ split.null_basis, np.zeros((3, 5)), atol=1e-12
    )
    full = np.hstack([split.range_basis, split.null_basis])
    npt.assert_allclose(full.conj().T @ full, np.eye(8), atol=1e-12)
    for col in constraint_matrix(60.0, CFG8).T:
        assert np.linalg.norm(split.null_basis.conj().T @ col) <= 1e-8 * np.linalg.norm(col)


def test_eigensplit_rejects_degenerate_inputs():
    with pytest.raises(ValueError):
        eigensplit(np.zeros((8, 3)))
    with pytest.raises(ValueError):
        eigensplit(np.eye(3))  # constraints fill the whole space


def test_null_depth_at_exact_angle():
    split = eigensplit(constraint_matrix(60.0, CFG8))
    a = steering_for_angle(60.0, 0, CFG8)
    assert leakage(split, a) / 8 <= 1e-20


def test_derivative_constraints_widen_the_null():
    angle = 60.0
    deriv_split = eigensplit(constraint_matrix(angle, CFG8))
    zeroth_split = eigensplit(steering_for_angle(angle, 0, CFG8).reshape(8, 1))
    probe = steering_for_angle(angle + 1.0, 0, CFG8)
    deriv_leak = leakage(deriv_split, probe)
    zeroth_leak = leakage(zeroth_split, probe)
    assert 10 * np.log10(zeroth_leak / deriv_leak) >= 30.0


def test_stage1_direct_only_lands_in_range_space():
    scenario = reference_scenario(noise_enabled=False)
    pair = select_pair(scenario.code_order)
    frame = synthesize_codeword(
        scenario, 1, pair, np.random.default_rng(0), amplitudes=(1.0, 0.0)
    )
    split = eigensplit(constraint_matrix(60.0, CFG8))
    u0, u1 = stage1_project(split, frame.samples)
    assert np.linalg.norm(u1) <= 1e-9
    assert np.linalg.norm(u0) > 0


def test_stage1_scattered_survives_the_null():
    scenario = reference_scenario(noise_enabled=False)
    pair = select_pair(scenario.code_order)
    frame = synthesize_codeword(
        scenario, 1, pair, np.random.default_rng(1), amplitudes=(0.0, 1.0)
    )
    split = eigensplit(constraint_matrix(60.0, CFG8))
    u0, u1 = stage1_project(split, frame.samples)
    assert np.sum(np.abs(u1) ** 2) / np.sum(np.abs(u0) ** 2) > 1.0


def test_stage1_noise_splits_by_dimension():
    split = eigensplit(constraint_matrix(60.0, CFG8))
    rng = np.random.default_rng(2)
    m = 200_000
    noise = (rng.standard_normal((8, m)) + 1j * rng.standard_normal((8, m))) / np.sqrt(2)
    u0, u1 = stage1_project(split, noise)
    ratio = np.sum(np.abs(u0) ** 2) / np.sum(np.abs(u1) ** 2)
    assert ratio == pytest.approx(3.0 / 5.0, rel=0.02)


def test_stage1_conserves_energy_per_chip():
    scenario = reference_scenario()
    pair = select_pair(scenario.code_order)
    frame = synthesize_codeword(scenario, -1, pair, np.random.default_rng(3))
    split = eigensplit(constraint_matrix(60.1, CFG8))
    u0, u1 = stage1_project(split, frame.samples)
    total = np.sum(np.abs(u0) ** 2, axis=0) + np.sum(np.abs(u1) ** 2, axis=0)
    npt.assert_allclose(total, np.sum(np.abs(frame.samples) ** 2, axis=0), rtol=1e-9)


def test_stage2_rank_one_stream():
    rng = np.random.default_rng(4)
    b = rng.standard_normal(5) + 1j * rng.standard_normal(5)
    u = np.outer(b, np.ones(50))
    v, mu = stage2_weights(u)
    assert abs(v.conj() @ b) == pytest.approx(np.linalg.norm(b), rel=1e-9)
    assert mu == pytest.approx(np.linalg.norm(b) ** 2, rel=1e-9)


def test_stage2_white_noise_eigenvalue_near_one():
    rng = np.random.default_rng(5)
    m = 20_000
    u = (rng.standard_normal((5, m)) + 1j * rng.standard_normal((5, m))) / np.sqrt(2)
    _, mu = stage2_weights(u)
    assert abs(mu - 1.0) < 0.1


def test_stage2_warns_when_underdetermined():
    rng = np.random.default_rng(6)
    u = rng.standard_normal((5, 3)) + 0j
    with pytest.warns(UserWarning):
        stage2_weights(u)
    with pytest.raises(ValueError):
        stage2_weights(np.zeros((5, 0)))


def test_stage2_maximizes_rayleigh_quotient():
    rng = np.random.default_rng(7)
    u = rng.standard_normal((5, 200)) + 1j * rng.standard_normal((5, 200))
    v, _ = stage2_weights(u)
    sigma = u @ u.conj().T / 200
    best = np.real(v.conj() @ sigma @ v)
    directions = rng.standard_normal((10_000, 5)) + 1j * rng.standard_normal((10_000, 5))
    directions /= np.linalg.norm(directions, axis=1, keepdims=True)
    quotients = np.real(np.einsum("ki,ij,kj->k", directions.conj(), sigma, directions))
    assert best >= quotients.max() - 1e-12


def test_stage2_aligns_with_scattered_direction_at_high_snr():
    scenario = reference_scenario(snr_db=30.0)
    pair = select_pair(scenario.code_order)
    split = eigensplit(constraint_matrix(60.0, CFG8))
    q = split.null_basis.conj().T @ steering_for_angle(90.0, 0, CFG8)
    for trial in range(10):
        frame = synthesize_codeword(scenario, 1, pair, np.random.default_rng(50 + trial))
        _, u1 = stage1_project(split, frame.samples)
        v1, _ = stage2_weights(u1)
        assert abs(v1.conj() @ q) / np.linalg.norm(q) > 0.95


def test_beamform_outputs_noiseless():
    scenario = reference_scenario(
        noise_enabled=False, ambient_model="unit_modulus", snr_db=20.0
    )
    pair = select_pair(scenario.code_order)
    rng = np.random.default_rng(8)
    frame = synthesize_codeword(scenario, -1, pair, rng)
    split = eigensplit(constraint_matrix(60.0, CFG8))
    state = adapt_state(split, frame.samples)
    nu0, nu1 = beamform_outputs(state, frame.samples)
    # constant-magnitude phase reference
    npt.assert_allclose(np.abs(nu0), np.abs(nu0[0]), rtol=1e-9)
    # nu1 = h1 * s * chips exactly: compute h1 from the construction
    alpha0, alpha1 = amplitude_calibration(scenario)
    gains = path_gains(scenario.geometry, scenario.lambda_m)
    q = split.null_basis.conj().T @ steering_for_angle(90.0, 0, CFG8)
    h1 = state.v1.conj() @ (alpha1 * gains.g1 / abs(gains.g1) * q)
    s = nu0 / (nu0[0] / abs(nu0[0])) / np.abs(nu0)  # not the ambient itself; check via ratio
    ratio = nu1 / (h1 * frame.truth_chips)
    # the remaining factor is the unit-modulus ambient sequence
    npt.assert_allclose(np.abs(ratio), np.ones(pair.length), rtol=1e-9)


def test_beamform_outputs_direct_only_silences_null_stream():
    scenario = reference_scenario(noise_enabled=False)
    pair = select_pair(scenario.code_order)
    frame = synthesize_codeword(
        scenario, 1, pair, np.random.default_rng(9), amplitudes=(2.0, 0.0)
    )
    split = eigensplit(constraint_matrix(60.0, CFG8))
    state = adapt_state(split, frame.samples)
    nu0, nu1 = beamform_outputs(state, frame.samples)
    assert np.linalg.norm(nu1) <= 1e-9
    assert np.linalg.norm(nu0) > 0
