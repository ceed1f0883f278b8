import dataclasses

import numpy as np
import numpy.testing as npt
import pytest

from ambcsim import (
    amplitude_calibration,
    amplitudes_from_loss,
    relative_loss_db,
    select_pair,
    synthesize_codeword,
)
from ambcsim.arrays import directional_cosine, steering_vector
from ambcsim.synthesis import ambient_sequence

from conftest import reference_scenario


def db(x):
    return 10 * np.log10(x)


def test_loss_identity_thirty_to_three():
    alpha0, alpha1 = amplitudes_from_loss(30.0, 27.0)
    assert 20 * np.log10(alpha0) == pytest.approx(30.0, abs=1e-12)
    assert 20 * np.log10(alpha1) == pytest.approx(3.0, abs=1e-12)


def test_zero_snr_gives_unit_amplitude():
    alpha0, _ = amplitudes_from_loss(0.0, 27.0)
    assert alpha0 == 1.0


def test_calibration_uses_geometry_loss():
    scenario = reference_scenario(snr_db=13.0)
    loss = relative_loss_db(scenario.geometry, scenario.lambda_m)
    alpha0, alpha1 = amplitude_calibration(scenario)
    scattered_snr_db = 20 * np.log10(alpha1)
    assert scattered_snr_db == pytest.approx(13.0 - loss, abs=1e-12)
    assert scattered_snr_db == pytest.approx(-19.4, abs=0.1)


def test_scenario_validation():
    with pytest.raises(ValueError):
        reference_scenario(lambda_m=0.0)
    with pytest.raises(ValueError):
        reference_scenario(snr_db=np.inf)
    with pytest.raises(ValueError):
        reference_scenario(ambient_model="ofdm")
    with pytest.raises(ValueError):
        reference_scenario(code_order=-1)


def test_single_path_noiseless_columns_are_proportional():
    scenario = reference_scenario(noise_enabled=False, snr_db=10.0)
    pair = select_pair(scenario.code_order)
    rng = np.random.default_rng(0)
    frame = synthesize_codeword(
        scenario, 1, pair, rng, ambient=np.ones(pair.length), amplitudes=(3.0, 0.0)
    )
    a = steering_vector(
        directional_cosine(scenario.geometry.aoa_direct_deg, scenario.array), 0, scenario.array
    )
    # every column is the same scaled steering vector
    expected = 3.0 * a
    ratios = frame.samples / expected[:, None]
    npt.assert_allclose(ratios, ratios[0, 0] * np.ones_like(ratios), rtol=1e-12)
    assert abs(abs(ratios[0, 0]) - 1.0) < 1e-12  # unit-modulus path phase


def test_pure_noise_covariance_near_identity():
    scenario = reference_scenario(code_order=16)
    pair = select_pair(scenario.code_order)
    rng = np.random.default_rng(1)
    frame = synthesize_codeword(scenario, 1, pair, rng, amplitudes=(0.0, 0.0))
    n = scenario.array.n_antennas
    r = frame.samples @ frame.samples.conj().T / frame.samples.shape[1]
    assert np.max(np.abs(r - np.eye(n))) < 0.05


def test_empirical_direct_snr_matches_within_tenth_db():
    scenario = reference_scenario(snr_db=7.0, noise_enabled=False, code_order=16)
    pair = select_pair(scenario.code_order)
    rng = np.random.default_rng(2)
    alpha0, _ = amplitude_calibration(scenario)
    frame = synthesize_codeword(scenario, -1, pair, rng, amplitudes=(alpha0, 0.0))
    # noise variance is 1 by construction, so per-antenna SNR = mean |y|^2
    per_antenna_db = db(np.mean(np.abs(frame.samples) ** 2, axis=1))
    npt.assert_allclose(per_antenna_db, 7.0, atol=0.2)


def test_direct_covariance_structure():
    scenario = reference_scenario(snr_db=0.0, code_order=16)
    pair = select_pair(scenario.code_order)
    rng = np.random.default_rng(3)
    frame = synthesize_codeword(scenario, 1, pair, rng, amplitudes=(1.0, 0.0))
    m = frame.samples.shape[1]
    a = steering_vector(
        directional_cosine(scenario.geometry.aoa_direct_deg, scenario.array), 0, scenario.array
    )
    expected = np.outer(a, a.conj()) + np.eye(8)
    r_hat = frame.samples @ frame.samples.conj().T / m
    # entries concentrate at ~sqrt(R_nn R_mm / m); allow 3 standard errors
    se = 3.0 * np.sqrt(np.outer(np.diag(expected).real, np.diag(expected).real) / m)
    assert np.all(np.abs(r_hat - expected) <= 3 * se)


def test_ambient_changes_every_chip():
    # lag-1 autocorrelation of the matched-beam output vanishes
    scenario = reference_scenario(snr_db=20.0, code_order=16)
    pair = select_pair(scenario.code_order)
    rng = np.random.default_rng(4)
    nu = []
    a = steering_vector(
        directional_cosine(scenario.geometry.aoa_direct_deg, scenario.array), 0, scenario.array
    )
    w = a / np.linalg.norm(a)
    for symbol in (1, -1):
        frame = synthesize_codeword(scenario, symbol, pair, rng)
        nu.append(w.conj() @ frame.samples)
    nu = np.concatenate(nu)
    assert nu.size >= 100_000
    rho = np.abs(np.vdot(nu[:-1], nu[1:])) / np.vdot(nu, nu).real
    assert rho < 0.02


def test_unit_modulus_model():
    scenario = reference_scenario(ambient_model="unit_modulus")
    rng = np.random.default_rng(5)
    s = ambient_sequence(scenario, 4096, rng)
    npt.assert_allclose(np.abs(s), np.ones(4096), atol=1e-12)


def test_gaussian_ambient_unit_power():
    scenario = reference_scenario()
    rng = np.random.default_rng(6)
    s = ambient_sequence(scenario, 200_000, rng)
    assert np.mean(np.abs(s) ** 2) == pytest.approx(1.0, abs=0.02)


def test_synthesis_is_deterministic_under_seeding():
    scenario = reference_scenario()
    pair = select_pair(scenario.code_order)
    f1 = synthesize_codeword(scenario, 1, pair, np.random.default_rng(42))
    f2 = synthesize_codeword(scenario, 1, pair, np.random.default_rng(42))
    npt.assert_array_equal(f1.samples, f2.samples)


def test_frame_shapes_and_truth():
    scenario = reference_scenario(code_order=5)
    pair = select_pair(scenario.code_order)
    frame = synthesize_codeword(scenario, -1, pair, np.random.default_rng(7))
    assert frame.samples.shape == (8, 32)
    assert frame.truth_symbol == -1
    npt.assert_array_equal(frame.truth_chips, pair.code_minus)
    assert np.all(np.isfinite(frame.samples.view(float)))


def test_ambient_override_length_checked():
    scenario = reference_scenario(code_order=3)
    pair = select_pair(scenario.code_order)
    with pytest.raises(ValueError):
        synthesize_codeword(scenario, 1, pair, np.random.default_rng(8), ambient=np.ones(4))
