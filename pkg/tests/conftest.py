import dataclasses

import pytest

from ambcsim import ArrayConfig, Scenario, derive_geometry, wavelength_m


def reference_scenario(**overrides) -> Scenario:
    """The baseline setup used throughout: 8-element half-wavelength array,
    source 1 km away at 60 deg, tag at 90 deg, 500 MHz carrier."""
    d1_m = overrides.pop("d1_m", 2.0)
    scenario = Scenario(
        array=ArrayConfig(8, 0.5),
        geometry=derive_geometry(1000.0, d1_m, 60.0, 90.0),
        lambda_m=wavelength_m(5e8),
        snr_db=30.0,
        code_order=10,
    )
    if overrides:
        scenario = dataclasses.replace(scenario, **overrides)
    return scenario


@pytest.fixture
def scenario():
    return reference_scenario()
