from pathlib import Path

import pytest

from csrskit.core_model import FiberGeometry, GasDispersion
from csrskit.phasematch import ConversionScheme

REPO_ROOT = Path(__file__).resolve().parents[1]

# Hydrogen refractivity after Peck & Huang (1977), recast as (B_i, C_i)
# pairs of n^2 - 1 = sum B_i l^2 / (l^2 - C_i) with l in um, valid at
# 273.15 K and 1 atm.  These match configs/h2_914nm.yaml.
H2_COEFFICIENTS = (
    (2 * 0.0148956 / 180.7, 1 / 180.7),
    (2 * 0.0049037 / 92.0, 1 / 92.0),
)

#: Guard band used with the reference geometry: the 914 nm probe sits
#: only 2.8 % from the m=3 wall resonance, inside the 3 % default.
REFERENCE_EXCLUSION = 0.02


@pytest.fixture(scope="session")
def repo_root() -> Path:
    return REPO_ROOT


@pytest.fixture()
def h2_gas() -> GasDispersion:
    return GasDispersion(
        species="H2",
        refractivity_coefficients=H2_COEFFICIENTS,
        reference_pressure_bar=1.01325,
        reference_temperature_k=273.15,
    )


@pytest.fixture()
def fiber_geom() -> FiberGeometry:
    return FiberGeometry(
        core_radius_um=23.0,
        capillary_inner_radius_um=18.3,
        wall_thickness_um=1.28,
        num_capillaries=7,
        wall_index=1.444,
    )


@pytest.fixture()
def reference_scheme() -> ConversionScheme:
    return ConversionScheme.from_pumps(
        probe_nm=914.0,
        pump1_nm=1550.0,
        pump2_nm=942.0,
        transition_cm1=4155.25,
        detuning_tolerance_cm1=10.0,
    )
