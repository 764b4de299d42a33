import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from csrskit.core_model import (
    DispersionDomainError,
    FiberGeometry,
    GasDispersion,
    LP01,
    LP11,
    ModeLabel,
    ResonanceProximityError,
    bessel_zero,
    effective_core_index,
    gas_index,
    marcatili_mode_index,
    resonance_wavelengths,
    transmission_window,
)
from tests.conftest import H2_COEFFICIENTS, REFERENCE_EXCLUSION

# immutable instance shared by the hypothesis property tests
_H2 = GasDispersion("H2", H2_COEFFICIENTS, 1.01325, 273.15)


# --- independent oracle: power series of J_l plus bisection ------------------


def j_series(l: int, x: float) -> float:
    """Bessel J_l by its power series; plenty accurate for x < 15."""
    term = (x / 2.0) ** l / math.factorial(l)
    total = term
    for k in range(1, 60):
        term *= -((x / 2.0) ** 2) / (k * (k + l))
        total += term
    return total


def bisect_zero(l: int, lo: float, hi: float) -> float:
    f_lo = j_series(l, lo)
    assert f_lo * j_series(l, hi) < 0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if f_lo * j_series(l, mid) <= 0:
            hi = mid
        else:
            lo = mid
            f_lo = j_series(l, lo)
    return 0.5 * (lo + hi)


class TestBesselZero:
    # frozen from the series/bisection oracle below
    CASES = [
        ((0, 1), 2.4048255577),
        ((1, 1), 3.8317059702),
        ((0, 2), 5.5200781103),
    ]

    @pytest.mark.parametrize("order,expected", CASES)
    def test_frozen_values(self, order, expected):
        assert bessel_zero(*order) == pytest.approx(expected, abs=1e-10)

    @pytest.mark.parametrize("order,bracket", [((0, 1), (2.0, 3.0)), ((1, 1), (3.0, 4.5)), ((0, 2), (5.0, 6.0))])
    def test_against_series_oracle(self, order, bracket):
        independent = bisect_zero(order[0], *bracket)
        assert bessel_zero(*order) == pytest.approx(independent, abs=1e-10)

    def test_deterministic(self):
        assert bessel_zero(2, 3) == bessel_zero(2, 3)

    @pytest.mark.parametrize("l,m", [(-1, 1), (6, 1), (0, 0), (0, 6)])
    def test_range_errors(self, l, m):
        with pytest.raises(ValueError):
            bessel_zero(l, m)

    def test_mode_label_carries_zero(self):
        assert ModeLabel(0, 1).bessel_zero == bessel_zero(0, 1)
        with pytest.raises(ValueError):
            ModeLabel(0, 0)


class TestGasIndex:
    def test_vacuum_is_exactly_one(self, h2_gas):
        for lam in (300.0, 914.0, 1550.0, 5000.0):
            assert gas_index(h2_gas, lam, 0.0, 293.0) == 1.0

    def test_double_reference_density_doubles_refractivity(self, h2_gas):
        lam = 1550.0
        n = gas_index(h2_gas, lam, 2.0 * h2_gas.reference_pressure_bar, h2_gas.reference_temperature_k)
        assert n**2 - 1.0 == pytest.approx(2.0 * h2_gas.reference_refractivity(lam), rel=1e-12)

    def test_dense_grid_cross_check(self, h2_gas):
        # interpolate the same formula on a fine grid around the target
        lam0, p, t = 914.0, 83.0, 293.0
        grid = [lam0 - 0.5 + 0.001 * k for k in range(1001)]
        values = [gas_index(h2_gas, lam, p, t) for lam in grid]
        i = min(range(len(grid)), key=lambda k: abs(grid[k] - lam0))
        assert grid[i] == pytest.approx(lam0, abs=1e-9)
        assert gas_index(h2_gas, lam0, p, t) == pytest.approx(values[i], abs=1e-12)

    def test_above_unity_when_pressurized(self, h2_gas):
        assert gas_index(h2_gas, 914.0, 1.0, 293.0) > 1.0

    @given(
        p_lo=st.floats(min_value=0.0, max_value=100.0),
        dp=st.floats(min_value=1e-3, max_value=100.0),
        lam=st.floats(min_value=300.0, max_value=3000.0),
    )
    @settings(max_examples=60, deadline=None)
    def test_monotone_in_pressure(self, p_lo, dp, lam):
        assert gas_index(_H2, lam, p_lo, 293.0) < gas_index(_H2, lam, p_lo + dp, 293.0)

    def test_pole_raises_domain_error(self, h2_gas):
        with pytest.raises(DispersionDomainError):
            gas_index(h2_gas, 70.0, 1.0, 293.0)

    def test_compressibility_halves_density(self):
        gas = GasDispersion("H2", ((2e-4, 5e-3),), 1.0, 273.15, compressibility=lambda p, t: 2.0)
        ideal = GasDispersion("H2", ((2e-4, 5e-3),), 1.0, 273.15)
        assert gas_index(gas, 1000.0, 10.0, 273.15) == pytest.approx(
            gas_index(ideal, 1000.0, 5.0, 273.15), rel=1e-14
        )


class TestMarcatiliIndex:
    def test_reference_probe_value(self):
        # independent evaluation: u = j01 * lambda / (2 pi r)
        u = 2.4048255576957728 * 914e-9 / (2.0 * math.pi * 23e-6)
        assert marcatili_mode_index(914.0, 23.0, LP01) == pytest.approx(1.0 - 0.5 * u * u, rel=1e-14)
        assert marcatili_mode_index(914.0, 23.0, LP01) == pytest.approx(0.99988433, abs=5e-9)

    def test_higher_order_capillary_value(self):
        u = 3.8317059702075125 * 914e-9 / (2.0 * math.pi * 18.3e-6)
        assert marcatili_mode_index(914.0, 18.3, LP11) == pytest.approx(1.0 - 0.5 * u * u, rel=1e-14)
        assert marcatili_mode_index(914.0, 18.3, LP11) == pytest.approx(0.99953612, abs=5e-8)

    def test_short_wavelength_limit_monotone_to_one(self):
        lams = [500.0 / 2**k for k in range(12)]
        values = [marcatili_mode_index(lam, 23.0, LP01) for lam in lams]
        assert all(b > a for a, b in zip(values, values[1:]))
        assert values[-1] < 1.0
        assert 1.0 - values[-1] < 1e-9

    @given(
        lam=st.floats(min_value=100.0, max_value=3000.0),
        radius=st.floats(min_value=5.0, max_value=100.0),
    )
    @settings(max_examples=100, deadline=None)
    def test_bounds_and_scaling(self, lam, radius):
        n = marcatili_mode_index(lam, radius, LP01)
        assert 0.0 < n < 1.0
        # decreases as lambda / radius grows
        assert marcatili_mode_index(lam * 1.5, radius, LP01) < n
        assert marcatili_mode_index(lam, radius * 1.5, LP01) > n


class TestResonances:
    def test_reference_positions(self):
        lams = resonance_wavelengths(1.28, 1.444, 3)
        assert lams[1] == pytest.approx(1333.4, abs=0.5)  # m=2, near the observed 1330 nm dip
        assert lams[2] == pytest.approx(888.9, abs=0.5)  # m=3

    def test_harmonic_structure_exact(self):
        lams = resonance_wavelengths(0.97, 1.45, 6)
        for m, lam in enumerate(lams, start=1):
            assert lam == lams[0] / m
        assert all(b < a for a, b in zip(lams, lams[1:]))

    def test_index_matched_wall_degenerates_to_zero(self):
        assert resonance_wavelengths(1.28, 1.0 + 1e-12, 2)[0] == pytest.approx(0.0, abs=1e-2)
        with pytest.raises(ValueError):
            resonance_wavelengths(1.28, 1.0, 2)

    def test_window_classification(self):
        # probe and short pump live between the m=3 and m=2 resonances
        assert transmission_window(914.0, 1.28, 1.444) == 3
        assert transmission_window(942.0, 1.28, 1.444) == 3
        assert transmission_window(1550.0, 1.28, 1.444) == 2
        assert transmission_window(1475.6, 1.28, 1.444) == 2
        assert transmission_window(5000.0, 1.28, 1.444) == 1


class TestFiberGeometry:
    def test_invariants(self):
        with pytest.raises(ValueError):
            FiberGeometry(-1.0, 18.0, 1.3, 7)
        with pytest.raises(ValueError):
            FiberGeometry(23.0, 18.0, 1.3, 2)
        with pytest.raises(ValueError):
            FiberGeometry(2.0, 18.0, 1.3, 7)  # capillary larger than N * core

    def test_wall_index_models(self):
        const = FiberGeometry(23.0, 18.3, 1.28, 7, wall_index=1.444)
        assert const.wall_refractive_index(914.0) == 1.444
        table = FiberGeometry(23.0, 18.3, 1.28, 7, wall_index=[(900.0, 1.45), (1600.0, 1.44)])
        assert table.wall_refractive_index(900.0) == 1.45
        assert table.wall_refractive_index(1250.0) == pytest.approx(1.445)
        assert table.wall_refractive_index(2000.0) == 1.44
        # fused-silica style two-term Sellmeier pairs (leading Malitson terms)
        sell = FiberGeometry(
            23.0, 18.3, 1.28, 7, wall_index=[(0.6961663, 0.0684043**2), (0.4079426, 0.1162414**2)]
        )
        n = sell.wall_refractive_index(1550.0)
        assert 1.4 < n < 1.5


class TestEffectiveCoreIndex:
    def test_vacuum_marcatili_variant_reduces_exactly(self, fiber_geom, h2_gas):
        for lam, mode in ((1550.0, LP01), (1777.0, LP11)):
            n = effective_core_index(fiber_geom, h2_gas, lam, 0.0, 293.0, mode, "marcatili")
            assert n == marcatili_mode_index(lam, fiber_geom.core_radius_um, mode)

    def test_monotone_in_pressure(self, fiber_geom, h2_gas):
        previous = None
        for p in (0.0, 10.0, 40.0, 80.0, 120.0):
            n = effective_core_index(fiber_geom, h2_gas, 1550.0, p, 293.0)
            if previous is not None:
                assert n > previous
            previous = n

    def test_wall_term_small_inside_window(self, fiber_geom, h2_gas):
        n_wall = 1.444
        # anti-resonant window centers: phi = (m + 1/2) pi
        for m in (1, 2):
            lam_c = 2.0 * 1.28e3 * math.sqrt(n_wall**2 - 1.0) / (m + 0.5)
            full = effective_core_index(fiber_geom, h2_gas, lam_c, 20.0, 293.0)
            bare = effective_core_index(fiber_geom, h2_gas, lam_c, 20.0, 293.0, variant="marcatili")
            assert abs(full - bare) < 1e-6
        # away from the exact center the wall term stays below 1e-5
        full = effective_core_index(fiber_geom, h2_gas, 1550.0, 20.0, 293.0)
        bare = effective_core_index(fiber_geom, h2_gas, 1550.0, 20.0, 293.0, variant="marcatili")
        assert 0 < abs(full - bare) < 1e-5

    def test_continuity_inside_window(self, fiber_geom, h2_gas):
        # 0.01 nm sampling: smooth slope only, no cot branch jumps
        lams = [1500.0 + 0.01 * k for k in range(200)]
        values = [
            effective_core_index(fiber_geom, h2_gas, lam, 30.0, 293.0, LP01, "zeisberger", REFERENCE_EXCLUSION)
            for lam in lams
        ]
        first = [b - a for a, b in zip(values, values[1:])]
        second = [b - a for a, b in zip(first, first[1:])]
        assert max(abs(d) for d in first) < 1e-8
        assert max(abs(d) for d in second) < 1e-9

    def test_guard_band_rejects_near_resonance(self, fiber_geom, h2_gas):
        # the probe at 914 nm sits 2.8 % from the m=3 resonance: inside the
        # 3 % default band, outside the 2 % reference band
        with pytest.raises(ResonanceProximityError):
            effective_core_index(fiber_geom, h2_gas, 914.0, 10.0, 293.0)
        n = effective_core_index(
            fiber_geom, h2_gas, 914.0, 10.0, 293.0, resonance_exclusion_rel=REFERENCE_EXCLUSION
        )
        assert 0.99 < n < 1.01
        with pytest.raises(ResonanceProximityError):
            effective_core_index(fiber_geom, h2_gas, 889.0, 10.0, 293.0, resonance_exclusion_rel=0.001)

    def test_unknown_variant_rejected(self, fiber_geom, h2_gas):
        with pytest.raises(ValueError):
            effective_core_index(fiber_geom, h2_gas, 1550.0, 10.0, 293.0, variant="vectorial")
