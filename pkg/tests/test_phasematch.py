import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.constants import c as C_M_PER_S

from csrskit.core_model import LP01, LP11, FiberGeometry
from csrskit.phasematch import (
    AcceptanceWidth,
    ConversionScheme,
    InfeasibleSchemeError,
    NoRootError,
    NoSolutionError,
    SchemeDetuningError,
    delta_beta,
    infer_wall_thickness,
    optimal_pressure,
    phase_matching_factor,
    pressure_acceptance,
    propagation_constant,
    raman_beat_thz,
    signal_wavelength,
)
from tests.conftest import REFERENCE_EXCLUSION

T_K = 293.0


def degenerate_scheme() -> ConversionScheme:
    # pump1 equals the signal and pump2 equals the probe, so all four
    # propagation constants cancel pairwise
    shift = (1.0 / 914.0 - 1.0 / 1474.0) * 1e7
    return ConversionScheme(
        pump1_nm=1474.0, pump2_nm=914.0, probe_nm=914.0, signal_nm=1474.0, raman_shift_cm1=shift
    )


class TestSignalWavelength:
    def test_reference_scheme(self):
        # oracle: plain vacuum-wavenumber arithmetic
        expected = 1.0 / (1.0 / 914.0 - 1.0 / 942.0 + 1.0 / 1550.0)
        got = signal_wavelength(914.0, 1550.0, 942.0)
        assert got == pytest.approx(expected, rel=1e-15)
        assert got == pytest.approx(1475.6, abs=0.05)

    def test_zero_shift_returns_probe(self):
        assert signal_wavelength(914.0, 1200.0, 1200.0) == pytest.approx(914.0, rel=1e-15)

    def test_probe_at_short_pump(self):
        # probing with the short pump itself still lands in the same band
        got = signal_wavelength(942.0, 1550.0, 942.0)
        assert got == pytest.approx(1550.0, rel=1e-12)

    @given(
        probe=st.floats(min_value=500.0, max_value=1200.0),
        pump1=st.floats(min_value=1300.0, max_value=1700.0),
        pump2=st.floats(min_value=900.0, max_value=1100.0),
    )
    @settings(max_examples=100, deadline=None)
    def test_wavenumber_conservation(self, probe, pump1, pump2):
        signal = signal_wavelength(probe, pump1, pump2)
        lhs = 1.0 / pump1 + 1.0 / probe
        rhs = 1.0 / pump2 + 1.0 / signal
        assert lhs == pytest.approx(rhs, rel=1e-14)

    def test_infeasible_combinations(self):
        with pytest.raises(InfeasibleSchemeError):
            signal_wavelength(914.0, 942.0, 1550.0)  # pump2 redder than pump1
        with pytest.raises(InfeasibleSchemeError):
            signal_wavelength(50000.0, 10000.0, 500.0)  # shift exceeds probe energy


class TestRamanBeat:
    def test_reference_pumps(self):
        expected = C_M_PER_S * (1.0 / 942e-9 - 1.0 / 1550e-9) * 1e-12
        assert raman_beat_thz(1550.0, 942.0) == pytest.approx(expected, rel=1e-15)
        assert raman_beat_thz(1550.0, 942.0) == pytest.approx(124.8, abs=0.05)

    def test_equal_pumps(self):
        assert raman_beat_thz(1064.0, 1064.0) == 0.0

    def test_octave_pair(self):
        assert raman_beat_thz(1550.0, 775.0) == pytest.approx(C_M_PER_S / 1550e-9 * 1e-12, rel=1e-14)
        assert raman_beat_thz(1550.0, 775.0) == pytest.approx(193.4, abs=0.05)


class TestConversionScheme:
    def test_from_pumps_derives_consistent_scheme(self, reference_scheme):
        s = reference_scheme
        assert s.signal_nm == pytest.approx(1475.618, abs=1e-3)
        assert s.raman_shift_cm1 == pytest.approx(1e7 / 942.0 - 1e7 / 1550.0, rel=1e-15)
        assert 1.0 / s.signal_nm == pytest.approx(1.0 / s.probe_nm - s.raman_shift_cm1 * 1e-7, rel=1e-12)

    def test_detuning_tolerance(self):
        # the rounded 1550/942 pump pair beats 8.85 cm^-1 above the nominal
        # transition, outside the 5 cm^-1 default
        with pytest.raises(SchemeDetuningError):
            ConversionScheme.from_pumps(914.0, 1550.0, 942.0, transition_cm1=4155.25)
        s = ConversionScheme.from_pumps(
            914.0, 1550.0, 942.0, transition_cm1=4155.25, detuning_tolerance_cm1=10.0
        )
        assert s.raman_shift_cm1 - 4155.25 == pytest.approx(8.85, abs=0.01)

    def test_direct_construction_must_be_consistent(self):
        with pytest.raises(ValueError):
            ConversionScheme(1550.0, 942.0, 914.0, 1480.0, 4164.1)
        with pytest.raises(ValueError):
            ConversionScheme(1550.0, 942.0, 914.0, 900.0, (1e7 / 914 - 1e7 / 900))  # signal blue of probe


class TestPropagationConstant:
    def test_vacuum_limit(self, h2_gas):
        # enormous core: waveguide term negligible, beta -> 2 pi / lambda
        huge = FiberGeometry(1e6, 10.0, 1.28, 7, 1.444)
        beta = propagation_constant(1550.0, 0.0, T_K, huge, h2_gas, variant="marcatili")
        assert beta == pytest.approx(2.0 * math.pi / 1550e-9, rel=1e-12)

    def test_compositional_oracle(self, fiber_geom, h2_gas):
        from csrskit.core_model import effective_core_index

        lam, p = 1550.0, 50.0
        n_eff = effective_core_index(fiber_geom, h2_gas, lam, p, T_K)
        beta = propagation_constant(lam, p, T_K, fiber_geom, h2_gas)
        assert beta == pytest.approx(2.0 * math.pi / (lam * 1e-9) * n_eff, rel=1e-15)
        assert beta > 0

    def test_monotone_in_pressure(self, fiber_geom, h2_gas):
        betas = [propagation_constant(1550.0, p, T_K, fiber_geom, h2_gas) for p in (0.0, 20.0, 60.0, 120.0)]
        assert all(b2 > b1 for b1, b2 in zip(betas, betas[1:]))


class TestDeltaBeta:
    def test_degenerate_scheme_cancels_exactly(self, fiber_geom, h2_gas):
        db = delta_beta(
            degenerate_scheme(), 30.0, T_K, fiber_geom, h2_gas, resonance_exclusion_rel=REFERENCE_EXCLUSION
        )
        assert db == 0.0

    def test_vacuum_mismatch_closed_form(self, fiber_geom, h2_gas, reference_scheme):
        # at p = 0 (marcatili variant) only the waveguide term survives:
        # delta_beta = -(j01^2 / 4 pi r^2) (l_p1 - l_p2 + l_pr - l_s)
        s = reference_scheme
        j01 = LP01.bessel_zero
        comb_m = (s.pump1_nm - s.pump2_nm + s.probe_nm - s.signal_nm) * 1e-9
        expected = -(j01**2 / (4.0 * math.pi * (fiber_geom.core_radius_um * 1e-6) ** 2)) * comb_m
        got = delta_beta(
            s, 0.0, T_K, fiber_geom, h2_gas, variant="marcatili", resonance_exclusion_rel=REFERENCE_EXCLUSION
        )
        assert got == pytest.approx(expected, abs=1e-6)

    def test_continuous_and_monotone_over_bracket(self, fiber_geom, h2_gas, reference_scheme):
        ps = [1.0 + k * 0.5 for k in range(399)]
        dbs = [
            delta_beta(reference_scheme, p, T_K, fiber_geom, h2_gas, resonance_exclusion_rel=REFERENCE_EXCLUSION)
            for p in ps
        ]
        assert all(b2 > b1 for b1, b2 in zip(dbs, dbs[1:]))
        steps = [abs(b2 - b1) for b1, b2 in zip(dbs, dbs[1:])]
        assert max(steps) < 1.0  # no jumps at 0.5 bar sampling

    def test_per_field_mode_override(self, fiber_geom, h2_gas, reference_scheme):
        base = delta_beta(
            reference_scheme, 30.0, T_K, fiber_geom, h2_gas, resonance_exclusion_rel=REFERENCE_EXCLUSION
        )
        mixed = delta_beta(
            reference_scheme,
            30.0,
            T_K,
            fiber_geom,
            h2_gas,
            modes={"probe": LP11},
            resonance_exclusion_rel=REFERENCE_EXCLUSION,
        )
        assert mixed != base
        with pytest.raises(ValueError):
            delta_beta(
                reference_scheme,
                30.0,
                T_K,
                fiber_geom,
                h2_gas,
                modes={"idler": LP01},
                resonance_exclusion_rel=REFERENCE_EXCLUSION,
            )


class TestOptimalPressure:
    def test_reference_configuration_root(self, fiber_geom, h2_gas, reference_scheme):
        sol = optimal_pressure(
            reference_scheme, T_K, fiber_geom, h2_gas, resonance_exclusion_rel=REFERENCE_EXCLUSION
        )
        assert 60.0 < sol.pressure_bar < 100.0
        assert abs(sol.residual_rad_per_m) < 1e-6

    def test_dense_scan_oracle_agrees(self, fiber_geom, h2_gas, reference_scheme):
        sol = optimal_pressure(
            reference_scheme, T_K, fiber_geom, h2_gas, resonance_exclusion_rel=REFERENCE_EXCLUSION
        )
        # independent oracle: first sign change on a 0.1 bar grid
        p = 60.0
        prev = delta_beta(reference_scheme, p, T_K, fiber_geom, h2_gas, resonance_exclusion_rel=REFERENCE_EXCLUSION)
        crossing = None
        while p < 100.0:
            p += 0.1
            cur = delta_beta(reference_scheme, p, T_K, fiber_geom, h2_gas, resonance_exclusion_rel=REFERENCE_EXCLUSION)
            if prev < 0.0 <= cur:
                crossing = p
                break
            prev = cur
        assert crossing is not None
        assert abs(sol.pressure_bar - crossing) <= 0.1

    def test_bracket_independent(self, fiber_geom, h2_gas, reference_scheme):
        kwargs = dict(resonance_exclusion_rel=REFERENCE_EXCLUSION)
        roots = [
            optimal_pressure(reference_scheme, T_K, fiber_geom, h2_gas, bracket=b, **kwargs).pressure_bar
            for b in ((1.0, 200.0), (50.0, 150.0), (80.0, 110.0))
        ]
        assert max(roots) - min(roots) < 0.01

    def test_tolerance_refinement_stable(self, fiber_geom, h2_gas, reference_scheme):
        loose = optimal_pressure(
            reference_scheme, T_K, fiber_geom, h2_gas, ftol_rad_per_m=1e-6,
            resonance_exclusion_rel=REFERENCE_EXCLUSION,
        )
        tight = optimal_pressure(
            reference_scheme, T_K, fiber_geom, h2_gas, ftol_rad_per_m=5e-7,
            resonance_exclusion_rel=REFERENCE_EXCLUSION,
        )
        assert abs(loose.pressure_bar - tight.pressure_bar) < 0.01

    def test_degenerate_scheme_has_no_root(self, fiber_geom, h2_gas):
        with pytest.raises(NoRootError) as excinfo:
            optimal_pressure(
                degenerate_scheme(), T_K, fiber_geom, h2_gas, resonance_exclusion_rel=REFERENCE_EXCLUSION
            )
        assert excinfo.value.f_lo == 0.0
        assert excinfo.value.f_hi == 0.0


class TestPhaseMatchingFactor:
    def test_perfect_matching(self):
        assert phase_matching_factor(0.0, 1.85) == 1.0

    def test_first_null(self):
        length = 1.85
        db = 2.0 * math.pi / length
        assert phase_matching_factor(db, length) == pytest.approx(0.0, abs=1e-30)

    def test_half_pi_argument(self):
        length = 2.0
        db = math.pi / length  # argument pi/2
        assert phase_matching_factor(db, length) == pytest.approx((2.0 / math.pi) ** 2, rel=1e-12)
        assert phase_matching_factor(db, length) == pytest.approx(0.4053, abs=1e-4)

    @given(db=st.floats(min_value=-1e4, max_value=1e4), length=st.floats(min_value=1e-3, max_value=100.0))
    @settings(max_examples=200, deadline=None)
    def test_bounds(self, db, length):
        val = phase_matching_factor(db, length)
        assert 0.0 <= val <= 1.0
        if abs(db * length) > 1e-6:  # below this 1 - sinc^2 underflows
            assert val < 1.0


class TestPressureAcceptance:
    @pytest.fixture()
    def p_opt(self, fiber_geom, h2_gas, reference_scheme):
        return optimal_pressure(
            reference_scheme, T_K, fiber_geom, h2_gas, resonance_exclusion_rel=REFERENCE_EXCLUSION
        ).pressure_bar

    def test_doubling_length_halves_width(self, fiber_geom, h2_gas, reference_scheme, p_opt):
        kwargs = dict(resonance_exclusion_rel=REFERENCE_EXCLUSION)
        w1 = pressure_acceptance(reference_scheme, T_K, fiber_geom, h2_gas, 1.85, p_opt, **kwargs)
        w2 = pressure_acceptance(reference_scheme, T_K, fiber_geom, h2_gas, 3.70, p_opt, **kwargs)
        assert w1.bounded and w2.bounded
        assert w1.width_bar / w2.width_bar == pytest.approx(2.0, rel=0.05)

    def test_symmetric_to_first_order(self, fiber_geom, h2_gas, reference_scheme, p_opt):
        w = pressure_acceptance(
            reference_scheme, T_K, fiber_geom, h2_gas, 1.85, p_opt, resonance_exclusion_rel=REFERENCE_EXCLUSION
        )
        ratio = (w.upper_bar - p_opt) / (p_opt - w.lower_bar)
        assert 0.8 <= ratio <= 1.25

    def test_short_fiber_is_unbounded(self, fiber_geom, h2_gas, reference_scheme, p_opt):
        w = pressure_acceptance(
            reference_scheme, T_K, fiber_geom, h2_gas, 1e-6, p_opt, resonance_exclusion_rel=REFERENCE_EXCLUSION
        )
        assert isinstance(w, AcceptanceWidth)
        assert not w.bounded
        assert math.isinf(w.width_bar)


class TestInferWallThickness:
    BRACKET = (1.26, 1.29)

    def test_round_trip(self, fiber_geom, h2_gas, reference_scheme):
        forward = optimal_pressure(
            reference_scheme, T_K, fiber_geom, h2_gas, resonance_exclusion_rel=REFERENCE_EXCLUSION
        ).pressure_bar
        sol = infer_wall_thickness(
            forward, reference_scheme, T_K, fiber_geom, h2_gas, self.BRACKET,
            resonance_exclusion_rel=REFERENCE_EXCLUSION,
        )
        assert sol.thickness_um == pytest.approx(1.28, abs=1e-3)
        assert abs(sol.pressure_residual_bar) < 1e-3

    def test_measured_pressure_maps_to_reference_thickness(self, fiber_geom, h2_gas, reference_scheme):
        sol = infer_wall_thickness(
            83.0, reference_scheme, T_K, fiber_geom, h2_gas, self.BRACKET,
            resonance_exclusion_rel=REFERENCE_EXCLUSION,
        )
        assert sol.thickness_um == pytest.approx(1.28, abs=0.05)

    def test_monotone_thickness_to_pressure(self, fiber_geom, h2_gas, reference_scheme):
        from dataclasses import replace

        pressures = []
        for t in (1.26, 1.27, 1.28, 1.29):
            geom_t = replace(fiber_geom, wall_thickness_um=t)
            pressures.append(
                optimal_pressure(
                    reference_scheme, T_K, geom_t, h2_gas, resonance_exclusion_rel=REFERENCE_EXCLUSION
                ).pressure_bar
            )
        assert all(b < a for a, b in zip(pressures, pressures[1:]))

    def test_unreachable_pressure_raises(self, fiber_geom, h2_gas, reference_scheme):
        with pytest.raises(NoSolutionError):
            infer_wall_thickness(
                200.0, reference_scheme, T_K, fiber_geom, h2_gas, self.BRACKET,
                resonance_exclusion_rel=REFERENCE_EXCLUSION,
            )
