"""Four-wave-mixing phase matching in a gas-filled hollow-core fiber.

The conversion scheme couples four fields: a long pump (pump1), a short
pump (pump2) whose beat with pump1 drives a Raman coherence, a probe,
and the generated signal.  Energy conservation fixes the signal in
vacuum-wavenumber arithmetic,

    1/lambda_signal = 1/lambda_probe - 1/lambda_pump2 + 1/lambda_pump1,

and momentum conservation defines the mismatch of the propagation
constants beta = (2 pi / lambda) n_eff(p, lambda),

    delta_beta = beta_pump1 - beta_pump2 + beta_probe - beta_signal.

The long pump and the probe enter with +, the short pump and the signal
with -, so the vacuum 2 pi / lambda parts cancel exactly and only gas
and waveguide dispersion remain.  Increasing pressure raises the gas
contribution until it balances the (negative) waveguide contribution;
optimal_pressure locates that root.  Wavenumber (cm^-1) arithmetic is
the internal currency; all wavelengths are vacuum wavelengths in nm.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from scipy.constants import c as _C_M_PER_S

from csrskit.core_model import (
    DEFAULT_RESONANCE_EXCLUSION,
    FiberGeometry,
    GasDispersion,
    LP01,
    ModeLabel,
    effective_core_index,
)

__all__ = [
    "FIELD_NAMES",
    "InfeasibleSchemeError",
    "SchemeDetuningError",
    "NoRootError",
    "NoSolutionError",
    "ConversionScheme",
    "PressureSolution",
    "AcceptanceWidth",
    "ThicknessSolution",
    "signal_wavelength",
    "raman_beat_thz",
    "propagation_constant",
    "delta_beta",
    "optimal_pressure",
    "phase_matching_factor",
    "pressure_acceptance",
    "infer_wall_thickness",
]

FIELD_NAMES = ("pump1", "pump2", "probe", "signal")
_SIGNS = {"pump1": +1.0, "pump2": -1.0, "probe": +1.0, "signal": -1.0}


class InfeasibleSchemeError(ValueError):
    """The requested wavelength combination has no physical signal."""


class SchemeDetuningError(ValueError):
    """Pump beat is too far from the nominal Raman transition."""


class NoRootError(RuntimeError):
    """The mismatch does not change sign over the supplied bracket."""

    def __init__(self, message: str, lo: float, hi: float, f_lo: float, f_hi: float):
        super().__init__(f"{message}: f({lo:g}) = {f_lo:g}, f({hi:g}) = {f_hi:g}")
        self.lo = lo
        self.hi = hi
        self.f_lo = f_lo
        self.f_hi = f_hi


class NoSolutionError(RuntimeError):
    """An outer inversion problem has no solution inside its bracket."""


def signal_wavelength(probe_nm: float, pump1_nm: float, pump2_nm: float) -> float:
    """Signal wavelength in nm from exact vacuum-wavenumber conservation."""
    if min(probe_nm, pump1_nm, pump2_nm) <= 0:
        raise ValueError("wavelengths must be positive")
    if 1.0 / pump2_nm < 1.0 / pump1_nm:
        raise InfeasibleSchemeError("pump2 must not be redder than pump1")
    inv_signal = 1.0 / probe_nm - 1.0 / pump2_nm + 1.0 / pump1_nm
    if inv_signal <= 0.0:
        raise InfeasibleSchemeError("scheme yields a non-positive signal wavenumber")
    return 1.0 / inv_signal


def raman_beat_thz(pump1_nm: float, pump2_nm: float) -> float:
    """Pump beat frequency c (1/lambda_pump2 - 1/lambda_pump1), in THz."""
    if pump1_nm <= 0 or pump2_nm <= 0:
        raise ValueError("wavelengths must be positive")
    return _C_M_PER_S * (1.0 / (pump2_nm * 1e-9) - 1.0 / (pump1_nm * 1e-9)) * 1e-12


@dataclass(frozen=True)
class ConversionScheme:
    """The four vacuum wavelengths of one conversion scheme, in nm.

    pump1 is the long pump, pump2 the short pump.  raman_shift_cm1 is the
    wavenumber difference the pumps actually drive (their beat); build
    schemes with from_pumps to have it validated against a nominal
    transition wavenumber.
    """

    pump1_nm: float
    pump2_nm: float
    probe_nm: float
    signal_nm: float
    raman_shift_cm1: float

    def __post_init__(self) -> None:
        if min(self.pump1_nm, self.pump2_nm, self.probe_nm, self.signal_nm) <= 0:
            raise ValueError("all wavelengths must be positive")
        if self.signal_nm <= self.probe_nm:
            raise ValueError("signal must be red of the probe (raman_shift_cm1 must be positive)")
        inv_expected = 1.0 / self.probe_nm - self.raman_shift_cm1 * 1e-7
        if abs(1.0 / self.signal_nm - inv_expected) > 1e-9 * abs(1.0 / self.signal_nm):
            raise ValueError("signal_nm inconsistent with probe_nm and raman_shift_cm1")

    @classmethod
    def from_pumps(
        cls,
        probe_nm: float,
        pump1_nm: float,
        pump2_nm: float,
        transition_cm1: float | None = None,
        detuning_tolerance_cm1: float = 5.0,
    ) -> "ConversionScheme":
        """Derive the signal and Raman shift from the pump pair.

        When transition_cm1 is given, the pump beat must match it within
        detuning_tolerance_cm1 or SchemeDetuningError is raised.
        """
        shift_cm1 = 1e7 / pump2_nm - 1e7 / pump1_nm
        if transition_cm1 is not None:
            detuning = shift_cm1 - transition_cm1
            if abs(detuning) > detuning_tolerance_cm1:
                raise SchemeDetuningError(
                    f"pump beat {shift_cm1:.2f} cm^-1 is {detuning:+.2f} cm^-1 from the "
                    f"nominal transition at {transition_cm1:.2f} cm^-1 "
                    f"(tolerance {detuning_tolerance_cm1:g} cm^-1)"
                )
        signal_nm = signal_wavelength(probe_nm, pump1_nm, pump2_nm)
        return cls(
            pump1_nm=pump1_nm,
            pump2_nm=pump2_nm,
            probe_nm=probe_nm,
            signal_nm=signal_nm,
            raman_shift_cm1=shift_cm1,
        )

    def wavelengths_nm(self) -> dict[str, float]:
        return {
            "pump1": self.pump1_nm,
            "pump2": self.pump2_nm,
            "probe": self.probe_nm,
            "signal": self.signal_nm,
        }


def propagation_constant(
    wavelength_nm: float,
    pressure_bar: float,
    temperature_k: float,
    geom: FiberGeometry,
    gas: GasDispersion,
    mode: ModeLabel = LP01,
    variant: str = "zeisberger",
    resonance_exclusion_rel: float = DEFAULT_RESONANCE_EXCLUSION,
) -> float:
    """beta = (2 pi / lambda) n_eff, in rad/m."""
    n_eff = effective_core_index(
        geom, gas, wavelength_nm, pressure_bar, temperature_k, mode, variant, resonance_exclusion_rel
    )
    return 2.0 * math.pi / (wavelength_nm * 1e-9) * n_eff


def delta_beta(
    scheme: ConversionScheme,
    pressure_bar: float,
    temperature_k: float,
    geom: FiberGeometry,
    gas: GasDispersion,
    modes: dict[str, ModeLabel] | ModeLabel | None = None,
    variant: str = "zeisberger",
    resonance_exclusion_rel: float = DEFAULT_RESONANCE_EXCLUSION,
) -> float:
    """Phase mismatch of the scheme at the given pressure, in rad/m.

    All four fields propagate in the fundamental mode unless modes
    supplies per-field overrides ({"pump1": ..., "probe": ...}) or a
    single ModeLabel for all of them.
    """
    if modes is None:
        mode_map = {name: LP01 for name in FIELD_NAMES}
    elif isinstance(modes, ModeLabel):
        mode_map = {name: modes for name in FIELD_NAMES}
    else:
        unknown = set(modes) - set(FIELD_NAMES)
        if unknown:
            raise ValueError(f"unknown field names in mode overrides: {sorted(unknown)}")
        mode_map = {name: modes.get(name, LP01) for name in FIELD_NAMES}

    total = 0.0
    for name, lam in scheme.wavelengths_nm().items():
        beta = propagation_constant(
            lam, pressure_bar, temperature_k, geom, gas, mode_map[name], variant, resonance_exclusion_rel
        )
        total += _SIGNS[name] * beta
    return total


def phase_matching_factor(delta_beta_rad_per_m: float, length_m: float) -> float:
    """sinc^2(delta_beta L / 2) with sinc(x) = sin(x)/x, sinc(0) = 1."""
    if length_m <= 0:
        raise ValueError("length must be positive")
    x = 0.5 * delta_beta_rad_per_m * length_m
    if x == 0.0:
        return 1.0
    s = math.sin(x) / x
    return s * s


@dataclass(frozen=True)
class PressureSolution:
    pressure_bar: float
    residual_rad_per_m: float
    iterations: int


@dataclass(frozen=True)
class AcceptanceWidth:
    lower_bar: float | None
    upper_bar: float | None
    width_bar: float
    bounded: bool


@dataclass(frozen=True)
class ThicknessSolution:
    thickness_um: float
    pressure_residual_bar: float


def _bracketed_root(f, lo: float, hi: float, ftol: float, what: str, max_iter: int = 200):
    """Bisection with secant acceleration; terminates on |f| < ftol.

    Requires a strict sign change over [lo, hi]; guaranteed to converge
    because every step stays inside a shrinking bracket.
    """
    f_lo = f(lo)
    f_hi = f(hi)
    if not (f_lo * f_hi < 0.0):
        raise NoRootError(f"no sign change of {what} over the bracket", lo, hi, f_lo, f_hi)
    a, b, fa, fb = lo, hi, f_lo, f_hi
    x, fx = (a, fa) if abs(fa) < abs(fb) else (b, fb)
    for iteration in range(1, max_iter + 1):
        mid = 0.5 * (a + b)
        x = mid
        if fb != fa:
            secant = b - fb * (b - a) / (fb - fa)
            if a < secant < b:
                x = secant
        fx = f(x)
        if abs(fx) < ftol:
            return x, fx, iteration
        if fa * fx < 0.0:
            b, fb = x, fx
        else:
            a, fa = x, fx
        if b - a <= max(1e-15, 1e-14 * max(abs(a), abs(b))):
            return x, fx, iteration
    return x, fx, max_iter


def optimal_pressure(
    scheme: ConversionScheme,
    temperature_k: float,
    geom: FiberGeometry,
    gas: GasDispersion,
    bracket: tuple[float, float] = (1.0, 200.0),
    ftol_rad_per_m: float = 1e-6,
    modes: dict[str, ModeLabel] | ModeLabel | None = None,
    variant: str = "zeisberger",
    resonance_exclusion_rel: float = DEFAULT_RESONANCE_EXCLUSION,
) -> PressureSolution:
    """Pressure at which the scheme phase-matches (delta_beta = 0).

    The mismatch must change sign over the bracket, otherwise
    NoRootError carries the sampled endpoint values.  The root is
    polished until |delta_beta| < ftol_rad_per_m.
    """

    def f(p: float) -> float:
        return delta_beta(scheme, p, temperature_k, geom, gas, modes, variant, resonance_exclusion_rel)

    p_lo, p_hi = bracket
    if not (0.0 <= p_lo < p_hi):
        raise ValueError("bracket must satisfy 0 <= p_lo < p_hi")
    root, residual, iterations = _bracketed_root(f, p_lo, p_hi, ftol_rad_per_m, "delta_beta")
    return PressureSolution(pressure_bar=root, residual_rad_per_m=residual, iterations=iterations)


def pressure_acceptance(
    scheme: ConversionScheme,
    temperature_k: float,
    geom: FiberGeometry,
    gas: GasDispersion,
    length_m: float,
    p_opt_bar: float,
    scan_limits: tuple[float, float] | None = None,
    scan_steps: int = 2000,
    modes: dict[str, ModeLabel] | ModeLabel | None = None,
    variant: str = "zeisberger",
    resonance_exclusion_rel: float = DEFAULT_RESONANCE_EXCLUSION,
) -> AcceptanceWidth:
    """Full pressure width over which sinc^2(delta_beta L / 2) >= 1/2.

    Scans outward from p_opt_bar on both sides; a side that never drops
    below half maximum inside the scan limits is reported as unbounded
    (width_bar = inf, bounded = False).
    """
    if scan_limits is None:
        scan_limits = (0.0, 3.0 * p_opt_bar + 10.0)

    def factor(p: float) -> float:
        db = delta_beta(scheme, p, temperature_k, geom, gas, modes, variant, resonance_exclusion_rel)
        return phase_matching_factor(db, length_m)

    def crossing(toward: float) -> float | None:
        # first pressure where the factor falls below 1/2, refined by bisection
        prev_p = p_opt_bar
        prev_f = factor(p_opt_bar)
        if prev_f < 0.5:  # p_opt is not a valid maximum for this length
            return p_opt_bar
        for k in range(1, scan_steps + 1):
            p = p_opt_bar + (toward - p_opt_bar) * k / scan_steps
            fval = factor(p)
            if fval < 0.5:
                a, b = prev_p, p
                for _ in range(60):
                    mid = 0.5 * (a + b)
                    if factor(mid) >= 0.5:
                        a = mid
                    else:
                        b = mid
                    if abs(b - a) < 1e-6:
                        break
                return 0.5 * (a + b)
            prev_p, prev_f = p, fval
        return None

    lower = crossing(scan_limits[0])
    upper = crossing(scan_limits[1])
    bounded = lower is not None and upper is not None
    width = (upper - lower) if bounded else math.inf
    return AcceptanceWidth(lower_bar=lower, upper_bar=upper, width_bar=width, bounded=bounded)


def infer_wall_thickness(
    p_opt_measured_bar: float,
    scheme: ConversionScheme,
    temperature_k: float,
    geom: FiberGeometry,
    gas: GasDispersion,
    thickness_bracket_um: tuple[float, float],
    pressure_bracket: tuple[float, float] = (1.0, 200.0),
    thickness_tol_um: float = 1e-5,
    modes: dict[str, ModeLabel] | ModeLabel | None = None,
    variant: str = "zeisberger",
    resonance_exclusion_rel: float = DEFAULT_RESONANCE_EXCLUSION,
) -> ThicknessSolution:
    """Capillary wall thickness that reproduces a measured optimal pressure.

    The wall thickness of geom is treated as unknown and swept inside
    thickness_bracket_um by an outer bracketing root find on
    p_opt(t) - p_opt_measured.  Requires the phase-matching solve to
    succeed at both bracket ends; resonance-proximity or no-root
    failures there surface as NoSolutionError with diagnostics.
    """

    def p_of_t(t_um: float) -> float:
        geom_t = replace(geom, wall_thickness_um=t_um)
        sol = optimal_pressure(
            scheme,
            temperature_k,
            geom_t,
            gas,
            bracket=pressure_bracket,
            modes=modes,
            variant=variant,
            resonance_exclusion_rel=resonance_exclusion_rel,
        )
        return sol.pressure_bar

    t_lo, t_hi = thickness_bracket_um
    try:
        g_lo = p_of_t(t_lo) - p_opt_measured_bar
        g_hi = p_of_t(t_hi) - p_opt_measured_bar
    except Exception as exc:
        raise NoSolutionError(f"optimal_pressure failed at a thickness bracket endpoint: {exc}") from exc
    if g_lo * g_hi >= 0.0:
        raise NoSolutionError(
            f"measured pressure {p_opt_measured_bar:g} bar is not bracketed: "
            f"p_opt({t_lo:g} um) = {g_lo + p_opt_measured_bar:.3f} bar, "
            f"p_opt({t_hi:g} um) = {g_hi + p_opt_measured_bar:.3f} bar"
        )

    a, b, ga, gb = t_lo, t_hi, g_lo, g_hi
    while b - a > thickness_tol_um:
        mid = 0.5 * (a + b)
        if gb != ga:
            secant = b - gb * (b - a) / (gb - ga)
            if a < secant < b:
                mid = secant
        gm = p_of_t(mid) - p_opt_measured_bar
        if ga * gm < 0.0:
            b, gb = mid, gm
        else:
            a, ga = mid, gm
        if gm == 0.0:
            a = b = mid
            ga = gb = gm
    t_star = 0.5 * (a + b)
    residual = p_of_t(t_star) - p_opt_measured_bar
    return ThicknessSolution(thickness_um=t_star, pressure_residual_bar=residual)
