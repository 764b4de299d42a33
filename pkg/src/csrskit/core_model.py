"""Refractive-index physics for gas-filled anti-resonant hollow-core fibers.

Two ingredients make up the effective index of a leaky core mode:

Gas dispersion
    The filling gas contributes n_gas(lambda, p, T) through a two-term
    Sellmeier-style refractivity for n^2 - 1 at reference conditions,
    scaled with relative density (ideal-gas by default, with an optional
    compressibility hook for non-ideal corrections):

        n^2 - 1 = rho_rel * sum_i B_i * l^2 / (l^2 - C_i),   l in um
        rho_rel = (p / p_ref) * (T_ref / T) / Z(p, T)

    Coefficients are calibration inputs supplied by configuration, not
    constants baked into this module.

Waveguide contribution
    Leaky modes of a hollow capillary of radius r follow the Marcatili
    approximation n = 1 - (1/2) (j_{l,m} lambda / 2 pi r)^2, where
    j_{l,m} is the m-th zero of the Bessel function J_l.  For a core
    surrounded by thin glass capillary walls, the Zeisberger tube-fiber
    model adds a wall-reflection correction proportional to
    lambda^3 / r^3 and cot(phi), phi = (2 pi t / lambda) sqrt(n_w^2 -
    n_gas^2), which diverges at the wall resonances

        lambda_m = (2 t / m) sqrt(n_w^2 - 1).

    The analytic model is invalid close to a resonance, so evaluation
    inside a configurable guard band around any lambda_m raises
    ResonanceProximityError instead of returning a garbage number.

Unit conventions used throughout the package: wavelengths in nm,
transverse geometry in um, pressure in bar, temperature in K.  All
functions here are pure and safe for concurrent use.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

from scipy.special import jn_zeros

__all__ = [
    "MAX_AZIMUTHAL_ORDER",
    "MAX_RADIAL_ORDER",
    "DispersionDomainError",
    "ResonanceProximityError",
    "ModeLabel",
    "LP01",
    "LP11",
    "FiberGeometry",
    "GasDispersion",
    "bessel_zero",
    "gas_index",
    "marcatili_mode_index",
    "resonance_wavelengths",
    "transmission_window",
    "effective_core_index",
]

#: Supported range of mode orders for bessel_zero / ModeLabel.
MAX_AZIMUTHAL_ORDER = 5
MAX_RADIAL_ORDER = 5

#: Default relative half-width of the guard band around wall resonances.
DEFAULT_RESONANCE_EXCLUSION = 0.03

INDEX_VARIANTS = ("zeisberger", "marcatili")


class DispersionDomainError(ValueError):
    """Wavelength is at or below a pole of the refractivity formula."""


class ResonanceProximityError(ValueError):
    """Wavelength falls inside the guard band around a wall resonance."""


def bessel_zero(l: int, m: int) -> float:
    """m-th positive zero of the Bessel function J_l.

    Supported range is 0 <= l <= 5, 1 <= m <= 5; values are accurate to
    well below 1e-10 absolute.
    """
    if not (0 <= l <= MAX_AZIMUTHAL_ORDER):
        raise ValueError(f"azimuthal order l={l} outside supported range 0..{MAX_AZIMUTHAL_ORDER}")
    if not (1 <= m <= MAX_RADIAL_ORDER):
        raise ValueError(f"radial order m={m} outside supported range 1..{MAX_RADIAL_ORDER}")
    return float(jn_zeros(l, m)[m - 1])


@dataclass(frozen=True)
class ModeLabel:
    """LP_{l,m} mode label: azimuthal order l >= 0, radial order m >= 1."""

    l: int
    m: int

    def __post_init__(self) -> None:
        bessel_zero(self.l, self.m)  # validates the supported range

    @property
    def bessel_zero(self) -> float:
        return bessel_zero(self.l, self.m)

    def __str__(self) -> str:
        return f"LP{self.l}{self.m}"


LP01 = ModeLabel(0, 1)
LP11 = ModeLabel(1, 1)


#: A wall-glass index model: a constant, a callable lambda_nm -> n, a list of
#: (B_i, C_i) Sellmeier pairs (l in um), or a table of (lambda_nm, n) rows.
WallIndexModel = float | Callable[[float], float] | Sequence


def _evaluate_wall_index(model: WallIndexModel, wavelength_nm: float) -> float:
    if isinstance(model, (int, float)):
        return float(model)
    if callable(model):
        return float(model(wavelength_nm))
    rows = list(model)
    if rows and len(rows[0]) == 2 and rows[0][0] > 10.0:
        # (lambda_nm, n) table, linear interpolation, clamped at the ends
        rows = sorted((float(a), float(b)) for a, b in rows)
        lams = [r[0] for r in rows]
        ns = [r[1] for r in rows]
        if wavelength_nm <= lams[0]:
            return ns[0]
        if wavelength_nm >= lams[-1]:
            return ns[-1]
        for (x0, y0), (x1, y1) in zip(rows, rows[1:]):
            if x0 <= wavelength_nm <= x1:
                w = (wavelength_nm - x0) / (x1 - x0)
                return y0 + w * (y1 - y0)
    # Sellmeier pairs for n^2 - 1
    l2 = (wavelength_nm * 1e-3) ** 2
    n2m1 = 0.0
    for b, c in rows:
        n2m1 += b * l2 / (l2 - c)
    return math.sqrt(1.0 + n2m1)


@dataclass(frozen=True)
class FiberGeometry:
    """Anti-resonant fiber cross-section.

    core_radius_um: hollow core radius r.
    capillary_inner_radius_um: inner radius of one cladding capillary.
    wall_thickness_um: capillary wall (glass membrane) thickness t.
    num_capillaries: number of capillaries surrounding the core.
    wall_index: glass index model for the capillary walls.
    """

    core_radius_um: float
    capillary_inner_radius_um: float
    wall_thickness_um: float
    num_capillaries: int
    wall_index: WallIndexModel = 1.444

    def __post_init__(self) -> None:
        if self.core_radius_um <= 0 or self.capillary_inner_radius_um <= 0 or self.wall_thickness_um <= 0:
            raise ValueError("all fiber geometry lengths must be strictly positive")
        if self.num_capillaries < 3:
            raise ValueError("num_capillaries must be >= 3")
        if not self.capillary_inner_radius_um < self.core_radius_um * self.num_capillaries:
            raise ValueError("capillary_inner_radius_um is implausibly large for this core")

    def wall_refractive_index(self, wavelength_nm: float) -> float:
        """Wall glass index at the given vacuum wavelength."""
        return _evaluate_wall_index(self.wall_index, wavelength_nm)


@dataclass(frozen=True)
class GasDispersion:
    """Pressure/temperature-scalable refractive index of the filling gas.

    refractivity_coefficients holds (B_i, C_i) pairs of the two-term
    formula for n^2 - 1 at (reference_pressure_bar, reference_temperature_k),
    with the wavelength in um and C_i in um^2.  compressibility, when
    given, maps (p_bar, T_k) to the compression factor Z; the default is
    the ideal gas, Z = 1.
    """

    species: str
    refractivity_coefficients: tuple[tuple[float, float], ...]
    reference_pressure_bar: float
    reference_temperature_k: float
    compressibility: Callable[[float, float], float] | None = None

    def __post_init__(self) -> None:
        object.__setattr__(
            self,
            "refractivity_coefficients",
            tuple((float(b), float(c)) for b, c in self.refractivity_coefficients),
        )
        if self.reference_pressure_bar <= 0 or self.reference_temperature_k <= 0:
            raise ValueError("reference conditions must be strictly positive")

    def reference_refractivity(self, wavelength_nm: float) -> float:
        """n^2 - 1 at reference conditions."""
        l2 = (wavelength_nm * 1e-3) ** 2
        total = 0.0
        for b, c in self.refractivity_coefficients:
            if l2 <= c:
                raise DispersionDomainError(
                    f"wavelength {wavelength_nm} nm at or below the {math.sqrt(c) * 1e3:.1f} nm pole"
                )
            total += b * l2 / (l2 - c)
        return total

    def relative_density(self, pressure_bar: float, temperature_k: float) -> float:
        z = 1.0 if self.compressibility is None else self.compressibility(pressure_bar, temperature_k)
        return (pressure_bar / self.reference_pressure_bar) * (self.reference_temperature_k / temperature_k) / z


def gas_index(gas: GasDispersion, wavelength_nm: float, pressure_bar: float, temperature_k: float) -> float:
    """Gas refractive index n(lambda, p, T); exactly 1 at p = 0."""
    if wavelength_nm <= 0:
        raise ValueError("wavelength must be positive")
    if pressure_bar < 0:
        raise ValueError("pressure must be non-negative")
    if temperature_k <= 0:
        raise ValueError("temperature must be positive")
    if pressure_bar == 0.0:
        # still surfaces pole errors for invalid wavelengths
        gas.reference_refractivity(wavelength_nm)
        return 1.0
    rho = gas.relative_density(pressure_bar, temperature_k)
    return math.sqrt(1.0 + rho * gas.reference_refractivity(wavelength_nm))


def marcatili_mode_index(wavelength_nm: float, radius_um: float, mode: ModeLabel) -> float:
    """Leaky-mode index of a hollow capillary, 1 - (1/2)(j lambda / 2 pi r)^2."""
    if wavelength_nm <= 0 or radius_um <= 0:
        raise ValueError("wavelength and radius must be positive")
    u = mode.bessel_zero * (wavelength_nm * 1e-9) / (2.0 * math.pi * radius_um * 1e-6)
    return 1.0 - 0.5 * u * u


def resonance_wavelengths(wall_thickness_um: float, wall_index: float, m_max: int) -> list[float]:
    """Wall resonance wavelengths lambda_m = (2t/m) sqrt(n_w^2 - 1), in nm.

    Returned in descending order, m = 1..m_max.
    """
    if wall_thickness_um <= 0:
        raise ValueError("wall thickness must be positive")
    if wall_index <= 1.0:
        raise ValueError("wall index must exceed 1")
    if m_max < 1:
        raise ValueError("m_max must be >= 1")
    lam1_nm = 2.0 * wall_thickness_um * 1e3 * math.sqrt(wall_index**2 - 1.0)
    return [lam1_nm / m for m in range(1, m_max + 1)]


def transmission_window(wavelength_nm: float, wall_thickness_um: float, wall_index: float) -> int:
    """Index of the transmission window containing the given wavelength.

    Window m spans (lambda_m, lambda_{m-1}); window 1 is everything above
    the first resonance.  A wavelength exactly on a resonance is assigned
    to the shorter-wavelength side; use the guard band in
    effective_core_index to reject such points outright.
    """
    lam1_nm = 2.0 * wall_thickness_um * 1e3 * math.sqrt(wall_index**2 - 1.0)
    return int(math.floor(lam1_nm / wavelength_nm)) + 1


def _check_resonance_proximity(
    wavelength_nm: float, wall_thickness_um: float, wall_index: float, exclusion_rel: float
) -> None:
    lam1_nm = 2.0 * wall_thickness_um * 1e3 * math.sqrt(wall_index**2 - 1.0)
    m_near = lam1_nm / wavelength_nm
    for m in {max(1, math.floor(m_near)), max(1, math.ceil(m_near))}:
        lam_m = lam1_nm / m
        if abs(wavelength_nm - lam_m) <= exclusion_rel * lam_m:
            raise ResonanceProximityError(
                f"{wavelength_nm:.2f} nm is within {exclusion_rel:.1%} of the m={m} "
                f"wall resonance at {lam_m:.2f} nm; the analytic index model is invalid there"
            )


def effective_core_index(
    geom: FiberGeometry,
    gas: GasDispersion,
    wavelength_nm: float,
    pressure_bar: float,
    temperature_k: float,
    mode: ModeLabel = LP01,
    variant: str = "zeisberger",
    resonance_exclusion_rel: float = DEFAULT_RESONANCE_EXCLUSION,
) -> float:
    """Effective index of a leaky core mode.

    variant "zeisberger" includes the thin-wall reflection correction of
    the Zeisberger tube-fiber model (hybrid-mode flavor),

        n_eff = n_gas - (j lambda / 2 pi r)^2 / (2 n_gas)
                - (j^2 lambda^3 / 8 pi^3 r^3) * (eps + 1) / (2 sqrt(eps - 1)) * cot(phi)

    with eps = (n_wall / n_gas)^2 and phi = (2 pi t / lambda)
    sqrt(n_wall^2 - n_gas^2).  variant "marcatili" drops the wall term.
    Callers that persist results should record the variant used.

    Raises ResonanceProximityError when the wavelength is within
    resonance_exclusion_rel of a wall resonance of the geometry.
    """
    if variant not in INDEX_VARIANTS:
        raise ValueError(f"unknown index variant {variant!r}; expected one of {INDEX_VARIANTS}")
    n_wall = geom.wall_refractive_index(wavelength_nm)
    _check_resonance_proximity(wavelength_nm, geom.wall_thickness_um, n_wall, resonance_exclusion_rel)

    n_g = gas_index(gas, wavelength_nm, pressure_bar, temperature_k)
    lam_m = wavelength_nm * 1e-9
    r_m = geom.core_radius_um * 1e-6
    u = mode.bessel_zero * lam_m / (2.0 * math.pi * r_m)
    n_eff = n_g - 0.5 * u * u / n_g
    if variant == "marcatili":
        return n_eff

    t_m = geom.wall_thickness_um * 1e-6
    eps = (n_wall / n_g) ** 2
    phi = (2.0 * math.pi * t_m / lam_m) * math.sqrt(n_wall**2 - n_g**2)
    polarization_factor = (eps + 1.0) / (2.0 * math.sqrt(eps - 1.0))
    wall_term = (mode.bessel_zero**2 * lam_m**3 / (8.0 * math.pi**3 * r_m**3)) * polarization_factor / math.tan(phi)
    return n_eff - wall_term
