"""Conversion-efficiency model with attenuation corrections.

The undepleted-pump efficiency of the four-wave mixing process scales as

    eta = C * P_pump1 * P_pump2 * L^2 * sinc^2(delta_beta L / 2)

with the lumped coefficient C in % / (W^2 m^2) absorbing the nonlinear
susceptibility, mode area and driving-field factors.  Three loss
variants refine the L^2 envelope:

lossless
    eta = C P1 P2 L^2 sinc^2, no attenuation at all.
lumped-exponential
    the lossless value times exp(-(a1 + a2 + ap + as) L), all four
    linear attenuation coefficients applied to the full length.
amplitude-integral
    eta = C P1 P2 sinc^2 e^{-as L} [(1 - e^{-aL}) / a]^2 with
    a = (a1 + a2 + ap - as) / 2, i.e. the coherent growth integral of
    the signal amplitude under exponentially decaying drive; recovers
    L^2 as a -> 0.

Powers are multiplied by their incoupling fractions before use.
Efficiencies are returned as fractions; a result above 1 signals that
the undepleted-pump assumption broke down and raises a
ModelValidityWarning rather than being clamped.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

__all__ = [
    "LOSS_VARIANTS",
    "ModelValidityWarning",
    "UnboundedOptimumError",
    "LightField",
    "EfficiencyModel",
    "LengthOptimum",
    "LossBookkeeping",
    "ScalingProjection",
    "alpha_linear",
    "predicted_efficiency",
    "max_power_efficiency",
    "optimal_length",
    "loss_bookkeeping",
    "project_length_scaling",
]

LOSS_VARIANTS = ("lossless", "lumped-exponential", "amplitude-integral")

_LN10 = math.log(10.0)


class ModelValidityWarning(UserWarning):
    """Predicted efficiency left the regime where the model is valid."""


class UnboundedOptimumError(RuntimeError):
    """Efficiency has no interior maximum over fiber length."""


def alpha_linear(alpha_db_per_m: float) -> float:
    """Convert a power attenuation from dB/m to 1/m."""
    if alpha_db_per_m < 0:
        raise ValueError("attenuation must be non-negative")
    return alpha_db_per_m * _LN10 / 10.0


@dataclass(frozen=True)
class LightField:
    """One beam: vacuum wavelength, launched power, loss and incoupling."""

    wavelength_nm: float
    power_w: float
    attenuation_db_per_m: float = 0.0
    incoupling: float = 1.0

    def __post_init__(self) -> None:
        if self.wavelength_nm <= 0:
            raise ValueError("wavelength must be positive")
        if self.power_w < 0:
            raise ValueError("power must be non-negative")
        if self.attenuation_db_per_m < 0:
            raise ValueError("attenuation must be non-negative")
        if not 0.0 <= self.incoupling <= 1.0:
            raise ValueError("incoupling must lie in [0, 1]")

    @property
    def coupled_power_w(self) -> float:
        return self.power_w * self.incoupling


@dataclass(frozen=True)
class EfficiencyModel:
    """Lumped coefficient C in % / (W^2 m^2), loss variant, signal loss."""

    coefficient_pct_per_w2m2: float
    loss_variant: str = "lumped-exponential"
    signal_attenuation_db_per_m: float = 0.0

    def __post_init__(self) -> None:
        if self.coefficient_pct_per_w2m2 <= 0:
            raise ValueError("coefficient must be positive")
        if self.loss_variant not in LOSS_VARIANTS:
            raise ValueError(f"unknown loss variant {self.loss_variant!r}; expected one of {LOSS_VARIANTS}")
        if self.signal_attenuation_db_per_m < 0:
            raise ValueError("signal attenuation must be non-negative")


def _efficiency_core(
    model: EfficiencyModel,
    p1_w: float,
    p2_w: float,
    alpha1_db: float,
    alpha2_db: float,
    alpha_probe_db: float,
    length_m: float,
    sinc_factor: float,
) -> float:
    base = model.coefficient_pct_per_w2m2 / 100.0 * p1_w * p2_w * sinc_factor
    a1 = alpha_linear(alpha1_db)
    a2 = alpha_linear(alpha2_db)
    ap = alpha_linear(alpha_probe_db)
    a_s = alpha_linear(model.signal_attenuation_db_per_m)
    if model.loss_variant == "lossless":
        return base * length_m**2
    if model.loss_variant == "lumped-exponential":
        return base * length_m**2 * math.exp(-(a1 + a2 + ap + a_s) * length_m)
    # amplitude-integral
    a = 0.5 * (a1 + a2 + ap - a_s)
    if a == 0.0:
        growth = length_m
    else:
        growth = -math.expm1(-a * length_m) / a
    return base * math.exp(-a_s * length_m) * growth**2


def predicted_efficiency(
    model: EfficiencyModel,
    pump1: LightField,
    pump2: LightField,
    probe: LightField,
    length_m: float,
    sinc_factor: float = 1.0,
) -> float:
    """Conversion efficiency (fraction) for the configured loss variant.

    Warns with ModelValidityWarning when the result exceeds 1; the value
    is returned unclamped so the breakdown is visible to the caller.
    """
    if length_m <= 0:
        raise ValueError("length must be positive")
    if not 0.0 <= sinc_factor <= 1.0:
        raise ValueError("sinc_factor must lie in [0, 1]")
    eta = _efficiency_core(
        model,
        pump1.coupled_power_w,
        pump2.coupled_power_w,
        pump1.attenuation_db_per_m,
        pump2.attenuation_db_per_m,
        probe.attenuation_db_per_m,
        length_m,
        sinc_factor,
    )
    if eta > 1.0:
        warnings.warn(
            f"predicted efficiency {eta:.3g} exceeds 1; the undepleted-pump model is "
            "not valid at this operating point",
            ModelValidityWarning,
            stacklevel=2,
        )
    return eta


def max_power_efficiency(
    model: EfficiencyModel,
    p1_max_w: float,
    p2_max_w: float,
    length_m: float,
    pump1: LightField | None = None,
    pump2: LightField | None = None,
    probe: LightField | None = None,
    sinc_factor: float = 1.0,
) -> float:
    """Efficiency at full pump powers and fixed length.

    Optional fields supply attenuation and incoupling; absent fields are
    treated as loss-free with unit incoupling, so the result reduces to
    the per-W^2 coefficient at this length times P1 P2.
    """
    if length_m <= 0:
        raise ValueError("length must be positive")
    i1 = pump1.incoupling if pump1 is not None else 1.0
    i2 = pump2.incoupling if pump2 is not None else 1.0
    eta = _efficiency_core(
        model,
        p1_max_w * i1,
        p2_max_w * i2,
        pump1.attenuation_db_per_m if pump1 is not None else 0.0,
        pump2.attenuation_db_per_m if pump2 is not None else 0.0,
        probe.attenuation_db_per_m if probe is not None else 0.0,
        length_m,
        sinc_factor,
    )
    if eta > 1.0:
        warnings.warn(
            f"predicted efficiency {eta:.3g} exceeds 1; the undepleted-pump model is "
            "not valid at this operating point",
            ModelValidityWarning,
            stacklevel=2,
        )
    return eta


@dataclass(frozen=True)
class LengthOptimum:
    length_m: float
    efficiency: float


_INV_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def optimal_length(
    model: EfficiencyModel,
    pump1: LightField,
    pump2: LightField,
    probe: LightField,
    search_bounds_m: tuple[float, float] = (1e-3, 1e3),
    sinc_factor: float = 1.0,
) -> LengthOptimum:
    """Fiber length maximizing the predicted efficiency.

    Golden-section search in log-length over search_bounds_m.  Raises
    UnboundedOptimumError when the configured variant has no interior
    maximum (lossless always grows; lumped-exponential with zero total
    attenuation; amplitude-integral without signal loss or without
    drive loss saturates or grows monotonically).
    """
    a1, a2, ap = (f.attenuation_db_per_m for f in (pump1, pump2, probe))
    a_s = model.signal_attenuation_db_per_m
    if model.loss_variant == "lossless":
        raise UnboundedOptimumError("lossless efficiency grows quadratically without bound")
    if model.loss_variant == "lumped-exponential" and a1 + a2 + ap + a_s == 0.0:
        raise UnboundedOptimumError("zero total attenuation leaves the optimum length unbounded")
    if model.loss_variant == "amplitude-integral" and (a_s == 0.0 or a1 + a2 + ap == 0.0):
        raise UnboundedOptimumError(
            "amplitude-integral variant needs both signal and drive attenuation for an interior optimum"
        )

    def eta_of_log(u: float) -> float:
        return _efficiency_core(
            model, pump1.coupled_power_w, pump2.coupled_power_w, a1, a2, ap, math.exp(u), sinc_factor
        )

    lo, hi = (math.log(b) for b in search_bounds_m)
    x1 = hi - _INV_GOLDEN * (hi - lo)
    x2 = lo + _INV_GOLDEN * (hi - lo)
    f1, f2 = eta_of_log(x1), eta_of_log(x2)
    while hi - lo > 1e-12:
        if f1 < f2:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + _INV_GOLDEN * (hi - lo)
            f2 = eta_of_log(x2)
        else:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - _INV_GOLDEN * (hi - lo)
            f1 = eta_of_log(x1)
    u_best = 0.5 * (lo + hi)
    length = math.exp(u_best)
    return LengthOptimum(length_m=length, efficiency=eta_of_log(u_best))


@dataclass(frozen=True)
class LossBookkeeping:
    """Reconciliation of the length-squared coefficient with a measured
    per-W^2 efficiency at one length, under the lumped-exponential model."""

    total_attenuation_db_per_m: float
    signal_attenuation_db_per_m: float
    length_m: float
    survival_fraction: float


def loss_bookkeeping(
    coefficient_pct_per_w2m2: float,
    per_w2_pct: float,
    length_m: float,
    alpha_pump1_db: float,
    alpha_pump2_db: float,
    alpha_probe_db: float,
) -> LossBookkeeping:
    """Derive the total and signal attenuation implied by two fit results.

    Solves exp(-alpha_total_linear * L) = per_w2 / (C * L^2) for the total
    attenuation, then attributes to the signal whatever the three
    measured beam losses do not account for.
    """
    if length_m <= 0:
        raise ValueError("length must be positive")
    survival = per_w2_pct / (coefficient_pct_per_w2m2 * length_m**2)
    if survival <= 0:
        raise ValueError("per-W^2 efficiency and coefficient must be positive")
    total_linear = -math.log(survival) / length_m
    total_db = total_linear * 10.0 / _LN10
    return LossBookkeeping(
        total_attenuation_db_per_m=total_db,
        signal_attenuation_db_per_m=total_db - (alpha_pump1_db + alpha_pump2_db + alpha_probe_db),
        length_m=length_m,
        survival_fraction=survival,
    )


@dataclass(frozen=True)
class ScalingProjection:
    """Side-by-side of this model's length-scaling optimum and an external
    reference claim for the same scenario."""

    optimal_length_m: float
    efficiency_at_optimum: float
    attenuation_db_per_m: float
    incoupling: float
    pump1_power_w: float
    pump2_power_w: float
    reference_length_m: float | None
    reference_efficiency: float | None
    efficiency_at_reference_length: float | None
    exceeds_unity: bool
    note: str


def project_length_scaling(
    coefficient_pct_per_w2m2: float,
    pump1_power_w: float,
    pump2_power_w: float,
    attenuation_db_per_m: float,
    incoupling: float,
    reference_length_m: float | None = None,
    reference_efficiency: float | None = None,
) -> ScalingProjection:
    """Long-fiber scaling scenario under the lumped-exponential model.

    A single attenuation value applies to every one of the four beams, so
    the closed-form optimum is L = 2 / (4 alpha_linear).  Efficiencies are
    reported unclamped; exceeds_unity records whether the quadratic
    undepleted model left its validity range, which is the expected
    outcome of aggressive extrapolations.
    """
    model = EfficiencyModel(
        coefficient_pct_per_w2m2=coefficient_pct_per_w2m2,
        loss_variant="lumped-exponential",
        signal_attenuation_db_per_m=attenuation_db_per_m,
    )
    p1 = pump1_power_w * incoupling
    p2 = pump2_power_w * incoupling

    def eta(length_m: float) -> float:
        return _efficiency_core(
            model, p1, p2, attenuation_db_per_m, attenuation_db_per_m, attenuation_db_per_m, length_m, 1.0
        )

    total_linear = 4.0 * alpha_linear(attenuation_db_per_m)
    if total_linear == 0.0:
        raise UnboundedOptimumError("zero attenuation leaves the optimum length unbounded")
    l_opt = 2.0 / total_linear
    eta_opt = eta(l_opt)
    eta_ref = eta(reference_length_m) if reference_length_m is not None else None
    exceeds = eta_opt > 1.0 or (eta_ref is not None and eta_ref > 1.0)

    parts = [
        f"lumped-exponential optimum: L = 2 / (4 alpha) = {l_opt:.1f} m "
        f"with predicted efficiency {eta_opt:.3g}"
    ]
    if reference_length_m is not None:
        parts.append(f"model efficiency at the reference length {reference_length_m:g} m: {eta_ref:.3g}")
    if reference_length_m is not None or reference_efficiency is not None:
        ref_bits = []
        if reference_length_m is not None:
            ref_bits.append(f"optimum length about {reference_length_m:g} m")
        if reference_efficiency is not None:
            ref_bits.append(f"efficiency {reference_efficiency:g}")
        parts.append("reference claim for this scenario: " + ", ".join(ref_bits))
    if exceeds:
        parts.append(
            "efficiencies above 1 mean the undepleted-pump quadratic scaling has left its "
            "validity range before the optimum is reached; treat these numbers as upper bounds"
        )
    note = "; ".join(parts) + "."

    return ScalingProjection(
        optimal_length_m=l_opt,
        efficiency_at_optimum=eta_opt,
        attenuation_db_per_m=attenuation_db_per_m,
        incoupling=incoupling,
        pump1_power_w=pump1_power_w,
        pump2_power_w=pump2_power_w,
        reference_length_m=reference_length_m,
        reference_efficiency=reference_efficiency,
        efficiency_at_reference_length=eta_ref,
        exceeds_unity=exceeds,
        note=note,
    )
