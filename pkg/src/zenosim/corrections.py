"""Systematic-correction pipeline for measured T1 sweeps.

Repeated readout and dephasing pulses distort the raw fitted T1 values in
ways unrelated to the bath physics. The pipeline isolates the
measurement-bath effect:

  projective readout:  wing-rate estimate -> rate subtraction ->
                       Stark realignment -> fractional change
  dephasing pulses:    duty-cycle rescaling -> fractional change

Wing rows (|detuning| above ``wing_threshold_mhz``) sit far enough from
the bath that any excess rate over the no-measurement baseline is a
measurement side effect; the mean excess is subtracted everywhere. The
Stark realignment shifts the nominal detuning axis before the ratiometric
comparison; the baseline is interpolated linearly between its rows. The
duty-cycle law t1_measured = t1 / (1 - pulse_tm/period_tm) can be replaced
by an empirical per-rate factor override.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .analysis import ValueWithError, fractional_change


@dataclass
class CorrectionSpec:
    wing_threshold_mhz: float = 4.0
    # per-rate (cyclic MHz) overrides; empty means "use the analytic path"
    nonqnd_rate_per_setting: dict[float, float] = field(default_factory=dict)
    duty_factor_per_setting: dict[float, float] = field(default_factory=dict)
    stark_shift_per_setting: dict[float, float] = field(default_factory=dict)

    def __post_init__(self):
        if self.wing_threshold_mhz <= 0.0:
            raise ValueError("wing_threshold_mhz must be > 0")
        for rate, factor in self.duty_factor_per_setting.items():
            if not (0.0 < factor <= 1.0):
                raise ValueError(f"duty factor for rate {rate} must be in (0, 1]")


def estimate_wing_rate(rows, wing_threshold_mhz: float = 4.0) -> ValueWithError:
    """Mean excess rate 1/t1 - 1/t1_zero over far-detuned rows.

    ``rows`` must expose detuning_mhz, t1, t1_zero and (optionally nonzero)
    sigma fields for a single measurement-rate setting. Rows are combined
    with inverse-variance weights when all uncertainties are available,
    plain mean otherwise.
    """
    wings = [r for r in rows if abs(r.detuning_mhz) > wing_threshold_mhz]
    if len(wings) < 2:
        raise ValueError(
            f"need >= 2 wing rows beyond |detuning| = {wing_threshold_mhz} MHz, "
            f"got {len(wings)}"
        )
    diffs = np.array([1.0 / r.t1 - 1.0 / r.t1_zero for r in wings])
    sigmas = np.array([_rate_diff_sigma(r) for r in wings])
    if np.all(sigmas > 0.0):
        weights = 1.0 / sigmas**2
        mean = float(np.sum(weights * diffs) / np.sum(weights))
        sigma = float(1.0 / np.sqrt(np.sum(weights)))
    else:
        mean = float(np.mean(diffs))
        sigma = float(np.std(diffs, ddof=1) / np.sqrt(len(wings)))
    return ValueWithError(mean, sigma)


def _rate_diff_sigma(row) -> float:
    s_t1 = getattr(row, "sigma", 0.0) or 0.0
    s_zero = getattr(row, "sigma_zero", 0.0) or 0.0
    return float(np.hypot(s_t1 / row.t1**2, s_zero / row.t1_zero**2))


def subtract_nonqnd(t1: float, wing_rate: float) -> float:
    """Remove an additive decay rate: 1 / (1/t1 - wing_rate)."""
    if t1 <= 0.0:
        raise ValueError(f"t1 must be > 0, got {t1}")
    remaining = 1.0 / t1 - wing_rate
    if remaining <= 0.0:
        raise ValueError(
            f"correction rate {wing_rate} exceeds total rate {1.0 / t1}; "
            "unphysical negative remainder"
        )
    return 1.0 / remaining


def duty_cycle_correct(t1_meas: float, pulse_tm: float, period_tm: float) -> float:
    """Undo the dead-time inflation: t1_meas * (1 - pulse_tm / period_tm)."""
    if pulse_tm < 0.0:
        raise ValueError(f"pulse_tm must be >= 0, got {pulse_tm}")
    if pulse_tm >= period_tm:
        raise ValueError(
            f"pulse_tm = {pulse_tm} must be shorter than period_tm = {period_tm}"
        )
    return t1_meas * (1.0 - pulse_tm / period_tm)


def stark_realign(detunings_mhz, shift_mhz: float) -> np.ndarray:
    """Shift nominal detunings to their effective values (cyclic MHz)."""
    return np.asarray(detunings_mhz, dtype=float) + shift_mhz


@dataclass
class CorrectedRow:
    detuning_mhz: float          # effective detuning after realignment
    t1: float                    # corrected T1
    t1_sigma: float
    t1_zero: float               # baseline interpolated at the effective detuning
    t1_zero_sigma: float
    dt1_frac: float
    dt1_sigma: float


def correct_sweep(
    rows,
    baseline_detunings_mhz,
    baseline_t1,
    baseline_sigma,
    kind: str,
    *,
    rate_mhz: float,
    pulse_tm: float = 0.0,
    period_tm: float | None = None,
    spec: CorrectionSpec | None = None,
) -> list[CorrectedRow]:
    """Run the kind-appropriate pipeline on one measured sweep.

    ``rows`` carry raw fitted values (detuning_mhz, t1, sigma); the
    baseline arrays describe the no-measurement sweep on its own detuning
    grid. Returns corrected rows with the fractional change evaluated
    against the (possibly realigned) interpolated baseline.
    """
    spec = spec or CorrectionSpec()
    base_d = np.asarray(baseline_detunings_mhz, dtype=float)
    base_t1 = np.asarray(baseline_t1, dtype=float)
    base_sig = np.asarray(baseline_sigma, dtype=float)
    if not np.all(np.diff(base_d) > 0.0):
        order = np.argsort(base_d)
        base_d, base_t1, base_sig = base_d[order], base_t1[order], base_sig[order]

    if kind == "projective":
        wing = estimate_wing_rate(rows, spec.wing_threshold_mhz)
        override = spec.nonqnd_rate_per_setting.get(rate_mhz)
        wing_rate = override if override is not None else wing.value
        wing_sigma = 0.0 if override is not None else wing.sigma
        shift = spec.stark_shift_per_setting.get(rate_mhz, 0.0)
        corrected = []
        for r in rows:
            t1_corr = subtract_nonqnd(r.t1, wing_rate)
            # propagate both the fit and the wing-estimate uncertainty
            s_rate = np.hypot((r.sigma or 0.0) / r.t1**2, wing_sigma)
            t1_sigma = s_rate * t1_corr**2
            corrected.append((r.detuning_mhz + shift, t1_corr, float(t1_sigma)))
    elif kind in ("quasi_random_phase", "quasi_fixed_phase"):
        factor = spec.duty_factor_per_setting.get(rate_mhz)
        if factor is None:
            if period_tm is None:
                raise ValueError("period_tm required for the duty-cycle formula")
            factor = 1.0 - pulse_tm / period_tm
            if not (0.0 < factor <= 1.0):
                raise ValueError(f"invalid duty factor {factor}")
        corrected = [
            (r.detuning_mhz, r.t1 * factor, (r.sigma or 0.0) * factor) for r in rows
        ]
    elif kind == "none":
        corrected = [(r.detuning_mhz, r.t1, r.sigma or 0.0) for r in rows]
    else:
        raise ValueError(f"unknown measurement kind {kind!r}")

    out = []
    for d_eff, t1_corr, t1_sigma in corrected:
        t1_zero = float(np.interp(d_eff, base_d, base_t1))
        zero_sigma = float(np.interp(d_eff, base_d, base_sig))
        frac = fractional_change(t1_corr, t1_zero, t1_sigma, zero_sigma)
        out.append(
            CorrectedRow(
                detuning_mhz=float(d_eff),
                t1=float(t1_corr),
                t1_sigma=float(t1_sigma),
                t1_zero=t1_zero,
                t1_zero_sigma=zero_sigma,
                dt1_frac=frac.value,
                dt1_sigma=frac.sigma,
            )
        )
    return out
