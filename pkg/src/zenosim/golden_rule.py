"""Analytic decay-rate engine: filter-function overlap with the bath PSD.

Under periodic instantaneous measurements at interval t_m, the qubit
transition acquires the effective spectral profile

    filter_function(w, t_m) = t_m * sinc^2(w t_m / 2)

(angular units; total weight 2 pi independent of t_m). The predicted decay
rate is the overlap

    rate = 1/t1_spont + 2 pi * integral F(w, t_m) S(w) dw

with the bath PSD S centered at the qubit-bath detuning. In the
no-measurement limit the filter contracts to 2 pi * delta(w), giving the
closed form 1/t1_spont + 4 pi^2 S(0); that form is used directly instead
of a numerically hostile huge-t_m quadrature.

Frame convention: w = 0 at the (possibly Stark-realigned) qubit transition,
everywhere in this package.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad

from .bath import BathSpec, psd
from .errors import NumericsError

TWO_PI = 2.0 * np.pi
REL_TOL = 1e-6


@dataclass(frozen=True)
class FilterSpec:
    """Measurement filter: finite interval t_m or the no-measurement limit."""

    t_m: float | None = None

    def __post_init__(self):
        if self.t_m is not None and self.t_m <= 0.0:
            raise ValueError(f"t_m must be > 0 in finite mode, got {self.t_m}")

    @property
    def finite(self) -> bool:
        return self.t_m is not None

    @staticmethod
    def from_rate_mhz(rate_mhz: float | None) -> "FilterSpec":
        """Cyclic measurement rate in MHz; None or 0 means no measurement."""
        if rate_mhz is None or rate_mhz == 0.0:
            return FilterSpec(None)
        if rate_mhz < 0.0:
            raise ValueError(f"measurement rate must be >= 0, got {rate_mhz}")
        return FilterSpec(1.0 / rate_mhz)


@dataclass
class SweepRow:
    detuning_mhz: float
    rate_mhz: float
    t1: float
    t1_zero: float
    dt1_frac: float
    sigma: float = 0.0
    status: str = "ok"


@dataclass
class SweepResult:
    rows: list[SweepRow] = field(default_factory=list)


def filter_function(omega, t_m: float) -> "np.ndarray | float":
    """Spectral profile t_m * sinc^2(omega t_m / 2); equals t_m at omega = 0."""
    if t_m <= 0.0:
        raise ValueError(f"t_m must be > 0, got {t_m}")
    # np.sinc(x) = sin(pi x)/(pi x): evaluate at omega t_m / (2 pi)
    s = np.sinc(np.asarray(omega, dtype=float) * t_m / TWO_PI)
    return t_m * s * s


def no_measurement_rate(bath: BathSpec, t1_spont: float) -> float:
    """Decay rate without added measurements: 1/t1_spont + 4 pi^2 S(0)."""
    if t1_spont <= 0.0:
        raise ValueError(f"t1_spont must be > 0, got {t1_spont}")
    return 1.0 / t1_spont + 4.0 * np.pi**2 * float(psd(bath, 0.0))


def decay_rate(bath: BathSpec, filt: FilterSpec, t1_spont: float) -> float:
    """Golden-rule rate 1/t1_spont + 2 pi * integral F(w) S(w) dw.

    Adaptive quadrature over a window covering the bath peak and the filter
    main lobes, plus an analytic bound on the sinc^2 tails; raises
    NumericsError if the combined relative error estimate exceeds 1e-6.
    """
    if t1_spont <= 0.0:
        raise ValueError(f"t1_spont must be > 0, got {t1_spont}")
    if not filt.finite:
        return no_measurement_rate(bath, t1_spont)
    if bath.strength == 0.0:
        return 1.0 / t1_spont

    t_m = float(filt.t_m)
    half_width = max(20.0 * bath.width, 40.0 * np.pi / t_m)
    lo = min(-half_width, bath.detuning - half_width)
    hi = max(half_width, bath.detuning + half_width)

    # break the interval at the bath peak and the first filter zeros
    zeros = TWO_PI / t_m * np.arange(1, 5)
    pts = sorted(
        p for p in {bath.detuning, 0.0, *zeros, *(-zeros)} if lo < p < hi
    )
    integrand = lambda w: float(filter_function(w, t_m)) * float(psd(bath, w))
    value, abserr = quad(
        integrand, lo, hi, points=pts, limit=500, epsabs=0.0, epsrel=1e-9
    )

    # tails: F <= 4/(t_m w^2) and S is monotone beyond the peak, so each tail
    # is bounded by 4 S(edge) / (t_m |edge|)
    tail = 4.0 * float(psd(bath, hi)) / (t_m * abs(hi)) + 4.0 * float(
        psd(bath, lo)
    ) / (t_m * abs(lo))

    rate = 1.0 / t1_spont + TWO_PI * value
    err = TWO_PI * (abserr + tail)
    if err > REL_TOL * rate:
        raise NumericsError(
            f"overlap quadrature not converged: error estimate {err:.3e} "
            f"on rate {rate:.6e} (relative {err / rate:.2e})"
        )
    return rate


def sweep(
    bath_template: BathSpec,
    detunings_mhz,
    rates_mhz,
    t1_spont: float,
) -> SweepResult:
    """T1 and fractional change vs detuning for each measurement rate.

    Detunings and rates are cyclic MHz (rate 0 or None = the
    no-measurement sentinel). Quadrature failures are flagged per row
    without aborting the sweep.
    """
    result = SweepResult()
    for rate_mhz in rates_mhz:
        filt = FilterSpec.from_rate_mhz(rate_mhz)
        for d_mhz in detunings_mhz:
            bath = BathSpec(
                strength=bath_template.strength,
                width=bath_template.width,
                detuning=TWO_PI * d_mhz,
            )
            t1_zero = 1.0 / no_measurement_rate(bath, t1_spont)
            try:
                t1 = 1.0 / decay_rate(bath, filt, t1_spont)
                row = SweepRow(
                    detuning_mhz=float(d_mhz),
                    rate_mhz=float(rate_mhz or 0.0),
                    t1=t1,
                    t1_zero=t1_zero,
                    dt1_frac=(t1 - t1_zero) / t1_zero,
                )
            except NumericsError as exc:
                row = SweepRow(
                    detuning_mhz=float(d_mhz),
                    rate_mhz=float(rate_mhz or 0.0),
                    t1=float("nan"),
                    t1_zero=t1_zero,
                    dt1_frac=float("nan"),
                    status=f"quadrature_failed: {exc}",
                )
            result.rows.append(row)
    return result
