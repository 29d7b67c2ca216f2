"""Structured thermal bath: spectrum, decay law, calibration, synthesis.

The bath seen by the qubit has a squared-Lorentzian power spectrum

    S(w) = (strength / ((w - detuning)^2 + width^2))^2

with all frequencies in angular units (rad/us) and the origin w = 0 pinned
to the qubit transition. PSD normalization convention: the variance of a
complex baseband record b(t) equals (1/2pi) * integral S(w) dw, so a Welch
estimate against cyclic frequency f (MHz) compares directly to S(2 pi f).

Time-domain synthesis follows the hardware chain: complex Gaussian white
noise through two identical one-pole low-pass filters with the pole at
``width`` (squared-Lorentzian shape), then a single-sideband shift by
exp(i * detuning * t). The discrete one-pole stage uses the exponential
discretization y[n] = a y[n-1] + (1-a) x[n], a = exp(-width dt), which is
unconditionally stable and matches the continuous pole to O(dt^2). The
first 10/width of every record is discarded to erase filter transients.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter

from .rng import RngStream, as_generator

TWO_PI = 2.0 * np.pi
WARMUP_WIDTHS = 10.0  # transient discard, in units of 1/width


@dataclass(frozen=True)
class BathSpec:
    """Squared-Lorentzian bath parameters, angular units (rad/us)."""

    strength: float
    width: float
    detuning: float = 0.0

    def __post_init__(self):
        if self.width <= 0.0:
            raise ValueError(f"bath width must be > 0, got {self.width}")
        if self.strength < 0.0:
            raise ValueError(f"bath strength must be >= 0, got {self.strength}")


@dataclass(frozen=True)
class BathRealization:
    """One sampled classical bath draw (complex baseband, carrier included)."""

    samples: np.ndarray
    dt: float
    detuning: float


def psd(bath: BathSpec, omega) -> "np.ndarray | float":
    """Bath power spectral density at angular frequency ``omega``."""
    return (bath.strength / ((np.asarray(omega, dtype=float) - bath.detuning) ** 2 + bath.width**2)) ** 2


def thermal_t1(n_photons: float, t1_spont: float) -> float:
    """Radiative decay time under N thermal photons: t1_spont / (2N + 1)."""
    if n_photons < 0.0:
        raise ValueError(f"thermal photon number must be >= 0, got {n_photons}")
    if t1_spont <= 0.0:
        raise ValueError(f"t1_spont must be > 0, got {t1_spont}")
    return t1_spont / (2.0 * n_photons + 1.0)


def calibrate_strength(t1_resonant: float, t1_spont: float, width: float) -> float:
    """Strength such that the on-resonance golden-rule rate matches.

    Fixes ``strength`` so that, for a bath centered on the qubit, the
    no-measurement rate picks up exactly 1/t1_resonant - 1/t1_spont, i.e.
    4 pi^2 strength^2 / width^4 equals that rate difference.
    """
    if not (0.0 < t1_resonant < t1_spont):
        raise ValueError(
            f"need 0 < t1_resonant < t1_spont, got {t1_resonant} vs {t1_spont}"
        )
    excess = 1.0 / t1_resonant - 1.0 / t1_spont
    return width**2 * np.sqrt(excess) / TWO_PI


def strength_for_photons(n_photons: float, t1_spont: float, width: float) -> float:
    """Strength reproducing the thermal decay law for N photons (0 allowed)."""
    if n_photons < 0.0:
        raise ValueError(f"thermal photon number must be >= 0, got {n_photons}")
    if n_photons == 0.0:
        return 0.0
    return calibrate_strength(thermal_t1(n_photons, t1_spont), t1_spont, width)


def max_dt(bath: BathSpec) -> float:
    """Coarsest sample interval resolving both the filter and the carrier."""
    return 0.1 / (bath.width + abs(bath.detuning))


def synthesize_block(
    bath: BathSpec,
    dt: float,
    n_samples: int,
    n_records: int,
    rng: "RngStream | np.random.Generator",
) -> np.ndarray:
    """Batch synthesis: (n_records, n_samples) complex array of bath draws.

    All records share the generator; use distinct streams per trajectory
    chunk for order-independent parallel generation.
    """
    if dt > max_dt(bath) * (1.0 + 1e-12):
        raise ValueError(
            f"dt = {dt} us too coarse for bath synthesis: need dt <= "
            f"0.1/(width + |detuning|) = {max_dt(bath):.6g} us"
        )
    gen = as_generator(rng)
    n_warm = int(np.ceil(WARMUP_WIDTHS / (bath.width * dt)))
    n_total = n_samples + n_warm
    # white level A^2/width^4 (the PSD peak) spread over the sample band
    sigma = bath.strength / (bath.width**2 * np.sqrt(dt))
    white = gen.standard_normal((n_records, 2 * n_total)).view(complex)
    white *= sigma / np.sqrt(2.0)
    a = np.exp(-bath.width * dt)
    for _ in range(2):
        white = lfilter([1.0 - a], [1.0, -a], white, axis=1)
    out = white[:, n_warm:]
    if bath.detuning != 0.0:
        t = np.arange(n_samples) * dt
        out = out * np.exp(1j * bath.detuning * t)
    return np.ascontiguousarray(out)


def synthesize(
    bath: BathSpec,
    dt: float,
    duration: float,
    rng: "RngStream | np.random.Generator",
) -> BathRealization:
    """One bath realization covering ``duration`` at sample interval ``dt``."""
    if duration <= 0.0:
        raise ValueError(f"duration must be > 0, got {duration}")
    n_samples = int(np.ceil(duration / dt))
    block = synthesize_block(bath, dt, n_samples, 1, rng)
    return BathRealization(samples=block[0], dt=dt, detuning=bath.detuning)
