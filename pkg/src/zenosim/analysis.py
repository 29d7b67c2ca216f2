"""Fitting and spectral estimation for simulated records.

Contains the weighted exponential-rise T1 fit, fractional-change
propagation, Welch-style PSD of slow T1 fluctuations with a 1/f^alpha
exponent fit, and peak/FWHM metrics for spectroscopy lines.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.optimize import least_squares
from scipy.signal import find_peaks, peak_widths, welch

from .errors import FitError, LineNotFoundError


@dataclass
class FitResult:
    t1: float
    t1_sigma: float
    offset: float
    amplitude: float
    reduced_chisq: float


@dataclass
class SpectralEstimate:
    freqs: np.ndarray
    psd: np.ndarray
    alpha: float
    alpha_sigma: float


@dataclass
class LineMetrics:
    peak_count: int
    centers: np.ndarray
    fwhms: np.ndarray


class ValueWithError(NamedTuple):
    value: float
    sigma: float


def fit_exponential_rise(times, p_g, sigmas) -> FitResult:
    """Weighted fit of p_g(t) = c - a exp(-t / T1).

    Times are normalized internally by the window span, which makes the
    fitted T1 exactly scale-equivariant. Initialization: c from the mean of
    the last 3 points, T1 and a from a log-linear regression on (c - p_g).
    """
    t = np.asarray(times, dtype=float)
    y = np.asarray(p_g, dtype=float)
    sig = np.asarray(sigmas, dtype=float)
    if t.ndim != 1 or t.shape != y.shape or t.shape != sig.shape:
        raise ValueError("times, p_g and sigmas must be 1-d arrays of equal length")
    if t.size < 5:
        raise ValueError(f"need at least 5 points, got {t.size}")
    if not (np.all(np.isfinite(t)) and np.all(np.isfinite(y))):
        raise ValueError("non-finite input data")
    if np.ptp(y) < 1e-12:
        raise FitError("degenerate data: zero dynamic range in p_g")
    if np.any(sig < 0.0):
        raise ValueError("sigmas must be non-negative")
    sig = np.maximum(sig, 1e-6)  # floor to keep weights finite

    span = float(t[-1] - t[0])
    if span <= 0.0:
        raise ValueError("times must span a positive interval")
    ts = t / span

    c0 = float(np.mean(y[-3:]))
    resid = c0 - y
    mask = resid > max(1e-3, 0.02 * np.ptp(y))
    if mask.sum() >= 3:
        slope, intercept = np.polyfit(ts[mask], np.log(resid[mask]), 1)
        tau0 = -1.0 / slope if slope < 0 else 0.5
        a0 = float(np.exp(intercept))
    else:
        tau0, a0 = 0.5, float(np.ptp(y))
    tau0 = min(max(tau0, 1e-3), 1e3)

    def residuals(params):
        c, a, tau = params
        return (c - a * np.exp(-ts / tau) - y) / sig

    res = least_squares(residuals, x0=[c0, a0, tau0], method="lm", max_nfev=10000)
    if not res.success:
        raise FitError(
            "exponential fit did not converge",
            diagnostics={"status": res.status, "x": res.x.tolist(), "cost": res.cost},
        )
    c, a, tau = res.x
    if tau <= 0.0:
        raise FitError(
            "exponential fit converged to non-positive T1",
            diagnostics={"x": res.x.tolist()},
        )
    # tau is T1 in units of the window span, so tau > 1 means the data
    # cover less than one fitted T1
    if tau > 1.0:
        raise FitError(
            f"window spans only {1.0 / tau:.2f} of the fitted T1 "
            f"({tau * span:.3g} us); need at least one",
            diagnostics={"t1": tau * span},
        )

    jtj = res.jac.T @ res.jac
    try:
        cov = np.linalg.inv(jtj)
    except np.linalg.LinAlgError as exc:
        raise FitError(f"singular fit covariance: {exc}") from exc
    dof = max(t.size - 3, 1)
    red_chisq = float(2.0 * res.cost / dof)
    return FitResult(
        t1=float(tau * span),
        t1_sigma=float(np.sqrt(max(cov[2, 2], 0.0)) * span),
        offset=float(c),
        amplitude=float(a),
        reduced_chisq=red_chisq,
    )


def fractional_change(
    t1: float, t1_zero: float, sigma_t1: float = 0.0, sigma_t1_zero: float = 0.0
) -> ValueWithError:
    """(t1 - t1_zero)/t1_zero with first-order error propagation."""
    if t1_zero <= 0.0:
        raise ValueError(f"t1_zero must be > 0, got {t1_zero}")
    value = (t1 - t1_zero) / t1_zero
    sigma = np.hypot(sigma_t1 / t1_zero, t1 * sigma_t1_zero / t1_zero**2)
    return ValueWithError(float(value), float(sigma))


def fluctuation_psd(times, t1_values) -> SpectralEstimate:
    """Welch PSD of fractional T1 fluctuations and its 1/f^alpha exponent.

    Estimator settings (fixed so reproductions are deterministic): 8 Hann
    segments with 50% overlap; the alpha fit excludes the DC bin, the next
    2 bins (window bias) and the top octave (aliasing).
    """
    t = np.asarray(times, dtype=float)
    x = np.asarray(t1_values, dtype=float)
    if t.shape != x.shape or t.ndim != 1:
        raise ValueError("times and t1 values must be 1-d arrays of equal length")
    if t.size < 64:
        raise ValueError(f"need at least 64 samples, got {t.size}")
    steps = np.diff(t)
    if np.any(steps <= 0.0):
        raise ValueError("times must be strictly increasing")
    jitter = np.max(np.abs(steps - np.median(steps))) / np.median(steps)
    if jitter > 0.10:
        raise ValueError(f"sampling jitter {jitter:.1%} exceeds 10%; resample first")
    if jitter > 0.0:
        uniform_t = np.linspace(t[0], t[-1], t.size)
        x = np.interp(uniform_t, t, x)
        t = uniform_t
    dt = float(t[1] - t[0])

    mean = float(np.mean(x))
    if mean == 0.0:
        raise ValueError("mean T1 is zero; fractional fluctuations undefined")
    frac = (x - mean) / mean

    nperseg = max(int(t.size / 4.5), 8)  # 8 segments at 50% overlap
    freqs, pxx = welch(
        frac,
        fs=1.0 / dt,
        window="hann",
        nperseg=nperseg,
        noverlap=nperseg // 2,
        detrend="constant",
    )

    # fit band: drop DC + 2 lowest bins and the top octave
    band = np.arange(freqs.size) >= 3
    band &= freqs <= freqs[-1] / 2.0
    band &= pxx > 0.0
    if band.sum() < 4:
        raise ValueError("too few PSD bins in the fit band")
    logf = np.log10(freqs[band])
    logp = np.log10(pxx[band])
    design = np.column_stack([logf, np.ones_like(logf)])
    coef, residsum, _, _ = np.linalg.lstsq(design, logp, rcond=None)
    alpha = -coef[0]
    dof = max(band.sum() - 2, 1)
    resid_var = (
        float(residsum[0]) / dof
        if residsum.size
        else float(np.sum((logp - design @ coef) ** 2)) / dof
    )
    cov = resid_var * np.linalg.inv(design.T @ design)
    return SpectralEstimate(
        freqs=freqs,
        psd=pxx,
        alpha=float(alpha),
        alpha_sigma=float(np.sqrt(max(cov[0, 0], 0.0))),
    )


def line_metrics(detunings, signal) -> LineMetrics:
    """Peak count, centers and FWHMs of a spectroscopy trace.

    Peaks are found on a lightly smoothed copy with a prominence threshold
    of 5x the robust noise level; FWHM is measured by linear interpolation
    at half prominence.
    """
    x = np.asarray(detunings, dtype=float)
    y = np.asarray(signal, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("detunings and signal must be 1-d arrays of equal length")
    if x.size < 20:
        raise ValueError(f"need at least 20 frequency points, got {x.size}")
    step = np.diff(x)
    if np.any(step <= 0.0):
        raise ValueError("detunings must be strictly increasing")
    dx = float(np.median(step))

    smooth = np.convolve(y, np.full(3, 1.0 / 3.0), mode="same")
    smooth[0], smooth[-1] = y[0], y[-1]
    # robust noise from second differences: std(d2) = sqrt(6) sigma for white noise
    d2 = np.diff(y, n=2)
    noise = 1.4826 * float(np.median(np.abs(d2 - np.median(d2)))) / np.sqrt(6.0)
    threshold = 5.0 * max(noise, 1e-12)

    peaks, _ = find_peaks(smooth, prominence=threshold)
    if peaks.size == 0:
        raise LineNotFoundError("no line found above the detection threshold")
    widths, _, _, _ = peak_widths(smooth, peaks, rel_height=0.5)
    return LineMetrics(
        peak_count=int(peaks.size),
        centers=x[peaks],
        fwhms=widths * dx,
    )
