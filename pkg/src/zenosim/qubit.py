"""Three-level state algebra and device-parameter formulas.

The system is a transmon-style circuit truncated to {g, e, f}: the qubit
lives on g-e and f is an auxiliary level visited only during the two-pulse
dephasing ("quasi-measurement") excursion. States are pure amplitude
triples in the rotating frame.

Conventions
-----------
A pi rotation on the e-f transition about the equatorial axis at angle
``theta`` maps

    amp_e -> -i * exp(+i theta) * amp_f
    amp_f -> -i * exp(-i theta) * amp_e

so two consecutive pi pulses with phases (theta1, theta2) multiply amp_e by
the pure phase ``-exp(i (theta2 - theta1))``, i.e. a geometric phase of
(theta2 - theta1) + pi. The overall pi offset from the double excursion is
kept, not gauged away; fixed-phase spectroscopy depends on it.

All frequencies passed to :func:`measurement_timescale` are cyclic MHz (as
configured at the I/O boundary); the formula converts to angular frequency
internally. Times are microseconds throughout.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .rng import RngStream, as_generator

NORM_TOL = 1e-12
LEAK_TOL = 1e-9
TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class PureState3:
    """Complex amplitudes over {g, e, f}; unit norm within 1e-12."""

    amp_g: complex
    amp_e: complex
    amp_f: complex = 0.0

    def norm(self) -> float:
        return float(
            np.sqrt(
                abs(self.amp_g) ** 2 + abs(self.amp_e) ** 2 + abs(self.amp_f) ** 2
            )
        )

    def p_e(self) -> float:
        return float(abs(self.amp_e) ** 2)

    def check_normalized(self) -> None:
        if abs(self.norm() - 1.0) > 1e-6:
            raise ValueError(f"state norm {self.norm()!r} is not 1")

    @staticmethod
    def ground() -> "PureState3":
        return PureState3(1.0, 0.0, 0.0)

    @staticmethod
    def excited() -> "PureState3":
        return PureState3(0.0, 1.0, 0.0)


@dataclass(frozen=True)
class DeviceParams:
    """Device working point (frequencies cyclic MHz, times microseconds)."""

    omega_ge: float = 5103.0
    chi: float = -1.38
    kappa: float = 6.81
    eta: float = 0.014
    nbar: float = 9.0
    t1_spont: float = 20.0

    def __post_init__(self):
        if not (0.0 < self.eta <= 1.0):
            raise ValueError(f"eta must be in (0, 1], got {self.eta}")
        if self.nbar < 0.0:
            raise ValueError(f"nbar must be >= 0, got {self.nbar}")
        if self.kappa <= 0.0:
            raise ValueError(f"kappa must be > 0, got {self.kappa}")
        if self.t1_spont <= 0.0:
            raise ValueError(f"t1_spont must be > 0, got {self.t1_spont}")


def _require_no_leakage(state: PureState3, op: str) -> None:
    if abs(state.amp_f) > LEAK_TOL:
        raise ValueError(
            f"{op} requires amp_f = 0 (qubit manifold), got |amp_f| = {abs(state.amp_f):.3e}"
        )


def rotate_ef_pi(state: PureState3, theta: float) -> PureState3:
    """Pi rotation on the e-f subspace about the equatorial axis at ``theta``.

    Acts as the identity on amp_g and preserves the norm.
    """
    new_e = -1j * np.exp(1j * theta) * state.amp_f
    new_f = -1j * np.exp(-1j * theta) * state.amp_e
    return PureState3(state.amp_g, complex(new_e), complex(new_f))


def quasi_measure(state: PureState3, theta1: float, theta2: float) -> PureState3:
    """Two-pulse e-f excursion: amp_e picks up the phase -exp(i(theta2-theta1)).

    Requires the state to start inside the qubit manifold (amp_f = 0); it
    returns there, with populations untouched.
    """
    _require_no_leakage(state, "quasi_measure")
    out = rotate_ef_pi(rotate_ef_pi(state, theta1), theta2)
    # the composition is exactly diagonal; clear the rounding residue on f
    return PureState3(out.amp_g, out.amp_e, 0.0)


def dephasing_measure(
    state: PureState3, rng: "RngStream | np.random.Generator"
) -> PureState3:
    """Quasi-measurement with a uniformly random second-pulse phase.

    Uniform phase on [0, 2pi) is the maximally dephasing choice: the
    ensemble-averaged g-e coherence vanishes while populations are exactly
    preserved.
    """
    gen = as_generator(rng)
    theta2 = gen.uniform(0.0, TWO_PI)
    return quasi_measure(state, 0.0, theta2)


def project_energy(
    state: PureState3, rng: "RngStream | np.random.Generator"
) -> tuple[str, PureState3]:
    """Born-rule projective energy measurement on the qubit manifold.

    Returns ("e", |e>) with probability |amp_e|^2, else ("g", |g>).
    """
    _require_no_leakage(state, "project_energy")
    gen = as_generator(rng)
    p_e = abs(state.amp_e) ** 2
    if gen.random() < p_e:
        return "e", PureState3.excited()
    return "g", PureState3.ground()


def measurement_timescale(params: DeviceParams) -> float:
    """Dispersive measurement timescale kappa / (16 nbar eta chi^2), in us.

    kappa and chi are stored as cyclic MHz and converted to angular
    frequency before evaluating.
    """
    if params.nbar == 0.0:
        raise ValueError("nbar = 0: no measurement drive, timescale undefined")
    kappa = TWO_PI * params.kappa
    chi = TWO_PI * params.chi
    return kappa / (16.0 * params.nbar * params.eta * chi**2)
