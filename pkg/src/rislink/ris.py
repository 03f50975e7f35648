"""RIS surface model: phase state, amplitude response and cascade evaluation.

Phases live in the half-open interval (0, 2*pi].  The cascade through the
surface for actuator ``k`` is ``g_k^H diag(beta * exp(1j*theta)) H``, i.e. the
RIS->actuator row enters conjugated.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from rislink.channel import ChannelRealization
from rislink.numerics import ParameterError

TWO_PI = 2.0 * np.pi


class DegenerateChannelError(ParameterError):
    """A channel coefficient is zero, so its phase is undefined."""


class AmplitudeMode(str, enum.Enum):
    IDEAL = "ideal"
    PRACTICAL = "practical"


@dataclass(frozen=True)
class AmplitudeModel:
    """Phase-dependent reflection amplitude of a practical RIS element.

    ``phi`` and ``alpha`` are circuit constants; the defaults are typical
    fitted values for a varactor-tuned element.
    """

    beta_min: float = 0.8
    phi: float = 0.43 * np.pi
    alpha: float = 1.6
    mode: AmplitudeMode = AmplitudeMode.IDEAL

    def __post_init__(self):
        object.__setattr__(self, "mode", AmplitudeMode(self.mode))
        if not 0.0 <= self.beta_min <= 1.0:
            raise ParameterError(f"beta_min must lie in [0, 1], got {self.beta_min}")
        if self.mode is AmplitudeMode.PRACTICAL and not self.alpha > 0:
            raise ParameterError(f"alpha must be positive, got {self.alpha}")


IDEAL_AMPLITUDE = AmplitudeModel()


def amplitude(model: AmplitudeModel, theta):
    """Reflection amplitude for phase(s) ``theta``; identically one when ideal."""
    theta = np.asarray(theta, dtype=float)
    if model.mode is AmplitudeMode.IDEAL:
        return np.ones_like(theta) if theta.ndim else 1.0
    if not model.alpha > 0:
        raise ParameterError(f"alpha must be positive, got {model.alpha}")
    bracket = (np.sin(theta - model.phi) + 1.0) / 2.0
    out = (1.0 - model.beta_min) * bracket**model.alpha + model.beta_min
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class QuantizationSpec:
    """Uniform phase grid ``{2*pi*k / 2**bits : k = 1..2**bits}``; ``bits=0`` is continuous."""

    bits: int = 0

    def __post_init__(self):
        if int(self.bits) != self.bits or self.bits < 0:
            raise ParameterError(f"bits must be a non-negative integer, got {self.bits}")

    @property
    def continuous(self) -> bool:
        return self.bits == 0

    @property
    def levels(self) -> np.ndarray:
        if self.bits == 0:
            raise ParameterError("a continuous phase spec has no level set")
        n = 2**self.bits
        return TWO_PI * np.arange(1, n + 1) / n


CONTINUOUS = QuantizationSpec(0)


def wrap_phase(theta):
    """Map angles into (0, 2*pi]."""
    theta = np.asarray(theta, dtype=float)
    out = TWO_PI - np.mod(-theta, TWO_PI)
    # mod can round up to exactly 2*pi for tiny positive input.
    out = np.where(out <= 0.0, TWO_PI, out)
    return out if out.ndim else float(out)


def circular_distance(a, b):
    d = np.mod(np.asarray(a) - np.asarray(b) + np.pi, TWO_PI) - np.pi
    return np.abs(d)


def quantize_phases(phases, spec: QuantizationSpec):
    """Snap each phase to the nearest grid level (circular distance).

    Exact ties go to the numerically smaller level.  ``bits=0`` returns the
    wrapped input unchanged.
    """
    phases = np.asarray(phases, dtype=float)
    if spec.continuous:
        return wrap_phase(phases)
    step = TWO_PI / 2**spec.bits
    # Round half down on the uniform grid; the small slack sends float near-ties down too.
    k = np.ceil(wrap_phase(phases) / step - 0.5 - 1e-9)
    levels = spec.levels
    return levels[(k.astype(np.int64) - 1) % levels.size]


def optimal_phases(g, h, reference_phase=0.0):
    """Phases that co-phase every cascade summand.

    With ``theta_n = arg g_n - arg h_n + reference_phase`` each term
    ``conj(g_n) exp(1j*theta_n) h_n`` points along ``reference_phase`` and the
    cascade magnitude reaches ``sum |g_n||h_n|``.  Written with the phases of
    the entries of ``g^H`` (``xi_n = -arg g_n``) and ``h`` (``zeta_n``) this is
    the familiar ``-(xi_n + zeta_n)`` rule.  Leading axes broadcast, so
    ``reference_phase`` may be one angle per trial (shape ``(..., 1)``), e.g.
    the phase of a direct path to align with.
    """
    g = np.asarray(g, dtype=complex)
    h = np.asarray(h, dtype=complex)
    if g.shape[-1] != h.shape[-1]:
        raise ParameterError(f"length mismatch: g has {g.shape[-1]}, h has {h.shape[-1]}")
    if np.any(g == 0) or np.any(h == 0):
        raise DegenerateChannelError("zero channel coefficient has no phase")
    return wrap_phase(np.angle(g) - np.angle(h) + reference_phase)


@dataclass(frozen=True)
class RisState:
    phases: np.ndarray = field(repr=False)
    amplitude_model: AmplitudeModel = IDEAL_AMPLITUDE
    quantization: QuantizationSpec = CONTINUOUS

    def __post_init__(self):
        phases = np.array(self.phases, dtype=float)
        if phases.ndim != 1 or phases.size == 0:
            raise ParameterError("phases must be a non-empty 1-D sequence")
        if np.any(phases <= 0) or np.any(phases > TWO_PI + 1e-12):
            raise ParameterError("phases must lie in (0, 2*pi]")
        if not self.quantization.continuous:
            off = circular_distance(phases[:, None], self.quantization.levels).min(axis=1)
            if np.any(off > 1e-9):
                raise ParameterError("phases are not on the quantization grid")
        phases.setflags(write=False)
        object.__setattr__(self, "phases", phases)

    @classmethod
    def from_phases(cls, phases, amplitude_model=IDEAL_AMPLITUDE, quantization=CONTINUOUS):
        """Wrap and quantize arbitrary angles into a valid state."""
        return cls(quantize_phases(phases, quantization), amplitude_model, quantization)

    @property
    def n_elements(self) -> int:
        return self.phases.size

    def amplitudes(self) -> np.ndarray:
        return np.broadcast_to(amplitude(self.amplitude_model, self.phases), self.phases.shape)

    def coefficients(self) -> np.ndarray:
        """Diagonal of Theta: ``beta_n(theta_n) exp(1j*theta_n)``."""
        return self.amplitudes() * np.exp(1j * self.phases)


def reflection_coefficients(phases, model: AmplitudeModel = IDEAL_AMPLITUDE):
    """Vectorised ``beta(theta) exp(1j*theta)`` for arrays of any shape."""
    phases = np.asarray(phases, dtype=float)
    return amplitude(model, phases) * np.exp(1j * phases)


def cascade_gain(g, coefficients, h):
    """``sum_n conj(g_n) c_n h_n`` over the last axis; broadcasts leading axes."""
    return np.sum(np.conj(g) * coefficients * h, axis=-1)


def cascade_response(realization: ChannelRealization, ris: RisState, actuator_index=0) -> np.ndarray:
    """Row vector ``g_k^H Theta H`` of length M (one entry per BS antenna)."""
    n = realization.n_elements
    if ris.n_elements != n:
        raise ParameterError(f"RIS has {ris.n_elements} elements, channel has {n}")
    if not 0 <= actuator_index < realization.n_actuators:
        raise ParameterError(f"actuator index {actuator_index} out of range")
    g = realization.ris_to_actuator[actuator_index]
    return (np.conj(g) * ris.coefficients()) @ realization.bs_to_ris


def effective_channel(realization: ChannelRealization, ris: RisState, actuator_index=0, include_direct=True):
    """Direct plus cascade row for one actuator, length M."""
    row = cascade_response(realization, ris, actuator_index)
    if include_direct:
        row = row + realization.direct[actuator_index]
    return row


def effective_channels(realization: ChannelRealization, ris: RisState, include_direct=True) -> np.ndarray:
    """Stack of all actuators' effective rows, shape (K, M)."""
    n = realization.n_elements
    if ris.n_elements != n:
        raise ParameterError(f"RIS has {ris.n_elements} elements, channel has {n}")
    rows = (np.conj(realization.ris_to_actuator) * ris.coefficients()) @ realization.bs_to_ris
    if include_direct:
        rows = rows + realization.direct
    return rows


def received_signal_power(realization: ChannelRealization, ris: RisState, actuator_index=0, include_direct=True) -> float:
    """Received power gain ``|f + g^H Theta h|^2``.

    For a multi-antenna BS this is the squared norm of the effective row,
    i.e. the gain seen under matched filtering; multiuser evaluation goes
    through :func:`effective_channels` and :mod:`rislink.rate`.
    """
    row = effective_channel(realization, ris, actuator_index, include_direct)
    return float(np.vdot(row, row).real)
