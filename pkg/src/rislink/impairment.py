"""Imperfect-CSI phase errors and the normalised cascade-gain experiment."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from rislink.channel import LinkBudget, NodeLayout, PathLossModel, sample_realization
from rislink.numerics import ParameterError, RngStream
from rislink.ris import (
    CONTINUOUS,
    IDEAL_AMPLITUDE,
    QuantizationSpec,
    RisState,
    cascade_gain,
    optimal_phases,
    quantize_phases,
)


class Placement(str, enum.Enum):
    CASCADED = "cascaded"
    G_ONLY = "g_only"
    H_ONLY = "h_only"


# Phase of the optimum is -(xi + zeta): an error on the g^H or h phase estimate
# enters theta with a minus sign, an error on the cascaded estimate directly.
_ERROR_SIGN = {Placement.CASCADED: 1.0, Placement.G_ONLY: -1.0, Placement.H_ONLY: -1.0}

DEFAULT_SWEEP = (0.0, np.pi / 6, np.pi / 4, np.pi / 3, np.pi / 2, 2 * np.pi / 3, np.pi)


@dataclass(frozen=True)
class PhaseErrorSpec:
    max_mismatch: float
    placement: Placement = Placement.CASCADED
    bits: int = 0

    def __post_init__(self):
        object.__setattr__(self, "placement", Placement(self.placement))
        if not 0.0 <= self.max_mismatch < 2 * np.pi:
            raise ParameterError(f"max_mismatch must lie in [0, 2*pi), got {self.max_mismatch}")
        QuantizationSpec(self.bits)

    @property
    def quantization(self) -> QuantizationSpec:
        return QuantizationSpec(self.bits)


@dataclass(frozen=True)
class NormalizedGainResult:
    mean_normalized_gain: float
    std: float
    trials: int
    delta: float


def perturbed_phases(optimal, spec: PhaseErrorSpec, uniforms):
    """Phases set from an erroneous estimate, before quantization.

    ``uniforms`` are U(0, 1) draws with the shape of ``optimal``; scaling them
    by the maximum mismatch gives the per-element error, one-sided in
    ``[0, max_mismatch)``.
    """
    err = spec.max_mismatch * np.asarray(uniforms)
    return np.asarray(optimal) + _ERROR_SIGN[spec.placement] * err


def apply_phase_error(optimal, spec: PhaseErrorSpec, rng, amplitude_model=IDEAL_AMPLITUDE) -> RisState:
    """RIS state configured from a phase estimate with uniform error.

    Parameters
    ----------
    optimal : array_like or RisState
        Continuous optimum phases for the current realization (a continuous
        RisState is accepted too).  Re-quantization happens after the error is
        added, so quantized states must be built from these unquantized
        phases.
    spec : PhaseErrorSpec
    rng : RngStream or numpy.random.Generator
    """
    if isinstance(optimal, RisState):
        if not optimal.quantization.continuous:
            raise ParameterError("pass the unquantized optimum; quantization is re-applied here")
        optimal = optimal.phases
    optimal = np.asarray(optimal, dtype=float)
    gen = rng.generator() if isinstance(rng, RngStream) else rng
    u = gen.random(optimal.shape)
    return RisState.from_phases(perturbed_phases(optimal, spec, u), amplitude_model, spec.quantization)


def _chunk_gains(layout, model, specs, rng_stream, trials):
    gen = rng_stream.generator()
    real = sample_realization(layout, model, LinkBudget(), gen, trials=trials)
    g = real.ris_to_actuator[:, 0, :]
    h = real.bs_to_ris[:, :, 0]
    u = gen.random(g.shape)

    best = optimal_phases(g, h)
    # cascade_gain(g, c, h) == sum(conj(g) * h * c); the product is shared by all specs.
    gh = np.conj(g) * h
    ideal = {}
    done = {}
    out = []
    for spec in specs:
        q = spec.quantization
        key = (spec.max_mismatch, _ERROR_SIGN[spec.placement], q.bits)
        if key not in done:
            if q.bits not in ideal:
                ideal[q.bits] = np.abs(np.sum(gh * np.exp(1j * quantize_phases(best, q)), axis=-1)) ** 2
            theta = quantize_phases(perturbed_phases(best, spec, u), q)
            done[key] = np.abs(np.sum(gh * np.exp(1j * theta), axis=-1)) ** 2 / ideal[q.bits]
        out.append(done[key])
    return out


def normalized_gain_sweep(layout: NodeLayout, model: PathLossModel, specs, trials,
                          rng: RngStream, n_elements=1024, chunk=500):
    """Per-trial normalised gains for several error specs on shared draws.

    Trials are produced in fixed-size chunks, chunk ``i`` drawing channels and
    U(0, 1) error variates from ``rng.substream(i)``.  Every spec sees the
    same draws (common random numbers), and a spec's samples do not depend on
    which other specs are evaluated alongside it.

    Returns
    -------
    list of numpy.ndarray, one array of length ``trials`` per spec.
    """
    if trials < 1:
        raise ParameterError("need at least one trial")
    specs = list(specs)
    layout = NodeLayout(layout.bs_position, layout.ris_position, layout.actuator_positions[:1], 1, n_elements)
    parts = [[] for _ in specs]
    for i, start in enumerate(range(0, trials, chunk)):
        gains = _chunk_gains(layout, model, specs, rng.substream(i), min(chunk, trials - start))
        for acc, g in zip(parts, gains):
            acc.append(g)
    return [np.concatenate(p) for p in parts]


def normalized_gain_samples(layout, model, spec: PhaseErrorSpec, trials, rng: RngStream,
                            n_elements=1024, chunk=500) -> np.ndarray:
    """Per-trial cascade power with phase error over the error-free power."""
    return normalized_gain_sweep(layout, model, [spec], trials, rng, n_elements, chunk)[0]


def summarize_gains(gains, spec: PhaseErrorSpec) -> NormalizedGainResult:
    return NormalizedGainResult(
        mean_normalized_gain=float(np.mean(gains)),
        std=float(np.std(gains)),
        trials=int(np.size(gains)),
        delta=float(spec.max_mismatch),
    )


def normalized_gain_experiment(layout: NodeLayout, model: PathLossModel, spec: PhaseErrorSpec,
                               n_elements=1024, trials=10_000, rng=None) -> NormalizedGainResult:
    """Mean normalised BS-RIS-actuator gain under uniform phase mismatch."""
    if rng is None:
        raise ParameterError("an explicit RngStream is required")
    return summarize_gains(normalized_gain_samples(layout, model, spec, trials, rng, n_elements), spec)


def sinc_squared_gain(delta):
    """Large-N limit ``|E exp(1j*eps)|^2`` for eps ~ U(0, delta)."""
    x = np.asarray(delta, dtype=float) / 2.0
    return np.where(x == 0, 1.0, (np.sin(x) / np.where(x == 0, 1.0, x)) ** 2)
