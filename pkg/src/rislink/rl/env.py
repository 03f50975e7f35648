"""Multi-actuator sum-rate environment driven by RIS phase actions."""

from __future__ import annotations

import numpy as np

from rislink.channel import LinkBudget, NodeLayout, PathLossModel, sample_realization
from rislink.numerics import ParameterError, RngStream
from rislink.rate import FblParams, RateKind, SingularChannelError, multiuser_rates, rate_report
from rislink.ris import (
    CONTINUOUS,
    IDEAL_AMPLITUDE,
    AmplitudeModel,
    QuantizationSpec,
    RisState,
    quantize_phases,
    wrap_phase,
)


def phases_from_action(action, quantization: QuantizationSpec = CONTINUOUS) -> np.ndarray:
    """Map actions in [-1, 1] to phases in (0, 2*pi]; 0 -> pi, +1 -> 2*pi."""
    a = np.clip(np.asarray(action, dtype=float), -1.0, 1.0)
    return np.asarray(quantize_phases(wrap_phase(np.pi * (a + 1.0)), quantization))


class RisSumRateEnv:
    """Each step sets all RIS phases and returns the ZF sum rate as reward.

    The observation is the previous action followed by the per-actuator rates
    it achieved, so the agent never sees channel coefficients.

    Parameters
    ----------
    resample_every : int
        Number of episodes a channel draw is held for; ``0`` keeps the first
        draw for the whole run (static deployment).
    """

    def __init__(self, layout: NodeLayout, path_loss: PathLossModel, budget: LinkBudget,
                 rng: RngStream, amplitude_model: AmplitudeModel = IDEAL_AMPLITUDE,
                 quantization: QuantizationSpec = CONTINUOUS, fbl: FblParams = FblParams(),
                 rate_kind=RateKind.FBL, steps_per_episode=10, resample_every=0,
                 include_direct=True):
        if steps_per_episode < 1:
            raise ParameterError("steps_per_episode must be positive")
        self.layout = layout
        self.path_loss = path_loss
        self.budget = budget
        self.amplitude_model = amplitude_model
        self.quantization = quantization
        self.fbl = fbl
        self.rate_kind = RateKind(rate_kind)
        self.steps_per_episode = int(steps_per_episode)
        self.resample_every = int(resample_every)
        self.include_direct = include_direct
        self._channel_rng = rng.generator()
        self._action_rng = rng.substream(1).generator()
        self.realization = None
        self._episode = -1
        self._t = 0
        self._state = None

    @property
    def action_dim(self) -> int:
        return self.layout.ris_elements

    @property
    def state_dim(self) -> int:
        return self.layout.ris_elements + self.layout.n_actuators

    def evaluate(self, action):
        """Rate report of an action under the current channel, no state change."""
        phases = phases_from_action(action, self.quantization)
        ris = RisState(phases, self.amplitude_model, self.quantization)
        coeff = ris.coefficients()
        r = self.realization
        rows = (np.conj(r.ris_to_actuator) * coeff) @ r.bs_to_ris
        if self.include_direct:
            rows = rows + r.direct
        try:
            return multiuser_rates(rows, self.budget.snr_scale, self.fbl, self.rate_kind)
        except SingularChannelError:
            k = self.layout.n_actuators
            return rate_report(np.zeros(k), self.fbl, self.rate_kind)

    def _observe(self, action, report):
        rates = report.fbl_rate if self.rate_kind is RateKind.FBL else report.shannon_rate
        return np.concatenate([np.asarray(action, dtype=float), np.asarray(rates, dtype=float)])

    def reset(self):
        self._episode += 1
        fresh = self.realization is None or (
            self.resample_every > 0 and self._episode % self.resample_every == 0
        )
        if fresh:
            self.realization = sample_realization(self.layout, self.path_loss, self.budget, self._channel_rng)
        self._t = 0
        start = self._action_rng.uniform(-1.0, 1.0, self.action_dim)
        self._state = self._observe(start, self.evaluate(start))
        return self._state.copy()

    def step(self, action):
        if self._state is None:
            raise RuntimeError("call reset() before step()")
        report = self.evaluate(action)
        self._t += 1
        self._state = self._observe(np.clip(action, -1.0, 1.0), report)
        done = self._t >= self.steps_per_episode
        info = {"sum_shannon": report.sum_shannon, "sum_fbl": report.sum_fbl, "sinr": report.sinr}
        return self._state.copy(), report.reward, done, info
