"""SINR under zero-forcing precoding, Shannon and finite-blocklength rates."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from rislink.numerics import ParameterError, q_inverse

LOG2E = math.log2(math.e)


class SingularChannelError(ParameterError):
    """The effective channel matrix is rank deficient."""


class RateKind(str, enum.Enum):
    SHANNON = "shannon"
    FBL = "fbl"


@dataclass(frozen=True)
class FblParams:
    blocklength: int = 20
    error_target: float = 1e-6

    def __post_init__(self):
        if self.blocklength < 1:
            raise ParameterError("blocklength must be at least one channel use")
        if not 0.0 < self.error_target < 1.0:
            raise ParameterError("error_target must lie in (0, 1)")


@dataclass(frozen=True)
class RateReport:
    sinr: np.ndarray
    shannon_rate: np.ndarray
    fbl_rate: np.ndarray
    rate_kind: RateKind = RateKind.FBL

    @property
    def sum_shannon(self) -> float:
        return float(np.sum(self.shannon_rate))

    @property
    def sum_fbl(self) -> float:
        return float(np.sum(self.fbl_rate))

    @property
    def reward(self) -> float:
        return self.sum_fbl if self.rate_kind is RateKind.FBL else self.sum_shannon

    def rows(self):
        """CSV rows ``actuator_id, sinr_db, shannon_bpcu, fbl_bpcu``."""
        with np.errstate(divide="ignore"):
            sinr_db = 10.0 * np.log10(self.sinr)
        return [
            (k, float(sinr_db[k]), float(self.shannon_rate[k]), float(self.fbl_rate[k]))
            for k in range(self.sinr.size)
        ]


def zero_forcing_precoder(channels, total_power=1.0) -> np.ndarray:
    """Zero-forcing precoder with equal per-user transmit power.

    Parameters
    ----------
    channels : (K, M) complex array
        Effective channel rows ``h_k^H``; received signal of user k is
        ``channels[k] @ x``.
    total_power : float
        Sum of squared column norms of the returned precoder.

    Returns
    -------
    (M, K) complex array whose column k carries power ``total_power / K``.
    """
    h = np.atleast_2d(np.asarray(channels, dtype=complex))
    k, m = h.shape
    if k > m:
        raise SingularChannelError(f"{k} users cannot be zero-forced with {m} antennas")
    gram = h @ h.conj().T
    if np.linalg.matrix_rank(h) < k:
        raise SingularChannelError("effective channel matrix is rank deficient")
    w = h.conj().T @ np.linalg.inv(gram)
    norms = np.linalg.norm(w, axis=0)
    return w / norms * np.sqrt(total_power / k)


def sinr(channels, precoder, noise_power) -> np.ndarray:
    """``|h_k w_k|^2 / (sum_{j != k} |h_k w_j|^2 + noise)`` for every user k."""
    h = np.atleast_2d(np.asarray(channels, dtype=complex))
    w = np.asarray(precoder, dtype=complex)
    if w.ndim == 1:
        w = w[:, None]
    if h.shape[1] != w.shape[0] or h.shape[0] != w.shape[1]:
        raise ParameterError(f"channel {h.shape} and precoder {w.shape} do not match")
    p = np.abs(h @ w) ** 2
    signal = np.diag(p)
    interference = p.sum(axis=1) - signal
    return signal / (interference + noise_power)


def shannon_rate(gamma):
    gamma = np.asarray(gamma, dtype=float)
    if np.any(gamma < 0):
        raise ParameterError("SINR must be non-negative")
    out = np.log2(1.0 + gamma)
    return out if out.ndim else float(out)


def channel_dispersion(gamma):
    """AWGN dispersion in nats^2: ``1 - (1 + gamma)^-2``."""
    return 1.0 - (1.0 + np.asarray(gamma, dtype=float)) ** -2


def fbl_rate(gamma, params: FblParams = FblParams()):
    """Normal-approximation achievable rate in bits per channel use, clamped at 0."""
    gamma = np.asarray(gamma, dtype=float)
    if np.any(gamma < 0):
        raise ParameterError("SINR must be non-negative")
    penalty = np.sqrt(channel_dispersion(gamma) / params.blocklength) * q_inverse(params.error_target) * LOG2E
    out = np.maximum(0.0, np.log2(1.0 + gamma) - penalty)
    return out if out.ndim else float(out)


def rate_report(gammas, params: FblParams = FblParams(), rate_kind=RateKind.FBL) -> RateReport:
    g = np.asarray(gammas, dtype=float)
    return RateReport(g, np.asarray(shannon_rate(g)), np.asarray(fbl_rate(g, params)), RateKind(rate_kind))


def sum_rate_reward(gammas, params: FblParams = FblParams(), rate_kind=RateKind.FBL) -> float:
    """Sum over actuators of the chosen per-user rate.

    The reliability target enters as the decoding-error probability of the
    finite-blocklength rate; with ``rate_kind="shannon"`` it has no effect on
    the value.
    """
    return rate_report(gammas, params, rate_kind).reward


def multiuser_rates(channels, snr_scale, params: FblParams = FblParams(), rate_kind=RateKind.FBL) -> RateReport:
    """ZF-precoded rates for effective rows in path-gain units.

    ``snr_scale`` is transmit power over noise power (linear); the precoder
    spends unit total power and the noise is ``1 / snr_scale``.
    """
    w = zero_forcing_precoder(channels, 1.0)
    return rate_report(sinr(channels, w, 1.0 / snr_scale), params, rate_kind)
