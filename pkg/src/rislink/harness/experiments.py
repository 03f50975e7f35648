"""Orchestration of the SNR-CDF, CSI-error and TD3 experiments."""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from rislink.channel import LinkBudget, NodeLayout, sample_realization
from rislink.harness.config import ExperimentConfig
from rislink.harness.kpi import reliability_annotations
from rislink.harness.report import ExperimentReport, Table
from rislink.impairment import PhaseErrorSpec, normalized_gain_sweep, sinc_squared_gain, summarize_gains
from rislink.numerics import ParameterError, percentile, quantiles, summarize_db
from rislink.rate import RateKind
from rislink.ris import AmplitudeMode, IDEAL_AMPLITUDE, QuantizationSpec, cascade_gain, optimal_phases, quantize_phases, reflection_coefficients
from rislink.rl.env import RisSumRateEnv
from rislink.rl.td3 import moving_stats, td3_train

log = logging.getLogger(__name__)

CASES = ("optimized_direct", "relay_direct", "optimized_no_direct", "relay_no_direct")
CHUNK = 2000
MIN_STABLE_TRIALS = 1000


class CalibrationError(ParameterError):
    """The calibration target is not bracketed by the search interval."""


# ---------------------------------------------------------------- SNR CDF

@dataclass(frozen=True)
class SnrSamples:
    """Per-trial channel terms of the single-link scenario.

    ``direct`` is the BS->actuator coefficient without any direct-path offset;
    the cascades are evaluated with unit transmit power.
    """

    direct: np.ndarray
    optimized: np.ndarray
    optimized_aligned: np.ndarray
    relay: np.ndarray

    def power_gains(self, direct_path_offset_db=0.0) -> dict:
        f = self.direct * 10.0 ** (direct_path_offset_db / 20.0)
        return {
            "optimized_direct": np.abs(f + self.optimized_aligned) ** 2,
            "relay_direct": np.abs(f + self.relay) ** 2,
            "optimized_no_direct": np.abs(self.optimized) ** 2,
            "relay_no_direct": np.abs(self.relay) ** 2,
        }

    def snr_db(self, budget: LinkBudget) -> dict:
        return {
            k: 10.0 * np.log10(v) + budget.snr_offset_db
            for k, v in self.power_gains(budget.direct_path_offset_db).items()
        }


def _snr_chunk(args):
    layout, path_loss, amp_model, quant, stream, trials = args
    gen = stream.generator()
    r = sample_realization(layout, path_loss, LinkBudget(), gen, trials=trials)
    g = r.ris_to_actuator[:, 0, :]
    h = r.bs_to_ris[:, :, 0]
    f = r.direct[:, 0, 0]

    def through(phases):
        return cascade_gain(g, reflection_coefficients(quantize_phases(phases, quant), amp_model), h)

    optimized = through(optimal_phases(g, h))
    # With a direct path the best phases rotate the whole cascade onto arg f.
    aligned = through(optimal_phases(g, h, np.angle(f)[:, None]))
    relay = through(np.zeros(g.shape))
    return f, optimized, aligned, relay


def _map(fn, jobs, workers):
    if workers <= 1 or len(jobs) <= 1:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, jobs))


def simulate_snr_samples(cfg: ExperimentConfig) -> SnrSamples:
    """Monte-Carlo draws for all four SNR cases; chunk ``i`` uses substream ``i``."""
    lay = cfg.scenario.layout
    single = NodeLayout(lay.bs_position, lay.ris_position, lay.actuator_positions[:1], 1, lay.ris_elements)
    amp = cfg.ris.amplitude_model()
    quant = cfg.ris.quantization()
    jobs = []
    for i, start in enumerate(range(0, cfg.trials, CHUNK)):
        n = min(CHUNK, cfg.trials - start)
        jobs.append((single, cfg.scenario.path_loss, amp, quant, cfg.rng.substream(i), n))
    parts = _map(_snr_chunk, jobs, cfg.workers)
    return SnrSamples(*(np.concatenate([p[j] for p in parts]) for j in range(4)))


def _bisect(fn, lo, hi, tol=1e-9, max_iter=200):
    flo, fhi = fn(lo), fn(hi)
    if np.sign(flo) == np.sign(fhi):
        raise CalibrationError(f"target not bracketed on [{lo}, {hi}] (f={flo:.3g}, {fhi:.3g})")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        fmid = fn(mid)
        if fmid == 0 or hi - lo < tol:
            return mid
        if np.sign(fmid) == np.sign(flo):
            lo, flo = mid, fmid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def calibrate_budget(cfg: ExperimentConfig, samples: SnrSamples | None = None,
                     snr_bracket=(-500.0, 500.0), direct_bracket=(-150.0, 150.0)) -> LinkBudget:
    """Fit the SNR offset and the direct-path offset to the two median anchors.

    First the transmit-minus-noise offset is searched so that the optimised
    no-direct median hits its target, then the direct-path offset so that
    the relay-with-direct median does.  Noise power is held fixed.
    """
    if samples is None:
        samples = simulate_snr_samples(cfg)
    targets = cfg.calibration
    noise = cfg.scenario.budget.noise_power_db

    opt_db = 10.0 * np.log10(samples.power_gains()["optimized_no_direct"])
    opt_median = percentile(opt_db, 0.5)

    def snr_err(offset):
        return opt_median + offset - targets.optimized_no_direct_median_db

    offset = _bisect(snr_err, *snr_bracket)

    def direct_err(d):
        relay = 10.0 * np.log10(samples.power_gains(d)["relay_direct"])
        return percentile(relay, 0.5) + offset - targets.relay_with_direct_median_db

    direct = _bisect(direct_err, *direct_bracket)
    budget = LinkBudget(noise + offset, noise, direct)

    got = {k: percentile(v, 0.5) for k, v in samples.snr_db(budget).items()}
    if abs(got["optimized_no_direct"] - targets.optimized_no_direct_median_db) > targets.tolerance_db or \
            abs(got["relay_direct"] - targets.relay_with_direct_median_db) > targets.tolerance_db:
        raise CalibrationError(f"calibration missed its anchors: {got}")
    return budget


def snr_oracles(n_elements: int) -> dict:
    """Closed-form Rayleigh predictions for the no-direct cases."""
    n = n_elements
    mu = n * np.pi / 4
    sigma = np.sqrt(n * (1 - np.pi**2 / 16))
    z = 3.090232306167813  # upper 0.1 % point of N(0, 1)
    return {
        "median_gap_db": 10 * np.log10(n * np.pi**2 / (16 * np.log(2))),
        "optimized_range_db": 20 * np.log10((mu + z * sigma) / (mu - z * sigma)),
        "relay_range_db": 10 * np.log10(np.log(1000) / -np.log(0.999)),
    }


def run_snr_cdf(cfg: ExperimentConfig, samples: SnrSamples | None = None) -> ExperimentReport:
    if samples is None:
        samples = simulate_snr_samples(cfg)
    budget = calibrate_budget(cfg, samples) if cfg.calibration.enabled else cfg.scenario.budget
    snr = samples.snr_db(budget)
    stats = {k: summarize_db(snr[k]) for k in CASES}

    grid = np.linspace(0.0, 1.0, 1001)
    cdf_rows = []
    for case in CASES:
        for p, v in zip(grid, quantiles(snr[case], grid)):
            cdf_rows.append((case, float(p), float(v)))
    summary_rows = [(c, stats[c].median_db, stats[c].range_db, stats[c].samples) for c in CASES]

    summary = {
        "budget": {
            "tx_power_db": budget.tx_power_db,
            "noise_power_db": budget.noise_power_db,
            "direct_path_offset_db": budget.direct_path_offset_db,
        },
        "calibrated": cfg.calibration.enabled,
        "cases": {c: {"median_db": stats[c].median_db, "range_db": stats[c].range_db} for c in CASES},
        "median_gap_no_direct_db": stats["optimized_no_direct"].median_db - stats["relay_no_direct"].median_db,
        "median_gain_with_direct_db": stats["optimized_direct"].median_db - stats["relay_direct"].median_db,
        "range_reduction_with_direct_db": stats["relay_direct"].range_db - stats["optimized_direct"].range_db,
        "oracle": snr_oracles(cfg.scenario.layout.ris_elements),
        "trials": cfg.trials,
        "ris_elements": cfg.scenario.layout.ris_elements,
    }
    report = ExperimentReport(
        cfg.kind, cfg.fingerprint(), cfg.seed, summary,
        {"snr_cdf": Table(("case", "cdf", "snr_db"), cdf_rows),
         "snr_summary": Table(("case", "median_db", "range_db", "samples"), summary_rows)},
        {"range_definition": "0.1%-99.9% percentile span of SNR in dB"},
    )
    if cfg.trials < MIN_STABLE_TRIALS:
        report.warnings.append(f"only {cfg.trials} trials: the 0.1%-99.9% range statistic is unstable")
    return report


def run_calibrate(cfg: ExperimentConfig) -> ExperimentReport:
    samples = simulate_snr_samples(cfg)
    budget = calibrate_budget(cfg, samples)
    snr = samples.snr_db(budget)
    medians = {c: percentile(snr[c], 0.5) for c in CASES}
    rows = [
        ("tx_power_db", budget.tx_power_db),
        ("noise_power_db", budget.noise_power_db),
        ("direct_path_offset_db", budget.direct_path_offset_db),
    ]
    summary = {"budget": dict(rows), "medians_db": medians, "trials": cfg.trials}
    return ExperimentReport(cfg.kind, cfg.fingerprint(), cfg.seed, summary,
                            {"calibration": Table(("parameter", "value_db"), rows)})


# ---------------------------------------------------------------- CSI error

def run_csi_error(cfg: ExperimentConfig) -> ExperimentReport:
    specs = [
        PhaseErrorSpec(d, p, b)
        for d in cfg.csi.deltas
        for b in cfg.csi.bits
        for p in cfg.csi.placements
    ]
    n = cfg.scenario.layout.ris_elements
    gains = normalized_gain_sweep(cfg.scenario.layout, cfg.scenario.path_loss, specs, cfg.trials, cfg.rng, n)
    rows = []
    bars = []
    for spec, g in zip(specs, gains):
        r = summarize_gains(g, spec)
        rows.append((spec.max_mismatch, spec.placement.value, spec.bits, r.mean_normalized_gain, r.std, r.trials, cfg.seed))
        bars.append({
            "delta_rad": spec.max_mismatch,
            "placement": spec.placement.value,
            "bits": spec.bits,
            "mean_gain": r.mean_normalized_gain,
            "std": r.std,
        })
    summary = {
        "ris_elements": n,
        "trials_per_bar": cfg.trials,
        "bars": bars,
        "large_n_oracle": {format(d, ".6f"): float(sinc_squared_gain(d)) for d in cfg.csi.deltas},
    }
    return ExperimentReport(
        cfg.kind, cfg.fingerprint(), cfg.seed, summary,
        {"csi_error": Table(("delta_rad", "placement", "bits", "mean_gain", "std", "trials", "seed"), rows)},
    )


# ---------------------------------------------------------------- TD3

def _td3_job(args):
    cfg, ris_mode, reward_kind = args
    bits = cfg.plan.practical_bits if ris_mode == "practical" else 0
    amp = cfg.ris.amplitude_model(mode=ris_mode)
    env = RisSumRateEnv(
        cfg.scenario.layout, cfg.scenario.path_loss, cfg.scenario.budget,
        cfg.rng.substream(0), amp, QuantizationSpec(bits), cfg.fbl, reward_kind,
        cfg.td3.steps_per_episode, cfg.plan.resample_every, cfg.scenario.include_direct,
    )
    logs = td3_train(env, cfg.td3, cfg.rng.substream(1))
    return ris_mode, reward_kind, bits, logs


TD3_METRICS = {"shannon": "sum_shannon", "fbl": "sum_fbl"}


def run_td3(cfg: ExperimentConfig) -> ExperimentReport:
    """Train one agent per (RIS mode, reward) and log Shannon and FBL curves.

    Both curves of a run are the two sum rates of the same actions, so for a
    given agent the FBL curve lies below the Shannon curve.  All runs share
    the channel stream and the agent stream (matched seeds).
    """
    jobs = [(cfg, m, k) for m in cfg.plan.ris_modes for k in cfg.plan.reward_kinds]
    for _, m, k in jobs:
        AmplitudeMode(m)
        RateKind(k)
    results = _map(_td3_job, jobs, cfg.workers)

    rows = []
    curves = {}
    for ris_mode, reward_kind, bits, logs in results:
        for rate_kind, key in TD3_METRICS.items():
            raw = [e.metrics[key] for e in logs]
            stats = moving_stats(raw, cfg.td3.window)
            for e, r, (m, s) in zip(logs, raw, stats):
                rows.append((e.episode, r, m, s, rate_kind, ris_mode, bits, reward_kind))
            ma = [m for m, _ in stats if m is not None]
            first = ma[0] if ma else None
            last = ma[-1] if ma else None
            curves.setdefault(reward_kind, {})[f"{ris_mode}_{rate_kind}"] = {
                "bits": bits,
                "first_moving_avg": first,
                "converged_moving_avg": last,
                "gain_ratio": (last / first) if first else None,
            }

    summary = {"curves": curves, "episodes": cfg.td3.episodes, "ris_elements": cfg.scenario.layout.ris_elements}
    for reward_kind, group in curves.items():
        for rate_kind in TD3_METRICS:
            ideal = group.get(f"ideal_{rate_kind}")
            practical = group.get(f"practical_{rate_kind}")
            if ideal and practical and ideal["converged_moving_avg"]:
                loss = 1 - practical["converged_moving_avg"] / ideal["converged_moving_avg"]
                summary.setdefault("practical_loss", {}).setdefault(reward_kind, {})[rate_kind] = loss
    annotations = {"reliability": reliability_annotations(cfg.fbl.error_target), "error_target": cfg.fbl.error_target}
    columns = ("episode", "sum_rate_bpcu", "moving_avg", "moving_std", "rate_kind", "ris_mode", "bits", "reward_kind")
    return ExperimentReport(cfg.kind, cfg.fingerprint(), cfg.seed, summary,
                            {"td3_curves": Table(columns, rows)}, annotations)


RUNNERS = {
    "snr-cdf": run_snr_cdf,
    "csi-error": run_csi_error,
    "td3-train": run_td3,
    "calibrate": run_calibrate,
}


def run(cfg: ExperimentConfig) -> ExperimentReport:
    log.info("running %s (fingerprint %s, seed %d)", cfg.kind, cfg.fingerprint(), cfg.seed)
    return RUNNERS[cfg.kind](cfg)
