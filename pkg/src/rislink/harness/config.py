"""Experiment configuration: INI files with one section per module.

Example::

    [experiment]
    kind = snr-cdf
    seed = 1
    trials = 100000

    [scenario]
    bs_position = 0, 0
    ris_position = 10, 10
    actuators = 100, 0
    ris_elements = 512

Overrides use ``section.key=value`` and are applied after the file.
"""

from __future__ import annotations

import configparser
import hashlib
import json
import re
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from rislink.channel import LinkBudget, NodeLayout, PathLossModel
from rislink.numerics import ParameterError, RngStream
from rislink.rate import FblParams
from rislink.ris import AmplitudeModel, QuantizationSpec
from rislink.rl.td3 import Td3Config

KINDS = ("snr-cdf", "csi-error", "td3-train", "calibrate")


@dataclass(frozen=True)
class ScenarioConfig:
    layout: NodeLayout
    path_loss: PathLossModel = PathLossModel()
    budget: LinkBudget = LinkBudget()
    include_direct: bool = True


@dataclass(frozen=True)
class RisSettings:
    mode: str = "ideal"
    beta_min: float = 0.8
    phi: float = 0.43 * np.pi
    alpha: float = 1.6
    bits: int = 0

    def amplitude_model(self, mode=None) -> AmplitudeModel:
        return AmplitudeModel(self.beta_min, self.phi, self.alpha, mode or self.mode)

    def quantization(self) -> QuantizationSpec:
        return QuantizationSpec(self.bits)


@dataclass(frozen=True)
class CalibrationTargets:
    enabled: bool = True
    optimized_no_direct_median_db: float = 21.0
    relay_with_direct_median_db: float = 27.71
    tolerance_db: float = 0.1


@dataclass(frozen=True)
class CsiSweep:
    deltas: tuple = (0.0, np.pi / 6, np.pi / 4, np.pi / 3, np.pi / 2, 2 * np.pi / 3, np.pi)
    bits: tuple = (0, 2)
    placements: tuple = ("cascaded", "g_only", "h_only")


@dataclass(frozen=True)
class TrainingPlan:
    """Which learning curves to produce and how the environment behaves."""

    # Rate used as the training reward; every run logs both Shannon and FBL curves.
    reward_kinds: tuple = ("fbl",)
    ris_modes: tuple = ("ideal", "practical")
    practical_bits: int = 2
    resample_every: int = 0


@dataclass(frozen=True)
class ExperimentConfig:
    kind: str
    seed: int
    scenario: ScenarioConfig
    ris: RisSettings = RisSettings()
    fbl: FblParams = FblParams()
    td3: Td3Config = Td3Config()
    plan: TrainingPlan = TrainingPlan()
    csi: CsiSweep = CsiSweep()
    calibration: CalibrationTargets = CalibrationTargets()
    trials: int = 100_000
    workers: int = 1
    output: str = "out"

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ParameterError(f"unknown experiment kind {self.kind!r}; expected one of {KINDS}")
        if self.seed is None:
            raise ParameterError("a seed is required")
        RngStream(self.seed)
        if self.trials < 1 or self.workers < 1:
            raise ParameterError("trials and workers must be positive")

    @property
    def rng(self) -> RngStream:
        return RngStream(self.seed)

    def fingerprint(self) -> str:
        """SHA-256 over the canonical JSON form, output location excluded."""
        payload = to_dict(self)
        payload.pop("output", None)
        blob = json.dumps(payload, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


def to_dict(cfg: ExperimentConfig) -> dict:
    def clean(x):
        if isinstance(x, dict):
            return {k: clean(v) for k, v in x.items()}
        if isinstance(x, (list, tuple)):
            return [clean(v) for v in x]
        if hasattr(x, "value"):
            return x.value
        if isinstance(x, float):
            return float(repr(x)) if np.isfinite(x) else str(x)
        return x

    return clean(asdict(cfg))


# ---------------------------------------------------------------- defaults

def default_config(kind: str, seed=None) -> ExperimentConfig:
    """Built-in scenario for each experiment kind."""
    if kind in ("snr-cdf", "calibrate"):
        layout = NodeLayout((0, 0), (10, 10), ((100, 0),), 1, 512)
        return ExperimentConfig(kind, seed, ScenarioConfig(layout), trials=100_000)
    if kind == "csi-error":
        layout = NodeLayout((0, 0), (10, 10), ((100, 0),), 1, 1024)
        return ExperimentConfig(kind, seed, ScenarioConfig(layout), trials=10_000,
                                calibration=CalibrationTargets(enabled=False))
    if kind == "td3-train":
        actuators = ((135, 105), (105, 135), (120, 90), (90, 120))
        layout = NodeLayout((75, 75), (150, 150), actuators, 4, 64)
        scenario = ScenarioConfig(layout, budget=TD3_BUDGET, include_direct=False)
        return ExperimentConfig(kind, seed, scenario, trials=1, calibration=CalibrationTargets(enabled=False))
    raise ParameterError(f"unknown experiment kind {kind!r}")


# Puts the random-phase per-user receive SNR of the desk-scale factory scenario
# at about 15 dB before ZF losses; the direct path is treated as blocked.
TD3_BUDGET = LinkBudget(tx_power_db=209.5, noise_power_db=0.0)


# ---------------------------------------------------------------- parsing

def _floats(text):
    return tuple(float(v) for v in text.replace(" ", "").split(",") if v)


def _point(text):
    p = _floats(text)
    if len(p) != 2:
        raise ParameterError(f"expected an 'x, y' point, got {text!r}")
    return p


_PI_MULTIPLE = re.compile(r"^([+-]?(?:\d+\.?\d*|\.\d+)?)\*?pi(?:/(\d+\.?\d*))?$")


def _angle(text):
    """Radians as a number or a multiple of pi: ``1.2``, ``pi/3``, ``2*pi/3``, ``0.43pi``."""
    text = text.strip().lower().replace(" ", "")
    try:
        return float(text)
    except ValueError:
        pass
    m = _PI_MULTIPLE.match(text)
    if not m:
        raise ParameterError(f"cannot parse angle {text!r}")
    factor = m.group(1)
    factor = {"": 1.0, "+": 1.0, "-": -1.0}.get(factor, None) if factor in ("", "+", "-") else float(factor)
    divisor = float(m.group(2)) if m.group(2) else 1.0
    return factor * np.pi / divisor


def _bool(text):
    v = text.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ParameterError(f"cannot parse boolean {text!r}")


def _words(text):
    return tuple(w.strip() for w in text.split(",") if w.strip())


def _ints(text):
    return tuple(int(v) for v in _floats(text))


# (section, key) -> (converter, setter path)
_FIELDS = {
    ("experiment", "kind"): (str, ("kind",)),
    ("experiment", "seed"): (int, ("seed",)),
    ("experiment", "trials"): (int, ("trials",)),
    ("experiment", "workers"): (int, ("workers",)),
    ("experiment", "output"): (str, ("output",)),
    ("scenario", "include_direct"): (_bool, ("scenario", "include_direct")),
    ("path_loss", "intercept_db"): (float, ("scenario", "path_loss", "intercept_db")),
    ("path_loss", "slope_db_per_decade"): (float, ("scenario", "path_loss", "slope_db_per_decade")),
    ("budget", "tx_power_db"): (float, ("scenario", "budget", "tx_power_db")),
    ("budget", "noise_power_db"): (float, ("scenario", "budget", "noise_power_db")),
    ("budget", "direct_path_offset_db"): (float, ("scenario", "budget", "direct_path_offset_db")),
    ("ris", "mode"): (str, ("ris", "mode")),
    ("ris", "beta_min"): (float, ("ris", "beta_min")),
    ("ris", "phi"): (_angle, ("ris", "phi")),
    ("ris", "alpha"): (float, ("ris", "alpha")),
    ("ris", "bits"): (int, ("ris", "bits")),
    ("fbl", "blocklength"): (int, ("fbl", "blocklength")),
    ("fbl", "error_target"): (float, ("fbl", "error_target")),
    ("calibration", "enabled"): (_bool, ("calibration", "enabled")),
    ("calibration", "optimized_no_direct_median_db"): (float, ("calibration", "optimized_no_direct_median_db")),
    ("calibration", "relay_with_direct_median_db"): (float, ("calibration", "relay_with_direct_median_db")),
    ("calibration", "tolerance_db"): (float, ("calibration", "tolerance_db")),
    ("csi", "deltas"): (lambda t: tuple(_angle(x) for x in t.split(",") if x.strip()), ("csi", "deltas")),
    ("csi", "bits"): (_ints, ("csi", "bits")),
    ("csi", "placements"): (_words, ("csi", "placements")),
    ("td3", "reward_kinds"): (_words, ("plan", "reward_kinds")),
    ("td3", "ris_modes"): (_words, ("plan", "ris_modes")),
    ("td3", "practical_bits"): (int, ("plan", "practical_bits")),
    ("td3", "resample_every"): (int, ("plan", "resample_every")),
    ("td3", "hidden"): (_ints, ("td3", "hidden")),
}
for _name, _conv in (
    ("actor_lr", float), ("critic_lr", float), ("discount", float), ("tau", float),
    ("policy_delay", int), ("exploration_noise", float), ("target_noise", float),
    ("noise_clip", float), ("batch_size", int), ("buffer_size", int), ("episodes", int),
    ("steps_per_episode", int), ("start_steps", int), ("window", int),
):
    _FIELDS[("td3", _name)] = (_conv, ("td3", _name))

_LAYOUT_KEYS = ("bs_position", "ris_position", "actuators", "bs_antennas", "ris_elements")


def _set(obj, path, value):
    if len(path) == 1:
        return replace(obj, **{path[0]: value})
    child = getattr(obj, path[0])
    return replace(obj, **{path[0]: _set(child, path[1:], value)})


def _apply_layout(cfg, values):
    lay = cfg.scenario.layout
    kw = {
        "bs_position": lay.bs_position,
        "ris_position": lay.ris_position,
        "actuator_positions": lay.actuator_positions,
        "bs_antennas": lay.bs_antennas,
        "ris_elements": lay.ris_elements,
    }
    for key, text in values.items():
        if key in ("bs_position", "ris_position"):
            kw[key] = _point(text)
        elif key == "actuators":
            kw["actuator_positions"] = tuple(_point(p) for p in text.split(";") if p.strip())
        else:
            kw[key] = int(text)
    return _set(cfg, ("scenario", "layout"), NodeLayout(**kw))


def apply_settings(cfg: ExperimentConfig, items) -> ExperimentConfig:
    """Apply ``[(section, key, text), ...]`` in order."""
    layout_values = {}
    for section, key, text in items:
        section, key = section.strip().lower(), key.strip().lower()
        if section == "scenario" and key in _LAYOUT_KEYS:
            layout_values[key] = text
            continue
        if (section, key) not in _FIELDS:
            raise ParameterError(f"unknown setting {section}.{key}")
        conv, path = _FIELDS[(section, key)]
        try:
            value = conv(text.strip())
        except ParameterError:
            raise
        except (TypeError, ValueError) as exc:
            raise ParameterError(f"bad value for {section}.{key}: {text!r}") from exc
        cfg = _set(cfg, path, value)
    if layout_values:
        cfg = _apply_layout(cfg, layout_values)
    return cfg


def parse_override(text: str):
    if "=" not in text or "." not in text.split("=", 1)[0]:
        raise ParameterError(f"override must look like section.key=value, got {text!r}")
    lhs, value = text.split("=", 1)
    section, key = lhs.split(".", 1)
    return section, key, value


def load_config(path=None, kind=None, seed=None, trials=None, overrides=(), output=None) -> ExperimentConfig:
    """Build a config from defaults, an optional INI file, then overrides.

    The experiment kind comes from ``kind`` (e.g. the CLI subcommand) or the
    file's ``[experiment] kind``.  A seed must be supplied by one of the
    sources; there is no clock-based default.
    """
    items = []
    file_kind = None
    if path is not None:
        parser = configparser.ConfigParser(interpolation=None)
        with open(path, encoding="utf-8") as fh:
            parser.read_file(fh)
        for section in parser.sections():
            for key, value in parser.items(section):
                if (section, key) == ("experiment", "kind"):
                    file_kind = value.strip()
                    continue
                items.append((section, key, value))
    items.extend(parse_override(o) for o in overrides)
    kind = kind or file_kind
    if kind is None:
        raise ParameterError("experiment kind not given")
    base = default_config(kind, seed=0)
    cfg = apply_settings(base, items)
    cfg = replace(cfg, kind=kind)
    seed_given = seed is not None or any((s, k) == ("experiment", "seed") for s, k, _ in items)
    if not seed_given:
        raise ParameterError("a seed is required (config [experiment] seed or --seed)")
    if seed is not None:
        cfg = replace(cfg, seed=int(seed))
    if trials is not None:
        cfg = replace(cfg, trials=int(trials))
    if output is not None:
        cfg = replace(cfg, output=str(output))
    return cfg


def write_config(cfg: ExperimentConfig, path):
    """Serialise to the INI layout understood by :func:`load_config`."""
    lay = cfg.scenario.layout
    fmt = repr
    sections = {
        "experiment": {"kind": cfg.kind, "seed": cfg.seed, "trials": cfg.trials, "workers": cfg.workers},
        "scenario": {
            "bs_position": ", ".join(fmt(v) for v in lay.bs_position),
            "ris_position": ", ".join(fmt(v) for v in lay.ris_position),
            "actuators": "; ".join(", ".join(fmt(v) for v in p) for p in lay.actuator_positions),
            "bs_antennas": lay.bs_antennas,
            "ris_elements": lay.ris_elements,
            "include_direct": cfg.scenario.include_direct,
        },
        "path_loss": asdict(cfg.scenario.path_loss),
        "budget": asdict(cfg.scenario.budget),
        "ris": asdict(cfg.ris),
        "fbl": asdict(cfg.fbl),
        "calibration": asdict(cfg.calibration),
        "csi": {
            "deltas": ", ".join(fmt(d) for d in cfg.csi.deltas),
            "bits": ", ".join(str(b) for b in cfg.csi.bits),
            "placements": ", ".join(cfg.csi.placements),
        },
        "td3": {
            **{k: v for k, v in asdict(cfg.td3).items() if k != "hidden"},
            "hidden": ", ".join(str(h) for h in cfg.td3.hidden),
            "reward_kinds": ", ".join(cfg.plan.reward_kinds),
            "ris_modes": ", ".join(cfg.plan.ris_modes),
            "practical_bits": cfg.plan.practical_bits,
            "resample_every": cfg.plan.resample_every,
        },
    }
    parser = configparser.ConfigParser(interpolation=None)
    for name, values in sections.items():
        parser[name] = {k: (fmt(v) if isinstance(v, float) else str(v)) for k, v in values.items()}
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        parser.write(fh)
