"""
Configs, fingerprints and reproducible reports
==============================================

Every experiment is a pure function of its config and seed.  Reports carry a
fingerprint of the config, and rerunning with the same inputs writes the same
bytes.
"""

import tempfile
from pathlib import Path

from rislink.harness.config import load_config, write_config
from rislink.harness.experiments import run
from rislink.harness.report import read_fingerprint, write_report

work = Path(tempfile.mkdtemp())

# Start from the shipped config and shrink it with an override.
cfg = load_config("configs/calibrate.ini", seed=11, overrides=["experiment.trials=5000"])
print("fingerprint", cfg.fingerprint())

# Writing and reloading the config gives the same fingerprint.
write_config(cfg, work / "calibrate.ini")
assert load_config(work / "calibrate.ini").fingerprint() == cfg.fingerprint()

paths_a = write_report(run(cfg), work / "a")
paths_b = write_report(run(cfg), work / "b")
for pa, pb in zip(paths_a, paths_b):
    same = Path(pa).read_bytes() == Path(pb).read_bytes()
    print(Path(pa).name, "identical" if same else "DIFFERENT")

csv_path = next(p for p in paths_a if str(p).endswith(".csv"))
print("fingerprint stored in", Path(csv_path).name, "->", read_fingerprint(csv_path))
