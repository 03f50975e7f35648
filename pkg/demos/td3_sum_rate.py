"""
Learning surface phases with TD3
================================

Four actuators are served by a 4-antenna BS through a 64-element surface with
zero-forcing precoding.  A TD3 agent picks the surface phases and is rewarded
with the sum rate, either Shannon or the finite-blocklength rate at 20 channel
uses and a 1e-6 error target.
"""

import numpy as np

from rislink.harness.config import load_config
from rislink.rl import RisSumRateEnv, td3_train
from rislink.ris import QuantizationSpec

# A short run so the script finishes in a couple of minutes; the acceptance
# suite trains for 400 episodes.
cfg = load_config(kind="td3-train", seed=2, overrides=["td3.episodes=80", "td3.window=20"])
sc = cfg.scenario
train = cfg.td3

env = RisSumRateEnv(sc.layout, sc.path_loss, sc.budget, cfg.rng.substream(0),
                    cfg.ris.amplitude_model(mode="ideal"), QuantizationSpec(0), cfg.fbl, "fbl",
                    train.steps_per_episode, include_direct=sc.include_direct)
logs = td3_train(env, train, cfg.rng.substream(1))

ma = np.array([e.moving_avg for e in logs if e.moving_avg is not None])
print(f"first moving average {ma[0]:.2f} bpcu, last {ma[-1]:.2f} bpcu")
for e in logs[:: len(logs) // 8]:
    print(f"episode {e.episode:4d}   sum FBL rate {e.sum_rate:6.2f}")
