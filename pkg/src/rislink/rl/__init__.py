from rislink.rl.nn import Adam, Mlp, mlp_backward, mlp_forward
from rislink.rl.buffer import ReplayBuffer
from rislink.rl.env import RisSumRateEnv, phases_from_action
from rislink.rl.td3 import EpisodeLog, Td3Agent, Td3Config, TrainingDiverged, td3_train

__all__ = [
    "Adam",
    "Mlp",
    "mlp_forward",
    "mlp_backward",
    "ReplayBuffer",
    "RisSumRateEnv",
    "phases_from_action",
    "EpisodeLog",
    "Td3Agent",
    "Td3Config",
    "TrainingDiverged",
    "td3_train",
]
