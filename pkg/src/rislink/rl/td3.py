"""Twin-delayed deep deterministic policy gradient on numpy networks."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from rislink.numerics import ParameterError, RngStream
from rislink.rl.buffer import ReplayBuffer
from rislink.rl.nn import Adam, Mlp


class TrainingDiverged(RuntimeError):
    """A reward or network output became non-finite."""


@dataclass(frozen=True)
class Td3Config:
    actor_lr: float = 1e-3
    critic_lr: float = 1e-3
    discount: float = 0.0
    tau: float = 0.005
    policy_delay: int = 2
    exploration_noise: float = 0.1
    target_noise: float = 0.2
    noise_clip: float = 0.5
    batch_size: int = 128
    buffer_size: int = 100_000
    hidden: tuple = (256, 256)
    episodes: int = 400
    steps_per_episode: int = 70
    start_steps: int = 500
    window: int = 50

    def __post_init__(self):
        object.__setattr__(self, "hidden", tuple(int(h) for h in self.hidden))
        if not 0.0 < self.tau <= 1.0:
            raise ParameterError(f"tau must lie in (0, 1], got {self.tau}")
        if self.policy_delay < 1:
            raise ParameterError("policy_delay must be at least 1")
        if not 0.0 <= self.discount <= 1.0:
            raise ParameterError(f"discount must lie in [0, 1], got {self.discount}")
        if self.batch_size < 1 or self.buffer_size < self.batch_size:
            raise ParameterError("buffer must hold at least one batch")
        if self.episodes < 1 or self.steps_per_episode < 1 or self.window < 1:
            raise ParameterError("episodes, steps_per_episode and window must be positive")


@dataclass(frozen=True)
class EpisodeLog:
    episode: int
    sum_rate: float
    moving_avg: float | None
    moving_std: float | None
    # Episode means of the numeric ``info`` entries returned by the environment.
    metrics: dict = field(default_factory=dict, compare=False)


class Td3Agent:
    def __init__(self, state_dim, action_dim, config: Td3Config, rng: np.random.Generator):
        self.state_dim = state_dim
        self.action_dim = action_dim
        self.config = config
        self.rng = rng
        h = list(config.hidden)
        self.actor = Mlp([state_dim, *h, action_dim], "tanh", rng)
        self.critics = [Mlp([state_dim + action_dim, *h, 1], "linear", rng) for _ in range(2)]
        self.actor_target = self.actor.copy()
        self.critic_targets = [c.copy() for c in self.critics]
        self.actor_opt = Adam(self.actor.params, config.actor_lr)
        self.critic_opts = [Adam(c.params, config.critic_lr) for c in self.critics]
        self.critic_updates = 0
        self.actor_updates = 0

    def act(self, state, noise=0.0):
        a = self.actor(state)
        if noise > 0:
            a = a + noise * self.rng.standard_normal(a.shape)
        return np.clip(a, -1.0, 1.0)

    def update(self, batch):
        """One critic step; every ``policy_delay``-th call also an actor and target step."""
        cfg = self.config
        s, a, r, s2, done = batch
        n = s.shape[0]

        noise = np.clip(cfg.target_noise * self.rng.standard_normal(a.shape), -cfg.noise_clip, cfg.noise_clip)
        a2 = np.clip(self.actor_target(s2) + noise, -1.0, 1.0)
        sa2 = np.concatenate([s2, a2], axis=1)
        q_next = np.minimum(self.critic_targets[0](sa2), self.critic_targets[1](sa2))[:, 0]
        y = r + cfg.discount * (1.0 - done) * q_next

        sa = np.concatenate([s, a], axis=1)
        for critic, opt in zip(self.critics, self.critic_opts):
            q, cache = critic.forward(sa, return_cache=True)
            dq = (2.0 / n) * (q[:, 0] - y)
            dw, db, _ = critic.backward(cache, dq[:, None])
            opt.step([*dw, *db])
        self.critic_updates += 1

        if self.critic_updates % cfg.policy_delay == 0:
            self._actor_step(s)
            self.soft_update()
            self.actor_updates += 1

    def _actor_step(self, s):
        n = s.shape[0]
        a_pi, a_cache = self.actor.forward(s, return_cache=True)
        q, q_cache = self.critics[0].forward(np.concatenate([s, a_pi], axis=1), return_cache=True)
        # Maximise mean Q: upstream of the loss -mean(Q) is -1/n per sample.
        _, _, dx = self.critics[0].backward(q_cache, np.full((n, 1), -1.0 / n))
        dw, db, _ = self.actor.backward(a_cache, dx[:, self.state_dim:])
        self.actor_opt.step([*dw, *db])

    def soft_update(self):
        tau = self.config.tau
        self.actor_target.polyak(self.actor, tau)
        for target, online in zip(self.critic_targets, self.critics):
            target.polyak(online, tau)


def moving_stats(values, window):
    """Trailing mean and std, ``None`` until ``window`` values exist."""
    out = []
    for i in range(len(values)):
        if i + 1 < window:
            out.append((None, None))
        else:
            w = np.asarray(values[i + 1 - window:i + 1])
            out.append((float(w.mean()), float(w.std())))
    return out


def td3_train(env, config: Td3Config, rng: RngStream, agent: Td3Agent | None = None):
    """Train on ``env`` and return one :class:`EpisodeLog` per episode.

    ``env`` needs ``state_dim``, ``action_dim``, ``reset()`` and
    ``step(action) -> (state, reward, done, info)``.  The episode's sum rate
    is the mean step reward; numeric ``info`` entries (e.g. the Shannon and
    FBL sums of a RIS environment) are averaged per episode into
    ``EpisodeLog.metrics``.  Early steps (``start_steps``) use uniform random
    actions to seed the replay buffer.
    """
    gen = rng.generator()
    if agent is None:
        agent = Td3Agent(env.state_dim, env.action_dim, config, gen)
    buffer = ReplayBuffer(config.buffer_size, env.state_dim, env.action_dim)

    rewards = []
    metrics = []
    total_steps = 0
    for _ in range(config.episodes):
        state = env.reset()
        ep = []
        extra = {}
        for _ in range(config.steps_per_episode):
            if total_steps < config.start_steps:
                action = gen.uniform(-1.0, 1.0, env.action_dim)
            else:
                action = agent.act(state, config.exploration_noise)
            next_state, reward, done, info = env.step(action)
            if not np.isfinite(reward):
                raise TrainingDiverged(f"non-finite reward {reward} at step {total_steps}")
            buffer.add(state, action, reward, next_state, done)
            ep.append(reward)
            for key, value in (info or {}).items():
                if np.isscalar(value):
                    extra.setdefault(key, []).append(float(value))
            state = next_state
            total_steps += 1
            if len(buffer) >= config.batch_size:
                agent.update(buffer.sample(config.batch_size, gen))
            if done:
                break
        rewards.append(float(np.mean(ep)))
        metrics.append({k: float(np.mean(v)) for k, v in extra.items()})

    stats = moving_stats(rewards, config.window)
    return [EpisodeLog(i, r, m, s, x) for i, (r, (m, s), x) in enumerate(zip(rewards, stats, metrics))]
