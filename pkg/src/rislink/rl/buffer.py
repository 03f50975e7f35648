"""Fixed-capacity FIFO replay memory."""

from __future__ import annotations

import numpy as np

from rislink.numerics import ParameterError


class ReplayBuffer:
    def __init__(self, capacity, state_dim, action_dim):
        if capacity < 1:
            raise ParameterError("capacity must be positive")
        self.capacity = int(capacity)
        self.states = np.zeros((capacity, state_dim))
        self.actions = np.zeros((capacity, action_dim))
        self.rewards = np.zeros(capacity)
        self.next_states = np.zeros((capacity, state_dim))
        self.dones = np.zeros(capacity)
        self._next = 0
        self._size = 0
        # Insertion counter of each slot, used to check FIFO eviction.
        self.ids = np.full(capacity, -1, dtype=np.int64)
        self._count = 0

    def __len__(self):
        return self._size

    def add(self, state, action, reward, next_state, done):
        i = self._next
        self.states[i] = state
        self.actions[i] = action
        self.rewards[i] = reward
        self.next_states[i] = next_state
        self.dones[i] = float(done)
        self.ids[i] = self._count
        self._count += 1
        self._next = (i + 1) % self.capacity
        self._size = min(self._size + 1, self.capacity)

    def sample(self, batch_size, rng: np.random.Generator):
        """Uniform batch, no index repeated within the batch."""
        if batch_size > self._size:
            raise ParameterError(f"cannot draw {batch_size} from {self._size} transitions")
        idx = rng.choice(self._size, size=batch_size, replace=False)
        return (
            self.states[idx],
            self.actions[idx],
            self.rewards[idx],
            self.next_states[idx],
            self.dones[idx],
        )
