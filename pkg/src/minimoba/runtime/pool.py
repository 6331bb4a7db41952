"""Bounded in-memory trajectory store with circular-queue eviction."""

from __future__ import annotations

import threading

import numpy as np


class MemoryPool:
    """Holds serialized trajectories. When full, the oldest entry is
    overwritten; readers sample uniformly from current contents."""

    def __init__(self, capacity: int):
        if capacity < 1:
            raise ValueError("capacity must be >= 1")
        self.capacity = capacity
        self._buf: list[bytes | None] = [None] * capacity
        self._next = 0
        self._size = 0
        self._lock = threading.Lock()
        self.pushed = 0
        self.evicted = 0

    def __len__(self) -> int:
        with self._lock:
            return self._size

    def push(self, item: bytes) -> None:
        with self._lock:
            if self._size == self.capacity:
                self.evicted += 1
            else:
                self._size += 1
            self._buf[self._next] = item
            self._next = (self._next + 1) % self.capacity
            self.pushed += 1

    def sample(self, k: int, rng: np.random.Generator) -> list[bytes]:
        """k items drawn without replacement; raises if fewer are stored."""
        with self._lock:
            if k > self._size:
                raise ValueError(f"pool holds {self._size} < {k} requested")
            idx = rng.choice(self._size, size=k, replace=False)
            if self._size == self.capacity:
                # oldest entry sits at _next; order within buffer is circular
                return [self._buf[(self._next + int(i)) % self.capacity] for i in idx]
            return [self._buf[int(i)] for i in idx]

    def stats(self) -> dict:
        with self._lock:
            return {"size": self._size, "capacity": self.capacity,
                    "pushed": self.pushed, "evicted": self.evicted}
