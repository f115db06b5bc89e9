"""Tabular Q-values with bounded per-pair histories, variance statistics and softmax selection."""

from __future__ import annotations

import csv
import math
import random
from collections import deque
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np


def population_variance(values: Iterable[float]) -> float:
    """Biased (divide-by-n) variance; 0 for fewer than two values."""
    xs = values if isinstance(values, (list, tuple)) else list(values)
    n = len(xs)
    if n < 2:
        return 0.0
    mean = sum(xs) / n
    return sum((x - mean) * (x - mean) for x in xs) / n


@dataclass(frozen=True)
class SoftmaxParams:
    rho: float = 0.9

    def __post_init__(self) -> None:
        if not self.rho > 0:
            raise ValueError(f"inverse temperature must be positive, got {self.rho}")


def softmax_probs(values: Sequence[float], rho: float) -> list[float]:
    top = max(values)
    weights = [math.exp(rho * (v - top)) for v in values]
    total = sum(weights)
    return [w / total for w in weights]


def sample_index(probs: Sequence[float], rng: random.Random) -> int:
    u = rng.random()
    acc = 0.0
    for i, p in enumerate(probs):
        acc += p
        if u < acc:
            return i
    # u landed in the rounding slack above the final cumulative sum
    return len(probs) - 1


def argmax(values: Sequence[float]) -> int:
    """Index of the largest value, lowest index on ties."""
    best = 0
    top = values[0]
    for i in range(1, len(values)):
        if values[i] > top:
            top = values[i]
            best = i
    return best


class QStore:
    """Q-table plus a ring buffer of the last ``window`` committed values of each pair.

    Rows are plain Python lists; element access is on the hot path of every agent.
    """

    def __init__(self, num_states: int, num_actions: int, window: int = 10) -> None:
        if window < 1:
            raise ValueError(f"history window must be positive, got {window}")
        self.num_states = num_states
        self.num_actions = num_actions
        self.window = window
        self.q = [[0.0] * num_actions for _ in range(num_states)]
        self.history = [
            [deque(maxlen=window) for _ in range(num_actions)] for _ in range(num_states)
        ]

    def read_q(self, s: int, a: int) -> float:
        return self.q[s][a]

    def write_q(self, s: int, a: int, value: float) -> None:
        self.q[s][a] = value
        self.history[s][a].append(value)

    def pair_uncertainty(self, s: int, a: int) -> float:
        """Population variance of the recent values of (s, a); 0 below two entries."""
        hist = self.history[s][a]
        n = len(hist)
        if n < 2:
            return 0.0
        mean = sum(hist) / n
        return sum((x - mean) * (x - mean) for x in hist) / n

    def state_spread(self, s: int) -> float:
        """Population variance of the current action values of state ``s``."""
        return population_variance(self.q[s])

    def softmax_select(self, s: int, params: SoftmaxParams, rng: random.Random) -> int:
        return sample_index(softmax_probs(self.q[s], params.rho), rng)

    def greedy_action(self, s: int) -> int:
        return argmax(self.q[s])

    def greedy_policy(self) -> list[int]:
        return [argmax(row) for row in self.q]

    def as_array(self) -> np.ndarray:
        return np.array(self.q, dtype=float)

    def to_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            for row in self.q:
                writer.writerow([repr(v) for v in row])

    @classmethod
    def from_array(cls, table: np.ndarray | Sequence[Sequence[float]], window: int = 10) -> "QStore":
        arr = np.asarray(table, dtype=float)
        if arr.ndim != 2:
            raise ValueError(f"expected a 2-d table, got shape {arr.shape}")
        store = cls(arr.shape[0], arr.shape[1], window)
        store.q = [[float(v) for v in row] for row in arr]
        return store


def load_qtable_csv(path: str | Path, num_states: int | None = None, num_actions: int | None = None) -> np.ndarray:
    """Read a Q-table CSV (one row per state). Raises ValueError on shape or parse problems."""
    rows = []
    with open(path, newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row:
                continue
            try:
                rows.append([float(x) for x in row])
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: non-numeric entry ({exc})") from None
    if not rows:
        raise ValueError(f"{path}: empty Q-table")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise ValueError(f"{path}: ragged rows")
    expected = (num_states or len(rows), num_actions or width)
    if (len(rows), width) != expected:
        raise ValueError(
            f"{path}: expected a {expected[0]}x{expected[1]} table, got {len(rows)}x{width}"
        )
    return np.array(rows, dtype=float)
