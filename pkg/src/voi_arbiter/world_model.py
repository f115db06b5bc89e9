"""Count-based transition/reward model and depth-limited Bellman lookahead over it."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

from .environment import Transition
from .value_store import QStore


@dataclass(frozen=True)
class PlanConfig:
    max_depth: int = 2
    gamma: float = 0.9

    def __post_init__(self) -> None:
        if self.max_depth < 0:
            raise ValueError(f"max_depth must be >= 0, got {self.max_depth}")
        if not 0.0 <= self.gamma <= 1.0:
            raise ValueError(f"gamma must lie in [0, 1], got {self.gamma}")


class WorldModel:
    """Sparse visit counts ``(s, a) -> {s': count}`` with summed rewards and terminal flags.

    Only real experience enters the model; planning reads it and never writes to it.
    """

    def __init__(self, num_states: int, num_actions: int) -> None:
        self.num_states = num_states
        self.num_actions = num_actions
        self.counts: dict[tuple[int, int], dict[int, int]] = {}
        self.reward_sum: dict[tuple[int, int, int], float] = {}
        self.terminal_flag: dict[tuple[int, int, int], bool] = {}
        # (s, a) -> [(prob, mean reward, terminal, s'), ...], rebuilt on observe
        self._outcomes: dict[tuple[int, int], list[tuple[float, float, bool, int]]] = {}

    def observe(self, s: int, a: int, t: Transition) -> None:
        key = (s, a)
        succ = self.counts.setdefault(key, {})
        s2 = t.next_state
        succ[s2] = succ.get(s2, 0) + 1
        rkey = (s, a, s2)
        self.reward_sum[rkey] = self.reward_sum.get(rkey, 0.0) + t.reward
        self.terminal_flag[rkey] = bool(t.terminal)
        total = sum(succ.values())
        self._outcomes[key] = [
            (n / total, self.reward_sum[(s, a, nxt)] / n, self.terminal_flag[(s, a, nxt)], nxt)
            for nxt, n in succ.items()
        ]

    def is_observed(self, s: int, a: int) -> bool:
        return (s, a) in self.counts

    def transition_probs(self, s: int, a: int) -> dict[int, float]:
        return {nxt: p for p, _, _, nxt in self._outcomes.get((s, a), ())}

    def reward_estimate(self, s: int, a: int, s2: int) -> float:
        return self.reward_sum[(s, a, s2)] / self.counts[(s, a)][s2]

    def plan_backup(self, s: int, a: int, depth: int, q: QStore, cfg: PlanConfig) -> float:
        """Depth-limited Bellman backup of (s, a); the result is written into ``q``.

        Leaves at depth 0 and pairs the model has never seen take their cached Q-value.
        Within one call the Q-table is read-only, so state values are memoised per
        (state, remaining depth).
        """
        if depth < 0:
            raise ValueError(f"depth must be >= 0, got {depth}")
        value = self._backup(s, a, depth, q.q, cfg.gamma, {})
        q.write_q(s, a, value)
        return value

    def _backup(self, s, a, depth, table, gamma, memo) -> float:
        outcomes = self._outcomes.get((s, a)) if depth > 0 else None
        if outcomes is None:
            return table[s][a]
        total = 0.0
        for prob, reward, terminal, nxt in outcomes:
            if terminal:
                total += prob * reward
            else:
                total += prob * (reward + gamma * self._state_value(nxt, depth - 1, table, gamma, memo))
        return total

    def _state_value(self, s, depth, table, gamma, memo) -> float:
        if depth == 0:
            return max(table[s])
        key = (s, depth)
        cached = memo.get(key)
        if cached is None:
            cached = max(self._backup(s, b, depth, table, gamma, memo) for b in range(self.num_actions))
            memo[key] = cached
        return cached

    def to_csv(self, path: str | Path) -> None:
        """Dump the learned model as rows ``s, a, s', P(s'|s,a), R(s,a,s')``."""
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["s", "a", "s_next", "prob", "reward"])
            for (s, a) in sorted(self._outcomes):
                for prob, reward, _, nxt in sorted(self._outcomes[(s, a)], key=lambda o: o[3]):
                    writer.writerow([s, a, nxt, repr(prob), repr(reward)])
