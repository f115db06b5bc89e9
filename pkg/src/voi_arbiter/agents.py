"""VoI arbiter, plain Q-learning and Q-learning with experience replay.

All three share one episode skeleton and consume a single ``random.Random``
stream per run in a fixed order: the reset draw, then one softmax draw per
step, then (replay agent only) the minibatch indices for that step.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

from .environment import DiscreteMDP
from .value_store import QStore, SoftmaxParams, population_variance, sample_index, softmax_probs
from .world_model import PlanConfig, WorldModel


@dataclass(frozen=True)
class ArbiterConfig:
    alpha: float = 0.8
    gamma: float = 0.9
    max_depth: int = 2
    rho: float = 0.9
    voi_threshold: float = 0.1
    voi_mult: float = 1.005
    epsilon: float = 1e-6
    history_window: int = 10

    def __post_init__(self) -> None:
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in (0, 1], got {self.alpha}")
        if not 0.0 <= self.gamma <= 1.0:
            raise ValueError(f"gamma must lie in [0, 1], got {self.gamma}")
        if self.max_depth < 0:
            raise ValueError(f"max_depth must be >= 0, got {self.max_depth}")
        if not self.rho > 0:
            raise ValueError(f"rho must be positive, got {self.rho}")
        if not self.epsilon > 0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        if not self.voi_mult >= 1.0:
            raise ValueError(f"voi_mult must be >= 1, got {self.voi_mult}")
        if math.isnan(self.voi_threshold) or self.voi_threshold < 0:
            raise ValueError(f"voi_threshold must be >= 0, got {self.voi_threshold}")
        if self.history_window < 1:
            raise ValueError(f"history_window must be positive, got {self.history_window}")

    @property
    def plan(self) -> PlanConfig:
        return PlanConfig(self.max_depth, self.gamma)

    @property
    def softmax(self) -> SoftmaxParams:
        return SoftmaxParams(self.rho)


@dataclass(slots=True)
class StepTrace:
    mb_evals: int = 0
    mf_evals: int = 0


@dataclass
class EpisodeRecord:
    episode_index: int
    total_reward: float
    steps: int
    mb_evals: int = 0
    mf_evals: int = 0
    voi_threshold: float = math.nan
    truncated: bool = False


class ReplayBuffer:
    """Ring buffer of ``(s, a, r, s', terminal)`` tuples; at capacity the oldest entry is overwritten.

    Backed by a list so uniform sampling is O(1) per draw.
    """

    def __init__(self, capacity: int = 50_000, batch_size: int = 32) -> None:
        if capacity < 1:
            raise ValueError(f"capacity must be positive, got {capacity}")
        if batch_size < 0:
            raise ValueError(f"batch_size must be >= 0, got {batch_size}")
        self.capacity = capacity
        self.batch_size = batch_size
        self._entries: list[tuple] = []
        self._next = 0

    def __len__(self) -> int:
        return len(self._entries)

    def push(self, s: int, a: int, r: float, s_next: int, terminal: bool) -> None:
        item = (s, a, r, s_next, terminal)
        if len(self._entries) < self.capacity:
            self._entries.append(item)
        else:
            self._entries[self._next] = item
            self._next = (self._next + 1) % self.capacity

    def entries(self) -> list[tuple]:
        """Stored transitions, oldest first."""
        return self._entries[self._next:] + self._entries[: self._next]

    def can_sample(self) -> bool:
        return self.batch_size > 0 and len(self._entries) >= self.batch_size

    def sample(self, rng: random.Random) -> list[tuple]:
        """Uniform draw of ``batch_size`` entries with replacement."""
        return rng.choices(self._entries, k=self.batch_size)


def voi(s: int, a: int, q: QStore, cfg: ArbiterConfig) -> float:
    """Value of re-evaluating (s, a): recent variance of Q(s, a) over the spread of the row."""
    return q.pair_uncertainty(s, a) / (q.state_spread(s) + cfg.epsilon)


def q_update(s: int, a: int, r: float, s_next: int, terminal: bool, q: QStore, cfg: ArbiterConfig) -> None:
    target = r if terminal else r + cfg.gamma * max(q.q[s_next])
    old = q.q[s][a]
    q.write_q(s, a, old + cfg.alpha * (target - old))


def arbiter_decide(
    s: int,
    q: QStore,
    model: WorldModel,
    cfg: ArbiterConfig,
    threshold: float,
    rng: random.Random,
) -> tuple[int, StepTrace]:
    """Gate each action of ``s`` between a model-based backup and its cached value, then act.

    A pair seen for the first time gets one forced model-based evaluation whose
    result, together with the cached value, seeds its history. The forced
    evaluation is skipped when ``threshold`` is infinite so that the gate can be
    switched off completely.
    """
    trace = StepTrace()
    plan_cfg = cfg.plan
    row = q.q[s]
    cold_start = not math.isinf(threshold)
    spread = population_variance(row)
    for a in range(q.num_actions):
        if cold_start and not q.history[s][a]:
            q.write_q(s, a, row[a])
            model.plan_backup(s, a, cfg.max_depth, q, plan_cfg)
            spread = population_variance(row)
            trace.mb_evals += 1
            continue
        value = q.pair_uncertainty(s, a) / (spread + cfg.epsilon)
        if value >= threshold:
            model.plan_backup(s, a, cfg.max_depth, q, plan_cfg)
            spread = population_variance(row)
            trace.mb_evals += 1
        else:
            trace.mf_evals += 1
    action = sample_index(softmax_probs(row, cfg.rho), rng)
    return action, trace


def run_episode_arbiter(
    env: DiscreteMDP,
    q: QStore,
    model: WorldModel,
    cfg: ArbiterConfig,
    threshold: float,
    rng: random.Random,
    episode_index: int = 0,
) -> tuple[EpisodeRecord, float]:
    """One episode of the VoI arbiter; returns the record and the annealed threshold."""
    record = EpisodeRecord(episode_index, 0.0, 0, voi_threshold=threshold)
    s = env.reset(rng)
    terminal = False
    while record.steps < env.max_steps:
        a, trace = arbiter_decide(s, q, model, cfg, threshold, rng)
        record.mb_evals += trace.mb_evals
        record.mf_evals += trace.mf_evals
        t = env.step(s, a)
        model.observe(s, a, t)
        q_update(s, a, t.reward, t.next_state, t.terminal, q, cfg)
        record.total_reward += t.reward
        record.steps += 1
        terminal = t.terminal
        if terminal:
            break
        s = t.next_state
    record.truncated = not terminal
    return record, threshold * cfg.voi_mult


def run_episode_qlearning(
    env: DiscreteMDP,
    q: QStore,
    cfg: ArbiterConfig,
    rng: random.Random,
    episode_index: int = 0,
) -> EpisodeRecord:
    return run_episode_replay(env, q, None, cfg, rng, episode_index)


def run_episode_replay(
    env: DiscreteMDP,
    q: QStore,
    buffer: ReplayBuffer | None,
    cfg: ArbiterConfig,
    rng: random.Random,
    episode_index: int = 0,
) -> EpisodeRecord:
    """Softmax Q-learning; with a buffer, every real update is followed by one replayed minibatch."""
    record = EpisodeRecord(episode_index, 0.0, 0)
    rho = cfg.rho
    s = env.reset(rng)
    terminal = False
    while record.steps < env.max_steps:
        a = sample_index(softmax_probs(q.q[s], rho), rng)
        t = env.step(s, a)
        q_update(s, a, t.reward, t.next_state, t.terminal, q, cfg)
        if buffer is not None:
            buffer.push(s, a, t.reward, t.next_state, t.terminal)
            if buffer.can_sample():
                for bs, ba, br, bn, bt in buffer.sample(rng):
                    q_update(bs, ba, br, bn, bt, q, cfg)
        record.total_reward += t.reward
        record.steps += 1
        terminal = t.terminal
        if terminal:
            break
        s = t.next_state
    record.truncated = not terminal
    return record
