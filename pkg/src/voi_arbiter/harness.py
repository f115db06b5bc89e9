"""Seeded multi-run experiments, cross-run aggregation and result files."""

from __future__ import annotations

import csv
import json
import random
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .agents import (
    ArbiterConfig,
    EpisodeRecord,
    ReplayBuffer,
    run_episode_arbiter,
    run_episode_qlearning,
    run_episode_replay,
)
from .environment import DiscreteMDP, TaxiEnv
from .value_store import QStore
from .world_model import WorldModel

AGENT_KINDS = ("arbiter", "qlearning", "replay")
FINAL_WINDOW = 100
SOLVE_LEVEL = 0.0
CSV_FIELDS = ("run", "episode", "total_reward", "steps", "mb_evals", "mf_evals", "voi_threshold", "truncated")


@dataclass
class RunResult:
    seed: int
    records: list[EpisodeRecord]
    q: QStore
    model: WorldModel | None = None


def run_single(
    agent_kind: str,
    cfg: ArbiterConfig,
    num_episodes: int,
    seed: int,
    env_factory: Callable[[], DiscreteMDP] = TaxiEnv,
    replay_capacity: int = 50_000,
    replay_batch_size: int = 32,
) -> RunResult:
    """Train one fresh agent for ``num_episodes`` episodes from ``random.Random(seed)``."""
    if agent_kind not in AGENT_KINDS:
        raise ValueError(f"unknown agent {agent_kind!r}; expected one of {AGENT_KINDS}")
    env = env_factory()
    rng = random.Random(seed)
    q = QStore(env.num_states(), env.num_actions(), cfg.history_window)
    records = []
    model = None
    if agent_kind == "arbiter":
        model = WorldModel(env.num_states(), env.num_actions())
        threshold = cfg.voi_threshold
        for e in range(1, num_episodes + 1):
            rec, threshold = run_episode_arbiter(env, q, model, cfg, threshold, rng, e)
            records.append(rec)
    elif agent_kind == "qlearning":
        for e in range(1, num_episodes + 1):
            records.append(run_episode_qlearning(env, q, cfg, rng, e))
    else:
        buffer = ReplayBuffer(replay_capacity, replay_batch_size)
        for e in range(1, num_episodes + 1):
            records.append(run_episode_replay(env, q, buffer, cfg, rng, e))
    return RunResult(seed, records, q, model)


@dataclass
class ExperimentSummary:
    agent: str
    base_seed: int
    mean_reward: np.ndarray
    std_reward: np.ndarray
    mean_mb: np.ndarray
    mean_mf: np.ndarray
    final_mean: float
    final_std: float
    episodes_to_solve: int | None
    runs: list[list[EpisodeRecord]] = field(repr=False, default_factory=list)

    @property
    def num_runs(self) -> int:
        return len(self.runs)

    @property
    def num_episodes(self) -> int:
        return len(self.mean_reward)

    def reward_matrix(self) -> np.ndarray:
        return np.array([[r.total_reward for r in run] for run in self.runs], dtype=float)

    def mb_matrix(self) -> np.ndarray:
        return np.array([[r.mb_evals for r in run] for run in self.runs], dtype=float)

    def median_run_tail_mb(self, tail: int = 50) -> int:
        """MB evaluations over the last ``tail`` episodes of the median run (lower median)."""
        return int(statistics.median_low(self.mb_matrix()[:, -tail:].sum(axis=1)))

    def to_dict(self) -> dict:
        return {
            "agent": self.agent,
            "num_runs": self.num_runs,
            "num_episodes": self.num_episodes,
            "base_seed": self.base_seed,
            "mean_reward": self.mean_reward.tolist(),
            "std_reward": self.std_reward.tolist(),
            "mean_mb_evals": self.mean_mb.tolist(),
            "mean_mf_evals": self.mean_mf.tolist(),
            "final_window": min(FINAL_WINDOW, self.num_episodes),
            "final_mean": self.final_mean,
            "final_std": self.final_std,
            "episodes_to_solve": self.episodes_to_solve,
        }


def episodes_to_solve(curve: Sequence[float], window: int = FINAL_WINDOW, level: float = SOLVE_LEVEL) -> int | None:
    """First 1-based episode at which the trailing ``window``-episode mean reaches ``level``."""
    curve = np.asarray(curve, dtype=float)
    if len(curve) < window:
        return None
    csum = np.concatenate(([0.0], np.cumsum(curve)))
    window_sums = csum[window:] - csum[:-window]
    hits = np.flatnonzero(window_sums >= level * window)
    return int(hits[0]) + window if hits.size else None


def summarize(agent: str, runs: Sequence[Sequence[EpisodeRecord]], base_seed: int = 0) -> ExperimentSummary:
    """Aggregate per-run records (ordered by seed) into per-episode statistics."""
    if not runs:
        raise ValueError("need at least one run")
    lengths = {len(r) for r in runs}
    if len(lengths) != 1:
        raise ValueError(f"runs have different lengths: {sorted(lengths)}")
    rewards = np.array([[r.total_reward for r in run] for run in runs], dtype=float)
    mb = np.array([[r.mb_evals for r in run] for run in runs], dtype=float)
    mf = np.array([[r.mf_evals for r in run] for run in runs], dtype=float)
    window = min(FINAL_WINDOW, rewards.shape[1])
    per_run_final = rewards[:, -window:].mean(axis=1)
    mean_curve = rewards.mean(axis=0)
    return ExperimentSummary(
        agent=agent,
        base_seed=base_seed,
        mean_reward=mean_curve,
        std_reward=rewards.std(axis=0),
        mean_mb=mb.mean(axis=0),
        mean_mf=mf.mean(axis=0),
        final_mean=float(per_run_final.mean()),
        final_std=float(per_run_final.std()),
        episodes_to_solve=episodes_to_solve(mean_curve),
        runs=[list(r) for r in runs],
    )


def _run_records(args) -> list[EpisodeRecord]:
    return run_single(*args).records


def run_experiment(
    agent_kind: str,
    cfg: ArbiterConfig,
    num_runs: int,
    num_episodes: int,
    base_seed: int = 0,
    *,
    env_factory: Callable[[], DiscreteMDP] = TaxiEnv,
    replay_capacity: int = 50_000,
    replay_batch_size: int = 32,
    workers: int = 1,
) -> ExperimentSummary:
    """Run ``num_runs`` independent agents seeded ``base_seed + i`` and aggregate them.

    With ``workers > 1`` runs go to a process pool; results are merged by seed
    index, so the summary does not depend on completion order.
    """
    if num_runs < 1 or num_episodes < 1:
        raise ValueError("num_runs and num_episodes must both be >= 1")
    jobs = [
        (agent_kind, cfg, num_episodes, base_seed + i, env_factory, replay_capacity, replay_batch_size)
        for i in range(num_runs)
    ]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            runs = list(pool.map(_run_records, jobs))
    else:
        runs = [_run_records(job) for job in jobs]
    return summarize(agent_kind, runs, base_seed)


@dataclass
class ComparisonReport:
    summaries: dict[str, ExperimentSummary]

    def solve_order(self) -> list[str]:
        """Agents sorted by episodes_to_solve; agents that never solve go last."""
        inf = float("inf")
        return sorted(
            self.summaries,
            key=lambda k: inf if self.summaries[k].episodes_to_solve is None else self.summaries[k].episodes_to_solve,
        )

    def to_dict(self) -> dict:
        return {
            "agents": {k: s.to_dict() for k, s in self.summaries.items()},
            "solve_order": self.solve_order(),
        }


def compare(
    agents: Sequence[str],
    cfg: ArbiterConfig,
    num_runs: int,
    num_episodes: int,
    base_seed: int = 0,
    **kwargs,
) -> ComparisonReport:
    return ComparisonReport(
        {kind: run_experiment(kind, cfg, num_runs, num_episodes, base_seed, **kwargs) for kind in agents}
    )


def write_records_csv(path: str | Path, summary: ExperimentSummary) -> int:
    """One row per (run, episode). Returns the number of data rows written."""
    n = 0
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_FIELDS)
        for run_idx, run in enumerate(summary.runs):
            for r in run:
                writer.writerow(
                    [run_idx, r.episode_index, r.total_reward, r.steps, r.mb_evals, r.mf_evals,
                     r.voi_threshold, int(r.truncated)]
                )
                n += 1
    return n


def write_json(path: str | Path, payload: dict) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, allow_nan=True)
