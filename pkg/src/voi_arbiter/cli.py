"""Command line front end: ``run``, ``compare`` and ``inspect``."""

from __future__ import annotations

import argparse
import logging
import sys
from collections import Counter
from functools import partial
from pathlib import Path

from .config import AGENT_CHOICES, ConfigError, RunConfig, load_config
from .environment import ACTION_NAMES, TaxiEnv, decode
from .harness import AGENT_KINDS, compare, run_experiment, run_single, write_json, write_records_csv
from .svg import Series, line_chart
from .value_store import argmax, load_qtable_csv

log = logging.getLogger("voi_arbiter")

# CLI flag -> RunConfig field
FLAG_FIELDS = {
    "alpha": "alpha",
    "gamma": "gamma",
    "depth": "max_depth",
    "rho": "rho",
    "voi_threshold": "voi_threshold",
    "voi_mult": "voi_mult",
    "epsilon": "epsilon",
    "history_window": "history_window",
    "runs": "num_runs",
    "episodes": "num_episodes",
    "seed": "base_seed",
    "agent": "agent",
    "out": "out_dir",
    "replay_capacity": "replay_capacity",
    "batch_size": "replay_batch_size",
    "max_steps": "max_steps",
    "workers": "workers",
}


def _add_run_flags(p: argparse.ArgumentParser, with_agent: bool) -> None:
    p.add_argument("--config", metavar="FILE", help="key=value configuration file")
    if with_agent:
        p.add_argument("--agent", choices=AGENT_CHOICES)
    p.add_argument("--alpha", type=float, help="learning rate, (0, 1]")
    p.add_argument("--gamma", type=float, help="discount, [0, 1]")
    p.add_argument("--depth", type=int, help="planning depth")
    p.add_argument("--rho", type=float, help="softmax inverse temperature")
    p.add_argument("--voi-threshold", type=float, help="initial VoI threshold")
    p.add_argument("--voi-mult", type=float, help="per-episode threshold multiplier")
    p.add_argument("--epsilon", type=float, help="VoI denominator offset")
    p.add_argument("--history-window", type=int, help="Q-value history length per pair")
    p.add_argument("--runs", type=int, help="independent runs")
    p.add_argument("--episodes", type=int, help="episodes per run")
    p.add_argument("--seed", type=int, help="base seed; run i uses seed+i")
    p.add_argument("--out", metavar="DIR", help="output directory (env VOI_ARBITER_OUT wins)")
    p.add_argument("--replay-capacity", type=int)
    p.add_argument("--batch-size", type=int, help="replay minibatch size")
    p.add_argument("--max-steps", type=int, help="episode step cap")
    p.add_argument("--workers", type=int, help="worker processes")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="voi-arbiter", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    _add_run_flags(sub.add_parser("run", help="train one agent kind over many seeds"), with_agent=True)
    _add_run_flags(sub.add_parser("compare", help="train all three agents and plot them"), with_agent=False)
    p = sub.add_parser("inspect", help="print the greedy policy of a saved Taxi Q-table")
    p.add_argument("qtable", help="Q-table CSV written by `run`")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    overrides = {field: getattr(args, flag, None) for flag, field in FLAG_FIELDS.items()}
    return load_config(args.config, overrides)


def _experiment_kwargs(cfg: RunConfig) -> dict:
    return dict(
        env_factory=partial(TaxiEnv, cfg.max_steps),
        replay_capacity=cfg.replay_capacity,
        replay_batch_size=cfg.replay_batch_size,
        workers=cfg.workers,
    )


def cmd_run(cfg: RunConfig) -> int:
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    acfg = cfg.arbiter_config()
    kwargs = _experiment_kwargs(cfg)
    summary = run_experiment(cfg.agent, acfg, cfg.num_runs, cfg.num_episodes, cfg.base_seed, **kwargs)
    rows = write_records_csv(out / f"{cfg.agent}_episodes.csv", summary)
    write_json(out / f"{cfg.agent}_summary.json", {"config": vars(cfg), **summary.to_dict()})
    (out / "run.conf").write_text(cfg.to_text())
    # the first run is deterministic in its seed, so replaying it recovers its final tables
    first = run_single(
        cfg.agent, acfg, cfg.num_episodes, cfg.base_seed,
        kwargs["env_factory"], cfg.replay_capacity, cfg.replay_batch_size,
    )
    first.q.to_csv(out / "qtable.csv")
    if first.model is not None:
        first.model.to_csv(out / "model.csv")
    print(f"{cfg.agent}: {cfg.num_runs} runs x {cfg.num_episodes} episodes, {rows} rows -> {out}")
    print(f"final-window reward {summary.final_mean:.2f} +/- {summary.final_std:.2f}")
    print(f"episodes to solve: {summary.episodes_to_solve}")
    return 0


def cmd_compare(cfg: RunConfig) -> int:
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    report = compare(AGENT_KINDS, cfg.arbiter_config(), cfg.num_runs, cfg.num_episodes, cfg.base_seed,
                     **_experiment_kwargs(cfg))
    write_json(out / "comparison.json", {"config": vars(cfg), **report.to_dict()})
    rewards = line_chart(
        [Series(k, s.mean_reward, s.std_reward) for k, s in report.summaries.items()],
        title="Average reward during training", ylabel="episode reward",
    )
    arb = report.summaries["arbiter"]
    arbitration = line_chart(
        [Series("model-based", arb.mean_mb), Series("model-free", arb.mean_mf)],
        title="MB/MF arbitration during training", ylabel="evaluations per episode",
    )
    (out / "rewards.svg").write_text(rewards)
    (out / "arbitration.svg").write_text(arbitration)
    for kind, s in report.summaries.items():
        print(f"{kind:10s} final {s.final_mean:8.2f} +/- {s.final_std:5.2f}  solved at {s.episodes_to_solve}")
    print("solve order:", " < ".join(report.solve_order()))
    return 0


def cmd_inspect(path: str) -> int:
    if not Path(path).is_file():
        raise FileNotFoundError(f"no such Q-table: {path}")
    table = load_qtable_csv(path, num_states=500, num_actions=6)
    actions = Counter()
    for s, row in enumerate(table):
        a = argmax(list(row))
        actions[a] += 1
        ts = decode(s)
        print(f"{s:3d} taxi=({ts.taxi_row},{ts.taxi_col}) passenger={ts.passenger_loc} "
              f"dest={ts.destination} -> {ACTION_NAMES[a]:7s} q={row[a]:.3f}")
    print(f"# Q mean {table.mean():.3f} min {table.min():.3f} max {table.max():.3f}")
    print("# greedy actions: " + ", ".join(f"{ACTION_NAMES[a]}={actions[a]}" for a in range(6)))
    return 0


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        if args.command == "inspect":
            return cmd_inspect(args.qtable)
        cfg = config_from_args(args)
        return cmd_run(cfg) if args.command == "run" else cmd_compare(cfg)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
