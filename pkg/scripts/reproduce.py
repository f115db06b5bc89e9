"""Train all three agents under the default hyperparameters and report the headline numbers.

    python scripts/reproduce.py --runs 100 --episodes 500 --out results/reproduction
"""

import argparse
import time
from pathlib import Path

from voi_arbiter.cli import main as cli_main


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--runs", type=int, default=100)
    parser.add_argument("--episodes", type=int, default=500)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", default="results/reproduction")
    args = parser.parse_args()

    Path(args.out).mkdir(parents=True, exist_ok=True)
    start = time.perf_counter()
    status = cli_main([
        "compare", "--runs", str(args.runs), "--episodes", str(args.episodes),
        "--seed", str(args.seed), "--out", args.out,
    ])
    print(f"elapsed {time.perf_counter() - start:.0f}s; plots and comparison.json in {args.out}")
    raise SystemExit(status)


if __name__ == "__main__":
    main()
