"""Win rate of every strategy against every adversary.

    python3 scripts/scramble_sweep.py --trials 2000 --seed 1
"""
from __future__ import annotations

import argparse
import json
import math
from dataclasses import asdict, dataclass

from framefree.games import ADVERSARIES, STRATEGIES, run_trials


@dataclass(frozen=True)
class SweepConfig:
    trials: int = 2000
    seed: int = 20031
    strategies: tuple[str, ...] = STRATEGIES
    adversaries: tuple[str, ...] = ADVERSARIES


def sweep(cfg: SweepConfig) -> list[dict]:
    rows = []
    for strategy in cfg.strategies:
        for adversary in cfg.adversaries:
            recs = run_trials(strategy, adversary, cfg.trials, cfg.seed)
            rate = sum(r.win for r in recs) / cfg.trials
            rows.append({
                "strategy": strategy,
                "adversary": adversary,
                "win_rate": rate,
                # normal-approximation standard error
                "stderr": math.sqrt(rate * (1 - rate) / cfg.trials),
            })
    return rows


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--trials", type=int, default=SweepConfig.trials)
    p.add_argument("--seed", type=int, default=SweepConfig.seed)
    args = p.parse_args()
    cfg = SweepConfig(trials=args.trials, seed=args.seed)
    print(json.dumps({"config": asdict(cfg), "results": sweep(cfg)}, indent=2))


if __name__ == "__main__":
    main()
