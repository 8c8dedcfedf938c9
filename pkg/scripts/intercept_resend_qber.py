"""QBER of logical secret sharing with and without an intercept-resend eavesdropper, over several seeds.

    python3 scripts/intercept_resend_qber.py --rounds 10000 --seeds 5
"""
from __future__ import annotations

import argparse
import json
import statistics
from dataclasses import asdict, dataclass

from framefree.tasks import EAVESDROPPERS, secret_share


@dataclass(frozen=True)
class QberConfig:
    rounds: int = 10_000
    seeds: int = 5
    first_seed: int = 20031
    adversary: str = "scramble_all"


def run(cfg: QberConfig) -> dict:
    out = {}
    for eve in EAVESDROPPERS:
        results = [
            secret_share(cfg.rounds, cfg.first_seed + k, cfg.adversary, eve) for k in range(cfg.seeds)
        ]
        qbers = [r.qber for r in results]
        out[eve] = {
            "qber": qbers,
            "qber_mean": statistics.fmean(qbers),
            "qber_stdev": statistics.stdev(qbers) if len(qbers) > 1 else 0.0,
            "sift_rate_mean": statistics.fmean(r.sift_rate for r in results),
            "mi_alice_bob_mean": statistics.fmean(r.mutual_information(1) for r in results),
        }
    return out


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--rounds", type=int, default=QberConfig.rounds)
    p.add_argument("--seeds", type=int, default=QberConfig.seeds)
    p.add_argument("--first-seed", type=int, default=QberConfig.first_seed)
    p.add_argument("--adversary", default=QberConfig.adversary)
    args = p.parse_args()
    cfg = QberConfig(args.rounds, args.seeds, args.first_seed, args.adversary)
    print(json.dumps({"config": asdict(cfg), "results": run(cfg)}, indent=2))


if __name__ == "__main__":
    main()
