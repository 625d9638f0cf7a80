"""Sweep the mu construction over an alpha grid and tabulate failures per case.

    python scripts/mu_sweep.py --radius 3 --pairs 5:6 13:10 53:15 13:35
"""

import argparse
from collections import Counter
from dataclasses import dataclass, field

from qmrel.quatalg import find_q, mu_sweep


@dataclass
class SweepConfig:
    radius: int = 2
    pairs: list = field(default_factory=lambda: [(find_q(d), d) for d in (6, 10, 15)])
    show: int = 5


def sweep(cfg: SweepConfig) -> int:
    total_failures = 0
    for q, delta in cfg.pairs:
        seen, failed = Counter(), Counter()
        examples = []
        for lam, coords, r in mu_sweep(q, delta, cfg.radius):
            if isinstance(r, Exception):
                failed[lam] += 1
                if len(examples) < cfg.show:
                    examples.append(f"    lambda={lam} alpha={coords}: {r}")
            else:
                seen[r.case] += 1
        total_failures += sum(failed.values())
        print(f"(q, delta) = ({q}, {delta}), radius {cfg.radius}")
        for case, n in sorted(seen.items()):
            print(f"  ok   {case:<12} {n}")
        for lam, n in sorted(failed.items()):
            print(f"  FAIL lambda={lam:<6} {n}")
        print("\n".join(examples))
    return total_failures


def _pair(text: str) -> tuple:
    q, d = text.split(":")
    return int(q), int(d)


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--radius", type=int, default=SweepConfig.radius)
    p.add_argument("--pairs", type=_pair, nargs="+", default=None, help="q:delta pairs")
    p.add_argument("--show", type=int, default=SweepConfig.show)
    a = p.parse_args()
    cfg = SweepConfig(radius=a.radius, show=a.show) if a.pairs is None else SweepConfig(a.radius, a.pairs, a.show)
    raise SystemExit(1 if sweep(cfg) else 0)


if __name__ == "__main__":
    main()
