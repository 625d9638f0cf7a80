"""Run every verification stage and write the reports as JSON lines.

    python scripts/run_stages.py --out results/stages.jsonl --trials 20
"""

import argparse
import json
from dataclasses import asdict, dataclass
from pathlib import Path

from qmrel import relations as rel
from qmrel.cli import STAGE_ORDER


@dataclass
class StageRun:
    out: str = "results/stages.jsonl"
    trials: int = 20
    seed: int = 0
    order: str = "degrevlex"


def run(cfg: StageRun) -> bool:
    gb = rel.default_basis(order=cfg.order)
    path = Path(cfg.out)
    path.parent.mkdir(parents=True, exist_ok=True)
    ok = True
    with path.open("w") as fh:
        fh.write(json.dumps({"config": asdict(cfg)}) + "\n")
        for stage in STAGE_ORDER:
            if stage == "trivial":
                rep = rel.trivial_relation_check(gb)
            else:
                rep = rel.STAGES[stage](gb, None, cfg.trials, cfg.seed)
            print(rep.summary(), flush=True)
            fh.write(rep.to_json(default=str) + "\n")
            ok &= rep.passed
    return ok


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    for name, default in asdict(StageRun()).items():
        p.add_argument(f"--{name}", type=type(default), default=default)
    cfg = StageRun(**vars(p.parse_args()))
    raise SystemExit(0 if run(cfg) else 2)


if __name__ == "__main__":
    main()
