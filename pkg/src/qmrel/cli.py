"""Command-line entry point: ``qmrel gb | verify STAGE | quat SUB``.

Exit codes: 0 success, 1 usage or validation error, 2 a checked claim failed,
3 resource budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass
from pathlib import Path

from . import quatalg as qa
from . import relations as rel
from .errors import BudgetExceeded, CacheError, ConstructionError, QMRelError, UsageError
from .groebner import Budget, load_basis, save_basis, sp4_basis
from .polyring import VarTable
from .symmat import X_NAMES

EXIT_OK, EXIT_USAGE, EXIT_CLAIM, EXIT_BUDGET = 0, 1, 2, 3
DEFAULT_BASIS = "basis.gb"
STAGE_ORDER = ("arch1", "arch2", "ord1", "ord2", "ssing", "shapes", "trivial")


@dataclass
class RunConfig:
    order: str = "degrevlex"
    basis_path: str | None = None
    json: bool = False
    seed: int = 0
    trials: int = 20
    max_steps: int | None = None

    def budget(self) -> Budget:
        b = Budget.from_env()
        if self.max_steps is not None:
            b.max_steps = self.max_steps
        return b


def _emit(config: RunConfig, payload: dict, text: str):
    if config.json:
        print(json.dumps(payload, indent=2, default=str))
    else:
        print(text)


# -- gb ---------------------------------------------------------------------------------


def cmd_gb(config: RunConfig, out: str, force: bool = False) -> int:
    vt = VarTable(X_NAMES)
    path = Path(out)
    if path.exists() and not force:
        try:
            cached = load_basis(path, vt, config.budget())
        except (CacheError, UsageError) as e:
            print(f"existing cache rejected ({e}); recomputing", file=sys.stderr)
        else:
            if cached.order.name == config.order:
                _emit(config, {"path": str(path), "size": len(cached), "status": "up to date"},
                      f"{path}: up to date ({len(cached)} elements, order {config.order})")
                return EXIT_OK
    t = time.perf_counter()
    gb = sp4_basis(vt, config.order, budget=config.budget())
    secs = time.perf_counter() - t
    save_basis(gb, path)
    _emit(config, {"path": str(path), "size": len(gb), "order": config.order, "seconds": secs,
                   "status": "written"},
          f"wrote {path}: {len(gb)} elements, order {config.order}, {secs:.2f}s")
    return EXIT_OK


# -- verify ------------------------------------------------------------------------------


def _basis_for_stages(config: RunConfig):
    path = Path(config.basis_path or DEFAULT_BASIS)
    if not path.exists():
        raise UsageError(f"no basis cache at {path}; run `qmrel gb --out {path}` first")
    return load_basis(path, rel.relation_table(), config.budget())


def cmd_verify(stage: str, config: RunConfig) -> int:
    stages = STAGE_ORDER if stage == "all" else (stage,)
    gb = _basis_for_stages(config) if any(s in rel.NEEDS_BASIS + ("trivial",) for s in stages) else None
    reports = []
    for s in stages:
        if s == "trivial":
            reports.append(rel.trivial_relation_check(gb, config.budget()))
        else:
            reports.append(rel.STAGES[s](gb, config.budget(), config.trials, config.seed))
    if config.json:
        payload = reports[0].to_dict() if len(reports) == 1 else [r.to_dict() for r in reports]
        print(json.dumps(payload, indent=2, default=str))
    else:
        print("\n".join(r.summary() for r in reports))
    failed = [(r.stage, f) for r in reports for f in r.failures()]
    for st, f in failed:
        print(f"claim failed [{st}]: {f}", file=sys.stderr)
    return EXIT_CLAIM if failed else EXIT_OK


# -- quat --------------------------------------------------------------------------------


def _coords(text: str) -> tuple:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 4:
        raise UsageError(f"expected four comma-separated coordinates, got {text!r}")
    return tuple(qa.rational(p) for p in parts)


def _need(args, *names):
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        raise UsageError("missing option(s): " + ", ".join("--" + m for m in missing))


def _checklist(checks: dict) -> str:
    return "\n".join(f"  [{'x' if v else ' '}] {k}" for k, v in checks.items())


def cmd_quat(sub: str, args, config: RunConfig) -> int:
    if sub == "find-q":
        _need(args, "delta")
        q = qa.find_q(args.delta)
        checks = qa.presentation_conditions(q, args.delta)
        _emit(config, {"delta": args.delta, "q": q, "checks": checks}, f"q = {q}\n{_checklist(checks)}")
        return EXIT_OK if all(checks.values()) else EXIT_CLAIM
    if sub == "find-mu":
        _need(args, "q", "delta", "lam", "alpha")
        r = qa.mu_construction(args.q, args.delta, args.lam, _coords(args.alpha))
        payload = {"mu": str(r.mu), "triple": r.triple, "N": r.N, "bound": r.bound, "case": r.case,
                   "mu_squared": r.epsilon, "disc": r.disc, "checks": r.checks, "notes": r.notes}
        text = (f"mu = {r.mu}\nmu^2 = {r.epsilon}\ncase {r.case}, N = {r.N}\n{_checklist(r.checks)}"
                + "".join(f"\nnote: {n}" for n in r.notes))
        _emit(config, payload, text)
        return EXIT_OK
    if sub == "rosati":
        _need(args, "q", "delta", "alpha", "x")
        A = qa.QuatAlgebra(args.q, args.delta)
        alpha = A.element(*_coords(args.alpha))
        x = A.element(*_coords(args.x))
        y = qa.rosati(x, alpha)
        back = qa.rosati(y, alpha)
        payload = {"x": str(x), "alpha": str(alpha), "rosati": str(y), "involutive": back == x}
        _emit(config, payload, f"rosati({x}) = {y}\ninvolutive on x: {back == x}")
        return EXIT_OK
    if sub == "check-unramified":
        _need(args, "p", "q", "delta")
        ok = qa.unramified_pair_check(args.p, args.q, args.delta)
        _emit(config, {"p": args.p, "q": args.q, "delta": args.delta, "unramified": ok},
              "true" if ok else "false")
        return EXIT_OK if ok else EXIT_CLAIM
    raise UsageError(f"unknown quat subcommand {sub!r}")


# -- parser ------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qmrel", description=__doc__.splitlines()[0])
    p.add_argument("--budget", type=int, default=None, help="reduction step cap (overrides QMREL_BUDGET)")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gb", help="compute and cache the reduced basis of the SP4 ideal")
    g.add_argument("--order", choices=("degrevlex", "lex"), default="degrevlex")
    g.add_argument("--out", default=DEFAULT_BASIS)
    g.add_argument("--force", action="store_true", help="recompute even if the cache is valid")
    g.add_argument("--json", action="store_true")

    v = sub.add_parser("verify", help="run a verification stage")
    v.add_argument("stage", choices=STAGE_ORDER + ("all",))
    v.add_argument("--basis", default=None)
    v.add_argument("--trials", type=int, default=20)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--json", action="store_true")

    q = sub.add_parser("quat", help="quaternion-algebra constructions")
    q.add_argument("sub", choices=("find-q", "find-mu", "rosati", "check-unramified"))
    q.add_argument("--delta", type=int)
    q.add_argument("--q", type=int)
    q.add_argument("--p", type=int)
    q.add_argument("--lambda", dest="lam", choices=("i", "j", "k"))
    q.add_argument("--alpha", help="t,y,z,w coordinates")
    q.add_argument("--x", help="t,y,z,w coordinates of the element to conjugate")
    q.add_argument("--json", action="store_true")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_USAGE
    config = RunConfig(json=getattr(args, "json", False), max_steps=args.budget)
    try:
        if args.command == "gb":
            config.order = args.order
            return cmd_gb(config, args.out, args.force)
        if args.command == "verify":
            config.basis_path, config.trials, config.seed = args.basis, args.trials, args.seed
            if config.trials < 1:
                raise UsageError("--trials must be positive")
            return cmd_verify(args.stage, config)
        return cmd_quat(args.sub, args, config)
    except BudgetExceeded as e:
        print(f"budget exceeded: {e}\nprogress: {e.progress}", file=sys.stderr)
        return EXIT_BUDGET
    except ConstructionError as e:
        print(f"construction failed: {e}", file=sys.stderr)
        return EXIT_CLAIM
    except (UsageError, CacheError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except QMRelError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
