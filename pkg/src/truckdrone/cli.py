"""Command-line front end: solve, sweep, generate, oracle, export.

Exit codes: 0 success, 2 invalid input, 3 instance too large for an
exhaustive component (oracle enumeration or subset tour rows).
"""

from __future__ import annotations

import argparse
import json
import sys

try:
    import tomllib
except ModuleNotFoundError:                       # Python 3.10
    import tomli as tomllib

from .bench import generate, genspec_from_dict, grid_from_dict, sweep
from .core import (RECHARGING, REVISITING, Params, instance_from_json,
                   plan_to_dict, plan_to_json)
from .exact import brute_force
from .milp import export_milp
from .pipeline import PipelineConfig, solve
from .tsp import TooLarge
from .viz import render_svg

_ALGORITHM = {"original": "original", "1": "alg1", "2": "alg2", "3": "alg3",
              "alg1": "alg1", "alg2": "alg2", "alg3": "alg3"}
_MODE = {"recharge": RECHARGING, "recharging": RECHARGING,
         "revisit": REVISITING, "revisiting": REVISITING}


def _read(path: str) -> str:
    with open(path) as fh:
        return fh.read()


def _emit(text: str, path):
    if path is None:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    else:
        with open(path, "w") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")


def _cmd_solve(args) -> int:
    inst = instance_from_json(_read(args.instance))
    config = PipelineConfig(algorithm=_ALGORITHM[args.algorithm],
                            mode=_MODE[args.mode],
                            params=Params(seed=args.seed))
    plan = solve(inst, config)
    if args.svg:
        _emit(render_svg(inst, plan), args.svg)
    _emit(plan_to_json(plan), args.out)
    return 0


def _cmd_generate(args) -> int:
    from .core import instance_to_json
    spec = genspec_from_dict(json.loads(_read(args.spec)))
    _emit(instance_to_json(generate(spec)), args.out)
    return 0


def _cmd_oracle(args) -> int:
    inst = instance_from_json(_read(args.instance))
    result = brute_force(inst, problem=args.problem,
                         max_visits=args.max_visits)
    payload = {"objective": result.objective,
               "nodes_explored": result.nodes_explored,
               "plan": plan_to_dict(result.plan)}
    _emit(json.dumps(payload, sort_keys=True, indent=2), args.out)
    return 0


def _cmd_export(args) -> int:
    inst = instance_from_json(_read(args.instance))
    model = export_milp(inst, args.problem, max_visits=args.max_visits,
                        subtour_limit=args.subtour_limit)
    _emit(model.to_lp(), args.out)
    return 0


def _cmd_sweep(args) -> int:
    with open(args.config, "rb") as fh:
        raw = tomllib.load(fh)
    if "algorithm" in raw:
        raw["algorithm"] = _ALGORITHM[str(raw["algorithm"])]
    if "mode" in raw:
        raw["mode"] = _MODE[str(raw["mode"])]
    grid = grid_from_dict(raw)

    def progress(row):
        print(f"rho1={row.rho1} rho2={row.rho2} L={row.drone_range} "
              f"seed={row.seed} savings={row.savings:.4f}", file=sys.stderr)

    results = sweep(grid, out_csv=args.out, progress=progress)
    print(f"{len(results)} rows -> {args.out}", file=sys.stderr)
    return 0


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="truckdrone",
        description="Truck + crowdsourced-drone delivery solver toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="run the heuristic pipeline")
    p.add_argument("--instance", required=True)
    p.add_argument("--algorithm", default="3", choices=sorted(_ALGORITHM))
    p.add_argument("--mode", default="recharge", choices=sorted(_MODE))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--svg", default=None, metavar="OUT_SVG")
    p.add_argument("--out", default=None, metavar="OUT_JSON")
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("sweep", help="run a sensitivity sweep to CSV")
    p.add_argument("--config", required=True, metavar="TOML")
    p.add_argument("--out", required=True, metavar="OUT_CSV")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("generate", help="sample a random instance")
    p.add_argument("--spec", required=True, metavar="SPEC_JSON")
    p.add_argument("--out", default=None, metavar="OUT_JSON")
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("oracle", help="exact solve a tiny instance")
    p.add_argument("--instance", required=True)
    p.add_argument("--problem", default="3",
                   choices=["1", "2", "3", "4", "I", "II", "III", "IV"])
    p.add_argument("--max-visits", type=int, default=3)
    p.add_argument("--out", default=None, metavar="OUT_JSON")
    p.set_defaults(func=_cmd_oracle)

    p = sub.add_parser("export", help="write an LP-format model file")
    p.add_argument("--instance", required=True)
    p.add_argument("--problem", required=True,
                   choices=["1", "2", "3", "4", "1alt", "2alt"])
    p.add_argument("--max-visits", type=int, default=3)
    p.add_argument("--subtour-limit", type=int, default=12)
    p.add_argument("--out", default=None, metavar="OUT_LP")
    p.set_defaults(func=_cmd_export)
    return parser


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        return args.func(args)
    except TooLarge as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
