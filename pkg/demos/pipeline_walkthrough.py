"""Walk one random instance through all four pipeline stages in both modes.

Prints an objective table and drops an SVG drawing of the best plan next to
this script.  Run from anywhere: ``python demos/pipeline_walkthrough.py``.
"""

from pathlib import Path

from truckdrone import (GenSpec, Params, PipelineConfig, RECHARGING,
                        REVISITING, generate, render_svg, solve, tsp_baseline)

ALGORITHMS = ("original", "alg1", "alg2", "alg3")


def main() -> None:
    spec = GenSpec(n_customers=40, n_drones=25, drone_range=0.8,
                   rho1=2.0, seed=7)
    inst = generate(spec)
    baseline = tsp_baseline(inst)
    print(f"instance: {inst.n_customers} customers, {inst.n_drones} drones, "
          f"range {inst.drone_range}, drone/truck speed "
          f"{inst.drone_speed:.0f}x")
    print(f"plain truck tour (no drones): {baseline:.4f}\n")

    print(f"{'stage':>9} {'recharging':>12} {'revisiting':>12}")
    best = None
    for algorithm in ALGORITHMS:
        row = []
        for mode in (RECHARGING, REVISITING):
            config = PipelineConfig(algorithm=algorithm, mode=mode,
                                    params=Params(rho1=2.0, rho2=25 / 40,
                                                  seed=7))
            plan = solve(inst, config)
            row.append(plan.objective)
            if best is None or plan.objective < best[0]:
                best = (plan.objective, plan, algorithm, mode)
        print(f"{algorithm:>9} {row[0]:>12.4f} {row[1]:>12.4f}")

    objective, plan, algorithm, mode = best
    saved = (baseline - objective) / baseline
    print(f"\nbest: {algorithm}/{mode} at {objective:.4f} "
          f"({saved:.1%} below the plain tour)")
    print(f"truck stops {len(plan.truck_nodes)}, "
          f"drone trips {len(plan.drone_trips)}")

    out = Path(__file__).with_name("pipeline_walkthrough.svg")
    out.write_text(render_svg(inst, plan))
    print(f"drawing written to {out}")


if __name__ == "__main__":
    main()
