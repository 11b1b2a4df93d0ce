"""Measure the heuristic's optimality gap on oracle-sized instances.

Enumerates the true optimum for a batch of 5-customer / 3-drone instances
and reports how far the full pipeline lands from it in each battery mode.
"""

import statistics

from truckdrone import (GenSpec, Params, PipelineConfig, RECHARGING,
                        REVISITING, brute_force, generate, solve)

BATCH = 12


def main() -> None:
    print(f"{'seed':>4} {'L':>4} {'optimum':>9} {'pipeline':>9} {'gap':>7}")
    gaps = {RECHARGING: [], REVISITING: []}
    for k in range(BATCH):
        drone_range = 0.8 if k % 2 == 0 else 1.2
        inst = generate(GenSpec(n_customers=5, n_drones=3,
                                drone_range=drone_range, rho1=2.0, seed=k))
        for mode, problem in ((RECHARGING, "III"), (REVISITING, "IV")):
            optimum = brute_force(inst, problem).objective
            config = PipelineConfig(algorithm="alg3", mode=mode,
                                    params=Params(rho1=2.0, rho2=0.6, seed=k))
            plan = solve(inst, config)
            gap = (plan.objective - optimum) / optimum
            gaps[mode].append(gap)
            if mode == RECHARGING:
                print(f"{k:>4} {drone_range:>4.1f} {optimum:>9.4f} "
                      f"{plan.objective:>9.4f} {gap:>6.1%}")

    for mode, values in gaps.items():
        print(f"\n{mode}: median gap {statistics.median(values):.2%}, "
              f"worst {max(values):.2%}")


if __name__ == "__main__":
    main()
