"""Sweep drone speed against fleet size and tabulate mean savings.

A scaled-down version of the benchmark harness run: every grid cell pairs
the pipeline against the plain truck tour on shared instances, results land
in ``sensitivity.csv`` next to this script (re-running resumes instead of
recomputing), and the table below aggregates them.
"""

from pathlib import Path

from truckdrone import SweepGrid, sweep
from truckdrone.bench import mean_savings

RHO1 = (1.0, 1.5, 2.0, 2.5)
RHO2 = (0.5, 1.0, 2.0)


def main() -> None:
    grid = SweepGrid(rho1=RHO1, rho2=RHO2, drone_range=(0.8,),
                     n_customers=30, reps=3, seed=0)
    out = Path(__file__).with_name("sensitivity.csv")
    done = 0

    def tick(result) -> None:
        nonlocal done
        done += 1
        print(f"\r{done} cells finished", end="", flush=True)

    results = sweep(grid, out, progress=tick)
    print(f"\nresults in {out}\n")

    header = " ".join(f"rho2={r:<5}" for r in RHO2)
    print(f"{'rho1':>5} {header}")
    for r1 in RHO1:
        cells = " ".join(f"{mean_savings(results, rho1=r1, rho2=r2):>+9.3f}"
                         for r2 in RHO2)
        print(f"{r1:>5} {cells}")
    print("\npositive = cheaper than the plain truck tour; savings grow with "
          "drone speed and fleet size")


if __name__ == "__main__":
    main()
