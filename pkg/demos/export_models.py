"""Write LP-format model files for every formulation of one instance.

The files load directly into CPLEX/Gurobi/HiGHS (``gurobi_cl model.lp``,
``highs model.lp``).  Single-center formulations (I, II, I_alt, II_alt) fix
the truck at one pickup point; III and IV add the tour.
"""

from pathlib import Path

from truckdrone import Instance, Point2, export_milp
from truckdrone.milp import PROBLEMS


def main() -> None:
    inst = Instance(customers=[Point2(0.2, 0.3), Point2(0.5, 0.4),
                               Point2(0.35, 0.6), Point2(0.6, 0.55)],
                    drone_bases=[Point2(0.3, 0.4), Point2(0.45, 0.5)],
                    truck_speed=1.0, drone_speed=2.0, drone_range=1.2)
    out_dir = Path(__file__).with_name("lp_models")
    out_dir.mkdir(exist_ok=True)

    print(f"{'problem':>8} {'variables':>10} {'rows':>6} {'file':<20}")
    for problem in PROBLEMS:
        path = out_dir / f"{problem}.lp"
        model = export_milp(inst, problem, max_visits=2, path=path)
        print(f"{problem:>8} {len(model.variable_names()):>10} "
              f"{len(model.constraints):>6} {path.name:<20}")
    print(f"\nmodels written to {out_dir}/")


if __name__ == "__main__":
    main()
