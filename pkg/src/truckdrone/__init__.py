"""Solver toolkit for combined truck + crowdsourced-drone last-mile delivery.

A truck tours pickup centers while nearby drones fly short star or chained
trips to customers; the objective is total truck tour time plus the sum of
per-center drone makespans (the final return leg of each drone's last trip is
not billed). The package provides the clustering / tabu-search / TSP
heuristic pipeline with three improvement algorithms, recharging (single
visit per trip) and revisiting (chained visits) drone modes, an exact
enumeration oracle for tiny instances, LP-format model export, and a
benchmark harness with instance generators and sensitivity sweeps.
"""

from .core import (EPSILON, MODES, RANGE_TOL, RECHARGING, REVISITING,
                   DroneTrip, Instance, InvalidPlan, InvalidTrip, Params,
                   Plan, Point2, RangeViolation, dist, evaluate,
                   instance_from_json, instance_to_json, last_leg, make_plan,
                   plan_from_json, plan_to_json, savings, trip_length)
from .clustering import Clustering, lloyd, min_feasible_k, voronoi_assign
from .tsp import TooLarge, Tour, exact_tour, lk_tour, tour_length
from .drone_router import (Cluster, EncodedSolution, TabuState, decode,
                           encode, enumerate_routes, tabu_search)
from .pipeline import (ALGORITHMS, PipelineConfig, compare_modes, solve)
from .exact import ExactResult, Infeasible, brute_force, verify_against_oracle
from .milp import MilpModel, export_milp, parse_lp
from .bench import (GenSpec, SweepGrid, SweepResult, generate, sweep,
                    tsp_baseline, tspd_baseline)
from .viz import render_svg

__version__ = "0.1.0"

__all__ = [
    "EPSILON", "MODES", "RANGE_TOL", "RECHARGING", "REVISITING",
    "DroneTrip", "Instance", "InvalidPlan", "InvalidTrip", "Params", "Plan",
    "Point2", "RangeViolation", "dist", "evaluate", "instance_from_json",
    "instance_to_json", "last_leg", "make_plan", "plan_from_json",
    "plan_to_json", "savings", "trip_length",
    "Clustering", "lloyd", "min_feasible_k", "voronoi_assign",
    "TooLarge", "Tour", "exact_tour", "lk_tour", "tour_length",
    "Cluster", "EncodedSolution", "TabuState", "decode", "encode",
    "enumerate_routes", "tabu_search",
    "ALGORITHMS", "PipelineConfig", "compare_modes", "solve",
    "ExactResult", "Infeasible", "brute_force", "verify_against_oracle",
    "MilpModel", "export_milp", "parse_lp",
    "GenSpec", "SweepGrid", "SweepResult", "generate", "sweep",
    "tsp_baseline", "tspd_baseline",
    "render_svg",
    "__version__",
]
