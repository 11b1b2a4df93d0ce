"""Command-line interface tests: subcommands, exit codes, reproducibility."""

import json
import subprocess
import sys

import pytest

from truckdrone import Instance, Point2
from truckdrone.cli import main
from truckdrone.core import instance_to_json, plan_from_json, evaluate
from truckdrone.milp import export_milp


@pytest.fixture
def instance_file(tmp_path):
    inst = Instance(customers=[Point2(0.2, 0.3), Point2(0.5, 0.4),
                               Point2(0.35, 0.6), Point2(0.6, 0.7)],
                    drone_bases=[Point2(0.3, 0.4), Point2(0.45, 0.5)],
                    truck_speed=1.0, drone_speed=2.0, drone_range=1.2)
    path = tmp_path / "inst.json"
    path.write_text(instance_to_json(inst))
    return path, inst


def test_solve_writes_valid_plan_json(tmp_path, instance_file):
    path, inst = instance_file
    out = tmp_path / "plan.json"
    code = main(["solve", "--instance", str(path), "--algorithm", "3",
                 "--mode", "recharge", "--seed", "0", "--out", str(out)])
    assert code == 0
    plan = plan_from_json(out.read_text())
    obj, _, _ = evaluate(plan, inst)     # validates trips and cover
    assert obj == plan.objective


def test_solve_same_seed_is_byte_identical(tmp_path, instance_file):
    path, _ = instance_file
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for out in (a, b):
        assert main(["solve", "--instance", str(path), "--seed", "7",
                     "--out", str(out)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_solve_algorithm_aliases_agree(tmp_path, instance_file):
    path, _ = instance_file
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["solve", "--instance", str(path), "--algorithm", "3",
                 "--out", str(a)]) == 0
    assert main(["solve", "--instance", str(path), "--algorithm", "alg3",
                 "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_solve_stdout_and_svg(tmp_path, instance_file, capsys):
    path, _ = instance_file
    svg = tmp_path / "plan.svg"
    assert main(["solve", "--instance", str(path), "--svg", str(svg)]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert {"truck_nodes", "drone_trips", "objective"} <= set(payload)
    assert svg.read_text().startswith("<svg ")


def test_generate_then_solve_roundtrip(tmp_path):
    spec = tmp_path / "spec.json"
    spec.write_text(json.dumps({"n_customers": 8, "n_drones": 5, "seed": 3}))
    inst_path = tmp_path / "inst.json"
    assert main(["generate", "--spec", str(spec),
                 "--out", str(inst_path)]) == 0
    again = tmp_path / "inst2.json"
    assert main(["generate", "--spec", str(spec), "--out", str(again)]) == 0
    assert inst_path.read_bytes() == again.read_bytes()
    out = tmp_path / "plan.json"
    assert main(["solve", "--instance", str(inst_path),
                 "--out", str(out)]) == 0
    assert json.loads(out.read_text())["objective"] > 0


def test_oracle_reports_objective_and_nodes(tmp_path, instance_file):
    path, _ = instance_file
    out = tmp_path / "oracle.json"
    assert main(["oracle", "--instance", str(path), "--problem", "3",
                 "--out", str(out)]) == 0
    payload = json.loads(out.read_text())
    assert payload["objective"] > 0
    assert payload["nodes_explored"] > 0
    assert "truck_nodes" in payload["plan"]


def test_export_matches_library_output(tmp_path, instance_file):
    path, inst = instance_file
    out = tmp_path / "model.lp"
    assert main(["export", "--instance", str(path), "--problem", "1alt",
                 "--out", str(out)]) == 0
    assert out.read_text() == export_milp(inst, "I_alt").to_lp()


def test_sweep_from_toml_config(tmp_path):
    config = tmp_path / "sweep.toml"
    config.write_text('rho1 = [1.0, 2.0]\nn_customers = 8\nreps = 1\n'
                      'algorithm = "3"\nmode = "recharge"\n')
    out = tmp_path / "results.csv"
    assert main(["sweep", "--config", str(config), "--out", str(out)]) == 0
    lines = out.read_text().strip().splitlines()
    assert len(lines) == 3      # header + one row per rho1 value
    assert lines[0].startswith("rho1,rho2,")


# ---------------------------------------------------------------------------
# exit codes
# ---------------------------------------------------------------------------

def test_missing_file_is_invalid_input(tmp_path):
    assert main(["solve", "--instance", str(tmp_path / "nope.json")]) == 2


def test_malformed_json_is_invalid_input(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["solve", "--instance", str(bad)]) == 2
    spec = tmp_path / "spec.json"
    spec.write_text(json.dumps({"n_customers": 4, "n_drones": 1, "zzz": 9}))
    assert main(["generate", "--spec", str(spec)]) == 2


def test_oversize_oracle_trips_size_guard(tmp_path):
    from truckdrone.bench import GenSpec, generate
    path = tmp_path / "big.json"
    path.write_text(instance_to_json(generate(GenSpec(9, 2, seed=0))))
    assert main(["oracle", "--instance", str(path)]) == 3
    assert main(["export", "--instance", str(path), "--problem", "3",
                 "--subtour-limit", "5"]) == 3


def test_unknown_subcommand_or_choice_exits_via_argparse(instance_file):
    path, _ = instance_file
    with pytest.raises(SystemExit):
        main(["frobnicate"])
    with pytest.raises(SystemExit):
        main(["solve", "--instance", str(path), "--algorithm", "9"])


# ---------------------------------------------------------------------------
# installed entry points
# ---------------------------------------------------------------------------

def test_module_entry_point(tmp_path, instance_file):
    path, _ = instance_file
    out = tmp_path / "plan.json"
    proc = subprocess.run([sys.executable, "-m", "truckdrone", "solve",
                           "--instance", str(path), "--out", str(out)],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(out.read_text())["objective"] > 0


def test_console_script(tmp_path, instance_file):
    path, _ = instance_file
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for out in (a, b):
        proc = subprocess.run(["truckdrone", "solve", "--instance", str(path),
                               "--seed", "5", "--out", str(out)],
                              capture_output=True, text=True)
        assert proc.returncode == 0, proc.stderr
    assert a.read_bytes() == b.read_bytes()
