import json
import math
import subprocess
import sys
import xml.etree.ElementTree as ET

import pytest

from helpers import SQ2, random_two, two_instance
from ponyexpress.cli import main
from ponyexpress.io import parse_plan, serialize_instance, serialize_plan
from ponyexpress.offline_multi import solve_multi
from ponyexpress.offline_two import solve_two

TIGHT = {"source": [0, 0], "destination": [1, 0], "robots": [{"x": 0, "y": 0, "speed": 1 / (1 + SQ2)}, {"x": SQ2, "y": 0, "speed": 1}]}


@pytest.fixture
def tight_file(tmp_path):
    p = tmp_path / "tight_file.json"
    p.write_text(json.dumps(TIGHT))
    return str(p)


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_solve_two(capsys, tight_file):
    code, out, _ = run(capsys, "solve", "--mode", "two", tight_file)
    assert code == 0
    assert json.loads(out)["total_time"] == pytest.approx(2 - 1 / (1 + SQ2), abs=1e-12)
    assert run(capsys, "solve", "--mode", "two", tight_file)[1] == out


def test_solve_multi_single_robot(capsys, tmp_path):
    p = tmp_path / "one.json"
    p.write_text(json.dumps({"source": [0, 0], "destination": [1, 0], "robots": [{"x": 0.3, "y": 0.2, "speed": 1}]}))
    code, out, _ = run(capsys, "solve", "--mode", "multi", str(p))
    kinds = [e["kind"] for e in json.loads(out)["events"]]
    assert code == 0 and kinds == ["pickup", "deliver"]


def test_input_errors(capsys, tmp_path):
    p = tmp_path / "empty.json"
    p.write_text(json.dumps({"source": [0, 0], "destination": [1, 0], "robots": []}))
    code, _, err = run(capsys, "solve", str(p))
    assert code == 2 and "robots must be non-empty" in err
    p.write_text('{"source": [0, 0],\n  "destination": [1, 0')
    code, _, err = run(capsys, "solve", str(p))
    assert code == 2 and "line 2 column" in err
    p.write_text(json.dumps({"source": [0, 0], "destination": [1, 0], "robots": [{"x": 0, "y": 0, "speed": 1}]}))
    assert run(capsys, "solve", "--mode", "two", str(p))[0] == 2


def test_solver_error_exit_codes(capsys, tmp_path):
    p = tmp_path / "same.json"
    p.write_text(json.dumps({"source": [0, 0], "destination": [0, 0], "robots": [{"x": 0, "y": 0, "speed": 1}]}))
    code, _, err = run(capsys, "solve", "--mode", "multi", str(p))
    assert code == 3 and "DegenerateInstance" in err
    p.write_text(json.dumps({"source": [0, 0], "destination": [1, 0], "robots": [{"x": 500, "y": 0, "speed": 1}]}))
    code, _, err = run(capsys, "solve", "--mode", "multi", "--eps-prime", "0.01", str(p))
    assert code == 4 and "GridTooLarge" in err


def test_online_report(capsys, tight_file, tmp_path):
    code, out, _ = run(capsys, "online", tight_file)
    assert code == 0 and json.loads(out)["ratio"] == pytest.approx(1.522407, abs=1e-6)
    p = tmp_path / "both.json"
    p.write_text(json.dumps({"source": [0, 0], "destination": [1, 0], "robots": [{"x": 0, "y": 0, "speed": 1}, {"x": 0, "y": 0, "speed": 2}]}))
    assert json.loads(run(capsys, "online", str(p))[1])["ratio"] == pytest.approx(1.0)
    p.write_text(json.dumps({"source": [0, 0], "destination": [1, 0], "robots": [{"x": 0, "y": 1, "speed": 1}, {"x": 2, "y": 0, "speed": 2}, {"x": -1, "y": 0, "speed": 3}]}))
    report = json.loads(run(capsys, "online", str(p))[1])
    lo, hi = report["offline_bracket"]
    assert lo <= hi and report["ratio_bracket"][0] <= report["ratio_bracket"][1]


def test_adversary(capsys):
    code, out, _ = run(capsys, "adversary", "--n", "3")
    data = json.loads(out)
    assert code == 0 and len(data["robots"]) == 3
    assert data["robots"][0] == {"x": 3.0, "y": 0.0, "speed": 1.0}
    assert run(capsys, "adversary", "--n", "2")[0] == 3


def test_lowerbound_position(capsys, tmp_path):
    fig = tmp_path / "pos.png"
    code, out, _ = run(capsys, "lowerbound", "--kind", "position", "--res", "128", "--figure", str(fig))
    assert code == 0 and json.loads(out)["bound"] >= 1.0395
    assert fig.stat().st_size > 0


def test_plot_svg(capsys, tight_file, tmp_path):
    plan_path = tmp_path / "plan.json"
    code, out, _ = run(capsys, "solve", "--mode", "two", tight_file)
    plan_path.write_text(out)
    code, svg, _ = run(capsys, "plot", tight_file, str(plan_path))
    assert code == 0
    root = ET.fromstring(svg)
    circles = [e for e in root.iter() if e.tag.endswith("circle") and e.get("class") == "apollonius"]
    assert len(circles) == 1
    assert any(e.get("class") == "handover" for e in root.iter())
    # the slow robot waits at the source, so only one trajectory is drawn per mover
    lines = [e for e in root.iter() if e.tag.endswith("polyline")]
    assert all(len(set(l.get("points").split())) > 1 for l in lines)


def test_plot_mismatch(capsys, tight_file, tmp_path):
    plan_path = tmp_path / "plan.json"
    plan_path.write_text(json.dumps({"total_time": 1, "events": [], "trajectories": [[{"t": 0, "x": 0, "y": 0}]]}))
    assert run(capsys, "plot", tight_file, str(plan_path))[0] == 2


def test_solve_figure(capsys, tight_file, tmp_path):
    fig = tmp_path / "plan.png"
    assert run(capsys, "solve", "--figure", str(fig), tight_file)[0] == 0
    assert fig.stat().st_size > 0


def test_plan_round_trip(rng):
    for _ in range(20):
        inst = two_instance(*random_two(rng))
        for plan in (solve_two(inst).plan, solve_multi(inst, 0.2)):
            text = serialize_plan(plan)
            assert parse_plan(text) == plan
            assert serialize_plan(parse_plan(text)) == text


def test_stdin_and_module_entry(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "ponyexpress", "solve", "-"],
        input=json.dumps(TIGHT),
        capture_output=True,
        text=True,
        check=True,
    )
    assert json.loads(proc.stdout)["total_time"] == pytest.approx(2 - 1 / (1 + SQ2), abs=1e-12)
