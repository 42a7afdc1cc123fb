import json

import pytest

from stodep.cli import main
from stodep.serialize import load_instance, save_instance
from stodep.apps import build_worst_case_instance


@pytest.fixture
def worst_case_file(tmp_path):
    path = tmp_path / "instance.json"
    save_instance(build_worst_case_instance(0.1), path)
    return path


def test_generate_and_solve(tmp_path, capsys):
    params = tmp_path / "params.json"
    params.write_text(json.dumps({"epsilon": 0.1}))
    out = tmp_path / "inst.json"
    assert main(["generate", "--app", "worstcase", "--params", str(params), "--out", str(out)]) == 0
    inst = load_instance(out)
    assert inst.horizon == 2
    assert main(["solve", "--instance", str(out)]) == 0
    captured = capsys.readouterr()
    assert "J*=1.9" in captured.out


def test_solve_dumps_table(worst_case_file, tmp_path, capsys):
    dump = tmp_path / "table.json"
    assert main(["solve", "--instance", str(worst_case_file), "--dump-table", str(dump)]) == 0
    payload = json.loads(dump.read_text())
    assert payload["horizon"] == 2
    assert len(payload["values"]) == 4


def test_missing_instance_exits_2(tmp_path, capsys):
    assert main(["solve", "--instance", str(tmp_path / "nope.json")]) == 2
    err = json.loads(capsys.readouterr().out.strip().splitlines()[-1])
    assert "not found" in err["message"]


def test_cap_violation_exits_3(worst_case_file, capsys):
    assert main(["solve", "--instance", str(worst_case_file), "--cap-states", "2"]) == 3
    err = json.loads(capsys.readouterr().out.strip().splitlines()[-1])
    assert err["error"] == "StateSpaceCapExceeded"


def test_check_command(worst_case_file, tmp_path, capsys):
    report_path = tmp_path / "report.json"
    code = main(
        [
            "check",
            "--instance",
            str(worst_case_file),
            "--properties",
            "vfm,ir,ratio:2,assumption1",
            "--tol",
            "1e-9",
            "--out",
            str(report_path),
            "--strict",
        ]
    )
    assert code == 0
    out = capsys.readouterr().out
    for line in ("vfm: pass", "ir: pass", "ratio:2: pass", "assumption1: pass"):
        assert line in out
    report = json.loads(report_path.read_text())
    assert report["ratio:2"]["max_ratio"] == pytest.approx(1.9, abs=1e-12)
    assert report["vfm"]["passed"] is True


def test_check_strict_fails_on_violation(tmp_path, capsys):
    # non-submodular tabulated reward with a reachable monotonicity break
    from stodep import GeneralTabulatedReward
    from conftest import make_instance

    reward = GeneralTabulatedReward.from_potential(
        lambda y: float((y[0] + y[1]) ** 2), (1, 1), 1
    )
    inst = make_instance(capacities=(1, 1), horizon=1, schedule=[[[0.0, 1.0]]], reward=reward)
    path = tmp_path / "bad.json"
    save_instance(inst, path)
    code = main(["check", "--instance", str(path), "--properties", "vfm", "--strict"])
    assert code == 1
    assert "vfm: FAIL" in capsys.readouterr().out


def test_check_reports_reward_structure_failure(tmp_path, capsys):
    from stodep import GeneralTabulatedReward
    from conftest import make_instance

    table = {
        ((1,), (0,), 0): 1.0,
        ((1,), (0,), 1): 2.0,  # reward increases over time
        ((1,), (1,), 0): 0.0,
        ((1,), (1,), 1): 0.0,
        ((0,), (0,), 0): 0.0,
        ((0,), (0,), 1): 0.0,
    }
    inst = make_instance(
        capacities=(1,), horizon=2, schedule=[[[0.5]], [[0.5]]],
        reward=GeneralTabulatedReward(table),
    )
    path = tmp_path / "bad.json"
    save_instance(inst, path)
    report_path = tmp_path / "report.json"
    code = main(
        ["check", "--instance", str(path), "--properties", "assumption1",
         "--out", str(report_path), "--strict"]
    )
    assert code == 1
    assert "assumption1: FAIL" in capsys.readouterr().out
    report = json.loads(report_path.read_text())
    assert report["assumption1"]["violations"]  # witnesses are serialized


def test_simulate_traces(worst_case_file, tmp_path, capsys):
    traces = tmp_path / "traces.jsonl"
    code = main(
        [
            "simulate",
            "--instance",
            str(worst_case_file),
            "--policy",
            "optimal",
            "--reps",
            "3",
            "--seed",
            "9",
            "--out",
            str(traces),
        ]
    )
    assert code == 0
    summary = json.loads(capsys.readouterr().out.strip().splitlines()[-1])
    assert summary["mean"] == pytest.approx(1.9, abs=1e-12)
    lines = traces.read_text().strip().splitlines()
    assert len(lines) == 3
    assert json.loads(lines[0])["total_reward"] == pytest.approx(1.9, abs=1e-12)


def test_batch_csv_byte_identical(tmp_path):
    config = tmp_path / "batch.json"
    config.write_text(
        json.dumps(
            {
                "app": "random-linear-decaying",
                "seed_start": 0,
                "seed_count": 4,
                "policies": ["myopic", "approx:2"],
                "properties": ["vfm", "ir", "ratio:2"],
            }
        )
    )
    out1, out2 = tmp_path / "r1", tmp_path / "r2"
    assert main(["batch", "--config", str(config), "--out", str(out1)]) == 0
    assert main(["batch", "--config", str(config), "--out", str(out2)]) == 0
    csv1 = (tmp_path / "r1.csv").read_bytes()
    assert csv1 == (tmp_path / "r2.csv").read_bytes()
    header = csv1.decode().splitlines()[0].split(",")
    assert header[:7] == [
        "seed",
        "fingerprint",
        "family",
        "num_types",
        "horizon",
        "num_activities",
        "j_star",
    ]
    rows = csv1.decode().splitlines()[1:]
    assert len(rows) == 4
    # ratios must be consistent with the J columns they came from
    for row in rows:
        cells = dict(zip(header, row.split(",")))
        j_star, j_myopic = float(cells["j_star"]), float(cells["j[myopic]"])
        if j_myopic > 0:
            assert abs(float(cells["ratio[myopic]"]) - j_star / j_myopic) <= 1e-12
    payload = json.loads((tmp_path / "r1.json").read_text())
    assert all("elapsed_seconds" in row for row in payload["rows"])


def test_batch_empty_seed_range(tmp_path, capsys):
    config = tmp_path / "batch.json"
    config.write_text(json.dumps({"app": "random-submodular", "seed_count": 0}))
    assert main(["batch", "--config", str(config), "--out", str(tmp_path / "empty")]) == 0
    assert (tmp_path / "empty.csv").read_text().count("\n") == 1  # header only


def test_generate_unknown_app_exits_2(capsys, tmp_path):
    params = tmp_path / "p.json"
    params.write_text("{}")
    assert main(["generate", "--app", "bogus", "--params", str(params)]) == 2


MINIMAL_PARAMS = {
    "worstcase": {"epsilon": 0.5},
    "setcover": {"ground_set": ["a", "b"], "cover_sets": [["a"], ["a", "b"]], "k": 1},
    "queueing": {
        "num_buffers": 1,
        "num_servers": 1,
        "horizon": 2,
        "service_means": [[2.0]],
        "rewards": [[1.0, 0.5]],
        "arrival_rates": [0.7],
    },
    "broadcast": {
        "num_users": 2,
        "num_pages": 1,
        "horizon": 2,
        "cap": 1,
        "rewards": [[1.0, 0.5]],
        "channels": [0.8, 0.6],
        "requests": [[0, 0, 0, 2], [1, 0, 1, 2]],
    },
    "productline": {
        "num_products": 2,
        "assortment_cap": 1,
        "segment_sizes": [1],
        "prices": [1.0],
        "horizon": 1,
        "purchase_probs": {"0": [[0.5]], "1": [[0.25]]},
    },
    "adwords": {
        "num_advertisers": 2,
        "num_keywords": 1,
        "budgets": [1.5, None],
        "valuations": [[1.0], [2.0]],
        "keyword_sequence": [0, 0],
        "slot_cap": 1,
        "click_probs": [[0.5], [0.25]],
    },
    "matroid-card": {
        "elements": ["a", "b"],
        "cardinality": 1,
        "value": {
            "kind": "submodular_coverage",
            "num_elements": 2,
            "covers": [[0], [0, 1]],
            "element_weights": [1.0, 0.5],
        },
    },
    "matroid-part": {
        "elements": ["a", "b"],
        "partition": [{"elements": [0], "k": 1}, {"elements": [1], "k": 1}],
        "value": {
            "kind": "submodular_budgeted",
            "budgets": [2.0],
            "values": [1.0, 3.0],
            "groups": [0, 0],
        },
    },
    "random-submodular": {},
    "random-linear-decaying": {},
}


@pytest.mark.parametrize("app", sorted(MINIMAL_PARAMS))
def test_generate_every_app(app, tmp_path):
    params = tmp_path / "p.json"
    params.write_text(json.dumps(MINIMAL_PARAMS[app]))
    out = tmp_path / "inst.json"
    code = main(
        ["generate", "--app", app, "--params", str(params), "--seed", "3", "--out", str(out)]
    )
    assert code == 0
    inst = load_instance(out)  # loader re-validates
    assert inst.num_types >= 1
    assert main(["solve", "--instance", str(out)]) == 0


def test_check_submodular_property_via_cli(tmp_path, capsys):
    params = tmp_path / "p.json"
    params.write_text(json.dumps(MINIMAL_PARAMS["matroid-card"]))
    out = tmp_path / "inst.json"
    assert main(["generate", "--app", "matroid-card", "--params", str(params), "--out", str(out)]) == 0
    capsys.readouterr()
    assert main(["check", "--instance", str(out), "--properties", "submodular,vfm", "--strict"]) == 0
    text = capsys.readouterr().out
    assert "submodular: pass" in text and "vfm: pass" in text
