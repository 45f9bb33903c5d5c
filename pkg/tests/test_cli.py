import json

import pytest

from qmclab.cli import dumps, main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def payload(text):
    doc = json.loads(text)
    doc["metadata"].pop("timestamp")
    return doc


def test_constants_table(capsys):
    code, out, _ = run(capsys, "constants")
    assert code == 0
    doc = json.loads(out)
    assert doc["schema"] == "qmclab/1"
    rows = {r["kind"]: r for r in doc["result"]["constants"]}
    assert set(rows) >= {"GW", "2MC", "BOV", "GP"}
    assert rows["GP"]["alpha"] == pytest.approx(0.498, abs=2e-3)
    assert rows["GP"]["rho_star"] == pytest.approx(-0.97, abs=5e-3)


def test_exact_diag_single_edge(capsys, tmp_path):
    state = tmp_path / "psi.csv"
    code, out, _ = run(capsys, "exact-diag", "--graph", "single_edge", "--state-out", str(state))
    assert code == 0
    assert json.loads(out)["result"]["max_energy"] == pytest.approx(1.0, abs=1e-12)
    lines = state.read_text().splitlines()
    assert lines[0] == "index,re,im" and len(lines) == 3


def test_gegenbauer_check_passes(capsys):
    code, out, _ = run(capsys, "gegenbauer-check", "--n", "3", "--dmax", "10")
    assert code == 0 and json.loads(out)["result"]["passed"] is True


def test_global_flags_before_and_after_subcommand(capsys, tmp_path):
    out_path = tmp_path / "r.json"
    code, _, _ = run(capsys, "--seed", "7", "prod-opt", "--graph", "complete:3", "--out", str(out_path))
    assert code == 0
    doc = json.loads(out_path.read_text())
    assert doc["metadata"]["seed"] == 7
    assert doc["result"]["product_value"] == pytest.approx(0.375, abs=1e-6)
    code, out, _ = run(capsys, "prod-opt", "--graph", "complete:3", "--seed", "9")
    assert json.loads(out)["metadata"]["seed"] == 9


@pytest.mark.parametrize("argv", [
    ("round", "--graph", "complete:4", "--trials", "40", "--seed", "3"),
    ("borell-check", "--n", "2", "--samples", "20000", "--seed", "5"),
    ("solve-sdp", "--graph", "random:7:0.5:2", "--objective", "MC"),
    ("dictator-test", "--function", "random:4", "--n", "4"),
])
def test_byte_identical_reruns(capsys, argv):
    _, first, _ = run(capsys, *argv)
    _, second, _ = run(capsys, *argv)
    assert payload(first) == payload(second)
    a = first.splitlines()
    b = second.splitlines()
    assert [x for x in a if "timestamp" not in x] == [x for x in b if "timestamp" not in x]


def test_csv_output(capsys):
    code, out, _ = run(capsys, "constants", "--format", "csv")
    assert code == 0
    assert out.splitlines()[0] == "kind,k,alpha,rho_star"
    code, _, err = run(capsys, "exact-diag", "--graph", "single_edge", "--format", "csv")
    assert code == 1 and "no flat table" in err


def test_usage_errors_exit_one(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["no-such-command"])
    assert exc.value.code == 1
    with pytest.raises(SystemExit) as exc:
        main(["exact-diag"])
    assert exc.value.code == 1
    code, _, err = run(capsys, "exact-diag", "--graph", "missing_file.txt")
    assert code == 1 and "neither" in err


def test_validation_failure_exit_two(capsys):
    code, _, err = run(capsys, "round", "--graph", "complete:3", "--trials", "5")
    assert code == 2 and "30" in err
    code, _, _ = run(capsys, "exact-diag", "--graph", "complete:13")
    assert code == 2


def test_ug_reduce_completeness(capsys, tmp_path):
    gpath = tmp_path / "ug_graph.txt"
    code, out, _ = run(capsys, "ug-reduce", "--rho", "-0.584", "--graph-out", str(gpath))
    res = json.loads(out)["result"]
    assert code == 0
    assert res["dictator_value"] == pytest.approx(0.396, abs=1e-12)
    # the loop-carrying reduction is rejected by the loop-free bound
    code, _, err = run(capsys, "bh-bound", "--graph", str(gpath))
    assert code == 2 and "loop-free" in err
    run(capsys, "ug-reduce", "--rho", "-0.584", "--no-loops", "--graph-out", str(gpath))
    code, out, _ = run(capsys, "bh-bound", "--graph", str(gpath))
    assert code == 0 and json.loads(out)["result"]["bound"] > 0


def test_ug_reduce_from_file(capsys, tmp_path):
    f = tmp_path / "inst.ug"
    f.write_text("qmclab-ug v1\nlabels 2\nleft 1\nu\nright 2\nv\nw\nu v 2 1\nu w 1 2\n")
    code, out, _ = run(capsys, "ug-reduce", "--ug", str(f), "--rho", "-0.3", "--no-loops")
    assert code == 0 and json.loads(out)["result"]["vertices"] == 8


def test_dictator_test_report(capsys):
    code, out, _ = run(capsys, "dictator-test", "--function", "majority", "--n", "3", "--k", "1",
                       "--rho", "-0.5", "--m", "3", "--delta", "0.4", "--eps", "0.2")
    res = json.loads(out)["result"]
    assert code == 0
    assert res["stab"] == pytest.approx(-0.40625)
    assert res["notables"] == [1, 2, 3]
    assert res["parameters"]["gamma"] == pytest.approx(0.5 * 0.2 / 6)


def test_gap_instance_small(capsys):
    code, out, _ = run(capsys, "gap-instance", "--n", "6", "--trials", "60")
    res = json.loads(out)["result"]
    assert res["checks"]["dictator_exact"] and res["checks"]["identity_sdp"]
    assert code in (0, 2)


def test_seventeen_digit_floats():
    assert dumps(0.1) == "0.10000000000000001"
    assert dumps(1.0) == "1.0" and dumps(3) == "3"
    assert json.loads(dumps({"x": [1e-300, 2.5, 3]})) == {"x": [1e-300, 2.5, 3]}
    assert dumps(float("nan")) == "null"
