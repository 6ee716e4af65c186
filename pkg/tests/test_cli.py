import csv
import io
import json

import pytest

from astar_knapsack import cli
from astar_knapsack.knapsack import load_instance
from astar_knapsack.verify import Failure, VerifyReport


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = cli.main(list(argv), out=out, err=err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture
def inst_file(tmp_path):
    path = tmp_path / "inst.txt"
    code, _, _ = run("gen", "--type", "strongly_correlated", "--n", "8", "--seed", "3", "-o", str(path))
    assert code == 0
    return path


def test_gen_writes_a_loadable_instance(inst_file):
    inst = load_instance(inst_file)
    assert inst.n == 8 and inst.meta_dict()["seed"] == "3"


def test_gen_to_stdout_is_deterministic():
    a = run("gen", "--type", "subset_sum", "--n", "5", "--seed", "7", "--t", "40")
    b = run("gen", "--type", "subset_sum", "--n", "5", "--seed", "7", "--t", "40")
    assert a == b and a[1].startswith("# type=subset_sum R=1000 seed=7 t=40\n")


def test_gen_needs_a_seed():
    code, _, err = run("gen", "--type", "subset_sum", "--n", "5")
    assert code == 2 and "--seed" in err


@pytest.mark.parametrize("flag", [["--epsilon", "0.0016"], ["--exact"], ["--zero"], ["--bfs"]])
def test_solve(inst_file, flag):
    code, out, _ = run("solve", str(inst_file), *flag)
    rec = json.loads(out)
    assert code == 0 and rec["found"] and rec["reopens"] == 0


def test_solve_heuristics_agree_on_cost(inst_file):
    costs = {json.loads(run("solve", str(inst_file), *f)[1])["solution_cost"]
             for f in (["--epsilon", "0.1"], ["--exact"], ["--zero"])}
    assert len(costs) == 1


def test_solve_needs_exactly_one_heuristic(inst_file):
    assert run("solve", str(inst_file))[0] == 2
    assert run("solve", str(inst_file), "--zero", "--exact")[0] == 2
    assert run("solve", str(inst_file), "--epsilon", "1.5")[0] == 2


def test_metrics_full_and_sampled(inst_file):
    code, out, _ = run("metrics", str(inst_file), "--exact")
    rec = json.loads(out)
    assert code == 0 and rec["inr"] == "0.0000" and rec["arn"] == "1.0000"
    code, out, _ = run("metrics", str(inst_file), "--epsilon", "0.2", "--mode", "sampled",
                       "--sample-size", "10", "--seed", "4")
    rec = json.loads(out)
    assert code == 0 and rec["nodes_sampled"] == 10 and rec["seed"] == 4


def test_sampled_metrics_need_seed(inst_file):
    code, _, err = run("metrics", str(inst_file), "--zero", "--mode", "sampled", "--sample-size", "5")
    assert code == 2 and "seed" in err


def test_metrics_cap_is_a_usage_error(tmp_path):
    path = tmp_path / "big.txt"
    run("gen", "--type", "subset_sum", "--n", "16", "--seed", "1", "-o", str(path))
    code, _, err = run("metrics", str(path), "--zero")
    assert code == 2 and "sampled" in err


def test_sweep_from_file_to_stdout(inst_file):
    code, out, err = run("sweep", str(inst_file), "--epsilons", "0.01", "0.1")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0
    assert [r["epsilon"] for r in rows] == ["0.01", "0.1", "BFS"]
    assert "expansions" in err


def test_generated_sweep_outputs(tmp_path):
    out_csv, plot = tmp_path / "s.csv", tmp_path / "p.json"
    code, _, _ = run("sweep", "--type", "subset_sum", "profit_ceiling", "--n", "7", "--seed", "1", "2",
                     "--metrics", "skip", "--csv", str(out_csv), "--plot-data", str(plot))
    assert code == 0
    rows = list(csv.DictReader(out_csv.open()))
    # 2 types x 2 seeds x (9 eps + baseline)
    assert len(rows) == 40
    assert json.loads(plot.read_text())["sweeps"] == 4


def test_sweep_all_types(tmp_path):
    out_csv = tmp_path / "s.csv"
    code, _, _ = run("sweep", "--type", "all", "--n", "5", "--seed", "1", "--epsilons", "0.1",
                     "--no-bfs", "--csv", str(out_csv))
    assert code == 0
    assert len(list(csv.DictReader(out_csv.open()))) == 7


def test_sweep_argument_errors(inst_file):
    assert run("sweep")[0] == 2
    assert run("sweep", "--type", "subset_sum", "--n", "5")[0] == 2
    assert run("sweep", str(inst_file), "--epsilons", "0.2", "0.1")[0] == 2
    assert run("sweep", str(inst_file), "--metrics", "sampled")[0] == 2


def test_io_errors(tmp_path):
    assert run("solve", str(tmp_path / "missing.txt"), "--zero")[0] == 3
    bad = tmp_path / "bad.txt"
    bad.write_text("2 5\n1 0 3\n2 1 1\n")
    code, _, err = run("solve", str(bad), "--zero")
    assert code == 3 and "line 2" in err
    inst = tmp_path / "ok.txt"
    inst.write_text("2 5\n1 3 3\n2 4 4\n")
    assert run("sweep", str(inst), "--csv", str(tmp_path / "no" / "x.csv"))[0] == 3


def test_unknown_subcommand():
    assert run("frobnicate")[0] == 2
    assert run("--help")[0] == 0


def test_verify_success_and_failure(monkeypatch, tiny):
    import astar_knapsack.verify as verify

    good = VerifyReport("quick", {"fptas": 3})
    monkeypatch.setattr(verify, "run_verify", lambda *a, **k: good)
    code, out, _ = run("verify", "--level", "quick")
    assert code == 0 and "PASS verify" in out

    bad = VerifyReport("quick", {"admissible": 1}, [Failure("admissible", "h=5 exceeds h*=4", tiny, 7)])
    monkeypatch.setattr(verify, "run_verify", lambda *a, **k: bad)
    code, out, _ = run("verify")
    assert code == 1
    assert "FAIL admissible" in out and "state: {1, 2, 3}" in out and "3 5" in out
