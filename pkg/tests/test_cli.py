import csv
import io
import json

import pytest

from sepscan.bench import CSV_FIELDS, ExperimentSpec, run_bench
from sepscan.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def instance(tmp_path, capsys):
    d = tmp_path / "inst"
    code, out, _ = run(capsys, "synth", "--graph", "tree:n=8", "--out", str(d), "--seed", "3")
    assert code == 0
    return d, json.loads(out)


class TestSynth:
    def test_files(self, instance):
        d, summary = instance
        assert {p.name for p in d.iterdir()} == {"sigma.bin", "sigma.json", "graph.json", "faithfulness.json"}
        assert summary["n"] == 8 and summary["is_tree"] and summary["faithfulness"] is True
        assert json.loads((d / "faithfulness.json").read_text())["kind"] == "strong"

    def test_bad_spec(self, tmp_path, capsys):
        code, _, err = run(capsys, "synth", "--graph", "nonsense:n=4", "--out", str(tmp_path / "x"))
        assert code == 2 and "error" in err

    def test_large_skips_check(self, tmp_path, capsys):
        d = tmp_path / "big"
        code, out, _ = run(capsys, "synth", "--graph", "tree:n=30", "--out", str(d))
        assert code == 0 and json.loads(out)["faithfulness"] == "skipped"


class TestTest:
    def test_tree_deterministic(self, instance, capsys):
        d, _ = instance
        a = run(capsys, "test", "--in", str(d), "--mode", "tree", "--seed", "1")
        b = run(capsys, "test", "--in", str(d), "--mode", "tree", "--seed", "1")
        assert a == b and a[0] == 0
        rec = json.loads(a[1])
        assert rec["verdict"] == "IsTree" and rec["queries"] == 36 and "wall_ms" not in rec

    def test_timing(self, instance, capsys):
        d, _ = instance
        code, out, _ = run(capsys, "test", "--in", str(d), "--mode", "tree", "--timing")
        assert "wall_ms" in json.loads(out)

    def test_marginal(self, instance, capsys):
        d, _ = instance
        code, out, _ = run(capsys, "test", "--in", str(d), "--mode", "marginal", "--k", "1", "--m", "20")
        rec = json.loads(out)
        assert code == 0 and rec["verdict"] in ("Terminated", "Inconclusive") and rec["theory_m_met"] is False

    def test_ci(self, instance, capsys):
        d, _ = instance
        code, out, _ = run(capsys, "test", "--in", str(d), "--mode", "ci")
        rec = json.loads(out)
        assert rec["verdict"] == "IsTree" and rec["covariance_queries"] <= 36

    @pytest.mark.parametrize("extra", [["--mode", "marginal"], ["--mode", "tree", "--k", "1"],
                                       ["--mode", "marginal", "--k", "1"]])
    def test_usage_errors(self, instance, capsys, extra):
        # the last case lacks --m, and the theoretical sample size exceeds the cap
        d, _ = instance
        assert run(capsys, "test", "--in", str(d), *extra)[0] == 2

    def test_missing_instance(self, tmp_path, capsys):
        assert run(capsys, "test", "--in", str(tmp_path / "none"), "--mode", "tree")[0] == 2

    def test_argparse_error(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["test", "--mode", "tree"])
        assert exc.value.code == 2


class TestBench:
    def test_csv(self, capsys, tmp_path):
        svg = tmp_path / "plot.svg"
        code, out, _ = run(capsys, "bench", "--family", "tree", "--sizes", "20,40", "--trials", "3",
                           "--seed", "1", "--svg", str(svg))
        assert code == 0
        assert out.splitlines()[0] == "n,delta,verdict,good_run,queries,depth,wall_ms,seed"
        rows = list(csv.DictReader(io.StringIO(out)))
        assert len(rows) == 6 and [int(r["n"]) for r in rows] == [20] * 3 + [40] * 3
        assert all(r["verdict"] == "IsTree" for r in rows)
        text = svg.read_text()
        assert text.startswith("<svg") and "n log^2 n" in text and "polyline" in text

    def test_to_file(self, capsys, tmp_path):
        out = tmp_path / "b.csv"
        code, stdout, _ = run(capsys, "bench", "--family", "grid", "--sizes", "16", "--out", str(out))
        assert code == 0 and stdout == "" and out.read_text().startswith(",".join(CSV_FIELDS))

    def test_reproducible_queries(self):
        spec = ExperimentSpec("tree_plus_edges", [30], trials=2, seed=4)
        a = [(r.queries, r.verdict) for r in run_bench(spec)]
        b = [(r.queries, r.verdict) for r in run_bench(spec, workers=2)]
        assert a == b

    @pytest.mark.parametrize("argv", [["--sizes", "40,20"], ["--sizes", "20", "--mode", "marginal"],
                                      ["--sizes", "20", "--trials", "0"]])
    def test_usage(self, capsys, argv):
        assert run(capsys, "bench", "--family", "tree", *argv)[0] == 2


class TestVerify:
    def test_small_clean(self, capsys):
        code, out, _ = run(capsys, "verify", "--n-max", "8", "--trials", "2", "--families", "tree,cycle")
        rep = json.loads(out)
        assert code == 0 and rep["ok"] and rep["instances"] == 4

    def test_inject(self, capsys):
        code, out, _ = run(capsys, "verify", "--n-max", "7", "--trials", "1", "--families", "tree",
                           "--inject-unfaithful")
        rep = json.loads(out)
        assert code == 0
        assert [p["family"] for p in rep["precondition_failures"]] == ["injected"]

    def test_bad_family(self, capsys):
        assert run(capsys, "verify", "--families", "bogus")[0] == 2

    def test_n_max_limit(self, capsys):
        assert run(capsys, "verify", "--n-max", "20")[0] == 2
