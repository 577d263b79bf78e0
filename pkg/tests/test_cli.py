import csv
import io
import json

import pytest

from intervalir.cli import main


def run(argv, capsys):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


@pytest.fixture
def small(data_dir):
    return ["--runs", data_dir / "small.run", "--qrels", data_dir / "small.qrels"]


@pytest.fixture
def table2(data_dir):
    return ["--runs", data_dir / "table2.run", "--qrels", data_dir / "table2.qrels"]


def test_measure_matches_golden(small, data_dir, capsys):
    code, out, _ = run(["measure", *small, "--measure", "P", "--cutoff", "5"], capsys)
    assert code == 0
    assert out == (data_dir / "small_P5.golden.csv").read_text()


def test_output_is_deterministic(table2, tmp_path, capsys):
    outs = []
    for jobs in (1, 3):
        target = tmp_path / f"out{jobs}.csv"
        code, _, _ = run(["rankmap", *table2, "--measure", "AP,nDCG", "--cutoff", "4",
                          "--jobs", jobs, "--out", target], capsys)
        assert code == 0
        outs.append(target.read_bytes())
    assert outs[0] == outs[1]


def test_json_output(small, capsys):
    code, out, _ = run(["measure", *small, "--measure", "P", "--cutoff", "5", "--format", "json"], capsys)
    assert code == 0
    data = json.loads(out)
    assert data[-1] == {"measure": "P@5", "topic": "all", "system": "beta", "value": 0.26666667}


def test_rankmap_table2(table2, capsys):
    code, out, _ = run(["rankmap", *table2, "--measure", "AP", "--cutoff", "4"], capsys)
    assert code == 0
    got = rows(out)
    assert {r["rb"] for r in got} == {"4"}
    assert all(float(r["rank"]) >= 1 for r in got)


def test_steps_and_space(capsys):
    code, out, _ = run(["steps", "--measure", "RBP_p05", "--cutoff", "4"], capsys)
    got = rows(out)
    assert code == 0 and len(got) == 16
    assert [float(r["value"]) for r in got] == [i / 16 for i in range(16)]
    code, out, _ = run(["steps", "--measure", "AP", "--cutoff", "3", "--rb", "5"], capsys)
    assert code == 0 and all(r["multiplicity"] for r in rows(out))
    code, out, _ = run(["space", "--measure", "DCG", "--cutoff", "5,10,15"], capsys)
    assert [int(r["distinct"]) for r in rows(out)] == [24, 768, 24576]


def test_correlate_and_sigtest(table2, capsys):
    code, out, _ = run(["correlate", *table2, "--measure", "AP", "--cutoff", "4"], capsys)
    assert code == 0
    got = rows(out)
    assert {r["kind"] for r in got} == {"overall", "topic"}
    code, out, _ = run(["correlate", *table2, "--measure", "P,R", "--cutoff", "4",
                        "--mode", "pairwise"], capsys)
    assert code == 0 and rows(out)
    code, out, _ = run(["sigtest", *table2, "--measure", "AP", "--cutoff", "4",
                        "--tests", "ttest,friedman"], capsys)
    assert code == 0 and [r["test"] for r in rows(out)] == ["ttest", "friedman"]


def test_analyze_scale(capsys):
    code, out, _ = run(["analyze-scale", "--measure", "F1", "--n-max", "3", "--k-max", "3",
                        "--versus", "P"], capsys)
    assert code == 0 and rows(out)


def test_embed(tmp_path, capsys):
    triples = tmp_path / "t.txt"
    triples.write_text("2 3 4\n2 4 3\n")
    code, out, _ = run(["embed", "--measure", "P", "--triples", triples], capsys)
    got = rows(out)
    assert code == 0
    assert [(r["common"], r["relevant"], r["value"]) for r in got] == [("12", "8", "2/3"), ("12", "6", "1/2")]


def test_config_precedence(small, tmp_path, capsys):
    conf = tmp_path / "a.conf"
    conf.write_text("# comment\nmeasure = R\ncutoff = 5\nformat = json\n")
    code, out, _ = run(["measure", *small, "--config", conf, "--measure", "P"], capsys)
    assert code == 0
    data = json.loads(out)
    assert data[0]["measure"] == "P@5"
    conf.write_text("colour = red\n")
    code, _, err = run(["measure", *small, "--config", conf], capsys)
    assert code == 2 and "colour" in err


def test_exit_codes(small, data_dir, tmp_path, capsys):
    empty = tmp_path / "empty.run"
    empty.write_text("")
    code, _, err = run(["measure", "--runs", empty, "--qrels", data_dir / "small.qrels"], capsys)
    assert code == 2 and "no records" in err
    code, _, err = run(["steps", "--measure", "AP", "--cutoff", "30", "--rb", "5"], capsys)
    assert code == 3 and "--max-enum-n" in err
    code, _, _ = run(["measure", "--runs", tmp_path / "missing.run", "--qrels", data_dir / "small.qrels"],
                     capsys)
    assert code == 2
    code, _, _ = run(["steps", "--measure", "Q", "--cutoff", "3"], capsys)
    assert code == 2
    code, _, _ = run(["steps", "--measure", "R", "--cutoff", "3"], capsys)
    assert code == 2
    with pytest.raises(SystemExit):
        main(["measure", "--ties", "avg"])
