import json

import pytest

from phi4lat import cli


def run(args, tmp_path):
    return cli.main(args + ["--out", str(tmp_path)])


def test_cost_table_is_deterministic(tmp_path):
    assert run(["cost-table"], tmp_path / "a") == 0
    assert run(["cost-table"], tmp_path / "b") == 0
    for name in ("cost_table.csv", "cost_table.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    head = (tmp_path / "a" / "cost_table.csv").read_text().splitlines()
    assert len(head) == 5 and not any(",IIIb," in line for line in head)


def test_cost_table_surface_columns(tmp_path):
    assert run(["cost-table", "--surface"], tmp_path) == 0
    head = (tmp_path / "cost_table.csv").read_text().splitlines()[0]
    assert head.endswith("code_distance,physical_qubits,wallclock_s")


def test_iiib_needs_flag(tmp_path):
    assert run(["cost-table", "--algs", "IIIb"], tmp_path) == 2
    assert run(["cost-table", "--algs", "IIIb", "--conjecture-iiib"], tmp_path) == 0
    assert ",IIIb," in (tmp_path / "cost_table.csv").read_text()


def test_unknown_algorithm(tmp_path):
    assert run(["cost-table", "--algs", "V"], tmp_path) == 2


def test_bad_config(tmp_path):
    bad = tmp_path / "bad.toml"
    bad.write_text("[lattice\nm = ")
    assert run(["cost-table", "--config", str(bad)], tmp_path) == 2
    neg = tmp_path / "neg.toml"
    neg.write_text("[lattice]\nlam = -1.0\n")
    assert run(["cost-table", "--config", str(neg)], tmp_path) == 2


def test_config_override(tmp_path):
    cfg = tmp_path / "c.toml"
    cfg.write_text("[lattice]\nP = 4\n[budget]\nepsilon = 0.1\n")
    assert run(["cost-table", "--config", str(cfg), "--algs", "I"], tmp_path) == 0
    text = (tmp_path / "cost_table.csv").read_text()
    assert "P=4" in text and "eps=0.1" in text


def test_sweep_outputs(tmp_path):
    assert run(["cost-sweep", "--axis", "k", "--range", "4:64:3log", "--algs", "I,IIIa"],
               tmp_path) == 0
    data = json.loads((tmp_path / "sweep_k.json").read_text())
    assert data["values"] == [4, 16, 64]
    assert all(a < b for a, b in zip(data["total_t"]["I"], data["total_t"]["I"][1:]))
    svg = (tmp_path / "sweep_k.svg").read_text()
    assert svg.startswith("<svg") and "polyline" in svg


def test_sweep_parallel_matches_serial(tmp_path):
    args = ["cost-sweep", "--axis", "eps", "--range", "1e-4:1e-2:3log", "--algs", "I,II"]
    assert run(args, tmp_path / "s") == 0
    assert run(args + ["--jobs", "2"], tmp_path / "p") == 0
    assert (tmp_path / "s" / "sweep_eps.csv").read_bytes() == \
        (tmp_path / "p" / "sweep_eps.csv").read_bytes()


def test_bad_range(tmp_path):
    assert run(["cost-sweep", "--range", "8:4:3lin"], tmp_path) == 2


def test_census(tmp_path):
    assert run(["census", "--power", "2", "--n-max", "127"], tmp_path) == 0
    rows = (tmp_path / "census_p2_n127.csv").read_text().splitlines()
    assert any(r.startswith("b14,37,") for r in rows)
    assert any(r.startswith("b2,0,") for r in rows)


def test_scatter_from_input(tmp_path):
    inp = tmp_path / "levels.csv"
    inp.write_text("L,E,dE\n6.283185307179586,2.8284271247461903,0.01\n")
    assert run(["scatter", "--input", str(inp)], tmp_path) == 0
    lines = (tmp_path / "phases.csv").read_text().splitlines()
    assert lines[0].startswith("L,E,dE,n,p,delta")
    assert abs(float(lines[1].split(",")[5])) < 1e-12


def test_scatter_dense_default(tmp_path):
    assert run(["scatter"], tmp_path) == 0
    assert len((tmp_path / "phases.csv").read_text().splitlines()) > 1


def test_verify_injection_exit_code(tmp_path, capsys):
    assert run(["verify", "--inject-failure", "census"], tmp_path) == 3
    report = json.loads((tmp_path / "verify_report.json").read_text())
    assert report["failed"] == ["census"]
    assert "FAIL census" in capsys.readouterr().out


def test_parse_range():
    assert cli.parse_range("4:128:6log", "k") == [4, 8, 16, 32, 64, 128]
    assert cli.parse_range("1:3:3lin", "omega") == [1, 2, 3]
    with pytest.raises(cli.ConfigParse):
        cli.parse_range("a:b", "k")


def test_cost_table_dense_checks(tmp_path):
    cfg = tmp_path / "small.toml"
    cfg.write_text("[lattice]\nP = 2\nd = 1\n[cutoffs]\nk = 2\n")
    assert run(["cost-table", "--config", str(cfg), "--dense"], tmp_path) == 0
    checks = json.loads((tmp_path / "dense_checks.json").read_text())
    assert set(checks) == {"I", "IIIa"}
    assert all(c["residual"] < 1e-10 for c in checks.values())
    assert run(["cost-table", "--dense"], tmp_path / "big") == 0
    big = json.loads((tmp_path / "big" / "dense_checks.json").read_text())
    assert all("skipped" in c for c in big.values())
