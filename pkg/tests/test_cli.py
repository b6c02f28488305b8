import json

import numpy as np
import pytest

from cyclecert import cli
from cyclecert.certify import epsilon_p
from cyclecert.config import (
    ConfigError,
    config_to_dict,
    load_config,
    parse_config,
    save_config,
    to_family,
)

MINIMAL = {
    "d": 2,
    "subsystems": [
        {"id": 1, "matrix": [[0.5, 0.0], [0.0, 0.5]]},
        {"id": 2, "matrix": [[2.0, 0.0], [0.0, 2.0]]},
    ],
    "edges": [[1, 2], [2, 1]],
}


def write_json(path, obj):
    path.write_text(json.dumps(obj))
    return str(path)


class TestConfig:
    def test_round_trip_identity(self, exp1_config_path, tmp_path):
        cfg = load_config(exp1_config_path)
        out = tmp_path / "copy.json"
        save_config(cfg, out)
        assert load_config(out) == cfg
        assert config_to_dict(load_config(out)) == config_to_dict(cfg)

    def test_unknown_key_rejected(self):
        with pytest.raises(ConfigError, match="unknown config keys"):
            parse_config(dict(MINIMAL, extra=1))

    def test_missing_required_key(self):
        bad = {k: v for k, v in MINIMAL.items() if k != "edges"}
        with pytest.raises(ConfigError, match="edges"):
            parse_config(bad)

    def test_ragged_matrix_rejected(self):
        bad = json.loads(json.dumps(MINIMAL))
        bad["subsystems"][0]["matrix"][0] = [0.5]
        with pytest.raises(ConfigError, match=r"subsystems\[0\].matrix"):
            parse_config(bad)

    def test_noncontiguous_ids_rejected(self):
        bad = json.loads(json.dumps(MINIMAL))
        bad["subsystems"][1]["id"] = 3
        with pytest.raises(ConfigError, match="ids must be exactly"):
            parse_config(bad)

    def test_edge_out_of_range(self):
        with pytest.raises(ConfigError, match=r"edges\[0\]"):
            parse_config(dict(MINIMAL, edges=[[1, 5]]))

    def test_partition_must_cover(self):
        with pytest.raises(ConfigError, match="cover"):
            parse_config(dict(MINIMAL, stable=[1], unstable=[]))

    def test_to_family_infers_partition(self):
        fam = to_family(parse_config(MINIMAL))
        assert fam.stable == frozenset({1})
        assert fam.unstable == frozenset({2})

    def test_bad_json_reports_location(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{\n  \"d\": 2,\n}")
        with pytest.raises(ConfigError, match="line"):
            load_config(path)


class TestExitCodes:
    def test_certified_family(self, exp1_config_path, tmp_path):
        out = tmp_path / "report.json"
        code = cli.main(["certify", "--config", str(exp1_config_path),
                         "--out", str(out)])
        assert code == cli.EXIT_OK
        report = json.loads(out.read_text())
        assert report["status"] == "certified"
        assert report["certificate"]["p"] == 1
        assert report["certificate"]["valid"] is True
        assert report["cycle_set"]["cycles"] == [[1, 2]]

    def test_not_found_without_cycles(self, tmp_path):
        cfg = write_json(tmp_path / "nocycle.json",
                         dict(MINIMAL, edges=[[1, 2]]))
        code = cli.main(["certify", "--config", cfg])
        assert code == cli.EXIT_NOT_FOUND

    def test_not_found_without_stable_subsystem(self, tmp_path):
        cfg = write_json(tmp_path / "allunstable.json", {
            "d": 2,
            "subsystems": [{"id": 1, "matrix": [[2.0, 0.0], [0.0, 2.0]]}],
            "edges": [[1, 1]],
        })
        out = tmp_path / "report.json"
        code = cli.main(["certify", "--config", cfg, "--out", str(out)])
        assert code == cli.EXIT_NOT_FOUND
        assert json.loads(out.read_text())["reason"] == "no stable subsystem"

    def test_missing_config_is_error(self, tmp_path, capsys):
        code = cli.main(["certify", "--config", str(tmp_path / "nope.json")])
        assert code == cli.EXIT_ERROR
        assert "error:" in capsys.readouterr().err

    def test_invalid_gamma_is_error(self, exp1_config_path, capsys):
        code = cli.main(["certify", "--config", str(exp1_config_path),
                         "--gamma", "5.0"])
        assert code == cli.EXIT_ERROR
        assert "error:" in capsys.readouterr().err


class TestReports:
    def test_report_bytes_are_deterministic(self, exp1_config_path, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        cli.main(["certify", "--config", str(exp1_config_path), "--out", str(a)])
        cli.main(["certify", "--config", str(exp1_config_path), "--out", str(b)])
        assert a.read_bytes() == b.read_bytes()

    def test_declared_count_mismatch_warning(self, exp1_config_path, tmp_path):
        out = tmp_path / "report.json"
        cli.main(["certify", "--config", str(exp1_config_path),
                  "--out", str(out)])
        report = json.loads(out.read_text())
        assert any("declares 3 subsystems" in w for w in report["warnings"])

    def test_simulate_outputs(self, exp1_config_path, tmp_path):
        csv_path = tmp_path / "env.csv"
        report_path = tmp_path / "sim.json"
        code = cli.main(["simulate", "--config", str(exp1_config_path),
                         "--out", str(csv_path), "--report", str(report_path),
                         "--horizon", "50", "--trials", "10"])
        assert code == cli.EXIT_OK
        lines = csv_path.read_text().splitlines()
        assert lines[0] == "t,norm_x"
        assert len(lines) == 52
        report = json.loads(report_path.read_text())
        assert report["ges"]["horizon"] == 50
        # spectral radius of the period-2 product is about 0.79, so 50 steps
        # shrink the envelope by several orders of magnitude
        assert report["ges"]["max_final_over_initial"] < 1e-2

    def test_cycles_listing(self, exp1_config_path, tmp_path):
        out = tmp_path / "cycles.json"
        code = cli.main(["cycles", "--config", str(exp1_config_path),
                         "--out", str(out)])
        assert code == cli.EXIT_OK
        report = json.loads(out.read_text())
        assert report["vertices"]["1"]["cycles"] == [[1, 2]]
        assert report["vertices"]["1"]["concatenable"]["start"] == 1

    def test_rearrange_check(self, tmp_path, capsys):
        out = tmp_path / "check.json"
        code = cli.main(["rearrange-check", "--word", "2 4 3 1 4 3 2 1",
                         "--p", "1", "--m", "2", "--out", str(out)])
        assert code == cli.EXIT_OK
        report = json.loads(out.read_text())
        assert report["term_count"] == 9
        assert report["term_bound"] == 9
        assert report["within_bound"] is True
        assert report["l1"] == "2 4 3 4 3 2"
        assert report["residual_rel"] < 1e-12


class TestEpsilonCurves:
    def test_table_values(self, tmp_path):
        out = tmp_path / "curves.csv"
        code = cli.main(["epsilon-curves", "--n-values", "2,3",
                         "--m-values", "1", "--norm-bound-values", "1.25",
                         "--rho-values", "0.9", "--gamma", "0.0001",
                         "--out", str(out)])
        assert code == cli.EXIT_OK
        lines = out.read_text().splitlines()
        assert lines[0] == "N,m,M,rho,gamma,epsilon_bound,status"
        n2 = lines[1].split(",")
        assert n2[0] == "2" and n2[-1] == "ok"
        assert float(n2[5]) == pytest.approx(0.09989, abs=2e-5)

    def test_infeasible_rows_flagged(self, tmp_path):
        out = tmp_path / "curves.csv"
        cli.main(["epsilon-curves", "--n-values", "2", "--m-values", "5",
                  "--norm-bound-values", "2", "--rho-values", "0.99",
                  "--gamma", "0.01", "--out", str(out)])
        row = out.read_text().splitlines()[1].split(",")
        assert row[-1] == "infeasible"
        assert row[5] == ""

    def test_range_syntax(self, tmp_path):
        out = tmp_path / "curves.csv"
        cli.main(["epsilon-curves", "--n-values", "2..4,6", "--m-values", "1",
                  "--norm-bound-values", "2", "--rho-values", "0.9",
                  "--out", str(out)])
        ns = [line.split(",")[0] for line in out.read_text().splitlines()[1:]]
        assert ns == ["2", "3", "4", "6"]


class TestRandomFamily:
    def test_seed_deterministic(self, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        cli.main(["random-family", "--n", "4", "--dim", "3", "--seed", "5",
                  "--out", str(a)])
        cli.main(["random-family", "--n", "4", "--dim", "3", "--seed", "5",
                  "--out", str(b)])
        assert a.read_bytes() == b.read_bytes()

    def test_generated_config_loads(self, tmp_path):
        path = tmp_path / "fam.json"
        cli.main(["random-family", "--n", "3", "--dim", "2", "--seed", "1",
                  "--out", str(path)])
        cfg = load_config(path)
        fam = to_family(cfg)
        assert fam.n == 3
        assert set(cfg.stable) == fam.stable

    def test_delta_zero_commutes_exactly(self, tmp_path):
        path = tmp_path / "fam.json"
        cli.main(["random-family", "--n", "3", "--dim", "3", "--seed", "2",
                  "--delta", "0", "--out", str(path)])
        fam = to_family(load_config(path))
        for p in sorted(fam.stable):
            assert epsilon_p(fam, p) == 0.0

    def test_commutators_scale_with_delta(self, tmp_path):
        # eps_p(delta) <= K * delta for the perturbed commuting construction
        eps = {}
        for delta in (1e-3, 1e-2, 1e-1):
            path = tmp_path / f"fam{delta}.json"
            cli.main(["random-family", "--n", "3", "--dim", "3", "--seed", "2",
                      "--delta", str(delta), "--out", str(path)])
            fam = to_family(load_config(path))
            p = min(fam.stable)
            eps[delta] = epsilon_p(fam, p)
        for delta, value in eps.items():
            assert value <= 10.0 * delta
        assert eps[1e-3] < eps[1e-1]


class TestAtomicWrite:
    def test_leaves_no_temp_files(self, exp1_config_path, tmp_path):
        out = tmp_path / "report.json"
        cli.main(["certify", "--config", str(exp1_config_path),
                  "--out", str(out)])
        leftovers = [p for p in tmp_path.iterdir() if p.name != "report.json"]
        assert leftovers == []

    def test_overwrites_existing(self, exp1_config_path, tmp_path):
        out = tmp_path / "report.json"
        out.write_text("stale")
        cli.main(["certify", "--config", str(exp1_config_path),
                  "--out", str(out)])
        assert json.loads(out.read_text())["status"] == "certified"
