import json

import pytest

from valadj import adjustment_riskfree_cpty, mc_value_riskfree_cpty
from valadj.cli import (
    EXIT_CONFIG,
    EXIT_NUMERIC,
    EXIT_OK,
    PROFILE_COLUMNS,
    SUMMARY_COLUMNS,
    ConfigError,
    load_config,
    main,
    run_scenario,
)


def base_config(**overrides):
    doc = {
        "market": {"risk_free": 0.01, "collateral": 0.005},
        "credit": {"investor": 0.02},
        "bond_recovery": 0.4,
        "closeout": {"recovery_investor": 0.4, "recovery_counterparty": 0.4},
        "schedule": {"flows": [{"t": 1.0, "amount": 1.0}]},
        "regime": "riskfree_cpty",
        "sweep": {"lambda_bar": [0.0, 0.02]},
        "numerics": {"panels_per_year": 64, "mc_paths": 4000, "seed": 7},
    }
    doc.update(overrides)
    return doc


def write_config(tmp_path, doc, name="scenario.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return path


class TestValidate:
    def test_accepts_good_config(self, tmp_path, capsys):
        path = write_config(tmp_path, base_config())
        assert main(["validate", str(path)]) == EXIT_OK
        assert "config ok" in capsys.readouterr().out

    def test_rejects_bad_json(self, tmp_path, capsys):
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        assert main(["validate", str(path)]) == EXIT_CONFIG
        err = json.loads(capsys.readouterr().err)
        assert err["error"] == "config"
        assert "invalid JSON" in err["diagnostics"][0]

    def test_missing_file(self, tmp_path, capsys):
        assert main(["validate", str(tmp_path / "nope.json")]) == EXIT_CONFIG
        err = json.loads(capsys.readouterr().err)
        assert "cannot read config" in err["detail"]

    def test_collects_all_diagnostics(self, tmp_path, capsys):
        doc = base_config()
        del doc["market"]
        doc["regime"] = "hedged"
        doc["bond_recovery"] = 2.0
        path = write_config(tmp_path, doc)
        assert main(["validate", str(path)]) == EXIT_CONFIG
        err = json.loads(capsys.readouterr().err)
        joined = "\n".join(err["diagnostics"])
        assert "market.risk_free" in joined
        assert "market.collateral" in joined
        assert "regime" in joined
        assert "bond_recovery" in joined


class TestConfigParsing:
    def test_round_trip_through_canonical_json(self, tmp_path):
        doc = base_config(
            market={
                "risk_free": [{"t": 0.0, "value": 0.01}, {"t": 2.0, "value": 0.03}],
                "collateral": 0.005,
            }
        )
        cfg = load_config(write_config(tmp_path, doc))
        again = load_config(write_config(tmp_path, cfg.to_json_dict(), "again.json"))
        assert again == cfg

    def test_scalar_curve_becomes_flat(self, tmp_path):
        cfg = load_config(write_config(tmp_path, base_config()))
        assert cfg.market.risk_free.value(10.0) == 0.01

    def test_defaults(self, tmp_path):
        doc = base_config()
        del doc["numerics"]
        cfg = load_config(write_config(tmp_path, doc))
        assert cfg.panels_per_year == 512
        assert cfg.mc_paths == 100_000
        assert cfg.seed == 0
        assert cfg.profiles_out == "profiles.csv"
        assert cfg.summary_out == "summary.csv"

    def test_theta_sweep_rejected_outside_correlated(self, tmp_path):
        doc = base_config()
        doc["sweep"]["theta"] = [1.0]
        with pytest.raises(ConfigError, match="sweep.theta"):
            load_config(write_config(tmp_path, doc))

    def test_correlated_requirements(self, tmp_path):
        doc = base_config(regime="correlated", sweep={"theta": [0.0, 1.0]})
        # counterparty missing and bond recovery nonzero: both reported
        with pytest.raises(ConfigError) as info:
            load_config(write_config(tmp_path, doc))
        msgs = info.value.diagnostics
        assert any("credit.counterparty" in m for m in msgs)
        assert any("zero bond recovery" in m for m in msgs)

    def test_correlated_good_config(self, tmp_path):
        doc = base_config(
            regime="correlated",
            sweep={"theta": [0.0, 1.0]},
            bond_recovery=0.0,
        )
        doc["credit"]["counterparty"] = 0.03
        cfg = load_config(write_config(tmp_path, doc))
        assert cfg.theta_sweep == (0.0, 1.0)
        assert cfg.lambda_bar_sweep == ()

    def test_independent_needs_counterparty(self, tmp_path):
        doc = base_config(regime="independent")
        with pytest.raises(ConfigError, match="credit.counterparty"):
            load_config(write_config(tmp_path, doc))

    def test_negative_lambda_bar_rejected(self, tmp_path):
        doc = base_config(sweep={"lambda_bar": [-0.01]})
        with pytest.raises(ConfigError, match="non-negative"):
            load_config(write_config(tmp_path, doc))

    def test_piecewise_lambda_bar_accepted(self, tmp_path):
        doc = base_config(
            sweep={"lambda_bar": [[{"t": 0.0, "value": 0.0}, {"t": 1.0, "value": 0.02}]]}
        )
        cfg = load_config(write_config(tmp_path, doc))
        assert cfg.lambda_bar_sweep[0].value(2.0) == 0.02

    def test_numerics_type_checks(self, tmp_path):
        doc = base_config(
            numerics={"panels_per_year": 0, "mc_paths": 1, "seed": True}
        )
        with pytest.raises(ConfigError) as info:
            load_config(write_config(tmp_path, doc))
        joined = "\n".join(info.value.diagnostics)
        assert "panels_per_year" in joined
        assert "mc_paths" in joined
        assert "seed" in joined

    def test_empty_sweep_rejected(self, tmp_path):
        doc = base_config(sweep={})
        with pytest.raises(ConfigError, match="lambda_bar"):
            load_config(write_config(tmp_path, doc))


class TestRun:
    def test_writes_reports(self, tmp_path, capsys):
        path = write_config(tmp_path, base_config())
        assert main(["run", str(path), "--out", str(tmp_path / "out")]) == EXIT_OK
        out = capsys.readouterr().out
        assert out.count("u0=") == 2

        profiles = (tmp_path / "out" / "profiles.csv").read_text().splitlines()
        summary = (tmp_path / "out" / "summary.csv").read_text().splitlines()
        assert profiles[0] == PROFILE_COLUMNS
        assert summary[0] == SUMMARY_COLUMNS
        # two sweep points, 65 grid rows each
        assert len(profiles) == 1 + 2 * 65
        assert len(summary) == 3
        # no Monte Carlo columns without --mc
        assert profiles[1].split(",")[9] == ""
        assert summary[1].split(",")[6] == ""

    def test_summary_values_match_engine(self, tmp_path, flat_market, investor, closeout):
        path = write_config(tmp_path, base_config())
        cfg = load_config(path)
        main(["run", str(path), "--out", str(tmp_path / "out")])
        rows = (tmp_path / "out" / "summary.csv").read_text().splitlines()[1:]
        for row, lam in zip(rows, (0.0, 0.02)):
            fields = row.split(",")
            prof = adjustment_riskfree_cpty(
                flat_market, investor, 0.4, lam, cfg.schedule, closeout,
                panels_per_year=64,
            )
            # repr round trip: exact equality after parsing
            assert float(fields[4]) == prof.adjustment()
            assert float(fields[5]) == prof.value()

    def test_mc_columns_on_first_profile_row_only(self, tmp_path):
        path = write_config(tmp_path, base_config(sweep={"lambda_bar": [0.02]}))
        main(["run", str(path), "--mc", "--out", str(tmp_path / "out")])
        rows = (tmp_path / "out" / "profiles.csv").read_text().splitlines()
        first = rows[1].split(",")
        assert first[3] == "0.0"
        assert first[9] != "" and first[10] != ""
        for row in rows[2:]:
            fields = row.split(",")
            assert fields[9] == "" and fields[10] == ""

    def test_mc_seed_offsets_per_sweep_point(self, tmp_path, flat_market, investor, closeout):
        path = write_config(tmp_path, base_config())
        cfg = load_config(path)
        main(["run", str(path), "--mc", "--out", str(tmp_path / "out")])
        rows = (tmp_path / "out" / "summary.csv").read_text().splitlines()[1:]
        for i, (row, lam) in enumerate(zip(rows, (0.0, 0.02))):
            fields = row.split(",")
            est = mc_value_riskfree_cpty(
                flat_market, investor, 0.4, lam, cfg.schedule, closeout, 4000, 7 + i
            )
            assert fields[6] == repr(est.mean)
            assert fields[7] == repr(est.std_error)
            assert fields[8] == "4000"
            assert fields[9] == str(7 + i)

    def test_byte_deterministic_reruns(self, tmp_path):
        path = write_config(tmp_path, base_config())
        main(["run", str(path), "--mc", "--out", str(tmp_path / "a")])
        main(["run", str(path), "--mc", "--out", str(tmp_path / "b")])
        for name in ("profiles.csv", "summary.csv"):
            assert (tmp_path / "a" / name).read_bytes() == (
                tmp_path / "b" / name
            ).read_bytes()

    def test_panels_override(self, tmp_path):
        path = write_config(tmp_path, base_config(sweep={"lambda_bar": [0.0]}))
        main(["run", str(path), "--out", str(tmp_path / "out"), "--panels", "8"])
        rows = (tmp_path / "out" / "profiles.csv").read_text().splitlines()
        assert len(rows) == 1 + 9

    def test_bad_panels_override(self, tmp_path, capsys):
        path = write_config(tmp_path, base_config())
        assert main(["run", str(path), "--panels", "0"]) == EXIT_CONFIG
        assert json.loads(capsys.readouterr().err)["error"] == "config"

    def test_config_error_exit_code(self, tmp_path, capsys):
        path = write_config(tmp_path, base_config(regime="nope"))
        assert main(["run", str(path)]) == EXIT_CONFIG
        err = json.loads(capsys.readouterr().err)
        assert err["error"] == "config"
        assert err["diagnostics"]

    def test_numeric_failure_exit_code(self, tmp_path, capsys):
        # a rate this extreme overflows the panel exponentials; the run
        # must fail loudly with the numeric exit code, not write NaNs
        doc = base_config(market={"risk_free": -1e6, "collateral": 0.005})
        path = write_config(tmp_path, doc)
        assert main(["run", str(path), "--out", str(tmp_path / "out")]) == EXIT_NUMERIC
        err = json.loads(capsys.readouterr().err)
        assert err["error"] == "numeric"
        assert not (tmp_path / "out" / "profiles.csv").exists()

    def test_correlated_run(self, tmp_path):
        doc = base_config(
            regime="correlated",
            bond_recovery=0.0,
            sweep={"theta": [0.0, 1.0]},
            schedule={"flows": [{"t": 1.0, "amount": 1.0}]},
        )
        doc["credit"]["counterparty"] = 0.03
        path = write_config(tmp_path, doc)
        assert main(["run", str(path), "--out", str(tmp_path / "out")]) == EXIT_OK
        rows = (tmp_path / "out" / "summary.csv").read_text().splitlines()[1:]
        assert [r.split(",")[2] for r in rows] == ["0.0", "1.0"]
        assert all(r.split(",")[1] == "0.0" for r in rows)

    def test_run_scenario_custom_filenames(self, tmp_path):
        doc = base_config(output={"profiles": "p.csv", "summary": "s.csv"})
        cfg = load_config(write_config(tmp_path, doc))
        notes = []
        p, s = run_scenario(cfg, out_dir=tmp_path / "out", echo=notes.append)
        assert p.name == "p.csv" and p.exists()
        assert s.name == "s.csv" and s.exists()
        assert len(notes) == 2
