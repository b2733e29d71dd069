"""End-to-end tests of the command line interface.

Everything runs in-process through main(argv) so exit codes, stdout
payloads and stderr diagnostics are all observable without subprocesses.
"""

import json
import math

import numpy as np
import pytest

from cmphase.cli import main

GAUSS_TPC_R1_THETA = 0.9081137742012796
CAUCHY_TPC_R1 = 0.9207028302184803


def run(capsys, *argv):
    rc = main(list(argv))
    captured = capsys.readouterr()
    return rc, captured.out, captured.err


def run_json(capsys, *argv):
    rc, out, err = run(capsys, *argv)
    assert rc == 0, err
    return json.loads(out)


class TestParsing:
    def test_no_arguments_is_usage_error(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main([])
        assert exc.value.code == 1

    def test_unknown_choice_is_usage_error(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["simulate", "--model", "weibull"])
        assert exc.value.code == 1

    def test_version(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["--version"])
        assert exc.value.code == 0
        assert "cmphase" in capsys.readouterr().out


class TestSimulate:
    def test_default_payload(self, capsys):
        payload = run_json(capsys, "simulate", "--omega", "0.9")
        assert set(payload) == {"y", "z", "estimates", "manifest"}
        assert payload["estimates"]["estimator"] == "simple"
        assert payload["z"]["abs"] > 0.0
        assert payload["manifest"]["command"] == "simulate"
        assert payload["manifest"]["config"]["omega"] == 0.9
        assert payload["manifest"]["config"]["L"] == 100

    def test_reproducible(self, capsys):
        a = run_json(capsys, "simulate", "--omega", "0.9", "--seed", "7")
        b = run_json(capsys, "simulate", "--omega", "0.9", "--seed", "7")
        assert a == b

    def test_auto_omega(self, capsys):
        payload = run_json(capsys, "simulate", "--omega", "auto:theta")
        man = payload["manifest"]
        assert man["omega_rule"] == "auto:theta"
        assert man["omega_substituted"] is False
        np.testing.assert_allclose(
            man["config"]["omega"], GAUSS_TPC_R1_THETA, rtol=1e-6
        )

    def test_joint_estimator(self, capsys):
        payload = run_json(
            capsys, "simulate", "--omega", "0.9", "--L", "5000", "--estimator", "joint"
        )
        est = payload["estimates"]
        assert est["estimator"] == "joint"
        assert 0.0 < est["theta_hat"] <= 2.0 * math.pi
        assert est["sigma_hat"] > 0.0

    def test_strict_saturation_exit_code(self, capsys):
        rc, out, err = run(
            capsys, "simulate", "--L", "1", "--channel-noise-var", "100",
            "--sigma", "0.1", "--omega", "0.5", "--seed", "0", "--strict",
        )
        assert rc == 2
        assert json.loads(out)["estimates"]["saturated"] is True
        assert "saturated" in err

    def test_invalid_config_returns_one(self, capsys):
        rc, out, err = run(capsys, "simulate", "--omega", "0.9", "--sigma", "-1")
        assert rc == 1
        assert "sigma" in err


class TestConfigFile:
    def test_file_and_flag_precedence(self, capsys, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps({"sigma": 2.0, "L": 50, "omega": 0.4}))
        payload = run_json(
            capsys, "simulate", "--config", str(path), "--sigma", "1.5"
        )
        config = payload["manifest"]["config"]
        assert config["sigma"] == 1.5  # flag beats file
        assert config["L"] == 50  # file beats default
        assert config["omega"] == 0.4

    def test_unknown_file_key(self, capsys, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps({"snr": 3.0}))
        rc, _, err = run(capsys, "simulate", "--config", str(path))
        assert rc == 1
        assert "snr" in err

    def test_missing_file(self, capsys, tmp_path):
        rc, _, err = run(capsys, "simulate", "--config", str(tmp_path / "nope.json"))
        assert rc == 1


class TestAsv:
    def test_point_report(self, capsys):
        payload = run_json(
            capsys, "asv", "--omega", "0.9", "--theta", "1.0", "--closed-forms"
        )
        assert set(payload) == {"asv", "closed_forms", "manifest"}
        asv = payload["asv"]
        assert asv["mode"] == "total"
        assert asv["asv_theta"] > 0 and asv["asv_sigma"] > 0 and asv["asv_gamma"] > 0
        forms = payload["closed_forms"]
        assert set(forms) == {"theta", "sigma", "gamma"}
        assert forms["theta"]["verified"] is True
        assert forms["sigma"]["verified"] is True
        assert forms["gamma"]["verified"] is False
        np.testing.assert_allclose(forms["theta"]["value"], asv["asv_theta"], rtol=1e-9)

    def test_no_theta_no_gamma(self, capsys):
        payload = run_json(capsys, "asv", "--omega", "0.9", "--closed-forms")
        assert payload["asv"]["asv_gamma"] is None
        assert set(payload["closed_forms"]) == {"theta", "sigma"}

    def test_auto_omega(self, capsys):
        payload = run_json(capsys, "asv", "--omega", "auto:theta")
        np.testing.assert_allclose(
            payload["manifest"]["config"]["omega"], GAUSS_TPC_R1_THETA, rtol=1e-6
        )
        assert payload["manifest"]["omega_rule"] == "auto:theta"

    def test_auto_gamma_requires_theta(self, capsys):
        rc, _, err = run(capsys, "asv", "--omega", "auto:gamma")
        assert rc == 1
        assert "--theta" in err


class TestOptOmega:
    def test_all_targets_bundle(self, capsys):
        payload = run_json(
            capsys, "opt-omega", "--model", "cauchy", "--gamma", "1.0"
        )
        assert set(payload) == {"results", "method", "optima", "manifest"}
        optima = payload["optima"]
        assert set(optima) == {
            "omega_theta", "omega_sigma", "omega_gamma", "flags", "method",
        }
        assert optima["method"] == "golden-section"
        for key in ("omega_theta", "omega_sigma", "omega_gamma"):
            np.testing.assert_allclose(optima[key], CAUCHY_TPC_R1, rtol=1e-6)
        assert optima["flags"] == {
            "theta": "interior", "sigma": "interior", "gamma": "interior",
        }

    def test_single_target(self, capsys):
        payload = run_json(capsys, "opt-omega", "--target", "theta")
        assert set(payload["results"]) == {"theta"}
        assert "optima" not in payload
        np.testing.assert_allclose(
            payload["results"]["theta"]["omega_star"], GAUSS_TPC_R1_THETA, rtol=1e-6
        )

    def test_analytic_block(self, capsys):
        payload = run_json(
            capsys, "opt-omega", "--model", "laplace", "--target", "theta", "--analytic"
        )
        analytic = payload["results"]["theta"]["analytic"]
        assert set(analytic) == {"value", "agrees_with_numeric", "note"}
        assert analytic["agrees_with_numeric"] is False  # beta-convention slip

    def test_gamma_target_requires_gamma(self, capsys):
        rc, _, err = run(capsys, "opt-omega", "--target", "gamma")
        assert rc == 1
        assert "--gamma" in err


class TestAre:
    def test_text_table(self, capsys):
        rc, out, err = run(capsys, "are")
        assert rc == 0
        lines = out.splitlines()
        assert lines[0].split() == ["model", "parameter", "ARE", "reference", "match"]
        body = [ln for ln in lines[1:] if ln and not ln.startswith("*")]
        assert len(body) == 6
        laplace_sigma = next(ln for ln in body if ln.startswith("laplace") and "sigma" in ln)
        assert "no *" in laplace_sigma
        assert any(ln.startswith("*") for ln in lines)  # mismatch footnote

    def test_single_model(self, capsys):
        rc, out, _ = run(capsys, "are", "--model", "gaussian")
        body = [
            ln for ln in out.splitlines()[1:] if ln and not ln.startswith("*")
        ]
        assert len(body) == 2
        assert all(ln.startswith("gaussian") for ln in body)

    def test_json(self, capsys):
        payload = run_json(capsys, "are", "--json")
        reports = payload["reports"]
        assert len(reports) == 6
        assert {r["matches_reference"] for r in reports} == {True, False}
        assert set(reports[0]) == {
            "model", "parameter", "inf_asv", "fisher_bound",
            "are", "reference_are", "matches_reference",
        }


class TestSweep:
    def test_stdout_csv(self, capsys):
        rc, out, err = run(
            capsys, "sweep", "--axis", "omega", "--grid", "0.5,0.9",
            "--trials", "16", "--L", "100",
        )
        assert rc == 0
        lines = out.splitlines()
        assert lines[0].startswith("# manifest: ")
        manifest = json.loads(lines[0][len("# manifest: "):])
        assert manifest["command"] == "sweep"
        assert manifest["trials"] == 16
        assert lines[1].startswith("axis,value,")
        assert len(lines) == 4  # manifest + header + 2 rows

    def test_grid_colon_form(self, capsys):
        rc, out, _ = run(
            capsys, "sweep", "--axis", "omega", "--grid", "0.4:0.8:3",
            "--trials", "8", "--L", "50",
        )
        assert rc == 0
        rows = out.splitlines()[2:]
        assert [r.split(",")[1] for r in rows] == ["0.4", "0.6", "0.8"]

    def test_bad_grid(self, capsys):
        rc, _, err = run(capsys, "sweep", "--axis", "omega", "--grid", "1:2")
        assert rc == 1
        assert "grid" in err

    def test_file_rerun_byte_identical(self, capsys, tmp_path):
        # The manifest line embeds the output path, so byte identity is
        # defined for reruns of the same command writing the same file.
        out = tmp_path / "rows.csv"
        args = (
            "sweep", "--axis", "sigma", "--grid", "0.8,1.2", "--trials", "16",
            "--L", "100", "--omega", "0.9", "--seed", "3", "--out", str(out),
        )
        assert run(capsys, *args)[0] == 0
        first = out.read_bytes()
        assert run(capsys, *args)[0] == 0
        assert out.read_bytes() == first

    def test_sigma_axis_auto_omega_rule(self, capsys):
        rc, out, _ = run(
            capsys, "sweep", "--axis", "sigma", "--grid", "0.8,1.6",
            "--trials", "8", "--L", "50", "--omega", "auto:theta",
            "--model", "cauchy", "--theta-R", str(math.pi), "--theta", "1.0",
        )
        assert rc == 0
        lines = out.splitlines()
        manifest = json.loads(lines[0][len("# manifest: "):])
        assert manifest["omega_rule"] == "auto:theta"
        assert len(lines) == 4
