"""
Unit tests for the command-line front end.
"""

import csv
import json

import pytest

from driftwalk import __version__, cli, optimizer, selfcheck
from driftwalk.exceptions import NumericalError
from driftwalk.models import CostParams


def run(capsys, *argv):
    """Run the CLI and return (exit code, parsed stdout or None, stderr)."""
    code = cli.main(list(argv))
    captured = capsys.readouterr()
    payload = json.loads(captured.out) if captured.out.strip() else None
    return code, payload, captured.err


class TestCommands:
    """Test suite for the subcommands."""

    def test_bounds_zero_drift(self, capsys):
        """Test the sqrt(N) envelope at kappa = 0."""
        code, payload, _ = run(capsys, "bounds", "--alpha", "0.5", "--kappa", "0", "--n", "100")

        assert code == 0
        assert payload["command"] == "bounds"
        assert payload["version"] == __version__
        assert payload["result"]["lower"] == pytest.approx(7.97885, abs=1e-5)
        assert payload["result"]["regime"] == "ZERO_DRIFT"

    def test_optimize_upper_at_balanced_costs(self, capsys):
        """Test kappa_u = 0 and a ratio of exactly 2 at p = 2c."""
        code, payload, _ = run(capsys, "optimize", "--c", "1", "--p", "2", "--method", "upper", "--n", "100")
        result = payload["result"]

        assert code == 0
        assert result["kappa"] == 0.0
        assert result["objective"] == pytest.approx(15.9577, abs=1e-4)
        assert result["method"] == "upper"
        assert result["ratio_report"]["ratio"] == 2.0

    def test_optimize_backorder_has_no_ratio(self, capsys):
        """Test the backorder method skips the surrogate ratio."""
        code, payload, _ = run(capsys, "optimize", "--c", "1", "--b", "39", "--h-prime", "1", "--method", "backorder")

        assert code == 0
        assert payload["result"]["kappa"] == pytest.approx(1.6448536, abs=1e-6)
        assert "ratio_report" not in payload["result"]

    def test_optimize_with_holding_reports_folded_ratio(self, capsys):
        """Test the ratio report is built on the holding-folded costs."""
        code, payload, _ = run(capsys, "optimize", "--c", "1", "--p", "4", "--h", "1", "--holding", "--method", "lower")
        folded = optimizer.ratio_report(optimizer.apply_holding(CostParams(c=1.0, p=4.0, h=1.0)), 1.0, 100)

        assert code == 0
        assert payload["result"]["ratio_report"]["ratio"] == pytest.approx(folded.ratio, rel=1e-12)
        assert payload["result"]["ratio_report"]["kappa_lower"] == pytest.approx(optimizer.kappa_lower(2.0, 5.0))

    def test_equivalence_undefined_ratio(self, capsys):
        """Test p between c and 2c + h gives a null ratio and exit code 0."""
        code, payload, _ = run(capsys, "equivalence", "--c", "1", "--h", "0.5", "--p", "1.5", "10")

        assert code == 0
        assert payload["result"][0] == {"p": 1.5, "ratio": None}
        assert 0.0 < payload["result"][1]["ratio"] < 1.0

    def test_spitzer(self, capsys):
        """Test the exact flag is recorded."""
        code, payload, _ = run(capsys, "spitzer", "--kappa", "1", "--exact")

        assert code == 0
        assert payload["result"]["exact"] is True
        assert payload["params"]["kappa"] == 1.0

    def test_equivalence(self, capsys):
        """Test one ratio per p."""
        code, payload, _ = run(capsys, "equivalence", "--c", "1", "--h", "0.5", "--p", "10", "100", "1000")

        assert code == 0
        assert [row["p"] for row in payload["result"]] == [10.0, 100.0, 1000.0]

    def test_replay_is_deterministic(self, capsys):
        """Test the same parameters and seed give an identical result."""
        argv = ("simulate", "--alpha", "0.5", "--kappa", "1", "--paths", "500", "--seed", "42")
        _, first, _ = run(capsys, *argv)
        _, second, _ = run(capsys, *argv)

        assert first["result"] == second["result"]
        assert first["seed"] == 42

    def test_rho(self, capsys):
        """Test one estimate per kappa."""
        code, payload, _ = run(capsys, "rho", "--kappa", "0", "1", "--paths", "200", "--steps", "200")

        assert code == 0
        assert len(payload["result"]) == 2

    def test_hitting_nodes_too_few(self, capsys):
        """Test --nodes below two is a domain error."""
        code, payload, err = run(capsys, "hitting", "--kappa", "1", "--nodes", "1", "--x-max", "5")

        assert code == cli.EXIT_DOMAIN
        assert payload is None
        assert "nodes" in err

    def test_selfcheck(self, capsys):
        """Test every built-in check passes."""
        code, payload, _ = run(capsys, "selfcheck")

        assert code == 0
        assert all(item["passed"] for item in payload["result"])


class TestExitCodes:
    """Test suite for the exit code mapping."""

    @pytest.mark.parametrize("argv", [
        (),
        ("frobnicate",),
        ("bounds", "--alpha", "0.5"),
        ("bounds", "--alpha", "x", "--kappa", "0"),
        ("optimize", "--c", "1", "--p", "2", "--method", "newton"),
    ])
    def test_usage_errors(self, capsys, argv):
        """Test usage errors exit with 2 and print nothing on stdout."""
        code, payload, _ = run(capsys, *argv)

        assert code == cli.EXIT_USAGE
        assert payload is None

    @pytest.mark.parametrize("argv", [
        ("bounds", "--alpha", "1.5", "--kappa", "0"),
        ("bounds", "--alpha", "0.5", "--kappa", "0", "--sigma", "-1"),
        ("spitzer", "--kappa", "0"),
        ("optimize", "--c", "2", "--p", "1"),
    ])
    def test_domain_errors(self, capsys, argv):
        """Test domain errors exit with 3."""
        code, payload, err = run(capsys, *argv)

        assert code == cli.EXIT_DOMAIN
        assert payload is None
        assert "domain error" in err

    def test_numerical_failure(self, capsys, monkeypatch):
        """Test numerical failures exit with 4."""
        def broken(*args, **kwargs):
            raise NumericalError("no bracket")

        monkeypatch.setattr(optimizer, "solve_upper", broken)
        code, payload, err = run(capsys, "optimize", "--c", "1", "--p", "10", "--method", "upper")

        assert code == cli.EXIT_NUMERICAL
        assert payload is None
        assert "no bracket" in err

    def test_failed_selfcheck(self, capsys, monkeypatch):
        """Test a failed check still prints its record but exits with 4."""
        monkeypatch.setattr(selfcheck, "run_checks", lambda: [{"name": "x", "passed": False, "detail": "bad"}])
        code, payload, _ = run(capsys, "selfcheck")

        assert code == cli.EXIT_NUMERICAL
        assert payload["result"][0]["passed"] is False

    def test_version(self, capsys):
        """Test --version exits cleanly."""
        assert cli.main(["--version"]) == 0
        assert __version__ in capsys.readouterr().out


class TestConfigAndOutput:
    """Test suite for --config and --out."""

    def test_config_supplies_parameters(self, capsys, tmp_path):
        """Test config keys fill in missing flags and flags override them."""
        config = tmp_path / "run.json"
        config.write_text(json.dumps({"alpha": 0.5, "kappa": 0.0, "n": 400}))

        _, from_file, _ = run(capsys, "bounds", "--config", str(config))
        _, overridden, _ = run(capsys, "bounds", "--config", str(config), "--n", "100")

        assert from_file["params"]["n"] == 400
        assert from_file["result"]["lower"] == pytest.approx(2 * 7.978845608, rel=1e-9)
        assert overridden["params"]["n"] == 100
        assert overridden["result"]["lower"] == pytest.approx(7.978845608, rel=1e-9)

    def test_config_unknown_key(self, capsys, tmp_path):
        """Test unknown config keys are usage errors."""
        config = tmp_path / "run.json"
        config.write_text(json.dumps({"alpha": 0.5, "colour": "red"}))
        code, _, err = run(capsys, "bounds", "--config", str(config))

        assert code == cli.EXIT_USAGE
        assert "colour" in err

    def test_config_missing_file(self, capsys, tmp_path):
        """Test an unreadable config is a usage error."""
        code, _, _ = run(capsys, "bounds", "--config", str(tmp_path / "absent.json"))
        assert code == cli.EXIT_USAGE

    def test_csv_rows(self, capsys, tmp_path):
        """Test the CSV file holds one row per p with a header."""
        out = tmp_path / "eq.csv"
        code, _, _ = run(capsys, "equivalence", "--c", "1", "--h", "0.5", "--p", "10", "100", "--out", str(out))

        with open(out, newline="", encoding="utf-8") as f:
            rows = list(csv.DictReader(f))
        assert code == 0
        assert [float(row["p"]) for row in rows] == [10.0, 100.0]
        assert set(rows[0]) == {"p", "kappa", "kappa_backorder", "lost_sales", "backorder", "ratio"}
