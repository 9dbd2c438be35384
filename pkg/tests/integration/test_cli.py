"""
Integration tests for the twoweight command line
"""

import json

import pytest
import yaml

from explorer.config import DEFAULT_BATTERY
from twoweight import EXIT_CONFIG, EXIT_FAILED, EXIT_OK, build_parser, main


def write_config(path, **values):
    path.write_text(yaml.safe_dump(values))
    return str(path)


@pytest.mark.integration
class TestCli:
    """Test suite for twoweight main()"""

    def test_parser(self):
        """Test subcommands and flag destinations"""
        args = build_parser().parse_args(["verify", "--eps", "0.3", "--inject-fault", "kernel-sign", "--scale", "0.5"])

        assert args.command == "verify"
        assert args.eps == 0.3
        assert args.inject_fault == "kernel-sign"
        assert args.scale == 0.5
        with pytest.raises(SystemExit):
            build_parser().parse_args(["verify", "--inject-fault", "off-by-one"])

    def test_run_lemmas(self, temp_dir, capsys):
        """Test a lemmas run from flags"""
        code = main(
            [
                "run",
                "--suite",
                "lemmas",
                "--depth",
                "4",
                "--seeds",
                "0..1",
                "--sigma-family",
                "uniform",
                "--w-family",
                "power",
                "--out",
                str(temp_dir),
                "--threads",
                "1",
            ]
        )

        assert code == EXIT_OK
        data = json.loads((temp_dir / "report.json").read_text())
        assert data["config"]["w_family"] == ["power:0.5"]
        assert data["config"]["suite"] == "lemmas"
        assert "monotonicity" in capsys.readouterr().out

    def test_invalid_epsilon(self, capsys):
        """Test that ε outside (0, 1/2) is a configuration error"""
        code = main(["run", "--eps", "0.7", "--out", "unused"])

        assert code == EXIT_CONFIG
        assert "epsilon" in capsys.readouterr().err

    def test_unknown_family(self, capsys):
        """Test an unknown weight family"""
        assert main(["run", "--sigma-family", "gaussian"]) == EXIT_CONFIG
        assert "gaussian" in capsys.readouterr().err

    def test_config_file_errors(self, temp_dir, capsys):
        """Test file:line: field: message errors from a config file"""
        path = write_config(temp_dir / "exp.yaml", suite="lemmas", depth=4, colour="red")

        assert main(["run", "--config", path]) == EXIT_CONFIG
        assert f"{path}:" in capsys.readouterr().err

    def test_missing_replay_file(self, temp_dir):
        """Test replay of a file that does not exist"""
        assert main(["run", "--replay", str(temp_dir / "missing.json")]) == EXIT_CONFIG

    def test_fault_then_replay(self, temp_dir, capsys):
        """Test verify under an injected fault, then replay of a failure file"""
        battery = {name: {"count": 0} for name in DEFAULT_BATTERY}
        battery["monotonicity"] = {"count": 3}
        out = temp_dir / "out"
        path = write_config(temp_dir / "exp.yaml", depth=5, battery=battery, threads=1)

        code = main(["verify", "--config", path, "--out", str(out), "--inject-fault", "kernel-sign"])
        assert code == EXIT_FAILED
        failures = sorted((out / "failures").glob("*.json"))
        assert failures

        capsys.readouterr()
        assert main(["run", "--replay", str(failures[0])]) == EXIT_FAILED
        printed = capsys.readouterr().out
        assert "failure reproduced" in printed
        assert "byte-identical record" in printed

    def test_flags_override_config_file(self, temp_dir):
        """Test that flags win over file values"""
        battery = {name: {"count": 0} for name in DEFAULT_BATTERY}
        battery["haar_axioms"] = {"count": 1}
        path = write_config(temp_dir / "exp.yaml", depth=12, battery=battery, out=str(temp_dir / "file_out"))

        assert main(["verify", "--config", path, "--depth", "3", "--out", str(temp_dir / "flag_out")]) == EXIT_OK
        data = json.loads((temp_dir / "flag_out" / "report.json").read_text())
        assert data["config"]["depth"] == 3
        assert not (temp_dir / "file_out").exists()
