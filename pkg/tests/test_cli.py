import json
import math

import pytest

from repulsive_strichartz.cli import build_parser, main
from repulsive_strichartz.config_parser import config_from_manifest
from repulsive_strichartz.errors import NumericError
from repulsive_strichartz.runner import run


def read(path):
    return path.read_text(encoding="utf-8")


class TestMain:
    def test_region(self, tmp_path):
        """Test the region command and its artifacts"""
        assert main(["region", "--n", "3", "--resolution", "4", "--output", str(tmp_path)]) == 0
        assert sorted(p.name for p in tmp_path.iterdir()) == ["manifest.json", "region.csv"]
        assert "0.5,0.16666666666666666,true,true,true" in read(tmp_path / "region.csv")
        manifest = json.loads(read(tmp_path / "manifest.json"))
        assert manifest["command"] == "region"
        assert manifest["parameters"] == {"n": 3, "resolution": 4}
        assert manifest["artifacts"] == ["region.csv"]

    def test_decay_fit_defaults(self, tmp_path):
        """Test the decay-fit command with default parameters"""
        assert main(["decay-fit", "--n", "1", "--tau", "1", "--output", str(tmp_path)]) == 0
        summary = json.loads(read(tmp_path / "decay_fit.json"))
        assert summary["rate"] == pytest.approx(1.0, rel=0.05)
        assert summary["reference_rate"] == 1.0
        assert read(tmp_path / "decay_fit.csv").startswith("sigma,value\n")

    def test_propagate(self, tmp_path):
        """Test the propagate command against its oracle"""
        assert main(["propagate", "--output", str(tmp_path)]) == 0
        summary = json.loads(read(tmp_path / "propagate.json"))
        assert summary["oracle_error"] < 1e-8
        assert summary["l2_out"] == pytest.approx(summary["l2_in"], rel=1e-9)
        assert abs(summary["norm_loss"]) <= 1e-9

    def test_propagate_escaping_state(self, tmp_path):
        """Test that a state spreading past the box exits with status 3"""
        assert main(["propagate", "--L", "8", "--N", "256", "--sigma", "2", "--output", str(tmp_path)]) == 3
        assert not (tmp_path / "propagate.json").exists()

    def test_propagate_restricted(self, tmp_path):
        """Test that lifting the norm-loss limit reports the restricted flow"""
        args = ["propagate", "--L", "8", "--N", "256", "--sigma", "2", "--max_norm_loss", "inf", "--output", str(tmp_path)]
        assert main(args) == 0
        summary = json.loads(read(tmp_path / "propagate.json"))
        assert summary["norm_loss"] > 0.3
        assert summary["oracle_error"] < 1e-6

    def test_config_file(self, tmp_path):
        """Test a configuration file with a flag override"""
        config = tmp_path / "run.conf"
        config.write_text(f"command = kappa-envelope\nkappa = 1\noutput = {tmp_path / 'out'}\n", encoding="utf-8")
        assert main(["--config", str(config), "kappa-envelope", "--kappa", "1/2"]) == 0
        summary = json.loads(read(tmp_path / "out" / "kappa_envelope.json"))
        assert summary["kappa"] == "1/2"
        assert summary["constant"] == pytest.approx(1.0, rel=1e-6)

    def test_deterministic(self, tmp_path):
        """Test that repeated runs write byte-identical files"""
        for name in ("a", "b"):
            args = ["resolvent-scan", "--N", "512", "--lambda_count", "9", "--jobs", "2", "--output", str(tmp_path / name)]
            assert main(args) == 0
        for path in (tmp_path / "a").iterdir():
            assert (tmp_path / "b" / path.name).read_bytes() == path.read_bytes()

    def test_manifest_replay(self, tmp_path):
        """Test that a manifest reproduces its run"""
        assert main(["region", "--n", "2", "--resolution", "8", "--output", str(tmp_path / "first")]) == 0
        manifest = json.loads(read(tmp_path / "first" / "manifest.json"))
        run(config_from_manifest(manifest, tmp_path / "second"))
        for name in ("region.csv", "manifest.json"):
            assert read(tmp_path / "second" / name) == read(tmp_path / "first" / name)

    def test_unknown_flag(self, tmp_path):
        """Test that an unknown flag exits with status 2"""
        with pytest.raises(SystemExit) as excinfo:
            main(["region", "--foo", "1", "--output", str(tmp_path)])
        assert excinfo.value.code == 2

    def test_invalid_value(self, tmp_path):
        """Test that a badly typed value exits with status 2"""
        assert main(["region", "--n", "three", "--output", str(tmp_path)]) == 2

    def test_invalid_grid(self, tmp_path):
        """Test that a domain validation failure is a configuration error"""
        assert main(["propagate", "--N", "100", "--output", str(tmp_path)]) == 2

    def test_missing_command(self, tmp_path):
        """Test that a run without a command exits with status 2"""
        assert main(["--output", str(tmp_path)]) == 2

    def test_missing_config_file(self, tmp_path):
        """Test an unreadable configuration file"""
        assert main(["--config", str(tmp_path / "absent.conf"), "region"]) == 2

    def test_refinement_failure(self, tmp_path):
        """Test that an unresolved chirp exits with status 3"""
        assert main(["propagate", "--sigma", "0.01", "--output", str(tmp_path)]) == 3

    def test_invalid_sign(self, tmp_path):
        """Test that a sign outside 1, -1 is a configuration error"""
        assert main(["birman-schwinger", "--sign", "2", "--output", str(tmp_path)]) == 2

    def test_reversed_time_window(self, tmp_path):
        """Test that t_min above t_max is a configuration error"""
        assert main(["kappa-envelope", "--t_min", "5", "--t_max", "1", "--output", str(tmp_path)]) == 2

    def test_manifest_settings(self, tmp_path):
        """Test that the manifest records the numerical settings of a scan"""
        args = ["resolvent-scan", "--N", "512", "--lambda_count", "5", "--output", str(tmp_path)]
        assert main(args) == 0
        settings = json.loads(read(tmp_path / "manifest.json"))["settings"]["resolvent"]
        assert settings["tolerance"] == 1e-6
        assert settings["max_iterations"] == 500
        assert settings["spacing_window"] == 5.0
        assert "max_condition" in settings

    def test_retarded(self, tmp_path):
        """Test the retarded command and its artifacts"""
        assert main(["retarded", "--output", str(tmp_path)]) == 0
        assert sorted(p.name for p in tmp_path.iterdir()) == ["manifest.json", "retarded.csv", "retarded.json"]
        summary = json.loads(read(tmp_path / "retarded.json"))
        assert (summary["q"], summary["r"], summary["q_dual"], summary["r_dual"]) == ("2", "inf", "1", "2")
        assert 0 < summary["ratio"] < math.inf
        assert read(tmp_path / "retarded.csv").startswith("t,norm,r\n")

    def test_retarded_inadmissible_pair(self, tmp_path):
        """Test that an inadmissible response pair is a configuration error"""
        assert main(["retarded", "--q", "3/2", "--r", "2", "--output", str(tmp_path)]) == 2

    def test_numeric_failure(self, tmp_path, mocker):
        """Test that numerical breakdowns exit with status 3"""
        mocker.patch("repulsive_strichartz.cli.run", side_effect=NumericError("solve failed"))
        assert main(["region", "--output", str(tmp_path)]) == 3


class TestBuildParser:
    def test_every_parameter_has_a_flag(self):
        """Test that subcommand flags map to parameter overrides"""
        args = build_parser().parse_args(["weighted-decay", "--rho", "2", "--Q", "3"])
        assert vars(args)["param:rho"] == "2"
        assert vars(args)["param:Q"] == "3"
        assert args.command == "weighted-decay"
