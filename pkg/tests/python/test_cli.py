import csv
import json
from importlib import resources

import numpy as np
import pytest

from periodic_stokes.cli import build_parser, load_run_config, main, parse_run_config
from periodic_stokes.exceptions import ConfigError
from periodic_stokes.spectral_core import PhysicalField, write_field


def _run(command, config, out, *extra):
    return main([command, "--config", str(config), "--out", str(out), *extra])


def _csv(path):
    with path.open(encoding="utf-8", newline="") as f:
        return list(csv.reader(f))


class TestRunConfig:
    @pytest.mark.parametrize(
        "text",
        [
            "version = 1\n[problem\n",
            "version = 2\n",
            "seed = 1\n",
            "version = 1\n[problem]\ncolour = 1\n",
            "version = 1\n[data]\ngenerator = \"files\"\n",
            "version = 1\n[data]\ngenerator = \"vortex\"\n",
            "version = 1\n[audit]\nsymbols = [\"M3\"]\n",
            "version = 1\nseed = -1\n",
        ],
    )
    def test_invalid(self, text):
        """Malformed, unversioned, unknown or inconsistent configurations are refused."""
        with pytest.raises(ConfigError):
            parse_run_config(text)

    def test_missing_data_file(self, write_config):
        """Field paths must point at existing files."""
        path = write_config('[data]\ngenerator = "files"\nf = "f.field"\ng = "g.field"\nh = "h"')
        with pytest.raises(ConfigError):
            load_run_config(path)

    def test_missing_config(self, tmp_path):
        """A missing configuration file is a configuration error."""
        with pytest.raises(ConfigError):
            load_run_config(tmp_path / "absent.toml")

    def test_packaged_defaults(self):
        """The shipped configuration describes the reference run."""
        text = (resources.files("periodic_stokes") / "configs" / "default.toml").read_text()
        config = parse_run_config(text)
        assert config.problem.time_modes == 16
        assert config.problem.tangential_modes == 64
        assert config.problem.nodes == 128
        assert len(config.verify.suites) == 8
        assert config.sweep.trials == 50
        assert config.suite_config().tolerances.recovery == 1e-6

    def test_digest_tracks_content(self, write_config):
        """Equal configurations hash equally; any change moves the hash."""
        first = load_run_config(write_config("seed = 3", name="a.toml"))
        second = load_run_config(write_config("seed = 3", name="b.toml"))
        third = load_run_config(write_config("seed = 4", name="c.toml"))
        assert first.digest() == second.digest()
        assert first.digest() != third.digest()


class TestParser:
    def test_seed_must_be_unsigned(self):
        """Negative seeds are rejected by the parser."""
        with pytest.raises(SystemExit):
            build_parser().parse_args(["solve", "--config", "run.toml", "--seed", "-1"])

    def test_resolution_scale_must_be_positive(self):
        """The resolution scale is a positive integer."""
        with pytest.raises(SystemExit):
            build_parser().parse_args(["sweep", "--config", "run.toml", "--resolution-scale", "0"])

    def test_defaults(self):
        """No overrides unless given."""
        args = build_parser().parse_args(["verify", "--config", "run.toml"])
        assert args.out is None
        assert args.seed is None
        assert not args.perturb_q0
        assert args.resolution_scale == 1


class TestSolve:
    def test_artifacts(self, write_config, tmp_path):
        """A manufactured solve writes every artifact and a manifest without timings."""
        out = tmp_path / "out"
        assert _run("solve", write_config('[data]\ngenerator = "zero"'), out) == 0
        for name in ("u.field", "p.field", "provenance.json", "residuals.csv", "slices.csv"):
            assert (out / name).is_file()
        manifest = json.loads((out / "manifest.json").read_text())
        assert "timings.json" not in manifest
        assert "manifest.json" not in manifest
        assert {"summary.json", "recovery.json", "u.field"} <= manifest.keys()
        summary = json.loads((out / "summary.json").read_text())
        assert summary["status"] == "passed"
        assert summary["timings"] == "timings.json"
        provenance = json.loads((out / "provenance.json").read_text())
        assert set(provenance["stages"]) == {"steady", "heat_lift", "corrector", "boundary"}
        rows = _csv(out / "slices.csv")
        assert rows[0] == ["x_n", "u1", "u2", "p"]
        assert len(rows) == 82

    def test_manifest_is_reproducible(self, write_config, tmp_path):
        """Two identical runs list identical hashes."""
        config = write_config('[data]\ngenerator = "single-mode-swirl"')
        assert _run("solve", config, tmp_path / "a") == 0
        assert _run("solve", config, tmp_path / "b") == 0
        first = (tmp_path / "a" / "manifest.json").read_text()
        assert first == (tmp_path / "b" / "manifest.json").read_text()

    def test_composite_recovery(self, write_config, tmp_path):
        """The composite recipe solves within the recovery tolerance."""
        out = tmp_path / "out"
        assert _run("solve", write_config(), out) == 0
        recovery = json.loads((out / "recovery.json").read_text())
        assert recovery["recipe"] == "composite"
        assert max(recovery["velocity"], recovery["pressure_gradient"]) < 1e-6

    def test_incompatible_files(self, write_config, grid, tmp_path):
        """Normal boundary flux at k != 0 exits with the compatibility code."""
        write_field(tmp_path / "f.field", PhysicalField.zeros(grid, 2))
        write_field(tmp_path / "g.field", PhysicalField.zeros(grid, 1))
        h = PhysicalField.from_function(
            grid, lambda t, x, xn: [0.0 * t, np.sin(t)], 2, on_boundary=True
        )
        write_field(tmp_path / "h.field", h)
        body = '[data]\ngenerator = "files"\nf = "f.field"\ng = "g.field"\nh = "h.field"'
        assert _run("solve", write_config(body), tmp_path / "out") == 3

    def test_configuration_errors(self, write_config, tmp_path):
        """Unknown keys and a mismatched action exit with the configuration code."""
        assert _run("solve", write_config("[data]\nbogus = 1"), tmp_path / "a") == 2
        assert _run("solve", write_config('action = "sweep"'), tmp_path / "b") == 2


class TestOtherCommands:
    def test_zero_sweep(self, write_config, tmp_path):
        """Zero data give degenerate rows and no ratio."""
        out = tmp_path / "out"
        body = '[sweep]\ngenerator = "zero"\ntrials = 3\nq_values = [2.0]'
        assert _run("sweep", write_config(body), out) == 0
        rows = _csv(out / "sweep.csv")
        assert rows[0] == ["q", "trial", "lhs", "rhs", "ratio", "degenerate", "besov_flagged"]
        assert len(rows) == 4
        assert all(row[4] == "" and row[5] == "true" for row in rows[1:])

    def test_besov_single_shell(self, write_config, tmp_path):
        """A pure time mode on shell 1 scales by 2^{s}."""
        out = tmp_path / "out"
        assert _run("besov", write_config("[besov]\nshells = [1]"), out) == 0
        rows = _csv(out / "besov.csv")
        assert len(rows) == 2
        assert rows[1][0] == "single-shell-1"

    def test_symbols_audit(self, write_config, tmp_path):
        """One symbol at one density gives one row per mask."""
        out = tmp_path / "out"
        body = '[audit]\nsymbols = ["M2"]\nlevels = 4\nrefine = false'
        assert _run("symbols-audit", write_config(body), out) == 0
        rows = _csv(out / "audit.csv")
        assert rows[0] == ["symbol", "mask", "sup", "points_per_octave", "divergent"]
        assert [row[1] for row in rows[1:]] == ["00", "01", "10", "11"]

    def test_verify(self, write_config, tmp_path):
        """Selected suites run and are recorded."""
        out = tmp_path / "out"
        body = '[verify]\nsuites = ["transforms", "partition"]\npartition_points = 1000'
        assert _run("verify", write_config(body), out) == 0
        report = json.loads((out / "verify.json").read_text())
        assert [s["name"] for s in report["suites"]] == ["transforms", "partition"]
        assert "seconds" not in report["suites"][0]

    def test_verify_detects_perturbation(self, write_config, tmp_path):
        """The fault injection fails the identities suite."""
        body = '[verify]\nsuites = ["identities"]'
        assert _run("verify", write_config(body), tmp_path / "out", "--perturb-q0") == 1
