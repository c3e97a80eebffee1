"""Tests for the configuration front end."""

import math

import pytest

from layeropt.cli import ConfigError, main, parse_config, run

BASELINE_CONFIG = """
[model]
family = exponential
mean = 1.0

[kernel]
family = quadratic
c = 0.5
gamma_r = 0.1

[market]
gamma = 0.1
epsilon = 0.05
risk_measure = var

[run]
command = check
"""


def _with(command: str, extra: str = "") -> str:
    return BASELINE_CONFIG.replace("command = check", f"command = {command}") + extra


class TestParseConfig:
    def test_baseline(self):
        config = parse_config(BASELINE_CONFIG)
        assert config.market.gamma == 0.1
        assert config.market.epsilon == 0.05
        assert config.model.family == "exponential"
        assert config.kernel.gamma_r == 0.1
        assert config.command == "check"

    def test_epsilon_out_of_range(self):
        bad = BASELINE_CONFIG.replace("epsilon = 0.05", "epsilon = 0.7")
        with pytest.raises(ConfigError, match=r"epsilon must lie in \(0, 0.5\)"):
            parse_config(bad)

    def test_kernel_slope_out_of_range(self):
        bad = BASELINE_CONFIG.replace("c = 0.5", "c = 1.2")
        with pytest.raises(ConfigError, match=r"c must lie in \(0, 1\]"):
            parse_config(bad)

    def test_unknown_key_rejected(self):
        bad = BASELINE_CONFIG.replace("mean = 1.0", "mean = 1.0\nmood = sunny")
        with pytest.raises(ConfigError, match="unknown keys"):
            parse_config(bad)

    def test_unknown_section_rejected(self):
        with pytest.raises(ConfigError, match="unknown sections"):
            parse_config(BASELINE_CONFIG + "\n[extras]\nx = 1\n")

    def test_missing_section_rejected(self):
        bad = BASELINE_CONFIG.replace("[market]", "[marketing]")
        with pytest.raises(ConfigError):
            parse_config(bad)

    def test_contract_layers_parse(self):
        config = parse_config(_with("evaluate", "\n[contract]\nlayers = [[1.0, 3.0], [5.0, inf]]\n"))
        layers = config.contract.layers()
        assert layers[0].attachment == 1.0
        assert math.isinf(layers[1].detachment)

    def test_power_kernel(self):
        text = BASELINE_CONFIG.replace("family = quadratic\nc = 0.5", "family = power\nr = 0.5")
        config = parse_config(text)
        assert config.kernel.k0_prime_at_zero == pytest.approx(0.5)


class TestRun:
    def test_check_writes_expected_row(self, tmp_path, capsys):
        out = tmp_path / "report.csv"
        config = parse_config(BASELINE_CONFIG)
        config = type(config)(**{**config.__dict__, "out_path": str(out)})
        assert run(config) == 0
        text = out.read_text()
        header, row = text.strip().splitlines()
        cells = dict(zip(header.split(","), row.split(",")))
        assert cells["predicted_shape"] == "single-layer"
        assert float(cells["tail_lhs"]) == pytest.approx(0.025, abs=1e-9)
        assert float(cells["tail_rhs"]) == pytest.approx(0.225625, abs=1e-9)

    def test_check_deterministic_bytes(self, tmp_path):
        out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
        for out in (out1, out2):
            config = parse_config(BASELINE_CONFIG)
            config = type(config)(**{**config.__dict__, "out_path": str(out)})
            run(config)
        assert out1.read_bytes() == out2.read_bytes()

    def test_optimize_row(self, tmp_path):
        out = tmp_path / "opt.csv"
        config = parse_config(_with("optimize"))
        config = type(config)(**{**config.__dict__, "out_path": str(out)})
        assert run(config) == 0
        header, row = out.read_text().strip().splitlines()
        cells = dict(zip(header.split(","), row.split(",")))
        assert cells["classification"] == "single-layer"
        assert float(cells["ratio"]) == pytest.approx(0.033410, abs=5e-5)
        attach = float(cells["layers"].split(":")[0])
        assert attach == pytest.approx(2.9215, abs=0.005)

    def test_sweep_rows(self, tmp_path):
        extra = "\n[sweep]\ngamma = 0.05, 0.1\ngamma_r = 0.1, 0.2\nepsilon = 0.05\noptimize = true\n"
        out = tmp_path / "sweep.csv"
        config = parse_config(_with("sweep", extra))
        config = type(config)(**{**config.__dict__, "out_path": str(out)})
        assert run(config) == 0
        lines = out.read_text().strip().splitlines()
        assert len(lines) == 5  # header + 4 cells
        header = lines[0].split(",")
        shape_col = header.index("predicted_shape")
        realized_col = header.index("realized_layer_count")
        for line in lines[1:]:
            cells = line.split(",")
            assert cells[shape_col] == "single-layer"
            assert cells[realized_col] in {"0", "1"}

    def test_evaluate(self, tmp_path):
        out = tmp_path / "eval.csv"
        config = parse_config(_with("evaluate", "\n[contract]\nlayers = [[1.0, 2.995732273553991]]\n"))
        config = type(config)(**{**config.__dict__, "out_path": str(out)})
        assert run(config) == 0
        header, row = out.read_text().strip().splitlines()
        cells = dict(zip(header.split(","), row.split(",")))
        assert float(cells["risk"]) == pytest.approx(1.0, abs=1e-6)

    def test_asymptotics(self, tmp_path):
        extra = "\n[asymptotics]\nn = 100, 1000\nunit_mean = 1.0\nunit_sd = 1.0\n"
        out = tmp_path / "asym.csv"
        config = parse_config(_with("asymptotics", extra))
        config = type(config)(**{**config.__dict__, "out_path": str(out)})
        assert run(config) == 0
        lines = out.read_text().strip().splitlines()
        assert len(lines) == 3


class TestMain:
    def test_exit_zero_on_success(self, tmp_path, capsys):
        path = tmp_path / "cfg.ini"
        path.write_text(BASELINE_CONFIG)
        out = tmp_path / "out.csv"
        assert main(["--config", str(path), "--out", str(out)]) == 0
        assert out.exists()

    def test_exit_two_on_config_error(self, tmp_path, capsys):
        path = tmp_path / "cfg.ini"
        path.write_text(BASELINE_CONFIG.replace("epsilon = 0.05", "epsilon = 0.9"))
        assert main(["--config", str(path)]) == 2
        assert "config error" in capsys.readouterr().err

    def test_exit_two_on_missing_file(self, tmp_path, capsys):
        assert main(["--config", str(tmp_path / "nope.ini")]) == 2

    def test_exit_three_on_solver_error(self, tmp_path, capsys):
        # flat kernel at equal loadings puts the optimizer in the trivial regime
        text = BASELINE_CONFIG.replace("family = quadratic\nc = 0.5", "family = power\nr = 1.0")
        text = text.replace("command = check", "command = optimize")
        path = tmp_path / "cfg.ini"
        path.write_text(text)
        assert main(["--config", str(path)]) == 3
        assert "solver error" in capsys.readouterr().err

    def test_command_override(self, tmp_path):
        path = tmp_path / "cfg.ini"
        path.write_text(BASELINE_CONFIG + "\n[contract]\nlayers = [[1.0, 2.0]]\n")
        out = tmp_path / "out.csv"
        assert main(["--config", str(path), "--command", "evaluate", "--out", str(out)]) == 0
        assert "surplus" in out.read_text().splitlines()[0]

    def test_empirical_table_model(self, tmp_path):
        table = tmp_path / "table.csv"
        table.write_text("0.0,0.0\n1.0,0.6\n2.0,0.9\n")
        text = BASELINE_CONFIG.replace(
            "family = exponential\nmean = 1.0", f"family = empirical-table\npath = {table}"
        )
        path = tmp_path / "cfg.ini"
        path.write_text(text)
        out = tmp_path / "out.csv"
        assert main(["--config", str(path), "--out", str(out)]) == 0
