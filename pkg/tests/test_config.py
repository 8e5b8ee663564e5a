"""
Tests for Config Loading
"""
import pytest
import sys
from pathlib import Path

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from ddsim.constants import QP2_GAMMA, SHALLOW_POCKET_GAMMA
from ddsim.exceptions import ConfigError
from ddsim.experiments.handlers import cauchy_width
from ddsim.models.schemas import ExperimentName
from ddsim.utils.config_loader import (
    apply_overrides,
    build_config,
    list_presets,
    load_config,
    parse_override,
    read_document,
    resolve_output_dir,
)


class TestOverrides:
    """Tests for --set overrides."""

    def test_numbers_and_arrays(self):
        """Values are read as TOML."""
        assert parse_override("grid.N=1024") == ("grid", "N", 1024)
        assert parse_override("model.gamma=2.5") == ("model", "gamma", 2.5)
        assert parse_override("schedule.n_values=[1, 2, 4]") == ("schedule", "n_values", [1, 2, 4])

    def test_bare_string_fallback(self):
        """Non-TOML values are kept as raw strings."""
        assert parse_override("schedule.cycle=1,X,Y,Z") == ("schedule", "cycle", "1,X,Y,Z")
        assert parse_override('model.env="gaussian"') == ("model", "env", "gaussian")

    @pytest.mark.parametrize("override", ["grid.N", "N=4", "a.b.c=1", "nosuch.key=1", "grid.=1"])
    def test_malformed(self, override):
        """Bad paths and unknown sections are refused."""
        with pytest.raises(ConfigError):
            parse_override(override)

    def test_apply_does_not_mutate(self):
        """Overrides return a copy and may create sections."""
        document = {"experiment": {"name": "fig2"}}
        merged = apply_overrides(document, ["grid.L=8.0", "experiment.seed=3"])
        assert merged["grid"] == {"L": 8.0}
        assert merged["experiment"]["seed"] == 3
        assert "seed" not in document["experiment"]


class TestBuildConfig:
    """Tests for validation of raw documents."""

    def test_defaults(self):
        """Missing sections take their defaults."""
        config = build_config({"experiment": {"name": "fig3"}})
        assert config.name == ExperimentName.FIG3
        assert config.friedrichs_lee.t == 6.0
        assert config.schedule.cycle == "1,X"

    def test_cauchy_width_defaults(self):
        """Without model.gamma fig1 runs at 4 and every other experiment at 1."""
        config = build_config({"experiment": {"name": "fig1"}})
        assert config.model.gamma is None
        assert cauchy_width(config, SHALLOW_POCKET_GAMMA) == 4.0
        assert cauchy_width(config) == QP2_GAMMA == 1.0
        config = build_config({"experiment": {"name": "fig2"}, "model": {"gamma": 2.5}})
        assert cauchy_width(config) == 2.5

    def test_unknown_section(self):
        """Stray sections are refused."""
        with pytest.raises(ConfigError, match="bogus"):
            build_config({"experiment": {"name": "fig3"}, "bogus": {}})

    def test_error_names_the_field(self):
        """Errors carry the dotted path of the bad value."""
        with pytest.raises(ConfigError, match="grid.N"):
            build_config({"experiment": {"name": "fig2"}, "grid": {"N": 1000}})

    def test_unknown_key(self):
        """Sections forbid unknown keys."""
        with pytest.raises(ConfigError, match="model.colour"):
            build_config({"experiment": {"name": "fig2"}, "model": {"colour": 1}})

    def test_unknown_experiment(self):
        """Experiment names come from the catalogue."""
        with pytest.raises(ConfigError):
            build_config({"experiment": {"name": "fig9"}})

    def test_custom_needs_kind(self):
        """A custom run names its model."""
        with pytest.raises(ConfigError):
            build_config({"experiment": {"name": "custom"}})

    @pytest.mark.parametrize("values", [[], [4, 2], [0, 1]])
    def test_n_values(self, values):
        """Cycle counts are positive and strictly increasing."""
        with pytest.raises(ConfigError):
            build_config({"experiment": {"name": "fig2"}, "schedule": {"n_values": values}})

    def test_negative_time(self):
        """Times are non-negative."""
        with pytest.raises(ConfigError, match="schedule.t_values"):
            build_config({"experiment": {"name": "fig2"}, "schedule": {"t_values": [-1.0]}})


class TestFiles:
    """Tests for reading TOML files and presets."""

    def test_presets_shipped(self):
        """Every named experiment ships a preset."""
        presets = list_presets()
        for name in ExperimentName:
            assert name.value in presets

    @pytest.mark.parametrize("name", [e.value for e in ExperimentName])
    def test_presets_load(self, name):
        """Presets are valid configurations."""
        config = load_config(name)
        assert config.name.value == name

    def test_file_with_overrides(self, tmp_path):
        """Overrides apply on top of the file."""
        path = tmp_path / "run.toml"
        path.write_text('[experiment]\nname = "fig2"\n\n[grid]\nL = 64.0\nN = 1024\n')
        config = load_config(path, ["grid.N=2048"])
        assert config.grid.N == 2048
        assert config.grid.L == 64.0

    def test_missing_file(self, tmp_path):
        """Unknown paths raise ConfigError."""
        with pytest.raises(ConfigError):
            read_document(tmp_path / "missing.toml")

    def test_parse_error(self, tmp_path):
        """Malformed TOML raises ConfigError."""
        path = tmp_path / "broken.toml"
        path.write_text("[experiment\nname = ")
        with pytest.raises(ConfigError):
            read_document(path)


class TestOutputDir:
    """Tests for output directory precedence."""

    @pytest.fixture
    def config(self):
        return build_config({"experiment": {"name": "fig3"}, "output": {"dir": "from_config"}})

    def test_config_value(self, config, monkeypatch):
        """[output] dir is the fallback."""
        monkeypatch.delenv("DDSIM_OUT", raising=False)
        assert resolve_output_dir(config) == Path("from_config")

    def test_environment_wins_over_config(self, config, monkeypatch):
        """DDSIM_OUT beats the config file."""
        monkeypatch.setenv("DDSIM_OUT", "from_env")
        assert resolve_output_dir(config) == Path("from_env")

    def test_cli_wins(self, config, monkeypatch):
        """--out beats everything."""
        monkeypatch.setenv("DDSIM_OUT", "from_env")
        assert resolve_output_dir(config, "from_cli") == Path("from_cli")


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
