"""
Tests for configuration module.
"""

import os
import tempfile
import pytest
import yaml

from src.config import (
    CONFIG_ENV_VAR,
    NUMERIC_DEFAULTS,
    ConfigError,
    expand_env_vars,
    get_default_config,
    load_config,
    validate_config,
)


class TestExpandEnvVars:
    """Tests for environment variable expansion."""

    def test_expand_simple_var(self, monkeypatch):
        """Test expanding a simple environment variable."""
        monkeypatch.setenv('TEST_VAR', 'test_value')
        result = expand_env_vars('${TEST_VAR}')
        assert result == 'test_value'

    def test_expand_missing_var(self):
        """Test expanding a missing variable returns empty string."""
        result = expand_env_vars('${NONEXISTENT_VAR_12345}')
        assert result == ''

    def test_expand_in_dict(self, monkeypatch):
        """Test expanding variables in nested sections."""
        monkeypatch.setenv('PAINLEVE_RTOL', '1e-8')
        data = {'numeric': {'rtol': '${PAINLEVE_RTOL}', 'atol': 1e-12}}
        result = expand_env_vars(data)
        assert result == {'numeric': {'rtol': '1e-8', 'atol': 1e-12}}

    def test_expand_in_list(self, monkeypatch):
        """Test expanding variables in list."""
        monkeypatch.setenv('ITEM', 'value')
        data = ['${ITEM}', 'static']
        result = expand_env_vars(data)
        assert result == ['value', 'static']


class TestValidateConfig:
    """Tests for configuration validation."""

    def test_empty_config_gets_defaults(self):
        """Test that an empty config is filled with defaults."""
        config = {}
        validate_config(config)
        assert config == get_default_config()

    def test_partial_numeric_section(self):
        """Test that given values are kept and the rest defaulted."""
        config = {'numeric': {'rtol': 1e-6}}
        validate_config(config)
        assert config['numeric']['rtol'] == 1e-6
        assert config['numeric']['atol'] == NUMERIC_DEFAULTS['atol']

    def test_string_numbers(self):
        """Test numbers given as strings (from environment expansion)."""
        config = {'numeric': {'rtol': '1e-8', 'max_steps': '500'}}
        validate_config(config)
        assert config['numeric']['rtol'] == 1e-8
        assert config['numeric']['max_steps'] == 500

    def test_unknown_numeric_key_raises_error(self):
        """Test that a misspelled numeric key raises ConfigError."""
        with pytest.raises(ConfigError) as exc_info:
            validate_config({'numeric': {'rtoll': 1e-8}})
        assert 'rtoll' in str(exc_info.value)

    def test_non_positive_raises_error(self):
        """Test that non-positive tolerances raise ConfigError."""
        with pytest.raises(ConfigError) as exc_info:
            validate_config({'numeric': {'atol': 0}})
        assert 'numeric.atol' in str(exc_info.value)

    def test_rtol_below_one(self):
        """Test that rtol must be below 1."""
        with pytest.raises(ConfigError):
            validate_config({'numeric': {'rtol': 1.5}})

    def test_max_steps_integer(self):
        """Test that max_steps must be a whole number."""
        with pytest.raises(ConfigError):
            validate_config({'numeric': {'max_steps': 10.5}})
        with pytest.raises(ConfigError):
            validate_config({'numeric': {'max_steps': True}})

    def test_invalid_concurrency_raises_error(self):
        """Test that invalid concurrency raises ConfigError."""
        with pytest.raises(ConfigError) as exc_info:
            validate_config({'sweep': {'concurrency': 0}})
        assert 'concurrency' in str(exc_info.value)

    def test_log_level(self):
        """Test that log levels are normalized and checked."""
        config = {'logging': {'level': 'debug'}}
        validate_config(config)
        assert config['logging']['level'] == 'DEBUG'
        with pytest.raises(ConfigError) as exc_info:
            validate_config({'logging': {'level': 'LOUD'}})
        assert 'logging.level' in str(exc_info.value)

    def test_section_must_be_mapping(self):
        """Test that a scalar section raises ConfigError."""
        with pytest.raises(ConfigError):
            validate_config({'numeric': 5})

    def test_unknown_sections_kept(self):
        """Test that unrelated top-level sections pass through."""
        config = {'notes': {'owner': 'lab'}}
        validate_config(config)
        assert config['notes'] == {'owner': 'lab'}


class TestLoadConfig:
    """Tests for configuration loading."""

    def test_load_valid_config(self):
        """Test loading a valid configuration file."""
        config_data = {
            'numeric': {'rtol': 1e-9, 'blowup_threshold': 1e6},
            'sweep': {'concurrency': 2},
        }

        with tempfile.NamedTemporaryFile(mode='w', suffix='.yaml', delete=False) as f:
            yaml.dump(config_data, f)
            f.flush()

            config = load_config(f.name)

            assert config['numeric']['rtol'] == 1e-9
            assert config['numeric']['blowup_threshold'] == 1e6
            assert config['sweep']['concurrency'] == 2
            assert config['logging']['level'] == 'INFO'

        os.unlink(f.name)

    def test_load_example_config(self):
        """Test that the shipped example is valid."""
        path = os.path.join(os.path.dirname(__file__), '..', 'config', 'config.example.yaml')
        assert load_config(path) == get_default_config()

    def test_load_from_env_var(self, monkeypatch, tmp_path):
        """Test that the environment variable selects the file."""
        path = tmp_path / 'painleve.yaml'
        path.write_text('sweep:\n  concurrency: 3\n')
        monkeypatch.setenv(CONFIG_ENV_VAR, str(path))
        assert load_config()['sweep']['concurrency'] == 3

    def test_defaults_without_file(self, monkeypatch):
        """Test that no file and no variable give the defaults."""
        monkeypatch.delenv(CONFIG_ENV_VAR, raising=False)
        assert load_config() == get_default_config()

    def test_empty_file(self, tmp_path):
        """Test that an empty file gives the defaults."""
        path = tmp_path / 'empty.yaml'
        path.write_text('')
        assert load_config(str(path)) == get_default_config()

    def test_load_nonexistent_file_raises_error(self):
        """Test that loading nonexistent file raises ConfigError."""
        with pytest.raises(ConfigError) as exc_info:
            load_config('/nonexistent/path/config.yaml')
        assert 'not found' in str(exc_info.value)

    def test_load_invalid_yaml_raises_error(self):
        """Test that invalid YAML raises ConfigError."""
        with tempfile.NamedTemporaryFile(mode='w', suffix='.yaml', delete=False) as f:
            f.write("invalid: yaml: content: [")
            f.flush()

            with pytest.raises(ConfigError) as exc_info:
                load_config(f.name)
            assert 'Invalid YAML' in str(exc_info.value)

        os.unlink(f.name)

    def test_non_mapping_raises_error(self, tmp_path):
        """Test that a YAML list is rejected."""
        path = tmp_path / 'list.yaml'
        path.write_text('- 1\n- 2\n')
        with pytest.raises(ConfigError):
            load_config(str(path))
