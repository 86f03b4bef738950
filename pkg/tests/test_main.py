"""
Tests for the main.py module of the de Branges Spectral Laboratory.

This module contains tests for the CLI interface and the orchestration class.
"""

import json
import os
from unittest.mock import MagicMock, patch

import pytest
import yaml

import main
from debranges_lab.errors import ConfigError
from debranges_lab.spectral_measure import SpectralMeasure
from main import (
    EXIT_CONFIG_ERROR,
    EXIT_NUMERICAL_FAILURE,
    EXIT_PASS,
    EXIT_VERIFICATION_FAILURE,
    SpectralLabSystem,
    _exit_code,
    build_parser,
    parse_kappa,
)


@pytest.fixture
def settings_file(quiet_settings, temp_output_dir):
    """Settings YAML with file logging switched off."""
    path = os.path.join(temp_output_dir, "settings.yaml")
    with open(path, "w") as f:
        yaml.safe_dump(quiet_settings, f)
    return path


def run_cli(argv):
    """Run main.main() with argv and return (exit code, printed lines)."""
    with patch('sys.argv', ['main.py'] + argv):
        with patch('builtins.print') as mock_print:
            with pytest.raises(SystemExit) as excinfo:
                main.main()
    printed = [call.args[0] if call.args else "" for call in mock_print.call_args_list]
    return excinfo.value.code, printed


class TestHelpers:
    """Test suite for the CLI helper functions."""

    def test_parse_kappa(self):
        """Test N=VALUE parsing."""
        assert parse_kappa(["1=2", "3=0.5"]) == {1: 2.0, 3: 0.5}
        assert parse_kappa(None) == {}

    @pytest.mark.parametrize("item", ["1", "a=2", "1=x"])
    def test_parse_kappa_invalid(self, item):
        """Test that malformed entries are configuration errors."""
        with pytest.raises(ConfigError):
            parse_kappa([item])

    def test_exit_codes(self):
        """Test the mapping from result status to exit code."""
        assert _exit_code({"status": "success"}) == EXIT_PASS
        assert _exit_code({"status": "pass"}) == EXIT_PASS
        assert _exit_code({"status": "fail"}) == EXIT_VERIFICATION_FAILURE
        assert _exit_code({"status": "error", "exit_code": EXIT_CONFIG_ERROR}) == EXIT_CONFIG_ERROR
        assert _exit_code({"status": "error"}) == EXIT_NUMERICAL_FAILURE

    def test_parser_global_flags(self):
        """Test that every subcommand accepts the global flags."""
        args = build_parser().parse_args(['verify', '--config', 'exp.json', '--tol', '1e-9', '--lambda-max', '50',
                                          '--out', 'out', '--seed', '7', '--suites', 'parseval', 'gauge'])
        assert args.command == 'verify'
        assert args.tol == 1e-9
        assert args.lambda_max == 50.0
        assert args.seed == 7
        assert args.suites == ['parseval', 'gauge']

    def test_parser_requires_config(self):
        """Test that --config is mandatory."""
        with patch('sys.stderr'):
            with pytest.raises(SystemExit):
                build_parser().parse_args(['spectrum'])


class TestMainModule:
    """Test suite for the CLI commands with a mocked system."""

    def test_no_command(self):
        """Test that running without a command prints help and exits 2."""
        with patch('sys.argv', ['main.py']):
            with patch('argparse.ArgumentParser.print_help') as mock_help:
                with pytest.raises(SystemExit) as excinfo:
                    main.main()
        mock_help.assert_called_once()
        assert excinfo.value.code == EXIT_CONFIG_ERROR

    @patch('main.SpectralLabSystem')
    def test_spectrum_command(self, mock_system):
        """Test the spectrum command in the CLI."""
        mock_instance = mock_system.return_value
        mock_instance.compute_spectrum.return_value = {
            "status": "success",
            "measure": SpectralMeasure.from_arrays([1.0, 4.0], [0.6, 2.5], 25.0),
            "output_files": ["out/free_spectrum.json"],
        }

        code, printed = run_cli(['spectrum', '--config', 'exp.json', '--lambda-max', '25', '--tol', '1e-9'])

        mock_instance.load.assert_called_once()
        args, kwargs = mock_instance.load.call_args
        assert args[0] == 'exp.json'
        assert kwargs['lambda_max'] == 25.0
        assert kwargs['tol'] == 1e-9
        assert code == EXIT_PASS
        assert "2 atoms up to lambda_max=25" in printed
        assert any(line.startswith("Output files saved to:") for line in printed)

    @patch('main.SpectralLabSystem')
    def test_kernel_command(self, mock_system):
        """Test the kernel command in the CLI."""
        mock_instance = mock_system.return_value
        mock_instance.compute_kernel.return_value = {"status": "success", "c": 2.0, "max_discrepancy": 1e-9}

        code, printed = run_cli(['kernel', '--config', 'exp.json', '--c', '2', '--grid', 'random', '--count', '5'])

        args, kwargs = mock_instance.compute_kernel.call_args
        assert kwargs['c'] == 2.0
        assert kwargs['grid'] == 'random'
        assert kwargs['count'] == 5
        assert code == EXIT_PASS
        assert any(line.startswith("Kernel table at c=2") for line in printed)

    @patch('main.SpectralLabSystem')
    def test_transform_command(self, mock_system):
        """Test the transform command in the CLI."""
        mock_instance = mock_system.return_value
        mock_instance.compute_transform.return_value = {"status": "success", "parseval_error": 1e-8,
                                                        "roundtrip_error": 1e-4}

        code, _ = run_cli(['transform', '--config', 'exp.json', '--probe', 'parabola'])

        args, kwargs = mock_instance.compute_transform.call_args
        assert kwargs['probe'] == 'parabola'
        assert code == EXIT_PASS

    @patch('main.SpectralLabSystem')
    def test_verify_failure(self, mock_system):
        """Test that a failed suite exits with code 1."""
        mock_instance = mock_system.return_value
        mock_instance.run_verification.return_value = {
            "status": "fail",
            "message": "failed: parseval",
            "rows": [{"suite": "parseval", "status": "fail", "message": "max relative error 1.2e-02"}],
        }

        code, printed = run_cli(['verify', '--config', 'exp.json', '--suites', 'parseval'])

        args, kwargs = mock_instance.run_verification.call_args
        assert kwargs['suites'] == ['parseval']
        assert code == EXIT_VERIFICATION_FAILURE
        assert "failed: parseval" in printed

    @patch('main.SpectralLabSystem')
    def test_uniqueness_command(self, mock_system):
        """Test that the verdict is printed."""
        mock_instance = mock_system.return_value
        mock_instance.run_uniqueness.return_value = {"status": "success", "verdict": "equal up to shift"}

        code, printed = run_cli(['uniqueness', '--config', 'pair.json'])

        args, kwargs = mock_instance.run_uniqueness.call_args
        assert kwargs['kappa'] == {}
        assert code == EXIT_PASS
        assert "Verdict: equal up to shift" in printed

    @patch('main.SpectralLabSystem')
    def test_counterexample_command(self, mock_system):
        """Test that --kappa reaches the counterexample."""
        mock_instance = mock_system.return_value
        counterexample = MagicMock()
        counterexample.scale_factors = (2.0, 1.0)
        mock_instance.run_uniqueness.return_value = {"status": "success", "counterexample": counterexample,
                                                     "message": "gauge relation verified"}

        code, printed = run_cli(['uniqueness', '--config', 'exp.json', '--kappa', '1=2'])

        args, kwargs = mock_instance.run_uniqueness.call_args
        assert kwargs['kappa'] == {1: 2.0}
        assert code == EXIT_PASS
        assert "Scale factors: [2.0, 1.0]" in printed

    @patch('main.SpectralLabSystem')
    def test_config_error_on_load(self, mock_system):
        """Test that an invalid experiment exits with code 2."""
        mock_system.return_value.load.side_effect = ConfigError("Invalid experiment configuration")

        code, printed = run_cli(['spectrum', '--config', 'bad.json'])

        assert code == EXIT_CONFIG_ERROR
        assert "Error: Invalid experiment configuration" in printed

    @patch('main.SpectralLabSystem')
    def test_numerical_error(self, mock_system):
        """Test that a numerical failure exits with code 3."""
        mock_instance = mock_system.return_value
        mock_instance.run_asymptotics.return_value = {"status": "error", "message": "Integration failed",
                                                      "exit_code": EXIT_NUMERICAL_FAILURE}

        code, printed = run_cli(['asymptotics', '--config', 'exp.json'])

        assert code == EXIT_NUMERICAL_FAILURE
        assert "Error: Integration failed" in printed


class TestSpectralLabSystem:
    """End-to-end tests of the orchestration class on shipped experiments."""

    def test_initialization(self, settings_file):
        """Test that the system loads the settings."""
        system = SpectralLabSystem(settings_path=settings_file)
        assert system.numerics["rtol"] == 1e-10

    def test_spectrum_end_to_end(self, settings_file, experiments_dir, temp_output_dir):
        """Test the spectrum command on the free operator with a small cutoff."""
        config = os.path.join(experiments_dir, "free_dirichlet.json")
        code, printed = run_cli(['spectrum', '--config', config, '--settings', settings_file,
                                 '--lambda-max', '25', '--out', temp_output_dir])

        assert code == EXIT_PASS
        assert "5 atoms up to lambda_max=25" in printed
        with open(os.path.join(temp_output_dir, "free_dirichlet_spectrum.json")) as f:
            document = json.load(f)
        assert document["schema"] == "v1"
        assert [atom["lambda"] for atom in document["atoms"]] == pytest.approx([1.0, 4.0, 9.0, 16.0, 25.0], rel=1e-8)
        assert os.path.exists(os.path.join(temp_output_dir, "free_dirichlet_spectrum.csv"))

    def test_verify_end_to_end(self, settings_file, experiments_dir, temp_output_dir):
        """Test that verify.json is written without timing information."""
        system = SpectralLabSystem(settings_path=settings_file)
        experiment = system.load(os.path.join(experiments_dir, "free_dirichlet.json"), lambda_max=25.0,
                                 out=temp_output_dir)
        result = system.run_verification(experiment, suites=["eigenvalues", "gauge"])

        assert result["status"] == "pass", result["message"]
        with open(os.path.join(temp_output_dir, "free_dirichlet_verify.json")) as f:
            document = json.load(f)
        assert "processing_time" not in document
        assert document["suites"]["eigenvalues"]["status"] == "pass"

    def test_uniqueness_needs_two_operators(self, settings_file, experiments_dir, temp_output_dir):
        """Test that a single-operator experiment is a configuration error."""
        system = SpectralLabSystem(settings_path=settings_file)
        experiment = system.load(os.path.join(experiments_dir, "free_dirichlet.json"), out=temp_output_dir)
        result = system.run_uniqueness(experiment)
        assert result["status"] == "error"
        assert result["exit_code"] == EXIT_CONFIG_ERROR

    def test_counterexample_end_to_end(self, settings_file, experiments_dir, temp_output_dir):
        """Test the counterexample document."""
        system = SpectralLabSystem(settings_path=settings_file)
        experiment = system.load(os.path.join(experiments_dir, "free_dirichlet.json"), lambda_max=30.0,
                                 out=temp_output_dir)
        result = system.run_uniqueness(experiment, kappa={2: 3.0})

        assert result["status"] == "success"
        with open(os.path.join(temp_output_dir, "free_dirichlet_counterexample.json")) as f:
            document = json.load(f)
        assert document["scale_factors"] == [1.0, 3.0, 1.0, 1.0, 1.0]
        assert document["verified"] is True

    def test_kernel_points_grid_needs_points(self, settings_file, experiments_dir, temp_output_dir):
        """Test that the points grid without kernel.points is a configuration error."""
        system = SpectralLabSystem(settings_path=settings_file)
        experiment = system.load(os.path.join(experiments_dir, "shifted_pair.json"), out=temp_output_dir)
        result = system.compute_kernel(experiment, grid="points")
        assert result["status"] == "error"
        assert result["exit_code"] == EXIT_CONFIG_ERROR
