from unittest.mock import patch

from main import main


def test_main_forwards_arguments():
    """
    Tests that the script entry point hands its arguments to the command line.
    """
    with patch('main.cli_main', return_value=0) as mock_cli:
        assert main(["--fan", "p2", "--beta", "1"]) == 0
    mock_cli.assert_called_once_with(["--fan", "p2", "--beta", "1"])


def test_main_runs(tmp_path, monkeypatch):
    """
    Tests a real run through the script entry point.
    """
    monkeypatch.delenv("MODCOMP_THREADS", raising=False)
    out = tmp_path / "lines.json"
    code = main(["--fan", "p2", "--beta", "1", "--no-table", "--json", str(out), "--config", str(tmp_path / "absent.json")])
    assert code == 0
    assert out.exists()
