"""Tests for the ``sqt`` command line"""

import csv
from collections.abc import Callable
from pathlib import Path

import pytest

from sqt_kernel.cli import (
    COLUMNS,
    EXIT_BAD_INPUT,
    EXIT_ILL_CONDITIONED,
    EXIT_NO_CONVERGENCE,
    EXIT_OK,
    RunConfig,
    format_rows,
    main,
)
from sqt_kernel.models import ReprMode


@pytest.fixture
def scalar_input(tmp_path: Path, qme_records: Callable[[float, float, float], str]) -> Path:
    path = tmp_path / "scalar.sqt"
    path.write_text(qme_records(0.2, 0.3, 0.2))
    return path


class TestRunConfig:
    """Test option validation"""

    def test_defaults(self):
        cfg = RunConfig(command="qme")
        assert cfg.target() == (ReprMode.ALGEBRA, 1.0)
        assert cfg.solver_config() == {}

    def test_alpha_override(self):
        assert RunConfig(command="qme", representation="p0", alpha=0.5).target() == (ReprMode.ALGEBRA, 0.5)
        assert RunConfig(command="qme", representation="qt", alpha=0.5).target() == (ReprMode.TOEPLITZ, 0.0)
        assert RunConfig(command="qme", representation="symbol").target() is None

    def test_max_iter(self):
        assert RunConfig(command="sqrt", max_iter=5).solver_config() == {"max_iter": 5}


class TestFormatRows:
    """Test report rendering"""

    ROW = {c: "1" for c in COLUMNS}

    def test_csv_header(self):
        text = format_rows([self.ROW], "csv")
        assert text.splitlines()[0] == ",".join(COLUMNS)
        assert len(text.splitlines()) == 2

    def test_table_alignment(self):
        lines = format_rows([self.ROW, self.ROW]).splitlines()
        assert len(lines) == 4
        assert set(lines[1]) == {"-"}
        assert len(lines[2]) == len(lines[0])


class TestMain:
    """Test exit codes and output of the subcommands"""

    def test_verify(self, capsys: pytest.CaptureFixture[str]):
        assert main(["verify", "--suite", "finite"]) == EXIT_OK
        out = capsys.readouterr().out
        assert "PASS" in out
        assert "4/4 properties passed" in out

    @pytest.mark.parametrize(
        "argv",
        [
            ["qme", "--repr", "p2"],
            ["qme", "--tol", "2"],
            ["qme", "--variant", "cyclic"],
            ["qme", "--format", "xml"],
            ["qme", "--max-iter", "0"],
            ["sqrt", "--delta", "-1"],
            ["verify", "--suite", "nope"],
        ],
    )
    def test_invalid_options(self, argv: list[str], capsys: pytest.CaptureFixture[str]):
        assert main(argv) == EXIT_BAD_INPUT
        assert "invalid options" in capsys.readouterr().err

    def test_qme_from_records_to_csv(self, scalar_input: Path, tmp_path: Path):
        out = tmp_path / "report.csv"
        argv = ["qme", "--input", str(scalar_input), "--format", "csv", "--output", str(out)]
        assert main(argv) == EXIT_OK
        with out.open(newline="") as f:
            rows = list(csv.DictReader(f))
        assert len(rows) == 1
        assert rows[0]["Run"] == "qme natural p1"
        assert int(rows[0]["Iterations"]) > 1
        assert float(rows[0]["Error"]) < 1e-12
        assert rows[0]["Correction size"] == "0"

    @pytest.mark.parametrize("representation", ["p1", "p0", "qt", "symbol"])
    def test_qme_every_representation(
        self, scalar_input: Path, representation: str, capsys: pytest.CaptureFixture[str]
    ):
        argv = ["qme", "--input", str(scalar_input), "--repr", representation, "--variant", "ubased"]
        assert main(argv) == EXIT_OK
        assert f"qme ubased {representation}" in capsys.readouterr().out

    def test_iteration_cap(self, scalar_input: Path):
        assert main(["qme", "--input", str(scalar_input), "--max-iter", "3"]) == EXIT_NO_CONVERGENCE

    def test_singular_resolvent(
        self,
        tmp_path: Path,
        qme_records: Callable[[float, float, float], str],
        capsys: pytest.CaptureFixture[str],
    ):
        path = tmp_path / "singular.sqt"
        path.write_text(qme_records(0.0, 1.0, 0.0))
        assert main(["qme", "--input", str(path), "--variant", "traditional"]) == EXIT_ILL_CONDITIONED
        assert "cond" in capsys.readouterr().err

    def test_missing_input(self, tmp_path: Path):
        assert main(["qme", "--input", str(tmp_path / "absent.sqt")]) == EXIT_BAD_INPUT

    def test_wrong_record_count(self, tmp_path: Path, capsys: pytest.CaptureFixture[str]):
        path = tmp_path / "one.sqt"
        path.write_text("SQT1 ALG\nalpha 1\nsymbol 0.5\ncorrection 0 0 0\n")
        assert main(["qme", "--input", str(path)]) == EXIT_BAD_INPUT
        assert "expected 3" in capsys.readouterr().err

    def test_malformed_input(self, tmp_path: Path):
        path = tmp_path / "bad.sqt"
        path.write_text("SQT1 ALG\nalpha x\n")
        assert main(["sqrt", "--input", str(path)]) == EXIT_BAD_INPUT

    def test_sqrt_symbol_preset(self, capsys: pytest.CaptureFixture[str]):
        assert main(["--log-level", "debug", "sqrt", "--repr", "symbol"]) == EXIT_OK
        assert "sqrt delta=0.1 symbol" in capsys.readouterr().out

    def test_sqrt_from_record(self, tmp_path: Path, capsys: pytest.CaptureFixture[str]):
        path = tmp_path / "four.sqt"
        path.write_text("SQT1 TOE\nalpha 0\nsymbol 4\ncorrection 0 0 0\n")
        assert main(["sqrt", "--input", str(path), "--repr", "qt", "--format", "csv"]) == EXIT_OK
        rows = list(csv.DictReader(capsys.readouterr().out.splitlines()))
        assert rows[0]["Symbol size"] == "1"

    @pytest.mark.parametrize(
        "argv",
        [
            ["qme", "--preset", "qme-paper", "--repr", "symbol", "--variant", "ubased"],
            ["sqrt", "--preset", "sqrt-paper", "--repr", "symbol", "--delta", "1"],
        ],
    )
    def test_named_presets(self, argv: list[str], capsys: pytest.CaptureFixture[str]):
        assert main(argv) == EXIT_OK
        assert "symbol" in capsys.readouterr().out

    @pytest.mark.parametrize(
        "argv",
        [
            ["qme", "--preset", "qbd"],
            ["sqrt", "--preset", "qme-paper"],
            ["qme", "--unknown"],
            ["solve"],
            [],
            ["sqrt", "--delta", "small"],
        ],
    )
    def test_usage_errors_exit_with_bad_input(self, argv: list[str], capsys: pytest.CaptureFixture[str]):
        assert main(argv) == EXIT_BAD_INPUT
        assert "sqt" in capsys.readouterr().err

    def test_help_still_exits_cleanly(self):
        with pytest.raises(SystemExit) as excinfo:
            main(["--help"])
        assert excinfo.value.code == 0

    def test_symbol_sqrt_honours_tol(self, capsys: pytest.CaptureFixture[str]):
        assert main(["sqrt", "--repr", "symbol", "--tol", "1e-4", "--format", "csv"]) == EXIT_OK
        loose = int(next(csv.DictReader(capsys.readouterr().out.splitlines()))["Symbol size"])
        assert main(["sqrt", "--repr", "symbol", "--format", "csv"]) == EXIT_OK
        tight = int(next(csv.DictReader(capsys.readouterr().out.splitlines()))["Symbol size"])
        assert loose < tight
