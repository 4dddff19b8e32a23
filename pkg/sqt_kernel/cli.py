"""Command-line entry point: ``sqt qme``, ``sqt sqrt`` and ``sqt verify``.

Exit codes: 0 success, 1 a verification property failed, 2 no convergence,
3 ill-conditioned inversion, 4 bad input or configuration.
"""

from __future__ import annotations

import argparse
import csv
import io
import logging
import sys
from collections.abc import Sequence
from pathlib import Path
from typing import Literal, NoReturn

from pydantic import BaseModel, Field, ValidationError, field_validator

from sqt_kernel.constants import DEFAULT_QME_TOL, DEFAULT_SQRT_TOL
from sqt_kernel.models import DomainFault, IllConditioned, NoConvergence, ReprMode, SolveReport, SqtError
from sqt_kernel.serialization import read_sqt_records
from sqt_kernel.solvers import (
    QBD_SYMBOLS,
    QmeProblem,
    QmeVariant,
    SolverConfig,
    banded_sqrt_matrix,
    banded_sqrt_symbol,
    qbd_problem,
    qme_solve,
    qme_symbol_solve,
    sqrt_solve,
    sqrt_symbol_solve,
)
from sqt_kernel.sqt import SqtMatrix, sqt_convert
from sqt_kernel.verify import SUITES, run_suite

logger = logging.getLogger("sqt.cli")

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_NO_CONVERGENCE = 2
EXIT_ILL_CONDITIONED = 3
EXIT_BAD_INPUT = 4

QME_PRESET = "qme-paper"
SQRT_PRESET = "sqrt-paper"

COLUMNS: tuple[str, ...] = (
    "Run",
    "CPU",
    "Iterations",
    "Symbol size",
    "Correction size",
    "Correction rank",
    "Error",
)

# repr name -> (mode, default alpha); None selects the symbol-only path
REPRESENTATIONS: dict[str, tuple[ReprMode, float] | None] = {
    "p1": (ReprMode.ALGEBRA, 1.0),
    "p0": (ReprMode.ALGEBRA, 0.0),
    "qt": (ReprMode.TOEPLITZ, 0.0),
    "symbol": None,
}


class RunConfig(BaseModel):
    """Validated options of one CLI invocation"""

    command: Literal["qme", "sqrt", "verify"] = Field(description="Subcommand to run")
    representation: str = Field(default="p1", description="Representation: p1, p0, qt or symbol")
    variant: QmeVariant = Field(default=QmeVariant.NATURAL, description="QME fixed-point iteration")
    tol: float | None = Field(default=None, description="Stop threshold; solver default when unset")
    delta: float = Field(default=1e-1, description="Shift of the square-root test symbol")
    alpha: float | None = Field(default=None, description="Override of the algebra parameter")
    format: Literal["table", "csv"] = Field(default="table", description="Report format")
    output: Path | None = Field(default=None, description="Write the report here instead of stdout")
    input: Path | None = Field(default=None, description="SQT1 records replacing the preset data")
    seed: int = Field(default=0, description="Seed of the randomized verification matrices")
    suite: str = Field(default="all", description="Verification suite")
    max_iter: int | None = Field(default=None, description="Iteration cap")

    @field_validator("representation")
    @classmethod
    def validate_representation(cls, v: str) -> str:
        if v not in REPRESENTATIONS:
            raise ValueError(f"repr must be one of {', '.join(REPRESENTATIONS)}")
        return v

    @field_validator("tol")
    @classmethod
    def validate_tol(cls, v: float | None) -> float | None:
        if v is not None and not 0.0 < v < 1.0:
            raise ValueError("tol must lie in (0, 1)")
        return v

    @field_validator("delta")
    @classmethod
    def validate_delta(cls, v: float) -> float:
        if v <= 0.0:
            raise ValueError("delta must be positive")
        return v

    @field_validator("suite")
    @classmethod
    def validate_suite(cls, v: str) -> str:
        if v != "all" and v not in SUITES:
            raise ValueError(f"suite must be one of all, {', '.join(SUITES)}")
        return v

    @field_validator("max_iter")
    @classmethod
    def validate_max_iter(cls, v: int | None) -> int | None:
        if v is not None and v < 1:
            raise ValueError("max-iter must be positive")
        return v

    def target(self) -> tuple[ReprMode, float] | None:
        """Representation mode and α of the run, or None for the symbol path"""
        base = REPRESENTATIONS[self.representation]
        if base is None or base[0] is ReprMode.TOEPLITZ:
            return base
        return base[0], base[1] if self.alpha is None else self.alpha

    def solver_config(self) -> SolverConfig:
        return {"max_iter": self.max_iter} if self.max_iter is not None else {}


def report_row(label: str, report: SolveReport) -> dict[str, str]:
    return {
        "Run": label,
        "CPU": f"{report.elapsed:.3f}",
        "Iterations": str(report.iterations),
        "Symbol size": str(report.symbol_size),
        "Correction size": str(report.correction_size),
        "Correction rank": str(report.correction_rank),
        "Error": f"{report.residual:.2e}",
    }


def format_rows(rows: Sequence[dict[str, str]], fmt: str = "table") -> str:
    """Render report rows as an aligned table or as CSV with a header row"""
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=COLUMNS, lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
        return buf.getvalue()
    widths = {c: max([len(c), *(len(r[c]) for r in rows)]) for c in COLUMNS}
    header = "  ".join(c.rjust(widths[c]) for c in COLUMNS)
    lines = [header, "-" * len(header)]
    lines.extend("  ".join(r[c].rjust(widths[c]) for c in COLUMNS) for r in rows)
    return "\n".join(lines) + "\n"


def _emit(text: str, output: Path | None) -> None:
    if output is None:
        sys.stdout.write(text)
    else:
        output.write_text(text)


def _load_records(path: Path, expected: int) -> list[SqtMatrix]:
    try:
        text = path.read_text()
    except OSError as exc:
        raise SqtError(f"cannot read {path}: {exc}") from exc
    records = read_sqt_records(text)
    if len(records) != expected:
        raise SqtError(f"{path} holds {len(records)} records, expected {expected}")
    return records


def cmd_qme(cfg: RunConfig) -> int:
    """Solve the QME preset (or three SQT1 records A, B, C) and print its report row"""
    tol = DEFAULT_QME_TOL if cfg.tol is None else cfg.tol
    target = cfg.target()
    label = f"qme {cfg.variant.value} {cfg.representation}"
    if target is None:
        alpha = 1.0 if cfg.alpha is None else cfg.alpha
        if cfg.input is not None:
            symbols = [m.symbol for m in _load_records(cfg.input, 3)]
        else:
            symbols = [QBD_SYMBOLS[k] for k in ("a", "b", "c")]
        _, report = qme_symbol_solve(
            *symbols, variant=cfg.variant, tol=tol, alpha=alpha, config=cfg.solver_config()
        )
    else:
        mode, alpha = target
        if cfg.input is not None:
            mats = [sqt_convert(m, mode, alpha) for m in _load_records(cfg.input, 3)]
            problem = QmeProblem(*mats, variant=cfg.variant, tol=tol)
        else:
            problem = qbd_problem(mode, alpha, cfg.variant, tol)
        _, report = qme_solve(problem, cfg.solver_config())
    _emit(format_rows([report_row(label, report)], cfg.format), cfg.output)
    return EXIT_OK


def cmd_sqrt(cfg: RunConfig) -> int:
    """Square root of the shifted test matrix (or one SQT1 record) and its report row"""
    tol = DEFAULT_SQRT_TOL if cfg.tol is None else cfg.tol
    target = cfg.target()
    label = f"sqrt delta={cfg.delta:g} {cfg.representation}"
    if target is None:
        alpha = 1.0 if cfg.alpha is None else cfg.alpha
        if cfg.input is not None:
            symbol = _load_records(cfg.input, 1)[0].symbol
        else:
            symbol = banded_sqrt_symbol(cfg.delta)
        _, report = sqrt_symbol_solve(symbol, tol, alpha, cfg.solver_config())
    else:
        mode, alpha = target
        if cfg.input is not None:
            a = sqt_convert(_load_records(cfg.input, 1)[0], mode, alpha)
        else:
            a = banded_sqrt_matrix(cfg.delta, mode, alpha)
        _, report = sqrt_solve(a, tol, cfg.solver_config())
    _emit(format_rows([report_row(label, report)], cfg.format), cfg.output)
    return EXIT_OK


def cmd_verify(cfg: RunConfig) -> int:
    """Run a property suite; exit 1 when any property fails"""
    results = run_suite(cfg.suite, cfg.seed)
    lines = [
        f"{'PASS' if r.passed else 'FAIL'}  {r.suite:<8} {r.name:<40} "
        f"error {r.error:.2e}  tol {r.tolerance:.1e}"
        for r in results
    ]
    failed = sum(not r.passed for r in results)
    lines.append(f"{len(results) - failed}/{len(results)} properties passed")
    _emit("\n".join(lines) + "\n", cfg.output)
    return EXIT_VERIFY_FAILED if failed else EXIT_OK


_COMMANDS = {"qme": cmd_qme, "sqrt": cmd_sqrt, "verify": cmd_verify}


class UsageError(SqtError):
    """Command line that argparse rejects"""


class _Parser(argparse.ArgumentParser):
    """ArgumentParser whose usage errors raise instead of exiting with status 2"""

    def error(self, message: str) -> NoReturn:
        raise UsageError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="sqt", description="Structured quasi-Toeplitz matrix kernel")
    parser.add_argument(
        "--log-level",
        type=str.upper,
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        default="WARNING",
        help="logging level (default WARNING)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument(
            "--repr", dest="representation", default="p1", help="p1, p0, qt or symbol (default p1)"
        )
        p.add_argument("--tol", type=float, default=None, help="stop threshold")
        p.add_argument("--alpha", type=float, default=None, help="algebra parameter for p1/p0/symbol runs")
        p.add_argument("--input", type=Path, default=None, help="SQT1 file replacing the preset data")
        p.add_argument("--format", default="table", help="table or csv")
        p.add_argument("--output", type=Path, default=None, help="write the report to this file")
        p.add_argument("--max-iter", type=int, default=None, help="iteration cap")

    qme = sub.add_parser("qme", help="solve A X^2 + B X + C = X")
    qme.add_argument("--preset", choices=[QME_PRESET], default=QME_PRESET, help="built-in data set")
    qme.add_argument("--variant", default="natural", help="natural, traditional or ubased")
    common(qme)

    sqrt = sub.add_parser("sqrt", help="principal square root")
    sqrt.add_argument("--preset", choices=[SQRT_PRESET], default=SQRT_PRESET, help="built-in data set")
    sqrt.add_argument("--delta", type=float, default=1e-1, help="shift of the test symbol (default 0.1)")
    common(sqrt)

    verify = sub.add_parser("verify", help="run property suites")
    verify.add_argument("--suite", default="all", help=f"all, {', '.join(SUITES)}")
    verify.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    verify.add_argument("--output", type=Path, default=None, help="write the results to this file")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_BAD_INPUT
    logging.basicConfig(level=args.log_level, format="%(levelname)s %(name)s: %(message)s")
    options = {k: v for k, v in vars(args).items() if k not in ("log_level", "preset") and v is not None}
    try:
        cfg = RunConfig(**options)
    except ValidationError as exc:
        print(f"sqt: invalid options\n{exc}", file=sys.stderr)
        return EXIT_BAD_INPUT

    logger.debug("options: %s", cfg.model_dump(exclude_none=True))
    try:
        return _COMMANDS[cfg.command](cfg)
    except (NoConvergence, DomainFault) as exc:
        print(f"sqt: {exc}", file=sys.stderr)
        return EXIT_NO_CONVERGENCE
    except IllConditioned as exc:
        print(f"sqt: {exc} (cond {exc.cond:.3e})", file=sys.stderr)
        return EXIT_ILL_CONDITIONED
    except SqtError as exc:
        print(f"sqt: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
