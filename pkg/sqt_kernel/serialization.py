"""Text formats: ``S`` symbol lines and SQT1 matrix records.

An SQT1 record reads::

    SQT1 ALG
    alpha 1
    symbol 0.10000000000000001 0.10000000000000001
    correction 1 1 1
    0.10000000000000001
    1

with m rows of U and n rows of V following the ``correction m n k`` header.
Writers emit 17 significant digits; readers accept any decimal floats, blank
lines and ``#`` comments.
"""

from __future__ import annotations

from collections.abc import Iterator, Sequence

import numpy as np

from sqt_kernel.algebra import AlgebraElement
from sqt_kernel.models import ReprMode, SqtFormatError
from sqt_kernel.sqt import LowRankCorrection, SqtMatrix
from sqt_kernel.symbol import SymbolLike, SymmetricSymbol, as_symbol

RECORD_TAG = "SQT1"


def _fmt(values: Sequence[float] | np.ndarray) -> str:
    return " ".join(f"{float(x):.17g}" for x in values)


def _floats(tokens: Sequence[str], line: int) -> list[float]:
    try:
        return [float(t) for t in tokens]
    except ValueError as exc:
        raise SqtFormatError(f"expected decimal numbers, got {' '.join(tokens)!r}", line) from exc


def format_symbol(a: SymbolLike) -> str:
    """``S a_0 .. a_d``"""
    return f"S {_fmt(as_symbol(a).coeffs)}"


def parse_symbol(line: str) -> SymmetricSymbol:
    tokens = line.split()
    if len(tokens) < 2 or tokens[0] != "S":
        raise SqtFormatError(f"not a symbol line: {line.strip()!r}")
    return SymmetricSymbol(_floats(tokens[1:], 1))


def write_sqt(A: SqtMatrix) -> str:
    """Serialize one matrix as an SQT1 record"""
    k = A.correction
    m, n = k.support
    lines = [
        f"{RECORD_TAG} {A.mode.value}",
        f"alpha {A.alpha:.17g}",
        f"symbol {_fmt(A.symbol.coeffs)}",
        f"correction {m} {n} {k.rank}",
    ]
    if k.rank:
        lines.extend(_fmt(row) for row in k.u)
        lines.extend(_fmt(row) for row in k.v)
    return "\n".join(lines) + "\n"


def write_sqt_records(matrices: Sequence[SqtMatrix]) -> str:
    return "".join(write_sqt(A) for A in matrices)


def _content_lines(text: str) -> Iterator[tuple[int, list[str]]]:
    for number, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.split("#", 1)[0].strip()
        if stripped:
            yield number, stripped.split()


def _expect(lines: Iterator[tuple[int, list[str]]], keyword: str) -> tuple[int, list[str]]:
    try:
        number, tokens = next(lines)
    except StopIteration as exc:
        raise SqtFormatError(f"record ends before the {keyword!r} line") from exc
    if tokens[0] != keyword:
        raise SqtFormatError(f"expected {keyword!r}, got {tokens[0]!r}", number)
    return number, tokens[1:]


def _factor_rows(lines: Iterator[tuple[int, list[str]]], count: int, width: int) -> np.ndarray:
    out = np.zeros((count, width))
    for i in range(count):
        try:
            number, tokens = next(lines)
        except StopIteration as exc:
            raise SqtFormatError(f"record ends after {i} of {count} factor rows") from exc
        row = _floats(tokens, number)
        if len(row) != width:
            raise SqtFormatError(f"factor row has {len(row)} entries, expected {width}", number)
        out[i] = row
    return out


def _read_record(lines: Iterator[tuple[int, list[str]]], header: tuple[int, list[str]]) -> SqtMatrix:
    number, tokens = header
    if tokens[0] != RECORD_TAG or len(tokens) != 2:
        raise SqtFormatError(f"expected '{RECORD_TAG} ALG|TOE'", number)
    try:
        mode = ReprMode(tokens[1])
    except ValueError as exc:
        raise SqtFormatError(f"unknown mode {tokens[1]!r}", number) from exc

    number, rest = _expect(lines, "alpha")
    if len(rest) != 1:
        raise SqtFormatError("alpha takes exactly one value", number)
    alpha = _floats(rest, number)[0]

    number, rest = _expect(lines, "symbol")
    if not rest:
        raise SqtFormatError("symbol needs at least one coefficient", number)
    symbol = SymmetricSymbol(_floats(rest, number))

    number, rest = _expect(lines, "correction")
    try:
        m, n, k = (int(t) for t in rest)
    except ValueError as exc:
        raise SqtFormatError("correction header is 'correction <m> <n> <k>'", number) from exc
    if min(m, n, k) < 0:
        raise SqtFormatError("correction sizes must be non-negative", number)
    correction = LowRankCorrection.zero()
    if k:
        correction = LowRankCorrection(_factor_rows(lines, m, k), _factor_rows(lines, n, k))
    return SqtMatrix(mode, AlgebraElement(alpha, symbol), correction)


def read_sqt_records(text: str) -> list[SqtMatrix]:
    """Parse every SQT1 record in ``text``

    Raises:
        SqtFormatError: On any malformed record
    """
    lines = _content_lines(text)
    return [_read_record(lines, header) for header in lines]


def read_sqt(text: str) -> SqtMatrix:
    """Parse exactly one SQT1 record"""
    records = read_sqt_records(text)
    if len(records) != 1:
        raise SqtFormatError(f"expected one record, found {len(records)}")
    return records[0]
