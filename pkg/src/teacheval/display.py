"""Shared text-report helpers: fixed-precision formatting and column alignment."""

from __future__ import annotations

from decimal import ROUND_DOWN, ROUND_HALF_UP, Decimal, localcontext
from fractions import Fraction


def _fixed(value: float | Fraction | int, places: int, rounding: str) -> str:
    quantum = Decimal(1).scaleb(-places)
    with localcontext() as ctx:
        ctx.prec = 50
        if isinstance(value, Fraction):
            dec = Decimal(value.numerator) / Decimal(value.denominator)
        else:
            dec = Decimal(repr(float(value)))
        return str(dec.quantize(quantum, rounding=rounding))


def round_half_up(value: float | Fraction | int, places: int) -> str:
    """Format at fixed precision with half-up ties.

    Fractions are rounded exactly; floats via their shortest repr, which
    is faithful at the 2-4 decimal places used in reports.
    """
    return _fixed(value, places, ROUND_HALF_UP)


def round_truncated(value: float | Fraction | int, places: int) -> str:
    """Format at fixed precision, truncating toward zero (no rounding up)."""
    return _fixed(value, places, ROUND_DOWN)


def render_table(headers: list[str], rows: list[list[str]], right_align: set[int] = frozenset()) -> str:
    """Aligned plain-text table. Columns in ``right_align`` are right-justified."""
    widths = [len(h) for h in headers]
    for row in rows:
        for i, cell in enumerate(row):
            widths[i] = max(widths[i], len(cell))

    def fmt(cells: list[str]) -> str:
        parts = []
        for i, cell in enumerate(cells):
            if i in right_align:
                parts.append(cell.rjust(widths[i]))
            else:
                parts.append(cell.ljust(widths[i]))
        return "  ".join(parts).rstrip()

    lines = [fmt(headers)]
    lines.extend(fmt(row) for row in rows)
    return "\n".join(lines)
