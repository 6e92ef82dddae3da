"""Text and notebook (HTML) formatting shared by the report records."""
from html import escape
from typing import Collection, Iterable, Sequence

_CELL = "padding:3px 8px"
_NUMERIC = "text-align:right; font-family:ui-monospace, monospace"


def summarize(items: Iterable[str], *, limit: int = 4) -> str:
    """Comma-join the first ``limit`` items and count the rest."""
    items = list(items)
    shown = ", ".join(items[:limit])
    hidden = len(items) - limit
    return f"{shown} (+{hidden} more)" if hidden > 0 else shown


def fmt_float(x: float, digits: int = 6) -> str:
    return f"{x:.{digits}g}"


def fmt_complex(z: complex | None, digits: int = 6) -> str:
    if z is None:
        return "—"
    sign = "-" if z.imag < 0 else "+"
    return f"{z.real:.{digits}g}{sign}{abs(z.imag):.{digits}g}i"


def html_table(headers: Sequence[str], rows: Sequence[Sequence[str]], *, numeric: Collection[int] = ()) -> str:
    """
    Render rows as a table. Headers are escaped; cells are inserted as given so
    callers can pass markup. Columns listed in ``numeric`` are right-aligned.
    """

    def style(i: int) -> str:
        return f"{_CELL}; {_NUMERIC}" if i in numeric else _CELL

    head = "".join(
        f"<th style='{style(i)}; border-bottom:1px solid #ccc'>{escape(h)}</th>" for i, h in enumerate(headers)
    )
    body = "".join(
        "<tr>" + "".join(f"<td style='{style(i)}'>{cell}</td>" for i, cell in enumerate(row)) + "</tr>"
        for row in rows
    )
    return f"<table style='border-collapse:collapse'><thead><tr>{head}</tr></thead><tbody>{body}</tbody></table>"


def html_card(title: str, rows: Iterable[tuple[str, str]], *, status: bool | None = None) -> str:
    """
    A titled two-column card of label/value pairs. ``status`` adds a pass/FAIL
    badge next to the title.
    """
    badge = ""
    if status is not None:
        colour = "#1a7f37" if status else "#cf222e"
        badge = f" <span style='color:{colour}'>{'pass' if status else 'FAIL'}</span>"
    body = "".join(
        f"<tr><th style='{_CELL}; text-align:left; color:#555'>{escape(k)}</th>"
        f"<td style='{_CELL}; {_NUMERIC}'>{escape(v)}</td></tr>"
        for k, v in rows
    )
    return (
        f"<div style='font-family:system-ui, sans-serif; max-width:560px'>"
        f"<b>{escape(title)}</b>{badge}<table style='border-collapse:collapse; margin-top:6px'>{body}</table></div>"
    )
