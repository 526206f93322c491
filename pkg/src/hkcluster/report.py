"""Structured text run reports.

A report is a sequence of named sections; a section is either key/value
lines or a whitespace-separated table with a header row. The format is
deterministic (insertion-ordered, no timestamps) so identical runs render
byte-identical documents, and it parses back losslessly for golden tests.

Real numbers are rendered with 12 significant digits; exact rationals as
"p/q" so no precision is lost.
"""

from __future__ import annotations

from fractions import Fraction

__all__ = ["Report", "fmt_real", "fmt_value", "parse_report"]


def fmt_real(x: float) -> str:
    return format(float(x), ".12g")


def fmt_value(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, Fraction):
        if x.denominator == 1:
            return str(x.numerator)
        return f"{x.numerator}/{x.denominator}"
    if isinstance(x, float):
        return fmt_real(x)
    return str(x)


class Report:
    def __init__(self, title: str):
        self.title = title
        self._parts: list[tuple[str, str, list]] = []

    def section(self, name: str, items: dict) -> None:
        self._parts.append(("kv", name, [(k, fmt_value(v)) for k, v in items.items()]))

    def table(self, name: str, header: list[str], rows: list[list]) -> None:
        rendered = [[fmt_value(c) for c in row] for row in rows]
        self._parts.append(("table", name, [header] + rendered))

    def render(self) -> str:
        lines = [f"= {self.title} ="]
        for kind, name, body in self._parts:
            lines.append("")
            if kind == "kv":
                lines.append(f"[{name}]")
                for key, value in body:
                    lines.append(f"{key}: {value}")
            else:
                lines.append(f"[table:{name}]")
                for row in body:
                    lines.append(" ".join(str(c) for c in row))
        return "\n".join(lines) + "\n"


def parse_report(text: str) -> dict:
    """Parse a rendered report back into {section: {key: value}} plus
    {table-section: [rows]} and the title under the empty key."""
    out: dict = {}
    current: str | None = None
    is_table = False
    for line in text.splitlines():
        if not line.strip():
            continue
        if line.startswith("= ") and line.endswith(" ="):
            out[""] = line[2:-2]
            continue
        if line.startswith("[") and line.endswith("]"):
            name = line[1:-1]
            is_table = name.startswith("table:")
            current = name.split(":", 1)[1] if is_table else name
            out[current] = [] if is_table else {}
            continue
        if current is None:
            raise ValueError(f"content outside any section: {line!r}")
        if is_table:
            out[current].append(line.split())
        else:
            key, _, value = line.partition(": ")
            out[current][key] = value
    return out
