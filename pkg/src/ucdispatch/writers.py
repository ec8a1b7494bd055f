"""Deterministic MPS and LP text emission.

Both writers produce byte-identical output for the same model: columns and
rows appear in model order, numbers are printed with 17 significant digits
(round-trip safe for doubles) and lines end with LF.
"""

from __future__ import annotations

import re

from .model import MilpModel

_MPS_SENSE = {"<=": "L", "=": "E", ">=": "G"}
_NAME_SANITIZE = re.compile(r"[^A-Za-z0-9_]+")


def _num(value: float) -> str:
    if value == 0.0:
        value = 0.0  # never print -0
    return f"{value:.17g}"


def _row_name(name: str) -> str:
    return _NAME_SANITIZE.sub("_", name).strip("_")


def write_mps(model: MilpModel, name: str = "ucdispatch") -> str:
    """Free-format MPS with INTORG/INTEND markers around binary columns."""
    lines = [f"NAME {name}", "ROWS", " N  OBJ"]
    row_names = []
    for con in model.constraints:
        row = _row_name(con.name)
        row_names.append(row)
        lines.append(f" {_MPS_SENSE[con.sense]}  {row}")

    entries: dict[int, list[tuple[str, float]]] = {
        v.column_index: [] for v in model.variables}
    for row, con in zip(row_names, model.constraints):
        for col, coef in sorted(con.coefficients.items()):
            entries[col].append((row, coef))

    lines.append("COLUMNS")
    in_integer_block = False
    marker = 0
    for var in model.variables:
        if var.is_binary != in_integer_block:
            marker += 1
            kind = "'INTORG'" if var.is_binary else "'INTEND'"
            lines.append(f"    MARKER{marker}  'MARKER'  {kind}")
            in_integer_block = var.is_binary
        col = var.column_index
        written = False
        if col in model.objective:
            lines.append(f"    {var.name}  OBJ  {_num(model.objective[col])}")
            written = True
        for row, coef in entries[col]:
            lines.append(f"    {var.name}  {row}  {_num(coef)}")
            written = True
        if not written:
            # declare otherwise-unreferenced columns
            lines.append(f"    {var.name}  OBJ  0")
    if in_integer_block:
        marker += 1
        lines.append(f"    MARKER{marker}  'MARKER'  'INTEND'")

    lines.append("RHS")
    for row, con in zip(row_names, model.constraints):
        if con.rhs != 0.0:
            lines.append(f"    RHS  {row}  {_num(con.rhs)}")

    lines.append("BOUNDS")
    for var in model.variables:
        if var.is_binary:
            lines.append(f" BV BND  {var.name}")

    lines.append("ENDATA")
    return "\n".join(lines) + "\n"


def _lp_terms(pairs, names) -> list[str]:
    parts = []
    for col, coef in pairs:
        if not parts:
            prefix = "- " if coef < 0 else ""
        else:
            prefix = "- " if coef < 0 else "+ "
        parts.append(f"{prefix}{_num(abs(coef))} {names[col]}")
    return parts


def _wrap(label: str, parts: list[str], width: int = 78) -> list[str]:
    lines = [label]
    for part in parts:
        if len(lines[-1]) + 1 + len(part) > width and lines[-1] != label:
            lines.append("   " + part)
        else:
            lines[-1] += " " + part
    return lines


def write_lp(model: MilpModel) -> str:
    """CPLEX-LP dialect, semantically identical to the MPS emission."""
    names = model.column_names()
    lines = ["Minimize"]
    objective = sorted(model.objective.items())
    if objective:
        lines.extend(_wrap(" obj:", _lp_terms(objective, names)))
    else:
        lines.append(" obj: 0")

    lines.append("Subject To")
    for con in model.constraints:
        terms = _lp_terms(sorted(con.coefficients.items()), names)
        terms += [con.sense, _num(con.rhs)]
        lines.extend(_wrap(f" {_row_name(con.name)}:", terms))

    binaries = [v for v in model.variables if v.is_binary]
    if binaries:
        lines.append("Bounds")
        for var in binaries:
            lines.append(f" 0 <= {var.name} <= 1")
        lines.append("Binaries")
        lines.extend(_wrap("", [v.name for v in binaries]))
    lines.append("End")
    return "\n".join(lines) + "\n"
