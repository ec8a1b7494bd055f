"""Solving: the built-in exact solver and the external-solver bridge.

The built-in backend enumerates all commitment patterns (0/1 assignments of
the binary columns), prunes them with the purely-binary constraint rows
(initial-state fixing, minimal up/downtime), folds single-variable rows into
bounds and solves the remaining LP of each surviving pattern with the bundled
dense simplex.  It is meant as a desk-scale oracle, not a production MIP
solver.

The external backend writes the model to a standard-format file, runs a
solver subprocess via a command template with {model} and {solution}
placeholders, and verifies the returned solution before accepting it.
"""

from __future__ import annotations

import logging
import shlex
import subprocess
import tempfile
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import (
    ResidualCheckFailed,
    SolverLaunchFailed,
    SolverNonZeroExit,
    TooManyBinaries,
    UnparsableSolution,
)
from .model import MilpModel
from .simplex import solve_dense_lp
from .writers import write_mps

logger = logging.getLogger(__name__)

_SENSE_LE, _SENSE_EQ, _SENSE_GE = 0, 1, 2
_SENSE_CODE = {"<=": _SENSE_LE, "=": _SENSE_EQ, ">=": _SENSE_GE}


@dataclass
class SolverConfig:
    backend: str = "builtin-exact"       # "builtin-exact" | "external"
    command_template: str = ""           # e.g. "ucdispatch-mip {model} {solution}"
    binary_budget: int = 24
    tolerance: float = 1e-6


@dataclass
class Solution:
    values: dict[int, float]
    objective: float
    status: str                          # optimal | infeasible | unbounded | limit | error
    backend: str
    wall_time: float


@dataclass
class ResidualReport:
    """Constraint residuals and integrality of a candidate solution."""

    family_residuals: dict[str, float]
    max_residual: float
    integrality_gap: float
    bound_violation: float
    tolerance: float

    @property
    def passed(self) -> bool:
        worst = max(self.max_residual, self.integrality_gap, self.bound_violation)
        return worst <= self.tolerance


# ---------------------------------------------------------------------------
# exact enumeration backend


class _ExactEngine:
    """Shared machinery for solve_exact and enumerate_optimal_patterns."""

    def __init__(self, model: MilpModel, config: SolverConfig):
        self.model = model
        self.config = config
        bin_cols = model.binary_columns()
        if len(bin_cols) > config.binary_budget:
            raise TooManyBinaries(
                f"{len(bin_cols)} binary columns exceed the enumeration budget "
                f"of {config.binary_budget}")

        ncols = model.num_columns
        is_bin = np.zeros(ncols, dtype=bool)
        is_bin[bin_cols] = True
        self.bin_cols = bin_cols
        self.cont_cols = [c for c in range(ncols) if not is_bin[c]]
        bpos = {c: i for i, c in enumerate(bin_cols)}
        cpos = {c: i for i, c in enumerate(self.cont_cols)}
        nb, nc = len(bin_cols), len(self.cont_cols)
        self.nb, self.nc = nb, nc

        pure_w, pure_sense, pure_rhs = [], [], []
        s_bin, s_rhs, s_var, s_inv, s_sense = [], [], [], [], []
        m_bin, m_cont, m_sense, m_rhs = [], [], [], []
        for con in model.constraints:
            brow = np.zeros(nb)
            cont_part = []
            for col, coef in con.coefficients.items():
                if is_bin[col]:
                    brow[bpos[col]] = coef
                else:
                    cont_part.append((cpos[col], coef))
            if not cont_part:
                pure_w.append(brow)
                pure_sense.append(_SENSE_CODE[con.sense])
                pure_rhs.append(con.rhs)
            elif len(cont_part) == 1:
                # a single continuous variable: becomes a bound per pattern
                var, coef = cont_part[0]
                sense = _SENSE_CODE[con.sense]
                if coef < 0.0 and sense != _SENSE_EQ:
                    sense = _SENSE_GE if sense == _SENSE_LE else _SENSE_LE
                s_bin.append(brow)
                s_rhs.append(con.rhs)
                s_var.append(var)
                s_inv.append(1.0 / coef)
                s_sense.append(sense)
            else:
                crow = np.zeros(nc)
                for var, coef in cont_part:
                    crow[var] = coef
                m_bin.append(brow)
                m_cont.append(crow)
                m_sense.append(con.sense)
                m_rhs.append(con.rhs)

        self.pure_w = np.array(pure_w) if pure_w else np.zeros((0, nb))
        self.pure_sense = np.array(pure_sense, dtype=np.int8)
        self.pure_rhs = np.array(pure_rhs)
        self.s_bin = np.array(s_bin) if s_bin else np.zeros((0, nb))
        self.s_rhs = np.array(s_rhs)
        self.s_var = np.array(s_var, dtype=np.int64)
        self.s_inv = np.array(s_inv)
        s_sense = np.array(s_sense, dtype=np.int8)
        self.s_is_ub = (s_sense == _SENSE_LE) | (s_sense == _SENSE_EQ)
        self.s_is_lb = (s_sense == _SENSE_GE) | (s_sense == _SENSE_EQ)

        self.m_bin = np.array(m_bin) if m_bin else np.zeros((0, nb))
        self.m_cont = np.array(m_cont) if m_cont else np.zeros((0, nc))
        self.m_rhs = np.array(m_rhs)

        # variables with a structurally finite upper bound get an explicit row
        self.fin_vars = np.unique(self.s_var[self.s_is_ub]) if len(s_var) else \
            np.array([], dtype=np.int64)
        n_fin = len(self.fin_vars)
        eye_rows = np.zeros((n_fin, nc))
        eye_rows[np.arange(n_fin), self.fin_vars] = 1.0
        self.lp_matrix = np.vstack([self.m_cont, eye_rows]) if nc else \
            np.zeros((len(m_rhs) + n_fin, 0))
        self.lp_senses = list(m_sense) + ["<="] * n_fin

        self.c_cont = np.zeros(nc)
        self.c_bin = np.zeros(nb)
        for col, coef in model.objective.items():
            if is_bin[col]:
                self.c_bin[bpos[col]] = coef
            else:
                self.c_cont[cpos[col]] = coef

        # bits fixed by singleton pure equality rows (initial on/off states)
        self.fixed = np.full(nb, -1, dtype=np.int8)
        self.contradictory = False
        for w, sense, rhs in zip(self.pure_w, pure_sense, pure_rhs):
            nz = np.flatnonzero(w)
            if sense == _SENSE_EQ and len(nz) == 1:
                value = rhs / w[nz[0]]
                bit = int(round(value))
                if abs(value - bit) > 1e-6 or bit not in (0, 1):
                    self.contradictory = True
                elif self.fixed[nz[0]] >= 0 and self.fixed[nz[0]] != bit:
                    self.contradictory = True
                else:
                    self.fixed[nz[0]] = bit

    def patterns(self):
        """Feasible-by-binary-rows patterns, in lexicographic order."""
        if self.contradictory:
            return
        free = np.flatnonzero(self.fixed < 0)
        template = np.where(self.fixed < 0, 0, self.fixed).astype(np.int8)
        n_free = len(free)
        shifts = np.arange(n_free - 1, -1, -1, dtype=np.int64)
        chunk = 1 << 14
        for start in range(0, 1 << n_free, chunk):
            stop = min(start + chunk, 1 << n_free)
            codes = np.arange(start, stop, dtype=np.int64)
            block = np.repeat(template[None, :], len(codes), axis=0)
            if n_free:
                block[:, free] = ((codes[:, None] >> shifts[None, :]) & 1).astype(np.int8)
            if len(self.pure_w):
                lhs = block @ self.pure_w.T
                ok = np.ones(len(codes), dtype=bool)
                le = self.pure_sense == _SENSE_LE
                ge = self.pure_sense == _SENSE_GE
                eq = self.pure_sense == _SENSE_EQ
                if le.any():
                    ok &= (lhs[:, le] <= self.pure_rhs[le] + 1e-9).all(axis=1)
                if ge.any():
                    ok &= (lhs[:, ge] >= self.pure_rhs[ge] - 1e-9).all(axis=1)
                if eq.any():
                    ok &= (np.abs(lhs[:, eq] - self.pure_rhs[eq]) <= 1e-9).all(axis=1)
                block = block[ok]
            yield from block

    def solve_pattern(self, pattern):
        """LP of one commitment pattern; returns (status, objective, values)."""
        nc = self.nc
        lower = np.zeros(nc)
        upper = np.full(nc, np.inf)
        if len(self.s_var):
            vals = (self.s_rhs - self.s_bin @ pattern) * self.s_inv
            np.minimum.at(upper, self.s_var[self.s_is_ub], vals[self.s_is_ub])
            np.maximum.at(lower, self.s_var[self.s_is_lb], vals[self.s_is_lb])
        if np.any(lower > upper + 1e-9):
            return "infeasible", np.inf, None

        b = np.concatenate([
            self.m_rhs - self.m_bin @ pattern - self.m_cont @ lower,
            upper[self.fin_vars] - lower[self.fin_vars],
        ])
        result = solve_dense_lp(self.c_cont, self.lp_matrix, self.lp_senses, b)
        if result.status != "optimal":
            return result.status, np.inf, None
        x = result.x + lower
        objective = float(self.c_cont @ x + self.c_bin @ pattern)
        return "optimal", objective, x

    def values_for(self, pattern, x) -> dict[int, float]:
        values = {col: float(bit) for col, bit in zip(self.bin_cols, pattern)}
        values.update({col: float(v) for col, v in zip(self.cont_cols, x)})
        return values


def solve_exact(model: MilpModel, config: SolverConfig | None = None) -> Solution:
    """Enumerate commitment patterns and solve each LP with the bundled simplex.

    Ties between patterns keep the lexicographically smallest bit pattern.
    Raises :class:`TooManyBinaries` when the model exceeds the enumeration
    budget and :class:`NumericalFailure` if the simplex cycling guard trips.
    """
    config = config or SolverConfig()
    started = time.perf_counter()
    engine = _ExactEngine(model, config)

    best_obj = np.inf
    best = None
    unbounded = False
    for pattern in engine.patterns():
        status, objective, x = engine.solve_pattern(pattern)
        if status == "unbounded":
            unbounded = True
            break
        if status == "optimal" and objective < best_obj:
            best_obj = objective
            best = (pattern.copy(), x)

    elapsed = time.perf_counter() - started
    if unbounded:
        return Solution({}, -np.inf, "unbounded", "builtin-exact", elapsed)
    if best is None:
        return Solution({}, np.inf, "infeasible", "builtin-exact", elapsed)
    pattern, x = best
    return Solution(engine.values_for(pattern, x), best_obj, "optimal",
                    "builtin-exact", elapsed)


def enumerate_optimal_patterns(model: MilpModel, config: SolverConfig | None = None,
                               rel_tol: float = 1e-9) -> list[tuple[int, ...]]:
    """All commitment patterns whose optimum lies within rel_tol of the best."""
    config = config or SolverConfig()
    engine = _ExactEngine(model, config)
    scored = []
    for pattern in engine.patterns():
        status, objective, _ = engine.solve_pattern(pattern)
        if status == "optimal":
            scored.append((tuple(int(b) for b in pattern), objective))
    if not scored:
        return []
    best = min(objective for _, objective in scored)
    cut = best + rel_tol * (1.0 + abs(best))
    return [pattern for pattern, objective in scored if objective <= cut]


def solve_lp_relaxation(model: MilpModel, tol: float = 1e-9) -> Solution:
    """Solve the LP relaxation (binaries relaxed to [0, 1])."""
    started = time.perf_counter()
    n = model.num_columns
    c = np.zeros(n)
    for col, coef in model.objective.items():
        c[col] = coef
    bin_cols = model.binary_columns()
    rows = len(model.constraints) + len(bin_cols)
    A = np.zeros((rows, n))
    senses, b = [], np.zeros(rows)
    for i, con in enumerate(model.constraints):
        for col, coef in con.coefficients.items():
            A[i, col] = coef
        senses.append(con.sense)
        b[i] = con.rhs
    for offset, col in enumerate(bin_cols):
        A[len(model.constraints) + offset, col] = 1.0
        senses.append("<=")
        b[len(model.constraints) + offset] = 1.0
    result = solve_dense_lp(c, A, senses, b, tol=tol)
    elapsed = time.perf_counter() - started
    if result.status != "optimal":
        return Solution({}, np.inf, result.status, "lp-relaxation", elapsed)
    values = {col: float(result.x[col]) for col in range(n)}
    return Solution(values, result.objective, "optimal", "lp-relaxation", elapsed)


# ---------------------------------------------------------------------------
# solution checking and parsing


def check_solution(model: MilpModel, values, tolerance: float = 1e-6) -> ResidualReport:
    """Exact residuals of a candidate solution, grouped by constraint family."""
    x = np.zeros(model.num_columns)
    if isinstance(values, dict):
        for col, val in values.items():
            x[col] = val
    else:
        x[: len(values)] = values

    family_residuals: dict[str, float] = {}
    max_residual = 0.0
    for con in model.constraints:
        lhs = sum(coef * x[col] for col, coef in con.coefficients.items())
        if con.sense == "<=":
            residual = max(0.0, lhs - con.rhs)
        elif con.sense == ">=":
            residual = max(0.0, con.rhs - lhs)
        else:
            residual = abs(lhs - con.rhs)
        family = con.family
        if residual > family_residuals.get(family, 0.0):
            family_residuals[family] = residual
        max_residual = max(max_residual, residual)

    integrality = 0.0
    bound_violation = float(np.max(-x, initial=0.0))
    for col in model.binary_columns():
        integrality = max(integrality, min(abs(x[col]), abs(x[col] - 1.0)))
        bound_violation = max(bound_violation, x[col] - 1.0)
    return ResidualReport(family_residuals, max_residual, integrality,
                          max(0.0, bound_violation), tolerance)


def parse_solution_file(text: str, model: MilpModel) -> dict[int, float]:
    """Interpret a solver's solution file as a column -> value map.

    Accepts one entry per line in three shapes: "name value", "name=value",
    and indexed rows "<row#> name value [extra]".  Header/status lines are
    skipped with a warning; unknown variable names are ignored with a
    warning; model columns absent from the file default to 0 (one warning
    each).  Raises :class:`UnparsableSolution` when a line mentions a known
    column but its value cannot be read.
    """
    known = {v.name: v.column_index for v in model.variables}
    parsed: dict[int, float] = {}

    def read_value(name: str, raw: str, line: str):
        try:
            value = float(raw)
        except ValueError:
            raise UnparsableSolution(
                f"cannot parse value {raw!r} for column {name!r} in line {line!r}"
            ) from None
        parsed[known[name]] = value

    for raw_line in text.splitlines():
        line = raw_line.strip()
        if not line or line[0] in "#*\\" or line.startswith("//") or line.startswith("="):
            continue
        if "=" in line:
            name, _, raw = line.partition("=")
            name, raw = name.strip(), raw.strip()
            if name in known:
                read_value(name, raw, line)
            else:
                logger.warning("solution file: ignoring unknown entry %r", line)
            continue
        tokens = line.split()
        if len(tokens) == 2 and tokens[0] in known:
            read_value(tokens[0], tokens[1], line)
        elif len(tokens) in (3, 4) and tokens[1] in known and _is_int(tokens[0]):
            read_value(tokens[1], tokens[2], line)
        elif tokens[0] in known:
            raise UnparsableSolution(f"malformed entry for column {tokens[0]!r}: {line!r}")
        else:
            logger.warning("solution file: skipping unrecognized line %r", line)

    values = {}
    for var in model.variables:
        if var.column_index in parsed:
            values[var.column_index] = parsed[var.column_index]
        else:
            logger.warning("solution file: column %s missing, defaulting to 0",
                           var.name)
            values[var.column_index] = 0.0
    return values


def _is_int(token: str) -> bool:
    try:
        int(token)
    except ValueError:
        return False
    return True


# ---------------------------------------------------------------------------
# external solver bridge


def solve_external(model: MilpModel, config: SolverConfig) -> Solution:
    """Run an external MILP solver subprocess on the MPS emission.

    The command template must contain {model} and {solution} placeholders.
    The returned values are verified with :func:`check_solution` before the
    solution is accepted.
    """
    if not config.command_template:
        raise SolverLaunchFailed("no solver command template configured")

    started = time.perf_counter()
    with tempfile.TemporaryDirectory(prefix="ucdispatch-") as tmp:
        model_path = Path(tmp) / "model.mps"
        solution_path = Path(tmp) / "model.sol"
        model_path.write_text(write_mps(model), encoding="utf-8")

        command = [
            part.replace("{model}", str(model_path))
                .replace("{solution}", str(solution_path))
            for part in shlex.split(config.command_template)
        ]
        try:
            proc = subprocess.run(command, capture_output=True, text=True)
        except OSError as exc:
            raise SolverLaunchFailed(f"cannot launch {command[0]!r}: {exc}") from exc
        if proc.returncode != 0:
            raise SolverNonZeroExit(
                f"solver exited with {proc.returncode}: "
                f"{(proc.stderr or proc.stdout).strip()[:500]}")
        try:
            text = solution_path.read_text(encoding="utf-8")
        except OSError as exc:
            raise UnparsableSolution(f"solver wrote no solution file: {exc}") from exc

        values = parse_solution_file(text, model)
        report = check_solution(model, values, config.tolerance)
        if not report.passed:
            raise ResidualCheckFailed(
                f"solution violates the model: max residual {report.max_residual:g}, "
                f"integrality gap {report.integrality_gap:g}")
        objective = model.objective_value(values)
        elapsed = time.perf_counter() - started
        return Solution(values, objective, "optimal", "external", elapsed)


def solve(model: MilpModel, config: SolverConfig | None = None) -> Solution:
    """Dispatch to the configured backend."""
    config = config or SolverConfig()
    if config.backend == "external":
        return solve_external(model, config)
    return solve_exact(model, config)
