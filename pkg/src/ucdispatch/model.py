"""Translate an instance plus thinned startup curves into a MILP.

Variables
    v       on/off state (binary)
    p       production [MW]
    p_max   maximal possible production [MW] (spinning-reserve measure)
    s, c    storage fill [MWh] and consumption [MW], storage units only
    cp      production cost per period
    cu, cd  startup / shutdown cost per period
    p_under, p_over, r_under   demand and reserve slacks per period

Constraint families (names used in constraint tags and stats):
    initial-on, initial-off     fixed states during the initial up/downtime
    min-up, min-down            minimal up- and downtime
    bounds                      P_min*v <= p <= p_max <= P_max*v (three rows)
    ramp-up, ramp-down          inter-period ramping with relaxation tightening
    shutdown-limit              production cap when a shutdown is imminent
    storage-cap, consumption-cap, storage-balance,
    storage-initial, storage-final
    demand, reserve             softened system balance with slack variables
    prod-cost                   cost-defining equalities
    shutdown-cost, startup-cost epigraph rows for cd and cu
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import ValidationFailed
from .instance import Instance, validate
from .thinning import ThinnedCurve, thin_all

KIND_ORDER = ("v", "p", "p_max", "s", "c", "cp", "cu", "cd",
              "p_under", "p_over", "r_under")

#: short column-name tokens, e.g. v_3_17 or pu_5
KIND_TOKEN = {
    "v": "v", "p": "p", "p_max": "pm", "s": "s", "c": "c",
    "cp": "cp", "cu": "cu", "cd": "cd",
    "p_under": "pu", "p_over": "po", "r_under": "ru",
}

PERIOD_KINDS = ("p_under", "p_over", "r_under")

CONSTRAINT_FAMILIES = (
    "initial-on", "initial-off", "min-up", "min-down", "bounds",
    "ramp-up", "ramp-down", "shutdown-limit",
    "storage-cap", "consumption-cap", "storage-balance",
    "storage-initial", "storage-final",
    "demand", "reserve", "prod-cost", "shutdown-cost", "startup-cost",
)


@dataclass(frozen=True)
class VarRef:
    kind: str
    unit_id: int | None
    period: int
    column_index: int

    @property
    def is_binary(self) -> bool:
        return self.kind == "v"

    @property
    def name(self) -> str:
        token = KIND_TOKEN[self.kind]
        if self.unit_id is None:
            return f"{token}_{self.period}"
        return f"{token}_{self.unit_id}_{self.period}"


@dataclass
class LinearConstraint:
    name: str                     # family[j,k(,i|t)]
    coefficients: dict[int, float]
    sense: str                    # "<=", "=", ">="
    rhs: float

    @property
    def family(self) -> str:
        return self.name.split("[", 1)[0]


@dataclass
class MilpModel:
    variables: list[VarRef]
    constraints: list[LinearConstraint]
    objective: dict[int, float]   # minimization
    _by_name: dict[str, int] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if not self._by_name:
            self._by_name = {v.name: v.column_index for v in self.variables}

    @property
    def num_columns(self) -> int:
        return len(self.variables)

    def binary_columns(self) -> list[int]:
        return [v.column_index for v in self.variables if v.is_binary]

    def column_of(self, name: str) -> int:
        return self._by_name[name]

    def column_names(self) -> list[str]:
        return [v.name for v in self.variables]

    def objective_value(self, values) -> float:
        return sum(coef * values[col] for col, coef in self.objective.items())


class _Builder:
    def __init__(self):
        self.variables: list[VarRef] = []
        self.constraints: list[LinearConstraint] = []
        self.objective: dict[int, float] = {}
        self.col: dict[tuple, int] = {}

    def add_var(self, kind, unit_id, period):
        ref = VarRef(kind, unit_id, period, len(self.variables))
        self.variables.append(ref)
        self.col[(kind, unit_id, period)] = ref.column_index
        return ref.column_index

    def add_con(self, name, coefficients, sense, rhs):
        coefficients = {c: v for c, v in coefficients.items() if v != 0.0}
        self.constraints.append(LinearConstraint(name, coefficients, sense, rhs))


def build_model(instance: Instance,
                thinned: dict[int, ThinnedCurve] | None = None,
                *, ramp_tightening: bool = True) -> MilpModel:
    """Build the MILP for a validated instance.

    ``thinned`` maps unit ids to thinned startup curves (defaults to thinning
    at the configured tolerance).  ``ramp_tightening=False`` drops the
    relaxation-tightening terms of the ramp constraints; this must not change
    the optimum, only the LP relaxation.

    Raises :class:`ValidationFailed` if the instance has validation errors.
    """
    report = validate(instance)
    if not report.ok:
        raise ValidationFailed(report)
    if thinned is None:
        thinned = thin_all(instance)

    g = instance.general
    T, L = g.num_periods, g.period_length
    units = sorted(instance.units, key=lambda u: u.unit_id)
    storage = [u for u in units if u.is_storage]

    b = _Builder()

    # --- variables, kind-major then unit then period ------------------------
    for kind in KIND_ORDER:
        if kind in PERIOD_KINDS:
            for k in range(1, T + 1):
                b.add_var(kind, None, k)
        else:
            owners = storage if kind in ("s", "c") else units
            for u in owners:
                for k in range(1, T + 1):
                    b.add_var(kind, u.unit_id, k)

    def col(kind, j, k):
        return b.col[(kind, j, k)]

    # --- objective -----------------------------------------------------------
    for u in units:
        for k in range(1, T + 1):
            b.objective[col("cp", u.unit_id, k)] = 1.0
            b.objective[col("cu", u.unit_id, k)] = 1.0
            b.objective[col("cd", u.unit_id, k)] = 1.0
    for k in range(1, T + 1):
        if g.under_prod_penalty != 0.0:
            b.objective[col("p_under", None, k)] = g.under_prod_penalty
        if g.under_reserve_penalty != 0.0:
            b.objective[col("r_under", None, k)] = g.under_reserve_penalty
        if g.over_prod_penalty != 0.0:
            b.objective[col("p_over", None, k)] = g.over_prod_penalty

    # --- initial state fixing ------------------------------------------------
    for u in units:
        j = u.unit_id
        for k in range(1, min(u.initial_uptime, T) + 1):
            b.add_con(f"initial-on[{j},{k}]", {col("v", j, k): 1.0}, "=", 1.0)
    for u in units:
        j = u.unit_id
        for k in range(1, min(u.initial_downtime, T) + 1):
            b.add_con(f"initial-off[{j},{k}]", {col("v", j, k): 1.0}, "=", 0.0)

    # --- minimal up/downtime -------------------------------------------------
    # A startup in period k (v(k) - v(k-1) = 1) forces v(k+i) = 1 for the
    # next UT-1 periods; shutdowns are handled symmetrically.
    for u in units:
        j = u.unit_id
        for k in range(u.initial_uptime + 2, T + 1):
            for i in range(1, min(u.min_uptime - 1, T - k) + 1):
                b.add_con(
                    f"min-up[{j},{k},{i}]",
                    {col("v", j, k + i): 1.0, col("v", j, k): -1.0,
                     col("v", j, k - 1): 1.0},
                    ">=", 0.0)
    for u in units:
        j = u.unit_id
        for k in range(u.initial_downtime + 2, T + 1):
            for i in range(1, min(u.min_downtime - 1, T - k) + 1):
                b.add_con(
                    f"min-down[{j},{k},{i}]",
                    {col("v", j, k + i): 1.0, col("v", j, k - 1): 1.0,
                     col("v", j, k): -1.0},
                    "<=", 1.0)

    # --- production bounds, split into three rows ----------------------------
    for u in units:
        j = u.unit_id
        for k in range(1, T + 1):
            b.add_con(f"bounds[{j},{k},1]",
                      {col("v", j, k): u.p_min, col("p", j, k): -1.0}, "<=", 0.0)
            b.add_con(f"bounds[{j},{k},2]",
                      {col("p", j, k): 1.0, col("p_max", j, k): -1.0}, "<=", 0.0)
            b.add_con(f"bounds[{j},{k},3]",
                      {col("p_max", j, k): 1.0, col("v", j, k): -u.p_max}, "<=", 0.0)

    # --- ramping --------------------------------------------------------------
    # The tightening constants use max(P_min, 0): the best variable-free lower
    # bound on the previous production, valid also for storage units.
    for u in units:
        j = u.unit_id
        base = max(u.p_min, 0.0)
        rtu = min(u.startup_ramp, base + L * u.ramp_up) if ramp_tightening else 0.0
        for k in range(2, T + 1):
            b.add_con(
                f"ramp-up[{j},{k}]",
                {col("p_max", j, k): 1.0,
                 col("p", j, k - 1): -1.0,
                 col("v", j, k - 1): u.startup_ramp - L * u.ramp_up,
                 col("v", j, k): -rtu},
                "<=", u.startup_ramp - rtu)
        rtd = min(u.shutdown_ramp, base + L * u.ramp_down) if ramp_tightening else 0.0
        for k in range(2, T + 1):
            b.add_con(
                f"ramp-down[{j},{k}]",
                {col("p", j, k): 1.0,
                 col("p", j, k - 1): -1.0,
                 col("v", j, k): L * u.ramp_down - u.shutdown_ramp,
                 col("v", j, k - 1): rtd},
                ">=", rtd - u.shutdown_ramp)
        for k in range(1, T):
            b.add_con(
                f"shutdown-limit[{j},{k}]",
                {col("p_max", j, k): 1.0,
                 col("v", j, k): -u.shutdown_ramp,
                 col("v", j, k + 1): u.shutdown_ramp - u.p_max},
                "<=", 0.0)

    # --- storage ----------------------------------------------------------------
    for u in storage:
        j = u.unit_id
        for k in range(1, T + 1):
            b.add_con(f"storage-cap[{j},{k}]",
                      {col("s", j, k): 1.0}, "<=", u.storage_capacity)
        for k in range(1, T + 1):
            b.add_con(f"consumption-cap[{j},{k}]",
                      {col("c", j, k): 1.0}, "<=", max(0.0, -u.p_min))
        for k in range(2, T + 1):
            b.add_con(
                f"storage-balance[{j},{k}]",
                {col("s", j, k): 1.0,
                 col("s", j, k - 1): -1.0,
                 col("c", j, k - 1): -L * u.storage_efficiency,
                 col("p", j, k - 1): L},
                "=", L * u.storage_inflow)
        b.add_con(f"storage-initial[{j}]", {col("s", j, 1): 1.0},
                  "=", u.initial_storage)
        b.add_con(
            f"storage-final[{j}]",
            {col("s", j, T): 1.0,
             col("c", j, T): L * u.storage_efficiency,
             col("p", j, T): -L},
            "=", u.final_storage - L * u.storage_inflow)

    # --- demand and reserve with slacks ------------------------------------------
    for k in range(1, T + 1):
        coeffs = {col("p", u.unit_id, k): 1.0 for u in units}
        for u in storage:
            coeffs[col("c", u.unit_id, k)] = -1.0
        coeffs[col("p_under", None, k)] = 1.0
        coeffs[col("p_over", None, k)] = -1.0
        b.add_con(f"demand[{k}]", coeffs, "=", instance.periods.demand[k - 1])
    for k in range(1, T + 1):
        coeffs = {}
        for u in units:
            coeffs[col("p_max", u.unit_id, k)] = 1.0
            coeffs[col("p", u.unit_id, k)] = -1.0
        for u in storage:
            coeffs[col("c", u.unit_id, k)] = 1.0
        coeffs[col("r_under", None, k)] = 1.0
        b.add_con(f"reserve[{k}]", coeffs, ">=", instance.periods.reserve[k - 1])

    # --- production cost equalities -----------------------------------------------
    for u in units:
        j = u.unit_id
        fc = instance.periods.fuel_cost[u.fuel_type]
        for k in range(1, T + 1):
            var_rate = (u.var_fuel * fc[k - 1] + u.var_cost) * L
            fixed_rate = (u.fixed_fuel * fc[k - 1] + u.fixed_cost) * L
            b.add_con(
                f"prod-cost[{j},{k}]",
                {col("cp", j, k): 1.0,
                 col("p", j, k): -var_rate,
                 col("v", j, k): -fixed_rate},
                "=", 0.0)

    # --- shutdown cost epigraph ----------------------------------------------------
    for u in units:
        j = u.unit_id
        for k in range(2, T + 1):
            b.add_con(
                f"shutdown-cost[{j},{k}]",
                {col("cd", j, k): 1.0,
                 col("v", j, k - 1): -u.shutdown_cost,
                 col("v", j, k): u.shutdown_cost},
                ">=", 0.0)

    # --- startup cost epigraph over thinned group starts -----------------------------
    # cu(j,k) >= step(t) * (v(j,k) - sum_{n=1..t} v(j,k-n)) for group starts
    # t < k.  The right-hand term is 1 exactly when the unit starts in k after
    # at least t offline periods.
    for u in units:
        j = u.unit_id
        curve = thinned.get(j)
        starts = curve.group_starts() if curve is not None else []
        for k in range(1, T + 1):
            for t in starts:
                if t > k - 1:
                    break
                step = curve.steps[t]
                coeffs = {col("cu", j, k): 1.0, col("v", j, k): -step}
                for n in range(1, t + 1):
                    coeffs[col("v", j, k - n)] = coeffs.get(col("v", j, k - n), 0.0) + step
                b.add_con(f"startup-cost[{j},{k},{t}]", coeffs, ">=", 0.0)

    return MilpModel(b.variables, b.constraints, b.objective)


def model_stats(model: MilpModel) -> dict:
    """Constraint counts per family and variable counts per kind."""
    families: dict[str, int] = {}
    for con in model.constraints:
        families[con.family] = families.get(con.family, 0) + 1
    variables: dict[str, int] = {}
    for var in model.variables:
        variables[var.kind] = variables.get(var.kind, 0) + 1
    return {
        "families": families,
        "variables": variables,
        "total_constraints": len(model.constraints),
        "total_variables": len(model.variables),
        "binaries": sum(1 for v in model.variables if v.is_binary),
    }
