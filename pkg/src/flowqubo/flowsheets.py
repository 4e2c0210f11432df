"""Flowsheet design spaces, their binary models, and the continuous stage.

Two bundled case studies exercise the pipeline end to end:

* an ionic-liquid separation process (reactors feeding separators, with a
  cation/anion solvent choice): selection binaries plus stream-existence
  binaries, a bilinear operating-cost surrogate, and a continuous flow
  subproblem solved per configuration by multi-start pattern search;
* a crystallization-train superstructure: one binary per candidate stream,
  node balances, and compatibility rules between unit choices.

Both coefficient sets are synthetic (see the "provenance" field in the data
files); they are shaped to give a nontrivial gap between the discrete
surrogate ranking and the continuous objective.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from importlib import resources
from typing import Callable, Mapping, Sequence

import numpy as np

from .errors import ModelError
from .ip import BinaryProgram, Constraint
from .solvers import brute_force

__all__ = [
    "IlDesignSpace",
    "DsNode",
    "DsDesignSpace",
    "load_default_il_space",
    "load_default_ds_space",
    "build_il_discrete",
    "build_ds_discrete",
    "il_continuous_solve",
    "pattern_search",
    "BlackBoxObjective",
    "run_blackbox",
    "sweep_il",
]


# -- design spaces -------------------------------------------------------------


@dataclass(frozen=True)
class IlDesignSpace:
    """Unit inventory and coefficients for the ionic-liquid process.

    ``alpha`` is the reactor conversion (output per unit feed), ``beta`` the
    separator recovery factor per (separator, cation, anion), ``f_lower`` /
    ``f_upper`` the semicontinuous throughput window of each unit, and
    ``demand`` the minimum recovered product.  ``big_m`` is the linearization
    constant carried for model export; the reduced continuous solve never
    needs it because the binaries are fixed there.
    """

    reactors: tuple[str, ...]
    separators: tuple[str, ...]
    cations: tuple[str, ...]
    anions: tuple[str, ...]
    c_fixed: Mapping[str, float]
    c_oper_reactor: Mapping[str, float]
    c_oper_separator: Mapping[str, float]
    c_invest: Mapping[str, float]
    c_energy: Mapping[str, float]
    alpha: Mapping[str, float]
    beta: Mapping[str, Mapping[str, Mapping[str, float]]]
    f_lower: Mapping[str, float]
    f_upper: Mapping[str, float]
    demand: float
    big_m: float = 100.0
    provenance: str = "synthetic"

    def __post_init__(self) -> None:
        units = tuple(self.reactors) + tuple(self.separators)
        if not self.reactors or not self.separators:
            raise ModelError("need at least one reactor and one separator")
        if not self.cations or not self.anions:
            raise ModelError("need at least one cation and one anion")
        if len(set(units)) != len(units):
            raise ModelError("duplicate unit names")
        for table, owner in ((self.c_fixed, units),
                             (self.c_oper_reactor, self.reactors),
                             (self.c_oper_separator, self.separators),
                             (self.c_invest, units),
                             (self.c_energy, self.separators),
                             (self.alpha, self.reactors),
                             (self.f_lower, units),
                             (self.f_upper, units)):
            missing = set(owner) - set(table)
            if missing:
                raise ModelError(f"missing coefficients for {sorted(missing)}")
        for r in self.reactors:
            if not 0.0 < self.alpha[r] <= 1.0:
                raise ModelError(f"alpha[{r}] must lie in (0, 1]")
        for s in self.separators:
            for c in self.cations:
                for a in self.anions:
                    try:
                        b = self.beta[s][c][a]
                    except KeyError as exc:
                        raise ModelError(
                            f"missing beta[{s}][{c}][{a}]") from exc
                    if not 0.0 <= b <= 1.0:
                        raise ModelError(f"beta[{s}][{c}][{a}] must lie in [0, 1]")
        for u in units:
            if not 0.0 <= self.f_lower[u] <= self.f_upper[u]:
                raise ModelError(f"need 0 <= f_lower <= f_upper for unit {u}")
        if not self.demand > 0.0:
            raise ModelError("demand must be positive")

    def to_json_dict(self) -> dict:
        return {
            "provenance": self.provenance,
            "reactors": list(self.reactors),
            "separators": list(self.separators),
            "cations": list(self.cations),
            "anions": list(self.anions),
            "c_fixed": dict(self.c_fixed),
            "c_oper_reactor": dict(self.c_oper_reactor),
            "c_oper_separator": dict(self.c_oper_separator),
            "c_invest": dict(self.c_invest),
            "c_energy": dict(self.c_energy),
            "alpha": dict(self.alpha),
            "beta": {s: {c: dict(row) for c, row in by_c.items()}
                     for s, by_c in self.beta.items()},
            "f_lower": dict(self.f_lower),
            "f_upper": dict(self.f_upper),
            "demand": self.demand,
            "big_m": self.big_m,
        }

    @classmethod
    def from_json_dict(cls, data: Mapping) -> "IlDesignSpace":
        def fmap(key):
            return {str(k): float(v) for k, v in data[key].items()}

        return cls(
            reactors=tuple(data["reactors"]),
            separators=tuple(data["separators"]),
            cations=tuple(data["cations"]),
            anions=tuple(data["anions"]),
            c_fixed=fmap("c_fixed"),
            c_oper_reactor=fmap("c_oper_reactor"),
            c_oper_separator=fmap("c_oper_separator"),
            c_invest=fmap("c_invest"),
            c_energy=fmap("c_energy"),
            alpha=fmap("alpha"),
            beta={str(s): {str(c): {str(a): float(v) for a, v in row.items()}
                           for c, row in by_c.items()}
                  for s, by_c in data["beta"].items()},
            f_lower=fmap("f_lower"),
            f_upper=fmap("f_upper"),
            demand=float(data["demand"]),
            big_m=float(data.get("big_m", 100.0)),
            provenance=str(data.get("provenance", "synthetic")),
        )

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_json_dict(), fh, indent=2)
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "IlDesignSpace":
        with open(path, encoding="utf-8") as fh:
            return cls.from_json_dict(json.load(fh))


@dataclass(frozen=True)
class DsNode:
    name: str
    inflows: tuple[str, ...]
    outflows: tuple[str, ...]


@dataclass(frozen=True)
class DsDesignSpace:
    """Stream superstructure: one binary per flow, balances at every node."""

    flows: tuple[str, ...]
    nodes: tuple[DsNode, ...]
    costs: Mapping[str, float]
    source: str
    sink: str
    configuration_flows: tuple[str, ...]
    logic_rules: tuple[Constraint, ...] = ()
    units: Mapping[str, str] = field(default_factory=dict)
    provenance: str = "synthetic"

    def __post_init__(self) -> None:
        known = set(self.flows)
        if len(known) != len(self.flows):
            raise ModelError("duplicate flow names")
        if self.source not in known or self.sink not in known:
            raise ModelError("source and sink must be listed flows")
        for node in self.nodes:
            for f in tuple(node.inflows) + tuple(node.outflows):
                if f not in known:
                    raise ModelError(f"node {node.name} references unknown flow {f!r}")
        for f in self.configuration_flows:
            if f not in known:
                raise ModelError(f"configuration flow {f!r} is not a listed flow")
        for f in self.costs:
            if f not in known:
                raise ModelError(f"cost entry for unknown flow {f!r}")
        for rule in self.logic_rules:
            unknown = rule.variables() - known
            if unknown:
                raise ModelError(
                    f"logic rule {rule.label!r} references unknown flows {sorted(unknown)}")

    def to_json_dict(self) -> dict:
        return {
            "provenance": self.provenance,
            "flows": list(self.flows),
            "source": self.source,
            "sink": self.sink,
            "nodes": [
                {"name": n.name, "inflows": list(n.inflows),
                 "outflows": list(n.outflows)}
                for n in self.nodes
            ],
            "costs": dict(self.costs),
            "units": dict(self.units),
            "configuration_flows": list(self.configuration_flows),
            "logic_rules": [rule.to_json_dict() for rule in self.logic_rules],
        }

    @classmethod
    def from_json_dict(cls, data: Mapping) -> "DsDesignSpace":
        return cls(
            flows=tuple(data["flows"]),
            nodes=tuple(
                DsNode(name=str(n["name"]),
                       inflows=tuple(n["inflows"]),
                       outflows=tuple(n["outflows"]))
                for n in data["nodes"]
            ),
            costs={str(k): float(v) for k, v in data.get("costs", {}).items()},
            source=str(data["source"]),
            sink=str(data["sink"]),
            configuration_flows=tuple(data["configuration_flows"]),
            logic_rules=tuple(Constraint.from_json_dict(r)
                              for r in data.get("logic_rules", [])),
            units={str(k): str(v) for k, v in data.get("units", {}).items()},
            provenance=str(data.get("provenance", "synthetic")),
        )

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_json_dict(), fh, indent=2)
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "DsDesignSpace":
        with open(path, encoding="utf-8") as fh:
            return cls.from_json_dict(json.load(fh))


def _load_bundled(name: str) -> dict:
    with resources.files("flowqubo.data").joinpath(name).open("r") as fh:
        return json.load(fh)


def load_default_il_space() -> IlDesignSpace:
    return IlDesignSpace.from_json_dict(_load_bundled("il_default.json"))


def load_default_ds_space() -> DsDesignSpace:
    return DsDesignSpace.from_json_dict(_load_bundled("ds_default.json"))


# -- discrete model builders ---------------------------------------------------


def build_il_discrete(space: IlDesignSpace) -> BinaryProgram:
    """Configuration model: which units run, which ionic pair is used.

    Variables: unit selections y, stream binaries (source feeds, reactor to
    separator streams, sink streams), solvent choices z, and a pair indicator
    w per (cation, anion).  The objective is fixed cost plus an operating
    surrogate at the minimum sustainable throughput; the separator part
    depends on the recovery factor of the chosen pair, which is where the
    bilinear y*w terms come from.
    """
    rs, ss = space.reactors, space.separators
    y_r = {r: f"y[{r}]" for r in rs}
    y_s = {s: f"y[{s}]" for s in ss}
    src = {r: f"flow[src,{r}]" for r in rs}
    snk = {s: f"flow[{s},sink]" for s in ss}
    z_c = {c: f"z[{c}]" for c in space.cations}
    z_a = {a: f"z[{a}]" for a in space.anions}
    w = {(c, a): f"w[{c},{a}]" for c in space.cations for a in space.anions}
    x = {(r, s): f"flow[{r},{s}]" for r in rs for s in ss}

    names = (
        [y_r[r] for r in rs] + [src[r] for r in rs]
        + [y_s[s] for s in ss] + [snk[s] for s in ss]
        + [z_c[c] for c in space.cations] + [z_a[a] for a in space.anions]
        + [w[c, a] for c in space.cations for a in space.anions]
        + [x[r, s] for r in rs for s in ss]
    )

    cons: list[Constraint] = []
    for r in rs:
        cons.append(Constraint({src[r]: 1.0, y_r[r]: -1.0}, "=", 0.0,
                               label=f"source flow equals reactor selection [{r}]"))
    for s in ss:
        cons.append(Constraint({snk[s]: 1.0, y_s[s]: -1.0}, "=", 0.0,
                               label=f"sink flow equals separator selection [{s}]"))
    if len(rs) == 2:
        # logical OR written through the product, x + y - x*y = 1
        f1, f2 = src[rs[0]], src[rs[1]]
        cons.append(Constraint({f1: 1.0, f2: 1.0}, "=", 1.0,
                               products=((f1, f2, -1.0),),
                               label="at least one reactor fed"))
    else:
        cons.append(Constraint({src[r]: 1.0 for r in rs}, ">=", 1.0,
                               label="at least one reactor fed"))
    cons.append(Constraint({snk[s]: 1.0 for s in ss}, ">=", 1.0,
                           label="at least one separator to sink"))
    for r in rs:
        for s in ss:
            cons.append(Constraint({x[r, s]: -1.0}, "=", 0.0,
                                   products=((x[r, s], src[r], 1.0),),
                                   label=f"flow only from fed reactor [{r},{s}]"))
    for r in rs:
        for s in ss:
            cons.append(Constraint({x[r, s]: -1.0}, "=", 0.0,
                                   products=((x[r, s], y_s[s], 1.0),),
                                   label=f"flow only into active separator [{r},{s}]"))
    for r in rs:
        linear = {x[r, s]: 1.0 for s in ss}
        linear[src[r]] = -1.0
        cons.append(Constraint(linear, ">=", 0.0,
                               label=f"fed reactor sends flow [{r}]"))
    for s in ss:
        linear = {x[r, s]: 1.0 for r in rs}
        linear[y_s[s]] = -1.0
        cons.append(Constraint(linear, ">=", 0.0,
                               label=f"active separator receives flow [{s}]"))
    cons.append(Constraint({z_c[c]: 1.0 for c in space.cations}, "=", 1.0,
                           label="one cation selected"))
    cons.append(Constraint({z_a[a]: 1.0 for a in space.anions}, "=", 1.0,
                           label="one anion selected"))
    for c in space.cations:
        for a in space.anions:
            cons.append(Constraint({w[c, a]: 1.0}, "=", 0.0,
                                   products=((z_c[c], z_a[a], -1.0),),
                                   label=f"pair indicator equals product [{c},{a}]"))

    objective = {}
    for r in rs:
        objective[y_r[r]] = (space.c_fixed[r]
                             + space.c_oper_reactor[r] * space.alpha[r]
                             * space.f_lower[r])
    for s in ss:
        objective[y_s[s]] = space.c_fixed[s]
    products = []
    for s in ss:
        for c in space.cations:
            for a in space.anions:
                coeff = (space.c_oper_separator[s] * space.beta[s][c][a]
                         * space.f_lower[s])
                if coeff != 0.0:
                    products.append((y_s[s], w[c, a], coeff))

    projection = ([y_r[r] for r in rs] + [y_s[s] for s in ss]
                  + [z_c[c] for c in space.cations]
                  + [z_a[a] for a in space.anions])
    return BinaryProgram(
        var_names=tuple(names),
        objective=objective,
        constraints=tuple(cons),
        objective_products=tuple(products),
        projection=tuple(projection),
    )


def build_ds_discrete(space: DsDesignSpace) -> BinaryProgram:
    """Stream-selection model: active source and sink, balanced nodes,
    compatibility rules from the design space."""
    cons: list[Constraint] = [
        Constraint({space.source: 1.0}, "=", 1.0, label="source/sink activation"),
        Constraint({space.sink: 1.0}, "=", 1.0, label="source/sink activation"),
    ]
    for node in space.nodes:
        linear: dict[str, float] = {}
        for f in node.inflows:
            linear[f] = linear.get(f, 0.0) + 1.0
        for f in node.outflows:
            linear[f] = linear.get(f, 0.0) - 1.0
        cons.append(Constraint(linear, "=", 0.0,
                               label=f"node balance [{node.name}]"))
    cons.extend(space.logic_rules)
    objective = {f: c for f, c in space.costs.items() if c != 0.0}
    return BinaryProgram(
        var_names=tuple(space.flows),
        objective=objective,
        constraints=tuple(cons),
        projection=tuple(space.configuration_flows),
    )


# -- continuous stage ----------------------------------------------------------


def pattern_search(
    func: Callable[[np.ndarray], float],
    bounds: Sequence[tuple[float, float]],
    *,
    seed=None,
    starts: int = 20,
    shrink: float = 0.5,
    stop_mesh: float = 1e-6,
    budget: int | None = None,
    initial_step_frac: float = 0.25,
):
    """Multi-start coordinate pattern search with an extreme barrier.

    ``func`` returns the objective or infinity for infeasible points.  The
    first start is the box center, the rest are uniform draws.  Polling
    visits coordinates in order, +step before -step, and accepts the first
    strict improvement; a failed poll halves the step until it drops below
    ``stop_mesh``.  Candidates are clipped to the box and skipped when the
    clip lands back on the current point.  With a budget, evaluation number
    ``budget`` is the last one; the evaluation sequence for a larger budget
    extends the one for a smaller, so more budget never worsens the result.

    Returns ``(best_x, best_value, evaluations)`` with ``best_x = None``
    when no evaluation returned a finite value.
    """
    lb = np.array([b[0] for b in bounds], dtype=float)
    ub = np.array([b[1] for b in bounds], dtype=float)
    if lb.size == 0:
        raise ValueError("bounds must be non-empty")
    if not (np.isfinite(lb).all() and np.isfinite(ub).all() and (lb <= ub).all()):
        raise ValueError("bounds must be finite with lower <= upper")
    if budget is not None and budget < 1:
        raise ValueError("budget must be at least 1")
    if not 0.0 < shrink < 1.0:
        raise ValueError("shrink must lie strictly between 0 and 1")

    rng = np.random.default_rng(seed)
    dim = lb.size
    evals = 0
    best_val = math.inf
    best_x: np.ndarray | None = None

    def evaluate(point: np.ndarray) -> float:
        nonlocal evals, best_val, best_x
        value = float(func(point))
        evals += 1
        if value < best_val:
            best_val = value
            best_x = point.copy()
        return value

    exhausted = False
    for start_index in range(starts):
        if exhausted:
            break
        if start_index == 0:
            x = (lb + ub) / 2.0
        else:
            x = rng.uniform(lb, ub)
        if budget is not None and evals >= budget:
            break
        fx = evaluate(x)
        step = initial_step_frac * (ub - lb)
        while True:
            for i in range(dim):
                accepted = False
                for sgn in (1.0, -1.0):
                    cand_i = min(max(x[i] + sgn * step[i], lb[i]), ub[i])
                    if cand_i == x[i]:
                        continue
                    if budget is not None and evals >= budget:
                        exhausted = True
                        break
                    cand = x.copy()
                    cand[i] = cand_i
                    fc = evaluate(cand)
                    if fc < fx:
                        x, fx = cand, fc
                        accepted = True
                        break
                if exhausted or accepted:
                    break
            if exhausted:
                break
            if accepted:
                continue
            if step.max() < stop_mesh:
                break
            step = step * shrink

    return best_x, (best_val if best_x is not None else math.inf), evals


def _parse_selection(space: IlDesignSpace, fixed) -> tuple[list, list, str, str]:
    groups = (list(space.reactors), list(space.separators),
              list(space.cations), list(space.anions))
    prefixes = ("y", "y", "z", "z")
    if isinstance(fixed, Mapping):
        def bit(prefix, unit):
            for key in (f"{prefix}[{unit}]", unit):
                if key in fixed:
                    return int(fixed[key])
            return 0

        picked = [[u for u in group if bit(p, u)]
                  for group, p in zip(groups, prefixes)]
    else:
        flat = [int(b) for b in fixed]
        expected = sum(len(g) for g in groups)
        if len(flat) != expected:
            raise ModelError(
                f"selection vector needs {expected} bits "
                f"(reactors, separators, cations, anions), got {len(flat)}")
        picked = []
        pos = 0
        for group in groups:
            picked.append([u for u, b in zip(group, flat[pos:pos + len(group)]) if b])
            pos += len(group)
    sel_r, sel_s, sel_c, sel_a = picked
    if not sel_r or not sel_s:
        raise ModelError("configuration selects no reactor or no separator")
    if len(sel_c) != 1 or len(sel_a) != 1:
        raise ModelError("configuration must select exactly one cation and one anion")
    return sel_r, sel_s, sel_c[0], sel_a[0]


def il_continuous_solve(
    space: IlDesignSpace,
    fixed,
    *,
    seed=None,
    budget: int | None = None,
    starts: int = 20,
    stop_mesh: float = 1e-6,
) -> dict:
    """Flow sizing for one fixed configuration.

    Search variables are the reactor-to-separator transfers; reactor feeds
    and separator intakes follow from them.  Unit throughputs are
    semicontinuous (zero or inside [f_lower, f_upper]) and the recovered
    product must meet the demand.  The objective adds fixed costs of the
    selected units, concave investment terms on throughputs, and a linear
    energy term on separator intake; infeasible points are barred with an
    infinite value.
    """
    sel_r, sel_s, cation, anion = _parse_selection(space, fixed)
    pairs = [(r, s) for r in sel_r for s in sel_s]
    bounds = [
        (0.0, min(space.f_upper[s], space.alpha[r] * space.f_upper[r]))
        for r, s in pairs
    ]
    beta_s = {s: space.beta[s][cation][anion] for s in sel_s}
    fixed_cost = sum(space.c_fixed[u] for u in sel_r + sel_s)
    tol = 1e-9

    def throughputs(x):
        feed = {r: 0.0 for r in sel_r}
        intake = {s: 0.0 for s in sel_s}
        for (r, s), v in zip(pairs, x):
            feed[r] += v / space.alpha[r]
            intake[s] += v
        return feed, intake

    def admissible(level, unit):
        if level > space.f_upper[unit] + tol:
            return False
        return level <= tol or level >= space.f_lower[unit] - tol

    def evaluate(x) -> float:
        if (x < -tol).any():
            return math.inf
        feed, intake = throughputs(x)
        for r in sel_r:
            if not admissible(feed[r], r):
                return math.inf
        for s in sel_s:
            if not admissible(intake[s], s):
                return math.inf
        recovered = sum(beta_s[s] * intake[s] for s in sel_s)
        if recovered < space.demand - tol:
            return math.inf
        value = fixed_cost
        for r in sel_r:
            value += space.c_invest[r] * feed[r] ** 0.6
        for s in sel_s:
            value += (space.c_invest[s] * intake[s] ** 0.6
                      + space.c_energy[s] * intake[s])
        return value

    best_x, best_val, evals = pattern_search(
        evaluate, bounds, seed=seed, starts=starts,
        stop_mesh=stop_mesh, budget=budget)
    if best_x is None or not math.isfinite(best_val):
        return {"flows": {}, "objective": None,
                "status": "continuous-infeasible", "evaluations": evals}
    feed, intake = throughputs(best_x)
    flows = {}
    for r in sel_r:
        flows[f"src->{r}"] = float(feed[r])
    for (r, s), v in zip(pairs, best_x):
        flows[f"{r}->{s}"] = float(v)
    for s in sel_s:
        flows[f"{s}->out"] = float(beta_s[s] * intake[s])
    return {"flows": flows, "objective": best_val, "status": "ok",
            "evaluations": evals}


@dataclass(frozen=True)
class BlackBoxObjective:
    """External continuous evaluator attached to a discrete configuration.

    ``evaluate(fixed, params)`` returns ``(score, status)``; any status other
    than "ok" marks the point infeasible.  ``bounds`` are per-parameter boxes
    and ``budget`` caps the number of evaluations per optimization run.
    """

    evaluate: Callable[[Mapping, np.ndarray], tuple[float, str]]
    bounds: tuple[tuple[float, float], ...]
    budget: int | None = None


def run_blackbox(objective: BlackBoxObjective, fixed, seed=None, *,
                 starts: int = 20, stop_mesh: float = 1e-6) -> dict:
    """Optimize one black-box configuration with pattern search."""
    last_failure: list = [None]

    def barrier(x: np.ndarray) -> float:
        score, status = objective.evaluate(fixed, x)
        if status != "ok":
            last_failure[0] = (tuple(float(v) for v in x), str(status))
            return math.inf
        return float(score)

    best_x, best_val, evals = pattern_search(
        barrier, objective.bounds, seed=seed, starts=starts,
        stop_mesh=stop_mesh, budget=objective.budget)
    if best_x is None or not math.isfinite(best_val):
        return {"best_params": None, "best_score": None, "evaluations": evals,
                "status": "no-feasible-evaluation", "last_failure": last_failure[0]}
    return {"best_params": tuple(float(v) for v in best_x),
            "best_score": best_val, "evaluations": evals, "status": "ok",
            "last_failure": last_failure[0]}


def sweep_il(
    space: IlDesignSpace,
    *,
    seed: int = 0,
    budget_per_config: int | None = None,
    starts: int = 20,
    stop_mesh: float = 1e-6,
) -> list[dict]:
    """Both objectives for every feasible configuration.

    Discrete objectives come from one exhaustive solve; each configuration
    then gets its own continuous solve with a child seed derived from the
    sweep seed and its position, so single configurations can be reproduced
    without rerunning the sweep.  Rows are sorted by configuration id (the
    projected bit string).
    """
    program = build_il_discrete(space)
    oracle = brute_force(program)
    entries = []
    for rec in oracle.records:
        config_id = "".join(str(b) for b in program.project(rec.assignment))
        entries.append((config_id, rec))
    entries.sort(key=lambda e: e[0])

    rows = []
    for pos, (config_id, rec) in enumerate(entries):
        fixed = dict(zip(program.projection, program.project(rec.assignment)))
        child_seed = np.random.SeedSequence(entropy=seed, spawn_key=(pos,))
        result = il_continuous_solve(
            space, fixed, seed=child_seed, budget=budget_per_config,
            starts=starts, stop_mesh=stop_mesh)
        rows.append({
            "config_id": config_id,
            "discrete_objective": rec.objective,
            "continuous_objective": result["objective"],
            "status": result["status"],
        })
    return rows
