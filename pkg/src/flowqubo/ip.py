"""Constrained binary programs.

A :class:`BinaryProgram` is a minimization over 0/1 variables with a sparse
objective and a list of :class:`Constraint` rows.  Constraint left-hand sides
may contain bilinear product terms ``coeff * x_u * x_v`` next to the linear
part; the objective may carry such products as well, which keeps
configuration models with selection-dependent operating costs expressible
without auxiliary variables.  A designated ``projection`` subset of the
variables identifies what counts as a distinct configuration when solutions
are enumerated or compared.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .errors import DimensionError, ModelError

__all__ = [
    "SENSES",
    "Constraint",
    "BinaryProgram",
    "no_good_cut",
    "normalize_constraint",
]

SENSES = ("=", "<=", ">=")


def _check_products(products) -> tuple[tuple[str, str, float], ...]:
    out = []
    for u, v, coeff in products:
        if u == v:
            raise ModelError(f"product term pairs distinct variables, got ({u!r}, {u!r})")
        out.append((str(u), str(v), float(coeff)))
    return tuple(out)


@dataclass(frozen=True, eq=True)
class Constraint:
    """One row ``linear . x + sum coeff * x_u * x_v  <sense>  rhs``."""

    linear: Mapping[str, float]
    sense: str
    rhs: float
    products: tuple[tuple[str, str, float], ...] = ()
    label: str = ""

    def __post_init__(self) -> None:
        if self.sense not in SENSES:
            raise ModelError(f"sense must be one of {SENSES}, got {self.sense!r}")
        object.__setattr__(self, "linear", dict(self.linear))
        object.__setattr__(self, "products", _check_products(self.products))

    def variables(self) -> frozenset[str]:
        names = set(self.linear)
        for u, v, _ in self.products:
            names.add(u)
            names.add(v)
        return frozenset(names)

    def value(self, values: Mapping[str, int]) -> float:
        total = 0.0
        for name, coeff in self.linear.items():
            total += coeff * values[name]
        for u, v, coeff in self.products:
            total += coeff * values[u] * values[v]
        return total

    def satisfied(self, values: Mapping[str, int], tol: float = 1e-9) -> bool:
        lhs = self.value(values)
        if self.sense == "=":
            return abs(lhs - self.rhs) <= tol
        if self.sense == "<=":
            return lhs <= self.rhs + tol
        return lhs >= self.rhs - tol

    def to_json_dict(self) -> dict:
        return {
            "linear": {k: self.linear[k] for k in sorted(self.linear)},
            "products": [[u, v, c] for u, v, c in self.products],
            "sense": self.sense,
            "rhs": self.rhs,
            "label": self.label,
        }

    @classmethod
    def from_json_dict(cls, data: Mapping) -> "Constraint":
        return cls(
            linear={str(k): float(v) for k, v in data.get("linear", {}).items()},
            sense=str(data["sense"]),
            rhs=float(data["rhs"]),
            products=tuple((str(u), str(v), float(c)) for u, v, c in data.get("products", [])),
            label=str(data.get("label", "")),
        )


@dataclass(frozen=True)
class BinaryProgram:
    """Minimization of a (possibly bilinear) objective over 0/1 variables."""

    var_names: tuple[str, ...]
    objective: Mapping[str, float]
    constraints: tuple[Constraint, ...] = ()
    objective_constant: float = 0.0
    objective_products: tuple[tuple[str, str, float], ...] = ()
    projection: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        names = tuple(str(n) for n in self.var_names)
        if len(set(names)) != len(names):
            raise ModelError("duplicate variable names")
        object.__setattr__(self, "var_names", names)
        object.__setattr__(self, "objective", dict(self.objective))
        object.__setattr__(self, "constraints", tuple(self.constraints))
        object.__setattr__(self, "objective_products", _check_products(self.objective_products))
        object.__setattr__(self, "projection", tuple(str(n) for n in self.projection))
        known = set(names)
        for name in self.objective:
            if name not in known:
                raise ModelError(f"objective references unknown variable {name!r}")
        for u, v, _ in self.objective_products:
            if u not in known or v not in known:
                raise ModelError(f"objective product references unknown variable ({u!r}, {v!r})")
        for con in self.constraints:
            unknown = con.variables() - known
            if unknown:
                raise ModelError(
                    f"constraint {con.label!r} references unknown variable(s) {sorted(unknown)}")
        for name in self.projection:
            if name not in known:
                raise ModelError(f"projection references unknown variable {name!r}")

    # -- bookkeeping ---------------------------------------------------------

    @property
    def num_vars(self) -> int:
        return len(self.var_names)

    def index(self, name: str) -> int:
        try:
            return self.var_names.index(name)
        except ValueError:
            raise ModelError(f"unknown variable {name!r}") from None

    def as_map(self, assignment: Sequence[int]) -> dict[str, int]:
        if len(assignment) != self.num_vars:
            raise DimensionError(
                f"assignment has {len(assignment)} entries, program has {self.num_vars}")
        values = {}
        for name, bit in zip(self.var_names, assignment):
            if bit not in (0, 1):
                raise ModelError(f"assignment value for {name!r} must be 0 or 1, got {bit!r}")
            values[name] = int(bit)
        return values

    # -- evaluation ----------------------------------------------------------

    def objective_value(self, assignment: Sequence[int]) -> float:
        values = self.as_map(assignment)
        total = self.objective_constant
        for name, coeff in self.objective.items():
            total += coeff * values[name]
        for u, v, coeff in self.objective_products:
            total += coeff * values[u] * values[v]
        return total

    def violations(self, assignment: Sequence[int], tol: float = 1e-9) -> list[str]:
        """Labels of all constraints the assignment violates."""
        values = self.as_map(assignment)
        return [c.label for c in self.constraints if not c.satisfied(values, tol)]

    def is_feasible(self, assignment: Sequence[int], tol: float = 1e-9) -> bool:
        return not self.violations(assignment, tol)

    def project(self, assignment: Sequence[int]) -> tuple[int, ...]:
        values = self.as_map(assignment)
        return tuple(values[name] for name in self.projection)

    def with_constraints(self, extra: Iterable[Constraint]) -> "BinaryProgram":
        return BinaryProgram(
            var_names=self.var_names,
            objective=self.objective,
            constraints=self.constraints + tuple(extra),
            objective_constant=self.objective_constant,
            objective_products=self.objective_products,
            projection=self.projection,
        )

    # -- serialization -------------------------------------------------------

    def to_json_dict(self) -> dict:
        return {
            "var_names": list(self.var_names),
            "objective": {
                "linear": {k: self.objective[k] for k in sorted(self.objective)},
                "products": [[u, v, c] for u, v, c in self.objective_products],
                "constant": self.objective_constant,
            },
            "constraints": [c.to_json_dict() for c in self.constraints],
            "projection": list(self.projection),
        }

    @classmethod
    def from_json_dict(cls, data: Mapping) -> "BinaryProgram":
        try:
            obj = data.get("objective", {})
            return cls(
                var_names=tuple(data["var_names"]),
                objective={str(k): float(v) for k, v in obj.get("linear", {}).items()},
                constraints=tuple(Constraint.from_json_dict(c) for c in data.get("constraints", [])),
                objective_constant=float(obj.get("constant", 0.0)),
                objective_products=tuple(
                    (str(u), str(v), float(c)) for u, v, c in obj.get("products", [])),
                projection=tuple(data.get("projection", ())),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ModelError(f"malformed program JSON: {exc}") from exc

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_json_dict(), fh, indent=2)
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "BinaryProgram":
        with open(path, encoding="utf-8") as fh:
            return cls.from_json_dict(json.load(fh))


def no_good_cut(values: Mapping[str, int], over: Sequence[str], label: str = "") -> Constraint:
    """Linear cut excluding one assignment of the ``over`` subset.

    ``sum_{v: values[v]=1} (1 - x_v) + sum_{v: values[v]=0} x_v >= 1`` forces
    at least one of the listed variables to differ from ``values``.  Any other
    assignment of the subset keeps a left-hand side of at least 1, so exactly
    one point of the projected space is removed.
    """
    over = list(over)
    if not over:
        raise ValueError("no_good_cut needs a non-empty variable subset")
    if len(set(over)) != len(over):
        raise ValueError("no_good_cut subset contains duplicates")
    linear: dict[str, float] = {}
    ones = 0
    for name in over:
        try:
            bit = values[name]
        except KeyError:
            raise ModelError(f"assignment does not cover variable {name!r}") from None
        if bit not in (0, 1):
            raise ModelError(f"assignment value for {name!r} must be 0 or 1")
        if bit:
            linear[name] = -1.0
            ones += 1
        else:
            linear[name] = 1.0
    if not label:
        label = "no-good[%s]" % "".join(str(values[name]) for name in over)
    return Constraint(linear=linear, sense=">=", rhs=1.0 - ones, label=label)


def normalize_constraint(con: Constraint) -> Constraint:
    """Rewrite two redundant product patterns into plain linear rows.

    * ``q*(x*y) - q*x = 0``  becomes  ``x <= y``  (and symmetrically for y):
      over binaries, ``x*y = x`` just says x cannot be on without y.
    * ``a*x + a*y - a*(x*y) = a``  becomes  ``x + y >= 1``: inclusion-
      exclusion of an OR.

    Anything else is returned unchanged; generic products are handled later
    by auxiliary-variable linearization.
    """
    if len(con.products) != 1 or con.sense != "=":
        return con
    u, v, q = con.products[0]
    if q == 0.0:
        return con
    lin = {k: c for k, c in con.linear.items() if c != 0.0}

    # pattern: q*x*y - q*x = 0  ->  x - y <= 0
    if con.rhs == 0.0 and len(lin) == 1:
        (name, coeff), = lin.items()
        if name in (u, v) and coeff == -q:
            other = v if name == u else u
            return Constraint(
                linear={name: 1.0, other: -1.0},
                sense="<=",
                rhs=0.0,
                label=con.label,
            )

    # pattern: a*x + a*y - a*x*y = a  ->  x + y >= 1
    if set(lin) == {u, v}:
        a = lin[u]
        if a != 0.0 and lin[v] == a and q == -a and con.rhs == a:
            return Constraint(
                linear={u: 1.0, v: 1.0},
                sense=">=",
                rhs=1.0,
                label=con.label,
            )
    return con
