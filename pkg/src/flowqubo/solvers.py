"""Discrete solvers sharing one result type.

Three interchangeable engines operate on the model types from :mod:`qubo`
and :mod:`ip`:

* :func:`brute_force` — exhaustive oracle, exact by construction,
* :func:`simulated_annealing` — single-flip Metropolis sampler with a
  geometric inverse-temperature schedule,
* :func:`branch_and_bound` — depth-first exact search with an optimal,
  an enumerate-all (no-good-cut loop), and a solution-pool mode.

All of them return a :class:`SampleSet`; :func:`import_samples` ingests
externally produced sample files in the same JSON layout.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, NamedTuple, Sequence

import numpy as np

from .errors import (
    DimensionError,
    EnergyMismatchError,
    ExhaustiveLimitError,
    ModelError,
    SampleFormatError,
    SolverError,
)
from .ip import BinaryProgram, no_good_cut
from .qubo import QuboModel

__all__ = [
    "SampleRecord",
    "SampleSet",
    "SaParams",
    "brute_force",
    "simulated_annealing",
    "branch_and_bound",
    "import_samples",
    "derived_beta_schedule",
]

_FEAS_TOL = 1e-9


@dataclass(frozen=True)
class SampleRecord:
    """One distinct assignment with its energy and bookkeeping fields."""

    assignment: tuple[int, ...]
    energy: float
    occurrences: int = 1
    objective: float | None = None
    feasible: bool | None = None


@dataclass(frozen=True)
class SampleSet:
    records: tuple[SampleRecord, ...]
    solver: str
    tau: float | None = None
    seed: int | None = None
    status: str = "ok"
    metadata: Mapping = field(default_factory=dict)
    time_breakdown: Mapping | None = None

    @classmethod
    def build(
        cls,
        records: Iterable[SampleRecord],
        solver: str,
        *,
        tau: float | None = None,
        seed: int | None = None,
        status: str = "ok",
        metadata: Mapping | None = None,
        time_breakdown: Mapping | None = None,
    ) -> "SampleSet":
        """Canonicalize: merge duplicate assignments, sort by (energy, bits).

        Duplicates keep the lowest energy seen (relevant when QUBO-level
        records were collapsed onto the same decoded assignment) and sum
        their occurrence counts.
        """
        merged: dict[tuple[int, ...], SampleRecord] = {}
        for rec in records:
            prev = merged.get(rec.assignment)
            if prev is None:
                merged[rec.assignment] = rec
            else:
                keep = rec if rec.energy < prev.energy else prev
                merged[rec.assignment] = replace(
                    keep, occurrences=prev.occurrences + rec.occurrences)
        ordered = tuple(sorted(merged.values(), key=lambda r: (r.energy, r.assignment)))
        return cls(
            records=ordered,
            solver=solver,
            tau=tau,
            seed=seed,
            status=status,
            metadata=dict(metadata) if metadata else {},
            time_breakdown=dict(time_breakdown) if time_breakdown else None,
        )

    @property
    def num_reads(self) -> int:
        return sum(r.occurrences for r in self.records)

    def best(self) -> SampleRecord | None:
        return self.records[0] if self.records else None

    def feasible_records(self) -> tuple[SampleRecord, ...]:
        return tuple(r for r in self.records if r.feasible)

    # -- serialization -------------------------------------------------------

    def to_json_dict(self, include_tau: bool = True) -> dict:
        out: dict = {
            "solver": self.solver,
            "seed": self.seed,
            "tau_seconds": self.tau if include_tau else None,
            "status": self.status,
            "records": [
                {
                    "assignment": "".join(str(b) for b in rec.assignment),
                    "energy": rec.energy,
                    "objective": rec.objective,
                    "feasible": rec.feasible,
                    "occurrences": rec.occurrences,
                }
                for rec in self.records
            ],
        }
        if self.metadata:
            out["metadata"] = {k: self.metadata[k] for k in sorted(self.metadata)}
        if self.time_breakdown is not None:
            out["time_breakdown"] = dict(self.time_breakdown)
        return out

    @classmethod
    def from_json_dict(cls, data: Mapping) -> "SampleSet":
        return _parse_sample_json(data)

    def save(self, path, include_tau: bool = True) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_json_dict(include_tau=include_tau), fh, indent=2)
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "SampleSet":
        with open(path, encoding="utf-8") as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as exc:
                raise SampleFormatError(f"not valid JSON: {exc}") from exc
        return cls.from_json_dict(data)


def _parse_sample_json(data: Mapping) -> SampleSet:
    if not isinstance(data, Mapping):
        raise SampleFormatError("sample file must hold a JSON object")
    solver = data.get("solver")
    if not isinstance(solver, str) or not solver:
        raise SampleFormatError("missing or invalid 'solver' field")
    seed = data.get("seed")
    if seed is not None and not isinstance(seed, int):
        raise SampleFormatError("'seed' must be an integer or null")
    tau = data.get("tau_seconds")
    if tau is not None and not isinstance(tau, (int, float)):
        raise SampleFormatError("'tau_seconds' must be a number or null")
    status = data.get("status", "ok")
    if not isinstance(status, str):
        raise SampleFormatError("'status' must be a string")
    raw_records = data.get("records")
    if not isinstance(raw_records, list):
        raise SampleFormatError("missing 'records' list")
    records = []
    width = None
    for pos, raw in enumerate(raw_records):
        if not isinstance(raw, Mapping):
            raise SampleFormatError(f"record {pos} is not an object")
        bits = raw.get("assignment")
        if not isinstance(bits, str) or not bits or set(bits) - {"0", "1"}:
            raise SampleFormatError(f"record {pos}: assignment must be a 0/1 string")
        if width is None:
            width = len(bits)
        elif len(bits) != width:
            raise SampleFormatError(f"record {pos}: inconsistent assignment length")
        energy = raw.get("energy")
        if not isinstance(energy, (int, float)) or not math.isfinite(energy):
            raise SampleFormatError(f"record {pos}: energy must be a finite number")
        occurrences = raw.get("occurrences", 1)
        if not isinstance(occurrences, int) or occurrences < 1:
            raise SampleFormatError(f"record {pos}: occurrences must be a positive integer")
        objective = raw.get("objective")
        if objective is not None and not isinstance(objective, (int, float)):
            raise SampleFormatError(f"record {pos}: objective must be a number or null")
        feasible = raw.get("feasible")
        if feasible is not None and not isinstance(feasible, bool):
            raise SampleFormatError(f"record {pos}: feasible must be a boolean or null")
        records.append(SampleRecord(
            assignment=tuple(int(ch) for ch in bits),
            energy=float(energy),
            occurrences=occurrences,
            objective=None if objective is None else float(objective),
            feasible=feasible,
        ))
    metadata = data.get("metadata", {})
    if not isinstance(metadata, Mapping):
        raise SampleFormatError("'metadata' must be an object")
    breakdown = data.get("time_breakdown")
    if breakdown is not None and not isinstance(breakdown, Mapping):
        raise SampleFormatError("'time_breakdown' must be an object or absent")
    return SampleSet.build(
        records,
        solver,
        tau=None if tau is None else float(tau),
        seed=seed,
        status=status,
        metadata=metadata,
        time_breakdown=breakdown,
    )


def import_samples(path, qubo: QuboModel | None = None, tol: float = 1e-6) -> SampleSet:
    """Load an externally produced sample file.

    With ``qubo`` given, every stated energy is recomputed; deviations beyond
    ``tol`` raise :class:`EnergyMismatchError` listing the offending records.
    """
    samples = SampleSet.load(path)
    if qubo is not None:
        mismatches = []
        for rec in samples.records:
            if len(rec.assignment) != qubo.num_vars:
                raise SampleFormatError(
                    f"assignment length {len(rec.assignment)} does not match "
                    f"QUBO with {qubo.num_vars} variables")
            recomputed = qubo.energy(rec.assignment)
            if abs(recomputed - rec.energy) > tol:
                mismatches.append((rec.assignment, rec.energy, recomputed))
        if mismatches:
            raise EnergyMismatchError(mismatches)
    return samples


# -- shared enumeration helpers ----------------------------------------------


def _assignment_blocks(n: int, chunk_bits: int = 18):
    """Yield (start, X) blocks enumerating all 2^n assignments.

    Variable 0 is the most significant bit, so enumeration index order equals
    lexicographic order of the bit tuples.
    """
    total = 1 << n
    step = 1 << min(chunk_bits, n)
    shifts = np.arange(n - 1, -1, -1, dtype=np.int64)
    for start in range(0, total, step):
        ks = np.arange(start, min(start + step, total), dtype=np.int64)
        # transposed build, so columns of the yielded block are contiguous
        Xt = ((ks[None, :] >> shifts[:, None]) & 1).astype(np.float64)
        yield start, Xt.T


def _bits_of(k: int, n: int) -> tuple[int, ...]:
    return tuple((k >> (n - 1 - i)) & 1 for i in range(n))


class ProgramTables(NamedTuple):
    """Dense-array view of a BinaryProgram for vectorized evaluation."""

    num_vars: int
    A: np.ndarray            # (num_constraints, num_vars) linear coefficients
    senses: tuple[str, ...]
    rhs: np.ndarray
    prods: tuple[tuple[tuple[int, int, float], ...], ...]  # per constraint
    labels: tuple[str, ...]
    c: np.ndarray            # objective linear coefficients
    obj_prods: tuple[tuple[int, int, float], ...]
    const: float


def _program_tables(program: BinaryProgram) -> ProgramTables:
    n = program.num_vars
    index = {name: i for i, name in enumerate(program.var_names)}
    m = len(program.constraints)
    A = np.zeros((m, n))
    rhs = np.zeros(m)
    senses = []
    prods = []
    labels = []
    for ci, con in enumerate(program.constraints):
        for name, coeff in con.linear.items():
            A[ci, index[name]] += coeff
        rhs[ci] = con.rhs
        senses.append(con.sense)
        prods.append(tuple((index[u], index[v], q) for u, v, q in con.products))
        labels.append(con.label)
    c = np.zeros(n)
    for name, coeff in program.objective.items():
        c[index[name]] += coeff
    obj_prods = tuple((index[u], index[v], q) for u, v, q in program.objective_products)
    return ProgramTables(n, A, tuple(senses), rhs, tuple(prods), tuple(labels),
                         c, obj_prods, program.objective_constant)


def _feasible_mask(tables: ProgramTables, X: np.ndarray, tol: float = _FEAS_TOL) -> np.ndarray:
    if len(tables.senses) == 0:
        return np.ones(X.shape[0], dtype=bool)
    # constraint-major layout keeps the row updates and comparisons contiguous
    lhs = tables.A @ X.T
    for ci, plist in enumerate(tables.prods):
        for u, v, q in plist:
            lhs[ci] += q * (X[:, u] * X[:, v])
    senses = np.asarray(tables.senses)
    mask = np.ones(X.shape[0], dtype=bool)
    eq = senses == "="
    if eq.any():
        mask &= (np.abs(lhs[eq] - tables.rhs[eq, None]) <= tol).all(axis=0)
    le = senses == "<="
    if le.any():
        mask &= (lhs[le] <= tables.rhs[le, None] + tol).all(axis=0)
    ge = senses == ">="
    if ge.any():
        mask &= (lhs[ge] >= tables.rhs[ge, None] - tol).all(axis=0)
    return mask


def _objective_values(tables: ProgramTables, X: np.ndarray) -> np.ndarray:
    obj = X @ tables.c + tables.const
    for u, v, q in tables.obj_prods:
        obj += q * X[:, u] * X[:, v]
    return obj


# -- exhaustive oracle --------------------------------------------------------


def brute_force(model, *, limit: int | None = None, var_limit: int = 24,
                chunk_bits: int = 18) -> SampleSet:
    """Exhaustive oracle.

    For a :class:`QuboModel`: every assignment with its exact energy (or the
    ``limit`` lowest).  For a :class:`BinaryProgram`: one record per distinct
    projected feasible configuration, carrying the cheapest completion (ties
    broken by lexicographically smallest assignment) with energy equal to the
    objective.
    """
    if isinstance(model, QuboModel):
        return _brute_force_qubo(model, limit, var_limit, chunk_bits)
    if isinstance(model, BinaryProgram):
        return _brute_force_program(model, var_limit, chunk_bits)
    raise TypeError(f"brute_force expects QuboModel or BinaryProgram, got {type(model)!r}")


def _brute_force_qubo(qubo: QuboModel, limit, var_limit, chunk_bits) -> SampleSet:
    n = qubo.num_vars
    if n > var_limit:
        raise ExhaustiveLimitError(
            f"{n} variables exceed the exhaustive bound of {var_limit}")
    t0 = time.perf_counter()
    kept_k: list[np.ndarray] = []
    kept_e: list[np.ndarray] = []
    for start, X in _assignment_blocks(n, chunk_bits):
        energies = qubo.energies(X)
        ks = np.arange(start, start + X.shape[0], dtype=np.int64)
        if limit is not None:
            order = np.argsort(energies, kind="stable")[:limit]
            ks, energies = ks[order], energies[order]
        kept_k.append(ks)
        kept_e.append(energies)
    ks = np.concatenate(kept_k)
    energies = np.concatenate(kept_e)
    order = np.lexsort((ks, energies))
    if limit is not None:
        order = order[:limit]
    records = [
        SampleRecord(assignment=_bits_of(int(ks[i]), n), energy=float(energies[i]))
        for i in order
    ]
    tau = time.perf_counter() - t0
    return SampleSet(records=tuple(records), solver="oracle", tau=tau, seed=None)


def _brute_force_program(program: BinaryProgram, var_limit, chunk_bits) -> SampleSet:
    n = program.num_vars
    if n > var_limit:
        raise ExhaustiveLimitError(
            f"{n} variables exceed the exhaustive bound of {var_limit}")
    t0 = time.perf_counter()
    tables = _program_tables(program)
    proj_names = program.projection or program.var_names
    proj_idx = [program.index(name) for name in proj_names]
    pool: dict[tuple[int, ...], tuple[float, tuple[int, ...]]] = {}
    for start, X in _assignment_blocks(n, chunk_bits):
        mask = _feasible_mask(tables, X)
        hits = np.nonzero(mask)[0]
        if hits.size == 0:
            continue
        objs = _objective_values(tables, X[hits])
        for local, obj in zip(hits, objs):
            bits = _bits_of(start + int(local), n)
            key = tuple(bits[i] for i in proj_idx)
            prev = pool.get(key)
            if prev is None or obj < prev[0]:
                pool[key] = (float(obj), bits)
    records = [
        SampleRecord(assignment=bits, energy=obj, objective=obj, feasible=True)
        for obj, bits in pool.values()
    ]
    tau = time.perf_counter() - t0
    return SampleSet.build(records, "oracle", tau=tau,
                           status="ok" if records else "infeasible")


# -- simulated annealing ------------------------------------------------------


@dataclass(frozen=True)
class SaParams:
    num_reads: int = 1000
    num_sweeps: int = 1000
    beta_hot: float | None = None
    beta_cold: float | None = None
    seed: int | None = None


def derived_beta_schedule(qubo: QuboModel) -> tuple[float, float]:
    """Default geometric schedule endpoints.

    The hot end makes even the largest single-flip move likely (β_hot =
    0.1/|ΔE|_max with |ΔE|_max bounded per variable by |h_i| + Σ|W_ij|); the
    cold end freezes the smallest energy granularity (β_cold = 10/|ΔE|_min
    with |ΔE|_min the smallest nonzero coefficient magnitude).
    """
    h, w = qubo.fields()
    per_var = np.abs(h) + np.abs(w).sum(axis=1)
    de_max = float(per_var.max()) if per_var.size else 0.0
    magnitudes = [abs(v) for v in qubo.terms.values() if v != 0.0]
    de_min = min(magnitudes) if magnitudes else 0.0
    if de_max <= 0.0 or de_min <= 0.0:
        return 0.1, 10.0
    return 0.1 / de_max, 10.0 / de_min


def simulated_annealing(qubo: QuboModel, params: SaParams | None = None) -> SampleSet:
    """Single-flip Metropolis annealer, vectorized across reads.

    All reads advance in lockstep through ``num_sweeps`` full sweeps (one
    proposed flip per variable per sweep) under a geometric β schedule; the
    terminal state of each read is one sample.  Deterministic given the seed.
    """
    params = params or SaParams()
    if params.num_reads < 1 or params.num_sweeps < 1:
        raise SolverError("num_reads and num_sweeps must be at least 1")
    beta_hot, beta_cold = params.beta_hot, params.beta_cold
    if beta_hot is None or beta_cold is None:
        derived = derived_beta_schedule(qubo)
        beta_hot = derived[0] if beta_hot is None else beta_hot
        beta_cold = derived[1] if beta_cold is None else beta_cold
    if not beta_hot < beta_cold:
        raise SolverError(
            f"beta_hot must be below beta_cold, got {beta_hot} >= {beta_cold}")

    n = qubo.num_vars
    reads = params.num_reads
    t0 = time.perf_counter()
    rng = np.random.default_rng(params.seed)
    metadata = {
        "num_reads": reads,
        "num_sweeps": params.num_sweeps,
        "beta_hot": beta_hot,
        "beta_cold": beta_cold,
    }
    if n == 0:
        records = [SampleRecord(assignment=(), energy=qubo.offset, occurrences=reads)]
        return SampleSet.build(records, "sa", tau=time.perf_counter() - t0,
                               seed=params.seed, metadata=metadata)

    h, w = qubo.fields()
    betas = np.geomspace(beta_hot, beta_cold, num=params.num_sweeps)
    X = rng.integers(0, 2, size=(reads, n)).astype(np.float64)
    for beta in betas:
        for i in range(n):
            xi = X[:, i]
            d_energy = (1.0 - 2.0 * xi) * (h[i] + X @ w[i])
            u = rng.random(reads)
            accept = u < np.exp(-beta * np.maximum(d_energy, 0.0))
            X[:, i] = np.where(accept, 1.0 - xi, xi)

    energies = qubo.energies(X)
    counts: dict[tuple[int, ...], list] = {}
    for r in range(reads):
        key = tuple(int(b) for b in X[r])
        entry = counts.get(key)
        if entry is None:
            counts[key] = [float(energies[r]), 1]
        else:
            entry[1] += 1
    records = [
        SampleRecord(assignment=bits, energy=e, occurrences=k)
        for bits, (e, k) in counts.items()
    ]
    tau = time.perf_counter() - t0
    return SampleSet.build(records, "sa", tau=tau, seed=params.seed, metadata=metadata)


# -- branch and bound ---------------------------------------------------------


class _BbState:
    """Incremental bound bookkeeping for one (possibly cut-augmented) program.

    Row ``m`` (the last one) tracks the objective; rows 0..m-1 track
    constraint left-hand sides.  Each row keeps a [lo, hi] interval over all
    completions of the current partial assignment, updated in O(occurrences)
    per variable fix with an undo journal.
    """

    def __init__(self, program: BinaryProgram):
        self.program = program
        n = program.num_vars
        index = {name: i for i, name in enumerate(program.var_names)}
        cons = program.constraints
        m = len(cons)
        self.obj_row = m
        rows = m + 1

        self.lin_occ: list[list[tuple[int, float]]] = [[] for _ in range(n)]
        self.prod_occ: list[list[tuple[int, int]]] = [[] for _ in range(n)]
        self.prods: list[list[tuple[int, int, float]]] = [[] for _ in range(rows)]
        self.senses = [con.sense for con in cons]
        self.rhs = [con.rhs for con in cons]
        self.lo = [0.0] * rows
        self.hi = [0.0] * rows

        def add_linear(row: int, var: int, coeff: float) -> None:
            if coeff == 0.0:
                return
            self.lin_occ[var].append((row, coeff))
            self.lo[row] += min(0.0, coeff)
            self.hi[row] += max(0.0, coeff)

        def add_product(row: int, u: int, v: int, coeff: float) -> None:
            if coeff == 0.0:
                return
            pidx = len(self.prods[row])
            self.prods[row].append((u, v, coeff))
            self.prod_occ[u].append((row, pidx))
            self.prod_occ[v].append((row, pidx))
            self.lo[row] += min(0.0, coeff)
            self.hi[row] += max(0.0, coeff)

        for ci, con in enumerate(cons):
            for name, coeff in con.linear.items():
                add_linear(ci, index[name], coeff)
            for u, v, coeff in con.products:
                add_product(ci, index[u], index[v], coeff)
        for name, coeff in program.objective.items():
            add_linear(self.obj_row, index[name], coeff)
        for u, v, coeff in program.objective_products:
            add_product(self.obj_row, index[u], index[v], coeff)
        self.lo[self.obj_row] += program.objective_constant
        self.hi[self.obj_row] += program.objective_constant

        self.prod_state: dict[tuple[int, int], tuple[float, float]] = {}
        for row in range(rows):
            for pidx, (_, _, coeff) in enumerate(self.prods[row]):
                self.prod_state[(row, pidx)] = (min(0.0, coeff), max(0.0, coeff))
        self.values = [-1] * n

        # exact leaf objective without dict round-trips
        self.obj_lin = [0.0] * n
        for name, coeff in program.objective.items():
            self.obj_lin[index[name]] += coeff
        self.obj_prods = [(index[u], index[v], q)
                          for u, v, q in program.objective_products]
        self.obj_const = program.objective_constant

    def leaf_objective(self, bits) -> float:
        total = self.obj_const
        for i, coeff in enumerate(self.obj_lin):
            if coeff and bits[i]:
                total += coeff
        for u, v, coeff in self.obj_prods:
            if bits[u] and bits[v]:
                total += coeff
        return total

    def assign(self, var: int, value: int):
        """Fix ``var`` to ``value``; returns (journal, touched rows)."""
        self.values[var] = value
        journal = []
        touched = []
        for row, coeff in self.lin_occ[var]:
            dlo = coeff * value - min(0.0, coeff)
            dhi = coeff * value - max(0.0, coeff)
            self.lo[row] += dlo
            self.hi[row] += dhi
            journal.append((row, dlo, dhi, None, None))
            touched.append(row)
        for row, pidx in self.prod_occ[var]:
            u, v, coeff = self.prods[row][pidx]
            xu, xv = self.values[u], self.values[v]
            if xu == 0 or xv == 0:
                interval = (0.0, 0.0)
            elif xu == 1 and xv == 1:
                interval = (coeff, coeff)
            else:
                interval = (min(0.0, coeff), max(0.0, coeff))
            key = (row, pidx)
            old = self.prod_state[key]
            if interval != old:
                dlo = interval[0] - old[0]
                dhi = interval[1] - old[1]
                self.lo[row] += dlo
                self.hi[row] += dhi
                self.prod_state[key] = interval
                journal.append((row, dlo, dhi, key, old))
            touched.append(row)
        return journal, touched

    def undo(self, var: int, journal) -> None:
        self.values[var] = -1
        for row, dlo, dhi, key, old in reversed(journal):
            self.lo[row] -= dlo
            self.hi[row] -= dhi
            if key is not None:
                self.prod_state[key] = old

    def rows_consistent(self, touched) -> bool:
        for row in touched:
            if row == self.obj_row:
                continue
            sense = self.senses[row]
            b = self.rhs[row]
            if sense == "=":
                if self.lo[row] > b + _FEAS_TOL or self.hi[row] < b - _FEAS_TOL:
                    return False
            elif sense == "<=":
                if self.lo[row] > b + _FEAS_TOL:
                    return False
            else:
                if self.hi[row] < b - _FEAS_TOL:
                    return False
        return True


def _bb_search(program: BinaryProgram, *, prune_objective: bool,
               on_leaf) -> int:
    """Shared DFS: declaration-order branching, 1-branch first.

    ``on_leaf(assignment, objective)`` is called for every feasible leaf and
    returns the current incumbent objective (or None) used for pruning when
    ``prune_objective`` is set.  Returns the number of search nodes visited.
    """
    state = _BbState(program)
    n = program.num_vars
    nodes = 0
    incumbent: list[float | None] = [None]

    # catches constraints that are violated before any variable is fixed,
    # including ones that reference no variables at all
    if not state.rows_consistent(range(state.obj_row)):
        return 1
    if n == 0:
        incumbent[0] = on_leaf((), program.objective_constant)
        return 1

    def dfs(depth: int) -> None:
        nonlocal nodes
        for value in (1, 0):
            nodes += 1
            journal, touched = state.assign(depth, value)
            ok = state.rows_consistent(touched)
            if ok and prune_objective and incumbent[0] is not None:
                if state.lo[state.obj_row] > incumbent[0]:
                    ok = False
            if ok:
                if depth + 1 == n:
                    # every row was re-checked when its last variable was
                    # fixed, so the leaf is feasible by construction
                    bits = tuple(state.values)
                    incumbent[0] = on_leaf(bits, state.leaf_objective(bits))
                else:
                    dfs(depth + 1)
            state.undo(depth, journal)

    dfs(0)
    return nodes


def _solve_optimal(program: BinaryProgram) -> tuple[tuple[int, ...], float] | None:
    best: list = [None, None]  # objective, assignment

    def on_leaf(bits, obj):
        if best[0] is None or obj < best[0] or (obj == best[0] and bits < best[1]):
            best[0], best[1] = obj, bits
        return best[0]

    _bb_search(program, prune_objective=True, on_leaf=on_leaf)
    if best[0] is None:
        return None
    return best[1], best[0]


def branch_and_bound(program: BinaryProgram, mode: str = "optimal", *,
                     pool_size: int | None = None) -> SampleSet:
    """Exact depth-first search over a BinaryProgram.

    Modes: ``optimal`` returns one provably optimal assignment;
    ``enumerate_all`` repeats solve + no-good cut over the projection until
    infeasible, yielding every projected-distinct feasible solution in
    objective order; ``pool`` runs one exhaustive DFS (no objective pruning,
    no cuts) and keeps the ``pool_size`` best projected-distinct solutions.
    Ties always resolve to the lexicographically smallest assignment.
    """
    t0 = time.perf_counter()
    if mode == "optimal":
        hit = _solve_optimal(program)
        records = []
        if hit is not None:
            bits, obj = hit
            records.append(SampleRecord(assignment=bits, energy=obj,
                                        objective=obj, feasible=True))
        return SampleSet.build(records, "bb", tau=time.perf_counter() - t0,
                               status="ok" if records else "infeasible")

    if mode == "enumerate_all":
        over = program.projection or program.var_names
        records = []
        current = program
        while True:
            hit = _solve_optimal(current)
            if hit is None:
                break
            bits, obj = hit
            records.append(SampleRecord(assignment=bits, energy=obj,
                                        objective=obj, feasible=True))
            values = dict(zip(program.var_names, bits))
            current = current.with_constraints([no_good_cut(values, over)])
        return SampleSet.build(records, "bb-enumerate", tau=time.perf_counter() - t0,
                               status="ok" if records else "infeasible")

    if mode == "pool":
        if pool_size is None or pool_size < 1:
            raise ValueError("pool mode needs pool_size >= 1")
        proj_names = program.projection or program.var_names
        proj_idx = [program.index(name) for name in proj_names]
        pool: dict[tuple[int, ...], tuple[float, tuple[int, ...]]] = {}

        def on_leaf(bits, obj):
            key = tuple(bits[i] for i in proj_idx)
            prev = pool.get(key)
            if prev is None or (obj, bits) < prev:
                pool[key] = (obj, bits)
            return None

        _bb_search(program, prune_objective=False, on_leaf=on_leaf)
        ranked = sorted(pool.values())[:pool_size]
        records = [
            SampleRecord(assignment=bits, energy=obj, objective=obj, feasible=True)
            for obj, bits in ranked
        ]
        return SampleSet.build(records, "bb-pool", tau=time.perf_counter() - t0,
                               status="ok" if records else "infeasible")

    raise ValueError(f"unknown branch-and-bound mode {mode!r}")
