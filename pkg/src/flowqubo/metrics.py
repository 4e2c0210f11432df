"""Benchmark metrics: time-to-target, success estimation, diversity, Pareto.

The central quantity is the time-to-target estimate

    ttt = tau * log(1 - s) / log(1 - p)

for a solver whose single run takes ``tau`` seconds and hits the target with
probability ``p``: the expected wall-clock time until the target has been
seen at least once with confidence ``s``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import ModelError
from .ip import BinaryProgram
from .solvers import SampleSet

__all__ = [
    "ttt",
    "SuccessEstimate",
    "OptimalityTarget",
    "AllFeasibleTarget",
    "estimate_success",
    "DiversityReport",
    "diversity",
    "ParetoPoint",
    "pareto_front",
    "TttReport",
    "build_ttt_report",
    "write_ttt_csv",
    "write_pareto_csv",
]

_Z95 = 1.959963984540054


def ttt(tau: float, p_target: float, s: float = 0.99) -> float:
    """Expected time to reach the target with confidence ``s``.

    ``p_target == 1`` returns ``tau`` exactly (a deterministic solver needs
    one run); ``p_target == 0`` returns infinity (the target was never
    observed, so no finite estimate exists).
    """
    if not (isinstance(tau, (int, float)) and math.isfinite(tau) and tau > 0):
        raise ValueError(f"tau must be a positive finite number, got {tau!r}")
    if not (isinstance(p_target, (int, float)) and 0.0 <= p_target <= 1.0):
        raise ValueError(f"p_target must lie in [0, 1], got {p_target!r}")
    if not (isinstance(s, (int, float)) and 0.0 < s < 1.0):
        raise ValueError(f"s must lie strictly between 0 and 1, got {s!r}")
    if p_target == 0.0:
        return math.inf
    if p_target == 1.0:
        return float(tau)
    return tau * math.log(1.0 - s) / math.log(1.0 - p_target)


@dataclass(frozen=True)
class SuccessEstimate:
    """Estimated per-read success probability with a 95% Wilson interval."""

    p: float
    ci: tuple[float, float]
    method: str


@dataclass(frozen=True)
class OptimalityTarget:
    """Hit = a read at or below the reference energy (within ``tol``)."""

    energy: float
    tol: float = 1e-9


@dataclass(frozen=True)
class AllFeasibleTarget:
    """Hit = one batch of reads covering every reference configuration.

    ``reference`` is an oracle sample set enumerating the feasible
    configurations of ``program``; success of a batch means its feasible
    projected configurations are a superset of the reference ones.
    """

    reference: SampleSet
    program: BinaryProgram
    resamples: int = 1000
    seed: int = 0


def _wilson(hits: int, total: int) -> tuple[float, float]:
    if total <= 0:
        return (0.0, 1.0)
    z2 = _Z95 * _Z95
    phat = hits / total
    denom = 1.0 + z2 / total
    center = (phat + z2 / (2.0 * total)) / denom
    half = _Z95 * math.sqrt(phat * (1.0 - phat) / total
                            + z2 / (4.0 * total * total)) / denom
    # cancellation can leave dust at the exact boundaries
    low = 0.0 if hits == 0 else max(0.0, center - half)
    high = 1.0 if hits == total else min(1.0, center + half)
    return (low, high)


def _record_key(assignment: tuple[int, ...], program: BinaryProgram):
    """Projected configuration key; accepts full or already projected bits."""
    proj = program.projection or program.var_names
    if len(assignment) == program.num_vars:
        if program.projection:
            return program.project(assignment)
        return tuple(assignment)
    if len(assignment) == len(proj):
        return tuple(assignment)
    raise ModelError(
        f"assignment of length {len(assignment)} matches neither the model "
        f"({program.num_vars} variables) nor its projection ({len(proj)})")


def _projected_feasible_keys(samples: SampleSet, program: BinaryProgram) -> set:
    keys = set()
    for rec in samples.records:
        if rec.feasible:
            keys.add(_record_key(rec.assignment, program))
    return keys


def estimate_success(samples: SampleSet, target) -> SuccessEstimate:
    """Per-read probability of hitting ``target``.

    Optimality targets use the exact occurrence-weighted hit fraction.  The
    all-feasible target is a batch property, so when coverage is incomplete
    the probability that a batch of the same size covers everything is
    estimated by a seeded bootstrap over the reads.
    """
    if not samples.records:
        raise ModelError("cannot estimate success from an empty sample set")
    if isinstance(target, OptimalityTarget):
        total = samples.num_reads
        hits = sum(r.occurrences for r in samples.records
                   if r.energy <= target.energy + target.tol)
        return SuccessEstimate(p=hits / total, ci=_wilson(hits, total),
                               method="counting")
    if isinstance(target, AllFeasibleTarget):
        program = target.program
        ref_keys = _projected_feasible_keys(target.reference, program)
        if not ref_keys:
            raise ModelError("reference sample set has no feasible records")
        found = _projected_feasible_keys(samples, program)
        if ref_keys <= found:
            return SuccessEstimate(p=1.0, ci=(1.0, 1.0), method="coverage")
        records = samples.records
        rec_keys = [
            _record_key(r.assignment, program) if r.feasible else None
            for r in records
        ]
        weights = np.array([r.occurrences for r in records], dtype=float)
        rng = np.random.default_rng(target.seed)
        counts = rng.multinomial(samples.num_reads, weights / weights.sum(),
                                 size=target.resamples)
        ok = np.ones(target.resamples, dtype=bool)
        for key in ref_keys:
            idx = [i for i, k in enumerate(rec_keys) if k == key]
            if not idx:
                ok[:] = False
                break
            ok &= counts[:, idx].sum(axis=1) > 0
        hits = int(ok.sum())
        return SuccessEstimate(p=hits / target.resamples,
                               ci=_wilson(hits, target.resamples),
                               method="bootstrap")
    raise TypeError(f"unsupported target type {type(target)!r}")


@dataclass(frozen=True)
class DiversityReport:
    total: int
    found_count: int
    coverage: float
    rank_hits: Mapping[int, int]
    found_ranks: tuple[int, ...]
    mean_rank: float | None


def diversity(samples: SampleSet, reference: SampleSet,
              program: BinaryProgram) -> DiversityReport:
    """How much of the reference solution set the samples recovered.

    Reference records are ranked 1-based in their canonical (energy, bits)
    order.  ``rank_hits`` counts sample occurrences per recovered rank; a
    feasible sample outside the reference set means the two sample sets
    belong to different models and raises.
    """
    key_rank: dict = {}
    for pos, rec in enumerate(reference.records):
        key_rank.setdefault(_record_key(rec.assignment, program), pos + 1)
    if not key_rank:
        raise ModelError("reference sample set is empty")
    rank_hits: dict[int, int] = {}
    for rec in samples.records:
        if not rec.feasible:
            continue
        key = _record_key(rec.assignment, program)
        rank = key_rank.get(key)
        if rank is None:
            raise ModelError(
                "feasible sample configuration missing from the reference "
                "set; the sample sets describe different models")
        rank_hits[rank] = rank_hits.get(rank, 0) + rec.occurrences
    found_ranks = tuple(sorted(rank_hits))
    return DiversityReport(
        total=len(key_rank),
        found_count=len(found_ranks),
        coverage=len(found_ranks) / len(key_rank),
        rank_hits=dict(sorted(rank_hits.items())),
        found_ranks=found_ranks,
        mean_rank=sum(found_ranks) / len(found_ranks) if found_ranks else None,
    )


# -- Pareto analysis -----------------------------------------------------------


@dataclass(frozen=True)
class ParetoPoint:
    config_id: str
    discrete_objective: float
    continuous_objective: float


def pareto_front(points: Iterable[ParetoPoint]) -> tuple[ParetoPoint, ...]:
    """Non-dominated subset under minimization of both objectives.

    Duplicate (discrete, continuous) pairs collapse onto the
    lexicographically smallest config id.  The result is sorted by discrete
    objective with strictly decreasing continuous objective.
    """
    ordered = sorted(points, key=lambda p: (p.discrete_objective,
                                            p.continuous_objective,
                                            p.config_id))
    front: list[ParetoPoint] = []
    seen: set[tuple[float, float]] = set()
    best_cont = math.inf
    for p in ordered:
        key = (p.discrete_objective, p.continuous_objective)
        if key in seen:
            continue
        seen.add(key)
        if p.continuous_objective < best_cont:
            front.append(p)
            best_cont = p.continuous_objective
    return tuple(front)


# -- report assembly -----------------------------------------------------------


@dataclass(frozen=True)
class TttReport:
    """One benchmark row; None marks quantities that were not computed."""

    solver: str
    s: float
    tau: float | None
    p_opt: float | None = None
    p_feas: float | None = None
    ttt_opt: float | None = None
    ttt_feas: float | None = None
    coverage_found: int | None = None
    coverage_total: int | None = None


def build_ttt_report(
    samples: SampleSet,
    *,
    s: float = 0.99,
    optimal_target: OptimalityTarget | None = None,
    feasible_target: AllFeasibleTarget | None = None,
    solver: str | None = None,
) -> TttReport:
    tau = samples.tau
    p_opt = p_feas = ttt_opt = ttt_feas = None
    coverage_found = coverage_total = None
    if optimal_target is not None:
        p_opt = estimate_success(samples, optimal_target).p
        if tau is not None:
            ttt_opt = ttt(tau, p_opt, s)
    if feasible_target is not None:
        p_feas = estimate_success(samples, feasible_target).p
        if tau is not None:
            ttt_feas = ttt(tau, p_feas, s)
        ref_keys = _projected_feasible_keys(feasible_target.reference,
                                            feasible_target.program)
        found = _projected_feasible_keys(samples, feasible_target.program)
        coverage_found = len(found & ref_keys)
        coverage_total = len(ref_keys)
    return TttReport(
        solver=solver or samples.solver,
        s=s,
        tau=tau,
        p_opt=p_opt,
        p_feas=p_feas,
        ttt_opt=ttt_opt,
        ttt_feas=ttt_feas,
        coverage_found=coverage_found,
        coverage_total=coverage_total,
    )


def _cell(value) -> str:
    if value is None:
        return "-"
    if isinstance(value, float) and math.isinf(value):
        return "inf"
    return str(value)


def write_ttt_csv(reports: Sequence[TttReport], path, s: float = 0.99) -> None:
    """Columns: solver, tau, ttopt<pct>, ttfeas<pct>, coverage.

    Unobserved or uncomputed entries show as "-", a target that was never
    hit shows as "inf", and coverage is written as found/total.
    """
    pct = int(round((reports[0].s if reports else s) * 100))
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["solver", "tau", f"ttopt{pct}", f"ttfeas{pct}", "coverage"])
        for rep in reports:
            cov = None
            if rep.coverage_found is not None and rep.coverage_total is not None:
                cov = f"{rep.coverage_found}/{rep.coverage_total}"
            writer.writerow([
                rep.solver,
                _cell(rep.tau),
                _cell(rep.ttt_opt),
                _cell(rep.ttt_feas),
                _cell(cov),
            ])


def write_pareto_csv(rows: Sequence[Mapping], front_ids, path) -> None:
    """Columns: config_id, discrete_objective, continuous_objective, status,
    on_front.  Rows come out sorted by configuration id."""
    front_ids = set(front_ids)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["config_id", "discrete_objective",
                         "continuous_objective", "status", "on_front"])
        for row in sorted(rows, key=lambda r: r["config_id"]):
            cont = row.get("continuous_objective")
            writer.writerow([
                row["config_id"],
                _cell(row.get("discrete_objective")),
                "inf" if cont is None else _cell(cont),
                row.get("status", "ok"),
                "true" if row["config_id"] in front_ids else "false",
            ])
