import itertools
import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from flowqubo import (
    BinaryProgram,
    Constraint,
    EnergyMismatchError,
    ExhaustiveLimitError,
    QuboModel,
    SampleFormatError,
    SampleRecord,
    SampleSet,
    SaParams,
    SolverError,
    branch_and_bound,
    brute_force,
    derived_beta_schedule,
    import_samples,
    simulated_annealing,
)


def _tiny_qubo():
    # E = x0 - 2 x0 x1 + x1, two degenerate minima
    return QuboModel.from_terms(2, {(0, 0): 1.0, (0, 1): -2.0, (1, 1): 1.0})


# -- sample sets ---------------------------------------------------------------


def test_build_merges_duplicates_and_sorts():
    records = [
        SampleRecord(assignment=(1, 0), energy=1.0, occurrences=2),
        SampleRecord(assignment=(0, 0), energy=0.0),
        SampleRecord(assignment=(1, 0), energy=1.0, occurrences=3),
    ]
    ss = SampleSet.build(records, "test")
    assert [r.assignment for r in ss.records] == [(0, 0), (1, 0)]
    assert ss.records[1].occurrences == 5
    assert ss.num_reads == 6


def test_best_returns_lowest_energy():
    ss = SampleSet.build([SampleRecord((0,), 4.0), SampleRecord((1,), -1.0)], "t")
    assert ss.best().assignment == (1,)
    empty = SampleSet.build([], "t", status="infeasible")
    assert empty.best() is None


def test_sampleset_json_round_trip(tmp_path):
    ss = SampleSet.build(
        [SampleRecord((1, 0), 1.5, occurrences=2, objective=1.5, feasible=True)],
        "sa", tau=0.25, seed=7, metadata={"num_reads": 2})
    path = tmp_path / "s.json"
    ss.save(path)
    again = SampleSet.load(path)
    assert again.records == ss.records
    assert again.tau == 0.25
    assert again.seed == 7
    assert again.solver == "sa"
    assert again.metadata["num_reads"] == 2


def test_save_can_blank_tau(tmp_path):
    ss = SampleSet.build([SampleRecord((0,), 0.0)], "t", tau=9.9)
    path = tmp_path / "s.json"
    ss.save(path, include_tau=False)
    with open(path) as fh:
        data = json.load(fh)
    assert data["tau_seconds"] is None


@pytest.mark.parametrize("mutate", [
    lambda d: d.pop("records"),
    lambda d: d["records"].append({"assignment": "01", "energy": "bad",
                                   "occurrences": 1}),
    lambda d: d["records"].append({"assignment": "0", "energy": 0.0,
                                   "occurrences": 1}),
    lambda d: d["records"].append({"assignment": "02", "energy": 0.0,
                                   "occurrences": 1}),
    lambda d: d["records"].append({"assignment": "01", "energy": 0.0,
                                   "occurrences": 0}),
])
def test_malformed_sample_files_rejected(tmp_path, mutate):
    base = SampleSet.build([SampleRecord((0, 1), 1.0)], "x").to_json_dict()
    mutate(base)
    path = tmp_path / "bad.json"
    with open(path, "w") as fh:
        json.dump(base, fh)
    with pytest.raises(SampleFormatError):
        SampleSet.load(path)


def test_import_samples_checks_energies(tmp_path):
    q = _tiny_qubo()
    good = SampleSet.build([SampleRecord((1, 1), 0.0), SampleRecord((1, 0), 1.0)], "ext")
    path = tmp_path / "ok.json"
    good.save(path)
    ss = import_samples(path, qubo=q)
    assert len(ss.records) == 2

    bad = SampleSet.build([SampleRecord((1, 1), 0.5)], "ext")
    bad_path = tmp_path / "bad.json"
    bad.save(bad_path)
    with pytest.raises(EnergyMismatchError) as err:
        import_samples(bad_path, qubo=q)
    (assignment, stated, recomputed), = err.value.mismatches
    assert assignment == (1, 1)
    assert stated == 0.5
    assert recomputed == 0.0
    # without a model the file is taken at face value
    assert import_samples(bad_path).records[0].energy == 0.5


# -- exhaustive oracle ---------------------------------------------------------


def test_brute_force_qubo_orders_by_energy_then_lex():
    ss = brute_force(_tiny_qubo())
    assert [r.assignment for r in ss.records] == [(0, 0), (1, 1), (0, 1), (1, 0)]
    assert [r.energy for r in ss.records] == [0.0, 0.0, 1.0, 1.0]
    assert ss.solver == "oracle"


def test_brute_force_qubo_limit_keeps_lowest():
    ss = brute_force(_tiny_qubo(), limit=2)
    assert [r.assignment for r in ss.records] == [(0, 0), (1, 1)]


def test_brute_force_var_limit():
    q = QuboModel.from_terms(25, {(0, 0): 1.0})
    with pytest.raises(ExhaustiveLimitError):
        brute_force(q)


def test_brute_force_program_keeps_distinct_projections():
    prog = BinaryProgram(
        var_names=("a", "b", "c"),
        objective={"a": 1.0, "b": 2.0, "c": 1.0},
        constraints=(Constraint({"a": 1.0, "b": 1.0}, ">=", 1.0),),
        projection=("a", "b"),
    )
    ss = brute_force(prog)
    # three projected classes, each represented by its cheapest completion
    assert [(r.assignment, r.objective) for r in ss.records] == [
        ((1, 0, 0), 1.0),
        ((0, 1, 0), 2.0),
        ((1, 1, 0), 3.0),
    ]
    assert all(r.feasible for r in ss.records)
    assert all(r.energy == r.objective for r in ss.records)


def test_brute_force_infeasible_program():
    prog = BinaryProgram(
        var_names=("a",), objective={"a": 1.0},
        constraints=(Constraint({"a": 1.0}, "=", 2.0),))
    ss = brute_force(prog)
    assert ss.status == "infeasible"
    assert ss.records == ()


@pytest.mark.parametrize("chunk_bits", [2, 5, 18])
def test_brute_force_chunking_invariant(chunk_bits):
    q = QuboModel.from_terms(
        6, {(i, j): ((i + 2 * j) % 5) - 2.0 for i in range(6) for j in range(i, 6)})
    full = brute_force(q, chunk_bits=18)
    chunked = brute_force(q, chunk_bits=chunk_bits)
    assert full.records == chunked.records


# -- simulated annealing -------------------------------------------------------


def test_sa_deterministic_for_seed():
    q = _tiny_qubo()
    a = simulated_annealing(q, SaParams(num_reads=50, num_sweeps=40, seed=3))
    b = simulated_annealing(q, SaParams(num_reads=50, num_sweeps=40, seed=3))
    c = simulated_annealing(q, SaParams(num_reads=50, num_sweeps=40, seed=4))
    assert a.records == b.records
    assert a.records != c.records


def test_sa_finds_degenerate_minima():
    q = _tiny_qubo()
    ss = simulated_annealing(q, SaParams(num_reads=200, num_sweeps=100, seed=0))
    found = {r.assignment for r in ss.records if r.energy == 0.0}
    assert found == {(0, 0), (1, 1)}
    assert ss.num_reads == 200
    assert ss.metadata["num_sweeps"] == 100


def test_sa_validates_params():
    q = _tiny_qubo()
    with pytest.raises(SolverError):
        simulated_annealing(q, SaParams(num_reads=0))
    with pytest.raises(SolverError):
        simulated_annealing(q, SaParams(beta_hot=5.0, beta_cold=1.0))


def test_sa_empty_model():
    q = QuboModel.from_terms(0, {}, offset=2.0)
    ss = simulated_annealing(q, SaParams(num_reads=5, num_sweeps=5, seed=1))
    assert ss.records == (SampleRecord(assignment=(), energy=2.0, occurrences=5),)


def test_derived_schedule_brackets_coefficients():
    q = QuboModel.from_terms(2, {(0, 0): 4.0, (0, 1): -0.5})
    hot, cold = derived_beta_schedule(q)
    assert hot == pytest.approx(0.1 / 4.5)
    assert cold == pytest.approx(10.0 / 0.5)
    flat = QuboModel.from_terms(2, {})
    assert derived_beta_schedule(flat) == (0.1, 10.0)


# -- branch and bound ----------------------------------------------------------


def _knapsack_like():
    return BinaryProgram(
        var_names=("a", "b", "c", "d"),
        objective={"a": -5.0, "b": -4.0, "c": -3.0, "d": -6.0},
        constraints=(
            Constraint({"a": 2.0, "b": 3.0, "c": 1.0, "d": 4.0}, "<=", 6.0),
            Constraint({"a": 1.0, "c": 1.0}, ">=", 1.0),
        ),
    )


def test_bb_optimal_matches_oracle():
    prog = _knapsack_like()
    bb = branch_and_bound(prog, "optimal")
    oracle = brute_force(prog)
    assert bb.best().objective == oracle.best().objective
    assert bb.best().assignment == oracle.best().assignment
    assert bb.solver == "bb"


def test_bb_tie_breaks_lexicographically():
    prog = BinaryProgram(
        var_names=("a", "b"), objective={"a": 1.0, "b": 1.0},
        constraints=(Constraint({"a": 1.0, "b": 1.0}, "=", 1.0),))
    assert branch_and_bound(prog, "optimal").best().assignment == (0, 1)


def test_bb_enumerate_matches_oracle_everywhere():
    prog = _knapsack_like()
    enum = branch_and_bound(prog, "enumerate_all")
    oracle = brute_force(prog)
    assert [r.assignment for r in enum.records] == [r.assignment for r in oracle.records]
    assert [r.objective for r in enum.records] == [r.objective for r in oracle.records]
    assert enum.solver == "bb-enumerate"


def test_bb_enumerate_respects_projection():
    prog = BinaryProgram(
        var_names=("a", "b", "c"),
        objective={"a": 1.0, "b": 2.0, "c": 1.0},
        constraints=(Constraint({"a": 1.0, "b": 1.0}, ">=", 1.0),),
        projection=("a", "b"),
    )
    enum = branch_and_bound(prog, "enumerate_all")
    assert [(r.assignment, r.objective) for r in enum.records] == [
        ((1, 0, 0), 1.0),
        ((0, 1, 0), 2.0),
        ((1, 1, 0), 3.0),
    ]


def test_bb_pool_ranks_best_k():
    prog = _knapsack_like()
    pool = branch_and_bound(prog, "pool", pool_size=3)
    oracle = brute_force(prog)
    assert [r.objective for r in pool.records] == \
        [r.objective for r in oracle.records[:3]]
    assert pool.solver == "bb-pool"


def test_bb_pool_requires_size():
    with pytest.raises(ValueError):
        branch_and_bound(_knapsack_like(), "pool")
    with pytest.raises(ValueError):
        branch_and_bound(_knapsack_like(), "pool", pool_size=0)


def test_bb_unknown_mode():
    with pytest.raises(ValueError):
        branch_and_bound(_knapsack_like(), "everything")


def test_bb_infeasible_program():
    prog = BinaryProgram(
        var_names=("a",), objective={},
        constraints=(Constraint({"a": 1.0}, "=", 2.0),))
    ss = branch_and_bound(prog, "optimal")
    assert ss.status == "infeasible"
    assert branch_and_bound(prog, "enumerate_all").records == ()


def test_bb_handles_product_constraints():
    prog = BinaryProgram(
        var_names=("x", "y"),
        objective={"x": -1.0, "y": -1.0},
        constraints=(Constraint({}, "=", 0.0, products=(("x", "y", 1.0),)),),
    )
    enum = branch_and_bound(prog, "enumerate_all")
    assert {r.assignment for r in enum.records} == {(0, 0), (0, 1), (1, 0)}


@st.composite
def solvable_programs(draw):
    n = draw(st.integers(min_value=1, max_value=5))
    names = tuple(f"x{i}" for i in range(n))
    coeff = st.integers(min_value=-4, max_value=4)
    objective = {names[i]: float(draw(coeff)) for i in range(n)}
    witness = draw(st.tuples(*([st.integers(0, 1)] * n)))
    cons = []
    for ci in range(draw(st.integers(min_value=0, max_value=3))):
        if n >= 2 and draw(st.booleans()):
            u, v = draw(st.sampled_from(
                [(a, b) for a in range(n) for b in range(n) if a != b]))
            q = float(draw(st.integers(min_value=-2, max_value=2)) or 1)
            lin = {names[u]: float(draw(coeff))}
            lhs = lin[names[u]] * witness[u] + q * witness[u] * witness[v]
            cons.append(Constraint(lin, "=", lhs,
                                   products=((names[u], names[v], q),),
                                   label=f"c{ci}"))
        else:
            lin = {names[i]: float(draw(coeff)) for i in range(n)}
            lhs = sum(lin[names[i]] * witness[i] for i in range(n))
            sense = draw(st.sampled_from(("=", "<=", ">=")))
            slack = draw(st.integers(min_value=0, max_value=2))
            rhs = lhs if sense == "=" else (lhs + slack if sense == "<=" else lhs - slack)
            cons.append(Constraint(lin, sense, float(rhs), label=f"c{ci}"))
    return BinaryProgram(var_names=names, objective=objective,
                         constraints=tuple(cons))


@given(solvable_programs())
@settings(max_examples=100, deadline=None)
def test_bb_agrees_with_oracle_on_random_programs(prog):
    oracle = brute_force(prog)
    bb = branch_and_bound(prog, "optimal")
    assert oracle.records, "witness keeps the program feasible"
    assert bb.best().objective == pytest.approx(oracle.best().objective)
    assert bb.best().assignment == oracle.best().assignment
    enum = branch_and_bound(prog, "enumerate_all")
    assert [r.assignment for r in enum.records] == \
        [r.assignment for r in oracle.records]
