import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from flowqubo import (
    BinaryProgram,
    Constraint,
    DimensionError,
    ExhaustiveLimitError,
    ReformulationError,
    brute_force,
    default_penalty,
    reformulate,
    rosenberg_penalty,
    verify,
)


def _program(objective, constraints, names=None, products=()):
    if names is None:
        names = sorted({n for c in constraints for n in c.variables()}
                       | set(objective))
    return BinaryProgram(var_names=tuple(names), objective=objective,
                         constraints=tuple(constraints),
                         objective_products=tuple(products))


def test_default_penalty_sums_objective_magnitudes():
    prog = _program({"a": 1.0, "b": -2.0},
                    [Constraint({"a": 1.0, "b": 1.0}, "=", 1.0)])
    assert default_penalty(prog) == 4.0
    with_products = BinaryProgram(
        var_names=("a", "b"), objective={"a": 1.0},
        objective_products=(("a", "b", -3.0),))
    assert default_penalty(with_products) == 5.0


def test_equality_penalty_frozen_energies():
    prog = _program({"a": 1.0, "b": 2.0},
                    [Constraint({"a": 1.0, "b": 1.0}, "=", 1.0, label="one")])
    reform = reformulate(prog, rho=10.0)
    assert reform.qubo.num_vars == 2
    expected = {(0, 0): 10.0, (1, 0): 1.0, (0, 1): 2.0, (1, 1): 13.0}
    for bits, energy in expected.items():
        assert reform.qubo.energy(bits) == energy


def test_rho_must_be_positive():
    prog = _program({"a": 1.0}, [Constraint({"a": 1.0}, "=", 1.0)])
    with pytest.raises(ValueError):
        reformulate(prog, rho=0.0)
    with pytest.raises(ValueError):
        reformulate(prog, rho=-3.0)


def test_inequality_slack_layout():
    prog = _program({"y1": 1.0, "y2": 2.0, "y3": 4.0},
                    [Constraint({"y1": 1.0, "y2": 1.0, "y3": 1.0}, ">=", 1.0,
                                label="cover")])
    reform = reformulate(prog)
    assert reform.rho == 8.0
    assert reform.qubo.var_names == ("y1", "y2", "y3", "slack[0.0]", "slack[0.1]")
    group, = reform.slack_groups
    assert group.sense == ">="
    assert group.weights == (1, 2)
    assert group.sign == -1
    # every feasible source point has a slack level with zero penalty
    obj = {"y1": 1.0, "y2": 2.0, "y3": 4.0}
    for bits in itertools.product((0, 1), repeat=3):
        total = sum(bits)
        best = min(reform.qubo.energy(bits + s)
                   for s in itertools.product((0, 1), repeat=2))
        plain = sum(b * obj[n] for b, n in zip(bits, ("y1", "y2", "y3")))
        if total >= 1:
            assert best == plain
        else:
            assert best >= plain + reform.rho


def test_le_constraint_span_counts_negative_coefficients():
    # span = rhs - sum of negative coefficients = 1 - (-2) = 3 -> 2 bits
    prog = _program({"a": 1.0},
                    [Constraint({"a": 1.0, "b": -2.0}, "<=", 1.0)],
                    names=("a", "b"))
    reform = reformulate(prog)
    group, = reform.slack_groups
    assert group.weights == (1, 2)
    assert group.sign == 1


def test_unsatisfiable_span_rejected():
    prog = _program({}, [Constraint({"a": 1.0}, "<=", -1.0)], names=("a",))
    with pytest.raises(ReformulationError):
        reformulate(prog)


def test_non_integer_inequality_rejected():
    prog = _program({}, [Constraint({"a": 0.5}, "<=", 1.0)], names=("a",))
    with pytest.raises(ReformulationError):
        reformulate(prog)
    prog = _program({}, [Constraint({"a": 1.0}, ">=", 0.5)], names=("a",))
    with pytest.raises(ReformulationError):
        reformulate(prog)
    # equalities may carry fractional data, the square handles them exactly
    ok = _program({}, [Constraint({"a": 0.5}, "=", 0.5)], names=("a",))
    assert reformulate(ok).qubo.energy((1,)) == 0.0


@pytest.mark.parametrize("xi,xj,w,value", [
    (0, 0, 0, 0), (0, 1, 0, 0), (1, 0, 0, 0), (1, 1, 0, 1),
    (0, 0, 1, 3), (0, 1, 1, 1), (1, 0, 1, 1), (1, 1, 1, 0),
])
def test_rosenberg_truth_table(xi, xj, w, value):
    assert rosenberg_penalty(xi, xj, w) == value
    assert (value == 0) == (w == xi * xj)


def test_gadget_shares_aux_between_constraints():
    cons = [
        Constraint({"x": 1.0}, "=", 0.0, products=(("x", "y", 1.0),), label="p1"),
        Constraint({"y": -1.0}, "=", 0.0, products=(("y", "x", 1.0),), label="p2"),
    ]
    prog = _program({"x": 1.0, "y": 1.0}, cons, names=("x", "y"))
    reform = reformulate(prog)
    assert list(reform.aux_products) == [(0, 1)]
    assert "aux[x*y]" in reform.qubo.var_names


def test_objective_products_map_to_quadratic_terms():
    # bilinear objective terms are natively quadratic, no auxiliary needed
    prog = BinaryProgram(
        var_names=("u", "v"), objective={"u": 1.0},
        objective_products=(("u", "v", 4.0),))
    reform = reformulate(prog)
    assert reform.qubo.num_vars == 2
    assert reform.qubo.terms[(0, 1)] == 4.0
    for bits in itertools.product((0, 1), repeat=2):
        assert reform.qubo.energy(bits) == prog.objective_value(bits)


def test_constraint_rho_overrides_by_label():
    cons = [
        Constraint({"a": 1.0, "b": 1.0}, "=", 1.0, label="strict"),
        Constraint({"a": 1.0}, "=", 0.0, label="loose"),
    ]
    prog = _program({"a": 1.0, "b": 2.0}, cons)
    reform = reformulate(prog, rho=10.0, constraint_rho={"loose": 2.0})
    assert reform.constraint_weight("strict") == 10.0
    assert reform.constraint_weight("loose") == 2.0
    # (1, 0): violates both rows -> 1 + 10*(0) ... check explicit energies
    assert reform.qubo.energy((1, 0)) == 1.0 + 2.0    # strict ok, loose broken
    assert reform.qubo.energy((0, 0)) == 10.0         # strict broken, loose ok


def test_constraint_rho_unknown_label_rejected():
    prog = _program({"a": 1.0}, [Constraint({"a": 1.0}, "=", 1.0, label="only")])
    with pytest.raises(ReformulationError):
        reformulate(prog, constraint_rho={"missing": 5.0})


def test_decode_strips_slack_and_checks_source_program():
    prog = _program({"y1": 1.0, "y2": 2.0, "y3": 4.0},
                    [Constraint({"y1": 1.0, "y2": 1.0, "y3": 1.0}, ">=", 1.0)])
    reform = reformulate(prog)
    d = reform.decode((1, 0, 1, 0, 0))
    assert d.assignment == (1, 0, 1)
    assert d.feasible
    assert d.objective == 5.0
    bad = reform.decode((0, 0, 0, 1, 0))
    assert not bad.feasible
    assert bad.violations
    with pytest.raises(DimensionError):
        reform.decode((1, 0, 1))


def test_decode_feasible_count_matches_source():
    prog = _program({"y1": 1.0, "y2": 2.0, "y3": 4.0},
                    [Constraint({"y1": 1.0, "y2": 1.0, "y3": 1.0}, ">=", 1.0)])
    reform = reformulate(prog)
    feasible = {
        reform.decode(bits).assignment
        for bits in itertools.product((0, 1), repeat=reform.qubo.num_vars)
        if reform.decode(bits).feasible
    }
    assert len(feasible) == 7


def test_verify_passes_on_small_models():
    prog = _program({"a": 1.0, "b": 2.0},
                    [Constraint({"a": 1.0, "b": 1.0}, "=", 1.0)])
    report = verify(reformulate(prog, rho=10.0))
    assert report.passed
    assert report.num_source_assignments == 4
    assert report.feasible_count == 2
    assert report.feasible_optimum == 1.0
    assert report.qubo_minimum == 1.0
    assert report.qubo_argmin[:2] == (1, 0)
    assert report.argmin_feasible
    assert report.argmin_objective == 1.0
    assert report.exactness_failures == ()
    assert report.dominance_failures == ()


def test_verify_detects_weak_penalty():
    # with rho below the objective pull, the infeasible point wins
    prog = _program({"a": -3.0}, [Constraint({"a": 1.0}, "=", 0.0)], names=("a",))
    report = verify(reformulate(prog, rho=2.0))
    assert not report.passed
    assert not report.argmin_feasible
    assert report.qubo_minimum == -1.0
    assert report.dominance_failures
    bits, energy = report.dominance_failures[0]
    assert bits == (1,)
    assert energy == -1.0


def test_verify_respects_scan_limits():
    names = tuple(f"v{i}" for i in range(4))
    prog = _program({n: 1.0 for n in names},
                    [Constraint({names[0]: 1.0}, "=", 1.0)], names=names)
    reform = reformulate(prog)
    with pytest.raises(ExhaustiveLimitError):
        verify(reform, source_limit=3)
    gadget = _program(
        {"x": 1.0}, [Constraint({"x": 1.0}, "=", 0.0, products=(("x", "y", 1.0),))],
        names=("x", "y"))
    with pytest.raises(ExhaustiveLimitError):
        verify(reformulate(gadget), group_limit=0)


def test_sidecar_shape():
    prog = _program({"y1": 1.0, "y2": 2.0, "y3": 4.0},
                    [Constraint({"y1": 1.0, "y2": 1.0, "y3": 1.0}, ">=", 1.0,
                                label="cover")])
    side = reformulate(prog).sidecar_json_dict()
    assert side["num_source_vars"] == 3
    assert side["num_qubo_vars"] == 5
    assert side["rho"] == 8.0
    assert side["constraint_rho"] is None
    assert side["var_map"] == {"y1": 0, "y2": 1, "y3": 2}
    assert side["aux_products"] == []
    group, = side["slack_groups"]
    assert group == {"constraint_index": 0, "label": "cover", "sense": ">=",
                     "indices": [3, 4], "weights": [1, 2], "sign": -1}


@st.composite
def random_programs(draw):
    n = draw(st.integers(min_value=1, max_value=4))
    names = tuple(f"x{i}" for i in range(n))
    coeff = st.integers(min_value=-3, max_value=3)
    objective = {names[i]: float(draw(coeff)) for i in range(n)}
    m = draw(st.integers(min_value=0, max_value=2))
    witness = draw(st.tuples(*([st.integers(0, 1)] * n)))
    cons = []
    for ci in range(m):
        lin = {names[i]: float(draw(coeff)) for i in range(n)}
        lhs = sum(lin[names[i]] * witness[i] for i in range(n))
        sense = draw(st.sampled_from(("=", "<=", ">=")))
        margin = draw(st.integers(min_value=0, max_value=2))
        rhs = lhs if sense == "=" else (lhs + margin if sense == "<=" else lhs - margin)
        cons.append(Constraint(lin, sense, float(rhs), label=f"c{ci}"))
    return BinaryProgram(var_names=names, objective=objective,
                         constraints=tuple(cons))


@given(random_programs())
@settings(max_examples=60, deadline=None)
def test_reformulation_recovers_planted_optimum(prog):
    reform = reformulate(prog)
    oracle = brute_force(prog)
    assert oracle.records, "witness construction keeps the program feasible"
    best = oracle.best()
    qubo_oracle = brute_force(reform.qubo)
    decoded = reform.decode(qubo_oracle.best().assignment)
    assert decoded.feasible
    assert decoded.objective == pytest.approx(best.objective, abs=1e-9)
    assert qubo_oracle.best().energy == pytest.approx(best.objective, abs=1e-9)
