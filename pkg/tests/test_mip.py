"""0-1 model compilation and the exact branch-and-bound solver."""
import random

import pytest

from mrplan.mip import (BudgetExceeded, ConsistencyError, MipSolution,
                        compile_model, enumerate_skeletons, extract_skeleton,
                        solve)
from mrplan.plans import PartiallyGroundedAction
from mrplan.taskgraph import CMTG

from oracle_mip import (OracleVars, oracle_feasible, oracle_minimum,
                        random_cmtg)


def act(obj, robot="R1", place_robot=None, region="re"):
    return PartiallyGroundedAction(obj=obj, region=region, pick_robot=robot,
                                   place_robot=place_robot or robot,
                                   grasp_pick=0.0, grasp_place=0.0)


def make_graph(actions, targets, pick_blocks=(), place_blocks=()):
    g = CMTG(targets=frozenset(targets))
    for a in actions:
        g.object_nodes.add(a.obj)
        g.action_nodes.add(a)
        g.action_edges.add((a.obj, a))
    by_obj = {a.obj: a for a in actions}
    for blocked, blocker in pick_blocks:
        g.block_pick_edges.add((by_obj[blocked], blocker))
        g.object_nodes.add(blocker)
    for blocked, blocker in place_blocks:
        g.block_place_edges.add((by_obj[blocked], blocker))
        g.object_nodes.add(blocker)
    return g


def rows_satisfied(model, vector):
    for con in model.constraints:
        lhs = sum(c * vector[v] for v, c in con.coeffs)
        ok = (lhs <= con.rhs if con.sense == "<="
              else lhs >= con.rhs if con.sense == ">=" else lhs == con.rhs)
        if not ok:
            return False
    return True


def test_single_action_single_step():
    g = make_graph([act("M1")], ["M1"])
    model = compile_model(g, 1)
    res = solve(model)
    assert isinstance(res, MipSolution)
    assert res.objective_value == 1
    sk = extract_skeleton(res, g, 1, model=model)
    assert sk.makespan == 1
    assert sk.moved_objects == frozenset({"M1"})
    assert sk.steps[0]["R1"] == act("M1")


def test_variable_count_and_lp_dump():
    g = make_graph([act("M1"), act("M2")], ["M1"], pick_blocks=[("M1", "M2")])
    model = compile_model(g, 3)
    assert model.num_vars == 3 * (2 + 1)
    lp = model.dumps_lp()
    assert lp.startswith("Minimize")
    assert "Subject To" in lp and "Binary" in lp and lp.endswith("End\n")
    with pytest.raises(ValueError):
        compile_model(g, 0)


def test_pick_block_needs_strictly_earlier_step():
    g = make_graph([act("M1"), act("M2")], ["M1"], pick_blocks=[("M1", "M2")])
    assert solve(compile_model(g, 1)) == "infeasible"
    res = solve(compile_model(g, 2))
    sk = extract_skeleton(res, g, 2)
    assert sk.steps[0]["R1"] == act("M2")
    assert sk.steps[1]["R1"] == act("M1")


def test_place_block_allows_same_step_on_different_robots():
    a1, a2 = act("M1", robot="R1"), act("M2", robot="R2")
    g = make_graph([a1, a2], ["M1"], place_blocks=[("M1", "M2")])
    res = solve(compile_model(g, 1))
    assert isinstance(res, MipSolution)
    sk = extract_skeleton(res, g, 1)
    assert sk.makespan == 1 and sk.moved_objects == frozenset({"M1", "M2"})


def test_shared_robot_capacity_forces_two_steps():
    a1, a2 = act("M1"), act("M2")
    g = make_graph([a1, a2], ["M1", "M2"])
    assert solve(compile_model(g, 1)) == "infeasible"
    res = solve(compile_model(g, 2))
    assert res.objective_value == 2


def test_handover_occupies_both_robots():
    h = act("M1", robot="R1", place_robot="R2")
    a2 = act("M2", robot="R2")
    g = make_graph([h, a2], ["M1", "M2"])
    # R2 is needed by both actions, so one joint step is impossible
    assert solve(compile_model(g, 1)) == "infeasible"
    res = solve(compile_model(g, 2))
    sk = extract_skeleton(res, g, 2)
    handover_step = next(s for s in sk.steps if h in s.values())
    assert handover_step["R1"] == h and handover_step["R2"] == h


def test_big_m_precedence_row_expansion():
    g = make_graph([act("M1"), act("M2")], ["M1"], pick_blocks=[("M1", "M2")])
    T = 2
    model = compile_model(g, T)
    row = next(c for c in model.constraints if c.label == "prec_pick_b0")
    # sum_t X[t,blk] - sum_t X[t, M2's action edge] - (T+1) X[1,blk] >= 1-(T+1)
    m2_edge = next(i for i, (m, _) in enumerate(model.action_edges) if m == "M2")
    expect = {}
    for t in (1, 2):
        expect[model.blk_var[(t, 0)]] = expect.get(model.blk_var[(t, 0)], 0) + 1
        expect[model.act_var[(t, m2_edge)]] = -1
    expect[model.blk_var[(1, 0)]] += -(T + 1)
    assert dict(row.coeffs) == expect
    assert row.sense == ">=" and row.rhs == 1 - (T + 1)


def test_non_target_gating():
    # M2 is not a target and blocks nothing, so its action can never run
    g = make_graph([act("M1"), act("M2", robot="R2")], ["M1"])
    res = solve(compile_model(g, 1))
    assert res.objective_value == 1
    sk = extract_skeleton(res, g, 1)
    assert sk.moved_objects == frozenset({"M1"})
    # and a horizon that would need M2 to fill a step is infeasible
    assert solve(compile_model(g, 2)) == "infeasible"


def test_budget_zero_raises():
    g = make_graph([act("M1")], ["M1"])
    with pytest.raises(BudgetExceeded):
        solve(compile_model(g, 1), budget=0)


def test_extract_rejects_non_monotone_assignment():
    g = make_graph([act("M1")], ["M1"])
    model = compile_model(g, 2)
    bad = [0] * model.num_vars
    bad[model.act_var[(2, 0)]] = 1  # X1=0 but X2=1
    with pytest.raises(ConsistencyError):
        extract_skeleton(MipSolution(tuple(bad), 0), g, 2, model=model)


def test_enumerate_skeletons_ordering_and_dedup():
    g = make_graph([act("M1"), act("M2"), act("M3")], ["M1"],
                   pick_blocks=[("M1", "M2"), ("M2", "M3")])
    sks = enumerate_skeletons(g)
    assert sks, "chain should be solvable at T=3"
    first = sks[0]
    assert first.makespan == 3
    assert [s["R1"].obj for s in first.steps] == ["M3", "M2", "M1"]
    keys = [sk.structure_key() for sk in sks]
    assert len(keys) == len(set(keys))
    assert enumerate_skeletons(CMTG(targets=frozenset())) == []
    assert enumerate_skeletons(g, K_max=1) == sks[:1]


def test_enumerate_respects_increasing_horizon():
    a1 = act("M1", robot="R1")
    a1b = act("M1", robot="R2")
    g = make_graph([a1, a1b], ["M1"])
    sks = enumerate_skeletons(g)
    assert len(sks) == 2
    assert all(sk.makespan == 1 for sk in sks)
    assert {sk.steps[0]["R1"] or sk.steps[0]["R2"] for sk in sks} == {a1, a1b}


def test_solver_matches_oracle_on_random_graphs():
    rng = random.Random(42)
    for _ in range(20):
        g = random_cmtg(rng, max_objects=4, max_actions=5)
        T = rng.randint(1, 3)
        model = compile_model(g, T)
        res = solve(model)
        expect = oracle_minimum(g, T)
        if res == "infeasible":
            assert expect is None
        else:
            assert res.objective_value == expect
            assert rows_satisfied(model, res.assignment)
            v = OracleVars.from_vector(g, T, res.assignment)
            assert oracle_feasible(v)


def test_compiled_rows_match_oracle_on_random_vectors():
    rng = random.Random(7)
    for _ in range(15):
        g = random_cmtg(rng, max_objects=3, max_actions=4)
        T = rng.randint(1, 2)
        model = compile_model(g, T)
        for _ in range(40):
            vec = tuple(rng.randint(0, 1) for _ in range(model.num_vars))
            v = OracleVars.from_vector(g, T, vec)
            assert rows_satisfied(model, vec) == oracle_feasible(v)
