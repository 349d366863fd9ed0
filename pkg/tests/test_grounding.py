"""Reverse grounding of task skeletons: full, partial and failed outcomes."""
import random

import pytest

from mrplan.grounding import (Failure, Full, GroundingConfig, GroundingContext,
                              Partial, context_from_steps, find_placements,
                              find_trajectories, ground, volumes_of)
from mrplan.mip import TaskSkeleton
from mrplan.plans import PartiallyGroundedAction, Plan
from mrplan.scene import load_scene
from mrplan.validator import validate_plan

from conftest import scenario


def act(obj, region, pick_robot="R1", place_robot=None):
    return PartiallyGroundedAction(obj=obj, region=region, pick_robot=pick_robot,
                                   place_robot=place_robot or pick_robot,
                                   grasp_pick=0.0, grasp_place=0.0)


def skeleton(*steps):
    moved = set()
    out = []
    for actions in steps:
        robots = {}
        for a in actions:
            for r in a.robots:
                robots[r] = a
            moved.add(a.obj)
        out.append(robots)
    return TaskSkeleton(steps=tuple(out), moved_objects=frozenset(moved))


def test_full_grounding_of_single_step_skeleton():
    scene = load_scene(scenario("unobstructed"))
    sk = skeleton([act("M1", "goal_zone")])
    res = ground(sk, GroundingContext(), scene, random.Random(0))
    assert isinstance(res, Full)
    assert len(res.steps) == 1
    report = validate_plan(scene, Plan(steps=res.steps))
    assert report.ok, report.to_doc()


def test_partial_outcome_reports_exact_conflict_set():
    # M2 blocks every transfer corridor from M1's pose into the goal region,
    # but no pick corridor or placement, so only grounding can discover it
    scene = load_scene(scenario("conflict_partial"))
    sk = skeleton([act("M1", "goal_zone")])
    res = ground(sk, GroundingContext(), scene, random.Random(0))
    assert isinstance(res, Partial)
    assert res.conflicts == frozenset({"M2"})
    assert len(res.steps) == 1


def test_failure_when_goal_region_is_covered_by_fixed_obstacle():
    scene = load_scene(scenario("unsat_fixed_blocked"))
    sk = skeleton([act("M1", "goal_zone")])
    res = ground(sk, GroundingContext(), scene, random.Random(0))
    assert isinstance(res, Failure)
    assert "step 1" in res.reason


def test_removing_an_already_moved_object_is_rejected():
    scene = load_scene(scenario("unobstructed"))
    sk = skeleton([act("M1", "goal_zone")])
    done = ground(sk, GroundingContext(), scene, random.Random(0))
    ctx = context_from_steps(done.steps, scene)
    assert ctx.m_fut == frozenset({"M1"})
    with pytest.raises(ValueError, match="already moved"):
        ground(sk, ctx, scene, random.Random(1))


def test_grounding_is_deterministic_in_the_rng():
    scene = load_scene(scenario("constrained_relocation"))
    sk = skeleton([act("M2", "strip")], [act("M1", "goal_zone")])
    r1 = ground(sk, GroundingContext(), scene, random.Random(5))
    r2 = ground(sk, GroundingContext(), scene, random.Random(5))
    assert isinstance(r1, Full) and isinstance(r2, Full)
    p1 = [s.placements() for s in r1.steps]
    p2 = [s.placements() for s in r2.steps]
    assert p1 == p2
    r3 = ground(sk, GroundingContext(), scene, random.Random(6))
    assert isinstance(r3, Full)  # other seeds ground too, possibly elsewhere


def test_grounded_multi_step_skeleton_validates():
    # reverse order: M1's move is grounded first; M2 (grounded second) must
    # vacate M1's pick sweep even though it blocks it only at its start pose
    scene = load_scene(scenario("constrained_relocation"))
    sk = skeleton([act("M2", "strip")], [act("M1", "goal_zone")])
    res = ground(sk, GroundingContext(), scene, random.Random(0))
    assert isinstance(res, Full)
    report = validate_plan(scene, Plan(steps=res.steps))
    assert report.ok, report.to_doc()


def test_find_placements_joint_consistency_pigeonhole():
    # region_a holds one disc but never two: centers would need to be 0.1
    # apart inside a 0.2-wide admissible square minus reach filtering
    scene = load_scene(scenario("parallel_goals"))
    a1 = act("M1", "region_a", "R1")
    a2 = act("M2", "region_a", "R1")
    rng = random.Random(0)
    one = find_placements([a1], [], scene, rng)
    assert one is not None
    both = find_placements([a1, a2], [(scene.movables["M1"].shape, one["M1"])],
                           scene, rng)
    # M1's chosen pose is forbidden ground for M2-and-M1 retry; joint samples
    # must still avoid each other
    if both is not None:
        import math
        d = math.hypot(both["M1"].x - both["M2"].x, both["M1"].y - both["M2"].y)
        assert d >= 0.1 - 1e-9


def test_find_trajectories_rejects_blocked_corridor():
    scene = load_scene(scenario("constrained_relocation"))
    a = act("M1", "goal_zone")
    placements = find_placements([a], [], scene, random.Random(0))
    assert placements is not None
    m2 = scene.movables["M2"]
    blocked = find_trajectories([a], placements,
                                list(scene.fixed) + [(m2.shape, m2.pose)], scene)
    assert blocked is None  # pick sweep passes straight through M2
    clear = find_trajectories([a], placements, list(scene.fixed), scene)
    assert clear is not None


def test_partial_suffix_contains_future_context():
    scene = load_scene(scenario("conflict_partial"))
    sk = skeleton([act("M1", "goal_zone")])
    res = ground(sk, GroundingContext(), scene, random.Random(0))
    assert isinstance(res, Partial)
    ctx = context_from_steps(res.steps, scene)
    assert ctx.m_fut == frozenset({"M1"})
    assert len(volumes_of(res.steps)) >= 2  # pick + transfer corridors


def test_partial_conflicts_are_actionable():
    # grounding the conflict object first makes the original skeleton work
    scene = load_scene(scenario("conflict_partial"))
    first = ground(skeleton([act("M1", "goal_zone")]), GroundingContext(),
                   scene, random.Random(0))
    assert isinstance(first, Partial)
    ctx = context_from_steps(first.steps, scene)
    fixer = skeleton([act("M2", "work")])
    res = ground(fixer, ctx, scene, random.Random(0),
                 GroundingConfig(step_restarts=20))
    assert isinstance(res, Full)
    report = validate_plan(scene, Plan(steps=res.steps))
    assert report.ok, report.to_doc()
