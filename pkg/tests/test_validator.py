"""Plan validity checker: replay, per-condition violations, round trips."""
import random

import pytest

from mrplan.geometry import Pose
from mrplan.motion import build_moves
from mrplan.plans import (GroundedJointAction, PartiallyGroundedAction, Plan,
                          PlanError, dumps_plan, loads_plan)
from mrplan.scene import load_scene
from mrplan.search import PlannerConfig, plan as run_planner
from mrplan.validator import validate_plan

from conftest import scenario


def single_action(obj="M1", region="goal_zone", robot="R1"):
    return PartiallyGroundedAction(obj=obj, region=region, pick_robot=robot,
                                   place_robot=robot, grasp_pick=0.0,
                                   grasp_place=0.0)


def step_for(scene, action, placement, obj_pose=None):
    pose = obj_pose if obj_pose is not None else scene.movables[action.obj].pose
    return GroundedJointAction(moves=build_moves(scene, action, pose, placement))


def test_empty_plan_valid_when_goal_already_met():
    scene = load_scene(scenario("satisfied_at_start"))
    report = validate_plan(scene, Plan(steps=()))
    assert report.ok
    assert all(report.condition_results().values())


def test_empty_plan_fails_goal_when_goal_unmet():
    scene = load_scene(scenario("unobstructed"))
    report = validate_plan(scene, Plan(steps=()))
    assert not report.ok
    assert report.condition_results()["goal"] is False
    assert [v.code for v in report.violations] == ["goal"]


def test_valid_single_step_plan():
    scene = load_scene(scenario("unobstructed"))
    step = step_for(scene, single_action(), Pose(0.25, 0.55))
    report = validate_plan(scene, Plan(steps=(step,)))
    assert report.ok, report.to_doc()


def test_placement_outside_region_is_condition_ii():
    scene = load_scene(scenario("unobstructed"))
    step = step_for(scene, single_action(), Pose(0.6, 0.55))  # right of goal_zone
    report = validate_plan(scene, Plan(steps=(step,)))
    assert report.condition_results()["condition_ii"] is False


def test_object_moved_twice_is_monotonicity_violation():
    scene = load_scene(scenario("unobstructed"))
    s1 = step_for(scene, single_action(), Pose(0.25, 0.55))
    s2 = step_for(scene, single_action(), Pose(0.3, 0.5), obj_pose=Pose(0.25, 0.55))
    report = validate_plan(scene, Plan(steps=(s1, s2)))
    assert report.condition_results()["monotonicity"] is False


def test_corridor_through_obstacle_is_condition_i():
    scene = load_scene(scenario("constrained_relocation"))
    # move M1 (at 0.6, 0) directly: the pick corridor from R1's base passes
    # straight through M2 at (0.3, 0)
    step = step_for(scene, single_action(obj="M1"), Pose(0.3, 0.6))
    report = validate_plan(scene, Plan(steps=(step,)))
    assert report.condition_results()["condition_i"] is False
    assert any("M2" in v.message for v in report.violations
               if v.code == "condition_i")


def test_coincident_placements_are_condition_ii():
    scene = load_scene(scenario("parallel_goals"))
    a1 = PartiallyGroundedAction(obj="M1", region="region_a", pick_robot="R1",
                                 place_robot="R1", grasp_pick=0.0, grasp_place=0.0)
    a2 = PartiallyGroundedAction(obj="M2", region="region_a", pick_robot="R2",
                                 place_robot="R2", grasp_pick=0.0, grasp_place=0.0)
    target = Pose(0.25, -0.35)
    moves = {**build_moves(scene, a1, scene.movables["M1"].pose, target),
             **build_moves(scene, a2, scene.movables["M2"].pose, target)}
    report = validate_plan(scene, Plan(steps=(GroundedJointAction(moves=moves),)))
    assert report.condition_results()["condition_ii"] is False
    assert any("overlap" in v.message for v in report.violations
               if v.code == "condition_ii")


def test_handover_step_passes_condition_iii():
    scene = load_scene(scenario("handover_required"))
    result = run_planner(scene, PlannerConfig(seed=0))
    assert isinstance(result, Plan)
    assert any(mv.action.is_handover for step in result.steps
               for mv in step.moves.values())
    report = validate_plan(scene, result)
    assert report.ok, report.to_doc()


def test_handover_missing_partner_slot_is_structural_error():
    scene = load_scene(scenario("handover_required"))
    a = PartiallyGroundedAction(obj="M1", region="goal_zone", pick_robot="R1",
                                place_robot="R2", grasp_pick=0.0, grasp_place=0.0)
    moves = build_moves(scene, a, scene.movables["M1"].pose, Pose(1.6, 0.7))
    del moves["R2"]
    with pytest.raises(PlanError, match="both robot slots"):
        validate_plan(scene, Plan(steps=(GroundedJointAction(moves=moves),)))


def test_unknown_entity_references_are_structural_errors():
    scene = load_scene(scenario("unobstructed"))
    step = step_for(scene, single_action(region="goal_zone"), Pose(0.25, 0.55))
    bad = GroundedJointAction(moves={"R9": step.moves["R1"]})
    with pytest.raises(PlanError, match="unknown robot"):
        validate_plan(scene, Plan(steps=(bad,)))
    a = PartiallyGroundedAction(obj="M1", region="nowhere", pick_robot="R1",
                                place_robot="R1", grasp_pick=0.0, grasp_place=0.0)
    bad_region = GroundedJointAction(moves=build_moves(
        scene, a, scene.movables["M1"].pose, Pose(0.25, 0.55)))
    with pytest.raises(PlanError, match="unknown region"):
        validate_plan(scene, Plan(steps=(bad_region,)))


def test_plan_serialization_round_trip_preserves_validity():
    for name in ("unobstructed", "pick_chain", "parallel_goals"):
        scene = load_scene(scenario(name))
        result = run_planner(scene, PlannerConfig(seed=1))
        assert isinstance(result, Plan)
        text = dumps_plan(result, scene.robots)
        again = loads_plan(text)
        assert dumps_plan(again, scene.robots) == text
        assert validate_plan(scene, again).ok
        assert again.makespan == result.makespan
        assert again.motion_cost == result.motion_cost


def test_validator_is_pure():
    scene = load_scene(scenario("unobstructed"))
    before = scene.movables["M1"].pose
    step = step_for(scene, single_action(), Pose(0.25, 0.55))
    validate_plan(scene, Plan(steps=(step,)))
    assert scene.movables["M1"].pose == before
