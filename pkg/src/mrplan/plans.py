"""Actions, joint actions and plan documents.

Plan documents are JSON; the exact field names are frozen in
``schemas/plan.schema.json``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources

import jsonschema

from .geometry import Corridor, Pose


class PlanError(ValueError):
    """Plan document is malformed or references unknown entities."""


@dataclass(frozen=True, order=True)
class PartiallyGroundedAction:
    """Pick-and-place without placement/trajectory information.

    A handover is an action whose pick and place robots differ; the two
    robots meet at the scene's handover point for that pair.
    """
    obj: str
    region: str
    pick_robot: str
    place_robot: str
    grasp_pick: float
    grasp_place: float

    @property
    def is_handover(self) -> bool:
        return self.pick_robot != self.place_robot

    @property
    def robots(self) -> tuple[str, ...]:
        if self.is_handover:
            return (self.pick_robot, self.place_robot)
        return (self.pick_robot,)

    def key(self) -> tuple:
        return (self.obj, self.region, self.pick_robot, self.place_robot,
                self.grasp_pick, self.grasp_place)


@dataclass(frozen=True)
class Trajectory:
    waypoints: tuple[Pose, ...]
    corridors: tuple[Corridor, ...]

    def __post_init__(self):
        if len(self.waypoints) < 2:
            raise PlanError("trajectory needs at least 2 waypoints")


@dataclass(frozen=True)
class RobotMove:
    """One robot's slot in a grounded joint action.

    role is 'single', 'pick' (handover pick side) or 'place' (handover
    place side).
    """
    action: PartiallyGroundedAction
    role: str
    placement: Pose
    pick_traj: Trajectory
    place_traj: Trajectory

    def all_corridors(self) -> tuple[Corridor, ...]:
        return self.pick_traj.corridors + self.place_traj.corridors


@dataclass(frozen=True)
class GroundedJointAction:
    """Assignment of every robot to a move or a wait for one time step."""
    moves: dict[str, RobotMove]  # absent robots wait

    def moved_objects(self) -> set[str]:
        return {mv.action.obj for mv in self.moves.values()}

    def placements(self) -> dict[str, Pose]:
        return {mv.action.obj: mv.placement for mv in self.moves.values()}

    def actions(self) -> list[PartiallyGroundedAction]:
        seen = []
        for r in sorted(self.moves):
            a = self.moves[r].action
            if a not in seen:
                seen.append(a)
        return seen


@dataclass(frozen=True)
class Plan:
    steps: tuple[GroundedJointAction, ...]

    @property
    def makespan(self) -> int:
        return len(self.steps)

    @property
    def motion_cost(self) -> int:
        return len(self.all_moved_objects())

    def all_moved_objects(self) -> set[str]:
        out = set()
        for s in self.steps:
            out |= s.moved_objects()
        return out


# ---------------------------------------------------------------------------
# JSON serialization


def _pose_doc(p: Pose) -> dict:
    return {"x": p.x, "y": p.y, "theta": p.theta}


def _traj_doc(t: Trajectory) -> dict:
    return {
        "waypoints": [_pose_doc(w) for w in t.waypoints],
        "corridors": [{"a": list(c.a), "b": list(c.b), "width": c.width}
                      for c in t.corridors],
    }


def _parse_pose(d: dict) -> Pose:
    return Pose(d["x"], d["y"], d.get("theta", 0.0))


def _parse_traj(d: dict) -> Trajectory:
    return Trajectory(
        waypoints=tuple(_parse_pose(w) for w in d["waypoints"]),
        corridors=tuple(Corridor(tuple(c["a"]), tuple(c["b"]), c["width"])
                        for c in d["corridors"]),
    )


def plan_to_doc(plan: Plan, robot_names) -> dict:
    steps = []
    for step in plan.steps:
        recs = []
        for r in sorted(robot_names):
            if r not in step.moves:
                recs.append({"robot": r, "type": "wait"})
                continue
            mv = step.moves[r]
            a = mv.action
            recs.append({
                "robot": r,
                "type": "pick_place",
                "role": mv.role,
                "object": a.obj,
                "region": a.region,
                "pick_robot": a.pick_robot,
                "place_robot": a.place_robot,
                "grasp_pick": a.grasp_pick,
                "grasp_place": a.grasp_place,
                "placement": _pose_doc(mv.placement),
                "pick_traj": _traj_doc(mv.pick_traj),
                "place_traj": _traj_doc(mv.place_traj),
            })
        steps.append(recs)
    return {"steps": steps, "makespan": plan.makespan, "motion_cost": plan.motion_cost}


def dumps_plan(plan: Plan, robot_names) -> str:
    return json.dumps(plan_to_doc(plan, robot_names), indent=2, sort_keys=True) + "\n"


def _load_schema() -> dict:
    text = resources.files("mrplan.schemas").joinpath("plan.schema.json").read_text()
    return json.loads(text)


def loads_plan(text: str) -> Plan:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise PlanError(f"plan parse error at line {e.lineno}: {e.msg}") from e
    try:
        jsonschema.validate(doc, _load_schema())
    except jsonschema.ValidationError as e:
        path = "/".join(str(p) for p in e.absolute_path)
        raise PlanError(f"plan schema error at {path or '<root>'}: {e.message}") from e
    steps = []
    for recs in doc["steps"]:
        moves = {}
        for rec in recs:
            if rec["type"] == "wait":
                continue
            action = PartiallyGroundedAction(
                obj=rec["object"], region=rec["region"],
                pick_robot=rec["pick_robot"], place_robot=rec["place_robot"],
                grasp_pick=rec["grasp_pick"], grasp_place=rec["grasp_place"])
            moves[rec["robot"]] = RobotMove(
                action=action, role=rec["role"],
                placement=_parse_pose(rec["placement"]),
                pick_traj=_parse_traj(rec["pick_traj"]),
                place_traj=_parse_traj(rec["place_traj"]))
        steps.append(GroundedJointAction(moves=moves))
    plan = Plan(steps=tuple(steps))
    if doc["makespan"] != plan.makespan:
        raise PlanError(f"makespan field {doc['makespan']} != number of steps {plan.makespan}")
    if doc["motion_cost"] != plan.motion_cost:
        raise PlanError(
            f"motion_cost field {doc['motion_cost']} != distinct moved objects {plan.motion_cost}")
    return plan


def load_plan(path) -> Plan:
    with open(path) as f:
        return loads_plan(f.read())
