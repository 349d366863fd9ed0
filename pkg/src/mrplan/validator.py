"""Independent plan validity checker.

Replays a plan step by step on a copy of the scene and checks:
  (i)   all same-step swept corridors are pairwise collision-free across
        robots and collision-free w.r.t. fixed obstacles, the current poses
        of all non-manipulated objects, and the other robots' base points;
  (ii)  placements lie entirely inside their target regions, are
        collision-free, and pick/place endpoints are within reach;
  (iii) handover corridors of both partners meet at the handover point and
        do not overlap outside the handover neighbourhood;
plus monotonicity (each object moved at most once) and goal satisfaction.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .geometry import collides, shape_inside_rect
from .motion import points_close
from .plans import GroundedJointAction, Plan, PlanError, RobotMove
from .scene import Scene

CONDITIONS = ("condition_i", "condition_ii", "condition_iii", "monotonicity", "goal")


@dataclass(frozen=True)
class Violation:
    code: str
    step: int | None
    message: str


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def condition_results(self) -> dict[str, bool]:
        failed = {v.code for v in self.violations}
        return {c: c not in failed for c in CONDITIONS}

    def add(self, code: str, step: int | None, message: str):
        self.violations.append(Violation(code, step, message))

    def to_doc(self) -> dict:
        return {
            "ok": self.ok,
            "conditions": self.condition_results(),
            "violations": [
                {"code": v.code, "step": v.step, "message": v.message}
                for v in self.violations
            ],
        }


def _check_structure(scene: Scene, plan: Plan):
    for j, step in enumerate(plan.steps, start=1):
        for robot, mv in step.moves.items():
            a = mv.action
            if robot not in scene.robots:
                raise PlanError(f"step {j}: unknown robot {robot!r}")
            if a.obj not in scene.movables:
                raise PlanError(f"step {j}: unknown object {a.obj!r}")
            if a.region not in scene.regions:
                raise PlanError(f"step {j}: unknown region {a.region!r}")
            if a.pick_robot not in scene.robots or a.place_robot not in scene.robots:
                raise PlanError(f"step {j}: unknown robot in action for {a.obj}")
            if robot not in a.robots:
                raise PlanError(f"step {j}: robot {robot} holds an action it is not part of")
        # a handover must occupy both of its robots' slots
        for robot, mv in step.moves.items():
            a = mv.action
            if a.is_handover:
                other = a.place_robot if robot == a.pick_robot else a.pick_robot
                partner = step.moves.get(other)
                if partner is None or partner.action != a:
                    raise PlanError(
                        f"step {j}: handover of {a.obj} does not occupy both robot slots")


def _partner_pairs(step: GroundedJointAction) -> set[frozenset]:
    pairs = set()
    for robot, mv in step.moves.items():
        if mv.action.is_handover:
            pairs.add(frozenset((mv.action.pick_robot, mv.action.place_robot)))
    return pairs


def _trim_for_handover(scene: Scene, mv: RobotMove):
    """Corridors of a handover participant, trimmed around the handover point."""
    a = mv.action
    h = scene.handover_point(a.pick_robot, a.place_robot)
    radius = scene.handover_radius(a.pick_robot, a.place_robot)
    out = []
    for cor in mv.all_corridors():
        if points_close(cor.a, h) or points_close(cor.b, h):
            end = cor.a if points_close(cor.a, h) else cor.b
            trimmed = cor.trimmed(end, radius + cor.half_width)
            if trimmed is not None:
                out.append(trimmed)
        else:
            out.append(cor)
    return out


def validate_plan(scene: Scene, plan: Plan) -> ValidationReport:
    _check_structure(scene, plan)
    report = ValidationReport()
    poses = {name: m.pose for name, m in scene.movables.items()}
    moved_before: set[str] = set()

    for j, step in enumerate(plan.steps, start=1):
        manipulated = step.moved_objects()
        # monotonicity
        for obj in sorted(manipulated):
            if obj in moved_before:
                report.add("monotonicity", j, f"object {obj} moved more than once")

        partner_pairs = _partner_pairs(step)
        robots = sorted(step.moves)

        # (i) corridors vs static world
        for robot in robots:
            mv = step.moves[robot]
            for cor in mv.all_corridors():
                for k, (shape, pose) in enumerate(scene.fixed):
                    if collides(cor, (shape, pose)):
                        report.add("condition_i", j,
                                   f"corridor of {robot} hits fixed obstacle {k}")
                for name in sorted(scene.movables):
                    if name in manipulated:
                        continue
                    m = scene.movables[name]
                    if collides(cor, (m.shape, poses[name])):
                        report.add("condition_i", j,
                                   f"corridor of {robot} hits object {name}")
                for other in sorted(scene.robots):
                    if other == robot:
                        continue
                    if cor.contains_point(scene.robots[other].base):
                        report.add("condition_i", j,
                                   f"corridor of {robot} sweeps over base of {other}")

        # (i)/(iii) cross-robot corridor overlap
        for i1 in range(len(robots)):
            for i2 in range(i1 + 1, len(robots)):
                r1, r2 = robots[i1], robots[i2]
                pair = frozenset((r1, r2))
                if pair in partner_pairs:
                    cs1 = _trim_for_handover(scene, step.moves[r1])
                    cs2 = _trim_for_handover(scene, step.moves[r2])
                    code = "condition_iii"
                    msg = (f"handover corridors of {r1} and {r2} overlap outside "
                           f"the handover neighbourhood")
                else:
                    cs1 = step.moves[r1].all_corridors()
                    cs2 = step.moves[r2].all_corridors()
                    code = "condition_i"
                    msg = f"corridors of {r1} and {r2} collide"
                if any(collides(c1, c2) for c1 in cs1 for c2 in cs2):
                    report.add(code, j, msg)

        # (ii) placements
        placements = []
        for robot in robots:
            mv = step.moves[robot]
            a = mv.action
            if a.is_handover and robot != a.place_robot:
                continue
            placements.append((a, mv))
        for a, mv in placements:
            shape = scene.movables[a.obj].shape
            region = scene.regions[a.region]
            if not shape_inside_rect(shape, mv.placement, region.rect):
                report.add("condition_ii", j,
                           f"placement of {a.obj} is not inside region {a.region}")
            for k, (fshape, fpose) in enumerate(scene.fixed):
                if collides((shape, mv.placement), (fshape, fpose)):
                    report.add("condition_ii", j,
                               f"placement of {a.obj} hits fixed obstacle {k}")
            for name in sorted(scene.movables):
                if name in manipulated:
                    continue
                m = scene.movables[name]
                if collides((shape, mv.placement), (m.shape, poses[name])):
                    report.add("condition_ii", j,
                               f"placement of {a.obj} hits object {name}")
            if not scene.robots[a.place_robot].in_reach(mv.placement.xy):
                report.add("condition_ii", j,
                           f"placement of {a.obj} is out of reach of {a.place_robot}")
            gp = scene.grasp_point(a.obj, a.grasp_pick, pose=poses[a.obj])
            if not scene.robots[a.pick_robot].in_reach(gp):
                report.add("condition_ii", j,
                           f"grasp point of {a.obj} is out of reach of {a.pick_robot}")
        for i1 in range(len(placements)):
            for i2 in range(i1 + 1, len(placements)):
                a1, mv1 = placements[i1]
                a2, mv2 = placements[i2]
                s1 = scene.movables[a1.obj].shape
                s2 = scene.movables[a2.obj].shape
                if collides((s1, mv1.placement), (s2, mv2.placement)):
                    report.add("condition_ii", j,
                               f"placements of {a1.obj} and {a2.obj} overlap")

        # (iii) handover geometry
        seen_handover = set()
        for robot in robots:
            a = step.moves[robot].action
            if not a.is_handover or a in seen_handover:
                continue
            seen_handover.add(a)
            h = scene.handover_point(a.pick_robot, a.place_robot)
            carry = step.moves[a.pick_robot].place_traj.corridors[-1]
            reach = step.moves[a.place_robot].pick_traj.corridors[-1]
            if not (points_close(carry.a, h) or points_close(carry.b, h)):
                report.add("condition_iii", j,
                           f"carry corridor for {a.obj} does not reach the handover point")
            if not (points_close(reach.a, h) or points_close(reach.b, h)):
                report.add("condition_iii", j,
                           f"receive corridor for {a.obj} does not reach the handover point")
            for rname in (a.pick_robot, a.place_robot):
                if not scene.robots[rname].in_reach(h):
                    report.add("condition_iii", j,
                               f"handover point for {a.obj} is out of reach of {rname}")

        for robot in robots:
            mv = step.moves[robot]
            poses[mv.action.obj] = mv.placement
        moved_before |= manipulated

    if not scene.goal_satisfied(poses):
        unmet = [
            (obj, re) for obj, re in scene.goal
            if not shape_inside_rect(scene.movables[obj].shape, poses[obj],
                                     scene.regions[re].rect)
        ]
        for obj, re in unmet:
            report.add("goal", None, f"object {obj} does not end inside region {re}")
    return report
