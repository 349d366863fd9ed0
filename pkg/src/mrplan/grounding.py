"""Reverse grounding of task skeletons.

A skeleton is grounded from its last step backwards. Already-grounded future
joint actions constrain the present: newly sampled placements must avoid the
volumes the future occupies, and trajectories must avoid the objects the
future still expects at their initial poses. When the strict pass fails, the
collision constraints against the not-planned-to-move objects are relaxed;
a relaxed success stops grounding and returns the grounded suffix plus the
conflict set of objects that a caller must plan to relocate first.
"""
from __future__ import annotations

from dataclasses import dataclass

from .geometry import Pose, collides
from .mip import TaskSkeleton
from .motion import build_moves, endpoints_reachable
from .plans import GroundedJointAction, PartiallyGroundedAction, RobotMove
from .scene import Scene, sample_placement
from .validator import _partner_pairs, _trim_for_handover

DEFAULT_PLACEMENT_ATTEMPTS = 100
DEFAULT_STEP_RESTARTS = 10


@dataclass(frozen=True)
class GroundingConfig:
    placement_attempts: int = DEFAULT_PLACEMENT_ATTEMPTS
    step_restarts: int = DEFAULT_STEP_RESTARTS


@dataclass
class GroundingContext:
    """Future joint actions already fixed, and what they occupy."""
    s_fut: tuple = ()                 # GroundedJointAction suffix (time order)
    m_fut: frozenset = frozenset()    # objects moved in s_fut

    def volumes(self) -> list:
        return volumes_of(self.s_fut)


def volumes_of(steps) -> list:
    """Swept corridors and placement footprints of grounded joint actions."""
    out = []
    for step in steps:
        for r in sorted(step.moves):
            mv = step.moves[r]
            out.extend(mv.all_corridors())
    return out


def context_from_steps(steps, scene: Scene) -> GroundingContext:
    moved = set()
    for s in steps:
        moved |= s.moved_objects()
    return GroundingContext(s_fut=tuple(steps), m_fut=frozenset(moved))


@dataclass(frozen=True)
class Full:
    steps: tuple  # complete sequence of grounded joint actions (time order)


@dataclass(frozen=True)
class Partial:
    steps: tuple       # grounded suffix, including the input future actions
    conflicts: frozenset

    def __post_init__(self):
        if not self.conflicts:
            raise ValueError("partial outcome requires a nonempty conflict set")


@dataclass(frozen=True)
class Failure:
    reason: str = ""


def _footprints(step_moves: dict, scene: Scene) -> list:
    seen = {}
    for r, mv in step_moves.items():
        seen[mv.action.obj] = (scene.movables[mv.action.obj].shape, mv.placement)
    return list(seen.values())


def find_placements(actions, forbidden, scene: Scene, rng,
                    attempts: int = DEFAULT_PLACEMENT_ATTEMPTS):
    """Jointly consistent placements for one skeleton step.

    ``actions`` are the distinct actions of the step; placements are sampled
    in canonical object order and each must clear ``forbidden`` plus the
    placements already chosen for this step. Returns obj -> Pose or None.
    """
    placements: dict[str, Pose] = {}
    placed_volumes: list = []
    for action in sorted(actions, key=lambda a: a.key()):
        shape = scene.movables[action.obj].shape
        robot = scene.robots[action.place_robot]
        pose = sample_placement(
            scene.regions[action.region], shape,
            list(forbidden) + placed_volumes, rng,
            max_attempts=attempts,
            extra_ok=lambda p, robot=robot: robot.in_reach(p.xy))
        if pose is None:
            return None
        placements[action.obj] = pose
        placed_volumes.append((shape, pose))
    return placements


def find_trajectories(actions, placements, obstacles, scene: Scene,
                      poses=None):
    """Collision-free straight-line sweeps for one skeleton step.

    ``obstacles`` are (shape, pose) volumes every corridor must avoid (the
    fixed obstacles plus the movables protected at their initial poses).
    Same-step corridors of distinct robots must be mutually clear, except
    around a shared handover point. Returns robot -> RobotMove or None.
    """
    poses = poses or {}
    moves: dict[str, RobotMove] = {}
    for action in sorted(actions, key=lambda a: a.key()):
        obj_pose = poses.get(action.obj, scene.movables[action.obj].pose)
        placement = placements[action.obj]
        if not endpoints_reachable(scene, action, obj_pose, placement):
            return None
        moves.update(build_moves(scene, action, obj_pose, placement))
    for r in sorted(moves):
        for cor in moves[r].all_corridors():
            if any(collides(cor, ob) for ob in obstacles):
                return None
            for other in sorted(scene.robots):
                if other != r and cor.contains_point(scene.robots[other].base):
                    return None
    # cross-robot clearance, with handover partners exempt near their meeting point
    step = GroundedJointAction(moves=moves)
    partner_pairs = _partner_pairs(step)
    robots = sorted(moves)
    for i in range(len(robots)):
        for j in range(i + 1, len(robots)):
            r1, r2 = robots[i], robots[j]
            if frozenset((r1, r2)) in partner_pairs:
                cs1 = _trim_for_handover(scene, moves[r1])
                cs2 = _trim_for_handover(scene, moves[r2])
            else:
                cs1 = moves[r1].all_corridors()
                cs2 = moves[r2].all_corridors()
            if any(collides(c1, c2) for c1 in cs1 for c2 in cs2):
                return None
    return moves


def movables_occluding(steps, scene: Scene, exclude) -> set[str]:
    """Movables (outside ``exclude``) intersecting any volume of ``steps``."""
    vols = volumes_of(steps)
    foot = []
    for s in steps:
        foot.extend(_footprints(s.moves, scene))
    out = set()
    for name in sorted(scene.movables):
        if name in exclude:
            continue
        m = scene.movables[name]
        body = (m.shape, m.pose)
        if any(collides(v, body) for v in vols + foot):
            out.add(name)
    return out


def ground(skeleton: TaskSkeleton, ctx: GroundingContext, scene: Scene, rng,
           cfg: GroundingConfig = GroundingConfig()):
    """Ground ``skeleton`` in reverse against the context's future actions."""
    if skeleton.moved_objects & ctx.m_fut:
        raise ValueError("skeleton re-moves an object already moved later")
    m_fut = set(ctx.m_fut)
    v_fut = list(ctx.volumes()) + [
        f for s in ctx.s_fut for f in _footprints(s.moves, scene)]
    m_out = set(scene.movables) - m_fut - set(skeleton.moved_objects)
    grounded = list(ctx.s_fut)

    def obstacle_poses(names):
        return [(scene.movables[n].shape, scene.movables[n].pose)
                for n in sorted(names)]

    fixed = list(scene.fixed)

    for t in range(skeleton.makespan, 0, -1):
        actions = {a for a in skeleton.steps[t - 1].values() if a is not None}
        strict_forbidden = fixed + obstacle_poses(m_out | m_fut) + v_fut
        strict_obstacles = fixed + obstacle_poses(m_out | m_fut)
        moves = None
        for _ in range(cfg.step_restarts):
            placements = find_placements(actions, strict_forbidden, scene, rng,
                                         cfg.placement_attempts)
            if placements is None:
                continue
            moves = find_trajectories(actions, placements, strict_obstacles, scene)
            if moves is not None:
                break
        if moves is None:
            # relaxed pass: the not-planned objects may be collided with,
            # since new skeletons can be generated to move them first
            relaxed_forbidden = fixed + obstacle_poses(m_fut) + v_fut
            relaxed_obstacles = fixed + obstacle_poses(m_fut)
            for _ in range(cfg.step_restarts):
                placements = find_placements(actions, relaxed_forbidden, scene,
                                             rng, cfg.placement_attempts)
                if placements is None:
                    continue
                moves = find_trajectories(actions, placements,
                                          relaxed_obstacles, scene)
                if moves is not None:
                    break
            if moves is None:
                return Failure(f"step {t}: no feasible placements or trajectories")
            step = GroundedJointAction(moves=moves)
            grounded = [step] + grounded
            m_fut |= step.moved_objects()
            unmoved_goals = {o for o, _ in scene.goal} - m_fut
            occluders = movables_occluding(grounded, scene, exclude=m_fut)
            conflicts = unmoved_goals | occluders
            if not conflicts:
                # the relaxed sample happens to be strictly consistent:
                # keep going as if the strict pass had succeeded
                v_fut += list(volumes_of([step])) + _footprints(moves, scene)
                continue
            return Partial(steps=tuple(grounded), conflicts=frozenset(conflicts))
        step = GroundedJointAction(moves=moves)
        grounded = [step] + grounded
        m_fut |= step.moved_objects()
        v_fut += list(volumes_of([step])) + _footprints(moves, scene)
    return Full(steps=tuple(grounded))
