"""World model: regions, robots, movable/fixed objects, scene loading.

Scene documents are JSON; the exact field names are frozen in
``schemas/scene.schema.json``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from importlib import resources

import jsonschema

from .geometry import (
    Corridor,
    Disc,
    Pose,
    Rect,
    Rectangle,
    Shape,
    collides,
    shape_inside_rect,
    swept_corridor,
)

DEFAULT_GRASP_COUNT = 8
DEFAULT_MAX_ATTEMPTS = 100


class SceneError(ValueError):
    """Scene document is malformed or violates a world invariant."""


@dataclass(frozen=True)
class Region:
    name: str
    rect: Rect


@dataclass(frozen=True)
class Robot:
    name: str
    base: tuple[float, float]
    reach_min: float
    reach_max: float
    gripper_width: float

    def __post_init__(self):
        if not (0.0 <= self.reach_min < self.reach_max):
            raise SceneError(f"robot {self.name}: need 0 <= reach_min < reach_max")
        if self.gripper_width <= 0.0:
            raise SceneError(f"robot {self.name}: gripper_width must be positive")

    def in_reach(self, p: tuple[float, float]) -> bool:
        d = math.hypot(p[0] - self.base[0], p[1] - self.base[1])
        return self.reach_min <= d <= self.reach_max


@dataclass(frozen=True)
class Movable:
    name: str
    shape: Shape
    pose: Pose
    home_region: str

    @property
    def diameter(self) -> float:
        return 2.0 * self.shape.circumradius


@dataclass
class Scene:
    regions: dict[str, Region]
    fixed: list[tuple[Shape, Pose]]
    movables: dict[str, Movable]
    robots: dict[str, Robot]
    handover_points: dict[tuple[str, str], tuple[float, float]]
    grasp_count: int
    goal: list[tuple[str, str]]

    def __post_init__(self):
        self._check_invariants()

    # -- derived quantities ------------------------------------------------

    def grasp_angles(self) -> list[float]:
        k = self.grasp_count
        return [2.0 * math.pi * i / k for i in range(k)]

    def goal_objects(self) -> list[str]:
        return sorted({m for m, _ in self.goal})

    def goal_region_of(self, obj: str) -> str | None:
        for m, re in self.goal:
            if m == obj:
                return re
        return None

    def target_region_of(self, obj: str) -> str:
        """Goal region for goal objects, home region otherwise."""
        re = self.goal_region_of(obj)
        return re if re is not None else self.movables[obj].home_region

    def handover_point(self, r1: str, r2: str) -> tuple[float, float]:
        key = (r1, r2) if (r1, r2) in self.handover_points else (r2, r1)
        if key in self.handover_points:
            return self.handover_points[key]
        b1, b2 = self.robots[r1].base, self.robots[r2].base
        return (0.5 * (b1[0] + b2[0]), 0.5 * (b1[1] + b2[1]))

    def handover_radius(self, r1: str, r2: str) -> float:
        return max(self.robots[r1].gripper_width, self.robots[r2].gripper_width)

    def grasp_point(self, obj: str, angle: float,
                    pose: Pose | None = None) -> tuple[float, float]:
        """Approach point on the object's circumscribed circle for a grasp angle."""
        m = self.movables[obj]
        p = pose if pose is not None else m.pose
        r = m.shape.circumradius
        return (p.x + r * math.cos(angle), p.y + r * math.sin(angle))

    def pick_corridor(self, robot: str, obj: str, angle: float) -> Corridor:
        r = self.robots[robot]
        return swept_corridor(r.base, self.grasp_point(obj, angle), r.gripper_width)

    def transfer_width(self, robot: str, obj: str) -> float:
        return self.robots[robot].gripper_width + self.movables[obj].diameter

    # -- invariants ----------------------------------------------------------

    def _check_invariants(self):
        names = list(self.regions) + list(self.movables) + list(self.robots)
        if len(names) != len(set(names)):
            dup = sorted({n for n in names if names.count(n) > 1})
            raise SceneError(f"duplicate entity names: {dup}")
        if self.grasp_count < 1:
            raise SceneError("grasp_count must be >= 1")
        for m in self.movables.values():
            if m.home_region not in self.regions:
                raise SceneError(f"movable {m.name}: unknown home_region {m.home_region!r}")
            if not shape_inside_rect(m.shape, m.pose, self.regions[m.home_region].rect):
                raise SceneError(
                    f"movable {m.name} does not lie inside its home region {m.home_region}")
        items = sorted(self.movables.values(), key=lambda m: m.name)
        for i, a in enumerate(items):
            for b in items[i + 1:]:
                if collides((a.shape, a.pose), (b.shape, b.pose)):
                    raise SceneError(f"movables {a.name} and {b.name} overlap at load")
            for shape, pose in self.fixed:
                if collides((a.shape, a.pose), (shape, pose)):
                    raise SceneError(f"movable {a.name} overlaps a fixed obstacle at load")
        for obj, re in self.goal:
            if obj not in self.movables:
                raise SceneError(f"goal references unknown object {obj!r}")
            if re not in self.regions:
                raise SceneError(f"goal references unknown region {re!r}")
        for (r1, r2) in self.handover_points:
            if r1 not in self.robots or r2 not in self.robots:
                raise SceneError(f"handover point references unknown robots ({r1}, {r2})")

    def goal_satisfied(self, poses: dict[str, Pose] | None = None) -> bool:
        for obj, re in self.goal:
            m = self.movables[obj]
            pose = poses[obj] if poses is not None else m.pose
            if not shape_inside_rect(m.shape, pose, self.regions[re].rect):
                return False
        return True


# ---------------------------------------------------------------------------
# loading


def _load_schema() -> dict:
    text = resources.files("mrplan.schemas").joinpath("scene.schema.json").read_text()
    return json.loads(text)


def _parse_shape(d: dict) -> Shape:
    if d["type"] == "disc":
        return Disc(radius=d["radius"])
    return Rectangle(half_w=d["half_w"], half_h=d["half_h"])


def _parse_pose(d: dict) -> Pose:
    return Pose(d["x"], d["y"], d.get("theta", 0.0))


def loads_scene(text: str) -> Scene:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise SceneError(f"scene parse error at line {e.lineno}: {e.msg}") from e
    try:
        jsonschema.validate(doc, _load_schema())
    except jsonschema.ValidationError as e:
        path = "/".join(str(p) for p in e.absolute_path)
        raise SceneError(f"scene schema error at {path or '<root>'}: {e.message}") from e

    regions = {}
    for r in doc["regions"]:
        xmin, ymin, xmax, ymax = r["rect"]
        try:
            regions[r["name"]] = Region(r["name"], Rect(xmin, ymin, xmax, ymax))
        except ValueError as e:
            raise SceneError(f"region {r['name']}: {e}") from e
    fixed = [(_parse_shape(f["shape"]), _parse_pose(f["pose"])) for f in doc.get("fixed", [])]
    movables = {}
    for m in doc["movables"]:
        movables[m["name"]] = Movable(m["name"], _parse_shape(m["shape"]),
                                      _parse_pose(m["pose"]), m["home_region"])
    robots = {}
    for r in doc["robots"]:
        robots[r["name"]] = Robot(r["name"], tuple(r["base"]), r["reach_min"],
                                  r["reach_max"], r["gripper_width"])
    handover_points = {}
    for key, pt in doc.get("handover_points", {}).items():
        a, b = key.split(",")
        handover_points[(a.strip(), b.strip())] = (pt[0], pt[1])
    goal = [(g[0], g[1]) for g in doc.get("goal", [])]
    return Scene(
        regions=regions,
        fixed=fixed,
        movables=movables,
        robots=robots,
        handover_points=handover_points,
        grasp_count=doc.get("grasp_count", DEFAULT_GRASP_COUNT),
        goal=goal,
    )


def load_scene(path) -> Scene:
    with open(path) as f:
        return loads_scene(f.read())


# ---------------------------------------------------------------------------
# placement sampling


def sample_placement(region: Region, obj: Shape, forbidden, rng,
                     max_attempts: int = DEFAULT_MAX_ATTEMPTS,
                     extra_ok=None) -> Pose | None:
    """Rejection-sample a pose for `obj` fully inside `region`, clear of every
    forbidden volume. `forbidden` entries are (Shape, Pose) pairs or Corridors.
    `extra_ok`, when given, is an additional predicate a candidate must pass.
    Returns None after max_attempts rejections.
    """
    if max_attempts < 1:
        raise ValueError("max_attempts must be >= 1")
    rect = region.rect
    for _ in range(max_attempts):
        x = rng.uniform(rect.xmin, rect.xmax)
        y = rng.uniform(rect.ymin, rect.ymax)
        theta = 0.0 if isinstance(obj, Disc) else rng.uniform(0.0, 2.0 * math.pi)
        pose = Pose(x, y, theta)
        if not shape_inside_rect(obj, pose, rect):
            continue
        if extra_ok is not None and not extra_ok(pose):
            continue
        if any(collides((obj, pose), f) for f in forbidden):
            continue
        return pose
    return None
