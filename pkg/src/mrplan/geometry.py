"""2D geometry primitives: poses, shapes, capsule corridors, collision tests.

All lengths are in meters, angles in radians. Boundary contact within
EPS does not count as a collision, so tangent configurations are stable.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

EPS = 1e-9

TWO_PI = 2.0 * math.pi


def norm_angle(theta: float) -> float:
    """Normalize an angle to [0, 2*pi)."""
    t = math.fmod(theta, TWO_PI)
    if t < 0.0:
        t += TWO_PI
    return t


@dataclass(frozen=True)
class Pose:
    x: float
    y: float
    theta: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "theta", norm_angle(self.theta))

    @property
    def xy(self) -> tuple[float, float]:
        return (self.x, self.y)


@dataclass(frozen=True)
class Disc:
    radius: float

    def __post_init__(self):
        if self.radius <= 0.0:
            raise ValueError("disc radius must be positive")

    @property
    def circumradius(self) -> float:
        return self.radius


@dataclass(frozen=True)
class Rectangle:
    half_w: float
    half_h: float

    def __post_init__(self):
        if self.half_w <= 0.0 or self.half_h <= 0.0:
            raise ValueError("rectangle extents must be positive")

    @property
    def circumradius(self) -> float:
        return math.hypot(self.half_w, self.half_h)


Shape = Disc | Rectangle


@dataclass(frozen=True)
class Rect:
    """Axis-aligned rectangle given by min/max corners."""
    xmin: float
    ymin: float
    xmax: float
    ymax: float

    def __post_init__(self):
        if self.xmax <= self.xmin or self.ymax <= self.ymin:
            raise ValueError("rectangle must have positive area")

    @property
    def center(self) -> tuple[float, float]:
        return (0.5 * (self.xmin + self.xmax), 0.5 * (self.ymin + self.ymax))

    def contains_point(self, p: tuple[float, float], margin: float = 0.0) -> bool:
        return (self.xmin + margin <= p[0] <= self.xmax - margin
                and self.ymin + margin <= p[1] <= self.ymax - margin)


@dataclass(frozen=True)
class Corridor:
    """Capsule: a segment inflated by width/2. Zero-length segments are discs."""
    a: tuple[float, float]
    b: tuple[float, float]
    width: float

    def __post_init__(self):
        if self.width <= 0.0:
            raise ValueError("corridor width must be positive")

    @property
    def half_width(self) -> float:
        return 0.5 * self.width

    @property
    def length(self) -> float:
        return math.hypot(self.b[0] - self.a[0], self.b[1] - self.a[1])

    def area(self) -> float:
        hw = self.half_width
        return self.length * self.width + math.pi * hw * hw

    def contains_point(self, p: tuple[float, float]) -> bool:
        return point_segment_distance(p, self.a, self.b) < self.half_width - EPS

    def trimmed(self, end: tuple[float, float], amount: float) -> "Corridor | None":
        """Shorten the endpoint that coincides with `end` by `amount`.

        Returns None when the whole segment is trimmed away.
        """
        ax, ay = self.a
        bx, by = self.b
        if math.hypot(bx - end[0], by - end[1]) < math.hypot(ax - end[0], ay - end[1]):
            keep, cut = (ax, ay), (bx, by)
            flipped = False
        else:
            keep, cut = (bx, by), (ax, ay)
            flipped = True
        seg = math.hypot(cut[0] - keep[0], cut[1] - keep[1])
        if seg <= amount:
            return None
        t = (seg - amount) / seg
        new_cut = (keep[0] + t * (cut[0] - keep[0]), keep[1] + t * (cut[1] - keep[1]))
        if flipped:
            return Corridor(new_cut, keep, self.width)
        return Corridor(keep, new_cut, self.width)


def swept_corridor(frm: tuple[float, float], to: tuple[float, float], width: float) -> Corridor:
    """Capsule swept by a straight move from `frm` to `to`."""
    if width <= 0.0:
        raise ValueError("corridor width must be positive")
    return Corridor(tuple(frm), tuple(to), width)


# ---------------------------------------------------------------------------
# distance helpers


def point_segment_distance(p, a, b) -> float:
    ax, ay = a
    bx, by = b
    px, py = p
    dx, dy = bx - ax, by - ay
    d2 = dx * dx + dy * dy
    if d2 == 0.0:
        return math.hypot(px - ax, py - ay)
    t = ((px - ax) * dx + (py - ay) * dy) / d2
    t = max(0.0, min(1.0, t))
    return math.hypot(px - (ax + t * dx), py - (ay + t * dy))


def _segments_intersect(p1, p2, p3, p4) -> bool:
    def orient(a, b, c):
        v = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
        if v > 0:
            return 1
        if v < 0:
            return -1
        return 0

    def on_seg(a, b, c):
        return (min(a[0], b[0]) <= c[0] <= max(a[0], b[0])
                and min(a[1], b[1]) <= c[1] <= max(a[1], b[1]))

    o1, o2 = orient(p1, p2, p3), orient(p1, p2, p4)
    o3, o4 = orient(p3, p4, p1), orient(p3, p4, p2)
    if o1 != o2 and o3 != o4:
        return True
    if o1 == 0 and on_seg(p1, p2, p3):
        return True
    if o2 == 0 and on_seg(p1, p2, p4):
        return True
    if o3 == 0 and on_seg(p3, p4, p1):
        return True
    if o4 == 0 and on_seg(p3, p4, p2):
        return True
    return False


def segment_segment_distance(a1, a2, b1, b2) -> float:
    if _segments_intersect(a1, a2, b1, b2):
        return 0.0
    return min(
        point_segment_distance(a1, b1, b2),
        point_segment_distance(a2, b1, b2),
        point_segment_distance(b1, a1, a2),
        point_segment_distance(b2, a1, a2),
    )


def _rect_corners(shape: Rectangle, pose: Pose):
    c, s = math.cos(pose.theta), math.sin(pose.theta)
    out = []
    for sx, sy in ((1, 1), (1, -1), (-1, -1), (-1, 1)):
        lx, ly = sx * shape.half_w, sy * shape.half_h
        out.append((pose.x + c * lx - s * ly, pose.y + s * lx + c * ly))
    return out


def _to_local(pose: Pose, p):
    c, s = math.cos(pose.theta), math.sin(pose.theta)
    dx, dy = p[0] - pose.x, p[1] - pose.y
    return (c * dx + s * dy, -s * dx + c * dy)


def _disc_disc(r1, p1, r2, p2) -> bool:
    return math.hypot(p1.x - p2.x, p1.y - p2.y) < r1 + r2 - EPS


def _disc_rect(radius, cpose, rect: Rectangle, rpose) -> bool:
    lx, ly = _to_local(rpose, (cpose.x, cpose.y))
    qx = max(abs(lx) - rect.half_w, 0.0)
    qy = max(abs(ly) - rect.half_h, 0.0)
    return math.hypot(qx, qy) < radius - EPS


def _rect_rect(s1: Rectangle, p1: Pose, s2: Rectangle, p2: Pose) -> bool:
    # separating-axis test on both rectangles' edge normals
    c1, c2 = _rect_corners(s1, p1), _rect_corners(s2, p2)
    for corners, pose, shape in ((c2, p1, s1), (c1, p2, s2)):
        cos_t, sin_t = math.cos(pose.theta), math.sin(pose.theta)
        lo_x = hi_x = lo_y = hi_y = None
        for p in corners:
            dx, dy = p[0] - pose.x, p[1] - pose.y
            lx = cos_t * dx + sin_t * dy
            ly = -sin_t * dx + cos_t * dy
            lo_x = lx if lo_x is None else min(lo_x, lx)
            hi_x = lx if hi_x is None else max(hi_x, lx)
            lo_y = ly if lo_y is None else min(lo_y, ly)
            hi_y = ly if hi_y is None else max(hi_y, ly)
        if hi_x <= -shape.half_w + EPS or lo_x >= shape.half_w - EPS:
            return False
        if hi_y <= -shape.half_h + EPS or lo_y >= shape.half_h - EPS:
            return False
    return True


def _segment_rect_distance(a, b, rect: Rectangle, pose: Pose) -> float:
    la, lb = _to_local(pose, a), _to_local(pose, b)
    hw, hh = rect.half_w, rect.half_h
    inside = lambda p: -hw <= p[0] <= hw and -hh <= p[1] <= hh
    if inside(la) or inside(lb):
        return 0.0
    edges = [((-hw, -hh), (hw, -hh)), ((hw, -hh), (hw, hh)),
             ((hw, hh), (-hw, hh)), ((-hw, hh), (-hw, -hh))]
    best = math.inf
    for e1, e2 in edges:
        d = segment_segment_distance(la, lb, e1, e2)
        if d == 0.0:
            return 0.0
        best = min(best, d)
    return best


def _corridor_shape(cor: Corridor, shape: Shape, pose: Pose) -> bool:
    if isinstance(shape, Disc):
        return point_segment_distance((pose.x, pose.y), cor.a, cor.b) \
            < cor.half_width + shape.radius - EPS
    return _segment_rect_distance(cor.a, cor.b, shape, pose) < cor.half_width - EPS


def _corridor_corridor(c1: Corridor, c2: Corridor) -> bool:
    return segment_segment_distance(c1.a, c1.b, c2.a, c2.b) \
        < c1.half_width + c2.half_width - EPS


def collides(a, b) -> bool:
    """True iff two solids overlap with positive area.

    Each argument is either a (Shape, Pose) pair or a Corridor. Touching at a
    measure-zero boundary is non-colliding (EPS tolerance).
    """
    a_cor, b_cor = isinstance(a, Corridor), isinstance(b, Corridor)
    if a_cor and b_cor:
        return _corridor_corridor(a, b)
    if a_cor:
        return _corridor_shape(a, b[0], b[1])
    if b_cor:
        return _corridor_shape(b, a[0], a[1])
    s1, p1 = a
    s2, p2 = b
    if isinstance(s1, Disc) and isinstance(s2, Disc):
        return _disc_disc(s1.radius, p1, s2.radius, p2)
    if isinstance(s1, Disc):
        return _disc_rect(s1.radius, p1, s2, p2)
    if isinstance(s2, Disc):
        return _disc_rect(s2.radius, p2, s1, p1)
    return _rect_rect(s1, p1, s2, p2)


def corridor_contains_point(cor: Corridor, p: tuple[float, float]) -> bool:
    return cor.contains_point(p)


def shape_inside_rect(shape: Shape, pose: Pose, rect: Rect) -> bool:
    """True iff the placed shape lies entirely inside the axis-aligned rect."""
    if isinstance(shape, Disc):
        return rect.contains_point((pose.x, pose.y), margin=shape.radius - EPS)
    return all(rect.contains_point(c, margin=-EPS) for c in _rect_corners(shape, pose))
