"""Soft spatial predicate fields and relation evaluation.

Every predicate is a scalar field over space with values in [0, 1],
relative to a ground entity (block, formation, or table).  A relation is
considered to hold when the field value at the figure's position reaches
ACCEPTANCE.  Directional fields are a product of an axial falloff centered
at the contact position beyond the ground's face and lateral falloffs from
the ground's bounding box.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Optional

from .grouping import CandidateSet, Group, entity_id
from .scene import EDGE, SUPPORT_TOL, Block, Scene, TableGeometry, Vec3

ACCEPTANCE = 0.5

AXIAL_SIGMA = 0.5
LATERAL_SIGMA = 0.75
VERTICAL_LATERAL_SIGMA = 0.35  # on-top/below demand substantial overlap
LOCATION_SIGMA_FRACTION = 0.15
NEAR_RADIUS = 2.5
FAR_FRACTION = 0.6
NEXT_TO_RADIUS = 1.5


class Predicate(str, Enum):
    ON_TOP = "on_top"
    BELOW = "below"
    IN_FRONT = "in_front"
    BEHIND = "behind"
    LEFT_OF = "left_of"
    RIGHT_OF = "right_of"
    NEXT_TO = "next_to"
    NEAR = "near"
    FAR = "far"
    AT_CORNER = "at_corner"
    AT_CENTER = "at_center"
    ON_TABLE = "on_table"


# (axis, direction of the figure relative to the ground)
DIRECTIONAL = {
    Predicate.ON_TOP: ("y", 1),
    Predicate.BELOW: ("y", -1),
    Predicate.BEHIND: ("z", 1),
    Predicate.IN_FRONT: ("z", -1),
    Predicate.LEFT_OF: ("x", -1),
    Predicate.RIGHT_OF: ("x", 1),
}

DUALS = {
    Predicate.IN_FRONT: Predicate.BEHIND,
    Predicate.BEHIND: Predicate.IN_FRONT,
    Predicate.LEFT_OF: Predicate.RIGHT_OF,
    Predicate.RIGHT_OF: Predicate.LEFT_OF,
    Predicate.ON_TOP: Predicate.BELOW,
    Predicate.BELOW: Predicate.ON_TOP,
}


@dataclass(frozen=True)
class SpatialRelation:
    figure: str  # entity id ("" for the imaginary block being placed)
    ground: str
    kind: Predicate


def bounding_box(entity, scene: Scene) -> tuple:
    """Axis-aligned (min, max) corners of an entity."""
    if isinstance(entity, Block):
        p = entity.position
        h = EDGE / 2
        return Vec3(p.x - h, p.y - h, p.z - h), Vec3(p.x + h, p.y + h, p.z + h)
    if isinstance(entity, Group):
        boxes = [bounding_box(scene.by_id(m), scene) for m in entity.members]
        lo = Vec3(min(b[0].x for b in boxes), min(b[0].y for b in boxes), min(b[0].z for b in boxes))
        hi = Vec3(max(b[1].x for b in boxes), max(b[1].y for b in boxes), max(b[1].z for b in boxes))
        return lo, hi
    if isinstance(entity, TableGeometry):
        return (
            Vec3(-entity.half_width, 0.0, -entity.half_depth),
            Vec3(entity.half_width, 0.0, entity.half_depth),
        )
    raise TypeError(f"not an entity: {entity!r}")


def entity_center(entity, scene: Scene) -> Vec3:
    lo, hi = bounding_box(entity, scene)
    return Vec3((lo.x + hi.x) / 2, (lo.y + hi.y) / 2, (lo.z + hi.z) / 2)


def _gauss(deviation: float, sigma: float) -> float:
    return math.exp(-(deviation * deviation) / (2 * sigma * sigma))


def _outside(value: float, lo: float, hi: float) -> float:
    if value < lo:
        return lo - value
    if value > hi:
        return value - hi
    return 0.0


def _directional_value(kind: Predicate, lo: Vec3, hi: Vec3, point: Vec3) -> float:
    axis, sign = DIRECTIONAL[kind]
    face = getattr(hi if sign > 0 else lo, axis)
    contact = face + sign * EDGE / 2
    s = getattr(point, axis)
    if kind in (Predicate.ON_TOP, Predicate.BELOW):
        axial = 1.0 if abs(s - contact) <= SUPPORT_TOL else 0.0
    else:
        axial = _gauss(s - contact, AXIAL_SIGMA)
    value = axial
    for off in "xyz".replace(axis, ""):
        d = _outside(getattr(point, off), getattr(lo, off), getattr(hi, off))
        # Vertical misalignment defeats a relation much faster than a
        # sideways offset ("behind the block" implies roughly level with
        # it), and support relations demand substantial overlap.
        tight = off == "y" or kind in (Predicate.ON_TOP, Predicate.BELOW)
        sigma = VERTICAL_LATERAL_SIGMA if tight else LATERAL_SIGMA
        value *= _gauss(d, sigma)
    return value


def _at_support_height(point: Vec3) -> bool:
    return abs(point.y - EDGE / 2) <= SUPPORT_TOL


def field_value(kind: Predicate, ground, point: Vec3, scene: Scene) -> float:
    """Graded validity in [0, 1] of `kind(figure at point, ground)`."""
    lo, hi = bounding_box(ground, scene)
    if kind in DIRECTIONAL:
        return _directional_value(kind, lo, hi, point)

    table = scene.table
    if kind is Predicate.ON_TABLE:
        on = (
            _at_support_height(point)
            and abs(point.x) <= table.half_width
            and abs(point.z) <= table.half_depth
        )
        return 1.0 if on else 0.0
    if kind is Predicate.AT_CENTER:
        if not _at_support_height(point):
            return 0.0
        sx = LOCATION_SIGMA_FRACTION * table.half_width
        sz = LOCATION_SIGMA_FRACTION * table.half_depth
        return _gauss(point.x, sx) * _gauss(point.z, sz)
    if kind is Predicate.AT_CORNER:
        if not _at_support_height(point):
            return 0.0
        sx = LOCATION_SIGMA_FRACTION * table.half_width
        sz = LOCATION_SIGMA_FRACTION * table.half_depth
        return max(
            _gauss(point.x - cx, sx) * _gauss(point.z - cz, sz)
            for cx in (-table.half_width, table.half_width)
            for cz in (-table.half_depth, table.half_depth)
        )

    center = Vec3((lo.x + hi.x) / 2, (lo.y + hi.y) / 2, (lo.z + hi.z) / 2)
    dist = point.distance(center)
    if kind is Predicate.NEAR:
        return 1.0 if dist <= NEAR_RADIUS else _gauss(dist - NEAR_RADIUS, AXIAL_SIGMA)
    if kind is Predicate.FAR:
        limit = FAR_FRACTION * table.diagonal
        return 1.0 if dist >= limit else _gauss(limit - dist, 1.0)
    if kind is Predicate.NEXT_TO:
        horiz = math.hypot(point.x - center.x, point.z - center.z)
        height = _gauss(_outside(point.y, lo.y, hi.y), 0.25)
        if horiz < EDGE - 0.05:
            return 0.0  # overlapping footprints are not "next to"
        ring = 1.0 if horiz <= NEXT_TO_RADIUS else _gauss(horiz - NEXT_TO_RADIUS, 0.25)
        return ring * height
    raise ValueError(f"unknown predicate: {kind}")


#: Predicates that never ground a placement directive (BELOW is physically
#: unrealizable for placements; the composite predicates describe regions
#: too diffuse to direct an action).
NON_DIRECTIVE = {Predicate.BELOW, Predicate.NEXT_TO, Predicate.NEAR, Predicate.FAR}


def evaluate_relations(
    point: Vec3,
    scene: Scene,
    cs: CandidateSet,
    figure_id: str = "",
    exclude: Iterable[str] = (),
    kinds: Optional[Iterable[Predicate]] = None,
    threshold: float = ACCEPTANCE,
) -> list:
    """All (ground, kind) relations accepted at the figure's position.

    Composite proximity relations are suppressed for grounds that already
    hold a directional relation (the contact already implies nearness).
    """
    excluded = set(exclude) | {figure_id}
    wanted = list(kinds) if kinds is not None else list(Predicate)
    relations = []
    for entity in cs.entities():
        eid = entity_id(entity)
        if eid in excluded:
            continue
        directional_hit = False
        for kind in wanted:
            if kind in (Predicate.NEAR, Predicate.NEXT_TO):
                continue
            if isinstance(entity, TableGeometry) and kind in DIRECTIONAL:
                continue
            if not isinstance(entity, TableGeometry) and kind in (
                Predicate.ON_TABLE,
                Predicate.AT_CENTER,
                Predicate.AT_CORNER,
            ):
                continue
            if field_value(kind, entity, point, scene) >= threshold:
                relations.append(SpatialRelation(figure=figure_id, ground=eid, kind=kind))
                if kind in DIRECTIONAL:
                    directional_hit = True
        for kind in (Predicate.NEAR, Predicate.NEXT_TO):
            if kind not in wanted or isinstance(entity, TableGeometry) or directional_hit:
                continue
            if field_value(kind, entity, point, scene) >= threshold:
                relations.append(SpatialRelation(figure=figure_id, ground=eid, kind=kind))
    relations.sort(key=lambda r: (r.ground, r.kind.value))
    return relations


@dataclass(frozen=True)
class FieldSample:
    """Probability samples over the table surface plane (back row first)."""

    kind: Predicate
    ground_id: str
    xs: tuple
    zs: tuple
    y: float
    values: tuple  # rows indexed by z from back (max z) to front

    def max_point(self) -> Vec3:
        best = None
        for zi, z in enumerate(self.zs):
            for xi, x in enumerate(self.xs):
                v = self.values[zi][xi]
                if best is None or v > best[0] + 1e-12:
                    best = (v, Vec3(x, self.y, z))
        return best[1]


def sample_field(kind: Predicate, ground, scene: Scene, resolution: int = 20) -> FieldSample:
    """Sample a predicate field on a resolution x resolution table grid."""
    if resolution < 2:
        raise ValueError("resolution must be >= 2 per axis")
    table = scene.table
    if kind is Predicate.ON_TOP:
        _, hi = bounding_box(ground, scene)
        y = hi.y + EDGE / 2
    else:
        y = EDGE / 2
    xs = tuple(
        -table.half_width + i * (2 * table.half_width) / (resolution - 1)
        for i in range(resolution)
    )
    zs = tuple(
        table.half_depth - i * (2 * table.half_depth) / (resolution - 1)
        for i in range(resolution)
    )
    values = tuple(
        tuple(field_value(kind, ground, Vec3(x, y, z), scene) for x in xs) for z in zs
    )
    return FieldSample(kind=kind, ground_id=entity_id(ground), xs=xs, zs=zs, y=y, values=values)


class EmptyRegionError(ValueError):
    """No point satisfies the requested relation chain."""


@dataclass(frozen=True)
class TargetRegion:
    point: Vec3
    score: float
    relations: tuple  # (kind, ground entity) pairs

    def accepts(self, candidate: Vec3, scene: Scene, threshold: float = ACCEPTANCE) -> bool:
        product = 1.0
        for kind, ground in self.relations:
            product *= field_value(kind, ground, candidate, scene)
        return product >= threshold


def target_region(
    relations,
    scene: Scene,
    threshold: float = ACCEPTANCE,
    pitch: float = 0.25,
) -> TargetRegion:
    """Argmax point of the product field of chained relations on one figure.

    The search runs over a horizontal grid at the table pitch crossed with
    the physically meaningful support heights.  Argmax ties resolve to the
    lowest (z, x, y) point.
    """
    if not relations:
        raise ValueError("empty relation chain")
    table = scene.table
    heights = sorted({EDGE / 2} | {round(b.top + EDGE / 2, 9) for b in scene.blocks})
    nx = int(round(2 * table.half_width / pitch)) + 1
    nz = int(round(2 * table.half_depth / pitch)) + 1
    best = None
    for zi in range(nz):
        z = -table.half_depth + zi * pitch
        for xi in range(nx):
            x = -table.half_width + xi * pitch
            for y in heights:
                p = Vec3(x, y, z)
                product = 1.0
                for kind, ground in relations:
                    product *= field_value(kind, ground, p, scene)
                    if product < 1e-12:
                        break
                if best is None or product > best[0] + 1e-12:
                    best = (product, p)
    score, point = best
    if score < threshold:
        raise EmptyRegionError(
            f"no feasible point for {[(k.value, entity_id(g)) for k, g in relations]}"
        )
    return TargetRegion(point=point, score=score, relations=tuple(relations))
