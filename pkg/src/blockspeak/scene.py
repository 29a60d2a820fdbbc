"""World state: table, unit-cube blocks, and block-movement directives.

All coordinates are in block-edge units (one block edge = 1.0).  The frame
is viewer-relative and fixed: x grows to the viewer's right, y grows up,
z grows away from the viewer.  The table surface is the plane y = 0, so a
block resting on the table has its center at y = 0.5.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from typing import Iterable, Optional

EDGE = 1.0
SUPPORT_TOL = 0.1
INTERPENETRATION_TOL = 0.05


class SceneError(ValueError):
    """Raised on malformed scene documents or invariant violations."""


@dataclass(frozen=True)
class Vec3:
    x: float
    y: float
    z: float

    def __post_init__(self):
        for v in (self.x, self.y, self.z):
            if not math.isfinite(v):
                raise SceneError(f"non-finite coordinate in {self!r}")

    def __add__(self, other: "Vec3") -> "Vec3":
        return Vec3(self.x + other.x, self.y + other.y, self.z + other.z)

    def __sub__(self, other: "Vec3") -> "Vec3":
        return Vec3(self.x - other.x, self.y - other.y, self.z - other.z)

    def distance(self, other: "Vec3") -> float:
        d = self - other
        return math.sqrt(d.x * d.x + d.y * d.y + d.z * d.z)

    def as_tuple(self) -> tuple:
        return (self.x, self.y, self.z)


@dataclass(frozen=True)
class Block:
    id: str
    position: Vec3
    color: str = "red"

    @property
    def bottom(self) -> float:
        return self.position.y - EDGE / 2

    @property
    def top(self) -> float:
        return self.position.y + EDGE / 2


@dataclass(frozen=True)
class TableGeometry:
    half_width: float = 2.5
    half_depth: float = 2.5

    def __post_init__(self):
        if self.half_width <= 0 or self.half_depth <= 0:
            raise SceneError("table extents must be positive")

    @property
    def diagonal(self) -> float:
        return 2 * math.hypot(self.half_width, self.half_depth)


@dataclass(frozen=True)
class MoveDirective:
    """move(objId, toPos): place an existing or new block at a position."""

    block_id: Optional[str]  # None means "a new block"
    to_pos: Vec3
    color: Optional[str] = None


def _interpenetrates(a: Block, b: Block) -> bool:
    d = a.position - b.position
    sep = max(abs(d.x), abs(d.y), abs(d.z))
    return sep < EDGE - INTERPENETRATION_TOL


def _supported(block: Block, others: Iterable[Block]) -> bool:
    if abs(block.bottom) <= SUPPORT_TOL:
        return True
    for other in others:
        if other.id == block.id:
            continue
        d = block.position - other.position
        if (
            abs(block.bottom - other.top) <= SUPPORT_TOL
            and abs(d.x) < EDGE - INTERPENETRATION_TOL
            and abs(d.z) < EDGE - INTERPENETRATION_TOL
        ):
            return True
    return False


@dataclass(frozen=True)
class Scene:
    """Immutable world snapshot.  Construction validates all invariants."""

    table: TableGeometry
    blocks: tuple

    def __post_init__(self):
        ids = [b.id for b in self.blocks]
        if len(ids) != len(set(ids)):
            dupes = sorted({i for i in ids if ids.count(i) > 1})
            raise SceneError(f"duplicate block ids: {dupes}")
        blocks = sorted(self.blocks, key=lambda b: b.id)
        object.__setattr__(self, "blocks", tuple(blocks))
        for i, a in enumerate(self.blocks):
            for b in self.blocks[i + 1:]:
                if _interpenetrates(a, b):
                    raise SceneError(f"interpenetration between {a.id} and {b.id}")
        for b in self.blocks:
            if not _supported(b, self.blocks):
                raise SceneError(f"unsupported block: {b.id}")

    def by_id(self, block_id: str) -> Block:
        for b in self.blocks:
            if b.id == block_id:
                return b
        raise SceneError(f"unknown block id: {block_id}")

    def has(self, block_id: str) -> bool:
        return any(b.id == block_id for b in self.blocks)

    def support_of(self, pos: Vec3) -> Optional[Block]:
        """The block directly supporting a cube centered at pos, if any."""
        for b in self.blocks:
            d = pos - b.position
            if (
                abs((pos.y - EDGE / 2) - b.top) <= SUPPORT_TOL
                and abs(d.x) < EDGE - INTERPENETRATION_TOL
                and abs(d.z) < EDGE - INTERPENETRATION_TOL
            ):
                return b
        return None

    def fresh_id(self) -> str:
        n = len(self.blocks) + 1
        while self.has(f"b{n}"):
            n += 1
        return f"b{n}"


def load_scene(document) -> Scene:
    """Parse a scene file (JSON text or already-parsed object) and validate it."""
    if isinstance(document, (str, bytes)):
        try:
            data = json.loads(document)
        except json.JSONDecodeError as exc:
            raise SceneError(f"scene parse error: {exc}") from exc
    else:
        data = document
    try:
        table = TableGeometry(
            half_width=float(data["table"]["width"]) / 2,
            half_depth=float(data["table"]["depth"]) / 2,
        )
        blocks = tuple(
            Block(
                id=str(item["id"]),
                position=Vec3(*(float(c) for c in item["pos"])),
                color=str(item.get("color", "red")),
            )
            for item in data.get("blocks", [])
        )
    except (KeyError, TypeError) as exc:
        raise SceneError(f"scene schema error: {exc}") from exc
    return Scene(table=table, blocks=blocks)


def scene_data(scene: Scene) -> dict:
    return {
        "table": {
            "width": scene.table.half_width * 2,
            "depth": scene.table.half_depth * 2,
        },
        "blocks": [
            {"id": b.id, "pos": list(b.position.as_tuple()), "color": b.color}
            for b in scene.blocks
        ],
    }


def serialize_scene(scene: Scene) -> str:
    return json.dumps(scene_data(scene), indent=2, sort_keys=True)


def load_plan(document) -> list:
    """Parse a plan file (JSON text or already-parsed object) into MoveDirectives."""
    if isinstance(document, (str, bytes)):
        try:
            data = json.loads(document)
        except json.JSONDecodeError as exc:
            raise SceneError(f"plan parse error: {exc}") from exc
    else:
        data = document
    steps = []
    for item in data.get("steps", []):
        block = item.get("block", "new")
        steps.append(
            MoveDirective(
                block_id=None if block == "new" else str(block),
                to_pos=Vec3(*(float(c) for c in item["to"])),
                color=item.get("color"),
            )
        )
    return steps


def normalize_translate(block_id: str, direction: Vec3, scene: Scene) -> MoveDirective:
    """Rewrite translate(objId, dir) into the equivalent move(objId, toPos)."""
    block = scene.by_id(block_id)
    return MoveDirective(block_id=block_id, to_pos=block.position + direction)


def apply_move(scene: Scene, move: MoveDirective) -> tuple:
    """Apply a move, returning (new scene, id of the placed/moved block).

    New-block moves allocate a fresh id.  The resulting scene is validated;
    an invalid result raises SceneError and leaves the input untouched.
    """
    if move.block_id is None:
        new_id = scene.fresh_id()
        block = Block(id=new_id, position=move.to_pos, color=move.color or "red")
        blocks = scene.blocks + (block,)
    else:
        existing = scene.by_id(move.block_id)
        new_id = existing.id
        moved = replace(existing, position=move.to_pos)
        blocks = tuple(b for b in scene.blocks if b.id != existing.id) + (moved,)
    return Scene(table=scene.table, blocks=blocks), new_id
