"""Detection of visually salient block formations (stacks, rows, columns).

Formations are linear arrangements detected from proximity (adjacent
centers within PROXIMITY along the formation axis) and continuity
(off-axis deviation within ALIGNMENT).  Stacks additionally require
physical support contact.  Color-heterogeneous formations are further
subdivided into their monochrome sub-runs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .scene import EDGE, SUPPORT_TOL, Block, Scene, TableGeometry

PROXIMITY = 1.5
ALIGNMENT = 0.25

TABLE_ID = "table"

_AXES = {"row": "x", "stack": "y", "column": "z"}


@dataclass(frozen=True)
class Group:
    kind: str  # "stack" | "row" | "column"
    members: tuple  # block ids ordered along the axis
    axis: str
    homogeneous_color: Optional[str] = None

    def __post_init__(self):
        if len(self.members) < 2:
            raise ValueError("a formation needs at least two members")

    @property
    def id(self) -> str:
        return f"{self.kind}({'+'.join(self.members)})"


def _coord(block: Block, axis: str) -> float:
    return getattr(block.position, axis)


def _adjacent(a: Block, b: Block, axis: str) -> bool:
    """True when b can directly follow a in a formation along axis."""
    gap = _coord(b, axis) - _coord(a, axis)
    if not 0 < gap <= PROXIMITY:
        return False
    for off in "xyz".replace(axis, ""):
        if abs(_coord(b, off) - _coord(a, off)) > ALIGNMENT:
            return False
    if axis == "y" and abs(b.bottom - a.top) > SUPPORT_TOL:
        return False  # stacks are physically supported towers
    return True


def _chains(blocks: tuple, axis: str) -> list:
    ordered = sorted(blocks, key=lambda b: (_coord(b, axis), b.id))
    succ = {}
    has_pred = set()
    for a in ordered:
        candidates = [b for b in ordered if _adjacent(a, b, axis)]
        if candidates:
            nxt = min(candidates, key=lambda b: (_coord(b, axis) - _coord(a, axis), b.id))
            succ[a.id] = nxt
            has_pred.add(nxt.id)
    chains = []
    for a in ordered:
        if a.id in has_pred:
            continue
        chain = [a]
        while chain[-1].id in succ:
            chain.append(succ[chain[-1].id])
        if len(chain) >= 2:
            chains.append(chain)
    return chains


def _color_subruns(chain: list) -> list:
    runs = []
    start = 0
    for i in range(1, len(chain) + 1):
        if i == len(chain) or chain[i].color != chain[start].color:
            if i - start >= 2:
                runs.append(chain[start:i])
            start = i
    return runs


def detect_groups(scene: Scene) -> tuple:
    """All maximal linear formations plus monochrome sub-formations."""
    groups = []
    for kind, axis in _AXES.items():
        for chain in _chains(scene.blocks, axis):
            colors = {b.color for b in chain}
            homogeneous = chain[0].color if len(colors) == 1 else None
            groups.append(
                Group(
                    kind=kind,
                    members=tuple(b.id for b in chain),
                    axis=axis,
                    homogeneous_color=homogeneous,
                )
            )
            if homogeneous is None:
                for run in _color_subruns(chain):
                    groups.append(
                        Group(
                            kind=kind,
                            members=tuple(b.id for b in run),
                            axis=axis,
                            homogeneous_color=run[0].color,
                        )
                    )
    return tuple(sorted(groups, key=lambda g: g.id))


@dataclass(frozen=True)
class CandidateSet:
    """Every entity a directive may refer to: blocks, formations, table."""

    blocks: tuple
    groups: tuple
    table: TableGeometry

    def entities(self):
        yield from self.blocks
        yield from self.groups
        yield self.table

    def entity_ids(self) -> list:
        return [entity_id(e) for e in self.entities()]

    def find(self, eid: str):
        for e in self.entities():
            if entity_id(e) == eid:
                return e
        return None

    def without(self, eid: str) -> "CandidateSet":
        return CandidateSet(
            blocks=tuple(b for b in self.blocks if b.id != eid),
            groups=tuple(g for g in self.groups if g.id != eid),
            table=self.table,
        )


def entity_id(entity) -> str:
    if isinstance(entity, Block):
        return entity.id
    if isinstance(entity, Group):
        return entity.id
    if isinstance(entity, TableGeometry):
        return TABLE_ID
    raise TypeError(f"not an entity: {entity!r}")


def ref_type(entity) -> str:
    if isinstance(entity, Block):
        return "block"
    if isinstance(entity, Group):
        return entity.kind
    if isinstance(entity, TableGeometry):
        return "table"
    raise TypeError(f"not an entity: {entity!r}")


def candidate_set(scene: Scene) -> CandidateSet:
    return CandidateSet(blocks=scene.blocks, groups=detect_groups(scene), table=scene.table)
