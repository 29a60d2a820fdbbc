"""Brute-force interpreter of generated directives against the scene.

This is the referee: it re-derives descriptor satisfaction and relation
acceptance by exhaustive enumeration over all candidate entities and grid
search over the table, independently of the generator's pruned search.
It answers two questions: which entities could a description refer to,
and does a concrete placement satisfy a directive.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Set

from .directive_tree import (
    CAT_CNT,
    CAT_COL,
    CAT_CON,
    CAT_DM,
    CAT_ORD,
    CAT_REF,
    Conjunction,
    ContextAction,
    DirectiveTree,
    EntityDesc,
    PutDirective,
    Relation,
)
from .grouping import CandidateSet, Group, candidate_set, entity_id
from .predicates import (
    ACCEPTANCE,
    Predicate,
    TargetRegion,
    entity_center,
    field_value,
    target_region,
)
from .scene import Block, Scene, TableGeometry, Vec3

GRID_PITCH = 0.25


class ResolutionError(ValueError):
    pass


class AmbiguousGroundError(ResolutionError):
    def __init__(self, description: EntityDesc, referents: Set[str]):
        super().__init__(
            f"description resolves to {sorted(referents)} instead of one entity"
        )
        self.description = description
        self.referents = referents


@dataclass(frozen=True)
class Resolution:
    referents: tuple  # unique ground ids, outermost first
    target: Optional[TargetRegion]


def _entity_type(entity) -> str:
    if isinstance(entity, Block):
        return "block"
    if isinstance(entity, Group):
        return entity.kind
    return "table"


def _vertical_tags(entity, cs: CandidateSet) -> Set[str]:
    if not isinstance(entity, Block):
        return set()
    stacks = [g for g in cs.groups if g.kind == "stack" and entity.id in g.members]
    if not stacks:
        return set()
    stack = max(stacks, key=lambda g: (len(g.members), g.id))
    index = stack.members.index(entity.id)
    if index == 0:
        return {"bottom"}
    if index == len(stack.members) - 1:
        return {"top"}
    return {"middle"}


def _extremal_tags(entity, scene: Scene, cs: CandidateSet) -> Set[str]:
    kind = _entity_type(entity)
    peers = [e for e in cs.entities() if _entity_type(e) == kind]
    centers = {entity_id(e): entity_center(e, scene) for e in peers}
    own = centers[entity_id(entity)]
    tags = set()
    for axis, low, high in (("z", "front", "back"), ("x", "left", "right")):
        coords = {eid: getattr(c, axis) for eid, c in centers.items()}
        v = coords[entity_id(entity)]
        if v <= min(coords.values()) + 0.25 and any(c >= v + 0.5 for c in coords.values()):
            tags.add(low)
        if v >= max(coords.values()) - 0.25 and any(c <= v - 0.5 for c in coords.values()):
            tags.add(high)
    return tags


def _satisfies_descriptor(entity, descriptor, scene: Scene, cs: CandidateSet, ctx) -> bool:
    cat, value = descriptor.category, descriptor.value
    if cat == CAT_REF:
        return _entity_type(entity) == value
    if cat == CAT_COL:
        if isinstance(entity, Block):
            return entity.color == value
        if isinstance(entity, Group):
            return entity.homogeneous_color == value
        return False
    if cat == CAT_CNT:
        return isinstance(entity, Group) and str(len(entity.members)) == value
    if cat == CAT_ORD:
        return (
            ctx is not None
            and isinstance(entity, Block)
            and str(ctx.placement_order.get(entity.id)) == value
        )
    if cat == CAT_DM:
        mapping = {"frontmost": "front", "backmost": "back", "leftmost": "left", "rightmost": "right"}
        tag = mapping.get(value)
        return tag is not None and tag in _extremal_tags(entity, scene, cs)
    if cat == CAT_CON:
        if ctx is None:
            return False
        if value in ("it", "previous", "just_placed"):
            if isinstance(entity, Block):
                return entity.id == ctx.last_acted or (
                    value == "it" and ctx.last_acted is None and entity.id == ctx.last_mentioned
                )
            return False
        if value in ("same", "just_made"):
            return isinstance(entity, Group) and ctx.last_acted in entity.members
        return False
    return False


def resolve_entity(description: EntityDesc, scene: Scene, cs: CandidateSet, ctx=None) -> Set[str]:
    """All candidate entity ids a description could refer to."""
    out = set()
    for entity in cs.entities():
        if not all(
            _satisfies_descriptor(entity, d, scene, cs, ctx) for d in description.descriptors
        ):
            continue
        tags = _vertical_tags(entity, cs) | _extremal_tags(entity, scene, cs)
        if not set(description.locatives) <= tags:
            continue
        if description.qualifier is not None:
            # "the column on top of the column": the inner phrase may be
            # ambiguous in isolation; the relation reads existentially over
            # its candidates (excluding the entity itself).
            inner = resolve_entity(description.qualifier.ground, scene, cs, ctx)
            inner.discard(entity_id(entity))
            center = entity_center(entity, scene)
            if not any(
                field_value(description.qualifier.kind, cs.find(i), center, scene)
                >= ACCEPTANCE
                for i in inner
            ):
                continue
        out.add(entity_id(entity))
    return out


def _relation_chain(tree: DirectiveTree, scene: Scene, cs: CandidateSet, ctx):
    """Resolve every ground of a directive; returns (ids, (kind, entity) pairs)."""
    if isinstance(tree, ContextAction):
        if ctx is None or ctx.last_acted is None:
            raise ResolutionError("action-context directive without a previous action")
        anchor = scene.by_id(ctx.last_acted)
        return (anchor.id,), ((Predicate.ON_TOP, anchor),)
    result = tree.result
    relations = result.relations if isinstance(result, Conjunction) else (result,)
    ids = []
    pairs = []
    for rel in relations:
        referents = resolve_entity(rel.ground, scene, cs, ctx)
        if len(referents) != 1:
            raise AmbiguousGroundError(rel.ground, referents)
        gid = next(iter(referents))
        ids.append(gid)
        pairs.append((rel.kind, cs.find(gid)))
    return tuple(ids), tuple(pairs)


def resolve_directive(tree: DirectiveTree, scene: Scene, ctx=None) -> Resolution:
    """Unique referents plus the placement region a directive denotes."""
    cs = candidate_set(scene)
    ids, pairs = _relation_chain(tree, scene, cs, ctx)
    region = target_region(list(pairs), scene, pitch=GRID_PITCH)
    return Resolution(referents=ids, target=region)


def check_placement(tree: DirectiveTree, placed_at: Vec3, scene: Scene, ctx=None) -> bool:
    """Did a concrete placement satisfy the directive?"""
    resolution = resolve_directive(tree, scene, ctx)
    return resolution.target.accepts(placed_at, scene)
