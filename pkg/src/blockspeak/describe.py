"""Minimal unambiguous referring descriptions for scene entities.

An entity's description is a set of descriptors (type, color, count,
order, degree modifier) plus locative tags.  Uniqueness is extensional:
a description is unique when no other entity of the same type matches it.
Returned descriptions are concise (no proper subset is itself unique) and
ranked by their realized contribution to directive cost, where each
locative tag is a relation feature one chain level deeper than the
ground's own descriptors.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, List, Optional, Tuple

from .costs import MAX_DEPTH, CoefficientTable, DEFAULT_TABLE
from .directive_tree import (
    CAT_CNT,
    CAT_COL,
    CAT_DM,
    CAT_ORD,
    CAT_REF,
    Descriptor,
    LOCATIVES,
)
from .grouping import CandidateSet, Group, entity_id, ref_type
from .scene import Block, Scene, TableGeometry

EXTREMAL_MARGIN = 0.5
EXTREMAL_SLACK = 0.25

DEGREE_MODIFIERS = {
    "front": "frontmost",
    "back": "backmost",
    "left": "leftmost",
    "right": "rightmost",
}


@dataclass(frozen=True)
class DescriptionConfig:
    max_descriptors: int = 3
    use_order: bool = False
    use_degree_modifiers: bool = False


def comparison_class(entity, cs: CandidateSet) -> list:
    """Entities the given one competes with for reference resolution."""
    kind = ref_type(entity)
    return [e for e in cs.entities() if ref_type(e) == kind]


def _axis_center(entity, scene: Scene, axis: str) -> float:
    if isinstance(entity, Block):
        return getattr(entity.position, axis)
    if isinstance(entity, Group):
        coords = [getattr(scene.by_id(m).position, axis) for m in entity.members]
        return (min(coords) + max(coords)) / 2
    raise TypeError(f"no axis center for {entity!r}")


def _stack_of(block: Block, cs: CandidateSet) -> Optional[Group]:
    stacks = [g for g in cs.groups if g.kind == "stack" and block.id in g.members]
    if not stacks:
        return None
    return max(stacks, key=lambda g: (len(g.members), g.id))


def locative_tags(entity, scene: Scene, cs: CandidateSet) -> tuple:
    """Locative tags true of an entity, in canonical realization order.

    Vertical tags come from the entity's position within its stack;
    horizontal tags from being at the extreme of its comparison class
    (within EXTREMAL_SLACK of the extreme, with some other member at
    least EXTREMAL_MARGIN away, so the tag is informative).
    """
    if isinstance(entity, TableGeometry):
        return ()
    tags = []
    if isinstance(entity, Block):
        stack = _stack_of(entity, cs)
        if stack is not None:
            index = stack.members.index(entity.id)
            if index == len(stack.members) - 1:
                tags.append("top")
            elif index == 0:
                tags.append("bottom")
            else:
                tags.append("middle")
    peers = comparison_class(entity, cs)
    for axis, low_tag, high_tag in (("z", "front", "back"), ("x", "left", "right")):
        coords = {entity_id(p): _axis_center(p, scene, axis) for p in peers}
        own = coords[entity_id(entity)]
        lo, hi = min(coords.values()), max(coords.values())
        if own <= lo + EXTREMAL_SLACK and any(c >= own + EXTREMAL_MARGIN for c in coords.values()):
            tags.append(low_tag)
        if own >= hi - EXTREMAL_SLACK and any(c <= own - EXTREMAL_MARGIN for c in coords.values()):
            tags.append(high_tag)
    return tuple(sorted(tags, key=LOCATIVES.index))


def base_descriptors(entity, scene: Scene, cs: CandidateSet, ctx=None,
                     config: DescriptionConfig = DescriptionConfig()) -> list:
    """Optional plain descriptors applicable to an entity (REF excluded)."""
    optional = []
    if isinstance(entity, Block):
        optional.append(Descriptor(CAT_COL, entity.color))
        if config.use_order and ctx is not None:
            ordinal = ctx.placement_order.get(entity.id)
            if ordinal is not None:
                optional.append(Descriptor(CAT_ORD, str(ordinal)))
    elif isinstance(entity, Group):
        if entity.homogeneous_color:
            optional.append(Descriptor(CAT_COL, entity.homogeneous_color))
        optional.append(Descriptor(CAT_CNT, str(len(entity.members))))
    if config.use_degree_modifiers:
        for tag in locative_tags(entity, scene, cs):
            if tag in DEGREE_MODIFIERS:
                optional.append(Descriptor(CAT_DM, DEGREE_MODIFIERS[tag]))
    return optional


def matches(entity, descriptors: Iterable[Descriptor], locatives: Iterable[str],
            scene: Scene, cs: CandidateSet, ctx=None) -> bool:
    """True iff every descriptor and locative tag holds of the entity."""
    tags = set(locative_tags(entity, scene, cs))
    for tag in locatives:
        if tag not in tags:
            return False
    for d in descriptors:
        if d.category == CAT_REF:
            if ref_type(entity) != d.value:
                return False
        elif d.category == CAT_COL:
            if isinstance(entity, Block):
                if entity.color != d.value:
                    return False
            elif isinstance(entity, Group):
                if entity.homogeneous_color != d.value:
                    return False
            else:
                return False
        elif d.category == CAT_CNT:
            if not isinstance(entity, Group) or str(len(entity.members)) != d.value:
                return False
        elif d.category == CAT_ORD:
            if ctx is None or not isinstance(entity, Block):
                return False
            if str(ctx.placement_order.get(entity.id)) != d.value:
                return False
        elif d.category == CAT_DM:
            wanted = [tag for tag, dm in DEGREE_MODIFIERS.items() if dm == d.value]
            if not wanted or wanted[0] not in tags:
                return False
        else:
            # Context descriptors are resolved against the interaction
            # history, not the scene; they never reach this path.
            return False
    return True


Description = Tuple[Tuple[Descriptor, ...], Tuple[str, ...]]


def unique_descriptions(entity, scene: Scene, cs: CandidateSet, ctx=None,
                        config: DescriptionConfig = DescriptionConfig()) -> List[Description]:
    """All concise descriptions matching this entity and no class peer.

    Concise: no proper sub-description (that still names the type) is
    itself unique.  The table is always uniquely "the table".
    """
    ref = Descriptor(CAT_REF, ref_type(entity))
    peers = [p for p in comparison_class(entity, cs) if entity_id(p) != entity_id(entity)]
    optional = base_descriptors(entity, scene, cs, ctx, config)
    tags = locative_tags(entity, scene, cs)

    def is_unique(descs, locs):
        return not any(matches(p, descs, locs, scene, cs, ctx) for p in peers)

    found: List[Description] = []
    budget = config.max_descriptors - 1
    for size in range(0, budget + 1):
        for n_opt in range(0, min(size, len(optional)) + 1):
            n_loc = size - n_opt
            if n_loc > len(tags):
                continue
            for opt in combinations(optional, n_opt):
                for locs in combinations(tags, n_loc):
                    descs = (ref,) + opt
                    if not is_unique(descs, locs):
                        continue
                    subset_of_found = any(
                        set(f_descs) <= set(descs) and set(f_locs) <= set(locs)
                        and (len(f_descs) + len(f_locs)) < (len(descs) + len(locs))
                        for f_descs, f_locs in found
                    )
                    if not subset_of_found:
                        found.append((descs, tuple(sorted(locs, key=LOCATIVES.index))))
    found.sort(key=lambda d: (len(d[0]) + len(d[1]), repr(d)))
    return found


_TIE_PRIORITY = {CAT_COL: 0, "LOC": 1, "CON": 2, CAT_CNT: 3, CAT_ORD: 4, CAT_DM: 5}


def realized_description_cost(descs: Tuple[Descriptor, ...], locs: Tuple[str, ...],
                              depth: int, table: CoefficientTable = DEFAULT_TABLE) -> float:
    """Contribution of a ground description introduced at a chain depth.

    Plain descriptors weigh in at the introducing depth; each locative tag
    is a relation feature at the next depth down the chain.
    """
    total = sum(table.weight(d.category, depth) for d in descs)
    for i in range(len(locs)):
        total += table.weight("REL", depth + 1 + i)
    return total


def minimal_unique_descriptions(entity, scene: Scene, cs: CandidateSet, ctx=None,
                                depth: int = 1, d_max: int = 3,
                                table: CoefficientTable = DEFAULT_TABLE,
                                config: DescriptionConfig = DescriptionConfig()) -> List[Description]:
    """The cheapest unique descriptions usable at the given chain depth."""
    candidates = [
        (descs, locs)
        for descs, locs in unique_descriptions(entity, scene, cs, ctx, config)
        if depth + len(locs) <= min(d_max, MAX_DEPTH)
    ]
    if not candidates:
        return []

    def key(desc: Description):
        descs, locs = desc
        priorities = sorted(
            [_TIE_PRIORITY.get(d.category, 9) for d in descs if d.category != CAT_REF]
            + [_TIE_PRIORITY["LOC"]] * len(locs)
        )
        return (
            round(realized_description_cost(descs, locs, depth, table), 12),
            len(descs) + len(locs),
            tuple(priorities),
            repr(desc),
        )

    candidates.sort(key=key)
    best = key(candidates[0])[0]
    return [c for c in candidates if key(c)[0] == best]
