"""Turning machine moves into ranked English placement directives.

For a move(block, toPos) the generator evaluates every spatial relation
the target position holds against the candidate set (blocks, formations,
table), grounds each relation with a minimal unambiguous description of
its reference entity (recursing through further relations when an entity
has no unique description of its own), injects history-based variants
("it", "the previous block", "Add one more."), and returns the ranked
alternatives with the cheapest selectable one marked best.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Tuple

from .costs import (
    CoefficientTable,
    DEFAULT_TABLE,
    DepthOverflowError,
    FeatureVector,
    cost as cost_of,
    feature_vector,
)
from .describe import DescriptionConfig, minimal_unique_descriptions
from .directive_tree import (
    CAT_COL,
    CAT_CON,
    CAT_ORD,
    CAT_REF,
    ContextAction,
    Descriptor,
    EntityDesc,
    PutDirective,
    Relation,
    realize,
)
from .grouping import CandidateSet, Group, candidate_set, entity_id, ref_type
from .predicates import (
    ACCEPTANCE,
    Predicate,
    evaluate_relations,
    field_value,
    entity_center,
)
from .resolver import resolve_entity
from .scene import Block, MoveDirective, Scene, TableGeometry, Vec3, apply_move

#: Predicates a directive may instruct with (below and the diffuse
#: proximity predicates direct no realizable placement).
DIRECTIVE_KINDS = (
    Predicate.ON_TOP,
    Predicate.BEHIND,
    Predicate.IN_FRONT,
    Predicate.LEFT_OF,
    Predicate.RIGHT_OF,
    Predicate.ON_TABLE,
    Predicate.AT_CENTER,
    Predicate.AT_CORNER,
)


@dataclass(frozen=True)
class InteractionContext:
    """Dialog, task, and action history feeding context injection."""

    last_mentioned: Optional[str] = None
    last_acted: Optional[str] = None
    last_directive: Optional[Tuple[str, str]] = None  # (predicate value, support id)
    placement_order: Dict[str, int] = field(default_factory=dict)

    def advanced(self, placed_id: str, support_id: Optional[str]) -> "InteractionContext":
        """History after successfully executing a placement."""
        order = dict(self.placement_order)
        order[placed_id] = len(order) + 1
        act = (Predicate.ON_TOP.value, support_id) if support_id else (Predicate.ON_TABLE.value, "table")
        return InteractionContext(
            last_mentioned=placed_id,
            last_acted=placed_id,
            last_directive=act,
            placement_order=order,
        )


@dataclass(frozen=True)
class EngineConfig:
    d_max: int = 3
    max_alternatives: int = 64
    table: CoefficientTable = DEFAULT_TABLE
    description: DescriptionConfig = DescriptionConfig()
    threshold: float = ACCEPTANCE

    def __post_init__(self):
        if self.d_max < 1:
            raise ValueError("d_max must be >= 1")


@dataclass(frozen=True)
class Alternative:
    """One candidate utterance with its complexity accounting."""

    tree: object
    surface: str
    depth: int
    features: FeatureVector
    cost: float
    selectable: bool = True

    @property
    def props(self) -> int:
        return self.features.total()


@dataclass(frozen=True)
class GenerationResult:
    best: Alternative
    alternatives: tuple  # ranked, best included


class GenerationError(RuntimeError):
    def __init__(self, message: str, partial: tuple = ()):  # noqa: D107
        super().__init__(message)
        self.partial = partial


def _rank_key(alt: Alternative):
    return (round(alt.cost, 12), alt.depth, alt.props, alt.surface)


def _make_alternative(tree, table: CoefficientTable, selectable: bool = True) -> Alternative:
    features = feature_vector(tree)
    return Alternative(
        tree=tree,
        surface=realize(tree),
        depth=features.depth(),
        features=features,
        cost=cost_of(features, table),
        selectable=selectable,
    )


def _context_grounds(ground, ctx: InteractionContext) -> List[Tuple[EntityDesc, bool]]:
    """History-based substitute descriptions for a ground entity.

    Block-level substitutions ("it", "the previous block", "the block you
    just placed") compete for selection.  Formation-level forms ("the same
    stack", "the stack you just made") are reported as supplementary
    phrasings only; selection keeps the perceptually grounded description.
    """
    gid = entity_id(ground)
    variants: List[Tuple[EntityDesc, bool]] = []
    if isinstance(ground, Block):
        it_referent = ctx.last_acted or ctx.last_mentioned
        if gid == it_referent:
            variants.append((EntityDesc(gid, (Descriptor(CAT_CON, "it"),)), True))
        if gid == ctx.last_acted:
            variants.append(
                (EntityDesc(gid, (Descriptor(CAT_REF, "block"), Descriptor(CAT_CON, "previous"))), True)
            )
            variants.append(
                (EntityDesc(gid, (Descriptor(CAT_REF, "block"), Descriptor(CAT_CON, "just_placed"))), True)
            )
    elif isinstance(ground, Group) and ctx.last_acted in ground.members:
        for token in ("same", "just_made"):
            variants.append(
                (EntityDesc(gid, (Descriptor(CAT_REF, ground.kind), Descriptor(CAT_CON, token))), False)
            )
    return variants


def _describe_by_relation(ground, scene: Scene, cs: CandidateSet, ctx: InteractionContext,
                          depth: int, config: EngineConfig) -> List[EntityDesc]:
    """Describe an entity through a spatial relation to another entity.

    Used when the entity has no unique description of its own; the
    qualifying ground must resolve uniquely and the composite must single
    out the entity within its comparison class.
    """
    if depth > config.d_max:
        return []
    gid = entity_id(ground)
    point = entity_center(ground, scene)
    # The entity itself is no longer in cs; it still competes for reference.
    peers = [ground] + [e for e in cs.entities() if ref_type(e) == ref_type(ground)]
    candidates: List[EntityDesc] = []
    relations = evaluate_relations(
        point, scene, cs, figure_id=gid,
        kinds=[k for k in DIRECTIVE_KINDS if k not in
               (Predicate.ON_TABLE, Predicate.AT_CENTER, Predicate.AT_CORNER)],
        threshold=config.threshold,
    )
    for rel in relations:
        anchor = cs.find(rel.ground)
        described = minimal_unique_descriptions(
            anchor, scene, cs, ctx, depth=depth, d_max=config.d_max,
            table=config.table, config=config.description,
        )
        anchor_descs: List[EntityDesc] = [
            EntityDesc(rel.ground, descs, locs) for descs, locs in described
        ]
        if not anchor_descs:
            anchor_descs = _describe_by_relation(
                anchor, scene, cs.without(rel.ground), ctx, depth + 1, config
            )
        for anchor_desc in anchor_descs:
            satisfied = [
                entity_id(p) for p in peers
                if field_value(rel.kind, anchor, entity_center(p, scene), scene)
                >= config.threshold
            ]
            if satisfied != [gid]:
                continue
            candidate = EntityDesc(
                gid,
                (Descriptor(CAT_REF, ref_type(ground)),),
                (),
                qualifier=Relation(rel.kind, anchor_desc),
            )
            # A listener reads the anchor phrase against the whole scene,
            # self excepted, so the composite must survive full-scene
            # interpretation ("the block behind the green block" fails
            # when a second green block puts another peer behind one).
            if resolve_entity(candidate, scene, candidate_set(scene), ctx) != {gid}:
                continue
            candidates.append(candidate)
    return candidates


def _action_context(move: MoveDirective, scene: Scene, ctx: InteractionContext) -> Optional[ContextAction]:
    """Repetition form: the previous step stacked a block and this step
    stacks another one onto it."""
    support = scene.support_of(move.to_pos)
    if (
        support is not None
        and ctx.last_acted == support.id
        and ctx.last_directive is not None
        and ctx.last_directive[0] == Predicate.ON_TOP.value
    ):
        return ContextAction("add_one_more")
    return None


def generate(move: MoveDirective, scene: Scene, ctx: InteractionContext = InteractionContext(),
             config: EngineConfig = EngineConfig()) -> GenerationResult:
    """All grounded directive alternatives for a move, cheapest first."""
    cs = candidate_set(scene)
    if move.block_id is not None:
        # A moved block cannot ground its own directive, nor can the
        # formations its old position participates in.
        cs = CandidateSet(
            blocks=tuple(b for b in cs.blocks if b.id != move.block_id),
            groups=tuple(g for g in cs.groups if move.block_id not in g.members),
            table=cs.table,
        )
    point = move.to_pos
    raw: List[Alternative] = []
    relations = evaluate_relations(
        point, scene, cs, kinds=DIRECTIVE_KINDS, threshold=config.threshold
    )
    for rel in relations:
        ground = cs.find(rel.ground)
        grounded: List[Tuple[EntityDesc, bool]] = []
        described = minimal_unique_descriptions(
            ground, scene, cs, ctx, depth=1, d_max=config.d_max,
            table=config.table, config=config.description,
        )
        for descs, locs in described:
            grounded.append((EntityDesc(rel.ground, descs, locs), True))
        if not described and not isinstance(ground, TableGeometry):
            qualified = _describe_by_relation(ground, scene, cs.without(rel.ground), ctx, 2, config)
            if qualified:
                scored = []
                for desc in qualified:
                    tree = PutDirective(Relation(rel.kind, desc))
                    try:
                        scored.append(_make_alternative(tree, config.table))
                    except DepthOverflowError:
                        continue
                if scored:
                    cheapest = min(scored, key=_rank_key)
                    grounded.append((cheapest.tree.result.ground, True))
        grounded.extend(_context_grounds(ground, ctx))
        for desc, selectable in grounded:
            tree = PutDirective(Relation(rel.kind, desc))
            try:
                alt = _make_alternative(tree, config.table, selectable)
            except DepthOverflowError:
                continue
            if alt.depth > config.d_max:
                continue
            raw.append(alt)

    action = _action_context(move, scene, ctx)
    if action is not None:
        raw.append(_make_alternative(action, config.table))

    # Within one batch the surface form identifies the alternative.
    by_surface: Dict[str, Alternative] = {}
    for alt in raw:
        kept = by_surface.get(alt.surface)
        if kept is None or _rank_key(alt) < _rank_key(kept):
            by_surface[alt.surface] = alt
    ranked = sorted(by_surface.values(), key=_rank_key)[: config.max_alternatives]

    selectable = [a for a in ranked if a.selectable]
    if not selectable:
        raise GenerationError(
            f"no unambiguous directive found within depth {config.d_max}",
            partial=tuple(ranked),
        )
    return GenerationResult(best=selectable[0], alternatives=tuple(ranked))


def naive_generate(move: MoveDirective, scene: Scene,
                   ctx: Optional[InteractionContext] = None,
                   table: CoefficientTable = DEFAULT_TABLE) -> Alternative:
    """Unoptimized baseline: full property conjunction, no uniqueness check.

    Describes the placement relative to the nearest block using every
    applicable property (color, position ordinal, all locative tags), or
    relative to the table when the scene is empty.
    """
    from .describe import locative_tags

    cs = candidate_set(scene)
    point = move.to_pos
    blocks = [b for b in scene.blocks if b.id != move.block_id]
    if not blocks:
        kind = Predicate.ON_TABLE
        for location in (Predicate.AT_CENTER, Predicate.AT_CORNER):
            if field_value(location, scene.table, point, scene) >= ACCEPTANCE:
                kind = location
                break
        ground_desc = EntityDesc("table", (Descriptor(CAT_REF, "table"),))
        return _make_alternative(PutDirective(Relation(kind, ground_desc)), table)

    nearest = min(blocks, key=lambda b: (point.distance(b.position), b.id))
    kind = max(DIRECTIVE_KINDS[:5], key=lambda k: (field_value(k, nearest, point, scene), k.value))
    descriptors = [Descriptor(CAT_REF, "block"), Descriptor(CAT_COL, nearest.color)]
    if ctx is not None and nearest.id in ctx.placement_order:
        descriptors.insert(0, Descriptor(CAT_ORD, str(ctx.placement_order[nearest.id])))
    tags = locative_tags(nearest, scene, cs)
    desc = EntityDesc(nearest.id, tuple(descriptors), tags)
    return _make_alternative(PutDirective(Relation(kind, desc)), table)


@dataclass(frozen=True)
class StepReport:
    index: int
    move: MoveDirective
    placed_id: Optional[str]
    result: Optional[GenerationResult]
    naive: Optional[Alternative]
    error: Optional[str]


def narrate_plan(scene: Scene, plan, config: EngineConfig = EngineConfig(),
                 generator: str = "egt") -> List[StepReport]:
    """Narrate a plan step by step, threading interaction history through.

    Steps are narrated assuming each previous step was executed as
    instructed.  A step whose move cannot be applied or described yields
    an error report; narration continues with the scene unchanged.
    """
    reports: List[StepReport] = []
    ctx = InteractionContext()
    for index, move in enumerate(plan):
        try:
            next_scene, placed_id = apply_move(scene, move)
        except Exception as exc:
            reports.append(StepReport(index, move, None, None, None, str(exc)))
            continue
        support = scene.support_of(move.to_pos)
        naive = naive_generate(move, scene, ctx, config.table)
        if generator == "naive":
            result = GenerationResult(best=naive, alternatives=(naive,))
            error = None
        else:
            try:
                result = generate(move, scene, ctx, config)
                error = None
            except GenerationError as exc:
                result = None
                error = str(exc)
        reports.append(StepReport(index, move, placed_id, result, naive, error))
        if result is not None:
            scene = next_scene
            ctx = ctx.advanced(placed_id, support.id if support else None)
    return reports
