"""Tree representation of placement directives and their English surface.

A directive is a small immutable tree: a put-node whose result is a
spatial relation (or conjunction of relations sharing one figure) whose
ground is an entity description.  Entity descriptions carry plain
descriptors (type, color, context, count, order, degree modifier),
locative tags realized as phrases like "at the back", and optionally a
deeper qualifying relation ("the block to the left of the red block").
Pure action-context directives ("Add one more.") are leaf nodes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional, Union

from .predicates import Predicate

# Descriptor categories (REL is the relation feature used only in costing).
CAT_REF = "REF"
CAT_COL = "COL"
CAT_DM = "DM"
CAT_CON = "CON"
CAT_CNT = "CNT"
CAT_ORD = "ORD"
CAT_LOC = "LOC"


@dataclass(frozen=True)
class Descriptor:
    category: str
    value: str

    def __post_init__(self):
        if self.category not in (CAT_REF, CAT_COL, CAT_DM, CAT_CON, CAT_CNT, CAT_ORD, CAT_LOC):
            raise ValueError(f"unknown descriptor category: {self.category}")


# Locative tags; order also fixes realization order ("on the top and at
# the back", "at the back and on the left").
LOCATIVES = ("top", "bottom", "middle", "back", "front", "left", "right")

LOCATIVE_PHRASES = {
    "top": "on the top",
    "bottom": "at the bottom",
    "middle": "in the middle",
    "back": "at the back",
    "front": "at the front",
    "left": "on the left",
    "right": "on the right",
}


@dataclass(frozen=True)
class EntityDesc:
    """A referring expression for one entity."""

    referent: str  # resolved entity id; "" when not grounded yet
    descriptors: tuple = ()
    locatives: tuple = ()
    qualifier: Optional["Relation"] = None

    def get(self, category: str) -> Optional[str]:
        for d in self.descriptors:
            if d.category == category:
                return d.value
        return None


@dataclass(frozen=True)
class Relation:
    kind: Predicate
    ground: EntityDesc


@dataclass(frozen=True)
class Conjunction:
    relations: tuple

    def __post_init__(self):
        if len(self.relations) < 2:
            raise ValueError("a conjunction needs at least two relations")


@dataclass(frozen=True)
class PutDirective:
    result: Union[Relation, Conjunction]


@dataclass(frozen=True)
class ContextAction:
    kind: str = "add_one_more"  # or "repeat"


DirectiveTree = Union[PutDirective, ContextAction]


class RealizationError(ValueError):
    """Raised for tree nodes outside the template lexicon."""


REL_PHRASES = {
    Predicate.ON_TOP: "on top of",
    Predicate.BELOW: "below",
    Predicate.BEHIND: "behind",
    Predicate.IN_FRONT: "in front of",
    Predicate.LEFT_OF: "to the left of",
    Predicate.RIGHT_OF: "to the right of",
    Predicate.ON_TABLE: "on",
    Predicate.AT_CENTER: "at the center of",
    Predicate.AT_CORNER: "at the corner of",
    Predicate.NEXT_TO: "next to",
    Predicate.NEAR: "near",
    Predicate.FAR: "far from",
}

_ORDINALS = {
    "1": "first", "2": "second", "3": "third", "4": "fourth", "5": "fifth",
    "6": "sixth", "7": "seventh", "8": "eighth", "9": "ninth", "10": "tenth",
}

_COUNTS = {
    "2": "two", "3": "three", "4": "four", "5": "five",
    "6": "six", "7": "seven", "8": "eight",
}


def _noun_phrase(entity: EntityDesc) -> str:
    con = entity.get(CAT_CON)
    if con == "it":
        return "it"

    words = ["the"]
    if con == "same":
        words.append("same")
    if con == "previous":
        words.append("previous")
    ord_value = entity.get(CAT_ORD)
    if ord_value:
        try:
            words.append(_ORDINALS[ord_value])
        except KeyError as exc:
            raise RealizationError(f"no ordinal word for {ord_value}") from exc
    dm = entity.get(CAT_DM)
    if dm:
        words.append(dm)
    col = entity.get(CAT_COL)
    if col:
        words.append(col)
    ref = entity.get(CAT_REF)
    if not ref:
        raise RealizationError(f"entity without a type or context: {entity}")
    words.append(ref)
    phrase = " ".join(words)

    cnt = entity.get(CAT_CNT)
    if cnt:
        try:
            phrase += f" of {_COUNTS[cnt]}"
        except KeyError as exc:
            raise RealizationError(f"no count word for {cnt}") from exc
    if con == "just_placed":
        phrase += " you just placed"
    elif con == "just_made":
        phrase += " you just made"

    if entity.locatives:
        phrases = [LOCATIVE_PHRASES[loc] for loc in entity.locatives]
        if len(phrases) == 1:
            phrase += f" {phrases[0]}"
        else:
            phrase += " that is " + " and ".join(phrases)
    if entity.qualifier is not None:
        phrase += f" {_relation_phrase(entity.qualifier)}"
    return phrase


def _relation_phrase(rel: Relation) -> str:
    try:
        lead = REL_PHRASES[rel.kind]
    except KeyError as exc:
        raise RealizationError(f"no phrase for predicate {rel.kind}") from exc
    return f"{lead} {_noun_phrase(rel.ground)}"


def realize(tree: DirectiveTree) -> str:
    """Deterministic template expansion of a directive tree."""
    if isinstance(tree, ContextAction):
        if tree.kind == "add_one_more":
            return "Add one more."
        if tree.kind == "repeat":
            return "Repeat one more time."
        raise RealizationError(f"unknown action-context kind: {tree.kind}")
    if isinstance(tree, PutDirective):
        result = tree.result
        if isinstance(result, Relation):
            body = _relation_phrase(result)
        else:
            body = " and ".join(_relation_phrase(r) for r in result.relations)
        return f"Put a block {body}."
    raise RealizationError(f"not a directive tree: {tree!r}")


# Canonical serialization (kind-tagged nested JSON) for logs and tests.

def _entity_to_data(e: EntityDesc) -> dict:
    data = {
        "node": "entity",
        "referent": e.referent,
        "descriptors": [[d.category, d.value] for d in e.descriptors],
        "locatives": list(e.locatives),
    }
    if e.qualifier is not None:
        data["qualifier"] = _relation_to_data(e.qualifier)
    return data


def _relation_to_data(r: Relation) -> dict:
    return {"node": "relation", "kind": r.kind.value, "ground": _entity_to_data(r.ground)}


def tree_to_data(tree: DirectiveTree) -> dict:
    if isinstance(tree, ContextAction):
        return {"node": "action", "kind": tree.kind}
    result = tree.result
    if isinstance(result, Relation):
        return {"node": "put", "result": _relation_to_data(result)}
    return {
        "node": "put",
        "result": {
            "node": "and",
            "relations": [_relation_to_data(r) for r in result.relations],
        },
    }


def tree_to_json(tree: DirectiveTree) -> str:
    return json.dumps(tree_to_data(tree), sort_keys=True)


def _entity_from_data(data: dict) -> EntityDesc:
    return EntityDesc(
        referent=data["referent"],
        descriptors=tuple(Descriptor(c, v) for c, v in data["descriptors"]),
        locatives=tuple(data["locatives"]),
        qualifier=_relation_from_data(data["qualifier"]) if "qualifier" in data else None,
    )


def _relation_from_data(data: dict) -> Relation:
    return Relation(kind=Predicate(data["kind"]), ground=_entity_from_data(data["ground"]))


def tree_from_json(text: str) -> DirectiveTree:
    data = json.loads(text)
    if data["node"] == "action":
        return ContextAction(kind=data["kind"])
    result = data["result"]
    if result["node"] == "and":
        return PutDirective(
            result=Conjunction(tuple(_relation_from_data(r) for r in result["relations"]))
        )
    return PutDirective(result=_relation_from_data(result))
