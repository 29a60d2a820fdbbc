"""blockspeak: turn machine block placements into cost-optimal English directives."""

from .costs import CoefficientTable, DEFAULT_TABLE, FeatureVector, fit_coefficients
from .engine import (
    EngineConfig,
    GenerationError,
    GenerationResult,
    InteractionContext,
    generate,
    naive_generate,
    narrate_plan,
)
from .resolver import check_placement, resolve_directive, resolve_entity
from .scene import (
    Block,
    MoveDirective,
    Scene,
    TableGeometry,
    Vec3,
    apply_move,
    load_plan,
    load_scene,
    serialize_scene,
)

__all__ = [
    "Block", "CoefficientTable", "DEFAULT_TABLE", "EngineConfig", "FeatureVector",
    "GenerationError", "GenerationResult", "InteractionContext", "MoveDirective",
    "Scene", "TableGeometry", "Vec3", "apply_move", "check_placement",
    "fit_coefficients", "generate", "load_plan", "load_scene", "naive_generate",
    "narrate_plan", "resolve_directive", "resolve_entity", "serialize_scene",
]

__version__ = "0.1.0"
