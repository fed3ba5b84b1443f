"""Flattened Luneburg lens design tools (Python bindings of the C++ core)."""

from ._flatlens import (
    BranchAmbiguityError,
    ConfigError,
    DomainError,
    IoError,
    LensSpec,
    NumericalError,
    PipelineConfig,
    center_permittivity,
    cmd_ab_weighting,
    cmd_discretize,
    cmd_material,
    cmd_scan,
    cmd_simulate,
    compute_tensors,
    forward_map,
    inverse_map,
    luneburg_eps,
    material_map,
    retrieve,
    scan,
    slab_sparams,
)

__all__ = [name for name in dir() if not name.startswith("_")]
