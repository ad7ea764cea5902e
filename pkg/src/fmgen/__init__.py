"""Random generation and verification of capacities (fuzzy measures)."""

from __future__ import annotations

__version__ = "0.1.0"

from .errors import (
    CapabilityError, DegenerateInputError, DomainError, FmgenError, InfeasibleError, RejectionError,
)
from .setfn import (
    SetFunction, dual, index_report, mobius_transform, nonadditivity_index, nonmodularity_index,
    normalize, zeta_transform,
)
from .linext import LinearExtension, count_extensions, enumerate_extensions, extension_of, repetition_ratio
from .base import GenerationConfig, generate_normal
from .verify import ClassReport, MeasureClassSpec, check_class, classify
from .korder import KOrderSpec, extend_upper, korder_range, perturb_korder
from .psym import Partition, generate_p_symmetric
from .generate import generate_batch, generate_one

__all__ = [
    "__version__",
    "FmgenError", "DomainError", "DegenerateInputError", "InfeasibleError", "CapabilityError", "RejectionError",
    "SetFunction", "dual", "normalize", "mobius_transform", "zeta_transform",
    "nonadditivity_index", "nonmodularity_index", "index_report",
    "LinearExtension", "extension_of", "count_extensions", "enumerate_extensions", "repetition_ratio",
    "GenerationConfig", "generate_normal",
    "MeasureClassSpec", "ClassReport", "check_class", "classify",
    "KOrderSpec", "extend_upper", "korder_range", "perturb_korder",
    "Partition", "generate_p_symmetric",
    "generate_batch", "generate_one",
]
