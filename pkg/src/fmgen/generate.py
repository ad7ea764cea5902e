"""Class dispatch and verified batch generation."""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from typing import Optional

from .base import GenerationConfig, generate_normal, item_rng
from .errors import DomainError, RejectionError
from .korder import FAMILIES, KOrderSpec, generate_korder
from .psym import Partition, generate_p_symmetric
from .setfn import SetFunction
from .structured import generate_antibuoyant, generate_superadditive, generate_supermodular
from .verify import GENERATABLE, ClassReport, MeasureClassSpec, check_class, dual_label

THREADS_ENV = "FMGEN_THREADS"

_STRUCTURED = {
    "supermodular": generate_supermodular,
    "antibuoyant": generate_antibuoyant,
    "superadditive": generate_superadditive,
}


def _check_generatable(n: int, spec: MeasureClassSpec) -> None:
    base = spec.tag
    if base not in GENERATABLE:
        hint = dual_label(spec.label())
        raise DomainError(f"no native generator for {spec.label()}; generate {hint} and apply the dual")
    if spec.k is not None and spec.k > n:
        raise DomainError(f"k = {spec.k} exceeds n = {n}")
    if spec.tag == "p-symmetric" and Partition(spec.partition).n != n:
        raise DomainError(f"partition does not cover 1..{n}")


def generate_one(n: int, spec: MeasureClassSpec, config: GenerationConfig, index: int) -> SetFunction:
    """Measure number ``index`` of the batch fixed by ``config.seed``."""
    _check_generatable(n, spec)
    rng = item_rng(config.seed, index)
    tag = spec.tag
    if tag == "normal":
        return generate_normal(n, config, rng)
    if tag in _STRUCTURED:
        return _STRUCTURED[tag](n, config, rng, spec.strict)
    if tag == "p-symmetric":
        return generate_p_symmetric(Partition(spec.partition), spec.inner, config, rng, spec.strict)
    family = tag[2:]
    assert family in FAMILIES
    return generate_korder(n, KOrderSpec(spec.k, family, spec.K), config, rng)


def verified_tags(spec: MeasureClassSpec, report: ClassReport) -> list[str]:
    """The class label, with index families re-tagged at their effective order."""
    if report.effective_k is not None and spec.k is not None and report.effective_k < spec.k:
        return [MeasureClassSpec(spec.tag, k=report.effective_k).label()]
    return [spec.label()]


def generate_verified(n: int, spec: MeasureClassSpec, config: GenerationConfig,
                      index: int) -> tuple[SetFunction, ClassReport]:
    mu = generate_one(n, spec, config, index)
    report = check_class(mu, spec, config.tolerance)
    if not report.passed:
        raise RejectionError(
            f"item {index}: generated measure fails {report.tag} ({report.witness}, "
            f"violation {report.worst_violation:.3g})", witness=report.witness)
    return mu, report


def _chunk(args):
    n, spec, config, indices = args
    return [generate_verified(n, spec, config, i) for i in indices]


def default_workers() -> int:
    env = os.environ.get(THREADS_ENV)
    if env:
        try:
            value = int(env)
        except ValueError as exc:
            raise DomainError(f"{THREADS_ENV} must be an integer") from exc
        if value < 1:
            raise DomainError(f"{THREADS_ENV} must be positive")
        return value
    return os.cpu_count() or 1


def generate_batch(n: int, spec: MeasureClassSpec, config: GenerationConfig, count: int,
                   workers: Optional[int] = None) -> list[tuple[SetFunction, ClassReport]]:
    """``count`` verified measures, in index order whatever the worker count."""
    _check_generatable(n, spec)
    if count < 0:
        raise DomainError("count must be nonnegative")
    workers = default_workers() if workers is None else workers
    if workers <= 1 or count < 2 * workers:
        return [generate_verified(n, spec, config, i) for i in range(count)]
    size = -(-count // (4 * workers))
    chunks = [(n, spec, config, range(s, min(s + size, count))) for s in range(0, count, size)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return [item for part in pool.map(_chunk, chunks) for item in part]
