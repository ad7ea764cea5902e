"""Supermodular, antibuoyant and superadditive generation.

Seeds come from additive measures pushed into the interior of the class by
a shift; diversity then comes from range adjustments and class-preserving
random walks.  Every tentative move is re-checked locally by the oracle in
:mod:`fmgen.verify` and bisected back toward the old value if a constraint
breaks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Optional, Sequence, Union

import numpy as np

from .base import (
    AdditiveMeasure, Chain, GenerationConfig, _check_proper, _direction, adjust_in,
    diversify, monotone_bounds, sample_additive, walk_in,
)
from .errors import DomainError, InfeasibleError
from .setfn import EXACT_TOL, SetFunction, additive, mask_of
from .verify import local_slack

WeightsLike = Union[AdditiveMeasure, Sequence[float]]


@dataclass(frozen=True)
class RangeBounds:
    """Allowable interval for one value, with the terms that produced it.

    ``terms`` maps bound names (``l1``, ``Int_U``, ...) to their values;
    empty maxima and minima are omitted.
    """

    lower: float
    upper: float
    terms: dict = field(default_factory=dict)

    @property
    def feasible(self) -> bool:
        """Nonempty up to rounding: boundary points give ``lower = upper`` in exact arithmetic."""
        return self.lower <= self.upper + EXACT_TOL

    @property
    def width(self) -> float:
        return self.upper - self.lower

    def contains(self, x: float, tol: float = 0.0) -> bool:
        return self.lower - tol <= x <= self.upper + tol


def _weights(nu: WeightsLike) -> np.ndarray:
    w = np.asarray(nu.weights if isinstance(nu, AdditiveMeasure) else nu, dtype=np.float64)
    if w.ndim != 1 or len(w) < 2:
        raise DomainError("need at least two weights")
    return w


def _inside_outside(n: int, A: int):
    ins = [1 << i for i in range(n) if A >> i & 1]
    outs = [1 << i for i in range(n) if not A >> i & 1]
    return ins, outs


# ---------------------------------------------------------------- bound kernels
#
# Each kernel works on a plain list of values and returns
# (lower, upper, terms) where terms holds the individual bounds.

def supermodular_terms(v: list, n: int, A: int):
    ins, outs = _inside_outside(n, A)
    terms = {}
    if len(ins) >= 2:
        terms["l1"] = max(v[A ^ a] + v[A ^ b] - v[A ^ a ^ b] for a, b in combinations(ins, 2))
    if len(outs) >= 2:
        terms["l2"] = max(v[A | a] + v[A | b] - v[A | a | b] for a, b in combinations(outs, 2))
    terms["l3"] = min(v[A | j] - v[(A ^ i) | j] + v[A ^ i] for i in ins for j in outs)
    lo, hi = monotone_bounds(v, n, A)
    terms["Int_L"], terms["Int_U"] = lo, hi
    lower = max(terms.get("l1", -math.inf), terms.get("l2", -math.inf), lo)
    upper = min(terms["l3"], hi)
    return lower, upper, terms


def antibuoyant_terms(v: list, n: int, A: int):
    ins, outs = _inside_outside(n, A)
    terms = {}
    if len(ins) >= 2:
        # ordered pairs: A is the top of the constraint
        terms["l4"] = max(max(2 * v[A ^ b] - v[A ^ a ^ b], 2 * v[A ^ a] - v[A ^ a ^ b])
                          for a, b in combinations(ins, 2))
    if len(outs) >= 2:
        # A is the bottom of the constraint
        terms["l5"] = max(max(2 * v[A | b] - v[A | a | b], 2 * v[A | a] - v[A | a | b])
                          for a, b in combinations(outs, 2))
    terms["l6"] = min(0.5 * (v[A | i] + v[A ^ j]) for i in outs for j in ins)
    lo, hi = monotone_bounds(v, n, A)
    terms["Int_L"], terms["Int_U"] = lo, hi
    lower = max(terms.get("l4", -math.inf), terms.get("l5", -math.inf), lo)
    upper = min(terms["l6"], hi)
    return lower, upper, terms


def superadditive_terms(v: list, n: int, A: int):
    full = (1 << n) - 1
    terms = {}
    best = 0.0
    B = (A - 1) & A
    while B:
        s = v[B] + v[A ^ B]
        if s > best:
            best = s
        B = (B - 1) & A
    terms["l7"] = best
    rest = full & ~A
    worst = math.inf
    T = rest
    while T:
        d = v[A | T] - v[T]
        if d < worst:
            worst = d
        T = (T - 1) & rest
    terms["l8"] = worst
    return best, worst, terms


def _bounds2(kernel):
    def bounds(v, n, A):
        lo, hi, _ = kernel(v, n, A)
        return lo, hi
    return bounds


supermodular_bounds = _bounds2(supermodular_terms)
antibuoyant_bounds = _bounds2(antibuoyant_terms)
superadditive_bounds = _bounds2(superadditive_terms)

_KERNELS = {
    "supermodular": supermodular_bounds,
    "antibuoyant": antibuoyant_bounds,
    "superadditive": superadditive_bounds,
}


def _range(kernel, mu: SetFunction, A: int) -> RangeBounds:
    _check_proper(mu.n, A)
    lo, hi, terms = kernel(mu.values.tolist(), mu.n, A)
    return RangeBounds(float(lo), float(hi), terms)


def supermodular_range(mu: SetFunction, A: int) -> RangeBounds:
    """Values of ``mu(A)`` that keep every second difference nonnegative."""
    return _range(supermodular_terms, mu, A)


def antibuoyant_range(mu: SetFunction, A: int) -> RangeBounds:
    """Values of ``mu(A)`` that keep ``mu(A+i+j) + mu(A) >= 2 mu(A+j)`` everywhere."""
    return _range(antibuoyant_terms, mu, A)


def superadditive_range(mu: SetFunction, A: int) -> RangeBounds:
    """Values of ``mu(A)`` that keep ``mu(S+T) >= mu(S) + mu(T)`` for disjoint ``S, T``."""
    return _range(superadditive_terms, mu, A)


def class_guard(tag: str, n: int, strict: bool = False):
    """Local verify-and-reject check for moves on ``tag`` measures."""
    threshold = 0.0 if strict else -EXACT_TOL

    def guard(values, A):
        s = local_slack(values, n, tag, A)
        return s > threshold if strict else s >= threshold
    return guard


# ---------------------------------------------------------------- shifts

def _check_eta(eta: float, cap: float, what: str) -> float:
    eta = float(eta)
    if not (math.isfinite(eta) and 0 < eta < cap):
        raise InfeasibleError(f"{what} must lie in (0, {cap:.6g}), got {eta:.6g}")
    return eta


def _increasing_etas(m: int, total: float, rng) -> np.ndarray:
    while True:
        x = np.sort(rng.random(m))
        if x[0] > 0 and np.all(np.diff(x) > 0):
            return x * (total / x.sum())


def shift_supermodular(nu: WeightsLike, strict: bool = False, rng=None, *,
                       eta: Optional[float] = None, etas: Optional[Sequence[float]] = None,
                       eta_fraction: float = 0.5) -> SetFunction:
    """Push an additive measure into the (strictly) supermodular interior.

    Non-strict: subtract one ``eta`` from every nonempty proper subset.
    Strict: subtract ``eta_{|A|} + ... + eta_{n-1}`` from every ``A`` with
    ``1 <= |A| <= n-1``, where the ``eta_j`` increase strictly and sum below
    the smallest weight.
    """
    w = _weights(nu)
    n = len(w)
    wmin = float(w.min())
    if not wmin > 0:
        raise InfeasibleError("a shift needs every singleton weight to be positive")
    base = additive(w).values.copy()
    card = np.array([bin(a).count("1") for a in range(1 << n)])
    inner = (card >= 1) & (card <= n - 1)
    if not strict:
        e = _check_eta(eta_fraction * wmin if eta is None else eta, wmin, "eta")
        base[inner] -= e
    else:
        if etas is None:
            if rng is None:
                raise DomainError("random shift magnitudes need an rng")
            _check_eta(eta_fraction, 1.0, "eta_fraction")
            etas = _increasing_etas(n - 1, eta_fraction * wmin, rng)
        etas = np.asarray(etas, dtype=np.float64)
        if etas.shape != (n - 1,):
            raise DomainError(f"expected {n - 1} shift magnitudes")
        if not (etas[0] > 0 and np.all(np.diff(etas) > 0)):
            raise InfeasibleError("shift magnitudes must be positive and strictly increasing")
        if not etas.sum() < wmin:
            raise InfeasibleError("shift magnitudes must sum below the smallest weight")
        # tail[s] = eta_s + ... + eta_{n-1}
        tail = np.concatenate([np.cumsum(etas[::-1])[::-1], [0.0]])
        base[inner] -= tail[card[inner] - 1]
    base[0], base[-1] = 0.0, 1.0
    return SetFunction(n, base)


def _as_mask(B, n: int) -> int:
    if isinstance(B, (int, np.integer)):
        mask = int(B)
    else:
        mask = mask_of(B)
    if not 0 <= mask < 1 << n:
        raise DomainError("subset outside the ground set")
    return mask


def shift_superadditive(nu: WeightsLike, strict: bool = False, rng=None, *,
                        B=None, i0: Optional[int] = None, eta: Optional[float] = None,
                        etas=None, eta_fraction: float = 0.5) -> SetFunction:
    """Push an additive measure to a (strictly) superadditive, non-modular one.

    Non-strict: subtract ``eta`` from every ``A`` with ``i0 in A <= B``.
    Strict: for each co-singleton ``N - {x}`` pick ``eta_x`` and subtract
    from every nonempty proper ``S`` the sum of ``eta_x`` over co-singletons
    containing ``S``, i.e. over ``x`` outside ``S``.

    ``B`` is a bitmask or an iterable of 1-based elements; ``etas`` is a
    scalar or a length-n sequence indexed by the missing element ``x``.
    """
    w = _weights(nu)
    n = len(w)
    if n <= 3:
        raise InfeasibleError("superadditive shifts need n > 3")
    full = (1 << n) - 1
    vals = additive(w).values.copy()
    masks = np.arange(1 << n)
    if not strict:
        if B is None:
            if rng is None:
                raise DomainError("a random block needs an rng")
            size = int(rng.integers(3, n))
            chosen = rng.choice(n, size=size, replace=False)
            Bm = int(sum(1 << int(e) for e in chosen))
        else:
            Bm = _as_mask(B, n)
        if bin(Bm).count("1") <= 2 or Bm == full:
            raise InfeasibleError("the shifted block needs 2 < |B| < n")
        if i0 is None:
            if rng is None:
                raise DomainError("a random anchor needs an rng")
            members = [i for i in range(n) if Bm >> i & 1]
            i0 = members[int(rng.integers(len(members)))] + 1
        bit = 1 << (i0 - 1)
        if not Bm & bit:
            raise InfeasibleError("the anchor element must belong to the block")
        w0 = float(w[i0 - 1])
        if not w0 > 0:
            raise InfeasibleError("the anchor element needs positive weight")
        e = _check_eta(eta_fraction * w0 if eta is None else eta, w0, "eta")
        hit = (masks & bit != 0) & (masks & ~Bm == 0)
        vals[hit] -= e
    else:
        if not w.min() > 0:
            raise InfeasibleError("strict superadditive shifts need all weights positive")
        caps = np.array([np.delete(w, x).min() / n for x in range(n)])
        if etas is None:
            _check_eta(eta_fraction, 1.0, "eta_fraction")
            ex = eta_fraction * caps
        elif np.ndim(etas) == 0:
            ex = np.full(n, float(etas))
        else:
            ex = np.asarray(etas, dtype=np.float64)
            if ex.shape != (n,):
                raise DomainError(f"expected {n} shift magnitudes")
        for x in range(n):
            _check_eta(ex[x], caps[x], f"eta for N-{{{x + 1}}}")
        bits = ((masks[:, None] >> np.arange(n)) & 1).astype(bool)
        vals -= (~bits).astype(np.float64) @ ex
    vals[0], vals[full] = 0.0, 1.0
    return SetFunction(n, vals)


# ---------------------------------------------------------------- walks

def _walk(tag: str, mu: SetFunction, A: int, direction: str, rng) -> tuple[SetFunction, bool]:
    up = _direction(direction)
    _check_proper(mu.n, A)
    chain = Chain.of(mu)
    if not walk_in(chain, A, up, rng, _KERNELS[tag], class_guard(tag, mu.n)):
        return mu, False
    return chain.measure(), True


def supermodular_walk(mu: SetFunction, A: int, direction: str, rng) -> tuple[SetFunction, bool]:
    """Swap ``A`` past a neighbor while staying inside its supermodular range."""
    return _walk("supermodular", mu, A, direction, rng)


def antibuoyant_walk(mu: SetFunction, A: int, direction: str, rng) -> tuple[SetFunction, bool]:
    return _walk("antibuoyant", mu, A, direction, rng)


def superadditive_walk(mu: SetFunction, A: int, direction: str, rng) -> tuple[SetFunction, bool]:
    return _walk("superadditive", mu, A, direction, rng)


def adjust_in_class(mu: SetFunction, A: int, tag: str, rng) -> tuple[SetFunction, bool]:
    """Redraw ``mu(A)`` inside its class range, away from its current neighbors."""
    _check_proper(mu.n, A)
    chain = Chain.of(mu)
    lo, hi = _KERNELS[tag](chain.values, mu.n, A)
    if not adjust_in(chain, A, lo, hi, rng, class_guard(tag, mu.n)):
        return mu, False
    return chain.measure(), True


# ---------------------------------------------------------------- generators

def _diversified(seed: SetFunction, tag: str, config: GenerationConfig, rng, strict: bool) -> SetFunction:
    chain = Chain.of(seed)
    diversify(chain, rng, config.rounds_for(seed.n), config.walk_steps,
              bounds=_KERNELS[tag], guard=class_guard(tag, seed.n, strict),
              attempts=config.walk_attempts)
    return chain.measure()


def generate_supermodular(n: int, config: GenerationConfig, rng, strict: bool = False) -> SetFunction:
    nu = sample_additive(n, rng)
    seed = shift_supermodular(nu, strict, rng, eta_fraction=config.eta_fraction)
    return _diversified(seed, "supermodular", config, rng, strict)


def uniform_weights(n: int) -> AdditiveMeasure:
    return AdditiveMeasure((1.0 / n,) * n)


def generate_antibuoyant(n: int, config: GenerationConfig, rng, strict: bool = False) -> SetFunction:
    """Shifted uniform seed; the uniform measure is the only additive antibuoyant one."""
    seed = shift_supermodular(uniform_weights(n), strict, rng, eta_fraction=config.eta_fraction)
    return _diversified(seed, "antibuoyant", config, rng, strict)


def generate_superadditive(n: int, config: GenerationConfig, rng, strict: bool = False) -> SetFunction:
    """Block or co-singleton shift for ``n > 3``; supermodular shifts below that."""
    nu = sample_additive(n, rng)
    if n > 3:
        seed = shift_superadditive(nu, strict, rng, eta_fraction=config.eta_fraction)
    else:
        seed = shift_supermodular(nu, strict, rng, eta_fraction=config.eta_fraction)
    return _diversified(seed, "superadditive", config, rng, strict)
