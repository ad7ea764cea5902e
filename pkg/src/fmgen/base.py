"""Additive seeds and the generic diversification moves.

The moves work on a :class:`Chain`: a mutable copy of the measure values
together with the induced linear extension, kept in sync so that a walk
step touches only a constant number of values.  The public functions wrap
a chain around an immutable :class:`~fmgen.setfn.SetFunction` for one-off use.
"""

from __future__ import annotations

import math
from bisect import bisect_left
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import DomainError, InfeasibleError
from .linext import LinearExtension
from .setfn import SetFunction, additive, cardinalities

UP, DOWN = "up", "down"
MAX_REDRAWS = 64

Bounds = Callable[[list, int, int], tuple]
Guard = Callable[[list, int], bool]


@dataclass(frozen=True)
class AdditiveMeasure:
    """``n`` positive weights summing to one."""

    weights: tuple[float, ...]

    def __post_init__(self):
        w = tuple(float(x) for x in self.weights)
        if len(w) < 2:
            raise DomainError("an additive measure needs n >= 2 weights")
        if min(w) < 0 or abs(math.fsum(w) - 1.0) > 1e-12:
            raise DomainError("weights must be nonnegative and sum to 1")
        object.__setattr__(self, "weights", w)

    @property
    def n(self) -> int:
        return len(self.weights)

    def measure(self) -> SetFunction:
        return additive(self.weights)


@dataclass(frozen=True)
class GenerationConfig:
    """Everything that, together with the package version, fixes generator output.

    ``rounds`` is the number of allowable-range adjustments per measure
    (``None`` means ``2**n``); ``walk_steps`` counts executed random-walk
    steps, each allowed up to ``walk_attempts`` blocked draws.
    """

    seed: int = 0
    walk_steps: int = 10
    rounds: Optional[int] = None
    eta_fraction: float = 0.5
    tolerance: float = 1e-9
    batch: int = 1
    walk_attempts: int = 16

    def __post_init__(self):
        if not 0 <= self.seed < 2**64:
            raise DomainError("seed must be a 64-bit unsigned integer")
        if self.walk_steps < 0 or self.batch < 1 or self.walk_attempts < 1:
            raise DomainError("walk_steps >= 0, batch >= 1 and walk_attempts >= 1 required")
        if self.rounds is not None and self.rounds < 0:
            raise DomainError("rounds must be nonnegative")
        if not (math.isfinite(self.eta_fraction) and 0 < self.eta_fraction < 1):
            raise InfeasibleError(f"eta_fraction must lie in (0, 1), got {self.eta_fraction}")
        if not (math.isfinite(self.tolerance) and self.tolerance >= 0):
            raise DomainError("tolerance must be finite and nonnegative")

    def rounds_for(self, n: int) -> int:
        return (1 << n) if self.rounds is None else self.rounds


def item_rng(seed: int, index: int) -> np.random.Generator:
    """Independent stream for batch item ``index``."""
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(index,)))


def sample_additive(n: int, rng) -> AdditiveMeasure:
    """Uniform draw from the open simplex (normalized exponentials)."""
    if n < 2:
        raise DomainError("n must be at least 2")
    while True:
        e = rng.standard_exponential(n)
        if np.all(e > 0):
            break
    w = e / e.sum()
    return AdditiveMeasure(tuple(w.tolist()))


def _open_uniform(rng, lo: float, hi: float, avoid) -> Optional[float]:
    for _ in range(MAX_REDRAWS):
        v = lo + rng.random() * (hi - lo)
        if lo < v < hi and v not in avoid:
            return v
    return None


def measure_from_extension(ext: LinearExtension, rng) -> SetFunction:
    """Assign sorted distinct values from (0, 1) along ``ext``."""
    if not ext.is_valid():
        raise DomainError("not a linear extension")
    M = ext.size
    while True:
        draws = np.sort(rng.random(M - 2))
        if draws[0] > 0 and np.all(np.diff(draws) > 0):
            break
    vals = np.empty(M)
    vals[0] = 0.0
    vals[M - 1] = 1.0
    vals[list(ext.order[1:-1])] = draws
    return SetFunction(ext.n, vals)


class Chain:
    """Mutable values plus induced extension (ties broken by bitmask).

    ``reads`` counts measure values consulted by moves, for cost comparisons.
    """

    __slots__ = ("n", "values", "order", "pos", "card", "reads")

    def __init__(self, n: int, values):
        self.n = n
        self.values = [float(x) for x in values]
        vals = self.values
        self.order = sorted(range(1 << n), key=lambda a: (vals[a], a))
        self.pos = [0] * (1 << n)
        for p, a in enumerate(self.order):
            self.pos[a] = p
        self.card = cardinalities(n).tolist()
        self.reads = 0

    @classmethod
    def of(cls, mu: SetFunction) -> "Chain":
        return cls(mu.n, mu.values)

    @property
    def size(self) -> int:
        return 1 << self.n

    def measure(self) -> SetFunction:
        return SetFunction(self.n, self.values)

    def extension(self) -> LinearExtension:
        return LinearExtension(self.n, tuple(self.order))

    def is_subset(self, A: int, B: int) -> bool:
        return not A & ~B

    def set(self, A: int, v: float) -> None:
        """Assign ``mu(A) = v`` and move ``A`` to its sorted position."""
        vals, order, pos = self.values, self.order, self.pos
        old = pos[A]
        vals[A] = v
        del order[old]
        new = bisect_left(order, (v, A), key=lambda s: (vals[s], s))
        order.insert(new, A)
        for p in range(min(old, new), max(old, new) + 1):
            pos[order[p]] = p

    def swap_up(self, A: int, v: float) -> None:
        p = self.pos[A]
        s = self.order[p + 1]
        self.values[A] = v
        self.order[p], self.order[p + 1] = s, A
        self.pos[s], self.pos[A] = p, p + 1

    def swap_down(self, A: int, v: float) -> None:
        p = self.pos[A]
        q = self.order[p - 1]
        self.values[A] = v
        self.order[p], self.order[p - 1] = q, A
        self.pos[q], self.pos[A] = p, p - 1


def monotone_bounds(values: list, n: int, A: int) -> tuple[float, float]:
    """``(Int_L, Int_U)``: largest lower-cover value, smallest upper-cover value."""
    lo, hi = 0.0, 1.0
    for i in range(n):
        bit = 1 << i
        if A & bit:
            x = values[A ^ bit]
            if x > lo:
                lo = x
        else:
            x = values[A | bit]
            if x < hi:
                hi = x
    return lo, hi


def _check_proper(chain_or_n, A: int) -> None:
    top = (1 << chain_or_n) - 1 if isinstance(chain_or_n, int) else chain_or_n.size - 1
    if A <= 0 or A >= top:
        raise DomainError("moves apply to nonempty proper subsets only")


def _guarded(chain: Chain, A: int, v: float, ok: Callable[[float], bool], guard: Optional[Guard]):
    """Shrink ``v`` toward the current value until ``guard`` accepts; None if it never does."""
    if guard is None:
        return v
    old = chain.values[A]
    for _ in range(32):
        chain.values[A] = v
        accepted = guard(chain.values, A)
        chain.values[A] = old
        if accepted:
            return v
        v = 0.5 * (v + old)
        if not ok(v):
            return None
    return None


def adjust_in(chain: Chain, A: int, lo: float, hi: float, rng, guard: Optional[Guard] = None) -> bool:
    """Draw ``mu(A)`` from ``(lo, hi)`` minus ``[mu(prev), mu(next)]``.

    Returns False and leaves the chain untouched when that set is empty.
    """
    _check_proper(chain, A)
    vals, order = chain.values, chain.order
    p = chain.pos[A]
    prev_v = vals[order[p - 1]] if p > 0 else -math.inf
    next_v = vals[order[p + 1]] if p + 1 < chain.size else math.inf
    chain.reads += 2
    left = max(0.0, min(hi, prev_v) - lo)
    right = max(0.0, hi - max(lo, next_v))
    total = left + right
    if not total > 0:
        return False

    def admissible(x):
        return lo < x < hi and (x < prev_v or x > next_v)

    for _ in range(MAX_REDRAWS):
        u = rng.random() * total
        v = lo + u if u < left else max(lo, next_v) + (u - left)
        if admissible(v) and v not in vals:
            break
    else:
        return False
    v = _guarded(chain, A, v, admissible, guard)
    if v is None:
        return False
    chain.set(A, v)
    return True


def walk_in(chain: Chain, A: int, up: bool, rng, bounds: Optional[Bounds] = None,
            guard: Optional[Guard] = None) -> bool:
    """One random-walk step for ``A``: pass its successor (or predecessor).

    The step is allowed when the neighbor is not a strict superset (subset)
    of ``A``.  With ``bounds`` the landing interval is clipped to the class
    range and the move is refused if the neighbor lies outside it.
    """
    _check_proper(chain, A)
    vals, order, card = chain.values, chain.order, chain.card
    p = chain.pos[A]
    M = chain.size
    if up:
        if p + 1 >= M:
            return False
        s = order[p + 1]
        if not (card[A] >= card[s] or not chain.is_subset(A, s)):
            return False
        lo = vals[s]
        hi = vals[order[p + 2]] if p + 2 < M else 1.0
        chain.reads += 2
        if bounds is not None:
            cap = bounds(vals, chain.n, A)[1]
            if lo > cap:
                return False
            hi = min(hi, cap)
    else:
        if p < 1:
            return False
        q = order[p - 1]
        if not (card[A] <= card[q] or not chain.is_subset(q, A)):
            return False
        hi = vals[q]
        lo = vals[order[p - 2]] if p >= 2 else 0.0
        chain.reads += 2
        if bounds is not None:
            floor = bounds(vals, chain.n, A)[0]
            if hi < floor:
                return False
            lo = max(lo, floor)
    if not lo < hi:
        return False
    v = _open_uniform(rng, lo, hi, ())
    if v is None:
        return False
    v = _guarded(chain, A, v, lambda x: lo < x < hi, guard)
    if v is None:
        return False
    if up:
        chain.swap_up(A, v)
    else:
        chain.swap_down(A, v)
    return True


def diversify(chain: Chain, rng, rounds: int, walk_steps: int, bounds: Optional[Bounds] = None,
              guard: Optional[Guard] = None, attempts: int = 16) -> tuple[int, int]:
    """Range adjustments on random subsets, then random-walk steps.

    Returns ``(adjustments made, walk steps made)``.
    """
    M = chain.size
    rng_fn = bounds or monotone_bounds
    made = 0
    for _ in range(rounds):
        A = int(rng.integers(1, M - 1))
        lo, hi = rng_fn(chain.values, chain.n, A)[:2]
        made += adjust_in(chain, A, lo, hi, rng, guard)
    moved = 0
    for _ in range(walk_steps):
        for _ in range(attempts):
            A = int(rng.integers(1, M - 1))
            up = bool(rng.integers(2))
            if walk_in(chain, A, up, rng, bounds, guard):
                moved += 1
                break
    return made, moved


def _direction(direction: str) -> bool:
    if direction not in (UP, DOWN):
        raise DomainError(f"direction must be 'up' or 'down', got {direction!r}")
    return direction == UP


def adjust_value(mu: SetFunction, A: int, rng) -> tuple[SetFunction, bool]:
    """Redraw ``mu(A)`` inside its monotonicity interval so its position changes."""
    _check_proper(mu.n, A)
    chain = Chain.of(mu)
    lo, hi = monotone_bounds(chain.values, mu.n, A)
    if not adjust_in(chain, A, lo, hi, rng):
        return mu, False
    return chain.measure(), True


def adjust_position(mu: SetFunction, A: int, rng) -> tuple[SetFunction, bool]:
    """Move ``A`` to another admissible slot of the induced extension.

    Carried out in value space, which is equivalent to repositioning
    between the neighbor bounds of the extension.
    """
    return adjust_value(mu, A, rng)


def random_walk_step(mu: SetFunction, A: int, direction: str, rng) -> tuple[SetFunction, bool]:
    """Swap ``A`` with its successor (``up``) or predecessor (``down``) when allowed."""
    up = _direction(direction)
    _check_proper(mu.n, A)
    chain = Chain.of(mu)
    if not walk_in(chain, A, up, rng):
        return mu, False
    return chain.measure(), True


def generate_normal(n: int, config: GenerationConfig, rng) -> SetFunction:
    """Additive seed diversified by range adjustments and random walks."""
    seed = sample_additive(n, rng).measure()
    chain = Chain.of(seed)
    diversify(chain, rng, config.rounds_for(n), config.walk_steps, attempts=config.walk_attempts)
    return chain.measure()
