"""Linear extensions of the subset lattice.

A linear extension lists all ``2**n`` subsets so that every subset comes
before each of its strict supersets.  It is stored as ``order`` (position ->
bitmask) with ``pos`` (bitmask -> position) derived on demand.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Iterator, Sequence

import numpy as np

from .errors import CapabilityError, DomainError
from .setfn import SetFunction

MAX_ENUMERATE_N = 4
MAX_COUNT_N = 5


@dataclass(frozen=True)
class LinearExtension:
    n: int
    order: tuple[int, ...]

    def __post_init__(self):
        order = tuple(int(x) for x in self.order)
        if len(order) != 1 << self.n or sorted(order) != list(range(1 << self.n)):
            raise DomainError("order must be a permutation of all subset masks")
        object.__setattr__(self, "order", order)

    @cached_property
    def pos(self) -> tuple[int, ...]:
        pos = [0] * len(self.order)
        for p, A in enumerate(self.order):
            pos[A] = p
        return tuple(pos)

    @property
    def size(self) -> int:
        return len(self.order)

    def is_valid(self) -> bool:
        """Inclusion check over covering pairs ``A < A + i`` (enough by transitivity)."""
        pos = self.pos
        full = self.size - 1
        if self.order[0] != 0 or self.order[-1] != full:
            return False
        for A in range(self.size):
            pa = pos[A]
            rest = full & ~A
            while rest:
                bit = rest & -rest
                if pos[A | bit] <= pa:
                    return False
                rest ^= bit
        return True

    def __repr__(self):
        return f"LinearExtension(n={self.n}, order={list(self.order)})"


def extension_of(mu: SetFunction) -> LinearExtension:
    """Subsets sorted by value, ties broken by ascending bitmask."""
    order = np.argsort(mu.values, kind="stable")
    return LinearExtension(mu.n, tuple(order.tolist()))


def neighbor_bounds(ext: LinearExtension, A: int) -> tuple[int, int]:
    """``(Pos_L, Pos_U)``: last position of a lower cover, first of an upper cover."""
    full = ext.size - 1
    if A <= 0 or A >= full:
        raise DomainError("neighbor bounds need a nonempty proper subset")
    pos = ext.pos
    lo = max(pos[A ^ (1 << i)] for i in range(ext.n) if A >> i & 1)
    hi = min(pos[A | (1 << i)] for i in range(ext.n) if not A >> i & 1)
    return lo, hi


def reposition(ext: LinearExtension, A: int, rng) -> tuple[LinearExtension, bool]:
    """Move ``A`` to a different random slot strictly inside its neighbor bounds.

    Returns the input unchanged with ``False`` when no other slot exists.
    """
    lo, hi = neighbor_bounds(ext, A)
    current = ext.pos[A]
    slots = [p for p in range(lo + 1, hi) if p != current]
    if not slots:
        return ext, False
    target = slots[int(rng.integers(len(slots)))]
    order = list(ext.order)
    order.pop(current)
    order.insert(target, A)
    return LinearExtension(ext.n, tuple(order)), True


def repetition_ratio(batch: Sequence[LinearExtension]) -> float:
    """Share of the batch that duplicates an earlier member: ``(Num - distinct) / Num``."""
    if len(batch) == 0:
        raise DomainError("repetition ratio of an empty batch")
    distinct = len({e.order for e in batch})
    return (len(batch) - distinct) / len(batch)


@lru_cache(maxsize=None)
def _lower_covers(n: int) -> tuple[int, ...]:
    # covers[T] has bit A set for each lower cover A = T - {i}
    covers = []
    for T in range(1 << n):
        c = 0
        for i in range(n):
            if T >> i & 1:
                c |= 1 << (T ^ (1 << i))
        covers.append(c)
    return tuple(covers)


def count_extensions(n: int) -> int:
    """Number of linear extensions, by dynamic programming over down-sets."""
    if n < 1:
        raise DomainError("n must be positive")
    if n > MAX_COUNT_N:
        raise CapabilityError(f"exact counting is supported up to n={MAX_COUNT_N}")
    M = 1 << n
    covers = _lower_covers(n)
    memo: dict[int, int] = {}

    def count(placed: int) -> int:
        if placed == (1 << M) - 1:
            return 1
        got = memo.get(placed)
        if got is not None:
            return got
        total = 0
        for T in range(M):
            if not placed >> T & 1 and covers[T] & placed == covers[T]:
                total += count(placed | 1 << T)
        memo[placed] = total
        return total

    limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(limit, M + 100))
    try:
        return count(1)
    finally:
        sys.setrecursionlimit(limit)


def iter_extensions(n: int, prefix: Sequence[int] = ()) -> Iterator[tuple[int, ...]]:
    """Yield every linear extension as an order tuple, lexicographically ascending.

    ``prefix`` pins the first positions after the empty set, which lets callers
    split the enumeration into independent chunks.
    """
    if n > MAX_ENUMERATE_N:
        raise CapabilityError(f"enumeration is supported up to n={MAX_ENUMERATE_N}")
    M = 1 << n
    covers = _lower_covers(n)
    order = [0] * M
    placed = 1
    depth = 1
    for S in prefix:
        if placed >> S & 1 or covers[S] & placed != covers[S]:
            return
        placed |= 1 << S
        order[depth] = S
        depth += 1
    if depth == M:
        yield tuple(order)
        return

    def available(placed_now: int) -> list[int]:
        return [T for T in range(M) if not placed_now >> T & 1 and covers[T] & placed_now == covers[T]]

    stack = [[available(placed), 0]]
    base = depth
    while stack:
        frame = stack[-1]
        avail, k = frame
        if k:
            placed ^= 1 << avail[k - 1]
        if k == len(avail):
            stack.pop()
            depth -= 1
            continue
        S = avail[k]
        frame[1] = k + 1
        placed |= 1 << S
        order[depth] = S
        if depth == M - 1:
            yield tuple(order)
            continue
        nxt = [x for x in avail if x != S]
        rest = (M - 1) & ~S
        while rest:
            bit = rest & -rest
            T = S | bit
            if covers[T] & placed == covers[T]:
                nxt.append(T)
            rest ^= bit
        nxt.sort()
        stack.append([nxt, 0])
        depth += 1
    assert depth == base - 1


def enumerate_extensions(n: int) -> tuple[int, Iterator[LinearExtension]]:
    """Exact count plus a lazy, duplicate-free stream of all extensions (``n <= 4``)."""
    if n > MAX_ENUMERATE_N:
        raise CapabilityError(f"enumeration is supported up to n={MAX_ENUMERATE_N}")
    total = count_extensions(n)
    return total, (LinearExtension(n, o) for o in iter_extensions(n))


def lattice_distance(a: LinearExtension, b: LinearExtension) -> int:
    """Number of subset pairs ordered differently (Kendall tau distance)."""
    pa, pb = np.array(a.pos), np.array(b.pos)
    da = np.sign(pa[:, None] - pa[None, :])
    db = np.sign(pb[:, None] - pb[None, :])
    return int((da != db).sum() // 2)
