"""p-symmetric measures through the count-vector quotient.

A partition of ``N`` into blocks of mutually indifferent elements maps each
subset ``S`` to the vector ``(|S ∩ A_1|, ..., |S ∩ A_p|)``.  The vectors form
a product of chains; a measure constant on vector classes is just a
function on that product.  Nodes are numbered in mixed radix with block
``i`` as digit ``i``, so with singleton blocks the node of a subset is its
bitmask and generation reproduces :func:`fmgen.base.generate_normal`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Optional

import numpy as np

from .base import Chain, GenerationConfig, diversify
from .errors import DomainError, InfeasibleError
from .setfn import EXACT_TOL, SetFunction, mask_of


@dataclass(frozen=True)
class Partition:
    """Blocks of 1-based elements, sorted by their smallest element."""

    blocks: tuple

    def __post_init__(self):
        blocks = [tuple(sorted(int(e) for e in b)) for b in self.blocks]
        if not blocks or any(len(b) == 0 for b in blocks):
            raise DomainError("a partition needs nonempty blocks")
        elems = [e for b in blocks for e in b]
        n = len(elems)
        if sorted(elems) != list(range(1, n + 1)):
            raise DomainError("blocks must be disjoint and cover 1..n")
        object.__setattr__(self, "blocks", tuple(sorted(blocks)))

    @classmethod
    def parse(cls, text: str, n: Optional[int] = None) -> "Partition":
        """Read ``"1,2|3"`` style block syntax."""
        try:
            blocks = [tuple(int(x) for x in part.split(",") if x.strip()) for part in text.split("|")]
        except ValueError as exc:
            raise DomainError(f"cannot parse partition {text!r}") from exc
        part = cls(tuple(blocks))
        if n is not None and part.n != n:
            raise DomainError(f"partition covers {part.n} elements, expected {n}")
        return part

    @classmethod
    def singletons(cls, n: int) -> "Partition":
        return cls(tuple((i,) for i in range(1, n + 1)))

    @property
    def n(self) -> int:
        return sum(len(b) for b in self.blocks)

    @property
    def p(self) -> int:
        return len(self.blocks)

    def sizes(self) -> tuple[int, ...]:
        return tuple(len(b) for b in self.blocks)

    def masks(self) -> tuple[int, ...]:
        return tuple(mask_of(b) for b in self.blocks)

    def __str__(self):
        return "|".join(",".join(map(str, b)) for b in self.blocks)


@dataclass(frozen=True)
class SymVector:
    counts: tuple[int, ...]

    def __le__(self, other: "SymVector") -> bool:
        return all(a <= b for a, b in zip(self.counts, other.counts))

    @property
    def size(self) -> int:
        return sum(self.counts)


def subset_vector(A: int, partition: Partition) -> SymVector:
    """Per-block counts of the subset with bitmask ``A``."""
    return SymVector(tuple(bin(A & m).count("1") for m in partition.masks()))


class QuotientLattice:
    """The product of chains ``prod (|A_i| + 1)`` in mixed-radix numbering."""

    def __init__(self, partition: Partition):
        self.partition = partition
        self.n = partition.n
        self.p = partition.p
        self.caps = partition.sizes()
        strides, s = [], 1
        for c in self.caps:
            strides.append(s)
            s *= c + 1
        self.strides = tuple(strides)
        self.size = s
        idx = np.arange(s)
        self.digits = np.stack([(idx // st) % (c + 1) for st, c in zip(self.strides, self.caps)], axis=1)
        self.card = self.digits.sum(1)
        self.lower = [[x - st for b, st in enumerate(self.strides) if self.digits[x, b] > 0] for x in range(s)]
        self.upper = [[x + st for b, st in enumerate(self.strides) if self.digits[x, b] < self.caps[b]]
                      for x in range(s)]

    @cached_property
    def node_of_mask(self) -> np.ndarray:
        masks = np.arange(1 << self.n)
        node = np.zeros(1 << self.n, dtype=np.int64)
        for m, st in zip(self.partition.masks(), self.strides):
            node += np.array([bin(int(x)).count("1") for x in masks & m]) * st
        return node

    def node(self, vec: SymVector) -> int:
        return int(sum(c * st for c, st in zip(vec.counts, self.strides)))

    def expand(self, q) -> SetFunction:
        vals = np.asarray(q, dtype=np.float64)[self.node_of_mask]
        return SetFunction(self.n, vals)

    def leq(self, a: int, b: int) -> bool:
        return bool(np.all(self.digits[a] <= self.digits[b]))


class QuotientChain(Chain):
    """A :class:`Chain` over quotient nodes instead of bitmasks."""

    __slots__ = ("lattice",)

    def __init__(self, lattice: QuotientLattice, values):
        self.lattice = lattice
        self.n = lattice.n
        self.values = [float(x) for x in values]
        vals = self.values
        M = lattice.size
        self.order = sorted(range(M), key=lambda a: (vals[a], a))
        self.pos = [0] * M
        for p, a in enumerate(self.order):
            self.pos[a] = p
        self.card = lattice.card.tolist()
        self.reads = 0

    @property
    def size(self) -> int:
        return self.lattice.size

    def is_subset(self, A: int, B: int) -> bool:
        return self.lattice.leq(A, B)

    def measure(self) -> SetFunction:
        return self.lattice.expand(self.values)


@dataclass(frozen=True)
class _Rows:
    """Linear constraints ``sum coef * q(node) >= 0`` grouped by node."""

    nodes: np.ndarray
    coefs: np.ndarray
    by_node: tuple

    @classmethod
    def build(cls, rows: list, M: int) -> "_Rows":
        merged = {}
        for row in rows:
            acc: dict = {}
            for node, c in row:
                acc[node] = acc.get(node, 0.0) + c
            key = tuple(sorted((k, v) for k, v in acc.items() if v != 0))
            if key:
                merged[key] = None
        keys = list(merged)
        width = max((len(k) for k in keys), default=1)
        nodes = np.zeros((len(keys), width), dtype=np.int64)
        coefs = np.zeros((len(keys), width))
        for r, key in enumerate(keys):
            for c, (node, coef) in enumerate(key):
                nodes[r, c], coefs[r, c] = node, coef
        touching = [[] for _ in range(M)]
        for r, key in enumerate(keys):
            for node, coef in key:
                touching[node].append((r, coef))
        by_node = tuple((np.array([r for r, _ in t], dtype=np.int64), np.array([c for _, c in t]))
                        for t in touching)
        return cls(nodes, coefs, by_node)

    def slack(self, q: np.ndarray) -> np.ndarray:
        return (q[self.nodes] * self.coefs).sum(1)

    def interval(self, q: np.ndarray, x: int) -> tuple[float, float]:
        rows, cx = self.by_node[x]
        if len(rows) == 0:
            return -math.inf, math.inf
        rest = (q[self.nodes[rows]] * self.coefs[rows]).sum(1) - cx * q[x]
        bound = -rest / cx
        pos, neg = cx > 0, cx < 0
        lo = float(bound[pos].max()) if pos.any() else -math.inf
        hi = float(bound[neg].min()) if neg.any() else math.inf
        return lo, hi

    def local_min(self, q: np.ndarray, x: int) -> float:
        rows, _ = self.by_node[x]
        if len(rows) == 0:
            return math.inf
        return float((q[self.nodes[rows]] * self.coefs[rows]).sum(1).min())


def _rows_for(lat: QuotientLattice, inner: str) -> _Rows:
    M, p = lat.size, lat.p
    dig = lat.digits
    rows = []
    for x in range(M):
        for y in lat.upper[x]:
            rows.append([(y, 1.0), (x, -1.0)])
    if inner in ("supermodular", "antibuoyant"):
        for a in range(M):
            for bi in range(p):
                for bj in range(p):
                    room_i = lat.caps[bi] - dig[a, bi]
                    room_j = lat.caps[bj] - dig[a, bj]
                    if bi == bj and room_i < 2:
                        continue
                    if bi != bj and (room_i < 1 or room_j < 1):
                        continue
                    if inner == "supermodular" and bi > bj:
                        continue
                    ai, aj = a + lat.strides[bi], a + lat.strides[bj]
                    top = ai + lat.strides[bj]
                    if inner == "supermodular":
                        rows.append([(top, 1.0), (ai, -1.0), (aj, -1.0), (a, 1.0)])
                    else:
                        rows.append([(top, 1.0), (a, 1.0), (aj, -2.0)])
    elif inner == "superadditive":
        for s in range(1, M):
            for t in range(s, M):
                if np.all(dig[s] + dig[t] <= lat.caps):
                    u = s + t  # digits add without carry
                    rows.append([(u, 1.0), (s, -1.0), (t, -1.0)])
    elif inner != "normal":
        raise DomainError(f"unsupported inner class {inner!r}")
    return _Rows.build(rows, M)


def _seed(lat: QuotientLattice, rng) -> np.ndarray:
    """Block-constant additive seed: Dirichlet block masses split evenly within blocks."""
    while True:
        e = rng.standard_exponential(lat.p)
        if np.all(e > 0):
            break
    w = (e / e.sum()) / np.asarray(lat.caps, dtype=np.float64)
    q = lat.digits.astype(np.float64) @ w
    q[0] = 0.0
    if abs(q[-1] - 1.0) <= EXACT_TOL:
        q[-1] = 1.0
    return q


def _shift(lat: QuotientLattice, q: np.ndarray, strict: bool, rng, eta_fraction: float) -> np.ndarray:
    """Supermodular shifts on the quotient (constant, or by subset size)."""
    w = np.array([q[st] for st in lat.strides])
    wmin = float(w.min())
    n = lat.n
    q = q.copy()
    inner = (lat.card >= 1) & (lat.card <= n - 1)
    if n < 2 or not wmin > 0:
        raise InfeasibleError("shift needs positive weights")
    if not strict:
        q[inner] -= eta_fraction * wmin
    else:
        while True:
            x = np.sort(rng.random(n - 1))
            if x[0] > 0 and np.all(np.diff(x) > 0):
                break
        etas = x * (eta_fraction * wmin / x.sum())
        tail = np.concatenate([np.cumsum(etas[::-1])[::-1], [0.0]])
        q[inner] -= tail[lat.card[inner] - 1]
    return q


def _quotient_bounds(lat: QuotientLattice):
    lower, upper = lat.lower, lat.upper

    def bounds(values, n, A):
        lo, hi = 0.0, 1.0
        for y in lower[A]:
            x = values[y]
            if x > lo:
                lo = x
        for y in upper[A]:
            x = values[y]
            if x < hi:
                hi = x
        return lo, hi
    return bounds


def generate_p_symmetric(partition: Partition, inner: str, config: GenerationConfig, rng,
                         strict: bool = False) -> SetFunction:
    """Generate on the quotient lattice and expand to all subsets."""
    lat = QuotientLattice(partition)
    q = _seed(lat, rng)
    if inner == "normal":
        if strict:
            raise DomainError("strictness is not defined for normal measures")
        chain = QuotientChain(lat, q)
        rounds = lat.size if config.rounds is None else config.rounds
        diversify(chain, rng, rounds, config.walk_steps, bounds=_quotient_bounds(lat), attempts=config.walk_attempts)
        return chain.measure()
    if inner == "antibuoyant":
        q = lat.card / lat.n
    if inner in ("supermodular", "superadditive", "antibuoyant"):
        q = _shift(lat, q, strict, rng, config.eta_fraction)
    else:
        raise DomainError(f"unsupported inner class {inner!r}")
    rows = _rows_for(lat, inner)
    threshold = 0.0 if strict else -EXACT_TOL

    def bounds(values, n, A):
        return rows.interval(np.asarray(values), A)

    def guard(values, A):
        s = rows.local_min(np.asarray(values), A)
        return s > threshold if strict else s >= threshold

    chain = QuotientChain(lat, q)
    rounds = lat.size if config.rounds is None else config.rounds
    diversify(chain, rng, rounds, config.walk_steps, bounds=bounds, guard=guard,
              attempts=config.walk_attempts)
    return chain.measure()
