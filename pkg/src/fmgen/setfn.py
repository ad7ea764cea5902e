"""Set functions on the subset lattice of ``N = {1, ..., n}``.

Subsets are bitmasks: bit ``i - 1`` set means element ``i`` belongs to the
subset, so ``values[0]`` is the empty set and ``values[2**n - 1]`` is ``N``.
Every module in the package uses this layout.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable

import numpy as np

from .errors import DegenerateInputError, DomainError

MAX_N = 26
EXACT_TOL = 1e-12
CLASS_TOL = 1e-9


def mask_of(elements: Iterable[int]) -> int:
    """Bitmask of a collection of 1-based elements."""
    m = 0
    for e in elements:
        if e < 1:
            raise DomainError(f"elements are 1-based, got {e}")
        m |= 1 << (e - 1)
    return m


def elements_of(mask: int) -> tuple[int, ...]:
    """1-based elements of a bitmask, ascending."""
    out = []
    i = 1
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def format_subset(mask: int) -> str:
    return "{" + ",".join(map(str, elements_of(mask))) + "}"


@lru_cache(maxsize=None)
def cardinalities(n: int) -> np.ndarray:
    """``|A|`` for every bitmask ``A`` of an n-element ground set."""
    card = np.zeros(1 << n, dtype=np.int64)
    for i in range(n):
        card[1 << i:1 << (i + 1)] = card[:1 << i] + 1
    card.setflags(write=False)
    return card


@lru_cache(maxsize=None)
def membership(n: int) -> np.ndarray:
    """Boolean matrix ``bits[A, i]`` telling whether element ``i+1`` is in ``A``."""
    masks = np.arange(1 << n)
    bits = ((masks[:, None] >> np.arange(n)) & 1).astype(bool)
    bits.setflags(write=False)
    return bits


def _check_n(n: int) -> None:
    if not 2 <= n <= MAX_N:
        raise DomainError(f"n must lie in [2, {MAX_N}], got {n}")


def _as_values(n: int, values) -> np.ndarray:
    arr = np.array(values, dtype=np.float64)
    if arr.shape != (1 << n,):
        raise DomainError(f"expected {1 << n} values for n={n}, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DomainError("values must be finite")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class SetFunction:
    """Immutable real-valued function on all ``2**n`` subsets.

    ``values`` is a read-only float64 array indexed by subset bitmask.
    """

    n: int
    values: np.ndarray

    def __post_init__(self):
        _check_n(self.n)
        object.__setattr__(self, "values", _as_values(self.n, self.values))

    @classmethod
    def capacity(cls, n: int, values, tol: float = EXACT_TOL) -> "SetFunction":
        """Build a set function and insist it is a normalized monotone capacity."""
        mu = cls(n, values)
        if mu.values[0] != 0.0 or mu.values[-1] != 1.0:
            raise DomainError("a capacity needs mu(empty) = 0 and mu(N) = 1 exactly")
        bad = first_monotonicity_violation(mu, tol)
        if bad is not None:
            A, i = bad
            raise DomainError(
                f"not monotone: mu({format_subset(A)}) > mu({format_subset(A | 1 << (i - 1))})"
            )
        return mu

    @classmethod
    def from_subsets(cls, n: int, table: dict) -> "SetFunction":
        """Build from ``{tuple_of_elements: value}``; missing subsets are zero."""
        vals = np.zeros(1 << n)
        for elems, v in table.items():
            vals[mask_of(elems)] = v
        return cls(n, vals)

    @property
    def size(self) -> int:
        return 1 << self.n

    @property
    def full(self) -> int:
        return (1 << self.n) - 1

    def __getitem__(self, mask: int) -> float:
        return float(self.values[mask])

    def value(self, *elements: int) -> float:
        return float(self.values[mask_of(elements)])

    def tolist(self) -> list[float]:
        return self.values.tolist()

    def with_values(self, values) -> "SetFunction":
        return SetFunction(self.n, values)

    def __eq__(self, other):
        if not isinstance(other, SetFunction):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.values, other.values)

    def __hash__(self):
        return hash((self.n, self.values.tobytes()))

    def allclose(self, other: "SetFunction", atol: float = EXACT_TOL) -> bool:
        return self.n == other.n and bool(np.allclose(self.values, other.values, rtol=0, atol=atol))

    def __repr__(self):
        vals = ", ".join(f"{v:.6g}" for v in self.values[:16])
        more = ", ..." if self.size > 16 else ""
        return f"SetFunction(n={self.n}, values=[{vals}{more}])"


@dataclass(frozen=True, eq=False)
class MobiusRep:
    """Möbius coefficients ``m(A)``, same bitmask layout as :class:`SetFunction`."""

    n: int
    coefficients: np.ndarray

    def __post_init__(self):
        _check_n(self.n)
        object.__setattr__(self, "coefficients", _as_values(self.n, self.coefficients))

    def __getitem__(self, mask: int) -> float:
        return float(self.coefficients[mask])


def first_monotonicity_violation(mu: SetFunction, tol: float = EXACT_TOL):
    """Return ``(A, i)`` with ``mu(A) > mu(A + i) + tol``, or ``None``."""
    v = mu.values
    for i in range(mu.n):
        bit = 1 << i
        lo = np.nonzero(~membership(mu.n)[:, i])[0]
        diff = v[lo] - v[lo | bit]
        j = int(np.argmax(diff))
        if diff[j] > tol:
            return int(lo[j]), i + 1
    return None


def _fast_mobius(v: np.ndarray, n: int) -> np.ndarray:
    out = np.array(v, dtype=np.float64)
    for i in range(n):
        blk = out.reshape(-1, 2, 1 << i)
        blk[:, 1, :] -= blk[:, 0, :]
    return out


def _fast_zeta(v: np.ndarray, n: int) -> np.ndarray:
    out = np.array(v, dtype=np.float64)
    for i in range(n):
        blk = out.reshape(-1, 2, 1 << i)
        blk[:, 1, :] += blk[:, 0, :]
    return out


def mobius_transform(mu: SetFunction) -> MobiusRep:
    """``m(A) = sum_{C <= A} (-1)^{|A - C|} mu(C)`` via the fast subset transform."""
    return MobiusRep(mu.n, _fast_mobius(mu.values, mu.n))


def zeta_transform(m: MobiusRep) -> SetFunction:
    """Inverse of :func:`mobius_transform`: ``mu(A) = sum_{C <= A} m(C)``."""
    return SetFunction(m.n, _fast_zeta(m.coefficients, m.n))


def _require_pair(mu: SetFunction, A: int) -> int:
    if not 0 <= A < mu.size:
        raise DomainError(f"subset mask {A} out of range for n={mu.n}")
    size = popcount(A)
    if size < 2:
        raise DomainError(f"index undefined for |A| = {size} < 2")
    return size


def nonadditivity_index(mu: SetFunction, A: int) -> float:
    """``mu(A) - sum_{C < A} mu(C) / (2^{|A|-1} - 1)``, the sum running over proper subsets."""
    size = _require_pair(mu, A)
    v = mu.values
    total = 0.0
    C = (A - 1) & A
    while True:
        total += v[C]
        if C == 0:
            break
        C = (C - 1) & A
    return float(v[A] - total / ((1 << (size - 1)) - 1))


def nonmodularity_index(mu: SetFunction, A: int) -> float:
    """``mu(A) - (1/|A|) sum_{i in A} [mu({i}) + mu(A - i)]``."""
    size = _require_pair(mu, A)
    v = mu.values
    total = 0.0
    for e in elements_of(A):
        bit = 1 << (e - 1)
        total += v[bit] + v[A ^ bit]
    return float(v[A] - total / size)


def nonadditivity_vector(mu: SetFunction) -> np.ndarray:
    """Nonadditivity index of every subset; NaN where ``|A| < 2``."""
    n = mu.n
    card = cardinalities(n)
    proper_sum = _fast_zeta(mu.values, n) - mu.values
    out = np.full(mu.size, np.nan)
    ok = card >= 2
    out[ok] = mu.values[ok] - proper_sum[ok] / (2.0 ** (card[ok] - 1) - 1)
    return out


def nonmodularity_vector(mu: SetFunction) -> np.ndarray:
    """Nonmodularity index of every subset; NaN where ``|A| < 2``."""
    n = mu.n
    v = mu.values
    card = cardinalities(n)
    bits = membership(n)
    masks = np.arange(mu.size)
    total = np.zeros(mu.size)
    for i in range(n):
        has = bits[:, i]
        b = 1 << i
        total[has] += v[b] + v[masks[has] ^ b]
    out = np.full(mu.size, np.nan)
    ok = card >= 2
    out[ok] = v[ok] - total[ok] / card[ok]
    return out


@dataclass(frozen=True, eq=False)
class IndexReport:
    """Nonadditivity and nonmodularity indices for every subset with ``|A| >= 2``."""

    n: int
    nonadditivity: np.ndarray
    nonmodularity: np.ndarray

    def at(self, A: int) -> tuple[float, float]:
        if popcount(A) < 2:
            raise DomainError("indices are defined only for |A| >= 2")
        return float(self.nonadditivity[A]), float(self.nonmodularity[A])


def index_report(mu: SetFunction) -> IndexReport:
    return IndexReport(mu.n, nonadditivity_vector(mu), nonmodularity_vector(mu))


def marginal_delta(mu: SetFunction, i: int, A: int) -> float:
    """``mu(A + i) - mu(A)`` for a 1-based element ``i`` outside ``A``."""
    bit = 1 << (i - 1)
    if not 1 <= i <= mu.n:
        raise DomainError(f"element {i} outside 1..{mu.n}")
    if A & bit:
        raise DomainError(f"element {i} already belongs to {format_subset(A)}")
    return float(mu.values[A | bit] - mu.values[A])


def dual(mu: SetFunction) -> SetFunction:
    """``mu_d(A) = 1 - mu(N - A)``.

    Reversing the array maps each mask to its complement, so this is exact
    up to the one subtraction.
    """
    return SetFunction(mu.n, 1.0 - mu.values[::-1])


def normalize(mu: SetFunction) -> SetFunction:
    """Divide every value by ``mu(N)``."""
    top = mu.values[-1]
    if not top > 0:
        raise DegenerateInputError(f"cannot normalize with mu(N) = {top}")
    vals = mu.values / top
    vals[-1] = 1.0
    return SetFunction(mu.n, vals)


def additive(weights) -> SetFunction:
    """Additive set function with the given singleton weights."""
    w = np.asarray(weights, dtype=np.float64)
    n = w.shape[0]
    _check_n(n)
    vals = membership(n).astype(np.float64) @ w
    vals[0] = 0.0
    if abs(vals[-1] - 1.0) <= EXACT_TOL:
        vals[-1] = 1.0
    return SetFunction(n, vals)
