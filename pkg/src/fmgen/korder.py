"""k-order classes.

Two groups live here.  Saturation classes (tolerant, interactive, maxitive)
fix every value above order ``k`` by a closed form of the lower values.
Index classes (additive, nonadditive, nonmodular) require an interaction
index to vanish above order ``k``; their upper values are rebuilt level by
level from the lower ones by :func:`extend_upper`, which is the
authoritative construction.

For the index classes the rebuild is linear in the lower part, so the exact
range of a single lower value that keeps the rebuilt measure monotone is a
one-dimensional linear program, solved here in closed form rather than by
search.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from typing import Optional

import numpy as np

from .base import GenerationConfig, _direction, _open_uniform, generate_normal, sample_additive
from .errors import DegenerateInputError, DomainError, RejectionError
from .setfn import (
    EXACT_TOL, SetFunction, _fast_mobius, _fast_zeta, cardinalities, first_monotonicity_violation,
    format_subset, membership, normalize,
)
from .structured import RangeBounds

FAMILIES = ("additive", "nonadditive", "nonmodular", "maxitive", "tolerant", "interactive")
INDEX_FAMILIES = ("additive", "nonadditive", "nonmodular")


@dataclass(frozen=True)
class KOrderSpec:
    k: int
    family: str
    K: Optional[float] = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise DomainError(f"unknown k-order family {self.family!r}")
        if self.k < 1:
            raise DomainError("k must be at least 1")
        if self.K is not None:
            if self.family != "interactive":
                raise DomainError("K applies to the interactive family only")
            if not 0.0 <= self.K <= 1.0:
                raise DomainError("K must lie in [0, 1]")

    def check(self, n: int) -> None:
        if self.k > n:
            raise DomainError(f"k = {self.k} exceeds n = {n}")
        if self.family == "interactive" and self.k > n - 1:
            raise DomainError("k-interactive needs k <= n - 1")


# ---------------------------------------------------------------- saturation classes

def _level_max(mu: SetFunction, k: int) -> float:
    card = cardinalities(mu.n)
    top = float(mu.values[card == k].max())
    if not top > 0:
        raise DegenerateInputError(f"every subset of size {k} has value 0")
    return top


def make_k_tolerant(nu: SetFunction, k: int) -> SetFunction:
    """Keep values up to size ``k`` and saturate everything larger at 1."""
    KOrderSpec(k, "tolerant").check(nu.n)
    vals = nu.values.copy()
    vals[cardinalities(nu.n) >= k + 1] = 1.0
    return SetFunction(nu.n, vals)


def make_k_interactive(nu: SetFunction, k: int, K: float) -> SetFunction:
    """Scale the lower part to top out at ``K``, interpolate linearly from ``K`` to 1 above."""
    n = nu.n
    KOrderSpec(k, "interactive", K).check(n)
    card = cardinalities(n)
    top = _level_max(nu, k)
    vals = np.empty(1 << n)
    low = card <= k
    vals[low] = K * nu.values[low] / top
    if k == n - 1:
        vals[-1] = 1.0
    else:
        up = ~low
        vals[up] = K + (card[up] - k - 1) * (1.0 - K) / (n - k - 1)
    vals[0] = 0.0
    return SetFunction(n, vals)


def _maxitive_fill(vals: np.ndarray, n: int, k: int) -> None:
    card = cardinalities(n)
    masks = np.arange(1 << n)
    bits = membership(n)
    for s in range(k + 1, n + 1):
        level = masks[card == s]
        best = np.full(len(level), -np.inf)
        for i in range(n):
            has = bits[level, i]
            best[has] = np.maximum(best[has], vals[level[has] ^ (1 << i)])
        vals[level] = best


def make_k_maxitive(nu: SetFunction, k: int) -> SetFunction:
    """Scale the lower part by its level-``k`` maximum; above, take the max over co-atoms."""
    n = nu.n
    KOrderSpec(k, "maxitive").check(n)
    vals = nu.values / _level_max(nu, k)
    vals[cardinalities(n) > k] = 0.0
    _maxitive_fill(vals, n, k)
    vals[-1] = 1.0 if abs(vals[-1] - 1.0) <= EXACT_TOL else vals[-1]
    return SetFunction(n, vals)


# ---------------------------------------------------------------- constructive extension

def _fill_upper(vals: np.ndarray, n: int, spec: KOrderSpec) -> None:
    """Overwrite every value above order ``k`` in place (no normalization)."""
    k = spec.k
    card = cardinalities(n)
    if spec.family == "additive":
        m = _fast_mobius(vals, n)
        m[card > k] = 0.0
        rebuilt = _fast_zeta(m, n)
        vals[card > k] = rebuilt[card > k]
        return
    if spec.family == "maxitive":
        _maxitive_fill(vals, n, k)
        return
    if spec.family == "tolerant":
        vals[card > k] = 1.0
        return
    if spec.family == "interactive":
        K = spec.K if spec.K is not None else float(vals[card == k].max())
        up = card > k
        vals[up] = 1.0 if k == n - 1 else K + (card[up] - k - 1) * (1.0 - K) / (n - k - 1)
        return
    masks = np.arange(1 << n)
    bits = membership(n)
    singles = vals[1 << np.arange(n)]
    for s in range(k + 1, n + 1):
        level = masks[card == s]
        if spec.family == "nonadditive":
            below = np.where(card < s, vals, 0.0)
            proper = _fast_zeta(below, n)[level]
            vals[level] = proper / (2.0 ** (s - 1) - 1)
        else:
            tot = np.zeros(len(level))
            for i in range(n):
                has = bits[level, i]
                tot[has] += singles[i] + vals[level[has] ^ (1 << i)]
            vals[level] = tot / s


def extend_upper(lower: SetFunction, spec: KOrderSpec, normalize_result: bool = True,
                 check: bool = True) -> SetFunction:
    """Rebuild every value above order ``k`` from the values at or below it.

    The lower part is taken from ``lower``; anything it holds above order
    ``k`` is ignored.  With ``check`` the result must be monotone, otherwise
    :class:`RejectionError` carries the offending pair.
    """
    n = lower.n
    spec.check(n)
    vals = lower.values.copy()
    _fill_upper(vals, n, spec)
    vals[0] = 0.0
    if not vals[-1] > 0:
        raise DegenerateInputError(f"extension gives mu(N) = {vals[-1]}")
    out = SetFunction(n, vals)
    if check:
        bad = first_monotonicity_violation(out, EXACT_TOL)
        if bad is not None:
            A, i = bad
            raise RejectionError(
                f"extension is not monotone: mu({format_subset(A)}) > mu({format_subset(A | 1 << (i - 1))})",
                witness=(A, i))
    return normalize(out) if normalize_result else out


# ---------------------------------------------------------------- ranges

@lru_cache(maxsize=None)
def _response(n: int, k: int, family: str, A: int) -> np.ndarray:
    """Change of every rebuilt value per unit change of ``mu(A)``."""
    e = np.zeros(1 << n)
    e[A] = 1.0
    _fill_upper(e, n, KOrderSpec(k, family))
    e.setflags(write=False)
    return e


@lru_cache(maxsize=None)
def _cover_pairs(n: int):
    lo, hi = [], []
    for A in range(1 << n):
        for i in range(n):
            if not A >> i & 1:
                lo.append(A)
                hi.append(A | 1 << i)
    return np.array(lo), np.array(hi)


def _linear_interval(v0: np.ndarray, g: np.ndarray, n: int) -> tuple[float, float]:
    """Offsets ``d`` with ``v0 + d g`` monotone and positive at ``N``."""
    lo_m, hi_m = _cover_pairs(n)
    base = v0[hi_m] - v0[lo_m]
    slope = g[hi_m] - g[lo_m]
    lo, hi = -math.inf, math.inf
    pos, neg = slope > 1e-15, slope < -1e-15
    if pos.any():
        lo = max(lo, float(np.max(-base[pos] / slope[pos])))
    if neg.any():
        hi = min(hi, float(np.min(-base[neg] / slope[neg])))
    if g[-1] > 1e-15:
        lo = max(lo, -v0[-1] / g[-1])
    elif g[-1] < -1e-15:
        hi = min(hi, -v0[-1] / g[-1])
    return lo, hi


def _min_or_inf(xs):
    return min(xs, default=math.inf)


def _supersets(n: int, A: int, size_ok):
    full = (1 << n) - 1
    rest = full & ~A
    T = rest
    while T:
        B = A | T
        if size_ok(bin(B).count("1")):
            yield B
        T = (T - 1) & rest


def paper_bounds(nu: SetFunction, A: int, spec: KOrderSpec) -> RangeBounds:
    """Closed-form allowable range, evaluated term by term as printed.

    Empty minima drop out.  The terms dictionary keeps every named bound.
    """
    n, k, v = nu.n, spec.k, nu.values
    sA = bin(A).count("1")
    ins = [1 << i for i in range(n) if A >> i & 1]
    outs = [1 << i for i in range(n) if not A >> i & 1]
    down = float(v[A] - max(v[A ^ i] for i in ins))
    up = float(min(v[A | i] for i in outs) - v[A])

    def out_of(B):
        return [1 << i for i in range(n) if not B >> i & 1]

    def in_of(B):
        return [1 << i for i in range(n) if B >> i & 1]

    def step_in(B):  # min_{j in B} nu(B) - nu(B - j)
        return _min_or_inf(v[B] - v[B ^ j] for j in in_of(B))

    def step_out(B):  # min_{j notin B} (nu(B + j) - nu(B)) / 2
        return _min_or_inf((v[B | j] - v[B]) / 2 for j in out_of(B))

    def mixed(B):
        a = (v[B] - max(v[B ^ i] for i in ins)) / 2
        others = in_of(B & ~A)
        b = v[B] - max(v[B ^ j] for j in others) if others else math.inf
        return min(a, b)

    terms = {}
    fam = spec.family
    if fam == "additive":
        eq = list(_supersets(n, A, lambda s: s == k + 1))
        gt = list(_supersets(n, A, lambda s: s > k + 1))
        even_k = (k + 1 - sA) % 2 == 0
        terms["a1"] = down
        terms["a2"] = _min_or_inf((step_in if even_k else step_out)(B) for B in eq)
        terms["a3"] = _min_or_inf((mixed if (bin(B).count("1") - sA) % 2 == 0 else step_out)(B) for B in gt)
        terms["a4"] = up
        terms["a5"] = _min_or_inf((step_out if even_k else step_in)(B) for B in eq)
        terms["a6"] = _min_or_inf((step_out if (bin(B).count("1") - sA) % 2 == 0 else mixed)(B) for B in gt)
        lower = min(terms["a1"], terms["a2"], terms["a3"])
        upper = min(terms["a4"], terms["a5"], terms["a6"])
    elif fam == "nonadditive":
        terms["b1"] = down
        terms["b2"] = _min_or_inf(
            (2 ** (bin(B).count("1") - 1) - 1) * (v[B] - v[B ^ i])
            for B in _supersets(n, A, lambda s: s > k) for i in ins)
        terms["b3"] = up
        terms["b4"] = _min_or_inf(
            (2 ** (s - 1) - 1) * (2 ** s - 1) / 2 ** (s - 1) * (v[B | i] - v[B])
            for B in _supersets(n, A, lambda s: True) for s in [bin(B).count("1")] for i in out_of(B))
        lower = min(terms["b1"], terms["b2"])
        upper = min(terms["b3"], terms["b4"])
    elif fam == "nonmodular":
        terms["c1"] = down
        if sA > 1:
            terms["c2"] = 1.0
        else:
            terms["c2"] = _min_or_inf(
                (k + 1) * (v[B] - v[B ^ i]) for B in _supersets(n, A, lambda s: s == k + 1) for i in in_of(B))
        terms["c3"] = up
        c4 = []
        if sA == 1:
            c4.append(_min_or_inf(
                s * (s + 1) * (v[B | i] - v[B])
                for B in _supersets(n, A, lambda s: True) for s in [bin(B).count("1")] for i in out_of(B)))
        if sA == k:
            c4.append(_min_or_inf((sA + 1) / sA * (v[A | i] - v[A]) for i in outs))
        terms["c4"] = _min_or_inf(c4)
        lower = min(terms["c1"], terms["c2"])
        upper = min(terms["c3"], terms["c4"])
    else:
        raise DomainError(f"no closed-form range for the {fam} family")
    terms = {key: float(val) for key, val in terms.items() if math.isfinite(val)}
    return RangeBounds(float(v[A] - lower), float(v[A] + upper), terms)


@dataclass(frozen=True)
class KOrderRange:
    """Closed-form proposal next to the validated range and their disagreement."""

    paper: RangeBounds
    validated: RangeBounds
    discrepancy: dict

    @property
    def agrees(self) -> bool:
        return not self.discrepancy


def _require_lower(mu: SetFunction, A: int, spec: KOrderSpec) -> int:
    size = bin(A).count("1")
    if not 0 < size <= spec.k or A == mu.full:
        raise DomainError(f"subset {format_subset(A)} is not a proper lower-order subset for k={spec.k}")
    if spec.family not in INDEX_FAMILIES:
        raise DomainError(f"ranges are defined for the index families, not {spec.family}")
    return size


def validated_range(mu: SetFunction, A: int, spec: KOrderSpec) -> RangeBounds:
    """Exact set of values for ``mu(A)`` whose rebuilt measure stays monotone.

    ``mu`` must already conform to ``spec``.  The interval is intersected
    with the plain monotonicity interval of ``mu(A)`` against its current
    neighbors.
    """
    n = mu.n
    spec.check(n)
    _require_lower(mu, A, spec)
    g = _response(n, spec.k, spec.family, A)
    d_lo, d_hi = _linear_interval(mu.values, g, n)
    v = mu.values
    int_l = max(v[A ^ (1 << i)] for i in range(n) if A >> i & 1)
    int_u = min(v[A | (1 << i)] for i in range(n) if not A >> i & 1)
    lower = max(v[A] + d_lo, int_l)
    upper = min(v[A] + d_hi, int_u)
    return RangeBounds(float(lower), float(upper),
                       {"exact_low": float(v[A] + d_lo), "exact_high": float(v[A] + d_hi),
                        "Int_L": float(int_l), "Int_U": float(int_u)})


def korder_range(nu: SetFunction, A: int, spec: KOrderSpec, tol: float = 1e-9) -> KOrderRange:
    """Closed-form and validated ranges for ``nu(A)``, with their differences."""
    paper = paper_bounds(nu, A, spec)
    valid = validated_range(nu, A, spec)
    diff = {}
    if abs(paper.lower - valid.lower) > tol:
        diff["lower"] = (paper.lower, valid.lower)
    if abs(paper.upper - valid.upper) > tol:
        diff["upper"] = (paper.upper, valid.upper)
    return KOrderRange(paper, valid, diff)


# ---------------------------------------------------------------- perturbation

def paper_propagation(nu: SetFunction, A: int, new_value: float, spec: KOrderSpec) -> SetFunction:
    """Closed-form update of the upper values (unnormalized), as printed."""
    n, k = nu.n, spec.k
    size = _require_lower(nu, A, spec)
    d = new_value - nu.values[A]
    vals = nu.values.copy()
    vals[A] = new_value
    for B in _supersets(n, A, lambda s: s > k):
        sB = bin(B).count("1")
        if spec.family == "additive":
            vals[B] += (-1) ** (sB - size) * d
        elif spec.family == "nonadditive":
            vals[B] += d / (2 ** (sB - 1) - 1)
        elif size == 1 or (size == k and sB == k + 1):
            vals[B] += d / sB
    return SetFunction(n, vals)


def perturb_korder(nu: SetFunction, A: int, new_value: float, spec: KOrderSpec,
                   fast_path: bool = False, tol: float = 1e-9) -> SetFunction:
    """Set ``mu(A)``, rebuild the upper levels and normalize.

    ``fast_path`` tries the closed-form propagation first and keeps it only
    when it matches the constructive rebuild within ``EXACT_TOL``.
    """
    rng_ = validated_range(nu, A, spec)
    if not rng_.lower - tol <= new_value <= rng_.upper + tol:
        raise RejectionError(
            f"value {new_value:.12g} for {format_subset(A)} outside [{rng_.lower:.12g}, {rng_.upper:.12g}]",
            witness=A)
    vals = nu.values.copy()
    vals[A] = new_value
    built = extend_upper(SetFunction(nu.n, vals), spec, normalize_result=False)
    if fast_path:
        quick = paper_propagation(nu, A, new_value, spec)
        if quick.allclose(built, EXACT_TOL):
            built = quick
    return normalize(built)


def fast_path_agrees(nu: SetFunction, A: int, new_value: float, spec: KOrderSpec) -> bool:
    vals = nu.values.copy()
    vals[A] = new_value
    built = extend_upper(SetFunction(nu.n, vals), spec, normalize_result=False, check=False)
    return paper_propagation(nu, A, new_value, spec).allclose(built, EXACT_TOL)


@lru_cache(maxsize=None)
def _lower_masks(n: int, k: int) -> tuple[int, ...]:
    full = (1 << n) - 1
    return tuple(A for A in range(1, full) if bin(A).count("1") <= k)


def _lower_neighbors(mu: SetFunction, A: int, k: int):
    """Lower-order subsets sorted by value (ties by mask), including the empty set."""
    v = mu.values
    order = sorted((0,) + _lower_masks(mu.n, k), key=lambda s: (v[s], s))
    return order, order.index(A)


def korder_walk(mu: SetFunction, A: int, direction: str, spec: KOrderSpec, rng) -> tuple[SetFunction, bool]:
    """Random-walk step among the lower-order subsets, then rebuild and normalize."""
    up = _direction(direction)
    _require_lower(mu, A, spec)
    rng_ = validated_range(mu, A, spec)
    order, p = _lower_neighbors(mu, A, spec.k)
    v = mu.values
    if up:
        if p + 1 >= len(order):
            return mu, False
        s = order[p + 1]
        if not (bin(A).count("1") >= bin(s).count("1") or A & ~s):
            return mu, False
        lo = v[s]
        hi = v[order[p + 2]] if p + 2 < len(order) else rng_.upper
        if lo > rng_.upper:
            return mu, False
        hi = min(hi, rng_.upper)
    else:
        if p < 1:
            return mu, False
        q = order[p - 1]
        if not (bin(A).count("1") <= bin(q).count("1") or q & ~A):
            return mu, False
        hi = v[q]
        lo = v[order[p - 2]] if p >= 2 else rng_.lower
        if hi < rng_.lower:
            return mu, False
        lo = max(lo, rng_.lower)
    if not lo < hi:
        return mu, False
    x = _open_uniform(rng, lo, hi, ())
    if x is None:
        return mu, False
    try:
        return perturb_korder(mu, A, x, spec), True
    except RejectionError:
        return mu, False


# ---------------------------------------------------------------- generators

def generate_index_class(n: int, spec: KOrderSpec, config: GenerationConfig, rng) -> SetFunction:
    """Additive seed, perturbed inside validated ranges, then lower-level walks.

    ``config.rounds`` defaults to the number of lower-order subsets here.
    """
    spec.check(n)
    mu = sample_additive(n, rng).measure()
    lows = _lower_masks(n, spec.k)
    rounds = len(lows) if config.rounds is None else config.rounds
    for _ in range(rounds):
        A = lows[int(rng.integers(len(lows)))]
        r = validated_range(mu, A, spec)
        if not r.lower < r.upper:
            continue
        x = _open_uniform(rng, r.lower, r.upper, (mu.values[A],))
        if x is None:
            continue
        try:
            mu = perturb_korder(mu, A, x, spec)
        except RejectionError:
            continue
    for _ in range(config.walk_steps):
        for _ in range(config.walk_attempts):
            A = lows[int(rng.integers(len(lows)))]
            mu, moved = korder_walk(mu, A, "up" if rng.integers(2) else "down", spec, rng)
            if moved:
                break
    return mu


def generate_saturation_class(n: int, spec: KOrderSpec, config: GenerationConfig, rng) -> SetFunction:
    """Normal generation followed by the closed-form transform of the family."""
    spec.check(n)
    nu = generate_normal(n, config, rng)
    if spec.family == "tolerant":
        return make_k_tolerant(nu, spec.k)
    if spec.family == "maxitive":
        return make_k_maxitive(nu, spec.k)
    K = spec.K
    if K is None:
        K = _open_uniform(rng, 0.0, 1.0, ())
    return make_k_interactive(nu, spec.k, K)


def generate_korder(n: int, spec: KOrderSpec, config: GenerationConfig, rng) -> SetFunction:
    if spec.family in INDEX_FAMILIES:
        return generate_index_class(n, spec, config, rng)
    return generate_saturation_class(n, spec, config, rng)
