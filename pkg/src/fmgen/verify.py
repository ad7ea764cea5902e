"""Brute-force class oracles.

Each oracle enumerates the defining (in)equalities of its class directly
from the definitions.  Nothing here calls into the generator modules or the
fast transforms of :mod:`fmgen.setfn`; the redundancy is deliberate so that
generator output is checked by independent code.

Constraint tables are exhaustive up to ``EXHAUSTIVE_N`` elements and sampled
(with the coverage reported) above that.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field, replace
from functools import lru_cache
from itertools import combinations
from typing import Optional

import numpy as np

from .errors import DomainError
from .setfn import SetFunction

EXHAUSTIVE_N = 12
SAMPLE_ROWS = 200_000

STRUCTURAL = {
    "normal", "additive", "supermodular", "submodular", "superadditive", "subadditive",
    "antibuoyant", "buoyant", "symmetric",
}
K_FAMILIES = {
    "k-additive", "k-nonadditive", "k-nonmodular", "k-maxitive", "k-minitive",
    "k-tolerant", "k-intolerant", "k-interactive", "dual-k-interactive",
    "upper-k-additive", "upper-k-nonadditive", "upper-k-nonmodular",
}
KNOWN_TAGS = STRUCTURAL | K_FAMILIES | {"p-symmetric"}
STRICTABLE = {"supermodular", "submodular", "superadditive", "subadditive", "antibuoyant", "buoyant"}

# Generatable classes (the rest are reachable through duality).
GENERATABLE = (
    "normal", "supermodular", "antibuoyant", "superadditive", "p-symmetric",
    "k-tolerant", "k-interactive", "k-maxitive", "k-additive", "k-nonadditive", "k-nonmodular",
)

_DUAL = {
    "normal": "normal", "additive": "additive", "symmetric": "symmetric", "p-symmetric": "p-symmetric",
    "supermodular": "submodular", "submodular": "supermodular",
    "superadditive": "subadditive", "subadditive": "superadditive",
    "antibuoyant": "buoyant", "buoyant": "antibuoyant",
    "k-maxitive": "k-minitive", "k-minitive": "k-maxitive",
    "k-tolerant": "k-intolerant", "k-intolerant": "k-tolerant",
    "k-interactive": "dual-k-interactive", "dual-k-interactive": "k-interactive",
    "k-additive": "upper-k-additive", "upper-k-additive": "k-additive",
    "k-nonadditive": "upper-k-nonadditive", "upper-k-nonadditive": "k-nonadditive",
    "k-nonmodular": "upper-k-nonmodular", "upper-k-nonmodular": "k-nonmodular",
}

_LABEL = re.compile(r"^(?P<pre>upper-|dual-)?(?P<k>\d+)-(?P<fam>[a-z]+)$")


@dataclass(frozen=True)
class MeasureClassSpec:
    """A class tag plus its parameters.

    ``partition`` holds the blocks of a p-symmetric basis (1-based elements)
    and ``inner`` the class enforced on the quotient.
    """

    tag: str
    k: Optional[int] = None
    K: Optional[float] = None
    partition: Optional[tuple] = None
    inner: Optional[str] = None
    strict: bool = False

    def __post_init__(self):
        if self.tag not in KNOWN_TAGS:
            raise DomainError(f"unknown class {self.tag!r}")
        if self.tag in K_FAMILIES:
            if self.k is None or self.k < 1:
                raise DomainError(f"class {self.tag} needs an order k >= 1")
        if self.K is not None and not 0.0 <= self.K <= 1.0:
            raise DomainError("K must lie in [0, 1]")
        if self.tag == "p-symmetric":
            if not self.partition:
                raise DomainError("p-symmetric needs a partition")
            blocks = tuple(tuple(sorted(int(e) for e in b)) for b in self.partition)
            object.__setattr__(self, "partition", blocks)
            if self.inner is None:
                object.__setattr__(self, "inner", "normal")
            if self.inner not in STRUCTURAL:
                raise DomainError(f"unsupported inner class {self.inner!r}")
        if self.strict and self.tag not in STRICTABLE and not (
                self.tag == "p-symmetric" and self.inner in STRICTABLE):
            raise DomainError(f"strictness is not defined for {self.tag}")

    def label(self) -> str:
        """Concrete tag, e.g. ``2-additive`` or ``upper-1-nonmodular``."""
        if self.tag in K_FAMILIES:
            if self.tag.startswith(("upper-", "dual-")):
                pre, fam = self.tag.split("-k-")
                return f"{pre}-{self.k}-{fam}"
            return f"{self.k}-{self.tag[2:]}"
        return self.tag

    @classmethod
    def from_label(cls, label: str, **params) -> "MeasureClassSpec":
        m = _LABEL.match(label)
        if m:
            pre = m.group("pre") or ""
            return cls(f"{pre}k-{m.group('fam')}", k=int(m.group("k")), **params)
        return cls(label, **params)

    def dual(self) -> "MeasureClassSpec":
        inner = _DUAL[self.inner] if self.inner else None
        return replace(self, tag=_DUAL[self.tag], inner=inner)

    def to_json(self) -> dict:
        out = {"class": self.tag}
        for key in ("k", "K", "inner"):
            val = getattr(self, key)
            if val is not None:
                out[key] = val
        if self.partition is not None:
            out["partition"] = [list(b) for b in self.partition]
        if self.strict:
            out["strict"] = True
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "MeasureClassSpec":
        part = obj.get("partition")
        return cls(obj["class"], k=obj.get("k"), K=obj.get("K"),
                   partition=tuple(tuple(b) for b in part) if part else None,
                   inner=obj.get("inner"), strict=bool(obj.get("strict", False)))


def dual_label(label: str) -> str:
    if label.endswith("-symmetric"):
        return label
    m = _LABEL.match(label)
    if m:
        pre = m.group("pre") or ""
        fam = "k-" + m.group("fam")
        mapped = _DUAL[(pre + fam)]
        return MeasureClassSpec(mapped, k=int(m.group("k"))).label()
    return _DUAL[label]


@dataclass(frozen=True)
class ClassReport:
    """Outcome of one oracle.

    ``worst_violation`` is the largest amount by which a defining constraint
    fails (0 when all hold); ``min_slack`` is the smallest margin of the
    inequality constraints, reported so callers can judge strictness.
    """

    tag: str
    passed: bool
    worst_violation: float
    witness: Optional[str] = None
    min_slack: Optional[float] = None
    effective_k: Optional[int] = None
    coverage: float = 1.0
    details: dict = field(default_factory=dict)


def _fmt(mask: int) -> str:
    return "{" + ",".join(str(i + 1) for i in range(mask.bit_length()) if mask >> i & 1) + "}"


@lru_cache(maxsize=None)
def _card(n: int) -> np.ndarray:
    masks = np.arange(1 << n)
    return ((masks[:, None] >> np.arange(n)) & 1).sum(1)


# ---------------------------------------------------------------- constraint rows

@lru_cache(maxsize=None)
def _monotone_rows(n: int):
    lo, hi, el = [], [], []
    for A in range(1 << n):
        for i in range(n):
            if not A >> i & 1:
                lo.append(A)
                hi.append(A | 1 << i)
                el.append(i + 1)
    return np.array(lo), np.array(hi), np.array(el)


def _sample_rng(n: int, tag: str) -> np.random.Generator:
    return np.random.default_rng([n, sum(map(ord, tag))])


@lru_cache(maxsize=None)
def _pair_rows(n: int, ordered: bool):
    """Rows ``(A, i, j)`` with ``i != j`` outside ``A``; unordered means ``i < j``."""
    if n <= EXHAUSTIVE_N:
        As, Is, Js = [], [], []
        for A in range(1 << n):
            out = [i for i in range(n) if not A >> i & 1]
            for i, j in combinations(out, 2):
                As.append(A); Is.append(i); Js.append(j)
                if ordered:
                    As.append(A); Is.append(j); Js.append(i)
        total = len(As)
    else:
        rng = _sample_rng(n, "pairs")
        full = (1 << n) - 1
        i = rng.integers(0, n, SAMPLE_ROWS)
        j = (i + rng.integers(1, n, SAMPLE_ROWS)) % n
        if not ordered:
            i, j = np.minimum(i, j), np.maximum(i, j)
        A = rng.integers(0, full + 1, SAMPLE_ROWS) & ~((1 << i) | (1 << j))
        _, keep = np.unique((A * n + i) * n + j, return_index=True)
        keep.sort()
        As, Is, Js = A[keep].tolist(), i[keep].tolist(), j[keep].tolist()
        total = (2 if ordered else 1) * math.comb(n, 2) * 2 ** (n - 2)
    As, Is, Js = np.array(As, dtype=np.int64), np.array(Is, dtype=np.int64), np.array(Js, dtype=np.int64)
    return As, Is, Js, min(1.0, len(As) / total)


@lru_cache(maxsize=None)
def _disjoint_rows(n: int):
    """Unordered pairs of disjoint nonempty subsets ``(S, T)``."""
    if n <= EXHAUSTIVE_N:
        full = (1 << n) - 1
        S_list, T_list = [], []
        for S in range(1, full + 1):
            rest = full & ~S
            T = rest
            while T:
                if T > S:
                    S_list.append(S); T_list.append(T)
                T = (T - 1) & rest
        total = len(S_list)
        S_arr, T_arr = np.array(S_list, dtype=np.int64), np.array(T_list, dtype=np.int64)
    else:
        rng = _sample_rng(n, "disjoint")
        lab = rng.integers(0, 3, (SAMPLE_ROWS, n))
        w = 1 << np.arange(n)
        S_arr = ((lab == 1) * w).sum(1)
        T_arr = ((lab == 2) * w).sum(1)
        keep = (S_arr > 0) & (T_arr > 0)
        S_arr, T_arr = S_arr[keep], T_arr[keep]
        S_arr, T_arr = np.minimum(S_arr, T_arr), np.maximum(S_arr, T_arr)
        _, first = np.unique(S_arr * (1 << n) + T_arr, return_index=True)
        first.sort()
        S_arr, T_arr = S_arr[first], T_arr[first]
        total = (3 ** n - 2 ** (n + 1) + 1) // 2
    return S_arr, T_arr, min(1.0, len(S_arr) / total)


def _rows_touching(key, cols, A):
    cache = _TOUCH.setdefault(key, {})
    got = cache.get(A)
    if got is None:
        hit = np.zeros(len(cols[0]), dtype=bool)
        for c in cols:
            hit |= c == A
        got = np.nonzero(hit)[0]
        cache[A] = got
    return got


_TOUCH: dict = {}


# ---------------------------------------------------------------- slack kernels

def _boundary_violation(v: np.ndarray) -> float:
    return max(abs(v[0]), abs(v[-1] - 1.0))


def _monotone(v: np.ndarray, n: int):
    lo, hi, el = _monotone_rows(n)
    slack = v[hi] - v[lo]
    k = int(np.argmin(slack))
    return float(slack[k]), f"A={_fmt(int(lo[k]))}, i={int(el[k])}"


def _supermodular_slack(v, n, sign=1.0):
    A, I, J, cov = _pair_rows(n, False)
    Ai, Aj = A | (1 << I), A | (1 << J)
    slack = sign * (v[Ai | Aj] - v[Ai] - v[Aj] + v[A])
    return slack, lambda k: f"A={_fmt(int(A[k]))}, i={int(I[k]) + 1}, j={int(J[k]) + 1}", cov


def _antibuoyant_slack(v, n, sign=1.0):
    A, I, J, cov = _pair_rows(n, True)
    Ai, Aj = A | (1 << I), A | (1 << J)
    slack = sign * (v[Ai | Aj] + v[A] - 2.0 * v[Aj])
    return slack, lambda k: f"A={_fmt(int(A[k]))}, i={int(I[k]) + 1}, j={int(J[k]) + 1}", cov


def _superadditive_slack(v, n, sign=1.0):
    S, T, cov = _disjoint_rows(n)
    slack = sign * (v[S | T] - v[S] - v[T])
    return slack, lambda k: f"A={_fmt(int(S[k]))}, B={_fmt(int(T[k]))}", cov


_INEQ = {
    "supermodular": (_supermodular_slack, 1.0),
    "submodular": (_supermodular_slack, -1.0),
    "antibuoyant": (_antibuoyant_slack, 1.0),
    "buoyant": (_antibuoyant_slack, -1.0),
    "superadditive": (_superadditive_slack, 1.0),
    "subadditive": (_superadditive_slack, -1.0),
}


def local_slack(values, n: int, tag: str, A: int) -> float:
    """Smallest slack among ``tag`` constraints (and monotonicity) that involve ``A``.

    Used by generators as a verify-and-reject guard after a tentative move.
    """
    v = np.asarray(values, dtype=np.float64)
    lo, hi, _ = _monotone_rows(n)
    rows = _rows_touching(("mono", n), (lo, hi), A)
    best = float(np.min(v[hi[rows]] - v[lo[rows]])) if len(rows) else math.inf
    if tag == "normal":
        return best
    if tag in ("supermodular", "submodular", "antibuoyant", "buoyant"):
        Ar, I, J, _ = _pair_rows(n, tag in ("antibuoyant", "buoyant"))
        Ai, Aj = Ar | (1 << I), Ar | (1 << J)
        rows = _rows_touching((tag in ("antibuoyant", "buoyant"), n), (Ar, Ai, Aj, Ai | Aj), A)
        if len(rows):
            a, ai, aj = Ar[rows], Ai[rows], Aj[rows]
            if tag in ("supermodular", "submodular"):
                s = v[ai | aj] - v[ai] - v[aj] + v[a]
            else:
                s = v[ai | aj] + v[a] - 2.0 * v[aj]
            if tag in ("submodular", "buoyant"):
                s = -s
            best = min(best, float(s.min()))
        return best
    if tag in ("superadditive", "subadditive"):
        S, T, _ = _disjoint_rows(n)
        rows = _rows_touching(("disj", n), (S, T, S | T), A)
        if len(rows):
            s = v[S[rows] | T[rows]] - v[S[rows]] - v[T[rows]]
            if tag == "subadditive":
                s = -s
            best = min(best, float(s.min()))
        return best
    raise DomainError(f"no local guard for {tag}")


# ---------------------------------------------------------------- index oracles

@lru_cache(maxsize=None)
def _submask_pairs(n: int, proper: bool):
    """All pairs ``(A, C)`` with ``C`` a (proper) submask of ``A``, plus ``(-1)^{|A-C|}``."""
    As, Cs, sg = [], [], []
    for A in range(1 << n):
        C = A
        while True:
            if not (proper and C == A):
                As.append(A); Cs.append(C)
                sg.append(-1.0 if bin(A ^ C).count("1") & 1 else 1.0)
            if C == 0:
                break
            C = (C - 1) & A
    return np.array(As), np.array(Cs), np.array(sg)


def mobius_bruteforce(v: np.ndarray, n: int) -> np.ndarray:
    A, C, sg = _submask_pairs(n, False)
    return np.bincount(A, weights=sg * v[C], minlength=1 << n)


def nonadditivity_bruteforce(v: np.ndarray, n: int) -> np.ndarray:
    A, C, _ = _submask_pairs(n, True)
    sums = np.bincount(A, weights=v[C], minlength=1 << n)
    card = _card(n)
    out = np.full(1 << n, np.nan)
    ok = card >= 2
    out[ok] = v[ok] - sums[ok] / (2.0 ** (card[ok] - 1) - 1)
    return out


def nonmodularity_bruteforce(v: np.ndarray, n: int) -> np.ndarray:
    card = _card(n)
    out = np.full(1 << n, np.nan)
    for A in range(1 << n):
        if card[A] < 2:
            continue
        tot = 0.0
        for i in range(n):
            if A >> i & 1:
                tot += v[1 << i] + v[A ^ (1 << i)]
        out[A] = v[A] - tot / card[A]
    return out


def _index_oracle(v, n, fam, k, tol):
    if n > EXHAUSTIVE_N:
        raise DomainError(f"index oracles are exhaustive only up to n={EXHAUSTIVE_N}")
    if fam == "additive":
        idx = mobius_bruteforce(v, n)
    elif fam == "nonadditive":
        idx = nonadditivity_bruteforce(v, n)
    else:
        idx = nonmodularity_bruteforce(v, n)
    card = _card(n)
    mag = np.where(np.isnan(idx), 0.0, np.abs(idx))
    top = mag * (card > k)
    worst = int(np.argmax(top))
    eff = 1
    for level in range(n, 0, -1):
        if mag[card == level].max(initial=0.0) > tol:
            eff = level
            break
    return float(top[worst]), f"B={_fmt(worst)}", eff


def _levels_of(n):
    card = _card(n)
    return [np.nonzero(card == s)[0] for s in range(n + 1)]


def _maxitive_oracle(v, n, k):
    """``mu(A) = max over k-subsets B of A of mu(B)`` for ``|A| > k``."""
    card = _card(n)
    worst, where = 0.0, None
    for A in range(1 << n):
        if card[A] <= k:
            continue
        elems = [1 << i for i in range(n) if A >> i & 1]
        best = max(v[sum(c)] for c in combinations(elems, k))
        d = abs(v[A] - best)
        if d > worst:
            worst, where = d, A
    return worst, (f"A={_fmt(where)}" if where is not None else None)


def _minitive_oracle(v, n, k):
    """``mu(A) = min over supersets C of A with |C| = n - k of mu(C)`` for ``|A| < n - k``."""
    full = (1 << n) - 1
    card = _card(n)
    worst, where = 0.0, None
    for A in range(1 << n):
        if card[A] >= n - k:
            continue
        outside = [1 << i for i in range(n) if not A >> i & 1]
        need = n - k - int(card[A])
        best = min(v[A | sum(c)] for c in combinations(outside, need))
        d = abs(v[A] - best)
        if d > worst:
            worst, where = d, A
    return worst, (f"A={_fmt(where)}" if where is not None else None)


def _interactive_oracle(v, n, k, K):
    if k >= n - 1:
        return 0.0, None, K
    card = _card(n)
    first = int(np.nonzero(card == k + 1)[0][0])
    K_used = float(v[first]) if K is None else K
    upper = np.nonzero(card >= k + 1)[0]
    target = K_used + (card[upper] - k - 1) * (1.0 - K_used) / (n - k - 1)
    dev = np.abs(v[upper] - target)
    j = int(np.argmax(dev))
    worst = float(dev[j])
    if not 0.0 <= K_used <= 1.0:
        worst = max(worst, max(-K_used, K_used - 1.0))
    return worst, f"A={_fmt(int(upper[j]))}", K_used


def _symmetry_violation(v, n, blocks):
    keys = np.zeros(1 << n, dtype=np.int64)
    radix = 1
    masks = np.arange(1 << n)
    for b in blocks:
        bm = sum(1 << (e - 1) for e in b)
        cnt = np.array([bin(int(x)).count("1") for x in (masks & bm)])
        keys += cnt * radix
        radix *= len(b) + 1
    worst, where = 0.0, None
    order = np.lexsort((v, keys))
    ks, vs = keys[order], v[order]
    starts = np.r_[0, np.nonzero(np.diff(ks))[0] + 1]
    ends = np.r_[starts[1:], len(ks)]
    for s, e in zip(starts, ends):
        d = vs[e - 1] - vs[s]
        if d > worst:
            worst, where = float(d), (int(order[s]), int(order[e - 1]))
    return worst, (f"A={_fmt(where[0])}, B={_fmt(where[1])}" if where else None)


def indifference_partition(mu: SetFunction, tol: float = 1e-9) -> tuple:
    """Coarsest partition of ``N`` into subsets of indifference.

    Elements ``i`` and ``j`` are merged when swapping them never changes ``mu``.
    """
    n, v = mu.n, mu.values
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    masks = np.arange(1 << n)
    for i, j in combinations(range(n), 2):
        bi, bj = 1 << i, 1 << j
        hi_only = (masks & bi != 0) & (masks & bj == 0)
        src = masks[hi_only]
        swapped = src ^ bi ^ bj
        if np.all(np.abs(v[src] - v[swapped]) <= tol):
            parent[find(j)] = find(i)
    groups: dict = {}
    for e in range(n):
        groups.setdefault(find(e), []).append(e + 1)
    return tuple(tuple(g) for g in sorted(groups.values()))


# ---------------------------------------------------------------- public API

def check_class(mu: SetFunction, spec: MeasureClassSpec, tol: float = 1e-9) -> ClassReport:
    """Evaluate every defining constraint of ``spec`` on ``mu``.

    All classes include the capacity conditions (boundary and monotonicity).
    For strict specs the inequality constraints must also hold with positive
    minimum slack.
    """
    n = mu.n
    v = np.asarray(mu.values, dtype=np.float64)
    label = spec.label()

    bnd = _boundary_violation(v)
    mono_slack, mono_w = _monotone(v, n)
    worst = max(bnd, -mono_slack, 0.0)
    witness = None
    if worst > tol:
        witness = "boundary" if bnd >= -mono_slack else f"monotonicity: {mono_w}"
    min_slack = None
    eff_k = None
    coverage = 1.0
    details: dict = {}

    def absorb(amount, w):
        nonlocal worst, witness
        if amount > worst:
            worst = amount
            if amount > tol:
                witness = w

    tag = spec.tag
    if tag in _INEQ:
        fn, sign = _INEQ[tag]
        slack, describe, coverage = fn(v, n, sign)
        if len(slack):
            k = int(np.argmin(slack))
            min_slack = float(slack[k])
            absorb(max(0.0, -min_slack), describe(k))
            if spec.strict and not min_slack > 0 and witness is None:
                witness = describe(k)
    elif tag == "normal":
        pass
    elif tag == "additive":
        sing = v[[1 << i for i in range(n)]]
        bits = ((np.arange(1 << n)[:, None] >> np.arange(n)) & 1).astype(np.float64)
        dev = np.abs(v - bits @ sing)
        j = int(np.argmax(dev))
        absorb(float(dev[j]), f"A={_fmt(j)}")
    elif tag == "symmetric":
        d, w = _symmetry_violation(v, n, [tuple(range(1, n + 1))])
        absorb(d, w)
    elif tag == "p-symmetric":
        d, w = _symmetry_violation(v, n, spec.partition)
        absorb(d, f"asymmetry: {w}")
        inner = check_class(mu, MeasureClassSpec(spec.inner, strict=spec.strict), tol)
        absorb(inner.worst_violation, inner.witness)
        min_slack = inner.min_slack
        details["coarsest_partition"] = indifference_partition(mu, tol)
        if spec.strict and inner.min_slack is not None and not inner.min_slack > 0 and witness is None:
            witness = inner.witness or "not strict"
    elif tag in ("k-additive", "k-nonadditive", "k-nonmodular"):
        d, w, eff_k = _index_oracle(v, n, tag[2:], spec.k, tol)
        absorb(d, w)
    elif tag in ("upper-k-additive", "upper-k-nonadditive", "upper-k-nonmodular"):
        d, w, eff_k = _index_oracle(1.0 - v[::-1], n, tag[8:], spec.k, tol)
        absorb(d, f"dual {w}")
    elif tag == "k-maxitive":
        d, w = _maxitive_oracle(v, n, spec.k)
        absorb(d, w)
    elif tag == "k-minitive":
        d, w = _minitive_oracle(v, n, spec.k)
        absorb(d, w)
    elif tag == "k-tolerant":
        card = _card(n)
        dev = np.where(card >= spec.k + 1, np.abs(v - 1.0), 0.0)
        j = int(np.argmax(dev))
        absorb(float(dev[j]), f"A={_fmt(j)}")
    elif tag == "k-intolerant":
        card = _card(n)
        dev = np.where(card <= n - spec.k - 1, np.abs(v), 0.0)
        j = int(np.argmax(dev))
        absorb(float(dev[j]), f"A={_fmt(j)}")
    elif tag == "k-interactive":
        d, w, K_used = _interactive_oracle(v, n, spec.k, spec.K)
        absorb(d, w)
        details["K"] = K_used
    elif tag == "dual-k-interactive":
        d, w, K_used = _interactive_oracle(1.0 - v[::-1], n, spec.k, spec.K)
        absorb(d, f"dual {w}" if w else None)
        details["K"] = K_used
    else:  # pragma: no cover - guarded by MeasureClassSpec
        raise DomainError(f"no oracle for {tag}")

    passed = bool(worst <= tol)
    if spec.strict and (min_slack is None or not min_slack > 0):
        passed = False
    return ClassReport(label, passed, float(worst), witness if not passed else None,
                       min_slack, eff_k, coverage, details)


def _minimal_k(mu, family, tol, upto):
    for k in range(1, upto + 1):
        if check_class(mu, MeasureClassSpec(family, k=k), tol).passed:
            return k
    return None


def tolerance_order(mu: SetFunction, convention: str = "construction", tol: float = 1e-9):
    """Smallest k with ``mu(A) = 1`` for every ``|A| >= k + 1``.

    ``convention="definition"`` instead returns the order in the sense
    "``mu(A) = 1`` for all ``|A| >= k``", which is one more.
    """
    k = _minimal_k(mu, "k-tolerant", tol, mu.n)
    if convention == "definition":
        return k + 1 if k is not None else None
    return k


def classify(mu: SetFunction, tol: float = 1e-9) -> frozenset:
    """Every class tag ``mu`` satisfies, with the minimal order for each k-family.

    Saturation-type families (maxitive, minitive, tolerant, intolerant,
    interactive) are reported only when their minimal order is non-vacuous.
    """
    tags = set()
    n = mu.n
    if not check_class(mu, MeasureClassSpec("normal"), tol).passed:
        return frozenset()
    tags.add("normal")
    for tag in ("additive", "supermodular", "submodular", "superadditive", "subadditive",
                "antibuoyant", "buoyant", "symmetric"):
        if check_class(mu, MeasureClassSpec(tag), tol).passed:
            tags.add(tag)
    blocks = indifference_partition(mu, tol)
    tags.add(f"{len(blocks)}-symmetric")
    if n <= EXHAUSTIVE_N:
        for fam in ("k-additive", "k-nonadditive", "k-nonmodular"):
            rep = check_class(mu, MeasureClassSpec(fam, k=n), tol)
            tags.add(MeasureClassSpec(fam, k=rep.effective_k).label())
    for fam, vacuous in (("k-maxitive", n), ("k-minitive", n), ("k-tolerant", n - 1),
                         ("k-intolerant", n - 1), ("k-interactive", n - 1)):
        k = _minimal_k(mu, fam, tol, vacuous - 1)
        if k is not None:
            tags.add(MeasureClassSpec(fam, k=k).label())
    return frozenset(tags)


def dual_values(mu: SetFunction) -> np.ndarray:
    return 1.0 - np.asarray(mu.values)[::-1]
