"""Repetition-ratio experiment over batches of additive measures.

Each iteration draws ``num`` additive measures and reports the repetition
ratio of their induced linear extensions: as drawn, after one range
adjustment per measure, and after one to five random-walk steps.  The moves
are the ones in :mod:`fmgen.base`, evaluated for the whole batch at once with
numpy so that the larger rows stay within minutes.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .base import item_rng
from .errors import DomainError
from .setfn import cardinalities, membership

COLUMNS = ("n", "Num", "Rep", "Alg1", "RW-1", "RW-2", "RW-3", "RW-4", "RW-5")
WALK_STEPS = 5
PAPER_NUMS = {3: 20, 4: 1000, 5: 10000, 6: 100000}


@dataclass(frozen=True)
class ExperimentRow:
    n: int
    num: int
    iterations: int
    means: tuple[float, ...]
    stderr: tuple[float, ...]

    def as_dict(self) -> dict:
        out = {"n": self.n, "Num": self.num}
        for name, m in zip(COLUMNS[2:], self.means):
            out[name] = m
        return out


def batch_extensions(V: np.ndarray) -> np.ndarray:
    """Induced extension of every row: stable argsort, ties by bitmask."""
    return np.argsort(V, axis=1, kind="stable")


def batch_repetition_ratio(V: np.ndarray) -> float:
    order = batch_extensions(V).astype(np.int16 if V.shape[1] > 127 else np.int8)
    distinct = len({row.tobytes() for row in order})
    return (len(V) - distinct) / len(V)


def _adjust_once(V, rng, n, A):
    num, M = V.shape
    r = np.arange(num)
    order = batch_extensions(V)
    pos = np.empty_like(order)
    np.put_along_axis(pos, order, np.arange(M)[None, :].repeat(num, 0), axis=1)
    lo = np.zeros(num)
    hi = np.ones(num)
    for i in range(n):
        b = 1 << i
        has = (A & b) != 0
        lo = np.where(has, np.maximum(lo, V[r, A & ~b]), lo)
        hi = np.where(~has, np.minimum(hi, V[r, A | b]), hi)
    p = pos[r, A]
    prev = V[r, order[r, p - 1]]
    nxt = V[r, order[r, p + 1]]
    left = np.maximum(np.minimum(hi, prev) - lo, 0.0)
    right = np.maximum(hi - np.maximum(lo, nxt), 0.0)
    total = left + right
    u = rng.random(num) * total
    new = np.where(u < left, lo + u, np.maximum(lo, nxt) + (u - left))
    ok = total > 0
    V[r[ok], A[ok]] = new[ok]
    return ok


def _walk_once(V, rng, n, A, up):
    num, M = V.shape
    r = np.arange(num)
    card = cardinalities(n)
    order = batch_extensions(V)
    pos = np.empty_like(order)
    np.put_along_axis(pos, order, np.arange(M)[None, :].repeat(num, 0), axis=1)
    p = pos[r, A]
    s = order[r, np.minimum(p + 1, M - 1)]
    s2 = np.where(p + 2 < M, V[r, order[r, np.minimum(p + 2, M - 1)]], 1.0)
    q = order[r, np.maximum(p - 1, 0)]
    q2 = np.where(p >= 2, V[r, order[r, np.maximum(p - 2, 0)]], 0.0)
    can_up = (card[A] >= card[s]) | ((A & ~s) != 0)
    can_down = ((card[A] <= card[q]) | ((q & ~A) != 0)) & (p >= 1)
    u = rng.random(num)
    new_up = V[r, s] + u * (s2 - V[r, s])
    new_down = q2 + u * (V[r, q] - q2)
    mu = up & can_up & (new_up > V[r, s]) & (new_up < s2)
    md = ~up & can_down & (new_down > q2) & (new_down < V[r, q])
    V[r[mu], A[mu]] = new_up[mu]
    V[r[md], A[md]] = new_down[md]
    return mu | md


def _with_retries(step, V, rng, n, attempts):
    """Apply ``step`` to every row, redrawing the subset for rows that did not move."""
    M = V.shape[1]
    todo = np.arange(len(V))
    for _ in range(attempts):
        if len(todo) == 0:
            break
        sub = V[todo]
        A = rng.integers(1, M - 1, len(todo))
        if step is _walk_once:
            moved = _walk_once(sub, rng, n, A, rng.random(len(todo)) < 0.5)
        else:
            moved = _adjust_once(sub, rng, n, A)
        V[todo] = sub
        todo = todo[~moved]
    return V


def run_iteration(n: int, num: int, rng, attempts: int = 16) -> tuple[float, ...]:
    """One row of ratios: seeds, one adjustment, then cumulative walk steps."""
    bits = membership(n).astype(np.float64)
    e = rng.standard_exponential((num, n))
    W = e / e.sum(1, keepdims=True)
    V = W @ bits.T
    V[:, 0] = 0.0
    V[:, -1] = 1.0
    out = [batch_repetition_ratio(V)]
    out.append(batch_repetition_ratio(_with_retries(_adjust_once, V.copy(), rng, n, attempts)))
    walked = V.copy()
    for _ in range(WALK_STEPS):
        _with_retries(_walk_once, walked, rng, n, attempts)
        out.append(batch_repetition_ratio(walked))
    return tuple(out)


def run_row(n: int, num: int, iterations: int = 10, seed: int = 0, attempts: int = 16) -> ExperimentRow:
    if not 3 <= n <= 6:
        raise DomainError("the experiment covers n = 3..6")
    if num < 1 or iterations < 1:
        raise DomainError("num and iterations must be positive")
    rows = np.array([run_iteration(n, num, item_rng(seed, it), attempts) for it in range(iterations)])
    means = rows.mean(0)
    se = rows.std(0, ddof=1) / np.sqrt(iterations) if iterations > 1 else np.zeros(rows.shape[1])
    return ExperimentRow(n, num, iterations, tuple(means.tolist()), tuple(se.tolist()))


def table_csv(rows, with_stderr: bool = False) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    header = list(COLUMNS)
    if with_stderr:
        header += [f"{c}_se" for c in COLUMNS[2:]]
    w.writerow(header)
    for row in rows:
        line = [row.n, row.num] + [f"{m:.4f}" for m in row.means]
        if with_stderr:
            line += [f"{s:.4f}" for s in row.stderr]
        w.writerow(line)
    return buf.getvalue()
