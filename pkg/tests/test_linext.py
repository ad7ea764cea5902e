from __future__ import annotations

import itertools

import numpy as np
import pytest

from fmgen.errors import CapabilityError, DomainError
from fmgen.linext import (
    LinearExtension, count_extensions, enumerate_extensions, extension_of, iter_extensions,
    lattice_distance, neighbor_bounds, reposition, repetition_ratio,
)
from fmgen.setfn import additive, mask_of

ORDER3 = (0, 0b001, 0b010, 0b100, 0b011, 0b101, 0b110, 0b111)


def _brute_count(n):
    """Count permutations of all subsets that respect inclusion (tiny n only)."""
    M = 1 << n
    total = 0
    for perm in itertools.permutations(range(M)):
        pos = {A: p for p, A in enumerate(perm)}
        if all(pos[A] < pos[B] for A in range(M) for B in range(M) if A != B and A & B == A):
            total += 1
    return total


def test_extension_of_additive(nu3):
    assert extension_of(nu3).order == ORDER3


def test_uniform_ties_break_by_bitmask():
    assert extension_of(additive([1 / 3] * 3)).order == ORDER3


def test_extension_of_is_valid(rng):
    from conftest import random_capacity
    for _ in range(50):
        assert extension_of(random_capacity(4, rng)).is_valid()


def test_invalid_extension_detected():
    bad = LinearExtension(2, (0, 3, 1, 2))
    assert not bad.is_valid()
    with pytest.raises(DomainError):
        LinearExtension(2, (0, 1, 1, 3))


def test_counts_small():
    assert count_extensions(1) == 1
    assert count_extensions(2) == 2 == _brute_count(2)
    assert count_extensions(3) == 48 == _brute_count(3)


def test_enumeration_n3_is_complete_and_distinct():
    total, stream = enumerate_extensions(3)
    orders = [e.order for e in stream]
    assert total == len(orders) == len(set(orders)) == 48
    assert orders == sorted(orders)
    assert all(LinearExtension(3, o).is_valid() for o in orders)


def test_prefix_splits_enumeration():
    firsts = (1, 2, 4)
    assert sum(sum(1 for _ in iter_extensions(3, (f,))) for f in firsts) == 48
    assert list(iter_extensions(3, (3,))) == []


def test_capability_limits():
    with pytest.raises(CapabilityError):
        enumerate_extensions(5)
    with pytest.raises(CapabilityError):
        count_extensions(6)


def test_repetition_ratio():
    e = LinearExtension(3, ORDER3)
    assert repetition_ratio([e] * 10) == pytest.approx(0.9)
    _, stream = enumerate_extensions(3)
    assert repetition_ratio(list(stream)) == 0.0
    with pytest.raises(DomainError):
        repetition_ratio([])


def test_neighbor_bounds():
    e = LinearExtension(3, ORDER3)
    assert neighbor_bounds(e, mask_of([3])) == (0, 5)
    assert neighbor_bounds(e, mask_of([1]))[1] == 4
    with pytest.raises(DomainError):
        neighbor_bounds(e, 0b111)


def test_reposition_keeps_validity(rng):
    e = LinearExtension(3, ORDER3)
    moved, ok = reposition(e, mask_of([3]), rng)
    assert ok and moved.is_valid() and moved != e
    assert moved.pos[4] in range(1, 5)


def test_lattice_distance():
    e = LinearExtension(3, ORDER3)
    f, _ = reposition(e, mask_of([3]), np.random.default_rng(1))
    assert lattice_distance(e, e) == 0
    assert lattice_distance(e, f) == abs(e.pos[4] - f.pos[4])
