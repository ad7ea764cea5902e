from __future__ import annotations

import numpy as np
import pytest

from fmgen.base import (
    Chain, GenerationConfig, generate_normal, item_rng, measure_from_extension, monotone_bounds,
    random_walk_step, adjust_value, sample_additive,
)
from fmgen.errors import DomainError, InfeasibleError
from fmgen.linext import LinearExtension, extension_of
from fmgen.setfn import SetFunction, first_monotonicity_violation, mask_of

from test_linext import ORDER3


def test_config_validation():
    with pytest.raises(InfeasibleError):
        GenerationConfig(eta_fraction=1.0)
    with pytest.raises(DomainError):
        GenerationConfig(walk_steps=-1)
    assert GenerationConfig().rounds_for(4) == 16
    assert GenerationConfig(rounds=3).rounds_for(4) == 3


def test_item_streams_are_reproducible_and_distinct():
    a = item_rng(7, 3).random(4)
    assert np.array_equal(a, item_rng(7, 3).random(4))
    assert not np.array_equal(a, item_rng(7, 4).random(4))


def test_sample_additive_properties():
    rng = np.random.default_rng(3)
    W = np.array([sample_additive(4, rng).weights for _ in range(10_000)])
    assert np.abs(W.sum(1) - 1).max() <= 1e-12
    assert (W > 0).all()
    # Dirichlet(1,...,1): mean 1/n, variance (n-1)/(n^2 (n+1))
    sd = np.sqrt(3 / (16 * 5) / len(W))
    assert np.all(np.abs(W.mean(0) - 0.25) <= 3 * sd)
    with pytest.raises(DomainError):
        sample_additive(1, rng)


def test_measure_from_extension(rng):
    e = LinearExtension(3, ORDER3)
    a = measure_from_extension(e, rng)
    b = measure_from_extension(e, rng)
    assert first_monotonicity_violation(a) is None
    assert extension_of(a) == e == extension_of(b)
    with pytest.raises(DomainError):
        measure_from_extension(LinearExtension(2, (0, 3, 1, 2)), rng)


def test_monotone_bounds(nu3):
    assert monotone_bounds(nu3.values.tolist(), 3, mask_of([3])) == (0.0, pytest.approx(0.65))
    assert monotone_bounds(nu3.values.tolist(), 3, mask_of([1, 2])) == (pytest.approx(0.35), 1.0)


def test_adjust_value_lands_outside_neighbors(nu3, rng):
    for _ in range(200):
        out, ok = adjust_value(nu3, mask_of([3]), rng)
        x = out[mask_of([3])]
        assert ok and (0 <= x < 0.35 or 0.55 < x <= 0.65)
        out, ok = adjust_value(nu3, mask_of([1, 2]), rng)
        x = out[mask_of([1, 2])]
        assert ok and (0.35 <= x < 0.45 or 0.65 < x <= 1.0)


def test_adjust_value_infeasible_is_noop(rng):
    # {1} is pinned between 0 and 0.1 with no other subset in between
    mu = SetFunction(2, [0.0, 0.1, 0.5, 1.0])
    chain = Chain.of(mu)
    assert chain.order == [0, 1, 2, 3]
    tight = SetFunction(2, [0.0, 0.5, 0.5, 0.5])
    out, ok = adjust_value(tight, 1, rng)
    assert not ok and out == tight


def test_random_walk_conditions(nu3, rng):
    out, moved = random_walk_step(nu3, mask_of([3]), "up", rng)
    assert moved and 0.55 < out[mask_of([3])] < 0.65
    assert extension_of(out).pos[mask_of([3])] == 4
    # {1,2} directly follows {1}: moving past a superset is blocked
    mu = SetFunction(3, [0.0, 0.5, 0.1, 0.6, 0.2, 0.7, 0.3, 1.0])
    assert extension_of(mu).order[4:6] == (1, 3)
    out, moved = random_walk_step(mu, mask_of([1]), "up", rng)
    assert not moved and out == mu
    out, moved = random_walk_step(nu3, mask_of([1, 2]), "down", rng)
    assert moved and 0.35 < out[mask_of([1, 2])] < 0.45
    with pytest.raises(DomainError):
        random_walk_step(nu3, 0b111, "up", rng)
    with pytest.raises(DomainError):
        random_walk_step(nu3, 1, "sideways", rng)


def test_generate_normal_is_capacity():
    cfg = GenerationConfig(seed=5)
    for i in range(100):
        mu = generate_normal(4, cfg, item_rng(5, i))
        assert mu[0] == 0.0 and mu[15] == 1.0
        assert first_monotonicity_violation(mu) is None


def test_generate_normal_deterministic():
    cfg = GenerationConfig()
    assert generate_normal(4, cfg, item_rng(0, 2)) == generate_normal(4, cfg, item_rng(0, 2))
