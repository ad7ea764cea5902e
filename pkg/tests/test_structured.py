from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fmgen.base import GenerationConfig, item_rng
from fmgen.errors import DomainError, InfeasibleError
from fmgen.linext import extension_of
from fmgen.setfn import additive, dual, mask_of, marginal_delta
from fmgen.structured import (
    adjust_in_class, antibuoyant_range, antibuoyant_walk, generate_antibuoyant, generate_superadditive,
    generate_supermodular, shift_superadditive, shift_supermodular, superadditive_range,
    superadditive_walk, supermodular_range, supermodular_walk,
)
from fmgen.verify import MeasureClassSpec, check_class

from conftest import W3

S1_VALUES = [0.0, 0.1, 0.25, 0.45, 0.35, 0.55, 0.7, 1.0]
W4 = (0.1, 0.2, 0.3, 0.4)


def _passes(mu, tag, strict=False):
    return check_class(mu, MeasureClassSpec(tag, strict=strict)).passed


@pytest.fixture
def s1():
    return shift_supermodular(W3, eta=0.1)


def brute_supermodular_slack(v, n):
    """min over (A, i, j) of mu(A+i+j) - mu(A+i) - mu(A+j) + mu(A)."""
    out = np.inf
    for A in range(1 << n):
        for i in range(n):
            for j in range(i + 1, n):
                bi, bj = 1 << i, 1 << j
                if A & (bi | bj):
                    continue
                out = min(out, v[A | bi | bj] - v[A | bi] - v[A | bj] + v[A])
    return out


def test_s1_values(s1):
    assert np.allclose(s1.values, S1_VALUES, atol=1e-15)
    assert brute_supermodular_slack(s1.values, 3) >= -1e-15
    assert _passes(s1, "supermodular")
    assert marginal_delta(s1, 3, mask_of([1, 2])) == pytest.approx(0.55)


def test_s1_eta_too_large():
    with pytest.raises(InfeasibleError):
        shift_supermodular(W3, eta=0.2)


def test_s2_strict_slack():
    mu = shift_supermodular(W3, True, etas=(0.02, 0.03))
    w = np.array(W3)
    assert np.allclose(mu.values[[1, 2, 4]], w - 0.05)
    assert np.allclose(mu.values[[3, 5, 6]], [0.55 - 0.03, 0.65 - 0.03, 0.8 - 0.03])
    assert brute_supermodular_slack(mu.values, 3) == pytest.approx(0.01)
    rep = check_class(mu, MeasureClassSpec("supermodular", strict=True))
    assert rep.passed and rep.min_slack == pytest.approx(0.01)


def test_s2_rejects_non_increasing():
    with pytest.raises(InfeasibleError):
        shift_supermodular(W3, True, etas=(0.03, 0.02))


def test_supermodular_range_s1(s1):
    r = supermodular_range(s1, mask_of([1, 2]))
    assert (r.lower, r.upper) == (pytest.approx(0.35), pytest.approx(0.55))
    assert "l2" not in r.terms and r.contains(s1[mask_of([1, 2])])


def test_supermodular_range_singleton_uses_l2(s1):
    r = supermodular_range(s1, mask_of([1]))
    assert "l1" not in r.terms and r.lower == 0.0


def test_supermodular_range_additive_is_degenerate(rng):
    for _ in range(20):
        w = rng.dirichlet(np.ones(4))
        mu = additive(w)
        for A in range(1, 15):
            r = supermodular_range(mu, A)
            assert abs(r.lower - mu[A]) <= 1e-12 and abs(r.upper - mu[A]) <= 1e-12


def test_range_errors(s1):
    with pytest.raises(DomainError):
        supermodular_range(s1, 0)
    with pytest.raises(DomainError):
        superadditive_range(s1, 7)
    with pytest.raises(DomainError):
        antibuoyant_range(s1, 0)


def test_supermodular_walk_condition(s1, rng):
    # succ of {3} is {1,2} at 0.45 = l3, so the open target interval is empty
    A = mask_of([3])
    assert supermodular_range(s1, A).upper == pytest.approx(s1[mask_of([1, 2])])
    out, moved = supermodular_walk(s1, A, "up", rng)
    assert not moved and out == s1
    # succ of {1} is {2} at 0.25 > l3 = 0.2
    out, moved = supermodular_walk(s1, mask_of([1]), "up", rng)
    assert not moved


def test_supermodular_walks_stay_in_class(rng):
    for t in range(1000):
        w = rng.dirichlet(np.ones(3))
        mu = shift_supermodular(w, eta=0.5 * w.min())
        A = int(rng.integers(1, 7))
        out, moved = supermodular_walk(mu, A, "up" if t % 2 else "down", rng)
        assert brute_supermodular_slack(out.values, 3) >= -1e-12
        if moved:
            assert extension_of(out) != extension_of(mu)


def test_antibuoyant_ranges():
    u = shift_supermodular([1 / 3] * 3, eta=0.1)
    r = antibuoyant_range(u, mask_of([1, 2]))
    assert r.lower == pytest.approx(0.46666666666, abs=1e-9)
    assert r.upper == pytest.approx(0.61666666666, abs=1e-9)
    assert r.contains(u[mask_of([1, 2])])
    r = antibuoyant_range(additive([1 / 3] * 3), mask_of([1, 2]))
    assert r.lower == pytest.approx(2 / 3, abs=1e-12) and r.upper == pytest.approx(2 / 3, abs=1e-12)


def test_antibuoyant_walk_targets(rng):
    u = shift_supermodular([1 / 3] * 3, eta=0.1)
    for _ in range(200):
        A = int(rng.integers(1, 7))
        out, moved = antibuoyant_walk(u, A, "up", rng)
        assert _passes(out, "antibuoyant")
        if moved:
            ext = extension_of(u)
            p = ext.pos[A]
            succ, succ2 = ext.order[p + 1], ext.order[p + 2]
            hi = min(antibuoyant_range(u, A).upper, u[succ2])
            assert u[succ] < out[A] < hi


def test_s3_and_s4():
    s3 = shift_superadditive(W4, B=[1, 2, 3], i0=1, eta=0.05)
    assert _passes(s3, "superadditive")
    with pytest.raises(InfeasibleError):
        shift_superadditive(W4, B=[1, 2], i0=1, eta=0.05)
    s4 = shift_superadditive(W4, True, etas=0.01)
    rep = check_class(s4, MeasureClassSpec("superadditive", strict=True))
    assert rep.passed and rep.min_slack > 0


def test_superadditive_needs_n_above_three():
    with pytest.raises(InfeasibleError):
        shift_superadditive(W3, B=[1, 2, 3], i0=1, eta=0.05)


def test_superadditive_ranges(nu3):
    r = superadditive_range(nu3, mask_of([1, 2]))
    assert r.lower == pytest.approx(0.55, abs=1e-12) and r.upper == pytest.approx(0.55, abs=1e-12)
    r = superadditive_range(nu3, mask_of([1]))
    assert r.lower == 0.0 and r.upper == pytest.approx(0.2, abs=1e-12)


def test_superadditive_walks(rng):
    s3 = shift_superadditive(W4, B=[1, 2, 3], i0=1, eta=0.05)
    for t in range(1000):
        A = int(rng.integers(1, 15))
        out, _ = superadditive_walk(s3, A, "up" if t % 2 else "down", rng)
        assert _passes(out, "superadditive")


def test_additive_blocks_superadditive_up_moves(rng):
    nu = additive(W4)
    for A in range(1, 15):
        if bin(A).count("1") >= 2:
            assert superadditive_walk(nu, A, "up", rng) == (nu, False)


def test_adjust_in_class(s1, rng):
    for _ in range(100):
        out, _ = adjust_in_class(s1, int(rng.integers(1, 7)), "supermodular", rng)
        assert _passes(out, "supermodular")


def test_dual_of_s1_is_submodular(s1):
    assert _passes(dual(s1), "submodular")
    assert not _passes(dual(s1), "supermodular")


@pytest.mark.parametrize("gen,tag", [
    (generate_supermodular, "supermodular"),
    (generate_antibuoyant, "antibuoyant"),
    (generate_superadditive, "superadditive"),
])
@pytest.mark.parametrize("strict", [False, True])
def test_generators_pass_oracle(gen, tag, strict):
    cfg = GenerationConfig(seed=11)
    for n in (3, 4, 5):
        for i in range(40):
            assert _passes(gen(n, cfg, item_rng(11, i), strict), tag, strict)


@settings(max_examples=40, deadline=None)
@given(st.integers(3, 6), st.integers(0, 2**32 - 1), st.floats(0.05, 0.95))
def test_supermodular_seed_property(n, seed, frac):
    rng = np.random.default_rng(seed)
    w = rng.dirichlet(np.ones(n))
    mu = shift_supermodular(w, eta=frac * w.min())
    assert brute_supermodular_slack(mu.values, n) >= -1e-12
