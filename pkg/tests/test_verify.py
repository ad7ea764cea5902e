from __future__ import annotations

import numpy as np
import pytest

from fmgen.errors import DomainError
from fmgen.korder import make_k_maxitive
from fmgen.setfn import SetFunction, additive, dual, mask_of
from fmgen.structured import shift_supermodular
from fmgen.verify import (
    MeasureClassSpec, check_class, classify, dual_label, indifference_partition, local_slack,
    tolerance_order,
)

from conftest import W3, random_capacity


def _check(mu, label, **kw):
    return check_class(mu, MeasureClassSpec.from_label(label, **kw))


def test_additive_is_supermodular_boundary(nu3):
    rep = _check(nu3, "supermodular")
    assert rep.passed and rep.min_slack == pytest.approx(0.0, abs=1e-15)
    assert not _check(nu3, "supermodular", strict=True).passed


def test_s1_slack_pattern():
    s1 = shift_supermodular(W3, eta=0.1)
    assert _check(s1, "supermodular").passed
    # every constraint touching a singleton or a pair gains exactly eta
    for A in range(1, 7):
        assert local_slack(s1.values, 3, "supermodular", A) == pytest.approx(0.1, abs=1e-12)
    v = s1.values
    assert v[3] - v[1] - v[2] + v[0] == pytest.approx(0.1)


def test_maxitive_witness(nu3):
    mu = make_k_maxitive(nu3, 2)
    assert _check(mu, "2-maxitive").passed
    rep = _check(mu, "1-maxitive")
    assert not rep.passed and rep.worst_violation > 1e-9 and "A=" in rep.witness


def test_supermodular_witness_names_triple():
    s1 = shift_supermodular(W3, eta=0.1)
    v = s1.values.copy()
    v[mask_of([1, 2])] += 0.2  # past l3 = 0.55
    rep = _check(SetFunction(3, v), "supermodular")
    assert not rep.passed
    # both triples through {1,2} with a common third element lose 0.1
    assert rep.witness in ("A={1}, i=2, j=3", "A={2}, i=1, j=3")
    assert rep.worst_violation == pytest.approx(0.1)


def test_monotonicity_always_checked():
    bad = SetFunction(3, [0.0, 0.6, 0.3, 0.5, 0.2, 0.7, 0.4, 1.0])
    rep = _check(bad, "normal")
    assert not rep.passed and rep.witness.startswith("monotonicity")


def test_classify_additive(nu3):
    tags = classify(nu3)
    assert {"additive", "supermodular", "submodular", "superadditive", "subadditive", "1-additive"} <= tags
    assert "antibuoyant" not in tags


def test_classify_uniform():
    tags = classify(additive([1 / 3] * 3))
    assert {"symmetric", "antibuoyant", "1-symmetric"} <= tags


def test_classify_s1():
    tags = classify(shift_supermodular(W3, eta=0.1))
    assert {"supermodular", "superadditive"} <= tags
    assert "additive" not in tags
    # a constant shift of the proper subsets leaves m(N) = 0
    assert "2-additive" in tags


def test_tolerance_order_conventions():
    mu = SetFunction(3, [0.0, 0.2, 0.35, 1.0, 0.45, 1.0, 1.0, 1.0])
    assert tolerance_order(mu) == 1
    assert tolerance_order(mu, "definition") == 2


def test_indifference_partition():
    mu = SetFunction(3, [0.0, 0.3, 0.3, 0.7, 0.2, 0.5, 0.5, 1.0])
    assert indifference_partition(mu) == ((1, 2), (3,))


def test_dual_labels():
    assert dual_label("supermodular") == "submodular"
    assert dual_label("2-maxitive") == "2-minitive"
    assert dual_label("1-tolerant") == "1-intolerant"
    assert dual_label("2-additive") == "upper-2-additive"
    assert dual_label(dual_label("2-interactive")) == "2-interactive"
    assert dual_label("3-symmetric") == "3-symmetric"


def test_dual_swaps_classes(rng):
    s1 = shift_supermodular(W3, eta=0.1)
    assert _check(dual(s1), "submodular").passed
    mu = make_k_maxitive(additive(W3), 2)
    assert _check(dual(mu), "2-minitive").passed


def test_upper_k_additive_is_dual_of_k_additive(rng):
    from fmgen.base import GenerationConfig, item_rng
    from fmgen.korder import KOrderSpec, generate_korder
    mu = generate_korder(4, KOrderSpec(2, "additive"), GenerationConfig(), item_rng(0, 0))
    assert _check(dual(mu), "upper-2-additive").passed


def test_spec_json_round_trip():
    spec = MeasureClassSpec("p-symmetric", partition=((3,), (1, 2)), inner="supermodular", strict=True)
    assert MeasureClassSpec.from_json(spec.to_json()) == spec
    spec = MeasureClassSpec.from_label("2-interactive", K=0.6)
    assert spec.tag == "k-interactive" and spec.k == 2
    assert MeasureClassSpec.from_json(spec.to_json()) == spec


def test_spec_validation():
    with pytest.raises(DomainError):
        MeasureClassSpec("k-additive")
    with pytest.raises(DomainError):
        MeasureClassSpec("normal", strict=True)
    with pytest.raises(DomainError):
        MeasureClassSpec("bogus")


def test_sampled_oracle_above_exhaustive_limit(rng):
    mu = random_capacity(13, rng)
    rep = _check(mu, "supermodular")
    assert 0 < rep.coverage < 1
