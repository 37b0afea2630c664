import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from blocks.components.affine.ifs_model import AffineIFS
from blocks.components.cylinder.axioms import grid_delta, verify_axioms
from blocks.components.cylinder.cylinder_function import (
    NaturalCylinderFunction,
    ProductCylinderFunction,
    cf_constants,
    cf_value,
    product_from_ifs,
)
from blocks.components.symbolic.words import words_of_length
from blocks.components.util.errors import DomainError
from tests.support import random_contractive

T_GRID = (0.5, 1.3, 2.0, 2.7)


def _random_ifs(seed: int) -> AffineIFS:
    rng = np.random.default_rng(seed)
    mats = [random_contractive(rng, low=0.2, high=0.9) for _ in range(2)]
    return AffineIFS(mats, rng.uniform(-1, 1, size=(2, 2)), name=f"random-{seed}")


def test_product_value_examples():
    cf = ProductCylinderFunction([0.5, 0.25])
    assert cf_value(cf, 1.0, (0, 1, 0)) == pytest.approx(0.03125, abs=1e-15)
    assert cf_value(cf, 2.0, (0, 0)) == pytest.approx(0.0625, abs=1e-15)
    assert cf_value(cf, 0.0, (1, 1, 1)) == 1.0


def test_natural_value_matches_svf(swap_pair):
    cf = NaturalCylinderFunction(swap_pair)
    # A_0 A_0 = diag(1/4, 1/16), A_0 A_1 = diag(1/8, 1/8)
    assert cf_value(cf, 1.5, (0, 0)) == pytest.approx(0.0625, rel=1e-12)
    assert cf_value(cf, 1.5, (0, 1)) == pytest.approx(0.125 ** 1.5, rel=1e-12)
    assert cf_value(cf, 1.5, (0, 1), tail=(1, 1, 0)) == cf_value(cf, 1.5, (0, 1))


def test_words_must_be_valid():
    cf = ProductCylinderFunction([0.5, 0.25])
    with pytest.raises(DomainError):
        cf.log_value(1.0, ())
    with pytest.raises(DomainError):
        cf.log_value(1.0, (0, 2))
    with pytest.raises(DomainError):
        cf.log_value(-1.0, (0,))


def test_constants_examples(swap_pair):
    assert cf_constants(ProductCylinderFunction([0.3, 0.5]), 1.0).as_tuple() == (1.0, 0.3, 0.5)
    assert cf_constants(NaturalCylinderFunction(swap_pair), 1.0).as_tuple() == pytest.approx((1.0, 0.25, 0.5))
    single = AffineIFS([0.5 * np.eye(2)], [[0.0, 0.0]])
    assert cf_constants(NaturalCylinderFunction(single), 2.0).as_tuple() == pytest.approx((1.0, 0.5, 0.5))


def test_product_weights_validated():
    with pytest.raises(DomainError):
        ProductCylinderFunction([0.5, 1.0])
    with pytest.raises(DomainError):
        ProductCylinderFunction([])


def test_product_from_ifs(diagonal_triple):
    cf = product_from_ifs(diagonal_triple)
    assert cf.kind == "product"
    assert np.allclose(cf.weights, [0.5, 0.5, 0.5])


def test_content_hash_is_stable(generic_pair):
    a = NaturalCylinderFunction(generic_pair)
    assert a.content_hash() == NaturalCylinderFunction(generic_pair).content_hash()
    assert a.content_hash().startswith("nat-")
    assert ProductCylinderFunction([0.5, 0.5]).content_hash().startswith("prod-")


@pytest.mark.parametrize("n", [1, 3, 6])
def test_level_table_matches_pointwise(generic_pair, n):
    cf = NaturalCylinderFunction(generic_pair)
    table = cf.level_table(n)
    assert len(table) == 2 ** n
    assert sum(s.stop - s.start for s in table.block_slices()) == 2 ** n
    log_values = table.log_values(1.3)
    for index, w in enumerate(words_of_length(cf.alphabet, n)):
        assert log_values[index] == pytest.approx(cf.log_value(1.3, w), abs=1e-10)


def test_level_table_is_memoized(generic_pair):
    cf = NaturalCylinderFunction(generic_pair)
    assert cf.level_table(4) is cf.level_table(4)
    with pytest.raises(DomainError):
        cf.level_table(0)


@settings(max_examples=200, deadline=None)
@given(
    st.lists(st.integers(0, 1), min_size=1, max_size=8),
    st.lists(st.integers(0, 1), min_size=1, max_size=8),
    st.sampled_from(T_GRID),
)
def test_product_chain_rule(i, j, t):
    cf = ProductCylinderFunction([0.3, 0.7])
    assert cf.log_value(t, i + j) == pytest.approx(cf.log_value(t, i) + cf.log_value(t, j), abs=1e-12)


def test_natural_subchain_on_random_pairs():
    rng = np.random.default_rng(5)
    for seed in range(20):
        cf = NaturalCylinderFunction(_random_ifs(seed))
        for _ in range(50):
            i = tuple(int(a) for a in rng.integers(0, 2, size=int(rng.integers(1, 6))))
            j = tuple(int(a) for a in rng.integers(0, 2, size=int(rng.integers(1, 6))))
            for t in T_GRID:
                joined = cf.log_value(t, i + j)
                assert joined <= cf.log_value(t, i) + cf.log_value(t, j) + math.log1p(1e-12)


def test_parameter_band_on_random_words(generic_pair):
    cf = NaturalCylinderFunction(generic_pair)
    const = cf.constants(1.0)
    rng = np.random.default_rng(17)
    for _ in range(1000):
        n = int(rng.integers(1, 9))
        w = tuple(int(a) for a in rng.integers(0, 2, size=n))
        t = float(rng.choice(T_GRID))
        delta = float(rng.uniform(0.0, 1.0))
        base = cf.log_value(t, w)
        shifted = cf.log_value(t + delta, w)
        assert shifted >= base + delta * n * math.log(const.s_low) - 1e-10
        assert shifted <= base + delta * n * math.log(const.s_high) + 1e-10


def test_grid_delta():
    assert grid_delta([0.5, 1.3, 2.0, 2.7]) == pytest.approx(0.7)
    assert grid_delta([1.0]) == 0.25


def test_verify_product_kind():
    report = verify_axioms(ProductCylinderFunction([0.3, 0.5]), T_GRID, n_max=10, samples=500, seed=1)
    assert report.bvp_max_ratio == 1.0
    assert abs(report.worst_subchain_violation) <= 1e-12
    assert report.worst_param_violation <= 1e-10
    assert not report.violated()


def test_verify_natural_kind_on_random_pairs():
    for seed in range(4):
        cf = NaturalCylinderFunction(_random_ifs(100 + seed))
        report = verify_axioms(cf, T_GRID, n_max=10, samples=250, seed=seed)
        assert report.bvp_max_ratio == 1.0
        assert report.worst_subchain_violation <= 1e-12
        assert report.worst_param_violation <= 1e-10
        assert all(report.flags().values())
        assert not report.violated()


def test_verify_is_deterministic(generic_pair):
    cf = NaturalCylinderFunction(generic_pair)
    first = verify_axioms(cf, T_GRID, n_max=8, samples=300, seed=42)
    again = verify_axioms(cf, T_GRID, n_max=8, samples=300, seed=42)
    parallel = verify_axioms(cf, T_GRID, n_max=8, samples=300, seed=42, workers=2)
    assert first.to_dict() == again.to_dict() == parallel.to_dict()


def test_verify_rejects_bad_grid():
    with pytest.raises(DomainError):
        verify_axioms(ProductCylinderFunction([0.5, 0.5]), [], n_max=4, samples=10, seed=0)
