import math

import numpy as np
import pytest

from blocks.components.cylinder.cylinder_function import NaturalCylinderFunction, ProductCylinderFunction
from blocks.components.io.cache import PartitionSumCache
from blocks.components.linalg.singular_values import svf_alpha_t, word_matrix
from blocks.components.pressure.dimension import affinity_dimension, pressure_root, root_bracket
from blocks.components.pressure.partition_sum import (
    METHOD_LSQ,
    extrapolate_inverse_n,
    finite_pressure,
    generalized_subadditive_check,
    log_partition_sum,
    pressure_curve,
    pressure_sequence,
    similarity_pressure,
)
from blocks.components.symbolic.words import words_of_length
from blocks.components.util.errors import BudgetExceededError, DomainError, UsageError
from tests.support import load_system

DIAGONAL_ROOT = 1.0 + math.log(1.5) / math.log(4.0)


def test_log_partition_sum_examples(diagonal_triple):
    assert log_partition_sum(ProductCylinderFunction([0.5, 0.5]), 1.0, 5) == pytest.approx(0.0, abs=1e-12)
    natural = NaturalCylinderFunction(diagonal_triple)
    assert log_partition_sum(natural, 1.5, 2) == pytest.approx(math.log(0.5625), abs=1e-12)
    assert log_partition_sum(ProductCylinderFunction([0.3, 0.6]), 0.0, 3) == pytest.approx(3 * math.log(2), abs=1e-12)


@pytest.mark.parametrize("n", [1, 2, 3])
@pytest.mark.parametrize("t", [0.5, 1.3, 2.7])
def test_log_partition_sum_matches_enumeration(generic_pair, n, t):
    cf = NaturalCylinderFunction(generic_pair)
    direct = sum(svf_alpha_t(word_matrix(generic_pair, w), t) for w in words_of_length(cf.alphabet, n))
    assert log_partition_sum(cf, t, n) == pytest.approx(math.log(direct), abs=1e-10)


def test_level_must_be_positive():
    with pytest.raises(DomainError):
        log_partition_sum(ProductCylinderFunction([0.5, 0.5]), 1.0, 0)


def test_similarity_pressure_is_level_independent():
    cf = ProductCylinderFunction([0.3, 0.5])
    for n in (1, 4, 7):
        assert finite_pressure(cf, 1.2, n) == pytest.approx(similarity_pressure([0.3, 0.5], 1.2), abs=1e-12)


def test_pressure_sequence_diagonal(diagonal_triple):
    report = pressure_sequence(NaturalCylinderFunction(diagonal_triple), 1.0, 6)
    assert report.levels == [1, 2, 3, 4, 5, 6]
    assert np.allclose(report.values, math.log(1.5), atol=1e-12)
    assert report.fekete_upper == pytest.approx(math.log(1.5), abs=1e-12)
    assert not report.partial


def test_pressure_sequence_envelope(generic_pair):
    report = pressure_sequence(NaturalCylinderFunction(generic_pair), 1.3, 8)
    envelope = report.fekete_envelope()
    assert all(b <= a for a, b in zip(envelope, envelope[1:]))
    assert report.fekete_upper == min(report.values)
    assert report.method == METHOD_LSQ
    frame = report.to_frame()
    assert list(frame.columns) == ["t", "n", "P_n"]
    assert report.to_dict()["fekete_upper_label"] == "rigorous upper bound"


def test_pressure_sequence_stops_at_budget():
    report = pressure_sequence(ProductCylinderFunction([0.5, 0.5]), 1.0, 6, budget=16)
    assert report.levels == [1, 2, 3, 4]
    assert report.partial
    assert report.stopped_at == 5


def test_log_sums_are_subadditive(generic_pair):
    cf = NaturalCylinderFunction(generic_pair)
    for t in (0.5, 1.3, 2.7):
        log_sums = [log_partition_sum(cf, t, n) for n in range(1, 11)]
        check = generalized_subadditive_check(log_sums)
        assert check.checked > 0
        assert check.holds(1e-10)


def test_subadditive_check_flags_violation():
    check = generalized_subadditive_check([1.0, 3.0])
    assert check.worst_pair == (1, 1)
    assert check.worst_slack == pytest.approx(1.0)
    assert not check.holds()


def test_parameter_transfer_of_sums(generic_pair):
    cf = NaturalCylinderFunction(generic_pair)
    const = cf.constants(1.0)
    for n in (2, 5, 8):
        for t, delta in ((0.5, 0.25), (1.3, 0.7), (2.0, 0.5)):
            base = log_partition_sum(cf, t, n)
            moved = log_partition_sum(cf, t + delta, n)
            assert base + delta * n * math.log(const.s_low) - 1e-10 <= moved
            assert moved <= base + delta * n * math.log(const.s_high) + 1e-10


def test_workers_do_not_change_bits(generic_pair):
    serial = log_partition_sum(NaturalCylinderFunction(generic_pair), 1.3, 8, workers=1)
    parallel = log_partition_sum(NaturalCylinderFunction(generic_pair), 1.3, 8, workers=2)
    assert serial == parallel


def test_cache_roundtrip(tmp_path, generic_pair):
    cache = PartitionSumCache(tmp_path / "sums.jsonl")
    cf = NaturalCylinderFunction(generic_pair)
    value = log_partition_sum(cf, 1.3, 5, cache=cache)
    assert len(cache) == 1
    reloaded = PartitionSumCache(tmp_path / "sums.jsonl")
    assert reloaded.get(cf.content_hash(), 1.3, 5) == value
    assert log_partition_sum(NaturalCylinderFunction(generic_pair), 1.3, 5, cache=reloaded) == value


def test_cache_does_not_bypass_budget(tmp_path, generic_pair):
    cache = PartitionSumCache(tmp_path / "sums.jsonl")
    cf = NaturalCylinderFunction(generic_pair)
    log_partition_sum(cf, 1.3, 6, cache=cache)
    with pytest.raises(BudgetExceededError):
        log_partition_sum(cf, 1.3, 6, budget=4, cache=cache)


def test_extrapolation():
    levels = [1, 2, 3, 4, 5, 6]
    values = [2.0 + 3.0 / n for n in levels]
    estimate, method = extrapolate_inverse_n(levels, values)
    assert method == METHOD_LSQ
    assert estimate == pytest.approx(2.0, abs=1e-12)
    assert extrapolate_inverse_n([1], [0.7]) == (0.7, "last-level")


def test_pressure_curve_product():
    frame = pressure_curve(ProductCylinderFunction([0.5, 0.5]), [0.0, 1.0, 2.0], 4)
    assert list(frame.columns) == ["t", "n", "P_n"]
    assert np.allclose(frame["P_n"], [math.log(2), 0.0, -math.log(2)], atol=1e-12)


def test_pressure_curve_diagonal(diagonal_triple):
    frame = pressure_curve(NaturalCylinderFunction(diagonal_triple), [1.0, 2.0], 3)
    assert np.allclose(frame["P_n"], [math.log(1.5), math.log(1.5) - math.log(4)], atol=1e-12)


def test_pressure_curve_decreasing(generic_pair):
    frame = pressure_curve(NaturalCylinderFunction(generic_pair), np.linspace(0.0, 3.0, 13), 6)
    assert np.all(np.diff(frame["P_n"].to_numpy()) < 0)


def test_pressure_curve_rejects_unsorted_grid():
    with pytest.raises(UsageError):
        pressure_curve(ProductCylinderFunction([0.5, 0.5]), [2.0, 1.0, 0.0], 3)


def test_root_examples():
    assert pressure_root(ProductCylinderFunction([0.5, 0.5]), 4, 1e-10) == pytest.approx(1.0, abs=1e-10)
    third = pressure_root(ProductCylinderFunction([1 / 3, 1 / 3]), 5, 1e-12)
    assert third == pytest.approx(math.log(2) / math.log(3), abs=1e-10)


@pytest.mark.parametrize("n", range(1, 9))
def test_diagonal_root_every_level(diagonal_triple, n):
    t_n = pressure_root(NaturalCylinderFunction(diagonal_triple), n, 1e-10)
    assert t_n == pytest.approx(DIAGONAL_ROOT, abs=1e-6)


def test_bracket_straddles_root(generic_pair):
    cf = NaturalCylinderFunction(generic_pair)
    for n in range(1, 7):
        lo, hi = root_bracket(cf, n, 1e-8)
        assert hi - lo <= 1e-8
        assert log_partition_sum(cf, lo, n) >= 0.0
        assert log_partition_sum(cf, hi, n) < 0.0


def test_bracket_rejects_bad_tolerance(generic_pair):
    with pytest.raises(DomainError):
        root_bracket(NaturalCylinderFunction(generic_pair), 3, 0.0)


def test_dimension_conformal(conformal_pair):
    report = affinity_dimension(conformal_pair, 10, 1e-12)
    assert report.levels == list(range(1, 11))
    for _, t_n in report.roots:
        assert t_n == pytest.approx(1.0, abs=1e-9)
    assert report.prediction == pytest.approx(1.0, abs=1e-9)
    assert report.norm_half_ok is False


def test_dimension_diagonal(diagonal_triple):
    report = affinity_dimension(diagonal_triple, 6, 1e-10)
    assert report.prediction == pytest.approx(DIAGONAL_ROOT, abs=1e-6)
    assert report.upper_bound == min(t for _, t in report.roots)
    assert list(report.to_frame().columns) == ["n", "t_n"]
    assert "elapsed_s" not in report.to_dict()


def test_dimension_clamped_to_ambient():
    ifs = load_system("similarity_triple")
    report = affinity_dimension(ifs, 4, 1e-10)
    assert report.upper_bound == pytest.approx(math.log(3) / math.log(1 / 0.6), abs=1e-8)
    assert report.prediction == 1.0
    assert report.norm_half_ok is False


def test_dimension_roots_bounded_by_upper(generic_pair):
    report = affinity_dimension(generic_pair, 8, 1e-10)
    assert report.norm_half_ok
    assert all(report.upper_bound <= t for _, t in report.roots)
    assert 0.0 < report.prediction < 2.0


def test_dimension_partial_on_budget(generic_pair):
    report = affinity_dimension(generic_pair, 8, 1e-8, budget=32)
    assert report.partial
    assert report.stopped_at == 6
    assert report.levels == [1, 2, 3, 4, 5]
