import math

import pytest

from oracle import seq_cost
from sstest.core import (
    BatchFamily,
    BatchSequence,
    CostedSequence,
    Instance,
    expected_cost,
    expected_cost_upper,
    fail_prob,
    monte_carlo_cost,
    pass_prob,
    validate_partition,
)
from sstest.costs import AdditiveCost, ConcaveCardinalityCost
from sstest.exceptions import InputError
from sstest.generators import bad_greedy

unit2 = AdditiveCost([1, 1])
half2 = Instance.from_pass_probs([0.5, 0.5])


def test_pass_prob_empty_batch_is_one():
    inst = Instance.from_pass_probs([0.5, 0.25])
    assert pass_prob(inst, set()) == 1.0
    assert isinstance(pass_prob(inst, set()), float)


def test_pass_prob_product():
    inst = Instance.from_pass_probs([0.5, 0.25])
    assert pass_prob(inst, {1, 2}) == 0.125


def test_pass_prob_bad_instance_pair():
    inst, _ = bad_greedy(4)
    assert pass_prob(inst, {1, 2}) == pytest.approx(0.75 * 0.875, abs=0)
    assert pass_prob(inst, {1, 2}) == 0.65625


def test_pass_prob_rejects_out_of_range():
    with pytest.raises(InputError):
        pass_prob(half2, {3})


def test_pass_prob_large_batch_uses_logs_without_underflow():
    inst = Instance.from_pass_probs([0.01] * 400)
    assert pass_prob(inst, set(range(1, 401))) == 0.0
    assert fail_prob(inst, set(range(1, 401))) == 1.0


def test_decimal_string_probabilities_are_exact():
    inst = Instance.from_pass_probs(["0.96875", "0.75"])
    assert inst.fail_probs == (0.03125, 0.25)


def test_tiny_failure_probability_survives():
    p = "0." + "9" * 30
    inst = Instance.from_pass_probs([p])
    assert inst.fail_probs[0] == pytest.approx(1e-30, rel=1e-12)
    assert fail_prob(inst, {1}) == pytest.approx(1e-30, rel=1e-12)


def test_never_failing_test_is_rejected():
    with pytest.raises(InputError, match="never fails"):
        Instance.from_pass_probs([0.5, 1.0])


def test_invalid_probability_rejected():
    with pytest.raises(InputError):
        Instance.from_pass_probs([1.5])
    with pytest.raises(InputError):
        Instance.from_pass_probs([])


def test_expected_cost_two_singletons():
    assert expected_cost(half2, [{1}, {2}], unit2) == 1.5


def test_expected_cost_single_batch():
    assert expected_cost(half2, [{1, 2}], unit2) == 2.0


def test_expected_cost_bad_instance_singletons():
    inst, g = bad_greedy(4)
    got = expected_cost(inst, [{1}, {2}, {3}, {4}], g)
    ref = seq_cost(inst.pass_probs, [{1}, {2}, {3}, {4}], g)
    assert got == pytest.approx(ref, rel=1e-15)
    assert got == pytest.approx(1 + 0.75 + 0.65625 + 0.615234375, rel=1e-15)
    assert round(got, 4) == 3.0215


def test_expected_cost_rejects_invalid_partition():
    with pytest.raises(InputError):
        expected_cost(half2, [{1}], unit2)


def test_expected_cost_upper_with_true_costs_matches():
    seq = BatchSequence((frozenset({1}), frozenset({2})))
    cs = CostedSequence(seq, (1.0, 1.0))
    assert expected_cost_upper(half2, cs) == expected_cost(half2, seq, unit2)


def test_expected_cost_upper_single_batch():
    seq = BatchSequence((frozenset({1, 2}),))
    assert expected_cost_upper(half2, CostedSequence(seq, (7.5,))) == 7.5


def test_expected_cost_upper_bad_instance_k0():
    inst, g = bad_greedy(4)
    seq = BatchSequence((frozenset({1, 2, 3, 4}),))
    assert expected_cost_upper(inst, CostedSequence(seq, (g(seq[0]),))) == 2.0


def test_costed_sequence_validates_bounds():
    seq = BatchSequence((frozenset({1, 2}),))
    with pytest.raises(InputError):
        CostedSequence(seq, (1.0, 2.0))
    with pytest.raises(InputError):
        CostedSequence(seq, (-1.0,))


def test_monte_carlo_single_batch_is_exact():
    inst = Instance.from_pass_probs([0.3, 0.6, 0.9])
    cost = AdditiveCost([1, 2, 3])
    assert monte_carlo_cost(inst, [{1, 2, 3}], cost, 1000, 7) == (6.0, 0.0)


def test_monte_carlo_converges_to_expected_cost():
    mean, err = monte_carlo_cost(half2, [{1}, {2}], unit2, 10**6, 1)
    assert abs(mean - 1.5) < 0.01
    assert abs(mean - 1.5) <= 4 * err


def test_monte_carlo_is_reproducible():
    inst = Instance.from_pass_probs([0.3, 0.6, 0.9])
    cost = AdditiveCost([1, 2, 3])
    a = monte_carlo_cost(inst, [{2}, {1}, {3}], cost, 1, 42)
    b = monte_carlo_cost(inst, [{2}, {1}, {3}], cost, 1, 42)
    assert a == b


def test_monte_carlo_needs_trials():
    with pytest.raises(InputError):
        monte_carlo_cost(half2, [{1, 2}], unit2, 0, 1)


def test_validate_partition_ok():
    assert validate_partition(half2, [{1}, {2}]) == []


def test_validate_partition_overlap():
    (v,) = validate_partition(half2, [{1}, {1, 2}])
    assert v.kind == "overlap" and v.tests == (1,) and v.batch_index == 1


def test_validate_partition_coverage():
    (v,) = validate_partition(half2, [{1}])
    assert v.kind == "coverage" and v.tests == (2,)


def test_validate_partition_family_and_empty():
    inst = Instance(half2.fail_probs, BatchFamily.max_size(1))
    kinds = {v.kind for v in validate_partition(inst, [set(), {1, 2}])}
    assert kinds == {"empty", "family"}


def test_validate_partition_range():
    kinds = [v.kind for v in validate_partition(half2, [{1, 2, 5}])]
    assert "range" in kinds


def test_batch_family_roundtrip():
    fam = BatchFamily.max_size(3)
    assert BatchFamily.from_dict(fam.to_dict()) == fam
    with pytest.raises(InputError):
        BatchFamily.from_dict({"type": "max_size"})
    with pytest.raises(InputError):
        BatchFamily("weird")


def test_bad_instance_256_is_exact():
    inst, _ = bad_greedy(256)
    assert inst.fail_probs[-1] == math.ldexp(1.0, -257)
    # the pass probability itself rounds to 1.0; the failure probability must not
    assert fail_prob(inst, {256}) == math.ldexp(1.0, -257)


def test_concave_bad_instance_cost_table():
    _, g = bad_greedy(4)
    assert isinstance(g, ConcaveCardinalityCost)
    assert g.g == (0.0, 1.0, 2.0, 2.0, 2.0)
