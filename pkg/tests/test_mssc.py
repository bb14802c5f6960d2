import math

import numpy as np
import pytest

from oracle import brute_mssc
from sstest.core import Instance, pass_prob
from sstest.costs import AdditiveCost
from sstest.exact import exact_mssc
from sstest.exceptions import CapacityError, ContractViolation, InputError
from sstest.mssc import (
    MsscInstance,
    build_mssc_from_sst,
    cover_time,
    degraded_choice,
    exact_choice,
    mssc_greedy,
    objective,
    price_audit,
)


def ab():
    return MsscInstance((1.0, 2.0), ({0}, {1}, {0, 1}), (1.0, 1.0, 1.5))


def random_mssc(rng, max_elems=8, max_sets=6):
    m = int(rng.integers(1, max_elems + 1))
    k = int(rng.integers(1, max_sets + 1))
    weights = np.round(rng.uniform(0, 3, m), 3)
    sets = [set(np.nonzero(rng.random(m) < 0.4)[0].tolist()) for _ in range(k)]
    for e in range(m):
        if not any(e in s for s in sets):
            sets[int(rng.integers(0, k))].add(e)
    costs = np.round(rng.uniform(0.1, 3, k), 3)
    return MsscInstance(tuple(weights), tuple(sets), tuple(costs))


def test_single_set_greedy():
    inst = MsscInstance((1.0, 0.5), ({0, 1},), (2.0,))
    sol = mssc_greedy(inst)
    assert sol.order == (0,) and sol.objective == 3.0


def test_ab_greedy_order_and_ties():
    sol = mssc_greedy(ab())
    assert sol.order == (1, 0)
    assert sol.objective == 4.0


def test_cover_times():
    sol = mssc_greedy(ab())
    assert cover_time(sol, 1) == 1.0  # first set
    assert cover_time(sol, 0) == 2.0
    with pytest.raises(InputError):
        cover_time(sol, 7)


def test_objective_matches_cover_times():
    inst = ab()
    sol = mssc_greedy(inst)
    assert objective(inst, sol.order) == sum(inst.weights[e] * t for e, t in sol.cover_times.items())
    assert objective(inst, (0,)) == math.inf


def test_zero_gain_choice_is_a_contract_violation():
    # set 0 covers element 0 only; picking it twice gains nothing
    with pytest.raises(ContractViolation):
        mssc_greedy(ab(), lambda inst, uncovered: 0)


def test_greedy_within_four_of_optimum():
    rng = np.random.default_rng(0)
    for _ in range(200):
        inst = random_mssc(rng)
        sol = mssc_greedy(inst)
        _, opt = exact_mssc(inst)
        assert sol.objective <= 4 * opt * (1 + 1e-9) + 1e-12


def test_exact_mssc_matches_brute_force():
    rng = np.random.default_rng(9)
    for _ in range(30):
        inst = random_mssc(rng, 6, 5)
        _, opt = exact_mssc(inst)
        ref = brute_mssc(list(inst.weights), [set(s) for s in inst.sets], list(inst.costs))
        assert opt == pytest.approx(ref, rel=1e-9, abs=1e-12)


def test_degraded_choice_stays_within_rho():
    inst = ab()
    j = degraded_choice(3.0)(inst, frozenset({0, 1}))
    assert j == 0  # score 1.0 is within 3x of the best 0.5 and is the worst such
    with pytest.raises(InputError):
        degraded_choice(0.5)


def test_build_two_halves():
    inst = Instance.from_pass_probs([0.5, 0.5])
    m = build_mssc_from_sst(inst, AdditiveCost([1, 1]))
    assert m.weights == (0.25, 0.25, 0.25)
    assert [set(s) for s in m.sets] == [{0, 2}, {1, 2}, {0, 1, 2}]
    assert m.labels == (frozenset({1}), frozenset({2}), frozenset({1, 2}))


def test_build_weights_sum_to_failure_probability():
    rng = np.random.default_rng(1)
    for n in range(1, 7):
        inst = Instance(tuple(rng.uniform(0.05, 0.9, n)))
        m = build_mssc_from_sst(inst, AdditiveCost([1] * n))
        assert math.fsum(m.weights) == pytest.approx(1 - pass_prob(inst, inst.tests), rel=1e-12)


def test_build_single_test():
    inst = Instance.from_pass_probs([0.7])
    m = build_mssc_from_sst(inst, AdditiveCost([2]))
    assert m.weights == pytest.approx((0.3,))
    assert m.sets == (frozenset({0}),) and m.costs == (2.0,)


def test_build_capacity():
    inst = Instance.from_pass_probs([0.5] * 13)
    with pytest.raises(CapacityError):
        build_mssc_from_sst(inst, AdditiveCost([1] * 13))


def test_price_audit_single_set():
    inst = MsscInstance((1.0, 2.0), ({0, 1},), (3.0,))
    (step,) = price_audit(inst, mssc_greedy(inst))
    assert step.price == 3.0


def test_price_audit_ab():
    inst = ab()
    steps = price_audit(inst, mssc_greedy(inst))
    assert [s.price for s in steps] == [1.5, 1.0]
    assert [s.score for s in steps] == [0.5, 1.0]
    assert sum(s.covered_weight * s.price for s in steps) == pytest.approx(4.0)


def test_price_audit_area_identity_random():
    rng = np.random.default_rng(2)
    for _ in range(100):
        inst = random_mssc(rng)
        sol = mssc_greedy(inst)
        area = math.fsum(s.covered_weight * s.price for s in price_audit(inst, sol))
        assert area == pytest.approx(sol.objective, rel=1e-9, abs=1e-12)


def test_file_roundtrip():
    inst = ab()
    back = MsscInstance.from_dict(inst.to_dict())
    assert back.sets == inst.sets and back.costs == inst.costs and back.weights == inst.weights
    with pytest.raises(InputError):
        MsscInstance.from_dict({"weights": [1]})


def test_exact_choice_lowest_index():
    assert exact_choice(ab(), frozenset({0, 1})) == 1


def test_subnormal_weight_is_still_covered():
    # cost / weight overflows to inf; the set must still be chosen
    inst = MsscInstance((2.2e-311,), ({0},), (1.0,))
    for choice in (exact_choice, degraded_choice(2.0)):
        assert mssc_greedy(inst, choice).order == (0,)
