import math

from hypothesis import given, settings
from hypothesis import strategies as st

from oracle import seq_cost
from sstest.core import Instance, expected_cost, validate_partition
from sstest.costs import AdditiveCost
from sstest.exact import exact_oracles, exact_ratio, exact_sst
from sstest.generators import (
    random_additive,
    random_batch_setup,
    random_capacitated_tree,
    random_concave,
    random_machines,
    random_metric,
    random_tree,
)
from sstest.greedy import enumerate_truncations, modified_greedy, plain_greedy
from sstest.mssc import MsscInstance, build_mssc_from_sst, mssc_greedy, price_audit
from sstest.quota import d, rewards

MAKERS = {
    "additive": random_additive,
    "batch_setup": random_batch_setup,
    "concave": random_concave,
    "tree": random_tree,
    "tree_cap": lambda n, seed: random_capacitated_tree(n, 1 + seed % 3, seed),
    "machines": random_machines,
    "routing": random_metric,
}

kinds = st.sampled_from(sorted(MAKERS))
seeds = st.integers(0, 2**31 - 1)
probs = st.floats(0.01, 0.99, allow_nan=False)


def make(kind, n, seed):
    return MAKERS[kind](n, seed)


def subset_of(n):
    return st.sets(st.integers(1, n)).map(frozenset)


@settings(max_examples=60, deadline=None)
@given(kinds, st.integers(1, 7), seeds, st.data())
def test_cost_is_subadditive_and_monotone(kind, n, seed, data):
    _, model = make(kind, n, seed)
    A = data.draw(subset_of(n))
    B = data.draw(subset_of(n))
    tol = 1e-9 * max(1.0, model(A | B))
    assert model(A) + model(B) >= model(A | B) - tol
    assert model(A) <= model(A | B) + tol
    assert model(frozenset()) == 0


@settings(max_examples=40, deadline=None)
@given(kinds, st.integers(1, 6), seeds)
def test_truncation_bounds_dominate_costs(kind, n, seed):
    inst, model = make(kind, n, seed)
    trace = plain_greedy(inst, model.ratio_oracle(inst))
    for t in enumerate_truncations(inst, trace, model.value_oracle()):
        # the merged remainder may exceed a size cap; only the split form must obey it
        unconstrained = Instance(inst.fail_probs)
        assert validate_partition(unconstrained, t.sequence) == []
        exec_seq = t.executable_sequence(inst)
        assert validate_partition(inst, exec_seq) == []
        assert t.upper_bound >= expected_cost(inst, exec_seq, model) * (1 - 1e-9)


@settings(max_examples=40, deadline=None)
@given(kinds, st.integers(1, 6), seeds)
def test_exact_below_greedy_below_five_opt(kind, n, seed):
    inst, model = make(kind, n, seed)
    best, _ = modified_greedy(inst, *exact_oracles(inst, model))
    got = expected_cost(inst, best.executable_sequence(inst), model)
    opt = exact_sst(inst, model).opt_cost
    assert opt * (1 - 1e-9) <= got <= 5 * opt * (1 + 1e-9)


@settings(max_examples=80, deadline=None)
@given(st.lists(probs, min_size=1, max_size=6), st.lists(st.floats(0, 5), min_size=6, max_size=6), st.data())
def test_expected_cost_matches_reference(p, costs, data):
    inst = Instance.from_pass_probs(p)
    model = AdditiveCost(costs[: len(p)])
    order = data.draw(st.permutations(range(1, len(p) + 1)))
    cuts = data.draw(st.sets(st.integers(1, len(p) - 1), max_size=len(p) - 1)) if len(p) > 1 else set()
    bounds = [0, *sorted(cuts), len(p)]
    seq = [frozenset(order[a:b]) for a, b in zip(bounds, bounds[1:])]
    assert math.isclose(expected_cost(inst, seq, model), seq_cost(inst.pass_probs, seq, model), rel_tol=1e-12)


@settings(max_examples=100, deadline=None)
@given(st.lists(probs, min_size=1, max_size=8))
def test_linearization_identity(p):
    inst = Instance.from_pass_probs(p)
    r = rewards(inst)
    lhs = d(math.fsum(r.values()))
    rhs = 1 - math.prod(inst.pass_probs)
    assert math.isclose(lhs, rhs, rel_tol=1e-12, abs_tol=1e-15)


@settings(max_examples=40, deadline=None)
@given(st.lists(probs, min_size=1, max_size=6), seeds)
def test_mssc_greedy_is_a_plain_greedy_run(p, seed):
    # equal probabilities can tie; every MSSC step must still be a min-ratio batch
    _, model = random_concave(len(p), seed)
    inst = Instance.from_pass_probs(p)
    m = build_mssc_from_sst(inst, model)
    left = set(inst.tests)
    for j in mssc_greedy(m).order:
        batch = m.labels[j] & left
        assert batch
        best = exact_ratio(inst, left, model)[1]
        got = model(m.labels[j]) / (1 - math.prod(inst.pass_probs[i - 1] for i in batch))
        assert got <= best * (1 + 1e-9)
        left -= batch
    assert not left


@settings(max_examples=60, deadline=None)
@given(
    st.lists(st.floats(0, 3), min_size=1, max_size=6),
    st.lists(st.floats(0.1, 3), min_size=1, max_size=5),
    st.data(),
)
def test_mssc_price_area_identity(weights, costs, data):
    m = len(weights)
    sets = [data.draw(st.sets(st.integers(0, m - 1))) for _ in costs]
    sets[0] = set(range(m))
    inst = MsscInstance(tuple(weights), tuple(sets), tuple(costs))
    sol = mssc_greedy(inst)
    area = math.fsum(s.covered_weight * s.price for s in price_audit(inst, sol))
    assert math.isclose(area, sol.objective, rel_tol=1e-9, abs_tol=1e-12)
