import json

import pytest

from sstest.core import BatchFamily, Instance
from sstest.costs import AdditiveCost, ConcaveCardinalityCost
from sstest.exceptions import InputError
from sstest.generators import GENERATORS, bad_greedy, bad_greedy_pass_probs
from sstest.io import (
    dumps,
    instance_from_dict,
    instance_to_dict,
    load_graph,
    load_instance,
    load_mssc,
    load_solution,
    pass_prob_text,
    read_json,
    solution_to_dict,
)


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text)
    return path


def test_pass_prob_text_round_trips():
    for q in (0.25, 0.1, 1e-30, 2.0**-257, 0.3662040962227032):
        text = pass_prob_text(q)
        assert Instance.from_pass_probs([text]).fail_probs[0] == q


def test_bad_instance_text():
    assert bad_greedy_pass_probs(4) == ["0.75", "0.875", "0.9375", "0.96875"]
    inst, g = bad_greedy(4)
    data = instance_to_dict(inst, g)
    assert data["pass_probs"] == ["0.75", "0.875", "0.9375", "0.96875"]
    assert data["cost_model"] == {"type": "concave_cardinality", "g": [0.0, 1.0, 2.0, 2.0, 2.0]}


def test_instance_round_trip_all_generators():
    for make in GENERATORS.values():
        inst, model = make(4, 3)
        back, model2 = instance_from_dict(json.loads(dumps(instance_to_dict(inst, model))))
        assert back.fail_probs == inst.fail_probs
        assert model2.to_dict() == model.to_dict()


def test_batch_family_round_trip():
    inst = Instance((0.5, 0.5), BatchFamily.max_size(1))
    data = instance_to_dict(inst, AdditiveCost([1, 1]))
    assert data["batch_family"] == {"type": "max_size", "k": 1}
    assert instance_from_dict(data)[0].batch_family == BatchFamily.max_size(1)


def test_missing_field_is_named(tmp_path):
    path = write(tmp_path, "x.json", json.dumps({"n": 2, "pass_probs": [0.5, 0.5]}))
    with pytest.raises(InputError, match="cost_model"):
        load_instance(path)


def test_bad_probability_entry_is_named():
    with pytest.raises(InputError, match=r"pass_probs\[1\]"):
        instance_from_dict({"pass_probs": [0.5, None], "cost_model": {"type": "additive", "costs": [1, 1]}})


def test_n_mismatch():
    with pytest.raises(InputError, match="'n'"):
        instance_from_dict({"n": 3, "pass_probs": [0.5], "cost_model": {"type": "additive", "costs": [1]}})
    with pytest.raises(InputError, match="cost_model"):
        instance_from_dict({"pass_probs": [0.5], "cost_model": {"type": "additive", "costs": [1, 2]}})


def test_syntax_error_reports_position(tmp_path):
    path = write(tmp_path, "bad.json", '{\n  "n": 2,\n  oops\n}')
    with pytest.raises(InputError, match="line 3"):
        read_json(path)


def test_missing_file(tmp_path):
    with pytest.raises(InputError):
        read_json(tmp_path / "nope.json")


def test_top_level_must_be_object(tmp_path):
    with pytest.raises(InputError, match="object"):
        read_json(write(tmp_path, "a.json", "[1, 2]"))


def test_solution_file(tmp_path):
    path = write(tmp_path, "s.json", dumps(solution_to_dict([{2}, {1, 3}], [1.0, 2.0])))
    assert load_solution(path).to_lists() == [[2], [1, 3]]
    bad = write(tmp_path, "t.json", json.dumps({"batches": [1, 2]}))
    with pytest.raises(InputError):
        load_solution(bad)


def test_mssc_and_graph_files(tmp_path):
    sets = [{"members": [0], "cost": 1}, {"members": [1], "cost": 1}, {"members": [0, 1], "cost": 1.5}]
    m = write(tmp_path, "m.json", json.dumps({"weights": [1, 2], "sets": sets}))
    assert load_mssc(m).costs == (1.0, 1.0, 1.5)
    flat = write(tmp_path, "f.json", json.dumps({"weights": [1, 2], "sets": [[0], [1]]}))
    with pytest.raises(InputError, match="members"):
        load_mssc(flat)
    g = write(tmp_path, "g.json", json.dumps({"vertices": 3, "edges": [[0, 1], [1, 2], [0, 2]], "r": 3}))
    assert load_graph(g).r == 3
    with pytest.raises(InputError, match="'r'"):
        load_graph(write(tmp_path, "h.json", json.dumps({"vertices": 3, "edges": []})))


def test_dumps_is_canonical():
    assert dumps({"b": 1, "a": [1, 2]}) == '{\n  "a": [\n    1,\n    2\n  ],\n  "b": 1\n}\n'


def test_concave_model_from_file():
    inst, model = instance_from_dict(
        {"pass_probs": ["0.75", "0.875"], "cost_model": {"type": "concave_cardinality", "g": [0, 1, 1]}}
    )
    assert isinstance(model, ConcaveCardinalityCost) and inst.fail_probs == (0.25, 0.125)
