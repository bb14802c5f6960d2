"""JSON files: instances, solutions, MSSC instances and graphs."""

from __future__ import annotations

import json
from decimal import Decimal, localcontext
from pathlib import Path

from .core import ALL, BatchFamily, BatchSequence, Instance
from .costs import CostModel, model_from_dict
from .exceptions import InputError
from .hardness import DreInstance
from .mssc import MsscInstance


def read_json(path) -> dict:
    """Parse a JSON file; syntax errors report line and column."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise InputError(f"{path}: top level must be a JSON object")
    return data


def dumps(data) -> str:
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


def write_json(path, data):
    Path(path).write_text(dumps(data))


def pass_prob_text(q: float) -> str:
    """Decimal string for ``1 - q`` that parses back to exactly ``q``."""
    short = repr(1.0 - q)
    if float(1 - Decimal(short)) == q:
        return short
    with localcontext() as ctx:
        ctx.prec = 1100
        return str(1 - Decimal(q))


def _require(data: dict, name: str, where: str = "instance"):
    if name not in data:
        raise InputError(f"{where}: missing field {name!r}")
    return data[name]


def instance_from_dict(data: dict, epsilon: float = 0.1) -> tuple:
    """``(Instance, CostModel)`` from the instance-file layout."""
    probs = _require(data, "pass_probs")
    if not isinstance(probs, list):
        raise InputError("instance: field 'pass_probs' must be an array")
    for k, p in enumerate(probs):
        if not isinstance(p, (str, int, float)) or isinstance(p, bool):
            raise InputError(f"instance: pass_probs[{k}] must be a number or decimal string")
    family = BatchFamily.from_dict(data["batch_family"]) if "batch_family" in data else ALL
    instance = Instance.from_pass_probs(probs, family)
    n = data.get("n", instance.n)
    if n != instance.n:
        raise InputError(f"instance: field 'n' = {n!r} but pass_probs has {instance.n} entries")
    model = model_from_dict(_require(data, "cost_model"), epsilon, instance.n)
    if model.n != instance.n:
        raise InputError(f"instance: cost_model covers {model.n} tests but n = {instance.n}")
    return model.bind(instance), model


def instance_to_dict(instance: Instance, model: CostModel) -> dict:
    out = {
        "n": instance.n,
        "pass_probs": [pass_prob_text(q) for q in instance.fail_probs],
        "cost_model": model.to_dict(),
    }
    if instance.batch_family.kind != "all":
        out["batch_family"] = instance.batch_family.to_dict()
    return out


def load_instance(path, epsilon: float = 0.1) -> tuple:
    data = read_json(path)
    try:
        return instance_from_dict(data, epsilon)
    except InputError as exc:
        raise InputError(f"{path}: {exc}") from exc


def solution_to_dict(sequence, bounds=None, **extra) -> dict:
    out = {"batches": [sorted(int(i) for i in b) for b in sequence]}
    if bounds is not None:
        out["bounds"] = [float(b) for b in bounds]
    out.update(extra)
    return out


def solution_from_dict(data: dict) -> BatchSequence:
    batches = _require(data, "batches", "solution")
    if not isinstance(batches, list) or not all(isinstance(b, list) for b in batches):
        raise InputError("solution: field 'batches' must be an array of arrays")
    return BatchSequence(tuple(frozenset(int(i) for i in b) for b in batches))


def load_solution(path) -> BatchSequence:
    return solution_from_dict(read_json(path))


def load_mssc(path) -> MsscInstance:
    data = read_json(path)
    try:
        return MsscInstance.from_dict(data)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"{path}: malformed MSSC instance ({exc})") from exc


def load_graph(path) -> DreInstance:
    return DreInstance.from_dict(read_json(path))
