"""Concrete subadditive cost models and their JSON registry."""

from ..exceptions import InputError
from .additive import AdditiveCost, BatchSetupCost, pareto_knapsack
from .base import CostModel, harmonic, split_epsilon
from .concave import ConcaveCardinalityCost
from .machines import MachineActivationCost, greedy_set_cover, machine_ratio, machine_value
from .routing import (
    RoutingCost,
    double_mst_tour,
    held_karp_table,
    routing_ratio,
    routing_value,
)
from .tree import CapacitatedTreeCost, TreeCost, capacitated_tree_model, tree_ratio, tree_value


def additive_model(costs) -> AdditiveCost:
    return AdditiveCost(costs)


def batch_setup_model(setup, costs, epsilon: float = 0.1) -> BatchSetupCost:
    return BatchSetupCost(setup, costs, epsilon)


def concave_cardinality_model(g) -> ConcaveCardinalityCost:
    return ConcaveCardinalityCost(g)


def _field(data, name):
    if name not in data:
        raise InputError(f"cost model: missing field {name!r}")
    return data[name]


def model_from_dict(data: dict, epsilon: float = 0.1, n: int | None = None) -> CostModel:
    """Build a cost model from its JSON form (the ``type`` tag selects it)."""
    if not isinstance(data, dict):
        raise InputError("cost model must be a JSON object")
    kind = _field(data, "type")
    if kind == "additive":
        return AdditiveCost(_field(data, "costs"))
    if kind == "batch_setup":
        return BatchSetupCost(float(_field(data, "setup")), _field(data, "costs"), epsilon)
    if kind == "concave_cardinality":
        return ConcaveCardinalityCost(_field(data, "g"))
    if kind == "tree":
        return TreeCost(_field(data, "nodes"), _field(data, "leaf_of_test"), epsilon)
    if kind == "tree_capacitated":
        k = _field(data, "k")
        return CapacitatedTreeCost(_field(data, "nodes"), _field(data, "leaf_of_test"), k, epsilon)
    if kind == "machines":
        return MachineActivationCost(_field(data, "machines"), n)
    if kind == "routing":
        return RoutingCost(_field(data, "dist"), int(data.get("root", 0)), epsilon)
    if kind == "and_coverage":
        from ..hardness import AndCoverageCost

        return AndCoverageCost(_field(data, "machine_sets"))
    raise InputError(f"cost model: unknown type {kind!r}")


__all__ = [
    "AdditiveCost",
    "BatchSetupCost",
    "CapacitatedTreeCost",
    "ConcaveCardinalityCost",
    "CostModel",
    "MachineActivationCost",
    "RoutingCost",
    "TreeCost",
    "additive_model",
    "batch_setup_model",
    "capacitated_tree_model",
    "concave_cardinality_model",
    "double_mst_tour",
    "greedy_set_cover",
    "harmonic",
    "held_karp_table",
    "machine_ratio",
    "machine_value",
    "model_from_dict",
    "pareto_knapsack",
    "routing_ratio",
    "routing_value",
    "split_epsilon",
    "tree_ratio",
    "tree_value",
]
