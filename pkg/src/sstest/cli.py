"""Command-line front end (``sstest``).

Exit codes: 0 success, 2 bad input, 3 instance too large for an exact
routine, 4 an oracle broke its contract.
"""

from __future__ import annotations

import argparse
import hashlib
import sys
import time
from pathlib import Path

import numpy as np

from . import generators
from .core import expected_cost, monte_carlo_cost, validate_partition
from .exact import MAX_EXACT_MSSC_SETS, MAX_EXACT_N, exact_mssc, exact_optimum, exact_oracles
from .exceptions import ContractViolation, InputError, SSTError
from .greedy import modified_greedy
from .hardness import dre_to_sst, recover_dre
from .io import (
    dumps,
    instance_to_dict,
    load_graph,
    load_instance,
    load_mssc,
    solution_to_dict,
)
from .mssc import degraded_choice, exact_choice, mssc_greedy


def fmt(x) -> str:
    return "%.10g" % x


def _digest(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()[:16]


def _emit(text: str, out):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _solve(instance, model):
    best, trace = modified_greedy(instance, model.ratio_oracle(instance), model.value_oracle())
    return best, trace


def _has_exact(instance, model) -> bool:
    return instance.n <= MAX_EXACT_N or getattr(model, "g", None) is not None


def cmd_solve(args) -> int:
    instance, model = load_instance(args.instance, args.epsilon)
    start = time.perf_counter()
    best, trace = _solve(instance, model)
    seq = best.executable_sequence(instance)
    cost = expected_cost(instance, seq, model)
    elapsed = time.perf_counter() - start
    bounds = list(trace.bounds[: best.k]) + ([best.final_bound] if best.k < len(trace) else [])
    rows = [
        ("algorithm", "modified_greedy"),
        ("instance", _digest(args.instance)),
        ("n", str(instance.n)),
        ("cost_model", model.tag),
        ("truncation_k", str(best.k)),
        ("batches", str(len(seq))),
        ("expected_cost", fmt(cost)),
        ("upper_bound_G", fmt(best.upper_bound)),
        ("gamma", fmt(model.gamma)),
        ("rho", fmt(model.rho)),
        ("implied_bound", fmt(model.implied_bound)),
        ("wall_time_s", "%.3f" % elapsed),
        ("seed", str(args.seed)),
    ]
    if args.trials:
        mean, err = monte_carlo_cost(instance, seq, model, args.trials, args.seed)
        rows.append(("monte_carlo", f"{fmt(mean)} +- {fmt(err)} ({args.trials} trials)"))
    for key, val in rows:
        print(f"{key:15s} {val}")
    if args.out:
        split = len(seq) != len(best.sequence)
        data = solution_to_dict(seq, None if split else bounds, expected_cost=cost,
                                upper_bound=best.upper_bound, truncation_index=best.k)
        _check_emitted(instance, seq)
        Path(args.out).write_text(dumps(data))
    return 0


def _check_emitted(instance, seq):
    problems = validate_partition(instance, seq)
    if problems:
        raise ContractViolation(f"solution is not a valid partition: {problems[0].message}")


def cmd_exact(args) -> int:
    instance, model = load_instance(args.instance, args.epsilon)
    result = exact_optimum(instance, model)
    print(f"optimum        {fmt(result.opt_cost)}")
    for j, batch in enumerate(result.opt_sequence, start=1):
        print(f"batch {j:<8d} {sorted(batch)}")
    if args.out:
        Path(args.out).write_text(dumps(solution_to_dict(result.opt_sequence, expected_cost=result.opt_cost)))
    return 0


def cmd_compare(args) -> int:
    instance, model = load_instance(args.instance, args.epsilon)
    best, trace = _solve(instance, model)
    plain = expected_cost(instance, trace.sequence, model)
    modified = expected_cost(instance, best.executable_sequence(instance), model)
    print(f"{'algorithm':16s} expected_cost")
    print(f"{'plain_greedy':16s} {fmt(plain)}")
    print(f"{'modified_greedy':16s} {fmt(modified)}")
    if _has_exact(instance, model):
        print(f"{'exact':16s} {fmt(exact_optimum(instance, model).opt_cost)}")
    else:
        print(f"exact column omitted: n = {instance.n} exceeds {MAX_EXACT_N}")
    return 0


def cmd_mssc(args) -> int:
    inst = load_mssc(args.instance)
    choice = exact_choice if args.rho == 1 else degraded_choice(args.rho)
    sol = mssc_greedy(inst, choice)
    print(f"greedy_order   {list(sol.order)}")
    print(f"greedy_cost    {fmt(sol.objective)}")
    if len(inst.sets) <= MAX_EXACT_MSSC_SETS:
        order, opt = exact_mssc(inst)
        print(f"exact_order    {list(order)}")
        print(f"exact_cost     {fmt(opt)}")
    return 0


def cmd_gen(args) -> int:
    if args.kind not in generators.GENERATORS:
        raise InputError(f"unknown generator {args.kind!r}; choose from {sorted(generators.GENERATORS)}")
    instance, model = generators.GENERATORS[args.kind](args.n, args.seed)
    _emit(dumps(instance_to_dict(instance, model)), args.out)
    return 0


def cmd_reduce(args) -> int:
    dre = load_graph(args.graph)
    instance, cost = dre_to_sst(dre)
    if args.out:
        Path(args.out).write_text(dumps(instance_to_dict(instance, cost)))
    if instance.n <= MAX_EXACT_N:
        ratio, value = exact_oracles(instance, cost)
    else:
        ratio, value = cost.ratio_oracle(instance), cost.value_oracle()
    best, _ = modified_greedy(instance, ratio, value)
    seq = best.executable_sequence(instance)
    rec = recover_dre(instance, seq, dre, cost)
    log_m = np.log(len(dre.edges))
    print(f"edges          {len(dre.edges)}")
    print(f"r              {dre.r}")
    print(f"fail_prob      {fmt(instance.fail_probs[0])}")
    print(f"sequence_cost  {fmt(rec.sequence_cost)}")
    print(f"prefix_batches {rec.prefix}")
    print(f"vertices       {sorted(rec.vertices)}")
    print(f"size_check     |S| = {len(rec.vertices)} <= 2*cost = {fmt(2 * rec.sequence_cost)}: "
          f"{'pass' if rec.size_ok else 'FAIL'}")
    print(f"edge_check     E(S) = {rec.induced} >= r/(2 ln|E|) = {fmt(dre.r / (2 * log_m))}: "
          f"{'pass' if rec.half_edges_ok else 'FAIL'}")
    print(f"sharp_check    E(S) = {rec.induced} >= r ln2/ln|E| = {fmt(dre.r * np.log(2) / log_m)}: "
          f"{'pass' if rec.edges_ok else 'miss'}")
    return 0 if rec.proven_ok else 4


def cmd_bench(args) -> int:
    rng = np.random.default_rng(args.seed)
    kinds = ["random_additive", "random_tree", "random_machines", "random_metric"]
    print(f"{'generator':16s} {'n':>3s} {'worst':>10s} {'mean':>10s} {'time_s':>8s}")
    for kind in kinds:
        ratios = []
        start = time.perf_counter()
        for _ in range(args.trials):
            n = int(rng.integers(2, 9))
            instance, model = generators.GENERATORS[kind](n, int(rng.integers(0, 2**31)))
            best, _ = _solve(instance, model)
            got = expected_cost(instance, best.executable_sequence(instance), model)
            ratios.append(got / exact_optimum(instance, model).opt_cost)
        elapsed = time.perf_counter() - start
        print(f"{kind:16s} {'2-8':>3s} {fmt(max(ratios)):>10s} {fmt(float(np.mean(ratios))):>10s} "
              f"{elapsed:8.3f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sstest", description="Batched series testing solvers.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, instance=True):
        if instance:
            p.add_argument("instance", help="instance JSON file")
        p.add_argument("--epsilon", type=float, default=0.1, help="approximation slack (default 0.1)")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", help="write the result JSON here")

    p = sub.add_parser("solve", help="run modified greedy with the model's oracles")
    common(p)
    p.add_argument("--trials", type=int, default=0, help="Monte-Carlo trials to cross-check the cost")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("exact", help="optimal sequence by exhaustive DP")
    common(p)
    p.set_defaults(func=cmd_exact)

    p = sub.add_parser("compare", help="plain greedy vs modified greedy vs optimum")
    common(p)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("mssc", help="greedy min-sum set cover")
    p.add_argument("instance", help="MSSC JSON file")
    p.add_argument("--rho", type=float, default=1.0, help="choice degradation factor (1 = exact)")
    p.set_defaults(func=cmd_mssc)

    p = sub.add_parser("gen", help="write a generated instance")
    p.add_argument("kind", help=", ".join(sorted(generators.GENERATORS)))
    p.add_argument("n", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("reduce", help="densest-r-edges graph to a testing instance, solve, recover")
    p.add_argument("graph", help="graph JSON file")
    p.add_argument("--out", help="write the reduced instance here")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("bench", help="approximation ratios on random instances")
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SSTError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
