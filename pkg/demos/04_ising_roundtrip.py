"""Reduce a spin problem: convert an Ising model, shrink it, lift the answer.

The substitution s = 2x - 1 turns a +/-1 spin problem into a 0/1 problem
with the same objective values, so preprocessing carries over unchanged.
"""

import random

from quboreduce import (
    brute_force_solve, ising_to_qubo, reconstruct_solution, run_to_fixed_point,
)

rng = random.Random(2024)
n = 14

# A random sparse spin glass with a few strong bonds.
h = {i: rng.randint(-3, 3) for i in range(1, n + 1)}
J = {}
for i in range(1, n + 1):
    for j in range(i + 1, n + 1):
        if rng.random() < 0.25:
            J[(i, j)] = rng.choice([-6, -1, 1, 6])

instance = ising_to_qubo(n, h, J)
print(f"spin problem with {n} spins and {len(J)} bonds")
print(f"as a binary problem: {len(instance.linear)} weights, "
      f"{instance.num_edges} couplings, constant {instance.offset}")

reduced, log, solution_map = run_to_fixed_point(instance)
print(f"preprocessing decided {n - len(solution_map.survivors)} of {n} variables "
      f"in {log.pass_count} passes")

result = brute_force_solve(reduced)
survivors = solution_map.survivors
best = result.optima[0]
full = reconstruct_solution(
    solution_map, {survivors[k]: best[k] for k in range(len(survivors))}
)
spins = {i: 2 * full[i] - 1 for i in full}

direct = brute_force_solve(instance)
assert result.optimum == direct.optimum
print(f"ground objective {result.optimum}; spins "
      + "".join("+" if spins[i] > 0 else "-" for i in sorted(spins)))
