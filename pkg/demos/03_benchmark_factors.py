"""Generate the benchmark family and see how its factors steer reductions.

The generator draws coefficients uniformly from a bounded integer range and
then inflates a chosen fraction of them into outliers; a two-level design
over six such factors gives sixteen instance types.  Graphs carry an exact
edge count, a hub backbone, and are always connected.  This demo produces a
small suite and reports percent reduction by quadratic-outlier share, the
strongest lever at this scale.
"""

import statistics

from quboreduce import run_to_fixed_point
from quboreduce.generator import (
    GeneratorSpec, design_table, generate_instance,
)

N, EDGES, SEEDS = 100, 500, 5

rows = design_table()
print(f"{len(rows)} design rows; generating {len(rows) * SEEDS} instances "
      f"with n={N}, edges={EDGES}")

by_outlier_share = {0.05: [], 0.15: []}
for row_id, row in enumerate(rows, start=1):
    for seed in range(SEEDS):
        spec = GeneratorSpec.from_design(N, EDGES, row, seed=seed)
        instance = generate_instance(spec)
        _, log, solution_map = run_to_fixed_point(instance)
        pct = 100.0 * (N - len(solution_map.survivors)) / N
        by_outlier_share[row.pct_quadratic_multiplied].append(pct)

for share, pcts in sorted(by_outlier_share.items()):
    print(f"quadratic outliers on {share:.0%} of edges: "
          f"mean reduction {statistics.mean(pcts):5.1f}%  "
          f"(min {min(pcts):.0f}%, max {max(pcts):.0f}%)")

print("\nLarge coupling outliers dominate entire rows of the problem, which")
print("is exactly the regime the pair rules need, so more outliers means")
print("deeper reductions.")
