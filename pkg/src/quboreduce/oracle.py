"""Exact enumeration solver and reduction equivalence checker.

The solver enumerates all 2^n assignments with vectorized integer arithmetic,
so every optimum is exact and *all* optimal assignments can be collected
(capped).  It exists to verify reductions, not to compete with real solvers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .engine import SolutionMap, reconstruct_solution
from .model import QuboInstance, evaluate

OPTIMA_CAP = 1 << 16
_CHUNK_BITS = 16


@dataclass
class OracleResult:
    optimum: int
    optima: list[tuple[int, ...]]  # 0/1 tuples, entry k-1 is variable k
    evaluated_count: int
    truncated: bool


def _dense_arrays(instance: QuboInstance) -> tuple[np.ndarray, np.ndarray]:
    n = instance.n
    c = np.zeros(n, dtype=np.int64)
    for i, v in instance.linear.items():
        c[i - 1] = v
    upper = np.zeros((n, n), dtype=np.int64)
    for (i, j), d in instance.quadratic.items():
        upper[i - 1, j - 1] = d
    return c, upper


def brute_force_solve(instance: QuboInstance, n_limit: int = 24) -> OracleResult:
    """Enumerate every assignment; return the optimum and all optima (capped)."""
    n = instance.n
    if n > n_limit:
        raise ValueError(f"instance has {n} variables, above the oracle limit {n_limit}")
    if n == 0:
        return OracleResult(instance.offset, [()], 1, False)
    magnitude = (
        abs(instance.offset)
        + sum(abs(v) for v in instance.linear.values())
        + sum(abs(v) for v in instance.quadratic.values())
    )
    if magnitude >= 1 << 62:
        raise ValueError("coefficient magnitudes overflow the oracle's arithmetic")
    c, upper = _dense_arrays(instance)
    total = 1 << n
    chunk = 1 << min(n, _CHUNK_BITS)
    shifts = np.arange(n, dtype=np.int64)

    def chunk_values(start: int) -> np.ndarray:
        idx = np.arange(start, start + chunk, dtype=np.int64)
        bits = (idx[:, None] >> shifts) & 1
        return bits @ c + np.einsum("ij,ij->i", bits @ upper, bits)

    best = None
    for start in range(0, total, chunk):
        m = int(chunk_values(start).max())
        if best is None or m > best:
            best = m
    optima: list[tuple[int, ...]] = []
    truncated = False
    for start in range(0, total, chunk):
        vals = chunk_values(start)
        for off in np.flatnonzero(vals == best):
            if len(optima) >= OPTIMA_CAP:
                truncated = True
                break
            idx = start + int(off)
            optima.append(tuple((idx >> k) & 1 for k in range(n)))
        if truncated:
            break
    return OracleResult(best + instance.offset, optima, total, truncated)


@dataclass
class EquivalenceReport:
    ok: bool
    optimum_original: int
    optimum_reduced: int
    message: str = ""
    counterexample: dict[int, int] | None = None


def check_equivalence(
    original: QuboInstance,
    reduced: QuboInstance,
    solution_map: SolutionMap,
    n_limit: int = 24,
) -> EquivalenceReport:
    """Verify a reduction exactly.

    Checks that the offset-inclusive optima of the original and reduced
    problems agree, and that every optimal reduced assignment (the reduced
    instance is indexed densely; position k corresponds to survivor
    ``solution_map.survivors[k-1]``) reconstructs to an assignment achieving
    the original optimum.  Reports the first counterexample on failure.
    """
    if original.n > n_limit or reduced.n > n_limit:
        raise ValueError(f"instance above the oracle limit {n_limit}")
    if reduced.n != len(solution_map.survivors):
        raise ValueError(
            f"reduced instance has {reduced.n} variables but the map lists "
            f"{len(solution_map.survivors)} survivors"
        )
    res_orig = brute_force_solve(original, n_limit)
    res_red = brute_force_solve(reduced, n_limit)
    if res_orig.optimum != res_red.optimum:
        return EquivalenceReport(
            False, res_orig.optimum, res_red.optimum,
            f"optimum mismatch: original {res_orig.optimum}, reduced {res_red.optimum}",
        )
    survivors = solution_map.survivors
    for bits in res_red.optima:
        red_sol = {survivors[k]: bits[k] for k in range(len(survivors))}
        full = reconstruct_solution(solution_map, red_sol)
        value = evaluate(original, full)
        if value != res_orig.optimum:
            return EquivalenceReport(
                False, res_orig.optimum, res_red.optimum,
                f"reconstructed assignment evaluates to {value}, "
                f"expected {res_orig.optimum}",
                counterexample=full,
            )
    return EquivalenceReport(True, res_orig.optimum, res_red.optimum)
