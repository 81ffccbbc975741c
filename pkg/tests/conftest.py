"""Shared helpers: random instance generation and verdict consistency checks."""

import random

from quboreduce import rules
from quboreduce.model import QuboInstance, build_from_triplets, evaluate


def random_instance(rng: random.Random, n: int, coef: int = 10,
                    density: float | None = None) -> QuboInstance:
    """Random instance with integer coefficients in [-coef, coef]."""
    if density is None:
        density = rng.uniform(0.1, 0.9)
    entries = []
    for i in range(1, n + 1):
        v = rng.randint(-coef, coef)
        if v:
            entries.append((i, i, v))
        for j in range(i + 1, n + 1):
            if rng.random() < density:
                v = rng.randint(-coef, coef)
                if v:
                    entries.append((i, j, v))
    return build_from_triplets(n, entries)


def sweep_instance(t: int) -> QuboInstance:
    """Instance t of the acceptance soundness sweep (fully deterministic)."""
    rng = random.Random(t)
    n = rng.randint(2, 18)
    return random_instance(rng, n)


def all_assignments(n: int):
    for mask in range(1 << n):
        yield tuple((mask >> k) & 1 for k in range(n))


def optima_by_enumeration(instance: QuboInstance) -> tuple[int, list[tuple[int, ...]]]:
    """Independent double-loop oracle (no shared code with quboreduce.oracle)."""
    best = None
    opt = []
    for x in all_assignments(instance.n):
        val = instance.offset
        for i, c in instance.linear.items():
            val += c * x[i - 1]
        for (i, j), d in instance.quadratic.items():
            val += d * x[i - 1] * x[j - 1]
        if best is None or val > best:
            best, opt = val, [x]
        elif val == best:
            opt.append(x)
    return best, opt


def restricted_optimum(instance: QuboInstance, predicate) -> int | None:
    """Exact optimum over assignments satisfying a predicate, None if empty."""
    best = None
    for x in all_assignments(instance.n):
        if not predicate(x):
            continue
        val = evaluate(instance, x)
        if best is None or val > best:
            best = val
    return best


def verdict_holds(conclusion, x: tuple[int, ...]) -> bool:
    """Whether an assignment is consistent with a verdict's conclusion."""
    if isinstance(conclusion, rules.Fix):
        return x[conclusion.var - 1] == conclusion.value
    if isinstance(conclusion, rules.PairFix):
        return (x[conclusion.i - 1] == conclusion.vi
                and x[conclusion.h - 1] == conclusion.vh)
    if isinstance(conclusion, rules.SubstituteComplement):
        return x[conclusion.i - 1] + x[conclusion.h - 1] == 1
    if isinstance(conclusion, rules.SubstituteEqual):
        return x[conclusion.i - 1] == x[conclusion.h - 1]
    xi, xh = x[conclusion.i - 1], x[conclusion.h - 1]
    kind = conclusion.kind
    if kind is rules.InequalityKind.AT_MOST_ONE:
        return xi + xh <= 1
    if kind is rules.InequalityKind.AT_LEAST_ONE:
        return xi + xh >= 1
    if kind is rules.InequalityKind.I_LE_H:
        return xi <= xh
    return xh <= xi


def check_verdict_against_optima(verdict, optima) -> bool:
    """Some-optimum consistency, all-optima when the verdict is unique."""
    if verdict.unique:
        return all(verdict_holds(verdict.conclusion, x) for x in optima)
    return any(verdict_holds(verdict.conclusion, x) for x in optima)


def catalog_firings(st) -> list:
    """Every rule verdict firing on the given state (pair preconditions honored)."""
    out = []
    free = st.free_variables()
    fixable = set()
    for v in free:
        f1 = rules.rule_fix_one(st, v)
        f0 = rules.rule_fix_zero(st, v)
        if f1:
            out.append(f1)
            fixable.add(v)
        if f0:
            out.append(f0)
            fixable.add(v)
    for i in free:
        for h in st.adj[i]:
            if h < i or i in fixable or h in fixable:
                continue
            out.extend(rules.derive_pair_inequalities(st, i, h))
            for fn in (rules.rule_pair_zero, rules.rule_pair_one,
                       rules.rule_complement_pair, rules.rule_equal_pair):
                v = fn(st, i, h)
                if v:
                    out.append(v)
            v = rules.rule_pair_one_zero(st, i, h)
            if v:
                out.append(v)
            v = rules.rule_pair_one_zero(st, h, i)
            if v:
                out.append(rules.RuleVerdict("R3_3", v.conclusion, v.unique))
    return out


# Frozen constructed instances (see test_engine for their roles).

# No rule in the catalog fires anywhere on this instance.
RULE_SILENT = build_from_triplets(3, [
    (1, 1, -2), (2, 2, -3), (3, 3, -1),
    (1, 2, 5), (1, 3, 4), (2, 3, -4),
])

# Reduced-form passes find nothing; the residual sweep substitutes via the
# complement rule on (1, 2) where d12 = -4 differs from row 1's most negative
# edge d13 = -5 (mixed-side condition combination).
RESIDUAL_COMPLEMENT = build_from_triplets(3, [
    (1, 1, 3), (2, 2, 1), (3, 3, -1),
    (1, 2, -4), (1, 3, -5), (2, 3, 4),
])

# Same situation for the equality rule.
RESIDUAL_EQUAL = build_from_triplets(4, [
    (1, 1, -3), (2, 2, 3), (3, 3, -3), (4, 4, -1),
    (1, 2, -5), (1, 3, 5), (1, 4, 3), (2, 3, 6), (2, 4, -4), (3, 4, 1),
])
