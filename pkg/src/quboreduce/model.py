"""Sparse integer QUBO instances: construction, evaluation, Ising conversion, file I/O.

An instance is a maximization problem over binary variables ``x_1 .. x_n``:

    maximize  offset + sum_i c_i x_i + sum_{i<j} d_ij x_i x_j

Linear coefficients ``c_i`` come from the diagonal of the usual Q-matrix view
(``x_i^2 = x_i``), and ``d_ij`` is the combined symmetric quadratic weight of
the unordered pair ``{i, j}``.  Coefficients are exact Python integers and
entries that are exactly zero are never stored, so sign-based neighbourhood
sums quantify only over real edges.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence


class QuboFormatError(ValueError):
    """Raised when an instance file is malformed."""


def canonical_pair(i: int, j: int) -> tuple[int, int]:
    """Order an index pair as (low, high)."""
    return (i, j) if i < j else (j, i)


@dataclass(frozen=True)
class QuboInstance:
    """Immutable sparse maximization QUBO.

    Attributes
    ----------
    n : int
        Number of variables; valid indices are 1..n.
    linear : dict[int, int]
        Nonzero linear coefficients c_i.
    quadratic : dict[tuple[int, int], int]
        Nonzero combined quadratic coefficients d_ij keyed by (i, j) with i < j.
    offset : int
        Constant term, included in every objective value.
    """

    n: int
    linear: dict[int, int]
    quadratic: dict[tuple[int, int], int]
    offset: int = 0

    def __post_init__(self):
        if self.n < 0:
            raise ValueError(f"variable count must be nonnegative, got {self.n}")
        for i, v in self.linear.items():
            if not 1 <= i <= self.n:
                raise ValueError(f"linear index {i} outside 1..{self.n}")
            if v == 0:
                raise ValueError(f"zero linear coefficient stored at {i}")
        for (i, j), v in self.quadratic.items():
            if not (1 <= i <= self.n and 1 <= j <= self.n):
                raise ValueError(f"pair ({i}, {j}) outside 1..{self.n}")
            if i >= j:
                raise ValueError(f"pair ({i}, {j}) is not in canonical i < j order")
            if v == 0:
                raise ValueError(f"zero quadratic coefficient stored at ({i}, {j})")

    @property
    def num_edges(self) -> int:
        return len(self.quadratic)

    def evaluate(self, x: Mapping[int, int] | Sequence[int]) -> int:
        """Objective value of a total assignment (see module-level ``evaluate``)."""
        return evaluate(self, x)


def _as_values(instance: QuboInstance, x: Mapping[int, int] | Sequence[int]) -> list[int]:
    """Normalize an assignment to a 1-indexed value list, rejecting partial ones."""
    n = instance.n
    vals = [0] * (n + 1)
    if isinstance(x, Mapping):
        missing = [i for i in range(1, n + 1) if i not in x]
        if missing:
            raise ValueError(f"partial assignment: variable {missing[0]} missing")
        items = list(x.items())
    else:
        if len(x) != n:
            raise ValueError(f"assignment has {len(x)} values, expected {n}")
        items = list(zip(range(1, n + 1), x))
    for i, v in items:
        if not 1 <= i <= n:
            raise ValueError(f"assignment index {i} outside 1..{n}")
        if v not in (0, 1):
            raise ValueError(f"non-binary value {v!r} for variable {i}")
        vals[i] = int(v)
    return vals


def build_from_triplets(n: int, entries: Iterable[tuple[int, int, int]]) -> QuboInstance:
    """Build an instance from (i, j, value) matrix entries.

    Diagonal entries (i, i) accumulate into c_i; off-diagonal entries (i, j)
    and (j, i) accumulate into the single combined coefficient d_ij.
    Duplicates are allowed and entries that cancel to zero are dropped.
    """
    linear: dict[int, int] = {}
    quadratic: dict[tuple[int, int], int] = {}
    for entry in entries:
        i, j, v = entry
        if not (1 <= i <= n and 1 <= j <= n):
            raise ValueError(f"entry {entry!r}: index outside 1..{n}")
        if i == j:
            linear[i] = linear.get(i, 0) + v
        else:
            key = canonical_pair(i, j)
            quadratic[key] = quadratic.get(key, 0) + v
    return QuboInstance(
        n,
        {i: v for i, v in linear.items() if v != 0},
        {k: v for k, v in quadratic.items() if v != 0},
        0,
    )


def evaluate(instance: QuboInstance, x: Mapping[int, int] | Sequence[int]) -> int:
    """Exact objective value offset + sum c_i x_i + sum_{i<j} d_ij x_i x_j."""
    vals = _as_values(instance, x)
    total = instance.offset
    for i, c in instance.linear.items():
        if vals[i]:
            total += c
    for (i, j), d in instance.quadratic.items():
        if vals[i] and vals[j]:
            total += d
    return total


def ising_to_qubo(
    n: int,
    h: Mapping[int, int] | Sequence[int],
    J: Mapping[tuple[int, int], int] | None = None,
) -> QuboInstance:
    """Convert maximize sum h_i s_i + sum_{i<j} J_ij s_i s_j, s in {-1,+1}^n.

    Substitutes s_i = 2 x_i - 1.  The returned instance evaluates at x to the
    Ising objective at the corresponding spins, constants folded into offset.
    """
    if isinstance(h, Mapping):
        h_items = list(h.items())
    else:
        if len(h) != n:
            raise ValueError(f"h has {len(h)} entries, expected {n}")
        h_items = list(zip(range(1, n + 1), h))
    linear: dict[int, int] = {}
    quadratic: dict[tuple[int, int], int] = {}
    offset = 0
    for i, hi in h_items:
        if not 1 <= i <= n:
            raise ValueError(f"field index {i} outside 1..{n}")
        if hi == 0:
            continue
        # h_i s_i = 2 h_i x_i - h_i
        linear[i] = linear.get(i, 0) + 2 * hi
        offset -= hi
    for (i, j), jij in (J or {}).items():
        if i == j:
            raise ValueError(f"nonzero coupling on diagonal ({i}, {j})")
        if not (1 <= i <= n and 1 <= j <= n):
            raise ValueError(f"coupling pair ({i}, {j}) outside 1..{n}")
        if jij == 0:
            continue
        # J_ij s_i s_j = 4 J x_i x_j - 2 J x_i - 2 J x_j + J
        key = canonical_pair(i, j)
        quadratic[key] = quadratic.get(key, 0) + 4 * jij
        linear[i] = linear.get(i, 0) - 2 * jij
        linear[j] = linear.get(j, 0) - 2 * jij
        offset += jij
    return QuboInstance(
        n,
        {i: v for i, v in linear.items() if v != 0},
        {k: v for k, v in quadratic.items() if v != 0},
        offset,
    )


@dataclass(frozen=True)
class Solution:
    """A total assignment together with its exact objective value."""

    values: dict[int, int]
    objective: int

    @classmethod
    def of(cls, instance: QuboInstance, values: Mapping[int, int] | Sequence[int]) -> "Solution":
        vals = _as_values(instance, values)
        as_map = {i: vals[i] for i in range(1, instance.n + 1)}
        return cls(as_map, evaluate(instance, as_map))


# --- text format -------------------------------------------------------------
#
#   # comment
#   p qubo <n>
#   o <offset>            (optional; writers always emit it)
#   l <i> <value>
#   q <i> <j> <value>     (any index order; repeated pairs accumulate)


def read_instance(path) -> QuboInstance:
    """Parse the line-oriented text format; errors carry the offending line number."""
    n = None
    offset = 0
    linear: dict[int, int] = {}
    quadratic: dict[tuple[int, int], int] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            tok = line.split()
            try:
                if tok[0] == "p":
                    if n is not None:
                        raise QuboFormatError(f"line {lineno}: duplicate problem line")
                    if len(tok) != 3 or tok[1] != "qubo":
                        raise QuboFormatError(f"line {lineno}: expected 'p qubo <n>'")
                    n = int(tok[2])
                    if n < 0:
                        raise QuboFormatError(f"line {lineno}: negative variable count")
                    continue
                if n is None:
                    raise QuboFormatError(f"line {lineno}: data before 'p qubo <n>' line")
                if tok[0] == "o":
                    if len(tok) != 2:
                        raise QuboFormatError(f"line {lineno}: expected 'o <offset>'")
                    offset += int(tok[1])
                elif tok[0] == "l":
                    if len(tok) != 3:
                        raise QuboFormatError(f"line {lineno}: expected 'l <i> <value>'")
                    i, v = int(tok[1]), int(tok[2])
                    if not 1 <= i <= n:
                        raise QuboFormatError(f"line {lineno}: index {i} outside 1..{n}")
                    linear[i] = linear.get(i, 0) + v
                elif tok[0] == "q":
                    if len(tok) != 4:
                        raise QuboFormatError(f"line {lineno}: expected 'q <i> <j> <value>'")
                    i, j, v = int(tok[1]), int(tok[2]), int(tok[3])
                    if not (1 <= i <= n and 1 <= j <= n):
                        raise QuboFormatError(f"line {lineno}: pair ({i}, {j}) outside 1..{n}")
                    if i == j:
                        raise QuboFormatError(f"line {lineno}: quadratic entry on diagonal")
                    key = canonical_pair(i, j)
                    quadratic[key] = quadratic.get(key, 0) + v
                else:
                    raise QuboFormatError(f"line {lineno}: unknown directive {tok[0]!r}")
            except ValueError as exc:
                if isinstance(exc, QuboFormatError):
                    raise
                raise QuboFormatError(f"line {lineno}: {exc}") from exc
    if n is None:
        raise QuboFormatError("missing 'p qubo <n>' line")
    return QuboInstance(
        n,
        {i: v for i, v in linear.items() if v != 0},
        {k: v for k, v in quadratic.items() if v != 0},
        offset,
    )


def write_instance(instance: QuboInstance, path, header: Sequence[str] = ()) -> None:
    """Write the canonical text form: offset first, then l lines, then q lines."""
    with open(path, "w", encoding="utf-8") as fh:
        for line in header:
            fh.write(f"# {line}\n")
        fh.write(f"p qubo {instance.n}\n")
        fh.write(f"o {instance.offset}\n")
        for i in sorted(instance.linear):
            fh.write(f"l {i} {instance.linear[i]}\n")
        for i, j in sorted(instance.quadratic):
            fh.write(f"q {i} {j} {instance.quadratic[(i, j)]}\n")
