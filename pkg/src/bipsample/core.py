"""Shared domain types: degree sequences, fixed-cell masks, realizations,
symmetric differences and the move-set vocabulary."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

# Cell states of a FixedSet mask.
FREE = 0
FORCED_EDGE = 1
FORCED_NON_EDGE = 2


class InstanceMismatch(ValueError):
    """Two objects that must share an instance (or its dimensions) do not."""


class InvalidMove(ValueError):
    """A proposed move is malformed or does not alternate in the current state."""


class FixedCellViolation(InvalidMove):
    """A move touches a cell that is pinned by the fixed set."""


class Infeasible(ValueError):
    """No realization satisfies the instance."""


class PolarityConflict(Infeasible):
    """The fixed set forces a value that no realization of the sequence can take."""


class NotRealizable(ValueError):
    """The degree sequence itself has no realization."""


class NoUsableBound(ValueError):
    """Every candidate cycle length up to the search cap occurs in the fixed set."""


class TooLarge(ValueError):
    """Instance exceeds a brute-force guard."""


@dataclass(frozen=True)
class DegreeSequence:
    """Prescribed row and column sums of a 0/1 matrix.

    Unequal sums or out-of-range degrees are allowed at construction;
    ``gale_ryser_realizable`` reports such sequences as unrealizable.
    """

    row_degrees: tuple[int, ...]
    col_degrees: tuple[int, ...]

    def __init__(self, row_degrees: Iterable[int], col_degrees: Iterable[int]):
        rows = tuple(int(d) for d in row_degrees)
        cols = tuple(int(d) for d in col_degrees)
        if not rows or not cols:
            raise ValueError("degree sequences must be non-empty")
        if any(d < 0 for d in rows) or any(d < 0 for d in cols):
            raise ValueError("degrees must be nonnegative")
        object.__setattr__(self, "row_degrees", rows)
        object.__setattr__(self, "col_degrees", cols)

    @property
    def n(self) -> int:
        return len(self.row_degrees)

    @property
    def n_cols(self) -> int:
        return len(self.col_degrees)

    def opposite(self) -> "DegreeSequence":
        """Degree sequence of the bipartite complement."""
        nc, n = self.n_cols, self.n
        return DegreeSequence(
            tuple(nc - d for d in self.row_degrees),
            tuple(n - d for d in self.col_degrees),
        )


@dataclass(frozen=True)
class FixedSet:
    """Per-cell mask pinning edges (1), non-edges (0), or leaving cells free."""

    mask: tuple[tuple[int, ...], ...]

    def __init__(self, mask: Sequence[Sequence[int]]):
        grid = tuple(tuple(int(v) for v in row) for row in mask)
        if not grid or not grid[0]:
            raise ValueError("mask must be non-empty")
        width = len(grid[0])
        for row in grid:
            if len(row) != width:
                raise ValueError("mask rows must have equal length")
            for v in row:
                if v not in (FREE, FORCED_EDGE, FORCED_NON_EDGE):
                    raise ValueError(f"bad mask value {v!r}")
        object.__setattr__(self, "mask", grid)

    @classmethod
    def free(cls, n: int, n_cols: int) -> "FixedSet":
        return cls(((FREE,) * n_cols,) * n)

    @classmethod
    def from_cells(
        cls,
        n: int,
        n_cols: int,
        forced_edges: Iterable[tuple[int, int]] = (),
        forced_non_edges: Iterable[tuple[int, int]] = (),
    ) -> "FixedSet":
        grid = [[FREE] * n_cols for _ in range(n)]
        for i, j in forced_edges:
            grid[i][j] = FORCED_EDGE
        for i, j in forced_non_edges:
            if grid[i][j] == FORCED_EDGE:
                raise ValueError(f"cell ({i}, {j}) forced both ways")
            grid[i][j] = FORCED_NON_EDGE
        return cls(grid)

    @property
    def n(self) -> int:
        return len(self.mask)

    @property
    def n_cols(self) -> int:
        return len(self.mask[0])

    @property
    def forced_edges(self) -> frozenset[tuple[int, int]]:
        return frozenset(
            (i, j)
            for i, row in enumerate(self.mask)
            for j, v in enumerate(row)
            if v == FORCED_EDGE
        )

    @property
    def forced_non_edges(self) -> frozenset[tuple[int, int]]:
        return frozenset(
            (i, j)
            for i, row in enumerate(self.mask)
            for j, v in enumerate(row)
            if v == FORCED_NON_EDGE
        )

    @property
    def cells(self) -> frozenset[tuple[int, int]]:
        """All fixed cells, polarity ignored."""
        return frozenset(
            (i, j)
            for i, row in enumerate(self.mask)
            for j, v in enumerate(row)
            if v != FREE
        )

    def row_fixed(self) -> tuple[frozenset[int], ...]:
        """Per-row fixed column lists (both polarities)."""
        return tuple(
            frozenset(j for j, v in enumerate(row) if v != FREE) for row in self.mask
        )

    def is_free(self) -> bool:
        return all(v == FREE for row in self.mask for v in row)


@dataclass(frozen=True)
class Instance:
    """A degree sequence together with its fixed-cell mask."""

    degrees: DegreeSequence
    fixed: FixedSet

    def __post_init__(self):
        if (self.degrees.n, self.degrees.n_cols) != (self.fixed.n, self.fixed.n_cols):
            raise InstanceMismatch(
                f"mask is {self.fixed.n}x{self.fixed.n_cols}, "
                f"degrees are {self.degrees.n}x{self.degrees.n_cols}"
            )

    @property
    def n(self) -> int:
        return self.degrees.n

    @property
    def n_cols(self) -> int:
        return self.degrees.n_cols

    @classmethod
    def unconstrained(cls, row_degrees, col_degrees) -> "Instance":
        degs = DegreeSequence(row_degrees, col_degrees)
        return cls(degs, FixedSet.free(degs.n, degs.n_cols))


class Realization:
    """A 0/1 matrix realizing an instance; per-row column sets are cached.

    The matrix is authoritative. Construction validates degrees and mask
    conformity unless ``validate=False`` (reserved for callers that have
    already established validity, e.g. the chain runner's snapshots).
    """

    __slots__ = ("instance", "matrix", "rows", "_hash")

    def __init__(self, instance: Instance, matrix: Sequence[Sequence[int]], validate: bool = True):
        grid = tuple(tuple(int(v) for v in row) for row in matrix)
        self.instance = instance
        self.matrix = grid
        self.rows = tuple(
            frozenset(j for j, v in enumerate(row) if v) for row in grid
        )
        self._hash = None
        if validate:
            self._validate()

    def _validate(self):
        inst = self.instance
        n, nc = inst.n, inst.n_cols
        if len(self.matrix) != n or any(len(r) != nc for r in self.matrix):
            raise InstanceMismatch("matrix dimensions do not match the instance")
        for i, row in enumerate(self.matrix):
            for j, v in enumerate(row):
                if v not in (0, 1):
                    raise ValueError(f"matrix cell ({i}, {j}) is {v!r}, not 0/1")
        a, b = inst.degrees.row_degrees, inst.degrees.col_degrees
        for i, row in enumerate(self.matrix):
            if sum(row) != a[i]:
                raise ValueError(f"row {i} has sum {sum(row)}, expected {a[i]}")
        for j in range(nc):
            got = sum(self.matrix[i][j] for i in range(n))
            if got != b[j]:
                raise ValueError(f"column {j} has sum {got}, expected {b[j]}")
        for i, mrow in enumerate(inst.fixed.mask):
            for j, m in enumerate(mrow):
                if m == FORCED_EDGE and not self.matrix[i][j]:
                    raise ValueError(f"forced edge ({i}, {j}) is absent")
                if m == FORCED_NON_EDGE and self.matrix[i][j]:
                    raise ValueError(f"forced non-edge ({i}, {j}) is present")

    @classmethod
    def from_rows(cls, instance: Instance, rows: Sequence[Iterable[int]], validate: bool = True) -> "Realization":
        nc = instance.n_cols
        matrix = [[0] * nc for _ in range(instance.n)]
        for i, cols in enumerate(rows):
            for j in cols:
                matrix[i][j] = 1
        return cls(instance, matrix, validate=validate)

    def key(self) -> tuple[tuple[int, ...], ...]:
        """Canonical sort key: row-major bit string order."""
        return self.matrix

    def __eq__(self, other):
        return (
            isinstance(other, Realization)
            and self.matrix == other.matrix
            and self.instance == other.instance
        )

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.matrix)
        return self._hash

    def __repr__(self):
        body = "/".join("".join(str(v) for v in row) for row in self.matrix)
        return f"Realization({body})"


@dataclass(frozen=True)
class SymDiff:
    """Edge-wise difference of two realizations with its cycle decomposition.

    ``cells`` lists the differing cells as (row, col, owner) with owner "g"
    (present in the first realization only) or "h" (second only).  ``walks``
    are the closed alternating walks extracted from the difference graph;
    ``cycles`` are the vertex-disjoint alternating cycles the walks split
    into.  Cells of all cycles partition ``cells``.
    """

    cells: tuple[tuple[int, int, str], ...]
    walks: tuple[tuple[tuple[int, int], ...], ...]
    cycles: tuple[tuple[tuple[int, int], ...], ...]

    def is_empty(self) -> bool:
        return not self.cells

    def size(self) -> int:
        return len(self.cells)


@dataclass(frozen=True)
class MoveSet:
    """Which moves a chain or state-graph construction may use."""

    kind: str
    limit: int | None = None

    SWAPS4 = "swaps4"
    SWAPS46 = "swaps46"
    SWAPS_UP_TO = "swaps_up_to"
    TRADES = "trades"
    TRADES_PLUS_CIRCLE = "trades_plus_circle"

    def __post_init__(self):
        kinds = (
            self.SWAPS4,
            self.SWAPS46,
            self.SWAPS_UP_TO,
            self.TRADES,
            self.TRADES_PLUS_CIRCLE,
        )
        if self.kind not in kinds:
            raise ValueError(f"unknown move-set kind {self.kind!r}")
        if self.kind == self.SWAPS_UP_TO:
            if self.limit is None or self.limit % 2 or self.limit < 4:
                raise ValueError("swap length limit must be an even integer >= 4")
        elif self.limit is not None:
            raise ValueError(f"{self.kind} takes no length limit")

    @classmethod
    def swaps4(cls) -> "MoveSet":
        return cls(cls.SWAPS4)

    @classmethod
    def swaps46(cls) -> "MoveSet":
        return cls(cls.SWAPS46)

    @classmethod
    def swaps_up_to(cls, limit: int) -> "MoveSet":
        return cls(cls.SWAPS_UP_TO, limit)

    @classmethod
    def trades(cls) -> "MoveSet":
        return cls(cls.TRADES)

    @classmethod
    def trades_plus_circle(cls) -> "MoveSet":
        return cls(cls.TRADES_PLUS_CIRCLE)

    def swap_lengths(self) -> frozenset[int]:
        """Cycle-swap lengths this move set admits (empty for pure trade sets)."""
        if self.kind == self.SWAPS4:
            return frozenset({4})
        if self.kind == self.SWAPS46:
            return frozenset({4, 6})
        if self.kind == self.SWAPS_UP_TO:
            return frozenset(range(4, self.limit + 1, 2))
        return frozenset()

    def __str__(self):
        if self.kind == self.SWAPS_UP_TO:
            return f"swaps<={self.limit}"
        return self.kind


def symmetric_difference(g: Realization, h: Realization) -> SymDiff:
    """Decompose the cell-wise difference of two realizations of one instance.

    The difference graph is Eulerian; closed alternating walks are peeled
    off starting from the lexicographically smallest unused cell, always
    taking the smallest-indexed unused alternating continuation, and each
    walk is split at repeated vertices into vertex-disjoint cycles.
    """
    if g.instance != h.instance:
        raise InstanceMismatch("realizations belong to different instances")
    n, nc = g.instance.n, g.instance.n_cols

    cells = []
    for i in range(n):
        for j in range(nc):
            a, b = g.matrix[i][j], h.matrix[i][j]
            if a != b:
                cells.append((i, j, "g" if a else "h"))
    if not cells:
        return SymDiff((), (), ())

    owner = {(i, j): w for i, j, w in cells}
    by_row: dict[int, list[tuple[int, int]]] = {}
    by_col: dict[int, list[tuple[int, int]]] = {}
    for i, j, _ in cells:
        by_row.setdefault(i, []).append((i, j))
        by_col.setdefault(j, []).append((i, j))
    for lst in by_row.values():
        lst.sort()
    for lst in by_col.values():
        lst.sort()

    used: set[tuple[int, int]] = set()

    def next_cell(candidates, want_owner):
        for c in candidates:
            if c not in used and owner[c] == want_owner:
                return c
        return None

    walks = []
    for start in sorted(owner):
        if start in used:
            continue
        walk = [start]
        used.add(start)
        along_col = True  # the first continuation shares the start cell's column
        while True:
            cur = walk[-1]
            want = "h" if owner[cur] == "g" else "g"
            cand = by_col[cur[1]] if along_col else by_row[cur[0]]
            nxt = next_cell(cand, want)
            if nxt is None:
                break
            walk.append(nxt)
            used.add(nxt)
            along_col = not along_col
        # Eulerian alternation guarantees the walk closed back on the start
        # cell's row with opposite ownership.
        assert len(walk) % 2 == 0 and len(walk) >= 4
        assert walk[-1][0] == start[0] and owner[walk[-1]] != owner[start]
        walks.append(tuple(walk))

    cycles = []
    for walk in walks:
        # Vertex after cell t: shared with cell t+1 (column for even t,
        # row for odd t); a repeat on the open stack closes a cycle.
        stack: list[tuple[int, int]] = []
        on_path: dict[tuple[str, int], int] = {("r", walk[0][0]): 0}
        for t, cell in enumerate(walk):
            stack.append(cell)
            v = ("c", cell[1]) if t % 2 == 0 else ("r", cell[0])
            if v in on_path:
                depth = on_path[v]
                cyc = stack[depth:]
                del stack[depth:]
                on_path = {k: d for k, d in on_path.items() if d <= depth}
                cycles.append(_normalize_cycle(cyc))
            else:
                on_path[v] = len(stack)
        assert not stack, "walk did not decompose cleanly into cycles"

    return SymDiff(tuple(sorted(cells)), tuple(walks), tuple(cycles))


def _normalize_cycle(cyc):
    k = cyc.index(min(cyc))
    return tuple(cyc[k:] + cyc[:k])


def apply_cycle_swap(g: Realization, cycle: Sequence[tuple[int, int]]) -> Realization:
    """Toggle the cells of a vertex-disjoint alternating cycle of ``g``.

    The cycle is given as its cell sequence in cyclic order; consecutive
    cells must share alternately a row and a column.  Applying the same
    cycle twice restores ``g``.
    """
    cyc = [tuple(c) for c in cycle]
    L = len(cyc)
    if L < 4 or L % 2:
        raise InvalidMove(f"cycle length {L} is not an even number >= 4")
    if len(set(cyc)) != L:
        raise InvalidMove("cycle repeats a cell")

    first_shares_row = cyc[0][0] == cyc[1][0]
    if not first_shares_row and cyc[0][1] != cyc[1][1]:
        raise InvalidMove("consecutive cycle cells share no coordinate")
    for t in range(L):
        a, b = cyc[t], cyc[(t + 1) % L]
        share_row = (t % 2 == 0) == first_shares_row
        if share_row and (a[0] != b[0] or a[1] == b[1]):
            raise InvalidMove(f"cells {a} and {b} must share a row")
        if not share_row and (a[1] != b[1] or a[0] == b[0]):
            raise InvalidMove(f"cells {a} and {b} must share a column")

    rows = [c[0] for c in cyc]
    cols = [c[1] for c in cyc]
    if len(set(rows)) != L // 2 or len(set(cols)) != L // 2:
        raise InvalidMove("cycle is not vertex-disjoint")

    inst = g.instance
    n, nc = inst.n, inst.n_cols
    vals = []
    for i, j in cyc:
        if not (0 <= i < n and 0 <= j < nc):
            raise InvalidMove(f"cell ({i}, {j}) is outside the grid")
        vals.append(g.matrix[i][j])
    if any(vals[t] == vals[(t + 1) % L] for t in range(L)):
        raise InvalidMove("cycle does not alternate edges and non-edges")
    for i, j in cyc:
        if inst.fixed.mask[i][j] != FREE:
            raise FixedCellViolation(f"cycle touches fixed cell ({i}, {j})")

    matrix = [list(row) for row in g.matrix]
    for i, j in cyc:
        matrix[i][j] ^= 1
    return Realization(inst, matrix)
