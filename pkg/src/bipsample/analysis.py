"""Structural detectors on the fixed set (matchings, exact-length cycles,
forests), the chorded-cycle construction they rest on, and the chain
recommendation cascade."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

from .core import FixedSet, MoveSet, NoUsableBound


@dataclass(frozen=True)
class FGraph:
    """The fixed cells viewed as a bipartite graph, polarity ignored."""

    n: int
    n_cols: int
    edges: frozenset[tuple[int, int]]

    @classmethod
    def from_fixed_set(cls, f: FixedSet) -> "FGraph":
        return cls(f.n, f.n_cols, f.cells)

    @classmethod
    def from_cells(cls, n: int, n_cols: int, cells: Iterable[tuple[int, int]]) -> "FGraph":
        return cls(n, n_cols, frozenset((i, j) for i, j in cells))

    def row_adj(self) -> dict[int, list[int]]:
        adj: dict[int, list[int]] = {}
        for i, j in sorted(self.edges):
            adj.setdefault(i, []).append(j)
        return adj

    def col_adj(self) -> dict[int, list[int]]:
        adj: dict[int, list[int]] = {}
        for i, j in sorted(self.edges):
            adj.setdefault(j, []).append(i)
        return adj


@dataclass(frozen=True)
class AnalysisReport:
    """What the fixed set looks like and which chain that licenses."""

    has_3_matching: bool
    has_8_cycle: bool
    is_forest: bool
    min_excluded_ell: int | None
    recommended: MoveSet


def max_matching_at_least(f: FGraph, k: int) -> bool:
    """True iff the fixed-cell graph has a matching of size >= k.

    Augmenting-path search with an early exit once k edges are matched.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    row_adj = f.row_adj()
    match_col: dict[int, int] = {}
    matched = 0

    def augment(i: int, seen: set[int]) -> bool:
        for j in row_adj.get(i, ()):
            if j in seen:
                continue
            seen.add(j)
            if j not in match_col or augment(match_col[j], seen):
                match_col[j] = i
                return True
        return False

    for i in sorted(row_adj):
        if augment(i, set()):
            matched += 1
            if matched >= k:
                return True
    return False


def has_cycle_of_length(f: FGraph, length: int) -> bool:
    """True iff the fixed-cell graph contains a simple cycle on exactly
    ``length`` vertices (``length`` even)."""
    if length % 2 or length < 4:
        raise ValueError("cycle length must be an even integer >= 4")
    half = length // 2
    row_adj = f.row_adj()
    col_adj = f.col_adj()

    # DFS over alternating row/col vertices, canonical start: the cycle's
    # smallest row vertex, so each cycle is generated once.
    def extend(start_row: int, vertex: int, on_row: bool, rows_used: set, cols_used: set, depth: int) -> bool:
        if depth == length:
            return start_row in (col_adj.get(vertex, ()) if not on_row else ())
        if on_row:
            for j in row_adj.get(vertex, ()):
                if j not in cols_used:
                    cols_used.add(j)
                    if extend(start_row, j, False, rows_used, cols_used, depth + 1):
                        return True
                    cols_used.discard(j)
        else:
            for i in col_adj.get(vertex, ()):
                if i > start_row and i not in rows_used:
                    rows_used.add(i)
                    if extend(start_row, i, True, rows_used, cols_used, depth + 1):
                        return True
                    rows_used.discard(i)
        return False

    if half > f.n or half > f.n_cols:
        return False
    for start in sorted(row_adj):
        if extend(start, start, True, {start}, set(), 1):
            return True
    return False


def is_forest(f: FGraph) -> bool:
    """True iff the fixed-cell graph is acyclic."""
    parent: dict[tuple[str, int], tuple[str, int]] = {}

    def find(x):
        while parent.get(x, x) != x:
            parent[x] = parent.get(parent[x], parent[x])
            x = parent[x]
        return x

    for i, j in sorted(f.edges):
        u, v = find(("r", i)), find(("c", j))
        if u == v:
            return False
        parent[u] = v
    return True


def find_coprime_odd_t(cycle_len: int) -> int:
    """Smallest odd t in [3, cycle_len - 3] coprime to ``cycle_len``.

    Existence is guaranteed for even cycle_len >= 8 (an Euler-phi count).
    """
    if cycle_len % 2 or cycle_len < 8:
        raise ValueError("cycle_len must be an even integer >= 8")
    for t in range(3, cycle_len - 2, 2):
        if math.gcd(t, cycle_len) == 1:
            return t
    raise AssertionError(f"no admissible multiplier for {cycle_len}")


def chord_cycle(cycle_len: int, target_len: int) -> list[int]:
    """A simple cycle of ``target_len`` vertices through chords of a base
    cycle of ``cycle_len`` vertices, every edge joining vertices at odd
    base-distance >= 3.

    For the full length the cycle visits v_{t*i mod cycle_len} with the
    smallest admissible odd multiplier t; shorter targets shrink the base
    two vertices at a time (the two dropped chords are replaced by the
    closing chord, which keeps all distances odd and >= 3 on the original
    base).
    """
    if cycle_len % 2 or target_len % 2:
        raise ValueError("cycle lengths must be even")
    if not 8 <= target_len <= cycle_len:
        raise ValueError("need 8 <= target_len <= cycle_len")
    if target_len == cycle_len:
        t = find_coprime_odd_t(cycle_len)
        return [(t * i) % cycle_len for i in range(cycle_len)]
    return chord_cycle(cycle_len - 2, target_len)


def chord_cycle_valid(cycle_len: int, cycle: list[int]) -> bool:
    """Check the defining predicate: simple, and every edge at odd
    base-distance >= 3 on the cycle of ``cycle_len`` vertices."""
    if len(set(cycle)) != len(cycle):
        return False
    for a, b in zip(cycle, cycle[1:] + cycle[:1]):
        d = abs(a - b)
        d = min(d, cycle_len - d)
        if d % 2 == 0 or d < 3:
            return False
    return True


def analyze(f: FixedSet, n: int, n_cols: int) -> AnalysisReport:
    """Run the recommendation cascade on the fixed set.

    Matching test first (plain trades suffice), then the 8-cycle test
    (trades plus circle trades), then the smallest even cycle length
    missing from F, capped at 2*min(n, n_cols).  If every candidate length
    occurs, no bounded-swap chain is available and NoUsableBound is raised.
    """
    fg = FGraph.from_cells(n, n_cols, f.cells)
    has_3_matching = max_matching_at_least(fg, 3)
    has_8_cycle = has_cycle_of_length(fg, 8)
    forest = is_forest(fg)

    min_excluded_ell: int | None = None
    for ell in range(4, min(n, n_cols) + 1):
        if not has_cycle_of_length(fg, 2 * ell):
            min_excluded_ell = ell
            break

    if not has_3_matching:
        recommended = MoveSet.trades()
    elif not has_8_cycle:
        recommended = MoveSet.trades_plus_circle()
    elif min_excluded_ell is not None:
        recommended = MoveSet.swaps_up_to(2 * min_excluded_ell - 2)
    else:
        raise NoUsableBound(
            "every even cycle length up to the grid bound occurs in the fixed set"
        )
    return AnalysisReport(
        has_3_matching=has_3_matching,
        has_8_cycle=has_8_cycle,
        is_forest=forest,
        min_excluded_ell=min_excluded_ell,
        recommended=recommended,
    )
