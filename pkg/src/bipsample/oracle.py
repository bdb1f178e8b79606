"""Brute-force ground truth: exhaustive enumeration of small instances,
state graphs under each move set, exact transition-probability accounting,
and the verification driver that sweeps an instance pool and machine-checks
every connectivity, distance, reversibility and static-set claim that
applies to it."""

from __future__ import annotations

import itertools
import random
import time
from dataclasses import dataclass, field
from math import comb

from scipy import stats

from . import chains
from .analysis import FGraph, has_cycle_of_length, is_forest, max_matching_at_least
from .core import (
    FORCED_EDGE,
    FORCED_NON_EDGE,
    DegreeSequence,
    FixedSet,
    Instance,
    MoveSet,
    Realization,
    TooLarge,
)
from .realizability import static_set, static_set_pruned

ENUMERATION_CELL_LIMIT = 36


# ---------------------------------------------------------------------------
# Bit-level enumeration and pair classification.
#
# A state is an int whose bit for cell (i, j) sits at position
# ncells - 1 - (i*nc + j), so integer order equals row-major bit-string
# order and doubles as the canonical state order.


def _bit(i: int, j: int, n: int, nc: int) -> int:
    return 1 << (n * nc - 1 - (i * nc + j))


def _bits_to_matrix(bits: int, n: int, nc: int) -> list[list[int]]:
    return [
        [(bits >> (n * nc - 1 - (i * nc + j))) & 1 for j in range(nc)]
        for i in range(n)
    ]


def _matrix_to_bits(matrix, n: int, nc: int) -> int:
    bits = 0
    for i in range(n):
        for j in range(nc):
            if matrix[i][j]:
                bits |= _bit(i, j, n, nc)
    return bits


def _enumerate_bits(
    a: tuple[int, ...],
    b: tuple[int, ...],
    forced: tuple[frozenset[int], ...] | None = None,
    banned: tuple[frozenset[int], ...] | None = None,
    cap: int | None = None,
) -> list[int] | None:
    """All realizations as bit ints, sorted; None if ``cap`` is exceeded."""
    n, nc = len(a), len(b)
    if sum(a) != sum(b):
        return []
    forced = forced or tuple(frozenset() for _ in range(n))
    banned = banned or tuple(frozenset() for _ in range(n))
    colrem = list(b)
    out: list[int] = []

    def rec(i: int, acc: int) -> bool:
        if i == n:
            if all(r == 0 for r in colrem):
                out.append(acc)
                if cap is not None and len(out) > cap:
                    return False
            return True
        need = a[i] - len(forced[i])
        if need < 0:
            return True
        for j in forced[i]:
            if colrem[j] <= 0:
                return True
        for j in forced[i]:
            colrem[j] -= 1
        bits = acc
        for j in forced[i]:
            bits |= _bit(i, j, n, nc)
        free_cols = [
            j for j in range(nc)
            if colrem[j] > 0 and j not in forced[i] and j not in banned[i]
        ]
        ok = True
        if need <= len(free_cols):
            rows_left = n - i - 1
            for sub in itertools.combinations(free_cols, need):
                for j in sub:
                    colrem[j] -= 1
                if all(colrem[j] <= rows_left for j in range(nc)):
                    sub_bits = bits
                    for j in sub:
                        sub_bits |= _bit(i, j, n, nc)
                    ok = rec(i + 1, sub_bits)
                for j in sub:
                    colrem[j] += 1
                if not ok:
                    break
        for j in forced[i]:
            colrem[j] += 1
        return ok

    if not rec(0, 0):
        return None
    out.sort()
    return out


@dataclass(frozen=True)
class _PairInfo:
    """How two states differ: the changed rows, whether the difference is a
    single vertex-disjoint alternating cycle (and its length), whether it is
    a three-row rotation, and the total cell difference."""

    changed_rows: tuple[int, ...]
    cycle_len: int  # 0 unless the difference is one vertex-disjoint cycle
    is_circle: bool
    diff_size: int


def _classify_bits(x: int, y: int, n: int, nc: int) -> _PairInfo:
    d = x ^ y
    cells = []
    t = d
    total = n * nc
    while t:
        lsb = t & -t
        pos = lsb.bit_length() - 1
        idx = total - 1 - pos
        cells.append((idx // nc, idx % nc))
        t ^= lsb
    row_cells: dict[int, list[int]] = {}
    col_cells: dict[int, list[int]] = {}
    for i, j in cells:
        row_cells.setdefault(i, []).append(j)
        col_cells.setdefault(j, []).append(i)
    changed_rows = tuple(sorted(row_cells))
    diff_size = len(cells)

    cycle_len = 0
    if cells and all(len(v) == 2 for v in row_cells.values()) and all(
        len(v) == 2 for v in col_cells.values()
    ):
        # Union of vertex-disjoint cycles; single iff one traversal covers it.
        start = cells[0]
        seen = 1
        i, j = start
        row_side = True
        while True:
            if row_side:
                j2 = row_cells[i][1] if row_cells[i][0] == j else row_cells[i][0]
                j = j2
            else:
                i2 = col_cells[j][1] if col_cells[j][0] == i else col_cells[j][0]
                i = i2
            row_side = not row_side
            if (i, j) == start:
                break
            seen += 1
        if seen == diff_size:
            cycle_len = diff_size

    is_circle = False
    if len(changed_rows) == 3:
        gain = []
        loss = []
        for r in changed_rows:
            g_cols = frozenset(j for j in row_cells[r] if y & _bit(r, j, n, nc))
            l_cols = frozenset(j for j in row_cells[r] if x & _bit(r, j, n, nc))
            gain.append(g_cols)
            loss.append(l_cols)
        r0, r1, r2 = 0, 1, 2
        is_circle = (
            gain[r0] == loss[r1] and gain[r1] == loss[r2] and gain[r2] == loss[r0]
        ) or (
            gain[r0] == loss[r2] and gain[r2] == loss[r1] and gain[r1] == loss[r0]
        )
    return _PairInfo(changed_rows, cycle_len, is_circle, diff_size)


def swap_lengths_for(move_set: MoveSet) -> frozenset[int]:
    """Cycle-swap lengths a move set admits (seam for fault-injection tests)."""
    return move_set.swap_lengths()


# ---------------------------------------------------------------------------
# Public oracle operations.


@dataclass(frozen=True)
class StateGraph:
    """All realizations of an instance with one-move adjacency.

    ``edges[s]`` lists (neighbor index, move label); every edge appears in
    both directions.
    """

    states: tuple[Realization, ...]
    edges: tuple[tuple[tuple[int, str], ...], ...]
    move_set: MoveSet

    def n_states(self) -> int:
        return len(self.states)


def enumerate_realizations(inst: Instance) -> list[Realization]:
    """Every realization of the instance, in canonical (row-major bit
    string) order, by row-wise backtracking."""
    n, nc = inst.n, inst.n_cols
    if n * nc > ENUMERATION_CELL_LIMIT:
        raise TooLarge(f"{n}x{nc} grid exceeds the enumeration guard")
    forced = tuple(
        frozenset(j for j in range(nc) if inst.fixed.mask[i][j] == FORCED_EDGE)
        for i in range(n)
    )
    banned = tuple(
        frozenset(j for j in range(nc) if inst.fixed.mask[i][j] == FORCED_NON_EDGE)
        for i in range(n)
    )
    bits = _enumerate_bits(
        inst.degrees.row_degrees, inst.degrees.col_degrees, forced, banned
    )
    return [
        Realization(inst, _bits_to_matrix(x, n, nc), validate=False) for x in bits
    ]


def build_state_graph(states: list[Realization], move_set: MoveSet) -> StateGraph:
    """Connect states that are one move apart under ``move_set``."""
    if not states:
        return StateGraph((), (), move_set)
    inst = states[0].instance
    n, nc = inst.n, inst.n_cols
    bits = [_matrix_to_bits(g.matrix, n, nc) for g in states]
    lengths = swap_lengths_for(move_set)
    trade_kinds = (MoveSet.TRADES, MoveSet.TRADES_PLUS_CIRCLE)
    adj: list[list[tuple[int, str]]] = [[] for _ in states]
    for s in range(len(states)):
        for t in range(s + 1, len(states)):
            info = _classify_bits(bits[s], bits[t], n, nc)
            label = None
            if move_set.kind in trade_kinds:
                if len(info.changed_rows) == 2:
                    label = "trade"
                elif move_set.kind == MoveSet.TRADES_PLUS_CIRCLE and info.is_circle:
                    label = "circle-trade"
            elif info.cycle_len in lengths:
                label = f"{info.cycle_len}-swap"
            if label:
                adj[s].append((t, label))
                adj[t].append((s, label))
    return StateGraph(tuple(states), tuple(tuple(x) for x in adj), move_set)


def check_connectivity(sg: StateGraph) -> tuple[bool, list[list[int]]]:
    """Component decomposition of the state graph."""
    n = len(sg.states)
    seen = [False] * n
    components = []
    for s in range(n):
        if seen[s]:
            continue
        comp = [s]
        seen[s] = True
        queue = [s]
        for u in queue:
            for v, _ in sg.edges[u]:
                if not seen[v]:
                    seen[v] = True
                    comp.append(v)
                    queue.append(v)
        components.append(sorted(comp))
    return len(components) <= 1, components


def check_distance_bound(sg: StateGraph) -> bool:
    """True iff every state pair is within half its cell difference minus
    one moves of each other."""
    n = len(sg.states)
    if n <= 1:
        return True
    inst = sg.states[0].instance
    bits = [_matrix_to_bits(g.matrix, inst.n, inst.n_cols) for g in sg.states]
    for s in range(n):
        dist = [-1] * n
        dist[s] = 0
        queue = [s]
        for u in queue:
            for v, _ in sg.edges[u]:
                if dist[v] < 0:
                    dist[v] = dist[u] + 1
                    queue.append(v)
        for t in range(n):
            if t == s:
                continue
            diff = (bits[s] ^ bits[t]).bit_count()
            if dist[t] < 0 or dist[t] > diff // 2 - 1:
                return False
    return True


def check_static_set(inst: Instance, realizations: list[Realization]) -> bool:
    """Compare the Gale-Ryser static set against enumerated ground truth.

    Static cells must be constant across all realizations (soundness); on a
    free mask the static set must contain exactly the constant cells
    (completeness).
    """
    if not realizations:
        raise ValueError("need at least one realization")
    n, nc = inst.n, inst.n_cols
    ss = static_set(inst.degrees)
    always_one = set()
    always_zero = set()
    for i in range(n):
        for j in range(nc):
            vals = {g.matrix[i][j] for g in realizations}
            if vals == {1}:
                always_one.add((i, j))
            elif vals == {0}:
                always_zero.add((i, j))
    sound = ss.forced_edges <= always_one and ss.forced_non_edges <= always_zero
    if not inst.fixed.is_free():
        return sound
    return (
        sound
        and ss.forced_edges == always_one
        and ss.forced_non_edges == always_zero
    )


def uniformity_report(inst: Instance, cfg: chains.ChainConfig) -> tuple[float, float]:
    """Run the chain and compare the visit distribution with uniform:
    (total-variation distance, chi-square p-value)."""
    states = enumerate_realizations(inst)
    index = {g.matrix: s for s, g in enumerate(states)}
    counts = [0] * len(states)
    for g in chains.run(inst, cfg):
        counts[index[g.matrix]] += 1
    n_samples = sum(counts)
    k = len(states)
    if k == 1:
        return 0.0, 1.0
    tv = 0.5 * sum(abs(c / n_samples - 1 / k) for c in counts)
    _, p = stats.chisquare(counts)
    return tv, float(p)


def components_isomorphic(sg: StateGraph) -> bool:
    """True iff all components of the state graph are pairwise isomorphic
    (adjacency and move labels preserved), by brute-force mapping with
    degree-profile pruning."""
    _, components = check_connectivity(sg)
    if len(components) > 16:
        raise TooLarge("too many components for isomorphism testing")
    if len(components) <= 1:
        return True
    if max(len(c) for c in components) > 12:
        raise TooLarge("components too large for brute-force isomorphism")

    def comp_graph(comp):
        pos = {s: idx for idx, s in enumerate(comp)}
        adj = [
            sorted((pos[v], lab) for v, lab in sg.edges[s] if v in pos)
            for s in comp
        ]
        return adj

    def profile(adj, v):
        return tuple(sorted(lab for _, lab in adj[v]))

    def isomorphic(adj_a, adj_b):
        if len(adj_a) != len(adj_b):
            return False
        prof_a = [profile(adj_a, v) for v in range(len(adj_a))]
        prof_b = [profile(adj_b, v) for v in range(len(adj_b))]
        if sorted(prof_a) != sorted(prof_b):
            return False
        size = len(adj_a)
        mapping = [-1] * size
        used = [False] * size

        def place(v):
            if v == size:
                return True
            for w in range(size):
                if used[w] or prof_b[w] != prof_a[v]:
                    continue
                ok = True
                for u in range(v):
                    a_labels = sorted(lab for x, lab in adj_a[v] if x == u)
                    b_labels = sorted(lab for x, lab in adj_b[w] if x == mapping[u])
                    if a_labels != b_labels:
                        ok = False
                        break
                if not ok:
                    continue
                mapping[v] = w
                used[w] = True
                if place(v + 1):
                    return True
                mapping[v] = -1
                used[w] = False
            return False

        return place(0)

    graphs = [comp_graph(c) for c in components]
    return all(isomorphic(graphs[0], g) for g in graphs[1:])


# ---------------------------------------------------------------------------
# Verification driver: sweep an instance pool and check every claim that
# applies to each instance's hypothesis class.


@dataclass
class VerificationResult:
    """Outcome of a verification sweep."""

    passed: bool = True
    checks_run: int = 0
    counts: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)
    witness: Instance | None = None
    witness_check: str | None = None
    info_lines: list = field(default_factory=list)
    elapsed: float = 0.0


class _SeqCtx:
    """Per-state-pool data: bit states, canonical index, cached row sets and
    pair classifications."""

    def __init__(self, n, nc, a, b, bits):
        self.n = n
        self.nc = nc
        self.a = tuple(a)
        self.b = tuple(b)
        self.bits = bits
        self.index = {x: s for s, x in enumerate(bits)}
        self._rows: dict[int, tuple[frozenset, ...]] = {}
        self._pairs: dict[tuple[int, int], _PairInfo] = {}

    def rows_of(self, s):
        got = self._rows.get(s)
        if got is None:
            m = _bits_to_matrix(self.bits[s], self.n, self.nc)
            got = tuple(
                frozenset(j for j in range(self.nc) if m[i][j]) for i in range(self.n)
            )
            self._rows[s] = got
        return got

    def pair(self, s, t):
        if s > t:
            s, t = t, s
        got = self._pairs.get((s, t))
        if got is None:
            got = _classify_bits(self.bits[s], self.bits[t], self.n, self.nc)
            self._pairs[(s, t)] = got
        return got

    def replace_rows_bits(self, s, new_rows: dict):
        """State bits after replacing the given rows' column sets."""
        bits = self.bits[s]
        total = self.n * self.nc
        for i, cols in new_rows.items():
            shift = total - (i + 1) * self.nc
            bits &= ~(((1 << self.nc) - 1) << shift)
            row_bits = 0
            for j in cols:
                row_bits |= 1 << (self.nc - 1 - j)
            bits |= row_bits << shift
        return bits


def _support_props(n, nc, cells, cache):
    key = (n, nc, cells)
    got = cache.get(key)
    if got is None:
        fg = FGraph.from_cells(n, nc, cells)
        no3m = not max_matching_at_least(fg, 3)
        no8 = not has_cycle_of_length(fg, 8)
        forest = is_forest(fg)
        excluded = tuple(
            ell
            for ell in range(4, min(n, nc) + 1)
            if not has_cycle_of_length(fg, 2 * ell)
        )
        got = (no3m, no8, forest, excluded)
        cache[key] = got
    return got


def _components_of(states_idx, adjacent) -> list[tuple[int, ...]]:
    remaining = set(states_idx)
    comps = []
    while remaining:
        s = min(remaining)
        comp = {s}
        queue = [s]
        remaining.discard(s)
        for u in queue:
            for v in list(remaining):
                if adjacent(u, v):
                    remaining.discard(v)
                    comp.add(v)
                    queue.append(v)
        comps.append(tuple(sorted(comp)))
    return comps


def _distance_bound_holds(ctx, states_idx):
    """BFS under 4-swap adjacency; every pair within diff/2 - 1 moves."""
    order = list(states_idx)
    pos = {s: q for q, s in enumerate(order)}
    adj = [[] for _ in order]
    for qa in range(len(order)):
        for qb in range(qa + 1, len(order)):
            if ctx.pair(order[qa], order[qb]).cycle_len == 4:
                adj[qa].append(qb)
                adj[qb].append(qa)
    for qa in range(len(order)):
        dist = [-1] * len(order)
        dist[qa] = 0
        queue = [qa]
        for u in queue:
            for v in adj[u]:
                if dist[v] < 0:
                    dist[v] = dist[u] + 1
                    queue.append(v)
        for qb in range(len(order)):
            if qb == qa:
                continue
            diff = ctx.pair(order[qa], order[qb]).diff_size
            if dist[qb] < 0 or dist[qb] > diff // 2 - 1:
                return False
    return True


def _trade_reversibility_ok(ctx, states_idx, fixed_rows):
    """Exact one-step trade probabilities must be symmetric; each ordered
    state pair is reachable through exactly one (pair, subset) draw, so the
    subset-count denominators must match."""
    dens: dict[tuple[int, int], int] = {}
    n = ctx.n
    for s in states_idx:
        rows = ctx.rows_of(s)
        for i in range(n):
            for j in range(i + 1, n):
                blocked = fixed_rows[i] | fixed_rows[j]
                a_ij = rows[i] - rows[j] - blocked
                a_ji = rows[j] - rows[i] - blocked
                pool = sorted(a_ij | a_ji)
                k = len(a_ij)
                den = comb(len(pool), k)
                if den == 1:
                    continue
                for combo in itertools.combinations(pool, k):
                    b_ij = frozenset(combo)
                    if b_ij == a_ij:
                        continue
                    new_i = (rows[i] - a_ij) | b_ij
                    new_j = (rows[j] - a_ji) | (frozenset(pool) - b_ij)
                    t = ctx.index.get(ctx.replace_rows_bits(s, {i: new_i, j: new_j}))
                    assert t is not None, "trade produced an unknown state"
                    assert (s, t) not in dens, "duplicate trade route"
                    dens[(s, t)] = den
    for (s, t), den in dens.items():
        if dens.get((t, s)) != den:
            return False
    return True


def _circle_balance_ok(ctx, states_idx, fixed_rows, mh_on):
    """Exact circle-trade accounting: with the Metropolis correction the
    effective per-route probability is min of the two directions' subset
    probabilities, whose multiset must match between (A, B) and (B, A)."""
    from collections import Counter

    acc: dict[tuple[int, int], Counter] = {}
    n = ctx.n
    for s in states_idx:
        rows = ctx.rows_of(s)
        for i, j, k in itertools.permutations(range(n), 3):
            d_ji = rows[j] - rows[i] - fixed_rows[i] - fixed_rows[j]
            d_kj = rows[k] - rows[j] - fixed_rows[j] - fixed_rows[k]
            d_ik = rows[i] - rows[k] - fixed_rows[k] - fixed_rows[i]
            sizes = (len(d_ji), len(d_kj), len(d_ik))
            m = min(sizes)
            if m == 0:
                continue
            sj, sk, si = sorted(d_ji), sorted(d_kj), sorted(d_ik)
            for x in range(1, m + 1):
                den_f = chains.circle_denominator(sizes, x)
                for sub_j in itertools.combinations(sj, x):
                    for sub_k in itertools.combinations(sk, x):
                        for sub_i in itertools.combinations(si, x):
                            new_i = (rows[i] - frozenset(sub_i)) | frozenset(sub_j)
                            new_j = (rows[j] - frozenset(sub_j)) | frozenset(sub_k)
                            new_k = (rows[k] - frozenset(sub_k)) | frozenset(sub_i)
                            t = ctx.index.get(
                                ctx.replace_rows_bits(
                                    s, {i: new_i, j: new_j, k: new_k}
                                )
                            )
                            assert t is not None, "circle trade left the state set"
                            if mh_on:
                                r_ij = new_i - new_j - fixed_rows[j] - fixed_rows[i]
                                r_ki = new_k - new_i - fixed_rows[i] - fixed_rows[k]
                                r_jk = new_j - new_k - fixed_rows[k] - fixed_rows[j]
                                den_r = chains.circle_denominator(
                                    (len(r_ij), len(r_ki), len(r_jk)), x
                                )
                                eff = max(den_f, den_r)
                            else:
                                eff = den_f
                            acc.setdefault((s, t), Counter())[eff] += 1
    keys = set(acc)
    for s, t in keys:
        if acc[(s, t)] != acc.get((t, s)):
            return False
    return True


def _static_ground_truth(bits, n, nc):
    full = (1 << (n * nc)) - 1
    and_all = full
    or_all = 0
    for x in bits:
        and_all &= x
        or_all |= x
    ones = set()
    zeros = set()
    for i in range(n):
        for j in range(nc):
            bit = _bit(i, j, n, nc)
            if and_all & bit:
                ones.add((i, j))
            if not (or_all & bit):
                zeros.add((i, j))
    return frozenset(ones), frozenset(zeros)


def _digest(n, nc, a, b, mask_rows=None):
    base = f"{n}x{nc} a={','.join(map(str, a))} b={','.join(map(str, b))}"
    if mask_rows is not None:
        base += " m=" + "|".join(mask_rows)
    return base


def _mask_rows_from(n, nc, forced_e, forced_n):
    rows = []
    for i in range(n):
        row = []
        for j in range(nc):
            if (i, j) in forced_e:
                row.append("1")
            elif (i, j) in forced_n:
                row.append("0")
            else:
                row.append("*")
        rows.append("".join(row))
    return rows


def _make_instance(n, nc, a, b, forced_e, forced_n) -> Instance:
    return Instance(
        DegreeSequence(a, b),
        FixedSet.from_cells(n, nc, forced_edges=forced_e, forced_non_edges=forced_n),
    )


class _Reporter:
    def __init__(self, emit, quiet, result):
        self.emit = emit or (lambda line: None)
        self.quiet = quiet
        self.result = result

    def record(self, name, digest, ok, witness_factory=None):
        r = self.result
        r.checks_run += 1
        r.counts[name] = r.counts.get(name, 0) + 1
        if ok:
            if not self.quiet:
                self.emit(f"{name} [{digest}] PASS")
        else:
            r.passed = False
            r.failures.append((name, digest))
            self.emit(f"{name} [{digest}] FAIL")
            if r.witness is None and witness_factory is not None:
                r.witness = witness_factory()
                r.witness_check = name

    def info(self, line):
        self.result.info_lines.append(line)
        self.emit(f"INFO {line}")


def _check_instance_pool(ctx, states_idx, support_cells, pattern_forced_e,
                         pattern_forced_n, props, rep, free_bits=None,
                         static_cells=None):
    """Run every applicable check on one instance (a state set plus mask)."""
    n, nc = ctx.n, ctx.nc
    no3m, no8, forest, excluded = props
    mask_rows = _mask_rows_from(n, nc, pattern_forced_e, pattern_forced_n)
    digest = _digest(n, nc, ctx.a, ctx.b, mask_rows)
    witness = lambda: _make_instance(
        n, nc, ctx.a, ctx.b, pattern_forced_e, pattern_forced_n
    )
    fixed_rows = tuple(
        frozenset(j for j in range(nc) if (i, j) in support_cells)
        for i in range(n)
    )
    multi = len(states_idx) >= 2

    def comps_for(lengths=None, trades=False, circle=False):
        def adjacent(u, v):
            info = ctx.pair(u, v)
            if trades and len(info.changed_rows) == 2:
                return True
            if circle and info.is_circle:
                return True
            return lengths is not None and info.cycle_len in lengths

        return _components_of(states_idx, adjacent)

    if no3m and multi:
        len4 = swap_lengths_for(MoveSet.swaps4())
        comps4 = comps_for(lengths=len4)
        rep.record("swaps4-connected", digest, len(comps4) == 1, witness)
        rep.record(
            "swaps4-distance-bound",
            digest,
            len(comps4) == 1 and _distance_bound_holds(ctx, states_idx),
            witness,
        )
        compst = comps_for(trades=True)
        rep.record("trades-connected", digest, len(compst) == 1, witness)
        rep.record("trade-swap-components", digest, comps4 == compst, witness)

    if no8 and multi:
        len46 = swap_lengths_for(MoveSet.swaps46())
        comps46 = comps_for(lengths=len46)
        rep.record("swaps46-connected", digest, len(comps46) == 1, witness)
        if forest:
            rep.record("forest-swaps46-connected", digest, len(comps46) == 1, witness)
        compsc = comps_for(trades=True, circle=True)
        rep.record("circle-trades-connected", digest, len(compsc) == 1, witness)

    if multi:
        for ell in excluded:
            if ell == 4 and no8:
                continue  # identical to the swaps46 check above
            lens = swap_lengths_for(MoveSet.swaps_up_to(2 * ell - 2))
            comps = comps_for(lengths=lens)
            rep.record("bounded-swaps-connected", f"{digest} L={2 * ell - 2}",
                       len(comps) == 1, witness)

    if multi and len(states_idx) <= 60:
        rep.record(
            "trade-reversibility",
            digest,
            _trade_reversibility_ok(ctx, states_idx, fixed_rows),
            witness,
        )
        if n >= 3:
            rep.record(
                "circle-detailed-balance",
                digest,
                _circle_balance_ok(ctx, states_idx, fixed_rows, mh_on=True),
                witness,
            )
            if not _circle_balance_ok(ctx, states_idx, fixed_rows, mh_on=False):
                rep.info(f"uncorrected-circle-asymmetry [{digest}]")

    if free_bits is not None and static_cells is not None and support_cells:
        forced_e_red = pattern_forced_e - static_cells[0]
        forced_n_red = pattern_forced_n - static_cells[1]
        if forced_e_red != pattern_forced_e or forced_n_red != pattern_forced_n:
            kept = set()
            for x in free_bits:
                ok = all(x & _bit(i, j, n, nc) for i, j in forced_e_red) and not any(
                    x & _bit(i, j, n, nc) for i, j in forced_n_red
                )
                if ok:
                    kept.add(x)
            bucket = {ctx.bits[s] for s in states_idx}
            rep.record("reduction-equivalence", digest, kept == bucket, witness)


def _sorted_sequences(n, nc):
    for a in itertools.combinations_with_replacement(range(nc, -1, -1), n):
        sa = sum(a)
        for b in itertools.combinations_with_replacement(range(n, -1, -1), nc):
            if sum(b) == sa:
                yield a, b


def _random_instances(rng, max_rows, max_cols, count, with_8_cycles):
    """Seeded random instances; masks take their polarity from a generating
    matrix so every instance is feasible.  Generic instances keep the fixed
    cells free of 3-matchings; the 8-cycle batch deliberately embeds an
    8-cycle (if the grid allows) to exercise the bounded-swap hypothesis."""
    if max_rows < 2 or max_cols < 2:
        return
    made = 0
    while made < count:
        n = rng.randint(2, max_rows)
        nc = rng.randint(2, max_cols)
        if with_8_cycles:
            if max_rows < 4 or max_cols < 4:
                return
            n = rng.randint(4, max_rows)
            nc = rng.randint(4, max_cols)
        density = rng.choice([0.35, 0.5, 0.65])
        for _attempt in range(40):
            matrix = [
                [1 if rng.random() < density else 0 for _ in range(nc)]
                for _ in range(n)
            ]
            a = tuple(sum(row) for row in matrix)
            b = tuple(sum(matrix[i][j] for i in range(n)) for j in range(nc))
            cells = [(i, j) for i in range(n) for j in range(nc)]
            if with_8_cycles:
                rows4 = rng.sample(range(n), 4)
                cols4 = rng.sample(range(nc), 4)
                support = []
                for t in range(4):
                    support.append((rows4[t], cols4[t]))
                    support.append((rows4[(t + 1) % 4], cols4[t]))
                extra = rng.randint(0, 2)
                pool = [c for c in cells if c not in support]
                support += rng.sample(pool, extra)
            else:
                f_count = rng.randint(0, min(6, n * nc - 1))
                support = rng.sample(cells, f_count)
                fg = FGraph.from_cells(n, nc, support)
                if max_matching_at_least(fg, 3):
                    continue
            forced_e = frozenset(c for c in support if matrix[c[0]][c[1]])
            forced_n = frozenset(c for c in support if not matrix[c[0]][c[1]])
            forced = tuple(
                frozenset(j for i2, j in forced_e if i2 == i) for i in range(n)
            )
            banned = tuple(
                frozenset(j for i2, j in forced_n if i2 == i) for i in range(n)
            )
            bits = _enumerate_bits(a, b, forced, banned, cap=300)
            if bits is None or len(bits) < 2:
                continue
            yield n, nc, a, b, forced_e, forced_n, bits
            made += 1
            break
        else:
            made += 1  # give up on this slot rather than loop forever


def run_verification(
    max_rows: int = 5,
    max_cols: int = 5,
    random_count: int = 200,
    seed: int = 0,
    emit=None,
    quiet: bool = False,
) -> VerificationResult:
    """Sweep the verification pool.

    The exhaustive part covers every canonical (sorted) degree sequence on
    grids up to 3x4 (capped by max_rows/max_cols) with every fixed-cell
    support of at most 4 cells and every feasible polarity; the random part
    adds seeded instances up to max_rows x max_cols, plus a batch with
    embedded 8-cycles when the grid allows.
    """
    if max_rows * max_cols > ENUMERATION_CELL_LIMIT:
        raise TooLarge("verification pool exceeds the enumeration guard")
    t0 = time.time()
    result = VerificationResult()
    rep = _Reporter(emit, quiet, result)
    prop_cache: dict = {}

    for n in range(1, min(3, max_rows) + 1):
        for nc in range(1, min(4, max_cols) + 1):
            cells = [(i, j) for i in range(n) for j in range(nc)]
            supports = []
            for size in range(0, min(4, len(cells)) + 1):
                supports.extend(itertools.combinations(cells, size))
            for a, b in _sorted_sequences(n, nc):
                bits = _enumerate_bits(a, b)
                if not bits:
                    continue
                ctx = _SeqCtx(n, nc, a, b, bits)
                seq_digest = _digest(n, nc, a, b)
                seq = DegreeSequence(a, b)
                truth = _static_ground_truth(bits, n, nc)
                ss = static_set(seq)
                rep.record(
                    "static-cells-exact",
                    seq_digest,
                    ss.forced_edges == truth[0] and ss.forced_non_edges == truth[1],
                    lambda n=n, nc=nc, a=a, b=b: _make_instance(
                        n, nc, a, b, frozenset(), frozenset()
                    ),
                )
                g0 = Realization(
                    Instance.unconstrained(a, b),
                    _bits_to_matrix(bits[0], n, nc),
                    validate=False,
                )
                pruned = static_set_pruned(seq, g0)
                rep.record("static-cells-pruned", seq_digest, pruned == ss)
                static_cells = (ss.forced_edges, ss.forced_non_edges)

                for sup in supports:
                    sup_cells = frozenset(sup)
                    props = _support_props(n, nc, sup_cells, prop_cache)
                    sup_mask = 0
                    for i, j in sup:
                        sup_mask |= _bit(i, j, n, nc)
                    buckets: dict[int, list[int]] = {}
                    for s, x in enumerate(bits):
                        buckets.setdefault(x & sup_mask, []).append(s)
                    for pattern, states_idx in sorted(buckets.items()):
                        forced_e = frozenset(
                            (i, j) for i, j in sup if pattern & _bit(i, j, n, nc)
                        )
                        forced_n = sup_cells - forced_e
                        _check_instance_pool(
                            ctx, states_idx, sup_cells, forced_e, forced_n,
                            props, rep, free_bits=bits, static_cells=static_cells,
                        )

    rng = random.Random(seed)
    seen_seqs = set()
    batches = [(random_count, False)]
    if max_rows >= 4 and max_cols >= 4:
        batches.append((max(random_count // 12, 0), True))
    for count, with8 in batches:
        for n, nc, a, b, forced_e, forced_n, bits in _random_instances(
            rng, max_rows, max_cols, count, with8
        ):
            ctx = _SeqCtx(n, nc, a, b, bits)
            sup_cells = forced_e | forced_n
            props = _support_props(n, nc, frozenset(sup_cells), prop_cache)
            free_bits = _enumerate_bits(a, b, cap=20000)
            static_cells = None
            if free_bits:
                if (n, nc, a, b) not in seen_seqs:
                    seen_seqs.add((n, nc, a, b))
                    seq = DegreeSequence(a, b)
                    truth = _static_ground_truth(free_bits, n, nc)
                    ss = static_set(seq)
                    rep.record(
                        "static-cells-exact",
                        _digest(n, nc, a, b),
                        ss.forced_edges == truth[0]
                        and ss.forced_non_edges == truth[1],
                    )
                    g0 = Realization(
                        Instance.unconstrained(a, b),
                        _bits_to_matrix(free_bits[0], n, nc),
                        validate=False,
                    )
                    rep.record(
                        "static-cells-pruned",
                        _digest(n, nc, a, b),
                        static_set_pruned(seq, g0) == ss,
                    )
                ss = static_set(DegreeSequence(a, b))
                static_cells = (ss.forced_edges, ss.forced_non_edges)
            _check_instance_pool(
                ctx, list(range(len(bits))), frozenset(sup_cells),
                forced_e, forced_n, props, rep,
                free_bits=free_bits, static_cells=static_cells,
            )

    result.elapsed = time.time() - t0
    return result


def search_split_masks(row_degrees=(1, 1, 1, 1), col_degrees=(2, 1, 1)):
    """Search every mask made of a 3-matching of forced non-edges plus one
    extra forced non-edge cell; report each whose 4-swap state graph is
    disconnected, with component count, pairwise isomorphism and
    trade-plus-circle connectivity."""
    degs = DegreeSequence(row_degrees, col_degrees)
    n, nc = degs.n, degs.n_cols
    records = []
    seen = set()
    for rows3 in itertools.combinations(range(n), 3):
        for cols3 in itertools.permutations(range(nc), 3):
            matching = list(zip(rows3, cols3))
            all_cells = [(i, j) for i in range(n) for j in range(nc)]
            for extra in all_cells:
                if extra in matching:
                    continue
                cells = frozenset(matching + [extra])
                if cells in seen:
                    continue
                seen.add(cells)
                inst = Instance(
                    degs, FixedSet.from_cells(n, nc, forced_non_edges=cells)
                )
                states = enumerate_realizations(inst)
                if len(states) < 2:
                    continue
                sg4 = build_state_graph(states, MoveSet.swaps4())
                connected, comps = check_connectivity(sg4)
                if connected:
                    continue
                iso = components_isomorphic(sg4)
                sgc = build_state_graph(states, MoveSet.trades_plus_circle())
                circle_connected, _ = check_connectivity(sgc)
                records.append(
                    {
                        "cells": tuple(sorted(cells)),
                        "n_states": len(states),
                        "n_components": len(comps),
                        "isomorphic": iso,
                        "circle_connected": circle_connected,
                    }
                )
    return records
