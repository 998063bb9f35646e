"""Bipartite support graphs: components, connectivity, spanning trees."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, NamedTuple

from .errors import SpanningTreeError
from .matrix import Assessment, ProbMatrix
from .numeric import DEFAULT_CONFIG, RunConfig, is_positive


class Block(NamedTuple):
    """One connected component: sorted 1-based row and column indices."""

    rows: tuple[int, ...]
    cols: tuple[int, ...]


@dataclass(frozen=True)
class SupportGraph:
    """Bipartite graph over row events and column events.

    An edge (i, j) exists when p[i][j] > 0 or q[j][i] > 0; the two flags are
    kept separately so one-sided edges can be told apart.
    """

    n_rows: int
    n_cols: int
    p_edges: frozenset[tuple[int, int]]
    q_edges: frozenset[tuple[int, int]]

    @property
    def edges(self) -> frozenset[tuple[int, int]]:
        return self.p_edges | self.q_edges

    @property
    def both_edges(self) -> frozenset[tuple[int, int]]:
        return self.p_edges & self.q_edges

    def flags(self, i: int, j: int) -> tuple[bool, bool]:
        return (i, j) in self.p_edges, (i, j) in self.q_edges

    @cached_property
    def _row_adj(self) -> dict[int, tuple[int, ...]]:
        adj: dict[int, list[int]] = {i: [] for i in range(1, self.n_rows + 1)}
        for i, j in sorted(self.edges):
            adj[i].append(j)
        return {i: tuple(js) for i, js in adj.items()}

    @cached_property
    def _col_adj(self) -> dict[int, tuple[int, ...]]:
        adj: dict[int, list[int]] = {j: [] for j in range(1, self.n_cols + 1)}
        for i, j in sorted(self.edges):
            adj[j].append(i)
        return {j: tuple(sorted(is_)) for j, is_ in adj.items()}

    def row_neighbors(self, i: int, both: bool = False) -> tuple[int, ...]:
        js = self._row_adj[i]
        if both:
            js = tuple(j for j in js if (i, j) in self.both_edges)
        return js

    def col_neighbors(self, j: int, both: bool = False) -> tuple[int, ...]:
        is_ = self._col_adj[j]
        if both:
            is_ = tuple(i for i in is_ if (i, j) in self.both_edges)
        return is_


def support_graph(a: Assessment, cfg: RunConfig = DEFAULT_CONFIG) -> SupportGraph:
    """Read the union support off an assessment, recording both flags."""
    p_edges = set()
    q_edges = set()
    for i in range(1, a.l + 1):
        for j in range(1, a.m + 1):
            if is_positive(a.p(i, j), cfg):
                p_edges.add((i, j))
            if is_positive(a.q(j, i), cfg):
                q_edges.add((i, j))
    return SupportGraph(a.l, a.m, frozenset(p_edges), frozenset(q_edges))


def connected_components(g: SupportGraph) -> tuple[Block, ...]:
    """Components of the union graph, ordered by their smallest row index.

    Every row and column of an assessment carries at least one positive
    entry, so each component holds at least one row and one column.
    """
    seen_rows: set[int] = set()
    seen_cols: set[int] = set()
    blocks: list[Block] = []
    for start in range(1, g.n_rows + 1):
        if start in seen_rows:
            continue
        rows, cols = {start}, set()
        stack: list[tuple[str, int]] = [("r", start)]
        while stack:
            side, idx = stack.pop()
            if side == "r":
                for j in g.row_neighbors(idx):
                    if j not in cols:
                        cols.add(j)
                        stack.append(("c", j))
            else:
                for i in g.col_neighbors(idx):
                    if i not in rows:
                        rows.add(i)
                        stack.append(("r", i))
        seen_rows |= rows
        seen_cols |= cols
        blocks.append(Block(tuple(sorted(rows)), tuple(sorted(cols))))
    # Columns with no edge at all cannot occur for assessments, but keep the
    # decomposition total for raw graphs.
    for j in range(1, g.n_cols + 1):
        if j not in seen_cols:
            blocks.append(Block((), (j,)))
    return tuple(blocks)


def support_pattern_connected(
    support: Iterable[tuple[int, int]], n_rows: int, n_cols: int
) -> bool:
    """Whether a 0/1 support pattern resists block-diagonal splitting.

    A pattern is splittable when rows and columns can each be divided into
    two nonempty groups with no positive entry crossing between the groups.
    In graph terms: the components (isolated nodes included) can be two-
    colored so that each color class gets at least one row and one column.
    """
    support = set(support)
    # Union-find over rows 0..n_rows-1 and columns offset by n_rows.
    parent = list(range(n_rows + n_cols))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i, j in support:
        a, b = find(i - 1), find(n_rows + j - 1)
        if a != b:
            parent[a] = b

    comp_rows: dict[int, int] = {}
    comp_cols: dict[int, int] = {}
    for r in range(n_rows):
        root = find(r)
        comp_rows[root] = comp_rows.get(root, 0) + 1
        comp_cols.setdefault(root, 0)
    for c in range(n_cols):
        root = find(n_rows + c)
        comp_cols[root] = comp_cols.get(root, 0) + 1
        comp_rows.setdefault(root, 0)

    mixed = sum(1 for k in comp_rows if comp_rows[k] > 0 and comp_cols[k] > 0)
    lone_rows = sum(comp_rows[k] for k in comp_rows if comp_cols[k] == 0)
    lone_cols = sum(comp_cols[k] for k in comp_cols if comp_rows[k] == 0)

    if mixed >= 2:
        return False
    if mixed == 1:
        return not (lone_rows >= 1 and lone_cols >= 1)
    # No edges at all: splittable exactly when both sides can be divided.
    return not (n_rows >= 2 and n_cols >= 2)


def is_connected(matrix: ProbMatrix, cfg: RunConfig = DEFAULT_CONFIG) -> bool:
    """Connectivity of one matrix's own positive-entry bipartite graph.

    Matches the permutation characterization: connected means no row and
    column permutations exhibit a block-diagonal form with two nonempty
    diagonal blocks.
    """
    return support_pattern_connected(matrix.support(cfg), matrix.nrows, matrix.ncols)


def spanning_tree(g: SupportGraph, block: Block) -> frozenset[tuple[int, int]]:
    """Deterministic spanning tree of a block using both-positive edges only.

    Level-synchronous search from the block's smallest row: each level's new
    nodes are attached through their highest-index neighbor in the current
    frontier (the frontier is scanned in ascending order and the last parent
    claiming a node wins).  Returns rows + cols - 1 edges.
    """
    rows, cols = set(block.rows), set(block.cols)
    if not rows or not cols:
        raise SpanningTreeError("block must contain at least one row and one column")
    start = ("r", min(rows))
    visited = {start}
    frontier = [start]
    edges: set[tuple[int, int]] = set()
    while frontier:
        claimed: dict[tuple[str, int], tuple[int, int]] = {}
        for side, idx in frontier:
            if side == "r":
                for j in g.row_neighbors(idx, both=True):
                    if j in cols and ("c", j) not in visited:
                        claimed[("c", j)] = (idx, j)
            else:
                for i in g.col_neighbors(idx, both=True):
                    if i in rows and ("r", i) not in visited:
                        claimed[("r", i)] = (i, idx)
        frontier = sorted(claimed)
        for node in frontier:
            visited.add(node)
            edges.add(claimed[node])
    if len(visited) != len(rows) + len(cols):
        raise SpanningTreeError(
            "edges positive in both tables do not connect the block"
        )
    return frozenset(edges)
