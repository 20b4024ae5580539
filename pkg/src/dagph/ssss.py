"""Rank invariants of single-source/single-sink subgraphs.

For every source vertex a BFS tree of the reachable sub-DAG is walked with the
standard incremental persistence reduction, snapshotting the reduction state
at branch points. The rank of ``H_k(X_u) -> H_k(X_w)`` is the number of
classes present at ``u`` still alive at ``w``; by commutativity it does not
depend on the path.
"""

from __future__ import annotations

import csv
import io
import math
import re
from collections import defaultdict

from .dagmodel import FiltrationError, GraphFiltration
from .linalg import SparseEchelon


class ReductionState:
    """Incremental column reduction for one homology degree.

    Simplices are indexed by insertion position so that the pivot of a
    reduced column is the youngest simplex, as the pairing needs.
    """

    def __init__(self, complex, k: int, field):
        self.complex = complex
        self.k = k
        self.field = field
        self.pos: dict[int, int] = {}
        self.cycles = SparseEchelon(field)  # reduced boundaries of k-simplices
        self.bounds = SparseEchelon(field)  # reduced boundaries of (k+1)-simplices
        self.alive: dict[int, object] = {}  # position of creator -> birth tag
        self.killed: list[tuple] = []  # (birth tag, death tag) of finished classes

    def copy(self) -> "ReductionState":
        new = ReductionState.__new__(ReductionState)
        new.complex, new.k, new.field = self.complex, self.k, self.field
        new.pos = dict(self.pos)
        new.cycles = self.cycles.copy()
        new.bounds = self.bounds.copy()
        new.alive = dict(self.alive)
        new.killed = list(self.killed)
        return new

    def _boundary(self, sid):
        pos = self.pos
        return {pos[f]: c for f, c in self.complex.boundary_chain(sid, self.field).items()}

    def add(self, sid: int, tag) -> None:
        d = self.complex.dim_of(sid)
        self.pos[sid] = len(self.pos)
        if d == self.k:
            if d == 0 or self.cycles.add(self._boundary(sid)) is None:
                self.alive[self.pos[sid]] = tag
        elif d == self.k + 1:
            piv = self.bounds.add(self._boundary(sid))
            if piv is not None:
                self.killed.append((self.alive.pop(piv), tag))

    def add_many(self, sids, tag) -> None:
        for sid in sorted(sids):
            self.add(sid, tag)

    def count_alive(self, pred=lambda tag: True) -> int:
        return sum(1 for t in self.alive.values() if pred(t))


class RankTable:
    """Map ``(source, target, k) -> rank`` with CSV export."""

    def __init__(self, entries=None):
        self.entries: dict[tuple, int] = dict(entries or {})

    def __getitem__(self, key):
        return self.entries[key]

    def __setitem__(self, key, value):
        self.entries[key] = value

    def __contains__(self, key):
        return key in self.entries

    def __len__(self):
        return len(self.entries)

    def __eq__(self, other):
        return isinstance(other, RankTable) and self.entries == other.entries

    def items(self):
        return self.entries.items()

    def get(self, u, w, k, default=None):
        return self.entries.get((u, w, k), default)

    def update(self, other: "RankTable"):
        self.entries.update(other.entries)
        return self

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["source", "target", "k", "rank"])
        for (u, v, k), r in sorted(self.entries.items(), key=lambda kv: (str(kv[0][0]), str(kv[0][1]), kv[0][2])):
            w.writerow([u, v, k, r])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "RankTable":
        rows = list(csv.DictReader(io.StringIO(text)))
        return cls({(r["source"], r["target"], int(r["k"])): int(r["rank"]) for r in rows})


def _path_order(dag: GraphFiltration) -> list:
    verts = list(dag.vertices)
    if not verts:
        return []
    sources = [v for v in verts if not dag.predecessors(v)]
    if len(sources) != 1 or any(len(dag.successors(v)) > 1 or len(dag.predecessors(v)) > 1
                                for v in verts):
        raise FiltrationError("standard_persistence needs a single directed path")
    order = [sources[0]]
    while dag.successors(order[-1]):
        order.append(dag.successors(order[-1])[0])
    if len(order) != len(verts):
        raise FiltrationError("standard_persistence needs a single directed path")
    return order


def standard_persistence(path: GraphFiltration, k: int, field) -> list[tuple]:
    """Persistence pairs ``(birth, death)`` along a path, indices are path positions.

    Simplices of the first vertex are born at index 0. Essential classes get
    ``death = math.inf``; zero-length pairs are dropped.
    """
    order = _path_order(path)
    if not order:
        return []
    st = ReductionState(path.complex, k, field)
    st.add_many(path.members(order[0]), 0)
    for i in range(1, len(order)):
        st.add_many(path.members(order[i]) - path.members(order[i - 1]), i)
    pairs = [(b, d) for b, d in st.killed if b != d]
    pairs += [(b, math.inf) for b in st.alive.values()]
    return sorted(pairs)


def bfs_tree(dag: GraphFiltration, src) -> dict:
    """Children lists of the BFS tree from ``src``; children in vertex-id order."""
    children = {src: []}
    queue = [src]
    i = 0
    while i < len(queue):
        u = queue[i]
        i += 1
        for w in sorted(dag.successors(u), key=str):
            if w not in children:
                children[w] = []
                children[u].append(w)
                queue.append(w)
    return children


def _walk_tree(dag, root, children, st, visit):
    """Depth-first walk; ``visit(node, state)`` is called on every node.

    The state is snapshotted only where the tree branches.
    """
    stack = [(root, st)]
    while stack:
        node, state = stack.pop()
        visit(node, state)
        kids = children[node]
        for idx, w in enumerate(reversed(kids)):
            s = state if idx == len(kids) - 1 else state.copy()
            s.add_many(dag.members(w) - dag.members(node), ("step", w))
            stack.append((w, s))


def single_source_ranks(dag: GraphFiltration, src, k: int, field) -> RankTable:
    out = RankTable()
    st = ReductionState(dag.complex, k, field)
    st.add_many(dag.members(src), "root")
    children = bfs_tree(dag, src)

    def visit(node, state):
        out[(src, node, k)] = state.count_alive(lambda t: t == "root")

    _walk_tree(dag, src, children, st, visit)
    return out


def all_pairs_rank(dag: GraphFiltration, k: int, field) -> RankTable:
    """``rank(u, w, k)`` for every ordered pair with ``w`` reachable from ``u``."""
    table = RankTable()
    for src in dag.vertices:
        table.update(single_source_ranks(dag, src, k, field))
    return table


def _parse_coords(vid) -> tuple:
    if isinstance(vid, tuple):
        return vid
    nums = re.findall(r"\d+", str(vid))
    if not nums:
        raise FiltrationError(f"cannot read lattice coordinates from vertex id {vid!r}")
    return tuple(int(x) for x in nums)


def lattice_rank_invariants(dag: GraphFiltration, k: int, field, coords=None) -> RankTable:
    """Rank invariants of a grid filtration using only roots ``(0, v2, ..., vd)``.

    ``coords`` maps vertex ids to integer tuples; by default the integers in
    each id are read (``"2,0"``, ``"X_2_0"``...). Each root grows a comb
    tree: a spine along the first axis with, at each spine vertex, a BFS tree
    over the remaining axes.
    """
    if coords is None:
        coords = {v: _parse_coords(v) for v in dag.vertices}
    at = {}
    for v, c in coords.items():
        if c in at:
            raise FiltrationError(f"vertices {at[c]!r} and {v!r} share coordinates {c}")
        at[c] = v
    if not at:
        return RankTable()
    d = len(next(iter(at)))
    if any(len(c) != d for c in at):
        raise FiltrationError("lattice coordinates have mixed dimension")
    hi = tuple(max(c[a] for c in at) for a in range(d))
    expected = 1
    for m in hi:
        expected *= m + 1
    if len(at) != expected or any(min(c) < 0 for c in at):
        raise FiltrationError("vertices do not form a full grid {0..m1} x ... x {0..md}")
    want = set()
    for c, v in at.items():
        for a in range(d):
            if c[a] < hi[a]:
                n = c[:a] + (c[a] + 1,) + c[a + 1:]
                want.add((v, at[n]))
    if set(dag.edges) != want or len(dag.edges) != len(want):
        raise FiltrationError("edges are not exactly the unit grid steps")

    table = RankTable()
    roots = [c for c in sorted(at) if c[0] == 0]
    for root in roots:
        rest0 = root[1:]
        children = defaultdict(list)
        spine = [(a,) + rest0 for a in range(hi[0] + 1)]
        for a in range(hi[0]):
            children[at[spine[a]]].append(at[spine[a + 1]])
        # teeth: BFS over the upper set of ``rest0`` in axes 2..d
        for sp in spine:
            seen = {sp}
            queue = [sp]
            while queue:
                c = queue.pop(0)
                for ax in range(1, d):
                    if c[ax] < hi[ax]:
                        n = c[:ax] + (c[ax] + 1,) + c[ax + 1:]
                        if n not in seen:
                            seen.add(n)
                            children[at[c]].append(at[n])
                            queue.append(n)
        st = ReductionState(dag.complex, k, field)
        st.add_many(dag.members(at[root]), 0)
        spine_ids = {at[c]: c[0] for c in spine}

        def visit(node, state, rest0=rest0):
            c = coords[node]
            for a in range(c[0] + 1):
                u = at[(a,) + rest0]
                table[(u, node, k)] = state.count_alive(lambda t, a=a: t <= a)

        # birth tags: spine index for spine steps, inf for teeth steps
        stack = [(at[root], st)]
        while stack:
            node, state = stack.pop()
            visit(node, state)
            kids = children.get(node, [])
            for idx, w in enumerate(reversed(kids)):
                s = state if idx == len(kids) - 1 else state.copy()
                tag = spine_ids.get(w, math.inf) if node in spine_ids else math.inf
                s.add_many(dag.members(w) - dag.members(node), tag)
                stack.append((w, s))
    return table
