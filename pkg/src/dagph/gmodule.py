"""Commutative G-modules, persistence diagrams and the bottleneck distance."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

from .dagmodel import GraphFiltration, SubgraphSelector
from .linalg import Matrix, rank
from .simplicial import HomologyBasis


class NotIntervalDecomposable(ValueError):
    """Rank inversion produced a negative multiplicity."""

    def __init__(self, point, multiplicity):
        self.point = point
        self.multiplicity = multiplicity
        super().__init__(
            f"negative multiplicity {multiplicity} at {point}: ranks are not those of an "
            "interval-decomposable module")


@dataclass
class GModule:
    """A vector space dimension per vertex and a matrix per directed edge."""

    field: object
    vertices: list
    edges: list
    dims: dict
    maps: dict  # edge -> Matrix of shape (dims[dst], dims[src])
    bases: dict = dc_field(default_factory=dict, repr=False)

    def __post_init__(self):
        for (u, v), m in self.maps.items():
            if m.shape != (self.dims[v], self.dims[u]):
                raise ValueError(f"map on edge {(u, v)} has shape {m.shape}, "
                                 f"expected {(self.dims[v], self.dims[u])}")

    def _topo(self):
        pred = {v: [] for v in self.vertices}
        succ = {v: [] for v in self.vertices}
        for u, v in self.edges:
            pred[v].append(u)
            succ[u].append(v)
        indeg = {v: len(pred[v]) for v in self.vertices}
        order = [v for v in self.vertices if indeg[v] == 0]
        i = 0
        while i < len(order):
            for w in succ[order[i]]:
                indeg[w] -= 1
                if indeg[w] == 0:
                    order.append(w)
            i += 1
        return order, pred

    def composites(self, src) -> dict:
        """Composite map from ``src`` to each reachable vertex; raises if paths disagree."""
        order, pred = self._topo()
        comp = {src: Matrix.identity(self.field, self.dims[src])}
        for w in order:
            if w == src:
                continue
            for u in pred[w]:
                if u in comp:
                    m = self.maps[(u, w)] @ comp[u]
                    if w in comp and comp[w] != m:
                        raise ValueError(f"non-commuting paths from {src!r} to {w!r}")
                    comp[w] = m
        return comp

    def is_commutative(self) -> bool:
        try:
            for v in self.vertices:
                self.composites(v)
        except ValueError:
            return False
        return True

    def direct_sum(self, other: "GModule") -> "GModule":
        dims = {v: self.dims[v] + other.dims[v] for v in self.vertices}
        maps = {}
        f = self.field
        for e in self.edges:
            a, b = self.maps[e], other.maps[e]
            rows = [list(r) + [f.zero] * b.ncols for r in a.data]
            rows += [[f.zero] * a.ncols + list(r) for r in b.data]
            maps[e] = Matrix.from_rows(f, rows, a.ncols + b.ncols) if rows else \
                Matrix.zeros(f, 0, a.ncols + b.ncols)
        return GModule(f, list(self.vertices), list(self.edges), dims, maps)


def homology_module(dag: GraphFiltration, sel: SubgraphSelector | None, k: int, field) -> GModule:
    """The persistence module: ``H_k`` at each vertex, induced maps on edges."""
    if sel is None:
        vertices = list(dag.vertices)
        edges = list(dag.edges)
    else:
        vertices = [v for v in dag.vertices if v in sel.vertices]
        edges = [e for e in dag.edges if e in set(sel.edges)]
    bases = {v: HomologyBasis(dag.complex, dag.members(v), k, field) for v in vertices}
    dims = {v: bases[v].betti for v in vertices}
    maps = {}
    for u, v in edges:
        cols = [bases[v].coords(z) for z in bases[u].reps]
        maps[(u, v)] = Matrix.from_columns(field, cols, dims[v]) if cols else \
            Matrix.zeros(field, dims[v], 0)
    return GModule(field, vertices, edges, dims, maps, bases)


def module_dimension(m: GModule) -> int:
    """Sum of vertex dimensions minus the sum of edge-map ranks."""
    return sum(m.dims.values()) - sum(rank(a) for a in m.maps.values())


def is_elementary(m: GModule, carrier: SubgraphSelector) -> bool:
    """True iff ``m`` is isomorphic to the elementary module on ``carrier``."""
    inside = set(carrier.vertices)
    for v in m.vertices:
        if m.dims[v] != (1 if v in inside else 0):
            return False
    if not inside or not carrier.is_connected():
        return not inside
    # propagate a unit scale over the carrier; every carrier edge must be an
    # isomorphism and the rescaling must be consistent around cycles
    adj = {v: [] for v in inside}
    for (u, v) in m.edges:
        if u in inside and v in inside:
            a = m.maps[(u, v)][0, 0]
            if a == 0:
                return False
            adj[u].append((v, a))
            adj[v].append((u, m.field.inv(a)))
    root = min(inside, key=str)
    scale = {root: m.field.one}
    stack = [root]
    while stack:
        u = stack.pop()
        for w, a in adj[u]:
            s = m.field.mul(a, scale[u])
            if w in scale:
                if scale[w] != s:
                    return False
            else:
                scale[w] = s
                stack.append(w)
    return len(scale) == len(inside)


def elementary_module(vertices, edges, carrier: SubgraphSelector, field) -> GModule:
    inside = set(carrier.vertices)
    dims = {v: int(v in inside) for v in vertices}
    maps = {}
    for u, v in edges:
        if u in inside and v in inside:
            maps[(u, v)] = Matrix.identity(field, 1)
        else:
            maps[(u, v)] = Matrix.zeros(field, dims[v], dims[u])
    return GModule(field, list(vertices), list(edges), dims, maps)


# --- persistence diagrams -----------------------------------------------------

@dataclass(frozen=True)
class PersistenceDiagram:
    """Multiset of ``(birth, death, multiplicity)``; ``death`` may be ``math.inf``."""

    points: tuple = ()
    flags: tuple = ()

    def __post_init__(self):
        merged: dict = {}
        for b, d, m in self.points:
            if m <= 0:
                raise ValueError(f"multiplicity must be positive, got {m} at {(b, d)}")
            if d < b:
                raise ValueError(f"death {d} before birth {b}")
            merged[(b, d)] = merged.get((b, d), 0) + m
        object.__setattr__(self, "points", tuple(sorted((b, d, m) for (b, d), m in merged.items())))

    @classmethod
    def from_pairs(cls, pairs) -> "PersistenceDiagram":
        return cls(tuple((b, d, 1) for b, d in pairs))

    def expanded(self) -> list[tuple]:
        return [(b, d) for b, d, m in self.points for _ in range(m)]

    def persistences(self, cap=None) -> list:
        """Lifetimes, largest first; essential points use ``cap - birth`` if a cap is given."""
        out = []
        for b, d in self.expanded():
            if d == math.inf and cap is not None:
                d = cap
            out.append(d - b)
        return sorted(out, reverse=True)

    def __len__(self):
        return sum(m for _, _, m in self.points)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["birth", "death", "multiplicity"])
        for b, d, m in self.points:
            w.writerow([_fmt(b), "inf" if d == math.inf else _fmt(d), m])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "PersistenceDiagram":
        pts = []
        for r in csv.DictReader(io.StringIO(text)):
            d = math.inf if r["death"] == "inf" else _num(r["death"])
            pts.append((_num(r["birth"]), d, int(r["multiplicity"])))
        return cls(tuple(pts))

    def map_values(self, fn) -> "PersistenceDiagram":
        return PersistenceDiagram(tuple((fn(b), d if d == math.inf else fn(d), m)
                                        for b, d, m in self.points), self.flags)


def _fmt(x):
    if isinstance(x, Fraction):
        return str(x.numerator) if x.denominator == 1 else repr(float(x))
    return repr(x) if isinstance(x, float) else str(x)


def _num(s):
    try:
        return int(s)
    except ValueError:
        return float(s)


def diagram_from_ranks(ranks, n: int, strict: bool = True) -> PersistenceDiagram:
    """Invert a rank function on the index family ``0..n-1`` by inclusion-exclusion.

    ``ranks[(i, j)]`` is the number of classes alive throughout ``[i, j]``.
    A class alive exactly on ``[i, j]`` becomes the point ``(i, j + 1)``, or
    ``(i, inf)`` when ``j`` is the last index. With ``strict=False`` negative
    multiplicities are recorded in ``flags`` instead of raising.
    """
    def r(i, j):
        if i < 0 or j >= n or i > j:
            return 0
        return ranks.get((i, j), 0)

    pts = []
    flags = []
    for i in range(n):
        for j in range(i, n):
            m = r(i, j) - r(i - 1, j) - r(i, j + 1) + r(i - 1, j + 1)
            death = math.inf if j == n - 1 else j + 1
            if m < 0:
                if strict:
                    raise NotIntervalDecomposable((i, death), m)
                flags.append(f"negative multiplicity {m} at ({i}, {death})")
            elif m > 0:
                pts.append((i, death, m))
    return PersistenceDiagram(tuple(pts), tuple(flags))


# --- bottleneck distance --------------------------------------------------------

def _linf(p, q):
    return max(abs(p[0] - q[0]), abs(p[1] - q[1]))


def _has_perfect_matching(adj, n_left, n_right):
    match_r = [-1] * n_right

    def augment(u, seen):
        for v in adj[u]:
            if not seen[v]:
                seen[v] = True
                if match_r[v] < 0 or augment(match_r[v], seen):
                    match_r[v] = u
                    return True
        return False

    for u in range(n_left):
        if not augment(u, [False] * n_right):
            return False
    return True


def _finite_bottleneck(a: list, b: list) -> float:
    if not a and not b:
        return 0.0
    na, nb = len(a), len(b)
    diag_a = [(p[1] - p[0]) / 2 for p in a]
    diag_b = [(q[1] - q[0]) / 2 for q in b]
    cands = {0.0}
    cands.update(diag_a)
    cands.update(diag_b)
    cands.update(_linf(p, q) for p in a for q in b)
    cands = sorted(cands)

    # left: a-points then diagonal slots for b; right: b-points then diagonal slots for a
    def feasible(eps):
        adj = []
        for i, p in enumerate(a):
            row = [j for j, q in enumerate(b) if _linf(p, q) <= eps]
            if diag_a[i] <= eps:
                row.append(nb + i)
            adj.append(row)
        for j in range(nb):
            row = list(range(nb, nb + na))
            if diag_b[j] <= eps:
                row.append(j)
            adj.append(row)
        return _has_perfect_matching(adj, na + nb, na + nb)

    lo, hi = 0, len(cands) - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if feasible(cands[mid]):
            hi = mid
        else:
            lo = mid + 1
    return float(cands[lo])


def bottleneck(d1: PersistenceDiagram, d2: PersistenceDiagram) -> float:
    """Bottleneck distance under the sup-norm, points may match the diagonal.

    Essential points (infinite death) are matched among themselves by birth;
    unequal essential counts give ``inf``.
    """
    a = d1.expanded()
    b = d2.expanded()
    ea = sorted(p[0] for p in a if p[1] == math.inf)
    eb = sorted(q[0] for q in b if q[1] == math.inf)
    if len(ea) != len(eb):
        return math.inf
    ess = max((abs(x - y) for x, y in zip(ea, eb)), default=0.0)
    fa = [p for p in a if p[1] != math.inf]
    fb = [q for q in b if q[1] != math.inf]
    return float(max(ess, _finite_bottleneck(fa, fb)))
