"""Graph filtrations: DAGs of subcomplexes of one global complex.

Vertex spaces are :class:`~dagph.simplicial.SubcomplexMask` objects over a
shared :class:`~dagph.simplicial.GlobalComplex`; every edge map is the subset
inclusion, so commutativity of all induced diagrams is automatic.

JSON document format::

    {"simplices": [[0], [1], [0, 1]],
     "vertices": [{"id": "X0", "members": [0, 1]}, {"id": "X1", "members": [0, 1, 2]}],
     "edges": [["X0", "X1"]]}

Simplices are sorted vertex lists, listed closed under faces with faces first;
``members`` index into ``simplices``; vertex ids are arbitrary strings.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field as dc_field

from .simplicial import GlobalComplex, MalformedSimplex, SubcomplexMask


class FiltrationError(ValueError):
    """Base class for invalid graph filtrations."""


class CycleFound(FiltrationError):
    def __init__(self, edge):
        self.edge = edge
        super().__init__(f"cycle-found: edge {edge[0]!r} -> {edge[1]!r} lies on a directed cycle")


class InclusionViolated(FiltrationError):
    def __init__(self, edge, simplex):
        self.edge = edge
        self.simplex = simplex
        super().__init__(
            f"inclusion-violated: edge {edge[0]!r} -> {edge[1]!r}: simplex {list(simplex)} "
            f"of {edge[0]!r} is missing from {edge[1]!r}")


class DisconnectedSelector(FiltrationError):
    pass


class ParseError(ValueError):
    pass


@dataclass(eq=False)
class GraphFiltration:
    complex: GlobalComplex
    vertices: dict  # id -> SubcomplexMask, insertion ordered
    edges: list  # (src, dst)

    def __post_init__(self):
        self.edges = [tuple(e) for e in self.edges]
        for u, v in self.edges:
            for x in (u, v):
                if x not in self.vertices:
                    raise FiltrationError(f"edge refers to unknown vertex id {x!r}")
        self._succ = {v: [] for v in self.vertices}
        self._pred = {v: [] for v in self.vertices}
        for u, v in self.edges:
            self._succ[u].append(v)
            self._pred[v].append(u)

    def __eq__(self, other):
        return (isinstance(other, GraphFiltration)
                and self.complex == other.complex
                and list(self.vertices) == list(other.vertices)
                and all(self.vertices[v].members == other.vertices[v].members
                        for v in self.vertices)
                and self.edges == other.edges)

    def members(self, v) -> frozenset:
        return self.vertices[v].members

    def successors(self, v) -> list:
        return self._succ[v]

    def predecessors(self, v) -> list:
        return self._pred[v]

    def added(self, edge) -> list[int]:
        """Simplex ids added along an edge, in face-respecting (dim, id) order."""
        u, v = edge
        return sorted(self.members(v) - self.members(u))

    def topological_order(self) -> list:
        indeg = {v: len(self._pred[v]) for v in self.vertices}
        queue = deque(v for v in self.vertices if indeg[v] == 0)
        order = []
        while queue:
            u = queue.popleft()
            order.append(u)
            for w in self._succ[u]:
                indeg[w] -= 1
                if indeg[w] == 0:
                    queue.append(w)
        if len(order) != len(self.vertices):
            stuck = next(e for e in self.edges if indeg[e[1]] > 0 and indeg[e[0]] > 0)
            raise CycleFound(stuck)
        return order

    def reachable(self, src) -> list:
        """Vertices reachable from ``src`` (including itself) in BFS order."""
        seen = {src}
        order = [src]
        queue = deque([src])
        while queue:
            u = queue.popleft()
            for w in sorted(self._succ[u], key=str):
                if w not in seen:
                    seen.add(w)
                    order.append(w)
                    queue.append(w)
        return order

    def validate(self) -> None:
        validate(self)


def validate(gf: GraphFiltration) -> None:
    """Check acyclicity and per-edge inclusion; raise on the first violation."""
    for u, v in gf.edges:
        if u == v:
            raise CycleFound((u, v))
    gf.topological_order()
    for u, v in gf.edges:
        missing = gf.members(u) - gf.members(v)
        if missing:
            raise InclusionViolated((u, v), gf.complex.simplices[min(missing)])


def is_valid(gf: GraphFiltration) -> bool:
    try:
        validate(gf)
    except FiltrationError:
        return False
    return True


@dataclass(eq=False)
class SimplexwiseDAG(GraphFiltration):
    """A graph filtration in which every edge adds at most one simplex.

    ``added_simplex`` maps each edge to the id it adds (``None`` for an
    identity edge); ``origin`` maps inserted refinement vertices to the
    original edge they subdivide.
    """

    added_simplex: dict = dc_field(default_factory=dict)
    origin: dict = dc_field(default_factory=dict)

    def __post_init__(self):
        super().__post_init__()
        for e in self.edges:
            diff = self.members(e[1]) - self.members(e[0])
            if len(diff) > 1:
                raise FiltrationError(f"edge {e} adds {len(diff)} simplices")
            self.added_simplex.setdefault(e, next(iter(diff)) if diff else None)

    def original_vertices(self) -> list:
        return [v for v in self.vertices if v not in self.origin]

    def expand_selector(self, vertex_ids) -> "SubgraphSelector":
        """Induced selector on original vertices plus the chains between them."""
        chosen = set(vertex_ids)
        for w, (a, b) in self.origin.items():
            if a in chosen and b in chosen:
                chosen.add(w)
        return SubgraphSelector.induced(self, chosen)


def refine_to_simplexwise(gf: GraphFiltration) -> SimplexwiseDAG:
    """Split every edge into single-simplex steps (faces first, ties by id)."""
    vertices = dict(gf.vertices)
    edges = []
    origin = {}
    for u, v in gf.edges:
        add = gf.added((u, v))
        if len(add) <= 1:
            edges.append((u, v))
            continue
        prev = u
        cur = set(gf.members(u))
        for t, sid in enumerate(add[:-1]):
            cur.add(sid)
            w = f"{u}->{v}#{t + 1}"
            vertices[w] = SubcomplexMask(gf.complex, frozenset(cur))
            origin[w] = (u, v)
            edges.append((prev, w))
            prev = w
        edges.append((prev, v))
    return SimplexwiseDAG(gf.complex, vertices, edges, origin=origin)


def path_filtration(complex: GlobalComplex, order=None, start_empty: bool = False,
                    prefix: str = "X") -> SimplexwiseDAG:
    """The path ``X0 -> X1 -> ...`` adding simplices one at a time in ``order``.

    With ``start_empty=False`` vertex ``X_i`` holds the first ``i+1`` simplices.
    """
    order = list(range(len(complex))) if order is None else list(order)
    vertices = {}
    cur = set()
    offset = 0
    if start_empty:
        vertices[f"{prefix}0"] = SubcomplexMask(complex, frozenset())
        offset = 1
    for i, sid in enumerate(order):
        cur.add(sid)
        vertices[f"{prefix}{i + offset}"] = SubcomplexMask(complex, frozenset(cur))
    names = list(vertices)
    return SimplexwiseDAG(complex, vertices, list(zip(names, names[1:])))


@dataclass(frozen=True)
class SubgraphSelector:
    """A weakly connected vertex set with the edges it induces."""

    vertices: frozenset
    edges: tuple

    @classmethod
    def induced(cls, gf: GraphFiltration, vertex_ids) -> "SubgraphSelector":
        vs = frozenset(vertex_ids)
        for v in vs:
            if v not in gf.vertices:
                raise FiltrationError(f"selector names unknown vertex {v!r}")
        edges = tuple(e for e in gf.edges if e[0] in vs and e[1] in vs)
        sel = cls(vs, edges)
        if not sel.is_connected():
            raise DisconnectedSelector(f"selected subgraph on {sorted(vs, key=str)} is not connected")
        return sel

    @classmethod
    def whole(cls, gf: GraphFiltration) -> "SubgraphSelector":
        return cls.induced(gf, gf.vertices)

    def is_connected(self) -> bool:
        if not self.vertices:
            return False
        adj = {v: [] for v in self.vertices}
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        start = next(iter(self.vertices))
        seen = {start}
        stack = [start]
        while stack:
            for w in adj[stack.pop()]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == len(self.vertices)


# --- JSON I/O -------------------------------------------------------------

def to_document(gf: GraphFiltration) -> dict:
    return {
        "simplices": [list(s) for s in gf.complex.simplices],
        "vertices": [{"id": v, "members": sorted(m.members)} for v, m in gf.vertices.items()],
        "edges": [[u, v] for u, v in gf.edges],
    }


def serialize(gf: GraphFiltration) -> str:
    doc = to_document(gf)
    lines = ["{", '  "simplices": [']
    lines.append(",\n".join("    " + json.dumps(s) for s in doc["simplices"]))
    lines.append("  ],")
    lines.append('  "vertices": [')
    lines.append(",\n".join("    " + json.dumps(v) for v in doc["vertices"]))
    lines.append("  ],")
    lines.append('  "edges": [')
    lines.append(",\n".join("    " + json.dumps(e) for e in doc["edges"]))
    lines.append("  ]")
    lines.append("}")
    return "\n".join(line for line in lines if line) + "\n"


def from_document(doc) -> GraphFiltration:
    if not isinstance(doc, dict):
        raise ParseError("document root must be an object")
    for key in ("simplices", "vertices", "edges"):
        if key not in doc:
            raise ParseError(f"missing field {key!r}")
        if not isinstance(doc[key], list):
            raise ParseError(f"field {key!r} must be a list")
    simplices = []
    for i, s in enumerate(doc["simplices"]):
        if not isinstance(s, list) or not all(isinstance(x, int) for x in s):
            raise ParseError(f"simplices[{i}]: expected a list of integers")
        if s != sorted(s):
            raise ParseError(f"simplices[{i}]: vertex list must be sorted")
        simplices.append(s)
    try:
        cx = GlobalComplex.from_simplices(simplices)
    except MalformedSimplex as exc:
        raise ParseError(f"simplices: {exc}") from None
    vertices = {}
    for i, v in enumerate(doc["vertices"]):
        if not isinstance(v, dict) or "id" not in v or "members" not in v:
            raise ParseError(f"vertices[{i}]: expected an object with 'id' and 'members'")
        vid = v["id"]
        if not isinstance(vid, str):
            raise ParseError(f"vertices[{i}].id: expected a string")
        if vid in vertices:
            raise ParseError(f"vertices[{i}].id: duplicate vertex id {vid!r}")
        mem = v["members"]
        if not isinstance(mem, list):
            raise ParseError(f"vertices[{i}].members: expected a list")
        for j, m in enumerate(mem):
            if not isinstance(m, int) or not 0 <= m < len(simplices):
                raise ParseError(f"vertices[{i}].members[{j}]: bad simplex index {m!r}")
        try:
            vertices[vid] = SubcomplexMask(cx, frozenset(mem))
        except ValueError as exc:
            raise ParseError(f"vertices[{i}].members: {exc}") from None
    edges = []
    for i, e in enumerate(doc["edges"]):
        if not isinstance(e, list) or len(e) != 2:
            raise ParseError(f"edges[{i}]: expected a [src, dst] pair")
        for x in e:
            if x not in vertices:
                raise ParseError(f"edges[{i}]: unknown vertex id {x!r}")
        edges.append((e[0], e[1]))
    return GraphFiltration(cx, vertices, edges)


def parse(text: str) -> GraphFiltration:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return from_document(doc)


def load(path) -> GraphFiltration:
    with open(path) as fh:
        return parse(fh.read())
