"""Small graph filtrations used by the tests, the CLI and the benchmarks."""

from __future__ import annotations

import itertools
import random

from .dagmodel import GraphFiltration, SimplexwiseDAG, SubgraphSelector, path_filtration
from .simplicial import GlobalComplex, SubcomplexMask, close_under_faces


def triangle_path() -> SimplexwiseDAG:
    """Path ``X0..X6`` adding v0, v1, v2, e01, e12, e02, t012."""
    cx = close_under_faces([(0, 1, 2)])
    order = [cx.id_of(s) for s in [(0,), (1,), (2,), (0, 1), (1, 2), (0, 2), (0, 1, 2)]]
    return path_filtration(cx, order)


def circle_vertex() -> GraphFiltration:
    """A single vertex holding a hollow triangle."""
    cx = close_under_faces([(0, 1), (1, 2), (0, 2)])
    return GraphFiltration(cx, {"C": cx.full_mask()}, [])


def _from_subsets(simplex_sets: dict, edges) -> GraphFiltration:
    """Graph filtration whose vertex spaces are the closures of the given simplex lists."""
    seed = set()
    for ss in simplex_sets.values():
        seed.update(tuple(sorted(s)) for s in ss)
    cx = close_under_faces(seed)
    vertices = {v: cx.mask(cx.closure(cx.id_of(tuple(sorted(s))) for s in ss))
                for v, ss in simplex_sets.items()}
    return GraphFiltration(cx, vertices, list(edges))


def four_punctured_sphere() -> GraphFiltration:
    """Four boundary circles A, B, C, D included into a sphere S with four holes.

    S is an octahedron with four pairwise edge-disjoint faces removed.
    """
    removed = [(0, 2, 4), (0, 3, 5), (1, 2, 5), (1, 3, 4)]
    kept = [(0, 2, 5), (0, 3, 4), (1, 2, 4), (1, 3, 5)]
    sets = {name: [(a, b), (b, c), (a, c)] for name, (a, b, c) in zip("ABCD", removed)}
    sets["S"] = kept
    return _from_subsets(sets, [(n, "S") for n in "ABCD"])


def _hollow(a, b, c):
    return [(a, b), (b, c), (a, c)]


def _tube(a, b):
    """Triangles of a cylinder between the cycles ``a`` and ``b`` (matched in order)."""
    tris = []
    for i in range(len(a)):
        j = (i + 1) % len(a)
        tris += [(a[i], a[j], b[i]), (a[j], b[i], b[j])]
    return tris


def two_sinks() -> GraphFiltration:
    """Source with two independent 1-cycles; each sink fills a different one.

    The sum of the two classes survives into both sinks, so the whole-graph
    H_1 rank is 1 although every individual basis class dies somewhere.
    """
    return _from_subsets({
        "S": _hollow(0, 1, 2) + _hollow(0, 3, 4),
        "T1": _hollow(0, 1, 2) + [(0, 3, 4)],
        "T2": [(0, 1, 2)] + _hollow(0, 3, 4),
    }, [("S", "T1"), ("S", "T2")])


def annulus_ends() -> GraphFiltration:
    """The two boundary circles A and B of an annulus N, each included into N."""
    return _from_subsets({
        "A": _hollow(0, 1, 2), "B": _hollow(3, 4, 5), "N": _tube((0, 1, 2), (3, 4, 5)),
    }, [("A", "N"), ("B", "N")])


def twisted_annuli() -> GraphFiltration:
    """Circles C1, C2 joined by two annuli identifying them with opposite orientations.

    The whole-graph H_1 rank is 0 over fields of odd characteristic and 1 over F_2.
    """
    return _from_subsets({
        "C1": _hollow(0, 1, 2), "C2": _hollow(3, 4, 5),
        "N1": _tube((0, 1, 2), (3, 4, 5)), "N2": _tube((0, 1, 2), (3, 5, 4)),
    }, [("C1", "N1"), ("C2", "N1"), ("C1", "N2"), ("C2", "N2")])


# --- genus two ---------------------------------------------------------------------

# two rings of cube cells around holes (1,1) and (5,1), joined by the bridge cell (3,1)
_RING1 = [(x, y) for x in range(3) for y in range(3) if (x, y) != (1, 1)]
_RING2 = [(x, y) for x in range(4, 7) for y in range(3) if (x, y) != (5, 1)]
_SOLID = set(_RING1) | set(_RING2) | {(3, 1)}


def _cell_faces(cell):
    """Boundary squares of the slab contributed by one cell, as corner lists."""
    x, y = cell
    out = [[(x, y, z), (x + 1, y, z), (x + 1, y + 1, z), (x, y + 1, z)] for z in (0, 1)]
    for dx, dy in ((1, 0), (-1, 0), (0, 1), (0, -1)):
        if (x + dx, y + dy) in _SOLID:
            continue
        if dx:
            xw = x + (dx > 0)
            out.append([(xw, y, 0), (xw, y + 1, 0), (xw, y + 1, 1), (xw, y, 1)])
        else:
            yw = y + (dy > 0)
            out.append([(x, yw, 0), (x + 1, yw, 0), (x + 1, yw, 1), (x, yw, 1)])
    return out


def genus_two_pieces() -> dict:
    """Triangles of the pieces X (annulus), Y (sphere with four holes), Z (holed torus).

    The surface is the boundary of a slab made of two cube rings joined by a
    bridge; squares are split along a fixed diagonal.
    """
    cells = {
        "X": [(0, 0), (0, 1), (0, 2), (1, 0), (1, 2)],
        "Y": [(2, 0), (2, 1), (2, 2), (3, 1), (4, 0), (4, 1), (4, 2)],
        "Z": list(_RING2),
    }
    pts = sorted({c for cell in _SOLID for sq in _cell_faces(cell) for c in sq})
    idx = {p: i for i, p in enumerate(pts)}
    pieces = {}
    for name, cs in cells.items():
        tris = []
        for cell in cs:
            for a, b, c, d in _cell_faces(cell):
                tris.append(tuple(sorted((idx[a], idx[b], idx[c]))))
                tris.append(tuple(sorted((idx[a], idx[c], idx[d]))))
        pieces[name] = tris
    return pieces


GENUS_TWO_EDGES = [
    ("XnY", "X"), ("XnY", "Y"), ("YnZ", "Y"), ("YnZ", "Z"),
    ("X", "XuY"), ("Y", "XuY"), ("Y", "YuZ"), ("Z", "YuZ"),
    ("XuY", "XuYuZ"), ("YuZ", "XuYuZ"),
]

# carriers of the elementary summands of the H_1 module
GENUS_TWO_CARRIERS = [
    ("XuYuZ", "XuY", "YuZ", "X", "Y", "XnY"),
    ("XuYuZ", "XuY", "YuZ", "Y", "Z", "YnZ"),
    ("XuYuZ", "XuY"),
    ("XuYuZ", "YuZ", "Z"),
    ("Y", "XnY", "YnZ"),
]


def genus_two() -> GraphFiltration:
    """The poset of X, Y, Z, their pairwise intersections XnY, YnZ and unions."""
    p = genus_two_pieces()
    cx = close_under_faces(set(p["X"]) | set(p["Y"]) | set(p["Z"]))
    space = {n: cx.closure(cx.id_of(t) for t in tris) for n, tris in p.items()}
    members = {
        "XnY": space["X"] & space["Y"],
        "YnZ": space["Y"] & space["Z"],
        "X": space["X"], "Y": space["Y"], "Z": space["Z"],
        "XuY": space["X"] | space["Y"],
        "YuZ": space["Y"] | space["Z"],
        "XuYuZ": space["X"] | space["Y"] | space["Z"],
    }
    vertices = {v: SubcomplexMask(cx, frozenset(m)) for v, m in members.items()}
    return GraphFiltration(cx, vertices, GENUS_TWO_EDGES)


# --- random instances ------------------------------------------------------------

def random_complex(rng: random.Random, n_points: int = 5, n_top: int = 6, max_dim: int = 2) -> GlobalComplex:
    """Closure of random simplices on ``n_points`` vertices."""
    seed = set()
    for _ in range(n_top):
        d = rng.randint(1, max_dim)
        seed.add(tuple(sorted(rng.sample(range(n_points), min(d + 1, n_points)))))
    seed.update((i,) for i in range(n_points))
    return close_under_faces(seed)


def freudenthal_grid(nx: int = 2, ny: int = 2, nz: int = 1) -> GlobalComplex:
    """Standard triangulation of an ``nx x ny x nz`` block of cubes in R^3."""
    def vid(p):
        return (p[0] * (ny + 1) + p[1]) * (nz + 1) + p[2]

    tets = []
    for x, y, z in itertools.product(range(nx), range(ny), range(nz)):
        for perm in itertools.permutations(range(3)):
            p = [x, y, z]
            verts = [vid(p)]
            for axis in perm:
                p[axis] += 1
                verts.append(vid(p))
            tets.append(tuple(sorted(verts)))
    return close_under_faces(tets)


def _random_subcomplex(rng, cx: GlobalComplex, size: int, max_dim: int | None = None) -> frozenset:
    """Closure of random simplices of dimension at most ``max_dim``, capped at ``size``."""
    chosen: set = set()
    order = [s for s in range(len(cx)) if max_dim is None or cx.dim_of(s) <= max_dim]
    rng.shuffle(order)
    for sid in order:
        grown = chosen | cx.closure([sid])
        if len(grown) <= size:
            chosen = set(grown)
    return frozenset(chosen)


def _addable(cx, members):
    return [s for s in range(len(cx)) if s not in members and all(f in members for f in cx.face_ids[s])]


def _removable(cx, members):
    cofaces = {f for s in members for f in cx.face_ids[s]}
    return [s for s in members if s not in cofaces]


def random_simplexwise_dag(rng: random.Random, n_vertices: int = 6, max_simplices: int = 15,
                           complex: GlobalComplex | None = None) -> SimplexwiseDAG:
    """Random DAG whose edges add at most one simplex.

    New vertices either add a simplex to an existing space or remove a maximal
    one; extra edges join every comparable pair differing by at most one
    simplex with probability one half.
    """
    cx = complex if complex is not None else random_complex(rng)
    start = rng.randint(max(1, max_simplices // 2), max_simplices)
    spaces = [_random_subcomplex(rng, cx, start, rng.choice([1, 2, None]))]
    edges = set()
    while len(spaces) < n_vertices:
        i = rng.randrange(len(spaces))
        base = spaces[i]
        grow = _addable(cx, base)
        shrink = _removable(cx, base)
        if grow and len(base) < max_simplices and (rng.random() < 0.75 or not shrink):
            new = base | {rng.choice(grow)}
            edges.add((i, len(spaces)))
        elif shrink:
            new = base - {rng.choice(shrink)}
            edges.add((len(spaces), i))
        else:
            new = base
            edges.add((i, len(spaces)))
        spaces.append(frozenset(new))
        j = len(spaces) - 1
        for u in range(j):
            a, b = spaces[u], spaces[j]
            if (u, j) in edges or (j, u) in edges:
                continue
            if a <= b and len(b - a) <= 1 and rng.random() < 0.5:
                edges.add((u, j))
            elif b < a and len(a - b) == 1 and rng.random() < 0.5:
                edges.add((j, u))
    names = [f"V{i}" for i in range(len(spaces))]
    vertices = {names[i]: SubcomplexMask(cx, s) for i, s in enumerate(spaces)}
    return SimplexwiseDAG(cx, vertices, sorted((names[u], names[v]) for u, v in edges))


def random_path(rng: random.Random, max_simplices: int = 30, n_points: int = 6) -> SimplexwiseDAG:
    """Path filtration adding the simplices of a random complex in a random face-respecting order."""
    while True:
        cx = random_complex(rng, n_points=n_points, n_top=rng.randint(2, 8))
        if len(cx) <= max_simplices:
            break
    members: set = set()
    order = []
    while len(order) < len(cx):
        sid = rng.choice(_addable(cx, members))
        members.add(sid)
        order.append(sid)
    return path_filtration(cx, order)


def random_connected_selector(rng: random.Random, dag: GraphFiltration) -> SubgraphSelector:
    """Induced selector on a random weakly connected vertex set."""
    adj = {v: set() for v in dag.vertices}
    for u, v in dag.edges:
        adj[u].add(v)
        adj[v].add(u)
    start = rng.choice(sorted(dag.vertices))
    chosen = {start}
    frontier = set(adj[start])
    target = rng.randint(1, len(dag.vertices))
    while len(chosen) < target and frontier:
        w = rng.choice(sorted(frontier))
        chosen.add(w)
        frontier |= adj[w]
        frontier -= chosen
    return SubgraphSelector.induced(dag, chosen)


def random_grid(rng: random.Random, shape=(3, 3), n_points: int = 5, n_top: int = 7) -> GraphFiltration:
    """Multi-parameter filtration on a grid; vertex ids are ``"a,b,..."``.

    Each point gets a random grade per axis and a simplex enters once all
    its points have.
    """
    cx = random_complex(rng, n_points=n_points, n_top=n_top)
    grade = [[rng.randrange(m) for m in shape] for _ in range(n_points)]
    vertices = {}
    edges = []
    for c in itertools.product(*(range(m) for m in shape)):
        members = frozenset(sid for sid, s in enumerate(cx.simplices)
                            if all(grade[v][a] <= c[a] for v in s for a in range(len(shape))))
        vertices[",".join(map(str, c))] = SubcomplexMask(cx, members)
        for a in range(len(shape)):
            if c[a] + 1 < shape[a]:
                n = c[:a] + (c[a] + 1,) + c[a + 1:]
                edges.append((",".join(map(str, c)), ",".join(map(str, n))))
    return GraphFiltration(cx, vertices, edges)
