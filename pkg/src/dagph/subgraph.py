"""Persistent homology of a fixed connected subgraph of a graph filtration.

``persistence_rank`` computes the largest space that injects compatibly into
every ``H_k(X_v)`` of the subgraph. Edges are inserted one at a time; for each
component of the partial subgraph we keep a basis of the space ``L`` of
compatible families of cycle classes, and an edge ``(u, v)`` cuts ``L`` down to
the families with ``f(z_u) - z_v`` a boundary in ``X_v``. The answer is
``min_v dim pi_v(L)``: a generic subspace of that dimension avoids every
kernel of ``L -> H_k(X_v)`` and no larger one can.

The per-vertex state ``M_v = (B | Z | C)`` of candidate and forbidden chains is
kept as well. ``add_edge``/``propagate`` implement the four local replacement
rules (modulo boundaries); that local fixpoint is exact for single-source
single-sink subgraphs and is exposed as ``local_persistence_rank``.
``oracle_rank`` is an independent brute-force check in homology coordinates.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field as dc_field

from .dagmodel import DisconnectedSelector, GraphFiltration, SubgraphSelector
from .gmodule import homology_module
from .linalg import (Matrix, Subspace, _rref_rows, nullspace, orthogonalize,
                     rank_of_rows)
from .simplicial import HomologyBasis


class InstanceTooLarge(ValueError):
    pass


# --- sparse chain helpers -------------------------------------------------------

def _combine(field, terms):
    """Sum of ``coef * chain`` over ``terms``; chains are sparse dicts."""
    out: dict = {}
    get = out.get
    if field.is_rational:
        for c, chain in terms:
            if c:
                for i, x in chain.items():
                    out[i] = get(i, 0) + c * x
    else:
        p = field.p
        for c, chain in terms:
            if c:
                for i, x in chain.items():
                    out[i] = (get(i, 0) + c * x) % p
    return {i: y for i, y in out.items() if y}


def _dense(field, chains, keys=None):
    """Rows = chains as dense vectors over the union of their supports."""
    if keys is None:
        keys = sorted(set().union(*[c.keys() for c in chains])) if chains else []
    z = field.zero
    return [[c.get(i, z) for i in keys] for c in chains], keys


def _chain_rank(field, chains) -> int:
    rows, keys = _dense(field, chains)
    return rank_of_rows(field, rows, len(keys))


def _relations(field, chains) -> list[tuple]:
    """Basis of coefficient vectors ``a`` with ``sum a_t chains[t] = 0``."""
    if not chains:
        return []
    rows, keys = _dense(field, chains)
    if not keys:
        return [tuple(field.one if i == j else field.zero for i in range(len(chains)))
                for j in range(len(chains))]
    return nullspace(Matrix(field, len(keys), len(chains),
                            tuple(tuple(r[i] for r in rows) for i in range(len(keys)))))


# --- exact engine ---------------------------------------------------------------

class FamilySpace:
    """Basis of compatible families of classes on one component of the partial subgraph.

    A generator assigns each vertex a homology class, as sparse coordinates
    ``{i: c}`` in that vertex's representative basis. Merges only record
    coefficient rows over the parts' generators; values at a vertex are
    evaluated on demand and memoized. An extension node (``rows is None``)
    keeps the generators of its single part and adds one vertex whose values
    are stored directly.
    """

    def __init__(self, field, vertices, parts=(), rows=(), leaf=None):
        self.field = field
        self.vertices = set(vertices)
        self.parts = list(parts)
        self.rows = list(rows)
        self._memo = {}
        if leaf is not None:
            v, n = leaf
            self._memo[v] = [{i: field.one} for i in range(n)]
            self.rows = [None] * n

    @classmethod
    def extension(cls, field, part, v, values):
        node = cls(field, part.vertices | {v}, [part])
        node.rows = None
        node._memo[v] = values
        node._own = v
        return node

    def __len__(self):
        return len(self.parts[0]) if self.rows is None else len(self.rows)

    def at(self, v) -> list[dict]:
        """Values of every generator at vertex ``v``."""
        if v in self._memo:
            return self._memo[v]
        if self.rows is None:
            return self.parts[0].at(v)
        offset = 0
        for part in self.parts:
            if v in part.vertices:
                vals = part.at(v)
                n = len(part)
                out = [_combine(self.field, zip(r[offset:offset + n], vals)) for r in self.rows]
                self._memo[v] = out
                return out
            offset += len(part)
        raise KeyError(v)

    def all_values(self) -> dict:
        """Values of every generator at every vertex, composing rows top-down once."""
        f = self.field
        out = {}
        stack = [(self, [{i: f.one} for i in range(len(self))])]
        while stack:
            node, coef = stack.pop()  # coef[g] = sparse row over node's generators
            if not node.parts or node.rows is None:
                v = node._own if node.parts else next(iter(node.vertices))
                base = node._memo[v]
                out[v] = [_combine(f, [(c, base[i]) for i, c in row.items()]) for row in coef]
                if node.parts:
                    stack.append((node.parts[0], coef))
                continue
            offset = 0
            for part in node.parts:
                n = len(part)
                cols = [{j: c for j, c in enumerate(r[offset:offset + n]) if c}
                        for r in node.rows]
                stack.append((part, [_combine(f, [(c, cols[i]) for i, c in row.items()])
                                     for row in coef]))
                offset += n
        return out


def _to_chain(field, coords, h) -> dict:
    """Cycle representing the class with the given coordinates."""
    return _combine(field, [(c, h.reps[i]) for i, c in coords.items()])


def _edge_order(dag, sel):
    """Selector edges sorted by a topological order of the selector's vertices."""
    rank = {v: i for i, v in enumerate(dag.vertices)}
    indeg = {v: 0 for v in sel.vertices}
    succ = {v: [] for v in sel.vertices}
    for u, v in sel.edges:
        indeg[v] += 1
        succ[u].append(v)
    ready = sorted((v for v, d in indeg.items() if d == 0), key=rank.get)
    topo = {}
    while ready:
        u = ready.pop(0)
        topo[u] = len(topo)
        for w in succ[u]:
            indeg[w] -= 1
            if indeg[w] == 0:
                ready.append(w)
        ready.sort(key=rank.get)
    return sorted(sel.edges, key=lambda e: (topo[e[0]], rank[e[0]], rank[e[1]]))


@dataclass
class PersistenceResult:
    selector: SubgraphSelector
    k: int
    field: object
    rank: int
    projection_dims: dict = dc_field(default_factory=dict)
    states: dict | None = None
    family_dim: int = 0


def _homology(dag, vertices, k, field, cache):
    out = {}
    for v in vertices:
        key = (v, k, field)
        if cache is not None and key in cache:
            out[v] = cache[key]
        else:
            out[v] = HomologyBasis(dag.complex, dag.members(v), k, field)
            if cache is not None:
                cache[key] = out[v]
    return out


def _inclusion(hom, u, v, k, field, cache):
    """Coordinates in ``H(v)`` of the representatives of ``H(u)``."""
    key = ("map", u, v, k, field)
    if cache is not None and key in cache:
        return cache[key]
    z = field.zero
    out = [{i: c for i, c in enumerate(hom[v].coords(rep)) if c != z} for rep in hom[u].reps]
    if cache is not None:
        cache[key] = out
    return out


def compatible_families(dag: GraphFiltration, sel: SubgraphSelector, k: int, field,
                        order=None, cache=None):
    """Grow the family space edge by edge; returns ``(FamilySpace, homology)``."""
    if not sel.is_connected():
        raise DisconnectedSelector("selector is not connected")
    hom = _homology(dag, sel.vertices, k, field, cache)
    comp_of = {}
    for v in sel.vertices:
        comp_of[v] = FamilySpace(field, [v], leaf=(v, hom[v].betti))
    edges = _edge_order(dag, sel) if order is None else list(order)
    minus = field(-1)
    for u, v in edges:
        a, b = comp_of[u], comp_of[v]
        img = _inclusion(hom, u, v, k, field, cache)

        def push(x):
            return _combine(field, [(c, img[i]) for i, c in x.items()])
        if a is b:
            diffs = [_combine(field, [(field.one, push(x)), (minus, y)])
                     for x, y in zip(a.at(u), a.at(v))]
            new = FamilySpace(field, a.vertices, [a], _relations(field, diffs))
        elif not b.parts:
            # b is a lone vertex with the identity basis: each family extends uniquely
            new = FamilySpace.extension(field, a, v, [push(x) for x in a.at(u)])
        else:
            cols = [push(x) for x in a.at(u)] + [_combine(field, [(minus, y)]) for y in b.at(v)]
            new = FamilySpace(field, a.vertices | b.vertices, [a, b], _relations(field, cols))
        for w in new.vertices:
            comp_of[w] = new
    return comp_of[next(iter(sel.vertices))], hom


def persistence_rank(dag: GraphFiltration, sel: SubgraphSelector, k: int, field,
                     order=None, cache=None, return_states: bool = False) -> PersistenceResult:
    """Dimension of the ``sel``-persistent homology group in degree ``k``."""
    fam, hom = compatible_families(dag, sel, k, field, order=order, cache=cache)
    values = fam.all_values()
    fam._memo.update(values)
    proj = {v: _chain_rank(field, values[v]) for v in sel.vertices}
    r = min(proj.values())
    small = (not field.is_rational) and field.p < len(sel.vertices)
    p_basis = None
    if small or return_states:
        p_basis = _choose_generic(field, fam, sel.vertices, r if not small else None)
        r = len(p_basis)
    res = PersistenceResult(sel, k, field, r, proj, family_dim=len(fam))
    if return_states:
        res.states = _resting_states(dag, sel, k, field, fam, hom, p_basis)
    return res


def _candidates(field, m):
    """Points ``(1, t, t^2, ...)`` on the moment curve; any proper subspace holds < m of them."""
    limit = None if field.is_rational else field.p
    t = 0
    while limit is None or t < limit:
        yield tuple(field(t) ** i if field.is_rational else pow(t, i, field.p) for i in range(m))
        t += 1


def _injective_everywhere(field, fam, vertices, vecs):
    for v in vertices:
        vals = fam.at(v)
        chains = [_combine(field, zip(x, vals)) for x in vecs]
        if _chain_rank(field, chains) < len(vecs):
            return False
    return True


def _choose_generic(field, fam, vertices, target):
    """A basis (coefficient vectors) of a subspace of ``L`` injecting at every vertex.

    ``target=None`` asks for the maximum over a small prime field: a greedy
    pass gives a lower bound and larger dimensions are searched exhaustively.
    """
    m = len(fam)
    if target is not None:
        chosen = []
        for x in _candidates(field, m):
            if len(chosen) == target:
                break
            if _injective_everywhere(field, fam, vertices, chosen + [x]):
                chosen.append(x)
        if len(chosen) == target:
            return chosen
        if field.is_rational:
            raise AssertionError("moment-curve search failed over the rationals")
    upper = min((_chain_rank(field, fam.at(v)) for v in vertices), default=0)
    best = []
    for x in itertools.product(range(field.p), repeat=m):
        if len(best) == upper:
            return best
        if any(x) and _injective_everywhere(field, fam, vertices, best + [list(x)]):
            best.append(list(x))
    for r in range(upper, len(best), -1):
        if field.p ** (r * (m - r)) > 50000:
            raise InstanceTooLarge(f"exhaustive search for a {r}-dimensional subspace of "
                                   f"F_{field.p}^{m} is too large")
        for P in _all_subspaces(field, m, r):
            if _injective_everywhere(field, fam, vertices, P):
                return P
    return best


# --- vertex states ----------------------------------------------------------------

@dataclass
class VertexState:
    """Candidate chains ``W = Z + B`` and forbidden chains ``B`` at one vertex.

    Coordinates are the k-simplices of ``X_v`` in id order. Over the rationals
    ``M`` holds pairwise-orthogonal columns partitioned ``(B | Z | C)``.
    """

    vertex: object
    simplices: tuple
    field: object
    forbidden: Subspace
    candidate: Subspace
    M: Matrix | None = None

    def __post_init__(self):
        if self.M is None and self.field.is_rational:
            self.M = _orthogonal_frame(self.field, self.forbidden, self.candidate, len(self.simplices))

    @property
    def s(self):
        return len(self.simplices)

    @property
    def b(self):
        return self.forbidden.dim

    @property
    def z(self):
        return self.candidate.dim - self.forbidden.dim

    @property
    def c(self):
        return self.s - self.candidate.dim

    def blocks(self):
        """Column blocks ``(B, Z, C)`` of ``M`` (rational backend)."""
        cols = self.M.columns()
        return cols[:self.b], cols[self.b:self.b + self.z], cols[self.b + self.z:]

    def with_spaces(self, forbidden, candidate):
        return VertexState(self.vertex, self.simplices, self.field, forbidden, candidate)


def _orthogonal_frame(field, forbidden, candidate, s):
    cols = [list(r) for r in forbidden.basis] + [list(r) for r in candidate.basis]
    cols += [[field.one if i == j else field.zero for i in range(s)] for j in range(s)]
    if s == 0:
        return Matrix(field, 0, 0, ())
    m, _ = orthogonalize(Matrix.from_columns(field, cols, s))
    return m


def _dense_vec(chain, simplices, field):
    z = field.zero
    return [chain.get(i, z) for i in simplices]


def init_vertex_state(dag: GraphFiltration, v, k: int, field, homology=None) -> VertexState:
    """B spans the boundaries and B + Z the cycles of ``X_v``; C completes a basis."""
    h = homology or HomologyBasis(dag.complex, dag.members(v), k, field)
    simp = tuple(h.kchains)
    bvecs = [_dense_vec(piv, simp, field) for piv in h.boundaries.pivots.values()]
    zvecs = [_dense_vec(z, simp, field) for z in h.cycles]
    B = Subspace.span(field, bvecs, len(simp))
    W = Subspace.span(field, bvecs + zvecs, len(simp))
    return VertexState(v, simp, field, B, W)


def _resting_states(dag, sel, k, field, fam, hom, p_basis):
    states = {}
    for v in sel.vertices:
        base = init_vertex_state(dag, v, k, field, hom[v])
        reps = []
        for x in p_basis:
            coords = _combine(field, zip(x, fam.at(v)))
            reps.append(_dense_vec(_to_chain(field, coords, hom[v]), base.simplices, field))
        W = Subspace.span(field, list(base.forbidden.basis) + reps, base.s)
        states[v] = base.with_spaces(base.forbidden, W)
    return states


@dataclass
class EdgeContext:
    """Coordinate inclusion ``C_k(X_i) -> C_k(X_j)`` and the extra coordinate, if any."""

    edge: tuple
    positions: tuple  # where each coordinate of i lands in j
    extra: int | None  # index in j of the newly added k-simplex (u_ij), if one

    @classmethod
    def between(cls, si: VertexState, sj: VertexState) -> "EdgeContext":
        where = {sid: n for n, sid in enumerate(sj.simplices)}
        positions = tuple(where[sid] for sid in si.simplices)
        extra = sorted(set(range(sj.s)) - set(positions))
        return cls((si.vertex, sj.vertex), positions, extra[0] if len(extra) == 1 else None)

    def unit_extra(self, field, n):
        if self.extra is None:
            return None
        return tuple(field.one if i == self.extra else field.zero for i in range(n))


def _image(space: Subspace, ctx: EdgeContext, n):
    return space.embed(ctx.positions, n)


def _preimage(space: Subspace, ctx: EdgeContext):
    return space.restrict(ctx.positions)


def add_edge(si: VertexState, sj: VertexState, ctx: EdgeContext | None = None):
    """Apply the four replacement rules across ``i -> j`` until they are stable.

    Working modulo forbidden chains:
    ``W_j <- W_j & (f W_i + B_j)``, ``W_i <- W_i & (f^-1 W_j + B_i)``,
    ``B_i <- B_i + (W_i & f^-1 B_j)``, ``B_j <- B_j + (W_j & f B_i)``.
    """
    ctx = ctx or EdgeContext.between(si, sj)
    Bi, Wi, Bj, Wj = si.forbidden, si.candidate, sj.forbidden, sj.candidate
    nj = sj.s
    while True:
        Wj2 = Wj & (_image(Wi, ctx, nj) + Bj)
        Wi2 = Wi & (_preimage(Wj2, ctx) + Bi)
        Bi2 = Bi + (Wi2 & _preimage(Bj, ctx))
        Bj2 = Bj + (Wj2 & _image(Bi2, ctx, nj))
        if (Wj2, Wi2, Bi2, Bj2) == (Wj, Wi, Bi, Bj):
            break
        Wj, Wi, Bi, Bj = Wj2, Wi2, Bi2, Bj2
    new_i = si if (Bi, Wi) == (si.forbidden, si.candidate) else si.with_spaces(Bi, Wi)
    new_j = sj if (Bj, Wj) == (sj.forbidden, sj.candidate) else sj.with_spaces(Bj, Wj)
    return new_i, new_j


def propagate(states: dict, edges, seed=None, trace=None) -> int:
    """Re-apply ``add_edge`` over a FIFO worklist until no edge is deficient.

    ``states`` is updated in place; returns the number of state updates.
    ``trace``, if given, receives ``(vertex, old, new)`` for each update.
    """
    edges = list(edges)
    incident = {}
    for e in edges:
        incident.setdefault(e[0], []).append(e)
        incident.setdefault(e[1], []).append(e)
    queue = deque(edges if seed is None else seed)
    queued = set(queue)
    updates = 0
    while queue:
        e = queue.popleft()
        queued.discard(e)
        i, j = e
        ni, nj = add_edge(states[i], states[j])
        for v, new in ((i, ni), (j, nj)):
            if new is not states[v]:
                if trace is not None:
                    trace.append((v, states[v], new))
                states[v] = new
                updates += 1
                for f in incident.get(v, []):
                    if f != e and f not in queued:
                        queue.append(f)
                        queued.add(f)
    return updates


def local_persistence_rank(dag: GraphFiltration, sel: SubgraphSelector, k: int, field,
                           order=None, trace=None):
    """Fixpoint of the local replacement rules; returns ``(min z_v, states, updates)``.

    Exact on single-source single-sink subgraphs; on general subgraphs the
    forbidden spaces can over-accumulate, see :func:`persistence_rank`.
    """
    if not sel.is_connected():
        raise DisconnectedSelector("selector is not connected")
    states = {v: init_vertex_state(dag, v, k, field) for v in sel.vertices}
    done = []
    updates = 0
    for e in (_edge_order(dag, sel) if order is None else order):
        done.append(e)
        updates += propagate(states, done, seed=[e], trace=trace)
    return min(s.z for s in states.values()), states, updates


def fixpoint_violations(states: dict, edges, exact: bool = True) -> list[str]:
    """Edges where the resting invariants fail.

    ``exact=True`` checks ``f(W_i) + B_j = W_j`` and ``W_i & f^-1(B_j) = B_i``;
    ``exact=False`` checks the inclusions the local rules guarantee.
    """
    bad = []
    for i, j in edges:
        si, sj = states[i], states[j]
        ctx = EdgeContext.between(si, sj)
        img = _image(si.candidate, ctx, sj.s) + sj.forbidden
        pre = si.candidate & _preimage(sj.forbidden, ctx)
        if exact:
            if img != sj.candidate:
                bad.append(f"{i}->{j}: f(W_i)+B_j != W_j")
            if pre != si.forbidden:
                bad.append(f"{i}->{j}: W_i & f^-1(B_j) != B_i")
        else:
            if not sj.candidate <= img:
                bad.append(f"{i}->{j}: W_j not inside f(W_i)+B_j")
            if not pre <= si.forbidden:
                bad.append(f"{i}->{j}: W_i & f^-1(B_j) not inside B_i")
    return bad


# --- oracle -----------------------------------------------------------------------

def _kernel_projections(dag, sel, k, field):
    mod = homology_module(dag, sel, k, field)
    verts = list(mod.vertices)
    off = {}
    n = 0
    for v in verts:
        off[v] = n
        n += mod.dims[v]
    rows = []
    for (u, v), m in mod.maps.items():
        for r in range(mod.dims[v]):
            row = [field.zero] * n
            for c in range(mod.dims[u]):
                row[off[u] + c] = m[r, c]
            row[off[v] + r] = field(-1)
            rows.append(row)
    if n == 0:
        return [], {v: [] for v in verts}
    L = nullspace(Matrix(field, len(rows), n, tuple(tuple(r) for r in rows))) if rows else \
        [tuple(field.one if i == j else field.zero for i in range(n)) for j in range(n)]
    proj = {v: [x[off[v]:off[v] + mod.dims[v]] for x in L] for v in verts}
    return L, proj


def oracle_rank(dag: GraphFiltration, sel: SubgraphSelector, k: int, field,
                max_exhaustive_dim: int = 4, max_exhaustive_prime: int = 5) -> int:
    """Brute-force rank from the space ``L`` of compatible homology families.

    Over the rationals (or primes at least the vertex count) this is
    ``dim L - max_v dim K_v`` with ``K_v`` the kernel of ``L -> H_k(X_v)``.
    Over smaller primes every subspace of ``L`` is tried.
    """
    if not sel.is_connected():
        raise DisconnectedSelector("selector is not connected")
    L, proj = _kernel_projections(dag, sel, k, field)
    dimL = len(L)
    if dimL == 0:
        return 0
    # kernel of L -> H_k(X_v), in coordinates of the L basis
    kernels = {}
    for v, images in proj.items():
        width = len(images[0])
        if width == 0:
            kernels[v] = [tuple(field.one if i == j else field.zero for i in range(dimL))
                          for j in range(dimL)]
        else:
            kernels[v] = nullspace(Matrix(field, width, dimL,
                                          tuple(tuple(x[r] for x in images) for r in range(width))))
    if field.is_rational or field.p >= len(sel.vertices):
        return dimL - max(len(kv) for kv in kernels.values())
    if dimL > max_exhaustive_dim or field.p > max_exhaustive_prime:
        raise InstanceTooLarge(f"exhaustive search needs dim L <= {max_exhaustive_dim} and "
                               f"p <= {max_exhaustive_prime} (got {dimL}, {field.p})")
    for r in range(dimL, 0, -1):
        for P in _all_subspaces(field, dimL, r):
            if all(rank_of_rows(field, list(P) + list(kv), dimL) == r + len(kv)
                   for kv in kernels.values()):
                return r
    return 0


def _all_subspaces(field, n, r):
    """Every r-dimensional subspace of F_p^n, as its rref basis rows."""
    for pivots in itertools.combinations(range(n), r):
        free = [(i, c) for i in range(r) for c in range(pivots[i] + 1, n) if c not in pivots]
        for values in itertools.product(range(field.p), repeat=len(free)):
            rows = [[0] * n for _ in range(r)]
            for i, pc in enumerate(pivots):
                rows[i][pc] = 1
            for (i, c), x in zip(free, values):
                rows[i][c] = x
            yield rows
