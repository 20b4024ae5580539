"""Point-cloud applications: subsample persistence and shape comparison.

Spaces are Vietoris-Rips complexes with diameter threshold ``2r``. All of
them live inside the Rips complex of the combined sample at the largest
radius, so every edge of the graphs built here is a literal subcomplex
inclusion. Coordinates are exact rationals and distances are compared
squared, so there are no floating-point ties.
"""

from __future__ import annotations

import csv
import io
import math
import random
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import NamedTuple

from .dagmodel import FiltrationError, GraphFiltration, ParseError, SubgraphSelector
from .gmodule import PersistenceDiagram, bottleneck, diagram_from_ranks
from .simplicial import GlobalComplex, HomologyBasis, SubcomplexMask
from .ssss import RankTable, standard_persistence
from .subgraph import persistence_rank


def _decimal(x) -> Fraction:
    if isinstance(x, float):
        return Fraction(repr(x))
    return Fraction(x)


@dataclass(frozen=True)
class PointCloud:
    """Points in Euclidean space with exact rational coordinates."""

    points: tuple

    def __post_init__(self):
        pts = tuple(tuple(_decimal(c) for c in p) for p in self.points)
        if pts and len({len(p) for p in pts}) != 1:
            raise ValueError("all points must have the same dimension")
        object.__setattr__(self, "points", pts)

    def __len__(self):
        return len(self.points)

    @property
    def dim(self) -> int:
        return len(self.points[0]) if self.points else 0

    def subset(self, indices) -> "PointCloud":
        return PointCloud(tuple(self.points[i] for i in indices))

    @classmethod
    def from_csv(cls, text: str) -> "PointCloud":
        """One point per row; blank rows and ``#`` comments are skipped, a header row is allowed."""
        pts = []
        width = None
        for n, row in enumerate(csv.reader(io.StringIO(text)), start=1):
            if not row or not "".join(row).strip() or row[0].lstrip().startswith("#"):
                continue
            try:
                p = tuple(Fraction(c.strip()) for c in row)
            except (ValueError, ZeroDivisionError):
                if not pts and n == 1:
                    continue  # header
                raise ParseError(f"row {n}: non-numeric coordinate in {row!r}") from None
            if width is None:
                width = len(p)
            elif len(p) != width:
                raise ParseError(f"row {n}: expected {width} coordinates, got {len(p)}")
            pts.append(p)
        return cls(tuple(pts))

    def to_csv(self) -> str:
        return "".join(",".join(_fmt_decimal(c) for c in p) + "\n" for p in self.points)


def _fmt_decimal(x: Fraction) -> str:
    if x.denominator == 1:
        return str(x.numerator)
    return repr(float(x))


@dataclass(frozen=True)
class RadiusSchedule:
    radii: tuple

    def __post_init__(self):
        rs = tuple(_decimal(r) for r in self.radii)
        if not rs:
            raise ValueError("radius schedule is empty")
        if rs[0] < 0:
            raise ValueError("radii must be non-negative")
        for a, b in zip(rs, rs[1:]):
            if not a < b:
                raise ValueError(f"radius schedule must be strictly increasing ({a} then {b})")
        object.__setattr__(self, "radii", rs)

    def __len__(self):
        return len(self.radii)

    def __getitem__(self, i):
        return self.radii[i]

    @classmethod
    def parse(cls, spec: str) -> "RadiusSchedule":
        try:
            return cls(tuple(Fraction(s.strip()) for s in spec.split(",") if s.strip()))
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"bad radius schedule {spec!r}: {exc}") from None

    @classmethod
    def linear(cls, start, stop, n: int) -> "RadiusSchedule":
        start, stop = _decimal(start), _decimal(stop)
        if n == 1:
            return cls((start,))
        return cls(tuple(start + (stop - start) * i / (n - 1) for i in range(n)))


# --- Rips complexes --------------------------------------------------------------

def _sqdist(p, q):
    return sum((a - b) ** 2 for a, b in zip(p, q))


class RipsComplex:
    """Rips complex of a point cloud at radius ``r_max``, with diameters for sub-thresholds.

    ``mask(indices, r)`` is the Rips complex of the sub-cloud ``indices`` at
    radius ``r``, a subcomplex of the same global complex.
    """

    def __init__(self, pc: PointCloud, r_max, max_dim: int = 2):
        thr = 4 * _decimal(r_max) ** 2
        n = len(pc)
        nbr = [set() for _ in range(n)]
        d2 = {}
        for i in range(n):
            for j in range(i + 1, n):
                d = _sqdist(pc.points[i], pc.points[j])
                if d <= thr:
                    nbr[i].add(j)
                    d2[(i, j)] = d
        simplices = [(i,) for i in range(n)]
        diam = [Fraction(0)] * n
        level = [(i,) for i in range(n)]
        for _ in range(max_dim):
            nxt = []
            for s in level:
                common = set.intersection(*(nbr[v] for v in s))
                for w in sorted(c for c in common if c > s[-1]):
                    nxt.append(s + (w,))
            nxt.sort()
            simplices.extend(nxt)
            for s in nxt:
                diam.append(max(d2[(a, b)] for ai, a in enumerate(s) for b in s[ai + 1:]))
            level = nxt
        self.points = pc
        self.max_dim = max_dim
        self.r_max = _decimal(r_max)
        self.complex = GlobalComplex.from_simplices(simplices)
        self.diameter2 = diam

    def members(self, indices, r) -> frozenset:
        r = _decimal(r)
        if r > self.r_max:
            raise ValueError(f"radius {r} exceeds the construction radius {self.r_max}")
        keep = set(indices)
        thr = 4 * r * r
        cx = self.complex
        return frozenset(sid for sid, s in enumerate(cx.simplices)
                         if self.diameter2[sid] <= thr and all(v in keep for v in s))

    def mask(self, indices, r) -> SubcomplexMask:
        return SubcomplexMask(self.complex, self.members(indices, r))


def rips_complex(pc: PointCloud, r, max_dim: int = 2) -> SubcomplexMask:
    """Rips complex of ``pc`` at radius ``r`` (simplices of diameter at most ``2r``)."""
    if _decimal(r) < 0:
        raise ValueError("radius must be non-negative")
    rc = RipsComplex(pc, r, max_dim)
    return rc.complex.full_mask()


# --- parallel subsample graph ------------------------------------------------------

def build_parallel_graph(x: PointCloud, y: PointCloud, sched: RadiusSchedule,
                         max_dim: int = 2, rips: RipsComplex | None = None) -> GraphFiltration:
    """Rips chains of ``x``, ``y`` and ``x | y`` with cross edges ``X_i -> U_i``, ``Y_i -> U_i``.

    Vertex ids are ``X{i}``, ``Y{i}``, ``U{i}``. An empty ``y`` drops the Y chain.
    """
    if not isinstance(sched, RadiusSchedule):
        sched = RadiusSchedule(tuple(sched))
    combined = list(dict.fromkeys(x.points + y.points))
    index = {p: i for i, p in enumerate(combined)}
    union = PointCloud(tuple(combined))
    rc = rips or RipsComplex(union, sched.radii[-1], max_dim)
    xi = [index[p] for p in x.points]
    yi = [index[p] for p in y.points]
    ui = list(range(len(combined)))
    chains = [("X", xi)] + ([("Y", yi)] if y.points else []) + [("U", ui)]
    vertices = {}
    edges = []
    for name, idx in chains:
        for i, r in enumerate(sched.radii):
            vertices[f"{name}{i}"] = rc.mask(idx, r)
            if i:
                edges.append((f"{name}{i - 1}", f"{name}{i}"))
    for i in range(len(sched)):
        for name, _ in chains[:-1]:
            edges.append((f"{name}{i}", f"U{i}"))
    return GraphFiltration(rc.complex, vertices, edges)


def _levels(dag: GraphFiltration) -> tuple[list, int]:
    names = sorted({v.rstrip("0123456789") for v in dag.vertices})
    n = 1 + max(int(v[len(v.rstrip("0123456789")):]) for v in dag.vertices)
    return names, n


def window_selector(dag: GraphFiltration, i: int, j: int) -> SubgraphSelector:
    """All chain vertices with level in ``[i, j]`` and the edges among them."""
    names, _ = _levels(dag)
    return SubgraphSelector.induced(dag, [f"{c}{l}" for c in names for l in range(i, j + 1)
                                         if f"{c}{l}" in dag.vertices])


@dataclass
class WindowPersistence:
    """Window ranks ``R(i, j)``, the inverted diagram and run metadata."""

    ranks: dict
    diagram: PersistenceDiagram
    radius_diagram: PersistenceDiagram
    schedule: tuple
    k: int
    field: object
    metadata: dict = dc_field(default_factory=dict)

    def rank_table(self) -> RankTable:
        return RankTable({(i, j, self.k): r for (i, j), r in self.ranks.items()})


def _to_radius(diag: PersistenceDiagram, radii) -> PersistenceDiagram:
    return diag.map_values(lambda t: float(radii[t]))


def _finish(ranks, n, radii, k, field, strict, meta) -> WindowPersistence:
    diag = diagram_from_ranks(ranks, n, strict=strict)
    meta = dict(meta)
    meta.update({
        "k": k,
        "field": field.name,
        "schedule": [_fmt_decimal(r) for r in radii],
        "flags": list(diag.flags),
        "diagram_units": "index; radius_diagram maps index t to schedule[t]",
    })
    return WindowPersistence(ranks, diag, _to_radius(diag, radii), tuple(radii), k, field, meta)


def subsample_persistence(dag: GraphFiltration, k: int, field, sched: RadiusSchedule | None = None,
                          strict: bool = False) -> WindowPersistence:
    """Window ranks of a parallel graph and the diagram they invert to.

    ``R(i, j)`` is the subgraph persistence rank of the window spanning
    levels ``i..j`` of every chain, cross edges included.
    """
    _, n = _levels(dag)
    cache: dict = {}
    ranks = {}
    for i in range(n):
        for j in range(i, n):
            ranks[(i, j)] = persistence_rank(dag, window_selector(dag, i, j), k, field, cache=cache).rank
    radii = sched.radii if sched is not None else tuple(range(n))
    meta = {"graph": "parallel", "windows": "levels i..j of all chains plus cross edges",
            "levels": n}
    return _finish(ranks, n, radii, k, field, strict, meta)


def sample_split(n_total: int, n_sub: int, seed: int) -> tuple[list, list]:
    """Two disjoint random index sets of size ``n_sub``."""
    if 2 * n_sub > n_total:
        raise ValueError("subsamples do not fit in the base sample")
    idx = list(range(n_total))
    random.Random(seed).shuffle(idx)
    return sorted(idx[:n_sub]), sorted(idx[n_sub:2 * n_sub])


def subsample_pipeline(base: PointCloud, sched: RadiusSchedule, n_sub: int, seed: int,
                       k: int = 1, field=None, max_dim: int = 2) -> WindowPersistence:
    """Split ``base`` into two subsamples and compute the parallel-graph diagram."""
    from .linalg import PrimeField
    field = field or PrimeField(46337)
    xi, yi = sample_split(len(base), n_sub, seed)
    dag = build_parallel_graph(base.subset(xi), base.subset(yi), sched, max_dim)
    res = subsample_persistence(dag, k, field, sched)
    res.metadata.update({"seed": seed, "subsample_size": n_sub, "base_size": len(base),
                         "max_dim": max_dim})
    return res


# --- comparison graph -------------------------------------------------------------

def _check_monotone(masks, name):
    for i in range(1, len(masks)):
        if not masks[i - 1].members <= masks[i].members:
            raise FiltrationError(f"{name} is not a filtration: level {i - 1} is not inside level {i}")


def build_comparison_graph(xf, yf) -> GraphFiltration:
    """Per level ``I_i = X_i & Y_i``, ``X_i``, ``Y_i``, ``U_i = X_i | Y_i`` with the square edges.

    Consecutive levels of every column are joined by vertical edges.
    """
    if len(xf) != len(yf):
        raise FiltrationError("filtrations have different lengths")
    if not xf:
        raise FiltrationError("filtrations are empty")
    cx = xf[0].complex
    if any(m.complex is not cx and m.complex != cx for m in list(xf) + list(yf)):
        raise FiltrationError("filtrations live in different complexes")
    _check_monotone(xf, "first filtration")
    _check_monotone(yf, "second filtration")
    vertices = {}
    edges = []
    for i, (a, b) in enumerate(zip(xf, yf)):
        vertices[f"I{i}"] = SubcomplexMask(cx, a.members & b.members)
        vertices[f"X{i}"] = a
        vertices[f"Y{i}"] = b
        vertices[f"U{i}"] = SubcomplexMask(cx, a.members | b.members)
        edges += [(f"I{i}", f"X{i}"), (f"I{i}", f"Y{i}"), (f"X{i}", f"U{i}"), (f"Y{i}", f"U{i}")]
        if i:
            edges += [(f"{c}{i - 1}", f"{c}{i}") for c in "IXYU"]
    return GraphFiltration(cx, vertices, edges)


def comparison_window_ranks(dag: GraphFiltration, k: int, field, exact: bool = False) -> dict:
    """``R(i, j)`` for the windows of a comparison graph.

    A window has the single source ``I_i`` and single sink ``U_j``, so its
    rank is that of ``H_k(I_i) -> H_k(U_j)``; ``exact=True`` runs the general
    engine instead.
    """
    _, n = _levels(dag)
    if exact:
        cache: dict = {}
        return {(i, j): persistence_rank(dag, window_selector(dag, i, j), k, field, cache=cache).rank
                for i in range(n) for j in range(i, n)}
    from .linalg import Matrix, rank
    hom = {v: HomologyBasis(dag.complex, dag.members(v), k, field)
           for v in [f"I{i}" for i in range(n)] + [f"U{j}" for j in range(n)]}
    out = {}
    for i in range(n):
        src = hom[f"I{i}"]
        for j in range(i, n):
            dst = hom[f"U{j}"]
            cols = [dst.coords(z) for z in src.reps]
            out[(i, j)] = rank(Matrix.from_columns(field, cols, dst.betti)) if cols and dst.betti else 0
    return out


def _path_diagram(masks, field, k) -> PersistenceDiagram:
    cx = masks[0].complex
    vertices = {f"P{i}": m for i, m in enumerate(masks)}
    names = list(vertices)
    path = GraphFiltration(cx, vertices, list(zip(names, names[1:])))
    return PersistenceDiagram.from_pairs(standard_persistence(path, k, field))


class ComparisonResult(NamedTuple):
    diagram_x: PersistenceDiagram
    diagram_y: PersistenceDiagram
    diagram_g: PersistenceDiagram
    bottleneck_x: float
    bottleneck_y: float


def compare_shapes(xf, yf, k: int, field, exact: bool = False, strict: bool = False) -> ComparisonResult:
    """Standard diagrams of both filtrations, the comparison-graph diagram and both distances.

    Diagrams are in level-index units.
    """
    dag = build_comparison_graph(xf, yf)
    _, n = _levels(dag)
    dg = diagram_from_ranks(comparison_window_ranks(dag, k, field, exact=exact), n, strict=strict)
    dx = _path_diagram(xf, field, k)
    dy = _path_diagram(yf, field, k)
    return ComparisonResult(dx, dy, dg, bottleneck(dx, dg), bottleneck(dy, dg))


def rips_filtrations(x: PointCloud, y: PointCloud, sched: RadiusSchedule, max_dim: int = 2):
    """Rips filtrations of ``x`` and ``y`` inside the Rips complex of their union."""
    combined = list(dict.fromkeys(x.points + y.points))
    index = {p: i for i, p in enumerate(combined)}
    rc = RipsComplex(PointCloud(tuple(combined)), sched.radii[-1], max_dim)
    xi = [index[p] for p in x.points]
    yi = [index[p] for p in y.points]
    return [rc.mask(xi, r) for r in sched.radii], [rc.mask(yi, r) for r in sched.radii]


def dominant_persistence(diag: PersistenceDiagram, cap) -> float:
    """Largest lifetime, essential points measured up to ``cap``."""
    p = diag.persistences(cap)
    return p[0] if p else 0.0


# --- samplers ---------------------------------------------------------------------

def _round(x: float, digits: int = 6) -> Fraction:
    return Fraction(f"{x:.{digits}f}")


def sample_circle(n: int, seed: int, radius: float = 1.0, noise: float = 0.0) -> PointCloud:
    """``n`` random points on a circle with optional radial Gaussian noise."""
    rng = random.Random(seed)
    pts = []
    for _ in range(n):
        t = rng.uniform(0, 2 * math.pi)
        r = radius + (rng.gauss(0, noise) if noise else 0.0)
        pts.append((_round(r * math.cos(t)), _round(r * math.sin(t))))
    return PointCloud(tuple(pts))


def sample_annulus(n: int, seed: int, inner: float = 1.0, outer: float = 1.5) -> PointCloud:
    """``n`` points uniform (by area) in the annulus ``inner <= |p| <= outer``."""
    rng = random.Random(seed)
    pts = []
    for _ in range(n):
        t = rng.uniform(0, 2 * math.pi)
        r = math.sqrt(rng.uniform(inner ** 2, outer ** 2))
        pts.append((_round(r * math.cos(t)), _round(r * math.sin(t))))
    return PointCloud(tuple(pts))
