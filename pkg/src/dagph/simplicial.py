"""Simplicial complexes, boundary operators and homology over a field.

A :class:`GlobalComplex` holds every simplex that any vertex space of a graph
filtration may use. Simplex ids are face-ordered (by dimension, then
lexicographically), so a k-chain of any subcomplex can be written as a sparse
``{simplex_id: coefficient}`` dict and inclusions of subcomplexes act on
chains as the identity.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from itertools import combinations
from typing import Iterable

from .linalg import Matrix, SparseEchelon, rank


class MalformedSimplex(ValueError):
    pass


def _normalize(simplex) -> tuple:
    verts = tuple(int(v) for v in simplex)
    if len(verts) == 0:
        raise MalformedSimplex("empty simplex")
    if any(v < 0 for v in verts):
        raise MalformedSimplex(f"negative vertex id in {list(simplex)}")
    s = tuple(sorted(verts))
    if len(set(s)) != len(s):
        raise MalformedSimplex(f"duplicate vertices in {list(simplex)}")
    return s


def faces(simplex: tuple) -> list[tuple]:
    """Codimension-one faces; face ``i`` omits vertex position ``i``."""
    if len(simplex) == 1:
        return []
    return [simplex[:i] + simplex[i + 1:] for i in range(len(simplex))]


@dataclass(frozen=True, eq=False)
class GlobalComplex:
    """An abstract simplicial complex with face-ordered simplex ids."""

    simplices: tuple
    index: dict = dc_field(repr=False)
    face_ids: tuple = dc_field(repr=False)

    @classmethod
    def from_simplices(cls, simplices: Iterable) -> "GlobalComplex":
        """Build from a list that must already be closed and face-ordered."""
        simplices = tuple(_normalize(s) for s in simplices)
        index = {}
        for i, s in enumerate(simplices):
            if s in index:
                raise MalformedSimplex(f"simplex {list(s)} listed twice")
            index[s] = i
        face_ids = []
        for i, s in enumerate(simplices):
            fid = []
            for f in faces(s):
                j = index.get(f)
                if j is None:
                    raise MalformedSimplex(f"face {list(f)} of {list(s)} is missing")
                if j >= i:
                    raise MalformedSimplex(f"face {list(f)} listed after {list(s)}")
                fid.append(j)
            face_ids.append(tuple(fid))
        return cls(simplices, index, tuple(face_ids))

    def __len__(self):
        return len(self.simplices)

    def __eq__(self, other):
        return isinstance(other, GlobalComplex) and self.simplices == other.simplices

    def __hash__(self):
        return hash(self.simplices)

    def dim_of(self, sid: int) -> int:
        return len(self.simplices[sid]) - 1

    @property
    def dimension(self) -> int:
        return max((len(s) - 1 for s in self.simplices), default=-1)

    def id_of(self, simplex) -> int:
        return self.index[_normalize(simplex)]

    def ids_of_dim(self, k: int, members=None) -> list[int]:
        src = range(len(self.simplices)) if members is None else sorted(members)
        return [i for i in src if len(self.simplices[i]) == k + 1]

    def closure(self, ids: Iterable[int]) -> frozenset:
        out = set()
        stack = list(ids)
        while stack:
            i = stack.pop()
            if i not in out:
                out.add(i)
                stack.extend(self.face_ids[i])
        return frozenset(out)

    def boundary_chain(self, sid: int, field) -> dict:
        """Sparse boundary of one simplex, signs (-1)^i by omitted position."""
        out = {}
        for i, f in enumerate(self.face_ids[sid]):
            out[f] = field(-1 if i % 2 else 1)
        return out

    def mask(self, members: Iterable[int]) -> "SubcomplexMask":
        return SubcomplexMask(self, frozenset(members))

    def full_mask(self) -> "SubcomplexMask":
        return SubcomplexMask(self, frozenset(range(len(self.simplices))))


def close_under_faces(seed: Iterable) -> GlobalComplex:
    """Smallest complex containing every seed simplex, ids face-ordered."""
    allsimp = set()
    for s in seed:
        s = _normalize(s)
        for r in range(1, len(s) + 1):
            allsimp.update(combinations(s, r))
    return GlobalComplex.from_simplices(sorted(allsimp, key=lambda s: (len(s), s)))


@dataclass(frozen=True)
class SubcomplexMask:
    complex: GlobalComplex
    members: frozenset

    def __post_init__(self):
        n = len(self.complex)
        for i in self.members:
            if not 0 <= i < n:
                raise ValueError(f"simplex id {i} out of range")
            for f in self.complex.face_ids[i]:
                if f not in self.members:
                    raise ValueError(
                        f"mask not closed: face {list(self.complex.simplices[f])} of "
                        f"{list(self.complex.simplices[i])} missing")

    def ids_of_dim(self, k: int) -> list[int]:
        return self.complex.ids_of_dim(k, self.members)

    def count(self, k: int) -> int:
        return len(self.ids_of_dim(k))

    def __le__(self, other: "SubcomplexMask") -> bool:
        return self.members <= other.members

    def __len__(self):
        return len(self.members)


def boundary_matrix(sub: SubcomplexMask, k: int, field) -> Matrix:
    """Matrix of the k-th boundary map restricted to ``sub``.

    Rows are the (k-1)-simplices of ``sub`` and columns its k-simplices, both
    in id order.
    """
    cols = sub.ids_of_dim(k)
    rows = sub.ids_of_dim(k - 1) if k > 0 else []
    pos = {r: i for i, r in enumerate(rows)}
    data = [[field.zero] * len(cols) for _ in rows]
    for j, c in enumerate(cols):
        if k == 0:
            break
        for r, v in sub.complex.boundary_chain(c, field).items():
            data[pos[r]][j] = v
    return Matrix(field, len(rows), len(cols), tuple(tuple(r) for r in data))


def betti(sub: SubcomplexMask, k: int, field) -> int:
    """dim ker of the k-th boundary minus rank of the (k+1)-th, over ``field``."""
    if k < 0:
        return 0
    n = sub.count(k)
    if n == 0:
        return 0
    return n - rank(boundary_matrix(sub, k, field)) - rank(boundary_matrix(sub, k + 1, field))


def euler_characteristic(sub: SubcomplexMask) -> int:
    top = max((sub.complex.dim_of(i) for i in sub.members), default=-1)
    return sum((-1) ** k * sub.count(k) for k in range(top + 1))


class HomologyBasis:
    """Sparse homology of one subcomplex in a fixed degree.

    Holds an echelon basis of the boundary space, a basis of cycle
    representatives (from column reduction of the boundary map in id order)
    and answers coordinate queries for cycles. Chains are ``{id: coef}``.
    """

    def __init__(self, complex: GlobalComplex, members, k: int, field):
        self.complex = complex
        self.members = frozenset(members)
        self.k = k
        self.field = field
        self.kchains = complex.ids_of_dim(k, self.members)
        self.boundaries = SparseEchelon(field)
        for sid in complex.ids_of_dim(k + 1, self.members):
            self.boundaries.add(complex.boundary_chain(sid, field))
        self.cycles = self._cycle_basis()
        self._with_reps = self.boundaries.copy()
        self._with_reps.track = True
        self.reps: list[dict] = []
        for z in self.cycles:
            if self._with_reps.add(z, tag=len(self.reps)) is not None:
                self.reps.append(z)

    def _cycle_basis(self) -> list[dict]:
        f = self.field
        if self.k == 0:
            return [{sid: f.one} for sid in self.kchains]
        ech = SparseEchelon(f, track=True)
        out = []
        for sid in self.kchains:
            bd = self.complex.boundary_chain(sid, f)
            rem, cmb = ech.reduce(bd, full=False)
            if rem:
                ech.add(bd, tag=sid)
            else:
                z = {sid: f.one}
                for t, c in cmb.items():
                    z[t] = f.neg(c)
                out.append(z)
        return out

    @property
    def betti(self) -> int:
        return len(self.reps)

    @property
    def boundary_rank(self) -> int:
        return len(self.boundaries)

    @property
    def cycle_rank(self) -> int:
        return len(self.cycles)

    def is_boundary(self, chain: dict) -> bool:
        return self.boundaries.contains(chain)

    def reduce(self, chain: dict) -> dict:
        """Canonical remainder of ``chain`` modulo the boundary space (a linear map)."""
        return self.boundaries.reduce(chain)[0]

    def coords(self, cycle: dict) -> tuple:
        """Coordinates of the class of ``cycle`` in the representative basis."""
        rem, cmb = self._with_reps.reduce(cycle)
        if rem:
            raise ValueError("chain is not a cycle of this subcomplex")
        z = self.field.zero
        return tuple(cmb.get(i, z) for i in range(len(self.reps)))
