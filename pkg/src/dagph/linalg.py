"""Exact dense linear algebra over the rationals and prime fields.

Two field backends are provided, :class:`Rationals` (``fractions.Fraction``
entries) and :class:`PrimeField` (integer residues). Matrices are immutable
and dense; subspaces are stored by their reduced row echelon basis so that
equality is structural.

A small sparse echelon helper (:class:`SparseEchelon`) is included for the
homology engines, which reduce long chains against large boundary spans.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

DEFAULT_PRIME = 46337


class UnsupportedBackend(ValueError):
    """Raised when an operation needs an inner product over a prime field."""


class DimensionMismatch(ValueError):
    pass


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


@dataclass(frozen=True)
class Rationals:
    """The field of rational numbers, exact via ``Fraction``."""

    name = "q"
    is_rational = True

    def __call__(self, x) -> Fraction:
        return Fraction(x)

    @property
    def zero(self):
        return Fraction(0)

    @property
    def one(self):
        return Fraction(1)

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return 1 / Fraction(a)

    def neg(self, a):
        return -a

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def axpy(self, row, c, other):
        # row - c * other, elementwise
        return [x - c * y for x, y in zip(row, other)]

    def scale(self, row, c):
        return [x * c for x in row]

    def __str__(self):
        return "q"


@dataclass(frozen=True)
class PrimeField:
    """Integers modulo a prime ``p``."""

    p: int = DEFAULT_PRIME
    is_rational = False

    def __post_init__(self):
        if not _is_prime(self.p):
            raise ValueError(f"{self.p} is not prime")

    @property
    def name(self):
        return f"fp:{self.p}"

    def __call__(self, x) -> int:
        if isinstance(x, Fraction):
            return x.numerator * pow(x.denominator, -1, self.p) % self.p
        return int(x) % self.p

    @property
    def zero(self):
        return 0

    @property
    def one(self):
        return 1

    def inv(self, a):
        a %= self.p
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return pow(a, -1, self.p)

    def neg(self, a):
        return (-a) % self.p

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def mul(self, a, b):
        return (a * b) % self.p

    def axpy(self, row, c, other):
        p = self.p
        return [(x - c * y) % p for x, y in zip(row, other)]

    def scale(self, row, c):
        p = self.p
        return [(x * c) % p for x in row]

    def __str__(self):
        return self.name


QQ = Rationals()


def parse_field(spec: str):
    """Parse ``q`` or ``fp:<prime>`` into a field object."""
    spec = spec.strip().lower()
    if spec in ("q", "qq", "rational", "rationals"):
        return QQ
    if spec.startswith("fp:"):
        try:
            p = int(spec[3:])
        except ValueError:
            raise ValueError(f"bad prime in field spec {spec!r}") from None
        return PrimeField(p)
    raise ValueError(f"unknown field spec {spec!r} (expected 'q' or 'fp:<prime>')")


def _require_rational(field):
    if not field.is_rational:
        raise UnsupportedBackend(
            f"operation needs an inner product; not available over {field}")


@dataclass(frozen=True)
class Matrix:
    """Dense immutable matrix over a field, stored row-major."""

    field: object
    nrows: int
    ncols: int
    data: tuple  # tuple of row tuples

    def __post_init__(self):
        if len(self.data) != self.nrows or any(len(r) != self.ncols for r in self.data):
            raise DimensionMismatch("entries do not match the declared shape")

    @classmethod
    def from_rows(cls, field, rows: Iterable[Sequence], ncols: int | None = None):
        rows = [tuple(field(x) for x in r) for r in rows]
        if ncols is None:
            ncols = len(rows[0]) if rows else 0
        return cls(field, len(rows), ncols, tuple(rows))

    @classmethod
    def from_columns(cls, field, cols: Iterable[Sequence], nrows: int):
        cols = [list(c) for c in cols]
        rows = [[c[i] for c in cols] for i in range(nrows)]
        return cls.from_rows(field, rows, ncols=len(cols))

    @classmethod
    def zeros(cls, field, nrows, ncols):
        z = field.zero
        return cls(field, nrows, ncols, tuple((z,) * ncols for _ in range(nrows)))

    @classmethod
    def identity(cls, field, n):
        rows = [[field.one if i == j else field.zero for j in range(n)] for i in range(n)]
        return cls(field, n, n, tuple(tuple(r) for r in rows))

    @property
    def shape(self):
        return (self.nrows, self.ncols)

    @property
    def T(self) -> "Matrix":
        return Matrix(self.field, self.ncols, self.nrows,
                      tuple(tuple(r[j] for r in self.data) for j in range(self.ncols)))

    def row(self, i):
        return self.data[i]

    def column(self, j):
        return tuple(r[j] for r in self.data)

    def columns(self):
        return [self.column(j) for j in range(self.ncols)]

    def __getitem__(self, ij):
        i, j = ij
        return self.data[i][j]

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.ncols != other.nrows:
            raise DimensionMismatch(f"cannot multiply {self.shape} by {other.shape}")
        f = self.field
        cols = other.columns()
        out = []
        for r in self.data:
            out.append(tuple(_dot(f, r, c) for c in cols))
        return Matrix(f, self.nrows, other.ncols, tuple(out))

    def apply(self, v: Sequence) -> tuple:
        return tuple(_dot(self.field, r, v) for r in self.data)

    def is_zero(self):
        return all(x == 0 for r in self.data for x in r)

    def hstack(self, other: "Matrix") -> "Matrix":
        if self.nrows != other.nrows:
            raise DimensionMismatch("row counts differ")
        return Matrix(self.field, self.nrows, self.ncols + other.ncols,
                      tuple(a + b for a, b in zip(self.data, other.data)))

    def vstack(self, other: "Matrix") -> "Matrix":
        if self.ncols != other.ncols:
            raise DimensionMismatch("column counts differ")
        return Matrix(self.field, self.nrows + other.nrows, self.ncols, self.data + other.data)

    def tolist(self):
        return [list(r) for r in self.data]


def _dot(field, a, b):
    if field.is_rational:
        return sum((x * y for x, y in zip(a, b)), Fraction(0))
    return sum(x * y for x, y in zip(a, b)) % field.p


def _rref_rows(field, rows: list[list], ncols: int):
    """In-place reduced row echelon form; returns pivot columns."""
    pivots = []
    r = 0
    nrows = len(rows)
    for c in range(ncols):
        if r >= nrows:
            break
        piv = None
        for i in range(r, nrows):
            if rows[i][c] != 0:
                piv = i
                break
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = field.inv(rows[r][c])
        if inv != 1:
            rows[r] = field.scale(rows[r], inv)
        prow = rows[r]
        for i in range(nrows):
            if i != r:
                x = rows[i][c]
                if x != 0:
                    rows[i] = field.axpy(rows[i], x, prow)
        pivots.append(c)
        r += 1
    return pivots


def rref(m: Matrix) -> tuple[Matrix, int]:
    """Reduced row echelon form of ``m`` and its rank (zero rows kept at the bottom)."""
    rows = [list(r) for r in m.data]
    pivots = _rref_rows(m.field, rows, m.ncols)
    return Matrix(m.field, m.nrows, m.ncols, tuple(tuple(r) for r in rows)), len(pivots)


def rank(m: Matrix) -> int:
    return rref(m)[1]


def rank_of_rows(field, rows, ncols) -> int:
    rows = [list(r) for r in rows]
    return len(_rref_rows(field, rows, ncols))


def nullspace(m: Matrix) -> list[tuple]:
    """Basis of ``{x : m x = 0}``, one tuple per basis vector."""
    f = m.field
    rows = [list(r) for r in m.data]
    pivots = _rref_rows(f, rows, m.ncols)
    pivset = set(pivots)
    basis = []
    for free in range(m.ncols):
        if free in pivset:
            continue
        v = [f.zero] * m.ncols
        v[free] = f.one
        for i, pc in enumerate(pivots):
            v[pc] = f.neg(rows[i][free])
        basis.append(tuple(v))
    return basis


@dataclass(frozen=True)
class Subspace:
    """A subspace of ``F^n`` in canonical (reduced row echelon) form."""

    field: object
    ambient_dim: int
    basis: tuple  # rref rows, no zero rows

    @classmethod
    def span(cls, field, vectors: Iterable[Sequence], ambient_dim: int) -> "Subspace":
        rows = [[field(x) for x in v] for v in vectors]
        for r in rows:
            if len(r) != ambient_dim:
                raise DimensionMismatch(
                    f"vector of length {len(r)} in ambient dimension {ambient_dim}")
        pivots = _rref_rows(field, rows, ambient_dim)
        return cls(field, ambient_dim, tuple(tuple(r) for r in rows[:len(pivots)]))

    @classmethod
    def zero(cls, field, n):
        return cls(field, n, ())

    @classmethod
    def full(cls, field, n):
        return cls(field, n, Matrix.identity(field, n).data)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def matrix(self) -> Matrix:
        return Matrix(self.field, len(self.basis), self.ambient_dim, self.basis)

    def contains(self, v: Sequence) -> bool:
        return rank_of_rows(self.field, list(self.basis) + [list(v)], self.ambient_dim) == self.dim

    def __le__(self, other: "Subspace") -> bool:
        _check_same(self, other)
        return subspace_sum(self, other).dim == other.dim

    def __add__(self, other):
        return subspace_sum(self, other)

    def __and__(self, other):
        return subspace_intersect(self, other)

    def embed(self, positions: Sequence[int], n: int) -> "Subspace":
        """Image under the coordinate inclusion sending coordinate ``i`` to ``positions[i]``."""
        z = self.field.zero
        vecs = []
        for b in self.basis:
            v = [z] * n
            for i, x in zip(positions, b):
                v[i] = x
            vecs.append(v)
        return Subspace.span(self.field, vecs, n)

    def restrict(self, positions: Sequence[int]) -> "Subspace":
        """Preimage under the coordinate inclusion ``F^len(positions) -> F^n``."""
        keep = set(positions)
        outside = [i for i in range(self.ambient_dim) if i not in keep]
        # vectors of self vanishing off ``positions``
        coord = Subspace.span(self.field, _unit_rows(self.field, positions, self.ambient_dim),
                              self.ambient_dim)
        meet = subspace_intersect(self, coord) if outside else self
        return Subspace.span(self.field, [[b[i] for i in positions] for b in meet.basis],
                             len(positions))


def _unit_rows(field, positions, n):
    rows = []
    for i in positions:
        r = [field.zero] * n
        r[i] = field.one
        rows.append(r)
    return rows


def _check_same(a: Subspace, b: Subspace):
    if a.ambient_dim != b.ambient_dim:
        raise DimensionMismatch(
            f"ambient dimensions differ: {a.ambient_dim} vs {b.ambient_dim}")
    if a.field != b.field:
        raise DimensionMismatch("subspaces live over different fields")


def subspace_sum(a: Subspace, b: Subspace) -> Subspace:
    _check_same(a, b)
    return Subspace.span(a.field, list(a.basis) + list(b.basis), a.ambient_dim)


def subspace_intersect(a: Subspace, b: Subspace) -> Subspace:
    """Intersection via the left null space of the stacked bases.

    Solves ``(alpha beta) (M; N) = 0`` and spans the vectors ``alpha M``.
    """
    _check_same(a, b)
    f, n = a.field, a.ambient_dim
    if a.dim == 0 or b.dim == 0:
        return Subspace.zero(f, n)
    stacked = Matrix(f, a.dim + b.dim, n, a.basis + b.basis)
    coeffs = nullspace(stacked.T)
    vecs = []
    for c in coeffs:
        alpha = c[:a.dim]
        v = [f.zero] * n
        for coef, row in zip(alpha, a.basis):
            if coef != 0:
                v = [x + coef * y for x, y in zip(v, row)]
        vecs.append([f(x) for x in v])
    return Subspace.span(f, vecs, n)


def orthogonalize(m: Matrix) -> tuple[Matrix, list[int]]:
    """Unnormalized Gram-Schmidt on the columns of a rational matrix.

    Returns the pairwise-orthogonal surviving columns and the indices of input
    columns that became zero (dependent on earlier ones) and were dropped.
    """
    _require_rational(m.field)
    out: list[list[Fraction]] = []
    norms: list[Fraction] = []
    dropped = []
    for j, col in enumerate(m.columns()):
        v = _project_out(list(col), out, norms)
        if any(x != 0 for x in v):
            out.append(v)
            norms.append(_dot(m.field, v, v))
        else:
            dropped.append(j)
    return Matrix.from_columns(m.field, out, m.nrows), dropped


def _project_out(v, basis, norms):
    for b, nb in zip(basis, norms):
        c = sum((x * y for x, y in zip(v, b)), Fraction(0))
        if c != 0:
            c /= nb
            v = [x - c * y for x, y in zip(v, b)]
    return v


def project_complement(v: Sequence, basis: Sequence[Sequence], field=QQ) -> tuple:
    """Return ``v`` minus its orthogonal projection onto the span of ``basis``.

    ``basis`` must consist of pairwise orthogonal vectors.
    """
    _require_rational(field)
    basis = [list(b) for b in basis if any(x != 0 for x in b)]
    norms = [_dot(field, b, b) for b in basis]
    return tuple(_project_out([Fraction(x) for x in v], basis, norms))


def orthogonal_complement(s: Subspace) -> Subspace:
    """``s^perp`` under the standard dot product (rational backend only)."""
    _require_rational(s.field)
    if s.dim == 0:
        return Subspace.full(s.field, s.ambient_dim)
    return Subspace.span(s.field, nullspace(s.matrix()), s.ambient_dim)


class SparseEchelon:
    """Incrementally built echelon basis of sparse vectors.

    Vectors are ``{index: value}`` dicts. Each stored vector has a distinct
    pivot, its largest index. ``reduce`` fully reduces a vector against the
    stored pivots, which is a linear projection; the remainder is zero iff the
    vector lies in the span. Optionally tracks the combination used, in terms
    of caller-supplied tags attached to inserted vectors.
    """

    def __init__(self, field, track: bool = False):
        self.field = field
        self.pivots: dict[int, dict] = {}
        self.track = track
        self.combos: dict[int, dict] = {}

    def __len__(self):
        return len(self.pivots)

    def copy(self) -> "SparseEchelon":
        # stored vectors are never mutated after insertion
        new = SparseEchelon(self.field, self.track)
        new.pivots = dict(self.pivots)
        new.combos = dict(self.combos)
        return new

    def reduce(self, vec: dict, full: bool = True):
        """Return ``(remainder, coords)``.

        ``vec = remainder + sum(coords[t] * tagged_t) + (untagged span part)``.
        With ``full=False`` only the leading entry is reduced (enough to test
        membership, cheaper).
        """
        f = self.field
        v = dict(vec)
        cmb: dict = {}
        rational = f.is_rational
        p = None if rational else f.p
        pivots = self.pivots
        heap = [-i for i in v if i in pivots]
        heapq.heapify(heap)
        while heap if full else v:
            if full:
                i = -heapq.heappop(heap)
                if i not in v:
                    continue
            else:
                i = max(v)
                if i not in pivots:
                    break
            piv = pivots[i]
            c = v[i] * f.inv(piv[i])
            if not rational:
                c %= p
            for j, y in piv.items():
                x = v.get(j, 0) - c * y
                if not rational:
                    x %= p
                if x == 0:
                    v.pop(j, None)
                else:
                    if full and j not in v and j in pivots and j != i:
                        heapq.heappush(heap, -j)
                    v[j] = x
            combo = self.combos.get(i) if self.track else None
            if combo:
                for t, y in combo.items():
                    x = cmb.get(t, 0) + c * y
                    if not rational:
                        x %= p
                    if x == 0:
                        cmb.pop(t, None)
                    else:
                        cmb[t] = x
        return v, cmb

    def contains(self, vec: dict) -> bool:
        return not self.reduce(vec, full=False)[0]

    def add(self, vec: dict, tag=None):
        """Insert ``vec``; returns its pivot, or ``None`` if it was dependent."""
        rem, cmb = self.reduce(vec, full=False)
        if not rem:
            return None
        i = max(rem)
        self.pivots[i] = rem
        if self.track:
            combo = {t: self.field.neg(c) for t, c in cmb.items()}
            if tag is not None:
                combo[tag] = self.field.one
            self.combos[i] = combo
        return i
