"""Exact rational linear algebra on small dense matrices.

Everything here works over :class:`fractions.Fraction`; vectors are tuples and
matrices are lists of row tuples. Sizes stay desk-scale (rank <= 9), so a
plain Gauss-Jordan elimination is all we need.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from fractions import Fraction
from functools import reduce
from math import gcd, lcm

Vec = tuple[Fraction, ...]


def to_frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x.strip())
    return Fraction(x)


def vec(xs: Iterable) -> Vec:
    return tuple(to_frac(x) for x in xs)


def rref(
    rows: Sequence[Sequence], ncols: int | None = None
) -> tuple[list[Vec], list[int]]:
    """Reduced row echelon form; returns (nonzero rows, pivot columns)."""
    m = [list(vec(r)) for r in rows]
    if ncols is None:
        ncols = len(m[0]) if m else 0
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        p = m[r][c]
        m[r] = [x / p for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return [tuple(row) for row in m[:r]], pivots


def rank(rows: Sequence[Sequence]) -> int:
    if not rows:
        return 0
    return len(rref(rows)[0])


def det(matrix: Sequence[Sequence]) -> Fraction:
    m = [list(vec(r)) for r in matrix]
    n = len(m)
    out = Fraction(1)
    for c in range(n):
        piv = next((i for i in range(c, n) if m[i][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            out = -out
        p = m[c][c]
        out *= p
        for i in range(c + 1, n):
            if m[i][c] != 0:
                f = m[i][c] / p
                m[i] = [a - f * b for a, b in zip(m[i], m[c])]
    return out


def nullspace(rows: Sequence[Sequence], ncols: int) -> list[Vec]:
    """Basis of {x : rows @ x = 0}, one vector per free column."""
    if not rows:
        return [
            tuple(Fraction(int(i == j)) for j in range(ncols)) for i in range(ncols)
        ]
    red, piv = rref(rows, ncols)
    free = [c for c in range(ncols) if c not in piv]
    basis = []
    for f in free:
        x = [Fraction(0)] * ncols
        x[f] = Fraction(1)
        for row, p in zip(red, piv):
            x[p] = -row[f]
        basis.append(tuple(x))
    return basis


def solve(columns: Sequence[Sequence], target: Sequence) -> Vec | None:
    """One solution c of sum_j c_j * columns[j] = target, or None."""
    n = len(columns)
    dim = len(target)
    aug = [
        [to_frac(columns[j][i]) for j in range(n)] + [to_frac(target[i])]
        for i in range(dim)
    ]
    red, piv = rref(aug, n + 1)
    if n in piv:
        return None
    x = [Fraction(0)] * n
    for row, p in zip(red, piv):
        x[p] = row[n]
    return tuple(x)


def primitive_integer(v: Sequence[Fraction]) -> tuple[int, ...]:
    """Scale a rational vector to a primitive integer vector (first nonzero entry > 0)."""
    den = reduce(lcm, (x.denominator for x in v), 1)
    ints = [int(x * den) for x in v]
    g = reduce(gcd, ints, 0) or 1
    ints = [i // g for i in ints]
    lead = next((i for i in ints if i != 0), 0)
    if lead < 0:
        ints = [-i for i in ints]
    return tuple(ints)


def integer_kernel(vectors: Sequence[Sequence[int]]) -> list[tuple[int, ...]]:
    """Primitive integer relations sum_j c_j v_j = 0 among the given vectors."""
    if not vectors:
        return []
    dim = len(vectors[0])
    rows = [[vectors[j][i] for j in range(len(vectors))] for i in range(dim)]
    return [primitive_integer(b) for b in nullspace(rows, len(vectors))]


def dot(x: Sequence, y: Sequence) -> Fraction:
    return sum((to_frac(a) * to_frac(b) for a, b in zip(x, y)), Fraction(0))


def matvec(m: Sequence[Sequence], x: Sequence) -> Vec:
    return tuple(dot(row, x) for row in m)


class Subspace:
    """A subspace of Q^n held as a reduced echelon basis.

    The echelon form is canonical, so equality of subspaces is equality of
    the stored bases.
    """

    __slots__ = ("basis", "dim_ambient")

    def __init__(self, vectors: Iterable[Sequence], dim_ambient: int):
        vs = [vec(v) for v in vectors]
        for v in vs:
            if len(v) != dim_ambient:
                raise ValueError(f"vector {v} does not live in Q^{dim_ambient}")
        self.dim_ambient = dim_ambient
        self.basis: tuple[Vec, ...] = tuple(rref(vs, dim_ambient)[0]) if vs else ()

    @classmethod
    def zero(cls, n: int) -> Subspace:
        return cls([], n)

    @classmethod
    def full(cls, n: int) -> Subspace:
        return cls([[int(i == j) for j in range(n)] for i in range(n)], n)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Subspace)
            and self.dim_ambient == other.dim_ambient
            and self.basis == other.basis
        )

    def __hash__(self) -> int:
        return hash((self.dim_ambient, self.basis))

    def __repr__(self) -> str:
        rows = [[str(x) for x in b] for b in self.basis]
        return f"Subspace(dim={self.dim}, basis={rows})"

    def contains(self, v: Sequence) -> bool:
        v = vec(v)
        if not any(v):
            return True
        return rank(list(self.basis) + [v]) == self.dim

    def __le__(self, other: Subspace) -> bool:
        return all(other.contains(b) for b in self.basis)

    def __add__(self, other: Subspace) -> Subspace:
        return Subspace(list(self.basis) + list(other.basis), self.dim_ambient)

    def intersect(self, other: Subspace) -> Subspace:
        if self.dim == 0 or other.dim == 0:
            return Subspace.zero(self.dim_ambient)
        # a.x = b.y  <=>  [a | -b] (x, y) = 0
        cols = list(self.basis) + [tuple(-c for c in b) for b in other.basis]
        rows = [[c[i] for c in cols] for i in range(self.dim_ambient)]
        out = []
        for sol in nullspace(rows, len(cols)):
            out.append(
                tuple(
                    sum(
                        (sol[j] * self.basis[j][i] for j in range(self.dim)),
                        Fraction(0),
                    )
                    for i in range(self.dim_ambient)
                )
            )
        return Subspace(out, self.dim_ambient)

    def annihilator(self, form: Sequence[Sequence]) -> Subspace:
        """{x : form(b, x) = 0 for all basis vectors b}."""
        rows = [matvec([list(r) for r in zip(*form)], b) for b in self.basis]
        return Subspace(nullspace(rows, self.dim_ambient), self.dim_ambient)
