"""Generalized Cartan matrices, symmetrizers and the invariant form.

Conventions: ``a[i][j] = <alpha_j, alpha_i^vee>`` and the Gram matrix of the
invariant form on simple roots is ``gram[i][j] = d[i] * a[i][j]``. Root
vectors are integer coefficient tuples over the simple roots.
"""

from __future__ import annotations

import enum
import json
import re
from collections import deque
from collections.abc import Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from math import gcd, lcm

from kmroots.linalg import det

RootVec = tuple[int, ...]


class GcmError(ValueError):
    """Base class for malformed Cartan data."""


class NotGcm(GcmError):
    def __init__(self, i: int, j: int, reason: str):
        self.cell = (i, j)
        self.reason = reason
        super().__init__(f"NotGcm({i},{j}): {reason}")


class NotSymmetrizable(GcmError):
    def __init__(self, cycle: Sequence[int]):
        self.cycle = tuple(cycle)
        super().__init__(
            f"NotSymmetrizable: inconsistent ratios around cycle {list(self.cycle)}"
        )


class ZeroNorm(ValueError):
    """Raised when a coroot is requested for a vector of non-positive norm."""


class NonIntegral(ValueError):
    """Raised when 2(beta, alpha)/(alpha, alpha) is not an integer."""


class MatrixKind(enum.Enum):
    FINITE = "finite"
    AFFINE = "affine"
    INDEFINITE = "indefinite"


@dataclass(frozen=True)
class Gcm:
    entries: tuple[tuple[int, ...], ...]

    @property
    def rank(self) -> int:
        return len(self.entries)

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.entries[i][j]

    def to_json(self) -> dict:
        return {"rank": self.rank, "a": [list(r) for r in self.entries]}


@dataclass(frozen=True)
class CartanDatum:
    gcm: Gcm
    d: tuple[int, ...]
    gram: tuple[tuple[int, ...], ...] = field(repr=False)

    @property
    def rank(self) -> int:
        return self.gcm.rank

    @property
    def a(self) -> tuple[tuple[int, ...], ...]:
        return self.gcm.entries


def validate_gcm(entries: Sequence[Sequence[int]]) -> Gcm:
    n = len(entries)
    if n == 0:
        raise GcmError("empty matrix")
    rows = []
    for i, row in enumerate(entries):
        if len(row) != n:
            raise GcmError(f"row {i} has length {len(row)}, expected {n}")
        out = []
        for j, x in enumerate(row):
            if isinstance(x, bool) or int(x) != x:
                raise NotGcm(i, j, f"entry {x!r} is not an integer")
            out.append(int(x))
        rows.append(tuple(out))
    for i in range(n):
        for j in range(n):
            a = rows[i][j]
            if i == j:
                if a != 2:
                    raise NotGcm(i, j, "diagonal entry must be 2")
            elif a > 0:
                raise NotGcm(i, j, "off-diagonal entry must be <= 0")
            elif a == 0 and rows[j][i] != 0:
                raise NotGcm(i, j, "a_ij = 0 but a_ji != 0")
    return Gcm(tuple(rows))


def components(g: Gcm) -> list[tuple[int, ...]]:
    """Connected components of the Coxeter graph, each sorted, ordered by first index."""
    n = g.rank
    seen = [False] * n
    out = []
    for s in range(n):
        if seen[s]:
            continue
        comp, queue = [], deque([s])
        seen[s] = True
        while queue:
            i = queue.popleft()
            comp.append(i)
            for j in range(n):
                if j != i and g[i, j] != 0 and not seen[j]:
                    seen[j] = True
                    queue.append(j)
        out.append(tuple(sorted(comp)))
    return out


def symmetrize(g: Gcm) -> CartanDatum:
    n = g.rank
    d: list[Fraction | None] = [None] * n
    parent: list[int | None] = [None] * n
    for comp in components(g):
        root = comp[0]
        d[root] = Fraction(1)
        queue = deque([root])
        while queue:
            i = queue.popleft()
            for j in comp:
                if j == i or g[i, j] == 0:
                    continue
                want = d[i] * Fraction(g[i, j], g[j, i])
                if d[j] is None:
                    d[j] = want
                    parent[j] = i
                    queue.append(j)
                elif d[j] != want:
                    raise NotSymmetrizable(_cycle(parent, i, j))
        den = reduce(lcm, (d[i].denominator for i in comp), 1)
        ints = [int(d[i] * den) for i in comp]
        g_ = reduce(gcd, ints)
        for i, v in zip(comp, ints):
            d[i] = Fraction(v // g_)
    dd = tuple(int(x) for x in d)
    gram = tuple(tuple(dd[i] * g[i, j] for j in range(n)) for i in range(n))
    return CartanDatum(g, dd, gram)


def _cycle(parent: list[int | None], i: int, j: int) -> list[int]:
    def path(k):
        out = [k]
        while parent[k] is not None:
            k = parent[k]
            out.append(k)
        return out

    pi, pj = path(i), path(j)
    common = next(x for x in pi if x in pj)
    return pi[: pi.index(common) + 1] + list(reversed(pj[: pj.index(common)]))


def cartan_datum(entries: Sequence[Sequence[int]]) -> CartanDatum:
    return symmetrize(validate_gcm(entries))


def _check_rank(cd: CartanDatum, *vs: Sequence[int]) -> None:
    for v in vs:
        if len(v) != cd.rank:
            raise ValueError(
                f"vector {tuple(v)} has length {len(v)}, rank is {cd.rank}"
            )


def bilinear(cd: CartanDatum, x: Sequence[int], y: Sequence[int]) -> int:
    _check_rank(cd, x, y)
    gram = cd.gram
    n = cd.rank
    return sum(
        x[i] * gram[i][j] * y[j] for i in range(n) if x[i] for j in range(n) if y[j]
    )


def norm(cd: CartanDatum, x: Sequence[int]) -> int:
    return bilinear(cd, x, x)


def pairing(cd: CartanDatum, beta: Sequence[int], alpha: Sequence[int]) -> int:
    """<beta, alpha^vee> = 2(beta, alpha)/(alpha, alpha)."""
    nn = norm(cd, alpha)
    if nn <= 0:
        raise ZeroNorm(f"(alpha, alpha) = {nn} <= 0 for alpha = {tuple(alpha)}")
    q, r = divmod(2 * bilinear(cd, beta, alpha), nn)
    if r:
        raise NonIntegral(
            f"<{tuple(beta)}, {tuple(alpha)}^vee> = {Fraction(2 * bilinear(cd, beta, alpha), nn)}"
        )
    return q


def simple_pairings(cd: CartanDatum, beta: Sequence[int]) -> tuple[int, ...]:
    """(<beta, alpha_i^vee>)_i, computed straight from the GCM."""
    a = cd.a
    n = cd.rank
    return tuple(sum(a[i][j] * beta[j] for j in range(n)) for i in range(n))


def kind(cd: CartanDatum) -> list[tuple[tuple[int, ...], MatrixKind]]:
    """Finite / affine / indefinite per indecomposable component, via exact minors."""
    out = []
    for comp in components(cd.gcm):
        sub = [[cd.gram[i][j] for j in comp] for i in comp]
        out.append((comp, _kind_of(sub)))
    return out


def _positive_definite(m: Sequence[Sequence[int]]) -> bool:
    return all(det([row[:k] for row in m[:k]]) > 0 for k in range(1, len(m) + 1))


def _kind_of(m: Sequence[Sequence[int]]) -> MatrixKind:
    n = len(m)
    if _positive_definite(m):
        return MatrixKind.FINITE
    if det(m) == 0:
        proper_ok = all(
            _positive_definite(
                [[m[i][j] for j in range(n) if j != k] for i in range(n) if i != k]
            )
            for k in range(n)
        )
        if proper_ok:
            return MatrixKind.AFFINE
    return MatrixKind.INDEFINITE


def is_finite_type(cd: CartanDatum) -> bool:
    return all(k is MatrixKind.FINITE for _, k in kind(cd))


# ---------------------------------------------------------------- named types


def finite_cartan_matrix(name: str) -> list[list[int]]:
    """Cartan matrix of a finite type, Bourbaki labelling (0-indexed)."""
    m = re.fullmatch(r"([A-G])(\d+)", name.strip())
    if not m:
        raise GcmError(f"unknown Cartan type {name!r}")
    t, n = m.group(1), int(m.group(2))
    a = [[2 if i == j else 0 for j in range(n)] for i in range(n)]

    def link(i, j, aij=-1, aji=-1):
        a[i][j], a[j][i] = aij, aji

    if t == "A" and n >= 1:
        for i in range(n - 1):
            link(i, i + 1)
    elif t == "B" and n >= 2:
        for i in range(n - 2):
            link(i, i + 1)
        link(n - 2, n - 1, -1, -2)
    elif t == "C" and n >= 2:
        for i in range(n - 2):
            link(i, i + 1)
        link(n - 2, n - 1, -2, -1)
    elif t == "D" and n >= 4:
        for i in range(n - 2):
            link(i, i + 1)
        link(n - 3, n - 1)
    elif t == "E" and n in (6, 7, 8):
        link(0, 2)
        link(1, 3)
        link(2, 3)
        for i in range(3, n - 1):
            link(i, i + 1)
    elif t == "F" and n == 4:
        link(0, 1)
        link(1, 2, -1, -2)
        link(2, 3)
    elif t == "G" and n == 2:
        link(0, 1, -3, -1)
    else:
        raise GcmError(f"unknown Cartan type {name!r}")
    return a


def highest_root(cd: CartanDatum) -> RootVec:
    """Highest root of an irreducible finite type: climb from a long simple root."""
    beta = [0] * cd.rank
    beta[max(range(cd.rank), key=lambda i: cd.d[i])] = 1
    while True:
        p = simple_pairings(cd, beta)
        i = next((i for i, x in enumerate(p) if x < 0), None)
        if i is None:
            return tuple(beta)
        beta[i] -= p[i]


def affine_cartan_matrix(name: str) -> list[list[int]]:
    """Untwisted affine GCM X^(1); node 0 is alpha_0 = delta - theta."""
    fin = finite_cartan_matrix(name)
    cd = symmetrize(validate_gcm(fin))
    theta = highest_root(cd)
    n = len(fin)
    out = [[2] + [0] * n for _ in range(n + 1)]
    neg = tuple(-c for c in theta)
    for j in range(n):
        e = tuple(int(k == j) for k in range(n))
        out[0][j + 1] = pairing(cd, e, neg)
        out[j + 1][0] = pairing(cd, neg, e)
        for i in range(n):
            out[i + 1][j + 1] = fin[i][j]
    return out


def parse_gcm_json(text: str) -> Gcm:
    data = json.loads(text)
    if not isinstance(data, dict) or "a" not in data:
        raise GcmError('GCM JSON must be an object with key "a"')
    g = validate_gcm(data["a"])
    if "rank" in data and data["rank"] != g.rank:
        raise GcmError(f"declared rank {data['rank']} but matrix is {g.rank}x{g.rank}")
    return g
