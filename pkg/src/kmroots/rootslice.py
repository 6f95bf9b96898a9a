"""Roots of a symmetrizable Kac-Moody algebra up to a height cutoff.

A :class:`RootSlice` holds the positive roots of height at most ``H``; the
negative roots are answered by symmetry and never stored.
"""

from __future__ import annotations

import enum
import os
from collections import deque
from collections.abc import Iterable, Sequence
from dataclasses import dataclass

from kmroots.cartan import CartanDatum, Gcm, RootVec, ZeroNorm, bilinear, norm, pairing

DEFAULT_MAX_ROOTS = 10**6


class RootClass(enum.Enum):
    REAL = "Real"
    IMAGINARY = "Imaginary"
    NOT_A_ROOT = "NotARoot"
    UNKNOWN = "Unknown"

    @property
    def is_root(self) -> bool:
        return self in (RootClass.REAL, RootClass.IMAGINARY)


class Truncated(Exception):
    """An answer depends on roots above the height bound."""

    def __init__(self, height: int, detail: str = ""):
        self.height = height
        super().__init__(f"Truncated(H={height})" + (f": {detail}" if detail else ""))


class ResourceCapExceeded(RuntimeError):
    pass


def max_roots() -> int:
    raw = os.environ.get("KMROOTS_MAX_ROOTS")
    if raw is None:
        return DEFAULT_MAX_ROOTS
    try:
        cap = int(raw)
    except ValueError as exc:
        raise ValueError(f"KMROOTS_MAX_ROOTS must be an integer, got {raw!r}") from exc
    if cap <= 0:
        raise ValueError("KMROOTS_MAX_ROOTS must be positive")
    return cap


def height(beta: Sequence[int]) -> int:
    return sum(beta)


def support(beta: Sequence[int]) -> tuple[int, ...]:
    return tuple(i for i, c in enumerate(beta) if c)


def sign(beta: Sequence[int]) -> int:
    """+1 if all coefficients are >= 0 and some > 0, -1 for the mirror case, else 0."""
    pos = any(c > 0 for c in beta)
    neg = any(c < 0 for c in beta)
    if pos and not neg:
        return 1
    if neg and not pos:
        return -1
    return 0


def neg(beta: Sequence[int]) -> RootVec:
    return tuple(-c for c in beta)


def add(x: Sequence[int], y: Sequence[int]) -> RootVec:
    return tuple(a + b for a, b in zip(x, y))


def sub(x: Sequence[int], y: Sequence[int]) -> RootVec:
    return tuple(a - b for a, b in zip(x, y))


def scale(k: int, x: Sequence[int]) -> RootVec:
    return tuple(k * a for a in x)


def simple_root(rank: int, i: int) -> RootVec:
    return tuple(int(j == i) for j in range(rank))


def canonical_key(beta: Sequence[int]) -> tuple:
    return (sum(beta), tuple(beta))


def connected_support(cd: CartanDatum, beta: Sequence[int]) -> bool:
    supp = support(beta)
    if not supp:
        return False
    a = cd.a
    seen = {supp[0]}
    stack = [supp[0]]
    rest = set(supp)
    while stack:
        i = stack.pop()
        for j in rest:
            if j not in seen and a[i][j] != 0:
                seen.add(j)
                stack.append(j)
    return len(seen) == len(supp)


def reflect(cd: CartanDatum, alpha: Sequence[int], x: Sequence[int]) -> RootVec:
    """s_alpha(x) = x - <x, alpha^vee> alpha."""
    p = pairing(cd, x, alpha)
    return tuple(xi - p * ai for xi, ai in zip(x, alpha))


def _pairings(a: tuple[tuple[int, ...], ...], beta: Sequence[int]) -> list[int]:
    return [sum(r[j] * beta[j] for j in range(len(beta)) if beta[j]) for r in a]


@dataclass(frozen=True)
class RootSlice:
    cd: CartanDatum
    height_bound: int
    pos_real: frozenset[RootVec]
    pos_imag: frozenset[RootVec]

    @property
    def rank(self) -> int:
        return self.cd.rank

    def real_roots(self) -> list[RootVec]:
        return sorted(self.pos_real, key=canonical_key)

    def imaginary_roots(self) -> list[RootVec]:
        return sorted(self.pos_imag, key=canonical_key)

    def positive_roots(self) -> list[RootVec]:
        return sorted(self.pos_real | self.pos_imag, key=canonical_key)

    def classify(self, beta: Sequence[int]) -> RootClass:
        return classify(self, beta)

    def within(self, beta: Sequence[int]) -> bool:
        return abs(height(beta)) <= self.height_bound


def enumerate_roots(cd: CartanDatum, H: int, cap: int | None = None) -> RootSlice:
    """Exact positive roots of height <= H."""
    if H < 1:
        raise ValueError("height bound must be >= 1")
    cap = max_roots() if cap is None else cap
    n = cd.rank
    a = cd.a
    count = 0

    def grow(seeds: Iterable[RootVec]) -> set[RootVec]:
        nonlocal count
        found: set[RootVec] = set()
        queue: deque[RootVec] = deque()
        for s in seeds:
            if s not in found:
                found.add(s)
                queue.append(s)
        count += len(found)
        if count > cap:
            raise ResourceCapExceeded(f"more than {cap} roots below height {H}")
        while queue:
            beta = queue.popleft()
            ht = sum(beta)
            p = _pairings(a, beta)
            for i in range(n):
                if p[i] < 0 and ht - p[i] <= H:
                    lst = list(beta)
                    lst[i] -= p[i]
                    img = tuple(lst)
                    if img not in found:
                        found.add(img)
                        queue.append(img)
                        count += 1
                        if count > cap:
                            raise ResourceCapExceeded(
                                f"more than {cap} roots below height {H}; "
                                "raise KMROOTS_MAX_ROOTS to allow more"
                            )
        return found

    real = grow(simple_root(n, i) for i in range(n))
    imag = grow(_fundamental_set(cd, H))
    return RootSlice(cd, H, frozenset(real), frozenset(imag))


def _fundamental_set(cd: CartanDatum, H: int) -> list[RootVec]:
    """Vectors of height <= H with connected support and all simple pairings <= 0."""
    n = cd.rank
    a = cd.a
    out: list[RootVec] = []
    if n == 1:
        return out
    if n == 2:
        # 2x - |a01| y <= 0 and 2y - |a10| x <= 0
        b, c = -a[0][1], -a[1][0]
        if b == 0:
            return out
        for x in range(1, H):
            # y >= 2x / b and y <= c x / 2
            lo = -(-2 * x // b)
            hi = min(c * x // 2, H - x)
            for y in range(max(lo, 1), hi + 1):
                out.append((x, y))
        return out
    coeffs = [0] * n

    def rec(i: int, remaining: int):
        if i == n:
            beta = tuple(coeffs)
            if sum(beta) == 0:
                return
            p = _pairings(a, beta)
            if all(x <= 0 for x in p) and connected_support(cd, beta):
                out.append(beta)
            return
        for c in range(remaining + 1):
            coeffs[i] = c
            rec(i + 1, remaining - c)
        coeffs[i] = 0

    rec(0, H)
    return out


def classify(sl: RootSlice, beta: Sequence[int]) -> RootClass:
    beta = tuple(beta)
    if len(beta) != sl.rank:
        raise ValueError(f"vector {beta} has length {len(beta)}, rank is {sl.rank}")
    s = sign(beta)
    if s == 0:
        return RootClass.NOT_A_ROOT
    if s < 0:
        beta = neg(beta)
    if not connected_support(sl.cd, beta):
        return RootClass.NOT_A_ROOT
    if height(beta) > sl.height_bound:
        return RootClass.UNKNOWN
    if beta in sl.pos_real:
        return RootClass.REAL
    if beta in sl.pos_imag:
        return RootClass.IMAGINARY
    return RootClass.NOT_A_ROOT


def descend(cd: CartanDatum, beta: Sequence[int]) -> RootClass:
    """Decide root membership with no height bound by descending to a simple root or K.

    Used as an independent oracle: s_i lowers the height whenever
    <beta, alpha_i^vee> > 0, and preserves being (or not being) a root.
    """
    beta = list(beta)
    n = len(beta)
    if sign(beta) < 0:
        beta = [-c for c in beta]
    while True:
        if sign(beta) <= 0:
            return RootClass.NOT_A_ROOT
        supp = support(beta)
        if len(supp) == 1 and beta[supp[0]] == 1:
            return RootClass.REAL
        if not connected_support(cd, beta):
            return RootClass.NOT_A_ROOT
        p = _pairings(cd.a, beta)
        i = next((i for i in range(n) if p[i] > 0), None)
        if i is None:
            return RootClass.IMAGINARY
        beta[i] -= p[i]


@dataclass(frozen=True)
class RootString:
    alpha: RootVec
    beta: RootVec
    p: int
    q: int
    members: tuple[RootVec, ...]
    real_flags: tuple[bool, ...]

    @property
    def real_count(self) -> int:
        return sum(self.real_flags)


def root_string(sl: RootSlice, alpha: Sequence[int], beta: Sequence[int]) -> RootString:
    alpha, beta = tuple(alpha), tuple(beta)
    ca = classify(sl, alpha)
    if ca is RootClass.UNKNOWN:
        raise Truncated(sl.height_bound, f"alpha={alpha}")
    if ca is not RootClass.REAL:
        raise ValueError(f"{alpha} is not a real root")
    cb = classify(sl, beta)
    if cb is RootClass.UNKNOWN:
        raise Truncated(sl.height_bound, f"beta={beta}")
    if not cb.is_root:
        raise ValueError(f"{beta} is not a root")
    if beta == alpha or beta == neg(alpha):
        raise ValueError("the alpha-string through +-alpha passes through 0")

    def status(k: int) -> RootClass:
        c = classify(sl, add(beta, scale(k, alpha)))
        if c is RootClass.UNKNOWN:
            raise Truncated(
                sl.height_bound, f"string member {add(beta, scale(k, alpha))}"
            )
        return c

    p = 0
    while status(-(p + 1)).is_root:
        p += 1
    q = p - pairing(sl.cd, beta, alpha)
    if q < 0:
        raise AssertionError(
            "p - <beta, alpha^vee> < 0 cannot happen for a root string"
        )
    classes = [status(k) for k in range(-p, q + 1)]
    if not all(c.is_root for c in classes):
        raise AssertionError("broken root string")
    status(q + 1)  # the top endpoint must also be resolvable
    members = tuple(add(beta, scale(k, alpha)) for k in range(-p, q + 1))
    return RootString(
        alpha, beta, p, q, members, tuple(c is RootClass.REAL for c in classes)
    )


def morita_pairs(g: Gcm) -> list[tuple[int, int]]:
    n = g.rank
    return [
        (i, j)
        for i in range(n)
        for j in range(n)
        if i != j and g[i, j] == -1 and g[j, i] < -1
    ]


def is_real_vector(cd: CartanDatum, beta: Sequence[int]) -> bool:
    return norm(cd, beta) > 0


__all__ = [
    "ResourceCapExceeded",
    "RootClass",
    "RootSlice",
    "RootString",
    "Truncated",
    "ZeroNorm",
    "add",
    "bilinear",
    "canonical_key",
    "classify",
    "connected_support",
    "descend",
    "enumerate_roots",
    "height",
    "max_roots",
    "morita_pairs",
    "neg",
    "reflect",
    "root_string",
    "scale",
    "sign",
    "simple_root",
    "sub",
    "support",
]
