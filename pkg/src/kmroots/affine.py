"""Exact combinatorics of untwisted affine root systems.

Real affine roots are pairs ``(fin, level)`` standing for ``fin + level*delta``
with ``fin`` a root of the finite system. Elements of the finite Cartan
subalgebra are written in the simple coroot basis, so for ``h = sum c_i
alpha_i^vee`` and ``alpha = sum m_j alpha_j`` we have ``alpha(h) = c^T A m``.
"""

from __future__ import annotations

import json
from collections import deque
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from itertools import product
from math import lcm

from kmroots.cartan import (
    CartanDatum,
    MatrixKind,
    RootVec,
    bilinear,
    cartan_datum,
    finite_cartan_matrix,
    highest_root,
    kind,
    norm,
    pairing,
)
from kmroots.cartan import (
    components as gcm_components,
)
from kmroots.linalg import Subspace, Vec, solve, to_frac
from kmroots.rootslice import add, canonical_key, enumerate_roots, neg, reflect, sign

# ------------------------------------------------------------------ errors


class AffineError(ValueError):
    """Invalid affine datum; ``condition`` names the violated invariant."""

    def __init__(self, condition: str, detail: str = ""):
        self.condition = condition
        super().__init__(f"{condition}" + (f": {detail}" if detail else ""))


class NotProper(AffineError):
    def __init__(self, detail: str = "the full root system is not a proper subsystem"):
        super().__init__("NotProper", detail)


class NotPrime(AffineError):
    def __init__(self, k: int):
        super().__init__("NotPrime", f"k={k} is not prime")


def is_prime(k: int) -> bool:
    if k < 2:
        return False
    return all(k % p for p in range(2, int(k**0.5) + 1))


# ------------------------------------------------------------ finite system


@dataclass(frozen=True)
class FiniteRootSystem:
    cd: CartanDatum
    positive: tuple[RootVec, ...]
    name: str | None = None

    @classmethod
    def from_cartan(cls, cd: CartanDatum, name: str | None = None) -> FiniteRootSystem:
        if any(k is not MatrixKind.FINITE for _, k in kind(cd)):
            raise AffineError("NotFinite", "the Cartan matrix is not of finite type")
        H = 1
        while True:
            sl = enumerate_roots(cd, H)
            top = max(sum(v) for v in sl.pos_real)
            if top < H:
                break
            H *= 2
        return cls(cd, tuple(sorted(sl.pos_real, key=canonical_key)), name)

    @classmethod
    def of_type(cls, name: str) -> FiniteRootSystem:
        return cls.from_cartan(cartan_datum(finite_cartan_matrix(name)), name)

    @property
    def rank(self) -> int:
        return self.cd.rank

    @property
    def roots(self) -> tuple[RootVec, ...]:
        return self.positive + tuple(neg(v) for v in self.positive)

    @property
    def root_set(self) -> frozenset[RootVec]:
        return frozenset(self.roots)

    def is_root(self, v: Sequence[int]) -> bool:
        v = tuple(v)
        return v in self.root_set

    def is_irreducible(self) -> bool:
        return len(gcm_components(self.cd.gcm)) == 1

    def highest_root(self) -> RootVec:
        if not self.is_irreducible():
            raise AffineError(
                "NotIrreducible", "highest root needs an irreducible system"
            )
        return highest_root(self.cd)

    def marks(self) -> RootVec:
        return self.highest_root()

    def simple_roots(self) -> list[RootVec]:
        n = self.rank
        return [tuple(int(i == j) for j in range(n)) for i in range(n)]

    # Cartan subalgebra in simple coroot coordinates
    def coroot(self, alpha: Sequence[int]) -> Vec:
        nn = norm(self.cd, alpha)
        return tuple(Fraction(2 * m * d, nn) for m, d in zip(alpha, self.cd.d))

    def evaluate(self, alpha: Sequence[int], h: Sequence) -> Fraction:
        a = self.cd.a
        n = self.rank
        return sum(
            (
                to_frac(h[i]) * a[i][j] * alpha[j]
                for i in range(n)
                for j in range(n)
                if alpha[j]
            ),
            Fraction(0),
        )

    def coroot_form(self) -> list[list[Fraction]]:
        a, d = self.cd.a, self.cd.d
        return [
            [Fraction(a[i][j], d[j]) for j in range(self.rank)]
            for i in range(self.rank)
        ]

    def form(self, h1: Sequence, h2: Sequence) -> Fraction:
        g = self.coroot_form()
        n = self.rank
        return sum(
            (
                to_frac(h1[i]) * g[i][j] * to_frac(h2[j])
                for i in range(n)
                for j in range(n)
            ),
            Fraction(0),
        )

    def h_of(self, roots: Iterable[Sequence[int]]) -> Subspace:
        return Subspace([self.coroot(r) for r in roots], self.rank)

    def perp(self, roots: Iterable[Sequence[int]]) -> Subspace:
        """{h : alpha(h) = 0 for all given roots}, the form-orthogonal complement of h(roots)."""
        return self.h_of(roots).annihilator(self.coroot_form())

    def full_h(self) -> Subspace:
        return Subspace.full(self.rank)


# ------------------------------------------------------------ affine roots


@dataclass(frozen=True, order=True)
class AffineRoot:
    fin: RootVec
    level: int

    @property
    def is_real(self) -> bool:
        return any(self.fin)

    def is_positive(self) -> bool:
        return self.level > 0 or (self.level == 0 and sign(self.fin) > 0)

    def __neg__(self) -> AffineRoot:
        return AffineRoot(neg(self.fin), -self.level)

    def to_json(self) -> dict:
        return {"fin": list(self.fin), "level": self.level}

    def __str__(self) -> str:
        return f"{list(self.fin)}+{self.level}d"


def is_affine_root(fr: FiniteRootSystem, r: AffineRoot) -> bool:
    return fr.is_root(r.fin) or (not any(r.fin) and r.level != 0)


def affine_reflect(cd: CartanDatum, a: AffineRoot, x: AffineRoot) -> AffineRoot:
    """s_{alpha + m delta}(beta + n delta) = s_alpha(beta) + (n - <beta, alpha^vee> m) delta."""
    c = pairing(cd, x.fin, a.fin)
    return AffineRoot(
        tuple(b - c * al for b, al in zip(x.fin, a.fin)), x.level - c * a.level
    )


def to_gcm_coords(fr: FiniteRootSystem, r: AffineRoot) -> RootVec:
    """Coordinates over (alpha_0, alpha_1, ...) with alpha_0 = delta - theta."""
    theta = fr.highest_root()
    return (r.level,) + tuple(f + r.level * t for f, t in zip(r.fin, theta))


def from_gcm_coords(fr: FiniteRootSystem, c: Sequence[int]) -> AffineRoot:
    theta = fr.highest_root()
    return AffineRoot(tuple(ci - c[0] * t for ci, t in zip(c[1:], theta)), c[0])


# ------------------------------------------------------------ closed subsystems


def finite_closure(
    fr: FiniteRootSystem, s: Iterable[Sequence[int]]
) -> frozenset[RootVec]:
    """Smallest closed subroot system of the finite system containing s."""
    members = {tuple(v) for v in s}
    for v in members:
        if not fr.is_root(v):
            raise AffineError("NotARoot", f"{v} is not a root")
    roots = fr.root_set
    queue = deque(sorted(members))
    done: list[RootVec] = []
    while queue:
        x = queue.popleft()
        new = []
        for y in done + [x]:
            z = add(x, y)
            if z in roots:
                new.append(z)
            new.append(reflect(fr.cd, x, y))
            new.append(reflect(fr.cd, y, x))
        done.append(x)
        for z in new:
            if z not in members:
                members.add(z)
                queue.append(z)
    return frozenset(members)


def is_closed(fr: FiniteRootSystem, psi0: Iterable[Sequence[int]]) -> bool:
    s = frozenset(tuple(v) for v in psi0)
    return finite_closure(fr, s) == s


def subsystem_components(
    fr: FiniteRootSystem, psi0: Iterable[Sequence[int]]
) -> list[frozenset[RootVec]]:
    """Irreducible components: classes of the relation 'non-orthogonal', closed up."""
    left = sorted({tuple(v) for v in psi0}, key=canonical_key)
    out = []
    while left:
        comp = {left[0]}
        stack = [left[0]]
        while stack:
            x = stack.pop()
            for y in left:
                if y not in comp and bilinear(fr.cd, x, y) != 0:
                    comp.add(y)
                    stack.append(y)
        out.append(frozenset(comp))
        left = [v for v in left if v not in comp]
    return sorted(out, key=_set_key)


def _set_key(s: Iterable[RootVec]) -> tuple:
    return tuple(sorted(canonical_key(v) for v in s))


def simple_system(fr: FiniteRootSystem, psi0: Iterable[Sequence[int]]) -> list[RootVec]:
    """Simple roots of a finite subroot system with respect to the ambient positivity."""
    pos = sorted((tuple(v) for v in psi0 if sign(v) > 0), key=canonical_key)
    pos_set = set(pos)
    out = []
    for b in pos:
        if all(reflect(fr.cd, b, g) in pos_set for g in pos if g != b):
            out.append(b)
    return out


def is_maximal_closed(fr: FiniteRootSystem, psi0: Iterable[Sequence[int]]) -> bool:
    s = frozenset(tuple(v) for v in psi0)
    full = fr.root_set
    if s == full:
        raise NotProper()
    if not is_closed(fr, s) or any(neg(v) not in s for v in s):
        return False
    for g in sorted(full - s):
        if finite_closure(fr, s | {g, neg(g)}) != full:
            return False
    return True


def _diagram_candidates(fr: FiniteRootSystem) -> list[frozenset[RootVec]]:
    marks = fr.marks()
    out = []
    for i, a in enumerate(marks):
        if a == 1:
            out.append(frozenset(v for v in fr.roots if v[i] == 0))
        if is_prime(a):
            out.append(frozenset(v for v in fr.roots if v[i] % a == 0))
    return out


def maximal_closed(fr: FiniteRootSystem, rank_cap: int = 8) -> list[frozenset[RootVec]]:
    """All maximal closed subroot systems as explicit sets, each certified by brute force."""
    if not fr.is_irreducible():
        raise AffineError(
            "NotIrreducible", "maximal_closed expects an irreducible system"
        )
    if fr.rank > rank_cap:
        raise AffineError("RankCap", f"rank {fr.rank} exceeds the cap {rank_cap}")
    simples = fr.simple_roots()
    found: set[frozenset[RootVec]] = set()
    for cand in _diagram_candidates(fr):
        queue = deque([cand])
        seen = {cand}
        while queue:
            s = queue.popleft()
            for a in simples:
                t = frozenset(reflect(fr.cd, a, v) for v in s)
                if t not in seen:
                    seen.add(t)
                    queue.append(t)
        found |= seen
    # the empty set is not listed; for A1 it would be the only candidate
    certified = [
        s for s in found if s and s != fr.root_set and is_maximal_closed(fr, s)
    ]
    return sorted(certified, key=lambda s: (len(s), _set_key(s)))


# ------------------------------------------------------------ Z-linear functions


@dataclass(frozen=True)
class ZLinearFn:
    base: tuple[RootVec, ...]
    values: tuple[int, ...]
    table: Mapping[RootVec, int] = field(compare=False, hash=False, repr=False)

    def __call__(self, alpha: Sequence[int]) -> int:
        return self.table[tuple(alpha)]

    def is_zero(self) -> bool:
        return not any(self.table.values())


def make_zlinear(
    roots: Iterable[Sequence[int]],
    base: Sequence[Sequence[int]] | None = None,
    values: Sequence[int] | None = None,
) -> ZLinearFn:
    """Extend values on a spanning independent set linearly; check integrality on every root."""
    roots = sorted({tuple(v) for v in roots}, key=canonical_key)
    if base is None:
        pos = [v for v in roots if sign(v) > 0]
        # a linearly independent spanning subset, greedy by height
        chosen: list[RootVec] = []
        for v in pos:
            if not chosen or solve(chosen, v) is None:
                chosen.append(v)
        base = chosen
    base = tuple(tuple(b) for b in base)
    values = tuple(int(x) for x in (values if values is not None else [0] * len(base)))
    if len(values) != len(base):
        raise AffineError("BadFunction", "f_base and f_values differ in length")
    rs = set(roots)
    for b in base:
        if b not in rs:
            raise AffineError(
                "BadFunction", f"base element {b} is not in the component"
            )
    if base and Subspace(base, len(base[0])).dim != len(base):
        raise AffineError("BadFunction", "f_base is linearly dependent")
    table: dict[RootVec, int] = {}
    for v in roots:
        coeffs = solve(base, v)
        if coeffs is None:
            raise AffineError("BadFunction", f"f_base does not span root {v}")
        val = sum((c * x for c, x in zip(coeffs, values)), Fraction(0))
        if val.denominator != 1:
            raise AffineError("NotIntegral", f"f({v}) = {val} is not an integer")
        table[v] = int(val)
    return ZLinearFn(base, values, table)


# ------------------------------------------------------------ periodic root sets


@dataclass(frozen=True)
class PeriodicComponent:
    roots: frozenset[RootVec]
    k: int
    f: ZLinearFn

    def levels_contain(self, alpha: RootVec, m: int) -> bool:
        if alpha not in self.roots:
            return False
        base = self.f(alpha)
        return m == base if self.k == 0 else (m - base) % self.k == 0


@dataclass(frozen=True)
class PeriodicRootSet:
    fr: FiniteRootSystem = field(repr=False)
    components: tuple[PeriodicComponent, ...]
    tag: str | None = None

    @property
    def psi0(self) -> frozenset[RootVec]:
        return (
            frozenset().union(*(c.roots for c in self.components))
            if self.components
            else frozenset()
        )

    def contains(self, r: AffineRoot) -> bool:
        return membership(self, r)

    def period(self) -> int:
        return reduce(lcm, (c.k for c in self.components if c.k), 1)

    def max_f(self) -> int:
        return max(
            (abs(v) for c in self.components for v in c.f.table.values()), default=0
        )

    def members_in_band(self, band: int) -> set[AffineRoot]:
        out = set()
        for c in self.components:
            for a in c.roots:
                for m in range(-band, band + 1):
                    if c.levels_contain(a, m):
                        out.add(AffineRoot(a, m))
        return out

    def component_of(self, alpha: RootVec) -> PeriodicComponent | None:
        return next((c for c in self.components if alpha in c.roots), None)

    def to_json(self) -> dict:
        return {
            "finite_type": self.fr.name,
            "components": [
                {
                    "roots": [list(v) for v in sorted(c.roots, key=canonical_key)],
                    "k": c.k,
                    "f_base": [list(b) for b in c.f.base],
                    "f_values": list(c.f.values),
                }
                for c in self.components
            ],
        }


def membership(psi: PeriodicRootSet, r: AffineRoot) -> bool:
    if not r.is_real:
        raise ValueError("membership is defined for real affine roots")
    return any(c.levels_contain(r.fin, r.level) for c in psi.components)


def validate_periodic(fr: FiniteRootSystem, raw: Sequence[Mapping]) -> PeriodicRootSet:
    """Build a PeriodicRootSet from raw {"roots","k","f_base","f_values"} components."""
    comps = []
    for idx, c in enumerate(raw):
        roots = frozenset(tuple(v) for v in c["roots"])
        if not roots:
            raise AffineError("EmptyComponent", f"component {idx}")
        for v in roots:
            if not fr.is_root(v):
                raise AffineError("NotARoot", f"{v} in component {idx}")
        if any(neg(v) not in roots for v in roots):
            raise AffineError(
                "NotSymmetric", f"component {idx} is not closed under negation"
            )
        if not is_closed(fr, roots):
            raise AffineError(
                "NotClosed", f"component {idx} is not a closed subroot system"
            )
        if len(subsystem_components(fr, roots)) != 1:
            raise AffineError("NotIrreducible", f"component {idx} is reducible")
        k = int(c.get("k", 0))
        if k < 0:
            raise AffineError("BadModulus", f"k={k} is negative")
        base = c.get("f_base")
        values = c.get("f_values")
        if base is None:
            base = simple_system(fr, roots)
            values = values if values is not None else [0] * len(base)
        f = make_zlinear(roots, base, values)
        comps.append(PeriodicComponent(roots, k, f))
    for i, a in enumerate(comps):
        for b in comps[i + 1 :]:
            if a.roots & b.roots:
                raise AffineError("Overlap", "components share roots")
            if any(bilinear(fr.cd, x, y) != 0 for x in a.roots for y in b.roots):
                raise AffineError("NotOrthogonal", "components are not orthogonal")
    union = frozenset().union(*(c.roots for c in comps)) if comps else frozenset()
    if comps and not is_closed(fr, union):
        raise AffineError("NotClosed", "the union of components is not closed")
    comps.sort(key=lambda c: _set_key(c.roots))
    psi = PeriodicRootSet(fr, tuple(comps))
    bad = real_closed_violation(psi)
    if bad is not None:
        raise AffineError(
            "NotRealClosed", f"{bad[0]} + {bad[1]} is a real root outside the set"
        )
    return psi


def real_closed_violation(psi: PeriodicRootSet) -> tuple[AffineRoot, AffineRoot] | None:
    """Finite residue check of real closedness and reflection stability.

    Levels in a component form one residue class mod k (a single level if
    k = 0); shifting by k fixes every residue, so representatives suffice.
    """
    cd = psi.fr.cd
    roots = psi.fr.root_set
    for c in psi.components:
        reps = {a: [c.f(a)] + ([c.f(a) + c.k] if c.k else []) for a in c.roots}
        for a, b in product(sorted(c.roots), repeat=2):
            for m in reps[a]:
                for n in reps[b]:
                    x, y = AffineRoot(a, m), AffineRoot(b, n)
                    s = add(a, b)
                    if s in roots and not membership(psi, AffineRoot(s, m + n)):
                        return x, y
                    if not membership(psi, affine_reflect(cd, x, y)):
                        return x, y
    return None


def periodic_from_psi0(
    fr: FiniteRootSystem,
    psi0: Iterable[Sequence[int]],
    k: int,
    f_simple: Sequence[int] | None = None,
) -> PeriodicRootSet:
    """Components of psi0 all with modulus k; f given on the ambient simple roots (default 0)."""
    raw = []
    f_simple = [0] * fr.rank if f_simple is None else list(f_simple)
    for comp in subsystem_components(fr, psi0):
        base = simple_system(fr, comp)
        vals = [sum(c * x for c, x in zip(b, f_simple)) for b in base]
        raw.append({"roots": sorted(comp), "k": k, "f_base": base, "f_values": vals})
    return validate_periodic(fr, raw)


def pi_exact(psi: PeriodicRootSet) -> list[AffineRoot]:
    """Exact Pi(Psi) from the stabilization criterion, decided on residues."""
    cd = psi.fr.cd
    out: list[AffineRoot] = []
    for c in psi.components:
        cands = []
        for a in c.roots:
            fa = c.f(a)
            if c.k == 0:
                levels = [fa]
            else:
                levels = [m for m in range(c.k + 1) if (m - fa) % c.k == 0]
            for m in levels:
                r = AffineRoot(a, m)
                if r.is_positive():
                    cands.append(r)
        for beta in cands:
            if _is_minimal(cd, c, beta):
                out.append(beta)
    return sorted(out, key=lambda r: (r.level, canonical_key(r.fin)))


def _is_minimal(cd: CartanDatum, c: PeriodicComponent, beta: AffineRoot) -> bool:
    for b in c.roots:
        cp = pairing(cd, b, beta.fin)
        top = max(cp * beta.level, 0)
        for n in range(top + 1):
            if not c.levels_contain(b, n):
                continue
            g = AffineRoot(b, n)
            if g == beta or not g.is_positive():
                continue
            if not affine_reflect(cd, beta, g).is_positive():
                return False
    return True


def maximal_real_closed(
    fr: FiniteRootSystem,
    case: str,
    k: int | None = None,
    f_simple: Sequence[int] | None = None,
    psi0: Iterable[Sequence[int]] | None = None,
) -> PeriodicRootSet:
    """Case 1: (full finite system, k prime, f); Case 2: (psi0 maximal closed, 1, 0)."""
    if case == "case1":
        if k is None or not is_prime(k):
            raise NotPrime(k if k is not None else 0)
        p = periodic_from_psi0(fr, fr.roots, k, f_simple)
        return PeriodicRootSet(p.fr, p.components, "full-gradient")
    if case == "case2":
        s = frozenset(tuple(v) for v in psi0 or ())
        if not is_maximal_closed(fr, s):
            raise AffineError(
                "NotMaximal", "psi0 is not a maximal closed subroot system"
            )
        p = periodic_from_psi0(fr, s, 1)
        return PeriodicRootSet(p.fr, p.components, "proper-gradient")
    raise ValueError(f"unknown case {case!r}")


# ------------------------------------------------------------ Lambda and V


@dataclass(frozen=True)
class PeriodicIntSet:
    modulus: int = 1
    residues: frozenset[int] = frozenset()
    add: frozenset[int] = frozenset()
    remove: frozenset[int] = frozenset()

    @classmethod
    def empty(cls) -> PeriodicIntSet:
        return cls()

    @classmethod
    def finite(cls, xs: Iterable[int]) -> PeriodicIntSet:
        return cls(1, frozenset(), frozenset(xs), frozenset())

    def __contains__(self, x: int) -> bool:
        if x in self.add:
            return True
        return x % self.modulus in self.residues and x not in self.remove

    def horizon(self) -> int:
        return max((abs(x) for x in self.add | self.remove), default=0)

    def to_json(self) -> dict:
        return {
            "modulus": self.modulus,
            "residues": sorted(self.residues),
            "add": sorted(self.add),
            "remove": sorted(self.remove),
        }


def validate_lambda(lam: PeriodicIntSet) -> PeriodicIntSet:
    if lam.modulus < 1:
        raise AffineError("BadModulus", "Lambda modulus must be positive")
    lam = PeriodicIntSet(
        lam.modulus,
        frozenset(r % lam.modulus for r in lam.residues),
        lam.add,
        lam.remove,
    )
    if 0 in lam:
        raise AffineError("LambdaContainsZero", "0 must not lie in Lambda")
    w = lam.horizon() + 2 * lam.modulus
    for x in range(-w, w + 1):
        if (x in lam) != (-x in lam):
            raise AffineError(
                "LambdaNotSymmetric", f"{x} in Lambda but {-x} not (Lambda != -Lambda)"
            )
    return lam


@dataclass(frozen=True)
class SymRegTuple:
    psi: PeriodicRootSet
    lam: PeriodicIntSet
    v_residue: Mapping[int, Subspace]
    v_level: Mapping[int, Subspace]
    modulus: int

    @property
    def fr(self) -> FiniteRootSystem:
        return self.psi.fr

    def in_k_layers(self, x: int) -> list[PeriodicComponent]:
        return [
            c for c in self.psi.components if (x == 0 if c.k == 0 else x % c.k == 0)
        ]

    def in_I(self, x: int) -> bool:
        return x == 0 or bool(self.in_k_layers(x)) or x in self.lam

    def v(self, x: int) -> Subspace:
        if x in self.v_level:
            return self.v_level[x]
        return self.v_residue.get(x % self.modulus, Subspace.zero(self.fr.rank))

    def root_layer(self, x: int) -> Subspace:
        fr = self.fr
        out = Subspace.zero(fr.rank)
        for c in self.in_k_layers(x):
            out = out + fr.h_of(c.roots)
        return out

    def layer(self, x: int) -> Subspace:
        """The h-part at t^x (x != 0), or its projection to h at x = 0."""
        return self.root_layer(x) + self.v(x)

    def horizon(self) -> int:
        return max(
            [self.lam.horizon(), self.psi.max_f()] + [abs(x) for x in self.v_level],
            default=0,
        )

    def test_levels(self, extra: int = 0) -> range:
        w = self.horizon() + 2 * self.modulus + extra
        return range(-w, w + 1)

    def has_c(self) -> bool:
        """Whether the central element c lies in the subalgebra (beyond graphs alpha^vee + kappa c)."""
        if any(c.k > 0 for c in self.psi.components):
            return True
        fr = self.fr
        form = fr.coroot_form()
        for x in self.test_levels():
            if x == 0:
                continue
            a, b = self.layer(x), self.layer(-x)
            for u in a.basis:
                for w in b.basis:
                    if (
                        sum(
                            u[i] * form[i][j] * w[j]
                            for i in range(fr.rank)
                            for j in range(fr.rank)
                        )
                        != 0
                    ):
                        return True
        return False

    def level0_space(self) -> Subspace:
        """Level-0 Cartan part in coordinates (h coroot coords, c)."""
        fr = self.fr
        n = fr.rank
        vecs: list[list] = []
        c_present = self.has_c()
        for comp in self.psi.components:
            for a in sorted(comp.roots):
                if sign(a) < 0:
                    continue
                h = list(fr.coroot(a))
                kappa = (
                    Fraction(0)
                    if c_present
                    else Fraction(2 * comp.f(a), norm(fr.cd, a))
                )
                vecs.append(h + [kappa])
        for b in self.v(0).basis:
            vecs.append(list(b) + [Fraction(0)])
        if c_present:
            vecs.append([0] * n + [1])
        return Subspace(vecs, n + 1)

    def to_json(self) -> dict:
        out = self.psi.to_json()
        out["lambda"] = self.lam.to_json()
        v = [
            {"residue": r, "basis": _basis_json(s)}
            for r, s in sorted(self.v_residue.items())
            if s.dim
        ]
        v += [
            {"level": x, "basis": _basis_json(s)}
            for x, s in sorted(self.v_level.items())
        ]
        out["v"] = v
        return out


def _basis_json(s: Subspace) -> list[list[str]]:
    return [[str(x) for x in b] for b in s.basis]


def make_tuple(
    psi: PeriodicRootSet,
    lam: PeriodicIntSet | None = None,
    v_residue: Mapping[int, Subspace | Iterable] | None = None,
    v_level: Mapping[int, Subspace | Iterable] | None = None,
    modulus: int | None = None,
) -> SymRegTuple:
    """Assemble and validate a tuple; V given per residue class mod L and optional per-level overrides."""
    fr = psi.fr
    lam = validate_lambda(lam or PeriodicIntSet.empty())
    L = reduce(lcm, [c.k for c in psi.components if c.k] + [lam.modulus], 1)
    if modulus is not None:
        if modulus % L:
            raise AffineError(
                "BadModulus", f"V modulus {modulus} is not a multiple of {L}"
            )
        L = modulus

    def sub(x) -> Subspace:
        return x if isinstance(x, Subspace) else Subspace(x, fr.rank)

    vr = {}
    for r, s in (v_residue or {}).items():
        s = sub(s)
        if s.dim_ambient != fr.rank:
            raise AffineError(
                "BadSubspace", "V_x must live in the finite Cartan subalgebra"
            )
        if s.dim:
            vr[r % L] = s
    vl = {int(x): sub(s) for x, s in (v_level or {}).items()}
    t = SymRegTuple(psi, lam, vr, vl, L)
    _check_tuple(t)
    return t


def _check_tuple(t: SymRegTuple) -> None:
    fr = t.fr
    for c in t.psi.components:
        for x in t.test_levels():
            if x in t.lam and (x == 0 if c.k == 0 else x % c.k == 0):
                raise AffineError("LambdaMeetsKZ", f"{x} lies in Lambda and in {c.k}Z")
    for x in t.test_levels():
        v = t.v(x)
        if not v.dim:
            continue
        if not t.in_I(x):
            raise AffineError("VOutsideI", f"V_{x} != 0 but {x} is not in I(k, Lambda)")
        for c in t.psi.components:
            in_layer = x == 0 if c.k == 0 else x % c.k == 0
            if not in_layer and not v <= fr.perp(c.roots):
                raise AffineError(
                    "VNotPerp", f"V_{x} is not contained in h(Psi_i)^perp"
                )
        if v.intersect(t.root_layer(x)).dim:
            raise AffineError(
                "VMeetsH", f"V_{x} meets the sum of h(Psi_i) at level {x}"
            )


def validate_tuple(raw: Mapping) -> SymRegTuple:
    fr = FiniteRootSystem.of_type(raw["finite_type"])
    psi = validate_periodic(fr, raw.get("components", []))
    lraw = raw.get("lambda") or {}
    lam = PeriodicIntSet(
        int(lraw.get("modulus", 1)),
        frozenset(int(x) for x in lraw.get("residues", [])),
        frozenset(int(x) for x in lraw.get("add", [])),
        frozenset(int(x) for x in lraw.get("remove", [])),
    )
    v_res: dict[int, list] = {}
    v_lev: dict[int, list] = {}
    for entry in raw.get("v", []):
        basis = [[to_frac(x) for x in row] for row in entry.get("basis", [])]
        if "level" in entry:
            v_lev[int(entry["level"])] = basis
        else:
            v_res[int(entry["residue"])] = basis
    return make_tuple(psi, lam, v_res, v_lev, raw.get("modulus"))


def parse_affine_json(text: str) -> tuple[SymRegTuple, bool]:
    raw = json.loads(text)
    return validate_tuple(raw), bool(raw.get("with_d", False))


# ------------------------------------------------------------ roots of a tuple


@dataclass(frozen=True)
class TupleRoots:
    real: frozenset[AffineRoot]
    imaginary_levels: frozenset[int]


def tuple_roots(t: SymRegTuple, band: int) -> TupleRoots:
    real = frozenset(t.psi.members_in_band(band))
    imag = frozenset(x for x in range(-band, band + 1) if x != 0 and t.layer(x).dim > 0)
    return TupleRoots(real, imag)


def tuple_leq(
    t1: SymRegTuple, t2: SymRegTuple, d1: bool = False, d2: bool = False
) -> bool:
    """Containment s(t1) (+Cd if d1) inside s(t2) (+Cd if d2)."""
    if t1.fr.cd != t2.fr.cd:
        raise ValueError("tuples over different finite systems")
    if d1 and not d2:
        return False
    w = max(t1.horizon(), t2.horizon()) + 2 * lcm(t1.modulus, t2.modulus)
    for c in t1.psi.components:
        for a in c.roots:
            for m in range(-w, w + 1):
                if c.levels_contain(a, m) and not membership(t2.psi, AffineRoot(a, m)):
                    return False
    for x in range(-w, w + 1):
        if x and not t1.layer(x) <= t2.layer(x):
            return False
    return t1.level0_space() <= t2.level0_space()


def is_derived_algebra(t: SymRegTuple) -> bool:
    fr = t.fr
    return (
        t.psi.psi0 == fr.root_set
        and len(t.psi.components) == 1
        and t.psi.components[0].k == 1
    )


@dataclass(frozen=True)
class MaximalityVerdict:
    maximal: bool
    shape: str | None
    reason: str

    def to_json(self) -> dict:
        return {"maximal": self.maximal, "shape": self.shape, "reason": self.reason}


def is_maximal_tuple(t: SymRegTuple, with_d: bool) -> MaximalityVerdict:
    fr = t.fr
    if not fr.is_irreducible():
        raise AffineError("NotIrreducible", "the finite part must be simple")
    full = fr.root_set
    psi0 = t.psi.psi0
    comps = t.psi.components
    if is_derived_algebra(t):
        if with_d:
            return MaximalityVerdict(
                False, None, "this is the whole algebra, not proper"
            )
        return MaximalityVerdict(True, "derived", "[g,g]")
    if not with_d:
        return MaximalityVerdict(
            False, None, "strictly below the same datum with d added"
        )
    if psi0 == full:
        k = comps[0].k
        if not is_prime(k):
            return MaximalityVerdict(False, None, f"k={k} is not prime")
        if any(t.layer(x) != t.root_layer(x) for x in t.test_levels() if x):
            return MaximalityVerdict(False, None, "unexpected extra Cartan layers")
        return MaximalityVerdict(True, "case1", f"full gradient with prime k={k}")
    if not is_maximal_closed(fr, psi0):
        return MaximalityVerdict(
            False, None, "finite part is not a maximal closed subroot system"
        )
    if any(c.k != 1 for c in comps):
        return MaximalityVerdict(False, None, "some component has k != 1")
    if any(t.layer(x) != fr.full_h() for x in t.test_levels()):
        return MaximalityVerdict(
            False, None, "some imaginary level lacks the full Cartan subalgebra"
        )
    return MaximalityVerdict(
        True, "case2", "proper gradient over a maximal closed subroot system"
    )


# ------------------------------------------------------------ named tuples


def derived_tuple(fr: FiniteRootSystem) -> SymRegTuple:
    return make_tuple(periodic_from_psi0(fr, fr.roots, 1))


def case1_tuple(
    fr: FiniteRootSystem, k: int, f_simple: Sequence[int] | None = None
) -> SymRegTuple:
    return make_tuple(periodic_from_psi0(fr, fr.roots, k, f_simple))


def case2_tuple(fr: FiniteRootSystem, psi0: Iterable[Sequence[int]]) -> SymRegTuple:
    s = frozenset(tuple(v) for v in psi0)
    perp = fr.perp(s)
    return make_tuple(periodic_from_psi0(fr, s, 1), v_residue={0: perp})
