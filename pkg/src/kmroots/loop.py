"""Bracket engine for untwisted affine algebras g = g0 (x) C[t, 1/t] + Cc + Cd.

Basis keys of a :class:`LoopElement`:

* ``("X", alpha, r)``  x_alpha (x) t^r
* ``("H", i, r)``      alpha_i^vee (x) t^r
* ``("C",)`` and ``("D",)``

Structure constants follow Chevalley's normalization with signs fixed by
extraspecial pairs: positive roots are ordered by (height, coefficient
vector) and N(alpha, beta) = +(p+1) on every extraspecial pair. Further
conventions: N(-a,-b) = -N(a,b), [x_a, x_-a] = a^vee, and the invariant
form has (x_a, x_-a) = 2/(a,a) and (h_i, h_j) = a_ij/d_j.
"""

from __future__ import annotations

import json
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement

from kmroots.affine import (
    AffineRoot,
    FiniteRootSystem,
    PeriodicRootSet,
    SymRegTuple,
)
from kmroots.cartan import RootVec, norm
from kmroots.linalg import Subspace, nullspace, rank, to_frac
from kmroots.rootslice import add, canonical_key, neg, sign, sub

Key = tuple

# ------------------------------------------------------------------ Chevalley


@dataclass(frozen=True)
class ChevalleyBasis:
    fr: FiniteRootSystem
    n_table: Mapping[tuple[RootVec, RootVec], int] = field(repr=False)
    order: tuple[RootVec, ...] = field(repr=False)

    @property
    def rank(self) -> int:
        return self.fr.rank

    def N(self, a: RootVec, b: RootVec) -> int:
        return self.n_table.get((a, b), 0)

    def metadata(self) -> dict:
        return {
            "sign_convention": "extraspecial pairs positive; positive roots ordered by (height, coefficients)",
            "form": "(x_a, x_-a) = 2/(a,a); (h_i, h_j) = a_ij/d_j",
            "order": [list(v) for v in self.order],
        }


def _string_p(roots: frozenset[RootVec], a: RootVec, b: RootVec) -> int:
    """Largest p with b - p a a root."""
    p = 0
    x = sub(b, a)
    while x in roots:
        p += 1
        x = sub(x, a)
    return p


def chevalley(fr: FiniteRootSystem) -> ChevalleyBasis:
    cd = fr.cd
    roots = fr.root_set
    pos = sorted(fr.positive, key=canonical_key)
    idx = {v: i for i, v in enumerate(pos)}
    nn = {v: norm(cd, v) for v in fr.roots}
    table: dict[tuple[RootVec, RootVec], int] = {}

    def N(a: RootVec, b: RootVec) -> Fraction:
        s = add(a, b)
        if s not in roots:
            return Fraction(0)
        if (a, b) in table:
            return Fraction(table[(a, b)])
        sa, sb = sign(a), sign(b)
        if sa > 0 and sb > 0:
            if idx[a] > idx[b]:
                return -N(b, a)
            raise KeyError((a, b))
        if sa < 0 and sb < 0:
            return -N(neg(a), neg(b))
        # a + b + (-s) = 0: N(a,b)/(s,s) = N(b,-s)/(a,a) = N(-s,a)/(b,b)
        if sign(s) > 0:
            x, y, z = (b, neg(s), a) if sa > 0 else (neg(s), a, b)
        else:
            x, y, z = (neg(s), a, b) if sa > 0 else (b, neg(s), a)
        return Fraction(nn[s], nn[z]) * N(x, y)

    for xi in pos:
        special = [
            (a, sub(xi, a)) for a in pos if sub(xi, a) in roots and sign(sub(xi, a)) > 0
        ]
        special = [(a, b) for a, b in special if idx[a] < idx[b]]
        if not special:
            continue
        a1, b1 = min(special, key=lambda ab: idx[ab[0]])
        table[(a1, b1)] = _string_p(roots, a1, b1) + 1
        for a, b in special:
            if (a, b) == (a1, b1):
                continue
            t1 = Fraction(0)
            if add(b, neg(a1)) in roots:
                t1 = N(b, neg(a1)) * N(a, neg(b1)) / nn[add(b, neg(a1))]
            t2 = Fraction(0)
            if add(a, neg(a1)) in roots:
                t2 = N(neg(a1), a) * N(b, neg(b1)) / nn[add(a, neg(a1))]
            val = -nn[xi] * (t1 + t2) / (-table[(a1, b1)])
            if val.denominator != 1:
                raise ArithmeticError(f"non-integral structure constant at {a}, {b}")
            table[(a, b)] = int(val)
    full: dict[tuple[RootVec, RootVec], int] = {}
    for a in fr.roots:
        for b in fr.roots:
            if add(a, b) in roots:
                v = N(a, b)
                if v.denominator != 1:
                    raise ArithmeticError(
                        f"non-integral structure constant at {a}, {b}"
                    )
                full[(a, b)] = int(v)
    return ChevalleyBasis(fr, full, tuple(pos))


# ------------------------------------------------------------------ elements


def _key_order(k: Key) -> tuple:
    if k[0] == "X":
        return (3, k[2], canonical_key(k[1]))
    if k[0] == "H":
        return (2, k[2], k[1])
    return (0,) if k[0] == "C" else (1,)


class LoopElement:
    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Key, Fraction | int] | None = None):
        self.terms: dict[Key, Fraction] = {}
        for k, v in (terms or {}).items():
            v = to_frac(v)
            if v:
                self.terms[k] = self.terms.get(k, Fraction(0)) + v
        self.terms = {k: v for k, v in self.terms.items() if v}

    # constructors
    @classmethod
    def x(cls, alpha: Sequence[int], r: int = 0, coef=1) -> LoopElement:
        return cls({("X", tuple(alpha), r): coef})

    @classmethod
    def h(cls, i: int, r: int = 0, coef=1) -> LoopElement:
        return cls({("H", i, r): coef})

    @classmethod
    def hvec(cls, coords: Sequence, r: int = 0) -> LoopElement:
        return cls({("H", i, r): c for i, c in enumerate(coords)})

    @classmethod
    def c(cls, coef=1) -> LoopElement:
        return cls({("C",): coef})

    @classmethod
    def d(cls, coef=1) -> LoopElement:
        return cls({("D",): coef})

    def __add__(self, other: LoopElement) -> LoopElement:
        t = dict(self.terms)
        for k, v in other.terms.items():
            t[k] = t.get(k, Fraction(0)) + v
        return LoopElement(t)

    def __sub__(self, other: LoopElement) -> LoopElement:
        return self + other.scale(-1)

    def scale(self, s) -> LoopElement:
        s = to_frac(s)
        return LoopElement({k: s * v for k, v in self.terms.items()})

    def __neg__(self) -> LoopElement:
        return self.scale(-1)

    def __eq__(self, other) -> bool:
        return isinstance(other, LoopElement) and self.terms == other.terms

    def __hash__(self) -> int:
        return hash(frozenset(self.terms.items()))

    def is_zero(self) -> bool:
        return not self.terms

    def keys_sorted(self) -> list[Key]:
        return sorted(self.terms, key=_key_order)

    def weights(self) -> set:
        return {_wkey(k) for k in self.terms}

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for k in self.keys_sorted():
            v = self.terms[k]
            if k[0] == "X":
                name = f"x{list(k[1])}t^{k[2]}"
            elif k[0] == "H":
                name = f"h{k[1]}t^{k[2]}"
            else:
                name = k[0].lower()
            parts.append(f"{v}*{name}")
        return " + ".join(parts)

    def to_json(self) -> dict:
        out = []
        for k in self.keys_sorted():
            term: dict = {"kind": k[0], "coef": str(self.terms[k])}
            if k[0] == "X":
                term.update(root=list(k[1]), r=k[2])
            elif k[0] == "H":
                term.update(i=k[1], r=k[2])
            out.append(term)
        return {"terms": out}

    @classmethod
    def from_json(cls, data: Mapping) -> LoopElement:
        t: dict[Key, Fraction] = {}
        for term in data.get("terms", []):
            kind = term["kind"]
            coef = to_frac(term.get("coef", 1))
            if kind == "X":
                key: Key = (
                    "X",
                    tuple(int(c) for c in term["root"]),
                    int(term.get("r", 0)),
                )
            elif kind == "H":
                key = ("H", int(term["i"]), int(term.get("r", 0)))
            elif kind in ("C", "D"):
                key = (kind,)
            else:
                raise ValueError(f"unknown term kind {kind!r}")
            t[key] = t.get(key, Fraction(0)) + coef
        return cls(t)


def _wkey(k: Key) -> tuple:
    """Weight bucket: ('X', alpha, r), ('H', r) for Cartan at level r; c and d sit in ('H', 0)."""
    if k[0] == "X":
        return ("X", k[1], k[2])
    if k[0] == "H":
        return ("H", k[2])
    return ("H", 0)


# ------------------------------------------------------------------ bracket


def _basis_bracket(cb: ChevalleyBasis, k1: Key, k2: Key) -> dict[Key, Fraction]:
    fr = cb.fr
    a = fr.cd.a
    t1, t2 = k1[0], k2[0]
    if t1 == "C" or t2 == "C":
        return {}
    if t1 == "D":
        if t2 == "D":
            return {}
        r = k2[2]
        return {k2: Fraction(r)} if r else {}
    if t2 == "D":
        r = k1[2]
        return {k1: Fraction(-r)} if r else {}
    m, n = k1[2], k2[2]
    out: dict[Key, Fraction] = {}
    if t1 == "H" and t2 == "H":
        if m + n == 0 and m:
            val = Fraction(a[k1[1]][k2[1]], fr.cd.d[k2[1]]) * m
            if val:
                out[("C",)] = val
        return out
    if t1 == "H" and t2 == "X":
        alpha = k2[1]
        val = sum(a[k1[1]][j] * alpha[j] for j in range(fr.rank))
        if val:
            out[("X", alpha, m + n)] = Fraction(val)
        return out
    if t1 == "X" and t2 == "H":
        return {k: -v for k, v in _basis_bracket(cb, k2, k1).items()}
    alpha, beta = k1[1], k2[1]
    s = add(alpha, beta)
    if not any(s):
        for i, c in enumerate(fr.coroot(alpha)):
            if c:
                out[("H", i, m + n)] = c
        if m + n == 0 and m:
            out[("C",)] = Fraction(2 * m, norm(fr.cd, alpha))
        return out
    nval = cb.N(alpha, beta)
    if nval:
        out[("X", s, m + n)] = Fraction(nval)
    return out


def bracket(cb: ChevalleyBasis, x: LoopElement, y: LoopElement) -> LoopElement:
    acc: dict[Key, Fraction] = {}
    for k1, v1 in x.terms.items():
        for k2, v2 in y.terms.items():
            for k, v in _basis_bracket(cb, k1, k2).items():
                acc[k] = acc.get(k, Fraction(0)) + v1 * v2 * v
    return LoopElement(acc)


def form(cb: ChevalleyBasis, x: LoopElement, y: LoopElement) -> Fraction:
    """Normalized invariant form; (c, d) = 1, (c, c) = (d, d) = 0."""
    fr = cb.fr
    a, d = fr.cd.a, fr.cd.d
    total = Fraction(0)
    for k1, v1 in x.terms.items():
        for k2, v2 in y.terms.items():
            if k1[0] == "X" and k2[0] == "X":
                if k1[2] + k2[2] == 0 and add(k1[1], k2[1]) == (0,) * fr.rank:
                    total += v1 * v2 * Fraction(2, norm(fr.cd, k1[1]))
            elif k1[0] == "H" and k2[0] == "H":
                if k1[2] + k2[2] == 0:
                    total += v1 * v2 * Fraction(a[k1[1]][k2[1]], d[k2[1]])
            elif {k1[0], k2[0]} == {"C", "D"}:
                total += v1 * v2
    return total


def chevalley_involution(x: LoopElement) -> LoopElement:
    t: dict[Key, Fraction] = {}
    for k, v in x.terms.items():
        if k[0] == "X":
            t[("X", neg(k[1]), -k[2])] = -v
        elif k[0] == "H":
            t[("H", k[1], -k[2])] = -v
        else:
            t[k] = -v
    return LoopElement(t)


def degree(x: LoopElement) -> int:
    return max((abs(k[2]) for k in x.terms if k[0] in ("X", "H")), default=0)


# ------------------------------------------------------------------ spans


class _Echelon:
    """Reduced echelon basis of a subspace of LoopElements supported on one weight bucket."""

    def __init__(self):
        self.rows: list[LoopElement] = []
        self.pivots: list[Key] = []

    def reduce(self, x: LoopElement) -> LoopElement:
        t = dict(x.terms)
        for row, p in zip(self.rows, self.pivots):
            c = t.get(p)
            if c:
                for k, v in row.terms.items():
                    t[k] = t.get(k, Fraction(0)) - c * v
        return LoopElement(t)

    def add(self, x: LoopElement) -> LoopElement | None:
        r = self.reduce(x)
        if r.is_zero():
            return None
        p = r.keys_sorted()[0]
        r = r.scale(1 / r.terms[p])
        new_rows = []
        for row in self.rows:
            c = row.terms.get(p)
            new_rows.append(row - r.scale(c) if c else row)
        self.rows = new_rows + [r]
        self.pivots = self.pivots + [p]
        order = sorted(range(len(self.rows)), key=lambda i: _key_order(self.pivots[i]))
        self.rows = [self.rows[i] for i in order]
        self.pivots = [self.pivots[i] for i in order]
        return r

    def contains(self, x: LoopElement) -> bool:
        return self.reduce(x).is_zero()

    @property
    def dim(self) -> int:
        return len(self.rows)


def _split_weights(x: LoopElement) -> dict[tuple, LoopElement]:
    parts: dict[tuple, dict] = {}
    for k, v in x.terms.items():
        parts.setdefault(_wkey(k), {})[k] = v
    return {w: LoopElement(t) for w, t in parts.items()}


@dataclass
class SubalgebraSlice:
    cb: ChevalleyBasis
    band: int
    generators: list[LoopElement]
    spans: dict[tuple, _Echelon]
    saturated: bool = True
    caveat: str = (
        "closed under brackets of in-band elements; elements reachable only "
        "through out-of-band intermediates are not chased"
    )

    def basis(self, w: tuple) -> list[LoopElement]:
        e = self.spans.get(w)
        return list(e.rows) if e else []

    def all_basis(self) -> list[tuple[tuple, LoopElement]]:
        out = []
        for w in sorted(self.spans, key=_wsort):
            out += [(w, b) for b in self.spans[w].rows]
        return out

    def contains(self, x: LoopElement) -> bool:
        for w, part in _split_weights(x).items():
            e = self.spans.get(w)
            if e is None or not e.contains(part):
                return False
        return True

    def dim(self) -> int:
        return sum(e.dim for e in self.spans.values())

    def cartan(self, level: int) -> _Echelon:
        return self.spans.get(("H", level), _Echelon())


def _wsort(w: tuple) -> tuple:
    if w[0] == "X":
        return (1, w[2], canonical_key(w[1]))
    return (0, w[1])


def _in_band(w: tuple, band: int) -> bool:
    level = w[2] if w[0] == "X" else w[1]
    return abs(level) <= band


def generate(
    cb: ChevalleyBasis, gens: Iterable[LoopElement], band: int, cap: int = 200_000
) -> SubalgebraSlice:
    """Smallest subspace within |degree| <= band containing gens and closed under in-band brackets."""
    gens = list(gens)
    for g in gens:
        if degree(g) > band:
            raise ValueError(f"generator {g} lies outside the band {band}")
    spans: dict[tuple, _Echelon] = {}
    queue: list[LoopElement] = []

    def insert(x: LoopElement):
        for w, part in _split_weights(x).items():
            if not _in_band(w, band):
                continue
            e = spans.setdefault(w, _Echelon())
            r = e.add(part)
            if r is not None:
                queue.append(r)

    for g in gens:
        insert(g)
    processed: list[LoopElement] = []
    steps = 0
    while queue:
        x = queue.pop(0)
        for y in processed + [x]:
            steps += 1
            if steps > cap:
                raise RuntimeError("bracket budget exhausted while generating")
            z = bracket(cb, x, y)
            if not z.is_zero():
                insert(z)
        processed.append(x)
    # rows may have been re-reduced after insertion; the span is what matters
    return SubalgebraSlice(cb, band, gens, spans)


# ------------------------------------------------------------------ supports


@dataclass(frozen=True)
class RootSupport:
    real: frozenset[AffineRoot]
    imaginary_levels: frozenset[int]

    def to_json(self) -> dict:
        return {
            "real": [
                r.to_json()
                for r in sorted(
                    self.real, key=lambda r: (r.level, canonical_key(r.fin))
                )
            ],
            "imaginary_levels": sorted(self.imaginary_levels),
        }


def root_support(s: SubalgebraSlice) -> RootSupport:
    real, imag = set(), set()
    for w, e in s.spans.items():
        if not e.dim:
            continue
        if w[0] == "X":
            real.add(AffineRoot(w[1], w[2]))
        elif w[1] != 0:
            imag.add(w[1])
    return RootSupport(frozenset(real), frozenset(imag))


def _h_subspace(fr: FiniteRootSystem, e: _Echelon, with_c: bool = False) -> Subspace:
    n = fr.rank
    vecs = []
    for row in e.rows:
        v = [Fraction(0)] * (n + (1 if with_c else 0))
        for k, c in row.terms.items():
            if k[0] == "H":
                v[k[1]] = c
            elif k[0] == "C" and with_c:
                v[n] = c
        vecs.append(v)
    return Subspace(vecs, n + (1 if with_c else 0))


def cartan_layer(s: SubalgebraSlice, level: int) -> Subspace:
    """h-part at level != 0 in coroot coordinates; at level 0 the (h, c) part, ignoring d."""
    return _h_subspace(s.cb.fr, s.cartan(level), with_c=(level == 0))


def has_d(s: SubalgebraSlice) -> bool:
    return any(("D",) in row.terms for row in s.cartan(0).rows)


# ------------------------------------------------------------------ root generated


def root_generators(psi: PeriodicRootSet, band: int) -> list[LoopElement]:
    return [
        LoopElement.x(r.fin, r.level)
        for r in sorted(
            psi.members_in_band(band), key=lambda r: (r.level, canonical_key(r.fin))
        )
    ]


def expected_cartan_layers(psi: PeriodicRootSet, band: int) -> dict[int, Subspace]:
    """Cartan layers of g(Psi): h(Psi_i) at levels in k_i Z; level 0 carries the (h, c) part.

    At level 0 the central element appears on its own iff some k_i > 0 (two
    levels of the same root then differ by a nonzero multiple of k_i). When
    every k_i = 0 a component only contributes the graph vectors
    alpha^vee + (2 f(alpha)/(alpha, alpha)) c.
    """
    fr = psi.fr
    n = fr.rank
    layers: dict[int, Subspace] = {}
    c_alone = any(c.k > 0 for c in psi.components)
    for x in range(-band, band + 1):
        if x == 0:
            vecs = []
            for comp in psi.components:
                for a in comp.roots:
                    if sign(a) > 0:
                        kappa = (
                            0 if c_alone else Fraction(2 * comp.f(a), norm(fr.cd, a))
                        )
                        vecs.append(list(fr.coroot(a)) + [kappa])
            if c_alone:
                vecs.append([0] * n + [1])
            layers[0] = Subspace(vecs, n + 1)
        else:
            sp = Subspace.zero(n)
            for comp in psi.components:
                if comp.k and x % comp.k == 0:
                    sp = sp + fr.h_of(comp.roots)
            layers[x] = sp
    return layers


def literal_c_prime_rule(psi: PeriodicRootSet) -> bool:
    """The literal rule: c' = 0 iff every k_i = 0 and every f_i vanishes; True means c' = c."""
    return not all(c.k == 0 and c.f.is_zero() for c in psi.components)


@dataclass
class Report:
    status: str
    checks: dict
    witnesses: list = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def to_json(self) -> dict:
        return {
            "status": self.status,
            "checks": self.checks,
            "witnesses": self.witnesses,
            "notes": self.notes,
        }


def verify_root_generated(
    psi: PeriodicRootSet, band: int, cb: ChevalleyBasis | None = None
) -> Report:
    cb = cb or chevalley(psi.fr)
    s = generate(cb, root_generators(psi, band), band)
    sup = root_support(s)
    expected_real = frozenset(psi.members_in_band(band))
    witnesses = []
    real_ok = sup.real == expected_real
    if not real_ok:
        witnesses.append(
            {
                "extra": [r.to_json() for r in sorted(sup.real - expected_real)],
                "missing": [r.to_json() for r in sorted(expected_real - sup.real)],
            }
        )
    exp = expected_cartan_layers(psi, band)
    bad_levels = [x for x in range(-band, band + 1) if cartan_layer(s, x) != exp[x]]
    layers_ok = not bad_levels
    if bad_levels:
        witnesses.append({"cartan_mismatch_levels": bad_levels})
    c_in = cartan_layer(s, 0).contains([0] * psi.fr.rank + [1])
    literal = literal_c_prime_rule(psi)
    checks = {
        "real_support": real_ok,
        "cartan_layers": layers_ok,
        "c_present": c_in,
        "c_prime_literal_rule": literal,
        "c_prime_literal_agrees": c_in == literal,
        "no_d": not has_d(s),
    }
    ok = real_ok and layers_ok and checks["no_d"]
    notes = [s.caveat]
    if not checks["c_prime_literal_agrees"]:
        notes.append(
            "c is not separately present: every k_i = 0, so level 0 only holds alpha^vee + kappa c"
        )
    return Report("pass" if ok else "fail", checks, witnesses, notes)


# ------------------------------------------------------------------ key properties


def verify_keyprop(s: SubalgebraSlice) -> Report:
    """For real alpha, beta in Delta(s): alpha+beta in Delta => in Delta(s); s_alpha(beta) and the
    alpha-string through beta lie in Delta(s), whenever everything stays inside the band."""
    fr = s.cb.fr
    sup = root_support(s)
    real = sorted(sup.real, key=lambda r: (r.level, canonical_key(r.fin)))
    present = set(sup.real)
    imag = set(sup.imaginary_levels)
    band = s.band
    witnesses = []
    checked = 0

    def in_s(fin: RootVec, level: int) -> bool | None:
        if abs(level) > band:
            return None
        if any(fin):
            return AffineRoot(fin, level) in present
        return level in imag

    roots = fr.root_set
    for a in real:
        for b in real:
            if a == b or a == -b:
                continue
            s_fin = add(a.fin, b.fin)
            lvl = a.level + b.level
            if s_fin in roots or (not any(s_fin) and lvl):
                r = in_s(s_fin, lvl)
                if r is False:
                    witnesses.append(
                        {"part": 1, "alpha": a.to_json(), "beta": b.to_json()}
                    )
            c = _pair(fr, b.fin, a.fin)
            img = (sub(b.fin, tuple(c * x for x in a.fin)), b.level - c * a.level)
            r = in_s(*img)
            if r is False:
                witnesses.append({"part": 2, "alpha": a.to_json(), "beta": b.to_json()})
            # string b - p a ... b + q a
            members = []
            for k in range(-4, 5):
                fin = add(b.fin, tuple(k * x for x in a.fin))
                if fin in roots or (not any(fin) and b.level + k * a.level):
                    members.append((fin, b.level + k * a.level))
            for m in members:
                r = in_s(*m)
                if r is False:
                    witnesses.append(
                        {
                            "part": 3,
                            "alpha": a.to_json(),
                            "beta": b.to_json(),
                            "member": [list(m[0]), m[1]],
                        }
                    )
            checked += 1
    status = "pass" if not witnesses else "fail"
    return Report(status, {"pairs_checked": checked}, witnesses[:20], [s.caveat])


def _pair(fr: FiniteRootSystem, b: RootVec, a: RootVec) -> int:
    from kmroots.cartan import pairing

    return pairing(fr.cd, b, a)


def string_in_support(s: SubalgebraSlice, alpha: AffineRoot, beta_level: int) -> dict:
    """The alpha-string through the imaginary root beta_level*delta and which members lie in Delta(s)."""
    sup = root_support(s)
    out = {}
    for k in (-1, 0, 1):
        fin = tuple(k * x for x in alpha.fin)
        level = beta_level + k * alpha.level
        if any(fin):
            out[(fin, level)] = AffineRoot(fin, level) in sup.real
        else:
            out[(fin, level)] = level in sup.imaginary_levels
    return out


# ------------------------------------------------------------------ tuples


def tuple_space(t: SymRegTuple, band: int) -> list[LoopElement]:
    """A spanning set of s(t) within the band, with c added when layers pair nontrivially."""
    fr = t.fr
    n = fr.rank
    out = [LoopElement.x(r.fin, r.level) for r in sorted(t.psi.members_in_band(band))]
    for x in range(-band, band + 1):
        if x == 0:
            for v in t.level0_space().basis:
                out.append(LoopElement.hvec(v[:n], 0) + LoopElement.c(v[n]))
        else:
            for v in t.layer(x).basis:
                out.append(LoopElement.hvec(v, x))
    return out


def verify_tuple_subalgebra(
    t: SymRegTuple, band: int, cb: ChevalleyBasis | None = None
) -> Report:
    cb = cb or chevalley(t.fr)
    elems = tuple_space(t, band)
    spans: dict[tuple, _Echelon] = {}
    for e in elems:
        for w, part in _split_weights(e).items():
            spans.setdefault(w, _Echelon()).add(part)
    space = SubalgebraSlice(cb, band, elems, spans)
    witnesses = []
    checked = 0
    for i, x in enumerate(elems):
        for y in elems[i + 1 :]:
            z = bracket(cb, x, y)
            if z.is_zero() or degree(z) > band:
                continue
            checked += 1
            if not space.contains(z):
                witnesses.append(
                    {"x": x.to_json(), "y": y.to_json(), "bracket": z.to_json()}
                )
                if len(witnesses) >= 5:
                    break
        if len(witnesses) >= 5:
            break
    return Report(
        "pass" if not witnesses else "fail",
        {"brackets_checked": checked},
        witnesses,
        [],
    )


# ------------------------------------------------------------------ symmetric / special


@dataclass
class SplitReport:
    sym: frozenset
    special: frozenset
    hypothesis: bool
    degenerate: list
    involution_ok: bool
    is_ideal: bool
    semidirect: bool
    witnesses: list

    def to_json(self) -> dict:
        def fmt(w):
            return {"fin": list(w[0]), "level": w[1]}

        return {
            "sym": [fmt(w) for w in sorted(self.sym, key=_rootsort)],
            "special": [fmt(w) for w in sorted(self.special, key=_rootsort)],
            "hypothesis": self.hypothesis,
            "degenerate_pairs": [fmt(w) for w in self.degenerate],
            "involution_ok": self.involution_ok,
            "s_sp_is_ideal": self.is_ideal,
            "semidirect": self.semidirect,
            "witnesses": self.witnesses,
        }


def _rootsort(w):
    return (w[1], canonical_key(w[0]))


def _roots_of(s: SubalgebraSlice) -> dict[tuple, tuple]:
    """Map root (fin, level) -> weight bucket, for every nonzero root space of s."""
    zero = (0,) * s.cb.rank
    out = {}
    for w, e in s.spans.items():
        if not e.dim:
            continue
        if w[0] == "X":
            out[(w[1], w[2])] = w
        elif w[1] != 0:
            out[(zero, w[1])] = w
    return out


def _centralizer(
    cb: ChevalleyBasis, span: list[LoopElement], others: list[LoopElement]
) -> list[LoopElement]:
    """Basis of {h in span(span) : [h, y] = 0 for all y in others}."""
    cols: dict[tuple, int] = {}
    images = []
    for h in span:
        img = {}
        for j, y in enumerate(others):
            for key, v in bracket(cb, h, y).terms.items():
                img[cols.setdefault((j, key), len(cols))] = v
        images.append(img)
    rows = [
        [images[i].get(c, Fraction(0)) for i in range(len(span))]
        for c in range(len(cols))
    ]
    out = []
    for coeffs in nullspace(rows, len(span)):
        out.append(sum((h.scale(a) for h, a in zip(span, coeffs) if a), LoopElement()))
    return out


def split_sym_special(s: SubalgebraSlice) -> SplitReport:
    cb = s.cb
    roots = _roots_of(s)
    sym = frozenset(r for r in roots if (neg(r[0]), -r[1]) in roots)
    special = frozenset(roots) - sym
    degenerate = []
    involution_ok = True
    for r in sorted(sym, key=_rootsort):
        A = s.basis(roots[r])
        B = s.basis(roots[(neg(r[0]), -r[1])])
        m = [[form(cb, a, b) for b in B] for a in A]
        if len(A) != len(B) or rank(m) != len(A):
            degenerate.append(r)
        for a in A:
            if not s.contains(chevalley_involution(a)):
                involution_ok = False
    hypothesis = not degenerate and involution_ok
    # s_sy: generated by the symmetric root spaces
    sy_gens = [b for r in sorted(sym, key=_rootsort) for b in s.basis(roots[r])]
    s_sy = (
        generate(cb, sy_gens, s.band)
        if sy_gens
        else SubalgebraSlice(cb, s.band, [], {})
    )
    h_s = s.spans.get(("H", 0), _Echelon())
    # h_sp: the part of h_s centralizing s_sy, so that [s_sy, h_sp] = 0
    h_sp = _centralizer(cb, list(h_s.rows), [b for _, b in s_sy.all_basis()])
    sp_spans: dict[tuple, _Echelon] = {}
    for r in special:
        w = roots[r]
        sp_spans[w] = _Echelon()
        for b in s.basis(w):
            sp_spans[w].add(b)
    if h_sp:
        sp_spans[("H", 0)] = _Echelon()
        for b in h_sp:
            sp_spans[("H", 0)].add(b)
    s_sp = SubalgebraSlice(cb, s.band, [], sp_spans)
    witnesses = []
    sp_basis = [b for _, b in s_sp.all_basis()]
    for _, a in s.all_basis():
        for b in sp_basis:
            z = bracket(cb, a, b)
            if z.is_zero() or degree(z) > s.band:
                continue
            if not s_sp.contains(z):
                witnesses.append(
                    {"x": a.to_json(), "y": b.to_json(), "bracket": z.to_json()}
                )
                break
        if len(witnesses) >= 3:
            break
    is_ideal = not witnesses
    # s = s_sp + s_sy as vector spaces, with zero intersection
    semidirect = True
    for w, e in s.spans.items():
        a = s_sp.spans.get(w, _Echelon()).dim
        b = s_sy.spans.get(w, _Echelon()).dim
        joint = _Echelon()
        for row in s_sp.basis(w) + s_sy.basis(w):
            joint.add(row)
        if joint.dim != e.dim or a + b != e.dim:
            semidirect = False
    for w in s_sy.spans:
        if w not in s.spans and s_sy.spans[w].dim:
            semidirect = False
    return SplitReport(
        sym,
        special,
        hypothesis,
        degenerate,
        involution_ok,
        is_ideal,
        semidirect,
        witnesses,
    )


def parse_elements_json(text: str) -> list[LoopElement]:
    data = json.loads(text)
    items = data if isinstance(data, list) else data.get("elements", [data])
    return [LoopElement.from_json(d) for d in items]


def jacobi(
    cb: ChevalleyBasis, x: LoopElement, y: LoopElement, z: LoopElement
) -> LoopElement:
    return (
        bracket(cb, x, bracket(cb, y, z))
        + bracket(cb, y, bracket(cb, z, x))
        + bracket(cb, z, bracket(cb, x, y))
    )


def loop_basis(
    cb: ChevalleyBasis, band: int, with_cd: bool = True
) -> list[LoopElement]:
    out = []
    for r in range(-band, band + 1):
        out += [LoopElement.x(a, r) for a in sorted(cb.fr.roots, key=canonical_key)]
        out += [LoopElement.h(i, r) for i in range(cb.rank)]
    if with_cd:
        out += [LoopElement.c(), LoopElement.d()]
    return out


def jacobi_violations(
    cb: ChevalleyBasis, band: int
) -> list[tuple[LoopElement, LoopElement, LoopElement]]:
    basis = loop_basis(cb, band)
    bad = []
    for x, y, z in combinations_with_replacement(basis, 3):
        if not jacobi(cb, x, y, z).is_zero():
            bad.append((x, y, z))
    return bad
