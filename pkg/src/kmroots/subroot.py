"""Subroot systems inside a root slice: closure, pi-systems, Pi(Psi), orbits and B_Sigma.

Every answer that depends on roots above the height bound is marked as
undecided or truncated instead of being guessed.
"""

from __future__ import annotations

import enum
from collections import deque
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from itertools import combinations

from kmroots.cartan import (
    CartanDatum,
    Gcm,
    RootVec,
    bilinear,
    norm,
    pairing,
    symmetrize,
    validate_gcm,
)
from kmroots.linalg import integer_kernel
from kmroots.rootslice import (
    RootClass,
    RootSlice,
    Truncated,
    add,
    canonical_key,
    classify,
    height,
    neg,
    reflect,
    sign,
    sub,
)


class Status(enum.Enum):
    CERTIFIED = "Certified"
    REFUTED = "Refuted"
    UNDECIDED = "Undecided"


UNDECIDED = Status.UNDECIDED


def _sorted(vs: Iterable[RootVec]) -> list[RootVec]:
    return sorted(
        vs, key=lambda v: (abs(height(v)), height(v) < 0, tuple(abs(c) for c in v), v)
    )


@dataclass(frozen=True)
class RootSet:
    slice: RootSlice = field(repr=False)
    members: frozenset[RootVec]

    @classmethod
    def of(
        cls, sl: RootSlice, vectors: Iterable[Sequence[int]], symmetric: bool = False
    ) -> RootSet:
        vs = {tuple(v) for v in vectors}
        if symmetric:
            vs |= {neg(v) for v in vs}
        for v in vs:
            c = classify(sl, v)
            if c is RootClass.UNKNOWN:
                raise Truncated(sl.height_bound, f"{v} is above the height bound")
            if not c.is_root:
                raise ValueError(f"{v} is not a root")
        return cls(sl, frozenset(vs))

    @property
    def cd(self) -> CartanDatum:
        return self.slice.cd

    def positive(self) -> list[RootVec]:
        return sorted((v for v in self.members if sign(v) > 0), key=canonical_key)

    def sorted(self) -> list[RootVec]:
        return _sorted(self.members)

    def real(self) -> list[RootVec]:
        return [v for v in self.sorted() if norm(self.cd, v) > 0]

    def __contains__(self, v) -> bool:
        return tuple(v) in self.members

    def __len__(self) -> int:
        return len(self.members)

    def is_symmetric(self) -> bool:
        return all(neg(v) in self.members for v in self.members)

    def restrict(self, H: int) -> frozenset[RootVec]:
        return frozenset(v for v in self.members if abs(height(v)) <= H)


def is_subroot_system(psi: RootSet) -> bool | Status:
    undecided = False
    for a in psi.real():
        for b in psi.members:
            img = reflect(psi.cd, a, b)
            if abs(height(img)) > psi.slice.height_bound:
                undecided = True
            elif img not in psi.members:
                return False
    return UNDECIDED if undecided else True


def closure(s: RootSet) -> RootSet:
    """Smallest closed subroot system containing s; raises Truncated if it leaves the slice."""
    sl, cd = s.slice, s.cd
    members = set(s.members)
    queue = deque(_sorted(members))
    done: list[RootVec] = []
    while queue:
        x = queue.popleft()
        new: list[RootVec] = []
        for y in done + [x]:
            z = add(x, y)
            if any(z):
                c = classify(sl, z)
                if c is RootClass.UNKNOWN:
                    raise Truncated(sl.height_bound, f"{x} + {y}")
                if c.is_root:
                    new.append(z)
            for a, b in ((x, y), (y, x)):
                if norm(cd, a) > 0:
                    img = reflect(cd, a, b)
                    if not sl.within(img):
                        raise Truncated(sl.height_bound, f"s_{a}({b})")
                    new.append(img)
        done.append(x)
        for z in new:
            if z not in members:
                members.add(z)
                queue.append(z)
    return RootSet(sl, frozenset(members))


def is_real_closed(psi: RootSet) -> bool | Status:
    sl = psi.slice
    undecided = False
    ms = psi.sorted()
    for i, x in enumerate(ms):
        for y in ms[i:]:
            z = add(x, y)
            c = classify(sl, z)
            if c is RootClass.UNKNOWN:
                undecided = True
            elif c is RootClass.REAL and z not in psi.members:
                return False
    return UNDECIDED if undecided else True


@dataclass(frozen=True)
class MinimalityReport:
    certified_minimal: tuple[RootVec, ...]
    certified_nonminimal: tuple[RootVec, ...]
    undecided: tuple[RootVec, ...]
    witnesses: dict = field(default_factory=dict, compare=False)

    @property
    def complete(self) -> bool:
        return not self.undecided

    def to_json(self) -> dict:
        return {
            "certified_minimal": [list(v) for v in self.certified_minimal],
            "certified_nonminimal": [list(v) for v in self.certified_nonminimal],
            "undecided": [list(v) for v in self.undecided],
        }


def minimal_elements(psi: RootSet, assume_subroot: bool = True) -> MinimalityReport:
    """Pi(Psi) = {beta in Psi+ : s_beta permutes Psi+ minus beta}, decided within the slice.

    With ``assume_subroot`` an image above the height bound has positive
    height, so it is a positive root and lies in Psi by the subroot property;
    it therefore cannot witness non-minimality. Without it, such an image
    leaves the candidate undecided.
    """
    cd, H = psi.cd, psi.slice.height_bound
    pos = [v for v in psi.positive() if norm(cd, v) > 0]
    pos_set = set(pos)
    minimal, nonminimal, undecided = [], [], []
    witnesses: dict = {}
    for b in pos:
        open_case = False
        witness = None
        for g in pos:
            if g == b:
                continue
            img = reflect(cd, b, g)
            h = height(img)
            if h <= 0:
                witness = (g, img)
                break
            if h > H:
                if not assume_subroot:
                    open_case = True
                continue
            if img not in pos_set:
                witness = (g, img)
                break
        if witness is not None:
            nonminimal.append(b)
            witnesses[b] = witness
        elif open_case:
            undecided.append(b)
        else:
            minimal.append(b)
    return MinimalityReport(
        tuple(minimal), tuple(nonminimal), tuple(undecided), witnesses
    )


@dataclass(frozen=True)
class PiCheck:
    status: Status
    witness: tuple[RootVec, RootVec, RootVec] | None = None
    open_pairs: tuple[tuple[RootVec, RootVec], ...] = ()

    def to_json(self) -> dict:
        out: dict = {"status": self.status.value}
        if self.witness:
            a, b, d = self.witness
            out["witnesses"] = [{"pair": [list(a), list(b)], "difference": list(d)}]
        if self.open_pairs:
            out["open_pairs"] = [[list(a), list(b)] for a, b in self.open_pairs]
        return out


def pi_system_check(sigma: Sequence[Sequence[int]], sl: RootSlice) -> PiCheck:
    gens = [tuple(g) for g in sigma]
    if len(set(gens)) != len(gens):
        raise ValueError("generators must be distinct")
    for g in gens:
        c = classify(sl, g)
        if c is RootClass.UNKNOWN:
            raise Truncated(sl.height_bound, f"generator {g}")
        if c is not RootClass.REAL or sign(g) < 0:
            raise ValueError(f"{g} is not a positive real root")
    open_pairs = []
    for a, b in combinations(gens, 2):
        d = sub(a, b)
        c = classify(sl, d)
        if c.is_root:
            hi, lo = (a, b) if sign(d) > 0 else (b, a)
            return PiCheck(Status.REFUTED, (hi, lo, sub(hi, lo)))
        if c is RootClass.UNKNOWN:
            open_pairs.append((a, b))
    if open_pairs:
        return PiCheck(Status.UNDECIDED, None, tuple(open_pairs))
    return PiCheck(Status.CERTIFIED)


@dataclass(frozen=True)
class OrbitResult:
    roots: RootSet
    truncated: bool


def orbit(sigma: Sequence[Sequence[int]], sl: RootSlice) -> OrbitResult:
    """W_Sigma(Sigma) inside the slice: close +-Sigma under s_gamma for gamma in the set."""
    cd = sl.cd
    gram = cd.gram
    n = cd.rank
    H = sl.height_bound
    gens = [tuple(g) for g in sigma]
    members: set[RootVec] = set()
    done: list[tuple[RootVec, tuple[int, ...], int]] = []
    queue: deque[RootVec] = deque()
    truncated = False

    def push(v: RootVec):
        if v not in members:
            members.add(v)
            queue.append(v)

    def image(a: RootVec, ga: tuple[int, ...], na: int, b: RootVec):
        nonlocal truncated
        p, r = divmod(2 * sum(x * y for x, y in zip(b, ga)), na)
        if r:
            raise ValueError(f"non-integral pairing of {b} with {a}")
        img = tuple(x - p * y for x, y in zip(b, a))
        if abs(sum(img)) <= H:
            push(img)
        else:
            truncated = True

    for g in gens:
        if norm(cd, g) <= 0:
            raise ValueError(f"{g} is not real")
        push(g)
        push(neg(g))
    while queue:
        x = queue.popleft()
        gx = tuple(sum(gram[i][j] * x[j] for j in range(n)) for i in range(n))
        nx = sum(a * b for a, b in zip(x, gx))
        done.append((x, gx, nx))
        for y, gy, ny in done:
            image(x, gx, nx, y)
            if y != x:
                image(y, gy, ny, x)
    return OrbitResult(RootSet(sl, frozenset(members)), truncated)


@dataclass(frozen=True)
class InducedGcm:
    gcm: Gcm
    labels: tuple[RootVec, ...]

    def to_json(self) -> dict:
        return {**self.gcm.to_json(), "labels": [list(v) for v in self.labels]}


def b_sigma(sigma: Sequence[Sequence[int]], cd: CartanDatum) -> InducedGcm:
    gens = tuple(tuple(g) for g in sigma)
    b = [[pairing(cd, gj, gi) for gj in gens] for gi in gens]
    g = validate_gcm(b)
    symmetrize(g)
    return InducedGcm(g, gens)


def combo_decompose(
    sigma: Sequence[Sequence[int]], beta: Sequence[int]
) -> tuple[int, ...] | None:
    """Integer coefficients, all >= 0 or all <= 0, expressing beta over sigma; None if there are none.

    The generators are positive vectors, so partial sums are bounded
    coordinatewise by |beta| and the search is finite.
    """
    gens = [tuple(g) for g in sigma]
    beta = tuple(beta)
    s = sign(beta)
    if s == 0:
        return None
    target = beta if s > 0 else neg(beta)
    for g in gens:
        if sign(g) <= 0:
            raise ValueError("generators must be positive vectors")
    n = len(gens)
    coeffs = [0] * n

    def rec(j: int, rest: tuple[int, ...]) -> bool:
        if not any(rest):
            return True
        if j == n:
            return False
        g = gens[j]
        kmax = min(r // c for r, c in zip(rest, g) if c > 0)
        for k in range(kmax, -1, -1):
            coeffs[j] = k
            if rec(j + 1, tuple(r - k * c for r, c in zip(rest, g))):
                return True
        coeffs[j] = 0
        return False

    if not rec(0, target):
        return None
    return tuple(c * s for c in coeffs)


def relations(sigma: Sequence[Sequence[int]]) -> list[tuple[int, ...]]:
    """Primitive integer linear relations among the generators."""
    return integer_kernel([tuple(g) for g in sigma])


# ------------------------------------------------------------- bijection check


@dataclass
class BijectionReport:
    status: str
    pi: list[RootVec]
    pi_check: PiCheck | None
    orbit_matches: bool | None
    generating_pi_systems: list[list[RootVec]]
    probe_complete: bool
    witnesses: list = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "status": self.status,
            "pi": [list(v) for v in self.pi],
            "pi_check": self.pi_check.to_json() if self.pi_check else None,
            "orbit_matches": self.orbit_matches,
            "generating_pi_systems": [
                [list(v) for v in s] for s in self.generating_pi_systems
            ],
            "probe_complete": self.probe_complete,
            "witnesses": self.witnesses,
            "notes": self.notes,
        }


def generating_pi_systems(
    psi: RootSet, max_gens: int = 6, max_candidates: int = 200_000
) -> tuple[list[list[RootVec]], bool]:
    """All pi-systems Sigma' of positive real members of psi (within the slice)
    with |Sigma'| <= max_gens and W_Sigma'(Sigma') covering psi within the slice.

    Returns (systems, complete); ``complete`` is False when the candidate cap hit.
    """
    sl, cd = psi.slice, psi.cd
    pos = [v for v in psi.positive() if norm(cd, v) > 0]
    target = psi.restrict(sl.height_bound)
    ok: dict[tuple[RootVec, RootVec], bool] = {}
    for a, b in combinations(pos, 2):
        compatible = not classify(sl, sub(a, b)).is_root and bilinear(cd, a, b) <= 0
        ok[(a, b)] = ok[(b, a)] = compatible
    found: list[list[RootVec]] = []
    examined = 0
    complete = True

    def extend(clique: list[RootVec], start: int):
        nonlocal examined, complete
        if clique:
            examined += 1
            if examined > max_candidates:
                complete = False
                return
            if orbit(clique, sl).roots.members >= target:
                found.append(list(clique))
        if len(clique) == max_gens:
            return
        for j in range(start, len(pos)):
            c = pos[j]
            if all(ok[(c, x)] for x in clique):
                clique.append(c)
                extend(clique, j + 1)
                clique.pop()
                if not complete:
                    return

    extend([], 0)
    return found, complete


def verify_bijection(
    psi: RootSet, max_gens: int = 6, max_candidates: int = 200_000
) -> BijectionReport:
    sl = psi.slice
    rep = minimal_elements(psi)
    pi = list(rep.certified_minimal)
    notes = []
    if rep.undecided:
        notes.append("some candidates could not be decided inside the slice")
    check = pi_system_check(pi, sl) if pi else None
    orb = orbit(pi, sl).roots.members if pi else frozenset()
    matches = orb == psi.restrict(sl.height_bound)
    systems, complete = generating_pi_systems(psi, max_gens, max_candidates)
    others = [s for s in systems if sorted(s) != sorted(pi)]
    witnesses: list = []
    if check and check.status is Status.REFUTED:
        witnesses.append(check.to_json())
    if not matches:
        witnesses.append(
            {
                "orbit_minus_psi": [list(v) for v in _sorted(orb - psi.members)],
                "psi_minus_orbit": [
                    list(v) for v in _sorted(psi.restrict(sl.height_bound) - orb)
                ],
            }
        )
    if others:
        witnesses.append(
            {"other_generating_pi_systems": [[list(v) for v in s] for s in others]}
        )
    if not systems:
        notes.append("no positive pi-system generates Psi")
    if check is None or check.status is Status.REFUTED or not matches or others:
        status = "fail"
    elif rep.undecided or check.status is Status.UNDECIDED or not complete:
        status = "undecided"
    else:
        status = "pass"
    return BijectionReport(
        status, pi, check, matches, systems, complete, witnesses, notes
    )
