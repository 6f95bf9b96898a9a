"""Acceptance criteria, one test per criterion. The terminal summary prints a PASS/FAIL line for each."""

import random
import time
from fractions import Fraction

import pytest

from kmroots.affine import (
    AffineRoot,
    FiniteRootSystem,
    PeriodicIntSet,
    case1_tuple,
    case2_tuple,
    derived_tuple,
    from_gcm_coords,
    is_maximal_tuple,
    make_tuple,
    maximal_closed,
    membership,
    periodic_from_psi0,
    tuple_leq,
)
from kmroots.cartan import (
    NotSymmetrizable,
    affine_cartan_matrix,
    bilinear,
    cartan_datum,
    pairing,
    symmetrize,
    validate_gcm,
)
from kmroots.loop import (
    LoopElement,
    bracket,
    chevalley,
    generate,
    jacobi_violations,
    loop_basis,
    root_support,
    split_sym_special,
    verify_root_generated,
)
from kmroots.rootslice import Truncated, enumerate_roots, morita_pairs, root_string
from kmroots.subroot import (
    RootSet,
    Status,
    b_sigma,
    orbit,
    pi_system_check,
    relations,
    verify_bijection,
)
from kmroots.worked_examples import (
    ALL_MINUS_TWO_GCM,
    FIB_GCM,
    FN2D_GCM,
    FN2D_SIGMA,
    RANK2_GCM,
    a5_slice,
    check_counterexample,
    corgen_fixtures,
    fib_beta,
    fn2d_brute_bsigma,
    gamma_all_minus_two,
    rank2_closed_form,
)


def criterion(n, title):
    return pytest.mark.criterion(n, title)


@criterion(
    1, "rank-2 enumeration of [[2,-4],[-1,2]] at H=40 matches the closed form, < 1 s"
)
def test_c01_rank2_enumeration():
    t = time.perf_counter()
    sl = enumerate_roots(cartan_datum(RANK2_GCM), 40)
    elapsed = time.perf_counter() - t
    assert set(sl.pos_real) == rank2_closed_form(40)
    assert len(sl.pos_real) == len(rank2_closed_form(40))
    assert elapsed < 1.0


@criterion(2, "Fibonacci system at H=1000 and Cassini norm signs, < 5 s")
def test_c02_fibonacci():
    t = time.perf_counter()
    cd = cartan_datum(FIB_GCM)
    sl = enumerate_roots(cd, 1000)
    elapsed = time.perf_counter() - t
    expected = set()
    j = 0
    while sum(fib_beta(1, j)) <= 1000:
        expected |= {fib_beta(1, j), fib_beta(2, j)}
        j += 1
    assert set(sl.pos_real) == expected
    for j in range(7):
        for k in range(7):
            d12 = tuple(a - b for a, b in zip(fib_beta(1, j), fib_beta(2, k)))
            assert bilinear(cd, d12, d12) > 0
            if j != k:
                d11 = tuple(a - b for a, b in zip(fib_beta(1, j), fib_beta(1, k)))
                assert bilinear(cd, d11, d11) <= 0
    assert elapsed < 5.0


@criterion(3, "FN2d: certified pi-system, recomputed B_Sigma, kernel relation")
def test_c03_fn2d():
    cd = cartan_datum(FN2D_GCM)
    sl = enumerate_roots(cd, 14)
    assert pi_system_check(FN2D_SIGMA, sl).status is Status.CERTIFIED
    derived = [[2, -2, -4, -2], [-2, 2, -2, -10], [-4, -2, 2, -2], [-2, -10, -2, 2]]
    assert fn2d_brute_bsigma(cd, FN2D_SIGMA) == derived
    assert [list(r) for r in b_sigma(FN2D_SIGMA, cd).gcm.entries] == derived
    rel = relations(FN2D_SIGMA)
    assert rel in ([(2, -1, 2, -1)], [(-2, 1, -2, 1)])


@criterion(
    4,
    "3x3 all-(-2): pairing closed form for |k|,|l| <= 5 and certified {gamma_-2..gamma_2}",
)
def test_c04_all_minus_two():
    cd = cartan_datum(ALL_MINUS_TWO_GCM)
    for k in range(-5, 6):
        for l in range(-5, 6):
            if k != l:
                assert (
                    pairing(cd, gamma_all_minus_two(k), gamma_all_minus_two(l))
                    == 2 - 16 * (k - l) ** 2
                )
    sl = enumerate_roots(cd, 40)
    sigma = [gamma_all_minus_two(k) for k in range(-2, 3)]
    assert pi_system_check(sigma, sl).status is Status.CERTIFIED


def _random_gcm(rng):
    while True:
        n = rng.choice([2, 3])
        a = [[2 if i == j else 0 for j in range(n)] for i in range(n)]
        for i in range(n):
            for j in range(i + 1, n):
                kind = rng.choice(["zero", "one", "big", "big"])
                if kind == "one":
                    a[i][j] = a[j][i] = -1
                elif kind == "big":
                    a[i][j], a[j][i] = -rng.randint(2, 4), -rng.randint(2, 4)
        try:
            return symmetrize(validate_gcm(a))
        except NotSymmetrizable:
            continue


def _string_real_counts(cd, H=12):
    sl = enumerate_roots(cd, H)
    counts = []
    for alpha in sl.pos_real:
        for beta in sl.positive_roots():
            if beta == alpha:
                continue
            try:
                counts.append(root_string(sl, alpha, beta).real_count)
            except (Truncated, ValueError):
                continue
    return counts


@criterion(
    5,
    "Morita criterion: 20 seeded GCMs without Morita pairs have <= 2 real roots per string",
)
def test_c05_morita():
    rng = random.Random(20240)
    seen = set()
    while len(seen) < 20:
        cd = _random_gcm(rng)
        key = tuple(map(tuple, cd.a))
        if key in seen:
            continue
        seen.add(key)
        assert not morita_pairs(validate_gcm([list(r) for r in cd.a]))
        counts = _string_real_counts(cd)
        assert counts and max(counts) <= 2, key
    counts = _string_real_counts(cartan_datum([[2, -1], [-4, 2]]))
    assert max(counts) >= 3


def _finite_set(name, vectors, H=10):
    fr = FiniteRootSystem.of_type(name)
    sl = enumerate_roots(fr.cd, H)
    return RootSet.of(sl, vectors, symmetric=True)


def _affine_set(name, k, f=None, psi0=None, H=8):
    fr = FiniteRootSystem.of_type(name)
    psi = periodic_from_psi0(fr, psi0 or fr.roots, k, f)
    sl = enumerate_roots(cartan_datum(affine_cartan_matrix(name)), H)
    members = [r for r in sl.pos_real if membership(psi, from_gcm_coords(fr, r))]
    return RootSet.of(sl, members, symmetric=True)


def _orbit_set(gcm, gens, H):
    sl = enumerate_roots(cartan_datum(gcm), H)
    return RootSet(sl, orbit(gens, sl).roots.members)


def _g2_orthogonal_pair():
    fr = FiniteRootSystem.of_type("G2")
    top = max(bilinear(fr.cd, s, s) for s in fr.roots)
    long_ = [r for r in fr.positive if bilinear(fr.cd, r, r) == top]
    for a in long_:
        for b in fr.positive:
            if b not in long_ and bilinear(fr.cd, a, b) == 0:
                return [a, b]
    raise AssertionError("G2 has an orthogonal long/short pair")


def bijection_fixtures():
    g2 = FiniteRootSystem.of_type("G2")
    top = max(bilinear(g2.cd, r, r) for r in g2.roots)
    return [
        ("A2 full", lambda: _finite_set("A2", FiniteRootSystem.of_type("A2").roots)),
        ("A2 alpha1", lambda: _finite_set("A2", [(1, 0)])),
        ("A2 theta", lambda: _finite_set("A2", [(1, 1)])),
        ("G2 full", lambda: _finite_set("G2", g2.roots)),
        (
            "G2 long",
            lambda: _finite_set(
                "G2", [r for r in g2.roots if bilinear(g2.cd, r, r) == top]
            ),
        ),
        ("G2 A1xA1", lambda: _finite_set("G2", _g2_orthogonal_pair())),
        ("A1^(1) k=1", lambda: _affine_set("A1", 1)),
        ("A1^(1) k=2", lambda: _affine_set("A1", 2)),
        ("A1^(1) k=3 f=1", lambda: _affine_set("A1", 3, [1])),
        ("A2^(1) k=1", lambda: _affine_set("A2", 1)),
        ("A2^(1) k=2 f=(1,0)", lambda: _affine_set("A2", 2, [1, 0])),
        ("A2^(1) A1 k=2", lambda: _affine_set("A2", 2, None, [(1, 1), (-1, -1)])),
        ("FN2d orbit", lambda: _orbit_set(FN2D_GCM, FN2D_SIGMA, 14)),
        (
            "all-(-2) orbit",
            lambda: _orbit_set(
                ALL_MINUS_TWO_GCM, [gamma_all_minus_two(k) for k in (-1, 0, 1)], 25
            ),
        ),
        (
            "[[2,-4],[-1,2]] alpha1",
            lambda: RootSet.of(
                enumerate_roots(cartan_datum(RANK2_GCM), 10), [(1, 0)], True
            ),
        ),
    ]


@criterion(
    6, "bijection round trip and uniqueness probe on >= 10 real closed subroot systems"
)
def test_c06_bijection():
    fixtures = bijection_fixtures()
    assert len(fixtures) >= 10
    failures = {}
    for label, build in fixtures:
        psi = build()
        rep = verify_bijection(psi)
        if not (
            rep.status == "pass"
            and rep.orbit_matches
            and rep.probe_complete
            and len(rep.generating_pi_systems) == 1
        ):
            failures[label] = rep.to_json()
        else:
            assert orbit(rep.pi, psi.slice).roots.members == psi.restrict(
                psi.slice.height_bound
            )
    assert not failures, failures


@criterion(7, "affine exactness: root generated subalgebras at band 6, < 30 s")
def test_c07_root_generated():
    fixtures = corgen_fixtures()
    assert len(fixtures) >= 8
    ks = {c.k for _, p in fixtures for c in p.components}
    assert {0, 1, 2, 3} <= ks
    assert any(not c.f.is_zero() for _, p in fixtures for c in p.components)
    t = time.perf_counter()
    bad = {}
    for label, psi in fixtures:
        rep = verify_root_generated(psi, 6)
        if not (
            rep.passed
            and rep.checks["cartan_layers"]
            and rep.checks["c_present"] is not None
        ):
            bad[label] = rep.to_json()
    assert not bad, bad
    assert time.perf_counter() - t < 30.0


@criterion(8, "A5^(1): 2delta and alpha4 in Delta(s), alpha4 + 2delta not, at band 6")
def test_c08_a5_nonclosed():
    sup = root_support(a5_slice(6))
    a4 = (0, 0, 0, 1, 0)
    assert 2 in sup.imaginary_levels
    assert AffineRoot(a4, 0) in sup.real
    assert AffineRoot(a4, 2) not in sup.real


def _tuple_family(name):
    fr = FiniteRootSystem.of_type(name)
    rank = fr.rank
    fam = []

    def add(label, t, d):
        fam.append((f"{name} {label}{' +d' if d else ''}", t, d))

    add("derived", derived_tuple(fr), False)
    add("derived", derived_tuple(fr), True)
    for k in (2, 3, 4, 6):
        fs = [None] + [[1 if i == j else 0 for i in range(rank)] for j in range(rank)]
        for f in fs:
            for d in (True, False):
                add(f"case1 k={k} f={f}", case1_tuple(fr, k, f), d)
    for m in maximal_closed(fr):
        m = sorted(m)
        for d in (True, False):
            add(f"case2 {m[-1]}", case2_tuple(fr, m), d)
        add(f"no-V {m[-1]}", make_tuple(periodic_from_psi0(fr, m, 1)), True)
        perp = fr.perp(frozenset(m))
        add(
            f"k=2 Lambda odd {m[-1]}",
            make_tuple(
                periodic_from_psi0(fr, m, 2),
                PeriodicIntSet(2, frozenset({1})),
                {0: perp, 1: perp},
            ),
            True,
        )
    for i in range(rank):
        a = tuple(1 if j == i else 0 for j in range(rank))
        sub = [a, tuple(-x for x in a)]
        add(f"case2-shape {a}", case2_tuple(fr, sub), True)
    return fam


@criterion(
    9,
    "maximality verdicts agree with a containment search over >= 50 tuples; maximal_closed(A2) = three A1",
)
def test_c09_maximality():
    strict_above = {}
    total = 0
    disagreements = []
    for name in ("A2", "A3"):
        fam = _tuple_family(name)
        total += len(fam)
        full = next(t for label, t, d in fam if label == f"{name} derived +d")
        for label, t, d in fam:
            proper = not tuple_leq(full, t, True, d)
            above = [
                l2
                for l2, u, e in fam
                if tuple_leq(t, u, d, e)
                and not tuple_leq(u, t, e, d)
                and not tuple_leq(full, u, True, e)
            ]
            strict_above[label] = above
            searched = proper and not above
            verdict = is_maximal_tuple(t, d).maximal
            if verdict != searched:
                disagreements.append((label, verdict, searched, above[:3]))
    assert total >= 50
    assert not disagreements, disagreements
    a2 = FiniteRootSystem.of_type("A2")
    got = {frozenset(m) for m in maximal_closed(a2)}
    pos = list(a2.positive)
    closed = []
    for mask in range(1, 2 ** len(pos) - 1):
        cand = {r for i, r in enumerate(pos) if mask >> i & 1}
        cand |= {tuple(-x for x in r) for r in cand}
        sums = {tuple(x + y for x, y in zip(a, b)) for a in cand for b in cand}
        if all(v in cand for v in sums if v in a2.root_set):
            closed.append(frozenset(cand))
    brute = {c for c in closed if not any(c < o for o in closed)}
    assert got == brute and len(got) == 3


def split_fixtures():
    X = LoopElement.x

    def simple(rank, i, s=1):
        return tuple(s if j == i else 0 for j in range(rank))

    def gens(name, pm, plus, cartan=False):
        fr = FiniteRootSystem.of_type(name)
        n = fr.rank
        out = (
            [X(simple(n, i)) for i in pm]
            + [X(simple(n, i, -1)) for i in pm]
            + [X(simple(n, i)) for i in plus]
        )
        if cartan:
            out += [LoopElement.h(i) for i in range(n)]
        return name, out

    return [
        gens("A2", [0, 1], []),
        gens("A2", [1], [0]),
        gens("A2", [], [0, 1], cartan=True),
        gens("B2", [0], [1]),
        gens("B2", [1], [0]),
        gens("G2", [0], [1]),
        gens("G2", [1], [0]),
        gens("A3", [0, 2], [1]),
        gens("A3", [1], [0, 2]),
        gens("B3", [0, 1], [2]),
        gens("C3", [2], [0, 1], cartan=True),
    ]


@criterion(
    10,
    "Dynkin split: counterexample fails the hypothesis with the bracket witness; finite fixtures split",
)
def test_c10_dynkin_split():
    res = check_counterexample(6)
    assert res.passed, res.to_json()
    cb = chevalley(FiniteRootSystem.of_type("A3"))
    assert bracket(
        cb, LoopElement.x((1, 0, 0), 1), LoopElement.x((-1, 0, 0), 1)
    ) == LoopElement.h(0, 2)
    fixtures = split_fixtures()
    assert len(fixtures) >= 10
    for name, gens in fixtures:
        s = generate(chevalley(FiniteRootSystem.of_type(name)), gens, 0)
        rep = split_sym_special(s)
        assert rep.hypothesis and rep.is_ideal and rep.semidirect, (name, rep.to_json())


@criterion(
    11,
    "bracket engine: exhaustive Jacobi for A1, A2 at band 3; antisymmetry on 10^4 seeded pairs",
)
def test_c11_engine_soundness():
    for name in ("A1", "A2"):
        assert jacobi_violations(chevalley(FiniteRootSystem.of_type(name)), 3) == []
    cb = chevalley(FiniteRootSystem.of_type("A2"))
    basis = loop_basis(cb, 3)
    rng = random.Random(11)

    def element():
        out = LoopElement()
        for _ in range(rng.randint(1, 3)):
            out = out + rng.choice(basis).scale(
                Fraction(rng.randint(-5, 5), rng.randint(1, 4))
            )
        return out

    bad = 0
    for _ in range(10_000):
        x, y = element(), element()
        if not (bracket(cb, x, y) + bracket(cb, y, x)).is_zero():
            bad += 1
    assert bad == 0
