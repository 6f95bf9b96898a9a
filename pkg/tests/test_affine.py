from itertools import combinations

import pytest

from kmroots.affine import (
    AffineError,
    AffineRoot,
    FiniteRootSystem,
    NotPrime,
    NotProper,
    PeriodicIntSet,
    case1_tuple,
    case2_tuple,
    derived_tuple,
    finite_closure,
    is_maximal_closed,
    is_maximal_tuple,
    make_tuple,
    maximal_closed,
    maximal_real_closed,
    membership,
    periodic_from_psi0,
    pi_exact,
    tuple_leq,
    tuple_roots,
    validate_periodic,
    validate_tuple,
)
from kmroots.cartan import norm
from kmroots.rootslice import add, neg
from kmroots.worked_examples import string_example_tuple


def brute_maximal_closed(fr: FiniteRootSystem) -> set[frozenset]:
    """Enumerate every symmetric subset, keep the closed proper ones, return the maximal ones."""
    pos = sorted(fr.positive)
    full = fr.root_set
    closed = []
    for r in range(len(pos) + 1):
        for chosen in combinations(pos, r):
            s = frozenset(chosen) | frozenset(neg(v) for v in chosen)
            if s == full:
                continue
            if all(add(a, b) not in full or add(a, b) in s for a in s for b in s):
                closed.append(s)
    return {s for s in closed if s and not any(s < t for t in closed)}


@pytest.mark.parametrize(
    "name,count", [("A2", 6), ("G2", 12), ("A5", 30), ("B3", 18), ("E6", 72)]
)
def test_root_counts(name, count):
    assert len(FiniteRootSystem.of_type(name).roots) == count


def test_g2_short_long_split():
    fr = FiniteRootSystem.of_type("G2")
    norms = sorted({fr.form(fr.coroot(a), fr.coroot(a)) for a in fr.roots})
    assert len(norms) == 2
    counts = {}
    for a in fr.roots:
        counts[norm(fr.cd, a)] = counts.get(norm(fr.cd, a), 0) + 1
    assert sorted(counts.values()) == [6, 6]


def test_membership():
    a2 = FiniteRootSystem.of_type("A2")
    full1 = periodic_from_psi0(a2, a2.roots, 1)
    assert all(
        membership(full1, AffineRoot(a, m)) for a in a2.roots for m in range(-3, 4)
    )
    even = periodic_from_psi0(a2, a2.roots, 2)
    assert not membership(even, AffineRoot((1, 0), 1))
    a5 = FiniteRootSystem.of_type("A5")
    s1 = periodic_from_psi0(a5, [r for r in a5.roots if r[2:] == (0, 0, 0)], 2)
    assert membership(s1, AffineRoot((1, 0, 0, 0, 0), 2))
    assert not membership(s1, AffineRoot((1, 0, 0, 0, 0), 1))


def test_validate_periodic():
    a2 = FiniteRootSystem.of_type("A2")
    psi = validate_periodic(a2, [{"roots": [(1, 1), (-1, -1)], "k": 1}])
    assert psi.contains(AffineRoot((1, 1), 5))
    psi = validate_periodic(
        a2, [{"roots": [(1, 0), (-1, 0)], "k": 0, "f_base": [(1, 0)], "f_values": [1]}]
    )
    assert psi.contains(AffineRoot((1, 0), 1)) and psi.contains(AffineRoot((-1, 0), -1))
    assert not psi.contains(AffineRoot((-1, 0), 1))
    g2 = FiniteRootSystem.of_type("G2")
    short = [(1, 0), (1, 1), (2, 1), (-1, 0), (-1, -1), (-2, -1)]
    with pytest.raises(AffineError) as e:
        validate_periodic(g2, [{"roots": short, "k": 1}])
    assert e.value.condition == "NotClosed"


def test_validate_periodic_conditions():
    a3 = FiniteRootSystem.of_type("A3")
    with pytest.raises(AffineError) as e:
        validate_periodic(a3, [{"roots": [(1, 0, 0)], "k": 1}])
    assert e.value.condition == "NotSymmetric"
    with pytest.raises(AffineError) as e:
        validate_periodic(
            a3, [{"roots": [(1, 0, 0), (-1, 0, 0), (0, 0, 1), (0, 0, -1)], "k": 1}]
        )
    assert e.value.condition == "NotIrreducible"
    with pytest.raises(AffineError) as e:
        validate_periodic(
            a3,
            [
                {"roots": [(1, 0, 0), (-1, 0, 0)], "k": 1},
                {"roots": [(0, 1, 0), (0, -1, 0)], "k": 1},
            ],
        )
    assert e.value.condition in ("NotOrthogonal", "NotClosed")
    with pytest.raises(AffineError) as e:
        validate_periodic(a3, [{"roots": [(1, 0, 0), (-1, 0, 0)], "k": -1}])
    assert e.value.condition == "BadModulus"


def test_pi_exact():
    a1 = FiniteRootSystem.of_type("A1")
    assert pi_exact(periodic_from_psi0(a1, a1.roots, 1)) == [
        AffineRoot((1,), 0),
        AffineRoot((-1,), 1),
    ]
    assert pi_exact(periodic_from_psi0(a1, a1.roots, 0)) == [AffineRoot((1,), 0)]
    a2 = FiniteRootSystem.of_type("A2")
    got = pi_exact(periodic_from_psi0(a2, a2.roots, 2))
    assert got == [
        AffineRoot((0, 1), 0),
        AffineRoot((1, 0), 0),
        AffineRoot((-1, -1), 2),
    ]


def test_finite_closure():
    a2 = FiniteRootSystem.of_type("A2")
    theta = {(1, 1), (-1, -1)}
    assert finite_closure(a2, theta) == frozenset(theta)
    assert finite_closure(a2, {(1, 0), (-1, 0), (0, 1), (0, -1)}) == a2.root_set
    assert finite_closure(a2, a2.roots) == a2.root_set


@pytest.mark.parametrize("name", ["A1", "A2", "A3", "B2", "G2", "B3", "C3"])
def test_maximal_closed_matches_brute_force(name):
    fr = FiniteRootSystem.of_type(name)
    assert set(maximal_closed(fr)) == brute_maximal_closed(fr)


def test_maximal_closed_examples():
    assert maximal_closed(FiniteRootSystem.of_type("A1")) == []
    a2 = FiniteRootSystem.of_type("A2")
    got = {frozenset(s) for s in maximal_closed(a2)}
    assert got == {
        frozenset({(1, 0), (-1, 0)}),
        frozenset({(0, 1), (0, -1)}),
        frozenset({(1, 1), (-1, -1)}),
    }
    b2 = FiniteRootSystem.of_type("B2")
    long_roots = frozenset(a for a in b2.roots if norm(b2.cd, a) == 4)
    assert long_roots in set(maximal_closed(b2))
    assert is_maximal_closed(a2, {(1, 1), (-1, -1)})
    with pytest.raises(NotProper):
        is_maximal_closed(a2, a2.roots)


def test_maximal_real_closed():
    a1 = FiniteRootSystem.of_type("A1")
    psi = maximal_real_closed(a1, "case1", k=2)
    assert psi.contains(AffineRoot((1,), 2)) and not psi.contains(AffineRoot((1,), 1))
    a2 = FiniteRootSystem.of_type("A2")
    psi = maximal_real_closed(a2, "case2", psi0=[(1, 1), (-1, -1)])
    assert psi.psi0 == {(1, 1), (-1, -1)} and psi.contains(AffineRoot((1, 1), 7))
    with pytest.raises(NotPrime):
        maximal_real_closed(a1, "case1", k=4)


def test_tuple_validation():
    t = string_example_tuple()
    roots = tuple_roots(t, 2)
    assert roots.real == {AffineRoot((1, 0), 0), AffineRoot((-1, 0), 0)}
    assert roots.imaginary_levels == {1, -1}
    a3 = FiniteRootSystem.of_type("A3")
    psi = periodic_from_psi0(a3, [(1, 0, 0), (-1, 0, 0)], 0)
    good = a3.perp([(1, 0, 0)]).basis[0]
    assert make_tuple(
        psi, PeriodicIntSet.finite([1, -1]), v_level={1: [good], -1: [good]}
    )
    with pytest.raises(AffineError) as e:
        make_tuple(
            psi,
            PeriodicIntSet.finite([1, -1]),
            v_level={1: [[1, 0, 0]], -1: [[1, 0, 0]]},
        )
    assert e.value.condition == "VNotPerp"
    with pytest.raises(AffineError) as e:
        make_tuple(psi, PeriodicIntSet.finite([2]))
    assert e.value.condition == "LambdaNotSymmetric"


def test_validate_tuple_json():
    raw = {
        "finite_type": "A2",
        "components": [{"roots": [[1, 0], [-1, 0]], "k": 0}],
        "lambda": {"modulus": 1, "residues": [], "add": [1, -1], "remove": []},
        "v": [
            {"level": 1, "basis": [["1", "2"]]},
            {"level": -1, "basis": [["1", "2"]]},
        ],
    }
    t = validate_tuple(raw)
    assert t.has_c()
    assert validate_tuple(t.to_json() | {"finite_type": "A2"}).to_json() == t.to_json()


def test_tuple_roots_shapes():
    a2 = FiniteRootSystem.of_type("A2")
    d = tuple_roots(derived_tuple(a2), 2)
    assert len(d.real) == 6 * 5 and d.imaginary_levels == {-2, -1, 1, 2}
    c = tuple_roots(case1_tuple(a2, 2, [1, 0]), 4)
    assert AffineRoot((1, 0), 1) in c.real and AffineRoot((1, 0), 2) not in c.real
    assert c.imaginary_levels == {-4, -2, 2, 4}


def test_tuple_leq():
    a2 = FiniteRootSystem.of_type("A2")
    d = derived_tuple(a2)
    for t in [case1_tuple(a2, 2), case1_tuple(a2, 3, [1, 2]), string_example_tuple()]:
        assert tuple_leq(t, d)
    assert tuple_leq(case1_tuple(a2, 4), case1_tuple(a2, 2))
    assert not tuple_leq(case1_tuple(a2, 2), case1_tuple(a2, 4))
    c2 = [case2_tuple(a2, m) for m in maximal_closed(a2)]
    assert not tuple_leq(c2[0], c2[1]) and not tuple_leq(c2[1], c2[0])


def test_is_maximal_tuple_examples():
    a2 = FiniteRootSystem.of_type("A2")
    assert is_maximal_tuple(derived_tuple(a2), False).shape == "derived"
    v = is_maximal_tuple(case2_tuple(a2, [(1, 1), (-1, -1)]), True)
    assert v.maximal and v.shape == "case2"
    assert not is_maximal_tuple(case1_tuple(a2, 4), True).maximal
    assert is_maximal_tuple(case1_tuple(a2, 2), True).shape == "case1"
