"""Worked examples rerun as executable checks.

Each ``check_*`` function returns an :class:`ExampleResult`; :func:`run_all`
runs them in a fixed order. Fixture builders are public so the test suite
can reuse them.
"""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass, field

from kmroots.affine import (
    AffineRoot,
    FiniteRootSystem,
    PeriodicIntSet,
    case1_tuple,
    case2_tuple,
    derived_tuple,
    is_maximal_tuple,
    make_tuple,
    maximal_closed,
    periodic_from_psi0,
    tuple_roots,
)
from kmroots.cartan import CartanDatum, cartan_datum, norm, pairing
from kmroots.loop import (
    LoopElement,
    SubalgebraSlice,
    bracket,
    chevalley,
    generate,
    root_generators,
    root_support,
    split_sym_special,
    string_in_support,
    verify_root_generated,
    verify_tuple_subalgebra,
)
from kmroots.rootslice import enumerate_roots, neg
from kmroots.subroot import (
    RootSet,
    Status,
    b_sigma,
    is_subroot_system,
    pi_system_check,
    relations,
    verify_bijection,
)


@dataclass
class ExampleResult:
    name: str
    passed: bool
    detail: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "status": "pass" if self.passed else "fail",
            "detail": self.detail,
        }


# ------------------------------------------------------------------ fixtures

RANK2_GCM = [[2, -4], [-1, 2]]
FIB_GCM = [[2, -3], [-3, 2]]
FN2D_GCM = [[2, -1, 0], [-1, 2, -2], [0, -2, 2]]
FN2D_SIGMA = [(1, 1, 0), (2, 2, 3), (0, 2, 3), (0, 4, 3)]
ALL_MINUS_TWO_GCM = [[2, -2, -2], [-2, 2, -2], [-2, -2, 2]]


def rank2_closed_form(H: int) -> set[tuple[int, int]]:
    """Positive real roots of [[2,-4],[-1,2]] of height <= H, from the closed-form families."""
    out = set()
    for j in range(2 * H + 2):
        if j % 2 == 0:
            cands = [(2 * j, j + 1), (j + 1, j // 2)]
        else:
            cands = [(j, (j + 1) // 2), (2 * (j + 1), j)]
        out.update(v for v in cands if sum(v) <= H)
    return out


def fib(n: int) -> int:
    a, b = 0, 1
    for _ in range(n):
        a, b = b, a + b
    return a


def fib_beta(which: int, j: int) -> tuple[int, int]:
    if which == 1:
        return (fib(2 * j), fib(2 * j + 2))
    return (fib(2 * j + 2), fib(2 * j))


def gamma_all_minus_two(k: int) -> tuple[int, int, int]:
    return (2 * k * (2 * k + 1), 2 * k * (2 * k - 1), 1)


def fn2d_brute_bsigma(cd: CartanDatum, sigma) -> list[list[int]]:
    """(gamma_j, gamma_i^vee) from the raw Gram matrix, without the library's pairing()."""
    n = cd.rank
    gram = [[cd.d[i] * cd.a[i][j] for j in range(n)] for i in range(n)]

    def form(x, y):
        return sum(x[i] * gram[i][j] * y[j] for i in range(n) for j in range(n))

    out = []
    for gi in sigma:
        row = []
        for gj in sigma:
            num, den = 2 * form(gj, gi), form(gi, gi)
            assert num % den == 0
            row.append(num // den)
        out.append(row)
    return out


def a5_slice(band: int = 6) -> SubalgebraSlice:
    """g1 + g2 in A5^(1): S1 = Delta(alpha1, alpha2) + 2Z delta, S2 = Delta(alpha4, alpha5) + 3Z delta."""
    fr = FiniteRootSystem.of_type("A5")
    s1 = [r for r in fr.roots if r[2:] == (0, 0, 0)]
    s2 = [r for r in fr.roots if r[:3] == (0, 0, 0)]
    p1 = periodic_from_psi0(fr, s1, 2)
    p2 = periodic_from_psi0(fr, s2, 3)
    return generate(
        chevalley(fr), root_generators(p1, band) + root_generators(p2, band), band
    )


def string_example_tuple():
    """s = C g_{+-alpha} + C alpha^vee + C h (x) t^{+-1} + C c in A2^(1), alpha = alpha1, alpha(h) = 0."""
    fr = FiniteRootSystem.of_type("A2")
    psi = periodic_from_psi0(fr, [(1, 0), (-1, 0)], 0)
    h = fr.perp([(1, 0)]).basis[0]
    return make_tuple(psi, PeriodicIntSet.finite([1, -1]), v_level={1: [h], -1: [h]})


def string_example_slice(band: int = 3) -> SubalgebraSlice:
    fr = FiniteRootSystem.of_type("A2")
    h = fr.perp([(1, 0)]).basis[0]
    gens = [
        LoopElement.x((1, 0)),
        LoopElement.x((-1, 0)),
        LoopElement.hvec(h, 1),
        LoopElement.hvec(h, -1),
    ]
    return generate(chevalley(fr), gens, band)


def counterexample_slice(band: int = 6, even_only: bool = False) -> SubalgebraSlice:
    """The A3^(1) slice spanned by x_{+-alpha} t^r, alpha^vee t^r (r >= 1) and h' t^{-2}.

    With ``even_only`` the levels are restricted to r in 2N.
    """
    fr = FiniteRootSystem.of_type("A3")
    alpha = (1, 0, 0)
    hp = fr.perp([alpha]).basis[0]
    levels = (2,) if even_only else (1, 2)
    gens = [LoopElement.x(alpha, r) for r in levels] + [
        LoopElement.x(neg(alpha), r) for r in levels
    ]
    gens += [LoopElement.h(0, levels[0]), LoopElement.hvec(hp, -2)]
    return generate(chevalley(fr), gens, band)


def corgen_fixtures():
    """(label, PeriodicRootSet) pairs over A1, A2, A3 covering k in {0,1,2,3} and nonzero f."""
    a1 = FiniteRootSystem.of_type("A1")
    a2 = FiniteRootSystem.of_type("A2")
    a3 = FiniteRootSystem.of_type("A3")
    return [
        ("A1 k=0 f=0", periodic_from_psi0(a1, a1.roots, 0)),
        ("A1 k=1", periodic_from_psi0(a1, a1.roots, 1)),
        ("A1 k=2 f=1", periodic_from_psi0(a1, a1.roots, 2, [1])),
        ("A1 k=3 f=2", periodic_from_psi0(a1, a1.roots, 3, [2])),
        ("A2 k=2 f=0", periodic_from_psi0(a2, a2.roots, 2)),
        ("A2 k=2 f=(1,0)", periodic_from_psi0(a2, a2.roots, 2, [1, 0])),
        ("A2 k=0 f=(1,0)", periodic_from_psi0(a2, a2.roots, 0, [1, 0])),
        ("A2 k=3 f=(1,2)", periodic_from_psi0(a2, a2.roots, 3, [1, 2])),
        ("A2 A1 k=1", periodic_from_psi0(a2, [(1, 1), (-1, -1)], 1)),
        ("A3 k=3 f=(1,0,2)", periodic_from_psi0(a3, a3.roots, 3, [1, 0, 2])),
        (
            "A3 A1xA1 k=2 f=(1,0,0)",
            periodic_from_psi0(
                a3, [(1, 0, 0), (-1, 0, 0), (0, 0, 1), (0, 0, -1)], 2, [1, 0, 0]
            ),
        ),
    ]


# ------------------------------------------------------------------ checks


def check_rank2_real_roots(H: int = 40) -> ExampleResult:
    sl = enumerate_roots(cartan_datum(RANK2_GCM), H)
    expected = rank2_closed_form(H)
    got = set(sl.pos_real)
    return ExampleResult(
        "rank-2 real roots of [[2,-4],[-1,2]]",
        got == expected,
        {
            "height": H,
            "count": len(got),
            "missing": sorted(expected - got),
            "extra": sorted(got - expected),
        },
    )


def check_fn2d(H: int = 14) -> ExampleResult:
    cd = cartan_datum(FN2D_GCM)
    sl = enumerate_roots(cd, H)
    chk = pi_system_check(FN2D_SIGMA, sl)
    bs = b_sigma(FN2D_SIGMA, cd)
    brute = fn2d_brute_bsigma(cd, FN2D_SIGMA)
    rel = relations(FN2D_SIGMA)
    ok_rel = rel in ([(2, -1, 2, -1)], [(-2, 1, -2, 1)])
    ok = (
        chk.status is Status.CERTIFIED
        and [list(r) for r in bs.gcm.entries] == brute
        and ok_rel
    )
    return ExampleResult(
        "FN2d pi-system",
        ok,
        {
            "pi_check": chk.status.value,
            "b_sigma": [list(r) for r in bs.gcm.entries],
            "relations": [list(r) for r in rel],
        },
    )


def check_all_minus_two(H: int = 40) -> ExampleResult:
    cd = cartan_datum(ALL_MINUS_TWO_GCM)
    bad = []
    for k in range(-5, 6):
        for l in range(-5, 6):
            if k == l:
                continue
            p = pairing(cd, gamma_all_minus_two(k), gamma_all_minus_two(l))
            if p != 2 - 16 * (k - l) ** 2:
                bad.append((k, l, p))
    sl = enumerate_roots(cd, H)
    chk = pi_system_check([gamma_all_minus_two(k) for k in range(-2, 3)], sl)
    return ExampleResult(
        "3x3 all-(-2) pi-system",
        not bad and chk.status is Status.CERTIFIED,
        {"pairing_violations": bad, "pi_check": chk.status.value},
    )


def check_fibonacci(H: int = 1000) -> ExampleResult:
    cd = cartan_datum(FIB_GCM)
    sl = enumerate_roots(cd, H)
    expected = set()
    j = 0
    while sum(fib_beta(1, j)) <= H:
        expected.add(fib_beta(1, j))
        expected.add(fib_beta(2, j))
        j += 1
    sign_bad = []
    for j in range(7):
        for k in range(7):
            d12 = tuple(a - b for a, b in zip(fib_beta(1, j), fib_beta(2, k)))
            if norm(cd, d12) <= 0:
                sign_bad.append(("12", j, k))
            if j != k:
                for w in (1, 2):
                    d = tuple(a - b for a, b in zip(fib_beta(w, j), fib_beta(w, k)))
                    if norm(cd, d) > 0:
                        sign_bad.append((f"{w}{w}", j, k))
    return ExampleResult(
        "Fibonacci real roots of [[2,-3],[-3,2]]",
        set(sl.pos_real) == expected and not sign_bad,
        {"height": H, "count": len(sl.pos_real), "norm_sign_violations": sign_bad},
    )


def check_g2_short() -> ExampleResult:
    sl = enumerate_roots(cartan_datum([[2, -3], [-1, 2]]), 6)
    psi = RootSet.of(sl, [(1, 0), (1, 1), (2, 1)], symmetric=True)
    rep = verify_bijection(psi)
    ok = is_subroot_system(psi) is True and not rep.generating_pi_systems
    return ExampleResult(
        "G2 short roots admit no generating pi-system", ok, {"bijection": rep.status}
    )


def check_a5_nonclosed(band: int = 6) -> ExampleResult:
    sup = root_support(a5_slice(band))
    a4 = (0, 0, 0, 1, 0)
    got = {
        "2delta": 2 in sup.imaginary_levels,
        "alpha4": AffineRoot(a4, 0) in sup.real,
        "alpha4+2delta": AffineRoot(a4, 2) in sup.real,
    }
    return ExampleResult(
        "A5^(1) Delta(s) not closed",
        got["2delta"] and got["alpha4"] and not got["alpha4+2delta"],
        got,
    )


def check_string_remark() -> ExampleResult:
    t = string_example_tuple()
    roots = tuple_roots(t, 3)
    real_ok = roots.real == frozenset({AffineRoot((1, 0), 0), AffineRoot((-1, 0), 0)})
    imag_ok = roots.imaginary_levels == frozenset({1, -1})
    closed = verify_tuple_subalgebra(t, 3).passed
    s = string_example_slice(3)
    strings = string_in_support(s, AffineRoot((1, 0), 0), 1)
    not_contained = not all(strings.values())
    return ExampleResult(
        "root string through delta leaves Delta(s)",
        real_ok and imag_ok and closed and not_contained and t.has_c(),
        {
            "tuple_closed": closed,
            "string_membership": {
                f"{list(k[0])}@{k[1]}": v for k, v in strings.items()
            },
        },
    )


def check_counterexample(band: int = 6) -> ExampleResult:
    rep = split_sym_special(counterexample_slice(band))
    zero = (0, 0, 0)
    sym_ok = rep.sym == frozenset({(zero, 2), (zero, -2)})
    witness = {
        "x": LoopElement.x((1, 0, 0), 1).to_json(),
        "y": LoopElement.x((-1, 0, 0), 1).to_json(),
    }
    cb = chevalley(FiniteRootSystem.of_type("A3"))
    prod = bracket(cb, LoopElement.x((1, 0, 0), 1), LoopElement.x((-1, 0, 0), 1))
    ok = (
        sym_ok
        and not rep.hypothesis
        and (zero, 2) in rep.degenerate
        and not rep.is_ideal
    )
    return ExampleResult(
        "affine Dynkin split counterexample",
        ok and prod == LoopElement.h(0, 2),
        {"report": rep.to_json(), "witness": witness, "bracket": prod.to_json()},
    )


def check_root_generated(band: int = 6) -> ExampleResult:
    out = {}
    for label, psi in corgen_fixtures():
        out[label] = verify_root_generated(psi, band).status
    return ExampleResult(
        "root generated subalgebras", all(v == "pass" for v in out.values()), out
    )


def check_maximal_tuples() -> ExampleResult:
    a2 = FiniteRootSystem.of_type("A2")
    verdicts = {
        "derived": is_maximal_tuple(derived_tuple(a2), False).maximal,
        "case1 k=2": is_maximal_tuple(case1_tuple(a2, 2), True).maximal,
        "case1 k=3 f=(1,0)": is_maximal_tuple(case1_tuple(a2, 3, [1, 0]), True).maximal,
        "case1 k=4": is_maximal_tuple(case1_tuple(a2, 4), True).maximal,
        "case1 k=2 without d": is_maximal_tuple(case1_tuple(a2, 2), False).maximal,
    }
    for m in maximal_closed(a2):
        verdicts[f"case2 {max(m)}"] = is_maximal_tuple(case2_tuple(a2, m), True).maximal
    expected = {k: not (k == "case1 k=4" or k.endswith("without d")) for k in verdicts}
    return ExampleResult(
        "maximal symmetric regular subalgebras of A2^(1)",
        verdicts == expected and len(maximal_closed(a2)) == 3,
        {k: v for k, v in verdicts.items()},
    )


CHECKS: list[Callable[[], ExampleResult]] = [
    check_rank2_real_roots,
    check_fibonacci,
    check_fn2d,
    check_all_minus_two,
    check_g2_short,
    check_a5_nonclosed,
    check_string_remark,
    check_counterexample,
    check_root_generated,
    check_maximal_tuples,
]


def run_all() -> list[ExampleResult]:
    return [c() for c in CHECKS]
