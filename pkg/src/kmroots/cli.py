"""Command-line front end.

Exit codes: 0 success, 1 mathematical refutation, 2 input error,
3 truncated or undecided answer under ``--strict``.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from collections.abc import Callable, Sequence
from pathlib import Path

from kmroots import affine, loop, worked_examples
from kmroots.affine import AffineError, FiniteRootSystem
from kmroots.cartan import (
    GcmError,
    affine_cartan_matrix,
    finite_cartan_matrix,
    parse_gcm_json,
    symmetrize,
    validate_gcm,
)
from kmroots.rootslice import (
    ResourceCapExceeded,
    RootClass,
    Truncated,
    classify,
    enumerate_roots,
    root_string,
)
from kmroots.subroot import (
    RootSet,
    Status,
    b_sigma,
    minimal_elements,
    orbit,
    pi_system_check,
    verify_bijection,
)

OK, REFUTED, INPUT_ERROR, UNDECIDED = 0, 1, 2, 3


class InputError(Exception):
    pass


class Outcome:
    def __init__(self, report: dict, code: int = OK, undecided: bool = False):
        self.report = report
        self.code = code
        self.undecided = undecided


# ------------------------------------------------------------------ loading


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc


def _json(path: str, flag: str):
    try:
        return json.loads(_read(path))
    except json.JSONDecodeError as exc:
        raise InputError(f"{flag}: invalid JSON in {path}: {exc.msg}") from exc


def _cartan(args):
    if args.gcm and args.type:
        raise InputError("give either --gcm or --type, not both")
    if args.gcm:
        return symmetrize(parse_gcm_json(_read(args.gcm)))
    if args.type:
        name = args.type.strip()
        if name.endswith("^(1)"):
            return symmetrize(validate_gcm(affine_cartan_matrix(name[:-4])))
        return symmetrize(validate_gcm(finite_cartan_matrix(name)))
    raise InputError("one of --gcm or --type is required")


def _vector(text: str, flag: str) -> tuple[int, ...]:
    try:
        data = (
            json.loads(text)
            if text.strip().startswith("[")
            else [int(x) for x in text.split(",")]
        )
        return tuple(int(x) for x in data)
    except (ValueError, TypeError) as exc:
        raise InputError(
            f"{flag}: expected a comma separated integer vector, got {text!r}"
        ) from exc


def _gens(path: str) -> list[tuple[int, ...]]:
    data = _json(path, "--gens")
    if not isinstance(data, dict) or "gens" not in data:
        raise InputError('--gens: expected an object with key "gens"')
    return [tuple(int(c) for c in v) for v in data["gens"]]


def _roots(path: str) -> list[tuple[int, ...]]:
    data = _json(path, "--roots")
    if not isinstance(data, dict) or "roots" not in data:
        raise InputError('--roots: expected an object with key "roots"')
    return [tuple(int(c) for c in v) for v in data["roots"]]


def _finite(name: str | None) -> FiniteRootSystem:
    if not name:
        raise InputError("--type is required")
    return FiniteRootSystem.of_type(name.removesuffix("^(1)"))


def _vecs(vs) -> list[list[int]]:
    return [list(v) for v in vs]


# ------------------------------------------------------------------ commands


def cmd_roots(args) -> Outcome:
    sl = enumerate_roots(_cartan(args), args.height)
    return Outcome(
        {
            "rank": sl.rank,
            "height": sl.height_bound,
            "real": _vecs(sl.real_roots()),
            "imaginary": _vecs(sl.imaginary_roots()),
        }
    )


def cmd_classify(args) -> Outcome:
    sl = enumerate_roots(_cartan(args), args.height)
    beta = _vector(args.vector, "--vector")
    c = classify(sl, beta)
    return Outcome(
        {"vector": list(beta), "class": c.value}, undecided=c is RootClass.UNKNOWN
    )


def cmd_string(args) -> Outcome:
    sl = enumerate_roots(_cartan(args), args.height)
    s = root_string(sl, _vector(args.alpha, "--alpha"), _vector(args.beta, "--beta"))
    return Outcome(
        {
            "alpha": list(s.alpha),
            "beta": list(s.beta),
            "p": s.p,
            "q": s.q,
            "members": _vecs(s.members),
            "real": list(s.real_flags),
            "real_count": s.real_count,
        }
    )


def _rootset(args) -> RootSet:
    sl = enumerate_roots(_cartan(args), args.height)
    return RootSet.of(sl, _roots(args.roots), symmetric=True)


def cmd_pi_of(args) -> Outcome:
    psi = _rootset(args)
    rep = minimal_elements(psi)
    out = {"pi": rep.to_json()}
    code = OK
    undecided = not rep.complete
    if args.bijection:
        b = verify_bijection(psi, args.max_gens)
        out["bijection"] = b.to_json()
        code = REFUTED if b.status == "fail" else OK
        undecided = undecided or b.status == "undecided"
    return Outcome(out, code, undecided)


def cmd_pisystem(args) -> Outcome:
    sl = enumerate_roots(_cartan(args), args.height)
    chk = pi_system_check(_gens(args.gens), sl)
    code = REFUTED if chk.status is Status.REFUTED else OK
    return Outcome(chk.to_json(), code, chk.status is Status.UNDECIDED)


def cmd_bsigma(args) -> Outcome:
    return Outcome(b_sigma(_gens(args.gens), _cartan(args)).to_json())


def cmd_orbit(args) -> Outcome:
    sl = enumerate_roots(_cartan(args), args.height)
    res = orbit(_gens(args.gens), sl)
    return Outcome(
        {"roots": _vecs(res.roots.sorted()), "truncated": res.truncated},
        undecided=res.truncated,
    )


def _periodic(args) -> affine.PeriodicRootSet:
    raw = _json(args.affine, "--affine")
    if not isinstance(raw, dict) or "finite_type" not in raw:
        raise InputError('--affine: expected an object with key "finite_type"')
    return affine.validate_periodic(
        FiniteRootSystem.of_type(raw["finite_type"]), raw.get("components", [])
    )


def cmd_affine_validate(args) -> Outcome:
    try:
        psi = _periodic(args)
    except AffineError as exc:
        return Outcome(
            {"valid": False, "condition": exc.condition, "detail": str(exc)}, REFUTED
        )
    return Outcome({"valid": True, "datum": psi.to_json()})


def cmd_affine_pi(args) -> Outcome:
    psi = _periodic(args)
    return Outcome({"pi": [r.to_json() for r in affine.pi_exact(psi)]})


def cmd_affine_maximal(args) -> Outcome:
    fr = _finite(args.type)
    return Outcome(
        {
            "finite_type": fr.name,
            "maximal_closed": [_vecs(sorted(m)) for m in affine.maximal_closed(fr)],
        }
    )


def _tuple(args):
    raw = _json(args.affine, "--affine")
    if not isinstance(raw, dict) or "finite_type" not in raw:
        raise InputError('--affine: expected an object with key "finite_type"')
    return affine.validate_tuple(raw), bool(raw.get("with_d", False))


def cmd_tuple_validate(args) -> Outcome:
    try:
        t, _ = _tuple(args)
    except AffineError as exc:
        return Outcome(
            {"valid": False, "condition": exc.condition, "detail": str(exc)}, REFUTED
        )
    roots = affine.tuple_roots(t, args.band)
    return Outcome(
        {
            "valid": True,
            "tuple": t.to_json(),
            "has_c": t.has_c(),
            "real_roots": [r.to_json() for r in sorted(roots.real)],
            "imaginary_levels": sorted(roots.imaginary_levels),
        }
    )


def cmd_tuple_maximal(args) -> Outcome:
    t, with_d = _tuple(args)
    v = affine.is_maximal_tuple(t, with_d or args.with_d)
    return Outcome(v.to_json(), OK if v.maximal else REFUTED)


def _elements(path: str) -> list[loop.LoopElement]:
    try:
        return loop.parse_elements_json(_read(path))
    except (KeyError, ValueError, TypeError) as exc:
        raise InputError(f"--gens: malformed element list: {exc}") from exc


def cmd_loop_generate(args) -> Outcome:
    cb = loop.chevalley(_finite(args.type))
    s = loop.generate(cb, _elements(args.gens), args.band)
    sup = loop.root_support(s)
    spans = [
        {"weight": _weight_json(w), "basis": [b.to_json() for b in s.basis(w)]}
        for w, _ in _group(s.all_basis())
    ]
    return Outcome(
        {
            "band": s.band,
            "saturated": s.saturated,
            "caveat": s.caveat,
            "dim": s.dim(),
            "support": sup.to_json(),
            "spans": spans,
            "metadata": cb.metadata(),
        }
    )


def _group(items):
    seen = []
    for w, b in items:
        if not seen or seen[-1][0] != w:
            seen.append((w, b))
    return seen


def _weight_json(w) -> dict:
    if w[0] == "X":
        return {"root": list(w[1]), "level": w[2]}
    return {"cartan_level": w[1]}


def cmd_loop_verify(args) -> Outcome:
    if args.mode == "root-generated":
        psi = _periodic(args)
        rep = loop.verify_root_generated(psi, args.band)
        return Outcome(rep.to_json(), OK if rep.passed else REFUTED)
    if args.mode == "tuple":
        t, _ = _tuple(args)
        rep = loop.verify_tuple_subalgebra(t, args.band)
        return Outcome(rep.to_json(), OK if rep.passed else REFUTED)
    if args.mode == "split":
        cb = loop.chevalley(_finite(args.type))
        s = loop.generate(cb, _elements(args.gens), args.band)
        sp = loop.split_sym_special(s)
        ok = sp.is_ideal and sp.semidirect
        return Outcome(sp.to_json(), OK if ok or not sp.hypothesis else REFUTED)
    if args.mode == "antisymmetry":
        cb = loop.chevalley(_finite(args.type))
        basis = loop.loop_basis(cb, args.band)
        rng = random.Random(args.seed)
        bad = 0
        for _ in range(args.samples):
            x, y = rng.choice(basis), rng.choice(basis)
            if not (loop.bracket(cb, x, y) + loop.bracket(cb, y, x)).is_zero():
                bad += 1
        return Outcome(
            {"samples": args.samples, "seed": args.seed, "violations": bad},
            REFUTED if bad else OK,
        )
    cb = loop.chevalley(_finite(args.type))
    bad = loop.jacobi_violations(cb, args.band)
    return Outcome(
        {
            "band": args.band,
            "violations": [[e.to_json() for e in triple] for triple in bad[:10]],
        },
        REFUTED if bad else OK,
    )


def cmd_verify_examples(args) -> Outcome:
    results = worked_examples.run_all()
    report = {"examples": [r.to_json() for r in results]}
    return Outcome(report, OK if all(r.passed for r in results) else REFUTED)


# ------------------------------------------------------------------ parser


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--height", type=int, default=20, help="height bound H (default 20)")
    p.add_argument("--band", type=int, default=6, help="t-degree band D (default 6)")
    p.add_argument(
        "--strict", action="store_true", help="exit 3 on truncated or undecided answers"
    )
    p.add_argument(
        "--max-gens",
        type=int,
        default=6,
        help="largest pi-system size in the uniqueness probe",
    )
    p.add_argument("--seed", type=int, default=0, help="seed for sampled checks")
    fmt = p.add_mutually_exclusive_group()
    fmt.add_argument(
        "--json",
        dest="pretty",
        action="store_false",
        help="compact JSON output (default)",
    )
    fmt.add_argument(
        "--pretty", dest="pretty", action="store_true", help="indented JSON output"
    )
    p.set_defaults(pretty=False)


def _gcm_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--gcm", help="GCM JSON file")
    p.add_argument("--type", help="Cartan type such as A2, G2 or A2^(1)")


COMMANDS: dict[
    str, tuple[Callable, Callable[[argparse.ArgumentParser], None], str]
] = {}


def _register(
    name: str,
    fn: Callable,
    setup: Callable[[argparse.ArgumentParser], None],
    help_: str,
):
    COMMANDS[name] = (fn, setup, help_)


_register("roots", cmd_roots, _gcm_args, "list positive roots up to the height bound")


def _classify_args(p):
    _gcm_args(p)
    p.add_argument("--vector", required=True, help="coefficient vector, e.g. 1,2,0")


_register(
    "classify",
    cmd_classify,
    _classify_args,
    "classify a vector as Real, Imaginary, NotARoot or Unknown",
)


def _string_args(p):
    _gcm_args(p)
    p.add_argument("--alpha", required=True)
    p.add_argument("--beta", required=True)


_register("string", cmd_string, _string_args, "root string S(alpha, beta)")


def _pi_of_args(p):
    _gcm_args(p)
    p.add_argument("--roots", required=True, help='root set JSON {"rank", "roots"}')
    p.add_argument(
        "--bijection",
        action="store_true",
        help="also run the orbit round trip and uniqueness probe",
    )


_register("pi-of", cmd_pi_of, _pi_of_args, "canonical generators Pi(Psi)")


def _gens_args(p):
    _gcm_args(p)
    p.add_argument("--gens", required=True, help='pi-system JSON {"gens": [...]}')


_register("pisystem", cmd_pisystem, _gens_args, "certify or refute a pi-system")
_register("bsigma", cmd_bsigma, _gens_args, "induced matrix B_Sigma")
_register("orbit", cmd_orbit, _gens_args, "W_Sigma(Sigma) inside the height slice")


def _affine_args(p):
    p.add_argument("--affine", required=True, help="affine datum JSON")


_register(
    "affine-validate",
    cmd_affine_validate,
    _affine_args,
    "validate a periodic real closed subroot system",
)
_register(
    "affine-pi", cmd_affine_pi, _affine_args, "exact Pi of a periodic subroot system"
)


def _type_args(p):
    p.add_argument("--type", required=True, help="finite type such as A2")


_register(
    "affine-maximal",
    cmd_affine_maximal,
    _type_args,
    "maximal closed subroot systems of a finite type",
)
_register(
    "tuple-validate",
    cmd_tuple_validate,
    _affine_args,
    "validate a symmetric regular subalgebra tuple",
)


def _tuple_max_args(p):
    _affine_args(p)
    p.add_argument("--with-d", action="store_true", help="the subalgebra contains d")


_register(
    "tuple-maximal", cmd_tuple_maximal, _tuple_max_args, "decide maximality of a tuple"
)


def _loop_gen_args(p):
    _type_args(p)
    p.add_argument("--gens", required=True, help="LoopElement list JSON")


_register(
    "loop-generate",
    cmd_loop_generate,
    _loop_gen_args,
    "generate a subalgebra within a degree band",
)


def _loop_verify_args(p):
    p.add_argument(
        "--mode",
        choices=["root-generated", "tuple", "split", "jacobi", "antisymmetry"],
        default="root-generated",
    )
    p.add_argument("--affine", help="affine datum JSON (root-generated, tuple)")
    p.add_argument("--type", help="finite type (split, jacobi, antisymmetry)")
    p.add_argument("--gens", help="LoopElement list JSON (split)")
    p.add_argument("--samples", type=int, default=10_000)


_register(
    "loop-verify",
    cmd_loop_verify,
    _loop_verify_args,
    "verify structural statements with the bracket engine",
)
_register(
    "verify-paper-examples",
    cmd_verify_examples,
    lambda p: None,
    "rerun every worked example",
)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kmroots", description="Exact Kac-Moody root system computations."
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, setup, help_) in COMMANDS.items():
        p = sub.add_parser(name, help=help_)
        setup(p)
        _add_common(p)
    return parser


def _check_required(args) -> None:
    if args.command == "loop-verify":
        need = {
            "root-generated": ["affine"],
            "tuple": ["affine"],
            "split": ["type", "gens"],
        }.get(args.mode, ["type"])
        for n in need:
            if getattr(args, n) is None:
                raise InputError(f"--{n} is required for --mode {args.mode}")
    for flag in ("height", "band"):
        if getattr(args, flag) < 0 or (flag == "height" and args.height < 1):
            raise InputError(f"--{flag} must be positive")


def run(argv: Sequence[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return INPUT_ERROR if exc.code else OK
    try:
        _check_required(args)
        outcome = COMMANDS[args.command][0](args)
    except Truncated as exc:
        report = {"status": "truncated", "height": exc.height, "detail": str(exc)}
        _emit(report, args.pretty, out)
        return UNDECIDED if args.strict else OK
    except (
        InputError,
        GcmError,
        AffineError,
        ResourceCapExceeded,
        ValueError,
        KeyError,
    ) as exc:
        print(f"kmroots {args.command}: {exc}", file=err)
        return INPUT_ERROR
    _emit(outcome.report, args.pretty, out)
    if outcome.code != OK:
        return outcome.code
    if outcome.undecided and args.strict:
        return UNDECIDED
    return OK


def _emit(report: dict, pretty: bool, out) -> None:
    out.write(
        json.dumps(report, indent=2 if pretty else None, sort_keys=True, default=str)
    )
    out.write("\n")


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
