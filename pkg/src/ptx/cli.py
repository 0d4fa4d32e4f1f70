"""Command-line entry point: ``ptx <command> <manifest> [options]``.

Exit codes: 0 success, 1 a mathematical check failed, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction

from . import manifest as mf
from .base import base_jacobi_check, dx
from .cochains import NotGradedError, cohomology_dims, filtered_bounds
from .extension import (
    casimir_solve,
    ext_bracket,
    hamiltonian_derivation,
    jacobiator_generators,
    poisson_derivation_check,
)
from .gauge import deform_triple, gauge_transport_triple, poisson_module_roundtrip
from .poly import ParseError
from .triple import center_basis, curvature_apply, triple_check

OK, MATH_FAIL, USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _out(lines, stream=None):
    stream = stream or sys.stdout
    for line in lines:
        print(line, file=stream)


def _params(args) -> dict:
    out = {}
    for item in args.param or []:
        if "=" not in item:
            raise UsageError(f"--param expects NAME=VALUE, got {item!r}")
        name, value = item.split("=", 1)
        out[name.strip()] = value.strip()
    return out


def _load(args):
    return mf.load_manifest(args.manifest, _params(args))


def _idx(value: int, bound: int, name: str) -> int:
    if not 1 <= value <= bound:
        raise UsageError(f"{name} must be between 1 and {bound}")
    return value - 1


def cmd_check(args) -> int:
    m = _load(args)
    T = m.triple
    trip = triple_check(T)
    jac = base_jacobi_check(T.base)
    gen = jacobiator_generators(T)
    mark = lambda ok: "✓" if ok else "✗"
    _out([
        " ".join(f"{c} {mark(trip.passed(c))}" for c in ("EcPT1", "EcPT2", "EcPT3")) + f" Jacobi {mark(jac.ok)}",
        f"LieP1 {mark(trip.passed('LieP1'))} Jacobiator {mark(gen.ok)}",
    ])
    _out(str(f) for f in trip.failures + jac.failures + gen.failures)
    return OK if trip.ok and jac.ok and gen.ok else MATH_FAIL


def cmd_bracket(args) -> int:
    m = _load(args)
    T = m.triple
    p = mf.parse_elem(args.lhs, T.n, T.k, m.params)
    q = mf.parse_elem(args.rhs, T.n, T.k, m.params)
    _out([ext_bracket(T, p, q).to_str()])
    return OK


def cmd_jacobi(args) -> int:
    m = _load(args)
    T = m.triple
    gen = jacobiator_generators(T)
    structural = base_jacobi_check(T.base).ok and triple_check(T).ok
    _out(gen.lines())
    _out([f"base Jacobi and triple conditions: {'pass' if structural else 'fail'}"])
    if structural != gen.ok:
        _out(["error: generator Jacobiator and structural verdicts disagree"], sys.stderr)
        return MATH_FAIL
    return OK if gen.ok else MATH_FAIL


def cmd_curvature(args) -> int:
    m = _load(args)
    T = m.triple
    i = _idx(args.i, T.n, "--i")
    j = _idx(args.j, T.n, "--j")
    B = T.base
    lines = []
    for b in range(T.k):
        v = curvature_apply(T, dx(B, i), dx(B, j), T.unit(b))
        lines.append(f"R(dx{i + 1},dx{j + 1}) e{b + 1} = {v.to_str()}")
    if not T.k:
        lines.append("fiber rank is 0; curvature is empty")
    _out(lines)
    return OK


def cmd_casimir(args) -> int:
    m = _load(args)
    if args.max_degree < 0:
        raise UsageError("--max-degree must be nonnegative")
    basis = casimir_solve(m.triple, args.max_degree)
    _out([f"Casimir basis up to degree {args.max_degree}: {len(basis)} element(s)"])
    _out(p.to_str() for p in basis)
    return OK


def cmd_center(args) -> int:
    m = _load(args)
    if args.max_degree < 0:
        raise UsageError("--max-degree must be nonnegative")
    basis = center_basis(m.triple, args.max_degree)
    _out([f"center basis up to degree {args.max_degree}: {len(basis)} element(s)"])
    _out(v.to_str() for v in basis)
    return OK


def cmd_cohomology(args) -> int:
    m = _load(args)
    if args.degree < 0 or args.rank < 0:
        raise UsageError("--rank and --degree must be nonnegative")
    try:
        dims = cohomology_dims(m.triple, args.rank, args.degree, args.center_valued)
    except NotGradedError as e:
        zc, bc = filtered_bounds(m.triple, args.rank, args.degree, args.center_valued)
        _out([
            f"input is not weight-graded ({e})",
            f"filtered bounds up to degree {args.degree}: cocycles {zc}, coboundaries {bc} (not a cohomology dimension)",
        ])
        return OK
    except ValueError as e:
        _out([f"error: {e}"], sys.stderr)
        return MATH_FAIL
    _out([f"cocycles {dims.cocycles} coboundaries {dims.coboundaries} H {dims.cohomology}"])
    return OK


def _emit(T, args, m):
    if args.emit:
        mf.manifest_save(T, args.emit, m.params, m.meta)
        _out([f"wrote {args.emit}"])
    else:
        import json

        _out([json.dumps(mf.manifest_to_dict(T, m.params, m.meta), indent=2, ensure_ascii=False)])


def cmd_gauge(args) -> int:
    m = _load(args)
    G = mf.load_aux(args.gauge, mf.gauge_from_dict, m.triple, m.params)
    if not triple_check(m.triple).ok:
        _out(["input triple fails its compatibility checks"])
        return MATH_FAIL
    T2 = gauge_transport_triple(G, m.triple, validate=False)
    rep = triple_check(T2)
    _out(["transported triple: " + rep.summary()])
    _out(str(f) for f in rep.failures)
    _emit(T2, args, m)
    return OK if rep.ok else MATH_FAIL


def cmd_deform(args) -> int:
    m = _load(args)
    C = mf.load_aux(args.cocycle, mf.cocycle_from_dict, m.triple, m.params)
    try:
        t = Fraction(args.t)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"--t expects a rational, got {args.t!r}") from None
    try:
        T2 = deform_triple(m.triple, C, t)
    except ValueError as e:
        _out([f"cocycle rejected: {e}"])
        return MATH_FAIL
    rep = triple_check(T2)
    _out(["deformed triple: " + rep.summary()])
    _out(str(f) for f in rep.failures)
    _emit(T2, args, m)
    return OK if rep.ok else MATH_FAIL


def cmd_module_form(args) -> int:
    m = _load(args)
    res = poisson_module_roundtrip(m.triple)
    if res.obstructions:
        _out(["module form: no (" + ", ".join(res.obstructions) + ")"])
        return MATH_FAIL
    lines = ["module form: yes", res.report.summary()]
    T = m.triple
    for i in range(T.n):
        for a in range(T.k):
            lines.append(f"lambda(x{i + 1}, e{a + 1}) = {res.lam[i][a].to_str()}")
    lines.extend(str(f) for f in res.report.failures)
    _out(lines)
    return OK if res.is_module else MATH_FAIL


def cmd_ham(args) -> int:
    m = _load(args)
    T = m.triple
    p = mf.parse_elem(args.elem, T.n, T.k, m.params)
    _out(hamiltonian_derivation(T, p).to_str().splitlines())
    return OK


def cmd_poiss_check(args) -> int:
    m = _load(args)
    X = mf.load_aux(args.derivation, mf.derivation_from_dict, m.triple, m.params)
    rep = poisson_derivation_check(m.triple, X)
    _out(rep.lines())
    return OK if rep.ok else MATH_FAIL


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ptx", description="Exact checks for Poisson structures on trivial extension algebras.")
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        p = sub.add_parser(name, help=help_)
        p.add_argument("manifest", help="manifest JSON path or bundled fixture name")
        p.add_argument("--param", action="append", metavar="NAME=VALUE", help="override a manifest parameter")
        p.set_defaults(func=func)
        return p

    add("check", cmd_check, "verify triple conditions, base Jacobi and the generator Jacobiator")
    p = add("bracket", cmd_bracket, "bracket of two elements 'f ; a1,...,ak'")
    p.add_argument("--lhs", required=True)
    p.add_argument("--rhs", required=True)
    add("jacobi", cmd_jacobi, "Jacobiator of the extension bracket on generators")
    p = add("curvature", cmd_curvature, "curvature R(dx_i, dx_j) on basis vectors")
    p.add_argument("--i", type=int, required=True)
    p.add_argument("--j", type=int, required=True)
    p = add("casimir", cmd_casimir, "Casimir elements up to a degree")
    p.add_argument("--max-degree", type=int, required=True)
    p = add("center", cmd_center, "center of the fiber bracket up to a degree")
    p.add_argument("--max-degree", type=int, required=True)
    p = add("cohomology", cmd_cohomology, "graded cohomology dimensions")
    p.add_argument("--rank", type=int, required=True)
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--center-valued", action="store_true")
    p = add("gauge", cmd_gauge, "transport the triple by a gauge")
    p.add_argument("--gauge", required=True)
    p.add_argument("--emit")
    p = add("deform", cmd_deform, "deform K by t times a closed center-valued cocycle")
    p.add_argument("--cocycle", required=True)
    p.add_argument("--t", required=True)
    p.add_argument("--emit")
    add("module-form", cmd_module_form, "detect Poisson-module form and check the module axioms")
    p = add("ham", cmd_ham, "Hamiltonian derivation of an element")
    p.add_argument("--elem", required=True)
    p = add("poiss-check", cmd_poiss_check, "check whether a derivation is Poisson")
    p.add_argument("--derivation", required=True)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return int(e.code) if isinstance(e.code, int) else USAGE
    try:
        return args.func(args)
    except (UsageError, mf.ManifestError, ParseError, FileNotFoundError, IsADirectoryError) as e:
        print(f"error: {e}", file=sys.stderr)
        return USAGE


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
