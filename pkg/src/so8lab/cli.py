"""Command line front end.

    so8lab build     --family g3 --m 3
    so8lab analyze   --family g8 --l 1 [--samples 100000]
    so8lab molien    --family g3 --m 3 --degree 3
    so8lab cosets    --k 12 [--commuting] [--check-tables]
    so8lab bifurcate --family g3 --m 3 --a 0.7 | --sweep=-5:2:70
    so8lab certify   --family g8 --l 1

Reports are JSON documents carrying ``schemaVersion``.  Exit status: 0 when every
checked claim holds, 1 when some claim fails, 2 for usage errors, 3 for internal faults.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from collections.abc import Sequence

import numpy as np

from . import bifurcation as bif
from . import equivariants as eqv
from . import repanalysis as rep
from . import wordgroup as wg
from .errors import LabError, ParameterError
from .matgroup import (
    SCHEMA_VERSION,
    FiniteMatrixGroup,
    build_g3_generators,
    build_g8_generators,
    close_group,
    group_to_json,
    verify_matrix_relations,
)

THREADS_ENV = "SO8LAB_THREADS"

EXIT_OK, EXIT_CLAIM, EXIT_USAGE, EXIT_FAULT = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise ParameterError(message)


def _threads(value: int | None) -> int:
    if value is not None:
        n = value
    else:
        raw = os.environ.get(THREADS_ENV, "1")
        try:
            n = int(raw)
        except ValueError:
            raise ParameterError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None
    if n < 1:
        raise ParameterError(f"thread count must be positive, got {n}")
    return n


def _build(args) -> FiniteMatrixGroup:
    if args.family == "g3":
        if args.m is None:
            raise ParameterError("--family g3 needs --m")
        gens = build_g3_generators(args.m)
    else:
        if args.l is None:
            raise ParameterError("--family g8 needs --l")
        gens = build_g8_generators(args.l)
    return close_group(gens, threads=args.threads)


def _doc(command: str, args, **body) -> dict:
    head = {"schemaVersion": SCHEMA_VERSION, "command": command}
    if getattr(args, "family", None):
        head["family"] = args.family
        head["params"] = {"m": args.m} if args.family == "g3" else {"l": args.l}
    return {**head, **body}


def _claim(name: str, passed: bool, **detail) -> dict:
    return {"claim": name, "passed": bool(passed), **detail}


def _g8_subgroups(group: FiniteMatrixGroup) -> tuple[list[int], list[int]]:
    r2sq = np.linalg.matrix_power(group.named["R2"].entries, 2)
    e = group.identity_index
    return sorted([e, group.index_of(r2sq)]), sorted([e, group.index_of(-r2sq)])


# --------------------------------------------------------------------------
# commands
# --------------------------------------------------------------------------


def cmd_build(args) -> tuple[str, int]:
    return group_to_json(_build(args)), EXIT_OK


def cmd_analyze(args) -> tuple[dict, int]:
    g = _build(args)
    dim, gap = rep.commutant_dimension(g, with_gap=True)
    types = rep.isotropy_types(g, seed=args.seed)
    body = {
        "order": g.order,
        "elementOrders": {str(k): v for k, v in sorted(g.order_histogram().items())},
        "commutantDimension": dim,
        "commutantGap": gap,
        "isotropyTypes": [t.to_dict() for t in types],
    }
    if args.samples:
        oracle = rep.sampled_isotropy_types(g, samples=args.samples, seed=args.seed)
        lattice = {
            t.representative: t.fixed_dim
            for t in rep.isotropy_types(g, seed=args.seed, include_trivial=True)
            if t.fixed_dim
        }
        body["oracle"] = {
            "samples": args.samples,
            "typeCount": len(oracle),
            "agreesWithLattice": oracle == lattice,
        }
    if args.family == "g8":
        h, _ = _g8_subgroups(g)
        body["normalizer"] = rep.normalizer_report(g, h).to_dict()
    return _doc("analyze", args, **body), EXIT_OK


def cmd_molien(args) -> tuple[dict, int]:
    g = _build(args)
    value = eqv.equivariant_dimension(g, args.degree)
    return _doc("molien", args, degree=args.degree, dimension=value), EXIT_OK


def cmd_cosets(args) -> tuple[dict, int]:
    p = wg.Presentation(args.k, commuting=args.commuting, s=args.s)
    g = wg.abstract_group(p)
    relations = wg.verify_abstract_relations(p)
    body = {
        "k": p.k,
        "commuting": p.commuting,
        "order": g.order,
        "expectedOrder": p.expected_order(),
        "cosets": [
            {"label": wg.COSET_NAMES[i], "representative": wg.COSET_WORDS[i] or "e"}
            for i in range(p.coset_count)
        ],
        "relations": relations.to_dict(),
    }
    ok = relations.passed and g.order == p.expected_order()
    if args.check_tables:
        tables = wg.check_tables(p)
        body["tables"] = tables.to_dict()
        ok = ok and tables.passed
    if not p.commuting:
        k_report = wg.abstract_normalizer_K(p)
        body["normalizerK"] = k_report.to_dict()
        ok = ok and k_report.passed
    return _doc("cosets", args, **body), EXIT_OK if ok else EXIT_CLAIM


def _parse_sweep(text: str) -> tuple[float, float, int]:
    parts = text.split(":")
    try:
        a0, a1, steps = float(parts[0]), float(parts[1]), int(parts[2])
    except (IndexError, ValueError):
        raise ParameterError(f"--sweep expects a0:a1:steps, got {text!r}") from None
    if len(parts) != 3:
        raise ParameterError(f"--sweep expects a0:a1:steps, got {text!r}")
    return a0, a1, steps


def _check_g3_fields(m: int) -> None:
    gens = [g.entries for g in build_g3_generators(m).generators]
    for e in eqv.g3_cubic_basis():
        if not e.is_equivariant(gens):
            raise ParameterError(f"the cubic phase fields are not G3({m})-equivariant")


def cmd_bifurcate(args) -> tuple[str | dict, int]:
    if args.sweep is not None:
        if args.family != "g3":
            raise ParameterError("--sweep is available for the g3 family")
        _check_g3_fields(args.m)
        rows = bif.sweep(*_parse_sweep(args.sweep))
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["a", "fixed_space", "zeros", "degenerate"])
        for a, label, n, degen in rows:
            w.writerow([repr(a), label, n, int(degen)])
        return buf.getvalue(), EXIT_OK
    if args.a is None:
        raise ParameterError("bifurcate needs --a or --sweep")
    if args.family == "g3":
        _check_g3_fields(args.m)
        reports = bif.g3_branches(args.a)
    else:
        reports = bif.lift_branches_g8(args.l, args.a, group=_build(args))
    body = {"a": args.a, "branches": [r.to_dict() for r in reports]}
    return _doc("bifurcate", args, **body), EXIT_OK


def _certify_g3(args) -> list[dict]:
    m = args.m
    g = _build(args)
    claims = [_claim("order = 16m", g.order == 16 * m, value=g.order, expected=16 * m)]
    dim, gap = rep.commutant_dimension(g, with_gap=True)
    claims.append(_claim("commutant dimension = 1", dim == 1, value=dim, gap=gap))
    types = rep.isotropy_types(g, seed=args.seed)
    dims = [t.fixed_dim for t in types]
    claims.append(_claim("three nontrivial isotropy types, each with fixed dimension 2", dims == [2, 2, 2], fixedDims=dims))
    d3 = eqv.equivariant_dimension(g, 3)
    claims.append(_claim("cubic equivariants form a 3-dimensional space", d3 == 3, value=d3))
    inv = eqv.g3_invariants()
    e31, e32 = eqv.g3_cubic_basis()
    for name, i, e in (("e31 = grad I41", inv["I41"], e31), ("e32 = grad I42", inv["I42"], e32)):
        gc = eqv.gradient_check(i, e)
        claims.append(_claim(name, bool(gc), scale=gc.scale))

    regular = True
    for a in (-2.0, 0.0, 0.7, 3.0):
        for r in bif.g3_branches(a):
            regular = regular and r.all_regular and not r.degenerate
    claims.append(_claim("branch zeros regular for a in {-2, 0, 0.7, 3}", regular))
    spaces = bif.g3_isotropy_spaces()
    for label, a in (("H2", -1.0), ("H3", -4.0)):
        hit = bif.find_branches(spaces[label], a, label=label).degenerate
        claims.append(_claim(f"Fix({label}) degenerates at a = {a:g}", hit))
    return claims


def _certify_g8(args) -> list[dict]:
    ell = args.l
    g = _build(args)
    tau = g.params["tau"]
    claims = [_claim("order = 64 + 128 l", g.order == 64 + 128 * ell, value=g.order, expected=64 + 128 * ell)]
    rel = verify_matrix_relations(ell, group=g)
    claims.append(_claim("matrix relations", rel.passed, failures=[c.name for c in rel.failures()]))
    dim, gap = rep.commutant_dimension(g, with_gap=True)
    claims.append(_claim("commutant dimension = 1", dim == 1, value=dim, gap=gap))
    types = rep.isotropy_types(g, seed=args.seed, include_trivial=True)
    dims = [t.fixed_dim for t in types]
    claims.append(_claim("every isotropy type has even fixed dimension", all(d % 2 == 0 for d in dims), fixedDims=dims))

    h, hp = _g8_subgroups(g)
    fix_h, fix_hp = rep.fixed_subspace(g, h), rep.fixed_subspace(g, hp)
    claims.append(_claim("dim Fix(<R2^2>) = dim Fix(<-R2^2>) = 4", fix_h.dim == fix_hp.dim == 4, dims=[fix_h.dim, fix_hp.dim]))
    n_h, n_hp = rep.normalizer(g, h), rep.normalizer(g, hp)
    claims.append(
        _claim("normalizers coincide with index 2", n_h == n_hp and 2 * len(n_h) == g.order, orders=[len(n_h), len(n_hp)])
    )
    span = rep.numerical_rank(np.vstack([fix_h.basis, fix_hp.basis]))
    claims.append(_claim("Fix(H) + Fix(H') = R^8", span == 8, rank=span))
    weyl = rep.weyl_action(g, h)
    claims.append(_claim("Weyl order = 16 tau", weyl.order == 16 * tau, value=weyl.order))
    iso = rep.verify_weyl_is_g3(g, h, tau)
    claims.append(_claim("Weyl group isomorphic to G3(tau)", bool(iso), status=iso.status, nodes=iso.nodes))
    omega = rep.verify_omega_formulas(ell, group=g)
    claims.append(_claim("Omega formulas", omega.passed, report=omega.to_dict()))
    rr = eqv.restriction_rank(g, h, 3)
    claims.append(
        _claim("cubic restriction to Fix(<R2^2>) surjective", rr.surjective, imageRank=rr.image_rank, target=rr.target_dim)
    )
    branches = bif.lift_branches_g8(ell, 0.0, group=g)
    ok = all(b.all_regular and not b.degenerate for b in branches)
    even = all(z.fixed_dim % 2 == 0 for b in branches for z in b.zeros)
    claims.append(
        _claim(
            "lifted branches at a = 0 regular with even fixed dimensions",
            ok and even,
            zeroCounts=[len(b.zeros) for b in branches],
        )
    )
    return claims


def cmd_certify(args) -> tuple[dict, int]:
    claims = _certify_g3(args) if args.family == "g3" else _certify_g8(args)
    failed = [c["claim"] for c in claims if not c["passed"]]
    body = {"passed": not failed, "failed": failed, "claims": claims}
    return _doc("certify", args, **body), EXIT_CLAIM if failed else EXIT_OK


# --------------------------------------------------------------------------
# entry point
# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--threads", type=int, default=None, help=f"worker threads (default ${THREADS_ENV} or 1)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--output", "-o", default=None, help="write the report here instead of stdout")

    fam = argparse.ArgumentParser(add_help=False)
    fam.add_argument("--family", choices=("g3", "g8"), required=True)
    fam.add_argument("--m", type=int, default=None, help="G3(m) parameter")
    fam.add_argument("--l", type=int, default=None, help="G(l) parameter")

    p = _Parser(prog="so8lab", description="Finite subgroups of SO(4) and SO(8): groups, equivariants, branches.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("build", parents=[common, fam], help="close a group and print it as JSON")
    a = sub.add_parser("analyze", parents=[common, fam], help="commutant, isotropy types, normalizer")
    a.add_argument("--samples", type=int, default=0, help="also run the random-stabilizer oracle")
    m = sub.add_parser("molien", parents=[common, fam], help="dimension of equivariant maps of one degree")
    m.add_argument("--degree", type=int, required=True)
    c = sub.add_parser("cosets", parents=[common], help="coset normal forms of the presented group")
    c.add_argument("--k", type=int, required=True)
    c.add_argument("--commuting", action="store_true")
    c.add_argument("--s", type=int, default=None)
    c.add_argument("--check-tables", action="store_true")
    b = sub.add_parser("bifurcate", parents=[common, fam], help="branch zeros on the fixed circles")
    b.add_argument("--a", type=float, default=None)
    b.add_argument("--sweep", default=None, metavar="A0:A1:STEPS", help="CSV of zero counts over a range of a")
    sub.add_parser("certify", parents=[common, fam], help="run every check for one group")
    return p


COMMANDS = {
    "build": cmd_build,
    "analyze": cmd_analyze,
    "molien": cmd_molien,
    "cosets": cmd_cosets,
    "bifurcate": cmd_bifurcate,
    "certify": cmd_certify,
}


def _emit(payload, path: str | None) -> None:
    text = payload if isinstance(payload, str) else json.dumps(payload, indent=2) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _fail(exc: BaseException, code: int) -> int:
    err = {"schemaVersion": SCHEMA_VERSION, "error": type(exc).__name__, "message": str(exc), "exitCode": code}
    sys.stderr.write(json.dumps(err) + "\n")
    return code


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        args.threads = _threads(args.threads)
        payload, code = COMMANDS[args.command](args)
        _emit(payload, args.output)
        return code
    except ParameterError as exc:
        return _fail(exc, EXIT_USAGE)
    except (LabError, OSError) as exc:
        return _fail(exc, EXIT_FAULT)
    except Exception as exc:  # noqa: BLE001 - anything unexpected is an internal fault
        return _fail(exc, EXIT_FAULT)


if __name__ == "__main__":
    sys.exit(main())
