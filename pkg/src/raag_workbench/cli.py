"""Command-line front end: ``raag-workbench <command> ...``.

Exit codes: 0 success, 1 verification failure, 2 parse error, 3 precondition violation.
"""
from __future__ import annotations

import argparse
import json
import sys

from . import __version__
from . import central_para as cp
from . import gs_bounds as gs
from . import hnn_embed as he
from . import subdirect_lab as sd
from .errors import InputError, PreconditionError, VerificationError, WorkbenchError
from .free_tools import (
    Presentation,
    abelianization_snf,
    check_certificate,
    free_group,
    infinite_quotient_certificate,
    is_free_basis,
    stallings_build,
)
from .graph_core import SimplicialGraph, clique_number
from .trace_words import cyclic_reduce, format_word, parse_tokens, parse_word

DEFAULT_SEED = 1729
EXIT_OK, EXIT_VERIFY, EXIT_PARSE, EXIT_PRECONDITION = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(message)


def _seed(text: str) -> int:
    value = int(text)
    if not 0 <= value < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("expected a positive integer")
    return value


# -- report plumbing ------------------------------------------------------------------

def make_report(argv, computed, cited=(), checks=None, witnesses=None, seed=None) -> dict:
    report = {
        "version": __version__,
        "command": list(argv),
        "computed": computed,
        "cited": list(cited),
        "checks": checks or {},
        "witnesses": witnesses or {},
    }
    if seed is not None:
        report["seed"] = seed
    return report


def _failed(report: dict) -> list[str]:
    return [name for name, c in report["checks"].items() if not c.get("passed", False)]


def _text(value) -> str:
    if isinstance(value, (list, tuple)):
        return " ".join(_text(v) for v in value) if all(not isinstance(v, (dict, list)) for v in value) \
            else "\n  " + "\n  ".join(_text(v) for v in value)
    if isinstance(value, dict):
        return json.dumps(value, ensure_ascii=False)
    return str(value)


def emit(report: dict, as_json: bool, out) -> None:
    if as_json:
        json.dump(report, out, indent=2, ensure_ascii=False, sort_keys=False)
        out.write("\n")
        return
    for key, value in report["computed"].items():
        out.write(f"{key}: {_text(value)}\n")
    for name, check in report["checks"].items():
        extra = {k: v for k, v in check.items() if k != "passed" and v not in ([], None)}
        out.write(f"[{'PASS' if check.get('passed') else 'FAIL'}] {name}"
                  + (f"  {json.dumps(extra, ensure_ascii=False)}" if extra else "") + "\n")
    for line in report["cited"]:
        out.write(f"cited: {line}\n")
    if "seed" in report:
        out.write(f"seed: {report['seed']}\n")


# -- helpers ---------------------------------------------------------------------------

def _graph(args) -> SimplicialGraph:
    if not args.graph:
        raise InputError("this command needs --graph <path>")
    return SimplicialGraph.from_file(args.graph)


def _package(args):
    if args.package:
        return he.load_package(args.package), None
    return he.build_gd(args.d)


def _bounds_row(n: int, mode: str) -> dict:
    r = gs.default_r(n)
    value = gs.order_F_mod_Dr(r, mode) ** n
    envelope = 18 * n ** 3
    gamma_ok = value <= gs.BigCount.power_of_two(envelope - n)
    delta_ok = value + n < gs.BigCount.power_of_two(envelope)
    return {
        "n": n,
        "r": r,
        "tau": str(gs.DEFAULT_TAU),
        "mode": mode,
        "log2_gamma": value.exponent,
        "log2_delta_envelope": envelope,
        "closed_form_check": "pass" if gamma_ok and delta_ok else "fail",
        "_gamma": value,
    }


# -- commands ---------------------------------------------------------------------------

def cmd_nf(args):
    x = parse_word(_graph(args), args.word)
    return {"normal_form": format_word(x)}, {}


def cmd_len(args):
    return {"length": len(parse_word(_graph(args), args.word))}, {}


def cmd_supp(args):
    g = _graph(args)
    x = parse_word(g, args.word)
    return {"support": g.sorted_vertices(x.support)}, {}


def cmd_cyc(args):
    x = parse_word(_graph(args), args.word)
    u, t = cyclic_reduce(x)
    computed = {"conjugator": format_word(u), "core": format_word(t), "length": len(x), "core_length": len(t)}
    checks = {"length_identity": {"passed": len(x) == len(t) + 2 * len(u)}}
    return computed, checks


def cmd_centralizer(args):
    x = parse_word(_graph(args), args.word)
    return {"generators": [format_word(s) for s in cp.centralizer_generators(x)]}, {}


def cmd_pc(args):
    g = _graph(args)
    xs = [parse_word(g, w) for w in args.words]
    p = cp.pc_set(xs, g)
    checks = {}
    if args.bound is not None:
        q = cp.pc_set_bounded(xs, g, args.bound)
        checks["bounded_search_agrees"] = {"passed": q == p, "bound": args.bound, "bounded": str(q)}
    return {"parabolic": str(p), "rank": p.rank}, checks


def cmd_clique(args):
    return {"clique_number": clique_number(_graph(args))}, {}


def cmd_stallings(args):
    if args.graph:
        alphabet = _graph(args)
        if alphabet.edges:
            raise PreconditionError("stallings needs a free group (graph without edges)")
    else:
        names = []
        for w in args.words + (args.member or []):
            for letter in parse_tokens(w):
                if letter.vertex not in names:
                    names.append(letter.vertex)
        alphabet = free_group(names)
    gens = [parse_word(alphabet, w) for w in args.words]
    aut = stallings_build(alphabet, gens)
    computed = {
        "alphabet": list(alphabet.vertices),
        "states": aut.n_states,
        "edges": [f"{s} -{a}-> {d}" for s, a, d in sorted(aut.edges)],
        "rank": aut.rank(),
        "free_basis": is_free_basis(alphabet, gens),
        "whole_group": aut.is_whole_group(),
    }
    if args.member:
        computed["member"] = {w: aut.member(parse_word(alphabet, w)) for w in args.member}
    return computed, {}


def cmd_abel(args):
    p = Presentation.from_file(args.presentation)
    inv = abelianization_snf(p)
    cert = infinite_quotient_certificate(p)
    computed = {
        "generators": len(p.gens),
        "relators": len(p.relators),
        "free_rank": inv.free_rank,
        "torsion": list(inv.torsion),
        "infinite_quotient_certificate": list(cert) if cert else None,
    }
    checks = {}
    if cert:
        checks["certificate_kills_relators"] = {"passed": check_certificate(p, cert)}
    return computed, checks


def cmd_build_hd(args):
    pkg = sd.build_hd(args.d)
    report = sd.hd_report(pkg)
    cited = report["certificates"][0]["cited"] if report["certificates"] else []
    return report, {}, cited


def cmd_verify_hd(args):
    result = sd.verify_hd(sd.build_hd(args.d), samples=args.samples or 100, seed=args.seed)
    return {"d": args.d}, result["checks"], result["cited"]


def cmd_not_vsp(args):
    cert = sd.not_vsp_certificate(sd.build_hd(args.d), args.i, args.j)
    data = cert.to_dict()
    cited = data.pop("cited")
    checks = {"certificate_kills_relators": {"passed": check_certificate(cert.presentation, cert.certificate)}}
    return data, checks, cited


def cmd_drop_factors(args):
    pkg = sd.build_hd(args.d)
    gens = [pkg.generators[v] for v in sd.F3.vertices]
    if args.pad:
        pad = tuple(sd.TupleElement.identity([sd.F2] * args.pad).coords)
        gens = [sd.TupleElement(g.coords + pad) for g in gens]
    cands = [sd.k_witness(pkg, i).letters for i in range(1, pkg.d + 1)]
    result = sd.drop_trivial_factors(gens, bound=args.bound if args.bound is not None else 4,
                                     names=list(sd.F3.vertices), candidates=cands)
    computed = {
        "kept": list(result.kept),
        "dropped": list(result.dropped),
        "reduced_generators": [str(g) for g in result.reduced_gens],
        "intersection_witnesses": {str(k): v for k, v in result.witnesses.items()},
    }
    return computed, {}


def cmd_bounds(args):
    mode = args.mode or "bound"
    if args.which in ("gamma", "delta"):
        if len(args.n) != 1:
            raise InputError(f"bounds {args.which} takes exactly one n")
        row = _bounds_row(args.n[0], mode)
        value = row.pop("_gamma")
        if args.which == "delta":
            row["delta"] = str(value + row["n"])
        else:
            row["gamma"] = str(value)
        checks = {"closed_form_bound": {"passed": row["closed_form_check"] == "pass"}}
        return row, checks
    if args.which == "table":
        if len(args.n) == 1:
            ns = range(1, args.n[0] + 1)
        elif len(args.n) == 2:
            ns = range(args.n[0], args.n[1] + 1)
        else:
            raise InputError("bounds table takes N or N_LO N_HI")
        rows = []
        for n in ns:
            row = _bounds_row(n, mode)
            row.pop("_gamma")
            rows.append(row)
        bad = [row["n"] for row in rows if row["closed_form_check"] != "pass"]
        return {"rows": rows}, {"closed_form_bound": {"passed": not bad, "witnesses": bad}}
    # optimize
    if len(args.n) != 1:
        raise InputError("bounds optimize takes exactly one n")
    n = args.n[0]
    opt = gs.optimize_tau(n)
    computed = {
        "n": n,
        "feasible": opt.feasible,
        "tau": str(opt.tau) if opt.tau is not None else None,
        "r": opt.r,
        "log2_gamma": opt.exponent,
        "default_log2_gamma": opt.default_exponent,
    }
    if not opt.feasible:
        return computed, {"feasible": {"passed": False, "reason": "infeasible under cap"}}
    checks = {
        "gs_inequality": {"passed": gs.gs_inequality_holds(n, opt.tau, opt.r),
                          "value": str(gs.gs_value(n, opt.tau, opt.r))},
        "not_worse_than_default": {"passed": opt.exponent <= opt.default_exponent},
    }
    return computed, checks


def cmd_hnn(args):
    pkg, _ = _package(args)
    h = pkg.hnn()
    if args.action == "reduce":
        r = he.britton_reduce(h, args.word)
        return {"reduced": str(r), "t_syllables": r.n}, {"reduced_form": {"passed": r.is_reduced(h)}}
    if args.action == "trivial":
        return {"trivial": he.hnn_is_trivial(h, args.word)}, {}
    x = he.psi_embed(pkg, args.word)
    flat = he.psi_flat(pkg, args.word)
    computed = {
        "a_part": format_word(x.a_part),
        "bt_part": str(x.bt_part),
        "flat": format_word(flat),
        "trivial": x.is_trivial(),
    }
    checks = {"flat_agrees": {"passed": he.c_element_to_flat(pkg, x) == flat}}
    return computed, checks


def cmd_build_gd(args):
    _, report = he.build_gd(args.d)
    computed = dict(report["computed"], d=args.d)
    checks = {"clique_at_least_d": {"passed": computed["clique_number_C"] >= args.d}}
    return computed, checks, report["cited"]


def cmd_verify_prop52(args):
    pkg, built = _package(args)
    rep = he.verify_prop52(pkg, samples=args.samples or 200, seed=args.seed)
    computed = {k: v for k, v in rep.items() if k not in ("clauses", "seed")}
    if built is not None:
        computed["d"] = args.d
    checks = dict(rep["clauses"])
    for name in "abcd":
        checks.setdefault(name, {"passed": False, "reason": "not reached"})
    cited = built["cited"] if built else []
    return computed, checks, cited


# -- parser -------------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--graph", help="graph file (vertices:/edge: lines)")
    common.add_argument("--json", action="store_true", help="emit a JSON report")
    common.add_argument("--seed", type=_seed, default=DEFAULT_SEED)
    common.add_argument("--bound", type=int)
    common.add_argument("--mode", choices=["bound", "exact"])
    common.add_argument("--samples", type=_positive)

    parser = _Parser(prog="raag-workbench", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, func, help_text):
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.set_defaults(func=func)
        return p

    add("nf", cmd_nf, "shortlex normal form of a word").add_argument("word")
    add("len", cmd_len, "geodesic length").add_argument("word")
    add("supp", cmd_supp, "support of a word").add_argument("word")
    add("cyc", cmd_cyc, "cyclic reduction g = u t u^-1").add_argument("word")
    add("centralizer", cmd_centralizer, "generators of the centralizer").add_argument("word")
    add("pc", cmd_pc, "parabolic closure of a set of words").add_argument("words", nargs="+")
    add("clique", cmd_clique, "clique number of the graph")
    p = add("stallings", cmd_stallings, "folded automaton of a free-group subgroup")
    p.add_argument("words", nargs="+")
    p.add_argument("--member", action="append", help="test membership of a word (repeatable)")
    add("abel", cmd_abel, "abelianization of a presentation file").add_argument("presentation")
    add("build-hd", cmd_build_hd, "construct H_d").add_argument("d", type=_positive)
    add("verify-hd", cmd_verify_hd, "run the H_d invariants").add_argument("d", type=_positive)
    p = add("not-vsp", cmd_not_vsp, "infinite-quotient certificate for a pair (i, j)")
    p.add_argument("d", type=_positive)
    p.add_argument("i", type=_positive)
    p.add_argument("j", type=_positive)
    p = add("drop-factors", cmd_drop_factors, "project away trivial coordinates of H_d generators")
    p.add_argument("d", type=_positive)
    p.add_argument("--pad", type=int, default=0, help="append this many trivial coordinates")
    p = add("bounds", cmd_bounds, "gamma/delta bounds, tables and tau optimization")
    p.add_argument("which", choices=["gamma", "delta", "table", "optimize"])
    p.add_argument("n", type=_positive, nargs="+")
    p = add("hnn", cmd_hnn, "special HNN-extension words")
    p.add_argument("action", choices=["reduce", "trivial", "embed"])
    p.add_argument("word")
    p.add_argument("--package", help="package description file; default is G_d")
    p.add_argument("--d", type=_positive, default=2, help="d for the default G_d package")
    add("build-gd", cmd_build_gd, "construct G_d and its container").add_argument("d", type=_positive)
    p = add("verify-prop52", cmd_verify_prop52, "direct-factor and quotient-embedding checks")
    p.add_argument("d", type=_positive, nargs="?", default=2)
    p.add_argument("--package", help="package description file; default is G_d")
    return parser


def run(argv=None, out=None, err=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    out = out or sys.stdout
    err = err or sys.stderr
    as_json = "--json" in argv
    try:
        args = build_parser().parse_args(argv)
        result = args.func(args)
        computed, checks = result[0], result[1]
        cited = result[2] if len(result) > 2 else ()
        seed = args.seed if args.command in ("verify-hd", "verify-prop52") else None
        report = make_report(argv, computed, cited, checks, seed=seed)
        failed = _failed(report)
        if failed:
            report["witnesses"] = {name: report["checks"][name] for name in failed}
        emit(report, as_json, out)
        return EXIT_VERIFY if failed else EXIT_OK
    except (InputError, OSError, UnicodeDecodeError) as exc:
        code, kind, message = EXIT_PARSE, "parse error", str(exc)
    except PreconditionError as exc:
        code, kind, message = EXIT_PRECONDITION, "precondition violated", str(exc)
    except (VerificationError, WorkbenchError) as exc:
        code, kind, message = EXIT_VERIFY, "verification failed", str(exc)
    if as_json:
        json.dump({"version": __version__, "command": argv, "error": kind, "message": message}, out)
        out.write("\n")
    else:
        err.write(f"{kind}: {message}\n")
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
