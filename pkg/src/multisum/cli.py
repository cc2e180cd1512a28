"""Command-line front end: ``multisum <command> [options]``.

Every command prints one JSON report on standard output. Exit codes: 0 on
success, 2 on input errors, 3 when an internal cross-check fails.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from dataclasses import asdict, dataclass
from fractions import Fraction

import mpmath

from . import __version__
from .corpus import run_corpus
from .laurent import (LaurentPoly, laurent_from_dict, laurent_reduction, laurent_to_dict, laurent_to_term,
                      torus_critical_points, trace_sequence, verify_psi)
from .polytope import PolytopeError, faces, newton_polytope
from .sequence import compute_sequence, confront_ansatz, estimate_growth
from .term import (as_balanced, eliminate_equalities, term_digest, term_from_dict,
                   term_to_dict, validate)
from .variational import CrossCheckError, SolverConfig, ansatz_set

EXIT_OK, EXIT_INPUT, EXIT_INTERNAL = 0, 2, 3


class InputError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    precision_digits: int = 64
    tol: float = 1e-30
    starts: int | None = None
    seq_n: int = 100
    extrap_order: int = 4
    seed: int = 0

    def __post_init__(self):
        if self.precision_digits < 32:
            raise InputError("precision_digits must be at least 32")
        if self.seq_n < 16:
            raise InputError("seq_n must be at least 16")

    def solver(self) -> SolverConfig:
        return SolverConfig(digits=self.precision_digits, tol=self.tol, starts=self.starts, seed=self.seed)


# formatting


def _rat(q: Fraction) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _cx(z, digits):
    with mpmath.workdps(digits + 5):
        z = mpmath.mpc(z)
        return {"re": mpmath.nstr(z.real, digits), "im": mpmath.nstr(z.imag, digits), "digits": digits}


def _num(x, digits=20) -> str:
    with mpmath.workdps(digits + 5):
        return mpmath.nstr(mpmath.mpf(x), digits)


def _vec(v):
    return [_rat(x) for x in v]


# input


def _read_json(path):
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}:{exc.lineno}:{exc.colno}: malformed JSON: {exc.msg}") from None


def _load_term(path):
    try:
        return term_from_dict(_read_json(path))
    except (ValueError, TypeError) as exc:
        raise InputError(f"{path}: {exc}") from None


def _load_laurent(path) -> LaurentPoly:
    try:
        return laurent_from_dict(_read_json(path))
    except (ValueError, TypeError) as exc:
        raise InputError(f"{path}: {exc}") from None


def _work_term(term):
    """Balanced, equality-free, linearized term plus the global stride."""
    t = as_balanced(term)
    if t.equalities:
        red = eliminate_equalities(t)
        return red.term.linear(), red.stride
    return t.linear(), 1


# commands


def _face_dict(f):
    return {"dim": f.dim, "tight": sorted(f.tight), "vertices": [_vec(v) for v in f.vertices]}


def _polytope_dict(p, with_faces):
    out = {"dim": p.dim,
           "inequalities": [{"const": _rat(c), "coeffs": _vec(v)} for c, v in p.inequalities],
           "vertices": [_vec(v) for v in p.vertices]}
    if with_faces:
        fs = faces(p)
        out["faces"] = [_face_dict(f) for f in fs]
        out["euler_characteristic"] = sum((-1) ** f.dim for f in fs)
    return out


def _ansatz_dict(rep, digits):
    def val(i, v):
        d = {"value": _cx(v, digits)}
        if i in rep.rational_identifications:
            d["exact"] = _rat(rep.rational_identifications[i])
        if i in rep.quadratic_identifications:
            a, b, c = rep.quadratic_identifications[i]
            d["minimal_polynomial"] = {"coeffs": [a, b, c], "heuristic": True}
        return d

    per_face = []
    for fr in rep.per_face:
        per_face.append({
            "face": _face_dict(fr.face), "stride": fr.stride, "nvars": fr.nvars,
            "exact": _rat(fr.exact) if fr.exact is not None else None,
            "complete": fr.complete, "dropped": fr.dropped, "degenerate": fr.degenerate,
            "values": [_cx(v, digits) for v in fr.values],
            "solutions": [{"w": [_cx(x, digits) for x in s.w], "eq_residual": _num(s.eq_residual, 5),
                           "grad_residual": _num(s.grad_residual, 5), "winding": list(s.winding)}
                          for s in fr.solutions],
        })
    return {"s_set": [val(i, v) for i, v in enumerate(rep.s_set)], "stride": rep.stride,
            "candidates": [_cx(v, digits) for v in rep.candidates], "complete": rep.complete,
            "per_face": per_face}


def _estimate_dict(est):
    return {"lambda": _num(est.lambda_, 30), "alpha": None if est.alpha is None else _num(est.alpha, 15),
            "order": est.order, "uncertainty": _num(est.uncertainty, 5),
            "alpha_uncertainty": None if est.alpha_uncertainty is None else _num(est.alpha_uncertainty, 5),
            "method": est.method, "stride": est.stride, "flags": list(est.flags)}


def cmd_validate(args, cfg):
    term = _load_term(args.file)
    rep = validate(as_balanced(term))
    return {"ok": rep.ok, "violations": rep.violations}, term_digest(term)


def cmd_polytope(args, cfg):
    term = _load_term(args.file)
    t, stride = _work_term(term)
    return {"ok": True, "stride": stride, "polytope": _polytope_dict(newton_polytope(t), args.faces)}, \
        term_digest(term)


def cmd_ansatz(args, cfg):
    term = _load_term(args.file)
    rep = ansatz_set(term, cfg.solver())
    return dict(ok=True, **_ansatz_dict(rep, cfg.precision_digits)), term_digest(term)


def cmd_sequence(args, cfg):
    term = _load_term(args.file)
    tab = compute_sequence(term, args.n if args.n is not None else cfg.seq_n)
    return {"ok": True, **tab.to_dict()}, tab.term_hash


def cmd_estimate(args, cfg):
    term = _load_term(args.file)
    tab = compute_sequence(term, args.n if args.n is not None else cfg.seq_n)
    est = estimate_growth(tab, args.order if args.order is not None else cfg.extrap_order)
    return {"ok": True, "n": tab.n, "estimate": _estimate_dict(est)}, tab.term_hash


def cmd_check(args, cfg):
    term = _load_term(args.file)
    rep = ansatz_set(term, cfg.solver())
    tab = compute_sequence(term, args.n if args.n is not None else cfg.seq_n)
    est = estimate_growth(tab, args.order if args.order is not None else cfg.extrap_order)
    conf = confront_ansatz(est, rep)
    d = cfg.precision_digits
    match = {"matched": _cx(conf.matched, d), "singularity": _num(conf.singularity, 30),
             "relative_error": _num(conf.relative_error, 5), "is_min_modulus": conf.is_min_modulus,
             "min_modulus": _cx(conf.min_modulus, d), "compared_against": conf.compared_against}
    return {"ok": True, "ansatz": _ansatz_dict(rep, d), "n": tab.n, "estimate": _estimate_dict(est),
            "match": match}, tab.term_hash


def cmd_laurent(args, cfg):
    F = _load_laurent(args.file)
    digest = term_digest_laurent(F)
    d = cfg.precision_digits
    if args.action == "trace":
        n = args.n if args.n is not None else 12
        return {"ok": True, "n": n, "values": [_rat(v) for v in trace_sequence(F, n)]}, digest
    if args.action == "term":
        t = laurent_to_term(F)
        red = laurent_reduction(F)
        return {"ok": True, "term": term_to_dict(t), "reduced": term_to_dict(red.term),
                "stride": red.stride, "free": list(red.free),
                "embedding": {"origin": list(red.embedding.origin), "step": list(red.embedding.step),
                              "basis": [list(c) for c in red.embedding.basis]}}, digest
    sc = cfg.solver()
    if args.action == "critical":
        pts = torus_critical_points(F, sc)
        return {"ok": True, "points": [{"u": [_cx(x, d) for x in u], "value": _cx(v, d)} for u, v in pts]}, digest
    rep = verify_psi(F, sc)
    pairs = [{"u": [_cx(x, d) for x in p.u], "value": _cx(p.value, d), "w": [_cx(x, d) for x in p.w],
              "simplex_residual": _num(p.simplex_residual, 5),
              "constraint_residual": _num(p.constraint_residual, 5),
              "variational_residual": _num(p.variational_residual, 5),
              "matched_candidate": None if p.matched_candidate is None else _cx(p.matched_candidate, d),
              "match_error": None if p.match_error is None else _num(p.match_error, 5),
              "matched_solution": p.matched_solution} for p in rep.pairs]
    out = {"ok": rep.ok, "stride": rep.stride, "max_residual": _num(rep.max_residual, 5),
           "complete": rep.complete, "pairs": pairs, "candidates": [_cx(c, d) for c in rep.candidates],
           "unmatched_candidates": [_cx(c, d) for c in rep.unmatched_candidates],
           "unmatched_solutions": [[_cx(x, d) for x in s] for s in rep.unmatched_solutions],
           "note": rep.note}
    if not rep.ok:
        raise _ReportFailure(out, digest)
    return out, digest


def term_digest_laurent(F: LaurentPoly) -> str:
    blob = json.dumps(laurent_to_dict(F), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def _print_table(rep, stream):
    width = max(len(c["check"]) for r in rep["results"] for c in r["checks"])
    for r in rep["results"]:
        for c in r["checks"]:
            mark = "PASS" if c["pass"] else "FAIL"
            stream.write(f"{mark}  {r['name']:<17} {c['check']:<{width}}  {c['detail']}\n".rstrip() + "\n")


def cmd_corpus(args, cfg):
    rep = run_corpus(cfg.solver(), cfg.seq_n, cfg.extrap_order)
    _print_table(rep, sys.stderr)
    out = {"ok": rep["passed"], **rep}
    if not rep["passed"]:
        raise _ReportFailure(out, None)
    return out, None


class _ReportFailure(Exception):
    def __init__(self, report, digest):
        super().__init__("cross-check failed")
        self.report, self.digest = report, digest


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="multisum", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"multisum {__version__}")
    p.add_argument("--digits", type=int, default=None, help="working precision (default 64)")
    p.add_argument("--tol", type=float, default=1e-30, help="equation residual tolerance")
    p.add_argument("--starts", type=int, default=None, help="multi-start count (default 50 x Bezout)")
    p.add_argument("--seed", type=int, default=0, help="seed for multi-start Newton")
    p.add_argument("--seq-n", type=int, default=100, help="default sequence length")
    p.add_argument("--order", dest="g_order", type=int, default=4, help="default extrapolation order")
    sub = p.add_subparsers(dest="command", required=True, metavar="command")

    s = sub.add_parser("validate", help="check the balance condition")
    s.add_argument("file")
    s = sub.add_parser("polytope", help="Newton polytope (and faces)")
    s.add_argument("file")
    s.add_argument("--faces", action="store_true")
    s = sub.add_parser("ansatz", help="full ansatz set report")
    s.add_argument("file")
    for name, hlp in (("sequence", "exact sequence a_0..a_N"), ("estimate", "ratio-method growth"),
                      ("check", "ansatz, sequence and confrontation")):
        s = sub.add_parser(name, help=hlp)
        s.add_argument("file")
        s.add_argument("--n", type=int, default=None)
        if name != "sequence":
            s.add_argument("--order", type=int, default=None)
    s = sub.add_parser("laurent", help="Laurent polynomial pipeline")
    s.add_argument("action", choices=["trace", "term", "critical", "verify"])
    s.add_argument("file")
    s.add_argument("--n", type=int, default=None)
    sub.add_parser("corpus", help="run the built-in golden examples")
    return p


COMMANDS = {"validate": cmd_validate, "polytope": cmd_polytope, "ansatz": cmd_ansatz,
            "sequence": cmd_sequence, "estimate": cmd_estimate, "check": cmd_check,
            "laurent": cmd_laurent, "corpus": cmd_corpus}


def _config(args) -> RunConfig:
    digits = args.digits
    if digits is None:
        env = os.environ.get("MULTISUM_PRECISION")
        try:
            digits = int(env) if env else 64
        except ValueError:
            raise InputError(f"MULTISUM_PRECISION must be an integer, got {env!r}") from None
    return RunConfig(digits, args.tol, args.starts, args.seq_n, args.g_order, args.seed)


def _emit(command, cfg, digest, body, stream):
    config = None
    if cfg:
        config = asdict(cfg)
        config["tol"] = repr(cfg.tol)
    report = {"command": command, "version": __version__, "input_digest": digest, "config": config}
    report.update(body)
    stream.write(json.dumps(report, indent=2) + "\n")


def main(argv=None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0) and EXIT_INPUT
    cfg = None
    try:
        cfg = _config(args)
        body, digest = COMMANDS[args.command](args, cfg)
        _emit(args.command, cfg, digest, body, stdout)
        return EXIT_OK
    except InputError as exc:
        print(f"multisum: error: {exc}", file=sys.stderr)
        _emit(args.command, cfg, None, {"ok": False, "error": str(exc)}, stdout)
        return EXIT_INPUT
    except (PolytopeError, ValueError) as exc:
        print(f"multisum: error: {exc}", file=sys.stderr)
        _emit(args.command, cfg, None, {"ok": False, "error": str(exc)}, stdout)
        return EXIT_INPUT
    except _ReportFailure as exc:
        _emit(args.command, cfg, exc.digest, exc.report, stdout)
        return EXIT_INTERNAL
    except CrossCheckError as exc:
        print(f"multisum: cross-check failed: {exc}", file=sys.stderr)
        _emit(args.command, cfg, None, {"ok": False, "error": str(exc)}, stdout)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
