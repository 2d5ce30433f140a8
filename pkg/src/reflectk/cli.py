"""Command-line interface: ``reflectk {gen,enumerate,verify,orbit,report}``.

Exit codes: 0 success or verification pass, 1 verification failure, 2 usage
or input error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from typing import Dict, List, Optional

from reflectk import families as F
from reflectk.equivalence import FLAVORS, MoveError, apply_moves, move_from_json, random_moves
from reflectk.expr import ExpressionError, parse_value
from reflectk.linalg import Mat, MatrixFormatError, SingularMatrixError
from reflectk.scalar import ExpressionTooLarge, PoleError, set_max_terms
from reflectk.verify import EQUATIONS, MODES, check, check_CtRE, check_RE

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _write(text: str, path: Optional[str]) -> None:
    """Write ``text`` to ``path`` atomically, or to stdout."""
    if not path:
        sys.stdout.write(text)
        return
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".reflectk-")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _dump(doc) -> str:
    return json.dumps(doc, indent=2) + "\n"


def _read_json(path: str):
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None


def _read_matrix(path: str) -> Mat:
    doc = _read_json(path)
    if isinstance(doc, dict) and "matrix" in doc and "dim" not in doc:
        doc = doc["matrix"]
    try:
        return Mat.from_json(doc)
    except MatrixFormatError as exc:
        raise UsageError(f"{path}: {exc}") from None


def _bindings(items: Optional[List[str]]) -> Dict[str, object]:
    out = {}
    for item in items or []:
        if "=" not in item:
            raise UsageError(f"--set expects name=value, got {item!r}")
        name, value = item.split("=", 1)
        try:
            out[name.strip()] = parse_value(value)
        except ExpressionError as exc:
            raise UsageError(f"--set {name}: {exc}") from None
    return out


def _parse_sigma(text: Optional[str], N: int) -> tuple:
    if not text:
        return tuple(range(1, N + 1))
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError:
        raise UsageError(f"--sigma expects comma-separated integers, got {text!r}") from None


def _parse_eps(text: Optional[str]) -> frozenset:
    if not text:
        return frozenset()
    out = set()
    for part in text.split(","):
        try:
            a, b = part.split("-")
            out.add((int(a), int(b)))
        except ValueError:
            raise UsageError(f"--eps expects entries like 1-4,3-2, got {part!r}") from None
    return frozenset(out)


def _need(args, *names):
    for n in names:
        if getattr(args, n) is None:
            raise UsageError(f"--{n} is required for family {args.family}")


# ---------------------------------------------------------------------------
# verbs


def cmd_gen(args) -> int:
    N = args.n
    if args.family == "sym":
        _need(args, "l", "r")
        label = F.SymClass(N, args.l, args.r)
    elif args.family == "tri":
        _need(args, "m")
        label = F.TriClass(N, args.m, _parse_sigma(args.sigma, N), _parse_eps(args.eps))
    else:
        _need(args, "kind")
        label = F.TwistedClass(N, args.kind)
    K = F.build(label)
    binds = _bindings(args.set)
    if binds:
        K = K.subst(binds)
    doc = K.to_json()
    doc["label"] = label.to_json()
    _write(_dump(doc), args.out)
    return EXIT_OK


def cmd_enumerate(args) -> int:
    N = args.n
    if N < 2:
        raise UsageError("--n must be at least 2")
    classes = F.enumerate_all(N)
    doc = {
        "N": N,
        "counts": {k: len(v) for k, v in classes.items()},
        "classes": {k: [c.to_json() for c in v] for k, v in classes.items()},
    }
    _write(_dump(doc), args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    K = _read_matrix(args.file)
    rep = check(K, args.equation, args.mode, args.samples, args.seed)
    doc = rep.to_json()
    _write(_dump(doc), args.out)
    return EXIT_OK if rep.passed else EXIT_FAIL


def _flavor_check(K: Mat, flavor: str, mode: str, samples: int, seed: int):
    fn = check_RE if flavor == "re" else check_CtRE
    return fn(K, mode, samples, seed)


def cmd_orbit(args) -> int:
    K = _read_matrix(args.file)
    if args.moves and args.random_depth is not None:
        raise UsageError("give either --moves or --random-depth, not both")
    if args.moves:
        doc = _read_json(args.moves)
        if isinstance(doc, dict):
            doc = doc.get("moves", [])
        if not isinstance(doc, list):
            raise UsageError("moves file must hold a list of moves")
        try:
            moves = [move_from_json(m) for m in doc]
        except (MoveError, MatrixFormatError) as exc:
            raise UsageError(f"{args.moves}: {exc}") from None
    elif args.random_depth is not None:
        if args.random_depth < 0:
            raise UsageError("--random-depth must be non-negative")
        moves = random_moves(K.n, args.flavor, args.random_depth, args.seed)
    else:
        moves = []
    for mv in moves:
        fl = getattr(mv, "flavor", None)
        if fl is not None and fl != args.flavor:
            raise UsageError(f"move {mv.to_json()} has flavor {fl}, expected {args.flavor}")
    if not args.skip_input_check:
        pre = _flavor_check(K, args.flavor, args.mode, args.samples, args.seed)
        if not pre.passed:
            sys.stderr.write(f"input does not solve the {args.flavor} equation\n")
            _write(_dump({"input_check": pre.to_json()}), args.out)
            return EXIT_FAIL
    out = apply_moves(K, moves)
    rep = _flavor_check(out, args.flavor, args.mode, args.samples, args.seed)
    doc = out.to_json()
    doc["moves"] = [m.to_json() for m in moves]
    doc["verify"] = rep.to_json()
    if args.save_moves:
        _write(_dump({"moves": doc["moves"], "seed": args.seed}), args.save_moves)
    _write(_dump(doc), args.out)
    return EXIT_OK if rep.passed else EXIT_FAIL


def cmd_report(args) -> int:
    N = args.n
    classes = F.enumerate_all(N)
    rows = []
    ok = True
    for fam, labels in classes.items():
        for label in labels:
            K = F.build(label)
            eq = "ctre" if fam == "twisted" else "re"
            rep = check(K, eq, args.mode, args.samples, args.seed)
            ok &= rep.passed
            rows.append({"label": label.to_json(), "equation": eq, "pass": rep.passed})
    doc = {"N": N, "counts": {k: len(v) for k, v in classes.items()}, "results": rows, "pass": ok}
    _write(_dump(doc), args.out)
    return EXIT_OK if ok else EXIT_FAIL


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="reflectk", description="Exact K-matrix toolkit for the type A reflection equations.")
    sub = p.add_subparsers(dest="verb", required=True)

    def common_out(sp):
        sp.add_argument("--out", help="write JSON here (atomically) instead of stdout")

    def common_mode(sp):
        sp.add_argument("--mode", choices=MODES, default="symbolic")
        sp.add_argument("--samples", type=int, default=8)
        sp.add_argument("--seed", type=int, default=0)

    g = sub.add_parser("gen", help="build a canonical solution")
    g.add_argument("--family", choices=("sym", "tri", "twisted"), required=True)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--l", type=int)
    g.add_argument("--r", type=int)
    g.add_argument("--m", type=int)
    g.add_argument("--sigma", help="involution images, e.g. 4,2,3,1")
    g.add_argument("--eps", help="selected off-diagonal positions, e.g. 1-4,3-2")
    g.add_argument("--kind", choices=[k.value for k in F.TwistedKind])
    g.add_argument("--set", nargs="+", metavar="NAME=VALUE", help="substitute values")
    common_out(g)
    g.set_defaults(func=cmd_gen)

    e = sub.add_parser("enumerate", help="list class labels")
    e.add_argument("--n", type=int, required=True)
    common_out(e)
    e.set_defaults(func=cmd_enumerate)

    v = sub.add_parser("verify", help="check a matrix against an equation")
    v.add_argument("file")
    v.add_argument("--equation", choices=EQUATIONS, default="re")
    common_mode(v)
    common_out(v)
    v.set_defaults(func=cmd_verify)

    o = sub.add_parser("orbit", help="apply equivalence moves")
    o.add_argument("file")
    o.add_argument("--flavor", choices=FLAVORS, default="re")
    o.add_argument("--moves", help="JSON list of moves to replay")
    o.add_argument("--random-depth", type=int)
    o.add_argument("--save-moves", help="write the moves used to this file")
    o.add_argument("--skip-input-check", action="store_true")
    common_mode(o)
    common_out(o)
    o.set_defaults(func=cmd_orbit)

    r = sub.add_parser("report", help="verify every canonical class at rank N")
    r.add_argument("--n", type=int, required=True)
    common_mode(r)
    common_out(r)
    r.set_defaults(func=cmd_report)
    return p


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    if os.environ.get("REFLECTK_MAX_TERMS"):
        try:
            set_max_terms(int(os.environ["REFLECTK_MAX_TERMS"]))
        except ValueError:
            sys.stderr.write("reflectk: REFLECTK_MAX_TERMS must be an integer\n")
            return EXIT_USAGE
    if getattr(args, "samples", 1) < 1:
        sys.stderr.write("reflectk: --samples must be at least 1\n")
        return EXIT_USAGE
    try:
        return args.func(args)
    except (UsageError, F.InvalidLabel, MoveError, MatrixFormatError, ExpressionError) as exc:
        sys.stderr.write(f"reflectk: {exc}\n")
        return EXIT_USAGE
    except (ExpressionTooLarge, SingularMatrixError, PoleError, ValueError) as exc:
        sys.stderr.write(f"reflectk: {type(exc).__name__}: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
