"""Command-line front end.

    qcsurf build          --preset cantor --depth 4 [--dot-out tree.dot]
    qcsurf normalize      --in tree.json
    qcsurf label          --preset flute --depth 10 [--t-star-length 2.0]
    qcsurf slice N        --preset flute --depth 10
    qcsurf pentagon-scan  [--a-values 1.1,2,5] [--plot scan.png]
    qcsurf certify        --preset flute --depth 20 -K 5 --horizon 15

JSON goes to ``--json-out`` (or stdout).  Exit codes: 0 success, 2 refused
certificate (K < N), 3 failed inequality, 64 bad usage, 65 bad or too
shallow input.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
from pathlib import Path

from . import _jsonio
from .certificate import CertificateError, report, verify_non_wandering
from .core_tree import CoreTree, CoreTreeError, classify_ends, preset, truncate, validate
from .hyp_geom import DEFAULT_A_GRID, GeometryError, pentagon_scan, pentagon_threshold
from .metric import LabelingError, MetricComplex, label_lengths
from .pants_complex import TruncationTooShallow, build, exhaustion_sequence, iter_exhaustion
from .tree_surgery import find_exterior_trees, normalize

EX_OK = 0
EX_REFUSED = 2
EX_FAILED = 3
EX_USAGE = 64
EX_DATAERR = 65


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EX_USAGE, f"{self.prog}: error: {message}\n")


def _positive_int(text):
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return v


def _positive_float(text):
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _float_list(text):
    try:
        return tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def make_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="qcsurf", description="Core trees, pants complexes and non-wandering certificates.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser, required=True)

    src = _Parser(add_help=False)
    src.add_argument("--preset", default="cantor", help="cantor, flute, flute_with_genus, cantor_with_genus")
    src.add_argument("--genus", type=int, default=None, help="genus g >= 1 (turns cantor/flute into the genus preset)")
    src.add_argument("--depth", type=_positive_int, default=6, help="truncation depth (default 6)")
    src.add_argument("--in", dest="input", default=None, help="read a tree or labelled complex from JSON")
    src.add_argument("--json-out", default=None, help="write JSON here instead of stdout")

    lab = _Parser(add_help=False)
    lab.add_argument("--normalize", action="store_true", help="remove exterior trees before building")
    lab.add_argument("--t-star-length", type=_positive_float, default=1.0, help="length of every cuff in the genus region")

    b = sub.add_parser("build", parents=[src], help="truncate a preset and validate it")
    b.add_argument("--dot-out", default=None, help="write the tree as DOT")

    sub.add_parser("normalize", parents=[src], help="remove exterior trees, with a trace")

    lb = sub.add_parser("label", parents=[src, lab], help="factorial cuff labelling")
    lb.add_argument("--dot-out", default=None, help="write the labelled dual graph as DOT")

    s = sub.add_parser("slice", parents=[src, lab], help="exhaustion slices R_1..R_n")
    s.add_argument("n", type=int)

    ps = sub.add_parser("pentagon-scan", help="sweep the ideal pentagon inequality")
    ps.add_argument("--a-values", type=_float_list, default=DEFAULT_A_GRID)
    ps.add_argument("--c-step", type=_positive_float, default=0.5)
    ps.add_argument("--c-span", type=_positive_float, default=30.0)
    ps.add_argument("--tol", type=_positive_float, default=1e-9)
    ps.add_argument("--csv-out", default=None, help="write CSV here instead of stdout")
    ps.add_argument("--plot", default=None, help="render the slack curves to an image file")

    c = sub.add_parser("certify", parents=[src, lab], help="non-wandering certificate")
    c.add_argument("-K", type=float, required=True, help="quasiconformal constant K >= 1")
    c.add_argument("--horizon", type=int, default=None, help="last row (default: as deep as the truncation allows)")
    c.add_argument("--a0", type=_positive_float, default=None, help="pentagon threshold (default: from the sweep)")
    c.add_argument("--type1", choices=("finite", "infinite"), default=None)
    c.add_argument("--text-out", default=None, help="write the plain-text report here")
    c.add_argument("--plot", default=None, help="render the ledger margins to an image file")
    return p


# ---------------------------------------------------------------------------


def _spec(args):
    name = args.preset
    try:
        if args.genus is not None:
            if name in ("cantor", "flute"):
                name += "_with_genus"
            return preset(name, g=args.genus)
        if name.endswith("_with_genus"):
            return preset(name, g=1)
        return preset(name)
    except CoreTreeError as exc:
        raise UsageError(str(exc)) from None


def _load(path):
    """Tree or labelled complex, depending on what the file holds."""
    data = _jsonio.load(path)
    if not isinstance(data, dict):
        raise CoreTreeError(f"{path}: expected a JSON object")
    if "lengths" in data:
        return MetricComplex.from_json(data)
    if "complex" in data and "lengths" in data["complex"]:
        return MetricComplex.from_json(data["complex"])
    if "tree" in data and "vertices" not in data:
        return CoreTree.from_json(data["tree"])
    return CoreTree.from_json(data)


def _tree(args) -> CoreTree:
    if args.input:
        obj = _load(args.input)
        return obj.complex.tree if isinstance(obj, MetricComplex) else obj
    return truncate(_spec(args), args.depth)


def _metric(args) -> MetricComplex:
    if args.input:
        obj = _load(args.input)
        if isinstance(obj, MetricComplex):
            return obj
        tree = obj
    else:
        tree = truncate(_spec(args), args.depth)
    if getattr(args, "normalize", False):
        tree, _ = normalize(tree)
    cx = build(tree)
    return label_lengths(cx, args.t_star_length if cx.t_star_cuffs else None)


def _emit(obj, args, out):
    if getattr(args, "json_out", None):
        _jsonio.dump(obj, args.json_out)
    else:
        out.write(_jsonio.dumps(obj))
        out.write("\n")


def _cmd_build(args, out):
    tree = _tree(args)
    rep = validate(tree)
    doc = {
        "tree": tree.to_json(),
        "valid": rep.ok,
        "violations": rep.messages(),
        "dot": tree.to_dot(),
    }
    if rep.ok:
        doc["ends"] = classify_ends(tree).to_json()
    if args.dot_out:
        Path(args.dot_out).write_text(tree.to_dot())
    _emit(doc, args, out)
    return EX_OK if rep.ok else EX_DATAERR


def _cmd_normalize(args, out):
    tree = _tree(args)
    new, trace = normalize(tree)
    doc = {
        "tree": new.to_json(),
        "trace": trace.to_json(),
        "exterior_trees_before": len(find_exterior_trees(tree)),
        "exterior_trees_after": len(find_exterior_trees(new)),
    }
    _emit(doc, args, out)
    return EX_OK


def _cmd_label(args, out):
    mc = _metric(args)
    if args.dot_out:
        Path(args.dot_out).write_text(mc.complex.to_dot(mc.lengths))
    _emit(mc.to_json(), args, out)
    return EX_OK


def _cmd_slice(args, out):
    if args.n < 1:
        raise UsageError("slice index starts at 1")
    mc = _metric(args)
    slices = exhaustion_sequence(mc.complex, args.n)
    rows = []
    for sl in slices:
        row = sl.to_json()
        row["frontier_labels"] = {c: mc.lengths[c].to_json() for c in sl.frontier}
        rows.append(row)
    _emit({"case": mc.complex.case, "e1": mc.complex.e1, "slices": rows}, args, out)
    return EX_OK


def _cmd_pentagon_scan(args, out):
    rows = pentagon_scan(args.a_values, args.c_step, args.c_span)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["a", "c", "d", "slack"])
    for r in rows:
        w.writerow([format(x, ".17g") for x in (r.a, r.c, r.d, r.slack)])
    if args.csv_out:
        Path(args.csv_out).write_text(buf.getvalue())
    else:
        out.write(buf.getvalue())
    if args.plot:
        from .plotting import plot_pentagon_scan

        plot_pentagon_scan(rows, args.plot, args.tol)
    a0 = pentagon_threshold(rows, args.tol)
    worst = min(r.slack for r in rows)
    print(f"threshold a0 = {a0}; min slack = {worst:.3e}", file=sys.stderr)
    return EX_OK if worst >= -args.tol else EX_FAILED


def _max_horizon(cx) -> int:
    last = 0
    try:
        for sl in iter_exhaustion(cx):
            last = sl.n
    except TruncationTooShallow:
        pass
    return last - 1


def _cmd_certify(args, out):
    mc = _metric(args)
    horizon = args.horizon
    if horizon is None:
        horizon = _max_horizon(mc.complex)
    cert = verify_non_wandering(mc, args.K, horizon, a0=args.a0, type1=args.type1)
    rep = report(cert)
    _emit(rep.data, args, out)
    if args.text_out:
        Path(args.text_out).write_text(rep.text)
    if args.plot and cert.ledger:
        from .plotting import plot_certificate

        plot_certificate(cert, args.plot)
    if not cert.valid:
        print(f"qcsurf: certificate {cert.status}: {cert.reason}", file=sys.stderr)
    return cert.exit_code


_COMMANDS = {
    "build": _cmd_build,
    "normalize": _cmd_normalize,
    "label": _cmd_label,
    "slice": _cmd_slice,
    "pentagon-scan": _cmd_pentagon_scan,
    "certify": _cmd_certify,
}


def run(argv=None, out=None) -> int:
    """Parse ``argv`` and run one subcommand; returns the exit code."""
    out = out if out is not None else sys.stdout
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args, out)
    except TruncationTooShallow as exc:
        print(f"qcsurf: truncation too shallow: {exc}", file=sys.stderr)
        return EX_DATAERR
    except UsageError as exc:
        print(f"qcsurf: {exc}", file=sys.stderr)
        return EX_USAGE
    except CertificateError as exc:
        print(f"qcsurf: {exc}", file=sys.stderr)
        return EX_USAGE
    except (CoreTreeError, LabelingError, GeometryError, OSError, ValueError) as exc:
        print(f"qcsurf: {exc}", file=sys.stderr)
        return EX_DATAERR


def main(argv=None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
