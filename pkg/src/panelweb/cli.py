"""Command-line interface.

Results go to stdout (or --out files), diagnostics to stderr. Exit codes:
0 success, 2 bad input, 3 a combination failed its precise-invariance
check, 4 too few points for a dimension estimate.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import warnings
from typing import Dict, List, Optional, Sequence

from . import __version__
from .families import FAMILIES, build_family, family_table
from .handlebody import (
    HandleError,
    InvariantReport,
    from_spec_json,
    invariants,
    presentation_of,
    to_spec_json,
)
from .intlinalg import UnknownGenerator
from .kleinian import (
    Disk,
    GroupError,
    GroupSpec,
    HalfPlane,
    PreciseInvarianceFailed,
    circle_from_json,
    complex_twist,
    cyclic,
    dumps,
    first_combination,
    fuchsian_schottky,
    group_from_json,
    group_to_json,
)
from .limitset import (
    BadDimension,
    DegenerateScales,
    ElementaryGroup,
    TooFewPoints,
    box_counting_dimension,
    dimension_threshold_check,
    limit_set_sample,
    read_points_csv,
    sample_to_csv,
    scalar_sign,
)
from .moebius import Circle, Line, MoebiusError, circle_through_line
from .panelled import PanelledLayout, panelled_sigma12
from .words import WordSyntaxError

EXIT_OK, EXIT_INPUT, EXIT_WITNESS, EXIT_FEW_POINTS = 0, 2, 3, 4
DEFAULT_DEPTH_CAP = 10


class CLIError(Exception):
    def __init__(self, message: str, code: int = EXIT_INPUT):
        super().__init__(message)
        self.code = code


def _read_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise CLIError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise CLIError(f"{path} is not valid JSON: {exc}") from None


def _write(text: str, path: Optional[str]) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="") as fh:
            fh.write(text)


# -- handle decompositions -----------------------------------------------------------

def _decomposition(args):
    if args.spec is not None:
        if args.family is not None:
            raise CLIError("give either --family or --spec, not both")
        hd, form = from_spec_json(_read_json(args.spec))
        return hd, form, None
    if args.family is None:
        raise CLIError("one of --family or --spec is required")
    rec = build_family(args.family, g=args.g, n=args.n)
    return rec.decomposition, rec.asserted_form, rec


def cmd_invariants(args) -> int:
    hd, form, rec = _decomposition(args)
    report = invariants(hd, form, args.dim)
    if args.format == "json":
        out = report.to_json()
        out["decomposition"] = to_spec_json(hd, form)
        _write(dumps(out), None)
    else:
        head = []
        if rec is not None:
            params = ", ".join(f"{k}={v}" for k, v in rec.params)
            head.append(f"family              {rec.name}" + (f" ({params})" if params else ""))
        _write("\n".join(head + report.table_lines()) + "\n", None)
    return EXIT_OK


def cmd_presentation(args) -> int:
    hd, form, _ = _decomposition(args)
    if args.format == "json":
        _write(dumps(to_spec_json(hd, form)), None)
    else:
        _write(str(presentation_of(hd)) + "\n", None)
    return EXIT_OK


def parse_ranges(text: str) -> Dict[str, range]:
    """'g=1..10,n=1..3' -> {'g': range(1, 11), 'n': range(1, 4)}."""
    out = {}
    for part in filter(None, (p.strip() for p in text.split(","))):
        if "=" not in part:
            raise CLIError(f"bad range {part!r}: expected name=lo..hi")
        name, spec = (s.strip() for s in part.split("=", 1))
        try:
            if ".." in spec:
                lo, hi = (int(s) for s in spec.split("..", 1))
            else:
                lo = hi = int(spec)
        except ValueError:
            raise CLIError(f"bad range {part!r}: bounds must be integers") from None
        if hi < lo:
            raise CLIError(f"empty range {part!r}")
        out[name] = range(lo, hi + 1)
    return out


def cmd_family_table(args) -> int:
    ranges = parse_ranges(args.range) if args.range else {}
    rows, verdicts = family_table(args.family, ranges)
    params = FAMILIES[args.family].params
    if args.format == "json":
        obj = {
            "family": args.family,
            "rows": [
                {**dict(r.params), "b1": r.b1, "b2": r.b2, "chi": r.chi, "torsion": sorted(r.torsion),
                 "einstein_obstructed": r.einstein_obstructed, "matches_closed_forms": r.matches_closed_forms}
                for r in rows
            ],
            "monotonicity": [
                {"parameter": v.parameter, "chi_strictly_decreasing": v.chi_strictly_decreasing,
                 "b1_strictly_increasing": v.b1_strictly_increasing,
                 "obstructed_when_chi_negative": v.obstructed_when_chi_negative}
                for v in verdicts
            ],
        }
        _write(dumps(obj), None)
        return EXIT_OK
    cols = list(params) + ["b1", "b2", "chi", "torsion", "obstructed", "closed_forms"]
    body = [
        [str(v) for _, v in r.params]
        + [str(r.b1), str(r.b2), str(r.chi), " ".join(map(str, sorted(r.torsion))) or "-",
           "yes" if r.einstein_obstructed else "no", "ok" if r.matches_closed_forms else "MISMATCH"]
        for r in rows
    ]
    footer = [
        f"# along {v.parameter}: chi strictly decreasing: {_yn(v.chi_strictly_decreasing)}; "
        f"b1 strictly increasing: {_yn(v.b1_strictly_increasing)}; "
        f"obstructed whenever chi < 0: {_yn(v.obstructed_when_chi_negative)}"
        for v in verdicts
    ]
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(cols)
        w.writerows(body)
        _write(buf.getvalue() + "".join(line + "\n" for line in footer), None)
        return EXIT_OK
    widths = [max(len(c), *(len(row[i]) for row in body)) for i, c in enumerate(cols)]
    lines = ["  ".join(c.rjust(wd) for c, wd in zip(cols, widths))]
    lines += ["  ".join(x.rjust(wd) for x, wd in zip(row, widths)) for row in body]
    _write("\n".join(lines + footer) + "\n", None)
    return EXIT_OK


def _yn(b: bool) -> str:
    return "yes" if b else "no"


# -- groups -----------------------------------------------------------------------------

def _load_group(path: str) -> GroupSpec:
    return group_from_json(_read_json(path))


def cmd_group(args) -> int:
    if args.action == "build":
        G = _load_group(args.spec)
        if args.combine:
            G2 = _load_group(args.combine)
            C, B1, B2 = _separator(args)
            G = first_combination(G, G2, args.shared, C, B1, B2, depth=args.check_depth)
        elif args.shared or args.line is not None or args.circle:
            raise CLIError("--shared/--line/--circle only make sense with --combine")
    elif args.action == "schottky":
        G = fuchsian_schottky(args.g, args.n, args.radius, args.gap)
    elif args.action == "cyclic":
        G = cyclic(args.multiplier, args.label)
    else:  # panelled
        layout = PanelledLayout(kappa=args.kappa)
        G = panelled_sigma12(layout, depth=args.check_depth)
    if args.twist:
        label, p, q = args.twist
        if args.twist_lambda is None:
            raise CLIError("--twist needs --lambda")
        try:
            p, q = int(p), int(q)
        except ValueError:
            raise CLIError("--twist expects LABEL P Q with integer P, Q") from None
        if label not in G:
            raise CLIError(f"no generator labelled {label!r}")
        G = complex_twist(G, label, p, q, args.twist_lambda)
    _write(dumps(group_to_json(G)), args.out)
    return EXIT_OK


def _separator(args):
    if (args.line is None) == (not args.circle):
        raise CLIError("--combine needs exactly one of --line ANGLE or --circle RE IM R")
    if args.line is not None:
        C = circle_through_line(math.radians(args.line))
        B1, B2 = HalfPlane(C, True), HalfPlane(C, False)
    else:
        x, y, r = args.circle
        C = Circle(complex(x, y), r)
        B1, B2 = Disk(C, False), Disk(C, True)
    if args.swap_sides:
        B1, B2 = B2, B1
    return C, B1, B2


def _seeds(args):
    if not args.seed:
        return None
    return [complex(x, y) for x, y in args.seed]


def _sample(args):
    if args.depth > args.max_depth:
        raise CLIError(f"depth {args.depth} exceeds the cap {args.max_depth} (raise it with --max-depth)")
    G = _load_group(args.group)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", ElementaryGroup)
        sample = limit_set_sample(G, args.depth, _seeds(args))
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    return sample


def cmd_limitset(args) -> int:
    sample = _sample(args)
    _write(sample_to_csv(sample), args.out)
    return EXIT_OK


def cmd_dimension(args) -> int:
    sources = [args.d is not None, args.input is not None, args.group is not None]
    if sum(sources) != 1:
        raise CLIError("give exactly one of --d, --in or --group")
    if args.d is not None:
        out = {"d": args.d}
    else:
        if args.input is not None:
            try:
                with open(args.input) as fh:
                    pts = read_points_csv(fh.read())
            except OSError as exc:
                raise CLIError(f"cannot read {args.input}: {exc.strerror}") from None
        else:
            if args.depth is None:
                raise CLIError("--group needs --depth")
            pts = _sample(args).as_array()
        scales = None
        if args.scales:
            try:
                scales = [float(s) for s in args.scales.split(",")]
            except ValueError:
                raise CLIError("--scales must be a comma-separated list of numbers") from None
        est = box_counting_dimension(pts, scales, args.n_scales, args.ratio)
        out = est.to_json()
        out["threshold"] = dimension_threshold_check(est.d)
    if args.sign:
        s = scalar_sign(out["d"], args.n)
        out["sign"] = s.sign
        out["quantity"] = s.quantity
    _write(dumps(out), None)
    return EXIT_OK


# -- parser ---------------------------------------------------------------------------------

def _family_args(p):
    p.add_argument("--family", choices=sorted(FAMILIES), help="built-in family")
    p.add_argument("--g", type=int, help="genus parameter")
    p.add_argument("--n", type=int, help="number of attached pieces")
    p.add_argument("--spec", help="handle-spec JSON file")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="panelweb", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("invariants", help="homology, chi, signature and form of a doubled decomposition")
    _family_args(p)
    p.add_argument("--format", choices=["json", "table"], default="table")
    p.add_argument("--dim", type=float, help="limit-set dimension estimate; adds the scalar-curvature sign")
    p.set_defaults(func=cmd_invariants)

    p = sub.add_parser("presentation", help="the fundamental-group presentation (or handle-spec JSON)")
    _family_args(p)
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.set_defaults(func=cmd_presentation)

    p = sub.add_parser("family-table", help="invariants over a parameter sweep")
    p.add_argument("--family", choices=sorted(FAMILIES), required=True)
    p.add_argument("--range", help="e.g. g=1..10,n=1..10")
    p.add_argument("--format", choices=["table", "json", "csv"], default="table")
    p.set_defaults(func=cmd_family_table)

    p = sub.add_parser("group", help="assemble Kleinian groups")
    gsub = p.add_subparsers(dest="action", required=True)
    for name, helptext in (
        ("build", "load a group spec, optionally combine and twist"),
        ("schottky", "Fuchsian Schottky group of a surface with boundary"),
        ("cyclic", "cyclic group generated by a dilation"),
        ("panelled", "the panelled-web group over the twice-punctured torus"),
    ):
        q = gsub.add_parser(name, help=helptext)
        if name == "build":
            q.add_argument("--spec", required=True, help="group-spec JSON")
            q.add_argument("--combine", help="second group-spec JSON for the first combination")
            q.add_argument("--shared", help="label of the amalgamated generator (omit for a free product)")
            q.add_argument("--line", type=float, metavar="ANGLE",
                           help="separate along the line through 0 at ANGLE degrees; B1 is its left side")
            q.add_argument("--circle", type=float, nargs=3, metavar=("RE", "IM", "R"),
                           help="separate along a circle; B1 is its outside")
            q.add_argument("--swap-sides", action="store_true", help="exchange B1 and B2")
        elif name == "schottky":
            q.add_argument("--g", type=int, required=True)
            q.add_argument("--n", type=int, required=True)
            q.add_argument("--radius", type=float, default=1.0)
            q.add_argument("--gap", type=float, default=1.0)
        elif name == "cyclic":
            q.add_argument("--multiplier", type=float, required=True)
            q.add_argument("--label", default="a")
        else:
            q.add_argument("--kappa", type=float, default=PanelledLayout().kappa)
        q.add_argument("--twist", nargs=3, metavar=("LABEL", "P", "Q"), help="adjoin a P/Q complex twist")
        q.add_argument("--lambda", dest="twist_lambda", type=float, help="multiplier of the twisted generator")
        q.add_argument("--check-depth", type=int, default=5, help="word depth of the precise-invariance checks")
        q.add_argument("--out", help="output file (default stdout)")
        q.set_defaults(func=cmd_group)

    def sample_args(q, required):
        q.add_argument("--group", required=required, help="group-spec JSON")
        q.add_argument("--depth", type=int, required=required)
        q.add_argument("--max-depth", type=int, default=DEFAULT_DEPTH_CAP)
        q.add_argument("--seed", type=float, nargs=2, action="append", metavar=("RE", "IM"),
                       help="seed point (repeatable); default: the generators' fixed points")

    p = sub.add_parser("limitset", help="sample the limit set as CSV")
    sample_args(p, True)
    p.add_argument("--out", help="CSV file (default stdout)")
    p.set_defaults(func=cmd_limitset)

    p = sub.add_parser("dimension", help="box-counting dimension and scalar-curvature sign")
    p.add_argument("--in", dest="input", help="points CSV")
    sample_args(p, False)
    p.add_argument("--d", type=float, help="use this dimension instead of estimating one")
    p.add_argument("--scales", help="comma-separated box sizes")
    p.add_argument("--n-scales", type=int, default=8)
    p.add_argument("--ratio", type=float, default=0.5)
    p.add_argument("--sign", action="store_true", help="append the sign of n/2 - 1 - d")
    p.add_argument("--n", type=int, default=4, help="manifold dimension for --sign")
    p.set_defaults(func=cmd_dimension)
    return ap


INPUT_ERRORS = (
    CLIError, HandleError, GroupError, MoebiusError, UnknownGenerator, WordSyntaxError,
    DegenerateScales, BadDimension, KeyError, ValueError,
)


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except PreciseInvarianceFailed as exc:
        print(f"error: precise invariance failed: {exc}", file=sys.stderr)
        print(json.dumps({"witness": exc.witness.to_json()}), file=sys.stderr)
        return EXIT_WITNESS
    except TooFewPoints as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FEW_POINTS
    except CLIError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except INPUT_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
