"""``cubical`` command-line driver.

Exit codes: 0 ok, 2 parse or input error, 3 invariant failure, 4 cap or budget exceeded.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from pathlib import Path

from . import generators
from .audit import CONTROLS, audit
from .battery import matrix_csv, run_suite
from .contact import bottleneck_delta, contact_graph, crossing_graph
from .errors import CubicalError, MalformedInput
from .factors import (color_factors, minimal_factor_system, raag_factor_system,
                      verify_factor_system)
from .generators import ACCEPTANCE_FIXTURES, export_complex, import_complex
from .hierarchy import (ProjectionTuple, fit_distance_constants, hierarchy_path,
                        consistency_check, realize, tuple_of)
from .median import validate_cube_complex


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _emit(args, filename, text, main=False):
    """Write DIR/filename under --out; without --out only the main artifact
    goes to stdout."""
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / filename).write_text(text, encoding="utf-8")
    elif main:
        sys.stdout.write(text)


def _load(spec: str):
    """A complex file, or a fixture name when no such file exists."""
    p = Path(spec)
    if p.exists():
        try:
            return import_complex(p.read_text(encoding="utf-8"))
        except OSError as exc:
            raise MalformedInput(f"cannot read {spec}: {exc}") from exc
    if spec.endswith(".json") or os.sep in spec:
        raise MalformedInput(f"no such file: {spec}")
    return generators.fixture(spec)


def _graph(args):
    if args.raag is None:
        return None
    p = Path(args.raag)
    if p.exists():
        return generators.load_defining_graph(p.read_text(encoding="utf-8"))
    return generators.named_graph(args.raag)


def _factor_system(args, C):
    gamma = _graph(args) if hasattr(args, "raag") else None
    if gamma is not None:
        return raag_factor_system(C, gamma, args.rich, args.xi)
    return minimal_factor_system(C, args.xi)


# ------------------------------------------------------------------ commands

def cmd_gen(args):
    if args.kind == "fixture":
        C = generators.fixture(args.name)
    else:
        if args.graph is None:
            raise MalformedInput("gen raag needs --graph")
        p = Path(args.graph)
        gamma = (generators.load_defining_graph(p.read_text(encoding="utf-8")) if p.exists()
                 else generators.named_graph(args.graph))
        C, _ = generators.salvetti_ball(gamma, args.radius, budget=args.budget)
    _emit(args, "complex.json", export_complex(C), main=True)
    return 0


def cmd_validate(args):
    C = _load(args.complex)
    rep = validate_cube_complex(C, seed=args.seed, raise_on_failure=False)
    _emit(args, "validate.json", dumps({"complex": C.name, "seed": args.seed, **rep.to_dict()}), main=True)
    return 0 if rep.valid else 3


def cmd_contact(args):
    C = _load(args.complex)
    G = contact_graph(C)
    X = crossing_graph(C)
    rep = bottleneck_delta(G.graph)
    body = {"complex": C.name, "seed": args.seed, "delta": rep.delta,
            "tree_qi": list(rep.tree_qi), "connected": rep.connected,
            "witness": list(rep.witness) if rep.witness else None,
            "sizes": {"hyperplanes": len(G.nodes), "contact_edges": len(G.edges),
                      "crossing_edges": len(X.edges)}}
    _emit(args, "contact.json", dumps(body), main=True)
    _emit(args, "contact.dot", G.to_dot())
    _emit(args, "crossing.dot", X.to_dot())
    return 0


def cmd_factors(args):
    C = _load(args.complex)
    FS = _factor_system(args, C)
    clauses = verify_factor_system(FS)
    k = len(FS.classes)
    body = {
        "complex": C.name, "seed": args.seed, "xi": FS.xi,
        "members": [list(m.key) for m in FS.members],
        "classes": [list(c.members) for c in FS.classes],
        "relations": [[FS.relations[(a, b)] if a != b else "equal" for b in range(k)]
                      for a in range(k)],
        "Delta": FS.delta_mult,
        "coloring": {str(a): c for a, c in sorted(color_factors(FS).items())},
        "invariants": {name: r.to_dict() for name, r in clauses.items()},
    }
    _emit(args, "factors.json", dumps(body), main=True)
    return 0 if all(r.passed for r in clauses.values()) else 3


def cmd_distance_fit(args):
    C = _load(args.complex)
    FS = _factor_system(args, C)
    fit = fit_distance_constants(FS, args.s)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["x", "y", "d", "rhs", "ratio"])
    for x, y, d, r in fit.rows:
        w.writerow([C.label(x), C.label(y), d, r, f"{d / r:.6f}" if r else "inf"])
    _emit(args, "distance_fit.csv", buf.getvalue())
    _emit(args, "distance_fit.json",
          dumps({"complex": C.name, "seed": args.seed, "xi": FS.xi, **fit.to_dict()}), main=True)
    return 0


def cmd_hier_path(args):
    C = _load(args.complex)
    FS = _factor_system(args, C)
    x, y = C.vertex_of(args.source), C.vertex_of(args.target)
    hp = hierarchy_path(FS, x, y, args.cap)
    _emit(args, "hier_path.json", dumps({"complex": C.name, "seed": args.seed,
                                         "xi": FS.xi, **hp.to_dict(C)}), main=True)
    on = set(zip(hp.path, hp.path[1:])) | set(zip(hp.path[1:], hp.path))
    lines = ["graph hier_path {"]
    for v in range(C.n):
        style = ", style=filled" if v in hp.path else ""
        lines.append(f'  "{C.label(v)}" [label="{C.label(v)}"{style}];')
    for a, b in C.edges:
        pen = " [penwidth=3]" if (a, b) in on else ""
        lines.append(f'  "{C.label(a)}" -- "{C.label(b)}"{pen};')
    lines.append("}")
    _emit(args, "hier_path.dot", "\n".join(lines) + "\n")
    return 0


def cmd_realize(args):
    C = _load(args.complex)
    FS = _factor_system(args, C)
    if args.tuple:
        try:
            data = json.loads(Path(args.tuple).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise MalformedInput(f"cannot read tuple {args.tuple}: {exc}") from exc
        b = ProjectionTuple(tuple(frozenset(c) for c in data["coords"]),
                            data.get("kappa", FS.xi + 2))
    else:
        b = tuple_of(FS, C.vertex_of(args.vertex))
    kappa = args.kappa if args.kappa is not None else FS.xi + 2
    check = consistency_check(FS, b, kappa)
    body = {"complex": C.name, "seed": args.seed, "xi": FS.xi, "kappa": kappa,
            "consistent": check.passed, "measured": check.value}
    if check.passed:
        r = realize(FS, b, kappa)
        body.update({"vertex": C.label(r.vertex), "theta": r.theta,
                     "minimizers": [C.label(v) for v in r.minimizers]})
    else:
        body["witness"] = [str(t) for t in check.witness]
    _emit(args, "realize.json", dumps(body), main=True)
    return 0 if check.passed else 3


def cmd_hhs_audit(args):
    C = _load(args.complex)
    FS = _factor_system(args, C)
    rep = audit(FS, args.negative_control, args.seed, args.cap, args.max_pairs)
    _emit(args, "audit.json", dumps({"seed": args.seed, **rep.to_dict()}), main=True)
    return 0 if rep.passed else 3


def cmd_suite(args):
    if args.fixtures == "all":
        names = ACCEPTANCE_FIXTURES
    else:
        names = tuple(s for s in args.fixtures.split(";") if s)
    result = run_suite(names, args.xi, args.seed, args.jobs)
    _emit(args, "suite.json", dumps(result), main=True)
    _emit(args, "matrix.csv", matrix_csv(result))
    if not args.out:
        sys.stderr.write(matrix_csv(result))
    ok = all(c["pass"] for row in result["rows"] for c in row["cells"].values())
    return 0 if ok else 3


# -------------------------------------------------------------------- parser

def _xi(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("ξ must be at least 1")
    return v


def _positive(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="output directory (default: JSON to stdout)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--jobs", type=_positive, default=None,
                        help="worker processes (default: available cores)")

    fs = argparse.ArgumentParser(add_help=False)
    fs.add_argument("complex", help="complex JSON file or fixture name")
    fs.add_argument("--xi", type=_xi, default=1)
    fs.add_argument("--raag", help="defining graph JSON (or named graph) for a rich family")
    fs.add_argument("--rich", choices=("minimal", "all"), default="minimal")

    p = argparse.ArgumentParser(prog="cubical", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", parents=[common], help="generate a complex")
    g.add_argument("kind", choices=("fixture", "raag"))
    g.add_argument("name", nargs="?", help="fixture name")
    g.add_argument("--graph", help="defining graph JSON or named graph")
    g.add_argument("--radius", type=int, default=1)
    g.add_argument("--budget", type=_positive, default=None)
    g.set_defaults(func=cmd_gen)

    v = sub.add_parser("validate", parents=[common], help="check the median property")
    v.add_argument("complex")
    v.set_defaults(func=cmd_validate)

    for name in ("contact",):
        c = sub.add_parser(name, parents=[common], help="contact graph and bottleneck δ")
        c.add_argument("complex")
        c.set_defaults(func=cmd_contact)
    a = sub.add_parser("analyze", parents=[common], help="alias: analyze contact <complex>")
    a.add_argument("what", choices=("contact",))
    a.add_argument("complex")
    a.set_defaults(func=cmd_contact)

    f = sub.add_parser("factors", parents=[common, fs], help="minimal factor system report")
    f.set_defaults(func=cmd_factors)

    d = sub.add_parser("distance-fit", parents=[common, fs], help="fit distance-formula constants")
    d.add_argument("--s", type=int, default=None, help="threshold (default 4ξ+10)")
    d.set_defaults(func=cmd_distance_fit)

    h = sub.add_parser("hier-path", parents=[common, fs], help="hierarchy path between vertices")
    h.add_argument("--from", dest="source", required=True)
    h.add_argument("--to", dest="target", required=True)
    h.add_argument("--cap", type=_positive, default=10_000)
    h.set_defaults(func=cmd_hier_path)

    r = sub.add_parser("realize", parents=[common, fs], help="realize a projection tuple")
    src = r.add_mutually_exclusive_group(required=True)
    src.add_argument("--tuple", help='JSON {"coords": [[h, ...], ...], "kappa": k}')
    src.add_argument("--vertex", help="use the tuple of this vertex")
    r.add_argument("--kappa", type=int, default=None)
    r.set_defaults(func=cmd_realize)

    u = sub.add_parser("hhs-audit", parents=[common, fs], help="audit the ten HHS axioms")
    u.add_argument("--negative-control", choices=CONTROLS, default=None)
    u.add_argument("--cap", type=_positive, default=10_000)
    u.add_argument("--max-pairs", type=_positive, default=None)
    u.set_defaults(func=cmd_hhs_audit)

    s = sub.add_parser("suite", parents=[common], help="run the invariant battery")
    s.add_argument("--fixtures", default="all", help='"all" or names separated by ";"')
    s.add_argument("--xi", type=_xi, default=1)
    s.set_defaults(func=cmd_suite)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if getattr(args, "s", "unset") is None:
        args.s = 4 * args.xi + 10
    try:
        return args.func(args)
    except CubicalError as exc:
        sys.stderr.write(f"error: {type(exc).__name__}: {exc}\n")
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
