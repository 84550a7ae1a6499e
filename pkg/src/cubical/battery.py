"""The invariant battery run by ``cubical suite`` over the fixture set."""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .audit import audit
from .contact import bottleneck_delta, collapse_contractibility, contact_graph
from .errors import CubicalError
from .factors import (check_behrstock, check_bounded_projections, check_cover_dichotomy,
                      minimal_factor_system, verify_factor_system)
from .generators import ACCEPTANCE_FIXTURES, fixture
from .hierarchy import (bgi_sweep, fit_distance_constants, hierarchy_path, length_comparison,
                        perturbed_tuples, realize, sample_geodesics, tuple_of,
                        consistency_check, verify_hierarchy_path)
from .median import gate_map, is_convex, validate_cube_complex

COLUMNS = ("median", "gates", "contact_delta", "factor_system", "bounded_projections",
           "behrstock", "cover_dichotomy", "bgi", "hierarchy_paths", "distance_fit",
           "consistency", "realization", "exact_recovery", "hhs_audit", "collapse")

BGI_SAMPLES = 10_000


def check_gates(C, subcomplexes):
    """Gate separation: the hyperplanes separating x from its gate are exactly
    those separating x from the whole subcomplex.  Returns (violations, witness)."""
    side = C.table.side
    bad, witness = 0, None
    for K in subcomplexes:
        idx = K.array
        g = gate_map(C, K)
        # h separates x from K iff K lies wholly on the side opposite x
        k_plus = side[:, idx].all(axis=1)
        k_minus = (~side[:, idx]).all(axis=1)
        for x in range(C.n):
            sep_gate = side[:, x] != side[:, g[x]]
            sep_set = np.where(side[:, x], k_minus, k_plus)
            if g[x] not in K.vertices or not np.array_equal(sep_gate, sep_set):
                bad += 1
                witness = witness or (x, list(K.key))
    return bad, witness


def gate_family(C, FS):
    """Members of the factor system, carriers and combinatorial hyperplanes."""
    out = {m.vertices: m for m in FS.members}
    for hp in C.table.hyperplanes:
        for S in (hp.carrier, hp.side_minus, hp.side_plus):
            out.setdefault(S.vertices, S)
    return [out[k] for k in sorted(out, key=lambda s: (len(s), sorted(s)))]


def _cell(passed, **detail):
    return {"pass": bool(passed), **detail}


def run_fixture(name, xi=1, seed=0, bgi_samples=BGI_SAMPLES):
    C = fixture(name)
    cells = {}
    rep = validate_cube_complex(C, raise_on_failure=False)
    cells["median"] = _cell(rep.valid, triples=rep.triples_checked,
                            violations=rep.median_violations)
    FS = minimal_factor_system(C, xi)
    bad, wit = check_gates(C, gate_family(C, FS))
    cells["gates"] = _cell(bad == 0, violations=bad, witness=wit)

    deltas = [bottleneck_delta(contact_graph(C).graph).delta]
    deltas += [bottleneck_delta(FS.fcg(i).graph).delta for i in range(len(FS))]
    cells["contact_delta"] = _cell(all(np.isfinite(deltas)), delta=max(deltas),
                                   tree_qi=[26 * max(deltas), 16 * max(deltas)])

    clauses = verify_factor_system(FS)
    cells["factor_system"] = _cell(all(r.passed for r in clauses.values()),
                                   members=len(FS), classes=len(FS.classes),
                                   Delta=FS.delta_mult)
    for col, fn in (("bounded_projections", check_bounded_projections),
                    ("behrstock", check_behrstock), ("cover_dichotomy", check_cover_dichotomy)):
        r = fn(FS)
        cells[col] = _cell(r.passed, value=r.value)

    sweep = bgi_sweep(FS, sample_geodesics(C, bgi_samples, seed))
    cells["bgi"] = _cell(sweep["hyperplane"][2] is None and sweep["factored"][2] is None,
                         checked=sweep["hyperplane"][0] + sweep["factored"][0],
                         active=sweep["hyperplane"][1] + sweep["factored"][1])

    failures = 0
    for x in range(C.n):
        for y in range(C.n):
            try:
                hp = hierarchy_path(FS, x, y)
            except CubicalError:
                failures += 1
                continue
            if not (verify_hierarchy_path(FS, hp).passed and length_comparison(FS, hp).passed):
                failures += 1
    cells["hierarchy_paths"] = _cell(failures == 0, pairs=C.n * C.n, failures=failures)

    fit = fit_distance_constants(FS, 4 * xi + 10)
    cells["distance_fit"] = _cell(np.isfinite(fit.K) and np.isfinite(fit.C), K=fit.K, C=fit.C)

    kappa = xi + 2
    tuples = [tuple_of(FS, x) for x in range(C.n)]
    cells["consistency"] = _cell(all(consistency_check(FS, b, kappa).passed for b in tuples))
    pert = perturbed_tuples(FS, 100, seed, kappa)
    thetas = [realize(FS, b, kappa).theta for b in pert]
    cells["realization"] = _cell(len(pert) == 100 and max(thetas) <= 2 * kappa + 1,
                                 tuples=len(pert), theta=max(thetas))
    wrong = [x for x, b in enumerate(tuples) if realize(FS, b, kappa).vertex != x]
    cells["exact_recovery"] = _cell(not wrong, ambiguous=wrong)

    report = audit(FS, seed=seed)
    cells["hhs_audit"] = _cell(report.passed, failing=report.failing())

    ok = True
    try:
        cert = collapse_contractibility(C)
        prev = set(range(C.n))
        for _, Y in cert.steps:
            ok &= Y.vertices < prev and is_convex(C, Y.vertices)
            prev = set(Y.vertices)
        steps = len(cert.steps)
    except CubicalError:
        ok, steps = False, None
    cells["collapse"] = _cell(ok, steps=steps)
    return {"fixture": name, "cells": {c: cells[c] for c in COLUMNS}}


def _run(args):
    return run_fixture(*args)


def run_suite(fixtures=ACCEPTANCE_FIXTURES, xi=1, seed=0, jobs=None):
    """Rows in fixture order; the result does not depend on ``jobs``."""
    jobs = jobs or os.cpu_count() or 1
    args = [(f, xi, seed) for f in fixtures]
    if jobs == 1 or len(args) == 1:
        rows = [_run(a) for a in args]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_run, args))
    return {"xi": xi, "seed": seed, "columns": list(COLUMNS), "rows": rows}


def matrix_csv(result):
    lines = ["fixture," + ",".join(result["columns"])]
    for row in result["rows"]:
        cells = row["cells"]
        lines.append(f'"{row["fixture"]}",' + ",".join(
            "pass" if cells[c]["pass"] else "FAIL" for c in result["columns"]))
    return "\n".join(lines) + "\n"
