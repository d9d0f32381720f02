"""Command line front end for the experiment drivers and exact checks.

Exit codes: 0 on success, 1 when a checked property fails (including a
dual-route disagreement or an enumeration budget blow-up), 2 on usage
errors.  Tables are CSV with the first line '# latflow-csv v1'; a run
with --out also writes <command>.json (the full report) and a
manifest.json echoing the resolved configuration together with a
git-blob-style sha1 content hash of it.

Every flag can instead be supplied through a JSON --config file keyed by
the flag's long name (dashes as underscores); explicit flags win.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import os
import random
import sys
from dataclasses import fields, is_dataclass
from fractions import Fraction

from . import __version__
from .algebra import ExactMatrix
from .backend import EXACT, FLOAT, BudgetExceeded, Rat, rat
from .constructions import (
    block_transport_witness,
    scan_radius_threshold,
    staircase_unimodular,
    unit_lower_elimination,
    unit_triangular_avoidance_check,
    varying_first_weight_scan,
)
from .diophantine import Curve, RouteDisagreement
from .experiments import (
    equidistribution_siegel,
    improvability_scan,
    nondivergence_scan,
    shear_invariance_scan,
)
from . import linalg
from .lattice import Tent
from .sequences import RateSchedule, layered_presentation
from .weights import (
    GrowthSpec,
    RepSpace,
    curve_hypothesis_fixed_check,
    layered_lemma_check,
    spanning_zero_check,
    weight_alignment_check,
    zero_projection_lemma_check,
)

CSV_TAG = "# latflow-csv v1"


# -- serialization helpers ------------------------------------------------


def _git_blob_sha1(data: bytes) -> str:
    # same digest `git hash-object` would assign the bytes
    return hashlib.sha1(b"blob %d\x00" % len(data) + data).hexdigest()


def _jsonify(obj):
    if obj is None or isinstance(obj, (bool, int, float, str)):
        return obj
    if isinstance(obj, (Fraction, Rat)):
        return str(obj)
    if isinstance(obj, ExactMatrix):
        return [[str(x) for x in row] for row in obj.rows]
    if is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: _jsonify(getattr(obj, f.name)) for f in fields(obj)}
    if isinstance(obj, dict):
        return {str(k): _jsonify(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset, range)):
        return [_jsonify(v) for v in obj]
    return str(obj)


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        fh.write(CSV_TAG + "\n")
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([str(x) for x in row])


def _print_table(header, rows):
    print(CSV_TAG)
    print(",".join(header))
    for row in rows:
        print(",".join(str(x) for x in row))


def _manifest(command, cfg):
    # hash the computational config only: where the files land is not
    # part of what was computed
    hashed = {k: v for k, v in cfg.items() if k != "out"}
    blob = json.dumps(
        _jsonify(hashed), sort_keys=True, separators=(",", ":")
    ).encode()
    return {
        "tool": "latflow",
        "version": __version__,
        "csv_schema": "latflow-csv v1",
        "command": command,
        "config": _jsonify(cfg),
        "content_hash": _git_blob_sha1(blob),
        "python": sys.version.split()[0],
    }


def _emit(command, cfg, header, rows, report):
    """Print the table; with --out also write csv + json + manifest."""
    if header is not None:
        _print_table(header, rows)
    out = cfg.get("out")
    if not out:
        return
    os.makedirs(out, exist_ok=True)
    if header is not None:
        _write_csv(os.path.join(out, command + ".csv"), header, rows)
    with open(os.path.join(out, command + ".json"), "w") as fh:
        json.dump(_jsonify(report), fh, indent=2, sort_keys=True)
        fh.write("\n")
    with open(os.path.join(out, "manifest.json"), "w") as fh:
        json.dump(_manifest(command, cfg), fh, indent=2, sort_keys=True)
        fh.write("\n")


# -- flag parsing ----------------------------------------------------------


def _merged(ns, defaults):
    """Resolve flags against the optional JSON config file; flags win."""
    cfg = {}
    if getattr(ns, "config", None):
        with open(ns.config) as fh:
            cfg = json.load(fh)
        unknown = sorted(set(cfg) - set(defaults))
        if unknown:
            raise ValueError("unknown config keys: %s" % ", ".join(unknown))
    out = {}
    for key, dv in defaults.items():
        v = getattr(ns, key, None)
        if v is None:
            v = cfg.get(key, dv)
        out[key] = v
    return out


def _require(cfg, key):
    if cfg[key] is None:
        raise ValueError("missing --%s" % key.replace("_", "-"))
    return cfg[key]


def _split_list(v):
    if isinstance(v, str):
        return [t.strip() for t in v.split(",") if t.strip()]
    return list(v)


def _floats(v):
    return [float(x) for x in _split_list(v)]


def _ints(v):
    return [int(x) for x in _split_list(v)]


def _rats(v):
    return [rat(x) for x in _split_list(v)]


def _weight_rows(v):
    """'10,10;100,100' or a config list of rows."""
    if isinstance(v, str):
        rows = [r for r in (part.strip() for part in v.split(";")) if r]
        return [tuple(rat(x) for x in _split_list(r)) for r in rows]
    return [tuple(rat(x) for x in row) for row in v]


def _parse_curve(cfg):
    dom = _rats(cfg["domain"]) if cfg["domain"] is not None else [0, 1]
    if len(dom) != 2:
        raise ValueError("--domain wants two endpoints")
    return Curve.parse(_require(cfg, "curve"), tuple(dom))


def _parse_schedule(cfg):
    v = _require(cfg, "sequence")
    if isinstance(v, dict):
        return RateSchedule.from_json(v)
    return RateSchedule.parse(v)


def _parse_growth(text):
    """Layers comma-separated; monomials '+'-separated, each c:p."""
    layers = []
    for part in _split_list(text):
        monos = []
        for m in part.split("+"):
            c, sep, p = m.partition(":")
            if not sep:
                raise ValueError("growth monomial %r wants c:p" % m)
            monos.append((rat(c), rat(p)))
        layers.append(tuple(monos))
    return GrowthSpec(tuple(layers))


def _parse_rep(text):
    parts = str(text).split(":")
    if parts[0] == "wedge" and len(parts) == 3:
        return RepSpace(int(parts[1]), "wedge", int(parts[2]))
    if parts[0] == "adjoint" and len(parts) == 2:
        return RepSpace(int(parts[1]), "adjoint")
    raise ValueError("rep must be wedge:n:d or adjoint:n; got %r" % text)


def _resolve_indices(cfg, schedule):
    if cfg["indices"] is not None:
        idx = _ints(cfg["indices"])
    elif cfg["imax"] is not None:
        idx = list(range(schedule.ordered_from(), int(cfg["imax"]) + 1))
    elif schedule.index_range is not None:
        idx = list(schedule.indices())
    else:
        raise ValueError("need --indices or --imax")
    if not idx:
        raise ValueError("empty index list")
    return idx


def _build_tent(cfg, n):
    center = (
        _floats(cfg["tent_center"])
        if cfg["tent_center"] is not None
        else [0.0] * n
    )
    if len(center) != n:
        raise ValueError("tent center wants %d coordinates" % n)
    return Tent(
        tuple(center), float(cfg["tent_radius"]), float(cfg["tent_height"]), FLOAT
    )


def _experiment_kwargs(cfg):
    kw = {
        "threads": int(cfg["threads"]),
        "grid": cfg["grid"],
        "seed": int(cfg["seed"]),
    }
    if cfg.get("budget") is not None:
        kw["budget"] = int(cfg["budget"])
    return kw


# -- subcommands -----------------------------------------------------------

_GRID_FLAGS = {"grid": "equispaced", "seed": 0, "threads": 1, "budget": None}
_OUT_FLAGS = {"out": None}

IMPROVABILITY_DEFAULTS = dict(
    curve="s,s^2",
    domain=None,
    weights="10,10;100,100;1000,1000;10000,10000;100000,100000;1000000,1000000",
    mu="1/2",
    samples=100,
    **_GRID_FLAGS,
    **_OUT_FLAGS,
)


def _cmd_improvability(ns):
    cfg = _merged(ns, IMPROVABILITY_DEFAULTS)
    curve = _parse_curve(cfg)
    rows = improvability_scan(
        curve,
        _weight_rows(cfg["weights"]),
        _rats(cfg["mu"]),
        int(cfg["samples"]),
        **_experiment_kwargs(cfg),
    )
    # fractions cannot increase with the prefix length: each longer prefix
    # intersects one more event
    monotone = True
    by_mu = {}
    for r in rows:
        by_mu.setdefault(str(r.mu), []).append(r)
    for seq in by_mu.values():
        seq.sort(key=lambda r: r.prefix)
        for a, b in zip(seq, seq[1:]):
            if b.fraction > a.fraction:
                monotone = False
    header = ["mu", "prefix", "hits", "count", "fraction"]
    table = [[r.mu, r.prefix, r.hits, r.count, r.fraction] for r in rows]
    report = {"rows": rows, "monotone": monotone}
    _emit("improvability", cfg, header, table, report)
    print("monotone in prefix length: %s" % ("yes" if monotone else "NO"))
    return 0 if monotone else 1


EQUIDIST_DEFAULTS = dict(
    curve="s",
    domain=None,
    sequence="i",
    indices=None,
    imax=8,
    samples=2000,
    tent_center=None,
    tent_radius=2,
    tent_height=1,
    doubled=None,
    gap_tol=None,
    **_GRID_FLAGS,
    **_OUT_FLAGS,
)


def _cmd_equidist(ns):
    cfg = _merged(ns, EQUIDIST_DEFAULTS)
    curve = _parse_curve(cfg)
    schedule = _parse_schedule(cfg)
    indices = _resolve_indices(cfg, schedule)
    tent = _build_tent(cfg, curve.k + 1)
    rows = equidistribution_siegel(
        curve,
        schedule,
        indices,
        int(cfg["samples"]),
        tent,
        doubled=bool(cfg["doubled"]),
        **_experiment_kwargs(cfg),
    )
    header = ["index", "count", "average", "reference", "abs_gap", "rel_gap"]
    table = [
        [r.index, r.count, r.average, r.reference, r.abs_gap, r.rel_gap]
        for r in rows
    ]
    ok = True
    if cfg["gap_tol"] is not None:
        # asymptotic statement: gate the final index only
        ok = rows[-1].rel_gap <= float(cfg["gap_tol"])
    report = {"rows": rows, "gap_tol": cfg["gap_tol"], "ok": ok}
    _emit("equidist", cfg, header, table, report)
    if cfg["gap_tol"] is not None:
        print(
            "final rel gap %.6f vs tol %s: %s"
            % (rows[-1].rel_gap, cfg["gap_tol"], "ok" if ok else "FAIL")
        )
    return 0 if ok else 1


NONDIV_DEFAULTS = dict(
    curve="s",
    domain=None,
    sequence="i",
    indices=None,
    imax=8,
    samples=2000,
    eps="0.05",
    frac_tol=None,
    **_GRID_FLAGS,
    **_OUT_FLAGS,
)


def _cmd_nondiv(ns):
    cfg = _merged(ns, NONDIV_DEFAULTS)
    curve = _parse_curve(cfg)
    schedule = _parse_schedule(cfg)
    indices = _resolve_indices(cfg, schedule)
    rows = nondivergence_scan(
        curve,
        schedule,
        indices,
        _floats(cfg["eps"]),
        int(cfg["samples"]),
        **_experiment_kwargs(cfg),
    )
    header = ["index", "eps", "count", "below", "fraction"]
    table = [[r.index, r.eps, r.count, r.below, r.fraction] for r in rows]
    ok = True
    if cfg["frac_tol"] is not None:
        tol = rat(cfg["frac_tol"])
        ok = all(r.fraction <= tol for r in rows)
    report = {"rows": rows, "frac_tol": cfg["frac_tol"], "ok": ok}
    _emit("nondiv", cfg, header, table, report)
    if cfg["frac_tol"] is not None:
        worst = max(r.fraction for r in rows)
        print(
            "worst escape fraction %s vs tol %s: %s"
            % (worst, cfg["frac_tol"], "ok" if ok else "FAIL")
        )
    return 0 if ok else 1


TWIST_DEFAULTS = dict(
    curve="s",
    domain=None,
    sequence="i",
    indices=None,
    imax=8,
    t="0,1",
    samples=1000,
    tent_center=None,
    tent_radius=2,
    tent_height=1,
    defect_tol=None,
    **_GRID_FLAGS,
    **_OUT_FLAGS,
)


def _cmd_twist(ns):
    cfg = _merged(ns, TWIST_DEFAULTS)
    curve = _parse_curve(cfg)
    schedule = _parse_schedule(cfg)
    indices = _resolve_indices(cfg, schedule)
    tent = _build_tent(cfg, curve.k + 1)
    rows = shear_invariance_scan(
        curve,
        schedule,
        indices,
        _floats(cfg["t"]),
        int(cfg["samples"]),
        tent,
        **_experiment_kwargs(cfg),
    )
    header = [
        "index",
        "t",
        "used",
        "skipped",
        "base_average",
        "sheared_average",
        "defect",
        "sup_f",
    ]
    table = [
        [
            r.index,
            r.t,
            r.used,
            r.skipped,
            r.base_average,
            r.sheared_average,
            r.defect,
            r.sup_f,
        ]
        for r in rows
    ]
    # t = 0 is the untwisted average itself; its defect must be exact zero
    exact_zero = all(r.defect == 0.0 for r in rows if r.t == 0.0)
    ok = exact_zero
    if cfg["defect_tol"] is not None:
        last = max(r.index for r in rows)
        tol = float(cfg["defect_tol"])
        ok = exact_zero and all(
            r.defect <= tol * r.sup_f
            for r in rows
            if r.index == last and r.t != 0.0
        )
    report = {
        "rows": rows,
        "defect_tol": cfg["defect_tol"],
        "t0_exact": exact_zero,
        "ok": ok,
    }
    _emit("twist", cfg, header, table, report)
    print("t=0 defect exactly zero: %s" % ("yes" if exact_zero else "NO"))
    return 0 if ok else 1


LEMMA_DEFAULTS = dict(
    rep=None,
    config_sizes=None,
    growth=None,
    trials=20,
    seed=0,
    curve=None,
    domain=None,
    **_OUT_FLAGS,
)


def _random_support_points(rng, n, m1):
    """m1+1 small integer points supported on the first m1 coordinates,
    redrawn until they affinely span that copy of R^m1."""
    while True:
        pts = [
            tuple(rng.randint(-3, 3) for _ in range(m1)) + (0,) * (n - 1 - m1)
            for _ in range(m1 + 1)
        ]
        diffs = [
            [rat(p[i] - pts[0][i]) for i in range(m1)] for p in pts[1:]
        ]
        if linalg.rank(diffs) == m1:
            return pts


def _cmd_lemma_verify(ns):
    cfg = _merged(ns, LEMMA_DEFAULTS)
    rep = _parse_rep(_require(cfg, "rep"))
    sizes = tuple(_ints(_require(cfg, "config_sizes")))
    k = len(sizes)
    if cfg["growth"] is not None:
        growth = _parse_growth(cfg["growth"])
    elif k == 1:
        growth = GrowthSpec.simple([(1, 1)])
    else:
        raise ValueError("missing --growth (one c:p layer per block)")
    if growth.k != k:
        raise ValueError("growth has %d layers for %d blocks" % (growth.k, k))
    if cfg["curve"] is not None:
        curve = _parse_curve(cfg)
    else:
        # moment curve: always affinely full, so a fair default
        curve = Curve.parse(
            ", ".join("s^%d" % (j + 1) for j in range(rep.n - 1))
        )
    trials = int(cfg["trials"])
    rng = random.Random(int(cfg["seed"]))

    failures = []
    trial_rows = []
    for t in range(trials):
        pts = _random_support_points(rng, rep.n, sizes[0])
        if k == 1:
            main_rep = zero_projection_lemma_check(rep, sizes[0], pts)
        else:
            main_rep = layered_lemma_check(rep, sizes, growth, pts)
        span_rep = spanning_zero_check(rep, sizes, growth, pts)
        trial_rows.append(
            [t, main_rep.ok, main_rep.hypothesis_dim, span_rep.ok, span_rep.hypothesis_dim]
        )
        if not main_rep.ok:
            failures.append(("projection", t, main_rep))
        if not span_rep.ok:
            failures.append(("spanning", t, span_rep))
    alignment = weight_alignment_check(rep, sizes)
    if not alignment.ok:
        failures.append(("alignment", -1, alignment))
    containment = curve_hypothesis_fixed_check(rep, sizes, growth, curve)
    if not containment.ok:
        failures.append(("containment", -1, containment))

    header = ["trial", "projection_ok", "hypothesis_dim", "spanning_ok", "spanning_dim"]
    report = {
        "rep": str(cfg["rep"]),
        "config": list(sizes),
        "growth": [[str(c) + ":" + str(p) for c, p in layer] for layer in growth.layers],
        "trials": trials,
        "alignment_ok": alignment.ok,
        "containment_ok": containment.ok,
        "failures": [(kind, t, r) for kind, t, r in failures],
        "ok": not failures,
    }
    _emit("lemma-verify", cfg, header, trial_rows, report)
    print(
        "%d trials, alignment %s, containment %s -> %s"
        % (
            trials,
            "ok" if alignment.ok else "FAIL",
            "ok" if containment.ok else "FAIL",
            "all checks passed" if not failures else "%d FAILURES" % len(failures),
        )
    )
    return 0 if not failures else 1


CONSTRUCTIONS_DEFAULTS = dict(
    gamma=None,
    lead=1,
    scan_tail=None,
    scan_weights="10,100,1000,10000",
    scan_mu="19/20",
    threshold=None,
    expect_soluble=None,
    **_OUT_FLAGS,
)


def _cmd_constructions(ns):
    cfg = _merged(ns, CONSTRUCTIONS_DEFAULTS)
    if cfg["gamma"] is None and cfg["scan_tail"] is None:
        raise ValueError("need --gamma or --scan-tail")

    if cfg["gamma"] is not None:
        weights = _ints(cfg["gamma"])
        gamma = staircase_unimodular(weights)
        h, upper = unit_lower_elimination(gamma)
        structural, enumerated = unit_triangular_avoidance_check(h)
        witness = block_transport_witness(weights, int(cfg["lead"]))
        print("staircase for weights %s (det %s):" % (weights, gamma.det()))
        for row in gamma.rows:
            print("  " + "  ".join(str(x) for x in row))
        print("unit lower eliminator h:")
        for row in h.rows:
            print("  " + "  ".join(str(x) for x in row))
        print(
            "h avoids the open unit box: structural=%s enumerated=%s"
            % (structural, enumerated)
        )
        print("block transport checks: %s" % witness.checks)
        ok = structural and enumerated and witness.ok
        report = {
            "weights": weights,
            "staircase": gamma,
            "h": h,
            "upper": upper,
            "avoidance": {"structural": structural, "enumerated": enumerated},
            "transport": witness,
            "ok": ok,
        }
        _emit("constructions", cfg, None, None, report)
        print("all certificates valid: %s" % ("yes" if ok else "NO"))
        return 0 if ok else 1

    tail = tuple(_rats(cfg["scan_tail"]))
    first_weights = _rats(cfg["scan_weights"])
    mu = rat(cfg["scan_mu"])
    scan = varying_first_weight_scan(tail, first_weights, mu)
    header = ["first_weight", "point", "soluble"]
    table = [[w, " ".join(str(c) for c in p), sol] for w, p, sol in scan.rows]
    report = {"scan": scan}
    if cfg["threshold"]:
        thr, at_thr = scan_radius_threshold(tail, first_weights)
        report["threshold"] = thr
        print("all-soluble radius threshold (to 1/128): %s" % thr)
    _emit("constructions", cfg, header, table, report)
    print(
        "radius %s, tail %s: %d insoluble of %d"
        % (mu, list(tail), len(scan.insoluble), len(scan.rows))
    )
    if cfg["expect_soluble"] and not scan.all_soluble:
        return 1
    return 0


LAYERED_DEFAULTS = dict(sequence=None, check_at="5,10", err_tol=1e-9, **_OUT_FLAGS)


def _cmd_layered(ns):
    cfg = _merged(ns, LAYERED_DEFAULTS)
    schedule = _parse_schedule(cfg)
    pres = layered_presentation(schedule)
    checks = _ints(cfg["check_at"])
    errs = {i: pres.exp_identity_error(i) for i in checks}
    tol = float(cfg["err_tol"])
    ok = all(e <= tol for e in errs.values())
    header = ["index", "exp_identity_error"]
    table = [[i, errs[i]] for i in checks]
    report = {
        "n": pres.n,
        "block_sizes": list(pres.block_sizes),
        "layers": [str(f) for f in pres.layer_forms],
        "anchored": [str(f) for f in pres.anchored],
        "residual": list(pres.residual),
        "errors": {str(i): errs[i] for i in checks},
        "ok": ok,
    }
    print("blocks %s, layers %s, residual %s" % (
        list(pres.block_sizes),
        [str(f) for f in pres.layer_forms],
        [str(x) for x in pres.residual],
    ))
    _emit("layered", cfg, header, table, report)
    return 0 if ok else 1


# -- parser ----------------------------------------------------------------


def _add_common(p, *, grid=True):
    p.add_argument("--config", help="JSON config file; flags override it")
    p.add_argument("--out", help="output directory for csv/json/manifest")
    if grid:
        p.add_argument("--grid", choices=["equispaced", "random"])
        p.add_argument("--seed", type=int)
        p.add_argument("--threads", type=int)
        p.add_argument("--budget", type=int, help="enumeration node budget")


def _add_curve_flags(p):
    p.add_argument("--curve", help="comma-separated polynomials in s")
    p.add_argument("--domain", help="parameter interval a,b (default 0,1)")


def _add_schedule_flags(p):
    p.add_argument("--sequence", help="comma-separated closed forms in i")
    p.add_argument("--indices", help="explicit index list, e.g. 4,6,8")
    p.add_argument("--imax", type=int, help="use indices ordered_from..imax")


def _add_tent_flags(p):
    p.add_argument("--tent-center", dest="tent_center")
    p.add_argument("--tent-radius", dest="tent_radius", type=float)
    p.add_argument("--tent-height", dest="tent_height", type=float)


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="latflow",
        description="expanding lattice translates along polynomial curves: "
        "experiments and exact certificates",
    )
    parser.add_argument("--version", action="version", version="latflow " + __version__)
    sub = parser.add_subparsers(dest="cmd")

    p = sub.add_parser("improvability", help="window hit fractions along weight rows")
    _add_curve_flags(p)
    p.add_argument("--weights", help="rows 'a,b;c,d;...'")
    p.add_argument("--mu", help="window radii, comma separated rationals")
    p.add_argument("--samples", type=int)
    _add_common(p)
    p.set_defaults(handler=_cmd_improvability)

    p = sub.add_parser("equidist", help="Siegel averages vs the integral reference")
    _add_curve_flags(p)
    _add_schedule_flags(p)
    p.add_argument("--samples", type=int)
    _add_tent_flags(p)
    p.add_argument("--doubled", action="store_true", default=None)
    p.add_argument("--gap-tol", dest="gap_tol", type=float,
                   help="gate: final-index relative gap at most this")
    _add_common(p)
    p.set_defaults(handler=_cmd_equidist)

    p = sub.add_parser("nondiv", help="fractions of samples with a short lattice vector")
    _add_curve_flags(p)
    _add_schedule_flags(p)
    p.add_argument("--samples", type=int)
    p.add_argument("--eps", help="thresholds, comma separated")
    p.add_argument("--frac-tol", dest="frac_tol",
                   help="gate: every escape fraction at most this")
    _add_common(p)
    p.set_defaults(handler=_cmd_nondiv)

    p = sub.add_parser("twist", help="aligned averages under an extra shear")
    _add_curve_flags(p)
    _add_schedule_flags(p)
    p.add_argument("--t", help="shear amounts, comma separated")
    p.add_argument("--samples", type=int)
    _add_tent_flags(p)
    p.add_argument("--defect-tol", dest="defect_tol", type=float,
                   help="gate: final-index defect at most tol * sup f")
    _add_common(p)
    p.set_defaults(handler=_cmd_twist)

    p = sub.add_parser("lemma-verify", help="randomized checks of the projection lemmas")
    p.add_argument("--rep", help="wedge:n:d or adjoint:n")
    p.add_argument("--config-sizes", dest="config_sizes",
                   help="block sizes m1,m2,... (decreasing)")
    p.add_argument("--growth", help="per-layer forms 'c:p,c:p' ('+' joins monomials)")
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)
    _add_curve_flags(p)
    _add_common(p, grid=False)
    p.set_defaults(handler=_cmd_lemma_verify)

    p = sub.add_parser("constructions", help="staircase certificates and window scans")
    p.add_argument("--gamma", help="integer weights a,b,... for the staircase")
    p.add_argument("--lead", type=int, help="leading ones in the transport witness")
    p.add_argument("--scan-tail", dest="scan_tail",
                   help="fixed tail weights for the first-weight scan")
    p.add_argument("--scan-weights", dest="scan_weights",
                   help="first weights to sweep")
    p.add_argument("--scan-mu", dest="scan_mu", help="window radius")
    p.add_argument("--threshold", action="store_true", default=None,
                   help="bisect the all-soluble radius threshold")
    p.add_argument("--expect-soluble", dest="expect_soluble",
                   action="store_true", default=None,
                   help="gate: fail when any grid point is insoluble")
    _add_common(p, grid=False)
    p.set_defaults(handler=_cmd_constructions)

    p = sub.add_parser("layered", help="layered normal form of a rate schedule")
    p.add_argument("--sequence", help="comma-separated closed forms in i")
    p.add_argument("--check-at", dest="check_at",
                   help="indices for the exp identity check")
    p.add_argument("--err-tol", dest="err_tol", type=float)
    _add_common(p, grid=False)
    p.set_defaults(handler=_cmd_layered)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as e:
        return 0 if e.code in (0, None) else 2
    if getattr(ns, "handler", None) is None:
        parser.print_usage(sys.stderr)
        return 2
    try:
        return ns.handler(ns)
    except (ValueError, OSError) as e:
        print("error: %s" % e, file=sys.stderr)
        return 2
    except (RouteDisagreement, BudgetExceeded, AssertionError) as e:
        print("verification failure: %s" % e, file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
