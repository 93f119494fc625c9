"""Command-line interface: ``scalefn <subcommand> MAP ...``.

Exit status is 0 on success, 1 when the input fails validation and 2 when
a computation does not converge.  CSV output always carries a header and
prints reals with 17 significant digits.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor

from . import maps as builtin_maps
from .errors import ChainUnresolved, NoConvergence, NotConverged, NotDecaying, ScalefnError
from .invariants import compare_invariants, default_addresses, eigenvalue_record, exponent_estimate
from .map_model import asymmetry, build_map, critical_orbit, forward_orbit, is_geometrically_finite, load_map
from .partition import partition_levels
from .scaling import discontinuity_probe, routed_family, scaling_function
from .symbolic import DualAddress, periodic_addresses

EXIT_OK, EXIT_INVALID, EXIT_NONCONVERGED = 0, 1, 2
NONCONVERGENCE = (NotConverged, NoConvergence, ChainUnresolved, NotDecaying)

BUILTINS = {
    "example1": builtin_maps.example1_config,
    "quadratic": builtin_maps.quadratic_config,
    "cubic": lambda: builtin_maps.unimodal_config(3.0),
    "doubling": builtin_maps.doubling_config,
    "identity": builtin_maps.identity_config,
}


def fmt(x):
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return "%.17g" % x
    return str(x)


def _load(source):
    if source.startswith("builtin:"):
        name = source.split(":", 1)[1]
        if name not in BUILTINS:
            raise ValueError(f"unknown builtin map {name!r}; choose from {sorted(BUILTINS)}")
        return build_map(BUILTINS[name]())
    return load_map(source)


def _threads():
    try:
        return max(1, int(os.environ.get("SCALEFN_THREADS", "1")))
    except ValueError:
        return 1


def _pmap(func, items):
    items = list(items)
    n = min(_threads(), len(items))
    if n <= 1:
        return [func(x) for x in items]
    with ProcessPoolExecutor(max_workers=n) as pool:
        return list(pool.map(func, items))


def _emit(args, text):
    if args.output:
        with open(args.output, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _csv(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(x) for x in r])
    return buf.getvalue()


def _json(obj):
    return json.dumps(obj, indent=2, sort_keys=False) + "\n"


def _check_tol(tol):
    if not 0 < tol < 1:
        raise SystemExit("--tol must lie in (0, 1)")
    return tol


# --------------------------------------------------------------------------
# subcommands
# --------------------------------------------------------------------------


def cmd_validate(args):
    fmap = _load(args.map)
    try:
        gf = is_geometrically_finite(fmap)
    except ScalefnError:
        gf = False
    info = {
        "branches": fmap.n_branches,
        "points": list(fmap.points),
        "orientations": list(fmap.orientations),
        "incidence": fmap.incidence.tolist(),
        "critical_points": [
            {"c": cp.c, "gamma": cp.gamma, "left": cp.left_coeff, "right": cp.right_coeff} for cp in fmap.critical_points
        ],
        "geometrically_finite": gf,
    }
    if args.format == "json":
        _emit(args, _json(info))
    else:
        lines = ["valid Markov map", f"branches: {fmap.n_branches}", "incidence:"]
        lines += [" ".join(str(int(v)) for v in row) for row in fmap.incidence]
        lines.append("orientations: " + " ".join("+" if o > 0 else "-" for o in fmap.orientations))
        for cp in fmap.critical_points:
            lines.append(f"critical point: c={fmt(cp.c)} gamma={fmt(cp.gamma)}")
        lines.append(f"geometrically finite: {'yes' if gf else 'no'}")
        _emit(args, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_orbit(args):
    fmap = _load(args.map)
    rows = []
    if args.point is not None:
        pts, start = forward_orbit(fmap, args.point, max_iter=args.max_iter)
        rows += [(args.point, j, x, j >= start) for j, x in enumerate(pts)]
    else:
        for orb in critical_orbit(fmap, max_iter=args.max_iter):
            rows += [(orb.c, j, x, j >= orb.preperiod) for j, x in enumerate(orb.points)]
    _emit(args, _csv(["start", "step", "x", "periodic"], rows))
    return EXIT_OK


def cmd_partition_stats(args):
    fmap = _load(args.map)
    rows = []
    for lvl in partition_levels(fmap, args.n_max):
        rows.append((lvl.n, lvl.count, lvl.lambda_, float(lvl.lengths.sum())))
    _emit(args, _csv(["n", "count", "lambda_n", "sum_lengths"], rows))
    return EXIT_OK


def _addresses(args, fmap):
    if args.address:
        return [DualAddress.parse(s) for s in args.address]
    return default_addresses(fmap, args.count)


class _ScalingJob:
    def __init__(self, fmap, tol, max_depth, min_depth):
        self.fmap, self.tol, self.max_depth, self.min_depth = fmap, tol, max_depth, min_depth

    def __call__(self, a):
        return scaling_function(self.fmap, a, self.tol, self.max_depth, self.min_depth, strict=False)


def cmd_scaling_table(args):
    fmap = _load(args.map)
    _check_tol(args.tol)
    addrs = sorted(_addresses(args, fmap), key=str)
    ests = _pmap(_ScalingJob(fmap, args.tol, args.max_depth, args.depth), addrs)
    rows = [(str(a), e.depth, e.value, e.error_bound, e.converged) for a, e in zip(addrs, ests)]
    _emit(args, _csv(["address", "depth", "value", "error_bound", "converged"], rows))
    return EXIT_OK if all(e.converged for e in ests) else EXIT_NONCONVERGED


def cmd_eigen(args):
    fmap = _load(args.map)
    _check_tol(args.tol)
    addrs = [DualAddress.parse(s) for s in args.address] if args.address else periodic_addresses(fmap, args.max_period)
    out = []
    for a in addrs:
        r = eigenvalue_record(fmap, a, args.tol)
        out.append(
            {"address": str(a), "period": a.period, "p": r.p, "direct": r.direct, "via_scaling": r.via_scaling, "identity_error": r.identity_error}
        )
    _emit(args, _json(out[0] if len(out) == 1 and args.address else out))
    return EXIT_OK


def cmd_exponent(args):
    fmap = _load(args.map)
    if not fmap.critical_points:
        print("map has no critical points", file=sys.stderr)
        return EXIT_INVALID
    sides = {"left": (-1,), "right": (1,), "both": (-1, 1)}[args.side]
    out = []
    for j, cp in enumerate(fmap.critical_points):
        if args.critical is not None and j != args.critical:
            continue
        for s in sides:
            if (s < 0 and cp.left_branch is None) or (s > 0 and cp.right_branch is None):
                continue
            e = exponent_estimate(fmap, cp.c, args.depth, s)
            out.append(
                {"critical": j, "c": cp.c, "side": "left" if s < 0 else "right", "gamma": e.gamma, "error": e.error, "depth": e.depth, "case": e.case, "model_gamma": cp.gamma}
            )
        try:
            tau = asymmetry(fmap, cp.c)
        except ScalefnError:
            tau = None
        for row in out:
            if row["critical"] == j:
                row["asymmetry"] = tau
    _emit(args, _json(out))
    return EXIT_OK


def cmd_compare(args):
    f, g = _load(args.map), _load(args.other)
    addrs = [DualAddress.parse(s) for s in args.address] if args.address else default_addresses(f, args.count)
    rep = compare_invariants(f, g, addrs, tol=args.tol, eigen=args.eigen)
    _emit(args, _json(rep.to_dict()))
    return EXIT_OK


def cmd_probe(args):
    fmap = _load(args.map)
    a0 = DualAddress.parse(args.address)
    if not fmap.critical_points:
        res = discontinuity_probe(fmap, a0, [])
        _emit(args, _json({"address": str(a0), "jump_ratio": res.jump_ratio, "note": res.note}))
        return EXIT_OK
    ks = range(args.k_min, args.k_max + 1)
    fam = routed_family(fmap, a0, ks, args.through, args.n1)
    res = discontinuity_probe(fmap, a0, fam, args.tol)
    out = {
        "address": str(a0),
        "through": args.through,
        "jump_ratio": res.jump_ratio,
        "base_value": res.base_value,
        "family": [{"address": str(b), "agreement": k, "value": v} for b, k, v in zip(fam, res.agreement, res.values)],
        "note": res.note,
    }
    _emit(args, _json(out))
    return EXIT_OK


# --------------------------------------------------------------------------
# parser
# --------------------------------------------------------------------------


def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def build_parser():
    p = argparse.ArgumentParser(prog="scalefn", description="Scaling functions of Markov interval maps.")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("map", help="map JSON file or builtin:NAME")
        sp.add_argument("-o", "--output", help="write to this file instead of stdout")
        sp.set_defaults(func=func)
        return sp

    sp = add("validate", cmd_validate, "check a map and print its incidence matrix")
    sp.add_argument("--format", choices=("text", "json"), default="text")

    sp = add("orbit", cmd_orbit, "critical orbits (or the orbit of --point) as CSV")
    sp.add_argument("--point", type=float)
    sp.add_argument("--max-iter", type=_positive_int, default=64)

    sp = add("partition-stats", cmd_partition_stats, "count, max length and total length per partition level")
    sp.add_argument("--n-max", type=_positive_int, default=12)

    sp = add("scaling-table", cmd_scaling_table, "scaling function values as CSV")
    sp.add_argument("--depth", type=_positive_int, default=8, help="minimum truncation depth")
    sp.add_argument("--tol", type=float, default=1e-9)
    sp.add_argument("--max-depth", type=_positive_int, default=40)
    sp.add_argument("--address", action="append", help="tail|block literal; repeatable")
    sp.add_argument("--count", type=_positive_int, help="number of sampled addresses")

    sp = add("eigen", cmd_eigen, "eigenvalues at periodic points, directly and from scaling values")
    sp.add_argument("--address", action="append")
    sp.add_argument("--max-period", type=_positive_int, default=3)
    sp.add_argument("--tol", type=float, default=1e-12)

    sp = add("exponent", cmd_exponent, "critical exponents recovered from scales")
    sp.add_argument("--depth", type=_positive_int, default=18)
    sp.add_argument("--side", choices=("left", "right", "both"), default="left")
    sp.add_argument("--critical", type=int, help="index of the critical point")

    sp = add("compare", cmd_compare, "compare invariants of two maps (JSON report)")
    sp.add_argument("other", help="second map")
    sp.add_argument("--tol", type=float, default=1e-6)
    sp.add_argument("--eigen", action="store_true", help="also compare eigenvalues at periodic points")
    sp.add_argument("--address", action="append")
    sp.add_argument("--count", type=_positive_int)

    sp = add("probe-discontinuity", cmd_probe, "jump of the scaling function along a routed family")
    sp.add_argument("--address", required=True, help="base address a0")
    sp.add_argument("--through", choices=("U", "V"), default="U", help="enter the critical windows (U) or avoid them (V)")
    sp.add_argument("--n1", type=_positive_int, help="partition level of the critical windows (default: smallest valid)")
    sp.add_argument("--k-min", type=_positive_int, default=4, help="shortest agreement length in the family")
    sp.add_argument("--k-max", type=_positive_int, default=14, help="longest agreement length in the family")
    sp.add_argument("--tol", type=float, default=1e-9, help="scaling function tolerance")
    return p


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except NONCONVERGENCE as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGED
    except (ScalefnError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
