"""Command line front end: one experiment per invocation, CSV or JSON out.

Exit codes: 0 success, 2 validation error, 3 finished with truncation
warnings, 4 module error.
"""

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from fractions import Fraction

from . import groups as gr
from .errors import GgtError, ValidationError

EXIT_OK, EXIT_VALIDATION, EXIT_TRUNCATED, EXIT_MODULE = 0, 2, 3, 4

OPS = {
    "dynamics": ["hyperbolic", "spectrum", "splitting", "norm", "intersection",
                 "packing-bound", "window", "invariant-lattice"],
    "packing": ["profile"],
    "growth": ["series"],
    "sol": ["lower", "upper", "distortion"],
    "hull": ["quasiconvexity", "cocompactness", "powers", "decompose", "brunn", "caratheodory"],
    "cubing": ["build", "width", "separation"],
    "check": ["all"],
}
SAMPLED = {("sol", "distortion"), ("hull", "cocompactness"), ("check", "all")}
PARAMS = ["matrix", "group", "subgroup", "extra", "r", "radius", "ball", "nu", "D", "delta",
          "window", "samples", "margin", "max_pairs", "cap", "p1", "p2", "z", "w", "a",
          "point", "set"]
INT_PARAMS = {"radius", "ball", "nu", "window", "samples", "margin", "max_pairs", "cap"}


def fmt_num(x):
    """Floats at 12 significant digits; ints, Fractions and strings verbatim."""
    if isinstance(x, bool) or x is None:
        return x
    if isinstance(x, float):
        if math.isinf(x) or math.isnan(x):
            return str(x)
        return float(format(x, ".12g"))
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, complex):
        return [fmt_num(x.real), fmt_num(x.imag)]
    if isinstance(x, dict):
        return {str(k): fmt_num(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [fmt_num(v) for v in x]
    if hasattr(x, "item"):
        return fmt_num(x.item())
    return x


@dataclass
class ExperimentConfig:
    subcommand: str
    op: str = None
    params: dict = field(default_factory=dict)
    seed: int = None
    output: str = None
    format: str = "json"

    def to_dict(self):
        return {"subcommand": self.subcommand, "op": self.op, "params": dict(self.params),
                "seed": self.seed, "format": self.format}

    @classmethod
    def from_dict(cls, d):
        known = {"subcommand", "op", "params", "seed", "output", "format"}
        extra = set(d) - known
        if extra:
            raise ValidationError([f"unknown config field {k!r}" for k in sorted(extra)])
        return cls(d.get("subcommand"), d.get("op"), dict(d.get("params") or {}),
                   d.get("seed"), d.get("output"), d.get("format", "json"))


def validate(config):
    """List of field-level problems; empty when the config is usable."""
    errs = []
    c = config
    if c.subcommand not in OPS:
        return [f"subcommand: unknown {c.subcommand!r}"]
    if c.op is None:
        c.op = OPS[c.subcommand][0]
    if c.op not in OPS[c.subcommand]:
        errs.append(f"op: {c.op!r} is not one of {', '.join(OPS[c.subcommand])}")
    if c.format not in ("csv", "json"):
        errs.append("format: must be csv or json")
    p = c.params
    sampled = (c.subcommand, c.op) in SAMPLED or (
        (c.subcommand, c.op) == ("hull", "quasiconvexity") and "max_pairs" in p)
    if sampled and c.seed is None:
        errs.append("seed: required for sampled experiments")
    if c.seed is not None and (not isinstance(c.seed, int) or not 0 <= c.seed < 2 ** 64):
        errs.append("seed: must be an unsigned 64-bit integer")
    for k in p:
        if k not in PARAMS:
            errs.append(f"{k}: unknown parameter")
    for k in INT_PARAMS & set(p):
        v = p[k]
        vals = v if isinstance(v, list) else [v]
        if not all(isinstance(x, int) and not isinstance(x, bool) and x >= 0 for x in vals):
            errs.append(f"{k}: must be a nonnegative integer")
    need = {
        "dynamics": ["matrix"], "packing": ["group", "subgroup", "r", "ball"],
        "growth": ["group", "subgroup", "ball"], "cubing": ["group", "nu", "radius"],
    }.get(c.subcommand, [])
    if c.subcommand == "hull" and c.op in ("brunn", "caratheodory"):
        need = ["point", "set"]
    elif c.subcommand == "hull":
        need = ["group", "subgroup", "radius"]
    if c.subcommand == "sol" and c.op in ("lower", "upper"):
        need = ["p1", "p2"]
    if c.subcommand == "sol" and c.op == "distortion":
        need = ["matrix"]
    if c.subcommand == "dynamics" and c.op == "intersection":
        need = ["matrix", "z", "w", "a", "window"]
    if c.subcommand == "dynamics" and c.op in ("packing-bound", "window"):
        need = ["matrix", "D"]
    if c.subcommand == "dynamics" and c.op == "norm":
        need = ["matrix", "delta"]
    for k in need:
        if k not in p:
            errs.append(f"{k}: required for {c.subcommand} {c.op}")
    if "r" in p and "ball" in p:
        rs = p["r"] if isinstance(p["r"], list) else [p["r"]]
        if any(not isinstance(r, int) or r < 1 for r in rs):
            errs.append("r: must be positive integers")
        elif isinstance(p["ball"], int) and any(r > p["ball"] for r in rs):
            errs.append("r: must not exceed the ball radius R")
    if "group" in p:
        try:
            gr.parse_group(p["group"])
        except ValidationError as exc:
            errs.append(f"group: {exc}")
    return errs


# ---------------------------------------------------------------------------
# experiment runners; each returns (rows, extra outputs, flags)

def _group(p):
    return gr.parse_group(p["group"])


def _subgroup(G, text):
    text = (text or "").strip()
    if text in ("", "e", "{1}", "{e}", "1"):
        return []
    return gr.parse_generators(G, text)


def _vec(text):
    return tuple(Fraction(x.strip()) for x in str(text).split(","))


def _run_dynamics(c):
    from . import dynamics as dy
    p = c.params
    M = dy.IntAutomorphism(p["matrix"])
    if c.op == "hyperbolic":
        return [{"matrix": M.to_text(), "hyperbolic": dy.is_hyperbolic(M)}], {}, {}
    if c.op == "spectrum":
        s = dy.spectrum(M)
        rows = [{"re": r.value.real, "im": r.value.imag, "modulus": abs(r.value),
                 "error_radius": r.radius, "multiplicity": r.multiplicity} for r in s.roots]
        return rows, {"spectral_radius": s.spectral_radius, "charpoly": list(s.charpoly)}, {}
    if c.op == "splitting":
        s = dy.spectral_splitting(M)
        rows = [{"space": k, "dim": v} for k, v in zip(("minus", "plus", "zero"), s.dims())]
        flags = {"exact": s.exact_minus and s.exact_plus and s.exact_zero}
        return rows, {}, flags
    if c.op == "norm":
        n = dy.adapted_norm(M, float(p["delta"]))
        return [{"delta": n.delta, "certified_bound": n.certified_bound,
                 "spectral_radius": n.spectral_radius, "epsilon": n.epsilon}], {}, {}
    if c.op == "intersection":
        res = dy.orbit_intersection_count(_ints(p["z"]), _ints(p["w"]), _ints(p["a"]), M,
                                          int(p["window"]))
        rows = [{"i": i, "j": j} for i, j in res.pairs]
        return rows, {"count": res.count, "total_count": res.total_count}, \
            {"certified": res.certified}
    if c.op == "packing-bound":
        D = float(p["D"])
        return [{"D": D, "bound": dy.packing_bound_estimate(D, M)}], {}, {}
    if c.op == "window":
        w = dy.certified_window(M, float(p["D"]))
        return [{"D": w.D, "window": w.window, "tail_bound": w.tail_bound}], {}, {}
    basis = dy.invariant_lattice(M)
    return [{"basis_vector": list(b)} for b in basis], {}, {}


def _ints(text):
    return tuple(int(x) for x in str(text).split(","))


def _as_list(v):
    return v if isinstance(v, list) else [int(x) for x in str(v).split(",")]


def _run_packing(c):
    from .packing import packing_profile
    p = c.params
    G = _group(p)
    prof = packing_profile(G, _subgroup(G, p["subgroup"]), _as_list(p["r"]), int(p["ball"]))
    rows = [{"r": r, "R": R, "N_hat": n, "exact": e, "unconfirmed_pairs": t}
            for r, R, n, e, t in prof.rows()]
    truncated = any(not row["exact"] or row["unconfirmed_pairs"] for row in rows)
    return rows, {"witnesses": prof.witnesses}, {"truncated": truncated}


def _run_growth(c):
    from .packing import coset_growth
    p = c.params
    G = _group(p)
    s = coset_growth(G, _subgroup(G, p["subgroup"]), int(p["ball"]))
    rows = [{"r": r, "count": n} for r, n in sorted(s.table.items())]
    extra = {}
    if s.fit is not None:
        extra = {"alpha": s.fit.alpha, "r_squared": s.fit.r_squared,
                 "alpha_corrected": s.fit.alpha_corrected, "C": s.fit.C}
    return rows, extra, {"truncated": not s.exact}


def _run_sol(c):
    from . import sol
    p = c.params
    if c.op == "lower":
        v = sol.sol_lower_bound(_vec(p["p1"]), _vec(p["p2"]))
        return [{"lower_bound": v}], {}, {}
    if c.op == "upper":
        res = sol.sol_path_upper(tuple(map(float, _vec(p["p1"]))),
                                 tuple(map(float, _vec(p["p2"]))), p.get("samples", 64))
        return [{"upper_bound": res.length, "legs": len(res.heights)}], {}, \
            {"converged": res.converged}
    rep = sol.distortion_check(p["matrix"], samples=p.get("samples", 200), seed=c.seed)
    ans = rep._asdict()
    return [{"quantity": k, "value": v} for k, v in ans.items()], {}, {}


def _run_hull(c):
    from . import hull, subgroup_hull as sh
    p = c.params
    if c.op in ("brunn", "caratheodory"):
        S = [_vec(s) for s in str(p["set"]).split(";")]
        x = _vec(p["point"])
        if c.op == "caratheodory":
            d = hull.caratheodory_decompose(x, S)
            return [{"point": [str(v) for v in pt], "weight": str(w)}
                    for pt, w in zip(d.points, d.weights)], {}, {}
        w = hull.brunn_witness(x, S)
        return [{"depth": w.depth()}], {"witness": w.to_json()}, {}
    G = _group(p)
    H = _subgroup(G, p["subgroup"])
    radii = _as_list(p["radius"])
    if c.op == "quasiconvexity":
        rep = sh.quasiconvexity_estimate(G, H, radii, samples=p.get("samples", 32),
                                         max_pairs=p.get("max_pairs"), seed=c.seed,
                                         margin=p.get("margin", 3))
        rows = [{"R": r, "nu_hat": v, "pairs": rep.pairs[r]} for r, v in sorted(rep.table.items())]
        return rows, {"witnesses": rep.witnesses}, {}
    if c.op == "cocompactness":
        rows = []
        for r in radii:
            res = sh.cocompactness_radius(G, H, r, samples=p.get("samples", 4000), seed=c.seed,
                                          margin=p.get("margin", 3))
            rows.append({"R": r, "c_hat": res.c_hat, "evaluated": res.evaluated,
                         "certified": res.certified})
        return rows, {}, {}
    if c.op == "powers":
        rows = []
        for r in radii:
            res = sh.euclidean_powers_in_subgroup(G, H, r)
            rows.append({"R": r, "exponents": res.exponents, "lattice": res.lattice,
                         "complete": res.complete})
        return rows, {}, {"truncated": not all(row["complete"] for row in rows)}
    rows = []
    for r in radii:
        v = sh.virtual_product_decomposition(G, H, r)
        rows.append({"R": r, "index": v.index, "index_previous": v.index_previous,
                     "stable": v.stable, "A": v.A, "F": v.F, "degenerate": v.degenerate})
    return rows, {}, {"truncated": not rows[-1]["stable"]}


def _run_cubing(c):
    from . import cubing as cb
    p = c.params
    G = _group(p)
    extra = [_subgroup(G, e) for e in str(p["extra"]).split("/")] if p.get("extra") else []
    S = cb.sigma_system(G, _subgroup(G, p.get("subgroup", "")), int(p["nu"]),
                        int(p["radius"]), p.get("margin"), extra)
    if c.op == "width":
        w = cb.width_estimate(S, p.get("cap", 8))
        return [{"pairs": len(S.pairs), "width": w.width}], {}, {"lower_bound": w.lower_bound}
    if c.op == "separation":
        rows = [{"base": i, **vars(cb.separation_to_nestedness_check(S, i))}
                for i in range(len(S.bases))]
        return rows, {}, {"truncated": any(r["ambiguous"] for r in rows)}
    cx = cb.build_cubing(S, vertex_cap=p.get("cap", cb.VERTEX_CAP))
    rows = [{"dimension": k, "count": len(v)} for k, v in sorted(cx.cubes.items())]
    rows = [{"dimension": 0, "count": len(cx.vertices)}, {"dimension": 1, "count": len(cx.edges)}] \
        + rows
    extra = {"complex": cx.to_json(), "basic_connected": cx.basic_connected}
    return rows, extra, {}


def _run_check(c):
    from . import checks
    rows = checks.run_all(seed=c.seed)
    return rows, {}, {"failed": any(not r["pass"] for r in rows)}


RUNNERS = {"dynamics": _run_dynamics, "packing": _run_packing, "growth": _run_growth,
           "sol": _run_sol, "hull": _run_hull, "cubing": _run_cubing, "check": _run_check}


def run(config):
    """Validate and run one experiment; returns the result record dict."""
    errs = validate(config)
    if errs:
        raise ValidationError(errs)
    rows, extra, flags = RUNNERS[config.subcommand](config)
    return {"experiment": f"{config.subcommand}.{config.op}", "params": config.to_dict(),
            "rows": fmt_num(rows), "outputs": fmt_num(extra), "flags": fmt_num(flags)}


def render(record, fmt):
    if fmt == "json":
        return json.dumps(record, indent=2, sort_keys=True) + "\n"
    rows = record["rows"]
    keys = []
    for r in rows:
        for k in r:
            if k not in keys:
                keys.append(k)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(keys)
    for r in rows:
        w.writerow([json.dumps(r.get(k)) if isinstance(r.get(k), (list, dict)) else r.get(k)
                    for k in keys])
    return buf.getvalue()


def _parse_value(k, v):
    if k in INT_PARAMS:
        try:
            return [int(x) for x in v.split(",")] if "," in v else int(v)
        except ValueError:
            return v
    if k == "r":
        try:
            return [int(x) for x in v.split(",")] if "," in v else int(v)
        except ValueError:
            return v
    return v


def build_parser():
    ap = argparse.ArgumentParser(prog="ggtlab", description=__doc__.splitlines()[0])
    ap.add_argument("subcommand", nargs="?", choices=sorted(OPS))
    ap.add_argument("op", nargs="?")
    ap.add_argument("--op", dest="op_flag")
    ap.add_argument("--config")
    ap.add_argument("--seed", type=int)
    ap.add_argument("--format", choices=["csv", "json"])
    ap.add_argument("--output", "-o")
    for k in PARAMS:
        ap.add_argument(f"--{k.replace('_', '-')}", dest=k)
    return ap


def config_from_args(argv):
    ns = build_parser().parse_args(argv)
    base = {}
    if ns.config:
        try:
            with open(ns.config) as fh:
                base = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ValidationError(f"config: cannot read {ns.config}: {exc}") from exc
    cfg = ExperimentConfig.from_dict(base) if base else ExperimentConfig(ns.subcommand)
    if ns.subcommand:
        cfg.subcommand = ns.subcommand
    op = ns.op_flag or ns.op
    if op:
        cfg.op = op
    for k in PARAMS:
        v = getattr(ns, k)
        if v is not None:
            cfg.params[k] = _parse_value(k, v)
    if ns.seed is not None:
        cfg.seed = ns.seed
    if ns.format:
        cfg.format = ns.format
    if ns.output:
        cfg.output = ns.output
    return cfg


def main(argv=None):
    argv = sys.argv[1:] if argv is None else argv
    try:
        cfg = config_from_args(argv)
        record = run(cfg)
    except ValidationError as exc:
        print(json.dumps({"error": exc.code, "problems": exc.problems}), file=sys.stderr)
        return EXIT_VALIDATION
    except GgtError as exc:
        print(json.dumps({"error": exc.code, "message": str(exc)}), file=sys.stderr)
        return EXIT_MODULE
    text = render(record, cfg.format)
    if cfg.output:
        with open(cfg.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if record["flags"].get("truncated"):
        return EXIT_TRUNCATED
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
