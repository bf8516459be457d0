"""Command-line front end.

Exit codes: 0 when every check passes, 1 when a mathematical check fails,
2 on unreadable or malformed input.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Optional

from . import arnold, equipoly, flowcat, strata
from .novikov import DEFAULT_PRECISION

SCHEMA = "1"
EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


@dataclass
class RunConfig:
    precision: int = DEFAULT_PRECISION
    two_n: Optional[int] = None
    fmt: str = "text"
    seed: int = 0

    def __post_init__(self):
        if self.precision < 1:
            raise InputError("precision must be at least 1")

    def rng(self):
        return random.Random(self.seed)


# -- input ----------------------------------------------------------------------------


def fixture_names():
    root = resources.files("floeralg") / "fixtures"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def resolve(name_or_path):
    """A readable path, or the name of a bundled fixture (with or without .json)."""
    p = Path(name_or_path)
    if p.is_file():
        return p.read_text()
    stem = name_or_path[:-5] if name_or_path.endswith(".json") else name_or_path
    res = resources.files("floeralg") / "fixtures" / f"{stem}.json"
    if res.is_file():
        return res.read_text()
    raise InputError(f"no such file or fixture: {name_or_path}")


def load_json(name_or_path):
    text = resolve(name_or_path)
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{name_or_path}: not valid JSON ({exc})") from None


def _flow_category(doc, cfg):
    fc = flowcat.flow_category_from_json(doc)
    if cfg.two_n is not None:
        fc = flowcat.regrade(fc, cfg.two_n)
    return fc


def _complex(fc, cfg, label="flow category"):
    res = flowcat.validate(fc)
    if not res:
        raise InputError(f"invalid {label}: " + "; ".join(map(str, res.violations)))
    return flowcat.build_complex(fc, cfg.precision)


# -- output ---------------------------------------------------------------------------


def emit(cfg, report, lines, out):
    if cfg.fmt == "json":
        doc = {"schema": SCHEMA}
        doc.update(report)
        out.write(json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n")
    else:
        out.write("\n".join(lines) + "\n")


# -- subcommands ----------------------------------------------------------------------


def cmd_check(args, cfg, out):
    doc = load_json(args.input)
    kind = doc.get("kind", "flow_category") if isinstance(doc, dict) else None
    checks = {}
    try:
        if kind == "flow_category":
            fc = _flow_category(doc, cfg)
            v = flowcat.validate(fc)
            checks["validate"] = v
            if v:
                checks["d_squared"] = flowcat.check_d_squared(flowcat.build_complex(fc, cfg.precision))
        elif kind == "bimodule":
            b = flowcat.bimodule_from_json(doc)
            v = flowcat.validate_bimodule(b)
            checks["validate"] = v
            if v:
                src = _complex(b.source, cfg, "source")
                tgt = _complex(b.target, cfg, "target")
                checks["d_squared_source"] = flowcat.check_d_squared(src)
                checks["d_squared_target"] = flowcat.check_d_squared(tgt)
                checks["chain_map"] = flowcat.check_chain_map(flowcat.chain_map(b, cfg.precision), src, tgt)
        elif kind == "homotopy":
            morse_fc = flowcat.flow_category_from_json(doc["morse"])
            floer_fc = flowcat.flow_category_from_json(doc["floer"])
            pss_b = flowcat.bimodule_from_json(doc["pss"], morse_fc, floer_fc)
            ssp_b = flowcat.bimodule_from_json(doc["ssp"], floer_fc, morse_fc)
            h_b = flowcat.bimodule_from_json(doc["hmtp"], morse_fc, morse_fc)
            pearl_b = flowcat.bimodule_from_json(doc["pearl"], morse_fc, morse_fc)
            for name, b in (("pss", pss_b), ("ssp", ssp_b), ("hmtp", h_b), ("pearl", pearl_b)):
                checks[f"validate_{name}"] = flowcat.validate_bimodule(b)
            if all(checks.values()):
                morse = _complex(morse_fc, cfg, "morse category")
                floer = _complex(floer_fc, cfg, "floer category")
                maps = {k: flowcat.chain_map(b, cfg.precision)
                        for k, b in (("pss", pss_b), ("ssp", ssp_b), ("hmtp", h_b), ("pearl", pearl_b))}
                checks["d_squared_morse"] = flowcat.check_d_squared(morse)
                checks["d_squared_floer"] = flowcat.check_d_squared(floer)
                checks["chain_map_pss"] = flowcat.check_chain_map(maps["pss"], morse, floer)
                checks["chain_map_ssp"] = flowcat.check_chain_map(maps["ssp"], floer, morse)
                checks["homotopy"] = flowcat.check_homotopy(
                    maps["pearl"], maps["ssp"], maps["pss"], maps["hmtp"], morse, floer)
        else:
            raise InputError(f"unknown document kind {kind!r}")
    except (KeyError, TypeError) as exc:
        raise InputError(f"malformed document: {exc!r}") from None
    ok = all(bool(c) for c in checks.values())
    report = {
        "command": "check",
        "kind": kind,
        "ok": ok,
        "checks": {k: {"ok": bool(c), "violations": [str(v) for v in c.violations]}
                   for k, c in checks.items()},
    }
    lines = []
    for k, c in checks.items():
        lines.append(f"{k}: {'ok' if c else 'FAILED'}")
        lines += [f"  {v}" for v in c.violations]
    lines.append("PASS" if ok else "FAIL")
    emit(cfg, report, lines, out)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_homology(args, cfg, out):
    fc = _flow_category(load_json(args.input), cfg)
    cx = _complex(fc, cfg)
    d2 = flowcat.check_d_squared(cx)
    if not d2:
        lines = ["d^2 != 0:"] + [f"  {v}" for v in d2.violations]
        emit(cfg, {"command": "homology", "ok": False,
                   "violations": [str(v) for v in d2.violations]}, lines, out)
        return EXIT_FAIL
    H = flowcat.homology(cx)
    report = {
        "command": "homology",
        "ok": True,
        "two_n": cx.two_n,
        "precision": cfg.precision,
        "classes": {str(i): s.to_json() for i, s in sorted(H.items())},
    }
    lines = [f"H{i}: {s.describe()}" for i, s in sorted(H.items())]
    lines.append(f"(grading mod {cx.two_n}, certified to T^{cfg.precision})" if cx.two_n
                 else f"(integer grading, certified to T^{cfg.precision})")
    emit(cfg, report, lines, out)
    return EXIT_OK


def _homology_data(args):
    doc = load_json(args.input)
    h, N = arnold.homology_from_json(doc)
    if args.minimal_chern is not None:
        N = args.minimal_chern
    if N is None or N < 0:
        raise InputError("minimal Chern number missing (use --minimal-chern)")
    return h, N


def cmd_arnold(args, cfg, out):
    h, N = _homology_data(args)
    classes = arnold.collapse(h, N)
    betti = sum(h.betti(j) for j in h.degrees())
    bound = arnold.arnold_bound(h, N)
    table = [{"class": c.residue, "rank": c.structure.rank,
              "torsion": list(c.structure.invariant_factors), "tau": arnold.tau(c)}
             for c in classes]
    report = {"command": "arnold", "minimal_chern": N, "betti_sum": betti,
              "table": table, "bound": bound}
    lines = [f"grading mod {2 * N}" if N else "integer grading", "class  rank  torsion  tau"]
    for row in table:
        tors = ",".join(map(str, row["torsion"])) or "-"
        lines.append(f"{row['class']:>5}  {row['rank']:>4}  {tors:>7}  {row['tau']:>3}")
    lines.append(f"betti sum: {betti}")
    lines.append(f"bound: {bound}")
    emit(cfg, report, lines, out)
    return EXIT_OK


def cmd_verify(args, cfg, out):
    h, N = _homology_data(argparse.Namespace(input=args.reference, minimal_chern=args.minimal_chern))
    fc = flowcat.flow_category_from_json(load_json(args.complex))
    fc = flowcat.regrade(fc, cfg.two_n if cfg.two_n is not None else 2 * N)
    cx = _complex(fc, cfg)
    d2 = flowcat.check_d_squared(cx)
    if not d2:
        raise InputError("complex has d^2 != 0: " + "; ".join(map(str, d2.violations)))
    try:
        rep = arnold.verify_bound_chain(cx, h, N, raise_on_failure=False)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    lines = [f"{'ok' if c.holds else 'FAILED':>6}  {c.name}  ({c.lhs} vs {c.rhs}, slack {c.slack})"
             for c in rep.checks]
    lines.append(f"rank CF = {rep.total_rank}, bound = {rep.bound}, slack {rep.slack}")
    lines.append("PASS" if rep.ok else "FAIL")
    report = {"command": "verify", "minimal_chern": N}
    report.update(rep.to_json())
    emit(cfg, report, lines, out)
    return EXIT_OK if rep.ok else EXIT_FAIL


# equipoly ---------------------------------------------------------------------------


def _ints(s):
    try:
        return [int(x) for x in s.replace(" ", "").split(",") if x != ""]
    except ValueError:
        raise InputError(f"expected comma-separated integers, got {s!r}") from None


def parse_weights(s, group):
    """Coordinates separated by ';', components by ','.  For a cyclic group
    a plain comma list gives one residue per coordinate."""
    s = s.strip()
    if not s:
        return []
    if len(group) == 1 and ";" not in s:
        return [(w,) for w in _ints(s)]
    return [tuple(_ints(part)) for part in s.split(";") if part.strip()]


def _rep(group, weights):
    try:
        return equipoly.AbelianRep(tuple(group), parse_weights(weights, group))
    except ValueError as exc:
        raise InputError(str(exc)) from None


def cmd_equipoly(args, cfg, out):
    group = _ints(args.group) or [1]
    V, W = _rep(group, args.v_weights), _rep(group, args.w_weights)
    if args.degree < 0:
        raise InputError("degree must be non-negative")
    if args.action == "dim":
        n = equipoly.dim_poly(V, W, args.degree)
        report = {"command": "equipoly dim", "group": list(V.group), "dim_V": V.dim,
                  "dim_W": W.dim, "degree": args.degree, "dim_poly": n}
        emit(cfg, report, [f"dim Poly_{args.degree}^G(V, W) = {n}"], out)
        return EXIT_OK
    gens = parse_weights(args.subgroup, group) if args.subgroup else []
    try:
        H = equipoly.subgroup(V, gens)
        rep = equipoly.check_dimension_formula(V, W, args.degree, H, args.trials, cfg.rng())
    except equipoly.EmptyStratum as exc:
        raise InputError(str(exc)) from None
    except ValueError as exc:
        raise InputError(str(exc)) from None
    report = {"command": "equipoly check", "group": list(V.group), "degree": args.degree,
              "subgroup": sorted(list(g) for g in H)}
    report.update(rep.to_json())
    lines = [
        f"|H| = {len(H)}, dim Poly = {rep.dim_poly}, dim V^H = {rep.dim_v_fixed}, dim W^H = {rep.dim_w_fixed}",
        f"evaluation rank over {len(rep.ranks)} trials: min {min(rep.ranks)} max {max(rep.ranks)}",
        f"surjective: {rep.surjective}",
        f"zero-locus dimension on the stratum: {rep.expected_dimension}",
        f"smallest surjective degree: {rep.min_degree}",
    ]
    emit(cfg, report, lines, out)
    return EXIT_OK if rep.surjective else EXIT_FAIL


# strata -----------------------------------------------------------------------------


def _word_poset(args):
    if args.poset:
        P = strata.poset_from_json(load_json(args.poset))
        lo = args.lower if args.lower is not None else _only(P.minimal())
        hi = args.upper if args.upper is not None else _only(P.maximal())
        for x in (lo, hi):
            if x not in P.elements:
                raise InputError(f"{x!r} is not an element of the poset")
    else:
        if args.chain < 2:
            raise InputError("chain length must be at least 2")
        P = strata.chain_poset(args.chain)
        lo, hi = 0, args.chain - 1
    try:
        return strata.enumerate_word_poset(P, lo, hi)
    except ValueError as exc:
        raise InputError(str(exc)) from None


def _only(xs):
    xs = list(xs)
    if len(xs) != 1:
        raise InputError("poset needs --from/--to: extremal element is not unique")
    return xs[0]


def cmd_strata(args, cfg, out):
    W = _word_poset(args)
    inner = [r for r in W.ambient.elements if W.ambient.lt(W.p, r) and W.ambient.lt(r, W.q)]
    fact = {str(r): strata.check_boundary_factorization(W, r) for r in inner}
    depths = {}
    for w in W.elements:
        depths[W.depth[w]] = depths.get(W.depth[w], 0) + 1
    report = {"command": "strata", "words": len(W.elements), "interior": len(inner),
              "depth_counts": {str(k): v for k, v in sorted(depths.items())},
              "factorization": fact}
    ok = all(fact.values())
    lines = [f"words: {len(W.elements)} (interior elements: {len(inner)})",
             "depth counts: " + ", ".join(f"{k}:{v}" for k, v in sorted(depths.items()))]
    lines += [f"boundary factorization at {r}: {'ok' if v else 'FAILED'}" for r, v in fact.items()]
    if args.samples:
        X = strata.cone_model(W)
        rep = strata.check_outer_product(X, X, samples=args.samples, rng=cfg.rng())
        report["outer_product"] = {"samples": rep.samples, "corner_samples": rep.corner_samples,
                                   "failures": [str(f) for f in rep.failures[:20]], "ok": rep.ok}
        lines.append(f"outer collar identities: {rep.samples} samples, {rep.corner_samples} corners, "
                     f"{'ok' if rep.ok else 'FAILED'}")
        ok = ok and rep.ok
    report["ok"] = ok
    emit(cfg, report, lines, out)
    return EXIT_OK if ok else EXIT_FAIL


# -- entry point ----------------------------------------------------------------------


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--precision", type=int, default=argparse.SUPPRESS,
                        help=f"working T-adic precision (default {DEFAULT_PRECISION})")
    common.add_argument("--format", choices=["text", "json"], default=argparse.SUPPRESS)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    common.add_argument("--two-n", type=int, default=argparse.SUPPRESS,
                        help="regrade the input modulo this even number (0 for integer grading)")

    ap = argparse.ArgumentParser(prog="floeralg", parents=[common],
                                 description="Novikov-ring chain complexes, Arnold-type bounds, "
                                             "corner strata and equivariant polynomial checks.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", parents=[common], help="validate a flow category, bimodule or homotopy file")
    p.add_argument("input", help="JSON file or bundled fixture name")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("homology", parents=[common], help="homology over the Novikov ring")
    p.add_argument("input")
    p.set_defaults(func=cmd_homology)

    p = sub.add_parser("arnold", parents=[common], help="lower bound from integral homology data")
    p.add_argument("input")
    p.add_argument("--minimal-chern", type=int)
    p.set_defaults(func=cmd_arnold)

    p = sub.add_parser("verify", parents=[common], help="walk the rank inequalities for a complex")
    p.add_argument("complex", help="flow category of the complex")
    p.add_argument("reference", help="integral homology data")
    p.add_argument("--minimal-chern", type=int)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("equipoly", parents=[common], help="equivariant polynomial maps")
    p.add_argument("action", choices=["dim", "check"])
    p.add_argument("--group", required=True, help="cyclic orders, e.g. 2,2")
    p.add_argument("--v-weights", required=True, help="e.g. '1,0;0,1'")
    p.add_argument("--w-weights", required=True)
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--subgroup", default="", help="generators of H, same syntax as weights")
    p.add_argument("--trials", type=int, default=50)
    p.set_defaults(func=cmd_equipoly)

    p = sub.add_parser("strata", parents=[common], help="word posets and collar identities")
    src = p.add_mutually_exclusive_group()
    src.add_argument("--chain", type=int, default=4)
    src.add_argument("--poset", help="poset JSON file or fixture name")
    p.add_argument("--from", dest="lower")
    p.add_argument("--to", dest="upper")
    p.add_argument("--samples", type=int, default=0, help="also check outer collar identities")
    p.set_defaults(func=cmd_strata)
    return ap


def main(argv=None, out=None):
    out = out or sys.stdout
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        cfg = RunConfig(
            precision=getattr(args, "precision", DEFAULT_PRECISION),
            two_n=getattr(args, "two_n", None),
            fmt=getattr(args, "format", "text"),
            seed=getattr(args, "seed", 0),
        )
        if cfg.two_n is not None and (cfg.two_n < 0 or cfg.two_n % 2):
            raise InputError("--two-n must be a non-negative even number")
        return args.func(args, cfg, out)
    except (InputError, ValueError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
