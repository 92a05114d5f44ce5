"""Command-line front end.

Exit codes: 0 success, 1 validation error in the input, 2 a criterion not met
under ``--strict``, 3 internal diagnostic (a check that should never fail).
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any, Sequence

from . import __version__
from .case_enumerator import (
    enumerate_case5b,
    recheck_all,
    recheck_trace,
    replay_induction,
    verify_solution,
)
from .chain_classify import admissible_characteristics, classify, enumerate_valid_chains
from .errors import CriterionNotMet, FiberError
from .fundamental_cycle import check_self_intersection, compute_fundamental_cycle, verify_minimality
from .lattice_core import DEFAULT_SUBCURVE_CAP, Divisor, FiberConfiguration, is_1_connected, is_connected
from .loader import document_from_config, load
from .render import diagram
from .rr_calculus import (
    conic_test,
    gg_criterion,
    generation_degree_bound,
    omega_fiber_power,
    twist_degree_formula,
    vanishing_table,
)


def minus_two_components(cfg: FiberConfiguration) -> list[list[int]]:
    """Connected components of the subgraph spanned by the (-2)-curves."""
    left = set(cfg.minus_two_curves())
    out = []
    while left:
        start = min(left)
        comp, stack = {start}, [start]
        while stack:
            i = stack.pop()
            for j in cfg.neighbors(i):
                if j in left and j not in comp:
                    comp.add(j)
                    stack.append(j)
        out.append(sorted(comp))
        left -= comp
    return out


def _jsonable(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, Divisor):
        return list(obj.coeffs)
    return obj


def _write_json(path: str | None, report: dict) -> None:
    if path:
        Path(path).write_text(json.dumps(_jsonable(report), indent=2) + "\n")


def cmd_classify(args) -> int:
    cfg = load(args.file)
    report = {"file": args.file, "chains": []}
    mismatch = False
    for chain in minus_two_components(cfg):
        d = classify(chain, cfg)
        chars = admissible_characteristics(d)
        ok = cfg.characteristic in chars
        mismatch |= not ok
        status = "char-admissible" if ok else f"char-mismatch (allowed: {chars}, have {cfg.characteristic})"
        print(f"{d}, {status}  curves={list(d.nodes)}")
        report["chains"].append(
            {"family": str(d.family), "label": d.label, "length": d.length, "base_degree": d.base_degree,
             "node_degrees": d.node_degrees, "nodes": d.nodes, "char_admissible": ok,
             "allowed_characteristics": str(chars)}
        )
    if not report["chains"]:
        print("no (-2)-curves")
    _write_json(args.json, report)
    if mismatch and args.strict:
        raise CriterionNotMet("characteristic outside the admissible set")
    return 0


def cmd_fundcycle(args) -> int:
    cfg = load(args.file)
    report = {"file": args.file, "cycles": []}
    for chain in minus_two_components(cfg):
        fc = compute_fundamental_cycle(chain, cfg)
        identity = check_self_intersection(fc)
        minimal = verify_minimality(fc.cycle, chain, cfg, args.cap_subcurves)
        print(f"chain {chain}: Z = {list(fc.multiplicities)}  Z^2 = {fc.self_intersection} "
              f"(-2n = {-2 * fc.min_degree}: {'ok' if identity else 'FAIL'})  minimal: {minimal}")
        report["cycles"].append({"chain": chain, "Z": fc.multiplicities, "Z^2": fc.self_intersection,
                                 "min_degree": fc.min_degree, "identity": identity, "minimal": minimal})
        if not (identity and minimal):
            raise FiberError(f"fundamental cycle of chain {chain} failed its own checks")
    _write_json(args.json, report)
    return 0


def cmd_check(args) -> int:
    cfg = load(args.file)
    m = args.m
    cap = args.cap_subcurves
    cfg.validate_definiteness()
    report: dict = {"file": args.file, "m": m, "components": []}
    failed = []
    F = cfg.fiber_divisor()
    print(f"{'curve':>5} {'n':>3} {'C^2':>5} {'K.C':>4} {'deg w':>6} {'conic':>6} {'twist':>6} {'gg':>6}")
    for c in cfg.curves:
        conic = conic_test(c)
        twist = twist_degree_formula(m, c.id, F, cfg) if cfg.is_full_fiber else None
        gg = gg_criterion(omega_fiber_power(m, cfg), c.id, cfg)
        print(f"{'C' + str(c.id):>5} {c.field_degree:>3} {c.self_int:>5} {c.canonical_deg:>4} "
              f"{c.omega_degree:>6} {str(conic.is_conic):>6} {str(twist):>6} {str(gg):>6}")
        report["components"].append({"id": c.id, "omega_degree": c.omega_degree, "conic": conic.is_conic,
                                     "twist_degree": twist, "gg_omega_m": gg})
    if cfg.is_full_fiber:
        table = vanishing_table(cfg, (m,), cap)
        for mm, ok in table["omega_m_minus_fiber"].items():
            print(f"H1 vanishing of omega^{mm}(-X0) on X0: {ok}")
            if not ok:
                failed.append(f"omega^{mm}(-X0)")
        for (mm, i, j), ok in table["multiple_fiber"].items():
            print(f"H1 vanishing of omega^{mm}(-{j}Y) on {i - j}Y: {ok}")
            if not ok:
                failed.append(f"omega^{mm}(-{j}Y) on {i - j}Y")
        one_conn = is_1_connected(F, cfg, cap)
        bound = generation_degree_bound(cfg, cap)
        print(f"1-connected: {one_conn}   genus: {cfg.genus()}   generation degree bound: {bound}")
        report.update({"vanishing": table, "one_connected": one_conn, "generation_bound": bound,
                       "genus": cfg.genus()})
    else:
        print(f"connected: {is_connected(Divisor((1,) * cfg.size), cfg)} (not a full fiber; fiber checks skipped)")
    _write_json(args.json, report)
    if failed and args.strict:
        raise CriterionNotMet("criteria not met: " + ", ".join(failed))
    return 0


def cmd_enumerate_chains(args) -> int:
    chains = enumerate_valid_chains(args.max_nodes, args.max_n, args.workers)
    report = {"max_nodes": args.max_nodes, "max_n": args.max_n, "chains": []}
    for cfg in chains:
        print(cfg.name)
        if args.diagrams:
            print(diagram(cfg))
        report["chains"].append({"name": cfg.name, "config": document_from_config(cfg).to_dict()})
    print(f"{len(chains)} chains")
    _write_json(args.json, report)
    return 0


def cmd_enumerate_5b(args) -> int:
    res = enumerate_case5b(args.max_nodes, args.max_n, args.characteristic, args.strict, args.workers,
                           include_glued=not args.no_glued)
    for sol in res.admissible:
        problems = verify_solution(sol)
        if problems:
            raise FiberError(f"{sol.cfg.name}: " + "; ".join(problems))
        flag = "  [char 2 only]" if sol.char2_only else ""
        print(f"{sol.cfg.name}  m/n={sol.m_over_n}{flag}")
        print(diagram(sol.cfg, sol.n))
    bad = recheck_all(res.excluded)
    if bad:
        raise FiberError(f"{len(bad)} exclusion certificates failed to re-evaluate")
    print(f"admissible: {len(res.admissible)}  glued (disconnected D): {len(res.glued)}  "
          f"certificates: {len(res.excluded)} (all re-checked)")
    for tag, count in res.stats["tag_counts"].items():
        print(f"  {tag}: {count}")
    if res.unmatched_shapes:
        print("listed diagrams not found: " + ", ".join(res.unmatched_shapes))
    report = {
        "stats": res.stats,
        "unmatched_shapes": res.unmatched_shapes,
        "admissible": [_solution_json(s) for s in res.admissible],
        "glued": [_solution_json(s) for s in res.glued],
        "excluded": [{"branch": c.branch, "tag": c.tag, "witness": c.witness} for c in res.excluded],
    }
    _write_json(args.json, report)
    if res.unmatched_shapes and args.strict:
        raise CriterionNotMet("some listed diagrams were not reproduced")
    return 0


def _solution_json(sol) -> dict:
    return {"name": sol.cfg.name, "shape": sol.shape, "n": sol.n, "m": sol.m, "alpha": sol.alpha,
            "chains": sol.chain_labels, "char2_only": sol.char2_only,
            "config": document_from_config(sol.cfg).to_dict()}


def cmd_replay(args) -> int:
    cfg = load(args.file)
    cfg.validate_definiteness()
    report = {"file": args.file, "traces": []}
    for m in args.m:
        trace = replay_induction(cfg, m, args.cap_subcurves)
        problems = recheck_trace(trace, cfg)
        print(f"m = {m}: {len(trace.steps)} steps, tags {' '.join(trace.tags)}")
        if args.verbose:
            for st in trace.steps:
                sub = f"({st.sub})" if st.sub else ""
                print(f"  Y={list(st.remaining.coeffs)} C{st.chosen} case {st.tag}{sub} "
                      f"twist={st.evidence['twist_degree']} h1_vanishing={st.evidence['h1_vanishing']}")
        if problems:
            raise FiberError("trace failed to re-validate: " + "; ".join(problems))
        report["traces"].append({"m": m, "steps": [
            {"remaining": st.remaining, "chosen": st.chosen, "tag": st.tag, "sub": st.sub, "evidence": st.evidence}
            for st in trace.steps]})
    _write_json(args.json, report)
    return 0


def parse_args(argv: Sequence[str] | None = None) -> argparse.Namespace:
    parser = argparse.ArgumentParser(prog="fiberlattice", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, file=True):
        if file:
            p.add_argument("file", help="configuration JSON")
        p.add_argument("--json", metavar="PATH", help="also write a machine-readable report")
        p.add_argument("--strict", action="store_true", help="turn unmet criteria into exit code 2")
        p.add_argument("--cap-subcurves", type=int, default=DEFAULT_SUBCURVE_CAP)

    common(sub.add_parser("classify", help="classify each (-2)-chain"))
    common(sub.add_parser("fundcycle", help="fundamental cycle of each (-2)-chain"))
    p = sub.add_parser("check", help="degree criteria per component and fiber")
    common(p)
    p.add_argument("--m", type=int, default=2)
    p = sub.add_parser("enumerate-chains", help="all valid chains up to a size")
    common(p, file=False)
    p.add_argument("--max-nodes", type=int, default=6)
    p.add_argument("--max-n", type=int, default=1)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--diagrams", action="store_true")
    p = sub.add_parser("enumerate-5b", help="configurations C + D with a (-3)-type rational component")
    common(p, file=False)
    p.add_argument("--max-nodes", type=int, default=9)
    p.add_argument("--max-n", type=int, default=1)
    p.add_argument("--characteristic", type=int, default=None)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--no-glued", action="store_true", help="skip configurations with disconnected D")
    p = sub.add_parser("replay", help="replay the component-peeling induction")
    common(p)
    p.add_argument("--m", type=int, nargs="+", default=[2])
    p.add_argument("-v", "--verbose", action="store_true")
    return parser.parse_args(argv)


COMMANDS = {
    "classify": cmd_classify,
    "fundcycle": cmd_fundcycle,
    "check": cmd_check,
    "enumerate-chains": cmd_enumerate_chains,
    "enumerate-5b": cmd_enumerate_5b,
    "replay": cmd_replay,
}


def main(argv: Sequence[str] | None = None) -> int:
    args = parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except FiberError as exc:
        kind = type(exc).__name__.removesuffix("Error")
        print(f"error [{kind}]: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    raise SystemExit(main())
