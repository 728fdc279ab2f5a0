"""Command line entry point.  Every subcommand prints one JSON (or markdown) report.

Exit codes: 0 all asserted equalities hold, 2 usage error, 3 enumeration budget
exhausted, 4 assertion mismatch, 5 auxiliary primes disagree.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

import numpy as np

from . import __version__
from .cyclo import USAGE, OracleDisagreement
from .localfield import FieldConfig, TruncatedElement
from .quotient_oracle import DEFAULT_BUDGET, BudgetExceeded

SCHEMA = "ktype-report/1"
EXIT_OK, EXIT_USAGE, EXIT_BUDGET, EXIT_MISMATCH, EXIT_ORACLE = 0, 2, 3, 4, 5


class UsageError(ValueError):
    pass


# -- serialization ------------------------------------------------------------------

def _plain(x):
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.bool_,)):
        return bool(x)
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, (set, frozenset)):
        return sorted(_plain(v) for v in x)
    if hasattr(x, "to_json"):
        return x.to_json()
    raise TypeError(f"cannot serialize {type(x).__name__}")


def normalize(obj):
    """JSON-ready copy: tuple keys become strings, values via _plain."""
    if isinstance(obj, dict):
        return {(k if isinstance(k, str) else ",".join(map(str, k)) if isinstance(k, tuple) else str(k)):
                normalize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [normalize(v) for v in obj]
    if isinstance(obj, (str, int, float, bool)) or obj is None:
        return obj
    return normalize(_plain(obj))


def dumps(report: dict) -> str:
    return json.dumps(normalize(report), indent=2)


def _cell(v) -> str:
    if isinstance(v, (dict, list)):
        return json.dumps(v, separators=(",", ":"))
    return str(v)


def render_md(report: dict) -> str:
    """Markdown view computed from the JSON form only."""
    data = json.loads(dumps(report))
    lines = [f"# {data.get('command', 'report')}", ""]

    def section(title, val, depth):
        h = "#" * min(depth, 6)
        if isinstance(val, list) and val and all(isinstance(r, dict) for r in val):
            cols = []
            for r in val:
                cols += [k for k in r if k not in cols]
            lines.extend([f"{h} {title}", "", "| " + " | ".join(cols) + " |",
                          "|" + "---|" * len(cols)])
            for r in val:
                lines.append("| " + " | ".join(_cell(r.get(c, "")) for c in cols) + " |")
            lines.append("")
        elif isinstance(val, dict):
            flat = {k: v for k, v in val.items() if not isinstance(v, (dict, list)) or not v}
            lines.extend([f"{h} {title}", ""])
            if flat:
                lines.extend(["| key | value |", "|---|---|"])
                lines.extend(f"| {k} | {_cell(v)} |" for k, v in flat.items())
                lines.append("")
            for k, v in val.items():
                if k not in flat:
                    section(k, v, depth + 1)
        else:
            lines.extend([f"{h} {title}", "", _cell(val), ""])

    for k, v in data.items():
        if k != "command":
            section(k, v, 2)
    return "\n".join(lines).rstrip() + "\n"


# -- inputs ----------------------------------------------------------------------------

def _load_json(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        raise UsageError(f"cannot read {path}: {e}") from e


def _digest(d: dict) -> str:
    return hashlib.sha256(json.dumps(d, sort_keys=True).encode()).hexdigest()[:16]


def _cfg(args) -> FieldConfig:
    if args.p is None or args.n is None:
        raise UsageError("--p and --n are required")
    try:
        return FieldConfig(args.p, args.n, args.precision)
    except ValueError as e:
        raise UsageError(str(e)) from e


def _char(args, cfg, digests):
    from .torus_characters import CharacterSpec
    if not args.char:
        return CharacterSpec()
    d = _load_json(args.char)
    digests["char"] = _digest(d)
    try:
        return CharacterSpec.from_json(d, cfg)
    except (KeyError, ValueError, TypeError) as e:
        raise UsageError(f"bad character file: {e}") from e


def _char2(args, cfg, digests):
    from .cover_gl2 import GlCharacterSpec
    from .torus_characters import CharacterSpec
    if not args.char2:
        return GlCharacterSpec(CharacterSpec(), CharacterSpec())
    d = _load_json(args.char2)
    digests["char2"] = _digest(d)
    try:
        return GlCharacterSpec.from_json(d, cfg)
    except (KeyError, ValueError, TypeError) as e:
        raise UsageError(f"bad GL character file: {e}") from e


def _level(args, name="l", minimum=1):
    v = getattr(args, name)
    if v is None:
        raise UsageError(f"--{name} is required")
    if v < minimum:
        raise UsageError(f"--{name} must be >= {minimum}")
    return v


def _pair(s: str) -> tuple:
    try:
        v, u = (int(x) for x in s.split(","))
    except ValueError as e:
        raise UsageError(f"expected VAL,UNIT, got {s!r}") from e
    return v, u


# -- commands -------------------------------------------------------------------------

def cmd_hilbert(args, ctx):
    from .hilbert import hilbert_symbol, hilbert_symbol_direct
    cfg = _cfg(args)
    if not args.a or not args.b:
        raise UsageError("--a and --b are required")
    (va, ua), (vb, ub) = _pair(args.a), _pair(args.b)
    try:
        a, b = TruncatedElement(va, ua, cfg), TruncatedElement(vb, ub, cfg)
    except ValueError as e:
        raise UsageError(str(e)) from e
    s, sd = hilbert_symbol(a, b), hilbert_symbol_direct(a, b)
    return cfg, {"a": [va, a.unit], "b": [vb, b.unit], "exp": s.exp, "residue": s.residue(cfg),
                 "direct_exp": sd.exp, "ok": s == sd}


def cmd_verify_cocycle(args, ctx):
    from .cover_sl2 import verify_cocycle
    cfg = _cfg(args)
    level = args.level or 1
    if level not in (1, 2):
        raise UsageError("--level must be 1 or 2")
    mode = args.mode or "exhaustive"
    try:
        rep = verify_cocycle(cfg, level, mode, args.samples or 100000, args.seed)
    except OverflowError as e:
        raise BudgetExceeded(str(e)) from e
    return cfg, rep


def cmd_verify_splitting(args, ctx):
    from .cover_sl2 import verify_section, verify_splitting
    cfg = _cfg(args)
    sub = args.subgroup or "K1_j"
    if sub == "section":
        return cfg, verify_section(cfg, args.level or 2)
    if sub not in ("K1_j", "T1capK1", "B1capK1", "T1_full"):
        raise UsageError(f"unknown subgroup {sub}")
    rep = verify_splitting(cfg, sub, j=args.j if args.j is not None else 1,
                           samples=args.samples or 300, seed=args.seed)
    if sub == "T1_full":
        # either a noncommuting pair, or (abelian torus) an explicit section
        rep["ok"] = rep.get("reason") == "noncommuting pair" or bool(rep["splits"])
    else:
        rep["ok"] = bool(rep["splits"])
    return cfg, rep


def cmd_char(args, ctx):
    from .hecke_branching import level_of
    from .torus_characters import extend_character, unit_values, validate_character
    cfg = _cfg(args)
    spec = _char(args, cfg, ctx["digests"])
    on = args.on or "A"
    if args.action == "validate":
        rep = validate_character(cfg, spec, on, samples=args.samples or 300, seed=args.seed)
        return cfg, {"character": spec.to_json(), "on": on, **rep}
    if args.action == "level":
        return cfg, {"character": spec.to_json(), "level": level_of(cfg, spec), "ok": True}
    rv = validate_character(cfg, spec, "A", samples=60)
    if not rv["ok"]:
        return cfg, {"character": spec.to_json(), "validation": rv, "ok": False}
    fam = extend_character(cfg, spec)
    members = [{"i": i, "character": fam[i].to_json(), "unit_values": list(unit_values(cfg, fam[i]))}
               for i in range(len(fam))]
    distinct = len({tuple(m["unit_values"]) for m in members}) == len(members)
    return cfg, {"base": spec.to_json(), "size": len(fam), "members": members, "distinct": distinct,
                 "ok": distinct and len(fam) == cfg.n_under}


def cmd_oracle(args, ctx):
    from .hecke_branching import SLOracle, hecke_report, oracle_fits
    from .torus_characters import extend_character
    cfg = _cfg(args)
    l = _level(args)
    fam = extend_character(cfg, _char(args, cfg, ctx["digests"]))
    i, j = args.char_i or 0, args.char_j or 0
    if not oracle_fits("SL", cfg.p, l, args.budget):
        raise BudgetExceeded(f"SL2(Z/{cfg.p}^{l}) exceeds the budget {args.budget}")
    rep = hecke_report(fam, i, j, l, oracle=True, budget=args.budget, cache=SLOracle(fam, args.budget))
    return cfg, rep.to_json()


def _hecke_job(job):
    from .hecke_branching import hecke_report
    from .torus_characters import extend_character, CharacterSpec
    cfgd, specd, i, j, l, budget = job
    cfg = FieldConfig.from_json(cfgd)
    fam = extend_character(cfg, CharacterSpec.from_json(specd, cfg))
    return hecke_report(fam, i, j, l, budget=budget).to_json()


def _map(jobs_fn, jobs, n_jobs):
    if n_jobs and n_jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(n_jobs) as ex:
            return list(ex.map(jobs_fn, jobs))  # map keeps parameter order
    return [jobs_fn(j) for j in jobs]


def cmd_hecke(args, ctx):
    cfg = _cfg(args)
    l = _level(args)
    spec = _char(args, cfg, ctx["digests"])
    nu = cfg.n_under
    iis = [args.i] if args.i is not None else range(nu)
    jjs = [args.j] if args.j is not None else range(nu)
    jobs = [(cfg.to_json(), {**spec.to_json(), "principal_den_exp": spec.principal_den_exp},
             i, j, l, args.budget) for i in iis for j in jjs]
    rows = _map(_hecke_job, jobs, args.jobs)
    return cfg, {"character": spec.to_json(), "l": l, "rows": rows, "ok": all(r["ok"] for r in rows)}


def cmd_branch(args, ctx):
    from .hecke_branching import branch_report
    from .torus_characters import extend_character
    cfg = _cfg(args)
    lmax = _level(args, "lmax")
    fam = extend_character(cfg, _char(args, cfg, ctx["digests"]))
    return cfg, branch_report(fam, lmax, budget=args.budget, seed=args.seed).to_json()


def _gl_family(args, ctx):
    from .cover_gl2 import ensure_validated, gl_char_extensions
    cfg = _cfg(args)
    ensure_validated(cfg)
    return cfg, gl_char_extensions(cfg, _char2(args, cfg, ctx["digests"]))


def cmd_gl_hecke(args, ctx):
    from .cover_gl2 import gl_hecke_dim
    cfg, fam = _gl_family(args, ctx)
    l = _level(args)
    pairs = [(args.i, args.j)] if args.i is not None and args.j is not None else sorted(fam.members)
    rows = [gl_hecke_dim(fam, i, j, l, budget=args.budget).to_json() for i, j in pairs]
    return cfg, {"character": fam.base.to_json(), "l": l, "m": fam.m, "m_ratio": fam.m_ratio,
                 "rows": rows, "ok": all(r["ok"] for r in rows)}


def cmd_gl_branch(args, ctx):
    from .cover_gl2 import gl_branch_report
    cfg, fam = _gl_family(args, ctx)
    return cfg, gl_branch_report(fam, _level(args, "lmax"), seed=args.seed)


def cmd_gl_restrict(args, ctx):
    from .cover_gl2 import (compatible_sl_base, res_rho_prime_analysis, restrict_char_to_sl,
                            w_layer_lift_check)
    cfg, fam = _gl_family(args, ctx)
    n = cfg.n
    rows = [{"i": i, "j": j, **restrict_char_to_sl(fam, i, j)} for i in range(n) for j in range(n)]
    rep = {"character": fam.base.to_json(), "restrictions": rows,
           "analysis": res_rho_prime_analysis(cfg, fam)}
    ok = rep["analysis"]["ok"] and all(r["ok"] for r in rows)
    if args.l is not None:
        l = _level(args, "l", 2)
        base = compatible_sl_base(cfg, fam.base) if n % 2 else _char(args, cfg, ctx["digests"])
        checks = [w_layer_lift_check(cfg, fam, base, k, l, args.budget) for k in range(cfg.n_under)]
        rep["layer_lifts"] = checks
        ok = ok and all(c["ok"] for c in checks)
    rep["ok"] = ok
    return cfg, rep


def cmd_validate_beta_prime(args, ctx):
    from .cover_gl2 import (validate_beta_prime, verify_beta_prime_exhaustive, verify_restriction_and_n,
                            verify_section_prime)
    cfg = _cfg(args)
    level = args.level or 1
    mode = args.mode or ("exhaustive" if cfg.p == 5 and level == 1 else "sample")
    cands = validate_beta_prime(cfg, samples=args.samples or 400, seed=args.seed)
    rep = {"adopted": cands["adopted"], "family_passing": cands["family_passing"]}
    if args.emit_candidates:
        rep["candidates"] = cands["candidates"]
    if cands["adopted"] is None:
        rep["ok"] = False
        return cfg, rep
    try:
        rep["cocycle"] = verify_beta_prime_exhaustive(cfg, level, mode, seed=args.seed)
    except OverflowError as e:
        raise BudgetExceeded(str(e)) from e
    rep["section"] = verify_section_prime(cfg, level, "exhaustive" if level == 1 else "sample",
                                          seed=args.seed)
    rep["restriction"] = verify_restriction_and_n(cfg, 1)
    rep["ok"] = all(rep[k]["ok"] for k in ("cocycle", "section", "restriction"))
    return cfg, rep


def cmd_acceptance(args, ctx):
    from .acceptance import run_suite
    points = [(args.p, args.n)] if args.p is not None and args.n is not None else None
    if points:
        _cfg(args)
    res = run_suite(args.suite, args.criterion, points)
    if not ctx["timing"]:
        for r in res:
            r.pop("seconds", None)
    for r in res:
        print(f"criterion {r['criterion']:2d} {'PASS' if r['ok'] else 'FAIL'}  {r['title']}",
              file=sys.stderr)
    cfg = FieldConfig(*points[0]) if points else None
    return cfg, {"suite": args.suite, "criteria": res, "ok": all(r["ok"] for r in res)}


COMMANDS = {
    "hilbert": cmd_hilbert, "verify-cocycle": cmd_verify_cocycle,
    "verify-splitting": cmd_verify_splitting, "char": cmd_char, "oracle": cmd_oracle,
    "hecke": cmd_hecke, "branch": cmd_branch, "gl-hecke": cmd_gl_hecke,
    "gl-branch": cmd_gl_branch, "gl-restrict": cmd_gl_restrict,
    "validate-beta-prime": cmd_validate_beta_prime, "acceptance": cmd_acceptance,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--p", type=int)
    common.add_argument("--n", type=int)
    common.add_argument("--precision", type=int, default=4)
    common.add_argument("--char")
    common.add_argument("--char2")
    common.add_argument("--l", type=int)
    common.add_argument("--lmax", type=int)
    common.add_argument("--i", type=int)
    common.add_argument("--j", type=int)
    common.add_argument("--level", type=int)
    common.add_argument("--mode", choices=["exhaustive", "sample"])
    common.add_argument("--samples", type=int)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--jobs", type=int, default=1)
    common.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    common.add_argument("--format", choices=["json", "md"], default="json")
    common.add_argument("--timing", action="store_true", help="include wall-clock in the manifest")

    ap = _Parser(prog="metaplectic", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)
    h = sub.add_parser("hilbert", parents=[common])
    h.add_argument("--a")
    h.add_argument("--b")
    sub.add_parser("verify-cocycle", parents=[common])
    s = sub.add_parser("verify-splitting", parents=[common])
    s.add_argument("--subgroup")
    c = sub.add_parser("char", parents=[common])
    c.add_argument("action", choices=["validate", "extend", "level"])
    c.add_argument("--on", choices=["A", "Z"])
    o = sub.add_parser("oracle", parents=[common])
    o.add_argument("action", choices=["hom-dim"])
    o.add_argument("--char-i", type=int)
    o.add_argument("--char-j", type=int)
    for name in ("hecke", "branch", "gl-hecke", "gl-branch", "gl-restrict"):
        sub.add_parser(name, parents=[common])
    v = sub.add_parser("validate-beta-prime", parents=[common])
    v.add_argument("--emit-candidates", action="store_true")
    a = sub.add_parser("acceptance", parents=[common])
    a.add_argument("--suite", choices=["all", "sl2", "gl2"], default="all")
    a.add_argument("--criterion", type=int, action="append")
    return ap


def manifest(cfg, args, ctx, seconds) -> dict:
    m = {"tool": "metaplectic", "version": __version__,
         "field": cfg.to_json() if cfg is not None else None,
         "characters": ctx["digests"], "aux_primes": USAGE.snapshot()["aux_primes"],
         "budget": args.budget, "seed": args.seed}
    if ctx["timing"]:
        m["wall_clock_seconds"] = round(seconds, 3)
    return m


def run(argv=None, out=None) -> int:
    out = out or sys.stdout
    try:
        args = build_parser().parse_args(argv)
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    ctx = {"digests": {}, "timing": args.timing}
    USAGE.reset()
    t0 = time.perf_counter()
    try:
        cfg, body = COMMANDS[args.command](args, ctx)
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetExceeded as e:
        print(f"budget exhausted: {e}", file=sys.stderr)
        return EXIT_BUDGET
    except OracleDisagreement as e:
        print(f"oracle disagreement: {e}", file=sys.stderr)
        return EXIT_ORACLE
    report = {"schema": SCHEMA, "command": args.command,
              "manifest": manifest(cfg, args, ctx, time.perf_counter() - t0), "report": body,
              "ok": bool(body.get("ok", True))}
    out.write(render_md(report) if args.format == "md" else dumps(report) + "\n")
    return EXIT_OK if report["ok"] else EXIT_MISMATCH


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
