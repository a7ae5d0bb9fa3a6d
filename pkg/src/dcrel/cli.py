"""``dcrel``: build relation double categories and check their properties.

Exit codes: 0 everything holds, 1 a property failed (witnesses are in the
output), 2 bad usage or input, 3 an enumeration budget was exceeded.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass

from . import basecat
from .basecat import CategoryError, EnumerationBudgetExceeded, validate_table_category
from .construct import (cauchy_suite, check_cauchy, check_comprehensive_factorisation, check_equipment_identities,
                        check_fin_fib_system, check_recognition_oracle, comprehensive_factorise,
                        maps_theorem_check, theorem_suite)
from .dsl import DslError, parse, resolve
from .equip import check_double_laws_exhaustive
from .factsys import FactorisationError, check_ofs, check_regepi_equivalence, factorise, validate_system
from .presets import get_preset, parse_arrow, preset_names
from .props import (check_bc_pullbacks, check_classes, check_comprehension_scheme, check_discrete,
                    check_local_products, check_local_shape, check_strong_tabulators, check_unit_pure,
                    classify_vertical)
from .reldbl import InconsistencyError, RelDouble, check_double_laws
from .report import FAILS, Timer, describe

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    preset: str = None
    path: str = None
    system: str = None
    max_carrier: int = None
    fmt: str = "json"
    seed: int = 0
    jobs: int = 1
    timing: bool = True

    @classmethod
    def from_args(cls, args):
        if (args.preset is None) == (args.input is None):
            raise UsageError("give exactly one of --preset NAME or a .dcr file")
        if args.preset is not None and args.preset not in preset_names():
            raise UsageError(f"unknown preset {args.preset!r}; choose from {', '.join(preset_names())}")
        if args.max_carrier is not None and args.max_carrier < 0:
            raise UsageError("--max-carrier must be non-negative")
        if args.jobs < 1:
            raise UsageError("--jobs must be positive")
        return cls(args.preset, args.input, args.system, args.max_carrier, args.format, args.seed, args.jobs,
                   not args.no_timing)


def apply_budget(args):
    try:
        budget = basecat.Budget.from_env()
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    for name, value in (("hom_cap", args.hom_cap), ("filler_cap", args.filler_cap)):
        if value is not None:
            if value <= 0:
                raise UsageError("budgets must be positive")
            setattr(budget, name, value)
    if args.no_oracle:
        budget.oracle = False
    # the global is shared by reference across modules
    basecat.BUDGET.hom_cap = budget.hom_cap
    basecat.BUDGET.filler_cap = budget.filler_cap
    basecat.BUDGET.oracle = budget.oracle


# ---------------------------------------------------------------------------
# loading


def read_source(path):
    try:
        with open(path, "rb") as fh:
            data = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    return data


def load_instance(cfg):
    """``(name, base category, system, preset or None)``."""
    if cfg.preset is not None:
        try:
            p = get_preset(cfg.preset, cfg.max_carrier)
        except CategoryError as exc:
            raise UsageError(str(exc)) from None
        if cfg.system:
            e, _, m = cfg.system.partition(",")
            if not m:
                raise UsageError("--system for a preset takes E,M builtin class names")
            p.e, p.m, p.expected = e.strip(), m.strip(), {}
        return p.name, p.base, p.system(), p
    res = resolve(parse(read_source(cfg.path)), validate=False)
    if not res.systems:
        raise UsageError(f"{cfg.path} declares no system")
    if cfg.system is None:
        if len(res.systems) > 1:
            raise UsageError(f"{cfg.path} declares several systems; pick one with --system "
                             f"({', '.join(sorted(res.systems))})")
        name = next(iter(res.systems))
    elif cfg.system in res.systems:
        name = cfg.system
    else:
        raise UsageError(f"no system {cfg.system!r} in {cfg.path}")
    return name, res.categories[res.system_category[name]], res.systems[name], None


def build_double(cfg):
    name, base, S, preset = load_instance(cfg)
    try:
        D = RelDouble(base, S)
    except CategoryError as exc:
        return name, base, S, preset, None, str(exc)
    return name, base, S, preset, D, None


# ---------------------------------------------------------------------------
# commands


def cmd_validate(cfg):
    if cfg.preset is not None:
        name, base, S, _ = load_instance(cfg)
        out = {"input": name, "backend": getattr(base, "backend", "table"), "valid": True,
               "carriers": [repr(o) for o in base.objects()]}
        if hasattr(base, "all_morphisms"):
            rep = validate_table_category(base)
            out["valid"] = rep.valid
            out["violations"] = [repr(v) for v in rep.violations]
        return out, EXIT_OK if out["valid"] else EXIT_FAIL
    ast = parse(read_source(cfg.path))
    try:
        res = resolve(ast, validate=False)
    except DslError as exc:
        return {"input": cfg.path, "valid": False, "diagnostics": [str(d) for d in exc.diagnostics]}, EXIT_FAIL
    cats = {name: {"objects": len(c.objects()), "morphisms": len(c.all_morphisms())}
            for name, c in res.categories.items()}
    return {"input": cfg.path, "valid": True, "categories": cats, "classes": sorted(res.classes),
            "systems": sorted(res.systems)}, EXIT_OK


def cmd_check_ofs(cfg):
    name, base, S, _ = load_instance(cfg)
    probes = base.objects()
    with Timer() as t:
        rep = check_ofs(base, S.E, S.M, probes)
        validate_system(base, S, probes)
        regepi = check_regepi_equivalence(base, S, probes) if rep.ok else None
    flags = {k: v.describe() if hasattr(v, "describe") else describe(v) for k, v in sorted(S.flags.items())}
    out = {"input": name, "E": S.E.describe(), "M": S.M.describe(), "is_ofs": rep.ok,
           "failures": describe(rep.failures), "warnings": describe(rep.warnings), "flags": flags,
           "ms": round(t.ms, 3)}
    if regepi is not None:
        out["regepi_equivalence"] = regepi.to_json()
    ok = rep.ok and S.flag("is_stable") is True
    return out, EXIT_OK if ok else EXIT_FAIL


def cmd_build(cfg):
    name, base, S, _, D, err = build_double(cfg)
    if D is None:
        return {"input": name, "built": False, "error": err}, EXIT_FAIL
    homs = {f"{a!r},{b!r}": len(D.hom(a, b)) for a in D.carriers for b in D.carriers}
    verticals = {f"{a!r},{b!r}": len(base.hom(a, b)) for a in D.carriers for b in D.carriers}
    disc = check_discrete(D)
    out = {"input": name, "built": True, "carriers": [repr(c) for c in D.carriers], "terminal": repr(D.one),
           "horizontal_hom_sizes": homs, "vertical_hom_sizes": verticals,
           "relations": sum(homs.values()), "discrete": disc.to_json()}
    return out, EXIT_OK if disc.holds else EXIT_FAIL


CHECKERS = {
    "laws": lambda D, cfg: [check_double_laws(D, cfg.seed), check_double_laws_exhaustive(D)],
    "unit_pure": lambda D, cfg: [check_unit_pure(D)],
    "discrete": lambda D, cfg: [check_discrete(D)],
    "local_shape": lambda D, cfg: list(check_local_shape(D).values()),
    "bc_pullbacks": lambda D, cfg: [check_bc_pullbacks(D)],
    "strong_tabulators": lambda D, cfg: [check_strong_tabulators(D)],
    "comprehension": lambda D, cfg: [check_comprehension_scheme(D, "full"),
                                     check_comprehension_scheme(D, "left_sided")],
    "local_products": lambda D, cfg: [check_local_products(D)],
    "classes": lambda D, cfg: check_classes(D),
    "cauchy": lambda D, cfg: [check_cauchy(D)],
    "maps_theorem": lambda D, cfg: [maps_theorem_check(D)],
    "comprehensive_factorisation": lambda D, cfg: [check_comprehensive_factorisation(D), check_fin_fib_system(D)],
    "identities": lambda D, cfg: check_equipment_identities(D, seed=cfg.seed),
    "oracle": lambda D, cfg: [check_recognition_oracle(D, seed=cfg.seed)],
    "regepi": lambda D, cfg: [check_regepi_equivalence(D.base, D.system, D.carriers)],
}


def cmd_props(cfg, checks):
    name, base, S, preset, D, err = build_double(cfg)
    if D is None:
        return {"input": name, "built": False, "error": err}, EXIT_FAIL
    if not checks:
        res = theorem_suite(D, cap=preset.suite_cap if preset else None, seed=cfg.seed, jobs=cfg.jobs)
        out = {"input": name, **res.to_json()}
        return out, EXIT_OK if res.passed else EXIT_FAIL
    reports = []
    for c in checks:
        reports.extend(CHECKERS[c](D, cfg))
    failed = sorted(r.property for r in reports if r.verdict == FAILS)
    out = {"input": name, "verdict": "FAIL" if failed else "PASS", "failures": failed,
           "reports": [r.to_json() for r in reports]}
    return out, EXIT_FAIL if failed else EXIT_OK


def cmd_factor(cfg, arrow):
    if arrow is None:
        raise UsageError("factor needs --arrow")
    name, base, S, preset, D, err = build_double(cfg)
    if D is None:
        return {"input": name, "built": False, "error": err}, EXIT_FAIL
    try:
        f = parse_arrow(base, arrow)
    except CategoryError as exc:
        raise UsageError(str(exc)) from None
    e, m, apex = comprehensive_factorise(D, f)
    try:
        e2, m2 = factorise(base, S, f)
        system_pair = {"e": repr(e2), "m": repr(m2)}
    except FactorisationError as exc:
        system_pair = {"error": str(exc)}
    out = {"input": name, "arrow": repr(f), "e": repr(e), "m": repr(m), "apex": repr(apex),
           "system_factorisation": system_pair, "classes": classify_vertical(D, f),
           "e_in_E": S.in_E(base, e), "m_in_M": S.in_M(base, m)}
    ok = out["e_in_E"] and out["m_in_M"] and base.compose(e, m) == f
    return out, EXIT_OK if ok else EXIT_FAIL


def cmd_cauchify(cfg):
    name, base, S, preset, D, err = build_double(cfg)
    if D is None:
        return {"input": name, "built": False, "error": err}, EXIT_FAIL
    try:
        summary = cauchy_suite(D)
    except CategoryError as exc:
        return {"input": name, "verdict": "FAIL", "error": str(exc)}, EXIT_FAIL
    return {"input": name, **summary.to_json()}, EXIT_OK if summary.passed else EXIT_FAIL


def cmd_suite(cfg):
    if cfg.preset is None:
        raise UsageError("suite runs a named preset; use props for .dcr files")
    out, code = cmd_props(cfg, [])
    preset = get_preset(cfg.preset, cfg.max_carrier)
    if cfg.system:
        preset.expected = {}
    obs = out.get("observations", {})
    mismatches = {k: {"expected": v, "observed": obs.get(k)} for k, v in sorted(preset.expected.items())
                  if obs.get(k) != v}
    out["expected"] = dict(sorted(preset.expected.items()))
    out["expectation_mismatches"] = mismatches
    ok = code == EXIT_OK and not mismatches
    out["verdict"] = "PASS" if ok else "FAIL"
    return out, EXIT_OK if ok else EXIT_FAIL


# ---------------------------------------------------------------------------
# output


def strip_timing(x):
    if isinstance(x, dict):
        return {k: strip_timing(v) for k, v in x.items() if k != "ms"}
    if isinstance(x, list):
        return [strip_timing(v) for v in x]
    return x


def to_markdown(command, out):
    lines = [f"# dcrel {command}: {out.get('input', '')}", ""]
    if "verdict" in out:
        lines += [f"**{out['verdict']}**", ""]
    reports = out.get("reports")
    if isinstance(reports, list) and reports:
        lines += ["| property | verdict | witness |", "|---|---|---|"]
        for r in reports:
            w = json.dumps(r.get("witness"), sort_keys=True) if r.get("witness") is not None else ""
            lines.append(f"| {r['property']} | {r['verdict']} | {w.replace('|', '/')} |")
        lines.append("")
    for key in sorted(out):
        if key in ("reports", "input", "verdict"):
            continue
        lines.append(f"- **{key}**: `{json.dumps(out[key], sort_keys=True)}`")
    return "\n".join(lines) + "\n"


def build_parser():
    ap = argparse.ArgumentParser(prog="dcrel", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("input", nargs="?", help="a .dcr file (instead of --preset)")
    common.add_argument("--preset", help=f"one of: {', '.join(preset_names())}")
    common.add_argument("--system", help="system name in a .dcr file, or E,M builtin classes for a preset")
    common.add_argument("--max-carrier", type=int, help="largest carrier for the finset/finpreord families")
    common.add_argument("--format", choices=("json", "md"), default="json")
    common.add_argument("--seed", type=int, default=0, help="seed for sampled checks")
    common.add_argument("--jobs", type=int, default=1, help="checker threads")
    common.add_argument("--hom-cap", type=int, help="largest hom-set to enumerate")
    common.add_argument("--filler-cap", type=int, help="largest filler/search step count")
    common.add_argument("--no-oracle", action="store_true", help="skip brute-force universal-property oracles")
    common.add_argument("--no-timing", action="store_true", help="drop timing fields from the output")
    for name, help_ in (("validate", "parse and check category axioms"),
                        ("check-ofs", "check the factorisation system"),
                        ("build", "build the relation double category and summarise it"),
                        ("props", "run selected checkers (all by default)"),
                        ("factor", "comprehensive factorisation of one arrow"),
                        ("cauchify", "Cauchisation and its property checks"),
                        ("suite", "run a preset end to end against its expected verdicts")):
        p = sub.add_parser(name, parents=[common], help=help_)
        if name == "props":
            p.add_argument("--check", action="append", choices=sorted(CHECKERS), default=[])
        if name == "factor":
            p.add_argument("--arrow", help="arrow name, e.g. surj32 or '2->1:0,0'")
    return ap


def run(argv=None):
    """Parse ``argv`` and execute; returns ``(output dict or None, exit code, format)``."""
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return None, EXIT_USAGE if exc.code else EXIT_OK, "json"
    commands = {
        "validate": cmd_validate, "check-ofs": cmd_check_ofs, "build": cmd_build, "cauchify": cmd_cauchify,
        "suite": cmd_suite, "props": lambda cfg: cmd_props(cfg, args.check),
        "factor": lambda cfg: cmd_factor(cfg, args.arrow),
    }
    try:
        apply_budget(args)
        cfg = RunConfig.from_args(args)
        with Timer() as t:
            out, code = commands[args.command](cfg)
        out["command"] = args.command
        out["ms"] = round(t.ms, 3)
    except UsageError as exc:
        return {"command": args.command, "error": str(exc)}, EXIT_USAGE, args.format
    except DslError as exc:
        return ({"command": args.command, "error": "invalid input",
                 "diagnostics": [str(d) for d in exc.diagnostics]}, EXIT_USAGE, args.format)
    except (CategoryError, InconsistencyError) as exc:
        return {"command": args.command, "error": str(exc)}, EXIT_USAGE, args.format
    except EnumerationBudgetExceeded as exc:
        return ({"command": args.command, "error": "budget exceeded", "what": exc.what, "size": exc.size,
                 "cap": exc.cap}, EXIT_BUDGET, args.format)
    if not cfg.timing:
        out = strip_timing(out)
    return out, code, args.format


def render(out, fmt):
    if fmt == "md":
        return to_markdown(out.get("command", ""), out)
    return json.dumps(describe(out), sort_keys=True, indent=2) + "\n"


def main(argv=None):
    out, code, fmt = run(argv)
    if out is not None:
        sys.stdout.write(render(out, fmt))
    return code


if __name__ == "__main__":
    sys.exit(main())
