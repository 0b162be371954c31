"""Command line front end.

    propring verify <scenario.json> [--out report.json] [--csv summary.csv]
    propring decompose [--in element.json]
    propring nu [--in element.json]
    propring expand [--in element.json] [--cutoff T]
    propring module-exponent [--in module.json] [--ideal NAME|path]
                             [--grading gr|int|res] [--level-n N]

One-shot subcommands read JSON from --in or standard input and print JSON.
Exit codes: 0 success / all checks pass, 1 any check failed or came back
indeterminate, 2 configuration or input error.  PROPRING_OUT_DIR, if set,
is the default directory for relative output paths."""

from __future__ import annotations

import argparse
import json
import os
import sys

from .errors import ConfigError, PropringError


def _read_json(path: str | None):
    try:
        if path:
            with open(path, "r", encoding="utf-8") as fh:
                return json.load(fh)
        return json.load(sys.stdin)
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f"cannot read input: {e}") from None


def _out_path(path: str) -> str:
    base = os.environ.get("PROPRING_OUT_DIR")
    if base and not os.path.isabs(path):
        return os.path.join(base, path)
    return path


def _print(obj) -> None:
    from .jsonio import to_jsonable

    json.dump(to_jsonable(obj), sys.stdout, indent=2, sort_keys=True)
    sys.stdout.write("\n")


def _cmd_verify(args) -> int:
    from .checks import report_bytes, report_csv, run_scenario

    data = _read_json(args.scenario)
    report, code = run_scenario(data, include_timings=args.timings)
    for entry in report["checks"]:
        print(f"{entry['name']}: {entry['status']}")
    s = report["summary"]
    print(f"summary: {s['pass']} pass, {s['fail']} fail, "
          f"{s['indeterminate']} indeterminate")
    if args.out:
        with open(_out_path(args.out), "wb") as fh:
            fh.write(report_bytes(report) if not args.timings
                     else (json.dumps(report, sort_keys=True, indent=2) + "\n").encode())
    if args.csv:
        with open(_out_path(args.csv), "w", encoding="utf-8") as fh:
            fh.write(report_csv(report))
    return code


def _cmd_decompose(args) -> int:
    from .jsonio import digits_to_json, group_element_digits

    cfg, digits = group_element_digits(_read_json(getattr(args, "in")))
    out = digits_to_json(digits)
    out.update(cfg.header())
    _print(out)
    return 0


def _element_from_input(data):
    from .algebra import group_algebra
    from .jsonio import algebra_element_from_json, config_from_json, digits_from_json

    cfg = config_from_json(data)
    alg = group_algebra(cfg)
    if "support" in data:
        return cfg, alg, algebra_element_from_json(alg, data["support"])
    if "digits" in data:
        comps = [alg.of_group(digits_from_json(data, cfg))]
        comps += [alg.zero() for _ in range(cfg.f - 1)]
        return cfg, alg, comps
    raise ConfigError("element needs either a support list or digits")


def _cmd_nu(args) -> int:
    from .jsonio import element_nu

    data = _read_json(getattr(args, "in"))
    cfg, alg, comps = _element_from_input(data)
    v = element_nu(alg, comps)
    out = dict(cfg.header())
    if v is None or v >= alg.pM:
        out.update({"nu": None, "at_least": alg.pM})
    else:
        out["nu"] = int(v)
    _print(out)
    return 0


def _cmd_expand(args) -> int:
    from .jsonio import monomial_expansion_to_json

    data = _read_json(getattr(args, "in"))
    cfg, alg, comps = _element_from_input(data)
    cutoff = args.cutoff if args.cutoff is not None else alg.pM - 1
    out = monomial_expansion_to_json(alg, comps, cutoff)
    out.update(cfg.header())
    _print(out)
    return 0


def _cmd_module_exponent(args) -> int:
    from .gf import gf
    from .graded import build_JN, default_ideals
    from .jsonio import ideal_spec_from_json, module_from_json
    from .modules import grade, min_annihilator_exponent

    mod = module_from_json(_read_json(getattr(args, "in")), case=args.case)
    field = gf(mod.cfg.p, mod.cfg.f)
    shipped = {s.name: s for s in default_ideals(mod.cfg.f, field)}
    if args.ideal in shipped:
        spec = shipped[args.ideal]
    elif os.path.exists(args.ideal):
        with open(args.ideal, "r", encoding="utf-8") as fh:
            spec = ideal_spec_from_json(json.load(fh), mod.cfg.f, field)
    else:
        raise ConfigError(
            f"ideal must be one of {sorted(shipped)} or a path to an ideal file"
        )
    n = args.level_n
    if args.grading != "gr":
        if n is None:
            raise ConfigError("int/res gradings need --level-n")
        spec = build_JN(spec, n, field)
    gm = grade(mod, args.grading, n if args.grading != "gr" else None)
    rep = min_annihilator_exponent(gm, spec)
    out = dict(mod.cfg.header())
    out.update(
        {
            "module_dim": mod.dim,
            "ideal": rep.ideal,
            "grading": rep.kind,
            "exponent": rep.ell,
            "bound": rep.bound,
            "excess_dims": rep.excess_dims,
        }
    )
    _print(out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="propring",
        description="exact checks in truncated pro-p group rings",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run a scenario of named checks")
    v.add_argument("scenario", help="scenario JSON path")
    v.add_argument("--out", help="write the JSON report here")
    v.add_argument("--csv", help="write a one-line-per-check CSV summary here")
    v.add_argument("--timings", action="store_true",
                   help="attach wall-clock timings (report bytes then vary)")
    v.set_defaults(fn=_cmd_verify)

    d = sub.add_parser("decompose", help="ordered-basis digits of a group element")
    d.add_argument("--in", dest="in", help="element JSON (default: stdin)")
    d.set_defaults(fn=_cmd_decompose)

    n = sub.add_parser("nu", help="valuation of a group-ring element")
    n.add_argument("--in", dest="in", help="element JSON (default: stdin)")
    n.set_defaults(fn=_cmd_nu)

    e = sub.add_parser("expand", help="monomial expansion of a group-ring element")
    e.add_argument("--in", dest="in", help="element JSON (default: stdin)")
    e.add_argument("--cutoff", type=int, help="weight cutoff (default p^M - 1)")
    e.set_defaults(fn=_cmd_expand)

    m = sub.add_parser("module-exponent",
                       help="minimal annihilator exponent of an ideal on a module")
    m.add_argument("--in", dest="in", help="module JSON (default: stdin)")
    m.add_argument("--ideal", default="c",
                   help="shipped ideal name or path to an ideal JSON file")
    m.add_argument("--grading", choices=("gr", "int", "res"), default="gr")
    m.add_argument("--level-n", type=int, help="rescaling depth N for int/res")
    m.add_argument("--case", choices=("GL2", "QUAT"),
                   help="group model when the module file omits it")
    m.set_defaults(fn=_cmd_module_exponent)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    except PropringError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
