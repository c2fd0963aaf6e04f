"""``tessella`` command line.

Exit codes: 0 ok, 1 usage or other error, 2 rule validation failed,
3 rule could not be parsed, 4 tile cap exceeded, 5 file I/O.
"""

import argparse
import json
import math
import sys

from . import analysis, engine, rules, space
from .errors import PatchTooLarge, RuleParseError, TessellaError, UnknownBuiltin
from .geom import numbers as nb
from .geom.plane import Isometry, Point, UnitRotation
from .render import RenderSpec, render_svg

EXIT_OK, EXIT_ERROR, EXIT_INVALID, EXIT_PARSE, EXIT_CAP, EXIT_IO = 0, 1, 2, 3, 4, 5

VALIDATION_SCHEMA = "tessella.validation/1"
HYPOTHESES_SCHEMA = "tessella.hypotheses/1"
WEYL_SCHEMA = "tessella.weyl/1"
CENSUS_SCHEMA = "tessella.census/1"
METRIC_SCHEMA = "tessella.metric/1"


class _Exit(Exception):
    def __init__(self, code, message):
        super().__init__(message)
        self.code = code


class _Parser(argparse.ArgumentParser):
    # usage errors must not collide with the validation exit code
    def error(self, message):
        self.print_usage(sys.stderr)
        raise _Exit(EXIT_ERROR, f"{self.prog}: error: {message}")


def _int_list(text):
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _pair(text):
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected X,Y, got {text!r}")
    return parts


def _scalar(text, exact):
    if exact:
        try:
            return nb.rational(text)
        except ValueError:
            pass
    return float(text)


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    src = common.add_mutually_exclusive_group()
    src.add_argument("--builtin", metavar="NAME", help="square or pinwheel")
    src.add_argument("--rule", metavar="FILE", help="rule file (JSON)")
    common.add_argument("--mode", choices=["exact", "float"], default="exact")
    common.add_argument("--tol", type=float, default=None, help="float-mode tolerance")
    common.add_argument("-r", type=int, default=None, help="inflation level")
    common.add_argument("-m", type=_int_list, default=None, help="angular frequencies, e.g. 1,2,3")
    common.add_argument("--seed-type", type=int, default=0)
    common.add_argument("--cap", type=int, default=None, help="tile cap (env TESSELLA_CAP)")
    common.add_argument("--workers", type=int, default=1)
    common.add_argument("-o", "--output", metavar="PATH", default=None)
    common.add_argument("--format", choices=["json", "svg"], default=None)

    p = _Parser(prog="tessella", description="Substitution tilings with exact arithmetic.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("validate", parents=[common], help="check that a rule tiles its prototiles")
    sub.add_parser("inflate", parents=[common], help="write F^r(P) as a patch file")
    a = sub.add_parser("analyze", parents=[common], help="matrices, hypotheses, Weyl sums")
    a.add_argument("--weyl-r", type=int, default=None)
    a.add_argument("--r-max", type=int, default=8)
    sub.add_parser("hypotheses", parents=[common], help="check the ergodicity hypotheses at r")
    w = sub.add_parser("weyl", parents=[common], help="Weyl sums over tile orientations")
    w.add_argument("--convention", choices=["plain", "conjugate"], default="conjugate")
    c = sub.add_parser("census", parents=[common], help="edge-adjacency configurations")
    c.add_argument("--patch", metavar="FILE", default=None)
    mt = sub.add_parser("metric", parents=[common], help="distance between centered patches")
    mt.add_argument("--shift", type=_pair, default=None, metavar="DX,DY",
                    help="compare F^r(P) with itself translated")
    mt.add_argument("--rotate-tile", default=None, metavar="INDEX:ANGLE",
                    help="compare with one tile rotated about its centroid")
    mt.add_argument("--floor", type=float, default=1e-3)
    rd = sub.add_parser("render", parents=[common], help="draw a patch as SVG")
    rd.add_argument("--patch", metavar="FILE", default=None)
    rd.add_argument("--color-by", choices=["type", "angle_hue", "handedness"], default="type")
    rd.add_argument("--stroke", type=float, default=None)
    rd.add_argument("--labels", type=int, default=0, metavar="N",
                    help="number the tiles when there are at most N")
    return p


# -- helpers ---------------------------------------------------------------------------

def _load_rule(args):
    if args.builtin is None and args.rule is None:
        raise _Exit(EXIT_ERROR, "one of --builtin or --rule is required")
    try:
        if args.builtin is not None:
            rule = rules.builtin(args.builtin)
        else:
            rule = rules.load_rule(args.rule, mode=args.mode)
    except UnknownBuiltin as e:
        raise _Exit(EXIT_ERROR, str(e))
    except RuleParseError as e:
        raise _Exit(EXIT_PARSE, f"parse error: {e}")
    except (OSError, UnicodeDecodeError) as e:
        raise _Exit(EXIT_IO, f"cannot read rule: {e}")
    if args.mode == "float" and rule.exact:
        rule = rules.to_float_rule(rule)
    return rule


def _need_valid(rule):
    report = rules.validate_rule(rule)
    if not report.ok:
        f = report.failure
        raise _Exit(EXIT_INVALID, f"rule does not tile prototile {f.id}: {f.kind} ({f.message})")
    return rule


def _r(args, default):
    return default if args.r is None else args.r


def _load_patch(path, rule):
    try:
        with open(path, encoding="utf-8") as fh:
            patch = engine.load_patch(fh)
    except (OSError, ValueError, KeyError) as e:
        raise _Exit(EXIT_IO, f"cannot read patch {path}: {e}")
    if patch.rule_hash is not None and patch.rule_hash != rule.hash():
        raise _Exit(EXIT_ERROR, f"patch {path} was built from a different rule")
    return patch


def _emit(args, text):
    if args.output is None:
        sys.stdout.write(text)
        return
    try:
        with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as e:
        raise _Exit(EXIT_IO, f"cannot write {args.output}: {e}")


def _json(obj):
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _note(msg):
    print(msg, file=sys.stderr)


# -- commands ------------------------------------------------------------------------

def cmd_validate(args):
    rule = _load_rule(args)
    report = rules.validate_rule(rule)
    out = {"schema": VALIDATION_SCHEMA, "rule": rule.name, "rule_hash": rule.hash()}
    out.update(report.to_dict())
    _emit(args, _json(out))
    if not report.ok:
        f = report.failure
        _note(f"FAIL prototile {f.id}: {f.kind}: {f.message}")
        return EXIT_INVALID
    _note(f"ok: {rule.size} prototile(s) exactly tiled")
    return EXIT_OK


def _patch_for(args, rule, default_r):
    return engine.iterate(rule, args.seed_type, _r(args, default_r), cap=args.cap,
                          workers=args.workers)


def cmd_inflate(args):
    rule = _need_valid(_load_rule(args))
    patch = _patch_for(args, rule, 1)
    if args.format == "svg":
        _emit(args, render_svg(patch, rule))
    else:
        _emit(args, _json(engine.patch_to_dict(patch)))
    _note(f"{len(patch)} tile{'' if len(patch) == 1 else 's'}")
    return EXIT_OK


def cmd_analyze(args):
    rule = _need_valid(_load_rule(args))
    r = _r(args, 2)
    ms = args.m if args.m is not None else [1, 2, 3, 4]
    rep = analysis.analysis_report(rule, r, ms, weyl_r=args.weyl_r, seed_type=args.seed_type,
                                   r_max=args.r_max, cap=args.cap)
    _emit(args, _json(rep))
    h = rep["hypotheses"]
    mark = lambda ok: "yes" if ok else "no"
    _note(f"hypotheses at r={r}: a {mark(h['a'])}, b {mark(h['b'])}"
          + ("" if h["a"] and h["b"] else " (not certified at this r)"))
    return EXIT_OK


def cmd_hypotheses(args):
    rule = _need_valid(_load_rule(args))
    r = _r(args, 2)
    rep = analysis.check_hypotheses(rule, r, cap=args.cap).to_dict()
    rep["schema"] = HYPOTHESES_SCHEMA
    _emit(args, _json(rep))
    return EXIT_OK


def cmd_weyl(args):
    rule = _need_valid(_load_rule(args))
    r = _r(args, 2)
    ms = args.m if args.m is not None else [1, 2, 3, 4]
    patch = _patch_for(args, rule, r)
    sums = [analysis.weyl_sum(rule, args.seed_type, r, m, convention=args.convention,
                              patch=patch).to_dict() for m in ms]
    _emit(args, _json({"schema": WEYL_SCHEMA, "rule_hash": rule.hash(), "sums": sums}))
    return EXIT_OK


def cmd_census(args):
    rule = _need_valid(_load_rule(args))
    patch = _load_patch(args.patch, rule) if args.patch else _patch_for(args, rule, 2)
    configs = space.adjacency_census(patch, rule)
    _emit(args, _json({"schema": CENSUS_SCHEMA, "rule_hash": rule.hash(), "tiles": len(patch),
                       "configurations": [c.to_dict() for c in configs]}))
    _note(f"{len(configs)} configuration(s) among {sum(c.count for c in configs)} contacts")
    return EXIT_OK


def cmd_metric(args):
    rule = _need_valid(_load_rule(args))
    T = space.centered(rule, args.seed_type, _r(args, 4), cap=args.cap)
    if args.shift is not None:
        U = space.translated(T, *(_scalar(v, T.patch.exact) for v in args.shift))
        what = {"shift": args.shift}
    elif args.rotate_tile is not None:
        idx, _, ang = args.rotate_tile.partition(":")
        U = _rotate_tile(T, int(idx), float(ang))
        what = {"rotate_tile": [int(idx), float(ang)]}
    else:
        U, what = T, {}
    rep = space.patch_distance(T, U, floor=args.floor)
    out = {"schema": METRIC_SCHEMA, "rule_hash": rule.hash(), "r": T.patch.r,
           "coverage_radius": T.radius}
    out.update(what)
    out.update(rep.to_dict())
    _emit(args, _json(out))
    return EXIT_OK


def _rotate_tile(cp, index, angle):
    tiles = cp.patch.tiles
    if not 0 <= index < len(tiles):
        raise _Exit(EXIT_ERROR, f"tile index {index} out of range 0..{len(tiles) - 1}")
    tile = tiles[index]
    cx, cy = cp.patch.float_vertices(cp.rule)[index].mean(axis=0)
    c = Point(float(cx), float(cy))
    spin = Isometry(UnitRotation.from_angle(angle), c - UnitRotation.from_angle(angle).apply(c))
    pose = tile.pose
    fpose = Isometry(UnitRotation(Point(float(pose.rot.u.x), float(pose.rot.u.y)), pose.reflect),
                     Point(float(pose.trans.x), float(pose.trans.y)))
    return space.replace_tile(cp, index, spin @ fpose)


def cmd_render(args):
    rule = _load_rule(args)
    patch = _load_patch(args.patch, rule) if args.patch else _patch_for(args, rule, 2)
    spec = RenderSpec(color_by=args.color_by, stroke_width=args.stroke, label_max=args.labels)
    _emit(args, render_svg(patch, rule, spec))
    return EXIT_OK


COMMANDS = {"validate": cmd_validate, "inflate": cmd_inflate, "analyze": cmd_analyze,
            "hypotheses": cmd_hypotheses, "weyl": cmd_weyl, "census": cmd_census,
            "metric": cmd_metric, "render": cmd_render}


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
        if args.tol is not None:
            nb.set_tolerance(args.tol)
        return COMMANDS[args.command](args)
    except _Exit as e:
        _note(str(e))
        return e.code
    except PatchTooLarge as e:
        _note(f"tile cap exceeded: {e}")
        return EXIT_CAP
    except RuleParseError as e:
        _note(f"parse error: {e}")
        return EXIT_PARSE
    except TessellaError as e:
        _note(f"{type(e).__name__}: {e}")
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
