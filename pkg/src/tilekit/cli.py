"""Command-line interface: ``tilekit <command> ...``.

Every command prints one JSON run report on stdout (``--text`` for a short
human summary).  Failures print ``{"error": ...}`` and exit with the error's
code: 2 invalid input, 3 infeasible or aborted, 4 I/O.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
import time
from pathlib import Path

from . import config
from .combinatorics import smoothability_check
from .engine import (build_coronas, c1_seam_check, edge_rotation_product, gauss_bonnet_residual,
                     generate_group, interior_vertex_residuals, motion_power_order,
                     placement_multiplicity, propagate, state_generators, transitivity_check)
from .errors import AmbiguousType, IoError, TilekitError, ValidationError, WrongTileType
from .prototile import classify_edge_type, corner_angles, normal_classification, tile_type
from .serialization import (RunReport, dumps, ensure_dir, export_mesh, inputs_digest, jsonable,
                            load_state, load_tile, save_state, save_tile)

FAMILIES = ("lift", "revolution", "face", "one-edge", "isosceles", "flat-cube")


# --- argument helpers ---------------------------------------------------------

def parse_degrees(text: str) -> list[int]:
    """``4,4,5`` or ``4x3,5x6`` (also ``×`` or ``*``) into a flat degree list."""
    out = []
    for part in text.replace(" ", "").split(","):
        if not part:
            continue
        m = re.fullmatch(r"(\d+)(?:[x×*](\d+))?", part)
        if m is None:
            raise ValidationError(f"bad degree term {part!r}")
        out += [int(m.group(1))] * int(m.group(2) or 1)
    if not out:
        raise ValidationError("no vertex degrees given")
    return out


def parse_policy(text: str | None):
    if text is None or text == "none":
        return None
    if text == "first":
        return "first"
    try:
        return [int(x) for x in text.split(",")]
    except ValueError:
        raise ValidationError(f"policy must be 'first' or a list of indices, got {text!r}") from None


# --- outcomes -----------------------------------------------------------------

def _tile_classification(t) -> dict:
    et = classify_edge_type(t)
    out = {"name": t.name, "edges": t.n_edges, "edge_type": str(et),
           "corner_angles": [float(a) for a in corner_angles(t)]}
    if t.n_edges == 3:
        try:
            kind, a = tile_type(et)
            out["tile_type"] = kind
            out["corner_A"] = a
        except WrongTileType as exc:
            out["tile_type"] = None
            out["tile_type_reason"] = str(exc)
        try:
            nc = normal_classification(t, et)
            out["normal_classification"] = {
                "tag": nc.tag, "detail": nc.detail,
                "point": None if nc.point is None else [float(x) for x in nc.point]}
        except WrongTileType as exc:
            out["normal_classification"] = {"tag": "NotApplicable", "detail": str(exc), "point": None}
    return out


def _state_summary(s) -> dict:
    res = interior_vertex_residuals(s)
    out = {"status": s.status, "reason": s.reason, "tiles": s.m, "open_edges": len(s.frontier),
           "seam_max": c1_seam_check(s),
           "interior_vertices": len(res),
           "vertex_residual_max": max((r["residual"] for r in res), default=0.0)}
    if s.is_closed():
        out["gauss_bonnet"] = gauss_bonnet_residual(s)
    return out


def _check_state(s) -> dict:
    tol = config.TOL
    out = _state_summary(s)
    out["seam_ok"] = out["seam_max"] < tol.seam_max
    out["vertex_closure_ok"] = out["vertex_residual_max"] < tol.eps_ang
    if s.is_closed():
        group = generate_group(state_generators(s), cap=max(4 * s.m, 64), diameter=s.prototile.diameter)
        out["group"] = {"order": len(group), "closed": group.closed,
                        "transitive": transitivity_check(s, group),
                        "placement_multiplicity": list(placement_multiplicity(s, group))}
        gb = out["gauss_bonnet"]
        out["gauss_bonnet_ok"] = gb["residual"] < 1e-2 * max(abs(gb["expected"]), 1e-12)
    if s.prototile.n_edges == 3:
        try:
            if tile_type(classify_edge_type(s.prototile))[0] == 4:
                r = edge_rotation_product(s.prototile)
                out["rotation_product_order"] = motion_power_order(r, 1000, s.prototile.diameter)
        except TilekitError:
            pass
    return out


def _feasibility(report) -> dict:
    return {
        "overall": report.overall, "reason": report.reason, "flags": list(report.flags),
        "case_labels": sorted({c.label for c in report.cases}),
        "cases": [{"label": c.label, "equations": [str(e) for e in c.angle_system.equations],
                   "words": [w.text for w in c.angle_system.source_words],
                   "solution": c.angle_system.solution(),
                   "corner_counts": c.corner_counts, "verdict": c.verdict, "reason": c.reason}
                  for c in report.cases],
    }


def _generate(args):
    from . import generators as g

    fam = args.family
    if fam == "lift":
        lt = g.make_lifted_tiling(g.LiftSpec(args.base, args.height, args.resolution,
                                             args.profile, args.n))
        return lt.tile, lt.reference
    if fam == "revolution":
        profile = args.profile_shape
        if profile not in ("egg", "semicircle"):
            profile = json.loads(Path(profile).read_text())
        t = g.make_revolution_tile(g.RevolutionSpec(m=args.m, profile=profile, asymmetry=args.asymmetry))
        return t, propagate(t, policy="first" if args.profile_shape == "semicircle" else None)
    if fam == "face":
        lt = g.make_face_tiling(g.FaceSpec(args.base, args.height, args.resolution, args.profile))
        return lt.tile, lt.reference
    if fam == "one-edge":
        t = g.make_one_edge_tile(args.amplitude)
        return t, propagate(t)
    if fam == "isosceles":
        s = g.make_isosceles_grid(args.depth, args.height, args.resolution)
        return s.prototile, s
    if fam == "flat-cube":
        s = g.make_flat_cube()
        return s.prototile, s
    raise ValidationError(f"unknown family {fam!r}")


# --- commands -----------------------------------------------------------------

def cmd_classify(args):
    return _tile_classification(load_tile(args.tile)), [args.tile]


def cmd_corona(args):
    t = load_tile(args.tile)
    coronas = build_coronas(t, cap=args.cap)
    return {"coronas": len(coronas), "sizes": sorted(c.m for c in coronas)}, [args.tile]


def cmd_tile(args):
    t = load_tile(args.tile)
    try:
        log_file = open(args.log, "w") if args.log else None
    except OSError as exc:
        raise IoError(f"cannot write {args.log}: {exc.strerror or exc}") from exc
    try:
        on_record = (lambda r: log_file.write(json.dumps(jsonable(r), sort_keys=True) + "\n")) if log_file else None
        s = propagate(t, max_tiles=args.max_tiles, policy=parse_policy(args.policy),
                      max_depth=args.max_depth, on_record=on_record)
    finally:
        if log_file:
            log_file.close()
    if args.out:
        save_state(s, args.out)
    return _state_summary(s), [args.tile]


def cmd_smoothable(args):
    degrees = parse_degrees(args.degrees)
    types = args.types.split(";") if args.types else None
    reports = smoothability_check(args.faces, degrees, types)
    overall = "Infeasible" if all(r.overall == "Infeasible" for r in reports.values()) else "Feasible"
    return {"faces": args.faces, "degrees": degrees, "overall": overall,
            "types": {k: _feasibility(r) for k, r in reports.items()}}, []


def cmd_generate(args):
    t, s = _generate(args)
    out = ensure_dir(args.out)
    save_tile(t, out / "tile.json")
    save_state(s, out / "state.json")
    try:
        res = _tile_classification(t)
    except AmbiguousType as exc:
        res = {"name": t.name, "edges": t.n_edges, "edge_type": None, "edge_type_reason": str(exc)}
    res.update(family=args.family, tile_path=str(out / "tile.json"), state_path=str(out / "state.json"),
               state=_state_summary(s))
    return res, []


def cmd_check(args):
    return _check_state(load_state(args.state)), [args.state]


def cmd_export(args):
    s = load_state(args.state)
    export_mesh(s, args.output)
    return {"path": args.output, "tiles": s.m}, [args.state]


COMMANDS = {"classify": cmd_classify, "corona": cmd_corona, "tile": cmd_tile,
            "smoothable": cmd_smoothable, "generate": cmd_generate, "check": cmd_check,
            "export": cmd_export}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tilekit", description="Curved prototiles and monotiled surfaces.")
    p.add_argument("--config", help="JSON tolerance overrides (default: $TILEKIT_CONFIG)")
    p.add_argument("--text", action="store_true", help="short human-readable output")
    p.add_argument("--no-timing", action="store_true", help="omit the timing field")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("classify", help="edge type, corner angles, normal lines")
    s.add_argument("tile")
    s = sub.add_parser("corona", help="count coronas")
    s.add_argument("tile")
    s.add_argument("--cap", type=int, default=64)
    s = sub.add_parser("tile", help="propagate a tiling")
    s.add_argument("tile")
    s.add_argument("--max-tiles", type=int, default=1000)
    s.add_argument("--max-depth", type=int)
    s.add_argument("--policy", help="'first' or per-edge candidate indices, e.g. 0,1,0")
    s.add_argument("--log", help="write growth records as JSON lines")
    s.add_argument("-o", "--out", help="save the resulting state")
    s = sub.add_parser("smoothable", help="smoothability of a vertex configuration")
    s.add_argument("--faces", type=int, required=True)
    s.add_argument("--degrees", required=True, help="e.g. 4,4,4,5,5,5,5,5,5 or 4x3,5x6")
    s.add_argument("--types", help="';'-separated edge types (default: all 3-edge types)")
    s = sub.add_parser("generate", help="build a tile and its reference state")
    s.add_argument("family", choices=FAMILIES)
    s.add_argument("--base", default="Cube")
    s.add_argument("--height", type=float, default=0.15)
    s.add_argument("--resolution", type=int, default=32)
    s.add_argument("--profile", default="cubic", help="bump profile: cubic or quintic")
    s.add_argument("--n", type=int, help="Bipyramid order")
    s.add_argument("--m", type=int, default=6, help="revolution order")
    s.add_argument("--profile-shape", default="egg",
                   help="revolution meridian: egg, semicircle or a JSON file of (ρ, ζ) samples")
    s.add_argument("--asymmetry", type=float, default=0.25)
    s.add_argument("--amplitude", type=float, default=0.1, help="one-edge bump amplitude")
    s.add_argument("--depth", type=int, default=3, help="isosceles patch size in unit squares")
    s.add_argument("-o", "--out", default=".", help="output directory")
    s = sub.add_parser("check", help="seam, closure, Gauss-Bonnet and group checks")
    s.add_argument("state")
    s = sub.add_parser("export", help="write a state as an OBJ mesh")
    s.add_argument("state")
    s.add_argument("-o", "--output", required=True)
    return p


def _text(command: str, outcome: dict) -> str:
    if command == "smoothable":
        lines = [f"overall: {outcome['overall']}"]
        for k, r in outcome["types"].items():
            lines.append(f"{k}: {r['overall']} ({len(r['case_labels'])} cases) {r['reason']}".rstrip())
        return "\n".join(lines)
    keys = [k for k in ("edge_type", "status", "tiles", "coronas", "seam_max", "path") if k in outcome]
    return "\n".join(f"{k}: {outcome[k]}" for k in keys) or dumps(outcome).strip()


def _args_dict(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in ("text", "no_timing")}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    t0 = time.perf_counter()
    try:
        config.load_config(args.config)
        outcome, files = COMMANDS[args.command](args)
        report = RunReport(args.command, inputs_digest(args.command, _args_dict(args), files),
                           jsonable(outcome), time.perf_counter() - t0)
    except TilekitError as exc:
        payload = {"error": type(exc).__name__, "message": str(exc), "exit_code": exc.exit_code,
                   "command": args.command}
        state = getattr(exc, "state", None)
        if state is not None:
            payload["state"] = {"status": state.status, "tiles": state.m, "reason": state.reason}
        sys.stdout.write(dumps(payload))
        return exc.exit_code
    # a verdict of Infeasible is still a full report, but exits like any infeasible result
    code = 3 if report.outcome.get("overall") == "Infeasible" else 0
    if args.text:
        sys.stdout.write(_text(args.command, report.outcome) + "\n")
    else:
        sys.stdout.write(dumps(report.to_dict(timing=not args.no_timing)))
    return code


if __name__ == "__main__":
    sys.exit(main())
