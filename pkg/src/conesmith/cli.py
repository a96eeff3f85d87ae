"""Command-line front end.

Every subcommand prints one deterministic JSON report on stdout and a short
summary on stderr.  Exit codes: 0 success, 1 usage or input error, 2 the
analysis refused to certify, 3 a certificate could not be completed.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import fields, is_dataclass
from fractions import Fraction
from pathlib import Path

from . import exactlin as xl
from .cones import Fan, RationalCone
from .errors import CertificateFailure, ConesmithError, GroupDoesNotAct, GroupTooLarge, NonPointedCone, NonUnimodular
from .groups import close_group, quotient_analysis
from .k3 import isotropic_splitting, main_theorem_probe, polarized_scenario
from .kernels import BACKEND
from .lattice import discriminant_form, load_lattice, parse_lattice
from .perfect import (
    LorentzianModel,
    PSDModel,
    default_window,
    make_window,
    perfect_fan_local,
    verify_admissible_local,
    verify_perfect_canonical,
)
from .toric import TorusInvariantDivisor, q_cartier_test, singularity_verdict

EXIT_OK, EXIT_USAGE, EXIT_REFUSAL, EXIT_CERTIFICATE = 0, 1, 2, 3

SCENE_KEYS = {"lattice", "cone", "fan", "group", "model", "window", "flags"}
FLAG_KEYS = {"height", "d", "max_support", "search_bound", "isotropic"}

WORKED_CONE = ((1, 1, 1), (-1, 1, 1), (-1, -1, 1), (1, -1, 1), (0, 2, 1))
WORKED_GROUP = (((-1, 0, 0), (0, 1, 0), (0, 0, 1)),)
WORKED_SKIPPED_RAY = (0, 2, 1)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# ---------------------------------------------------------------- output


def to_json(obj):
    """Exact JSON-ready form: integers stay integers, other rationals
    become ``"p/q"`` strings, tuples become lists."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, int):
        return obj
    if isinstance(obj, Fraction):
        return obj.numerator if obj.denominator == 1 else f"{obj.numerator}/{obj.denominator}"
    if isinstance(obj, float):
        raise TypeError("floating point value in a report")
    if isinstance(obj, dict):
        return {str(k): to_json(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_json(v) for v in obj]
    if isinstance(obj, TorusInvariantDivisor):
        return [{"ray": to_json(r), "coefficient": to_json(a)} for r, a in obj.terms]
    if is_dataclass(obj):
        return {f.name: to_json(getattr(obj, f.name)) for f in fields(obj) if not f.name.startswith("_")}
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(report) -> str:
    return json.dumps(to_json(report), sort_keys=True, indent=2, ensure_ascii=True) + "\n"


def _emit(report, summary: str):
    sys.stdout.write(dumps(report))
    sys.stderr.write(summary.rstrip() + "\n")


# ---------------------------------------------------------------- inputs


def load_json(path: str):
    """Parse a JSON file, turning syntax errors into line-anchored messages."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"{path}: cannot read: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None


def _lattice_arg(text: str):
    if Path(text).is_file():
        return load_lattice(load_json(text))
    return parse_lattice(text)


def _int_matrix(obj, what):
    if not isinstance(obj, list) or not obj or not all(isinstance(r, list) for r in obj):
        raise UsageError(f"{what}: expected a non-empty list of rows")
    for i, r in enumerate(obj):
        for j, v in enumerate(r):
            if isinstance(v, bool) or not isinstance(v, int):
                raise UsageError(f"{what}[{i}][{j}]: expected an integer, got {v!r}")
    if len({len(r) for r in obj}) != 1:
        raise UsageError(f"{what}: rows of different lengths")
    return xl.as_matrix(obj)


def _generators(obj, what):
    gens = obj.get("generators") if isinstance(obj, dict) else obj
    return _int_matrix(gens, f"{what}.generators" if isinstance(obj, dict) else what)


def _cone_from(obj, what="cone"):
    cone = RationalCone(_generators(obj, what))
    return cone


def _group_from(obj, rank=None, what="group"):
    if not isinstance(obj, list):
        raise UsageError(f"{what}: expected a list of matrices")
    return close_group([_int_matrix(m, f"{what}[{i}]") for i, m in enumerate(obj)], rank=rank)


def validate_scene(scene) -> list:
    """Schema and invariant diagnostics for a scene document (empty if ok)."""
    diags = []
    if not isinstance(scene, dict):
        return ["scene: expected a JSON object"]
    for key in sorted(set(scene) - SCENE_KEYS):
        diags.append(f"{key}: unknown key (allowed: {', '.join(sorted(SCENE_KEYS))})")
    if "lattice" in scene:
        lat = scene["lattice"]
        if isinstance(lat, dict):
            extra = set(lat) - {"gram", "name"}
            for k in sorted(extra):
                diags.append(f"lattice.{k}: unknown key")
            try:
                g = _int_matrix(lat.get("gram"), "lattice.gram")
                if len(g) != len(g[0]):
                    diags.append("lattice.gram: not square")
                else:
                    bad = [(i, j) for i in range(len(g)) for j in range(i + 1, len(g)) if g[i][j] != g[j][i]]
                    for i, j in bad:
                        diags.append(f"lattice.gram[{i}][{j}] = {g[i][j]} but lattice.gram[{j}][{i}] = {g[j][i]}")
                    if not bad and xl.det(g) == 0:
                        diags.append("lattice.gram: degenerate (determinant 0)")
            except UsageError as exc:
                diags.append(str(exc))
        elif isinstance(lat, str):
            try:
                parse_lattice(lat)
            except (ValueError, ConesmithError) as exc:
                diags.append(f"lattice: {exc}")
        else:
            diags.append("lattice: expected a name or an object with 'gram'")
    for key in ("cone", "window"):
        if key in scene:
            obj = scene[key]
            if isinstance(obj, dict):
                for k in sorted(set(obj) - {"generators"}):
                    diags.append(f"{key}.{k}: unknown key")
            try:
                c = _cone_from(obj, key)
                if key == "cone" and not c.is_pointed:
                    diags.append(f"{key}: not pointed (contains a line)")
            except (UsageError, ValueError) as exc:
                diags.append(f"{key}: {exc}" if not str(exc).startswith(key) else str(exc))
    if "fan" in scene:
        obj = scene["fan"]
        cones = obj.get("cones") if isinstance(obj, dict) else None
        if not isinstance(cones, list):
            diags.append("fan.cones: expected a list of generator lists")
        else:
            try:
                built = [RationalCone(_int_matrix(c, f"fan.cones[{i}]")) for i, c in enumerate(cones)]
                for i, c in enumerate(built):
                    if not c.is_pointed:
                        diags.append(f"fan.cones[{i}]: not pointed")
                if not diags:
                    rep = Fan.from_maximal(built).validate()
                    for v in rep["violations"]:
                        diags.append(f"fan: {v['kind']} {to_json(v)}")
            except (UsageError, ValueError) as exc:
                diags.append(str(exc))
    if "group" in scene:
        obj = scene["group"]
        if not isinstance(obj, list):
            diags.append("group: expected a list of matrices")
        else:
            for i, m in enumerate(obj):
                try:
                    g = _int_matrix(m, f"group[{i}]")
                    if len(g) != len(g[0]):
                        diags.append(f"group[{i}]: not square")
                    elif xl.det(g) not in (1, -1):
                        diags.append(f"group[{i}]: not unimodular (determinant {xl.det(g)})")
                except UsageError as exc:
                    diags.append(str(exc))
    if "model" in scene:
        obj = scene["model"]
        if not isinstance(obj, dict) or obj.get("kind") not in ("lorentzian", "psd"):
            diags.append("model.kind: expected 'lorentzian' or 'psd'")
        else:
            for k in sorted(set(obj) - {"kind", "g"}):
                diags.append(f"model.{k}: unknown key")
            if obj["kind"] == "psd" and not isinstance(obj.get("g"), int):
                diags.append("model.g: expected an integer for the psd model")
    if "flags" in scene:
        obj = scene["flags"]
        if not isinstance(obj, dict):
            diags.append("flags: expected an object")
        else:
            for k in sorted(set(obj) - FLAG_KEYS):
                diags.append(f"flags.{k}: unknown key")
    return diags


def load_scene(path: str) -> dict:
    scene = load_json(path)
    diags = validate_scene(scene)
    if diags:
        raise UsageError(f"{path}: invalid scene:\n  " + "\n  ".join(diags))
    return scene


# ---------------------------------------------------------------- reports


def verdict_report(v) -> dict:
    return {
        "rays": v.rays,
        "q_gorenstein": v.q_gorenstein,
        "m": v.m,
        "gorenstein_index": v.gorenstein_index,
        "canonical": v.canonical,
        "terminal": v.terminal,
        "smooth": v.smooth,
        "witness": v.witness,
        "pi_lattice_points": v.lattice_points,
    }


def _divisor(d):
    return None if d is None else to_json(d)


def quotient_report(a) -> dict:
    klt = a.klt
    rep = {
        "verdict": verdict_report(a.verdict),
        "group_order": a.group.order,
        "elements": [
            {
                "element": r.element,
                "classification": r.classification,
                "rank_g_minus_identity": r.rank_g_minus_identity,
                "eigenvalue": r.eigenvalue,
                "torus_fixed_components": r.torus_fixed_components,
                "fixed_dimension": r.fixed_dimension,
                "component_labels": r.component_labels,
            }
            for r in a.elements
        ],
        "ramification": {
            "divisor": str(a.ramification),
            "summands": [{"reflection": g, "components": c} for g, c in a.ramification.summands],
            "total_components": a.ramification.total_components,
        },
        "characters": [
            {"reflection": c.reflection, "alpha": c.alpha, "multiple": c.multiple, "m0": c.m0} for c in a.characters
        ],
        "invariant_reduction": _divisor(a.invariant_reduction),
        "q_cartier_status": a.q_cartier_status,
        "q_cartier": None if a.q_cartier is None else a.q_cartier,
        "quotient_q_gorenstein": None if a.q_cartier is None else a.q_cartier.q_cartier,
        "character_independence": [{"variant": n, "agrees": ok} for n, ok in a.independence],
        "klt_certificate": klt if a.certified else None,
        "refusal": None if a.certified else klt,
    }
    return rep


def worked_example() -> dict:
    """Reflection quotient of the cone over the symmetric pentagon
    ``(+-1, +-1, 1), (0, 2, 1)`` by ``diag(-1, 1, 1)``."""
    cone = RationalCone(WORKED_CONE)
    group = close_group(WORKED_GROUP)
    a = quotient_analysis(cone, group)
    stated = TorusInvariantDivisor({r: (0 if r == WORKED_SKIPPED_RAY else -1) for r in cone.rays})
    rep = quotient_report(a)
    rep["cone"] = cone.rays
    rep["face_count"] = len(cone.faces())
    rep["negated_reduction"] = _divisor(stated)
    rep["negated_reduction_q_cartier"] = q_cartier_test(cone, stated)
    return rep


def _model_from(kind, lattice, g):
    if kind == "psd":
        if g is None:
            raise UsageError("--g is required for the psd model")
        return PSDModel(g)
    if lattice is None:
        raise UsageError("--lattice is required for the lorentzian model")
    return LorentzianModel(lattice)


def perfect_report(model, window, height) -> dict:
    piece = perfect_fan_local(model, window, height)
    canon = verify_perfect_canonical(model, piece=piece)
    adm = verify_admissible_local(model, piece.fan, (), piece.window)
    return {
        "model": model.describe(),
        "window": piece.window.generators,
        "height": piece.height,
        "facets": [
            {
                "normal": f.normal,
                "vertices": f.vertices,
                "points": f.points,
                "certificate": {"box_lo": f.certificate["box"][0], "box_hi": f.certificate["box"][1],
                                "points_checked": f.certificate["points_checked"],
                                "normal_interior_to_dual": f.certificate["interior_dual"]},
            }
            for f in piece.facets
        ],
        "fan": {"cones": [c.rays for c in piece.fan.cones], "rays": piece.fan.rays},
        "verdicts": [verdict_report(v) for v in canon["verdicts"]],
        "canonical": canon["canonical"],
        "q_gorenstein": canon["q_gorenstein"],
        "gorenstein_index": canon["gorenstein_index"],
        "falsification_witnesses": canon["witnesses"],
        "admissibility": {k: adm[k] for k in ("ok", "checks", "cone_count", "maximal_cone_count", "global_finiteness")},
    }


def k3_report(scenario, height, max_support) -> dict:
    lat = scenario.lattice
    q = scenario.quotient
    disc = discriminant_form(lat)
    qdisc = discriminant_form(q)
    probe = main_theorem_probe(scenario, height, max_support)
    return {
        "d": scenario.d,
        "lattice": {"name": lat.name, "rank": lat.rank, "even": lat.is_even, "signature": lat.signature,
                    "det": lat.det, "discriminant": disc.invariant_factors, "q_values": disc.q_values},
        "isotropic": scenario.isotropic.vector,
        "partner": scenario.partner,
        "quotient": {"rank": q.rank, "signature": q.signature, "discriminant": qdisc.invariant_factors,
                     "q_values": qdisc.q_values},
        "splitting_verified": True,
        "notes": scenario.notes,
        "probe": {
            "label": probe.label,
            "height": probe.height,
            "max_support": probe.max_support,
            "vectors_examined": probe.examined,
            "reflections": probe.reflections,
            "lifted": len(probe.lifted),
            "not_lifted": probe.not_lifted,
            "skipped_non_integral": probe.skipped_non_integral,
            "round_trip_ok": probe.round_trip_ok,
            "lifts": probe.lifted,
        },
    }


# ---------------------------------------------------------------- commands


def _scene(args):
    return load_scene(args.scene) if getattr(args, "scene", None) else {}


def cmd_analyze_cone(args):
    scene = _scene(args)
    if args.cone:
        obj = load_json(args.cone)
    elif "cone" in scene:
        obj = scene["cone"]
    else:
        raise UsageError("a cone is required (--cone FILE or a scene with 'cone')")
    cone = _cone_from(obj)
    try:
        v = singularity_verdict(cone)
    except NonPointedCone as exc:
        raise UsageError(str(exc)) from None
    rep = verdict_report(v)
    rep["face_count"] = len(cone.faces())
    state = "canonical" if v.canonical else ("Q-Gorenstein, not canonical" if v.q_gorenstein else "not Q-Gorenstein")
    _emit(rep, f"cone with {len(v.rays)} rays: {state}, index {v.gorenstein_index}")
    return EXIT_OK


def cmd_perfect_fan(args):
    scene = _scene(args)
    kind = args.model or scene.get("model", {}).get("kind") or "lorentzian"
    g = args.g if args.g is not None else scene.get("model", {}).get("g")
    lattice = None
    if args.lattice:
        lattice = _lattice_arg(args.lattice)
    elif "lattice" in scene:
        lattice = load_lattice(scene["lattice"])
    model = _model_from(kind, lattice, g)
    if args.window:
        gens = _generators(load_json(args.window), "window")
    elif "window" in scene:
        gens = _generators(scene["window"], "window")
    else:
        gens = None
    window = make_window(model, gens) if gens is not None else default_window(model)
    height = args.height if args.height is not None else scene.get("flags", {}).get("height")
    try:
        rep = perfect_report(model, window, height)
    except CertificateFailure as exc:
        _emit({"error": "certificate-failure", "message": str(exc), "candidate": exc.candidate},
              f"certificate failure: {exc} (try doubling --height)")
        return EXIT_CERTIFICATE
    ok = rep["canonical"] and not rep["falsification_witnesses"]
    _emit(rep, f"{len(rep['facets'])} perfect facets in window; canonical: {ok}")
    return EXIT_OK


def cmd_quotient(args):
    scene = _scene(args)
    cone_obj = load_json(args.cone) if args.cone else scene.get("cone")
    group_obj = load_json(args.group) if args.group else scene.get("group")
    if cone_obj is None or group_obj is None:
        raise UsageError("a cone and a group are required")
    cone = _cone_from(cone_obj)
    try:
        group = _group_from(group_obj, rank=cone.ambient_dim)
    except NonUnimodular as exc:
        raise UsageError(str(exc)) from None
    except GroupTooLarge as exc:
        _emit({"refusal": {"failed_check": "group is finite", "message": str(exc)}}, f"refused: {exc}")
        return EXIT_REFUSAL
    try:
        a = quotient_analysis(cone, group)
    except (GroupDoesNotAct, NonPointedCone) as exc:
        _emit({"refusal": {"failed_check": "group preserves the cone", "message": str(exc)}}, f"refused: {exc}")
        return EXIT_REFUSAL
    rep = quotient_report(a)
    if a.certified:
        _emit(rep, f"klt certificate emitted; quotient Q-Gorenstein: {rep['quotient_q_gorenstein']}")
        return EXIT_OK
    _emit(rep, f"refused: {a.klt.failed_check}")
    return EXIT_REFUSAL


def cmd_k3(args):
    scene = _scene(args)
    flags = scene.get("flags", {})
    d = args.d if args.d is not None else flags.get("d")
    height = args.height if args.height is not None else flags.get("height", 1)
    support = args.max_support if args.max_support is not None else flags.get("max_support", 2)
    if d is not None:
        if d < 1:
            raise UsageError("--d must be a positive integer")
        sc = polarized_scenario(d)
    elif "lattice" in scene and "isotropic" in flags:
        sc = isotropic_splitting(load_lattice(scene["lattice"]), flags["isotropic"])
    else:
        raise UsageError("--d is required (or a scene with a lattice and flags.isotropic)")
    rep = k3_report(sc, height, support)
    p = rep["probe"]
    _emit(rep, f"signature {tuple(rep['lattice']['signature'])}, |A| = {abs(rep['lattice']['det'])}; "
               f"probe lifted {p['lifted']} of {p['reflections']} reflections")
    return EXIT_OK


def cmd_paper_example(args):
    rep = worked_example()
    ok = rep["klt_certificate"] is not None
    _emit(rep, "worked example: canonical cone, one reflection with 2 fixed components, "
               f"reduction Q-Cartier: {rep['quotient_q_gorenstein']}, klt certificate: {ok}")
    return EXIT_OK if ok else EXIT_REFUSAL


def cmd_validate(args):
    if not args.scene:
        raise UsageError("--scene is required")
    scene = load_json(args.scene)
    diags = validate_scene(scene)
    _emit({"ok": not diags, "diagnostics": diags}, "ok" if not diags else f"{len(diags)} problem(s)")
    return EXIT_OK if not diags else EXIT_USAGE


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="conesmith", description="Exact toric, lattice and perfect cone computations.")
    p.add_argument("--version", action="store_true", help="print version and kernel backend")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    a = sub.add_parser("analyze-cone", help="Q-Gorenstein and canonical tests for a cone")
    a.add_argument("--cone", help='JSON file {"generators": [[...], ...]}')
    a.add_argument("--scene")
    a.set_defaults(func=cmd_analyze_cone)

    f = sub.add_parser("perfect-fan", help="local perfect cone decomposition with certificates")
    f.add_argument("--model", choices=["lorentzian", "psd"])
    f.add_argument("--lattice", help="lattice name such as U+<-2> or a JSON file")
    f.add_argument("--g", type=int, help="matrix size for the psd model")
    f.add_argument("--window", help="JSON cone file for the window")
    f.add_argument("--height", type=int)
    f.add_argument("--scene")
    f.set_defaults(func=cmd_perfect_fan)

    q = sub.add_parser("quotient", help="quotient of an affine toric variety by a finite group")
    q.add_argument("--cone")
    q.add_argument("--group", help="JSON list of generator matrices")
    q.add_argument("--scene")
    q.set_defaults(func=cmd_quotient)

    k = sub.add_parser("k3", help="polarized K3 lattice scenario and reflection lifting probe")
    k.add_argument("--d", type=int)
    k.add_argument("--height", type=int)
    k.add_argument("--max-support", type=int, dest="max_support")
    k.add_argument("--scene")
    k.set_defaults(func=cmd_k3)

    e = sub.add_parser("paper-example", help="reflection quotient of the cone over a symmetric pentagon")
    e.set_defaults(func=cmd_paper_example)

    v = sub.add_parser("validate", help="check a scene file")
    v.add_argument("--scene")
    v.set_defaults(func=cmd_validate)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse usage errors and --help
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    if args.version:
        from . import __version__

        print(f"conesmith {__version__} ({BACKEND} kernel)")
        return EXIT_OK
    if not getattr(args, "command", None):
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as exc:
        sys.stderr.write(f"conesmith: {exc}\n")
        return EXIT_USAGE
    except (ValueError, ConesmithError) as exc:
        sys.stderr.write(f"conesmith: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
