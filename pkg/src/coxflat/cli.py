"""Command-line interface: JSON on stdout, a one-line summary on stderr.

Exit status: 0 success, 1 domain error, 2 usage error, 3 resource cap.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import buildings as bld
from .cayley import CoxeterGroup
from .diagram import INF, classify, components, flat_rank, is_hyperbolic, matrix_from_json, named, parse_matrix
from .errors import CoxflatError, ResourceCapError
from .flats import StandardFlat, dichotomy, extract_free_abelian, flat_walls, m_eucl, parallel_class, rank_witness
from .subgroups import chain_kind, is_euclidean_triangle, parabolic_closure, reflection_subgroup
from .walls import Wall, WallSet, convex_hull, gallery_distance, separating_walls, split_convex

COMMANDS = [
    "classify", "rank", "hyperbolic", "ball", "distance", "walls", "hull", "split", "subgroup",
    "triangle", "closure", "flat", "witness", "building-check", "building-project",
    "building-apartment", "building-flat",
]
DOT_COMMANDS = {"ball", "hull"}


class UsageError(Exception):
    pass


def load_matrix(text: str):
    """Inline JSON, a path to a JSON file, or a named type such as ``A~2``."""
    text = text.strip()
    if text.startswith("{"):
        return parse_matrix(text)
    if os.path.exists(text):
        with open(text, encoding="utf-8") as fh:
            return parse_matrix(fh.read())
    try:
        return named(text)
    except (ValueError, IndexError):
        raise UsageError(f"--matrix {text!r} is neither JSON, a file, nor a known type name") from None


def _words(text: str) -> list:
    return [w.strip() for w in text.split(";")] if text is not None else []


def _labels(text: str) -> list:
    return [x for x in text.replace(",", " ").split()]


def _walls(g: CoxeterGroup, text: str) -> list:
    out = []
    for w in _words(text):
        if w:
            out.append(Wall.from_reflection(g, g.element(w)))
    if not out:
        raise UsageError("--walls needs at least one reflection word")
    return out


def _json_arg(text: str, what: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{what} is not valid JSON: {exc}") from None


def _building(args) -> bld.BuildingModel:
    M = load_matrix(args.matrix)
    thickness = _json_arg(args.thickness, "--thickness") if args.thickness else None
    return bld.BuildingModel(M, thickness)


# -- command handlers: return (json object, summary line) ------------------

def cmd_classify(args):
    M = load_matrix(args.matrix)
    if args.component:
        c = classify(M, _labels(args.component))
        return c.to_json(), f"{c.kind}{f' ({c.type_name})' if c.type_name else ''}"
    parts = []
    for part in components(M):
        c = classify(M, part)
        rec = c.to_json()
        rec["generators"] = part
        parts.append(rec)
    return {"components": parts}, ", ".join(f"{'/'.join(p['generators'])}: {p['kind']}" for p in parts)


def cmd_rank(args):
    rep = flat_rank(load_matrix(args.matrix))
    return rep.to_json(), f"flat rank {rep.rank} witnessed by T = {{{', '.join(rep.witness)}}}"


def cmd_hyperbolic(args):
    M = load_matrix(args.matrix)
    rep = flat_rank(M)
    hyp = rep.rank <= 1
    assert hyp == is_hyperbolic(M)
    return {"hyperbolic": hyp, "rank": rep.rank}, f"{'hyperbolic' if hyp else 'not hyperbolic'} (flat rank {rep.rank})"


def _group(args):
    return CoxeterGroup(load_matrix(args.matrix), precision=args.precision,
                        max_radius=args.max_radius, max_elements=args.max_elements)


def cmd_ball(args):
    g = _group(args)
    ball = g.enumerate_ball(args.radius)
    if args.output == "dot":
        return ball.to_dot(), f"{len(ball)} elements"
    return ball.to_json(), f"{len(ball)} elements within radius {args.radius}"


def cmd_distance(args):
    g = _group(args)
    u, v = g.element(args.u), g.element(args.v)
    d = gallery_distance(u, v)
    return {"u": u.labels(), "v": v.labels(), "distance": d}, f"d({u}, {v}) = {d}"


def cmd_walls(args):
    g = _group(args)
    u, v = g.element(args.u), g.element(args.v)
    ws = separating_walls(u, v)
    return {"u": u.labels(), "v": v.labels(), "walls": ws.to_json(), "count": len(ws)}, \
        f"{len(ws)} walls separate {u} from {v}"


def cmd_hull(args):
    g = _group(args)
    ball = g.enumerate_ball(args.radius)
    C = [g.element(w) for w in _words(args.elements)]
    hull = convex_hull(C, ball)
    if args.output == "dot":
        return ball.to_dot(highlight=hull.elements), f"hull of {len(C)} chambers has {len(hull)} chambers"
    return hull.to_json(), f"hull of {len(C)} chambers has {len(hull)} chambers" + \
        (" (ball-relative)" if hull.ball_relative else "")


def cmd_split(args):
    g = _group(args)
    x, y = g.element(args.x), g.element(args.y)
    M = [Wall.from_reflection(g, g.element(w)) for w in _words(args.walls) if w] if args.walls else []
    z = split_convex(x, y, M)
    return {"x": x.labels(), "y": y.labels(), "M": WallSet(M).to_json(), "z": z.labels()}, f"z = {z}"


def cmd_subgroup(args):
    g = _group(args)
    S = reflection_subgroup(_walls(g, args.walls), depth=args.depth)
    return S.to_json(), f"{S.rank} canonical generators, {S.certification}"


def cmd_triangle(args):
    g = _group(args)
    S = reflection_subgroup(_walls(g, args.walls), depth=args.depth)
    flag, tag = is_euclidean_triangle(S)
    return {"euclidean_triangle": flag, "tag": tag, "subgroup": S.to_json()}, \
        f"{'Euclidean triangle ' + tag if flag else 'not a Euclidean triangle'}"


def cmd_closure(args):
    g = _group(args)
    ball = g.enumerate_ball(args.radius)
    pc = parabolic_closure(_walls(g, args.walls), ball)
    return pc.to_json(), f"closure w = {pc.base or '1'}, T = {{{', '.join(pc.T)}}}"


def _flat(args, g):
    T = _labels(args.T) if args.T else list(g.M.generators)
    return StandardFlat.of(g, T, base=args.base or ())


def cmd_flat(args):
    g = _group(args)
    F = _flat(args, g)
    walls = flat_walls(F, args.window)
    out = {"flat": F.to_json(), "window": args.window, "window_relative": True,
           "flat_walls": walls.to_json()}
    if args.pivot:
        mu = Wall.from_reflection(g, g.element(args.pivot))
        pc = parallel_class(F, mu, args.window, walls)
        out["parallel_class"] = pc.to_json()
    if args.window >= 2:
        me = m_eucl(F, args.window)
        out["m_eucl"] = me.to_json()
        rep = dichotomy(F, args.window)
        out["dichotomy"] = rep.to_json()
        summary = f"{len(walls)} walls, case ({rep.case})"
    else:
        summary = f"{len(walls)} walls"
    return out, summary


def cmd_witness(args):
    g = _group(args)
    if args.T:
        W = extract_free_abelian(_flat(args, g))
    else:
        W = rank_witness(g)
    return W.to_json(), f"Z^{W.rank} witness, commutators {'trivial' if W.commutators_trivial else 'NOT trivial'}"


def cmd_building_check(args):
    B = _building(args)
    rep = bld.check_axioms(B, args.samples, args.radius, seed=args.seed)
    out = rep.to_json()
    out["model"] = B.to_json()
    return out, f"{B.kind} model: {len(rep.violations)} violations in {args.samples} samples"


def cmd_building_project(args):
    B = _building(args)
    U = B.M.indices(_labels(args.U)) if args.U else ()
    anchor = B.address(_json_arg(args.anchor, "--anchor")) if args.anchor else B.base()
    x = B.address(_json_arg(args.x, "--x"))
    c = bld.project(B, bld.Residue(U, anchor), x)
    return {"projection": B.to_json_address(c), "distance": B.distance(x, c), "gate_checked": True}, \
        f"projection at numerical distance {B.distance(x, c)}"


def _chart(B, text):
    """``[{"address": [[s, d], ...], "element": "word"}, ...]`` as (chambers, map)."""
    spec = _json_arg(text, "--chambers")
    C, f = [], {}
    for item in spec:
        a = B.address(item["address"])
        C.append(a)
        f[a] = B.group.element(item.get("element", ""))
    return C, f


def cmd_building_apartment(args):
    B = _building(args)
    if args.chambers:
        C, f = _chart(B, args.chambers)
    else:
        C, f = [B.base()], {B.base(): B.group.identity()}
    A = bld.extend_apartment(B, C, f, radius=args.radius, budget=args.budget)
    bad = A.verify()
    out = A.to_json()
    out["isometric"] = not bad
    return out, f"apartment with {len(A.phi)} chambers, {'isometric' if not bad else 'NOT isometric'}"


def cmd_building_flat(args):
    B = _building(args)
    g = B.group
    if args.chambers:
        C, f = _chart(B, args.chambers)
        A = bld.extend_apartment(B, C, f, radius=args.apartment_radius, budget=args.budget)
    else:
        A = bld.standard_apartment(B, args.apartment_radius)
    F = _flat(args, g)
    c0 = B.address(_json_arg(args.c0, "--c0")) if args.c0 else A.phi[F.base.word]
    R = bld.flat_projection_set(B, A, F, c0, args.window)
    return R.to_json(B), f"{len(R.chambers)} projections, verdict {'success' if R.success else 'failure'}"


HANDLERS = {name: globals()["cmd_" + name.replace("-", "_")] for name in COMMANDS}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="coxflat", description="Walls, flats and buildings of Coxeter groups.")
    sub = p.add_subparsers(dest="command", required=True, metavar="command")

    def add(name, help_text, group=True):
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("--matrix", required=True,
                        help="matrix as inline JSON, a JSON file, or a type name like A~2 (0 encodes infinity)")
        sp.add_argument("--output", choices=["json", "dot", "text"], default="json")
        sp.add_argument("--seed", type=int, default=0)
        if group:
            sp.add_argument("--precision", type=int, default=200, help="interval precision in bits")
            sp.add_argument("--max-radius", type=int, default=12)
            sp.add_argument("--max-elements", type=int, default=2_000_000)
        return sp

    sp = add("classify", "classify diagram components", group=False)
    sp.add_argument("--component", help="comma-separated generators of one irreducible component")
    add("rank", "flat rank with its maximizing subset", group=False)
    add("hyperbolic", "hyperbolicity via the flat rank", group=False)
    sp = add("ball", "Cayley ball")
    sp.add_argument("--radius", type=int, required=True)
    for name, help_text in (("distance", "gallery distance"), ("walls", "separating walls")):
        sp = add(name, help_text)
        sp.add_argument("--u", required=True)
        sp.add_argument("--v", required=True)
    sp = add("hull", "convex hull within a ball")
    sp.add_argument("--elements", required=True, help="words separated by ';'")
    sp.add_argument("--radius", type=int, required=True)
    sp = add("split", "chamber z splitting M(x,y)")
    sp.add_argument("--x", required=True)
    sp.add_argument("--y", required=True)
    sp.add_argument("--walls", default="", help="reflection words of M separated by ';'")
    for name, help_text in (("subgroup", "reflection subgroup"), ("triangle", "Euclidean triangle test")):
        sp = add(name, help_text)
        sp.add_argument("--walls", required=True, help="reflection words separated by ';'")
        sp.add_argument("--depth", type=int, default=256)
    sp = add("closure", "parabolic closure within a ball")
    sp.add_argument("--walls", required=True)
    sp.add_argument("--radius", type=int, default=4)
    sp = add("flat", "walls and dichotomy of a standard flat")
    sp.add_argument("--T", help="comma-separated generators (default: all)")
    sp.add_argument("--base", default="")
    sp.add_argument("--window", type=int, default=6)
    sp.add_argument("--pivot", help="reflection word of a wall for its parallel class")
    sp = add("witness", "free abelian witness")
    sp.add_argument("--T", help="comma-separated generators of a standard flat (default: rank witness)")
    sp.add_argument("--base", default="")
    for name, help_text in (("building-check", "check the building axioms"),
                            ("building-project", "projection onto a residue"),
                            ("building-apartment", "extend to an apartment"),
                            ("building-flat", "projection set of a flat")):
        sp = add(name, help_text, group=False)
        sp.add_argument("--thickness", help='JSON object like {"s": 2, "t": 2}')
    sp = sub.choices["building-check"]
    sp.add_argument("--samples", type=int, default=1000)
    sp.add_argument("--radius", type=int, default=5)
    sp = sub.choices["building-project"]
    sp.add_argument("--U", default="", help="comma-separated spherical type")
    sp.add_argument("--anchor", help="address JSON of a chamber of the residue")
    sp.add_argument("--x", required=True, help="address JSON")
    sp = sub.choices["building-apartment"]
    sp.add_argument("--chambers", help='JSON list of {"address": [...], "element": "word"}')
    sp.add_argument("--radius", type=int, default=3)
    sp.add_argument("--budget", type=int, default=200_000)
    sp = sub.choices["building-flat"]
    sp.add_argument("--chambers", help="chart of an apartment to extend (default: standard apartment)")
    sp.add_argument("--apartment-radius", type=int, default=6)
    sp.add_argument("--budget", type=int, default=200_000)
    sp.add_argument("--T", help="comma-separated generators of the flat (default: all)")
    sp.add_argument("--base", default="")
    sp.add_argument("--c0", help="address JSON (default: the flat's base chamber)")
    sp.add_argument("--window", type=int, default=4)
    return p


def _validate(args):
    for name in ("radius", "window", "samples", "depth", "apartment_radius", "budget",
                 "precision", "max_radius", "max_elements"):
        val = getattr(args, name, None)
        if val is not None and val < (0 if name == "radius" else 1):
            raise UsageError(f"--{name.replace('_', '-')} must be positive, got {val}")
    if args.output == "dot" and args.command not in DOT_COMMANDS:
        raise UsageError("--output dot is only valid for ball and hull")


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        _validate(args)
        obj, summary = HANDLERS[args.command](args)
    except UsageError as exc:
        print(f"coxflat {args.command}: usage error: {exc}", file=stderr)
        return 2
    except ResourceCapError as exc:
        print(f"coxflat {args.command}: resource cap: {exc}", file=stderr)
        return 3
    except (CoxflatError, ValueError, KeyError) as exc:
        print(f"coxflat {args.command}: error: {exc}", file=stderr)
        return 1
    if isinstance(obj, str):
        stdout.write(obj)
    elif args.output == "text":
        stdout.write(summary + "\n")
    else:
        stdout.write(json.dumps(obj, indent=2) + "\n")
    print(summary, file=stderr)
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
