"""Command line front-end.  Every subcommand prints one JSON document (or a
plain table with --format table).

Exit status: 0 success, 1 domain error (HSIError), 2 input/parse error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .config import DEFAULT, use_tolerances
from .errors import HSIError, NotComposable

SEED_ENV = "HSIKIT_SEED"


class ParseError(Exception):
    pass


def load_input(arg: str):
    """Inline JSON (starting with '{' or '['), '-' for stdin, or a file path."""
    text = arg
    if arg == "-":
        text = sys.stdin.read()
    elif not arg.lstrip().startswith(("{", "[")):
        path = Path(arg)
        if not path.exists():
            raise ParseError(f"input file not found: {arg}")
        text = path.read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc


def _field(d, name, kind=None):
    if not isinstance(d, dict):
        raise ParseError(f"expected a JSON object containing {name!r}")
    if name not in d:
        raise ParseError(f"missing field {name!r}")
    v = d[name]
    if kind is not None:
        try:
            v = kind(v)
        except (TypeError, ValueError) as exc:
            raise ParseError(f"field {name!r}: {exc}") from exc
    return v


def _matrix(data, name="matrix"):
    if isinstance(data, dict):
        data = _field(data, name)
    if not isinstance(data, list) or not all(isinstance(r, list) for r in data):
        raise ParseError(f"field {name!r} must be a list of integer rows")
    try:
        rows = [[int(x) for x in r] for r in data]
    except (TypeError, ValueError) as exc:
        raise ParseError(f"field {name!r}: entries must be integers") from exc
    if any(len(r) != len(rows) for r in rows):
        raise ParseError(f"field {name!r} must be a square matrix")
    return rows


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get(SEED_ENV)
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError as exc:
        raise ParseError(f"{SEED_ENV} must be an integer, got {env!r}") from exc


# -- subcommands --------------------------------------------------------------


def cmd_lens(args):
    from .correspondences import lens_intersection
    from .hsi_calc import h1_order, lens_hsi

    g = lens_hsi(args.p, args.q, args.cls)
    eps0 = -1 if args.cls else 1
    rep = lens_intersection(args.p, args.q, eps0, 1)
    return {
        "p": args.p,
        "q": args.q,
        "class": args.cls,
        "total_rank": g.total_rank,
        "h1": h1_order([[args.p]]),
        "intersection": rep.to_json(),
        "hsi": g.to_json(),
    }


def cmd_s2s1(args):
    from .correspondences import s2s1_intersection
    from .hsi_calc import s2s1_hsi

    g = s2s1_hsi(args.cls)
    rep = s2s1_intersection(1, -1 if args.cls else 1)
    return {"class": args.cls, "total_rank": g.total_rank, "intersection": rep.to_json(), "hsi": g.to_json()}


def _summand(d):
    from .hsi_calc import GradedGroup, lens_hsi, s2s1_hsi

    fam = str(_field(d, "family")).lower()
    cls = int(d.get("class", 0))
    if fam == "lens":
        p, q = _field(d, "p", int), _field(d, "q", int)
        return lens_hsi(p, q, cls), [[p]]
    if fam in ("s2s1", "s2xs1"):
        return s2s1_hsi(cls), [[0]]
    if fam == "group":
        m = d.get("matrix")
        return GradedGroup.from_json(_field(d, "hsi")), (_matrix(m) if m is not None else None)
    raise ParseError(f"field 'family': unknown value {fam!r}")


def cmd_connsum(args):
    from .hsi_calc import block_diag, euler_hsi, kunneth

    data = load_input(args.input)
    if isinstance(data, dict):
        data = _field(data, "summands")
    if not isinstance(data, list) or not data:
        raise ParseError("connsum input must be a non-empty list of summands")
    groups, mats = zip(*(_summand(d) for d in data))
    total = groups[0]
    for g in groups[1:]:
        total = kunneth(total, g)
    out = {"summands": len(groups), "total_rank": total.total_rank, "torsion": list(total.torsion), "hsi": total.to_json()}
    if all(m is not None for m in mats):
        out["euler"] = euler_hsi(block_diag(*mats))
    return out


def cmd_euler(args):
    from .hsi_calc import elementary_divisors, euler_hsi, h1_order

    M = _matrix(load_input(args.input))
    h = h1_order(M)
    return {
        "elementary_divisors": elementary_divisors(M) if M else [],
        "h1": "infinite" if h == math.inf else h,
        "euler": euler_hsi(M),
    }


def cmd_plumbing(args):
    from .hsi_calc import PlumbingTree, plumbing_minimal

    d = load_input(args.input)
    _field(d, "weights")
    try:
        tree = PlumbingTree.from_json(d)
    except (TypeError, ValueError, KeyError) as exc:
        raise ParseError(f"plumbing tree: {exc}") from exc
    return plumbing_minimal(tree).to_json()


def cmd_qa(args):
    from .hsi_calc import QACert, qa_verify

    d = load_input(args.input)
    try:
        cert = QACert.from_json(d)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"certificate: {exc}") from exc
    return qa_verify(cert).to_json()


def _word(d):
    from .cerf import CobWord, family_from_json, heegaard_word

    if isinstance(d, dict) and "family" in d:
        return heegaard_word(family_from_json(d))
    _field(d, "genus")
    _field(d, "pieces")
    try:
        return CobWord.from_json(d)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"cobordism word: {exc}") from exc
    except KeyError as exc:
        raise ParseError(f"cobordism word: missing field {exc}") from exc


def cmd_cerf_normalize(args):
    from .cerf import normalize

    w = _word(load_input(args.input))
    n = normalize(w)
    return {"input_length": len(w), "length": len(n), "text": str(n), "word": n.to_json()}


def cmd_intersect(args):
    from .cerf import family_from_json, family_intersection, heegaard_word

    d = load_input(args.input)
    _field(d, "family")
    fam = family_from_json(d)
    rep = family_intersection(fam)
    return {"report": rep.to_json(), "heegaard_word": str(heegaard_word(fam))}


def cmd_twist_check(args):
    from .twist import QuadraticProfile, fiber_intersection, intersection_clusters, load_profile, sphere_distance

    prof = load_profile(str(args.profile)) if args.profile else QuadraticProfile(args.lam)
    rng = np.random.default_rng(_seed(args))
    on_fiber = angle = 0.0
    clusters = []
    for _ in range(args.pairs):
        y0, y1 = rng.standard_normal(4), rng.standard_normal(4)
        y0 /= np.linalg.norm(y0)
        y1 /= np.linalg.norm(y1)
        z = fiber_intersection(y0, y1, prof)
        on_fiber = max(on_fiber, float(np.linalg.norm(z.v - y1)))
        angle = max(angle, abs(prof.angle(z.mu) - sphere_distance(y0, y1)))
        if args.clusters:
            clusters.append(intersection_clusters(y0, y1, prof))
    out = {"pairs": args.pairs, "seed": _seed(args), "max_fiber_error": on_fiber, "max_angle_error": angle, "concave": prof.is_concave()}
    if clusters:
        out["clusters"] = {"min": min(clusters), "max": max(clusters)}
    return out


def cmd_compose(args):
    from .correspondences import Correspondence, compose, embeddedness_check

    d = load_input(args.input)
    try:
        c1 = Correspondence.from_json(_field(d, "first"))
        c2 = Correspondence.from_json(_field(d, "second"))
    except KeyError as exc:
        raise ParseError(f"correspondence: missing field {exc}") from exc
    except (TypeError, ValueError) as exc:
        raise ParseError(f"correspondence: {exc}") from exc
    out = {}
    try:
        out["composite"] = compose(c1, c2).to_json()
    except NotComposable as exc:
        out["composite"] = None
        out["not_composable"] = str(exc)
    rep = embeddedness_check(c1, c2, samples=args.samples, rng=np.random.default_rng(_seed(args)))
    out["embeddedness"] = rep.to_json()
    out["seed"] = _seed(args)
    return out


# -- plumbing -------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hsikit", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "table"), default="json")
    common.add_argument("--seed", type=int, default=None, help=f"RNG seed (default: ${SEED_ENV} or 0)")
    common.add_argument("--tol-arith", type=float, default=DEFAULT.arith)
    common.add_argument("--tol-relation", type=float, default=DEFAULT.relation)
    common.add_argument("--tol-solver", type=float, default=DEFAULT.solver)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("lens", parents=[common], help="HSI rank and intersection count of L(p, q)")
    p.add_argument("p", type=int)
    p.add_argument("q", type=int)
    p.add_argument("--class", dest="cls", type=int, default=0)
    p.set_defaults(func=cmd_lens)

    p = sub.add_parser("s2s1", parents=[common], help="HSI of S^2 x S^1")
    p.add_argument("--class", dest="cls", type=int, default=0)
    p.set_defaults(func=cmd_s2s1)

    for name, func, helptext in (
        ("connsum", cmd_connsum, "Kunneth formula for a connected sum"),
        ("euler", cmd_euler, "|H_1| and Euler characteristic from a presentation matrix"),
        ("plumbing", cmd_plumbing, "minimality test for a plumbing forest"),
        ("qa", cmd_qa, "verify a quasi-alternating certificate"),
        ("cerf-normalize", cmd_cerf_normalize, "normalize a cobordism word"),
        ("intersect", cmd_intersect, "generalized intersection of a genus-1 family"),
    ):
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("input", help="JSON file, inline JSON, or '-' for stdin")
        p.set_defaults(func=func)

    p = sub.add_parser("twist-check", parents=[common], help="check the model twist fiber lemma on random pairs")
    p.add_argument("--pairs", type=int, default=20)
    p.add_argument("--lam", type=float, default=1.0)
    p.add_argument("--profile", type=Path, default=None, help="tabulated profile JSON {t, R, dR}")
    p.add_argument("--clusters", action="store_true", help="also scan for extra solution clusters")
    p.set_defaults(func=cmd_twist_check)

    p = sub.add_parser("compose", parents=[common], help="compose two correspondences and run the embeddedness check")
    p.add_argument("input")
    p.add_argument("--samples", type=int, default=10)
    p.set_defaults(func=cmd_compose)
    return ap


def _scalar_list(v) -> bool:
    return isinstance(v, list) and all(not isinstance(x, (dict, list)) for x in v)


def _table(obj, prefix="") -> list[str]:
    """Flatten nested JSON into 'dotted.key  value' lines."""
    items = obj.items() if isinstance(obj, dict) else enumerate(obj)
    lines = []
    for k, v in items:
        key = f"{prefix}{k}"
        if isinstance(v, (dict, list)) and v and not _scalar_list(v):
            lines += _table(v, key + ".")
        else:
            lines.append(f"{key:32s} {json.dumps(v)}")
    return lines


def run(argv=None) -> tuple[int, str]:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        with use_tolerances(arith=args.tol_arith, relation=args.tol_relation, solver=args.tol_solver):
            result = args.func(args)
    except ParseError as exc:
        return 2, json.dumps({"error": "parse", "message": str(exc)})
    except HSIError as exc:
        return 1, json.dumps({"error": type(exc).__name__, "message": str(exc)})
    if args.format == "table":
        return 0, "\n".join(_table(result))
    return 0, json.dumps(result, sort_keys=True)


def main(argv=None) -> int:
    code, text = run(argv)
    print(text, file=sys.stdout if code == 0 else sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
