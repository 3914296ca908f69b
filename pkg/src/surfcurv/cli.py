"""Command-line front end: spec parsing, verification runs, JSON/CSV
reports, and Wavefront OBJ mesh export.

Surface-spec documents are JSON with a `kind` key:

  {"kind": "family", "family": "scherk", "params": {"a": 1}}
  {"kind": "homothetical", "metric": "euclidean",
   "f": "x", "g": "(tan y)", "domain": [[-1, 1], [-0.7, 0.7]]}
  {"kind": "translation", "f1": "...", "f2": "...", "g1": "...", "g2": "...",
   "domain": [[s0, s1], [t0, t1]]}
  {"kind": "generic", "X": "(cos s)", "Y": "(sin s)", "Z": "t",
   "domain": [[s0, s1], [t0, t1]]}

Function fields are prefix S-expressions over one variable (any identifier;
generic surfaces use exactly s and t) with operators add, sub, mul, div,
pow (constant exponent), neg and functions exp, log, sin, cos, tan, sinh,
cosh.  Exit codes: 0 pass, 2 verification failure, 1 error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from typing import Optional

import numpy as np

from . import __version__
from .catalog import FamilySpec, family_metric, list_families, make_family
from .errors import DomainError, ParseError, SpecError, SurfcurvError
from .geometry import (GenericParametric, GraphAxis, HomotheticalGraph, Metric,
                       Surface, TranslationSurface)
from .jets import SmoothFn1, parse_sexpr
from .verify import (ExpBranch, GridSpec, HomotheticalNonzeroK, PowerBranch,
                     TanODE, TranslationPlanarGenerator, check_constancy,
                     nonexistence_probe, sample_curvature)

_KIND_KEYS = {
    "translation": {"kind", "metric", "f1", "f2", "g1", "g2", "domain"},
    "homothetical": {"kind", "metric", "f", "g", "axis", "domain"},
    "generic": {"kind", "metric", "X", "Y", "Z", "domain"},
    "family": {"kind", "metric", "family", "params", "domain"},
}

_ODE_DEFAULTS = {
    "tan": (TanODE(a=1.0, k=1.0, d=0.0), (0.0, 1.2)),
    "exp": (ExpBranch(b=1.0, c=1.0, p=1.0, q=1.0), (0.0, 1.0)),
    "power": (PowerBranch(a=2.0, b=1.0, c=1.0, p=1.0, q=1.0), (0.0, 0.5)),
}


# --------------------------------------------------------------------------
# surface-spec documents
# --------------------------------------------------------------------------

def canonical_spec_json(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":"))


def spec_digest(doc: dict) -> str:
    return hashlib.sha256(canonical_spec_json(doc).encode("utf-8")).hexdigest()


def parse_surface_spec(text: str) -> tuple[Surface, Metric]:
    """Build a surface and metric from a spec document; diagnostics name the
    offending key or expression."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise ParseError("spec document must be a JSON object")
    kind = doc.get("kind")
    if kind not in _KIND_KEYS:
        raise ParseError(
            f"key 'kind' must be one of {sorted(_KIND_KEYS)}, got {kind!r}")
    unknown = set(doc) - _KIND_KEYS[kind]
    if unknown:
        raise ParseError(f"unknown keys for kind {kind!r}: {sorted(unknown)}")
    if kind == "family":
        return _parse_family(doc)
    metric = _parse_metric(doc.get("metric", "euclidean"))
    domain = _parse_domain(doc)
    if kind == "translation":
        return _parse_translation(doc, domain), metric
    if kind == "homothetical":
        return _parse_homothetical(doc, domain), metric
    return _parse_generic(doc, domain), metric


def _parse_metric(value) -> Metric:
    try:
        return Metric(value)
    except ValueError:
        raise ParseError(
            f"key 'metric' must be 'euclidean' or 'lorentzian', got {value!r}"
        ) from None


def _parse_domain(doc: dict):
    domain = doc.get("domain")
    if (not isinstance(domain, list) or len(domain) != 2
            or any(not isinstance(r, list) or len(r) != 2 for r in domain)):
        raise ParseError("key 'domain' must be [[s0, s1], [t0, t1]]")
    (s0, s1), (t0, t1) = domain
    try:
        out = ((float(s0), float(s1)), (float(t0), float(t1)))
    except (TypeError, ValueError):
        raise ParseError("key 'domain' bounds must be numbers") from None
    if not (out[0][0] < out[0][1] and out[1][0] < out[1][1]):
        raise SpecError(f"empty domain rectangle {domain}")
    return out


def _require_str(doc: dict, key: str) -> str:
    value = doc.get(key)
    if not isinstance(value, str):
        raise ParseError(f"key {key!r} must be an S-expression string")
    return value


def _parse_fn(doc: dict, key: str, interval) -> SmoothFn1:
    text = _require_str(doc, key)
    try:
        fn = SmoothFn1(parse_sexpr(text), interval)
    except ParseError as exc:
        raise ParseError(f"{key}: {exc}") from None
    _probe_fn(fn, key)
    return fn


def _probe_fn(fn: SmoothFn1, key: str, n: int = 9) -> None:
    # catch structural domain violations (log of non-positive, tan pole,
    # bad power base) before any grid run touches the function
    for x in np.linspace(fn.interval[0], fn.interval[1], n):
        try:
            fn.jet(float(x))
        except DomainError as exc:
            raise SpecError(
                f"{key}: {exc} at {key[0]}={float(x):g} inside declared "
                f"domain {list(fn.interval)}") from None


def _parse_translation(doc: dict, domain) -> Surface:
    s_range, t_range = domain
    f1 = _parse_fn(doc, "f1", s_range)
    f2 = _parse_fn(doc, "f2", s_range)
    g1 = _parse_fn(doc, "g1", t_range)
    g2 = _parse_fn(doc, "g2", t_range)
    return TranslationSurface.from_graphs(f1, f2, g1, g2, s_range, t_range)


def _parse_homothetical(doc: dict, domain) -> Surface:
    x_range, y_range = domain
    f = _parse_fn(doc, "f", x_range)
    g = _parse_fn(doc, "g", y_range)
    axis_key = doc.get("axis", "z")
    try:
        axis = GraphAxis(axis_key)
    except ValueError:
        raise ParseError(f"key 'axis' must be 'z' or 'x', got {axis_key!r}") from None
    return HomotheticalGraph(f, g, axis)


def _parse_generic(doc: dict, domain) -> Surface:
    exprs = {}
    for key in ("X", "Y", "Z"):
        text = _require_str(doc, key)
        try:
            exprs[key] = parse_sexpr(text)
        except ParseError as exc:
            raise ParseError(f"{key}: {exc}") from None
    try:
        surface = GenericParametric(exprs["X"], exprs["Y"], exprs["Z"], domain)
    except DomainError as exc:
        raise SpecError(str(exc)) from None
    (s0, s1), (t0, t1) = domain
    for s in np.linspace(s0, s1, 3):
        for t in np.linspace(t0, t1, 3):
            try:
                surface.bijets(float(s), float(t))
            except DomainError as exc:
                raise SpecError(
                    f"generic surface: {exc} at (s,t)=({s:g},{t:g})") from None
    return surface


def _parse_family(doc: dict) -> tuple[Surface, Metric]:
    name = doc.get("family")
    if not isinstance(name, str):
        raise ParseError("key 'family' must be a family name string")
    params = doc.get("params", {})
    if not isinstance(params, dict):
        raise ParseError("key 'params' must be an object of numbers")
    domain = _parse_domain(doc) if "domain" in doc else None
    surface = make_family(FamilySpec(name, dict(params), domain))
    metric = (_parse_metric(doc["metric"]) if "metric" in doc
              else family_metric(name))
    return surface, metric


# --------------------------------------------------------------------------
# OBJ export
# --------------------------------------------------------------------------

def export_obj(surface: Surface, grid: GridSpec, path: str) -> None:
    """Write a v/f-only Wavefront OBJ: ns*nt vertices in row-major order and
    2(ns-1)(nt-1) triangular faces, 1-based indices, LF endings, 9
    significant digits."""
    svals = grid.s_values()
    tvals = grid.t_values()
    lines = []
    for i, s in enumerate(svals):
        for j, t in enumerate(tvals):
            try:
                p = surface.point(float(s), float(t))
            except DomainError as exc:
                raise DomainError(
                    f"mesh export aborted at node ({i},{j}), "
                    f"(s,t)=({s:g},{t:g}): {exc}") from None
            if not np.all(np.isfinite(p)):
                raise DomainError(
                    f"mesh export aborted at node ({i},{j}), "
                    f"(s,t)=({s:g},{t:g}): non-finite vertex")
            lines.append(f"v {p[0]:.9g} {p[1]:.9g} {p[2]:.9g}\n")
    nt = grid.nt
    for i in range(grid.ns - 1):
        for j in range(nt - 1):
            a = i * nt + j + 1
            b = a + nt
            lines.append(f"f {a} {b} {b + 1}\n")
            lines.append(f"f {a} {b + 1} {a + 1}\n")
    with open(path, "w", newline="\n") as fh:
        fh.writelines(lines)


# --------------------------------------------------------------------------
# commands
# --------------------------------------------------------------------------

def _load_doc(path: str) -> tuple[dict, Surface, Metric]:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    surface, metric = parse_surface_spec(text)
    return json.loads(text), surface, metric


def _parse_grid_arg(text: str) -> tuple[int, int]:
    try:
        ns, nt = text.lower().split("x")
        return int(ns), int(nt)
    except ValueError:
        raise ParseError(f"--grid expects NSxNT, e.g. 21x21, got {text!r}") from None


def _write_json(path: str, payload: dict) -> None:
    with open(path, "w", newline="\n") as fh:
        json.dump(payload, fh, sort_keys=True, separators=(",", ":"))
        fh.write("\n")


def _cmd_verify(args) -> int:
    doc, surface, metric = _load_doc(args.spec)
    ns, nt = _parse_grid_arg(args.grid)
    grid = GridSpec.for_surface(surface, ns, nt)
    samples = sample_curvature(surface, metric, grid, workers=args.workers)
    report = check_constancy(samples, args.quantity, args.expected, args.tol)
    print(f"{args.quantity} constancy: mean={report.mean!r} "
          f"max_abs_dev={report.max_abs_dev!r} tol={report.tol!r} "
          f"n={report.n_samples} skipped={report.skipped_degenerate} "
          f"verdict={report.verdict}")
    if args.csv:
        _write_samples_csv(args.csv, samples)
    if args.json:
        payload = {
            "tool_version": __version__,
            "spec_digest": spec_digest(doc),
            "reports": [report.to_dict()],
            "samples_path": args.csv,
        }
        _write_json(args.json, payload)
    return 0 if report.passed else 2


def _write_samples_csv(path: str, samples) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write("s,t,K,H,EGmF2,character\n")
        for smp in samples:
            fh.write(f"{smp.s!r},{smp.t!r},{smp.K!r},{smp.H!r},"
                     f"{smp.EGmF2!r},{smp.character.value}\n")


def _cmd_mesh(args) -> int:
    _, surface, _ = _load_doc(args.spec)
    ns, nt = _parse_grid_arg(args.grid)
    grid = GridSpec.for_surface(surface, ns, nt)
    export_obj(surface, grid, args.output)
    print(f"wrote {grid.ns * grid.nt} vertices, "
          f"{2 * (grid.ns - 1) * (grid.nt - 1)} faces to {args.output}")
    return 0


def _cmd_probe(args) -> int:
    problems = {
        "homothetical_nonzero_k": HomotheticalNonzeroK,
        "translation_planar_generator": TranslationPlanarGenerator,
    }
    if args.problem not in problems:
        raise ParseError(
            f"--problem must be one of {sorted(problems)}, got {args.problem!r}")
    problem = problems[args.problem](args.K0)
    result = nonexistence_probe(problem, args.seed, args.budget,
                                workers=args.workers)
    print(f"probe {result.problem}: best_residual={result.best_residual!r} "
          f"iterations={result.iterations} seed={result.seed}")
    if args.json:
        _write_json(args.json, {"tool_version": __version__,
                                "result": result.to_dict()})
    return 0


def _cmd_families(args) -> int:
    for spec in list_families():
        metric = family_metric(spec.name).value
        print(f"{spec.name}: metric={metric} "
              f"params={json.dumps(spec.params, sort_keys=True)}")
    return 0


def _cmd_crosscheck(args) -> int:
    if args.ode not in _ODE_DEFAULTS:
        raise ParseError(
            f"--ode must be one of {sorted(_ODE_DEFAULTS)}, got {args.ode!r}")
    from .verify import ode_crosscheck
    ode, interval = _ODE_DEFAULTS[args.ode]
    err = ode_crosscheck(ode, interval, args.steps)
    print(f"crosscheck {args.ode}: steps={args.steps} max_error={err!r}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="surfcurv",
        description="Curvature verification for translation and homothetical "
                    "surfaces in Euclidean and Lorentz-Minkowski space.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="sample a surface and certify K or H constancy")
    p.add_argument("spec", help="surface-spec JSON file")
    p.add_argument("--quantity", choices=("K", "H"), required=True)
    p.add_argument("--expected", type=float, default=None)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--grid", default="21x21", help="NSxNT grid counts")
    p.add_argument("--json", default=None, help="write a JSON report here")
    p.add_argument("--csv", default=None, help="write per-node samples here")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("mesh", help="export a triangulated OBJ mesh")
    p.add_argument("spec", help="surface-spec JSON file")
    p.add_argument("--grid", default="21x21", help="NSxNT grid counts")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=_cmd_mesh)

    p = sub.add_parser("probe", help="optimization search for constant-K counterexamples")
    p.add_argument("--problem", required=True,
                   help="homothetical_nonzero_k | translation_planar_generator")
    p.add_argument("--K0", type=float, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--budget", type=int, default=20)
    p.add_argument("--json", default=None)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=_cmd_probe)

    p = sub.add_parser("families", help="list the catalog of named families")
    p.set_defaults(func=_cmd_families)

    p = sub.add_parser("crosscheck", help="RK4 cross-check of a reduced ODE")
    p.add_argument("--ode", required=True, help="tan | exp | power")
    p.add_argument("--steps", type=int, default=10000)
    p.set_defaults(func=_cmd_crosscheck)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SurfcurvError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
