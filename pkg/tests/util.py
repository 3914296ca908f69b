"""Shared helpers for the test suite: tolerant comparisons, random surface
corpora, and expression-tree transformations used by invariance tests."""

from __future__ import annotations

import math

import numpy as np

from surfcurv import (FamilySpec, GenericParametric, Metric, SmoothFn1,
                      TranslationSurface, make_family)
from surfcurv.jets import Bin, Call, Const, Expr, Pow, Var, poly_expr


def rel_close(a: float, b: float, rtol: float, floor: float = 1.0) -> bool:
    """|a - b| <= rtol * max(floor, |a|, |b|); the unit floor keeps the
    comparison meaningful when the quantity passes through zero."""
    return abs(a - b) <= rtol * max(floor, abs(a), abs(b))


def angle_between(u, v) -> float:
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    cross = np.linalg.norm(np.cross(u, v))
    dot = float(u @ v)
    return math.atan2(cross, dot)


def random_poly_fn(rng, degree: int, scale: float,
                   interval=(-1.0, 1.0)) -> SmoothFn1:
    coeffs = rng.uniform(-scale, scale, degree + 1)
    return SmoothFn1(poly_expr(coeffs), interval)


def random_translation_surface(rng, degree: int = 5, scale: float = 0.5
                               ) -> TranslationSurface:
    f1 = random_poly_fn(rng, degree, scale)
    f2 = random_poly_fn(rng, degree, scale)
    g1 = random_poly_fn(rng, degree, scale)
    g2 = random_poly_fn(rng, degree, scale)
    return TranslationSurface.from_graphs(f1, f2, g1, g2)


def interior_points(domain, rng, n: int, margin: float = 0.15):
    (s0, s1), (t0, t1) = domain
    ds, dt = s1 - s0, t1 - t0
    s = rng.uniform(s0 + margin * ds, s1 - margin * ds, n)
    t = rng.uniform(t0 + margin * dt, t1 - margin * dt, n)
    return list(zip(s, t))


# ---- expression-tree surgery for invariance tests -------------------------

def expr_map_vars(expr: Expr, mapping: dict) -> Expr:
    if isinstance(expr, Const):
        return expr
    if isinstance(expr, Var):
        return Var(mapping.get(expr.name, expr.name))
    if isinstance(expr, Bin):
        return Bin(expr.op, expr_map_vars(expr.a, mapping),
                   expr_map_vars(expr.b, mapping))
    if isinstance(expr, Call):
        return Call(expr.fn, expr_map_vars(expr.arg, mapping))
    if isinstance(expr, Pow):
        return Pow(expr_map_vars(expr.base, mapping), expr.exponent)
    raise TypeError(expr)


def swap_parameters(surface: GenericParametric) -> GenericParametric:
    mapping = {"s": "t", "t": "s"}
    (sr, tr) = surface.domain
    return GenericParametric(expr_map_vars(surface.x_expr, mapping),
                             expr_map_vars(surface.y_expr, mapping),
                             expr_map_vars(surface.z_expr, mapping),
                             (tr, sr))


def _linear_combo(row, exprs, shift: float) -> Expr:
    acc: Expr = Const(float(shift))
    for c, e in zip(row, exprs):
        acc = Bin("add", acc, Bin("mul", Const(float(c)), e))
    return acc


def rigid_motion(surface: GenericParametric, rotation, translation
                 ) -> GenericParametric:
    """Apply x -> R x + T to the embedding, staying inside the grammar."""
    exprs = (surface.x_expr, surface.y_expr, surface.z_expr)
    new = [_linear_combo(rotation[i], exprs, translation[i]) for i in range(3)]
    return GenericParametric(new[0], new[1], new[2], surface.domain)


def scaled(surface: GenericParametric, lam: float) -> GenericParametric:
    exprs = [Bin("mul", Const(float(lam)), e)
             for e in (surface.x_expr, surface.y_expr, surface.z_expr)]
    return GenericParametric(exprs[0], exprs[1], exprs[2], surface.domain)


def random_rotation(rng) -> np.ndarray:
    q, _ = np.linalg.qr(rng.normal(size=(3, 3)))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q


# ---- corpus of well-understood surfaces for oracle agreement --------------

def sphere() -> GenericParametric:
    from surfcurv.jets import parse_sexpr
    return GenericParametric(parse_sexpr("(mul (sin s) (cos t))"),
                             parse_sexpr("(mul (sin s) (sin t))"),
                             parse_sexpr("(cos s)"),
                             ((0.4, 2.7), (-3.0, 3.0)))


def torus() -> GenericParametric:
    from surfcurv.jets import parse_sexpr
    return GenericParametric(parse_sexpr("(mul (add 2.0 (cos s)) (cos t))"),
                             parse_sexpr("(mul (add 2.0 (cos s)) (sin t))"),
                             parse_sexpr("(sin s)"),
                             ((-3.0, 3.0), (-3.0, 3.0)))


def build_corpus() -> list:
    """(name, surface, metric, probe-domain) tuples; probe domains stay well
    inside validity so finite-difference stencils have room."""
    rng = np.random.default_rng(20240811)
    entries = [
        ("sphere", sphere(), Metric.EUCLIDEAN, ((0.6, 2.5), (-2.5, 2.5))),
        ("torus", torus(), Metric.EUCLIDEAN, ((-2.5, 2.5), (-2.5, 2.5))),
        ("plane", make_family(FamilySpec("Plane")), Metric.EUCLIDEAN, None),
        ("cylinder", make_family(FamilySpec("CircularCylinder", {"r": 2.0})),
         Metric.EUCLIDEAN, None),
        ("cyl_over_curve", make_family(FamilySpec("CylindricalOverCurve")),
         Metric.EUCLIDEAN, None),
        ("scherk", make_family(FamilySpec("Scherk", {"a": 1.0})),
         Metric.EUCLIDEAN, ((-0.9, 0.9), (-0.9, 0.9))),
        ("helicoid", make_family(FamilySpec("Helicoid",
                                            {"b": 0.3, "c": 1.0, "d": 0.2})),
         Metric.EUCLIDEAN, ((-0.8, 0.8), (-0.9, 0.7))),
        ("exp_homothetical", make_family(FamilySpec("ExpHomothetical",
                                                    {"a": 1.0, "b": 0.8, "c": 1.2})),
         Metric.EUCLIDEAN, None),
        ("power_homothetical", make_family(FamilySpec("PowerHomothetical")),
         Metric.EUCLIDEAN, None),
        ("random_translation", random_translation_surface(rng, scale=0.3),
         Metric.EUCLIDEAN, None),
        ("lorentz_spacelike_exp", make_family(FamilySpec("LorentzSpacelikeExp")),
         Metric.LORENTZIAN, None),
    ]
    return [(name, surf, metric, probe if probe is not None else surf.domain)
            for name, surf, metric, probe in entries]
