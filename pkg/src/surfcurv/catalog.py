"""Named surface families with validated parameters and safe default domains.

Every constructor keeps evaluation away from singularities (tan poles,
log-of-cosine blowup, power-base zero crossings) by a fixed margin, so a
grid sampled anywhere inside the default domain yields finite jets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

from .errors import SpecError
from .geometry import (Curve3, GraphAxis, HomotheticalGraph, Metric, Rect,
                       Surface, TranslationSurface)
from .jets import SmoothFn1

SINGULARITY_MARGIN = 0.1

FAMILY_NAMES = (
    "Plane",
    "CircularCylinder",
    "CylindricalOverCurve",
    "Scherk",
    "Helicoid",
    "ExpHomothetical",
    "PowerHomothetical",
    "LorentzSpacelikeExp",
    "LorentzTimelikeExp",
    "LorentzPowerHomothetical",
)

# quantity certified by the family's theorem: (name, expected-or-None, tol)
# expected None means "constant, value unspecified"
FAMILY_CLAIMS = {
    "Plane": (("K", 0.0, 1e-9), ("H", 0.0, 1e-10)),
    "CircularCylinder": (("K", 0.0, 1e-9), ("H", None, 1e-10)),
    "CylindricalOverCurve": (("K", 0.0, 1e-9),),
    "Scherk": (("H", 0.0, 1e-10),),
    "Helicoid": (("H", 0.0, 1e-10),),
    "ExpHomothetical": (("K", 0.0, 1e-9),),
    "PowerHomothetical": (("K", 0.0, 1e-9),),
    "LorentzSpacelikeExp": (("K", 0.0, 1e-9),),
    "LorentzTimelikeExp": (("K", 0.0, 1e-9),),
    "LorentzPowerHomothetical": (("K", 0.0, 1e-9),),
}


@dataclass(frozen=True)
class FamilySpec:
    name: str
    params: dict = field(default_factory=dict)
    domain: Optional[Rect] = None  # optional override, must sit inside the safe default


def family_metric(name: str) -> Metric:
    return Metric.LORENTZIAN if _canonical(name).startswith("Lorentz") else Metric.EUCLIDEAN


def _canonical(name: str) -> str:
    for known in FAMILY_NAMES:
        if known.lower() == name.lower():
            return known
    raise SpecError(f"unknown family {name!r}; known: {', '.join(FAMILY_NAMES)}")


def _get_params(spec: FamilySpec, defaults: dict) -> dict:
    params = dict(defaults)
    for key, value in spec.params.items():
        if key not in defaults:
            raise SpecError(
                f"{spec.name}: unknown parameter {key!r}; expected {sorted(defaults)}")
        params[key] = float(value)
    return params


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise SpecError(message)


def _positive_base_interval(k: float, d: float, default: tuple[float, float],
                            what: str) -> tuple[float, float]:
    """Sub-interval of `default` where k*u + d >= margin."""
    lo, hi = default
    if k == 0.0:
        _require(d >= SINGULARITY_MARGIN,
                 f"{what}: constant base {d} below margin {SINGULARITY_MARGIN}")
        return default
    bound = (SINGULARITY_MARGIN - d) / k
    if k > 0.0:
        lo = max(lo, bound)
    else:
        hi = min(hi, bound)
    _require(lo < hi, f"{what}: no domain keeps the power base above "
                      f"{SINGULARITY_MARGIN} inside {default}")
    return (lo, hi)


def _tan_interval(c: float, d: float) -> tuple[float, float]:
    """Interval of y keeping |c*y + d| <= pi/2 - margin (single branch)."""
    A = math.pi / 2.0 - SINGULARITY_MARGIN
    a, b = (-A - d) / c, (A - d) / c
    return (a, b) if a < b else (b, a)


def _power_fns(b: float, c: float, d: float, e: float, m: float,
               default: tuple[float, float]) -> tuple[SmoothFn1, SmoothFn1]:
    fx = _positive_base_interval(b / m, d, default, "f base b*x/m + d")
    gy = _positive_base_interval(c / (m - 1.0), e, default, "g base c*y/(m-1) + e")
    f = SmoothFn1.parse(f"(pow (add (mul {b / m!r} x) {d!r}) {m!r})", fx)
    g = SmoothFn1.parse(f"(pow (add (mul {c / (m - 1.0)!r} y) {e!r}) {1.0 - m!r})", gy)
    return f, g


def _exp_fns(a: float, b: float, c: float,
             x_range: tuple[float, float], y_range: tuple[float, float]
             ) -> tuple[SmoothFn1, SmoothFn1]:
    f = SmoothFn1.parse(f"(mul {a!r} (exp (mul {b!r} x)))", x_range)
    g = SmoothFn1.parse(f"(exp (mul {c!r} y))", y_range)
    return f, g


def make_family(spec: FamilySpec) -> Surface:
    """Construct the surface for a family spec; SpecError names any violated
    parameter invariant."""
    name = _canonical(spec.name)
    builder = _BUILDERS[name]
    surface = builder(spec)
    if spec.domain is not None:
        surface = _override_domain(name, surface, spec.domain)
    return surface


def _override_domain(name: str, surface: Surface, domain: Rect) -> Surface:
    (s0, s1), (t0, t1) = surface.domain
    (r0, r1), (u0, u1) = domain
    _require(s0 <= r0 < r1 <= s1 and t0 <= u0 < u1 <= t1,
             f"{name}: domain override {domain} not inside safe default "
             f"{surface.domain}")
    if isinstance(surface, TranslationSurface):
        if surface.graph_fns is not None:
            f1, f2, g1, g2 = surface.graph_fns
            return TranslationSurface.from_graphs(
                f1.restricted((r0, r1)), f2.restricted((r0, r1)),
                g1.restricted((u0, u1)), g2.restricted((u0, u1)),
                (r0, r1), (u0, u1))
        alpha = Curve3(surface.alpha.cx, surface.alpha.cy, surface.alpha.cz, (r0, r1))
        beta = Curve3(surface.beta.cx, surface.beta.cy, surface.beta.cz, (u0, u1))
        return TranslationSurface(alpha, beta)
    if isinstance(surface, HomotheticalGraph):
        return HomotheticalGraph(surface.f.restricted((r0, r1)),
                                 surface.g.restricted((u0, u1)), surface.axis)
    raise SpecError(f"{name}: domain override unsupported for this variant")


def _build_plane(spec: FamilySpec) -> Surface:
    _get_params(spec, {})
    rng = (-1.0, 1.0)
    zero = SmoothFn1.constant(0.0)
    return TranslationSurface.from_graphs(zero, zero, zero, zero, rng, rng)


def _build_circular_cylinder(spec: FamilySpec) -> Surface:
    p = _get_params(spec, {"r": 1.0})
    _require(p["r"] > 0.0, f"CircularCylinder: radius r={p['r']} must be > 0")
    r = p["r"]
    s_range = (-math.pi, math.pi)
    t_range = (-1.0, 1.0)
    alpha = Curve3(SmoothFn1.constant(0.0),
                   SmoothFn1.parse(f"(mul {r!r} (cos x))"),
                   SmoothFn1.parse(f"(mul {r!r} (sin x))"),
                   s_range)
    beta = Curve3(SmoothFn1.identity(t_range), SmoothFn1.constant(0.0),
                  SmoothFn1.constant(0.0), t_range)
    return TranslationSurface(alpha, beta)


def _build_cylindrical_over_curve(spec: FamilySpec) -> Surface:
    # straight generator alpha = s*(1, a, b); base curve beta = (sin t, t, cos t)
    # (non-planar: its torsion never vanishes), rulings parallel to (1, a, b)
    p = _get_params(spec, {"a": 0.5, "b": 0.25})
    s_range = (-1.0, 1.0)
    t_range = (-2.0, 2.0)
    f1 = SmoothFn1.parse(f"(mul {p['a']!r} x)", s_range)
    f2 = SmoothFn1.parse(f"(mul {p['b']!r} x)", s_range)
    g1 = SmoothFn1.parse("(sin y)", t_range)
    g2 = SmoothFn1.parse("(cos y)", t_range)
    return TranslationSurface.from_graphs(f1, f2, g1, g2, s_range, t_range)


def _build_scherk(spec: FamilySpec) -> Surface:
    p = _get_params(spec, {"a": 1.0})
    a = p["a"]
    _require(a > 0.0, f"Scherk: parameter a={a} must be > 0")
    L = (math.pi / 2.0 - SINGULARITY_MARGIN) / a
    rng = (-L, L)
    zero = SmoothFn1.constant(0.0)
    f = SmoothFn1.parse(f"(mul {-1.0 / a!r} (log (cos (mul {a!r} x))))", rng)
    g = SmoothFn1.parse(f"(mul {1.0 / a!r} (log (cos (mul {a!r} y))))", rng)
    return TranslationSurface.from_graphs(zero, f, zero, g, rng, rng)


def _build_helicoid(spec: FamilySpec) -> Surface:
    p = _get_params(spec, {"b": 0.0, "c": 1.0, "d": 0.0})
    _require(p["c"] != 0.0, "Helicoid: parameter c must be nonzero")
    x_range = (-1.0, 1.0)
    y_range = _tan_interval(p["c"], p["d"])
    f = SmoothFn1.parse(f"(add x {p['b']!r})", x_range)
    g = SmoothFn1.parse(f"(tan (add (mul {p['c']!r} y) {p['d']!r}))", y_range)
    return HomotheticalGraph(f, g, GraphAxis.Z)


def _build_exp_homothetical(spec: FamilySpec) -> Surface:
    p = _get_params(spec, {"a": 1.0, "b": 1.0, "c": 1.0})
    for key in ("a", "b", "c"):
        _require(p[key] > 0.0, f"ExpHomothetical: parameter {key}={p[key]} must be > 0")
    f, g = _exp_fns(p["a"], p["b"], p["c"], (-1.0, 1.0), (-1.0, 1.0))
    return HomotheticalGraph(f, g, GraphAxis.Z)


def _check_power_params(name: str, p: dict) -> None:
    _require(p["b"] != 0.0, f"{name}: parameter b must be nonzero")
    _require(p["c"] != 0.0, f"{name}: parameter c must be nonzero")
    _require(abs(p["m"]) > 1e-12 and abs(p["m"] - 1.0) > 1e-12,
             f"{name}: parameter m={p['m']} must avoid 0 and 1")


def _build_power_homothetical(spec: FamilySpec) -> Surface:
    p = _get_params(spec, {"b": 1.0, "c": 1.0, "d": 2.0, "e": 2.0, "m": 3.0})
    _check_power_params("PowerHomothetical", p)
    f, g = _power_fns(p["b"], p["c"], p["d"], p["e"], p["m"], (-1.0, 1.0))
    return HomotheticalGraph(f, g, GraphAxis.Z)


def _build_lorentz_spacelike_exp(spec: FamilySpec) -> Surface:
    p = _get_params(spec, {"a": 0.2, "b": 1.0, "c": 1.0})
    for key in ("a", "b", "c"):
        _require(p[key] > 0.0,
                 f"LorentzSpacelikeExp: parameter {key}={p[key]} must be > 0")
    f, g = _exp_fns(p["a"], p["b"], p["c"], (-1.0, 0.0), (-1.0, 0.0))
    return HomotheticalGraph(f, g, GraphAxis.Z)


def _build_lorentz_timelike_exp(spec: FamilySpec) -> Surface:
    p = _get_params(spec, {"a": 1.0, "b": 2.0, "c": 0.5})
    for key in ("a", "b", "c"):
        _require(p[key] > 0.0,
                 f"LorentzTimelikeExp: parameter {key}={p[key]} must be > 0")
    f = SmoothFn1.parse(f"(mul {p['a']!r} (exp (mul {p['b']!r} x)))", (0.5, 1.5))
    g = SmoothFn1.parse(f"(exp (mul {p['c']!r} y))", (0.5, 1.5))
    return HomotheticalGraph(f, g, GraphAxis.X)


def _build_lorentz_power_homothetical(spec: FamilySpec) -> Surface:
    p = _get_params(spec, {"b": 0.2, "c": 0.2, "d": 2.0, "e": 2.0, "m": 3.0})
    _check_power_params("LorentzPowerHomothetical", p)
    f, g = _power_fns(p["b"], p["c"], p["d"], p["e"], p["m"], (-0.5, 0.5))
    return HomotheticalGraph(f, g, GraphAxis.Z)


_BUILDERS = {
    "Plane": _build_plane,
    "CircularCylinder": _build_circular_cylinder,
    "CylindricalOverCurve": _build_cylindrical_over_curve,
    "Scherk": _build_scherk,
    "Helicoid": _build_helicoid,
    "ExpHomothetical": _build_exp_homothetical,
    "PowerHomothetical": _build_power_homothetical,
    "LorentzSpacelikeExp": _build_lorentz_spacelike_exp,
    "LorentzTimelikeExp": _build_lorentz_timelike_exp,
    "LorentzPowerHomothetical": _build_lorentz_power_homothetical,
}

_CANONICAL_PARAMS = {
    "Plane": {},
    "CircularCylinder": {"r": 1.0},
    "CylindricalOverCurve": {"a": 0.5, "b": 0.25},
    "Scherk": {"a": 1.0},
    "Helicoid": {"b": 0.0, "c": 1.0, "d": 0.0},
    "ExpHomothetical": {"a": 1.0, "b": 1.0, "c": 1.0},
    "PowerHomothetical": {"b": 1.0, "c": 1.0, "d": 2.0, "e": 2.0, "m": 3.0},
    "LorentzSpacelikeExp": {"a": 0.2, "b": 1.0, "c": 1.0},
    "LorentzTimelikeExp": {"a": 1.0, "b": 2.0, "c": 0.5},
    "LorentzPowerHomothetical": {"b": 0.2, "c": 0.2, "d": 2.0, "e": 2.0, "m": 3.0},
}


def list_families() -> list[FamilySpec]:
    """One canonical spec per family; each passes make_family as-is."""
    return [FamilySpec(name, dict(_CANONICAL_PARAMS[name]))
            for name in FAMILY_NAMES]


def power_params_from_branch(a: float, b: float, p: float,
                             c: float, q: float) -> dict:
    """Map the separable-branch parameterization

        f(x) = ((1-a) b x + p)^(1/(1-a)),  g(y) = ((a-1)/a c y + q)^(a/(a-1))

    onto PowerHomothetical parameters (same surface pointwise):
    m = 1/(1-a), and the linear bases match under b' = b, d = p,
    c' = -c, e = q.
    """
    _require(a != 1.0, "branch parameter a must differ from 1")
    _require(a != 0.0, "branch parameter a must be nonzero")
    m = 1.0 / (1.0 - a)
    return {"b": b, "c": -c, "d": p, "e": q, "m": m}
