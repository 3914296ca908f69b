"""Surfaces, fundamental forms, and Gauss/mean curvature.

Two routes to curvature live here: a generic pipeline that works on any
surface through bivariate jets, and the closed forms specific to
translation surfaces X(s,t) = alpha(s) + beta(t) and homothetical graphs
z = f(x)g(y).  The closed forms are assembled from univariate jets only,
so the two routes share no derivative code and can cross-check each other.

Lorentz-Minkowski space is R^3 with metric dx^2 + dy^2 - dz^2.  The cross
product is the metric adjoint of the Euclidean one, which makes
<cross(u,v), w> = det(u, v, w) under either metric.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from .errors import CausalityError, DegenerateError, DomainError
from .jets import (BiJet2, Const, Expr, SmoothFn1, UniJet3, Var, bijet_combine,
                   eval_expr, eval_value, expr_vars, jet_eval, lift_s, lift_t)

DEGENERACY_RTOL = 1e-12


class Metric(enum.Enum):
    EUCLIDEAN = "euclidean"
    LORENTZIAN = "lorentzian"


class Character(enum.Enum):
    SPACELIKE = "spacelike"
    TIMELIKE = "timelike"
    DEGENERATE = "degenerate"


class GraphAxis(enum.Enum):
    Z = "z"  # z = f(x) g(y)
    X = "x"  # x = f(y) g(z)


def mdot(u, v, metric: Metric) -> float:
    if metric is Metric.LORENTZIAN:
        return u[0] * v[0] + u[1] * v[1] - u[2] * v[2]
    return u[0] * v[0] + u[1] * v[1] + u[2] * v[2]


def mcross(u, v, metric: Metric) -> np.ndarray:
    c = np.array([
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    ])
    if metric is Metric.LORENTZIAN:
        c[2] = -c[2]
    return c


# --------------------------------------------------------------------------
# curves
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Curve3:
    """A space curve given by three coordinate functions on a shared interval."""

    cx: SmoothFn1
    cy: SmoothFn1
    cz: SmoothFn1
    interval: tuple[float, float]

    def __post_init__(self):
        lo, hi = self.interval
        for fn in (self.cx, self.cy, self.cz):
            flo, fhi = fn.interval
            if flo > lo or fhi < hi:
                raise DomainError(
                    f"coordinate function interval {fn.interval} does not "
                    f"cover curve interval {self.interval}")

    def _check(self, t: float) -> None:
        lo, hi = self.interval
        if not lo <= t <= hi:
            raise DomainError(f"{t} outside curve interval {self.interval}")

    def jets(self, t: float) -> tuple[UniJet3, UniJet3, UniJet3]:
        self._check(t)
        return jet_eval(self.cx, t), jet_eval(self.cy, t), jet_eval(self.cz, t)

    def point(self, t: float) -> np.ndarray:
        self._check(t)
        return np.array([self.cx.value(t), self.cy.value(t), self.cz.value(t)])

    def derivative_rows(self, t: float) -> np.ndarray:
        """3x3 matrix with rows c'(t), c''(t), c'''(t)."""
        jx, jy, jz = self.jets(t)
        return np.array([
            [jx.d1, jy.d1, jz.d1],
            [jx.d2, jy.d2, jz.d2],
            [jx.d3, jy.d3, jz.d3],
        ])


def curve_planarity_residual(c: Curve3, t: float) -> float:
    """det(c', c'', c''') at t; identically zero iff the curve is planar.

    Torsion-vanishing is an affine notion, so the Euclidean determinant is
    used regardless of the ambient metric.
    """
    rows = c.derivative_rows(t)
    return float(np.linalg.det(rows))


# --------------------------------------------------------------------------
# surfaces
# --------------------------------------------------------------------------

Rect = tuple[tuple[float, float], tuple[float, float]]


def _check_rect(domain: Rect) -> Rect:
    (s0, s1), (t0, t1) = domain
    if not (s0 < s1 and t0 < t1):
        raise DomainError(f"empty domain rectangle {domain}")
    return ((float(s0), float(s1)), (float(t0), float(t1)))


def _in_rect(domain: Rect, s: float, t: float) -> bool:
    (s0, s1), (t0, t1) = domain
    return s0 <= s <= s1 and t0 <= t <= t1


@dataclass(frozen=True)
class TranslationSurface:
    """X(s,t) = alpha(s) + beta(t).

    When built from the graph normal form alpha=(s, f1, f2),
    beta=(g1, t, g2) the four graph functions are kept so the closed-form
    curvature and the flatness classifier can reach them.
    """

    alpha: Curve3
    beta: Curve3
    graph_fns: Optional[tuple[SmoothFn1, SmoothFn1, SmoothFn1, SmoothFn1]] = None

    @property
    def domain(self) -> Rect:
        return (self.alpha.interval, self.beta.interval)

    @staticmethod
    def from_graphs(f1: SmoothFn1, f2: SmoothFn1, g1: SmoothFn1, g2: SmoothFn1,
                    s_range: Optional[tuple[float, float]] = None,
                    t_range: Optional[tuple[float, float]] = None,
                    ) -> "TranslationSurface":
        s_range = s_range or _intersect(f1.interval, f2.interval)
        t_range = t_range or _intersect(g1.interval, g2.interval)
        alpha = Curve3(SmoothFn1.identity(s_range), f1, f2, s_range)
        beta = Curve3(g1, SmoothFn1.identity(t_range), g2, t_range)
        return TranslationSurface(alpha, beta, (f1, f2, g1, g2))

    def bijets(self, s: float, t: float) -> tuple[BiJet2, BiJet2, BiJet2]:
        ax, ay, az = self.alpha.jets(s)
        bx, by, bz = self.beta.jets(t)
        return (bijet_combine(ax, bx, "add"),
                bijet_combine(ay, by, "add"),
                bijet_combine(az, bz, "add"))

    def point(self, s: float, t: float) -> np.ndarray:
        return self.alpha.point(s) + self.beta.point(t)


@dataclass(frozen=True)
class HomotheticalGraph:
    """Graph of a product of one-variable functions.

    axis Z: z = f(x) g(y), parameters (s,t) = (x,y).
    axis X: x = f(y) g(z), parameters (s,t) = (y,z).
    """

    f: SmoothFn1
    g: SmoothFn1
    axis: GraphAxis = GraphAxis.Z

    @property
    def domain(self) -> Rect:
        return (self.f.interval, self.g.interval)

    def bijets(self, s: float, t: float) -> tuple[BiJet2, BiJet2, BiJet2]:
        jf = jet_eval(self.f, s)
        jg = jet_eval(self.g, t)
        prod = bijet_combine(jf, jg, "mul")
        if self.axis is GraphAxis.Z:
            return BiJet2.seed_s(s), BiJet2.seed_t(t), prod
        return prod, BiJet2.seed_s(s), BiJet2.seed_t(t)

    def point(self, s: float, t: float) -> np.ndarray:
        w = self.f.value(s) * self.g.value(t)
        if self.axis is GraphAxis.Z:
            return np.array([s, t, w])
        return np.array([w, s, t])

    def causal_margin(self, metric: Metric, s: float, t: float) -> float:
        """Positive iff the Lorentzian graph constraint holds at (s,t).

        axis Z (spacelike graph): 1 - f'^2 g^2 - f^2 g'^2 > 0.
        axis X (timelike graph):  1 + f^2 g'^2 - f'^2 g^2 < 0.
        Euclidean surfaces are unconstrained.
        """
        if metric is Metric.EUCLIDEAN:
            return math.inf
        jf = jet_eval(self.f, s)
        jg = jet_eval(self.g, t)
        if self.axis is GraphAxis.Z:
            return 1.0 - jf.d1 ** 2 * jg.v ** 2 - jf.v ** 2 * jg.d1 ** 2
        return -(1.0 + jf.v ** 2 * jg.d1 ** 2 - jf.d1 ** 2 * jg.v ** 2)


@dataclass(frozen=True)
class GenericParametric:
    """Arbitrary parametric surface from three bivariate expressions in (s,t)."""

    x_expr: Expr
    y_expr: Expr
    z_expr: Expr
    domain_rect: Rect

    def __post_init__(self):
        _check_rect(self.domain_rect)
        names = expr_vars(self.x_expr) | expr_vars(self.y_expr) | expr_vars(self.z_expr)
        extra = names - {"s", "t"}
        if extra:
            raise DomainError(
                f"generic surface expressions may only use s and t, got {sorted(extra)}")

    @property
    def domain(self) -> Rect:
        return self.domain_rect

    def bijets(self, s: float, t: float) -> tuple[BiJet2, BiJet2, BiJet2]:
        if not _in_rect(self.domain_rect, s, t):
            raise DomainError(f"({s}, {t}) outside surface domain {self.domain_rect}")
        env = {"s": BiJet2.seed_s(s), "t": BiJet2.seed_t(t)}
        out = []
        for e in (self.x_expr, self.y_expr, self.z_expr):
            j = eval_expr(e, env)
            if isinstance(j, float):
                j = BiJet2.constant(j)
            out.append(j)
        return tuple(out)

    def point(self, s: float, t: float) -> np.ndarray:
        if not _in_rect(self.domain_rect, s, t):
            raise DomainError(f"({s}, {t}) outside surface domain {self.domain_rect}")
        env = {"s": float(s), "t": float(t)}
        return np.array([eval_value(e, env)
                         for e in (self.x_expr, self.y_expr, self.z_expr)])


@dataclass(frozen=True)
class Cylindrical:
    """Ruled surface base(s) + t * direction with a fixed ruling direction."""

    base: Curve3
    direction: tuple[float, float, float]
    t_range: tuple[float, float] = (-1.0, 1.0)

    def __post_init__(self):
        d = np.asarray(self.direction, dtype=float)
        if not np.all(np.isfinite(d)) or float(d @ d) == 0.0:
            raise DomainError("cylinder direction must be a finite nonzero vector")

    @property
    def domain(self) -> Rect:
        return (self.base.interval, self.t_range)

    def lightlike(self, metric: Metric) -> bool:
        d = np.asarray(self.direction, dtype=float)
        nn = mdot(d, d, metric)
        return abs(nn) <= DEGENERACY_RTOL * max(1.0, float(d @ d))

    def bijets(self, s: float, t: float) -> tuple[BiJet2, BiJet2, BiJet2]:
        bx, by, bz = self.base.jets(s)
        tj = UniJet3.seed(t)
        d = self.direction
        return (bijet_combine(bx, tj * d[0], "add"),
                bijet_combine(by, tj * d[1], "add"),
                bijet_combine(bz, tj * d[2], "add"))

    def point(self, s: float, t: float) -> np.ndarray:
        return self.base.point(s) + t * np.asarray(self.direction, dtype=float)


Surface = Union[TranslationSurface, HomotheticalGraph, GenericParametric, Cylindrical]


def _intersect(a: tuple[float, float], b: tuple[float, float]) -> tuple[float, float]:
    lo, hi = max(a[0], b[0]), min(a[1], b[1])
    if not lo < hi:
        raise DomainError(f"intervals {a} and {b} do not overlap")
    return (lo, hi)


# --------------------------------------------------------------------------
# fundamental forms and curvature
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class FundamentalForms:
    E: float
    F: float
    G: float
    l: float
    m: float
    n: float
    N: np.ndarray = field(repr=False)
    character: Character
    eps: int

    @property
    def EGmF2(self) -> float:
        return self.E * self.G - self.F * self.F


def fundamental_forms(surface: Surface, metric: Metric, s: float, t: float
                      ) -> FundamentalForms:
    """First and second fundamental form coefficients at (s,t).

    The normal is cross(X_s, X_t) normalized by sqrt(|<N,N>|); for a
    translation surface m is exactly zero because X_st vanishes
    structurally.
    """
    Bx, By, Bz = surface.bijets(s, t)
    Xs = np.array([Bx.ds, By.ds, Bz.ds])
    Xt = np.array([Bx.dt, By.dt, Bz.dt])
    Xss = np.array([Bx.dss, By.dss, Bz.dss])
    Xst = np.array([Bx.dst, By.dst, Bz.dst])
    Xtt = np.array([Bx.dtt, By.dtt, Bz.dtt])

    E = mdot(Xs, Xs, metric)
    F = mdot(Xs, Xt, metric)
    G = mdot(Xt, Xt, metric)
    W = E * G - F * F
    scale = max(1.0, E * E + F * F + G * G)
    if abs(W) <= DEGENERACY_RTOL * scale:
        raise DegenerateError(
            f"EG - F^2 = {W} degenerate at ({s}, {t})")

    Nraw = mcross(Xs, Xt, metric)
    nn = mdot(Nraw, Nraw, metric)
    if abs(nn) <= DEGENERACY_RTOL * scale:
        raise DegenerateError(f"lightlike normal at ({s}, {t})")
    N = Nraw / math.sqrt(abs(nn))

    l = mdot(Xss, N, metric)
    m = mdot(Xst, N, metric)
    n = mdot(Xtt, N, metric)

    if metric is Metric.EUCLIDEAN:
        character, eps = Character.SPACELIKE, +1
    elif W > 0.0:
        character, eps = Character.SPACELIKE, -1
    else:
        character, eps = Character.TIMELIKE, +1
    return FundamentalForms(E, F, G, float(l), float(m), float(n), N, character, eps)


def gauss_curvature(surface: Surface, metric: Metric, s: float, t: float) -> float:
    fb = fundamental_forms(surface, metric, s, t)
    return fb.eps * (fb.l * fb.n - fb.m * fb.m) / fb.EGmF2


def mean_curvature(surface: Surface, metric: Metric, s: float, t: float) -> float:
    fb = fundamental_forms(surface, metric, s, t)
    num = fb.l * fb.G - 2.0 * fb.m * fb.F + fb.n * fb.E
    return fb.eps * 0.5 * num / fb.EGmF2


def curvatures(surface: Surface, metric: Metric, s: float, t: float
               ) -> tuple[float, float, FundamentalForms]:
    """K, H, and the forms in one evaluation."""
    fb = fundamental_forms(surface, metric, s, t)
    W = fb.EGmF2
    K = fb.eps * (fb.l * fb.n - fb.m * fb.m) / W
    H = fb.eps * 0.5 * (fb.l * fb.G - 2.0 * fb.m * fb.F + fb.n * fb.E) / W
    return K, H, fb


# --------------------------------------------------------------------------
# closed forms (univariate jets only)
# --------------------------------------------------------------------------

def translation_gauss_closed(f1: SmoothFn1, f2: SmoothFn1,
                             g1: SmoothFn1, g2: SmoothFn1,
                             metric: Metric, s: float, t: float) -> float:
    """Gauss curvature of X(s,t) = (s, f1, f2) + (g1, t, g2) in closed form.

    Euclidean:   K =  P*Q / D^2
    Lorentzian:  K = -P*Q / D^2   (one sign for both causal characters,
                                   since eps and 1/|EG-F^2| flip together)
    with
      P = f2'' - f1'' g2' + g1' (f1'' f2' - f1' f2''),
      Q = g2'' - f2' g1'' + f1' (g1'' g2' - g1' g2''),
      D = (1 + f1'^2 +- f2'^2)(1 + g1'^2 +- g2'^2) - (f1' + g1' -+ f2' g2')^2.

    Restricting to a planar alpha (f1 = 0) under the Lorentzian metric
    reduces D to 1 - g2'^2 - f2'^2 - f2'^2 g1'^2 + 2 f2' g1' g2'; the
    sign of the final cross term is fixed by agreement with the jet
    pipeline.
    """
    a1 = jet_eval(f1, s)
    a2 = jet_eval(f2, s)
    b1 = jet_eval(g1, t)
    b2 = jet_eval(g2, t)
    P = a2.d2 - a1.d2 * b2.d1 + b1.d1 * (a1.d2 * a2.d1 - a1.d1 * a2.d2)
    Q = b2.d2 - a2.d1 * b1.d2 + a1.d1 * (b1.d2 * b2.d1 - b1.d1 * b2.d2)
    if metric is Metric.EUCLIDEAN:
        D = ((1.0 + a1.d1 ** 2 + a2.d1 ** 2) * (1.0 + b1.d1 ** 2 + b2.d1 ** 2)
             - (a1.d1 + b1.d1 + a2.d1 * b2.d1) ** 2)
        sign = 1.0
    else:
        D = ((1.0 + a1.d1 ** 2 - a2.d1 ** 2) * (1.0 + b1.d1 ** 2 - b2.d1 ** 2)
             - (a1.d1 + b1.d1 - a2.d1 * b2.d1) ** 2)
        sign = -1.0
    if abs(D) <= DEGENERACY_RTOL * max(1.0, P * P + Q * Q):
        raise DegenerateError(f"closed-form denominator vanishes at ({s}, {t})")
    return sign * P * Q / (D * D)


def translation_mean_closed(f1: SmoothFn1, f2: SmoothFn1,
                            g1: SmoothFn1, g2: SmoothFn1,
                            metric: Metric, s: float, t: float) -> float:
    """Mean curvature for the translation normal form, from univariate jets.

    Uses l = P / sqrt(|D|), n = Q / sqrt(|D|), m = 0 with P, Q, D as in
    translation_gauss_closed; H = eps (l G + n E) / (2 (EG - F^2)).
    """
    a1 = jet_eval(f1, s)
    a2 = jet_eval(f2, s)
    b1 = jet_eval(g1, t)
    b2 = jet_eval(g2, t)
    P = a2.d2 - a1.d2 * b2.d1 + b1.d1 * (a1.d2 * a2.d1 - a1.d1 * a2.d2)
    Q = b2.d2 - a2.d1 * b1.d2 + a1.d1 * (b1.d2 * b2.d1 - b1.d1 * b2.d2)
    if metric is Metric.EUCLIDEAN:
        E = 1.0 + a1.d1 ** 2 + a2.d1 ** 2
        G = 1.0 + b1.d1 ** 2 + b2.d1 ** 2
        F = a1.d1 + b1.d1 + a2.d1 * b2.d1
        eps = 1.0
    else:
        E = 1.0 + a1.d1 ** 2 - a2.d1 ** 2
        G = 1.0 + b1.d1 ** 2 - b2.d1 ** 2
        F = a1.d1 + b1.d1 - a2.d1 * b2.d1
    D = E * G - F * F
    if abs(D) <= DEGENERACY_RTOL * max(1.0, E * E + F * F + G * G):
        raise DegenerateError(f"closed-form denominator vanishes at ({s}, {t})")
    if metric is Metric.LORENTZIAN:
        eps = -1.0 if D > 0.0 else 1.0
    return eps * 0.5 * (P * G + Q * E) / (math.sqrt(abs(D)) * D)


def homothetical_gauss_closed(f: SmoothFn1, g: SmoothFn1, metric: Metric,
                              axis: GraphAxis, x: float, y: float) -> float:
    """Gauss curvature of the product graph in closed form.

    Euclidean (axis Z):  K = (f g f'' g'' - f'^2 g'^2) / (1 + f'^2 g^2 + f^2 g'^2)^2
    Lorentzian:          K = -(f g f'' g'' - f'^2 g'^2) / (EG - F^2)^2
      axis Z: EG - F^2 = 1 - f'^2 g^2 - f^2 g'^2, spacelike requires it > 0
      axis X: EG - F^2 = f^2 g'^2 - 1 - f'^2 g^2, timelike admission requires
              1 + f^2 g'^2 - f'^2 g^2 < 0 as stated for the graph regime
    """
    jf = jet_eval(f, x)
    jg = jet_eval(g, y)
    num = jf.v * jg.v * jf.d2 * jg.d2 - jf.d1 ** 2 * jg.d1 ** 2
    fp2g2 = jf.d1 ** 2 * jg.v ** 2
    f2gp2 = jf.v ** 2 * jg.d1 ** 2
    if metric is Metric.EUCLIDEAN:
        if axis is not GraphAxis.Z:
            raise CausalityError("axis X graphs are Lorentzian constructions")
        D = 1.0 + fp2g2 + f2gp2
        sign = 1.0
    elif axis is GraphAxis.Z:
        margin = 1.0 - fp2g2 - f2gp2
        if margin <= 0.0:
            raise CausalityError(
                f"spacelike constraint 1 - f'^2 g^2 - f^2 g'^2 > 0 fails at ({x}, {y})")
        D = margin
        sign = -1.0
    else:
        constraint = 1.0 + f2gp2 - fp2g2
        if constraint >= 0.0:
            raise CausalityError(
                f"timelike constraint 1 + f^2 g'^2 - f'^2 g^2 < 0 fails at ({x}, {y})")
        D = f2gp2 - 1.0 - fp2g2
        sign = -1.0
    if abs(D) <= DEGENERACY_RTOL * max(1.0, abs(num)):
        raise DegenerateError(f"closed-form denominator vanishes at ({x}, {y})")
    return sign * num / (D * D)


def homothetical_mean_closed(f: SmoothFn1, g: SmoothFn1, metric: Metric,
                             axis: GraphAxis, x: float, y: float) -> float:
    """Mean curvature of the product graph from univariate jets.

    The second-form numerators l, m, n are metric-independent determinants
    (f''g, f'g', fg''); only E, F, G and the eps sign switch with the metric.
    """
    jf = jet_eval(f, x)
    jg = jet_eval(g, y)
    lr = jf.d2 * jg.v
    mr = jf.d1 * jg.d1
    nr = jf.v * jg.d2
    if metric is Metric.EUCLIDEAN:
        E = 1.0 + jf.d1 ** 2 * jg.v ** 2
        G = 1.0 + jf.v ** 2 * jg.d1 ** 2
        F = jf.d1 * jg.v * jf.v * jg.d1
        eps = 1.0
    elif axis is GraphAxis.Z:
        E = 1.0 - jf.d1 ** 2 * jg.v ** 2
        G = 1.0 - jf.v ** 2 * jg.d1 ** 2
        F = -jf.d1 * jg.v * jf.v * jg.d1
    else:
        E = 1.0 + jf.d1 ** 2 * jg.v ** 2
        G = jf.v ** 2 * jg.d1 ** 2 - 1.0
        F = jf.v * jf.d1 * jg.v * jg.d1
    W = E * G - F * F
    if abs(W) <= DEGENERACY_RTOL * max(1.0, E * E + F * F + G * G):
        raise DegenerateError(f"closed-form denominator vanishes at ({x}, {y})")
    if metric is Metric.LORENTZIAN:
        eps = -1.0 if W > 0.0 else 1.0
    return eps * 0.5 * (lr * G - 2.0 * mr * F + nr * E) / (math.sqrt(abs(W)) * W)


def homothetical_minimal_residual(f: SmoothFn1, g: SmoothFn1,
                                  x: float, y: float) -> float:
    """Left-hand side of the Euclidean minimality equation for z = f(x)g(y):

        f'' g (1 + f^2 g'^2) - 2 f f'^2 g g'^2 + f g'' (1 + f'^2 g^2)

    Zero iff the graph has H = 0 at the point.
    """
    jf = jet_eval(f, x)
    jg = jet_eval(g, y)
    return (jf.d2 * jg.v * (1.0 + jf.v ** 2 * jg.d1 ** 2)
            - 2.0 * jf.v * jf.d1 ** 2 * jg.v * jg.d1 ** 2
            + jf.v * jg.d2 * (1.0 + jf.d1 ** 2 * jg.v ** 2))


def homothetical_flat_residual(f: SmoothFn1, g: SmoothFn1,
                               x: float, y: float) -> float:
    """f f'' g g'' - f'^2 g'^2; zero iff K = 0 at the point."""
    jf = jet_eval(f, x)
    jg = jet_eval(g, y)
    return jf.v * jf.d2 * jg.v * jg.d2 - jf.d1 ** 2 * jg.d1 ** 2
