"""Grid sampling, constancy certification, and independent cross-checks.

The checks deliberately take different routes to the same quantities:
curvature grids go through exact jets, the finite-difference oracle sees
only point evaluations of the embedding, the ODE cross-checks integrate
the reduced equations numerically against their closed-form solutions,
and the nonexistence probe searches for counterexamples by derivative-free
optimization.  Agreement across routes is the certificate.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional, Sequence, Union

import numpy as np
from scipy.optimize import minimize

from .errors import (AllDegenerateError, CausalityError, DegenerateError,
                     DomainError, SingularityError, SpecError)
from .geometry import (Character, DEGENERACY_RTOL, GraphAxis, HomotheticalGraph,
                       Metric, Rect, Surface, TranslationSurface, curvatures,
                       mcross, mdot)
from .jets import SmoothFn1, jet_eval

logger = logging.getLogger(__name__)

RHS_MAGNITUDE_CAP = 1e8


# --------------------------------------------------------------------------
# grids and samples
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class GridSpec:
    s_range: tuple[float, float]
    t_range: tuple[float, float]
    ns: int
    nt: int

    def __post_init__(self):
        if self.ns < 2 or self.nt < 2:
            raise SpecError(f"grid counts must be >= 2, got {self.ns}x{self.nt}")
        if not (self.s_range[0] < self.s_range[1] and self.t_range[0] < self.t_range[1]):
            raise SpecError(f"empty grid ranges {self.s_range} x {self.t_range}")

    def s_values(self) -> np.ndarray:
        return np.linspace(self.s_range[0], self.s_range[1], self.ns)

    def t_values(self) -> np.ndarray:
        return np.linspace(self.t_range[0], self.t_range[1], self.nt)

    @staticmethod
    def for_surface(surface: Surface, ns: int, nt: int) -> "GridSpec":
        (s0, s1), (t0, t1) = surface.domain
        return GridSpec((s0, s1), (t0, t1), ns, nt)


@dataclass(frozen=True)
class CurvatureSample:
    s: float
    t: float
    K: float
    H: float
    EGmF2: float
    character: Character


class SampleSet(Sequence):
    """Row-major curvature samples plus the count of skipped grid nodes."""

    def __init__(self, samples: list[CurvatureSample], skipped_degenerate: int = 0):
        self.samples = samples
        self.skipped_degenerate = skipped_degenerate

    def __len__(self):
        return len(self.samples)

    def __getitem__(self, i):
        return self.samples[i]

    def values(self, quantity: str) -> np.ndarray:
        if quantity not in ("K", "H"):
            raise ValueError(f"quantity must be 'K' or 'H', got {quantity!r}")
        return np.array([getattr(s, quantity) for s in self.samples])


def _node_sample(surface: Surface, metric: Metric, s: float, t: float
                 ) -> Optional[CurvatureSample]:
    if metric is Metric.LORENTZIAN and isinstance(surface, HomotheticalGraph):
        if surface.causal_margin(metric, s, t) <= 0.0:
            return None
    try:
        K, H, fb = curvatures(surface, metric, s, t)
    except (DegenerateError, CausalityError):
        return None
    return CurvatureSample(float(s), float(t), K, H, fb.EGmF2, fb.character)


def sample_curvature(surface: Surface, metric: Metric, grid: GridSpec,
                     workers: int = 1) -> SampleSet:
    """One sample per non-degenerate grid node in deterministic row-major
    order; degenerate or causally excluded nodes are counted and skipped.

    Rows are independent work items; merging in row index order keeps the
    output byte-stable for any worker count.
    """
    svals = grid.s_values()
    tvals = grid.t_values()

    def row(s: float) -> list[Optional[CurvatureSample]]:
        return [_node_sample(surface, metric, s, t) for t in tvals]

    if workers <= 1:
        rows = [row(s) for s in svals]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(row, svals))

    samples: list[CurvatureSample] = []
    skipped = 0
    for r in rows:
        for item in r:
            if item is None:
                skipped += 1
            else:
                samples.append(item)
    if not samples:
        raise AllDegenerateError(
            f"all {grid.ns * grid.nt} grid nodes degenerate or causally excluded")
    return SampleSet(samples, skipped)


# --------------------------------------------------------------------------
# constancy certification
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ConstancyReport:
    quantity: str
    mean: float
    max_abs_dev: float
    expected: Optional[float]
    tol: float
    verdict: str  # "Pass" | "Fail"
    n_samples: int
    skipped_degenerate: int

    @property
    def passed(self) -> bool:
        return self.verdict == "Pass"

    def to_dict(self) -> dict:
        return {
            "quantity": self.quantity,
            "mean": self.mean,
            "max_abs_dev": self.max_abs_dev,
            "expected": self.expected,
            "tol": self.tol,
            "verdict": self.verdict,
            "n_samples": self.n_samples,
            "skipped_degenerate": self.skipped_degenerate,
        }


def check_constancy(samples: Union[SampleSet, Sequence[CurvatureSample]],
                    quantity: str, expected: Optional[float] = None,
                    tol: float = 1e-9) -> ConstancyReport:
    """Certify that a sampled quantity is constant (optionally at a given
    value) by max absolute deviation; theorems assert pointwise identities,
    so the max matters, not the variance."""
    if isinstance(samples, SampleSet):
        skipped = samples.skipped_degenerate
        values = samples.values(quantity)
    else:
        skipped = 0
        values = np.array([getattr(s, quantity) for s in samples])
    if len(values) == 0:
        raise AllDegenerateError("no samples to certify")
    mean = float(np.mean(values))
    center = mean if expected is None else float(expected)
    max_abs_dev = float(np.max(np.abs(values - center)))
    verdict = "Pass" if max_abs_dev <= tol else "Fail"
    return ConstancyReport(quantity, mean, max_abs_dev, expected, tol, verdict,
                           len(values), skipped)


# --------------------------------------------------------------------------
# finite-difference oracle (no jets anywhere in this path)
# --------------------------------------------------------------------------

def fd_oracle(surface: Surface, metric: Metric, s: float, t: float,
              h: float = 1e-3) -> tuple[float, float]:
    """K and H from O(h^2) central differences of the embedding only."""
    (s0, s1), (t0, t1) = surface.domain
    if not (s0 <= s - h and s + h <= s1 and t0 <= t - h and t + h <= t1):
        raise DomainError(
            f"stencil of half-width {h} at ({s}, {t}) leaves domain "
            f"{surface.domain}")
    P = surface.point
    c = P(s, t)
    pe, pw = P(s + h, t), P(s - h, t)
    pn, ps_ = P(s, t + h), P(s, t - h)
    pne, pnw = P(s + h, t + h), P(s - h, t + h)
    pse, psw = P(s + h, t - h), P(s - h, t - h)

    Xs = (pe - pw) / (2.0 * h)
    Xt = (pn - ps_) / (2.0 * h)
    Xss = (pe - 2.0 * c + pw) / (h * h)
    Xtt = (pn - 2.0 * c + ps_) / (h * h)
    Xst = (pne - pse - pnw + psw) / (4.0 * h * h)

    E = mdot(Xs, Xs, metric)
    F = mdot(Xs, Xt, metric)
    G = mdot(Xt, Xt, metric)
    W = E * G - F * F
    scale = max(1.0, E * E + F * F + G * G)
    if abs(W) <= DEGENERACY_RTOL * scale:
        raise DegenerateError(f"oracle: EG - F^2 = {W} degenerate at ({s}, {t})")
    Nraw = mcross(Xs, Xt, metric)
    nn = mdot(Nraw, Nraw, metric)
    if abs(nn) <= DEGENERACY_RTOL * scale:
        raise DegenerateError(f"oracle: lightlike normal at ({s}, {t})")
    N = Nraw / math.sqrt(abs(nn))
    l = mdot(Xss, N, metric)
    m = mdot(Xst, N, metric)
    n = mdot(Xtt, N, metric)
    if metric is Metric.EUCLIDEAN:
        eps = 1.0
    else:
        eps = -1.0 if W > 0.0 else 1.0
    K = eps * (l * n - m * m) / W
    H = eps * 0.5 * (l * G - 2.0 * m * F + n * E) / W
    return float(K), float(H)


# --------------------------------------------------------------------------
# flat-translation classification
# --------------------------------------------------------------------------

class FlatKind(Enum):
    PLANE = "Plane"
    CYLINDRICAL = "CylindricalAlong"
    NOT_FLAT = "NotFlat"
    UNCLASSIFIED = "Unclassified"


@dataclass(frozen=True)
class FlatClassification:
    kind: FlatKind
    direction: Optional[np.ndarray] = None


def _fn_is_linear(fn: SmoothFn1, rng: tuple[float, float], n: int = 101) -> bool:
    # scale-aware zero test on the second derivative
    xs = np.linspace(rng[0], rng[1], n)
    jets = [jet_eval(fn, x) for x in xs]
    max_d2 = max(abs(j.d2) for j in jets)
    max_v = max(abs(j.v) for j in jets)
    return max_d2 <= 1e-10 * (1.0 + max_v)


def classify_flat_translation(surface: TranslationSurface, grid: GridSpec,
                              tol: float = 1e-9) -> FlatClassification:
    """Decide whether a flat translation surface is a plane or a cylinder.

    Flatness forces one generator straight; a flat sample set with neither
    generator straight is reported Unclassified and logged, since honest
    flat inputs cannot produce it.
    """
    if surface.graph_fns is None:
        raise SpecError(
            "classification requires the graph normal form alpha=(s,f1,f2), "
            "beta=(g1,t,g2)")
    f1, f2, g1, g2 = surface.graph_fns
    samples = sample_curvature(surface, Metric.EUCLIDEAN, grid)
    if float(np.max(np.abs(samples.values("K")))) > tol:
        return FlatClassification(FlatKind.NOT_FLAT)

    s_range, t_range = surface.domain
    alpha_straight = _fn_is_linear(f1, s_range) and _fn_is_linear(f2, s_range)
    beta_straight = _fn_is_linear(g1, t_range) and _fn_is_linear(g2, t_range)
    if alpha_straight and beta_straight:
        return FlatClassification(FlatKind.PLANE)
    if alpha_straight:
        mid = 0.5 * (s_range[0] + s_range[1])
        d = np.array([1.0, jet_eval(f1, mid).d1, jet_eval(f2, mid).d1])
        return FlatClassification(FlatKind.CYLINDRICAL, d)
    if beta_straight:
        mid = 0.5 * (t_range[0] + t_range[1])
        d = np.array([jet_eval(g1, mid).d1, 1.0, jet_eval(g2, mid).d1])
        return FlatClassification(FlatKind.CYLINDRICAL, d)
    logger.warning("flat translation surface with neither generator straight; "
                   "this should not happen for honest flat inputs")
    return FlatClassification(FlatKind.UNCLASSIFIED)


# --------------------------------------------------------------------------
# ODE cross-checks (classical fixed-step RK4)
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class TanODE:
    """g' = k (1 + a^2 g^2) with solution g(y) = (1/a) tan(a k y + d)."""
    a: float = 1.0
    k: float = 1.0
    d: float = 0.0

    def branches(self):
        a, k, d = self.a, self.k, self.d
        rhs = lambda x, y: k * (1.0 + a * a * y * y)
        closed = lambda x: math.tan(a * k * x + d) / a
        return [(rhs, closed)]


@dataclass(frozen=True)
class ExpBranch:
    """f' = b f and g' = c g with solutions p e^{bx}, q e^{cy}."""
    b: float = 1.0
    c: float = 1.0
    p: float = 1.0
    q: float = 1.0

    def branches(self):
        out = []
        for rate, start in ((self.b, self.p), (self.c, self.q)):
            out.append((lambda x, y, r=rate: r * y,
                        lambda x, r=rate, y0=start: y0 * math.exp(r * x)))
        return out


@dataclass(frozen=True)
class PowerBranch:
    """f' = b f^a and g' = c g^{1/a} with the separable closed forms
    ((1-a) b x + p)^{1/(1-a)} and ((a-1)/a c y + q)^{a/(a-1)}."""
    a: float = 2.0
    b: float = 1.0
    c: float = 1.0
    p: float = 1.0
    q: float = 1.0

    def __post_init__(self):
        if self.a in (0.0, 1.0):
            raise SpecError(f"PowerBranch exponent a={self.a} must avoid 0 and 1")

    def branches(self):
        a, b, c, p, q = self.a, self.b, self.c, self.p, self.q

        def pow_or_raise(y, e):
            try:
                return math.pow(y, e)
            except (ValueError, OverflowError):
                raise SingularityError(
                    f"power {y}^{e} undefined during integration") from None

        rhs_f = lambda x, y: b * pow_or_raise(y, a)
        closed_f = lambda x: pow_or_raise((1.0 - a) * b * x + p, 1.0 / (1.0 - a))
        rhs_g = lambda x, y: c * pow_or_raise(y, 1.0 / a)
        closed_g = lambda x: pow_or_raise((a - 1.0) / a * c * x + q, a / (a - 1.0))
        return [(rhs_f, closed_f), (rhs_g, closed_g)]


ODEProblem = Union[TanODE, ExpBranch, PowerBranch]


def _rk4_max_error(rhs: Callable[[float, float], float],
                   closed: Callable[[float], float],
                   x0: float, x1: float, steps: int) -> float:
    h = (x1 - x0) / steps
    y = closed(x0)
    err = 0.0

    def f(x, y):
        k = rhs(x, y)
        if not math.isfinite(k) or abs(k) > RHS_MAGNITUDE_CAP:
            raise SingularityError(
                f"ODE right-hand side {k} exceeds cap {RHS_MAGNITUDE_CAP}")
        return k

    for i in range(steps):
        x = x0 + i * h
        k1 = f(x, y)
        k2 = f(x + 0.5 * h, y + 0.5 * h * k1)
        k3 = f(x + 0.5 * h, y + 0.5 * h * k2)
        k4 = f(x + h, y + h * k3)
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        err = max(err, abs(y - closed(x0 + (i + 1) * h)))
    return err


def ode_crosscheck(ode: ODEProblem, interval: tuple[float, float],
                   steps: int) -> float:
    """Integrate the reduced ODE with classical RK4 from the closed form's
    initial value; return the max deviation from the closed form."""
    if steps < 1:
        raise SpecError("steps must be >= 1")
    x0, x1 = interval
    return max(_rk4_max_error(rhs, closed, x0, x1, steps)
               for rhs, closed in ode.branches())


# --------------------------------------------------------------------------
# nonexistence probe
# --------------------------------------------------------------------------

PROBE_POLY_DEGREE = 6
_PROBE_GRID_1D = np.linspace(-0.8, 0.8, 7)
_COL = (slice(None), None)  # f(s) broadcast down rows, g(t) across columns


@dataclass(frozen=True)
class HomotheticalNonzeroK:
    """Search for z = f(x) g(y) with constant Gauss curvature K0 != 0."""
    K0: float

    dim = 2 * (PROBE_POLY_DEGREE + 1)
    problem_id = "homothetical_nonzero_k"

    def residual(self, coeffs: np.ndarray) -> float:
        cf = coeffs[:PROBE_POLY_DEGREE + 1]
        cg = coeffs[PROBE_POLY_DEGREE + 1:]
        f, fp, fpp = (a[_COL] for a in _poly_jets2(cf, _PROBE_GRID_1D))
        g, gp, gpp = _poly_jets2(cg, _PROBE_GRID_1D)
        with np.errstate(all="ignore"):
            num = f * g * fpp * gpp - fp ** 2 * gp ** 2
            den = (1.0 + fp ** 2 * g ** 2 + f ** 2 * gp ** 2) ** 2
            K = num / den
            r = float(np.mean((K - self.K0) ** 2))
        if not math.isfinite(r):
            return _overflow_penalty(coeffs)
        return r


@dataclass(frozen=True)
class TranslationPlanarGenerator:
    """Search for a translation surface with one planar generator and
    constant Gauss curvature K0 != 0: alpha = (s, 0, f(s)),
    beta = (g1(t), t, g2(t))."""
    K0: float

    dim = 3 * (PROBE_POLY_DEGREE + 1)
    problem_id = "translation_planar_generator"

    def residual(self, coeffs: np.ndarray) -> float:
        n = PROBE_POLY_DEGREE + 1
        cf, cg1, cg2 = coeffs[:n], coeffs[n:2 * n], coeffs[2 * n:]
        f, fp, fpp = (a[_COL] for a in _poly_jets2(cf, _PROBE_GRID_1D))
        g1, g1p, g1pp = _poly_jets2(cg1, _PROBE_GRID_1D)
        g2, g2p, g2pp = _poly_jets2(cg2, _PROBE_GRID_1D)
        with np.errstate(all="ignore"):
            P = fpp
            Q = g2pp - fp * g1pp
            W = (1.0 + fp ** 2) * (1.0 + g1p ** 2 + g2p ** 2) - (g1p + fp * g2p) ** 2
            K = P * Q / W ** 2
            r = float(np.mean((K - self.K0) ** 2))
        if not math.isfinite(r):
            return _overflow_penalty(coeffs)
        return r


ProbeProblem = Union[HomotheticalNonzeroK, TranslationPlanarGenerator]


def _poly_jets2(coeffs: np.ndarray, x: np.ndarray):
    """Value, first and second derivative of an ascending-coefficient
    polynomial on an array of points."""
    c = np.asarray(coeffs, dtype=float)
    c1 = c[1:] * np.arange(1, len(c))
    c2 = c1[1:] * np.arange(1, len(c1))
    pol = np.polynomial.polynomial.polyval
    return pol(x, c), pol(x, c1), pol(x, c2)


def _overflow_penalty(coeffs: np.ndarray) -> float:
    norm = float(np.sum(coeffs * coeffs))
    if not math.isfinite(norm):
        norm = 1e12
    return 1e12 + min(norm, 1e12)


@dataclass(frozen=True)
class ProbeResult:
    problem: str
    best_residual: float
    iterations: int
    seed: int
    params: tuple[float, ...]

    def to_dict(self) -> dict:
        return {
            "problem": self.problem,
            "best_residual": self.best_residual,
            "iterations": self.iterations,
            "seed": self.seed,
            "params": list(self.params),
        }


def nonexistence_probe(problem: ProbeProblem, seed: int, budget: int,
                       workers: int = 1) -> ProbeResult:
    """Minimize the mean-square deviation of sampled K from the target over
    degree-6 polynomial coefficient vectors, restarting from seeded random
    starts; returns the best candidate found.

    Purely a counterexample search: a residual floor is evidence for the
    nonexistence claims, never a proof.  Deterministic given (problem,
    seed, budget) for any worker count (restarts merge by index).
    """
    if budget < 1:
        raise SpecError("budget must be >= 1")
    rng = np.random.default_rng(seed)
    starts = rng.normal(0.0, 0.5, size=(budget, problem.dim))

    def run(start: np.ndarray):
        return minimize(problem.residual, start, method="Nelder-Mead",
                        options={"maxiter": 2000, "maxfev": 3000,
                                 "xatol": 1e-10, "fatol": 1e-14,
                                 "adaptive": True})

    if workers <= 1:
        results = [run(x0) for x0 in starts]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, starts))

    iterations = int(sum(r.nit for r in results))
    best = results[0]
    for r in results[1:]:
        if r.fun < best.fun:
            best = r
    return ProbeResult(problem.problem_id, float(best.fun), iterations,
                       int(seed), tuple(float(v) for v in best.x))
