"""Hong-Ou-Mandel intensity correlation at the two beam-splitter detectors.

G2_34(t, theta) is assembled from the single-emitter coherences, and the
measured cross-correlation g2_34(theta) is its integral over detection time t.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, asdict
from enum import Enum

import numpy as np

from .coherence import PopulationConvention, f_pulsed, g_closed, g_qrt_numeric
from .emitter import GUARD, EmitterParams, PulseTrain

NEGATIVE_TOL = 1e-12
IMAG_TOL = 1e-9


class NumericFailure(ArithmeticError):
    """A computed observable violated a property it must satisfy analytically."""


class Method(str, Enum):
    CLOSED_FORM = "closed_form"
    QRT_NUMERIC = "qrt_numeric"


def default_theta_grid(theta_max: float = 3.0, steps: int = 601) -> np.ndarray:
    return np.linspace(0.0, theta_max, steps)


def augment_with_pulse_multiples(grid, tau: float) -> np.ndarray:
    """Add every multiple of tau inside the grid's range that is not already a node."""
    grid = np.asarray(grid, dtype=float)
    if not math.isfinite(tau) or grid.size == 0:
        return grid
    k = np.arange(0, int(np.floor(grid[-1] / tau + GUARD)) + 1)
    multiples = k * tau
    if grid.size > 1:
        tol = 1e-9 * max(np.min(np.diff(grid)), tau)
    else:
        tol = 1e-9 * tau
    missing = [x for x in multiples if x >= grid[0] and np.min(np.abs(grid - x)) > tol]
    return np.sort(np.concatenate([grid, missing])) if missing else grid


@dataclass(frozen=True)
class HomScenario:
    emitter1: EmitterParams
    emitter2: EmitterParams
    train: PulseTrain = field(default_factory=PulseTrain)
    convention: PopulationConvention = PopulationConvention.AS_PUBLISHED
    method: Method = Method.CLOSED_FORM
    T: float = 4.8
    t_steps: int = 4801
    theta_grid: tuple = field(default_factory=lambda: tuple(default_theta_grid()))
    steady: bool = False

    def __post_init__(self):
        if self.emitter1.gamma != self.emitter2.gamma:
            raise ValueError("both emitters must share the same decay rate")
        if not (self.T > 0 and math.isfinite(self.T)):
            raise ValueError(f"T must be positive, got {self.T}")
        if self.t_steps < 2:
            raise ValueError(f"t_steps must be at least 2, got {self.t_steps}")
        grid = np.asarray(self.theta_grid, dtype=float)
        if grid.size == 0 or np.any(grid < 0) or np.any(np.diff(grid) <= 0):
            raise ValueError("theta_grid must be non-empty, non-negative and strictly ascending")
        if self.steady and not self.train.enabled:
            raise ValueError("the steady-state correlation requires pulses")
        object.__setattr__(self, "convention", PopulationConvention(self.convention))
        object.__setattr__(self, "method", Method(self.method))

    @property
    def gamma(self) -> float:
        return self.emitter1.gamma

    def swapped(self) -> "HomScenario":
        kw = {f: getattr(self, f) for f in self.__dataclass_fields__}
        kw["emitter1"], kw["emitter2"] = self.emitter2, self.emitter1
        return HomScenario(**kw)

    def describe(self) -> dict:
        d = asdict(self)
        d["theta_grid"] = {"start": float(self.theta_grid[0]),
                           "stop": float(self.theta_grid[-1]), "points": len(self.theta_grid)}
        d["convention"] = self.convention.value
        d["method"] = self.method.value
        return d


@dataclass(frozen=True)
class CorrelationCurve:
    abscissa: np.ndarray
    values: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        a = np.asarray(self.abscissa, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if a.shape != v.shape:
            raise ValueError("abscissa and values must have equal length")
        if np.any(np.diff(a) <= 0):
            raise ValueError("abscissa must be strictly ascending")
        if np.any(v < 0):
            raise ValueError("curve values must be non-negative")
        object.__setattr__(self, "abscissa", a)
        object.__setattr__(self, "values", v)

    @property
    def peak(self) -> float:
        return float(np.max(self.values))

    def at(self, x: float) -> float:
        """Value at the grid node closest to x."""
        return float(self.values[np.argmin(np.abs(self.abscissa - x))])


def clamp_non_negative(values, what: str = "G2_34"):
    values = np.asarray(values, dtype=float)
    worst = np.min(values) if values.size else 0.0
    if worst < -NEGATIVE_TOL:
        raise NumericFailure(f"{what} went negative ({worst:.3e})")
    out = np.maximum(values, 0.0)
    return out if out.ndim else float(out)


def _coherence(s: HomScenario, p: EmitterParams, t, theta, t_side, end_side):
    if s.method is Method.QRT_NUMERIC:
        return g_qrt_numeric(t, theta, p, s.train, t_side, end_side)
    return g_closed(t, theta, p, s.train, s.convention, t_side, end_side)


def _G2_raw(t, theta, s: HomScenario, t_side="right", end_side="right"):
    t = np.asarray(t, dtype=float)
    theta = np.asarray(theta, dtype=float)
    p1, p2 = s.emitter1, s.emitter2
    zero = np.zeros_like(t)
    n1_t = _coherence(s, p1, t, zero, t_side, t_side)
    n2_t = _coherence(s, p2, t, zero, t_side, t_side)
    n1_end = _coherence(s, p1, t + theta, zero, end_side, end_side)
    n2_end = _coherence(s, p2, t + theta, zero, end_side, end_side)
    c1 = _coherence(s, p1, t, theta, t_side, end_side)
    c2 = _coherence(s, p2, t, theta, t_side, end_side)
    total = 0.25 * (n1_t * n2_end + n2_t * n1_end - np.conj(c1) * c2 - np.conj(c2) * c1)
    residue = np.max(np.abs(np.imag(total))) if np.size(total) else 0.0
    if residue > IMAG_TOL:
        raise NumericFailure(f"G2_34 has imaginary residue {residue:.3e}")
    return np.real(total)


def _G2_steady_raw(t, theta, s: HomScenario, t_side="right", end_side="right"):
    f1 = f_pulsed(t, theta, s.emitter1, s.train, t_side, end_side)
    f2 = f_pulsed(t, theta, s.emitter2, s.train, t_side, end_side)
    return 0.125 * (1.0 - np.real(f1 * np.conj(f2)))


def G2_34(t, theta, s: HomScenario):
    """Detector intensity correlation at detection times t and t + theta."""
    if np.any(np.asarray(t) < 0) or np.any(np.asarray(theta) < 0):
        raise ValueError("t and theta must be non-negative")
    return clamp_non_negative(_G2_raw(t, theta, s))


def G2_34_steady(t, theta, s: HomScenario):
    """Stationary-regime correlation with both populations fixed at 1/2."""
    if not s.train.enabled:
        raise ValueError("G2_34_steady requires an enabled pulse train")
    if np.any(np.asarray(t) < 0) or np.any(np.asarray(theta) < 0):
        raise ValueError("t and theta must be non-negative")
    out = _G2_steady_raw(t, theta, s)
    return out if np.ndim(out) else float(out)


def g2_34_free_closed(theta, delta21: float, gamma: float, T: float = math.inf):
    theta = np.asarray(theta, dtype=float)
    prefactor = 1.0 / (4.0 * gamma)
    if math.isfinite(T):
        prefactor *= 1.0 - math.exp(-2.0 * gamma * T)
    out = prefactor * np.exp(-gamma * theta) * (1.0 - np.cos(delta21 * theta))
    return out if out.ndim else float(out)


def breakpoints(theta: float, T: float, tau: float | None) -> np.ndarray:
    """Sorted kink/jump locations of t -> G2_34(t, theta) on [0, T], endpoints included.

    The integrand changes branch wherever t or t + theta crosses a pulse.
    """
    points = [0.0, T]
    if tau is not None and math.isfinite(tau):
        k = np.arange(1, int(np.floor((T + theta) / tau)) + 2)
        pulses = k * tau
        for x in np.concatenate([pulses, pulses - theta]):
            if 0.0 < x < T:
                points.append(float(x))
    points = np.sort(np.asarray(points))
    tol = GUARD * (tau if tau and math.isfinite(tau) else 1.0) * 10
    keep = np.concatenate([[True], np.diff(points) > tol])
    points = points[keep]
    points[-1] = T
    return points


def piecewise_trapezoid(integrand, edges, h: float):
    """Trapezoid rule on each smooth piece [edges[i], edges[i+1]].

    ``integrand(t, side)`` is evaluated with ``side="right"`` on all nodes
    except each piece's last one, which uses ``side="left"`` so jumps at the
    edges are integrated from their one-sided limits.  Each piece gets
    ceil(length / h) uniform subintervals.
    """
    right_t, right_w, left_t, left_w = [], [], [], []
    for a, b in zip(edges[:-1], edges[1:]):
        n = max(1, int(math.ceil((b - a) / h - 1e-9)))
        nodes = np.linspace(a, b, n + 1)
        w = np.full(n + 1, (b - a) / n)
        w[0] = w[-1] = 0.5 * (b - a) / n
        right_t.append(nodes[:-1])
        right_w.append(w[:-1])
        left_t.append(b)
        left_w.append(w[-1])
    rt = np.concatenate(right_t)
    lt = np.asarray(left_t)
    return (np.dot(np.concatenate(right_w), integrand(rt, "right"))
            + np.dot(np.asarray(left_w), integrand(lt, "left")))


def g2_34_integrated(s: HomScenario) -> CorrelationCurve:
    """Integrated cross-correlation g2_34(theta) = int_0^T G2_34(t, theta) dt."""
    thetas = np.asarray(s.theta_grid, dtype=float)
    if s.train.enabled:
        thetas = augment_with_pulse_multiples(thetas, s.train.tau)
    tau = s.train.tau if s.train.enabled else None
    h = s.T / (s.t_steps - 1)
    raw = _G2_steady_raw if s.steady else _G2_raw

    values = np.empty(thetas.size)
    for i, theta in enumerate(thetas):
        def integrand(t, side, theta=theta):
            return raw(t, np.full_like(t, theta), s, side, side)
        values[i] = np.real(piecewise_trapezoid(integrand, breakpoints(theta, s.T, tau), h))
    values = clamp_non_negative(values, "g2_34")
    return CorrelationCurve(thetas, np.atleast_1d(values), {"kind": "g2_34", **s.describe()})
