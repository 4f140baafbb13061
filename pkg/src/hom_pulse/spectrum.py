"""Emission spectrum of a single emitter from its first-order coherence.

S(omega) = Re int_0^T dt int_0^{T-t} dtheta g(t, theta) exp(-i omega theta),
normalised to unit maximum.  The order of integration is swapped so the
t-integral C(theta) = int_0^{T-theta} g(t, theta) dt is done once per theta
and the spectrum is a single finite Fourier transform of C.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .coherence import PopulationConvention, g_closed
from .emitter import EmitterParams, PulseTrain
from .hom import CorrelationCurve, NumericFailure, breakpoints, piecewise_trapezoid


@dataclass(frozen=True)
class SpectrumGrid:
    omega_min: float = -25.0
    omega_max: float = 25.0
    points: int = 251

    def __post_init__(self):
        if not self.omega_min < self.omega_max:
            raise ValueError("omega_min must be below omega_max")
        if self.points < 2:
            raise ValueError("a spectrum grid needs at least 2 points")

    @property
    def omega(self) -> np.ndarray:
        return np.linspace(self.omega_min, self.omega_max, self.points)

    @property
    def step(self) -> float:
        return (self.omega_max - self.omega_min) / (self.points - 1)


def _theta_nodes(T: float, train: PulseTrain, steps_per_unit: int) -> np.ndarray:
    # every multiple of tau must be a node: the theta spacing divides tau
    if train.enabled:
        per_period = max(1, int(math.ceil(train.tau * steps_per_unit)))
        h = train.tau / per_period
        n = int(math.floor(T / h + 1e-9))
        nodes = np.arange(n + 1) * h
        return nodes if T - nodes[-1] < 1e-12 else np.append(nodes, T)
    return np.linspace(0.0, T, int(math.ceil(T * steps_per_unit)) + 1)


def time_integrated_coherence(p: EmitterParams, train: PulseTrain, T: float,
                              conv=PopulationConvention.EXCITED, steps_per_unit: int = 100):
    """C(theta) = int_0^{T-theta} g(t, theta) dt on a pulse-aligned theta grid."""
    thetas = _theta_nodes(T, train, steps_per_unit)
    h = 1.0 / steps_per_unit
    tau = train.tau if train.enabled else None
    out = np.zeros(thetas.size, dtype=complex)
    for i, theta in enumerate(thetas[:-1]):
        def integrand(t, side, theta=theta):
            return g_closed(t, np.full_like(t, theta), p, train, conv, side, side)
        out[i] = piecewise_trapezoid(integrand, breakpoints(theta, T - theta, tau), h)
    return thetas, out


def emission_spectrum(p: EmitterParams, train: PulseTrain, grid: SpectrumGrid = SpectrumGrid(),
                      T: float = 8.0, conv=PopulationConvention.EXCITED,
                      steps_per_unit: int = 100) -> CorrelationCurve:
    if not (T > 0 and math.isfinite(T)):
        raise ValueError(f"T must be positive, got {T}")
    thetas, coh = time_integrated_coherence(p, train, T, conv, steps_per_unit)
    omega = grid.omega
    weights = _trapezoid_weights(thetas)
    phase = np.exp(-1j * np.outer(omega, thetas))
    raw = np.real(phase @ (weights * coh))
    top = np.max(raw)
    if not top > 0:
        raise NumericFailure(f"spectrum normalisation failed (max = {top:.3e})")
    values = np.maximum(raw / top, 0.0)
    meta = {"kind": "spectrum", "delta": p.delta, "gamma": p.gamma,
            "tau": train.tau if train.enabled else None, "T": T,
            "convention": PopulationConvention(conv).value}
    return CorrelationCurve(omega, values, meta)


def _trapezoid_weights(x: np.ndarray) -> np.ndarray:
    d = np.diff(x)
    w = np.zeros_like(x)
    w[:-1] += 0.5 * d
    w[1:] += 0.5 * d
    return w


def local_maxima(curve: CorrelationCurve) -> np.ndarray:
    """Abscissae of strict interior local maxima."""
    v = curve.values
    idx = np.where((v[1:-1] > v[:-2]) & (v[1:-1] >= v[2:]))[0] + 1
    return curve.abscissa[idx]


def fwhm(curve: CorrelationCurve) -> float:
    """Full width at half maximum of the main peak, by linear interpolation."""
    x, v = curve.abscissa, curve.values
    i = int(np.argmax(v))
    half = 0.5 * v[i]
    left = i
    while left > 0 and v[left] > half:
        left -= 1
    right = i
    while right < v.size - 1 and v[right] > half:
        right += 1
    if v[left] > half or v[right] > half:
        raise ValueError("peak does not fall to half maximum inside the grid")
    xl = np.interp(half, [v[left], v[left + 1]], [x[left], x[left + 1]])
    xr = np.interp(half, [v[right], v[right - 1]], [x[right], x[right - 1]])
    return float(xr - xl)
