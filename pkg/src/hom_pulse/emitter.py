"""Single two-level emitter under spontaneous decay and instantaneous pi pulses.

The operator is kept as its four matrix elements in the {|e>, |g>} basis.
Between pulses the optical Bloch equations (no drive) are solved exactly, and
each pulse is the exact population/coherence swap, so propagation carries no
step-size error.  Fields may be numpy arrays, in which case every operation
acts elementwise (used to evaluate whole time grids at once).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# Tolerance (in units of the pulse period) for treating a time as an exact
# multiple of tau.
GUARD = 1e-12


@dataclass(frozen=True)
class EmitterParams:
    delta: float
    gamma: float = 2.0

    def __post_init__(self):
        if not math.isfinite(self.delta):
            raise ValueError(f"delta must be finite, got {self.delta}")
        if not (math.isfinite(self.gamma) and self.gamma > 0):
            raise ValueError(f"gamma must be positive, got {self.gamma}")


@dataclass(frozen=True)
class PulseTrain:
    """Pi pulses at t = k*tau for k >= 1 (never at t = 0)."""

    tau: float = 0.2
    enabled: bool = True

    def __post_init__(self):
        if self.enabled and not (math.isfinite(self.tau) and self.tau > 0):
            raise ValueError(f"tau must be positive, got {self.tau}")

    @classmethod
    def off(cls) -> "PulseTrain":
        return cls(tau=math.inf, enabled=False)


@dataclass(frozen=True)
class TwoLevelOperator:
    ee: complex
    gg: complex
    eg: complex
    ge: complex

    @classmethod
    def excited(cls) -> "TwoLevelOperator":
        return cls(1.0 + 0j, 0j, 0j, 0j)

    @classmethod
    def from_matrix(cls, mat) -> "TwoLevelOperator":
        mat = np.asarray(mat, dtype=complex)
        return cls(mat[0, 0], mat[1, 1], mat[0, 1], mat[1, 0])

    def as_matrix(self) -> np.ndarray:
        """2x2 matrix, rows/columns ordered (e, g). Scalar fields only."""
        return np.array([[self.ee, self.eg], [self.ge, self.gg]], dtype=complex)

    @property
    def trace(self):
        return self.ee + self.gg

    def __add__(self, other: "TwoLevelOperator") -> "TwoLevelOperator":
        return TwoLevelOperator(self.ee + other.ee, self.gg + other.gg,
                                self.eg + other.eg, self.ge + other.ge)

    def __mul__(self, c) -> "TwoLevelOperator":
        return TwoLevelOperator(c * self.ee, c * self.gg, c * self.eg, c * self.ge)

    __rmul__ = __mul__


@dataclass(frozen=True)
class IntervalPosition:
    """Location of t (and optionally t + theta) relative to the pulse grid.

    ``t = interval_index * tau + offset`` and
    ``t + theta = (interval_index + separation) * tau + end_offset``.
    """

    interval_index: int
    offset: float
    separation: int | None = None
    end_offset: float | None = None


def interval_index(x, tau: float, side: str = "right"):
    """Index k of the pulse interval containing x.

    ``side="right"`` uses half-open intervals [k tau, (k+1) tau), so a time
    exactly at a pulse counts as post-pulse.  ``side="left"`` gives the
    left limit: a time exactly at k tau is assigned to interval k - 1.
    Works elementwise on arrays.
    """
    q = np.asarray(x, dtype=float) / tau
    if side == "right":
        k = np.floor(q + GUARD)
    elif side == "left":
        k = np.ceil(q - GUARD) - 1
    else:
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")
    k = k.astype(np.int64)
    return k if k.ndim else int(k)


def interval_offset(x, k, tau: float):
    """x - k*tau clipped into [0, tau] against rounding."""
    s = np.clip(np.asarray(x, dtype=float) - np.asarray(k) * tau, 0.0, tau)
    return s if s.ndim else float(s)


def interval_position(t: float, tau: float, theta: float | None = None) -> IntervalPosition:
    if t < 0:
        raise ValueError(f"t must be non-negative, got {t}")
    M = interval_index(t, tau)
    s = interval_offset(t, M, tau)
    if theta is None:
        return IntervalPosition(M, s)
    if theta < 0:
        raise ValueError(f"theta must be non-negative, got {theta}")
    K = interval_index(t + theta, tau)
    return IntervalPosition(M, s, K - M, interval_offset(t + theta, K, tau))


def _check_duration(dt):
    arr = np.asarray(dt, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"duration must be finite, got {dt}")
    if np.any(arr < 0):
        raise ValueError(f"duration must be non-negative, got {dt}")


def _evolve(op: TwoLevelOperator, dt, p: EmitterParams) -> TwoLevelOperator:
    decay = np.exp(-p.gamma * dt)
    half = -0.5 * p.gamma * dt
    return TwoLevelOperator(
        ee=op.ee * decay,
        gg=op.gg + op.ee * (1.0 - decay),
        eg=op.eg * np.exp(half - 1j * p.delta * dt),
        ge=op.ge * np.exp(half + 1j * p.delta * dt),
    )


def evolve_free(op: TwoLevelOperator, dt, p: EmitterParams) -> TwoLevelOperator:
    """Exact undriven Bloch evolution over duration ``dt``."""
    _check_duration(dt)
    return _evolve(op, dt, p)


def apply_pi_pulse(op: TwoLevelOperator) -> TwoLevelOperator:
    return TwoLevelOperator(ee=op.gg, gg=op.ee, eg=op.ge, ge=op.eg)


def _swap_where(op: TwoLevelOperator, mask) -> TwoLevelOperator:
    if np.ndim(mask) == 0:
        return apply_pi_pulse(op) if mask else op
    return TwoLevelOperator(
        ee=np.where(mask, op.gg, op.ee),
        gg=np.where(mask, op.ee, op.gg),
        eg=np.where(mask, op.ge, op.eg),
        ge=np.where(mask, op.eg, op.ge),
    )


def propagate(op: TwoLevelOperator, t0, t1, p: EmitterParams, train: PulseTrain,
              *, include_start: bool = False, include_end: bool = True) -> TwoLevelOperator:
    """Propagate ``op`` from ``t0`` to ``t1`` through the pulse train.

    Pulses strictly inside (t0, t1) are always applied.  By default a pulse
    exactly at t0 is skipped (it belongs to the previous call) and one exactly
    at t1 is applied, which makes consecutive calls compose.  The keyword
    flags flip those two boundary choices, which is how one-sided limits at a
    pulse time are obtained.  ``t0``/``t1`` may be arrays broadcast against
    the operator fields.
    """
    t0 = np.asarray(t0, dtype=float)
    t1 = np.asarray(t1, dtype=float)
    if np.any(t0 < 0) or not np.all(np.isfinite(t1)):
        raise ValueError("propagate requires 0 <= t0 and finite t1")
    if np.any(t1 < t0):
        raise ValueError(f"t1 must not precede t0 (t0={t0}, t1={t1})")
    if not train.enabled:
        return _evolve(op, t1 - t0, p)

    tau = train.tau
    first = np.maximum(interval_index(t0, tau, "left" if include_start else "right"), 0) + 1
    last = interval_index(t1, tau, "right" if include_end else "left")
    n_pulses = np.maximum(np.asarray(last) - first + 1, 0)

    now = t0
    for j in range(int(np.max(n_pulses))):
        active = j < n_pulses
        pulse_time = np.where(active, (first + j) * tau, now)
        op = _evolve(op, np.maximum(pulse_time - now, 0.0), p)
        op = _swap_where(op, active)
        now = pulse_time
    return _evolve(op, np.maximum(t1 - now, 0.0), p)


def rho_gg_closed_form(t, tau: float, gamma: float, side: str = "right"):
    """Ground-state population of an initially excited emitter under the train.

    Uses the interval decomposition t = M*tau + s.  ``side="left"`` returns
    the pre-pulse value when t sits exactly on a pulse.
    """
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("t must be non-negative")
    M = interval_index(t, tau, side)
    M = np.maximum(M, 0)
    s = interval_offset(t, M, tau)
    sign = np.where(np.asarray(M) % 2 == 0, -1.0, 1.0)  # (-1)^(M+1)
    amplitude = (1.0 - sign * np.exp(-(np.asarray(M) + 1) * gamma * tau)) / (1.0 + np.exp(-gamma * tau))
    out = 1.0 - amplitude * np.exp(-gamma * s)
    return out if out.ndim else float(out)


def rk4_bloch(op: TwoLevelOperator, t0: float, t1: float, p: EmitterParams,
              train: PulseTrain, h: float = 1e-4) -> TwoLevelOperator:
    """Fixed-step RK4 integration of the undriven Bloch equations with pulse swaps.

    Test oracle only; shipped results use :func:`propagate`.
    """
    y = np.array([op.ee, op.gg, op.eg, op.ge], dtype=complex)
    rate_eg = -1j * p.delta - 0.5 * p.gamma
    rate_ge = 1j * p.delta - 0.5 * p.gamma

    def rhs(v):
        return np.array([-p.gamma * v[0], p.gamma * v[0], rate_eg * v[2], rate_ge * v[3]])

    def integrate(v, span):
        n = max(1, int(math.ceil(span / h - 1e-9)))
        step = span / n
        for _ in range(n):
            k1 = rhs(v)
            k2 = rhs(v + 0.5 * step * k1)
            k3 = rhs(v + 0.5 * step * k2)
            k4 = rhs(v + step * k3)
            v = v + step / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        return v

    nodes = [t0]
    if train.enabled:
        k = interval_index(t0, train.tau) + 1
        while k * train.tau <= t1 + GUARD * train.tau:
            nodes.append(k * train.tau)
            k += 1
    for a, b in zip(nodes, nodes[1:]):
        y = integrate(y, b - a)
        y = y[[1, 0, 3, 2]]
    y = integrate(y, max(t1 - nodes[-1], 0.0))
    return TwoLevelOperator(*y)
