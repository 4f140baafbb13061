"""First-order two-time coherence g(t, theta) = <sigma+(t) sigma-(t + theta)>.

Closed forms use the ``+i*Delta`` phase sign; the numeric quantum-regression
route returns the raw ``eg`` element of the propagated auxiliary operator,
which carries the opposite sign.  The two are complex conjugates of each
other, and every two-emitter observable built from them is invariant under
a global conjugation.
"""
from __future__ import annotations

from enum import Enum

import numpy as np

from .emitter import (EmitterParams, PulseTrain, TwoLevelOperator, interval_index,
                      propagate, rho_gg_closed_form)


class PopulationConvention(str, Enum):
    """Which population multiplies f(t, theta) in the pulsed closed form.

    ``AS_PUBLISHED`` uses the ground-state population, as the published
    closed form is written.  ``EXCITED`` uses 1 - rho_gg, which is what the
    regression theorem gives (and what the free case reduces to at theta=0).
    """

    AS_PUBLISHED = "as_published"
    EXCITED = "excited"


def _check_times(t, theta):
    if np.any(np.asarray(t) < 0) or np.any(np.asarray(theta) < 0):
        raise ValueError("t and theta must be non-negative")


def _scalar(x):
    x = np.asarray(x)
    return x[()] if x.ndim == 0 else x


def g_free(t, theta, p: EmitterParams):
    _check_times(t, theta)
    t = np.asarray(t, dtype=float)
    theta = np.asarray(theta, dtype=float)
    return _scalar(np.exp(-p.gamma * t) * np.exp((-0.5 * p.gamma + 1j * p.delta) * theta))


def pulse_separation(t, theta, tau: float, t_side: str = "right", end_side: str = "right"):
    """Number m of pulses between t and t + theta, from integer interval indices."""
    t = np.asarray(t, dtype=float)
    end = t + np.asarray(theta, dtype=float)
    start = np.maximum(interval_index(t, tau, t_side), 0)
    return np.maximum(interval_index(end, tau, end_side), 0) - start


def f_pulsed(t, theta, p: EmitterParams, train: PulseTrain,
             t_side: str = "right", end_side: str = "right"):
    """Coherence factor under the pulse train.

    Vanishes when an odd number of pulses separates t and t + theta; for an
    even number m (including zero) it is exp(-Gamma theta/2) exp(i Delta (theta - m tau)).
    The side arguments select one-sided limits when t or t + theta sits on a pulse.
    """
    _check_times(t, theta)
    if not train.enabled:
        raise ValueError("f_pulsed requires an enabled pulse train")
    theta = np.asarray(theta, dtype=float)
    m = pulse_separation(t, theta, train.tau, t_side, end_side)
    value = np.exp(-0.5 * p.gamma * theta) * np.exp(1j * p.delta * (theta - m * train.tau))
    return _scalar(np.where(m % 2 == 0, value, 0j))


def population_weight(t, train: PulseTrain, gamma: float,
                      conv: PopulationConvention, side: str = "right"):
    rho_gg = rho_gg_closed_form(t, train.tau, gamma, side)
    if PopulationConvention(conv) is PopulationConvention.AS_PUBLISHED:
        return rho_gg
    return 1.0 - np.asarray(rho_gg)


def g_pulsed_closed(t, theta, p: EmitterParams, train: PulseTrain,
                    conv: PopulationConvention = PopulationConvention.AS_PUBLISHED,
                    t_side: str = "right", end_side: str = "right"):
    f = f_pulsed(t, theta, p, train, t_side, end_side)
    return _scalar(f * population_weight(t, train, p.gamma, conv, t_side))


def g_closed(t, theta, p: EmitterParams, train: PulseTrain,
             conv: PopulationConvention = PopulationConvention.AS_PUBLISHED,
             t_side: str = "right", end_side: str = "right"):
    """Closed-form coherence, free or pulsed depending on ``train``."""
    if not train.enabled:
        return g_free(t, theta, p)
    return g_pulsed_closed(t, theta, p, train, conv, t_side, end_side)


def g_qrt_numeric(t, theta, p: EmitterParams, train: PulseTrain,
                  t_side: str = "right", end_side: str = "right"):
    """Coherence by the quantum regression theorem.

    The density matrix is propagated from the excited state to t, multiplied
    on the right by sigma+ (rho' has rho'_eg = rho_ee, rho'_gg = rho_ge), the
    result is propagated with the same maps to t + theta, and Tr[rho' sigma-]
    (its eg element) is returned.  Accepts arrays for ``t`` and ``theta``.
    """
    _check_times(t, theta)
    t = np.asarray(t, dtype=float)
    end = t + np.asarray(theta, dtype=float)
    before_t = t_side == "left"
    rho = propagate(TwoLevelOperator.excited(), 0.0, t, p, train, include_end=not before_t)
    zero = np.zeros_like(rho.ee * end)
    aux = TwoLevelOperator(ee=zero, gg=rho.ge + zero, eg=rho.ee + zero, ge=zero)
    aux = propagate(aux, t, end, p, train, include_start=before_t,
                    include_end=end_side == "right")
    return _scalar(aux.eg)
