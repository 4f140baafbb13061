import math

import numpy as np
import pytest

from hom_pulse.emitter import EmitterParams, PulseTrain
from hom_pulse.hom import NumericFailure
from hom_pulse.spectrum import (SpectrumGrid, emission_spectrum, fwhm, local_maxima,
                                time_integrated_coherence)

GRID = SpectrumGrid()
OFF = PulseTrain.off()
TRAIN = PulseTrain(0.2)


def free_spectrum_exact(omega, delta, gamma, T):
    """Re int_0^T dtheta exp(a theta) int_0^{T-theta} exp(-gamma t) dt, a = -gamma/2 + i(delta - omega)."""
    a = -0.5 * gamma + 1j * (delta - np.asarray(omega))
    first = (np.exp(a * T) - 1) / a
    second = math.exp(-gamma * T) * (np.exp((a + gamma) * T) - 1) / (a + gamma)
    return np.real(first - second) / gamma


def test_grid_validation():
    assert GRID.step == pytest.approx(0.2)
    with pytest.raises(ValueError):
        SpectrumGrid(1.0, 1.0, 10)
    with pytest.raises(ValueError):
        SpectrumGrid(0.0, 1.0, 1)


def test_free_spectrum_matches_analytic_transform():
    curve = emission_spectrum(EmitterParams(3.0), OFF, GRID, T=8.0)
    exact = free_spectrum_exact(curve.abscissa, 3.0, 2.0, 8.0)
    assert np.max(np.abs(curve.values - exact / exact.max())) < 1e-4


@pytest.mark.parametrize("delta", [-4.0, -2.0, 2.0, 3.0])
def test_free_spectrum_peak_and_width(delta):
    curve = emission_spectrum(EmitterParams(delta), OFF, GRID)
    assert abs(curve.abscissa[np.argmax(curve.values)] - delta) <= GRID.step
    assert fwhm(curve) == pytest.approx(2.0, rel=0.1)


def test_free_spectrum_symmetric_about_detuning():
    curve = emission_spectrum(EmitterParams(3.0), OFF, GRID)
    x = curve.abscissa
    for offset in np.arange(0.0, 6.0 + 1e-9, GRID.step):
        assert abs(np.interp(3 + offset, x, curve.values)
                   - np.interp(3 - offset, x, curve.values)) < 1e-3


@pytest.mark.parametrize("delta", [-4.0, -2.0, 2.0, 3.0])
@pytest.mark.parametrize("conv", ["excited", "as_published"])
def test_pulsed_spectrum_central_peak_and_satellites(delta, conv):
    curve = emission_spectrum(EmitterParams(delta), TRAIN, GRID, conv=conv)
    assert abs(curve.abscissa[np.argmax(curve.values)]) <= GRID.step
    maxima = local_maxima(curve)
    for target in (math.pi / 0.2, -math.pi / 0.2):
        assert np.min(np.abs(maxima - target)) <= GRID.step


def test_pulsed_peak_positions_independent_of_detuning():
    positions = []
    for delta in (-4.0, -2.0, 2.0, 3.0):
        curve = emission_spectrum(EmitterParams(delta), TRAIN, GRID)
        maxima = local_maxima(curve)
        strong = maxima[[curve.at(x) > 0.05 for x in maxima]]
        positions.append(strong)
    for other in positions[1:]:
        assert other.shape == positions[0].shape
        assert np.max(np.abs(other - positions[0])) <= GRID.step


@pytest.mark.parametrize("train", [OFF, TRAIN])
def test_normalised_and_non_negative(train):
    curve = emission_spectrum(EmitterParams(-2.0), train, SpectrumGrid(-30, 30, 301))
    assert curve.values.max() == pytest.approx(1.0, abs=1e-15)
    assert np.all(curve.values >= 0)


def test_theta_grid_is_pulse_aligned():
    thetas, _ = time_integrated_coherence(EmitterParams(3.0), PulseTrain(0.3), 2.0,
                                          steps_per_unit=7)
    for k in range(1, 7):
        assert np.min(np.abs(thetas - 0.3 * k)) < 1e-12
    assert thetas[-1] == pytest.approx(2.0)


def test_rejects_bad_horizon():
    with pytest.raises(ValueError):
        emission_spectrum(EmitterParams(3.0), OFF, GRID, T=0.0)


def test_normalisation_failure_is_flagged(monkeypatch):
    import hom_pulse.spectrum as spectrum
    monkeypatch.setattr(spectrum, "g_closed", lambda t, theta, *a: np.zeros_like(t, complex))
    with pytest.raises(NumericFailure):
        emission_spectrum(EmitterParams(0.0), OFF, GRID)
