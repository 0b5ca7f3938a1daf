import math

import numpy as np
import pytest
from hypothesis import given
from scipy.optimize import brentq
from hypothesis import strategies as st

from photonvel.beams import (BeamParams, beam_power, default_phase_grid, eval_beam, local_wavenumber, mean_rperp2,
                             phase_decompose, phase_map, realspace_phase_velocity)
from photonvel.errors import InvalidArgumentError, ResolutionError
from photonvel.numerics import CylGrid
from photonvel.spectra import SpectralModel
from photonvel.velocimetry import phase_velocity


def test_focus_normalisation():
    assert eval_beam(BeamParams.from_kw0(5.0), 0.0, 0.0, 0.0) == 1.0


def test_rayleigh_plane_value():
    b = BeamParams.from_kw0(5.0)
    want = np.exp(1j * (b.k * b.z_R - math.pi / 4)) / math.sqrt(2)
    assert abs(eval_beam(b, 0.0, 0.0, b.z_R) - want) < 1e-14


@given(z=st.floats(-100, 100))
def test_vortex_null_on_axis(z):
    assert eval_beam(BeamParams.from_kw0(10.0, l=1), 0.0, 0.3, z) == 0


def test_decompose_at_focus():
    assert phase_decompose(BeamParams.from_kw0(5.0), 1.7, 0.0) == (0.0, 0.0, 0.0)


def test_on_axis_local_wavenumber():
    b = BeamParams.from_kw0(5.0)
    assert local_wavenumber(b, 0.0, 0.0) == pytest.approx(b.k - 1 / b.z_R, rel=1e-15)


def test_curvature_average_small_z():
    b = BeamParams.from_kw0(10.0)
    z = 1e-3 * b.z_R
    r = np.linspace(0, 6 * b.w0, 20001)
    w = r * np.exp(-2 * r**2 / b.w0**2)
    _, curv, _ = phase_decompose(b, r, z)
    assert np.sum(w * curv) / np.sum(w) == pytest.approx(z / (2 * b.z_R), rel=1e-5)


@given(kw0=st.floats(3, 60), l=st.integers(-4, 4), p=st.integers(0, 3),
       r=st.floats(0, 3), phi=st.floats(0, 2 * math.pi), z=st.floats(-3, 3), t=st.floats(-50, 50))
def test_phase_consistency(kw0, l, p, r, phi, z, t):
    b = BeamParams.from_kw0(kw0, l=l, p=p)
    rr, zz = r * b.w0, z * b.z_R
    psi = eval_beam(b, rr, phi, zz, t)
    if abs(psi) < 1e-200:
        return
    total = sum(phase_decompose(b, rr, zz)) + l * phi - b.omega * t
    sign = 1.0 if np.real(psi * np.exp(-1j * total)) > 0 else -1.0
    diff = np.angle(sign * psi * np.exp(-1j * total))
    assert abs(diff) < 1e-10 * max(1.0, abs(total))


@pytest.mark.parametrize("l, p, n1", [(0, 0, 1), (1, 0, 2), (4, 0, 5), (2, 1, 5)])
def test_mean_rperp2(l, p, n1):
    b = BeamParams.from_kw0(10.0, l=l, p=p)
    assert mean_rperp2(b) == pytest.approx(n1 * b.w0**2 / 2, rel=1e-8)


def test_realspace_phase_velocity_values():
    assert realspace_phase_velocity(BeamParams.from_kw0(5.0)) == pytest.approx(1.04, abs=0.005)
    assert realspace_phase_velocity(BeamParams.from_kw0(1e4)) == pytest.approx(1.0, abs=1e-7)
    assert realspace_phase_velocity(BeamParams.from_kw0(10.0, l=2)) == pytest.approx(1.03, abs=0.003)


@given(kw0=st.floats(5, 200))
def test_realspace_vs_momentum_phase_velocity(kw0):
    rs = realspace_phase_velocity(BeamParams.from_kw0(kw0))
    ms = phase_velocity(SpectralModel.gaussian(kw0))
    assert abs(rs - ms) <= 5 / kw0**4


@given(kw0=st.floats(5, 40), l=st.integers(0, 3), p=st.integers(0, 2), z=st.floats(-3, 3))
def test_power_conserved(kw0, l, p, z):
    b = BeamParams.from_kw0(kw0, l=l, p=p)
    assert beam_power(b, z * b.z_R) == pytest.approx(beam_power(b, 0.0), rel=1e-6)


def test_invalid_params():
    with pytest.raises(InvalidArgumentError):
        BeamParams(k=1.0, w0=0.0)


def test_phase_map_gaussian_kw0_5():
    b = BeamParams.from_kw0(5.0)
    pm = phase_map(b)
    assert pm.mean_spacing_ratio() == pytest.approx(1.04, abs=1.04 * 0.005)
    assert pm.crossing_spacing_ratio() == pytest.approx(1.04, abs=1.04 * 0.005)
    axis = int(np.argmin(np.abs(pm.x)))
    zc = pm.wavefronts[axis]
    i = int(np.argmin(np.abs(zc)))
    spacing = 0.5 * (zc[i + 1] - zc[i - 1])
    # exact secant from the on-axis phase k z - arctan(z / z_R), crossings at 2 pi n
    phase = lambda z, n: b.k * z - math.atan(z / b.z_R) - 2 * math.pi * n
    lo, hi = (brentq(phase, -20, 20, args=(n,)) for n in (-1, 1))
    assert spacing == pytest.approx(0.5 * (hi - lo), rel=1e-4)
    assert spacing == pytest.approx(2 * math.pi / (b.k - 1 / b.z_R), rel=0.01)
    assert pm.on_axis_local_wavenumber() == pytest.approx(b.k - 1 / b.z_R, rel=1e-3)


def test_phase_map_plane_reference():
    pm = phase_map(BeamParams.from_kw0(5.0))
    assert pm.plane_wave_spacing() == pytest.approx(2 * math.pi, rel=1e-12)


@pytest.mark.parametrize("kw0", [4.0, 5.0, 8.0, 15.0, 30.0])
def test_wavefronts_spread(kw0):
    assert phase_map(BeamParams.from_kw0(kw0)).mean_spacing_ratio() > 1.0


def test_phase_map_vortex_core():
    pm = phase_map(BeamParams.from_kw0(5.0, l=3))
    axis = int(np.argmin(np.abs(pm.x)))
    assert np.max(pm.field.intensity[axis]) < 1e-20
    with pytest.raises(ResolutionError):
        pm.on_axis_local_wavenumber()


def test_phase_map_coarse_grid_rejected():
    b = BeamParams.from_kw0(5.0)
    with pytest.raises(ResolutionError):
        phase_map(b, CylGrid.uniform(3 * b.w0, 33, -2 * b.z_R, 2 * b.z_R, 21))


def test_default_grid_samples_focus():
    g = default_phase_grid(BeamParams.from_kw0(5.0))
    assert np.min(np.abs(g.z)) == 0.0
