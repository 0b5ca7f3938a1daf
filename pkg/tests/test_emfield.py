import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from photonvel.beams import BeamParams, eval_beam
from photonvel.emfield import (EMSample, PlaneWaveSet, boost_momentum, conservation_audit, default_grid, divergence,
                               energy_momentum_densities, energy_velocity, eval_fields, eval_on_grid,
                               momentum_velocity, null_inequality_margin, rotate_from_z, synthesize_em)
from photonvel.errors import InvalidArgumentError, OutOfDomainError, TruncationError
from photonvel.numerics import CylGrid
from photonvel.spectra import SpectralModel
from photonvel.velocimetry import group_velocity

Z_R = 50.0  # kw0 = 10


@pytest.fixture(scope="module")
def plane():
    return synthesize_em(SpectralModel.plane_wave())


def test_plane_wave_triad(plane):
    assert plane.n == 1
    assert np.array_equal(plane.E[0], [1, 0, 0])
    assert np.array_equal(plane.H[0], [0, 1, 0])


def test_transversality(gaussian_em):
    e = np.linalg.norm(gaussian_em.E, axis=1)
    assert np.all(np.abs(np.sum(gaussian_em.khat * gaussian_em.E, axis=1)) < 1e-14 * e)
    assert np.allclose(gaussian_em.H, np.cross(gaussian_em.khat, gaussian_em.E), atol=1e-16)


@given(theta=st.floats(0, 3.0), phi=st.floats(0, 2 * math.pi))
def test_minimal_rotation(theta, phi):
    khat = np.array([math.sin(theta) * math.cos(phi), math.sin(theta) * math.sin(phi), math.cos(theta)])
    R = np.stack([rotate_from_z(khat, e)[0] for e in np.eye(3)], axis=1).real
    assert np.allclose(R @ R.T, np.eye(3), atol=1e-12)
    assert np.allclose(R @ [0, 0, 1], khat, atol=1e-12)


def test_antiparallel_rejected():
    with pytest.raises(OutOfDomainError):
        rotate_from_z(np.array([0.0, 0.0, -1.0]), np.array([1.0, 0, 0]))


def test_focal_profile_matches_scalar_beam():
    pws = synthesize_em(SpectralModel.gaussian(10.0), n_kperp=64, n_phi=16, n_omega=1)
    b = BeamParams.from_kw0(10.0)
    s = np.linspace(0, 2.5 * b.w0, 26)
    ref = np.abs(eval_beam(b, s, 0.0, 0.0)) ** 2
    for axis in (0, 1):
        pts = np.zeros((s.size, 3))
        pts[:, axis] = s
        e2 = np.sum(np.abs(eval_fields(pws, pts, 0.0).E) ** 2, axis=1)
        assert np.max(np.abs(e2 / e2[0] - ref)) < 0.02


def test_plane_wave_constant_magnitude(plane, rng):
    pts = rng.normal(scale=20, size=(50, 3))
    for t in (0.0, 3.3, -17.0):
        e = np.linalg.norm(eval_fields(plane, pts, t).E, axis=1)
        assert np.allclose(e, 1.0, atol=1e-14)


def test_counterphased_null():
    th = 0.3
    k = [[math.sin(th), 0, math.cos(th)], [-math.sin(th), 0, math.cos(th)]]
    pws = PlaneWaveSet.from_components(k, [[0, 1, 0], [0, -1, 0]])
    pts = np.column_stack([np.zeros(20), np.linspace(-5, 5, 20), np.linspace(-7, 9, 20)])
    assert np.max(np.abs(eval_fields(pws, pts, 1.7).E)) < 1e-15


@given(a=st.complex_numbers(max_magnitude=5, allow_nan=False, allow_infinity=False),
       b=st.complex_numbers(max_magnitude=5, allow_nan=False, allow_infinity=False),
       seed=st.integers(0, 2**16))
def test_linearity(a, b, seed):
    rng = np.random.default_rng(seed)
    A = PlaneWaveSet.from_components(rng.normal(size=(6, 3)), rng.normal(size=(6, 3)) + 1j * rng.normal(size=(6, 3)))
    B = PlaneWaveSet.from_components(rng.normal(size=(5, 3)), rng.normal(size=(5, 3)) + 1j * rng.normal(size=(5, 3)))
    pts = rng.normal(scale=3, size=(8, 3))
    lhs = eval_fields(A.scaled(a).union(B.scaled(b)), pts, 0.4).E
    rhs = a * eval_fields(A, pts, 0.4).E + b * eval_fields(B, pts, 0.4).E
    scale = 1 + (abs(a) + abs(b)) * 20
    assert np.max(np.abs(lhs - rhs)) <= 1e-14 * scale


def test_plane_wave_densities(plane):
    U, P = energy_momentum_densities(eval_fields(plane, np.zeros((1, 3)), 0.0))
    assert U[0] == pytest.approx(1.0, abs=1e-15)
    assert np.allclose(P[0], [0, 0, 1], atol=1e-15)


def test_parallel_fields_carry_no_momentum():
    v = np.array([[0.3, -1.2, 0.5]])
    U, P = energy_momentum_densities(EMSample(r=np.zeros((1, 3)), t=0.0, E=v + 0j, H=2 * v + 0j))
    assert U[0] > 0 and np.allclose(P, 0)


def test_circular_plane_wave_is_null():
    pws = synthesize_em(SpectralModel.plane_wave(), polarization="circular")
    pts = np.random.default_rng(0).normal(size=(100, 3))
    U, P = energy_momentum_densities(eval_fields(pws, pts, 0.7))
    assert np.allclose(np.linalg.norm(P, axis=1), U, rtol=1e-14)


@given(seed=st.integers(0, 2**16), n=st.integers(1, 12))
def test_null_inequality_random_superpositions(seed, n):
    rng = np.random.default_rng(seed)
    pws = PlaneWaveSet.from_components(rng.normal(size=(n, 3)), rng.normal(size=(n, 3)) + 1j * rng.normal(size=(n, 3)))
    U, P = energy_momentum_densities(eval_fields(pws, rng.normal(scale=5, size=(10**4, 3)), float(rng.normal())))
    assert null_inequality_margin(U, P) <= 0.0


def test_null_inequality_on_packet_grid(gaussian_em):
    grid = default_grid(gaussian_em, 0.0)
    E, H = eval_on_grid(gaussian_em, grid, 0.0)
    U, P = energy_momentum_densities(EMSample(r=np.zeros(3), t=0.0, E=E, H=H))
    assert U.size >= 10**4
    assert null_inequality_margin(U, P) <= 0.0


def test_grid_path_matches_direct_sum(gaussian_em):
    grid = CylGrid.gauss_r2(20.0, 6, -10.0, 10.0, 8, n_phi=16)
    E, _ = eval_on_grid(gaussian_em, grid, 3.0)
    x, y, z = grid.points()
    direct = eval_fields(gaussian_em, np.stack([x, y, z], axis=-1), 3.0).E
    assert np.max(np.abs(E - direct)) < 1e-12 * np.max(np.abs(direct))


def test_plane_wave_velocities(plane):
    assert np.allclose(energy_velocity(plane), [0, 0, 1], atol=1e-14)
    mv = momentum_velocity(plane)
    assert mv.direct == pytest.approx(1.0, abs=1e-14)


def test_unconfined_set_rejected():
    pws = synthesize_em(SpectralModel.gaussian(10.0), n_omega=1, n_kperp=8, n_phi=8)
    with pytest.raises(InvalidArgumentError):
        default_grid(pws, 0.0)


def test_energy_velocity_packet(gaussian_em):
    vg = group_velocity(SpectralModel.gaussian(10.0))
    v0 = energy_velocity(gaussian_em, 0.0)
    assert v0[2] == pytest.approx(0.99, abs=0.01)
    assert v0[2] == pytest.approx(vg, rel=0.01)
    assert np.linalg.norm(v0[:2]) < 1e-10
    assert abs(energy_velocity(gaussian_em, Z_R)[2] - v0[2]) < 1e-6


def test_energy_matches_spectral_total(gaussian_em):
    grid = default_grid(gaussian_em, 0.0)
    from photonvel.emfield import field_integrals
    u, _ = gaussian_em.spectral_totals()
    assert field_integrals(gaussian_em, grid, 0.0).energy == pytest.approx(u, rel=1e-6)


def test_momentum_velocity_routes(gaussian_em):
    mv = momentum_velocity(gaussian_em, 0.0)
    vE = energy_velocity(gaussian_em, 0.0)[2]
    assert abs(mv.direct * vE - 1) < 1e-10
    assert mv.virial == pytest.approx(mv.direct, rel=0.01)


def test_momentum_velocity_step_limit(gaussian_em):
    with pytest.raises(InvalidArgumentError):
        momentum_velocity(gaussian_em, 0.0, dt=0.1)


def test_boost_momentum_at_origin(gaussian_em):
    grid = default_grid(gaussian_em, 0.0)
    from photonvel.emfield import field_integrals
    fi = field_integrals(gaussian_em, grid, 0.0)
    B = boost_momentum(gaussian_em, 0.0, grid)
    assert B[2] == pytest.approx(fi.first_moment_U[2], rel=1e-15)
    assert np.max(np.abs(B[:2])) < 1e-8 * fi.energy


def test_truncated_window(gaussian_em):
    tight = default_grid(gaussian_em, 0.0, z_halfwidth=1.0)
    with pytest.raises(TruncationError):
        energy_velocity(gaussian_em, 0.0, tight)


def test_divergence_free(gaussian_em, rng):
    pts = rng.normal(scale=[6, 6, 20], size=(20, 3))
    div = divergence(gaussian_em, pts, 5.0)
    e = np.linalg.norm(eval_fields(gaussian_em, pts, 5.0).E, axis=1)
    assert np.all(np.abs(div) < 1e-8 * max(e.max(), 1e-300))


def test_audit_two_rayleigh_ranges(gaussian_em):
    audit = conservation_audit(gaussian_em, [0.0, Z_R, 2 * Z_R])
    assert all(ok for ok, _ in audit.checks().values())
    assert len(audit.rows()) == 3 and len(audit.rows()[0]) == 8


def test_audit_six_rayleigh_ranges_refined():
    pws = synthesize_em(SpectralModel.gaussian(10.0), n_kperp=128, n_phi=256)
    audit = conservation_audit(pws, [0.0, 6 * Z_R])
    assert audit.energy_drift < 1e-4
    assert audit.momentum_drift < 1e-4
    assert np.all(np.linalg.norm(audit.v_E, axis=1) < 1.0)


def test_audit_needs_times(gaussian_em):
    with pytest.raises(InvalidArgumentError):
        conservation_audit(gaussian_em, [0.0])
