"""Riemann-Silberstein description of the packets of :mod:`photonvel.emfield`.

F = (E + iH)/sqrt(2) obeys i dF/dt = c (S.p) F with the spin-1 matrices
(S_i)_jk = -i eps_ijk, so the velocity operator is c S. Plane-wave components
carry F~ = (E~ + iH~)/sqrt(2) and satisfy c (S.k) F~ = omega F~. hbar = c = 1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .emfield import EMSample, PlaneWaveSet, eval_fields, eval_on_grid, synthesize_em
from .errors import DegenerateError, InvalidArgumentError
from .numerics import CylGrid, integrate_grid
from .spectra import SpectralModel

# (S_i)_jk = -i eps_ijk
_EPS = np.zeros((3, 3, 3))
_EPS[0, 1, 2] = _EPS[1, 2, 0] = _EPS[2, 0, 1] = 1.0
_EPS[0, 2, 1] = _EPS[2, 1, 0] = _EPS[1, 0, 2] = -1.0
SPIN = -1j * _EPS
SPIN.setflags(write=False)

EIGEN_TOL = 1e-12


@dataclass(frozen=True)
class SpinMatrices:
    x: np.ndarray
    y: np.ndarray
    z: np.ndarray

    @classmethod
    def standard(cls) -> "SpinMatrices":
        return cls(SPIN[0].copy(), SPIN[1].copy(), SPIN[2].copy())

    def as_array(self) -> np.ndarray:
        return np.stack([self.x, self.y, self.z])

    def along(self, n) -> np.ndarray:
        """S.n for a 3-vector n (or a stack of them, giving (..., 3, 3))."""
        return np.tensordot(np.asarray(n, dtype=float), self.as_array(), axes=(-1, 0))

    def commutator_residual(self) -> float:
        """max |[S_i, S_j] - i eps_ijk S_k| over all index pairs."""
        S = self.as_array()
        worst = 0.0
        for i in range(3):
            for j in range(3):
                lhs = S[i] @ S[j] - S[j] @ S[i]
                rhs = 1j * np.tensordot(_EPS[i, j], S, axes=(0, 0))
                worst = max(worst, float(np.max(np.abs(lhs - rhs))))
        return worst

    def cube_residual(self, n) -> float:
        """max |(S.n)^3 - S.n| for a unit vector n."""
        n = np.asarray(n, dtype=float)
        Sn = self.along(n / np.linalg.norm(n))
        return float(np.max(np.abs(Sn @ Sn @ Sn - Sn)))

    def hermiticity_residual(self) -> float:
        return max(float(np.max(np.abs(m - m.conj().T))) for m in (self.x, self.y, self.z))


def hamiltonian_apply(F, k) -> np.ndarray:
    """c (S.k) F, which equals i k x F; broadcasts over leading axes."""
    F = np.asarray(F, dtype=complex)
    k = np.asarray(k, dtype=float)
    Sk = np.tensordot(k, SPIN, axes=(-1, 0))
    return np.einsum("...jk,...k->...j", Sk, F)


def eigen_residual(F, k) -> np.ndarray:
    """||c (S.k) F - omega F|| / ||F|| per component, omega = c|k|."""
    F = np.asarray(F, dtype=complex)
    k = np.asarray(k, dtype=float)
    omega = np.linalg.norm(k, axis=-1)
    diff = hamiltonian_apply(F, k) - omega[..., None] * F
    return np.linalg.norm(diff, axis=-1) / np.linalg.norm(F, axis=-1)


def rs_vector(E, H) -> np.ndarray:
    return (np.asarray(E) + 1j * np.asarray(H)) / math.sqrt(2)


def spin_density(F) -> np.ndarray:
    """F* . S F = Im(F* x F)."""
    F = np.asarray(F, dtype=complex)
    return np.cross(F.conj(), F).imag


@dataclass(frozen=True)
class RSSpectralField:
    """Per-component F~ (spectral density), wavevector, frequency and k-space weight."""

    F: np.ndarray
    k: np.ndarray
    omega: np.ndarray
    weight: np.ndarray
    source: PlaneWaveSet | None = None

    @classmethod
    def from_plane_waves(cls, pws: PlaneWaveSet) -> "RSSpectralField":
        F = rs_vector(pws.E_density, pws.H_density)
        return cls(F=F, k=pws.k, omega=pws.omega, weight=pws.dV, source=pws)

    @property
    def khat(self) -> np.ndarray:
        return self.k / self.omega[:, None]

    @property
    def intensity(self) -> np.ndarray:
        return np.sum(np.abs(self.F) ** 2, axis=1)

    def norm(self) -> float:
        n = float(np.dot(self.weight, self.intensity))
        if not n > 0:
            raise DegenerateError("field has zero norm")
        return n

    def transversality_residual(self) -> float:
        return float(np.max(np.abs(np.sum(self.k * self.F, axis=1)) / (self.omega * np.sqrt(self.intensity))))


def spin_expectation(field: RSSpectralField, grid: CylGrid | None = None, t: float = 0.0) -> np.ndarray:
    """<v> = c <S>.

    With a grid: c Im int F* x F / int |F|^2 with F built from the real
    instantaneous fields on that grid. Without: the momentum form
    sum w (k/k)|F~|^2 / sum w |F~|^2.
    """
    if grid is None:
        return (field.weight * field.intensity) @ field.khat / field.norm()
    if field.source is None:
        raise InvalidArgumentError("real-space expectation needs the generating plane-wave set")
    E, H = eval_on_grid(field.source, grid, t)
    F = rs_vector(E.real, H.real)
    num = np.asarray(integrate_grid(spin_density(F), grid))
    den = integrate_grid(np.sum(np.abs(F) ** 2, axis=-1), grid)
    if not den > 0:
        raise DegenerateError("field has zero norm on the grid")
    return num / den


def primed_velocity_expectation(field: RSSpectralField) -> np.ndarray:
    """<v'> with v' = c khat (khat.S) per component."""
    Sk = np.tensordot(field.khat, SPIN, axes=(-1, 0))
    proj = np.einsum("nj,njk,nk->n", field.F.conj(), Sk, field.F).real
    return (field.weight * proj) @ field.khat / field.norm()


def velocity_operators(khat) -> tuple[np.ndarray, np.ndarray]:
    """Matrices of v = c S and v' = c khat (khat.S) for one direction, shape (3, 3, 3)."""
    khat = np.asarray(khat, dtype=float)
    Sk = np.tensordot(khat, SPIN, axes=(0, 0))
    return SPIN.copy(), khat[:, None, None] * Sk[None]


def momentum_velocity_v1(field: RSSpectralField) -> float:
    """v_P1,z = sum w omega |F~|^2 / sum w k_z |F~|^2."""
    wi = field.weight * field.intensity
    den = float(np.dot(wi, field.k[:, 2]))
    if den <= 0:
        raise DegenerateError("mean longitudinal momentum is not positive")
    return float(np.dot(wi, field.omega)) / den


def momentum_velocity_proper(field: RSSpectralField) -> float:
    """v_P,z = c sum w |F~|^2 / sum w (k_z/k) |F~|^2, so that v_P <v_z> = c^2."""
    wi = field.weight * field.intensity
    den = float(np.dot(wi, field.khat[:, 2]))
    if den <= 0:
        raise DegenerateError("mean spin projection is not positive")
    return float(wi.sum()) / den


@dataclass(frozen=True)
class PhotonWavefunction:
    psi: np.ndarray
    k: np.ndarray
    omega: np.ndarray
    weight: np.ndarray

    @property
    def probability(self) -> np.ndarray:
        return self.weight * np.sum(np.abs(self.psi) ** 2, axis=1)

    def energy(self) -> float:
        return float(np.dot(self.probability, self.omega))

    def group_velocity(self) -> float:
        """Energy-centroid form: sum k_z |psi|^2 / sum omega |psi|^2."""
        return float(np.dot(self.probability, self.k[:, 2])) / self.energy()

    def phase_velocity(self) -> float:
        """sum omega |psi|^2 / sum k_z |psi|^2."""
        return self.energy() / float(np.dot(self.probability, self.k[:, 2]))

    def v1_velocity(self) -> float:
        """sum omega^2 |psi|^2 / sum omega k_z |psi|^2 (v_P1 rewritten for psi)."""
        p = self.probability
        return float(np.dot(p, self.omega**2)) / float(np.dot(p, self.omega * self.k[:, 2]))


def to_photon_wavefunction(field: RSSpectralField) -> PhotonWavefunction:
    if np.any(field.omega <= 0):
        raise InvalidArgumentError("photon wavefunction needs positive frequencies")
    return PhotonWavefunction(psi=field.F / np.sqrt(field.omega)[:, None], k=field.k, omega=field.omega,
                              weight=field.weight)


def rp_expectation(field: RSSpectralField, t: float) -> float:
    """<r.p>(t) in the momentum representation with r = i grad_k.

    The spectra depend on |k| only through real magnitudes and their phases only
    on the direction of k, so k.grad_k of the phase is -omega t and the static
    part is zero.
    """
    wi = field.weight * field.intensity
    return float(t) * float(np.dot(wi, field.omega)) / field.norm()


def rp_product_rate(field: RSSpectralField, t: float = 0.0, dt: float | None = None) -> tuple[float, float]:
    """(finite-difference d<r.p>/dt, <H>); the two agree identically.

    ``dt`` defaults to 0.01/<omega> and may not exceed it.
    """
    wi = field.weight * field.intensity
    mean_omega = float(np.dot(wi, field.omega)) / field.norm()
    limit = 0.01 / mean_omega
    if dt is None:
        dt = limit
    if not 0 < dt <= limit * (1 + 1e-12):
        raise InvalidArgumentError("time step must lie in (0, 0.01/<omega>]")
    rate = (rp_expectation(field, t + dt) - rp_expectation(field, t - dt)) / (2 * dt)
    return rate, mean_omega


def identity_sweep(pws: PlaneWaveSet, n: int = 1000, seed: int = 0, scale: float = 10.0,
                   n_times: int = 10) -> float:
    """max |Im(F* x F) - E x H| / |F|^2 over n random space-time points.

    F = (E + iH)/sqrt(2) is built from the real fields; points are drawn in
    ``n_times`` batches that share a random time.
    """
    rng = np.random.default_rng(seed)
    worst = 0.0
    for batch in np.array_split(np.arange(n), n_times):
        if batch.size == 0:
            continue
        t = float(rng.uniform(-scale, scale))
        pts = rng.normal(scale=scale, size=(batch.size, 3))
        pts[:, 2] += t
        s: EMSample = eval_fields(pws, pts, t)
        e, h = s.E_real, s.H_real
        F = rs_vector(e, h)
        res = np.linalg.norm(spin_density(F) - np.cross(e, h), axis=-1)
        res /= np.maximum(np.sum(np.abs(F) ** 2, axis=-1), 1e-300)
        worst = max(worst, float(res.max()))
    return worst


# -- two-frequency demonstration fixture ------------------------------------

def _rms_polar_angle(model: SpectralModel, **kw) -> float:
    f = RSSpectralField.from_plane_waves(synthesize_em(model, n_omega=1, **kw))
    theta = np.arccos(np.clip(f.khat[:, 2], -1, 1))
    wi = f.weight * f.intensity
    return math.sqrt(float(np.dot(wi, theta**2) / wi.sum()))


def gaussian_with_rms_angle(omega: float, theta_rms: float, **kw) -> SpectralModel:
    """Gaussian spectrum at frequency omega whose sampled rms polar angle is theta_rms."""
    target = lambda kw0: _rms_polar_angle(SpectralModel.gaussian(kw0, k=omega), **kw) - theta_rms
    guess = math.sqrt(2) / theta_rms
    kw0 = brentq(target, 0.5 * guess, 2 * guess, xtol=1e-13, rtol=1e-14)
    return SpectralModel.gaussian(kw0, k=omega)


def two_frequency_fixture(omega1: float = 1.0, theta1: float = 0.2, theta2: float = 0.05,
                          n_kperp: int = 64, n_phi: int = 16) -> RSSpectralField:
    """Groups at omega1 and 2 omega1 with rms polar angles theta1, theta2 and equal total |F~|^2."""
    sets = []
    for om, th in ((omega1, theta1), (2 * omega1, theta2)):
        model = gaussian_with_rms_angle(om, th, n_kperp=n_kperp, n_phi=n_phi)
        pws = synthesize_em(model, n_omega=1, n_kperp=n_kperp, n_phi=n_phi)
        f = RSSpectralField.from_plane_waves(pws)
        sets.append(pws.scaled(1 / math.sqrt(f.norm())))
    joined = sets[0].union(sets[1])
    return RSSpectralField.from_plane_waves(joined)


def rs_report(field: RSSpectralField) -> dict:
    """Velocities and operator checks with a method tag on every number."""
    spin = spin_expectation(field)
    wf = to_photon_wavefunction(field)
    out = {
        "spin_expectation_z": (float(spin[2]), "momentum-space"),
        "primed_velocity_z": (float(primed_velocity_expectation(field)[2]), "momentum-space"),
        "momentum_velocity_v1": (momentum_velocity_v1(field), "momentum-space"),
        "momentum_velocity_proper": (momentum_velocity_proper(field), "momentum-space"),
        "wavefunction_group_velocity": (wf.group_velocity(), "photon-wavefunction"),
        "wavefunction_phase_velocity": (wf.phase_velocity(), "photon-wavefunction"),
        "eigen_residual_max": (float(np.max(eigen_residual(field.F, field.k))), "identity"),
        "commutator_residual": (SpinMatrices.standard().commutator_residual(), "identity"),
    }
    if field.source is not None:
        out["identity_sweep_max"] = (identity_sweep(field.source, n=200), "identity")
    return {k: {"value": v, "method": m} for k, (v, m) in out.items()}
