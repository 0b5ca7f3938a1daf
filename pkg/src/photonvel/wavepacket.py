"""Polychromatic packets built from paraxial beams with a common Rayleigh range.

Frequencies follow the Poisson-like spectrum omega^s exp(-s omega/omega0); each
frequency component is a Gaussian (or Laguerre-Gauss) beam whose waist
w0(omega) = sqrt(2 z_R c / omega) keeps z_R fixed. Units: k0 = omega0/c = 1.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from .beams import BeamParams, FieldSlice, eval_beam
from .errors import DegenerateError, InvalidArgumentError, TruncationError
from .numerics import CylGrid, integrate_grid
from .spectra import FrequencySpectrum, ParaxialityWarning, SpectralModel, poisson_nodes, radial_quadrature

LEAK_LIMIT = 1e-6
EDGE_FRACTION = 0.05


@dataclass(frozen=True)
class WavepacketSpec:
    """Packet parameters plus the sampling used to synthesise it in real space.

    ``z_halfwidth`` is the half-length of the z window around ct in units of
    the packet length scale sqrt(s)/k0. Low-frequency components lag and
    spread, so the trailing side is extended by ``lag_margin`` times the
    nominal retardation ct/(2 k0 z_R). ``r_factor`` sets the radial extent as a
    multiple of the widest beam radius w(z) inside the window.
    """

    z_R: float = 10.0
    s: float = 20.0
    M: int = 96
    omega0: float = 1.0
    l: int = 0
    p: int = 0
    n_r: int = 128
    n_z: int = 1024
    r_factor: float = 4.0
    z_halfwidth: float = 10.0
    lag_margin: float = 4.0
    times: tuple = field(default=None)

    def __post_init__(self):
        if not (self.z_R > 0 and self.s > 0 and self.omega0 > 0):
            raise InvalidArgumentError("z_R, s and omega0 must be positive")
        if self.M < 1 or self.n_r < 2 or self.n_z < 2:
            raise InvalidArgumentError("sample counts too small")
        if self.times is None:
            object.__setattr__(self, "times", tuple(j * self.z_R for j in range(7)))
        t = np.asarray(self.times, dtype=float)
        if np.any(np.diff(t) <= 0):
            raise InvalidArgumentError("times must be strictly increasing")

    @property
    def k0(self) -> float:
        return self.omega0

    @property
    def sigma_z(self) -> float:
        return math.sqrt(self.s) / self.k0

    @property
    def spectrum(self) -> FrequencySpectrum:
        return poisson_nodes(self.s, self.omega0, self.M)

    def waist(self, omega) -> float:
        return np.sqrt(2 * self.z_R / np.asarray(omega, dtype=float))

    def beam(self, omega: float) -> BeamParams:
        return BeamParams(k=float(omega), w0=float(self.waist(omega)), l=self.l, p=self.p)

    def transverse_model(self, omega: float) -> SpectralModel:
        kw0 = float(omega * self.waist(omega))
        if self.l == 0 and self.p == 0:
            return SpectralModel.gaussian(kw0, k=float(omega))
        return SpectralModel.laguerre_gauss(kw0, self.l, self.p, k=float(omega))

    def grid_at(self, t: float) -> CylGrid:
        half = self.z_halfwidth * self.sigma_z
        z_lo = t - half - self.lag_margin * abs(t) / (2 * self.k0 * self.z_R)
        z_hi = t + half
        zmax = max(abs(z_lo), abs(z_hi))
        w_ref = self.waist(self.omega0)
        r_max = self.r_factor * w_ref * math.sqrt(1 + (zmax / self.z_R) ** 2) * math.sqrt(1 + self.l**2 / 4 + self.p)
        return CylGrid.gauss_r2(r_max, self.n_r, z_lo, z_hi, self.n_z)

    def summary(self) -> dict:
        return {"k0zR": self.k0 * self.z_R, "s": self.s, "M": self.M, "l": self.l, "p": self.p,
                "k0w0": self.k0 * float(self.waist(self.omega0)), "n_r": self.n_r, "n_z": self.n_z}


def _beam_power(b: BeamParams) -> float:
    # l = 0 modes are normalised to psi(0) = 1, vortex modes to unit power
    return math.pi * b.w0**2 / 2 if b.l == 0 else 1.0


def synthesize(spec: WavepacketSpec, t: float, grid: CylGrid | None = None) -> FieldSlice:
    """psi(r_perp, z, t) = sum_m q_m A(omega_m) beam_m(r_perp, z) e^{-i omega_m t} at phi = 0.

    q_m A(omega_m) is the quadrature weight times the amplitude density, so the
    sum approximates the continuous frequency superposition. Raises
    TruncationError if more than 1e-6 of the norm sits at the window edges.
    """
    if grid is None:
        grid = spec.grid_at(t)
    sp = spec.spectrum
    coeff = np.sqrt(sp.weights) * sp.amplitudes if sp.M > 1 else np.ones(1)
    r = grid.r[:, None]
    z = grid.z[None, :]
    psi = np.zeros(grid.shape, dtype=complex)
    for c_m, om in zip(coeff, sp.nodes):
        if c_m == 0.0:
            continue
        psi += c_m * eval_beam(spec.beam(om), r, 0.0, z, t)
    slc = FieldSlice(coord=grid.r, z=grid.z, psi=psi, t=float(t), coord_name="r",
                     meta={**spec.summary(), "t": float(t)})
    if sp.M > 1:
        leak = edge_leak(slc, grid)
        if leak > LEAK_LIMIT:
            raise TruncationError(f"{leak:.2e} of the packet norm lies at the window edges")
    return slc


def edge_leak(slc: FieldSlice, grid: CylGrid) -> float:
    """Fraction of the norm in the outer 5% of the z window (both ends) and of the radius."""
    inten = slc.intensity
    total = integrate_grid(inten, grid)
    if total <= 0:
        raise DegenerateError("field has zero norm")
    z, r = grid.z, grid.r
    span = z[-1] - z[0]
    zmask = (z < z[0] + EDGE_FRACTION * span) | (z > z[-1] - EDGE_FRACTION * span)
    rmask = r > (1 - EDGE_FRACTION) * r[-1]
    edge = inten * (zmask[None, :] | rmask[:, None])
    return integrate_grid(edge, grid) / total


def probability_centroid(slc: FieldSlice, grid: CylGrid | None = None) -> float:
    """Z_c = int z |psi|^2 d^3r / int |psi|^2 d^3r over the sampled window."""
    if grid is None:
        grid = CylGrid(r=slc.coord, z=slc.z)
    inten = slc.intensity
    norm = integrate_grid(inten, grid)
    if not norm > 0:
        raise DegenerateError("field has zero norm")
    return integrate_grid(inten * grid.z[None, :], grid) / norm


def rms_length(slc: FieldSlice, grid: CylGrid | None = None) -> float:
    if grid is None:
        grid = CylGrid(r=slc.coord, z=slc.z)
    inten = slc.intensity
    norm = integrate_grid(inten, grid)
    zc = integrate_grid(inten * grid.z[None, :], grid) / norm
    return math.sqrt(integrate_grid(inten * (grid.z[None, :] - zc) ** 2, grid) / norm)


@dataclass(frozen=True)
class SpectralVelocities:
    """Centroid velocities of the packet from its momentum representation (units c)."""

    energy: float
    probability: float


def spectral_velocities(spec: WavepacketSpec) -> SpectralVelocities:
    """Energy- and probability-centroid velocities in momentum space.

    The spectral measure of frequency node m is a_m^2 P_m |psi_m(k_perp)|^2
    k_perp dk_perp with P_m the beam power, so that the monochromatic case
    reduces exactly to <k_z>/k. Energy centroid: int k_z / int omega.
    Probability centroid: int (k_z/omega) / int 1.
    """
    sp = spec.spectrum
    num_e = den_e = num_p = den_p = 0.0
    for a, om in zip(sp.amplitudes, sp.nodes):
        if a == 0.0:
            continue
        with warnings.catch_warnings():
            # far-tail nodes are non-paraxial but carry negligible weight
            warnings.simplefilter("ignore", ParaxialityWarning)
            rq = radial_quadrature(spec.transverse_model(om))
        mean_kz = float(np.dot(rq.weights, rq.kz) / rq.weights.sum())
        wgt = a * a * _beam_power(spec.beam(om))
        num_e += wgt * mean_kz
        den_e += wgt * om
        num_p += wgt * mean_kz / om
        den_p += wgt
    return SpectralVelocities(energy=num_e / den_e, probability=num_p / den_p)


def energy_centroid(spec: WavepacketSpec, t: float) -> float:
    """Z_E(t) from the momentum representation.

    The spectra are real up to e^{i l phi}, so Z_E(0) = 0 and the position
    expectation evolves only through the e^{-i omega t} phase:
    Z_E(t) = t <d omega/d k_z> with the omega-weighted measure.
    """
    return float(t) * spectral_velocities(spec).energy


@dataclass(frozen=True)
class CentroidTrace:
    t: np.ndarray
    Z_c: np.ndarray
    Z_E: np.ndarray
    theory_slope: float
    meta: dict = field(default_factory=dict)

    @property
    def ct(self) -> np.ndarray:
        return self.t  # c = 1

    @property
    def ret_prob(self) -> np.ndarray:
        return self.Z_c - self.ct

    @property
    def ret_energy(self) -> np.ndarray:
        return self.Z_E - self.ct

    @property
    def ret_theory(self) -> np.ndarray:
        return self.theory_slope * self.ct

    def slope(self, which: str = "prob") -> float:
        y = {"prob": self.ret_prob, "energy": self.ret_energy}[which]
        if not np.all(np.isfinite(y)):
            return math.nan
        return float(np.polyfit(self.ct, y, 1)[0])


def retardation_curve(spec: WavepacketSpec) -> CentroidTrace:
    """Probability and energy centroid retardations at ``spec.times``.

    With a single frequency node the real-space packet is an unbounded beam and
    has no probability centroid; Z_c is then reported as NaN.
    """
    t = np.asarray(spec.times, dtype=float)
    v_e = spectral_velocities(spec).energy
    if spec.M == 1:
        zc = np.full(t.shape, math.nan)
    else:
        zc = np.array([probability_centroid(synthesize(spec, ti), spec.grid_at(ti)) for ti in t])
    theory = -1.0 / (2 * spec.k0 * spec.z_R)
    return CentroidTrace(t=t, Z_c=zc, Z_E=v_e * t, theory_slope=theory, meta=spec.summary())


def packet_norm(slc: FieldSlice, grid: CylGrid | None = None) -> float:
    if grid is None:
        grid = CylGrid(r=slc.coord, z=slc.z)
    return integrate_grid(slc.intensity, grid)


def convergence_gate(spec: WavepacketSpec) -> dict:
    """Largest relative change of the probability retardations when M, n_r or n_z is doubled."""
    base = retardation_curve(spec)
    ref = base.ret_prob[1:]
    out = {}
    for name in ("M", "n_r", "n_z"):
        fine = retardation_curve(replace(spec, **{name: 2 * getattr(spec, name)}))
        out[name] = float(np.max(np.abs(fine.ret_prob[1:] - ref) / np.abs(ref)))
    return out
