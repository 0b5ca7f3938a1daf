"""Real-space Gaussian and Laguerre-Gauss beams, their phase anatomy and phase maps."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidArgumentError, ResolutionError
from .numerics import CylGrid, gauss_legendre, laguerre_poly, trapezoid_weights
from .spectra import PARAXIAL_KW0_MIN, ParaxialityWarning


@dataclass(frozen=True)
class BeamParams:
    k: float
    w0: float
    l: int = 0
    p: int = 0

    def __post_init__(self):
        if not (self.k > 0 and self.w0 > 0):
            raise InvalidArgumentError("k and w0 must be positive")
        if self.p < 0:
            raise InvalidArgumentError("radial index p must be non-negative")

    @classmethod
    def from_kw0(cls, kw0: float, l: int = 0, p: int = 0, k: float = 1.0) -> "BeamParams":
        return cls(k=k, w0=kw0 / k, l=l, p=p)

    @property
    def z_R(self) -> float:
        return self.k * self.w0**2 / 2

    @property
    def N(self) -> int:
        return abs(self.l) + 2 * self.p

    @property
    def omega(self) -> float:
        return self.k

    def w(self, z):
        return self.w0 * np.sqrt(1 + (np.asarray(z, dtype=float) / self.z_R) ** 2)

    @property
    def amplitude_scale(self) -> float:
        # l = 0 modes: psi(0, 0, 0) = 1; vortex modes: unit total power.
        if self.l == 0:
            return 1.0
        la = abs(self.l)
        return math.sqrt(2 * math.factorial(self.p) / (math.pi * self.w0**2 * math.factorial(self.p + la)))


def phase_decompose(params: BeamParams, r, z):
    """Split the beam phase into (plane k z, wavefront curvature, Gouy) parts.

    Together with l*phi - omega*t they sum to the full phase of :func:`eval_beam`.
    """
    r = np.asarray(r, dtype=float)
    z = np.asarray(z, dtype=float)
    zr = params.z_R
    plane = params.k * z
    curvature = params.k * r * r * z / (2 * (zr * zr + z * z))
    gouy = -(params.N + 1) * np.arctan(z / zr)
    return plane, curvature, gouy


def eval_beam(params: BeamParams, r, phi, z, t=0.0):
    """Complex scalar beam psi(r_perp, phi, z, t); arguments broadcast."""
    r = np.asarray(r, dtype=float)
    z = np.asarray(z, dtype=float)
    la = abs(params.l)
    w = params.w(z)
    x = r / w
    amp = params.amplitude_scale * (params.w0 / w) * np.exp(-x * x)
    if la:
        amp = amp * (math.sqrt(2) * x) ** la
    if params.p:
        amp = amp * laguerre_poly(params.p, la, 2 * x * x)
    plane, curv, gouy = phase_decompose(params, r, z)
    phase = plane + curv + gouy + params.l * np.asarray(phi, dtype=float) - params.omega * np.asarray(t, dtype=float)
    return amp * np.exp(1j * phase)


def local_wavenumber(params: BeamParams, r, z):
    """Analytic longitudinal phase gradient dPhi/dz at (r_perp, z)."""
    r = np.asarray(r, dtype=float)
    z = np.asarray(z, dtype=float)
    zr2 = params.z_R**2
    den = zr2 + z * z
    return params.k + params.k * r * r * (zr2 - z * z) / (2 * den * den) - (params.N + 1) * params.z_R / den


def _radial_rule(params: BeamParams, n: int):
    r_max = params.w0 * (6 + 2 * math.sqrt(params.N + 1))
    return gauss_legendre(n, 0.0, r_max)


def mean_rperp2(params: BeamParams, n: int = 256) -> float:
    """Intensity-weighted <r_perp^2> in the waist plane."""
    q = _radial_rule(params, n)
    inten = np.abs(eval_beam(params, q.nodes, 0.0, 0.0)) ** 2
    w = q.weights * q.nodes * inten
    return float(np.dot(w, q.nodes**2) / w.sum())


def beam_power(params: BeamParams, z: float, n: int = 256) -> float:
    """Transverse power 2 pi * int |psi|^2 r dr through the plane z."""
    r_max = float(params.w(z)) * (6 + 2 * math.sqrt(params.N + 1))
    q = gauss_legendre(n, 0.0, r_max)
    inten = np.abs(eval_beam(params, q.nodes, 0.0, z)) ** 2
    return float(2 * np.pi * np.dot(q.weights * q.nodes, inten))


def realspace_phase_velocity(params: BeamParams) -> float:
    """omega / (k + d<Phi_G + Phi_R>/dz at z = 0), in units of c.

    The curvature phase is averaged over the waist intensity, so its slope is
    k <r_perp^2> / (2 z_R^2); the Gouy slope is -(N + 1)/z_R.
    """
    if params.k * params.w0 < PARAXIAL_KW0_MIN:
        warnings.warn("real-space phase velocity used outside the paraxial regime", ParaxialityWarning, stacklevel=2)
    zr = params.z_R
    mean_k = params.k - (params.N + 1) / zr + params.k * mean_rperp2(params) / (2 * zr * zr)
    return params.omega / mean_k


# -- phase maps --------------------------------------------------------------

@dataclass(frozen=True)
class FieldSlice:
    """Complex field sampled on a (transverse coordinate, z) plane at time t."""

    coord: np.ndarray
    z: np.ndarray
    psi: np.ndarray
    t: float = 0.0
    coord_name: str = "x"
    meta: dict = field(default_factory=dict)

    @property
    def intensity(self) -> np.ndarray:
        return np.abs(self.psi) ** 2


@dataclass(frozen=True)
class PhaseMap:
    field: FieldSlice
    phase_mod_2pi: np.ndarray
    plane_phase_mod_2pi: np.ndarray
    unwrapped: np.ndarray  # NaN rows where the amplitude vanishes
    wavefronts: list  # per x: z positions where the unwrapped phase crosses 2 pi n
    params: BeamParams

    @property
    def x(self):
        return self.field.coord

    @property
    def z(self):
        return self.field.z

    def focal_index(self) -> int:
        return int(np.argmin(np.abs(self.z)))

    def numeric_local_wavenumber(self) -> np.ndarray:
        """Finite-difference dPhi/dz of the unwrapped phase, shape (n_x, n_z)."""
        return np.gradient(self.unwrapped, self.z, axis=1)

    def on_axis_local_wavenumber(self) -> float:
        i = int(np.argmin(np.abs(self.x)))
        if not np.all(np.isfinite(self.unwrapped[i])):
            raise ResolutionError("on-axis phase undefined (vortex core)")
        return float(self.numeric_local_wavenumber()[i, self.focal_index()])

    def _half_plane_weights(self):
        x = self.x
        pos = x >= 0
        xp = x[pos]
        inten = self.field.intensity[pos, self.focal_index()]
        w = trapezoid_weights(xp) * xp * inten
        ok = np.all(np.isfinite(self.unwrapped[pos]), axis=1)
        return pos, w * ok

    def mean_spacing_ratio(self) -> float:
        """Mean wavefront spacing in the focal plane over the plane-wave spacing 2 pi / k.

        Uses the intensity-weighted local wavenumber of the numerically
        unwrapped phase (x > 0 half-plane, cylindrical weight |x|).
        """
        pos, w = self._half_plane_weights()
        kloc = self.numeric_local_wavenumber()[pos, self.focal_index()]
        kloc = np.where(np.isfinite(kloc), kloc, 0.0)
        mean_k = float(np.dot(w, kloc) / w.sum())
        return self.params.k / mean_k

    def crossing_spacing_ratio(self) -> float:
        """Same average, but from the distance between the wavefront crossings around z = 0."""
        pos, w = self._half_plane_weights()
        spacings = np.array([_spacing_near_focus(zc) for zc, keep in zip(self.wavefronts, pos) if keep])
        good = np.isfinite(spacings)
        return float(np.dot(w[good], spacings[good]) / w[good].sum()) * self.params.k / (2 * np.pi)

    def plane_wave_spacing(self) -> float:
        """Spacing between zero-phase crossings of the plane-wave reference kz."""
        ph = self.params.k * self.z
        crossings = _crossings(ph, self.z)
        return float(np.mean(np.diff(crossings)))


def _crossings(phase_unwrapped: np.ndarray, z: np.ndarray) -> np.ndarray:
    lo = math.ceil(np.nanmin(phase_unwrapped) / (2 * np.pi))
    hi = math.floor(np.nanmax(phase_unwrapped) / (2 * np.pi))
    levels = 2 * np.pi * np.arange(lo, hi + 1)
    return np.interp(levels, phase_unwrapped, z)


def _spacing_near_focus(zc: np.ndarray) -> float:
    if zc.size < 3:
        return math.nan
    i = int(np.argmin(np.abs(zc)))
    i = min(max(i, 1), zc.size - 2)
    return 0.5 * (zc[i + 1] - zc[i - 1])


def default_phase_grid(params: BeamParams, x_extent: float = 3.0, z_extent: float = 2.0,
                       samples_per_wavelength: int = 16) -> CylGrid:
    """Grid spanning +-x_extent w0 and +-z_extent z_R with an odd z count (z = 0 sampled)."""
    z_max = z_extent * params.z_R
    dz = 2 * np.pi / params.k / samples_per_wavelength
    n_z = 2 * int(math.ceil(z_max / dz)) + 1
    n_r = 8 * int(math.ceil(x_extent * params.k * params.w0 / 2)) + 1
    return CylGrid.uniform(x_extent * params.w0, n_r, -z_max, z_max, n_z)


def phase_map(params: BeamParams, grid: CylGrid | None = None) -> PhaseMap:
    """Total phase of the beam on the (x, z) plane at t = 0, with wavefront positions.

    The r samples of ``grid`` are mirrored to x < 0 (phi = pi). Phase is
    unwrapped along z at fixed x starting from the focal plane.
    """
    if grid is None:
        grid = default_phase_grid(params)
    z = grid.z
    if z[0] >= 0 or z[-1] <= 0:
        raise InvalidArgumentError("phase map grid must span the focal plane")
    dz = np.diff(z)
    if np.max(dz) >= np.pi / (2 * params.k):
        raise ResolutionError(f"dz = {np.max(dz):.4g} too coarse; need dz < pi/(2k) = {np.pi / (2 * params.k):.4g}")
    r = grid.r
    x = np.concatenate([-r[::-1][: -1 if r[0] == 0 else None], r])
    phi = np.where(x < 0, np.pi, 0.0)
    psi = eval_beam(params, np.abs(x)[:, None], phi[:, None], z[None, :])
    wrapped = np.angle(psi)
    i0 = int(np.argmin(np.abs(z)))
    amp = np.abs(psi)
    dead = amp[:, i0] <= 1e-12 * amp.max()

    d = np.diff(wrapped, axis=1)
    d = (d + np.pi) % (2 * np.pi) - np.pi
    # genuine pi jumps occur at amplitude nodes; only flag jumps between bright samples
    bright = amp > 1e-3 * amp.max()
    live = (~dead)[:, None] & bright[:, 1:] & bright[:, :-1]
    if np.any(np.abs(d[live]) > 0.9 * np.pi):
        raise ResolutionError("phase jump near pi between adjacent z samples; refine the grid")
    unwrapped = np.empty_like(wrapped)
    unwrapped[:, i0] = wrapped[:, i0]
    unwrapped[:, i0 + 1:] = wrapped[:, i0:i0 + 1] + np.cumsum(d[:, i0:], axis=1)
    unwrapped[:, :i0] = wrapped[:, i0:i0 + 1] - np.cumsum(d[:, :i0][:, ::-1], axis=1)[:, ::-1]
    unwrapped[dead] = np.nan

    wavefronts = [np.array([]) if dead[i] else _crossings(unwrapped[i], z) for i in range(x.size)]
    meta = {"k": params.k, "w0": params.w0, "l": params.l, "p": params.p,
            "kw0": params.k * params.w0, "kzR": params.k * params.z_R}
    return PhaseMap(
        field=FieldSlice(coord=x, z=z, psi=psi, t=0.0, coord_name="x", meta=meta),
        phase_mod_2pi=np.mod(wrapped, 2 * np.pi),
        plane_phase_mod_2pi=np.broadcast_to(np.mod(params.k * z, 2 * np.pi), psi.shape),
        unwrapped=unwrapped,
        wavefronts=wavefronts,
        params=params,
    )
