"""Exact Maxwell vector packets as finite sets of plane waves.

Fields are positive-frequency analytic signals E = sum_j E_j exp(i(k_j.r - omega_j t))
with H_j = khat_j x E_j (c = 1, Gaussian-type units). Instantaneous real fields
Re[E], Re[H] are formed only where energy and momentum densities are needed:
U = (E^2 + H^2)/2 and P = E x H.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateError, InvalidArgumentError, OutOfDomainError, TruncationError
from .numerics import CylGrid, gauss_legendre, integrate_grid
from .spectra import PROPAGATING_FRACTION, Kind, SpectralModel, eval_radial_spectrum

LEAK_LIMIT = 1e-6
EDGE_FRACTION = 0.05
EM_AMPLITUDE_FLOOR = 1e-6
NULL_SLACK = 1e-12
_CHUNK = 4096


class Polarization(str, enum.Enum):
    X_LINEAR = "x-linear"
    CIRCULAR = "circular"

    @property
    def vector(self) -> np.ndarray:
        if self is Polarization.X_LINEAR:
            return np.array([1.0, 0.0, 0.0], dtype=complex)
        return np.array([1.0, 1j, 0.0]) / math.sqrt(2)


def rotate_from_z(khat: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Apply the minimal rotation taking z-hat to each row of ``khat`` to vector ``v``.

    R = I + [u]x + [u]x^2 / (1 + khat_z) with u = z-hat x khat.
    """
    khat = np.atleast_2d(khat)
    if np.any(khat[:, 2] <= -1 + 1e-12):
        raise OutOfDomainError("wavevector antiparallel to z has no minimal rotation")
    u = np.stack([-khat[:, 1], khat[:, 0], np.zeros(len(khat))], axis=-1)
    v = np.broadcast_to(np.asarray(v, dtype=complex), khat.shape)
    uv = np.cross(u, v)
    return v + uv + np.cross(u, uv) / (1 + khat[:, 2])[:, None]


@dataclass(frozen=True)
class Layout:
    """Tensor-product sampling (k_perp nodes x uniform azimuths x frequencies).

    Component j corresponds to the C-ordered index (i, a, m).
    """

    kperp: np.ndarray
    n_phi: int
    omegas: np.ndarray

    @property
    def phis(self) -> np.ndarray:
        return 2 * np.pi * np.arange(self.n_phi) / self.n_phi

    @property
    def shape(self) -> tuple[int, int, int]:
        return (self.kperp.size, self.n_phi, self.omegas.size)


@dataclass(frozen=True)
class PlaneWaveSet:
    """Finite set of Maxwellian plane waves.

    ``E`` and ``H`` hold the summation coefficients (spectral density times the
    3D k-space cell ``dV``), so fields are plain sums over components.
    """

    k: np.ndarray
    omega: np.ndarray
    E: np.ndarray
    H: np.ndarray
    dV: np.ndarray
    polarization: Polarization = Polarization.X_LINEAR
    layout: Layout | None = None
    length_scale: float = math.inf
    w0: float = math.inf
    z_R: float = math.inf
    excluded_mass: float = 0.0
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        for name in ("k", "E", "H"):
            arr = getattr(self, name)
            if arr.ndim != 2 or arr.shape[1] != 3:
                raise InvalidArgumentError(f"{name} must have shape (n, 3)")
        if not np.all(np.isfinite(self.E)) or not np.all(self.omega > 0):
            raise InvalidArgumentError("components need finite amplitudes and positive frequency")

    @classmethod
    def from_components(cls, k, E, dV=None, **kw) -> "PlaneWaveSet":
        """Build from wavevectors and electric amplitudes; H = khat x E.

        The longitudinal part of E is projected out so that k.E = 0 holds exactly.
        """
        k = np.atleast_2d(np.asarray(k, dtype=float))
        E = np.atleast_2d(np.asarray(E, dtype=complex))
        kn = np.linalg.norm(k, axis=1)
        if np.any(kn <= 0):
            raise InvalidArgumentError("wavevectors must be non-zero")
        khat = k / kn[:, None]
        E = E - khat * np.sum(khat * E, axis=1)[:, None]
        H = np.cross(khat, E)
        dV = np.ones(len(k)) if dV is None else np.asarray(dV, dtype=float)
        return cls(k=k, omega=kn, E=E, H=H, dV=dV, **kw)

    @property
    def n(self) -> int:
        return self.omega.size

    @property
    def khat(self) -> np.ndarray:
        return self.k / self.omega[:, None]

    @property
    def confined(self) -> bool:
        return math.isfinite(self.length_scale) and math.isfinite(self.w0)

    @property
    def E_density(self) -> np.ndarray:
        return self.E / self.dV[:, None]

    @property
    def H_density(self) -> np.ndarray:
        return self.H / self.dV[:, None]

    def spectral_energy_weights(self) -> np.ndarray:
        """|E~|^2 dV per component, the discrete energy measure."""
        return np.sum(np.abs(self.E) ** 2, axis=1) / self.dV

    def spectral_totals(self) -> tuple[float, np.ndarray]:
        """Total energy and momentum from the spectrum (Parseval), for comparison with real space."""
        w = self.spectral_energy_weights() * (2 * np.pi) ** 3 / 2
        return float(w.sum()), w @ self.khat

    def spectral_energy_velocity(self) -> np.ndarray:
        u, p = self.spectral_totals()
        return p / u

    def scaled(self, alpha: complex) -> "PlaneWaveSet":
        return PlaneWaveSet(k=self.k, omega=self.omega, E=alpha * self.E, H=alpha * self.H, dV=self.dV,
                            polarization=self.polarization)

    def union(self, other: "PlaneWaveSet") -> "PlaneWaveSet":
        return PlaneWaveSet(k=np.vstack([self.k, other.k]), omega=np.concatenate([self.omega, other.omega]),
                            E=np.vstack([self.E, other.E]), H=np.vstack([self.H, other.H]),
                            dV=np.concatenate([self.dV, other.dV]), polarization=self.polarization)


def _angular_support(model: SpectralModel, floor: float) -> tuple[float, float]:
    """Range of k_perp/k over which |psi| >= floor * peak (capped at the propagating limit)."""
    kp = np.linspace(0.0, PROPAGATING_FRACTION * model.k, 20001)
    a = np.abs(eval_radial_spectrum(model, kp))
    keep = np.nonzero(a >= floor * a.max())[0]
    return float(kp[keep[0]]) / model.k, float(kp[keep[-1]]) / model.k


def _angular_tail(model: SpectralModel, u_cut: float) -> float:
    """Fraction of the |psi|^2 k_perp dk_perp measure above k_perp = u_cut * k."""
    q = gauss_legendre(256, 0.0, PROPAGATING_FRACTION * model.k)
    w = q.weights * q.nodes * np.abs(eval_radial_spectrum(model, q.nodes)) ** 2
    return float(w[q.nodes > u_cut * model.k].sum() / w.sum())


def synthesize_em(model: SpectralModel, polarization: Polarization | str = Polarization.X_LINEAR,
                  n_kperp: int = 48, n_phi: int = 128, n_omega: int = 17, bandwidth: float = 0.035) -> PlaneWaveSet:
    """Plane-wave set carrying the scalar spectrum of ``model`` with a vector polarization.

    Frequencies: ``n_omega == 1`` gives a monochromatic set at omega = k;
    otherwise ``n_omega`` uniform nodes span +/- 7 sigma of a Gaussian energy
    spectrum with relative rms width ``bandwidth``. Every frequency carries the
    same angular spectrum, psi(k_perp k/omega), so the waist scales as 1/omega.
    Transverse: Gauss-Legendre nodes in k_perp over the window where the
    amplitude exceeds 1e-6 of its peak (at most 0.999 of the lowest frequency)
    times ``n_phi`` uniform azimuths.

    The energy carried by a (k_perp, phi, omega) cell is |A psi|^2 k_perp dk_perp
    dphi domega, the same measure the scalar velocity averages use.
    """
    pol = Polarization(polarization)
    if n_kperp < 1 or n_phi < 1 or n_omega < 1:
        raise InvalidArgumentError("sampling counts must be positive")
    if model.kind is Kind.PLANE_WAVE:
        return PlaneWaveSet.from_components([[0.0, 0.0, model.k]], pol.vector[None, :], polarization=pol,
                                            meta={"source": model.summary()})
    if n_kperp < 2 or n_phi < 2:
        raise InvalidArgumentError("confined packets need at least 2 k_perp and 2 azimuth samples")

    k0 = model.k
    if n_omega == 1:
        omegas = np.array([k0])
        amp_w = np.ones(1)
        d_omega = 1.0
        length = math.inf
    else:
        if not 0 < bandwidth < 1 / 7:
            raise InvalidArgumentError("bandwidth must lie in (0, 1/7)")
        sig = bandwidth * k0
        omegas = k0 + sig * np.linspace(-7.0, 7.0, n_omega)
        d_omega = float(omegas[1] - omegas[0])
        amp_w = np.exp(-((omegas - k0) ** 2) / (4 * sig * sig))
        amp_w /= math.sqrt(np.sum(amp_w**2) * d_omega)
        length = 1 / (2 * sig)

    u_lo, u_hi = _angular_support(model, EM_AMPLITUDE_FLOOR)
    w_min, w_max = float(omegas.min()), float(omegas.max())
    hi = min(u_hi * w_max, PROPAGATING_FRACTION * w_min)
    q = gauss_legendre(n_kperp, u_lo * w_min, hi)
    kperp = q.nodes
    excluded = _angular_tail(model, hi / w_max)
    layout = Layout(kperp=kperp, n_phi=n_phi, omegas=omegas)
    phis = layout.phis
    d_phi = 2 * np.pi / n_phi

    KP, PH, OM = np.meshgrid(kperp, phis, omegas, indexing="ij")
    # every frequency carries the same angular spectrum, normalised to equal energy
    PSI = eval_radial_spectrum(model, KP * k0 / OM) * (k0 / OM)
    GLW = np.broadcast_to(q.weights[:, None, None], KP.shape)
    AW = np.broadcast_to(amp_w[None, None, :], KP.shape)
    KZ = np.sqrt(OM**2 - KP**2)
    kvec = np.stack([KP * np.cos(PH), KP * np.sin(PH), KZ], axis=-1).reshape(-1, 3)
    cell = (GLW * KP * d_phi * d_omega).ravel()
    dV = cell * (OM / KZ).ravel()
    # coefficient = density * dV with |density|^2 dV = |A psi|^2 * cell
    scalar = (AW * PSI).ravel() * np.sqrt(cell * dV) * np.exp(1j * model.l * PH.ravel())
    khat = kvec / OM.ravel()[:, None]
    pvec = rotate_from_z(khat, pol.vector)
    E = scalar[:, None] * pvec
    E -= khat * np.sum(khat * E, axis=1)[:, None]
    H = np.cross(khat, E)
    # widest component (lowest frequency) sets the real-space extent
    w0 = model.w0 * math.sqrt(model.N + 1) * k0 / w_min if model.kind is not Kind.BESSEL_RING else math.inf
    return PlaneWaveSet(k=kvec, omega=OM.ravel().copy(), E=E, H=H, dV=dV, polarization=pol, layout=layout,
                        length_scale=length, w0=w0, z_R=model.z_R * k0 / w_min if math.isfinite(w0) else math.inf,
                        excluded_mass=excluded,
                        meta={"source": model.summary(), "n_kperp": n_kperp, "n_phi": n_phi,
                              "n_omega": n_omega, "bandwidth": bandwidth if n_omega > 1 else 0.0})


# -- evaluation --------------------------------------------------------------

@dataclass(frozen=True)
class EMSample:
    """Analytic-signal fields at points ``r`` (shape (..., 3)) and time ``t``."""

    r: np.ndarray
    t: float
    E: np.ndarray
    H: np.ndarray

    def __post_init__(self):
        if not (np.all(np.isfinite(self.E)) and np.all(np.isfinite(self.H))):
            raise InvalidArgumentError("non-finite field sample")

    @property
    def E_real(self) -> np.ndarray:
        return self.E.real

    @property
    def H_real(self) -> np.ndarray:
        return self.H.real


def eval_fields(pws: PlaneWaveSet, r, t: float) -> EMSample:
    """Direct angular-spectrum summation at arbitrary points."""
    r = np.asarray(r, dtype=float)
    pts = r.reshape(-1, 3)
    E = np.zeros((len(pts), 3), dtype=complex)
    H = np.zeros_like(E)
    for s in range(0, pws.n, _CHUNK):
        sl = slice(s, s + _CHUNK)
        ph = np.exp(1j * (pts @ pws.k[sl].T - pws.omega[sl] * t))
        E += ph @ pws.E[sl]
        H += ph @ pws.H[sl]
    return EMSample(r=r, t=float(t), E=E.reshape(r.shape), H=H.reshape(r.shape))


def eval_on_grid(pws: PlaneWaveSet, grid: CylGrid, t: float) -> tuple[np.ndarray, np.ndarray]:
    """Fields on a cylindrical grid, shape (n_r, n_phi, n_z, 3).

    Uses the tensor-product layout: the sum over frequencies is done per
    (k_perp, azimuth) pair, and the azimuthal sum, a circular convolution when
    the grid azimuths are a subset of the k-space azimuths, by FFT. The result
    is the exact finite sum, only reordered.
    """
    lay = pws.layout
    if grid.phi is None:
        raise InvalidArgumentError("vector fields need an azimuthal grid")
    n_phi = grid.phi.size
    if lay is None or lay.n_phi % n_phi or abs(grid.phi[0]) > 0:
        sample = eval_fields(pws, np.stack(grid.points(), axis=-1), t)
        return sample.E, sample.H
    n_i, n_a, n_m = lay.shape
    stride = n_a // n_phi
    kz = np.sqrt(lay.omegas[None, :] ** 2 - lay.kperp[:, None] ** 2)
    zph = np.exp(1j * (kz[:, :, None] * grid.z[None, None, :] - lay.omegas[None, :, None] * t))
    cos_c = np.cos(lay.phis)
    kern = np.exp(1j * lay.kperp[:, None, None] * grid.r[None, :, None] * cos_c[None, None, :])
    kern_hat = np.ascontiguousarray(np.fft.fft(kern, axis=2).transpose(2, 1, 0))  # (n, r, i)
    n_r, n_z = grid.r.size, grid.z.size
    out = []
    for coeff in (pws.E, pws.H):
        c = coeff.reshape(n_i, n_a, n_m, 3).transpose(0, 1, 3, 2).reshape(n_i, n_a * 3, n_m)
        G = (c @ zph).reshape(n_i, n_a, 3 * n_z)  # frequency sum per (k_perp, azimuth)
        G_hat = np.ascontiguousarray(np.fft.fft(G, axis=1).transpose(1, 0, 2))  # (n, i, 3 z)
        F = np.fft.ifft(kern_hat @ G_hat, axis=0)[::stride]  # (phi, r, 3 z)
        out.append(F.reshape(n_phi, n_r, 3, n_z).transpose(1, 0, 3, 2))
    return out[0], out[1]


def energy_momentum_densities(sample: EMSample) -> tuple[np.ndarray, np.ndarray]:
    """U = (E^2 + H^2)/2 and P = E x H from the instantaneous real fields."""
    e, h = sample.E_real, sample.H_real
    U = 0.5 * (np.sum(e * e, axis=-1) + np.sum(h * h, axis=-1))
    P = np.cross(e, h)
    return U, P


def null_inequality_margin(U: np.ndarray, P: np.ndarray) -> float:
    """max(|P| - U) relative to max U; non-positive (up to rounding) for any real fields."""
    excess = np.linalg.norm(P, axis=-1) - U * (1 + NULL_SLACK)
    return float(np.max(excess) / max(float(np.max(U)), 1e-300))


# -- real-space integrals ----------------------------------------------------

def default_grid(pws: PlaneWaveSet, t: float, n_r: int = 64, n_phi: int = 16, n_z: int = 256,
                 z_halfwidth: float = 6.0, r_factor: float = 5.0) -> CylGrid:
    """Moving window ct +/- z_halfwidth * L (L the intensity rms length) and radius
    r_factor * w(z) at the far edge of the significant packet region (|ct| + 4 L).

    Radial nodes are Gauss-Legendre in r^2. A single plane wave gets one
    wavelength-long periodic cell.
    """
    if not pws.confined:
        if pws.n == 1:
            lam = 2 * np.pi / float(pws.omega[0])
            return _periodic(CylGrid.gauss_r2(1.0, 8, 0.0, lam, n_z, n_phi=n_phi))
        raise InvalidArgumentError("real-space integrals need a confined packet (finite bandwidth and waist)")
    L = pws.length_scale
    z_far = abs(t) + 4 * L
    w = pws.w0 * math.sqrt(1 + (z_far / pws.z_R) ** 2)
    return CylGrid.gauss_r2(r_factor * w, n_r, t - z_halfwidth * L, t + z_halfwidth * L, n_z, n_phi=n_phi)


def _periodic(grid: CylGrid) -> CylGrid:
    # half-open uniform z cell with equal weights, exact for periodic integrands
    z = grid.z[0] + (grid.z[-1] - grid.z[0]) * np.arange(grid.z.size) / grid.z.size
    dz = (grid.z[-1] - grid.z[0]) / grid.z.size
    return CylGrid(r=grid.r, z=z, phi=grid.phi, r_weights=grid.r_weights,
                   z_weights=np.full(z.size, dz), radial_rule=grid.radial_rule)


@dataclass(frozen=True)
class FieldIntegrals:
    t: float
    energy: float
    momentum: np.ndarray
    first_moment_U: np.ndarray
    r_dot_P: float
    leak: float
    null_margin: float
    n_points: int


def field_integrals(pws: PlaneWaveSet, grid: CylGrid, t: float) -> FieldIntegrals:
    E, H = eval_on_grid(pws, grid, t)
    U, P = energy_momentum_densities(EMSample(r=np.zeros(3), t=t, E=E, H=H))
    x, y, z = grid.points()
    rvec = np.stack([x, y, z], axis=-1)
    energy = integrate_grid(U, grid)
    if not energy > 0:
        raise DegenerateError("field carries no energy on the grid")
    mom = np.asarray(integrate_grid(P, grid))
    first = np.asarray(integrate_grid(rvec * U[..., None], grid))
    rp = integrate_grid(np.sum(rvec * P, axis=-1), grid)
    leak = 0.0
    if pws.confined:
        zz, rr = grid.z, grid.r
        span = zz[-1] - zz[0]
        zmask = (zz < zz[0] + EDGE_FRACTION * span) | (zz > zz[-1] - EDGE_FRACTION * span)
        rmask = rr > (1 - EDGE_FRACTION) * rr[-1]
        mask = rmask[:, None, None] | zmask[None, None, :]
        leak = integrate_grid(U * mask, grid) / energy
    return FieldIntegrals(t=float(t), energy=energy, momentum=mom, first_moment_U=first, r_dot_P=rp,
                          leak=leak, null_margin=null_inequality_margin(U, P), n_points=int(U.size))


def _checked(pws: PlaneWaveSet, grid: CylGrid | None, t: float) -> tuple[FieldIntegrals, CylGrid]:
    grid = default_grid(pws, t) if grid is None else grid
    fi = field_integrals(pws, grid, t)
    if fi.leak > LEAK_LIMIT:
        raise TruncationError(f"{fi.leak:.2e} of the energy lies at the grid edges at t = {t}")
    return fi, grid


def energy_velocity(pws: PlaneWaveSet, t: float = 0.0, grid: CylGrid | None = None) -> np.ndarray:
    """v_E = int P / int U (units c) from real-space integration."""
    fi, _ = _checked(pws, grid, t)
    return fi.momentum / fi.energy


@dataclass(frozen=True)
class MomentumVelocity:
    direct: float
    virial: float
    virial_lhs: float
    virial_rhs: float


def momentum_velocity(pws: PlaneWaveSet, t: float = 0.0, dt: float = 0.01,
                      grid: CylGrid | None = None) -> MomentumVelocity:
    """v_P,z by two routes.

    (a) direct: int U / int P_z. (b) virial: the central difference of
    int r.P over [t - dt, t + dt], which equals int U, divided by int P_z. Both
    evaluations use the same grid.
    """
    if dt > 0.01 / float(np.mean(pws.omega)) * (1 + 1e-12):
        raise InvalidArgumentError("time step must not exceed 0.01/omega0")
    fi, grid = _checked(pws, grid, t)
    pz = float(fi.momentum[2])
    if abs(pz) <= 1e-14 * fi.energy:
        raise DegenerateError("total longitudinal momentum vanishes (standing wave)")
    plus = field_integrals(pws, grid, t + dt).r_dot_P
    minus = field_integrals(pws, grid, t - dt).r_dot_P
    lhs = (plus - minus) / (2 * dt)
    return MomentumVelocity(direct=fi.energy / pz, virial=lhs / pz, virial_lhs=lhs, virial_rhs=fi.energy)


def boost_momentum(pws: PlaneWaveSet, t: float, grid: CylGrid | None = None) -> np.ndarray:
    """int (r U - t P) d^3r (c = 1)."""
    fi, _ = _checked(pws, grid, t)
    return fi.first_moment_U - t * fi.momentum


def divergence(pws: PlaneWaveSet, r, t: float, h: float = 1e-2) -> np.ndarray:
    """div E at points ``r`` from 5-point central differences along each axis."""
    r = np.atleast_2d(np.asarray(r, dtype=float))
    total = np.zeros(len(r), dtype=complex)
    for ax in range(3):
        e = np.eye(3)[ax] * h
        vals = [eval_fields(pws, r + s * e, t).E[:, ax] for s in (-2, -1, 1, 2)]
        total += (vals[0] - 8 * vals[1] + 8 * vals[2] - vals[3]) / (12 * h)
    return total


# -- audit -------------------------------------------------------------------

@dataclass(frozen=True)
class ConservationAudit:
    t: np.ndarray
    energy: np.ndarray
    momentum: np.ndarray
    boost: np.ndarray
    boost_scale: np.ndarray
    virial_lhs: np.ndarray
    virial_rhs: np.ndarray
    v_E: np.ndarray
    v_P: np.ndarray
    null_margin: float
    n_points: int
    max_leak: float
    meta: dict = field(default_factory=dict)

    @staticmethod
    def _drift(x: np.ndarray, scale: float) -> float:
        return float((np.max(x) - np.min(x)) / scale)

    @property
    def energy_drift(self) -> float:
        return self._drift(self.energy, abs(self.energy[0]))

    @property
    def momentum_drift(self) -> float:
        return self._drift(self.momentum[:, 2], abs(self.momentum[0, 2]))

    @property
    def boost_drift(self) -> float:
        # B_z = int z U - t P_z is a difference of growing terms; measure against them
        return self._drift(self.boost[:, 2], float(np.max(self.boost_scale)))

    @property
    def virial_disagreement(self) -> float:
        return float(np.max(np.abs(self.virial_lhs / self.virial_rhs - 1)))

    @property
    def reciprocity_error(self) -> float:
        return float(np.max(np.abs(self.v_P * self.v_E[:, 2] - 1)))

    def checks(self) -> dict[str, tuple[bool, float]]:
        speed = np.linalg.norm(self.v_E, axis=1)
        return {
            "null_inequality": (self.null_margin <= 0.0, self.null_margin),
            "energy_drift": (self.energy_drift < 1e-3, self.energy_drift),
            "momentum_drift": (self.momentum_drift < 1e-3, self.momentum_drift),
            "boost_drift": (self.boost_drift < 1e-3, self.boost_drift),
            "virial_route": (self.virial_disagreement < 1e-2, self.virial_disagreement),
            "reciprocity": (self.reciprocity_error < 1e-10, self.reciprocity_error),
            "subluminal": (bool(np.all(speed < 1.0)), float(np.max(speed))),
        }

    def rows(self) -> list[list[float]]:
        return [[float(self.t[i]), float(self.energy[i]), float(self.momentum[i, 2]), float(self.boost[i, 2]),
                 float(self.virial_lhs[i]), float(self.virial_rhs[i]), float(self.v_E[i, 2]), float(self.v_P[i])]
                for i in range(self.t.size)]


def conservation_audit(pws: PlaneWaveSet, times, grid_factory=None, dt: float = 0.01) -> ConservationAudit:
    """Energy, momentum, boost momentum and virial checks at each time.

    ``grid_factory(pws, t)`` supplies the grid (default: :func:`default_grid`).
    """
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.size < 2 or np.any(np.diff(times) <= 0):
        raise InvalidArgumentError("audit needs at least two increasing times")
    factory = grid_factory or default_grid
    recs = []
    for t in times:
        grid = factory(pws, float(t))
        fi, _ = _checked(pws, grid, float(t))
        mv = momentum_velocity(pws, float(t), dt, grid)
        recs.append((fi, mv))
    energy = np.array([f.energy for f, _ in recs])
    mom = np.array([f.momentum for f, _ in recs])
    first = np.array([f.first_moment_U for f, _ in recs])
    boost = first - times[:, None] * mom
    scale = np.maximum(np.abs(first[:, 2]), np.abs(times * mom[:, 2]))
    scale = np.maximum(scale, energy / float(np.mean(pws.omega)))
    return ConservationAudit(
        t=times, energy=energy, momentum=mom, boost=boost, boost_scale=scale,
        virial_lhs=np.array([m.virial_lhs for _, m in recs]), virial_rhs=np.array([m.virial_rhs for _, m in recs]),
        v_E=mom / energy[:, None], v_P=np.array([m.direct for _, m in recs]),
        null_margin=max(f.null_margin for f, _ in recs), n_points=sum(f.n_points for f, _ in recs),
        max_leak=max(f.leak for f, _ in recs), meta=dict(pws.meta))
