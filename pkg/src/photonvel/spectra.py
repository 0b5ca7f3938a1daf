"""Momentum-space amplitude models and the Poisson-like frequency spectrum.

A :class:`SpectralModel` describes a monochromatic, axially symmetric plane-wave
spectrum psi(k_perp) e^{i l phi}. Only propagating components (k_perp < k) are
ever integrated; whatever the amplitude model puts beyond the radial cutoff is
reported as ``excluded_mass`` instead of being silently dropped.
"""
from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import AccuracyLossError, DegenerateError, InvalidArgumentError, OutOfDomainError
from .numerics import gauss_legendre, laguerre_poly

AMPLITUDE_FLOOR = 1e-9
TAIL_MASS_LIMIT = 1e-9
PROPAGATING_FRACTION = 0.999
PARAXIAL_KW0_MIN = 3.0


class ParaxialityWarning(UserWarning):
    pass


class Kind(str, enum.Enum):
    GAUSSIAN = "gaussian"
    LAGUERRE_GAUSS = "lg"
    BESSEL_RING = "bessel"
    PLANE_WAVE = "plane"


@dataclass(frozen=True)
class SpectralModel:
    """Axially symmetric monochromatic plane-wave spectrum.

    Parameters
    ----------
    kind : Kind
    w0 : float, optional
        Beam waist (Gaussian and Laguerre-Gauss).
    l, p : int
        Azimuthal and radial indices. ``p`` is only used by Laguerre-Gauss.
    kperp0 : float, optional
        Ring radius for the Bessel ring.
    k : float
        Wavenumber, omega = c k.
    ring_width : float
        Relative width of the Gaussian annulus regularising the Bessel ring.
    n_radial : int
        Gauss-Legendre order of the radial k_perp quadrature.
    """

    kind: Kind
    w0: float | None = None
    l: int = 0
    p: int = 0
    kperp0: float | None = None
    k: float = 1.0
    ring_width: float = 0.01
    n_radial: int = 256

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind(self.kind))
        if not self.k > 0:
            raise InvalidArgumentError("wavenumber must be positive")
        if self.p < 0:
            raise InvalidArgumentError("radial index p must be non-negative")
        if self.n_radial < 2:
            raise InvalidArgumentError("radial quadrature order must be >= 2")
        if self.kind in (Kind.GAUSSIAN, Kind.LAGUERRE_GAUSS):
            if self.w0 is None or not self.w0 > 0:
                raise InvalidArgumentError("beam waist w0 must be positive")
            if self.kind is Kind.GAUSSIAN and (self.l != 0 or self.p != 0):
                raise InvalidArgumentError("Gaussian model has l = p = 0; use LAGUERRE_GAUSS")
            if self.k * self.w0 < PARAXIAL_KW0_MIN:
                warnings.warn(
                    f"k w0 = {self.k * self.w0:g} is outside the paraxial regime",
                    ParaxialityWarning,
                    stacklevel=3,
                )
        elif self.kind is Kind.BESSEL_RING:
            if self.kperp0 is None or not 0 < self.kperp0 < self.k:
                raise InvalidArgumentError("Bessel ring radius must satisfy 0 < kperp0 < k")
            if not self.ring_width > 0:
                raise InvalidArgumentError("ring width must be positive")

    @classmethod
    def gaussian(cls, kw0: float, k: float = 1.0, **kw) -> "SpectralModel":
        return cls(Kind.GAUSSIAN, w0=kw0 / k, k=k, **kw)

    @classmethod
    def laguerre_gauss(cls, kw0: float, l: int, p: int, k: float = 1.0, **kw) -> "SpectralModel":
        return cls(Kind.LAGUERRE_GAUSS, w0=kw0 / k, l=l, p=p, k=k, **kw)

    @classmethod
    def bessel_ring(cls, ratio: float, l: int = 0, k: float = 1.0, **kw) -> "SpectralModel":
        return cls(Kind.BESSEL_RING, kperp0=ratio * k, l=l, k=k, **kw)

    @classmethod
    def plane_wave(cls, k: float = 1.0) -> "SpectralModel":
        return cls(Kind.PLANE_WAVE, k=k)

    @property
    def N(self) -> int:
        """Mode order |l| + 2p."""
        return abs(self.l) + 2 * self.p

    @property
    def z_R(self) -> float:
        if self.w0 is None:
            return math.inf
        return self.k * self.w0**2 / 2

    def summary(self) -> dict:
        d = {"kind": self.kind.value, "k": self.k, "l": self.l}
        if self.w0 is not None:
            d.update(w0=self.w0, kw0=self.k * self.w0, kzR=self.k * self.z_R, p=self.p, N=self.N)
        if self.kperp0 is not None:
            d.update(kperp0=self.kperp0, kperp0_over_k=self.kperp0 / self.k, ring_width=self.ring_width)
        return d


def _lg_profile(u, l: int, p: int):
    # amplitude as a function of u = k_perp * w0
    l = abs(l)
    return (u / math.sqrt(2)) ** l * laguerre_poly(p, l, u * u / 2) * np.exp(-u * u / 4)


@lru_cache(maxsize=128)
def _lg_support(l: int, p: int) -> float:
    """Largest u = k_perp w0 with |amplitude| >= AMPLITUDE_FLOOR * peak."""
    u = np.linspace(0.0, 100.0, 200001)
    a = np.abs(_lg_profile(u, l, p))
    above = np.nonzero(a >= AMPLITUDE_FLOOR * a.max())[0]
    return float(u[above[-1]])


def eval_radial_spectrum(model: SpectralModel, kperp):
    """Un-normalised radial amplitude psi(k_perp); the e^{i l phi} factor is left out."""
    kp = np.asarray(kperp, dtype=float)
    if np.any(kp > model.k) or np.any(kp < 0):
        raise OutOfDomainError("k_perp outside the propagating range [0, k]")
    if model.kind is Kind.GAUSSIAN:
        u = kp * model.w0
        out = np.exp(-u * u / 4)
    elif model.kind is Kind.LAGUERRE_GAUSS:
        out = _lg_profile(kp * model.w0, model.l, model.p)
    elif model.kind is Kind.BESSEL_RING:
        sigma = model.ring_width * model.kperp0
        out = np.exp(-((kp - model.kperp0) ** 2) / (2 * sigma * sigma))
    else:
        out = np.where(kp == 0, 1.0, 0.0)
    return out if np.ndim(out) else float(out)


def _threshold_window(model: SpectralModel) -> tuple[float, float]:
    """k_perp interval where the amplitude is above the floor (may exceed k)."""
    if model.kind in (Kind.GAUSSIAN, Kind.LAGUERRE_GAUSS):
        return 0.0, _lg_support(model.l, model.p) / model.w0
    sigma = model.ring_width * model.kperp0
    half = sigma * math.sqrt(2 * math.log(1 / AMPLITUDE_FLOOR))
    return max(0.0, model.kperp0 - half), model.kperp0 + half


def _intensity(model, kp):
    if model.kind in (Kind.GAUSSIAN, Kind.LAGUERRE_GAUSS):
        a = _lg_profile(kp * model.w0, model.l, model.p)
    else:
        sigma = model.ring_width * model.kperp0
        a = np.exp(-((kp - model.kperp0) ** 2) / (2 * sigma * sigma))
    return a * a


@dataclass(frozen=True)
class RadialQuadrature:
    """Nodes and |psi|^2 k_perp dk_perp weights over the integrated window."""

    kperp: np.ndarray
    weights: np.ndarray
    kz: np.ndarray
    excluded_mass: float


@lru_cache(maxsize=256)
def radial_quadrature(model: SpectralModel) -> RadialQuadrature:
    """Quadrature over k_perp in [lo, hi] with hi = min(0.999 k, amplitude cutoff).

    Raises AccuracyLossError if the propagating tail dropped by the amplitude
    cutoff carries more than 1e-9 of the total weight.
    """
    if model.kind is Kind.PLANE_WAVE:
        return RadialQuadrature(np.zeros(1), np.ones(1), np.array([model.k]), 0.0)
    lo, hi_thr = _threshold_window(model)
    hi_prop = PROPAGATING_FRACTION * model.k
    hi = min(hi_thr, hi_prop)
    q = gauss_legendre(model.n_radial, lo, hi)
    w = q.weights * q.nodes * _intensity(model, q.nodes)
    total = float(w.sum())
    if total <= 0:
        raise DegenerateError("spectrum has zero norm on the propagating window")

    # Tails dropped by the amplitude cutoff inside the propagating region.
    tail = 0.0
    if hi_thr < hi_prop:
        qt = gauss_legendre(64, hi_thr, hi_prop)
        tail += float(np.sum(qt.weights * qt.nodes * _intensity(model, qt.nodes)))
    if lo > 0:
        ql = gauss_legendre(64, 0.0, lo)
        tail += float(np.sum(ql.weights * ql.nodes * _intensity(model, ql.nodes)))
    if tail > TAIL_MASS_LIMIT * total:
        raise AccuracyLossError(f"truncated spectral tail carries {tail / total:.3e} of the norm")

    # Mass deliberately excluded: evanescent region and the sliver above 0.999 k.
    excluded = 0.0
    if hi_thr > hi_prop:
        qe = gauss_legendre(128, hi_prop, hi_thr)
        excluded = float(np.sum(qe.weights * qe.nodes * _intensity(model, qe.nodes))) / total

    kz = np.sqrt(model.k**2 - q.nodes**2)
    return RadialQuadrature(q.nodes, w, kz, excluded)


def spectral_moment(model: SpectralModel, observable: str) -> float:
    """|psi|^2-weighted average of ``observable`` over the propagating spectrum.

    ``observable`` is ``"kperp2"``, ``"kz"`` or ``"1"``; the last returns the
    norm integral of |psi|^2 k_perp dk_perp (per unit azimuth) rather than an
    average, which would trivially be one.
    """
    rq = radial_quadrature(model)
    norm = float(rq.weights.sum())
    if observable == "1":
        return norm
    if observable == "kperp2":
        return float(np.dot(rq.weights, rq.kperp**2)) / norm
    if observable == "kz":
        return float(np.dot(rq.weights, rq.kz)) / norm
    raise InvalidArgumentError(f"unknown observable {observable!r}")


# -- frequency spectrum ------------------------------------------------------

@dataclass(frozen=True)
class FrequencySpectrum:
    """Sampled Poisson-like spectrum omega^s exp(-s omega / omega0).

    ``amplitudes`` are normalised so that sum(amplitudes**2) == 1 and act as
    discrete probability amplitudes for moment sums. ``density`` is the
    amplitude spectral density at the nodes (amplitude / sqrt(weight)); a
    continuous superposition is approximated by sum(weights * density * ...).
    """

    s: float
    omega0: float
    nodes: np.ndarray
    weights: np.ndarray
    amplitudes: np.ndarray

    @property
    def M(self) -> int:
        return self.nodes.size

    @property
    def density(self) -> np.ndarray:
        return self.amplitudes / np.sqrt(self.weights)

    def mean(self) -> float:
        return float(np.dot(self.amplitudes**2, self.nodes))

    def rms_width(self) -> float:
        m = self.mean()
        return float(np.sqrt(np.dot(self.amplitudes**2, (self.nodes - m) ** 2)))


def poisson_window(s: float, omega0: float) -> tuple[float, float]:
    return omega0 * max(0.0, 1 - 8 / math.sqrt(s)), omega0 * (1 + 8 / math.sqrt(s))


def poisson_log_weight(omega, s: float, omega0: float):
    omega = np.asarray(omega, dtype=float)
    return s * np.log(omega / omega0) - s * (omega / omega0 - 1)


def poisson_nodes(s: float, omega0: float, M: int) -> FrequencySpectrum:
    """Gauss-Legendre sampling of the Poisson-like spectrum on omega0 (1 -/+ 8/sqrt(s)).

    ``M == 1`` returns the monochromatic limit, a single node at omega0.
    """
    if not s > 0 or not omega0 > 0:
        raise InvalidArgumentError("s and omega0 must be positive")
    if int(M) != M or M < 1:
        raise InvalidArgumentError("node count M must be a positive integer")
    if M == 1:
        one = np.ones(1)
        return FrequencySpectrum(float(s), float(omega0), np.array([float(omega0)]), one, one)
    a, b = poisson_window(s, omega0)
    q = gauss_legendre(int(M), a, b)
    logw = poisson_log_weight(q.nodes, s, omega0)
    rho = np.exp(logw - logw.max())
    amp2 = q.weights * rho
    amp = np.sqrt(amp2 / amp2.sum())
    return FrequencySpectrum(float(s), float(omega0), q.nodes, q.weights, amp)
