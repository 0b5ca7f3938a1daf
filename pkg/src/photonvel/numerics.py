"""Quadrature rules, cylindrical grids, Laguerre polynomials and 3-vector helpers.

Everything here is double precision and deterministic. Lengths are in units of
1/k0 and c = 1 unless a caller says otherwise.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import InvalidArgumentError, NumericError

_NEWTON_TOL = 1e-15
_NEWTON_MAXITER = 100


@dataclass(frozen=True)
class Quadrature1D:
    nodes: np.ndarray
    weights: np.ndarray
    interval: tuple[float, float]

    def integrate(self, values) -> float:
        return float(np.dot(self.weights, values))


def _legendre_with_derivative(n: int, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    p0 = np.ones_like(x)
    p1 = x.copy()
    for j in range(2, n + 1):
        p0, p1 = p1, ((2 * j - 1) * x * p1 - (j - 1) * p0) / j
    return p1, n * (x * p1 - p0) / (x * x - 1.0)


@lru_cache(maxsize=64)
def _legendre_reference(n: int) -> tuple[np.ndarray, np.ndarray]:
    # Newton iteration on P_n for all roots at once, Tricomi initial guess.
    i = np.arange(1, n + 1)
    x = np.cos(np.pi * (i - 0.25) / (n + 0.5))
    for _ in range(_NEWTON_MAXITER):
        p, dp = _legendre_with_derivative(n, x)
        dx = p / dp
        x = x - dx
        if np.max(np.abs(dx)) < _NEWTON_TOL:
            break
    _, dp = _legendre_with_derivative(n, x)
    w = 2.0 / ((1.0 - x * x) * dp * dp)
    order = np.argsort(x)
    x, w = x[order], w[order]
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def gauss_legendre(n: int, a: float, b: float) -> Quadrature1D:
    """Gauss-Legendre rule with `n` nodes on [a, b].

    Exact for polynomials of degree <= 2n - 1.
    """
    if int(n) != n or n < 1:
        raise InvalidArgumentError(f"node count must be a positive integer, got {n!r}")
    if not (np.isfinite(a) and np.isfinite(b)) or a >= b:
        raise InvalidArgumentError(f"need finite a < b, got [{a}, {b}]")
    x, w = _legendre_reference(int(n))
    half = 0.5 * (b - a)
    nodes = 0.5 * (a + b) + half * x
    return Quadrature1D(nodes=nodes, weights=half * w, interval=(float(a), float(b)))


def laguerre_poly(p: int, alpha: float, x):
    """Generalized Laguerre polynomial L_p^alpha(x) by the three-term recurrence."""
    if p < 0:
        raise InvalidArgumentError("Laguerre degree must be non-negative")
    x = np.asarray(x, dtype=float)
    prev = np.ones_like(x)
    if p == 0:
        return prev if prev.ndim else float(prev)
    cur = 1.0 + alpha - x
    for n in range(1, p):
        prev, cur = cur, ((2 * n + 1 + alpha - x) * cur - (n + alpha) * prev) / (n + 1)
    return cur if cur.ndim else float(cur)


def trapezoid_weights(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.size < 2:
        raise InvalidArgumentError("trapezoid rule needs at least two samples")
    dx = np.diff(x)
    w = np.zeros_like(x)
    w[:-1] += 0.5 * dx
    w[1:] += 0.5 * dx
    return w


@dataclass(frozen=True)
class CylGrid:
    """Sample points and integration weights on a cylinder (r_perp, [phi], z).

    ``r_weights`` already contain the r factor of the cylindrical measure, so a
    cell weight is ``r_weights[i] * phi_weight * z_weights[k]``. With no phi
    samples the azimuthal integral contributes a factor 2*pi.
    """

    r: np.ndarray
    z: np.ndarray
    phi: np.ndarray | None = None
    r_weights: np.ndarray = field(default=None, repr=False)
    z_weights: np.ndarray = field(default=None, repr=False)
    radial_rule: str = "trapezoid"

    def __post_init__(self):
        r = np.asarray(self.r, dtype=float)
        z = np.asarray(self.z, dtype=float)
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "z", z)
        if np.any(np.diff(r) <= 0) or np.any(np.diff(z) <= 0):
            raise InvalidArgumentError("grid samples must be strictly increasing")
        if r[0] < 0:
            raise InvalidArgumentError("r_perp samples must be non-negative")
        if self.r_weights is None:
            object.__setattr__(self, "r_weights", trapezoid_weights(r) * r)
        if self.z_weights is None:
            object.__setattr__(self, "z_weights", trapezoid_weights(z))
        if self.phi is not None:
            phi = np.asarray(self.phi, dtype=float)
            object.__setattr__(self, "phi", phi)

    @classmethod
    def uniform(cls, r_max, n_r, z_min, z_max, n_z, n_phi=None) -> "CylGrid":
        if r_max <= 0 or z_max <= z_min:
            raise InvalidArgumentError("grid extents must be positive")
        r = np.linspace(0.0, r_max, int(n_r))
        z = np.linspace(z_min, z_max, int(n_z))
        phi = None if n_phi is None else 2 * np.pi * np.arange(int(n_phi)) / int(n_phi)
        return cls(r=r, z=z, phi=phi)

    @classmethod
    def gauss_r2(cls, r_max, n_r, z_min, z_max, n_z, n_phi=None) -> "CylGrid":
        """Gauss-Legendre nodes in u = r^2, which is smooth for azimuthally averaged fields."""
        q = gauss_legendre(int(n_r), 0.0, r_max * r_max)
        r = np.sqrt(q.nodes)
        z = np.linspace(z_min, z_max, int(n_z))
        phi = None if n_phi is None else 2 * np.pi * np.arange(int(n_phi)) / int(n_phi)
        return cls(r=r, z=z, phi=phi, r_weights=0.5 * q.weights, radial_rule="gauss-r2")

    @property
    def dz(self) -> float:
        return float(self.z[1] - self.z[0])

    @property
    def phi_weight(self) -> float:
        return 2 * np.pi if self.phi is None else 2 * np.pi / self.phi.size

    @property
    def shape(self) -> tuple[int, ...]:
        if self.phi is None:
            return (self.r.size, self.z.size)
        return (self.r.size, self.phi.size, self.z.size)

    @property
    def volume(self) -> float:
        return float(np.sum(self.r_weights) * 2 * np.pi * np.sum(self.z_weights))

    def points(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Cartesian x, y, z arrays broadcast to ``shape`` (phi grid required)."""
        if self.phi is None:
            raise InvalidArgumentError("Cartesian points need an azimuthal grid")
        r = self.r[:, None, None]
        phi = self.phi[None, :, None]
        z = self.z[None, None, :]
        x = np.broadcast_to(r * np.cos(phi), self.shape)
        y = np.broadcast_to(r * np.sin(phi), self.shape)
        return x, y, np.broadcast_to(z, self.shape)


def integrate_grid(values, grid: CylGrid):
    """Integrate samples over the grid with the cylindrical measure.

    ``values`` has shape ``grid.shape`` optionally followed by a trailing
    vector axis; a vector (e.g. a Complex3 density) integrates component-wise.
    """
    v = np.asarray(values)
    if not np.all(np.isfinite(v)):
        raise NumericError("non-finite values in grid integrand")
    nd = len(grid.shape)
    if v.shape[:nd] != grid.shape:
        raise InvalidArgumentError(f"values shape {v.shape} does not match grid {grid.shape}")
    out = np.tensordot(grid.z_weights, np.moveaxis(v, nd - 1, 0), axes=(0, 0))
    if grid.phi is not None:
        out = out.sum(axis=1) * grid.phi_weight
    else:
        out = out * (2 * np.pi)
    out = np.tensordot(grid.r_weights, out, axes=(0, 0))
    return out.item() if np.ndim(out) == 0 else out


# -- Complex3: fields are stored as arrays with a trailing axis of length 3 --

def cross(a, b):
    return np.cross(a, b)


def dot(a, b):
    """Bilinear dot product (no conjugation)."""
    return np.sum(np.asarray(a) * np.asarray(b), axis=-1)


def hdot(a, b):
    """Hermitian inner product conj(a) . b."""
    return np.sum(np.conj(a) * np.asarray(b), axis=-1)


def norm2(a):
    return np.sum(np.abs(a) ** 2, axis=-1)
