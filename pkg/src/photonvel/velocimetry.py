"""Spectrally averaged group and phase velocities and their paraxial predictions.

All velocities are dimensionless (units of c). The numeric estimators use the
exact dispersion k_z = sqrt(k^2 - k_perp^2); the closed forms are the leading
paraxial terms and serve only as references.
"""
from __future__ import annotations

import warnings
from dataclasses import asdict, dataclass

from .errors import DegenerateError, InvariantViolation
from .spectra import PARAXIAL_KW0_MIN, Kind, ParaxialityWarning, SpectralModel, radial_quadrature, spectral_moment

PRODUCT_TOL = 1e-12


def group_velocity(model: SpectralModel) -> float:
    """<v_g,z>/c = <k_z>/k for a monochromatic spectrum."""
    return spectral_moment(model, "kz") / model.k


def phase_velocity(model: SpectralModel) -> float:
    """<v_ph,z>/c = k/<k_z>, the mean frequency over the mean longitudinal wavevector."""
    kz = spectral_moment(model, "kz")
    if kz <= 0:
        raise DegenerateError("mean longitudinal wavevector is not positive")
    return model.k / kz


def paraxial_prediction(model: SpectralModel) -> tuple[float, float]:
    """Leading-order (v_g, v_ph) in units of c.

    Gaussian and Laguerre-Gauss: 1 -/+ (N + 1)/(2 k z_R). Bessel ring:
    1 -/+ kperp0^2/(2 k^2), independent of the azimuthal order.
    """
    if model.kind is Kind.PLANE_WAVE:
        return 1.0, 1.0
    if model.kind is Kind.BESSEL_RING:
        d = model.kperp0**2 / (2 * model.k**2)
    else:
        if model.k * model.w0 < PARAXIAL_KW0_MIN:
            warnings.warn("paraxial prediction used outside its regime", ParaxialityWarning, stacklevel=2)
        d = (model.N + 1) / (2 * model.k * model.z_R)
    return 1.0 - d, 1.0 + d


@dataclass(frozen=True)
class VelocityReport:
    v_g_numeric: float
    v_ph_numeric: float
    product_over_c2: float
    v_g_paraxial: float
    v_ph_paraxial: float
    deficit_numeric: float
    deficit_paraxial: float
    relative_disagreement: float
    excluded_mass: float
    model: dict

    def to_dict(self) -> dict:
        """JSON-ready form in which every number carries its provenance."""
        methods = {
            "v_g_numeric": "numeric",
            "v_ph_numeric": "numeric",
            "product_over_c2": "identity",
            "v_g_paraxial": "paraxial",
            "v_ph_paraxial": "paraxial",
            "deficit_numeric": "numeric",
            "deficit_paraxial": "paraxial",
            "relative_disagreement": "numeric",
            "excluded_mass": "numeric",
        }
        d = asdict(self)
        out = {"model": d.pop("model")}
        for key, val in d.items():
            out[key] = {"value": val, "method": methods[key]}
        return out


def velocity_report(model: SpectralModel) -> VelocityReport:
    vg = group_velocity(model)
    vph = phase_velocity(model)
    prod = vg * vph
    if abs(prod - 1.0) > PRODUCT_TOL:
        raise InvariantViolation(f"v_g v_ph = {prod!r} violates the product law")
    if vg > 1.0 or vph < 1.0:
        raise InvariantViolation("numeric velocities on the wrong side of c")
    vg_p, vph_p = paraxial_prediction(model)
    dn = 1.0 - vg
    dp = 1.0 - vg_p
    rel = 0.0 if dp == 0 else dn / dp - 1.0
    return VelocityReport(
        v_g_numeric=vg,
        v_ph_numeric=vph,
        product_over_c2=prod,
        v_g_paraxial=vg_p,
        v_ph_paraxial=vph_p,
        deficit_numeric=dn,
        deficit_paraxial=dp,
        relative_disagreement=rel,
        excluded_mass=radial_quadrature(model).excluded_mass,
        model=model.summary(),
    )
