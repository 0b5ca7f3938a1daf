"""Acceptance criteria as executable checks.

Each criterion returns a :class:`Criterion` with a pass flag and a short
numeric detail; :func:`run_all` feeds ``--selftest`` and the test suite.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, replace

import numpy as np

from . import emfield, rsquantum, velocimetry, wavepacket
from .beams import BeamParams, phase_map
from .spectra import SpectralModel


@dataclass(frozen=True)
class Criterion:
    number: int
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.number}. {self.name}: {self.detail} ({self.seconds:.1f} s)"


def _timed(number: int, name: str, fn) -> Criterion:
    t0 = time.perf_counter()
    passed, detail = fn()
    return Criterion(number, name, bool(passed), detail, time.perf_counter() - t0)


def gaussian_deficit() -> tuple[bool, str]:
    t0 = time.perf_counter()
    vg5 = velocimetry.group_velocity(SpectralModel.gaussian(5.0))
    m50 = SpectralModel.gaussian(50.0)
    d50 = 1 - velocimetry.group_velocity(m50)
    ref = 1 / (2 * m50.k * m50.z_R)
    rel = abs(d50 / ref - 1)
    dt = time.perf_counter() - t0
    ok = abs(vg5 - 0.96) <= 0.01 and rel < 1e-3 and dt < 1.0
    return ok, f"v_g(kw0=5)={vg5:.6f}, deficit(kw0=50) rel.err={rel:.2e}, {dt:.3f} s"


def half_wavelength_retardation(spec: wavepacket.WavepacketSpec | None = None) -> tuple[bool, str]:
    spec = spec or wavepacket.WavepacketSpec()
    t_half = 2 * math.pi * spec.z_R
    fit = tuple(spec.times)
    times = tuple(sorted(set(fit) | {t_half}))
    t0 = time.perf_counter()
    trace = wavepacket.retardation_curve(replace(spec, times=times))
    dt = time.perf_counter() - t0
    i = times.index(t_half)
    ret_half = float(trace.ret_prob[i])
    mask = np.isin(trace.t, fit)
    slope = float(np.polyfit(trace.ct[mask], trace.ret_prob[mask], 1)[0])
    want_half = -math.pi / spec.k0
    want_slope = -1 / (2 * spec.k0 * spec.z_R)
    e1 = abs(ret_half / want_half - 1)
    e2 = abs(slope / want_slope - 1)
    ok = e1 <= 0.15 and e2 <= 0.15 and dt < 60
    return ok, (f"ret(2 pi z_R)={ret_half:.4f} vs {want_half:.4f} ({e1:.1%}), "
                f"slope={slope:.5f} vs {want_slope:.5f} ({e2:.1%}), {dt:.1f} s")


def lg_enhancement(kw0: float = 50.0) -> tuple[bool, str]:
    Ns = np.arange(7)
    deficits = np.array([1 - velocimetry.group_velocity(SpectralModel.laguerre_gauss(kw0, int(n), 0)) for n in Ns])
    slope, intercept = np.polyfit(Ns + 1, deficits, 1)
    z_R = kw0**2 / 2
    want = 1 / (2 * z_R)
    rel = abs(slope / want - 1)
    ok = rel < 0.01 and abs(intercept) < 1e-4
    return ok, f"slope rel.err={rel:.2e}, intercept={intercept:.2e}"


def product_law_matrix() -> list[SpectralModel]:
    models = []
    for kw0 in (5.0, 10.0, 50.0):
        models.append(SpectralModel.gaussian(kw0))
        models.append(SpectralModel.laguerre_gauss(kw0, 2, 1))
        models.append(SpectralModel.laguerre_gauss(kw0, 3, 0))
        models.append(SpectralModel.bessel_ring(1 / kw0, l=0))
        models.append(SpectralModel.bessel_ring(1 / kw0, l=5))
    return models


def product_law() -> tuple[bool, str]:
    worst = 0.0
    for m in product_law_matrix():
        worst = max(worst, abs(velocimetry.group_velocity(m) * velocimetry.phase_velocity(m) - 1))
    return worst <= 1e-12, f"max |v_g v_ph - 1| = {worst:.1e} over {len(product_law_matrix())} models"


def field_audit(kw0: float = 10.0) -> tuple[bool, str]:
    pws = emfield.synthesize_em(SpectralModel.gaussian(kw0))
    z_R = kw0**2 / 2
    audit = emfield.conservation_audit(pws, [0.0, z_R, 2 * z_R])
    checks = audit.checks()
    n_pts = audit.n_points
    ok = all(p for p, _ in checks.values()) and n_pts >= 10**4
    worst = ", ".join(f"{k}={v:.1e}" for k, (_, v) in checks.items())
    return ok, f"{n_pts} points/time; {worst}"


def cross_formalism(kw0: float = 10.0) -> tuple[bool, str]:
    model = SpectralModel.gaussian(kw0)
    vg = velocimetry.group_velocity(model)
    errs = []
    algebraic = 0.0
    for n_kperp, n_phi in ((48, 128), (96, 256)):
        pws = emfield.synthesize_em(model, n_kperp=n_kperp, n_phi=n_phi)
        grid = emfield.default_grid(pws, 0.0)
        vE = emfield.energy_velocity(pws, 0.0, grid)[2]
        spin = rsquantum.spin_expectation(rsquantum.RSSpectralField.from_plane_waves(pws), grid)[2]
        algebraic = max(algebraic, abs(vE - spin))
        errs.append(abs(vE / vg - 1))
    converging = errs[1] <= max(errs[0], 1e-9)
    ok = algebraic <= 1e-10 and errs[0] <= 0.01 and converging
    return ok, f"|v_E - c<S>|={algebraic:.1e}, |v_E/v_g - 1|={errs[0]:.1e} -> {errs[1]:.1e} (2x)"


def rs_algebra(kw0: float = 10.0) -> tuple[bool, str]:
    S = rsquantum.SpinMatrices.standard()
    comm = S.commutator_residual()
    v = np.array([1, 1j, 0]) / math.sqrt(2)
    eig = float(np.max(np.abs(S.z @ v - v)))
    pws = emfield.synthesize_em(SpectralModel.gaussian(kw0))
    f = rsquantum.RSSpectralField.from_plane_waves(pws)
    res = float(np.max(rsquantum.eigen_residual(f.F, f.k)))
    sweep = rsquantum.identity_sweep(pws, n=1000)
    ok = comm == 0.0 and eig == 0.0 and res < 1e-12 and sweep < 1e-12
    return ok, f"commutator={comm:.0e}, S_z eigen={eig:.0e}, eigenrelation={res:.1e}, identity sweep={sweep:.1e}"


def brute_force_velocities(field: rsquantum.RSSpectralField) -> tuple[float, float]:
    """(v_P1, v_P) by explicit loops over the components."""
    s_w = s_wo = s_wkz = s_wkzk = 0.0
    for j in range(len(field.omega)):
        f2 = 0.0
        for c in range(3):
            f2 += field.F[j, c].real ** 2 + field.F[j, c].imag ** 2
        w = field.weight[j] * f2
        k = math.sqrt(field.k[j, 0] ** 2 + field.k[j, 1] ** 2 + field.k[j, 2] ** 2)
        s_w += w
        s_wo += w * field.omega[j]
        s_wkz += w * field.k[j, 2]
        s_wkzk += w * field.k[j, 2] / k
    return s_wo / s_wkz, s_w / s_wkzk


def vp1_discrepancy() -> tuple[bool, str]:
    f = rsquantum.two_frequency_fixture()
    v1 = rsquantum.momentum_velocity_v1(f)
    vp = rsquantum.momentum_velocity_proper(f)
    b1, bp = brute_force_velocities(f)
    oracle = abs((v1 - vp) - (b1 - bp))
    wf = rsquantum.to_photon_wavefunction(f)
    spin_z = float(rsquantum.spin_expectation(f)[2])
    e_group = abs(wf.group_velocity() - spin_z)
    e_phase = abs(wf.phase_velocity() - vp)
    ok = abs(v1 - vp) > 1e-3 and oracle <= 1e-10 and e_group <= 1e-10 and e_phase <= 1e-10
    return ok, (f"v_P1={v1:.6f}, v_P={vp:.6f}, oracle diff={oracle:.1e}, "
                f"psi routes: group {e_group:.1e}, phase {e_phase:.1e}")


def phase_map_spacing(kw0: float = 5.0) -> tuple[bool, str]:
    params = BeamParams.from_kw0(kw0)
    pm = phase_map(params)
    ratio = pm.mean_spacing_ratio()
    k_axis = pm.on_axis_local_wavenumber()
    want = params.k - 1 / params.z_R
    rel = abs(k_axis / want - 1)
    ok = abs(ratio - 1.04) <= 0.005 and rel < 1e-3
    return ok, f"spacing ratio={ratio:.5f}, on-axis k_loc={k_axis:.6f} vs {want:.6f} ({rel:.1e})"


CRITERIA = (
    (1, "Gaussian group-velocity deficit", gaussian_deficit),
    (2, "Half-wavelength retardation", half_wavelength_retardation),
    (3, "Laguerre-Gauss (N+1) enhancement", lg_enhancement),
    (4, "Product law", product_law),
    (5, "Field-theory audits", field_audit),
    (6, "Cross-formalism equality", cross_formalism),
    (7, "RS operator algebra", rs_algebra),
    (8, "v_P1 versus v_P discrepancy", vp1_discrepancy),
    (9, "Phase-map quantification", phase_map_spacing),
)


def run_criterion(number: int) -> Criterion:
    for n, name, fn in CRITERIA:
        if n == number:
            return _timed(n, name, fn)
    raise KeyError(number)


def run_all(echo=None) -> list[Criterion]:
    out = []
    for n, name, fn in CRITERIA:
        c = _timed(n, name, fn)
        if echo is not None:
            echo(c.line())
        out.append(c)
    return out
