"""Command-line front end: ``photonvel {velocity,propagate,phasemap,audit}``.

Parameters come from built-in defaults, then an optional flat JSON file given
with ``--config``, then explicit command-line flags. Artifacts go to ``--out``,
else ``$PHOTONVEL_OUT``, else ``./photonvel-out``.

Exit codes: 0 success, 2 configuration error, 3 accuracy or convergence
failure, 4 internal invariant violation.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
import traceback
from pathlib import Path

import numpy as np

from . import acceptance, emfield, rsquantum, velocimetry, wavepacket
from .beams import BeamParams, default_phase_grid, phase_map, realspace_phase_velocity
from .errors import InvalidArgumentError, PhotonVelError
from .export import tagged, write_csv, write_json
from .spectra import SpectralModel

ENV_OUT = "PHOTONVEL_OUT"
DEFAULT_OUT = "photonvel-out"

DEFAULTS = {
    "velocity": {"beam": "gaussian", "kw0": 10.0, "l": 0, "p": 0, "ktr": 0.1, "k": 1.0},
    "propagate": {"k0zr": 10.0, "s": 20.0, "M": 96, "l": 0, "p": 0, "n_r": 128, "n_z": 1024,
                  "z_halfwidth": 10.0, "r_factor": 4.0, "tmax_zr": 6.0, "n_times": 7, "convergence": False},
    "phasemap": {"beam": "gaussian", "kw0": 5.0, "l": 0, "p": 0, "x_extent": 3.0, "z_extent": 2.0,
                 "samples_per_wavelength": 16},
    "audit": {"target": "em", "kw0": 10.0, "polarization": "x-linear", "n_kperp": 48, "n_phi": 128,
              "n_omega": 17, "bandwidth": 0.035, "tmax_zr": 2.0, "n_times": 3, "fixture": None},
}

CENTROID_HEADER = ["t", "ct", "Z_c", "Z_E", "ret_prob", "ret_energy", "ret_theory"]
PHASEMAP_HEADER = ["x", "z", "re_psi", "im_psi", "intensity", "phase_mod_2pi", "plane_phase_mod_2pi"]
AUDIT_HEADER = ["t", "E_tot", "P_z", "B_z", "virial_lhs", "virial_rhs", "v_E", "v_P"]


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="flat JSON file of parameters; flags override it")
    p.add_argument("--out", help=f"output directory (default ${ENV_OUT} or ./{DEFAULT_OUT})")


def build_parser() -> argparse.ArgumentParser:
    sup = argparse.SUPPRESS
    parser = argparse.ArgumentParser(prog="photonvel", description=__doc__.split("\n\n")[0],
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--selftest", action="store_true", help="run the acceptance suite and print a pass/fail matrix")
    sub = parser.add_subparsers(dest="command")

    v = sub.add_parser("velocity", help="spectrally averaged group and phase velocity", argument_default=sup)
    v.add_argument("--beam", choices=["gaussian", "lg", "bessel", "plane"])
    v.add_argument("--kw0", type=float, help="k w0 (gaussian, lg)")
    v.add_argument("--l", type=int, help="azimuthal index")
    v.add_argument("--p", type=int, help="radial index (lg)")
    v.add_argument("--ktr", type=float, help="k_perp0/k (bessel)")
    v.add_argument("--k", type=float, help="wavenumber")
    _common(v)

    pr = sub.add_parser("propagate", help="wavepacket centroid retardation", argument_default=sup)
    pr.add_argument("--k0zr", type=float, help="k0 z_R")
    pr.add_argument("--s", type=float, help="spectral shape parameter")
    pr.add_argument("--M", type=int, help="frequency nodes")
    pr.add_argument("--l", type=int)
    pr.add_argument("--p", type=int)
    pr.add_argument("--n-r", dest="n_r", type=int)
    pr.add_argument("--n-z", dest="n_z", type=int)
    pr.add_argument("--z-halfwidth", dest="z_halfwidth", type=float, help="window half-length in sqrt(s)/k0")
    pr.add_argument("--r-factor", dest="r_factor", type=float)
    pr.add_argument("--tmax-zr", dest="tmax_zr", type=float, help="last ct in units of z_R")
    pr.add_argument("--n-times", dest="n_times", type=int)
    pr.add_argument("--convergence", action="store_true", help="also run the resolution-doubling gate")
    _common(pr)

    ph = sub.add_parser("phasemap", help="beam phase map and wavefront spacing", argument_default=sup)
    ph.add_argument("--beam", choices=["gaussian", "lg"])
    ph.add_argument("--kw0", type=float)
    ph.add_argument("--l", type=int)
    ph.add_argument("--p", type=int)
    ph.add_argument("--x-extent", dest="x_extent", type=float, help="half-width in units of w0")
    ph.add_argument("--z-extent", dest="z_extent", type=float, help="half-length in units of z_R")
    ph.add_argument("--samples-per-wavelength", dest="samples_per_wavelength", type=int)
    _common(ph)

    au = sub.add_parser("audit", help="field-theory (em) or Riemann-Silberstein (rs) audit", argument_default=sup)
    au.add_argument("target", choices=["em", "rs"])
    au.add_argument("--kw0", type=float)
    au.add_argument("--polarization", choices=["x-linear", "circular"])
    au.add_argument("--n-kperp", dest="n_kperp", type=int)
    au.add_argument("--n-phi", dest="n_phi", type=int)
    au.add_argument("--n-omega", dest="n_omega", type=int)
    au.add_argument("--bandwidth", type=float)
    au.add_argument("--tmax-zr", dest="tmax_zr", type=float)
    au.add_argument("--n-times", dest="n_times", type=int)
    au.add_argument("--fixture", choices=["vp1-demo"])
    _common(au)
    return parser


def resolve_config(command: str, ns: argparse.Namespace) -> dict:
    """Merge defaults, the JSON config file and explicit flags; reject unknown keys."""
    cfg = dict(DEFAULTS[command])
    explicit = {k: v for k, v in vars(ns).items() if k not in ("command", "selftest", "config", "out")}
    path = getattr(ns, "config", None)
    if path:
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise InvalidArgumentError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(data, dict):
            raise InvalidArgumentError("config must be a flat JSON object")
        data = {k.replace("-", "_"): v for k, v in data.items()}
        data.pop("command", None)
        unknown = sorted(set(data) - set(cfg))
        if unknown:
            raise InvalidArgumentError(f"unknown config keys for {command}: {', '.join(unknown)}")
        for k, v in data.items():
            cfg[k] = _coerce(k, v, cfg[k])
    cfg.update(explicit)
    return cfg


def _coerce(key: str, value, default):
    if default is None or isinstance(default, str):
        return value
    try:
        if isinstance(default, bool):
            if not isinstance(value, bool):
                raise TypeError
            return value
        if isinstance(default, int):
            if isinstance(value, bool) or float(value) != int(value):
                raise TypeError
            return int(value)
        return float(value)
    except (TypeError, ValueError) as exc:
        raise InvalidArgumentError(f"config key {key!r} has the wrong type") from exc


def output_dir(ns: argparse.Namespace) -> Path:
    return Path(getattr(ns, "out", None) or os.environ.get(ENV_OUT) or DEFAULT_OUT)


# -- commands ---------------------------------------------------------------

def velocity_model(cfg: dict) -> SpectralModel:
    beam, k = cfg["beam"], cfg["k"]
    if beam == "gaussian":
        return SpectralModel.gaussian(cfg["kw0"], k=k)
    if beam == "lg":
        return SpectralModel.laguerre_gauss(cfg["kw0"], cfg["l"], cfg["p"], k=k)
    if beam == "bessel":
        return SpectralModel.bessel_ring(cfg["ktr"], l=cfg["l"], k=k)
    return SpectralModel.plane_wave(k=k)


def cmd_velocity(cfg: dict, out: Path) -> int:
    rep = velocimetry.velocity_report(velocity_model(cfg))
    d = rep.to_dict()
    rows = [("v_g", rep.v_g_numeric, rep.v_g_paraxial), ("v_ph", rep.v_ph_numeric, rep.v_ph_paraxial),
            ("1 - v_g", rep.deficit_numeric, rep.deficit_paraxial)]
    print(f"{'quantity':<10}{'numeric':>22}{'paraxial':>22}")
    for name, a, b in rows:
        print(f"{name:<10}{a:>22.15f}{b:>22.15f}")
    print(f"{'v_g v_ph':<10}{rep.product_over_c2:>22.15f}")
    write_json(out / "velocity.json", {"config": cfg, "report": d})
    return 0


def _propagate_spec(cfg: dict) -> wavepacket.WavepacketSpec:
    if cfg["n_times"] < 2 or not cfg["tmax_zr"] > 0:
        raise InvalidArgumentError("need at least two times and a positive tmax_zr")
    z_R = cfg["k0zr"]
    times = tuple(float(x) for x in np.linspace(0.0, cfg["tmax_zr"] * z_R, cfg["n_times"]))
    return wavepacket.WavepacketSpec(z_R=z_R, s=cfg["s"], M=cfg["M"], l=cfg["l"], p=cfg["p"], n_r=cfg["n_r"],
                                     n_z=cfg["n_z"], z_halfwidth=cfg["z_halfwidth"], r_factor=cfg["r_factor"],
                                     times=times)


def cmd_propagate(cfg: dict, out: Path) -> int:
    spec = _propagate_spec(cfg)
    trace = wavepacket.retardation_curve(spec)
    rows = np.column_stack([trace.t, trace.ct, trace.Z_c, trace.Z_E, trace.ret_prob, trace.ret_energy,
                            trace.ret_theory])
    write_csv(out / "centroid.csv", CENTROID_HEADER, rows, params=spec.summary())
    s_prob, s_energy = trace.slope("prob"), trace.slope("energy")
    fitted = s_prob if math.isfinite(s_prob) else s_energy
    mono = 1 - velocimetry.group_velocity(spec.transverse_model(spec.omega0))
    summary = {
        "config": cfg,
        "slope_probability": tagged(s_prob if math.isfinite(s_prob) else None, "numeric"),
        "slope_energy": tagged(s_energy, "numeric"),
        "slope_fitted": tagged(fitted, "numeric"),
        "slope_theory": tagged(trace.theory_slope, "paraxial"),
        "relative_error": tagged(fitted / trace.theory_slope - 1, "numeric"),
        "monochromatic_deficit": tagged(mono, "numeric"),
    }
    if cfg["convergence"]:
        gate = wavepacket.convergence_gate(spec)
        summary["convergence"] = {k: tagged(v, "numeric") for k, v in gate.items()}
    write_json(out / "propagate.json", summary)
    print(f"fitted slope {fitted:.6f}  theory {trace.theory_slope:.6f}  "
          f"relative error {fitted / trace.theory_slope - 1:+.2%}")
    return 0


def cmd_phasemap(cfg: dict, out: Path) -> int:
    l, p = (cfg["l"], cfg["p"]) if cfg["beam"] == "lg" else (0, 0)
    params = BeamParams.from_kw0(cfg["kw0"], l=l, p=p)
    grid = default_phase_grid(params, cfg["x_extent"], cfg["z_extent"], cfg["samples_per_wavelength"])
    pm = phase_map(params, grid)
    X, Z = np.meshgrid(pm.x, pm.z, indexing="ij")
    psi = pm.field.psi
    rows = np.column_stack([X.ravel(), Z.ravel(), psi.real.ravel(), psi.imag.ravel(), pm.field.intensity.ravel(),
                            pm.phase_mod_2pi.ravel(), pm.plane_phase_mod_2pi.ravel()])
    write_csv(out / "phasemap.csv", PHASEMAP_HEADER, rows, params={"kw0": cfg["kw0"], "l": l, "p": p, "k": params.k})
    axis = int(np.argmin(np.abs(pm.x)))
    side = {
        "config": cfg,
        "plane_wave_spacing": tagged(pm.plane_wave_spacing(), "numeric"),
        "plane_wave_spacing_exact": tagged(2 * math.pi / params.k, "identity"),
        "on_axis_max_intensity": tagged(float(np.max(pm.field.intensity[axis])), "numeric"),
        "realspace_phase_velocity": tagged(realspace_phase_velocity(params), "paraxial"),
    }
    if l == 0:
        side["mean_spacing_ratio"] = tagged(pm.mean_spacing_ratio(), "numeric")
        side["crossing_spacing_ratio"] = tagged(pm.crossing_spacing_ratio(), "numeric")
        side["on_axis_local_wavenumber"] = tagged(pm.on_axis_local_wavenumber(), "numeric")
        side["on_axis_local_wavenumber_gouy"] = tagged(params.k - (params.N + 1) / params.z_R, "paraxial")
        print(f"mean wavefront spacing ratio {side['mean_spacing_ratio']['value']:.5f}")
    else:
        print(f"on-axis peak intensity {side['on_axis_max_intensity']['value']:.3e}")
    write_json(out / "phasemap.json", side)
    return 0


def _checks_json(checks: dict) -> dict:
    return {k: {"passed": bool(ok), "value": v, "method": "numeric"} for k, (ok, v) in checks.items()}


def cmd_audit(cfg: dict, out: Path) -> int:
    if cfg["target"] == "rs":
        return _audit_rs(cfg, out)
    if cfg["n_times"] < 2 or not cfg["tmax_zr"] > 0:
        raise InvalidArgumentError("need at least two times and a positive tmax_zr")
    model = SpectralModel.gaussian(cfg["kw0"])
    pws = emfield.synthesize_em(model, cfg["polarization"], n_kperp=cfg["n_kperp"], n_phi=cfg["n_phi"],
                                n_omega=cfg["n_omega"], bandwidth=cfg["bandwidth"])
    times = np.linspace(0.0, cfg["tmax_zr"] * model.z_R, cfg["n_times"])
    audit = emfield.conservation_audit(pws, times)
    write_csv(out / "audit_em.csv", AUDIT_HEADER, audit.rows(), params={"kw0": cfg["kw0"], "n_waves": pws.n})
    checks = audit.checks()
    write_json(out / "audit_em.json", {"config": cfg, "n_waves": pws.n, "n_points": audit.n_points,
                                       "max_leak": tagged(audit.max_leak, "numeric"), "checks": _checks_json(checks)})
    failed = [k for k, (ok, _) in checks.items() if not ok]
    for k, (ok, v) in checks.items():
        print(f"{'PASS' if ok else 'FAIL'}  {k:<16} {v:.3e}")
    return 3 if failed else 0


def _audit_rs(cfg: dict, out: Path) -> int:
    if cfg["fixture"] == "vp1-demo":
        field = rsquantum.two_frequency_fixture()
    else:
        pws = emfield.synthesize_em(SpectralModel.gaussian(cfg["kw0"]), cfg["polarization"], n_kperp=cfg["n_kperp"],
                                    n_phi=cfg["n_phi"], n_omega=cfg["n_omega"], bandwidth=cfg["bandwidth"])
        field = rsquantum.RSSpectralField.from_plane_waves(pws)
    rep = rsquantum.rs_report(field)
    vp = rep["momentum_velocity_proper"]["value"]
    v1 = rep["momentum_velocity_v1"]["value"]
    rep["duality_residual"] = tagged(abs(vp * rep["spin_expectation_z"]["value"] - 1), "identity")
    rep["v1_minus_proper"] = tagged(v1 - vp, "numeric")
    rep["conversion_group_residual"] = tagged(
        abs(rep["wavefunction_group_velocity"]["value"] - rep["spin_expectation_z"]["value"]), "identity")
    rep["conversion_phase_residual"] = tagged(abs(rep["wavefunction_phase_velocity"]["value"] - vp), "identity")
    write_json(out / "audit_rs.json", {"config": cfg, "report": rep})
    for k in sorted(rep):
        print(f"{k:<30} {rep[k]['value']:.15g}")
    ok = (rep["eigen_residual_max"]["value"] < 1e-12 and rep["duality_residual"]["value"] < 1e-12
          and rep["conversion_group_residual"]["value"] < 1e-10 and rep["conversion_phase_residual"]["value"] < 1e-10)
    return 0 if ok else 4


COMMANDS = {"velocity": cmd_velocity, "propagate": cmd_propagate, "phasemap": cmd_phasemap, "audit": cmd_audit}


def selftest() -> int:
    results = acceptance.run_all(print)
    n_ok = sum(c.passed for c in results)
    print(f"{n_ok}/{len(results)} criteria passed")
    return 0 if n_ok == len(results) else 3


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    if ns.selftest:
        return selftest()
    if ns.command is None:
        parser.print_help()
        return 2
    try:
        cfg = resolve_config(ns.command, ns)
        return COMMANDS[ns.command](cfg, output_dir(ns))
    except PhotonVelError as exc:
        print(f"photonvel: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    except Exception:
        traceback.print_exc()
        print("photonvel: internal error", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
