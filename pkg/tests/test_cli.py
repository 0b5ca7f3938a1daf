import json

import pytest

from photonvel.cli import CENTROID_HEADER, PHASEMAP_HEADER, main
from photonvel.export import read_csv


def run(tmp_path, *args, name="out"):
    out = tmp_path / name
    code = main([*args, "--out", str(out)])
    return code, out


def load(path):
    return json.loads(path.read_text())


def methods(obj):
    if isinstance(obj, dict):
        if "value" in obj:
            yield obj.get("method")
        else:
            for k, v in obj.items():
                if k != "config":
                    yield from methods(v)


@pytest.mark.parametrize("args, want, tol", [
    (["--beam", "gaussian", "--kw0", "5"], 0.96, 0.01),
    (["--beam", "lg", "--l", "2", "--p", "1", "--kw0", "10"], 0.95, 0.01),
])
def test_velocity_examples(tmp_path, args, want, tol):
    code, out = run(tmp_path, "velocity", *args)
    rep = load(out / "velocity.json")["report"]
    assert code == 0
    assert rep["v_g_numeric"]["value"] == pytest.approx(want, abs=tol)
    assert set(methods(rep)) <= {"numeric", "paraxial", "identity"}


def test_bessel_order_independent(tmp_path):
    vals = []
    for l in ("0", "5"):
        code, out = run(tmp_path, "velocity", "--beam", "bessel", "--ktr", "0.1", "--l", l, name=l)
        assert code == 0
        vals.append(load(out / "velocity.json")["report"]["v_g_numeric"]["value"])
    assert vals[0] == vals[1]


def test_invalid_value_exit_2(tmp_path, capsys):
    code, _ = run(tmp_path, "velocity", "--kw0", "-1")
    assert code == 2
    assert capsys.readouterr().err


def test_unknown_config_key_exit_2(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"kw0": 5, "colour": "red"}))
    assert run(tmp_path, "velocity", "--config", str(cfg))[0] == 2


def test_config_file_and_flag_precedence(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"beam": "gaussian", "kw0": 5}))
    _, out = run(tmp_path, "velocity", "--config", str(cfg), name="a")
    assert load(out / "velocity.json")["config"]["kw0"] == 5
    _, out = run(tmp_path, "velocity", "--config", str(cfg), "--kw0", "20", name="b")
    assert load(out / "velocity.json")["config"]["kw0"] == 20


def test_output_dir_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("PHOTONVEL_OUT", str(tmp_path / "env"))
    assert main(["velocity", "--kw0", "5"]) == 0
    assert (tmp_path / "env" / "velocity.json").exists()


def test_phasemap_gaussian(tmp_path):
    code, out = run(tmp_path, "phasemap", "--beam", "gaussian", "--kw0", "5")
    side = load(out / "phasemap.json")
    assert code == 0
    assert side["mean_spacing_ratio"]["value"] == pytest.approx(1.04, abs=0.005)
    assert side["plane_wave_spacing"]["value"] == pytest.approx(side["plane_wave_spacing_exact"]["value"],
                                                                rel=1e-12)
    params, header, data = read_csv(out / "phasemap.csv")
    assert header == PHASEMAP_HEADER and data.shape[1] == len(PHASEMAP_HEADER)


def test_phasemap_vortex_null(tmp_path):
    code, out = run(tmp_path, "phasemap", "--beam", "lg", "--l", "3", "--p", "0")
    assert code == 0
    assert load(out / "phasemap.json")["on_axis_max_intensity"]["value"] < 1e-20


def test_audit_rs(tmp_path):
    code, out = run(tmp_path, "audit", "rs", "--kw0", "10")
    rep = load(out / "audit_rs.json")["report"]
    assert code == 0
    assert rep["eigen_residual_max"]["value"] < 1e-12
    assert rep["duality_residual"]["value"] < 1e-12


def test_audit_rs_fixture(tmp_path):
    code, out = run(tmp_path, "audit", "rs", "--fixture", "vp1-demo")
    rep = load(out / "audit_rs.json")["report"]
    assert code == 0
    assert abs(rep["v1_minus_proper"]["value"]) > 1e-3
    assert rep["conversion_group_residual"]["value"] < 1e-12
    assert rep["conversion_phase_residual"]["value"] < 1e-12


def test_propagate_monochromatic(tmp_path):
    code, out = run(tmp_path, "propagate", "--M", "1", "--n-times", "3")
    summary = load(out / "propagate.json")
    assert code == 0
    assert summary["slope_probability"]["value"] is None
    assert abs(summary["slope_fitted"]["value"] + summary["monochromatic_deficit"]["value"]) < 1e-6
    _, header, data = read_csv(out / "centroid.csv")
    assert header == CENTROID_HEADER and data.shape == (3, len(CENTROID_HEADER))


def test_deterministic_outputs(tmp_path):
    for name in ("a", "b"):
        assert run(tmp_path, "phasemap", "--kw0", "5", name=name)[0] == 0
        assert run(tmp_path, "audit", "rs", "--fixture", "vp1-demo", name=name)[0] == 0
    for f in ("phasemap.csv", "phasemap.json", "audit_rs.json"):
        assert (tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()


def test_no_command_exit_2(capsys):
    assert main([]) == 2


def test_propagate_defaults(tmp_path):
    code, out = run(tmp_path, "propagate")
    summary = load(out / "propagate.json")
    assert code == 0
    assert summary["slope_fitted"]["value"] == pytest.approx(-0.05, rel=0.15)


def test_audit_em(tmp_path):
    code, out = run(tmp_path, "audit", "em", "--kw0", "10")
    audit = load(out / "audit_em.json")
    assert code == 0
    assert all(c["passed"] for c in audit["checks"].values())
    assert audit["checks"]["boost_drift"]["value"] < 1e-3
