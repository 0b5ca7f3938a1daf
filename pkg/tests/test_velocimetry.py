import math
import warnings
from dataclasses import replace

import pytest
from hypothesis import given
from hypothesis import strategies as st

from photonvel.spectra import ParaxialityWarning, SpectralModel
from photonvel.velocimetry import group_velocity, paraxial_prediction, phase_velocity, velocity_report


def test_gaussian_kw0_5():
    m = SpectralModel.gaussian(5.0)
    assert group_velocity(m) == pytest.approx(0.96, abs=0.01)
    assert phase_velocity(m) == pytest.approx(1 / 0.96, abs=0.01)


def test_plane_wave_exact():
    m = SpectralModel.plane_wave()
    assert group_velocity(m) == 1.0
    assert phase_velocity(m) == 1.0
    rep = velocity_report(m)
    assert rep.deficit_numeric == 0.0 and rep.deficit_paraxial == 0.0


def test_lg_n4():
    assert group_velocity(SpectralModel.laguerre_gauss(10.0, 2, 1)) == pytest.approx(0.95, abs=0.002)


def test_bessel_phase_velocity():
    assert phase_velocity(SpectralModel.bessel_ring(0.1)) == pytest.approx(1 / math.sqrt(0.99), abs=1e-4)


def test_paraxial_predictions():
    assert paraxial_prediction(SpectralModel.gaussian(5.0)) == pytest.approx((0.96, 1.04), abs=1e-14)
    assert paraxial_prediction(SpectralModel.laguerre_gauss(10.0, 2, 1)) == pytest.approx((0.95, 1.05), abs=1e-14)
    b0 = paraxial_prediction(SpectralModel.bessel_ring(0.1, l=0))
    b5 = paraxial_prediction(SpectralModel.bessel_ring(0.1, l=5))
    assert b0 == b5 == pytest.approx((0.995, 1.005), abs=1e-14)


def test_bessel_order_independent_numeric():
    a = group_velocity(SpectralModel.bessel_ring(0.1, l=0))
    b = group_velocity(SpectralModel.bessel_ring(0.1, l=5))
    assert a == b


def test_report_kw0_50():
    rep = velocity_report(SpectralModel.gaussian(50.0))
    assert abs(rep.deficit_numeric / rep.deficit_paraxial - 1) < 1e-3


def test_report_product_and_methods():
    rep = velocity_report(SpectralModel.gaussian(5.0))
    assert abs(rep.product_over_c2 - 1) <= 1e-12
    d = rep.to_dict()
    for key, val in d.items():
        if key != "model":
            assert val["method"] in {"numeric", "paraxial", "identity"}


def test_paraxial_warning_small_waist():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ParaxialityWarning)
        m = SpectralModel.gaussian(2.0)
    with pytest.warns(ParaxialityWarning):
        paraxial_prediction(m)


models = st.one_of(
    st.builds(SpectralModel.gaussian, st.floats(3.5, 200)),
    st.builds(SpectralModel.laguerre_gauss, st.floats(5, 200), st.integers(-4, 4), st.integers(0, 3)),
    st.builds(SpectralModel.bessel_ring, st.floats(0.01, 0.9), st.integers(0, 6)),
)


@given(m=models)
def test_product_law_and_sides(m):
    vg, vph = group_velocity(m), phase_velocity(m)
    assert abs(vg * vph - 1) <= 1e-12
    assert vg < 1 < vph


@given(kw0=st.floats(30, 100))
def test_lg_scaling(kw0):
    d0 = 1 - group_velocity(SpectralModel.laguerre_gauss(kw0, 0, 0))
    for n in range(1, 7):
        dn = 1 - group_velocity(SpectralModel.laguerre_gauss(kw0, n, 0))
        assert dn / d0 == pytest.approx(n + 1, rel=0.01)


@pytest.mark.parametrize("kw0", [5.0, 10.0, 50.0])
def test_quadrature_converged(kw0):
    m = SpectralModel.gaussian(kw0)
    assert abs(group_velocity(replace(m, n_radial=512)) - group_velocity(m)) < 1e-12
