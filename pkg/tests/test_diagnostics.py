import numpy as np
import pytest

from expdg.dg_core import DGSpace
from expdg.diagnostics import (
    CSV_CHANNELS,
    TimeSeries,
    convergence_orders,
    energy_correction,
    fit_rate,
    order_table_csv,
)
from expdg.lawson import builtin_tableaux, lawson_step, required_fractions
from expdg.models import VlasovAmpereModel
from expdg.phase_space import VelocityGrid


def _landau_model(dt=0.1):
    space = DGSpace(9, 2, 0.0, 4.0 * np.pi)
    grid = VelocityGrid(8.0, 32)
    return VlasovAmpereModel(space, grid).prepare(dt, (1.0, 0.5, -0.5))


def test_zero_state_observables():
    model = _landau_model()
    y = np.zeros((32 + 1) * model.space.n_dof)
    obs = model.observables(y)
    for name in ("electric_energy", "magnetic_energy", "total_energy", "mass"):
        assert obs[name] == 0.0


def test_homogeneous_maxwellian_energy_constant():
    model = _landau_model(dt=0.05)
    tab = builtin_tableaux()["rk33"]
    model = VlasovAmpereModel(model.space, model.grid).prepare(0.05, required_fractions(tab))
    y = model.initial_state(lambda x, v: np.exp(-v**2 / 2) / np.sqrt(2 * np.pi)
                            * np.ones_like(x))
    h0 = model.observables(y)["total_energy"]
    assert model.observables(y)["electric_energy"] <= 1e-14
    for _ in range(20):
        y = lawson_step(model, tab, y, 0.05)
    h1 = model.observables(y)["total_energy"]
    assert abs(h1 - h0) <= 1e-11 * abs(h0)


def test_initial_electric_energy_is_poisson_norm():
    model = _landau_model()
    y = model.initial_state(lambda x, v: np.exp(-v**2 / 2) / np.sqrt(2 * np.pi)
                            * (1 + 1e-3 * np.cos(0.5 * x)))
    _, e = model.unpack(y)
    assert model.observables(y)["electric_energy"] == pytest.approx(model.core.l2(e))


# -- rate fitting --------------------------------------------------------------


def test_fit_rate_exact_exponential():
    t = np.linspace(0.0, 50.0, 401)
    fit = fit_rate(t, 2.7 * np.exp(0.03 * t), (5.0, 45.0))
    assert fit.rate == pytest.approx(0.03, abs=1e-8)
    assert fit.r_squared > 0.999999


def test_fit_rate_scale_invariance():
    t = np.linspace(0.0, 20.0, 200)
    v = np.exp(-0.12 * t) * (1.1 + 0.3 * np.sin(3 * t)) + 1e-9
    f1 = fit_rate(t, v, (1.0, 19.0))
    f2 = fit_rate(t, 77.7 * v, (1.0, 19.0))
    assert f1.rate == pytest.approx(f2.rate, rel=1e-12)


def test_fit_rate_peaks_on_damped_oscillation():
    t = np.linspace(0.0, 40.0, 2001)
    v = np.abs(np.cos(1.4 * t)) * np.exp(-0.153 * t) + 1e-300
    fit = fit_rate(t, v, (2.0, 38.0), use_peaks=True)
    assert fit.rate == pytest.approx(-0.153, rel=1e-3)


def test_fit_rate_rejects_nonpositive():
    t = np.linspace(0.0, 1.0, 10)
    with pytest.raises(ValueError):
        fit_rate(t, np.linspace(-1, 1, 10), (0.0, 1.0))


# -- energy correction ----------------------------------------------------------


def test_energy_correction_identity_at_target():
    model = _landau_model()
    y = model.initial_state(lambda x, v: np.exp(-v**2 / 2) / np.sqrt(2 * np.pi)
                            * (1 + 0.01 * np.cos(0.5 * x)))
    h = model.observables(y)["total_energy"]
    y2, lam = energy_correction(model, y, h)
    assert lam == pytest.approx(1.0, abs=1e-13)
    assert y2 == pytest.approx(y)


def test_energy_correction_quarter_energy_pure_field():
    # state with only quadratic (field) energy: H = 4 H_target => lam = 1/2
    model = _landau_model()
    f = np.zeros((32, model.space.n_dof))
    e = np.zeros(model.space.n_dof)
    e[0::3] = 2.0
    y = model.pack(f, e)
    h = model.observables(y)["total_energy"]
    y2, lam = energy_correction(model, y, h / 4.0)
    assert lam == pytest.approx(0.5, rel=1e-13)


def test_energy_correction_exact_for_mixed_state():
    model = _landau_model()
    y = model.initial_state(lambda x, v: np.exp(-v**2 / 2) / np.sqrt(2 * np.pi)
                            * (1 + 0.2 * np.cos(0.5 * x)))
    h = model.observables(y)["total_energy"]
    target = 1.01 * h
    y2, lam = energy_correction(model, y, target)
    h2 = model.observables(y2)["total_energy"]
    assert abs(h2 - target) <= 1e-12 * target


# -- convergence orders ----------------------------------------------------------


def test_convergence_orders_trivial():
    orders = convergence_orders([(2.0, 4.0), (1.0, 1.0)])
    assert orders == pytest.approx([2.0])
    with pytest.raises(ValueError):
        convergence_orders([(1.0, 1.0), (1.0, 0.5)])


def test_order_table_csv_shape():
    text = order_table_csv([(0.2, 1e-2, 2e-2), (0.1, 2.5e-3, 5e-3)])
    lines = text.strip().splitlines()
    assert lines[0] == "h,error_linf,order_linf,error_l2,order_l2"
    assert len(lines) == 3
    last = lines[2].split(",")
    assert float(last[2]) == pytest.approx(2.0)
    assert float(last[4]) == pytest.approx(2.0)


# -- time series / CSV ------------------------------------------------------------


def test_timeseries_roundtrip():
    series = TimeSeries()
    series.append(0.0, dict(zip(CSV_CHANNELS, [1.0, 0.5, 2.0, 3.0, 1e-15])))
    series.append(0.1, dict(zip(CSV_CHANNELS, [0.9, 0.6, 2.0, 3.0, 2e-15])))
    text = series.to_csv()
    assert text.splitlines()[0] == "t,electric_energy,magnetic_energy,total_energy,mass,poisson_residual"
    back = TimeSeries.from_csv(text)
    assert back.t == pytest.approx(series.t)
    for name in CSV_CHANNELS:
        assert back.column(name) == pytest.approx(series.column(name), rel=0, abs=0)


def test_timeseries_full_precision():
    series = TimeSeries()
    val = 0.1 + 2e-17
    series.append(0.0, dict(zip(CSV_CHANNELS, [val, 0, 0, 0, 0])))
    back = TimeSeries.from_csv(series.to_csv())
    assert back.column("electric_energy")[0] == series.column("electric_energy")[0]


def test_timeseries_rejects_nonmonotone():
    series = TimeSeries()
    series.append(0.0, dict(zip(CSV_CHANNELS, [0] * 5)))
    with pytest.raises(ValueError):
        series.append(0.0, dict(zip(CSV_CHANNELS, [0] * 5)))
