import numpy as np
import pytest

from expdg.lawson import ButcherTableau, builtin_tableaux, lawson_step, required_fractions


class ScalarToy:
    """u' = lam*u + gamma*u^2 with exact linear exponential."""

    def __init__(self, lam, gamma, dt):
        self.lam = lam
        self.gamma = gamma
        self.dt = dt

    def exp_L(self, frac, y):
        return np.exp(self.lam * frac * self.dt) * y

    def nonlinear(self, y):
        return self.gamma * y * y


class LinearToy:
    def __init__(self, lam, dt):
        self.lam = lam
        self.dt = dt

    def exp_L(self, frac, y):
        return np.exp(self.lam * frac * self.dt) * y

    def nonlinear(self, y):
        return np.zeros_like(y)


def test_tableau_catalog():
    tabs = builtin_tableaux()
    assert set(tabs) == {"euler", "rk33", "rk33_classical", "rk44"}
    rk33 = tabs["rk33"]
    assert rk33.b.sum() == pytest.approx(1.0)
    assert rk33.c == pytest.approx([0.0, 1.0, 0.5])
    rk44 = tabs["rk44"]
    assert rk44.c == pytest.approx([0.0, 0.5, 0.5, 1.0])
    euler = tabs["euler"]
    assert euler.stages == 1 and euler.b == pytest.approx([1.0])


def test_tableau_validation_rejects_bad_input():
    with pytest.raises(ValueError):
        ButcherTableau("bad", np.array([[0.5]]), np.array([1.0]), np.array([0.5]), 1)
    with pytest.raises(ValueError):
        ButcherTableau("bad", np.zeros((2, 2)), np.array([0.7, 0.7]), np.zeros(2), 1)


def test_tableau_order_conditions():
    # quadrature-style order conditions up to the declared order
    for tab in builtin_tableaux().values():
        a, b, c = tab.a, tab.b, tab.c
        assert b.sum() == pytest.approx(1.0, abs=1e-14)
        if tab.order >= 2:
            assert b @ c == pytest.approx(0.5, abs=1e-14)
        if tab.order >= 3:
            assert b @ c**2 == pytest.approx(1.0 / 3.0, abs=1e-14)
            assert b @ (a @ c) == pytest.approx(1.0 / 6.0, abs=1e-14)
        if tab.order >= 4:
            assert b @ c**3 == pytest.approx(0.25, abs=1e-14)
            assert (b * c) @ (a @ c) == pytest.approx(1.0 / 8.0, abs=1e-14)
            assert b @ (a @ c**2) == pytest.approx(1.0 / 12.0, abs=1e-14)
            assert b @ (a @ (a @ c)) == pytest.approx(1.0 / 24.0, abs=1e-14)


def test_required_fractions():
    tabs = builtin_tableaux()
    assert required_fractions(tabs["euler"]) == [1.0]
    assert required_fractions(tabs["rk33"]) == [-0.5, 0.5, 1.0]
    assert required_fractions(tabs["rk44"]) == [0.5, 1.0]


@pytest.mark.parametrize("name", ["euler", "rk33", "rk33_classical", "rk44"])
def test_linear_exactness(name):
    tab = builtin_tableaux()[name]
    model = LinearToy(lam=2.3j - 0.4, dt=0.37)
    y0 = np.array([1.0 + 0.5j])
    y1 = lawson_step(model, tab, y0, 0.37)
    assert abs(y1[0] - model.exp_L(1.0, y0)[0]) <= 1e-12 * abs(y1[0])


def test_euler_reduces_to_first_order_formula():
    tab = builtin_tableaux()["euler"]
    model = ScalarToy(lam=1.1j, gamma=0.2, dt=0.21)
    y0 = np.array([0.7 + 0.1j])
    got = lawson_step(model, tab, y0, 0.21)
    el = np.exp(model.lam * model.dt)
    expected = el * y0 + 0.21 * el * model.nonlinear(y0)
    assert got == pytest.approx(expected, rel=1e-14)


@pytest.mark.parametrize("name,order", [("euler", 1), ("rk33", 3),
                                        ("rk33_classical", 3), ("rk44", 4)])
def test_observed_order_on_scalar_toy(name, order):
    lam, gamma = 1.0j, 1.0
    t_final = 1.0
    y0 = np.array([0.1 + 0.05j])

    def run(dt):
        model = ScalarToy(lam, gamma, dt)
        tab = builtin_tableaux()[name]
        y = y0.copy()
        for _ in range(int(round(t_final / dt))):
            y = lawson_step(model, tab, y, dt)
        return y[0]

    ref_model = ScalarToy(lam, gamma, 1e-4)
    ref = y0.copy()
    tab_ref = builtin_tableaux()["rk44"]
    for _ in range(10000):
        ref = lawson_step(ref_model, tab_ref, ref, 1e-4)
    errs = [abs(run(dt) - ref[0]) for dt in (0.05, 0.025)]
    observed = np.log2(errs[0] / errs[1])
    assert observed == pytest.approx(order, abs=0.1)


def test_step_rejects_mismatched_dt():
    model = LinearToy(1.0, dt=0.1)
    with pytest.raises(ValueError):
        lawson_step(model, builtin_tableaux()["euler"], np.array([1.0]), 0.2)


def test_determinism():
    model = ScalarToy(0.9j, 0.3, 0.11)
    tab = builtin_tableaux()["rk33"]
    y = np.array([0.3 + 0.2j])
    a = lawson_step(model, tab, y, 0.11)
    b = lawson_step(model, tab, y.copy(), 0.11)
    assert a[0] == b[0]
