"""Explicit Lawson-Runge-Kutta stepping over an abstract model interface.

A model exposes exp_L(frac, y) = exp(frac*dt*L) y and nonlinear(y) = N(y);
the stepper never forms an exponential itself, it only requests the stage
fractions collected by `required_fractions` at configuration time.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ButcherTableau:
    name: str
    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    order: int

    def __post_init__(self):
        a, b, c = np.asarray(self.a), np.asarray(self.b), np.asarray(self.c)
        s = len(b)
        if a.shape != (s, s) or c.shape != (s,):
            raise ValueError("inconsistent tableau dimensions")
        if np.any(np.triu(a) != 0.0):
            raise ValueError("tableau must be strictly lower triangular (explicit)")
        if abs(b.sum() - 1.0) > 1e-14:
            raise ValueError("weights must sum to 1")
        if np.abs(a.sum(axis=1) - c).max() > 1e-14:
            raise ValueError("stage nodes must satisfy c_i = sum_j a_ij")

    @property
    def stages(self) -> int:
        return len(self.b)


def builtin_tableaux() -> dict[str, ButcherTableau]:
    """Euler, SSP-RK(3,3) (default third order), classical Kutta RK3 and RK(4,4)."""
    euler = ButcherTableau("euler", np.zeros((1, 1)), np.array([1.0]), np.array([0.0]), order=1)
    a33 = np.zeros((3, 3))
    a33[1, 0] = 1.0
    a33[2, 0] = a33[2, 1] = 0.25
    rk33 = ButcherTableau("rk33", a33, np.array([1 / 6, 1 / 6, 2 / 3]),
                          np.array([0.0, 1.0, 0.5]), order=3)
    ak3 = np.zeros((3, 3))
    ak3[1, 0] = 0.5
    ak3[2, 0], ak3[2, 1] = -1.0, 2.0
    kutta3 = ButcherTableau("rk33_classical", ak3, np.array([1 / 6, 2 / 3, 1 / 6]),
                            np.array([0.0, 0.5, 1.0]), order=3)
    a44 = np.zeros((4, 4))
    a44[1, 0] = 0.5
    a44[2, 1] = 0.5
    a44[3, 2] = 1.0
    rk44 = ButcherTableau("rk44", a44, np.array([1 / 6, 1 / 3, 1 / 3, 1 / 6]),
                          np.array([0.0, 0.5, 0.5, 1.0]), order=4)
    return {t.name: t for t in (euler, rk33, kutta3, rk44)}


def required_fractions(tableau: ButcherTableau) -> list[float]:
    """Every exp(frac*dt*L) the Lawson transform of this tableau needs."""
    c = tableau.c
    fr = {1.0}
    for i in range(tableau.stages):
        fr.add(float(c[i]))
        fr.add(float(1.0 - c[i]))
        for j in range(i):
            if tableau.a[i, j] != 0.0:
                fr.add(float(c[i] - c[j]))
    fr.discard(0.0)
    return sorted(fr)


def lawson_step(model, tableau: ButcherTableau, y: np.ndarray, dt: float) -> np.ndarray:
    """One Lawson step: RK applied to the exp(-tL)-transformed variable.

    K_i = N( exp_L(c_i) y + dt sum_j a_ij exp_L(c_i - c_j) K_j )
    y'  = exp_L(1) y + dt sum_i b_i exp_L(1 - c_i) K_i
    """
    if dt != model.dt:
        raise ValueError("model exponential cache was built for a different dt")
    a, b, c = tableau.a, tableau.b, tableau.c
    stages = []
    for i in range(tableau.stages):
        acc = model.exp_L(float(c[i]), y)
        for j in range(i):
            if a[i, j] != 0.0:
                acc = acc + (dt * a[i, j]) * model.exp_L(float(c[i] - c[j]), stages[j])
        stages.append(model.nonlinear(acc))
    out = model.exp_L(1.0, y)
    for i in range(tableau.stages):
        if b[i] != 0.0:
            out = out + (dt * b[i]) * model.exp_L(float(1.0 - c[i]), stages[i])
    return out
