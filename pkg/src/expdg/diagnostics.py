"""Observable time series, rate fitting, convergence orders, energy correction."""
from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np

CSV_CHANNELS = ("electric_energy", "magnetic_energy", "total_energy",
                "mass", "poisson_residual")


@dataclass
class TimeSeries:
    """Sampled diagnostic channels; serializes to a fixed-header CSV."""

    times: list = field(default_factory=list)
    channels: dict = field(default_factory=lambda: {c: [] for c in CSV_CHANNELS})

    def append(self, t: float, record: dict):
        if self.times and t <= self.times[-1]:
            raise ValueError("sample times must be strictly increasing")
        self.times.append(float(t))
        for name, value in record.items():
            self.channels.setdefault(name, []).append(float(value))

    def column(self, name: str) -> np.ndarray:
        return np.asarray(self.channels[name])

    @property
    def t(self) -> np.ndarray:
        return np.asarray(self.times)

    def to_csv(self) -> str:
        out = io.StringIO()
        out.write("t," + ",".join(CSV_CHANNELS) + "\n")
        for i, t in enumerate(self.times):
            row = [t] + [self.channels[c][i] for c in CSV_CHANNELS]
            out.write(",".join(f"{v:.17g}" for v in row) + "\n")
        return out.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "TimeSeries":
        lines = [ln for ln in text.strip().splitlines() if ln]
        header = lines[0].split(",")
        if header != ["t"] + list(CSV_CHANNELS):
            raise ValueError(f"unexpected CSV header: {lines[0]!r}")
        series = cls()
        for ln in lines[1:]:
            vals = [float(v) for v in ln.split(",")]
            series.append(vals[0], dict(zip(CSV_CHANNELS, vals[1:])))
        return series


@dataclass(frozen=True)
class RateFit:
    rate: float
    window: tuple[float, float]
    r_squared: float


def fit_rate(times, values, window, use_peaks: bool = False) -> RateFit:
    """Least-squares slope of log(values) over the window.

    With `use_peaks` the fit runs on the local maxima of the channel, which
    removes the oscillation of damped wave envelopes from the fit.
    """
    t = np.asarray(times, dtype=float)
    v = np.asarray(values, dtype=float)
    sel = (t >= window[0]) & (t <= window[1])
    t, v = t[sel], v[sel]
    if use_peaks:
        interior = (v[1:-1] > v[:-2]) & (v[1:-1] > v[2:])
        idx = np.flatnonzero(interior) + 1
        if len(idx) >= 3:
            t, v = t[idx], v[idx]
    if len(t) < 2:
        raise ValueError("window contains fewer than 2 samples")
    if np.any(v <= 0):
        raise ValueError("rate fit needs strictly positive channel values")
    logv = np.log(v)
    slope, intercept = np.polyfit(t, logv, 1)
    pred = slope * t + intercept
    ss_res = float(((logv - pred) ** 2).sum())
    ss_tot = float(((logv - logv.mean()) ** 2).sum())
    r2 = 1.0 if ss_tot == 0.0 else max(0.0, 1.0 - ss_res / ss_tot)
    return RateFit(rate=float(slope), window=(float(window[0]), float(window[1])),
                   r_squared=r2)


def energy_correction(model, y: np.ndarray, h_target: float) -> tuple[np.ndarray, float]:
    """Rescale the full state so the total energy hits h_target exactly.

    The energy is linear in f (kinetic part K) and quadratic in the fields
    (part F): H(lam*y) = lam*K + lam^2*F, so lam solves a scalar quadratic in
    closed form.  Returns (corrected state, lam).
    """
    if h_target <= 0:
        raise ValueError("target energy must be positive")
    kin, fld = model.energy_split(y)
    if kin + fld <= 0:
        raise ValueError("current energy must be positive")
    # stable root of fld*lam^2 + kin*lam = h_target; no cancellation when fld << kin
    lam = 2.0 * h_target / (kin + np.sqrt(kin * kin + 4.0 * fld * h_target))
    return lam * y, float(lam)


def convergence_orders(runs) -> list[float]:
    """Observed orders log(e_i/e_{i+1}) / log(h_i/h_{i+1}) between consecutive runs."""
    if len(runs) < 2:
        raise ValueError("need at least two (h, error) pairs")
    orders = []
    for (h0, e0), (h1, e1) in zip(runs[:-1], runs[1:]):
        if h0 == h1:
            raise ValueError("degenerate pair: equal resolutions")
        if e0 <= 0 or e1 <= 0:
            raise ValueError("errors must be positive")
        orders.append(float(np.log(e0 / e1) / np.log(h0 / h1)))
    return orders


def order_table_csv(rows) -> str:
    """rows: list of (h, err_linf, err_l2); orders inserted between lines."""
    out = ["h,error_linf,order_linf,error_l2,order_l2"]
    prev = None
    for h, einf, el2 in rows:
        if prev is None:
            oinf = ol2 = ""
        else:
            oinf = f"{np.log(prev[1] / einf) / np.log(prev[0] / h):.17g}"
            ol2 = f"{np.log(prev[2] / el2) / np.log(prev[0] / h):.17g}"
        out.append(f"{h:.17g},{einf:.17g},{oinf},{el2:.17g},{ol2}")
        prev = (h, einf, el2)
    return "\n".join(out) + "\n"
