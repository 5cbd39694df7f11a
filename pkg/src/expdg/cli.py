"""Scenario runner and convergence-study driver.

Configs are flat key=value text with [model]/[numerics]/[physics]/[output]
sections; every benchmark scenario ships as a named preset so `expdg run landau`
needs no file.  Exit codes: 0 success, 2 configuration error, 3 numerical
failure (NaN abort).
"""
from __future__ import annotations

import argparse
import configparser
import dataclasses
import io
import json
import pathlib
import sys
import time
from dataclasses import dataclass

import numpy as np

from . import diagnostics, models
from .dg_core import DGField, DGSpace, FluxKind, evaluate_cellwise, reconstruct
from .diagnostics import TimeSeries
from .lawson import builtin_tableaux, lawson_step, required_fractions
from .phase_space import DerivativeScheme, VelocityGrid


class ConfigError(ValueError):
    pass


class NumericalError(RuntimeError):
    pass


MODEL_KINDS = ("transport2d", "vlasov_ampere", "vlasov_maxwell_dg", "vlasov_maxwell_fourier")
SCENARIOS = ("landau", "two_stream", "weibel", "streaming_weibel", "custom")


@dataclass
class ScenarioConfig:
    model: str = "vlasov_ampere"
    scenario: str = "landau"
    # numerics
    degree: int = 2
    n_x: int = 31
    n_v1: int = 121
    n_v2: int = 0
    v_max1: float = 9.0
    v_max2: float = 0.0
    dt: float = 0.1
    t_final: float = 100.0
    tableau: str = "rk33"
    flux: str = "central"
    velocity_scheme: str = "cd4"
    energy_correction: bool = False
    # physics
    alpha: float = 0.0
    k_wave: float = 0.5
    sigma1: float = 1.0
    sigma2: float = 1.0
    beta: float = 0.0
    v01: float = 0.0
    v02: float = 0.0
    delta: float = 0.0
    # output
    sample_stride: int = 1
    snapshot_count: int = 0
    fit_channel: str = "electric_energy"
    fit_window_lo: float = 0.0
    fit_window_hi: float = 0.0
    fit_peaks: bool = False

    def validate(self):
        if self.model not in MODEL_KINDS:
            raise ConfigError(f"unknown model {self.model!r}")
        if self.scenario not in SCENARIOS:
            raise ConfigError(f"unknown scenario {self.scenario!r}")
        if self.model != "transport2d" and self.flux != "central":
            raise ConfigError(
                "Vlasov models require the central flux: an upwind linear part "
                "splits by the sign of v and prevents a discrete Poisson "
                "equation from being satisfied"
            )
        if min(self.degree, self.n_x, self.n_v1) < 0 or self.n_x < 2:
            raise ConfigError("mesh sizes must be positive")
        if self.dt <= 0 or self.t_final <= 0:
            raise ConfigError("dt and t_final must be positive")
        if self.tableau not in builtin_tableaux():
            raise ConfigError(f"unknown tableau {self.tableau!r}")
        if self.velocity_scheme not in ("cd2", "cd4", "up3"):
            raise ConfigError(f"unknown velocity scheme {self.velocity_scheme!r}")
        if self.sample_stride < 1:
            raise ConfigError("sample_stride must be >= 1")


_SECTIONS = {
    "model": ("model", "scenario"),
    "numerics": ("degree", "n_x", "n_v1", "n_v2", "v_max1", "v_max2", "dt",
                 "t_final", "tableau", "flux", "velocity_scheme", "energy_correction"),
    "physics": ("alpha", "k_wave", "sigma1", "sigma2", "beta", "v01", "v02", "delta"),
    "output": ("sample_stride", "snapshot_count", "fit_channel",
               "fit_window_lo", "fit_window_hi", "fit_peaks"),
}


def serialize_config(cfg: ScenarioConfig) -> str:
    out = io.StringIO()
    for section, keys in _SECTIONS.items():
        out.write(f"[{section}]\n")
        for key in keys:
            value = getattr(cfg, key)
            if isinstance(value, (float, np.floating)):
                out.write(f"{key} = {float(value)!r}\n")
            else:
                out.write(f"{key} = {value}\n")
        out.write("\n")
    return out.getvalue()


def parse_config(text: str) -> ScenarioConfig:
    parser = configparser.ConfigParser()
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse config: {exc}") from exc
    fields = {f.name: f for f in dataclasses.fields(ScenarioConfig)}
    kwargs = {}
    for section in parser.sections():
        if section not in _SECTIONS:
            raise ConfigError(f"unknown config section [{section}]")
        for key, raw in parser.items(section):
            if key not in _SECTIONS[section]:
                raise ConfigError(f"unknown key {key!r} in [{section}]")
            ftype = fields[key].type
            try:
                if ftype in ("bool", bool):
                    kwargs[key] = raw.strip().lower() in ("1", "true", "yes", "on")
                elif ftype in ("int", int):
                    kwargs[key] = int(raw)
                elif ftype in ("float", float):
                    kwargs[key] = float(raw)
                else:
                    kwargs[key] = raw.strip()
            except ValueError as exc:
                raise ConfigError(f"bad value for {key}: {raw!r}") from exc
    cfg = ScenarioConfig(**kwargs)
    cfg.validate()
    return cfg


def presets() -> dict[str, ScenarioConfig]:
    sw_sigma = float(0.1 / np.sqrt(2.0))
    w_sigma1 = float(0.02 / np.sqrt(2.0))
    return {
        "landau": ScenarioConfig(
            model="vlasov_ampere", scenario="landau", degree=2, n_x=31,
            n_v1=121, v_max1=9.0, dt=0.1, t_final=100.0, alpha=1e-3, k_wave=0.5,
            fit_channel="electric_energy", fit_window_lo=5.0, fit_window_hi=40.0,
            fit_peaks=True),
        "two_stream": ScenarioConfig(
            model="vlasov_ampere", scenario="two_stream", degree=2, n_x=31,
            n_v1=121, v_max1=9.0, dt=0.1, t_final=300.0, alpha=1e-3, k_wave=0.5,
            fit_channel="electric_energy", fit_window_lo=12.0, fit_window_hi=28.0,
            fit_peaks=True),
        "weibel": ScenarioConfig(
            model="vlasov_maxwell_dg", scenario="weibel", degree=2, n_x=21,
            n_v1=44, n_v2=44, v_max1=0.2, v_max2=0.2, dt=0.5, t_final=500.0,
            alpha=0.0, k_wave=1.25, sigma1=w_sigma1, sigma2=float(np.sqrt(12.0) * w_sigma1),
            beta=-1e-4, fit_channel="magnetic_energy",
            fit_window_lo=50.0, fit_window_hi=250.0),
        "weibel_fourier": ScenarioConfig(
            model="vlasov_maxwell_fourier", scenario="weibel", n_x=64,
            n_v1=88, n_v2=88, v_max1=0.2, v_max2=0.2, dt=0.5, t_final=500.0,
            velocity_scheme="up3", alpha=0.0, k_wave=1.25, sigma1=w_sigma1,
            sigma2=float(np.sqrt(12.0) * w_sigma1), beta=-1e-4,
            fit_channel="magnetic_energy", fit_window_lo=50.0, fit_window_hi=250.0),
        "streaming_weibel": ScenarioConfig(
            model="vlasov_maxwell_dg", scenario="streaming_weibel", degree=2,
            n_x=21, n_v1=44, n_v2=44, v_max1=1.2, v_max2=1.2, dt=0.1,
            t_final=500.0, k_wave=0.2, sigma1=sw_sigma, sigma2=sw_sigma,
            beta=-1e-3, v01=0.5, v02=-0.1, delta=1.0 / 6.0,
            fit_channel="e2_energy", fit_window_lo=50.0, fit_window_hi=150.0),
        "streaming_weibel_fourier": ScenarioConfig(
            model="vlasov_maxwell_fourier", scenario="streaming_weibel", n_x=64,
            n_v1=88, n_v2=88, v_max1=1.2, v_max2=1.2, dt=0.1, t_final=500.0,
            velocity_scheme="up3", k_wave=0.2, sigma1=sw_sigma, sigma2=sw_sigma,
            beta=-1e-3, v01=0.5, v02=-0.1, delta=1.0 / 6.0,
            fit_channel="e2_energy", fit_window_lo=50.0, fit_window_hi=150.0),
    }


# ---------------------------------------------------------------------------
# initial conditions
# ---------------------------------------------------------------------------


def initial_distribution(cfg: ScenarioConfig):
    a, kw = cfg.alpha, cfg.k_wave
    if cfg.scenario == "landau":
        return lambda x, v: (np.exp(-v**2 / 2.0) / np.sqrt(2.0 * np.pi)
                             * (1.0 + a * np.cos(kw * x)))
    if cfg.scenario == "two_stream":
        return lambda x, v: (v**2 * np.exp(-v**2 / 2.0) / np.sqrt(2.0 * np.pi)
                             * (1.0 + a * np.cos(kw * x)))
    if cfg.scenario == "weibel":
        s1, s2 = cfg.sigma1, cfg.sigma2
        norm = 1.0 / (2.0 * np.pi * s1 * s2)
        return lambda x, v1, v2: (norm
                                  * np.exp(-0.5 * (v1**2 / s1**2 + v2**2 / s2**2))
                                  * (1.0 + a * np.cos(kw * x)))
    if cfg.scenario == "streaming_weibel":
        s, d = cfg.sigma1, cfg.delta
        norm = 1.0 / (2.0 * np.pi * s**2)
        v01, v02 = cfg.v01, cfg.v02
        return lambda x, v1, v2: (norm * np.exp(-v1**2 / (2 * s**2))
                                  * (d * np.exp(-(v2 - v01)**2 / (2 * s**2))
                                     + (1 - d) * np.exp(-(v2 - v02)**2 / (2 * s**2)))
                                  + 0.0 * x)
    raise ConfigError(f"scenario {cfg.scenario!r} has no built-in initial condition")


def build_model(cfg: ScenarioConfig):
    cfg.validate()
    length = 2.0 * np.pi / cfg.k_wave if cfg.model != "transport2d" else 2.0 * np.pi
    scheme = DerivativeScheme(cfg.velocity_scheme)
    if cfg.model == "transport2d":
        space = DGSpace(cfg.n_x, cfg.degree, 0.0, 2.0 * np.pi)
        return models.TransportModel2D(space, cfg.n_v1, FluxKind(cfg.flux), scheme)
    if cfg.model == "vlasov_ampere":
        space = DGSpace(cfg.n_x, cfg.degree, 0.0, length)
        return models.VlasovAmpereModel(space, VelocityGrid(cfg.v_max1, cfg.n_v1), scheme)
    grid1 = VelocityGrid(cfg.v_max1, cfg.n_v1)
    grid2 = VelocityGrid(cfg.v_max2, cfg.n_v2)
    if cfg.model == "vlasov_maxwell_dg":
        space = DGSpace(cfg.n_x, cfg.degree, 0.0, length)
        return models.VlasovMaxwellDGModel(space, grid1, grid2, scheme)
    return models.FourierVMModel(cfg.n_x, length, grid1, grid2, scheme)


def initial_state(cfg: ScenarioConfig, model):
    f0 = initial_distribution(cfg)
    if cfg.model == "transport2d":
        return model.initial_state(lambda x, v: np.sin(x + v))
    if cfg.model == "vlasov_ampere":
        return model.initial_state(f0)
    b0 = lambda x: cfg.beta * np.cos(cfg.k_wave * x)
    e20 = lambda x: 0.0 * x
    return model.initial_state(f0, b0, e20)


# ---------------------------------------------------------------------------
# scenario runner
# ---------------------------------------------------------------------------


@dataclass
class RunReport:
    config_text: str
    wall_time: float
    n_steps: int
    final_observables: dict
    rate: float | None
    rate_r_squared: float | None
    max_poisson_residual: float
    max_energy_drift: float
    max_correction: float
    files: list

    def to_json(self) -> str:
        return json.dumps(dataclasses.asdict(self), indent=2)


def _write_snapshot(path, model, y, t):
    space = model.space
    nx = space.n_dof
    xs = space.x_lo + np.arange(nx) * (space.length / nx)
    f, _ = model.unpack(y)
    rows = np.stack([reconstruct(DGField(space, fj), xs) for fj in f])
    with open(path, "w") as fh:
        fh.write(f"{nx},{model.grid.n_points},{t:.17g}\n")
        for j in range(rows.shape[0]):
            fh.write(",".join(f"{v:.17g}" for v in rows[j]) + "\n")


def run_scenario(cfg: ScenarioConfig, outdir=None, quiet: bool = True) -> tuple[RunReport, TimeSeries]:
    cfg.validate()
    t_start = time.perf_counter()
    tableau = builtin_tableaux()[cfg.tableau]
    model = build_model(cfg)
    model.prepare(cfg.dt, required_fractions(tableau))
    y = initial_state(cfg, model)

    n_steps = int(round(cfg.t_final / cfg.dt))
    series = TimeSeries()
    obs0 = model.observables(y)
    series.append(0.0, obs0)
    h_target = obs0["total_energy"]
    max_resid = obs0["poisson_residual"]
    max_drift = 0.0
    max_corr = 0.0
    snap_every = max(1, n_steps // cfg.snapshot_count) if cfg.snapshot_count else 0
    files = []
    out = pathlib.Path(outdir) if outdir is not None else None
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
        if cfg.snapshot_count and cfg.model in ("vlasov_ampere",):
            p = out / "f_snapshot_t0.csv"
            _write_snapshot(p, model, y, 0.0)
            files.append(str(p))

    for step in range(1, n_steps + 1):
        y = lawson_step(model, tableau, y, cfg.dt)
        if cfg.energy_correction:
            y, lam = diagnostics.energy_correction(model, y, h_target)
            max_corr = max(max_corr, abs(lam - 1.0))
        t = step * cfg.dt
        if step % cfg.sample_stride == 0 or step == n_steps:
            obs = model.observables(y)
            if not all(np.isfinite(v) for v in obs.values()):
                raise NumericalError(
                    f"non-finite diagnostics at t = {t:g}; last good sample "
                    f"t = {series.times[-1]:g}")
            series.append(t, obs)
            max_resid = max(max_resid, obs["poisson_residual"])
            max_drift = max(max_drift, abs(obs["total_energy"] - h_target)
                            / abs(h_target))
        if out is not None and snap_every and step % snap_every == 0 \
                and cfg.model in ("vlasov_ampere",):
            p = out / f"f_snapshot_t{t:g}.csv"
            _write_snapshot(p, model, y, t)
            files.append(str(p))

    rate = r2 = None
    if cfg.fit_window_hi > cfg.fit_window_lo and cfg.fit_window_lo < cfg.t_final:
        try:
            fit = diagnostics.fit_rate(series.t, series.column(cfg.fit_channel),
                                       (cfg.fit_window_lo, cfg.fit_window_hi),
                                       use_peaks=cfg.fit_peaks)
            rate, r2 = fit.rate, fit.r_squared
        except ValueError:
            pass  # window not covered by this run

    report = RunReport(
        config_text=serialize_config(cfg),
        wall_time=time.perf_counter() - t_start,
        n_steps=n_steps,
        final_observables=model.observables(y),
        rate=rate,
        rate_r_squared=r2,
        max_poisson_residual=max_resid,
        max_energy_drift=max_drift,
        max_correction=max_corr,
        files=files,
    )
    if out is not None:
        csv_path = out / "series.csv"
        csv_path.write_text(series.to_csv())
        report.files.append(str(csv_path))
        rep_path = out / "report.json"
        rep_path.write_text(report.to_json())
        report.files.append(str(rep_path))
    if not quiet:
        print(f"steps: {n_steps}, wall: {report.wall_time:.2f}s, "
              f"max poisson residual: {max_resid:.3e}")
        if rate is not None:
            print(f"fitted rate on {cfg.fit_channel}: {rate:.6g} (r^2 = {r2:.4f})")
    return report, series


# ---------------------------------------------------------------------------
# convergence studies (transport benchmark)
# ---------------------------------------------------------------------------


def _transport_run(degree, n_x, n_v, dt, t_final, flux, tableau_name="rk33",
                   reference=None):
    space = DGSpace(n_x, degree, 0.0, 2.0 * np.pi)
    model = models.TransportModel2D(space, n_v, FluxKind(flux), DerivativeScheme.CD4)
    tableau = builtin_tableaux()[tableau_name]
    model.prepare(dt, required_fractions(tableau))
    y = model.initial_state(lambda x, v: np.sin(x + v))
    for _ in range(int(round(t_final / dt))):
        y = lawson_step(model, tableau, y, dt)
    if reference is not None:
        u = (y - reference).reshape(model.n_v, space.n_dof)
        s = np.linspace(-0.5, 0.5, 21)
        vals = evaluate_cellwise(space, u, s)
        w = np.ones(21)
        w[0] = w[-1] = 0.5
        w /= 20.0
        l2 = float(np.sqrt(model.dv * space.dx * np.einsum("jcq,q->", vals**2, w)))
        return float(np.abs(vals).max()), l2, y
    exact = lambda x, v: np.sin(x + v - 2.0 * t_final)
    linf, l2 = model.error_norms(y, exact)
    return linf, l2, y


def run_convergence(axis: str, degree: int = 2, flux: str = "central",
                    quiet: bool = True):
    """Sweep one axis of the transport benchmark; returns (h, linf, l2) rows."""
    rows = []
    if axis == "space":
        for n_x in (10, 20, 40, 80, 160):
            linf, l2, _ = _transport_run(degree, n_x, 320, 0.01, 1.0, flux)
            rows.append((2.0 * np.pi / n_x, linf, l2))
    elif axis == "velocity":
        for n_v in (8, 16, 32, 64, 128):
            linf, l2, _ = _transport_run(5, 32, n_v, 0.01, 1.0, "central")
            rows.append((2.0 * np.pi / n_v, linf, l2))
    elif axis == "time":
        _, _, ref = _transport_run(5, 16, 32, 1e-4, 1.0, "central")
        for dt in (0.1, 0.05, 0.025, 0.0125, 0.00625):
            linf, l2, _ = _transport_run(5, 16, 32, dt, 1.0, "central", reference=ref)
            rows.append((dt, linf, l2))
    else:
        raise ConfigError(f"unknown sweep axis {axis!r}")
    if not quiet:
        print(diagnostics.order_table_csv(rows), end="")
    return rows


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="expdg",
                                     description="exponential Lawson-DG kinetic solver")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run a benchmark scenario")
    run_p.add_argument("preset", nargs="?", help=f"one of {', '.join(presets())}")
    run_p.add_argument("--config", help="path to a key=value config file")
    run_p.add_argument("--output", help="output directory")
    run_p.add_argument("--tableau", help="override the time integrator")
    run_p.add_argument("--energy-correction", action="store_true")
    run_p.add_argument("--t-final", type=float, help="override the final time")
    run_p.add_argument("--dt", type=float, help="override the time step")

    conv_p = sub.add_parser("converge", help="transport convergence study")
    conv_p.add_argument("--axis", required=True, choices=("space", "velocity", "time"))
    conv_p.add_argument("--degree", type=int, default=2)
    conv_p.add_argument("--flux", default="central", choices=("central", "upwind"))
    conv_p.add_argument("--output", help="output directory")

    sub.add_parser("presets", help="list built-in scenario presets")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "presets":
            for name, cfg in presets().items():
                print(f"{name}: {cfg.model}, T={cfg.t_final}, dt={cfg.dt}")
            return 0
        if args.command == "run":
            if args.config:
                cfg = parse_config(pathlib.Path(args.config).read_text())
            elif args.preset:
                try:
                    cfg = dataclasses.replace(presets()[args.preset])
                except KeyError:
                    raise ConfigError(f"unknown preset {args.preset!r}; "
                                      f"available: {', '.join(presets())}")
            else:
                raise ConfigError("give a preset name or --config")
            if args.tableau:
                cfg.tableau = args.tableau
            if args.energy_correction:
                cfg.energy_correction = True
            if args.t_final:
                cfg.t_final = args.t_final
            if args.dt:
                cfg.dt = args.dt
            run_scenario(cfg, outdir=args.output, quiet=False)
            return 0
        if args.command == "converge":
            rows = run_convergence(args.axis, degree=args.degree, flux=args.flux,
                                   quiet=False)
            if args.output:
                out = pathlib.Path(args.output)
                out.mkdir(parents=True, exist_ok=True)
                (out / f"orders_{args.axis}.csv").write_text(
                    diagnostics.order_table_csv(rows))
            return 0
        return 2
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
