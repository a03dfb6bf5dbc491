"""Experiment orchestration and command-line entry point.

Configuration is a flat ``key = value`` file (``#`` comments) merged with
command-line flags; flags win. Every run writes the fully resolved
configuration next to its outputs, and re-running from that echo reproduces
the outputs byte for byte.

Verbs: single, sweep-s, sweep-lambda, effective-hopping, bangbang,
oracle-compare, selftest. Exit codes: 0 ok, 2 configuration error,
3 numerical failure, 4 invariant violation.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields, replace

import numpy as np

from . import bath, dynamics, numerics, oracle, rates
from .errors import ConfigError, InvariantError, NumericalError, PolaronDecoError
from .output import ensure_dir, format_number, write_csv, write_svg

MODES = ("single", "sweep-s", "sweep-lambda", "effective-hopping",
         "bangbang", "oracle-compare")

ENV_OUT_DIR = "POLARON_DECO_OUT"


def _parse_float_list(text):
    return tuple(float(p) for p in str(text).split(","))


def _parse_int_list(text):
    return tuple(int(p) for p in str(text).split(","))


def _parse_bool(text):
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


@dataclass(frozen=True)
class ExperimentConfig:
    mode: str = "single"
    lambda_g: float = 1.0
    s: float = 1.0
    omega_c: float = 1.0
    geometry_factor: float = 1.0
    j_hop: float = 1.0
    t_max: float = 50.0
    dt: float = 0.005
    rho_ss: float = 2.0 / 3.0
    re_rho_st: float = math.sqrt(2.0) / 3.0
    im_rho_st: float = 0.0
    s_values: tuple = (1.0, 10.0, 100.0)
    lambda_values: tuple = (0.5, 1.0, 2.0)
    n_modes: int = 2
    n_max: int = 6
    cycles: tuple = (4, 8, 16, 32, 64)
    total_time: float = 4.0
    out_dir: str = ""
    svg: bool = False
    jobs: int = 0
    seed: int = 0

    def validate(self) -> "ExperimentConfig":
        if self.mode not in MODES:
            raise ConfigError(f"unknown mode {self.mode!r}; expected one of {MODES}")
        self.initial_state()
        self.bath_model()
        self.grid()
        if self.n_modes < 1:
            raise ConfigError(f"n_modes must be >= 1, got {self.n_modes}")
        if self.n_max < 1:
            raise ConfigError(f"n_max must be >= 1, got {self.n_max}")
        if any(n < 1 for n in self.cycles):
            raise ConfigError(f"cycles must all be >= 1, got {self.cycles}")
        if not self.total_time > 0:
            raise ConfigError(f"total_time must be > 0, got {self.total_time}")
        if self.jobs < 0:
            raise ConfigError(f"jobs must be >= 0, got {self.jobs}")
        if not self.s_values or not self.lambda_values:
            raise ConfigError("sweep value lists must not be empty")
        return self

    def initial_state(self) -> dynamics.DensityMatrixST:
        return dynamics.DensityMatrixST.from_parts(
            self.rho_ss, self.re_rho_st + 1j * self.im_rho_st
        )

    def bath_model(self, s=None, lambda_g=None) -> bath.BathModel:
        return bath.BathModel(
            lambda_g=self.lambda_g if lambda_g is None else lambda_g,
            omega_c=self.omega_c,
            s=self.s if s is None else s,
            geometry_factor=self.geometry_factor,
        )

    def grid(self) -> numerics.TimeGrid:
        return numerics.TimeGrid(t_max=self.t_max, dt=self.dt)

    def oracle_config(self) -> oracle.TruncatedBathConfig:
        return oracle.ohmic_mode_config(
            n_modes=self.n_modes, n_max=self.n_max, coupling=self.lambda_g,
            s=self.s, j_hop=self.j_hop,
        )

    def worker_count(self) -> int:
        return self.jobs if self.jobs > 0 else (os.cpu_count() or 1)


_KEY_PARSERS = {
    "mode": str,
    "lambda_g": float, "s": float, "omega_c": float, "geometry_factor": float,
    "j_hop": float, "t_max": float, "dt": float,
    "rho_ss": float, "re_rho_st": float, "im_rho_st": float,
    "s_values": _parse_float_list, "lambda_values": _parse_float_list,
    "n_modes": int, "n_max": int, "cycles": _parse_int_list,
    "total_time": float,
    "out_dir": str, "svg": _parse_bool, "jobs": int, "seed": int,
}

# mode-specific defaults applied before file and flag overrides
_MODE_DEFAULTS = {
    "bangbang": {"s": math.pi, "j_hop": 0.5},
    "oracle-compare": {"lambda_g": 0.1, "j_hop": 0.1, "t_max": 10.0,
                       "dt": 0.0125, "n_max": 5},
}


def _parse_config_text(text):
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, val = line.partition("=")
        key = key.strip()
        val = val.strip()
        if key not in _KEY_PARSERS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        try:
            values[key] = _KEY_PARSERS[key](val)
        except (ValueError, TypeError):
            raise ConfigError(
                f"line {lineno}: invalid value for {key!r}: {val!r}"
            ) from None
    return values


def parse_config(file_text=None, flags=None, mode=None) -> ExperimentConfig:
    """Resolve defaults, file values and flag overrides into a config.

    Precedence, lowest first: built-in defaults, mode-specific defaults,
    config file, flags. The mode argument (the CLI verb) participates as a
    flag-level override of any ``mode`` key in the file.
    """
    file_values = _parse_config_text(file_text) if file_text else {}
    flag_values = {}
    for key, val in (flags or {}).items():
        if val is None:
            continue
        if key not in _KEY_PARSERS:
            raise ConfigError(f"unknown flag key {key!r}")
        try:
            flag_values[key] = _KEY_PARSERS[key](val)
        except (ValueError, TypeError):
            raise ConfigError(f"invalid value for flag {key!r}: {val!r}") from None

    resolved_mode = mode or flag_values.get("mode") or file_values.get("mode") \
        or "single"
    merged = dict(_MODE_DEFAULTS.get(resolved_mode, {}))
    merged.update(file_values)
    merged.update(flag_values)
    merged["mode"] = resolved_mode
    if not merged.get("out_dir"):
        merged["out_dir"] = os.environ.get(ENV_OUT_DIR, "out")

    known = {f.name for f in fields(ExperimentConfig)}
    merged = {k: v for k, v in merged.items() if k in known}
    try:
        config = ExperimentConfig(**merged)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None
    return config.validate()


def _format_value(v):
    # floats use repr so the echo round-trips exactly (9 significant digits
    # are a data-file rule, not enough to reproduce a run bit for bit)
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, tuple):
        return ",".join(repr(x) if isinstance(x, float) else str(x) for x in v)
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_config_echo(config: ExperimentConfig, path):
    lines = [f"{f.name} = {_format_value(getattr(config, f.name))}"
             for f in fields(ExperimentConfig)]
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# Experiment modes
# ---------------------------------------------------------------------------

def _trajectory_for(config, s_value=None, lambda_value=None):
    model = config.bath_model(s=s_value, lambda_g=lambda_value)
    grid = config.grid()
    table = rates.build_rate_table(model, config.j_hop, grid)
    return dynamics.evolve_closed_form(config.initial_state(), table)


def _run_single(config):
    traj = _trajectory_for(config)
    path = os.path.join(config.out_dir, "trajectory.csv")
    traj.to_csv(path)
    written = [path]
    if config.svg:
        svg = os.path.join(config.out_dir, "trajectory.svg")
        write_svg(svg, traj.grid.points,
                  {"C": traj.coherence, "P_D": traj.pop_diff,
                   "rho_TT": traj.rho_tt, "rho_SS": traj.rho_ss},
                  title="single run", x_label="t", y_label="value")
        written.append(svg)
    return written


def _run_sweep(config, values, label):
    with ThreadPoolExecutor(max_workers=config.worker_count()) as pool:
        futures = [
            pool.submit(_trajectory_for, config,
                        s_value=v if label == "s" else None,
                        lambda_value=v if label == "lambda" else None)
            for v in values
        ]
        trajs = [f.result() for f in futures]  # collected in sweep order

    grid = config.grid()
    tags = [f"{label}={format_number(v)}" for v in values]
    path_a = os.path.join(config.out_dir, "fig2a.csv")
    write_csv(path_a, ["t"] + [f"C_{tag}" for tag in tags],
              [grid.points] + [t.coherence for t in trajs])
    path_b = os.path.join(config.out_dir, "fig2bcd.csv")
    header = ["t"]
    cols = [grid.points]
    for tag, traj in zip(tags, trajs):
        header += [f"PD_{tag}", f"rho_tt_{tag}", f"rho_ss_{tag}"]
        cols += [traj.pop_diff, traj.rho_tt, traj.rho_ss]
    write_csv(path_b, header, cols)
    written = [path_a, path_b]
    if config.svg:
        svg_a = os.path.join(config.out_dir, "fig2a.svg")
        write_svg(svg_a, grid.points,
                  {tag: t.coherence for tag, t in zip(tags, trajs)},
                  title="coherence decay", x_label="t", y_label="C(t)")
        svg_b = os.path.join(config.out_dir, "fig2bcd.svg")
        write_svg(svg_b, grid.points,
                  {f"PD_{tag}": t.pop_diff for tag, t in zip(tags, trajs)},
                  title="population difference", x_label="t", y_label="P_D(t)")
        written += [svg_a, svg_b]
    return written


def _run_effective_hopping(config):
    lam_grid = np.linspace(0.0, 2.0, 81)
    path_a = os.path.join(config.out_dir, "fig1a.csv")
    cols_a = [lam_grid]
    header_a = ["lambda_g"]
    for s in config.s_values:
        header_a.append(f"ratio_s={format_number(s)}")
        cols_a.append([bath.effective_hopping_ratio(config.bath_model(s=s, lambda_g=v))
                       for v in lam_grid])
    write_csv(path_a, header_a, cols_a)

    s_grid = np.logspace(-1.0, 2.0, 61)
    path_b = os.path.join(config.out_dir, "fig1b.csv")
    cols_b = [s_grid]
    header_b = ["s"]
    for lam in config.lambda_values:
        header_b.append(f"ratio_lambda={format_number(lam)}")
        cols_b.append([bath.effective_hopping_ratio(config.bath_model(s=v, lambda_g=lam))
                       for v in s_grid])
    write_csv(path_b, header_b, cols_b)
    written = [path_a, path_b]
    if config.svg:
        svg_a = os.path.join(config.out_dir, "fig1a.svg")
        write_svg(svg_a, lam_grid, dict(zip(header_a[1:], cols_a[1:])),
                  title="dressed hopping vs coupling", x_label="lambda_g",
                  y_label="Jt/J")
        svg_b = os.path.join(config.out_dir, "fig1b.svg")
        write_svg(svg_b, s_grid, dict(zip(header_b[1:], cols_b[1:])),
                  title="dressed hopping vs scattering scale", x_label="s",
                  y_label="Jt/J", log_x=True)
        written += [svg_a, svg_b]
    return written


def _run_bangbang(config):
    cfg = config.oracle_config()
    schedules = [oracle.PulseSchedule(total_time=config.total_time, cycles=n)
                 for n in config.cycles]
    report = oracle.run_bangbang(cfg, config.initial_state(), schedules)
    path = os.path.join(config.out_dir, "bangbang.csv")
    report.to_csv(path)
    written = [path]
    if config.svg:
        svg = os.path.join(config.out_dir, "bangbang.svg")
        write_svg(svg, [r.delta_t for r in report.results],
                  {"pulsed": [r.distance_pulsed for r in report.results],
                   "free": [r.distance_free for r in report.results]},
                  title="pulse-train protection", x_label="delta_t",
                  y_label="trace distance", log_x=True, log_y=True)
        written.append(svg)
    return written


def _run_oracle_compare(config):
    cfg = config.oracle_config()
    grid = config.grid()
    comp = oracle.compare_with_master_equation(cfg, config.initial_state(), grid)
    path = os.path.join(config.out_dir, "compare.csv")
    write_csv(
        path,
        ["t", "C_exact", "C_master", "PD_exact", "PD_master"],
        [grid.points, comp.exact.coherence, comp.master.coherence,
         comp.exact.pop_diff, comp.master.pop_diff],
        comments=[
            f"# j_tilde={format_number(comp.j_tilde)} "
            f"delta_e_b={format_number(comp.delta_e_b)} "
            f"adiabaticity_ratio={format_number(comp.adiabaticity_ratio)} "
            f"rms_coherence_diff={format_number(comp.rms_coherence_diff)}"
        ],
    )
    written = [path]
    if config.svg:
        svg = os.path.join(config.out_dir, "compare.svg")
        write_svg(svg, grid.points,
                  {"C_exact": comp.exact.coherence, "C_master": comp.master.coherence},
                  title="exact vs rate equation", x_label="t", y_label="C(t)")
        written.append(svg)
    return written


_MODE_RUNNERS = {
    "single": _run_single,
    "sweep-s": lambda cfg: _run_sweep(cfg, cfg.s_values, "s"),
    "sweep-lambda": lambda cfg: _run_sweep(cfg, cfg.lambda_values, "lambda"),
    "effective-hopping": _run_effective_hopping,
    "bangbang": _run_bangbang,
    "oracle-compare": _run_oracle_compare,
}


def run_experiment(config: ExperimentConfig):
    """Execute one experiment; returns the list of files written.

    The resolved configuration echo is always written first, so a failed
    run still documents what was attempted.
    """
    config.validate()
    ensure_dir(config.out_dir)
    echo = os.path.join(config.out_dir, "config_echo.cfg")
    write_config_echo(config, echo)
    written = [echo] + _MODE_RUNNERS[config.mode](config)
    return written


# ---------------------------------------------------------------------------
# Self test
# ---------------------------------------------------------------------------

def selftest(out=None) -> bool:
    """Fast internal consistency checks; prints one PASS/FAIL line each."""
    out = out if out is not None else sys.stdout
    checks = []

    def check(name, fn):
        try:
            fn()
            checks.append((name, True, ""))
        except Exception as exc:  # noqa: BLE001 - report any failure
            checks.append((name, False, f"{type(exc).__name__}: {exc}"))

    def _dawson_vs_quadrature():
        for z in (0.3, 2.0, 7.0, 21.0):
            ref = numerics.integrate_semiinf(
                lambda t, z=z: np.exp(-t * t) * np.sin(z * t))
            if abs(numerics.dawson_sine(z) - ref) > 1e-9 * max(1.0, abs(ref)):
                raise NumericalError(f"dawson mismatch at z={z}")

    def _kernel_closed_form():
        for lam in (0.1, 1.0, 5.0):
            for s in (0.1, 1.0, 10.0, 100.0):
                model = bath.BathModel(lambda_g=lam, s=s)
                if abs(bath.kernel_cos(0.0, model) - model.kernel_zero()) > 1e-8:
                    raise NumericalError(f"kernel zero mismatch at lam={lam} s={s}")

    def _no_decoherence_limit():
        grid = numerics.TimeGrid(t_max=10.0, dt=0.01)
        table = rates.build_rate_table(bath.BathModel(lambda_g=1.0, s=0.0), 1.0, grid)
        state = dynamics.DensityMatrixST.from_parts(2 / 3, np.sqrt(2) / 3)
        traj = dynamics.evolve_closed_form(state, table)
        if np.max(np.abs(traj.coherence - 1.0)) > 1e-9:
            raise NumericalError("s=0 coherence drifts")

    def _ode_vs_closed_form():
        grid = numerics.TimeGrid(t_max=10.0, dt=0.01)
        table = rates.build_rate_table(bath.BathModel(lambda_g=1.0, s=1.0), 1.0, grid)
        state = dynamics.DensityMatrixST.from_parts(2 / 3, np.sqrt(2) / 3)
        a = dynamics.evolve_ode(state, table)
        b = dynamics.evolve_closed_form(state, table)
        err = max(np.max(np.abs(a.rho_ss - b.rho_ss)),
                  np.max(np.abs(a.rho_st - b.rho_st)))
        if err > 1e-6:
            raise NumericalError(f"ODE vs closed form differ by {err:.2e}")

    def _lang_firsov():
        cfg = oracle.TruncatedBathConfig(
            mode_freqs=(1.0,), g_site1=(0.5,), g_site2=(0.0,), n_max=10, j_hop=1.0)
        rep = oracle.lang_firsov_check(cfg, include_two_particle=False)
        if rep.spectrum_max_dev > 1e-8 or rep.hop_error > 1e-3:
            raise NumericalError("displacement-transform check failed")

    def _determinism():
        with tempfile.TemporaryDirectory() as tmp:
            cfgs = [replace(parse_config(mode="effective-hopping"),
                            out_dir=os.path.join(tmp, d)) for d in ("a", "b")]
            payloads = []
            for cfg in cfgs:
                files = run_experiment(cfg)
                payloads.append(b"".join(
                    open(p, "rb").read() for p in sorted(files)
                    if not p.endswith(".cfg")))
            if payloads[0] != payloads[1]:
                raise NumericalError("repeated run produced different bytes")

    check("dawson-vs-quadrature", _dawson_vs_quadrature)
    check("kernel-closed-form", _kernel_closed_form)
    check("no-decoherence-limit", _no_decoherence_limit)
    check("ode-vs-closed-form", _ode_vs_closed_form)
    check("lang-firsov", _lang_firsov)
    check("determinism", _determinism)

    ok = True
    for name, passed, detail in checks:
        status = "PASS" if passed else "FAIL"
        suffix = f" ({detail})" if detail else ""
        print(f"SELFTEST {name}: {status}{suffix}", file=out)
        ok = ok and passed
    return ok


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------

_FLAG_TO_KEY = {
    "s": "s", "lam": "lambda_g", "j": "j_hop", "tmax": "t_max", "dt": "dt",
    "out": "out_dir", "jobs": "jobs", "modes": "n_modes", "nmax": "n_max",
    "cycles": "cycles", "svg": "svg",
}


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="polaron-deco",
        description="Dephasing and pulse protection of a two-site polaron qubit.",
    )
    sub = parser.add_subparsers(dest="verb", required=True)
    for verb in MODES + ("selftest",):
        p = sub.add_parser(verb)
        p.add_argument("--config", help="flat key = value configuration file")
        p.add_argument("--out", help="output directory "
                                     f"(default ${ENV_OUT_DIR} or ./out)")
        p.add_argument("--s", help="scattering scale, or comma list for sweeps")
        p.add_argument("--lambda", dest="lam", help="effective coupling")
        p.add_argument("--j", help="bare hopping")
        p.add_argument("--tmax", help="grid end time")
        p.add_argument("--dt", help="grid spacing")
        p.add_argument("--svg", action="store_true", default=None,
                       help="also emit SVG charts")
        p.add_argument("--jobs", help="worker pool size (default: all cores)")
        p.add_argument("--modes", help="number of discretized bath modes")
        p.add_argument("--nmax", help="Fock cutoff per mode")
        p.add_argument("--cycles", help="comma list of pulse cycle counts")
    return parser


def _flags_from_args(args) -> dict:
    flags = {}
    for attr, key in _FLAG_TO_KEY.items():
        val = getattr(args, attr, None)
        if val is not None:
            flags[key] = val
    # comma lists on --s / --lambda feed the sweep value lists instead
    for attr, list_key in (("s", "s_values"), ("lam", "lambda_values")):
        val = getattr(args, attr, None)
        if val is not None and "," in str(val):
            flags.pop(_FLAG_TO_KEY[attr], None)
            flags[list_key] = val
    return flags


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.verb == "selftest":
        return 0 if selftest() else 4

    try:
        file_text = None
        if args.config:
            try:
                with open(args.config, encoding="utf-8") as fh:
                    file_text = fh.read()
            except OSError as exc:
                raise ConfigError(f"cannot read config file: {exc}") from None
        config = parse_config(file_text=file_text, flags=_flags_from_args(args),
                              mode=args.verb)
        written = run_experiment(config)
    except PolaronDecoError as exc:
        record = {"error": type(exc).__name__, "message": str(exc)}
        print(json.dumps(record), file=sys.stderr)
        if isinstance(exc, ConfigError):
            return 2
        if isinstance(exc, NumericalError):
            return 3
        if isinstance(exc, InvariantError):
            return 4
        return 3
    for path in written:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
