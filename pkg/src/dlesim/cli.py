"""Command-line front end: flat key=value config, CSV artifacts.

Subcommands:

* ``params``  -- flux-phase grid of the eight Hamiltonian parameters (CSV)
* ``limits``  -- parameter table and Hamiltonian structure at the two
  coupling set-points (text audit)
* ``evolve``  -- one trajectory under the configured drive (CSV)
* ``sweep``   -- switching-frequency sweep, probability surfaces (CSV) and a
  ``resonance_f_s_ghz,<value>`` summary line on stdout

Every run echoes the fully resolved configuration (plus wall time and
library versions as comments) into ``run_meta.txt`` in the output
directory; that file parses back into the identical RunConfig.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from dataclasses import dataclass, fields, replace

import numpy as np

from . import __version__
from .circuit import (CircuitConstants, Regime, UnphysicalParamsError,
                      flux_amplitude, instant_params, limit_params)
from .drive import DriveKind, DriveWaveform
from .hamiltonian import assemble, build_space
from .propagate import EvolutionConfig, Method, PropagationError, evolve
from .analysis import (default_frequency_grid, find_resonance, sweep,
                       time_avg_frequencies)

CONFIG_ENV_VAR = "DLESIM_CONFIG"

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_CONFIG = 2
EXIT_UNPHYSICAL = 3
EXIT_PROPAGATION = 4
EXIT_IO = 5


class ConfigError(ValueError):
    """Malformed, unknown, or out-of-range configuration input."""


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved run settings (defaults are the reference device)."""

    circuit_k: int = 9
    circuit_e_jq_ghz: float = 10.0
    circuit_e_j1_ghz: float = 81.6
    circuit_e_j2_ghz: float = 78.4
    circuit_c_ff: float = 102.0
    circuit_c_q_ff: float = 60.0
    circuit_l_nh: float = 5.0
    space_n_max: int = 8
    drive_kind: str = "square"
    drive_f_s_ghz: float = 13.75
    drive_fixed_phase: float = 0.0
    evolve_method: str = "auto"
    evolve_t_total_ns: float = 2000.0
    evolve_dt_ns: float = 1e-4
    evolve_sample_stride: int = 20_000
    evolve_renorm_tol: float = 1e-8
    evolve_cache_propagators: bool = True
    sweep_points: int = 101
    sweep_span: float = 0.25
    sweep_renorm_tol: float = 1e-6
    params_points: int = 101
    output_dir: str = "runs"

    def constants(self) -> CircuitConstants:
        try:
            return CircuitConstants(
                k=self.circuit_k, E_Jq=self.circuit_e_jq_ghz,
                E_J1=self.circuit_e_j1_ghz, E_J2=self.circuit_e_j2_ghz,
                C=self.circuit_c_ff, C_q=self.circuit_c_q_ff,
                L=self.circuit_l_nh)
        except ValueError as err:
            raise ConfigError(str(err)) from err

    def drive(self) -> DriveWaveform:
        try:
            return DriveWaveform(DriveKind(self.drive_kind),
                                 f_s=self.drive_f_s_ghz, k=self.circuit_k,
                                 fixed_phase=self.drive_fixed_phase)
        except ValueError as err:
            raise ConfigError(str(err)) from err

    def evolution(self, renorm_tol: float | None = None) -> EvolutionConfig:
        method = {"auto": None, "piecewise": Method.PIECEWISE_EXACT,
                  "rk4": Method.RK4}[self.evolve_method]
        try:
            return EvolutionConfig(
                t_total=self.evolve_t_total_ns, dt=self.evolve_dt_ns,
                sample_stride=self.evolve_sample_stride, method=method,
                renorm_tol=self.evolve_renorm_tol if renorm_tol is None else renorm_tol,
                cache_propagators=self.evolve_cache_propagators)
        except ValueError as err:
            raise ConfigError(str(err)) from err


def _field_to_key(name: str) -> str:
    return name.replace("_", ".", 1)


_KEY_TO_FIELD = {_field_to_key(f.name): f.name for f in fields(RunConfig)}
_CHOICES = {
    "drive.kind": {"square", "sinusoidal", "constant"},
    "evolve.method": {"auto", "piecewise", "rk4"},
}


def _parse_value(key: str, field_type: str, raw: str):
    if field_type == "bool":
        if raw in ("true", "false"):
            return raw == "true"
        raise ConfigError(f"key '{key}': expected true/false, got '{raw}'")
    if field_type == "int":
        try:
            return int(raw)
        except ValueError:
            raise ConfigError(f"key '{key}': malformed integer '{raw}'") from None
    if field_type == "float":
        try:
            return float(raw)
        except ValueError:
            raise ConfigError(f"key '{key}': malformed number '{raw}'") from None
    if key in _CHOICES and raw not in _CHOICES[key]:
        allowed = ", ".join(sorted(_CHOICES[key]))
        raise ConfigError(f"key '{key}': expected one of {{{allowed}}}, got '{raw}'")
    return raw


def parse_config(text: str) -> RunConfig:
    """Parse ``section.key = value`` lines ('#' comments) into a RunConfig.

    Unknown keys, malformed values, duplicates, and out-of-range settings
    are hard errors.
    """
    type_of = {f.name: f.type for f in fields(RunConfig)}
    overrides = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, eq, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if not eq or not key or not value:
            raise ConfigError(f"line {lineno}: expected 'section.key = value'")
        fname = _KEY_TO_FIELD.get(key)
        if fname is None:
            raise ConfigError(f"line {lineno}: unknown key '{key}'")
        if fname in overrides:
            raise ConfigError(f"line {lineno}: duplicate key '{key}'")
        overrides[fname] = _parse_value(key, type_of[fname], value)
    config = replace(RunConfig(), **overrides)
    _validate(config)
    return config


def _validate(c: RunConfig):
    checks = [
        (c.space_n_max >= 1, "space.n_max must be >= 1"),
        (c.evolve_t_total_ns > 0, "evolve.t_total_ns must be positive"),
        (c.evolve_dt_ns > 0, "evolve.dt_ns must be positive"),
        (c.evolve_sample_stride >= 1, "evolve.sample_stride must be >= 1"),
        (c.evolve_renorm_tol > 0, "evolve.renorm_tol must be positive"),
        (c.sweep_renorm_tol > 0, "sweep.renorm_tol must be positive"),
        (c.sweep_points >= 2, "sweep.points must be >= 2"),
        (0 < c.sweep_span < 1, "sweep.span must lie in (0, 1)"),
        (c.params_points >= 2, "params.points must be >= 2"),
        (c.drive_kind in _CHOICES["drive.kind"], "drive.kind invalid"),
        (c.evolve_method in _CHOICES["evolve.method"], "evolve.method invalid"),
    ]
    for ok, msg in checks:
        if not ok:
            raise ConfigError(msg)
    c.constants()


def config_text(c: RunConfig) -> str:
    """Canonical key=value rendering; parse_config() round-trips it."""
    lines = []
    for f in fields(RunConfig):
        v = getattr(c, f.name)
        if isinstance(v, bool):
            v = "true" if v else "false"
        elif isinstance(v, float):
            v = repr(v)
        lines.append(f"{_field_to_key(f.name)} = {v}")
    return "\n".join(lines) + "\n"


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def _write_run_meta(out_dir: str, subcommand: str, config: RunConfig,
                    wall_s: float):
    import numba
    import scipy
    meta = [
        "# dlesim run metadata (parses as a config file)",
        f"# subcommand = {subcommand}",
        f"# wall_time_s = {wall_s:.3f}",
        f"# dlesim = {__version__}",
        f"# numpy = {np.__version__}, scipy = {scipy.__version__}, "
        f"numba = {numba.__version__}",
        config_text(config),
    ]
    with open(os.path.join(out_dir, "run_meta.txt"), "w") as fh:
        fh.write("\n".join(meta))


PARAMS_HEADER = "phi_x,eta,E_c,E_Jq_star,f_r,f_0,g_xx,g_zz,g_zx,g_xz"


def _cmd_params(config: RunConfig, out_dir: str, threads: int):
    constants = config.constants()
    grid = np.linspace(0.0, flux_amplitude(constants.k), config.params_points)
    rows = [PARAMS_HEADER]
    for phi in grid:
        p = instant_params(constants, float(phi))
        rows.append(",".join(_fmt(v) for v in (
            phi, p.eta, p.E_c, p.E_Jq_star, p.f_r, p.f_0,
            p.g_xx, p.g_zz, p.g_zx, p.g_xz)))
    with open(os.path.join(out_dir, "params.csv"), "w") as fh:
        fh.write("\n".join(rows) + "\n")


def _cmd_limits(config: RunConfig, out_dir: str, threads: int):
    constants = config.constants()
    space = build_space(config.space_n_max)
    lines = []
    for regime in (Regime.TRANSVERSE, Regime.LONGITUDINAL):
        p = limit_params(constants, regime)
        lines.append(f"[{regime.value}]  phi_x = "
                     f"{_fmt(0.0 if regime is Regime.TRANSVERSE else flux_amplitude(constants.k))}")
        for name in ("eta", "E_c", "E_Jq_star", "f_r", "f_0",
                     "g_xx", "g_zz", "g_zx", "g_xz"):
            lines.append(f"  {name} = {_fmt(getattr(p, name))}")
        h = assemble(space, p)
        r, c = np.nonzero(h)
        lines.append(f"  nonzero H elements: {r.size} of {h.size}")
        nf = config.space_n_max + 1
        for i, j in zip(r, c):
            if i > j:
                continue  # Hermitian: list the upper triangle once
            qi, ni = divmod(i, nf)
            qj, nj = divmod(j, nf)
            lines.append(f"    |{'ge'[qi]},{ni}> <{'ge'[qj]},{nj}| : "
                         f"{_fmt(h[i, j].real)}")
        lines.append("")
    text = "\n".join(lines)
    print(text)
    with open(os.path.join(out_dir, "limits.txt"), "w") as fh:
        fh.write(text + "\n")


def _cmd_evolve(config: RunConfig, out_dir: str, threads: int):
    constants = config.constants()
    space = build_space(config.space_n_max)
    psi0 = np.zeros(space.dim, dtype=np.complex128)
    psi0[0] = 1.0
    traj = evolve(space, constants, config.drive(), config.evolution(), psi0)
    nf = config.space_n_max + 1
    w = np.abs(traj.states) ** 2
    p_e = w[:, nf:].sum(axis=1)
    p_n = w[:, :nf] + w[:, nf:]
    p_e1 = w[:, nf + 1]
    norm = np.linalg.norm(traj.states, axis=1)
    header = ("t_ns,p_e," + ",".join(f"p_n{n}" for n in range(nf))
              + ",p_e1,norm")
    rows = [header]
    for i, t in enumerate(traj.times):
        cells = [t, p_e[i], *p_n[i], p_e1[i], norm[i]]
        rows.append(",".join(_fmt(v) for v in cells))
    with open(os.path.join(out_dir, "trajectory.csv"), "w") as fh:
        fh.write("\n".join(rows) + "\n")


def _cmd_sweep(config: RunConfig, out_dir: str, threads: int):
    constants = config.constants()
    kind = DriveKind(config.drive_kind)
    grid = default_frequency_grid(constants, kind, points=config.sweep_points,
                                  span=config.sweep_span)
    evo = config.evolution(renorm_tol=config.sweep_renorm_tol)
    result = sweep(constants, kind, grid, config=evo,
                   n_max=config.space_n_max, threads=threads or None)
    qubit_rows = ["f_s_ghz,t_ns,p_e"]
    photon_rows = ["f_s_ghz,t_ns,p_ph,p_e1"]
    for j, f_s in enumerate(result.f_s):
        for i, t in enumerate(result.times):
            qubit_rows.append(f"{_fmt(f_s)},{_fmt(t)},{_fmt(result.p_e[i, j])}")
            photon_rows.append(f"{_fmt(f_s)},{_fmt(t)},"
                               f"{_fmt(result.p_ph[i, j])},{_fmt(result.p_e1[i, j])}")
    with open(os.path.join(out_dir, "sweep_qubit.csv"), "w") as fh:
        fh.write("\n".join(qubit_rows) + "\n")
    with open(os.path.join(out_dir, "sweep_photon.csv"), "w") as fh:
        fh.write("\n".join(photon_rows) + "\n")
    print(f"resonance_f_s_ghz,{_fmt(find_resonance(result))}")


_COMMANDS = {
    "params": _cmd_params,
    "limits": _cmd_limits,
    "evolve": _cmd_evolve,
    "sweep": _cmd_sweep,
}


def run(subcommand: str, config: RunConfig, out_dir: str | None = None,
        threads: int = 0) -> int:
    """Execute a subcommand; returns the process exit status.

    Errors print a single machine-parsable line ``error: <kind>: <msg>`` on
    stderr; each documented error class has its own status code.
    """
    t0 = time.perf_counter()
    try:
        cmd = _COMMANDS.get(subcommand)
        if cmd is None:
            raise ConfigError(f"unknown subcommand '{subcommand}'")
        _validate(config)
        out = out_dir or config.output_dir
        os.makedirs(out, exist_ok=True)
        cmd(config, out, threads)
        _write_run_meta(out, subcommand, config, time.perf_counter() - t0)
        return EXIT_OK
    except ConfigError as err:
        _fail("config", err)
        return EXIT_CONFIG
    except UnphysicalParamsError as err:
        _fail("unphysical", err)
        return EXIT_UNPHYSICAL
    except PropagationError as err:
        _fail("propagation", err)
        return EXIT_PROPAGATION
    except OSError as err:
        _fail("io", err)
        return EXIT_IO
    except ValueError as err:
        _fail("config", err)
        return EXIT_CONFIG
    except Exception as err:  # pragma: no cover - last resort
        _fail("internal", err)
        return EXIT_INTERNAL


def _fail(kind: str, err: Exception):
    msg = " ".join(str(err).split())
    print(f"error: {kind}: {msg}", file=sys.stderr)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="dlesim",
        description="Flux-switched qubit-resonator dynamics simulator")
    parser.add_argument("subcommand", choices=sorted(_COMMANDS))
    parser.add_argument("--config", help="path to a key=value config file")
    parser.add_argument("--out", help="output directory (default: config output.dir)")
    parser.add_argument("--threads", type=int, default=0,
                        help="worker threads for sweeps (0 = auto)")
    args = parser.parse_args(argv)

    config_path = os.environ.get(CONFIG_ENV_VAR) or args.config
    try:
        text = ""
        if config_path:
            with open(config_path) as fh:
                text = fh.read()
        config = parse_config(text)
    except OSError as err:
        _fail("io", err)
        return EXIT_IO
    except ConfigError as err:
        _fail("config", err)
        return EXIT_CONFIG
    return run(args.subcommand, config, out_dir=args.out, threads=args.threads)


if __name__ == "__main__":
    sys.exit(main())
