"""Command-line front end: run simulations, sweeps, truth tables, mode tables.

Subcommands
    simulate     population time series from a labelled initial state
    sweep        fidelity vs laser power for one gate scheme
    truth-table  C-NOT truth table (idealized or full-Hamiltonian)
    modes        usable-mode table (eta bounds and switching rates)

Config values come from an optional key=value file (--config); command-line
flags override file values.  Unknown keys are rejected.  All outputs embed
the resolved configuration as '#' header lines and state the unit
convention: frequencies in units of nu_1, time in units of 1/nu_1.
Everything is deterministic -- identical inputs give byte-identical files.

Exit codes: 0 success, 1 usage error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from dataclasses import dataclass, fields, replace

import numpy as np

from .gates import cz_cnot_schedule, lb_cnot_schedule, truth_table
from .hamiltonians import single_ion_config, two_ion_chain_config
from .metrics import FidelitySpec, SCHEME_NAMES, default_grid, sweep
from .modespectrum import DEFAULT_BUDGET, mode_table
from .propagator import AutonomousPropagator, PropagationError, evolve_series
from .statespace import BasisDescriptor, basis_state

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERICAL = 2

UNITS_NOTE = "frequencies in units of nu_1; time in units of 1/nu_1"


class UsageError(Exception):
    """Bad flags, bad config keys, bad labels: exit code 1."""


@dataclass
class RunConfig:
    """Resolved run parameters (file values overridden by flags)."""

    scheme: str = "lightshift"
    eta: float = 0.1
    omega_prime: str = "resonant"   # numeric string or "resonant"
    wave_type: str = "travelling"
    n_ions: int = 1
    fock: str = ""                  # per-mode truncation n_max, comma list
                                    # (default: 7 on the bus, 5 elsewhere)
    step: float = 0.0               # explicit-integrator step (0 = exact path)
    samples: int = 801
    initial: str = "+:0"
    t_final: float = 40.0
    grid_start: float = 0.0
    grid_stop: float = 0.0
    grid_points: int = 0            # 0 = scheme default grid
    grid_scale: str = "linear"
    threshold: float = 0.99
    workers: int = 0                # 0 = all processors
    budget: float = DEFAULT_BUDGET
    idealized: bool = True
    min_fidelity: float = 0.0
    deterministic: bool = True      # accepted for completeness; runs never
                                    # use randomness either way
    out: str = ""
    fmt: str = "csv"
    plot: bool = False


_FIELD_TYPES = {f.name: f.type for f in fields(RunConfig)}


def _coerce(key: str, raw: str):
    kind = _FIELD_TYPES[key]
    try:
        if kind == "bool" or isinstance(getattr(RunConfig, key, None), bool):
            low = raw.strip().lower()
            if low in ("true", "yes", "1", "on"):
                return True
            if low in ("false", "no", "0", "off"):
                return False
            raise ValueError(raw)
        if kind == "int":
            return int(raw)
        if kind == "float":
            return float(raw)
        return raw.strip()
    except ValueError as exc:
        raise UsageError(f"bad value for config key '{key}': {raw!r}") from exc


def parse_config_file(path: str) -> dict:
    """key = value lines; '#' comments; unknown keys rejected."""
    values = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise UsageError(f"cannot read config file: {exc}") from exc
    for lineno, line in enumerate(lines, start=1):
        text = line.split("#", 1)[0].strip()
        if not text:
            continue
        if "=" not in text:
            raise UsageError(f"{path}:{lineno}: expected 'key = value'")
        key, raw = (part.strip() for part in text.split("=", 1))
        if key not in _FIELD_TYPES:
            raise UsageError(f"{path}:{lineno}: unknown config key '{key}'")
        values[key] = _coerce(key, raw)
    return values


def resolve_config(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig()
    if getattr(args, "config", None):
        cfg = replace(cfg, **parse_config_file(args.config))
    overrides = {}
    for name in _FIELD_TYPES:
        value = getattr(args, name, None)
        if value is not None:
            overrides[name] = value
    return replace(cfg, **overrides)


def _resolved_omega(cfg: RunConfig) -> float:
    if cfg.omega_prime == "resonant":
        return 0.5                      # Omega' = nu_1/2, the double resonance
    try:
        value = float(cfg.omega_prime)
    except ValueError as exc:
        raise UsageError(
            f"omega_prime must be a number or 'resonant', got {cfg.omega_prime!r}"
        ) from exc
    if value < 0:
        raise UsageError("omega_prime must be non-negative")
    return value


def _truncations(cfg: RunConfig, n_modes: int) -> tuple:
    if not cfg.fock:
        return (7,) + (5,) * (n_modes - 1)
    try:
        parts = [int(p) for p in cfg.fock.split(",")]
    except ValueError as exc:
        raise UsageError(f"bad fock truncation spec: {cfg.fock!r}") from exc
    if len(parts) == 1:
        parts = parts * n_modes
    if len(parts) != n_modes or any(p < 1 for p in parts):
        raise UsageError(f"fock spec {cfg.fock!r} does not fit {n_modes} modes")
    return tuple(parts)


def _scheme_detuning(scheme: str) -> float:
    return 0.0 if scheme == "lightshift" else -1.0


def _system_config(cfg: RunConfig, omega: float):
    wave = "standing_node" if cfg.scheme == "cz_standing" else cfg.wave_type
    if cfg.n_ions == 1:
        return single_ion_config(eta=cfg.eta, omega_prime=omega,
                                 detuning=_scheme_detuning(cfg.scheme),
                                 wave_type=wave)
    if cfg.n_ions == 2:
        chain = two_ion_chain_config(eta_cm=cfg.eta,
                                     detuning=_scheme_detuning(cfg.scheme),
                                     wave_type=wave)
        return chain.with_effective_rabi(omega)
    raise UsageError("n_ions must be 1 or 2")


def _parse_initial(label: str, basis: BasisDescriptor):
    """'ion:modes' label, e.g. '+:0', 'g:1,0', 'e:0'."""
    if ":" not in label:
        raise UsageError(f"initial state {label!r} must look like 'ion:mode'")
    ion, modes = label.split(":", 1)
    try:
        ns = tuple(int(p) for p in modes.split(","))
        return basis_state(basis, (ion.strip(),), ns)
    except (ValueError, IndexError) as exc:
        raise UsageError(f"bad initial state label {label!r}: {exc}") from exc


def _fmt(x) -> str:
    if isinstance(x, float):
        return f"{x:.12g}"
    return str(x)


def _header_lines(command: str, resolved: dict) -> list[str]:
    lines = [f"# iongates {command}", f"# units: {UNITS_NOTE}"]
    for key in sorted(resolved):
        lines.append(f"# {key} = {_fmt(resolved[key])}")
    return lines


class _Output:
    """Target file or stdout; collects text so writes happen in one pass."""

    def __init__(self, path: str):
        self.path = path
        self.chunks: list[str] = []

    def write(self, text: str):
        self.chunks.append(text)

    def finish(self):
        payload = "".join(self.chunks)
        if self.path:
            with open(self.path, "w", encoding="utf-8", newline="") as fh:
                fh.write(payload)
        else:
            sys.stdout.write(payload)


def _write_csv(out: _Output, command: str, resolved: dict,
               columns: list[str], rows: list[list]):
    for line in _header_lines(command, resolved):
        out.write(line + "\n")
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])


def _write_json(out: _Output, command: str, resolved: dict, payload: dict):
    document = {"command": f"iongates {command}", "units": UNITS_NOTE,
                "config": {k: resolved[k] for k in sorted(resolved)}}
    document.update(payload)
    out.write(json.dumps(document, indent=2, sort_keys=True) + "\n")


# ---------------------------------------------------------------- simulate

def cmd_simulate(cfg: RunConfig) -> int:
    omega = _resolved_omega(cfg)
    system = _system_config(cfg, omega)
    n_modes = system.n_modes
    basis = BasisDescriptor((2,), _truncations(cfg, n_modes))
    psi0 = _parse_initial(cfg.initial, basis)
    if cfg.t_final <= 0:
        raise UsageError("t_final must be positive")
    if cfg.samples < 2:
        raise UsageError("samples must be at least 2")

    prop = AutonomousPropagator(system, basis)
    ts = np.linspace(0.0, cfg.t_final, cfg.samples)
    # evolve_series guards norm and Fock-truncation leaks on every sample
    series = evolve_series(prop, psi0, ts)

    # tracked states: every ion level x mode numbers up to 2 per mode,
    # in the bare and in the dressed basis
    tracked = []
    mode_tops = [min(2, t) for t in basis.mode_truncations]
    for labels, tag in ((("e", "g"), "bare"), (("+", "-"), "dressed")):
        for ion in labels:
            for ns in np.ndindex(*[m + 1 for m in mode_tops]):
                vec = basis_state(basis, (ion,), tuple(ns))
                name = "pop_" + {"+": "plus", "-": "minus"}.get(ion, ion)
                name += "_" + "_".join(str(n) for n in ns)
                tracked.append((name, vec.amplitudes, tag))

    columns = ["t"] + [name for name, _, _ in tracked]
    rows = []
    for k, t in enumerate(ts):
        pops = [abs(np.vdot(vec, series[k])) ** 2 for _, vec, _ in tracked]
        rows.append([t] + pops)

    resolved = {
        "scheme": cfg.scheme, "eta": cfg.eta, "omega_prime": omega,
        "detuning": system.detuning, "wave_type": system.wave_type,
        "n_ions": cfg.n_ions, "mode_freqs": ",".join(map(_fmt, system.mode_freqs)),
        "fock": ",".join(map(str, basis.mode_truncations)),
        "initial": cfg.initial, "t_final": cfg.t_final, "samples": cfg.samples,
        "pictures": "bare+dressed",
    }
    out = _Output(cfg.out)
    _write_csv(out, "simulate", resolved, columns, rows)
    out.finish()

    if cfg.plot:
        from .plotting import render_simulation
        render_simulation(_plot_path(cfg), ts, columns, np.array(
            [r[1:] for r in rows]))
    return EXIT_OK


# ------------------------------------------------------------------- sweep

def _sweep_grid(cfg: RunConfig) -> np.ndarray:
    if cfg.grid_points == 0:
        return default_grid(cfg.scheme)
    if cfg.grid_points < 2:
        raise UsageError("grid_points must be at least 2")
    if not cfg.grid_stop > cfg.grid_start:
        raise UsageError("grid_stop must exceed grid_start")
    if cfg.grid_scale == "linear":
        return np.linspace(cfg.grid_start, cfg.grid_stop, cfg.grid_points)
    if cfg.grid_scale == "log":
        if cfg.grid_start <= 0:
            raise UsageError("log grid needs grid_start > 0")
        return np.geomspace(cfg.grid_start, cfg.grid_stop, cfg.grid_points)
    raise UsageError("grid_scale must be 'linear' or 'log'")


def cmd_sweep(cfg: RunConfig) -> int:
    if cfg.scheme not in SCHEME_NAMES:
        raise UsageError(f"scheme must be one of {SCHEME_NAMES}")
    spec = FidelitySpec(cfg.scheme, eta=cfg.eta)
    grid = _sweep_grid(cfg)
    workers = cfg.workers if cfg.workers > 0 else (os.cpu_count() or 1)
    result = sweep(spec, omega_grid=grid, parallel=workers,
                   threshold_level=cfg.threshold)

    resolved = {
        "scheme": cfg.scheme, "eta": cfg.eta, "threshold": cfg.threshold,
        "grid_points": len(grid), "grid_start": float(grid[0]),
        "grid_stop": float(grid[-1]), "workers": workers,
        "window_factor": spec.window_factor, "window_samples": spec.samples,
    }
    columns = ["omega_over_nu", "fidelity", "t_of_max", "error"]
    rows = [[r["omega_over_nu"], r["fidelity"], r["t_of_max"], r["error"]]
            for r in result.rows()]
    out = _Output(cfg.out)
    if cfg.fmt == "json":
        _write_json(out, "sweep", resolved, json.loads(result.to_json()))
    else:
        _write_csv(out, "sweep", resolved, columns, rows)
    out.finish()

    summary_path = _sidecar_path(cfg, ".summary.json")
    if summary_path:
        side = _Output(summary_path)
        _write_json(side, "sweep", resolved, {"summary": result.summary()})
        side.finish()

    if cfg.plot:
        from .plotting import render_sweep
        render_sweep(_plot_path(cfg), result)

    failures = sum(1 for e in result.errors if e)
    if failures:
        print(f"sweep finished with {failures} failed points", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


# ------------------------------------------------------------- truth-table

def cmd_truth_table(cfg: RunConfig) -> int:
    omega = _resolved_omega(cfg)
    chain = two_ion_chain_config(eta_cm=cfg.eta, wave_type="travelling")
    if cfg.scheme == "lightshift":
        schedule = lb_cnot_schedule(chain, idealized=cfg.idealized)
    elif cfg.scheme in ("cz", "cz_travelling"):
        if cfg.omega_prime == "resonant":
            omega = 0.015           # a comfortably slow sideband drive
        schedule = cz_cnot_schedule(chain.with_effective_rabi(omega),
                                    idealized=cfg.idealized)
    else:
        raise UsageError("truth-table scheme must be 'lightshift' or 'cz'")

    rows_raw = truth_table(schedule)
    resolved = {
        "scheme": cfg.scheme, "eta": cfg.eta,
        "idealized": schedule.pulses[0].idealized,
        "control_ion": schedule.control_ion, "target_ion": schedule.target_ion,
        "omega_prime": schedule.config.effective_rabi,
        "total_duration": schedule.total_duration(),
    }
    columns = ["input", "output", "fidelity", "bus_ground_population"]
    rows = [[r["input"], r["output"], r["fidelity"],
             r["bus_ground_population"]] for r in rows_raw]
    out = _Output(cfg.out)
    if cfg.fmt == "json":
        _write_json(out, "truth-table", resolved, {"rows": rows_raw})
    else:
        _write_csv(out, "truth-table", resolved, columns, rows)
    out.finish()

    if cfg.min_fidelity > 0:
        worst = min(r["fidelity"] for r in rows_raw)
        if worst < cfg.min_fidelity:
            print(f"worst fidelity {worst:.6f} below required "
                  f"{cfg.min_fidelity}", file=sys.stderr)
            return EXIT_NUMERICAL
    return EXIT_OK


# ------------------------------------------------------------------- modes

def cmd_modes(cfg: RunConfig) -> int:
    if cfg.budget <= 0:
        raise UsageError("budget must be positive")
    table = mode_table(cfg.budget)
    resolved = {"budget": cfg.budget, "n_modes": len(table.freq_ratio)}
    rows_raw = table.rows()
    columns = ["q", "freq_ratio", "min_rel_spacing", "eta_max", "max_rate"]
    rows = [[r["q"], r["freq_ratio"],
             "" if r["min_rel_spacing"] is None else r["min_rel_spacing"],
             "" if r["eta_max"] is None else r["eta_max"],
             "" if r["max_rate"] is None else r["max_rate"]]
            for r in rows_raw]
    out = _Output(cfg.out)
    if cfg.fmt == "json":
        _write_json(out, "modes", resolved, {"rows": rows_raw})
    else:
        _write_csv(out, "modes", resolved, columns, rows)
    out.finish()
    return EXIT_OK


# -------------------------------------------------------------- arg wiring

def _plot_path(cfg: RunConfig) -> str:
    if not cfg.out:
        raise UsageError("--plot needs --out to name the image file")
    root, _ = os.path.splitext(cfg.out)
    return root + ".png"


def _sidecar_path(cfg: RunConfig, suffix: str) -> str:
    if not cfg.out:
        return ""
    root, _ = os.path.splitext(cfg.out)
    return root + suffix


class _Parser(argparse.ArgumentParser):
    def error(self, message):            # argparse default exits with 2
        raise UsageError(message)


def build_parser() -> _Parser:
    parser = _Parser(prog="iongates",
                     description="trapped-ion two-qubit gate simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="key=value config file")
        p.add_argument("--scheme", choices=("lightshift", "cz",
                                            "cz_travelling", "cz_standing"))
        p.add_argument("--eta", type=float, help="CM Lamb-Dicke parameter")
        p.add_argument("--omega-prime", dest="omega_prime",
                       help="effective Rabi frequency / nu_1, or 'resonant'")
        p.add_argument("--out", help="output path (default: stdout)")
        p.add_argument("--plot", action="store_const", const=True,
                       default=None, help="also render a PNG next to --out")

    p_sim = sub.add_parser("simulate", help="population time series")
    common(p_sim)
    p_sim.add_argument("--initial", help="initial state, e.g. '+:0' or 'g:1,0'")
    p_sim.add_argument("--t-final", dest="t_final", type=float)
    p_sim.add_argument("--samples", type=int)
    p_sim.add_argument("--n-ions", dest="n_ions", type=int, choices=(1, 2))
    p_sim.add_argument("--wave-type", dest="wave_type",
                       choices=("travelling", "standing_node"))
    p_sim.add_argument("--fock", help="per-mode Fock truncation, e.g. '7,4'")

    p_sweep = sub.add_parser("sweep", help="fidelity vs laser power")
    common(p_sweep)
    p_sweep.add_argument("--grid-start", dest="grid_start", type=float)
    p_sweep.add_argument("--grid-stop", dest="grid_stop", type=float)
    p_sweep.add_argument("--grid-points", dest="grid_points", type=int)
    p_sweep.add_argument("--grid-scale", dest="grid_scale",
                         choices=("linear", "log"))
    p_sweep.add_argument("--threshold", type=float,
                         help="fidelity level for threshold extraction")
    p_sweep.add_argument("--workers", type=int,
                         help="sweep worker threads (default: all processors)")
    p_sweep.add_argument("--format", dest="fmt", choices=("csv", "json"))

    p_tt = sub.add_parser("truth-table", help="C-NOT truth table")
    common(p_tt)
    p_tt.add_argument("--full", dest="idealized", action="store_const",
                      const=False, default=None,
                      help="full-Hamiltonian pulses instead of idealized")
    p_tt.add_argument("--min-fidelity", dest="min_fidelity", type=float,
                      help="fail (exit 2) if any row is below this")
    p_tt.add_argument("--format", dest="fmt", choices=("csv", "json"))

    p_modes = sub.add_parser("modes", help="usable-mode table")
    p_modes.add_argument("--config", help="key=value config file")
    p_modes.add_argument("--budget", type=float,
                         help="off-resonant error budget epsilon^2")
    p_modes.add_argument("--format", dest="fmt", choices=("csv", "json"))
    p_modes.add_argument("--out", help="output path (default: stdout)")

    return parser


COMMANDS = {
    "simulate": cmd_simulate,
    "sweep": cmd_sweep,
    "truth-table": cmd_truth_table,
    "modes": cmd_modes,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = resolve_config(args)
        return COMMANDS[args.command](cfg)
    except UsageError as exc:
        print(f"iongates: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (PropagationError, np.linalg.LinAlgError) as exc:
        print(f"iongates: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
