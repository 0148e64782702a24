"""Command line interface tying the simulator modules together.

Subcommands: validate, sweep, simulate, visibility, compare. Parameter
values resolve in precedence order: built-in defaults, then environment
variables prefixed FRANSONSIM_, then a --config file of 'key = value'
lines, then explicit flags. Exit codes: 0 success, 1 domain error
(validation failures, model mismatch, bad parameter values), 2 I/O or
command-usage error.
"""

import argparse
import dataclasses
import os
import sys
from contextlib import contextmanager
from dataclasses import dataclass

import numpy as np

from .analysis import AnalysisError, visibility_trace
from .analytic import SWEEP_COLUMNS, sweep as analytic_sweep
from .circuit import CircuitError, compile_plan, isometry_deviation, load_circuit, validate
from .crosscheck import compare_circuit
from .runner import (
    ScanProfile,
    Schedule,
    ThetaModel,
    run,
    write_series,
)
from .seriesio import read_table, write_table
from .stats import CoincidenceModel, DetectorModel, SourceModel

ENV_PREFIX = "FRANSONSIM_"

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_USAGE = 2


class CommandError(Exception):
    """Command failure carrying its exit code."""

    def __init__(self, message, code=EXIT_DOMAIN):
        super().__init__(message)
        self.code = code


# Unit words accepted after a number in config files and flag values,
# grouped by the quantity each parameter measures.
_UNIT_FACTORS = {
    "time": {"s": 1.0, "ms": 1e-3, "us": 1e-6, "ns": 1e-9},
    "length": {"nm": 1.0, "um": 1e3, "mm": 1e6},
    "angle": {"rad": 1.0, "deg": np.pi / 180.0},
    "voltage": {"V": 1.0, "mV": 1e-3},
    "rate": {"Hz": 1.0, "kHz": 1e3},
}


def _coerce(key, value, kind, unit=None):
    if not isinstance(value, str):
        return value
    text = value.strip()
    if kind == "str":
        return text
    if kind == "bool":
        low = text.lower()
        if low in ("1", "true", "on", "yes"):
            return True
        if low in ("0", "false", "off", "no"):
            return False
        raise CommandError(f"parameter '{key}' expects a boolean, got '{value}'")
    parts = text.split()
    if not parts:
        raise CommandError(f"parameter '{key}' has an empty value")
    try:
        number = int(parts[0]) if kind == "int" else float(parts[0])
    except ValueError:
        raise CommandError(
            f"parameter '{key}' expects a number, got '{value}'") from None
    if len(parts) == 1:
        return number
    if len(parts) > 2 or kind == "int":
        raise CommandError(f"parameter '{key}' has a malformed value '{value}'")
    factors = _UNIT_FACTORS.get(unit, {})
    if parts[1] not in factors:
        raise CommandError(
            f"parameter '{key}' does not accept unit '{parts[1]}'")
    return number * factors[parts[1]]


def read_config(path):
    """Read a flat 'key = value' config file."""
    values = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            text = line.strip()
            if not text or text.startswith("#"):
                continue
            if "=" not in text:
                raise CommandError(f"{path}:{lineno}: expected 'key = value'")
            key, value = text.split("=", 1)
            values[key.strip().lower().replace("-", "_")] = value.strip()
    return values


def resolve_params(registry, args, config=None):
    """Merge defaults, environment, config file and flags for one command."""
    if config:
        unknown = sorted(set(config) - set(registry))
        if unknown:
            raise CommandError(f"unknown config keys: {', '.join(unknown)}")
    out = {}
    for key, (default, kind, unit) in registry.items():
        value = default
        env = os.environ.get(ENV_PREFIX + key.upper())
        if env is not None:
            value = _coerce(key, env, kind, unit)
        if config and key in config:
            value = _coerce(key, config[key], kind, unit)
        flag = getattr(args, key, None)
        if flag is not None:
            value = _coerce(key, flag, kind, unit)
        out[key] = value
    return out


def parse_grid(text):
    """Parse a phase grid: a single value or START:STEP:STOP (inclusive)."""
    parts = str(text).split(":")
    try:
        numbers = [float(p) for p in parts]
    except ValueError:
        raise CommandError(f"malformed grid '{text}' (use START:STEP:STOP)") from None
    if len(numbers) == 1:
        return np.array(numbers)
    if len(numbers) != 3:
        raise CommandError(f"malformed grid '{text}' (use START:STEP:STOP)")
    start, step, stop = numbers
    if step == 0.0:
        raise CommandError("grid step must be nonzero")
    count = int(np.floor((stop - start) / step + 1e-9)) + 1
    if count < 1:
        return np.empty(0)
    return start + step * np.arange(count)


def parse_theta_spec(text):
    """Parse an inter-receiver phase model spec.

    Accepts a bare number (constant), 'constant:VALUE', 'linear:RATE'
    or 'drift:SIGMA[,TAU]'.
    """
    text = str(text).strip()
    head, sep, rest = text.partition(":")
    try:
        if not sep:
            return ThetaModel.constant(float(text))
        head = head.strip().lower()
        if head == "constant":
            return ThetaModel.constant(float(rest))
        if head == "linear":
            return ThetaModel.linear(float(rest))
        if head == "drift":
            parts = rest.split(",")
            sigma = float(parts[0])
            tau = float(parts[1]) if len(parts) > 1 else 300.0
            return ThetaModel.drift(sigma, tau)
    except (ValueError, IndexError):
        raise CommandError(f"malformed theta spec '{text}'") from None
    raise CommandError(
        f"unknown theta model '{head}' (use constant:V, linear:RATE or drift:SIGMA,TAU)")


@dataclass(frozen=True)
class RunConfig:
    """Resolved simulation parameters, one field per configurable knob."""

    circuit: str = "franson_modified"
    mode: str = "monte-carlo"
    seed: int = None
    duration: float = 4000.0
    bin_width: float = 1.0
    period: float = 1000.0
    voltage_low: float = 0.0
    voltage_high: float = 100.0
    displacement: float = 2660.0
    wavelength: float = 532.0
    seam_halfwidth: float = 22.5
    psi: float = 0.0
    theta: str = "constant:0"
    mean_photon_number: float = 0.04
    singles_rate: float = 5000.0
    pair_fraction: float = 0.01
    triple_fraction: float = 0.01
    statistics: str = "poisson"
    fano_factor: float = 1.0
    efficiency: float = 1.0
    dark_rate: float = 27.0
    pulse_width: float = 10e-9
    coincidence_window: float = 10e-9
    accidental_correction: bool = False

    def schedule(self):
        return Schedule(self.duration, self.bin_width)

    def scan(self):
        return ScanProfile(self.period, self.voltage_low, self.voltage_high,
                           self.displacement, self.wavelength, self.seam_halfwidth)

    def theta_model(self):
        return parse_theta_spec(self.theta)

    def source(self):
        return SourceModel(self.mean_photon_number, self.singles_rate,
                           self.pair_fraction, self.triple_fraction,
                           self.statistics, self.fano_factor)

    def detector(self):
        return DetectorModel(self.efficiency, self.dark_rate, self.pulse_width)

    def coincidence(self):
        return CoincidenceModel(self.coincidence_window, self.accidental_correction)


_KIND_OF = {
    "circuit": "str", "mode": "str", "theta": "str", "statistics": "str",
    "seed": "int", "accidental_correction": "bool",
}

_UNIT_OF = {
    "duration": "time", "bin_width": "time", "period": "time",
    "seam_halfwidth": "time", "pulse_width": "time", "coincidence_window": "time",
    "displacement": "length", "wavelength": "length", "psi": "angle",
    "voltage_low": "voltage", "voltage_high": "voltage",
    "singles_rate": "rate", "dark_rate": "rate",
}

SIMULATE_PARAMS = {
    field.name: (field.default, _KIND_OF.get(field.name, "float"),
                 _UNIT_OF.get(field.name))
    for field in dataclasses.fields(RunConfig)
}

SWEEP_PARAMS = {
    "phi": ("0", "str", None),
    "psi": ("0", "str", None),
    "theta": ("0", "str", None),
    "i0": (1.0, "float", None),
}

VISIBILITY_PARAMS = {
    "column": ("C12", "str", None),
    "window": ("full", "str", None),
    "fold_bins": (36, "int", None),
}

COMPARE_PARAMS = {
    "samples": (10000, "int", None),
    "seed": (0, "int", None),
    "tolerance": (1e-9, "float", None),
}


@contextmanager
def _open_output(path):
    if path in (None, "-"):
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            yield fh


@contextmanager
def _open_input(path):
    if path in (None, "-"):
        yield sys.stdin
    else:
        with open(path, "r", encoding="utf-8") as fh:
            yield fh


def cmd_validate(args):
    try:
        spec = load_circuit(args.circuit)
    except CircuitError as exc:
        print(f"parse-error\t{args.circuit}\t{exc}")
        return EXIT_DOMAIN
    violations = validate(spec)
    if violations:
        for v in violations:
            print(f"{v.code}\t{v.subject}\t{v.message}")
        return EXIT_DOMAIN
    deviation = isometry_deviation(compile_plan(spec))
    print(f"ok\t{args.circuit}\tisometry-deviation {deviation:.3e}")
    return EXIT_OK


def cmd_sweep(args):
    params = resolve_params(SWEEP_PARAMS, args)
    phi = parse_grid(params["phi"])
    psi = parse_grid(params["psi"])
    theta = parse_grid(params["theta"])
    i0 = float(params["i0"])
    if i0 <= 0:
        raise CommandError("i0 must be positive")
    table = analytic_sweep(phi, psi, theta, i0)
    with _open_output(args.output) as fh:
        write_table(fh, SWEEP_COLUMNS, [table[name] for name in SWEEP_COLUMNS])
    return EXIT_OK


def cmd_simulate(args):
    config = read_config(args.config) if args.config else None
    params = resolve_params(SIMULATE_PARAMS, args, config)
    cfg = RunConfig(**params)
    if cfg.mode == "monte-carlo" and cfg.seed is None:
        raise CommandError("a --seed is required in monte-carlo mode")
    spec = load_circuit(cfg.circuit)
    violations = validate(spec)
    if violations:
        first = violations[0]
        raise CommandError(
            f"circuit fails validation: {first.code} on {first.subject} "
            f"({len(violations)} violation(s); run the validate command)")
    series = run(compile_plan(spec), schedule=cfg.schedule(), scan=cfg.scan(),
                 theta=cfg.theta_model(), source=cfg.source(),
                 detector=cfg.detector(), coincidence=cfg.coincidence(),
                 seed=cfg.seed, mode=cfg.mode, psi=cfg.psi, label=cfg.circuit)
    with _open_output(args.output) as fh:
        write_series(fh, series)
    return EXIT_OK


def _auto_window(columns, length):
    """Window covering one fringe, from the recorded scanned phase."""
    phi = columns.get("phi")
    if phi is None or length < 3:
        return length
    steps = np.abs(np.diff(phi))
    steps = steps[(steps > 0) & (steps < np.pi)]
    if steps.size == 0:
        return length
    window = int(round(2.0 * np.pi / float(np.median(steps)))) + 1
    return max(2, min(window, length))


def cmd_visibility(args):
    params = resolve_params(VISIBILITY_PARAMS, args)
    with _open_input(args.input) as fh:
        meta, columns = read_table(fh)
    column = params["column"]
    if column in columns:
        values = columns[column]
    elif column == "product":
        # the coincidence-proxy product: output intensities when the
        # record carries them (dark counts would cap the contrast), raw
        # count product otherwise
        if "I_alpha" in columns and "I_beta" in columns:
            values = columns["I_alpha"] * columns["I_beta"]
        elif "D1" in columns and "D2" in columns:
            values = columns["D1"] * columns["D2"]
        else:
            raise CommandError(
                "product column needs I_alpha/I_beta or D1/D2 in the input")
    else:
        have = ", ".join(sorted(columns))
        raise CommandError(f"unknown column '{column}' (have: {have}, product)")
    length = values.size
    t = columns.get("t")
    if t is None:
        t = np.arange(length, dtype=np.float64)
    window_spec = str(params["window"]).strip().lower()
    if window_spec == "full":
        window = length
    elif window_spec == "auto":
        window = _auto_window(columns, length)
    else:
        window = _coerce("window", window_spec, "int")
    out_meta = {"column": column, "window": window}
    if length == 0:
        centers = np.empty(0)
        vis = np.empty(0)
    else:
        if not 1 <= window <= length:
            raise CommandError(
                f"window must be between 1 and the trace length {length}")
        centers, vis = visibility_trace(t, values, window)
    with _open_output(args.output) as fh:
        write_table(fh, ("t", "V"), [centers, vis], out_meta)
    return EXIT_OK


def cmd_compare(args):
    params = resolve_params(COMPARE_PARAMS, args)
    spec = load_circuit(args.circuit)
    violations = validate(spec)
    if violations:
        for v in violations:
            print(f"{v.code}\t{v.subject}\t{v.message}")
        return EXIT_DOMAIN
    report = compare_circuit(spec, samples=params["samples"], seed=params["seed"],
                             tolerance=params["tolerance"], label=args.circuit)
    sys.stdout.write(report.as_text())
    return EXIT_OK if report.passed else EXIT_DOMAIN


def _add_registry_flags(parser, registry):
    for key, (default, kind, _unit) in registry.items():
        flag = "--" + key.replace("_", "-")
        parser.add_argument(flag, default=None, metavar=kind.upper(),
                            help=f"{key} (default {default})")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="fransonsim",
        description="Simulate and analyze polarization-based nonlocal "
                    "interference circuits.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a circuit file")
    p.add_argument("circuit")
    p.set_defaults(handler=cmd_validate)

    p = sub.add_parser("sweep", help="closed-form phase sweep to CSV")
    _add_registry_flags(p, SWEEP_PARAMS)
    p.add_argument("-o", "--output", default="-")
    p.set_defaults(handler=cmd_sweep)

    p = sub.add_parser("simulate", help="timed scan simulation to CSV")
    _add_registry_flags(p, SIMULATE_PARAMS)
    p.add_argument("--config", default=None, help="key = value parameter file")
    p.add_argument("-o", "--output", default="-")
    p.set_defaults(handler=cmd_simulate)

    p = sub.add_parser("visibility", help="sliding-window fringe visibility")
    p.add_argument("input", nargs="?", default="-")
    _add_registry_flags(p, VISIBILITY_PARAMS)
    p.add_argument("-o", "--output", default="-")
    p.set_defaults(handler=cmd_visibility)

    p = sub.add_parser("compare", help="fit a circuit against the closed forms")
    p.add_argument("circuit")
    p.add_argument("-n", "--samples", default=None, metavar="INT")
    p.add_argument("--seed", default=None, metavar="INT")
    p.add_argument("--tolerance", default=None, metavar="FLOAT")
    p.set_defaults(handler=cmd_compare)

    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else int(exc.code)
    try:
        return args.handler(args)
    except CommandError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except CircuitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except (ValueError, AnalysisError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except BrokenPipeError:
        # Downstream closed early (e.g. piping into head); not a failure.
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        return EXIT_OK
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def entry():
    raise SystemExit(main())
