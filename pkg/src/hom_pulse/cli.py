"""Command-line entry point: configuration, sweeps and CSV output.

    hom-pulse g2 --delta1 3 --delta2 -4 --no-pulses --out fig2.csv
    hom-pulse spectrum --delta 3 --tau 0.2 --out spectrum.csv
    hom-pulse sweep --tau 0.3 --pairs 3:-4,3:-2,3:2 --out fig5.csv

Exit codes: 0 success, 2 invalid input, 3 numeric failure.
"""
from __future__ import annotations

import argparse
import itertools
import math
import sys
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .coherence import PopulationConvention
from .emitter import EmitterParams, PulseTrain
from .hom import (CorrelationCurve, HomScenario, Method, NumericFailure,
                  default_theta_grid, g2_34_integrated)
from .spectrum import SpectrumGrid, emission_spectrum

EXIT_OK, EXIT_INVALID, EXIT_NUMERIC = 0, 2, 3
COMMANDS = ("g2", "spectrum", "sweep")
DEFAULT_PAIRS = ((3.0, -4.0), (3.0, -2.0), (3.0, 2.0))
SPECTRUM_T = 8.0


class ConfigError(ValueError):
    """Invalid command line or config file; maps to exit code 2."""


@dataclass(frozen=True)
class RunConfig:
    command: str = "g2"
    delta1: float = 3.0
    delta2: float = -4.0
    delta: float = 3.0
    gamma: float = 2.0
    tau: float = 0.2
    no_pulses: bool = False
    t_max: float | None = None  # None: 4.8 for g2/sweep, 8.0 for spectrum
    theta_max: float = 3.0
    theta_steps: int = 601
    t_steps: int = 4801
    omega_min: float = -25.0
    omega_max: float = 25.0
    omega_steps: int = 251
    convention: str | None = None  # None: as_published for g2/sweep, excited for spectrum
    method: str = "closed_form"
    steady: bool = False
    pairs: tuple = DEFAULT_PAIRS
    out: str | None = None

    @property
    def horizon(self) -> float:
        if self.t_max is not None:
            return self.t_max
        return SPECTRUM_T if self.command == "spectrum" else 4.8

    @property
    def population_convention(self) -> PopulationConvention:
        if self.convention is not None:
            return PopulationConvention(self.convention)
        if self.command == "spectrum":
            return PopulationConvention.EXCITED
        return PopulationConvention.AS_PUBLISHED

    @property
    def train(self) -> PulseTrain:
        return PulseTrain.off() if self.no_pulses else PulseTrain(self.tau)

    @property
    def output_path(self) -> Path:
        return Path(self.out if self.out is not None else f"{self.command}.csv")

    def scenario(self, delta1: float | None = None, delta2: float | None = None) -> HomScenario:
        d1 = self.delta1 if delta1 is None else delta1
        d2 = self.delta2 if delta2 is None else delta2
        return HomScenario(
            emitter1=EmitterParams(d1, self.gamma),
            emitter2=EmitterParams(d2, self.gamma),
            train=self.train,
            convention=self.population_convention,
            method=Method(self.method),
            T=self.horizon,
            t_steps=self.t_steps,
            theta_grid=tuple(default_theta_grid(self.theta_max, self.theta_steps)),
            steady=self.steady,
        )

    def spectrum_grid(self) -> SpectrumGrid:
        return SpectrumGrid(self.omega_min, self.omega_max, self.omega_steps)


_FLOAT_KEYS = ("delta1", "delta2", "delta", "gamma", "tau", "t_max", "theta_max",
               "omega_min", "omega_max")
_INT_KEYS = ("theta_steps", "t_steps", "omega_steps")
_BOOL_KEYS = ("no_pulses", "steady")
_CHOICE_KEYS = {"convention": ("as_published", "excited"),
                "method": ("closed_form", "qrt_numeric")}
_TEXT_KEYS = ("pairs", "out")
KNOWN_KEYS = set(_FLOAT_KEYS + _INT_KEYS + _BOOL_KEYS + _TEXT_KEYS) | set(_CHOICE_KEYS)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def _build_parser() -> argparse.ArgumentParser:
    opts = _Parser(add_help=False, argument_default=argparse.SUPPRESS)
    for key in _FLOAT_KEYS:
        opts.add_argument("--" + key.replace("_", "-"), dest=key, metavar="X")
    for key in _INT_KEYS:
        opts.add_argument("--" + key.replace("_", "-"), dest=key, metavar="N")
    opts.add_argument("--no-pulses", dest="no_pulses", action="store_const", const="true")
    opts.add_argument("--steady", dest="steady", action="store_const", const="true",
                      help="use the stationary-regime correlation (populations fixed at 1/2)")
    opts.add_argument("--convention", choices=("as-published", "excited"))
    opts.add_argument("--method", choices=("closed-form", "qrt-numeric"))
    opts.add_argument("--pairs", metavar="D1:D2,...", help="detuning pairs for sweep")
    opts.add_argument("--out", metavar="PATH")
    opts.add_argument("--config", metavar="FILE", help="key=value config file; flags win")

    parser = _Parser(prog="hom-pulse", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[opts], argument_default=argparse.SUPPRESS)
    return parser


def read_config_file(path) -> dict:
    """Parse a key=value file; '#' starts a comment."""
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise ConfigError(f"config: cannot read {path}: {exc.strerror}") from exc
    values = {}
    for lineno, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"config line {lineno}: expected key=value, got {line!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in KNOWN_KEYS:
            raise ConfigError(f"{key}: unknown configuration key (line {lineno})")
        values[key] = value
    return values


def parse_pairs(text: str) -> tuple:
    pairs = []
    for item in text.split(","):
        try:
            d1, d2 = item.split(":")
            pairs.append((float(d1), float(d2)))
        except ValueError:
            raise ConfigError(f"pairs: cannot parse {item!r}, expected D1:D2") from None
    if not pairs:
        raise ConfigError("pairs: empty list")
    return tuple(pairs)


def _convert(key: str, value):
    if not isinstance(value, str):
        return value
    if key in _FLOAT_KEYS:
        try:
            x = float(value)
        except ValueError:
            raise ConfigError(f"{key}: not a number: {value!r}") from None
        if not math.isfinite(x):
            raise ConfigError(f"{key}: must be finite, got {value!r}")
        return x
    if key in _INT_KEYS:
        try:
            return int(value)
        except ValueError:
            raise ConfigError(f"{key}: not an integer: {value!r}") from None
    if key in _BOOL_KEYS:
        lowered = value.lower()
        if lowered in ("1", "true", "yes", "on"):
            return True
        if lowered in ("0", "false", "no", "off"):
            return False
        raise ConfigError(f"{key}: not a boolean: {value!r}")
    if key in _CHOICE_KEYS:
        choice = value.replace("-", "_")
        if choice not in _CHOICE_KEYS[key]:
            raise ConfigError(f"{key}: must be one of {', '.join(_CHOICE_KEYS[key])}, got {value!r}")
        return choice
    if key == "pairs":
        return parse_pairs(value)
    return value


def validate(cfg: RunConfig) -> RunConfig:
    def bad(key, why):
        raise ConfigError(f"{key}: {why} (got {getattr(cfg, key)!r})")

    if cfg.command not in COMMANDS:
        bad("command", f"must be one of {', '.join(COMMANDS)}")
    if not cfg.no_pulses and not cfg.tau > 0:
        bad("tau", "must be positive when pulses are enabled")
    if not cfg.gamma > 0:
        bad("gamma", "must be positive")
    if cfg.t_max is not None and not cfg.t_max > 0:
        bad("t_max", "must be positive")
    if not cfg.theta_max > 0:
        bad("theta_max", "must be positive")
    if cfg.theta_steps < 1:
        bad("theta_steps", "must be at least 1")
    if cfg.t_steps < 2:
        bad("t_steps", "must be at least 2")
    if cfg.omega_steps < 2:
        bad("omega_steps", "must be at least 2")
    if not cfg.omega_min < cfg.omega_max:
        bad("omega_max", "must exceed omega_min")
    if cfg.steady and cfg.no_pulses:
        bad("steady", "requires pulses")
    if not cfg.pairs:
        bad("pairs", "must not be empty")
    return cfg


def parse_config(argv, file=None) -> RunConfig:
    """Merge defaults, an optional config file and command-line flags (flags win)."""
    args = vars(_build_parser().parse_args(list(argv)))
    command = args.pop("command")
    file = args.pop("config", file)
    merged = read_config_file(file) if file is not None else {}
    merged.update(args)
    values = {key: _convert(key, value) for key, value in merged.items()}
    return validate(replace(RunConfig(command=command), **values))


def format_number(x: float) -> str:
    """12 significant digits, positional notation."""
    return np.format_float_positional(float(x), precision=12, unique=False,
                                      fractional=False, trim="-")


def write_curve_csv(curve: CorrelationCurve, path, header: str) -> None:
    lines = [header]
    lines += [f"{format_number(x)},{format_number(y)}"
              for x, y in zip(curve.abscissa, curve.values)]
    Path(path).write_text("\n".join(lines) + "\n")


def read_curve_csv(path):
    """Inverse of :func:`write_curve_csv`: returns (header, abscissa, values)."""
    text = Path(path).read_text().splitlines()
    rows = np.array([[float(v) for v in line.split(",")] for line in text[1:]])
    return text[0], rows[:, 0], rows[:, 1]


def sweep_path(base: Path, d1: float, d2: float) -> Path:
    return base.with_name(f"{base.stem}_{d1:g}_{d2:g}{base.suffix or '.csv'}")


def pairwise_sup_norm(curves: dict) -> dict:
    """Max |difference| between every pair of curves sharing an abscissa."""
    return {(a, b): float(np.max(np.abs(curves[a].values - curves[b].values)))
            for a, b in itertools.combinations(curves, 2)}


def run(cfg: RunConfig, stdout=None) -> int:
    stdout = stdout or sys.stdout
    try:
        if cfg.command == "g2":
            curve = g2_34_integrated(cfg.scenario())
            write_curve_csv(curve, cfg.output_path, "theta,g2")
        elif cfg.command == "spectrum":
            curve = emission_spectrum(EmitterParams(cfg.delta, cfg.gamma), cfg.train,
                                      cfg.spectrum_grid(), cfg.horizon,
                                      cfg.population_convention)
            write_curve_csv(curve, cfg.output_path, "omega,intensity")
        else:
            curves = {pair: g2_34_integrated(cfg.scenario(*pair)) for pair in cfg.pairs}
            for (d1, d2), curve in curves.items():
                write_curve_csv(curve, sweep_path(cfg.output_path, d1, d2), "theta,g2")
            peak = max(c.peak for c in curves.values())
            diffs = pairwise_sup_norm(curves)
            worst = max(diffs.values(), default=0.0)
            parts = [f"{a[0]:g}:{a[1]:g} vs {b[0]:g}:{b[1]:g} = {d:.6g}" for (a, b), d in diffs.items()]
            print(f"sweep: peak {peak:.6g}; sup-norm differences: {'; '.join(parts) or 'none'}; "
                  f"max/peak {worst / peak if peak > 0 else 0.0:.4f}", file=stdout)
    except NumericFailure as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"out: cannot write output: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return EXIT_OK


def main(argv=None) -> int:
    try:
        cfg = parse_config(sys.argv[1:] if argv is None else argv)
    except ConfigError as exc:
        print(f"hom-pulse: error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
