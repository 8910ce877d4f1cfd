"""Command-line front end.

Every subcommand writes CSV (to ``--output`` or stdout). Options can also be
read from a ``key=value`` file given with ``--config``; flags on the command
line win. Exit status: 0 on success, 2 for invalid configuration, 3 when a
numerical guard aborts the run.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import reproduce
from .detection import (
    REFERENCE_TRANSFER_PARAMS,
    find_noon_times,
    find_w_times,
    peak_transfer_search,
    transfer_probability_closed_form,
    transfer_probability_numeric,
)
from .errors import DimensionCapError, NumericalGuardError, PeriodUnavailableError
from .evolution import closed_form_survival, probability_series, survival_probability
from .fock_space import enumerate_sector
from .lindblad import LossParams, transfer_sweep
from .output import occupation_label, write_csv
from .spectral import ModelParams, build_spectral, evolution_period
from .states import (
    EntangledPairSpec,
    PureState,
    entangled_pair_state,
    fock_product_state,
    weak_coherent_product,
)

OUTPUT_DIR_ENV = "CCA_OUTPUT_DIR"


class ConfigError(ValueError):
    pass


def parse_complex(text: str) -> complex:
    """Parse ``a+bi`` style literals (also ``0.1i``, ``-2``, ``1-0.5i``)."""
    s = text.strip().replace(" ", "")
    if not s:
        raise ConfigError("empty complex literal")
    if s.endswith("i"):
        s = s[:-1] + "j"
        if s in ("j", "+j", "-j"):
            s = s.replace("j", "1j")
    try:
        return complex(s)
    except ValueError:
        raise ConfigError(f"cannot parse complex literal {text!r}") from None


def _split(text: str) -> list[str]:
    return [tok for tok in text.replace(",", " ").split() if tok]


def parse_state(descriptor: str, n: int) -> PureState:
    """Build a state from ``fock m1 .. mn``, ``coherent a1 .. an`` or ``pair theta first|last``."""
    parts = _split(descriptor)
    if not parts:
        raise ConfigError("empty state descriptor")
    kind, rest = parts[0].lower(), parts[1:]
    if kind == "fock":
        try:
            occ = [int(x) for x in rest]
        except ValueError:
            raise ConfigError(f"fock occupations must be integers: {descriptor!r}") from None
        if len(occ) != n:
            raise ConfigError(f"fock state lists {len(occ)} occupations for n={n}")
        return fock_product_state(n, occ)
    if kind == "coherent":
        alphas = [parse_complex(x) for x in rest]
        if len(alphas) != n:
            raise ConfigError(f"coherent state lists {len(alphas)} amplitudes for n={n}")
        return weak_coherent_product(alphas)
    if kind == "pair":
        if len(rest) not in (1, 2):
            raise ConfigError("pair state needs 'pair THETA [first|last]'")
        placement = rest[1].lower() if len(rest) == 2 else "first"
        return entangled_pair_state(n, EntangledPairSpec(float(rest[0])), placement)
    raise ConfigError(f"unknown state kind {kind!r}; use fock, coherent or pair")


@dataclass(frozen=True)
class ScenarioConfig:
    params: ModelParams
    state: str | None
    start: float
    stop: float
    points: int
    gamma: float | None
    output: Path | None

    def times(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.points)


def _state_descriptor(args) -> str | None:
    opt = lambda name: getattr(args, name, None)
    given = [d for d in (opt("state"), opt("fock") and f"fock {args.fock}",
                         opt("coherent") and f"coherent {args.coherent}",
                         opt("pair") and f"pair {args.pair}") if d]
    if len(given) > 1:
        raise ConfigError("give only one of --state, --fock, --coherent, --pair")
    return given[0] if given else None


def model_params(args) -> ModelParams:
    # parent-parser actions are shared, so the per-command default lives here
    n = args.n if args.n is not None else (4 if args.command == "transfer" else 3)
    return ModelParams(n, args.omega, args.j_coupling)


def scenario_from_args(args) -> ScenarioConfig:
    params = model_params(args)
    stop = args.stop
    if stop is None:
        period = evolution_period(build_spectral(params))
        if not period:
            raise ConfigError("no revival period for these parameters; pass --stop")
        stop = period
    if args.points < 2:
        raise ConfigError("--points must be at least 2")
    if not (stop > args.start >= 0):
        raise ConfigError("time grid needs stop > start >= 0")
    gamma = getattr(args, "gamma", None)
    return ScenarioConfig(
        params, _state_descriptor(args), args.start, stop, args.points, gamma,
        Path(args.output) if args.output else None,
    )


def read_config(path: str) -> dict[str, str]:
    values = {}
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from None
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        values[key.replace("-", "_")] = value
    return values


def _float_list(text: str) -> list[float]:
    return [float(x) for x in _split(text)]


# -- subcommands -------------------------------------------------------------

def cmd_spectrum(args):
    params = model_params(args)
    spec = build_spectral(params)
    header, rows = ["k", "frequency"], [[k + 1, f] for k, f in enumerate(spec.frequencies)]
    if args.period:
        period = evolution_period(spec, args.tol)
        header.append("system_period")
        for row in rows:
            row.append("none" if period is None else period)
    write_csv(header, rows, args.output)


def cmd_period(args):
    params = model_params(args)
    period = evolution_period(build_spectral(params), args.tol, args.max_multiple)
    write_csv(["n", "omega", "J", "period"],
              [[params.n, params.omega, params.j_coupling, "none" if period is None else period]],
              args.output)


def cmd_evolve(args):
    cfg = scenario_from_args(args)
    if cfg.state is None:
        raise ConfigError("evolve needs an initial state (--state, --fock, --coherent or --pair)")
    state = parse_state(cfg.state, cfg.params.n)
    if args.labels:
        labels = [tuple(int(x) for x in _split(lab)) for lab in args.labels.split(";")]
    else:
        labels = [s for m in sorted(state.sectors) for s in enumerate_sector(cfg.params.n, m).states]
    series = probability_series(state, cfg.params, cfg.times(), labels)
    header = ["t"] + [occupation_label(lab) for lab in series.labels]
    rows = [[t, *series.probabilities[i]] for i, t in enumerate(series.times)]
    write_csv(header, rows, cfg.output)


def cmd_survival(args):
    cfg = scenario_from_args(args)
    if not args.fock:
        raise ConfigError("survival needs --fock occupations")
    occ = tuple(int(x) for x in _split(args.fock))
    times = cfg.times()
    p = survival_probability(occ, cfg.params, times)
    header, cols = ["t", occupation_label(occ)], [p]
    if args.closed_form:
        if any(occ[1:]):
            raise ConfigError("closed form applies to |m00> initial states")
        header.append("closed_form")
        cols.append(closed_form_survival(occ[0], cfg.params, times))
    write_csv(header, [[t, *(c[i] for c in cols)] for i, t in enumerate(times)], cfg.output)


def cmd_wnoon(args):
    params = model_params(args)
    descriptor = _state_descriptor(args)
    if descriptor is None:
        raise ConfigError("wnoon needs an initial state")
    state = parse_state(descriptor, params.n)
    photons = [int(x) for x in _split(args.photons)]
    rows = []
    for k in photons:
        for finder in (find_w_times, find_noon_times):
            report = finder(state, params, k, tol=args.tol)
            if not report.found:
                rows.append([report.event_kind, k, "none", None])
            rows.extend([report.event_kind, k, ev.time, ev.probability] for ev in report.events)
    write_csv(["kind", "photons", "time", "probability"], rows, args.output)


def cmd_transfer(args):
    params = model_params(args)
    if args.peak:
        if args.concurrence is None:
            raise ConfigError("--peak needs --concurrence")
        res = peak_transfer_search(args.concurrence, args.horizon, params)
        write_csv(["t", "theta", "C", "p"],
                  [[res.t, 0.5 * math.asin(res.concurrence), res.concurrence, res.probability]],
                  args.output)
        return
    if args.closed_form and params != REFERENCE_TRANSFER_PARAMS:
        raise ConfigError("closed form is derived for n=4, omega=1, J=0.5")
    cfg = scenario_from_args(args)
    thetas = _float_list(args.thetas)
    rows = []
    for th in thetas:
        for t in cfg.times():
            res = transfer_probability_numeric(th, params, t)
            p = transfer_probability_closed_form(t, res.concurrence) if args.closed_form else res.probability
            rows.append([t, th, res.concurrence, p])
    write_csv(["t", "theta", "C", "p"], rows, cfg.output)


def cmd_lindblad(args):
    params = model_params(args)
    loss = LossParams(args.gamma)
    times = sorted(_float_list(args.times))
    if not times or times[0] < 0:
        raise ConfigError("--times must list non-negative times")
    if args.thetas:
        thetas = np.array(_float_list(args.thetas))
    else:
        thetas = reproduce.fig11_thetas(args.theta_points)
    values, traj = transfer_sweep(thetas, params, loss, times, args.dt)
    rows = [[t, th, loss.gamma, values[i, b]] for i, t in enumerate(times) for b, th in enumerate(thetas)]
    write_csv(["t", "theta", "gamma", "p"], rows, args.output)
    diag = json.dumps(traj.diagnostics(), indent=2, sort_keys=True)
    if args.diagnostics:
        Path(args.diagnostics).write_text(diag + "\n")
    else:
        print(diag, file=sys.stderr)


def cmd_reproduce(args):
    outdir = Path(args.output_dir or os.environ.get(OUTPUT_DIR_ENV) or ".")
    targets = list(reproduce.TARGETS) if args.target == "all" else [args.target]
    for name in targets:
        header, rows = reproduce.TARGETS[name]()
        path = outdir / f"{name}.csv"
        write_csv(header, rows, path)
        print(path)


# -- parser --------------------------------------------------------------------

def build_parser() -> tuple[argparse.ArgumentParser, dict[str, argparse.ArgumentParser]]:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key=value file supplying defaults for any flag")
    common.add_argument("--n", type=int, default=None, help="number of cavities (default 3; 4 for transfer)")
    common.add_argument("--omega", type=float, default=1.0, help="cavity frequency")
    common.add_argument("--J", dest="j_coupling", type=float, default=0.5, help="hopping strength")
    common.add_argument("-o", "--output", help="output CSV path (default: stdout)")

    grid = argparse.ArgumentParser(add_help=False)
    grid.add_argument("--start", type=float, default=0.0)
    grid.add_argument("--stop", type=float, default=None, help="default: one revival period")
    grid.add_argument("--points", type=int, default=reproduce.GRID_POINTS)

    state = argparse.ArgumentParser(add_help=False)
    state.add_argument("--state", help="'fock m1 .. mn' | 'coherent a1 .. an' | 'pair THETA first|last'")
    state.add_argument("--fock", help="occupations, e.g. 1,0,0")
    state.add_argument("--coherent", help="amplitudes, e.g. 0.1i,0.1i,0.1i")
    state.add_argument("--pair", help="THETA [first|last]")

    parser = argparse.ArgumentParser(prog="cca-transport", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    subs = {}

    p = sub.add_parser("spectrum", parents=[common], help="mode frequencies")
    p.add_argument("--period", action="store_true", help="add the revival period column")
    p.add_argument("--tol", type=float, default=1e-9)
    p.set_defaults(func=cmd_spectrum)
    subs["spectrum"] = p

    p = sub.add_parser("period", parents=[common], help="revival period from frequency gaps")
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--max-multiple", type=int, default=1_000_000)
    p.set_defaults(func=cmd_period)
    subs["period"] = p

    p = sub.add_parser("evolve", parents=[common, grid, state], help="occupation probabilities vs time")
    p.add_argument("--labels", help="';'-separated occupations, e.g. '1,0,0;0,1,0'")
    p.set_defaults(func=cmd_evolve)
    subs["evolve"] = p

    p = sub.add_parser("survival", parents=[common, grid, state], help="return probability of a Fock state")
    p.add_argument("--closed-form", action="store_true", help="add cos^(4m)(Jt/sqrt2) column (n=3)")
    p.set_defaults(func=cmd_survival)
    subs["survival"] = p

    p = sub.add_parser("wnoon", parents=[common, state], help="W and NOON event times (n=3)")
    p.add_argument("--photons", default="1,2,3")
    p.add_argument("--tol", type=float, default=1e-8)
    p.set_defaults(func=cmd_wnoon)
    subs["wnoon"] = p

    p = sub.add_parser("transfer", parents=[common, grid], help="entangled-pair transfer probability")
    p.add_argument("--thetas", default=str(math.pi / 4), help="comma-separated theta values")
    p.add_argument("--closed-form", action="store_true", help="evaluate the n=4 closed form")
    p.add_argument("--peak", action="store_true", help="search for the best transfer time")
    p.add_argument("--concurrence", type=float)
    p.add_argument("--horizon", type=float, default=120.0)
    p.set_defaults(func=cmd_transfer)
    subs["transfer"] = p

    p = sub.add_parser("lindblad", parents=[common], help="lossy transfer probability sweep")
    p.add_argument("--gamma", type=float, default=0.1)
    p.add_argument("--times", default="10,100")
    p.add_argument("--thetas", help="comma-separated theta values (default: midpoint grid)")
    p.add_argument("--theta-points", type=int, default=181)
    p.add_argument("--dt", type=float, default=1e-3)
    p.add_argument("--diagnostics", help="JSON path for trace/positivity extrema (default: stderr)")
    p.set_defaults(func=cmd_lindblad)
    subs["lindblad"] = p

    p = sub.add_parser("reproduce", parents=[common], help="regenerate a figure or table data file")
    p.add_argument("target", choices=[*reproduce.TARGETS, "all"])
    p.add_argument("--output-dir", help=f"directory for CSV files (default: ${OUTPUT_DIR_ENV} or .)")
    p.set_defaults(func=cmd_reproduce)
    subs["reproduce"] = p
    return parser, subs


def _apply_config(parser, subs, args, argv):
    values = read_config(args.config)
    sub = subs[args.command]
    actions = {a.dest: a for a in sub._actions}
    defaults = {}
    for key, value in values.items():
        if key in ("config", "help", "command", "func") or key not in actions:
            raise ConfigError(f"unknown config key {key!r} for '{args.command}'")
        if isinstance(actions[key], argparse._StoreTrueAction):
            defaults[key] = value.lower() in ("1", "true", "yes", "on")
        else:
            defaults[key] = value  # argparse applies the action's type to string defaults
    sub.set_defaults(**defaults)
    return parser.parse_args(argv)


def main(argv=None) -> int:
    parser, subs = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    args = parser.parse_args(argv)
    try:
        if args.config:
            args = _apply_config(parser, subs, args, argv)
        args.func(args)
    except (NumericalGuardError, DimensionCapError, PeriodUnavailableError) as exc:
        print(f"cca-transport: numerical guard: {exc}", file=sys.stderr)
        return 3
    except (ValueError, IndexError) as exc:
        print(f"cca-transport: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
