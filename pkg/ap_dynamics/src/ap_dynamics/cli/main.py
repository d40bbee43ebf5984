import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Callable, NamedTuple, Optional, Sequence, Type

from pydantic import BaseModel

from ap_dynamics.cli.config import (
    AnalyzeConfig,
    ApScanConfig,
    ForcingConfig,
    HorseshoeConfig,
    IcLineConfig,
    LevelsConfig,
    MelnikovConfig,
    ScatterConfig,
    TimemapConfig,
    read_config,
    resolve_config,
    validate_overrides,
)
from ap_dynamics.cli.output import metadata, write_csv, write_json
from ap_dynamics.config.settings import RuntimeSettings
from ap_dynamics.exception.errors import ApDynamicsError, ConfigError
from ap_dynamics.exception.exception_handler import exception_handler
from ap_dynamics.execution.base import Timer
from ap_dynamics.flow.fixed_points import fixed_point_scan
from ap_dynamics.flow.forcing import Periodic, Step
from ap_dynamics.flow.poincare import scatter
from ap_dynamics.flow.waveforms import get_waveform
from ap_dynamics.horseshoe.certify import EXIT_CODES, HorseshoeCertificate, HorseshoeCertifier
from ap_dynamics.horseshoe.periodic import PeriodicOrbitFinder
from ap_dynamics.horseshoe.regions import build_regions
from ap_dynamics.horseshoe.thresholds import tau_stars
from ap_dynamics.melnikov.area import loop_area_k
from ap_dynamics.melnikov.functions import detect_zeros, eta, omega_threshold, sample_delta
from ap_dynamics.melnikov.homoclinic import homoclinic_orbit
from ap_dynamics.model.catalog import get_nonlinearity
from ap_dynamics.model.frame import EnergyFrame
from ap_dynamics.model.levels import classify_level, ordering_check
from ap_dynamics.timemap.integrals import TimeMapKind, TimeMapQuery

INCOMPLETE_SEARCH = 3

Handler = Callable[[Any, Path, RuntimeSettings, logging.Logger], int]


class Command(NamedTuple):
    name: str
    model: Type[BaseModel]
    handler: Handler
    nested: dict[str, tuple[Type[BaseModel], tuple[str, ...]]] = {}


def run_analyze(config: AnalyzeConfig, out: Path, settings: RuntimeSettings, logger: logging.Logger) -> int:
    f = get_nonlinearity(config.f)
    frames = []
    for k in config.k:
        frame = EnergyFrame.of(f, k)
        entry = {
            "k": k,
            "x_u": frame.x_u,
            "x_s": frame.x_s,
            "phi_x_u": frame.phi_at_xu,
            "phi_x_s": frame.phi_at_xs,
            "x_h": frame.x_h,
            "levels": [],
        }
        if not frame.is_degenerate:
            entry["loop_area"] = loop_area_k(f, k)
            if f.is_smooth:
                entry["saddle_eigenvalue"] = frame.saddle_eigenvalue
        for rho in config.rho:
            level = classify_level(frame, rho)
            entry["levels"].append({"rho": rho, "kind": level.kind.value, "roots": dict(level.roots)})
        frames.append(entry)

    ks = sorted(set(config.k))
    ordering = []
    for k1, k2 in zip(ks, ks[1:]):
        report = ordering_check(f, k1, k2)
        ordering.append({"k1": k1, "k2": k2, "chain": list(report.chain), "holds": report.holds})

    result = {
        "nonlinearity": {
            "name": f.name,
            "smoothness": f.smoothness,
            "breakpoints": list(f.breakpoints),
            "strictly_convex": f.check_convexity(),
        },
        "frames": frames,
        "ordering": ordering,
    }
    write_json(out / "analyze.json", result, metadata("analyze", config))
    return 0


def run_timemap(config: TimemapConfig, out: Path, settings: RuntimeSettings, logger: logging.Logger) -> int:
    frame = EnergyFrame.of(get_nonlinearity(config.f), config.k)
    if config.kind is TimeMapKind.GENERIC:
        if config.x1 is None or config.x2 is None:
            raise ConfigError("x1" if config.x1 is None else "x2", "required for kind Generic")
        x1, x2 = config.x1, config.x2
    else:
        if config.r is None:
            raise ConfigError("r", f"required for kind {config.kind.value}")
        x1, x2 = config.r, None

    rows = []
    for rho in config.rho:
        value = TimeMapQuery(frame, rho, x1, x2, config.kind, config.rtol).evaluate()
        rows.append((rho, config.kind.value, x1 if x2 is None else x2, value.value, value.err_estimate))
        logger.info(f"timemap: rho={rho:.10g} tau={value.value:.10g}" + (" (divergent)" if value.diverges else ""))
    write_csv(out / "timemap.csv", ["rho", "kind", "r", "tau", "err_estimate"], rows, metadata("timemap", config))
    return 0


def run_melnikov(config: MelnikovConfig, out: Path, settings: RuntimeSettings, logger: logging.Logger) -> int:
    q = homoclinic_orbit(get_nonlinearity(config.f), config.k)
    base = get_waveform(config.p0)
    p0 = base.scaled(config.omega)
    alphas, values = sample_delta(q, p0, n=config.samples, c0=config.c0)
    report = detect_zeros(alphas, values, p0.period, q=q, p0=p0, c0=config.c0)
    meta = metadata("melnikov", config)

    write_csv(out / "melnikov_delta.csv", ["alpha", "delta"], zip(alphas, values), meta)
    write_csv(out / "melnikov_eta.csv", ["omega", "eta"], ((w, eta(q, w)) for w in config.eta_omegas), meta)
    result = {"zeros": report.as_dict(), "tail_constant": q.tail_constant}
    if config.threshold:
        result["omega_threshold"] = omega_threshold(q, base).as_dict()
    write_json(out / "melnikov_zeros.json", result, meta)
    logger.info(f"melnikov: {len(report.simple_zeros)} simple zeros over one period")
    return 0


def run_scatter(config: ScatterConfig, out: Path, settings: RuntimeSettings, logger: logging.Logger) -> int:
    rows = scatter(
        get_nonlinearity(config.f),
        config.forcing.build(config.c),
        config.ic.build(),
        config.n_iter,
        rtol=config.rtol,
        atol=config.atol,
        blowup_bound=config.blowup_bound,
        settings=settings,
        logger=logger,
    )
    count = write_csv(out / "scatter.csv", ["ic_index", "iter", "x", "y", "flag"],
                      ((r.ic_index, r.iter, r.x, r.y, r.flag) for r in rows), metadata("scatter", config))
    logger.info(f"scatter: {count} rows")
    return 0


def stepwise_forcing(config: HorseshoeConfig) -> Step:
    """
    Raises:
        ConfigError: If a switching time is missing and no t_factor is set.
    """
    t1, t2 = config.t1, config.t2
    if t1 is None or t2 is None:
        if config.t_factor is None:
            raise ConfigError("t1" if t1 is None else "t2", "set it explicitly or set t_factor")
        geometry = build_regions(get_nonlinearity(config.f), config.k1, config.k2, config.levels.build())
        stars = tau_stars(geometry, config.m)
        t1 = config.t_factor * stars.tau1 if t1 is None else t1
        t2 = config.t_factor * stars.tau2 if t2 is None else t2
    return Step(k1=config.k1, k2=config.k2, t1=t1, t2=t2)


def certify(config: HorseshoeConfig, settings: RuntimeSettings, logger: logging.Logger) -> HorseshoeCertificate:
    return HorseshoeCertifier(
        get_nonlinearity(config.f),
        stepwise_forcing(config),
        config.levels.build(),
        config.m,
        path_count=config.paths,
        nodes=config.nodes,
        image_tol=config.image_tol,
        max_nodes=config.max_nodes,
        rtol=config.rtol,
        atol=config.atol,
        settings=settings,
        logger=logger,
    ).certify()


def run_certify(config: HorseshoeConfig, out: Path, settings: RuntimeSettings, logger: logging.Logger) -> int:
    certificate = certify(config, settings, logger)
    write_json(out / "horseshoe_certificate.json", certificate.report(), metadata("horseshoe certify", config))
    print(certificate.verdict)
    return certificate.exit_code


def run_periodic(config: HorseshoeConfig, out: Path, settings: RuntimeSettings, logger: logging.Logger) -> int:
    certificate = certify(config, settings, logger)
    meta = metadata("horseshoe periodic", config)
    write_json(out / "horseshoe_certificate.json", certificate.report(), meta)
    print(certificate.verdict)
    if not certificate.granted:
        return certificate.exit_code

    finder = PeriodicOrbitFinder(certificate, grid=config.grid, settings=settings, logger=logger)
    searches = [finder.find(word) for word in config.itineraries]
    result = []
    for search in searches:
        entry = {
            "itinerary": list(search.itinerary.symbols),
            "pairs": search.itinerary.pairs,
            "found": search.found,
            "seeds": search.seeds,
            "candidates": search.candidates,
            "rejected": search.rejected,
        }
        if search.found:
            orbit = search.orbit
            entry.update(point=list(orbit.point), residual=orbit.residual, fresh_residual=orbit.fresh_residual,
                         iterates=[list(p) for p in orbit.iterates])
        result.append(entry)
        print(f"itinerary {entry['itinerary']}: {'found' if search.found else 'not found'}")
    write_json(out / "horseshoe_periodic.json", result, meta)
    return EXIT_CODES["granted"] if all(s.found for s in searches) else INCOMPLETE_SEARCH


def run_ap_scan(config: ApScanConfig, out: Path, settings: RuntimeSettings, logger: logging.Logger) -> int:
    f = get_nonlinearity(config.f)
    window = config.window.build()
    rows = []
    for k in config.ks:
        forcing = Periodic(k=k, eps=config.eps, omega=config.omega, p0=config.p0, c=config.c)
        found = fixed_point_scan(f, forcing, window, config.grid, logger=logger, rtol=config.rtol,
                                 atol=config.atol, settings=settings)
        rows.append((k, len(found)))
    write_csv(out / "ap_scan.csv", ["k", "count"], rows, metadata("ap-scan", config))
    return 0


COMMANDS = {
    "analyze": Command("analyze", AnalyzeConfig, run_analyze),
    "timemap": Command("timemap", TimemapConfig, run_timemap),
    "melnikov": Command("melnikov", MelnikovConfig, run_melnikov),
    "scatter": Command("scatter", ScatterConfig, run_scatter, {
        "forcing": (ForcingConfig, ("variant", "k", "k1", "k2", "t1", "t2", "eps", "omega", "p0", "phase")),
        "ic": (IcLineConfig, ("u0_min", "u0_max", "count", "y0")),
    }),
    "horseshoe certify": Command("horseshoe certify", HorseshoeConfig, run_certify, {
        "levels": (LevelsConfig, ("A", "B", "D")),
    }),
    "horseshoe periodic": Command("horseshoe periodic", HorseshoeConfig, run_periodic, {
        "levels": (LevelsConfig, ("A", "B", "D")),
    }),
    "ap-scan": Command("ap-scan", ApScanConfig, run_ap_scan),
}


def _common(parser: argparse.ArgumentParser):
    parser.add_argument("--config", help="JSON config file, or the name of a shipped preset")
    parser.add_argument("--out", default=".", help="output directory (default: current directory)")
    parser.add_argument("--log-level", default="WARNING", choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    parser.add_argument("--threads", type=int, help="worker cap, overrides HORSESHOE_THREADS")
    parser.add_argument("--f", dest="f", help="nonlinearity name (abs, sqrt1p)")


def _horseshoe_flags(parser: argparse.ArgumentParser):
    for name in ("k1", "k2", "t1", "t2", "t-factor", "A", "B", "D", "image-tol", "rtol", "atol"):
        parser.add_argument(f"--{name}", type=float)
    for name in ("m", "paths", "nodes", "max-nodes"):
        parser.add_argument(f"--{name}", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ap-dynamics",
        description="Numerical experiments on u'' + c u' + f(u) = p(t) with an Ambrosetti-Prodi nonlinearity.",
    )
    commands = parser.add_subparsers(dest="subcommand", required=True)

    analyze = commands.add_parser("analyze", help="equilibria, homoclinic loops and level classification")
    _common(analyze)
    analyze.add_argument("--k", type=float, nargs="+")
    analyze.add_argument("--rho", type=float, nargs="+")
    analyze.set_defaults(command="analyze")

    timemap = commands.add_parser("timemap", help="time maps along level lines")
    _common(timemap)
    timemap.add_argument("--k", type=float)
    timemap.add_argument("--rho", type=float, nargs="+")
    timemap.add_argument("--kind", choices=[kind.value for kind in TimeMapKind])
    for name in ("r", "x1", "x2", "rtol"):
        timemap.add_argument(f"--{name}", type=float)
    timemap.set_defaults(command="timemap")

    melnikov = commands.add_parser("melnikov", help="Melnikov function, zeros and eta")
    _common(melnikov)
    for name in ("k", "omega", "c0"):
        melnikov.add_argument(f"--{name}", type=float)
    melnikov.add_argument("--p0")
    melnikov.add_argument("--samples", type=int)
    melnikov.add_argument("--eta-omegas", type=float, nargs="+")
    melnikov.add_argument("--threshold", action="store_const", const=True)
    melnikov.set_defaults(command="melnikov")

    scatter_parser = commands.add_parser("scatter", help="Poincare iterates of a line of initial conditions")
    _common(scatter_parser)
    scatter_parser.add_argument("--variant", choices=["constant", "step", "periodic"])
    for name in ("k", "k1", "k2", "t1", "t2", "eps", "omega", "phase", "c", "u0-min", "u0-max", "y0",
                 "rtol", "atol", "blowup-bound"):
        scatter_parser.add_argument(f"--{name}", type=float)
    scatter_parser.add_argument("--p0")
    scatter_parser.add_argument("--count", type=int)
    scatter_parser.add_argument("--n-iter", type=int)
    scatter_parser.set_defaults(command="scatter")

    horseshoe = commands.add_parser("horseshoe", help="stepwise forcing: certification and periodic orbits")
    actions = horseshoe.add_subparsers(dest="action", required=True)
    certify_parser = actions.add_parser("certify", help="stretching certificate for the stepwise system")
    _common(certify_parser)
    _horseshoe_flags(certify_parser)
    certify_parser.set_defaults(command="horseshoe certify")
    periodic = actions.add_parser("periodic", help="periodic points realizing itineraries")
    _common(periodic)
    _horseshoe_flags(periodic)
    periodic.set_defaults(command="horseshoe periodic")

    ap_scan = commands.add_parser("ap-scan", help="number of fixed points of the Poincare map against k")
    _common(ap_scan)
    ap_scan.add_argument("--ks", type=float, nargs="+")
    for name in ("eps", "omega", "c", "rtol", "atol"):
        ap_scan.add_argument(f"--{name}", type=float)
    ap_scan.add_argument("--p0")
    ap_scan.set_defaults(command="ap-scan")
    return parser


def collect_overrides(command: Command, values: dict) -> dict:
    """Flag values that were set, checked against partial models of the config blocks."""
    top = {name: values[name] for name in command.model.model_fields
           if name not in command.nested and values.get(name) is not None}
    overrides = validate_overrides(command.model, top)
    for field, (model, names) in command.nested.items():
        block = {name: values[name] for name in names if values.get(name) is not None}
        if block:
            overrides[field] = validate_overrides(model, block)
    return overrides


def run(argv: Optional[Sequence[str]] = None) -> int:
    """
    Parse `argv`, resolve the config and run one subcommand.

    Returns:
        int: 0 on success, 1 on configuration or library errors, and for horseshoe runs 2 when
        the certificate is declined and 3 when it is inconclusive.
    """
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=args.log_level, format="%(asctime)s %(levelname)s %(name)s: %(message)s")
    logger = logging.getLogger("ap_dynamics")
    command = COMMANDS[args.command]

    try:
        with exception_handler(logger=logger, subcommand=command.name, config=args.config):
            settings = RuntimeSettings.from_env(args.threads)
            data = read_config(args.config) if args.config else None
            config = resolve_config(command.model, data, collect_overrides(command, vars(args)))
            return Timer(command.name, logger)(command.handler)(config, Path(args.out), settings, logger)
    except ConfigError as e:
        print(f"configuration error at '{e.key}': {e}", file=sys.stderr)
        return 1
    except (ApDynamicsError, FileNotFoundError, json.JSONDecodeError) as e:
        print(str(e), file=sys.stderr)
        return 1


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
