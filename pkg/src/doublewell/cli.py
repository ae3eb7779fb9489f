"""Command-line front end.

Subcommands: ``spectrum`` (one-strength eigenpair table), ``quench`` (time
series and beat decomposition), ``scan`` (strength sweep with crossing
detection), ``oracle`` (independent finite-difference energies). Every run
echoes its effective configuration into the output directory. Exit codes:
0 success, 2 configuration error, 3 convergence error.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import fields
from pathlib import Path

import numpy as np

from . import outputs
from .assembly import assemble_2d
from .config import RunConfig, load_config, save_config
from .eigensolve import fd_oracle, solve_lowest
from .errors import ConfigurationError, ConvergenceError
from .frequency import (
    dominant,
    frequency_components,
    tunneling_period,
)
from .mesh import build_1d_mesh, build_2d_mesh
from .quench import decompose, evolve_probabilities, initial_state
from .scan import classify_state, detect_avoided_crossings, scan_levels

_FLAGS = {
    "well_length": (float, "well width [L]"),
    "barrier_width": (float, "barrier width [L]"),
    "barrier_height": (float, "barrier height [1/L^2]"),
    "kind": (str, "interaction kind: contact | soft_coulomb | hard_coulomb"),
    "softening": (float, "soft-core softening length [L]"),
    "strength": (float, "interaction strength U for spectrum/oracle [1/L]"),
    "h": (float, "target mesh size [L]"),
    "num_pairs": (int, "number of eigenpairs K"),
    "tol": (float, "relative residual tolerance"),
    "norm_floor": (float, "required captured norm of the decomposition"),
    "u_min": (float, "scan lower bound [1/L]"),
    "u_max": (float, "scan upper bound [1/L]"),
    "num_u": (int, "number of scan points"),
    "refine_du": (float, "crossing refinement resolution in U"),
    "quench_u": (float, "interaction strength for the quench [1/L]"),
    "time_horizon": (float, "evolution horizon [L^2]; 0 = auto"),
    "num_times": (int, "number of time samples"),
    "oracle_grid": (int, "finite-difference intervals per axis"),
    "outdir": (str, "output directory"),
    "workers": (int, "concurrent solves during scans"),
}


def build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--config", type=str, help="config file; flags override it")
    for name, (typ, help_text) in _FLAGS.items():
        shared.add_argument(
            f"--{name.replace('_', '-')}", dest=name, type=typ, default=None,
            help=help_text,
        )
    shared.add_argument("--refine", dest="refine", action="store_true", default=None,
                        help="refine crossing centers (default)")
    shared.add_argument("--no-refine", dest="refine", action="store_false", default=None,
                        help="skip crossing refinement")

    parser = argparse.ArgumentParser(
        prog="doublewell",
        description="Tunneling of two interacting bosons in a 1D double well",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("spectrum", parents=[shared],
                   help="eigenpair table at one interaction strength")
    sub.add_parser("quench", parents=[shared],
                   help="quench time series and beat decomposition")
    sub.add_parser("scan", parents=[shared],
                   help="interaction-strength sweep with crossing detection")
    sub.add_parser("oracle", parents=[shared],
                   help="independent finite-difference energies")
    return parser


def config_from_args(args) -> RunConfig:
    cfg = load_config(args.config) if args.config else RunConfig()
    for f in fields(RunConfig):
        value = getattr(args, f.name, None)
        if value is not None:
            setattr(cfg, f.name, value)
    return cfg.validate()


def _prepare_outdir(cfg: RunConfig) -> Path:
    out = Path(cfg.outdir)
    out.mkdir(parents=True, exist_ok=True)
    save_config(cfg, out / "config.txt")
    return out


def _full_bundle(cfg: RunConfig):
    spec = cfg.potential_spec()
    mesh1 = build_1d_mesh(spec, cfg.h, include_region_split=True)
    return spec, assemble_2d(build_2d_mesh(mesh1), spec, cfg.interaction_spec())


def cmd_spectrum(cfg: RunConfig) -> int:
    out = _prepare_outdir(cfg)
    spec, bundle = _full_bundle(cfg)
    pairs = solve_lowest(
        bundle.hamiltonian(cfg.strength), bundle.mass, cfg.num_pairs, cfg.tol
    )
    slopes, regions, classes = [], [], []
    for p in pairs:
        label, w_i, w_ii, w_iii = classify_state(p, *bundle.regions)
        slopes.append(float(p.coefficients @ (bundle.v_int @ p.coefficients)))
        regions.append((w_i, w_ii, w_iii))
        classes.append(label)
    outputs.write_spectrum_csv(out / "spectrum.csv", pairs, slopes, regions, classes)
    print(f"wrote {out / 'spectrum.csv'} ({len(pairs)} eigenpairs)")
    return 0


def _auto_times(components, doms, horizon, n_times):
    if horizon <= 0:
        omegas = [c.omega for c in (doms or components) if c.omega > 0]
        horizon = 1.25 * 2 * np.pi / min(omegas) if omegas else 1.0
    return np.linspace(0.0, horizon, n_times)


def cmd_quench(cfg: RunConfig) -> int:
    out = _prepare_outdir(cfg)
    spec, bundle = _full_bundle(cfg)
    state = initial_state(
        spec, cfg.interaction_spec(), cfg.quench_u, cfg.h,
        full_basis=bundle.basis, tol=cfg.tol,
    )
    pairs = solve_lowest(
        bundle.hamiltonian(cfg.quench_u), bundle.mass, cfg.num_pairs, cfg.tol
    )
    decomposition = decompose(state, pairs, bundle.mass, cfg.norm_floor)
    components = frequency_components(
        decomposition, pairs, bundle.s_i, bundle.s_ii
    )
    doms = dominant(components)
    times = _auto_times(components, doms, cfg.time_horizon, cfg.num_times)
    series = evolve_probabilities(
        decomposition, pairs, bundle.s_i, bundle.s_ii, bundle.s_iii, times
    )
    outputs.write_timeseries_csv(out / "timeseries.csv", series)
    outputs.write_frequencies_csv(out / "frequencies.csv", components, set(doms))
    try:
        period = tunneling_period(doms)
    except ValueError:
        period = float("nan")
    outputs.write_summary(out, {
        "captured_norm": decomposition.captured_norm,
        "tunneling_period": period,
        "dominant_count": len(doms),
        "initial_energy": state.energy,
        "quench_u": cfg.quench_u,
        "norm_warning": decomposition.norm_warning,
    })
    print(f"wrote {out}/timeseries.csv, frequencies.csv, summary.txt "
          f"(captured {decomposition.captured_norm:.6f}, {len(doms)} dominant)")
    return 0


def cmd_scan(cfg: RunConfig) -> int:
    out = _prepare_outdir(cfg)
    spec = cfg.potential_spec()
    u_grid = np.linspace(cfg.u_min, cfg.u_max, cfg.num_u)
    writer = outputs.ScanCsvWriter(out / "scan.csv")

    def progress(done, total):
        print(f"\r  scan {done}/{total}", end="", file=sys.stderr, flush=True)

    try:
        result = scan_levels(
            spec, cfg.interaction_spec(), u_grid, cfg.num_pairs,
            h=cfg.h, tol=cfg.tol, workers=cfg.workers,
            collect_dominant=True, progress=progress,
            row_sink=lambda i, res: writer.write_point(i, res),
        )
    finally:
        writer.close()
        print(file=sys.stderr)
    crossings = detect_avoided_crossings(
        result, refine_du=cfg.refine_du if cfg.refine else None
    )
    outputs.write_crossings_csv(out / "crossings.csv", crossings)
    outputs.write_initial_energy_csv(
        out / "initial_energy.csv", result.u_grid, result.initial_energies
    )
    records = []
    component_ids: dict[tuple, int] = {}
    for i in range(len(u_grid)):
        for comp in result.dominant_components[i]:
            key = tuple(sorted((
                int(result.branch_ids[i, comp.m]), int(result.branch_ids[i, comp.n])
            )))
            cid = component_ids.setdefault(key, len(component_ids))
            records.append((u_grid[i], comp.omega, comp.amplitude, cid))
    outputs.write_dominant_vs_u_csv(out / "dominant_vs_U.csv", records)
    print(f"wrote {out}/scan.csv, crossings.csv ({len(crossings)} crossings), "
          f"dominant_vs_U.csv, initial_energy.csv")
    return 0


def cmd_oracle(cfg: RunConfig) -> int:
    out = _prepare_outdir(cfg)
    k = min(cfg.num_pairs, 40)
    energies = fd_oracle(
        cfg.potential_spec(), cfg.interaction_spec(), cfg.strength,
        cfg.oracle_grid, k,
    )
    outputs.write_oracle_csv(out / "oracle.csv", energies)
    print(f"wrote {out / 'oracle.csv'} ({k} energies)")
    return 0


_COMMANDS = {
    "spectrum": cmd_spectrum,
    "quench": cmd_quench,
    "scan": cmd_scan,
    "oracle": cmd_oracle,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
        return _COMMANDS[args.command](cfg)
    except ConfigurationError as err:
        print(f"configuration error: {err}", file=sys.stderr)
        return 2
    except ConvergenceError as err:
        print(f"convergence error: {err}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
