"""Command-line entry point: ``openbaker <command> [--config FILE] [--set section.key=value ...]``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import io
from .classical import compute_measure, continuous_repeller
from .config import ConfigError, RunConfig, load_config
from .orbits import enumerate_orbits, orbit_geometry
from .phase_space import accumulate_Q, overlap_O
from .pipeline import dloc_rows, exact_resonances, husimi_pair, nsf_scan, nu_grid, outside_candidates, run_semiclassical
from .quantum import open_baker
from .reflectivity import ReflectivityProfile
from .scars import ehrenfest_time, scar_pair
from .spectral import MAX_DIMENSION, NumericalFailure, ResourceGuardError

logger = logging.getLogger("openbaker")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_RESOURCE = 0, 2, 3, 4

SCAN_COLUMNS = ["R", "profile", "nu_c", "epsilon", "N", "N_SF", "N_SF_over_N", "P_reached", "reached_flag"]
DLOC_COLUMNS = ["N", "profile", "R", "nu_c", "M_N", "M_N3", "d_loc"]


def _meta(cfg: RunConfig, **extra) -> dict:
    d = {"config_hash": cfg.hash(), "N": cfg.N, "profile": cfg.reflectivity.to_dict()}
    d.update(extra)
    return d


def _outdir(cfg: RunConfig) -> Path:
    out = Path(cfg.output)
    out.mkdir(parents=True, exist_ok=True)
    io._atomic_write(out / "config.resolved.ini", (cfg.to_ini() + f"# config_hash = {cfg.hash()}\n").encode())
    return out


def cmd_classical_repeller(cfg: RunConfig) -> None:
    c = cfg.classical
    out = _outdir(cfg)
    prof = cfg.reflectivity
    fwd = compute_measure(prof, "forward", c.t, c.K, c.n_ic, c.seed)
    bwd = compute_measure(prof, "backward", c.t, c.K, c.n_ic, c.seed)
    both = continuous_repeller(fwd, bwd)
    for grid in (fwd, bwd, both):
        io.write_grid(out / f"measure_{grid.direction}", grid.values, _meta(cfg, **grid.metadata()))


def cmd_exact_spectrum(cfg: RunConfig) -> None:
    out = _outdir(cfg)
    res = exact_resonances(cfg.N, cfg.reflectivity)
    meta = _meta(cfg, R=cfg.profile.R, nu_c=cfg.nu_c, n_defective=int(res.defective.sum()))
    io.write_spectrum(out / "spectrum_exact", res.eigenvalues, meta)
    if cfg.spectral.save_vectors:
        io.write_operator(out / "eigvecs_right", res.right, "right-eigenvectors", meta)
        io.write_operator(out / "eigvecs_left", res.left, "left-eigenvectors", meta)


def cmd_dloc(cfg: RunConfig) -> None:
    out = _outdir(cfg)
    s = cfg.spectral
    nus = nu_grid(s.nu_min, s.nu_max, s.nu_step)
    rows = []
    for shape in dict.fromkeys([cfg.profile.shape, "complete"]):
        for R in s.dloc_R if shape != "complete" else (0.0,):
            prof = ReflectivityProfile(shape, R, cfg.profile.A, cfg.profile.B)
            for row in dloc_rows(cfg.N, prof, nus):
                rows.append({**row, "profile": shape, "R": R})
    io.write_table(out / "dloc.csv", rows, DLOC_COLUMNS)
    io.write_json(out / "dloc.json", _meta(cfg, columns=DLOC_COLUMNS, N_pair=[cfg.N, cfg.N // 3]))


def cmd_scar_basis(cfg: RunConfig) -> None:
    out = _outdir(cfg)
    sc = cfg.scar
    U = open_baker(cfg.N, cfg.reflectivity)
    tau = ehrenfest_time(cfg.N) if sc.tau is None else sc.tau
    inside = enumerate_orbits(sc.l_max, (0, 2))
    c = cfg.classical
    outside = outside_candidates(cfg.reflectivity, sc.l_max, sc.n_outside, c.t, c.K, c.n_ic, c.seed)
    geoms = [orbit_geometry(o, sc.action) for o in inside + outside]
    io.write_json(out / "orbits.json", {"orbits": [g.to_dict() for g in geoms], "metadata": _meta(cfg)})
    scars, records = [], []
    for g in geoms:
        for m in range(g.period):
            s = scar_pair(g, m, U, tau, sc.theta)
            scars.append(s)
            records.append({**s.metadata(), "N_R": s.norm_right, "N_L": s.norm_left})
    meta = _meta(cfg, R=cfg.profile.R, scars=records)
    io.write_operator(out / "scars_right", np.column_stack([s.right for s in scars]), "scar-right", meta)
    io.write_operator(out / "scars_left", np.column_stack([s.left for s in scars]), "scar-left", meta)


def _semiclassical_run(cfg: RunConfig, n_outside: int | None = None):
    sc, sm, c = cfg.scar, cfg.semiclassical, cfg.classical
    return run_semiclassical(
        cfg.N,
        cfg.reflectivity,
        nu_c=cfg.nu_c,
        l_max=sc.l_max,
        n_outside=sc.n_outside if n_outside is None else n_outside,
        tau=sc.tau,
        theta=sc.theta,
        action=sc.action,
        ordering=sm.ordering,
        sigma_cut=sm.sigma_cut,
        epsilon=sm.epsilon,
        classical={"t": c.t, "K": c.K, "n_ic": c.n_ic, "seed": c.seed},
    )


def _scan(cfg: RunConfig) -> list[dict]:
    sc, sm, c = cfg.scar, cfg.semiclassical, cfg.classical
    p = cfg.profile
    return nsf_scan(
        cfg.N,
        p.shape,
        sm.R_grid,
        nu_c=cfg.nu_c,
        epsilon=sm.epsilon,
        target=sm.target_P,
        l_max=sc.l_max,
        n_outside=sc.n_outside,
        sigma_cut=sm.sigma_cut,
        ordering=sm.ordering,
        tau=sc.tau,
        theta=sc.theta,
        action=sc.action,
        profile_kwargs={"A": p.A, "B": p.B} if p.shape == "step" else None,
        classical={"t": c.t, "K": c.K, "n_ic": c.n_ic, "seed": c.seed},
    )


def cmd_semiclassical(cfg: RunConfig) -> None:
    out = _outdir(cfg)
    sm = cfg.semiclassical
    run = _semiclassical_run(cfg)
    meta = _meta(cfg, R=cfg.profile.R, nu_c=run.nu_c, basis_size=len(run.basis), rank=run.spectrum.rank)
    io.write_spectrum(out / "spectrum_semiclassical", run.spectrum.eigenvalues, meta)
    r = run.report
    io.write_json(
        out / "performance.json",
        {
            "P": r.P,
            "epsilon": r.epsilon,
            "nu_c": r.nu_c,
            "n_exact_longlived": r.n_exact,
            "N_SF": r.n_sf,
            "matches": [[z.real, z.imag, w.real, w.imag, d] for z, w, d in r.matches],
            "outside_orbits": [o.word for o in run.outside],
            "metadata": meta,
        },
    )
    q_exact, q_semi, _ = husimi_pair(run, sm.husimi_K)
    for grid in (q_exact, q_semi):
        io.write_grid(out / f"Q_{grid.source}", grid.values, _meta(cfg, **grid.metadata()))
    io.write_json(out / "overlap.json", {"O": overlap_O(q_exact, q_semi, sm.overlap_norm), "normalization": sm.overlap_norm, "metadata": meta})
    io.write_table(out / "nsf_scan.csv", _scan(cfg), SCAN_COLUMNS)
    io.write_json(out / "nsf_scan.json", _meta(cfg, columns=SCAN_COLUMNS))


def cmd_husimi(cfg: RunConfig) -> None:
    out = _outdir(cfg)
    res = exact_resonances(cfg.N, cfg.reflectivity)
    grid = accumulate_Q(res, cfg.nu_c, cfg.semiclassical.husimi_K, "exact")
    io.write_grid(out / "Q_exact", grid.values, _meta(cfg, **grid.metadata()))


def cmd_performance_scan(cfg: RunConfig) -> None:
    out = _outdir(cfg)
    io.write_table(out / "nsf_scan.csv", _scan(cfg), SCAN_COLUMNS)
    io.write_json(out / "nsf_scan.json", _meta(cfg, columns=SCAN_COLUMNS))


COMMANDS = {
    "classical-repeller": (cmd_classical_repeller, "forward, backward and intersection measure grids"),
    "exact-spectrum": (cmd_exact_spectrum, "resonances of the open quantum map"),
    "dloc": (cmd_dloc, "local dimension d_loc(nu_c) between N and N/3"),
    "scar-basis": (cmd_scar_basis, "periodic orbits and their scar functions"),
    "semiclassical": (cmd_semiclassical, "scar-function spectrum, performance, Q grids, overlap and N_SF scan"),
    "husimi": (cmd_husimi, "accumulated Husimi repeller of the exact resonances"),
    "performance-scan": (cmd_performance_scan, "N_SF/N needed to reach the target performance, per R"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="openbaker", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_) in COMMANDS.items():
        p = sub.add_parser(name, help=help_)
        p.add_argument("--config", "-c", help="INI config file")
        p.add_argument("--set", "-s", action="append", default=[], metavar="SECTION.KEY=VALUE", help="override a config value")
        p.add_argument("--output", "-o", help="output directory (overrides run.output)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    overrides = list(args.set)
    if args.output:
        overrides.append(f"run.output={args.output}")
    try:
        cfg = load_config(args.config, overrides)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if cfg.N > MAX_DIMENSION:
        print(f"resource guard: N={cfg.N} exceeds {MAX_DIMENSION}", file=sys.stderr)
        return EXIT_RESOURCE
    try:
        COMMANDS[args.command][0](cfg)
    except ResourceGuardError as exc:
        print(f"resource guard: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (NumericalFailure, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
