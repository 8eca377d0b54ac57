"""Command line front end.

One pipeline per invocation: ``subshock-lab <subcommand> --config <path>
[--out <dir>]``.  Numeric results go to CSV files and a single
``report.json`` per run; diagnostics go to standard error only, controlled
by the ``SUBSHOCK_LOG`` environment variable (error, info, debug).  Outputs
are deterministic: fixed file names, shortest round-trip float formatting,
LF line endings, and no timestamps.

Exit codes: 0 on success (including the legitimate no-sub-shock outcome of
``singular``), 2 on validation problems, 3 on solver failures (which also
leave their diagnostics in ``report.json``).
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import bifurc, hetero, layer, pdecheck, slowdyn, spectral
from .config import RunConfig, load_config
from .errors import NoIntersection, SubshockLabError, ValidationError
from .model import WaveProblem, check_lax, subshock_expected

logger = logging.getLogger("subshock_lab.cli")

LOG_LEVELS = {"error": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}


def _configure_logging() -> None:
    name = os.environ.get("SUBSHOCK_LOG", "error")
    if name not in LOG_LEVELS:
        raise ValidationError(
            f"SUBSHOCK_LOG must be one of {sorted(LOG_LEVELS)}, got {name!r}"
        )
    logging.basicConfig(
        stream=sys.stderr,
        level=LOG_LEVELS[name],
        format="%(levelname)s %(name)s: %(message)s",
        force=True,
    )


def _fmt(value: float) -> str:
    # repr of a Python float is the shortest string that round-trips,
    # never more than 17 significant digits
    return repr(float(value))


def _write_csv(path: Path, header: str, columns, comment: Optional[str] = None) -> None:
    rows = np.column_stack(columns)
    with open(path, "w", newline="\n") as fh:
        if comment is not None:
            fh.write(f"# {comment}\n")
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(_fmt(x) for x in row) + "\n")
    logger.info("wrote %s (%d rows)", path, len(rows))


def _write_report(outdir: Path, payload: dict) -> None:
    path = outdir / "report.json"
    with open(path, "w", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    logger.info("wrote %s", path)


def _spectral_dict(report: spectral.SpectralReport) -> dict:
    return {
        "point": list(report.point),
        "epsilon": report.epsilon,
        "eigenvalues": [[ev.real, ev.imag] for ev in report.eigenvalues],
        "n_stable": report.n_stable,
        "n_unstable": report.n_unstable,
        "n_center": report.n_center,
    }


def _base_payload(command: str, cfg: RunConfig, problem: WaveProblem) -> dict:
    lax = check_lax(problem)
    return {
        "command": command,
        "config": dict(cfg.raw),
        "admissibility": {
            "lax_ok": lax.lax_ok,
            "laxbis_ok": lax.laxbis_ok,
            "subshock_expected": subshock_expected(problem).value,
        },
    }


def _profile_csv(path: Path, solution: hetero.HeteroclinicSolution) -> None:
    _write_csv(
        path,
        "x,u,v,w",
        [
            solution.mesh,
            solution.values[:, 0],
            solution.values[:, 1],
            solution.values[:, 2],
        ],
    )


def _solution_dict(solution: hetero.HeteroclinicSolution, singular) -> dict:
    return {
        "epsilon": solution.epsilon,
        "residual_norm": solution.residual_norm,
        "boundary_defect": solution.boundary_defect,
        "layer_width_80": solution.layer_width_80,
        "hausdorff_to_singular": hetero.hausdorff_to_singular(solution, singular),
        "newton_iterations": solution.newton_iterations,
    }


def cmd_spectrum(cfg: RunConfig, outdir: Path) -> int:
    if cfg.epsilon is None:
        raise ValidationError("spectrum needs an epsilon value in the config")
    problem = WaveProblem.build(cfg.model, cfg.u_minus, cfg.u_plus, epsilon=cfg.epsilon)
    labels = ("u_minus", "u_plus")
    reports = {}
    rows_state, rows_re, rows_im = [], [], []
    for label, u in zip(labels, (cfg.u_minus, cfg.u_plus)):
        point = (u, 0.0, float(cfg.model.g(u)))
        rep = spectral.fast_jacobian_spectrum(problem, point, cfg.epsilon)
        reports[f"at_{label}"] = _spectral_dict(rep)
        for ev in rep.eigenvalues:
            rows_state.append(u)
            rows_re.append(ev.real)
            rows_im.append(ev.imag)
    _write_csv(outdir / "spectrum.csv", "state,eig_re,eig_im", [rows_state, rows_re, rows_im])
    payload = _base_payload("spectrum", cfg, problem)
    payload["spectrum"] = reports
    _write_report(outdir, payload)
    return 0


def cmd_singular(cfg: RunConfig, outdir: Path) -> int:
    problem = WaveProblem.build(cfg.model, cfg.u_minus, cfg.u_plus, epsilon=0.0)
    payload = _base_payload("singular", cfg, problem)
    try:
        orbit = hetero.assemble_singular_orbit(problem)
    except NoIntersection as exc:
        logger.info("no sub-shock: %s", exc)
        payload["subshock_found"] = False
        payload["detail"] = str(exc)
        _write_report(outdir, payload)
        return 0
    det = layer.transversality_determinant(problem, orbit.matching)
    adjoint = layer.adjoint_growth_check(problem, orbit.layer)
    x = np.concatenate([orbit.x_left, orbit.x_right])
    vals = np.vstack([orbit.vals_left, orbit.vals_right])
    _write_csv(
        outdir / "singular.csv", "x,u,v,w", [x, vals[:, 0], vals[:, 1], vals[:, 2]]
    )
    payload["subshock_found"] = True
    payload["matching"] = {
        "v_star": orbit.matching.v_star,
        "w_star": orbit.matching.w_star,
        "u_left": orbit.matching.u_left,
        "u_right": orbit.matching.u_right,
        "x_star": 0.0,
    }
    payload["transversality_det"] = det
    payload["adjoint"] = {
        "grows_minus": adjoint.grows_minus,
        "grows_plus": adjoint.grows_plus,
        "rate_minus": adjoint.rate_minus,
        "rate_plus": adjoint.rate_plus,
    }
    _write_report(outdir, payload)
    return 0


def cmd_hetero(cfg: RunConfig, outdir: Path) -> int:
    if cfg.epsilon is None:
        raise ValidationError("hetero needs an epsilon value in the config")
    problem = WaveProblem.build(cfg.model, cfg.u_minus, cfg.u_plus, epsilon=cfg.epsilon)
    singular = hetero.assemble_singular_orbit(problem)
    solution = hetero.solve_heteroclinic(
        problem, cfg.epsilon, L=cfg.L, mesh_size=cfg.mesh_size, singular=singular
    )
    _profile_csv(outdir / "profile.csv", solution)
    payload = _base_payload("hetero", cfg, problem)
    payload["hetero"] = _solution_dict(solution, singular)
    _write_report(outdir, payload)
    return 0


def cmd_sweep(cfg: RunConfig, outdir: Path) -> int:
    if cfg.eps_list is None:
        raise ValidationError("sweep needs an eps_list array in the config")
    problem = WaveProblem.build(
        cfg.model, cfg.u_minus, cfg.u_plus, epsilon=cfg.eps_list[0]
    )
    singular = hetero.assemble_singular_orbit(problem)
    solutions = hetero.sweep_epsilon(
        problem, cfg.eps_list, L=cfg.L, mesh_size=cfg.mesh_size
    )
    table = []
    for sol in solutions:
        _profile_csv(outdir / f"profile_eps_{sol.epsilon:g}.csv", sol)
        table.append(_solution_dict(sol, singular))
    _write_csv(
        outdir / "convergence.csv",
        "epsilon,residual_norm,boundary_defect,layer_width_80,hausdorff_to_singular",
        [
            [row["epsilon"] for row in table],
            [row["residual_norm"] for row in table],
            [row["boundary_defect"] for row in table],
            [row["layer_width_80"] for row in table],
            [row["hausdorff_to_singular"] for row in table],
        ],
    )
    payload = _base_payload("sweep", cfg, problem)
    payload["sweep"] = table
    _write_report(outdir, payload)
    return 0


def cmd_bifurcate(cfg: RunConfig, outdir: Path) -> int:
    if cfg.bifurc is None:
        raise ValidationError("bifurcate needs a bifurc block in the config")
    try:
        system = bifurc.SmallShockSystem.for_model(cfg.model, cfg.u_minus, cfg.u_plus)
    except NotImplementedError as exc:
        raise ValidationError(str(exc)) from exc
    rep1, rep2 = bifurc.equilibria_and_spectra(system)
    soto = bifurc.sotomayor_check(
        bifurc.SmallShockSystem(delta=0.0, u_plus=system.u_plus)
    )
    fit = bifurc.normal_form_coefficients(system)
    profile = bifurc.small_shock_profile(system)
    _profile_csv(outdir / "profile.csv", profile)
    problem = WaveProblem.build(cfg.model, cfg.u_minus, cfg.u_plus, epsilon=1.0)
    payload = _base_payload("bifurcate", cfg, problem)
    payload["bifurcate"] = {
        "delta": system.delta,
        "speed": system.speed,
        "equilibria": {"p1": _spectral_dict(rep1), "p2": _spectral_dict(rep2)},
        "sotomayor": {"c1": soto.c1, "c2": soto.c2, "c3": soto.c3},
        "normal_form": {
            "p": fit.p,
            "q": fit.q,
            "linear_term": fit.linear_term,
            "residual": fit.residual,
        },
        "profile": {
            "residual_norm": profile.residual_norm,
            "boundary_defect": profile.boundary_defect,
            "layer_width_80": profile.layer_width_80,
            "newton_iterations": profile.newton_iterations,
        },
    }
    _write_report(outdir, payload)
    return 0


def cmd_pde(cfg: RunConfig, outdir: Path) -> int:
    if cfg.epsilon is None:
        raise ValidationError("pde needs an epsilon value in the config")
    if cfg.pde is None:
        raise ValidationError("pde needs a pde block in the config")
    problem = WaveProblem.build(cfg.model, cfg.u_minus, cfg.u_plus, epsilon=cfg.epsilon)
    singular = hetero.assemble_singular_orbit(problem)
    solution = hetero.solve_heteroclinic(
        problem, cfg.epsilon, L=cfg.L, mesh_size=cfg.mesh_size, singular=singular
    )
    drift = problem.c * cfg.pde.t_final
    # pad the domain so the moving front stays clear of the clamped ghosts
    x_min = float(solution.mesh[0]) - 2.0 + min(0.0, drift)
    x_max = float(solution.mesh[-1]) + 2.0 + max(0.0, drift)
    grid = pdecheck.Grid1D(
        x_min, x_max, cfg.pde.n_cells, u_left=cfg.u_minus, u_right=cfg.u_plus
    )
    state = pdecheck.state_from_profile(grid, solution)
    n_snapshots = int(round(cfg.pde.t_final / cfg.pde.snapshot_every)) + 1
    logger.info(
        "evolving to t = %g on %d cells (%d snapshots)",
        cfg.pde.t_final,
        cfg.pde.n_cells,
        n_snapshots,
    )
    states = pdecheck.evolve(
        cfg.model, grid, state, cfg.epsilon, cfg.pde.t_final, n_snapshots=n_snapshots
    )
    x = grid.centers
    for k, snap in enumerate(states):
        _write_csv(
            outdir / f"snapshot_{k:03d}.csv",
            "x,u,v",
            [x, snap.u, snap.v],
            comment=f"t={snap.t!r}",
        )
    front = pdecheck.measure_front(grid, states)
    payload = _base_payload("pde", cfg, problem)
    payload["pde"] = {
        "speed_estimate": front.speed_estimate,
        "rh_speed": problem.c,
        "shape_error": front.shape_error,
        "shape_error_series": [float(e) for e in front.shape_errors],
        "times": [float(t) for t in front.times],
        "front_positions": [float(p) for p in front.positions],
    }
    _write_report(outdir, payload)
    return 0


COMMANDS = {
    "spectrum": cmd_spectrum,
    "singular": cmd_singular,
    "hetero": cmd_hetero,
    "sweep": cmd_sweep,
    "bifurcate": cmd_bifurcate,
    "pde": cmd_pde,
}

DESCRIPTIONS = {
    "spectrum": "fast-Jacobian spectral reports at the two end states",
    "singular": "inviscid sub-shock orbit, matching point, transversality",
    "hetero": "viscous profile at a single epsilon",
    "sweep": "profile continuation across a descending epsilon schedule",
    "bifurcate": "small-shock analysis at unit viscosity",
    "pde": "finite-difference validation run seeded from the profile",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="subshock-lab",
        description="Traveling-wave profiles and sub-shock analysis pipelines",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, helptext in DESCRIPTIONS.items():
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--config", required=True, help="path to the JSON run configuration")
        p.add_argument("--out", default=None, help="output directory (overrides config)")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    outdir: Optional[Path] = None
    try:
        _configure_logging()
        cfg = load_config(args.config)
        outdir = Path(args.out or cfg.output_dir or ".")
        outdir.mkdir(parents=True, exist_ok=True)
        return COMMANDS[args.command](cfg, outdir)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SubshockLabError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        if outdir is not None:
            _write_report(
                outdir,
                {
                    "command": args.command,
                    "error": {"type": type(exc).__name__, "message": str(exc)},
                },
            )
        return 3


if __name__ == "__main__":
    sys.exit(main())
