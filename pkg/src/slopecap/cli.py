"""Command-line entry point: runs the named studies, writes CSV/JSON
artifacts, exits nonzero on failed acceptance bounds.

Commands (all invoked as ``slopecap <command> --config <path> --out <dir>``):

* ``sandpile``     transported-sandpile run vs the exact profile
* ``equivalence``  slope-penalty vs band solver on identical data
* ``stationary``   pseudo-time march to the stationary profile
* ``converge``     refinement ladder with the coupled parameter schedule
* ``stability``    perturbation-ladder continuous-dependence ratios

The config is a flat ``key = value`` text file ('#' comments).  Common keys:
domain (two numbers), n_cells, epsilon, delta, dt, t_end, snapshot_times,
picard_tol, picard_max; command-specific keys are documented in the README.
Exit codes: 0 all bounds hold, 1 an acceptance bound failed, 2 config error,
3 solver failure.  CSV numbers use the shortest round-trip decimal form, so
identical configs reproduce identical bytes.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import diagnostics, obstacle, penalty
from .core import (
    Grid1D,
    ProblemData,
    ScalarField,
    SolverError,
    SolverParams,
    l2_norm,
)
from .sandpile import SandpileOracle, sandpile_problem
from .stationary import solve_stationary

EXIT_OK = 0
EXIT_ACCEPTANCE = 1
EXIT_CONFIG = 2
EXIT_SOLVER = 3


class ConfigError(ValueError):
    pass


# ---------------------------------------------------------------- config

_COMMON_KEYS = {
    "domain", "n_cells", "epsilon", "delta", "dt", "t_end", "snapshot_times",
    "picard_tol", "picard_max", "constraint_tol",
}
_COMMAND_KEYS = {
    "sandpile": {"profile_error_bound", "constraint_bound", "boundary_tol",
                 "boundary_error_bound"},
    "equivalence": {"gap_bound"},
    "stationary": {"b", "c", "f", "g", "steady_tol", "t_max", "reference",
                   "error_bound"},
    "converge": {"n_cells_list"},
    "stability": {"etas", "ratio_spread_bound"},
}


def _parse_value(text: str):
    tokens = text.replace(",", " ").split()
    if not tokens:
        raise ConfigError("empty value")
    if len(tokens) > 1:
        return [_parse_scalar(tok) for tok in tokens]
    return _parse_scalar(tokens[0])


def _parse_scalar(token: str):
    try:
        return int(token)
    except ValueError:
        pass
    try:
        return float(token)
    except ValueError:
        return token


def load_config(path: str | Path, command: str) -> dict:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    allowed = _COMMON_KEYS | _COMMAND_KEYS[command]
    config: dict = {}
    for lineno, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in allowed:
            raise ConfigError(f"{path}:{lineno}: unknown key '{key}' for {command}")
        config[key] = _parse_value(value)
    return config


def _as_float_list(value) -> list[float]:
    if isinstance(value, list):
        return [float(v) for v in value]
    return [float(value)]


def _grid_from(config: dict, default_cells: int) -> Grid1D:
    domain = _as_float_list(config.get("domain", [0.0, 1.0]))
    if len(domain) != 2:
        raise ConfigError("domain needs exactly two numbers")
    return Grid1D(domain[0], domain[1], int(config.get("n_cells", default_cells)))


def _params_from(config: dict, defaults: dict) -> SolverParams:
    merged = dict(defaults)
    for key in ("epsilon", "delta", "dt", "t_end", "picard_tol", "picard_max",
                "constraint_tol"):
        if key in config:
            merged[key] = config[key]
    try:
        return SolverParams(**merged)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


# ---------------------------------------------------------------- output

def _fmt(value) -> str:
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    lines = [",".join(header)]
    lines += [",".join(_fmt(cell) for cell in row) for row in rows]
    path.write_text("\n".join(lines) + "\n")


class Manifest:
    def __init__(self, command: str, grid: Grid1D, params: SolverParams | None):
        self.command = command
        self.grid = grid
        self.params = params
        self.acceptance: list[dict] = []
        self._t0 = time.perf_counter()

    def check(self, name: str, measured: float, bound: float) -> None:
        entry = {
            "name": name,
            "measured": float(measured),
            "bound": float(bound),
            "pass": bool(measured <= bound),
        }
        assert entry["pass"] == (entry["measured"] <= entry["bound"])
        self.acceptance.append(entry)

    @property
    def all_pass(self) -> bool:
        return all(entry["pass"] for entry in self.acceptance)

    def write(self, out_dir: Path, extra: dict | None = None) -> None:
        payload = {
            "command": self.command,
            "grid": {
                "x_left": self.grid.x_left,
                "x_right": self.grid.x_right,
                "n_cells": self.grid.n_cells,
            },
            "params": None if self.params is None else {
                "epsilon": self.params.epsilon,
                "delta": self.params.delta,
                "dt": self.params.dt,
                "t_end": self.params.t_end,
                "picard_tol": self.params.picard_tol,
                "picard_max": self.params.picard_max,
                "constraint_tol": self.params.constraint_tol,
            },
            "wall_time_s": time.perf_counter() - self._t0,
            "acceptance": self.acceptance,
        }
        if extra:
            payload.update(extra)
        (out_dir / "manifest.json").write_text(json.dumps(payload, indent=2) + "\n")


# ---------------------------------------------------------------- commands

def cmd_sandpile(config: dict, out_dir: Path) -> int:
    grid = _grid_from(config, default_cells=400)
    t_end = float(config.get("t_end", 1.25))
    oracle = SandpileOracle()
    snap_default = [0.0, 0.75, 1.125, 1.25]
    snaps = sorted(t for t in _as_float_list(config.get("snapshot_times", snap_default))
                   if t <= t_end + 1e-12)
    profile_bound = float(config.get("profile_error_bound", 0.05))
    constraint_bound = float(config.get("constraint_bound", 0.02))
    # the solver hugs contact sets to the penalty slack (~eps-scale), much
    # tighter than the mesh, so the label tolerance defaults below 2h
    boundary_tol = float(config.get("boundary_tol", 1e-3))
    boundary_bound = float(config.get("boundary_error_bound", 3.0 * grid.h + 0.01))

    data = sandpile_problem(grid, check_horizon=max(t_end, 0.5))
    x = grid.nodes()
    d_field = ScalarField(grid, grid.boundary_distance())

    if t_end == 0.0:
        manifest = Manifest("sandpile", grid, None)
        times = np.array([0.0])
        snapshots = [data.u0]
        worst_violation = penalty.constraint_violation(data.u0, np.ones(grid.n_cells))
    else:
        params = _params_from(config, dict(epsilon=1e-4, delta=1e-3, dt=5e-4,
                                           t_end=t_end))
        manifest = Manifest("sandpile", grid, params)
        traj = penalty.solve(data, params, snaps)
        times = traj.times
        snapshots = traj.snapshots
        worst_violation = float(traj.diagnostics.constraint_violation.max())

    profile_rows = []
    boundary_rows = []
    for t, snap in zip(times, snapshots):
        t = float(t)
        exact = oracle.profile(x, t)
        for xi_node, num, ora in zip(x, snap.values, exact):
            profile_rows.append([t, xi_node, num, ora])
        err = float(np.max(np.abs(snap.values - exact)))
        manifest.check(f"profile_error_t={t:g}", err, profile_bound)

        xi_num, zeta_num = diagnostics.extract_free_boundaries(snap, d_field, boundary_tol)
        boundary_rows.append([
            t,
            np.nan if xi_num is None else xi_num,
            oracle.xi(t) if t <= 1.25 else np.nan,
            np.nan if zeta_num is None else zeta_num,
            oracle.zeta(t) if 1.0 <= t <= 1.25 else np.nan,
        ])
        if xi_num is not None and t <= 1.25:
            manifest.check(f"xi_error_t={t:g}", abs(xi_num - oracle.xi(t)), boundary_bound)
        if zeta_num is not None and 1.0 <= t <= 1.25:
            manifest.check(f"zeta_error_t={t:g}", abs(zeta_num - oracle.zeta(t)), boundary_bound)

    manifest.check("constraint_violation", worst_violation, constraint_bound)

    write_csv(out_dir / "profiles.csv", ["t", "x", "u_numeric", "u_oracle"], profile_rows)
    write_csv(out_dir / "free_boundary.csv",
              ["t", "xi_numeric", "xi_oracle", "zeta_numeric", "zeta_oracle"],
              boundary_rows)
    manifest.write(out_dir)
    return EXIT_OK if manifest.all_pass else EXIT_ACCEPTANCE


def cmd_equivalence(config: dict, out_dir: Path) -> int:
    grid = _grid_from(config, default_cells=200)
    h = grid.h
    t_end = float(config.get("t_end", 1.25))
    defaults = dict(epsilon=h * h, delta=h, dt=0.5 * h, t_end=t_end)
    params = _params_from(config, defaults)
    snaps = sorted(_as_float_list(config.get("snapshot_times", [0.0, 0.75, 1.125, 1.25])))
    gap_bound = float(config.get("gap_bound", 0.05))

    manifest = Manifest("equivalence", grid, params)
    data = sandpile_problem(grid, check_horizon=max(t_end, 0.5))
    run_penalty = penalty.solve(data, params, snaps)
    run_band = obstacle.solve(data, params, snaps)

    rows = []
    sup_gap = 0.0
    for t, sp, sb in zip(run_penalty.times, run_penalty.snapshots, run_band.snapshots):
        gap = float(np.max(np.abs(sp.values - sb.values)))
        sup_gap = max(sup_gap, gap)
        rows.append([float(t), gap])
    manifest.check("max_norm_gap", sup_gap, gap_bound)

    write_csv(out_dir / "errors.csv", ["t", "max_gap"], rows)
    manifest.write(out_dir)
    return EXIT_OK if manifest.all_pass else EXIT_ACCEPTANCE


def cmd_stationary(config: dict, out_dir: Path) -> int:
    grid = _grid_from(config, default_cells=100)
    b = float(config.get("b", 0.0))
    c = float(config.get("c", 1.0))
    f = float(config.get("f", 2.0))
    g = float(config.get("g", 1.0))
    if g <= 0.0:
        raise ConfigError("g must be positive")
    steady_tol = float(config.get("steady_tol", 1e-6))
    t_max = config.get("t_max")
    reference = config.get("reference", "distance")
    if reference not in ("distance", "none"):
        raise ConfigError("reference must be 'distance' or 'none'")
    error_bound = float(config.get("error_bound", 2.0 * grid.h + 0.02))

    params = _params_from(config, dict(epsilon=1e-4, delta=1e-3, dt=2e-3, t_end=1.0))
    data = ProblemData(
        b=lambda x, t: b, c=lambda x, t: c, f=lambda x, t: f, g=lambda x, t: g,
        u0=ScalarField(grid, np.zeros(grid.n_nodes)), m=g, l=c,
    )
    manifest = Manifest("stationary", grid, params)
    result = solve_stationary(data, params, steady_tol=steady_tol,
                              t_max=None if t_max is None else float(t_max))

    x = grid.nodes()
    reference_values = (grid.boundary_distance() if reference == "distance"
                        else np.full(grid.n_nodes, np.nan))
    rows = [[result.pseudo_time_used, xi, ui, ri]
            for xi, ui, ri in zip(x, result.solution.values, reference_values)]
    write_csv(out_dir / "profiles.csv", ["t", "x", "u_numeric", "u_oracle"], rows)

    manifest.check("steady_residual", result.steady_residual, steady_tol)
    if reference == "distance":
        err = float(np.max(np.abs(result.solution.values - reference_values)))
        manifest.check("stationary_error", err, error_bound)
    manifest.write(out_dir, extra={"pseudo_time_used": result.pseudo_time_used})
    return EXIT_OK if manifest.all_pass else EXIT_ACCEPTANCE


def cmd_converge(config: dict, out_dir: Path) -> int:
    ladder = config.get("n_cells_list", [100, 200, 400])
    if not isinstance(ladder, list):
        ladder = [ladder]
    if len(ladder) < 2:
        raise ConfigError("n_cells_list needs at least two rungs")
    ladder = [int(n) for n in ladder]
    t_end = float(config.get("t_end", 1.25))
    snaps = sorted(_as_float_list(config.get("snapshot_times", [0.0, 0.75, 1.125, 1.25])))
    oracle = SandpileOracle()

    grid_finest = Grid1D(0.0, 1.0, max(ladder))
    manifest = Manifest("converge", grid_finest, None)
    rows = []
    max_errors = []
    for n in ladder:
        grid = Grid1D(0.0, 1.0, n)
        params = penalty.coupled_schedule(n, t_end=t_end)
        data = sandpile_problem(grid, check_horizon=max(t_end, 0.5))
        traj = penalty.solve(data, params, snaps)
        errors = diagnostics.error_vs_oracle(traj, oracle.profile)
        max_err = float(errors.linf.max())
        max_errors.append(max_err)
        rows.append([n, grid.h, *errors.linf.tolist(), max_err])

    for coarse, fine, n in zip(max_errors[:-1], max_errors[1:], ladder[1:]):
        manifest.check(f"error_reduction_n={n}", fine, coarse)

    header = ["n_cells", "h"] + [f"err_t={t:g}" for t in snaps] + ["max_err"]
    write_csv(out_dir / "errors.csv", header, rows)
    manifest.write(out_dir)
    return EXIT_OK if manifest.all_pass else EXIT_ACCEPTANCE


def cmd_stability(config: dict, out_dir: Path) -> int:
    etas = config.get("etas", [0.2, 0.1, 0.05])
    if not isinstance(etas, list):
        etas = [etas]
    etas = [float(e) for e in etas]
    spread_bound = float(config.get("ratio_spread_bound", 5.0))
    grid = _grid_from(config, default_cells=100)
    params = _params_from(config, dict(epsilon=1e-4, delta=1e-3, dt=1e-3, t_end=1.25))

    manifest = Manifest("stability", grid, params)
    base = sandpile_problem(grid, check_horizon=max(params.t_end, 0.5))
    rows = []
    ratios = []
    for eta in etas:
        perturbed = ProblemData(
            b=base.b, c=base.c,
            f=lambda x, t, eta=eta: t + eta,
            g=base.g, u0=base.u0, m=base.m, l=base.l,
            check_horizon=max(params.t_end, 0.5),
        )
        sup_sq, dist = diagnostics.stability_study(base, perturbed, params)
        ratio = sup_sq / dist
        ratios.append(ratio)
        rows.append([eta, sup_sq, dist, ratio])
    manifest.check("ratio_spread", max(ratios) / min(ratios), spread_bound)

    write_csv(out_dir / "errors.csv",
              ["eta", "sup_l2_sq_diff", "data_distance", "ratio"], rows)
    manifest.write(out_dir)
    return EXIT_OK if manifest.all_pass else EXIT_ACCEPTANCE


_COMMANDS = {
    "sandpile": cmd_sandpile,
    "equivalence": cmd_equivalence,
    "stationary": cmd_stationary,
    "converge": cmd_converge,
    "stability": cmd_stability,
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="slopecap",
        description="Solvers and studies for slope-capped 1D transport.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        cmd = sub.add_parser(name)
        cmd.add_argument("--config", required=True, help="flat key = value file")
        cmd.add_argument("--out", required=True, help="output directory")
    args = parser.parse_args(argv)

    try:
        config = load_config(args.config, args.command)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    try:
        return _COMMANDS[args.command](config, out_dir)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SolverError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
