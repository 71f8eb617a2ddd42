"""Command-line front end: ground-state, evolve, dichotomy, verify.

One JSON config document drives every run; any leaf can be overridden with
repeated --set key=value flags (dotted paths).  Identical config and seed
produce byte-identical JSON artifacts.
"""

from __future__ import annotations

import argparse
import copy
import json
import sys
from pathlib import Path

import numpy as np

from . import serialize
from .dichotomy import initial_data, classify_data, run_experiment
from .evolution import EvolveConfig, detect_blowup, evolve, save_trajectory
from .functionals import SystemParams
from .grid import RadialGrid, pair_from_samples
from .ground_state import regrid, save_ground_state, solve
from .verify import verify_suite

SCHEMA_VERSION = 1

DEFAULTS = {
    "grid": {"n": 5, "r_max": 32.0, "num_nodes": 2048},
    "system": {"kappa": 0.5},
    "solver": {
        "tol_J": 1e-10,
        "max_iters": 20000,
        "rearrange_every": 50,
        "tol_pohozaev": 1e-4,
        "tol_pde": 1e-3,
    },
    "evolve": {
        "dt": 1e-3,
        "t_max": 1.0,
        "solver_tol": 1e-12,
        "max_picard": 100,
        "blowup_K_factor": 50.0,
        "dt_min": None,
        "sample_every": 1,
        "scheme": "midpoint4",
        "grid": {"r_max": 16.0, "num_nodes": 4096},
        "data": {"family": "scaled_ground_state", "parameters": {"scale": 0.9}},
    },
    "dichotomy": {
        "family": "scaled_ground_state",
        "parameters": {"scale": 1.1},
        "simulate": True,
    },
    "output": {"formats": ["csv", "json"], "emit_plot_scripts": False},
    "seed": 0,
}


def _merge(base: dict, override: dict, path: str, errors: list) -> dict:
    out = copy.deepcopy(base)
    for key, value in override.items():
        where = f"{path}.{key}" if path else key
        if key not in base:
            errors.append(f"{where}: unknown configuration key")
            continue
        if isinstance(base[key], dict) and isinstance(value, dict):
            out[key] = _merge(base[key], value, where, errors)
        else:
            out[key] = value
    return out


def _apply_set(config: dict, assignment: str, errors: list) -> None:
    if "=" not in assignment:
        errors.append(f"--set {assignment!r}: expected key=value")
        return
    key, _, raw = assignment.partition("=")
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    node = config
    parts = key.split(".")
    for part in parts[:-1]:
        if not isinstance(node.get(part), dict):
            errors.append(f"--set {key}: no such configuration block {part!r}")
            return
        node = node[part]
    if parts[-1] not in node:
        errors.append(f"--set {key}: unknown configuration key")
        return
    node[parts[-1]] = value


def _as_complex(value, where: str, errors: list) -> complex:
    if isinstance(value, (int, float)):
        return complex(value)
    if isinstance(value, list) and len(value) == 2:
        return complex(value[0], value[1])
    errors.append(f"{where}: expected a number or [re, im] pair")
    return 0j


def _validate(config: dict) -> tuple[dict, list]:
    errors: list = []
    grid = config["grid"]
    n = grid.get("n")
    if not isinstance(n, int) or not 1 <= n <= 5:
        errors.append(
            f"grid.n: got {n!r}; must be an integer in 1..5 "
            "(no ground states exist for n >= 6)"
        )
    if not (isinstance(grid.get("r_max"), (int, float)) and grid["r_max"] > 0):
        errors.append(f"grid.r_max: got {grid.get('r_max')!r}; must be positive")
    if not (isinstance(grid.get("num_nodes"), int) and grid["num_nodes"] >= 3):
        errors.append(f"grid.num_nodes: got {grid.get('num_nodes')!r}; need >= 3 nodes")

    system = config["system"]
    parsed = {}
    raw_keys = {"m", "M", "lambda", "mu", "c"}
    if raw_keys & set(system):
        missing = raw_keys - set(system)
        if missing:
            errors.append(f"system: raw constants incomplete, missing {sorted(missing)}")
        else:
            lam = _as_complex(system["lambda"], "system.lambda", errors)
            mu = _as_complex(system["mu"], "system.mu", errors)
            try:
                params = SystemParams(
                    kappa=system["m"] / system["M"],
                    m=system["m"], M=system["M"], lam=lam, mu=mu, c=system["c"],
                )
                parsed["system"] = params
            except (ValueError, ZeroDivisionError, TypeError) as exc:
                errors.append(f"system: {exc}")
    else:
        kappa = system.get("kappa")
        if not (isinstance(kappa, (int, float)) and kappa > 0):
            errors.append(f"system.kappa: got {kappa!r}; must be positive")
        else:
            parsed["system"] = SystemParams(kappa=float(kappa))

    ev = config["evolve"]
    if not (isinstance(ev.get("dt"), (int, float)) and ev["dt"] > 0):
        errors.append(f"evolve.dt: got {ev.get('dt')!r}; must be positive")
    if not (isinstance(ev.get("t_max"), (int, float)) and ev["t_max"] >= 0):
        errors.append(f"evolve.t_max: got {ev.get('t_max')!r}; must be nonnegative")
    if ev.get("scheme") not in ("midpoint", "midpoint4"):
        errors.append(f"evolve.scheme: got {ev.get('scheme')!r}")
    for family_block in ("dichotomy", ):
        fam = config[family_block].get("family")
        if fam not in ("scaled_ground_state", "gaussian"):
            errors.append(f"{family_block}.family: got {fam!r}")
    if ev["data"].get("family") not in ("scaled_ground_state", "gaussian"):
        errors.append(f"evolve.data.family: got {ev['data'].get('family')!r}")
    for fmt in config["output"].get("formats", []):
        if fmt not in ("csv", "json"):
            errors.append(f"output.formats: unknown format {fmt!r}")
    if not isinstance(config.get("seed"), int):
        errors.append(f"seed: got {config.get('seed')!r}; must be an integer")
    return parsed, errors


def _evolve_config(config: dict) -> EvolveConfig:
    ev = config["evolve"]
    kappa = config["system"]["kappa"] if "kappa" in config["system"] else (
        config["system"]["m"] / config["system"]["M"])
    return EvolveConfig(
        kappa=float(kappa),
        dt=float(ev["dt"]),
        t_max=float(ev["t_max"]),
        solver_tol=float(ev["solver_tol"]),
        max_picard=int(ev["max_picard"]),
        blowup_K_factor=float(ev["blowup_K_factor"]),
        dt_min=None if ev["dt_min"] is None else float(ev["dt_min"]),
        sample_every=int(ev["sample_every"]),
        scheme=ev["scheme"],
    )


def _solve_ground_state(config: dict):
    grid = config["grid"]
    solver = config["solver"]
    system = config["system"]
    kappa = system["kappa"] if "kappa" in system else system["m"] / system["M"]
    return solve(
        grid["n"],
        float(kappa),
        num_nodes=grid["num_nodes"],
        r_max=float(grid["r_max"]),
        tol_J=float(solver["tol_J"]),
        max_iters=int(solver["max_iters"]),
        rearrange_every=int(solver["rearrange_every"]),
        tol_pohozaev=float(solver["tol_pohozaev"]),
        tol_pde=float(solver["tol_pde"]),
    )


def _ground_state_dict(gs) -> dict:
    g = gs.phi.grid
    return {
        "schema_version": SCHEMA_VERSION,
        "n": gs.n,
        "kappa": gs.kappa,
        "omega": gs.omega,
        "alpha1": gs.alpha1,
        "C_op": gs.C_op,
        "values": {
            "Q": gs.values.Q, "E": gs.values.E, "K": gs.values.K,
            "P": gs.values.P, "I_omega": gs.values.I_omega, "J": gs.values.J,
        },
        "pohozaev_residuals": list(gs.pohozaev_residuals),
        "elliptic_residual": gs.elliptic_residual,
        "iterations": gs.iterations,
        "converged": gs.converged,
        "grid": {"num_nodes": g.num_nodes, "r_max": g.r_max, "h": g.h},
    }


_TRAJECTORY_PLOT = """\
import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

data = np.genfromtxt("trajectory.csv", delimiter=",", names=True)
fig, axes = plt.subplots(2, 2, figsize=(10, 7))
axes[0, 0].plot(data["t"], data["Q"]); axes[0, 0].set_title("charge Q")
axes[0, 1].plot(data["t"], data["E"]); axes[0, 1].set_title("energy E")
axes[1, 0].plot(data["t"], data["K"]); axes[1, 0].set_title("kinetic K")
axes[1, 1].plot(data["t"], data["V"]); axes[1, 1].set_title("variance V")
for ax in axes.flat:
    ax.set_xlabel("t")
fig.tight_layout()
fig.savefig("trajectory.png", dpi=150)
"""

_GROUND_STATE_PLOT = """\
import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

rows = np.loadtxt("ground_state.csv", delimiter=",", skiprows=3)
fig, ax = plt.subplots(figsize=(7, 5))
ax.plot(rows[:, 0], rows[:, 1], label="phi")
ax.plot(rows[:, 0], rows[:, 2], label="psi")
ax.set_xlabel("r")
ax.legend()
fig.tight_layout()
fig.savefig("ground_state.png", dpi=150)
"""


def _emit_plot_script(outdir: Path, name: str, body: str) -> None:
    (outdir / name).write_text(body)


def _cmd_ground_state(config: dict, outdir: Path) -> int:
    gs = _solve_ground_state(config)
    formats = config["output"]["formats"]
    if "csv" in formats:
        save_ground_state(outdir / "ground_state.csv", gs)
    if "json" in formats:
        serialize.dump(outdir / "ground_state.json", _ground_state_dict(gs))
    if config["output"]["emit_plot_scripts"]:
        _emit_plot_script(outdir, "plot_ground_state.py", _GROUND_STATE_PLOT)
    if not gs.converged:
        print("ground-state: solver did not converge", file=sys.stderr)
        return 1
    print(f"ground-state: alpha1={gs.alpha1:.12g} C_op={gs.C_op:.12g} "
          f"max_pohozaev={max(gs.pohozaev_residuals):.3g} "
          f"elliptic={gs.elliptic_residual:.3g}")
    return 0


def _build_data(config: dict, family: str, parameters: dict):
    """Initial data plus the reference ground state (None for gaussian)."""
    ev_grid = config["evolve"]["grid"]
    n = config["grid"]["n"]
    solver = config["solver"]
    if family == "scaled_ground_state":
        gs = _solve_ground_state(config)
        if not gs.converged:
            raise RuntimeError("reference ground-state solve did not converge")
        gs = regrid(gs, float(ev_grid["r_max"]), int(ev_grid["num_nodes"]),
                    tol_pohozaev=float(solver["tol_pohozaev"]),
                    tol_pde=float(solver["tol_pde"]))
        if not gs.converged:
            raise RuntimeError("ground state failed to re-anchor on the evolution grid")
        return initial_data(gs, family, parameters), gs
    grid = RadialGrid(n, float(ev_grid["r_max"]), int(ev_grid["num_nodes"]))
    amp = float(parameters.get("amplitude", 1.0))
    width = float(parameters.get("width", 1.0))
    prof = amp * np.exp(-((grid.nodes / width) ** 2))
    return pair_from_samples(grid, prof, prof.copy()), None


def _cmd_evolve(config: dict, outdir: Path) -> int:
    data_cfg = config["evolve"]["data"]
    state, gs = _build_data(config, data_cfg["family"], data_cfg["parameters"])
    cfg = _evolve_config(config)
    gamma = None
    if gs is not None:
        from .dichotomy import thresholds
        from .functionals import charge

        _, _, gamma, _ = thresholds(gs, charge(state))
    record = evolve(state, cfg, gamma=gamma)
    verdict = detect_blowup(record, cfg, gamma=gamma)
    formats = config["output"]["formats"]
    if "csv" in formats:
        save_trajectory(outdir / "trajectory.csv", record)
    summary = {
        "schema_version": SCHEMA_VERSION,
        "verdict": verdict,
        "blowup_detected": record.blowup_detected,
        "t_detect": record.t_detect,
        "t_reached": float(record.times[-1]),
        "samples": int(len(record.times)),
        "step_failures": record.step_failures,
        "wall_warning": record.wall_warning,
        "Q_initial": float(record.Q_series[0]),
        "Q_drift": float(np.max(np.abs(record.Q_series - record.Q_series[0]))
                         / max(record.Q_series[0], 1e-300)),
        "E_initial": float(record.E_series[0]),
        "K_initial": float(record.K_series[0]),
        "K_final": float(record.K_series[-1]),
        "config": config,
    }
    if "json" in formats:
        serialize.dump(outdir / "evolve.json", summary)
    if config["output"]["emit_plot_scripts"]:
        _emit_plot_script(outdir, "plot_trajectory.py", _TRAJECTORY_PLOT)
    print(f"evolve: verdict={verdict} t_reached={summary['t_reached']:.6g} "
          f"Q_drift={summary['Q_drift']:.3g}")
    return 0


def _cmd_dichotomy(config: dict, outdir: Path) -> int:
    dich = config["dichotomy"]
    state, gs = _build_data(config, dich["family"], dich["parameters"])
    if gs is None:
        gs_src = _solve_ground_state(config)
        if not gs_src.converged:
            raise RuntimeError("reference ground-state solve did not converge")
        ev_grid = config["evolve"]["grid"]
        solver = config["solver"]
        gs = regrid(gs_src, float(ev_grid["r_max"]), int(ev_grid["num_nodes"]),
                    tol_pohozaev=float(solver["tol_pohozaev"]),
                    tol_pde=float(solver["tol_pde"]))
    cfg = _evolve_config(config)
    formats = config["output"]["formats"]
    if dich["simulate"]:
        report, record = run_experiment(state, gs, cfg)
        if "csv" in formats:
            save_trajectory(outdir / "trajectory.csv", record)
        if config["output"]["emit_plot_scripts"]:
            _emit_plot_script(outdir, "plot_trajectory.py", _TRAJECTORY_PLOT)
    else:
        report = classify_data(state, gs, cfg.kappa)
    doc = report.to_dict()
    doc["trajectory_csv"] = "trajectory.csv" if dich["simulate"] and "csv" in formats else None
    doc["config"] = config
    if "json" in formats:
        serialize.dump(outdir / "dichotomy.json", doc)
    verdict = report.simulation["verdict"] if report.simulation else "NOT_SIMULATED"
    print(f"dichotomy: classification={report.classification} simulation={verdict} "
          f"consistency={report.consistency}")
    return 0


def _cmd_verify(config: dict, outdir: Path) -> int:
    grid = config["grid"]
    system = config["system"]
    kappa = system["kappa"] if "kappa" in system else system["m"] / system["M"]
    ev_grid = config["evolve"]["grid"]
    checks, ok = verify_suite(
        n=grid["n"],
        kappa=float(kappa),
        num_nodes=grid["num_nodes"],
        r_max=float(grid["r_max"]),
        seed=config["seed"],
        evolve_r_max=float(ev_grid["r_max"]),
        evolve_num_nodes=int(ev_grid["num_nodes"]),
        dt=float(config["evolve"]["dt"]),
    )
    for check in checks:
        status = "PASS" if check["passed"] else "FAIL"
        print(f"{status}  {check['invariant']:<38} measured={check['measured']:.3e} "
              f"tol={check['tolerance']:.1e}")
    if "json" in config["output"]["formats"]:
        serialize.dump(outdir / "verify.json",
                       {"schema_version": SCHEMA_VERSION, "checks": checks,
                        "passed": ok, "config": config})
    if not ok:
        failing = ", ".join(c["invariant"] for c in checks if not c["passed"])
        print(f"verify: FAILED invariants: {failing}", file=sys.stderr)
        return 1
    print("verify: all invariants passed")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="quadnls",
        description="Ground states, sharp constants, and the global-existence/"
                    "blow-up dichotomy for the quadratic Schrodinger system",
    )
    parser.add_argument("subcommand",
                        choices=["ground-state", "evolve", "dichotomy", "verify"])
    parser.add_argument("--config", type=Path, default=None,
                        help="JSON configuration file")
    parser.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="override a config leaf via dotted path")
    parser.add_argument("--out", type=Path, default=Path("."),
                        help="output directory")
    parser.add_argument("--seed", type=int, default=None,
                        help="seed for randomized suites")
    args = parser.parse_args(argv)

    errors: list = []
    config = copy.deepcopy(DEFAULTS)
    if args.config is not None:
        try:
            user = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            print(f"config: {exc}", file=sys.stderr)
            return 2
        config = _merge(DEFAULTS, user, "", errors)
    for assignment in args.set:
        _apply_set(config, assignment, errors)
    if args.seed is not None:
        config["seed"] = args.seed
    _, val_errors = _validate(config)
    errors.extend(val_errors)
    if errors:
        for err in errors:
            print(f"config: {err}", file=sys.stderr)
        return 2

    outdir = args.out
    outdir.mkdir(parents=True, exist_ok=True)
    command = {
        "ground-state": _cmd_ground_state,
        "evolve": _cmd_evolve,
        "dichotomy": _cmd_dichotomy,
        "verify": _cmd_verify,
    }[args.subcommand]
    try:
        return command(config, outdir)
    except (RuntimeError, ValueError) as exc:
        print(f"{args.subcommand}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
