# Copyright (c) 2025, Equilibrium Bandits Contributors
# SPDX-License-Identifier: MIT

from __future__ import annotations

import math
from typing import Callable, List, Optional, Tuple

from equilibrium_bandits.api import build_environment, equilibria
from equilibrium_bandits.bandits.uecb.uecb import UecbParams, noiseless_play_bound
from equilibrium_bandits.config import ExperimentConfig, load_config
from equilibrium_bandits.core.exceptions import EquilibriumBanditError
from equilibrium_bandits.core.model import EnvironmentModel, EquilibriumInfo
from equilibrium_bandits.environments.sis.sis import SisEnvironment, dump_contact_matrices
from equilibrium_bandits.services.aggregate import aggregate_experiment
from equilibrium_bandits.services.export import export_results, format_number
from equilibrium_bandits.services.logger import logger
from equilibrium_bandits.services.runner import run_experiment
from equilibrium_bandits.services.validation import ValidationReport, validate_environment

# --- Constants ---
EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_RUNTIME = 2
FULL_SCALE_SEEDS = 100

LogicResult = Tuple[int, str]


# --- Helpers ---
def _load(config_path: str) -> Tuple[ExperimentConfig, EnvironmentModel]:
    """Config plus its environment; any failure here is a configuration problem."""
    config = load_config(config_path)
    env = build_environment(config.environment)
    return config, env


def _uecb_params(config: ExperimentConfig, env: EnvironmentModel) -> UecbParams:
    for algo in config.algorithms:
        if algo.kind == "uecb":
            return UecbParams(knowledge=env.knowledge, rho1=algo.params["rho1"], rho2=algo.params["rho2"])
    return UecbParams(knowledge=env.knowledge)


def format_equilibria(env: EnvironmentModel, info: EquilibriumInfo, params: UecbParams) -> str:
    k = env.knowledge
    lines = [
        f"Environment: {env.name} (K={env.action_count}, state dim {env.state_dim}, sigma={format_number(env.noise_sigma)})",
        f"Agent knowledge: tau_c={k.tau_c:.6g}, L={k.lipschitz_L:.6g}",
        f"State observable: {'yes' if env.observable else 'no'}",
        "action  x_star  delta  residual  noiseless_play_bound",
    ]
    for a in range(env.action_count):
        delta = float(info.delta[a])
        bound = f"{noiseless_play_bound(delta, k, params):.6g}" if delta > 0 else "-"
        lines.append(
            f"{a + 1}  {format_number(info.x_star[a])}  {format_number(delta)}  {info.residuals[a]:.3e}  {bound}"
        )
    lines.append("x* = (" + ", ".join(format_number(x) for x in info.x_star) + ")")
    lines.append(f"a* = {info.optimal_action + 1}" + (" (tie, lowest index)" if info.tie else ""))
    return "\n".join(lines)


def format_validation(report: ValidationReport) -> str:
    lines = [f"Assumption checks for {report.environment}:"]
    for check in report.checks:
        action = "-" if check.action is None else str(check.action + 1)
        status = "ok" if check.ok else "VIOLATED"
        line = f"{check.name:18s} action {action:>3s}  {status}"
        if not math.isnan(check.low):
            line += f"  min={check.low:.6g} max={check.high:.6g} limit={check.limit:.6g}"
        if check.detail:
            line += f"  ({check.detail})"
        lines.append(line)
    lines.append("All checks passed." if report.ok else f"{len(report.failures)} check(s) violated.")
    return "\n".join(lines)


# --- Command logic ---
def run_logic(
    config_path: str,
    out: Optional[str] = None,
    seeds: Optional[int] = None,
    horizon: Optional[int] = None,
    workers: Optional[int] = None,
    paper_scale: bool = False,
    progress: Optional[Callable[[str, int], None]] = None,
) -> LogicResult:
    """Runs every configured algorithm, aggregates and writes the CSV/JSON files."""
    try:
        config, env = _load(config_path)
        if paper_scale and seeds is None:
            seeds = FULL_SCALE_SEEDS
        config = config.with_overrides(horizon=horizon, num_seeds=seeds, output_dir=out, workers=workers)
        config.validate(env.action_count)
    except EquilibriumBanditError as e:
        logger.error(f"Invalid configuration {config_path}: {e}", exc_info=True)
        return EXIT_CONFIG, f"Invalid configuration: {e}"
    except Exception as e:
        logger.error(f"Could not build the experiment in {config_path}: {e}", exc_info=True)
        return EXIT_RUNTIME, f"Could not build the experiment: {type(e).__name__}: {e}"

    try:
        result = run_experiment(config, env, progress=progress)
        aggregated = aggregate_experiment(result)
        written = export_results(aggregated, config.output_dir, config.stride, config.save_curves)
    except EquilibriumBanditError as e:
        logger.error(f"Run of {config_path} failed: {e}", exc_info=True)
        return EXIT_RUNTIME, f"Run failed: {e}"
    except Exception as e:
        logger.error(f"Run of {config_path} failed unexpectedly: {e}", exc_info=True)
        return EXIT_RUNTIME, f"Run failed: {type(e).__name__}: {e}"

    lines: List[str] = [f"Wrote {len(written)} file(s) to {config.output_dir} in {result.wall_time:.1f}s"]
    for label, summary in aggregated.summaries.items():
        lines.append(
            f"  {label}: final pseudo-regret {summary.mean[-1]:.6g} +/- {summary.std[-1]:.6g} over {summary.num_seeds} seed(s)"
        )
    return EXIT_OK, "\n".join(lines)


def equilibria_logic(config_path: str, dump_dir: Optional[str] = None) -> LogicResult:
    """Per-action equilibrium rewards, gaps and the optimal action."""
    try:
        config, env = _load(config_path)
    except EquilibriumBanditError as e:
        logger.error(f"Invalid configuration {config_path}: {e}", exc_info=True)
        return EXIT_CONFIG, f"Invalid configuration: {e}"
    except Exception as e:
        logger.error(f"Could not build the experiment in {config_path}: {e}", exc_info=True)
        return EXIT_RUNTIME, f"Could not build the experiment: {type(e).__name__}: {e}"

    try:
        info = equilibria(env)
        message = format_equilibria(env, info, _uecb_params(config, env))
        if dump_dir:
            if isinstance(env, SisEnvironment):
                paths = dump_contact_matrices(env, dump_dir)
                message += f"\nContact matrices written to {', '.join(paths)}"
            else:
                message += f"\n{env.name} has no matrices to dump"
    except (EquilibriumBanditError, OSError) as e:
        logger.error(f"Equilibrium computation for {config_path} failed: {e}", exc_info=True)
        return EXIT_RUNTIME, f"Equilibrium computation failed: {e}"
    except Exception as e:
        logger.error(f"Equilibrium computation for {config_path} failed unexpectedly: {e}", exc_info=True)
        return EXIT_RUNTIME, f"Equilibrium computation failed: {type(e).__name__}: {e}"
    return EXIT_OK, message


def validate_logic(config_path: str) -> LogicResult:
    """Contraction, reward and fixed-point checks; a violated check is a runtime failure."""
    try:
        _, env = _load(config_path)
    except EquilibriumBanditError as e:
        logger.error(f"Invalid configuration {config_path}: {e}", exc_info=True)
        return EXIT_CONFIG, f"Invalid configuration: {e}"
    except Exception as e:
        logger.error(f"Could not build the experiment in {config_path}: {e}", exc_info=True)
        return EXIT_RUNTIME, f"Could not build the experiment: {type(e).__name__}: {e}"

    try:
        report = validate_environment(env, equilibria(env))
    except EquilibriumBanditError as e:
        logger.error(f"Validation of {config_path} failed: {e}", exc_info=True)
        return EXIT_RUNTIME, f"Validation failed: {e}"
    except Exception as e:
        logger.error(f"Validation of {config_path} failed unexpectedly: {e}", exc_info=True)
        return EXIT_RUNTIME, f"Validation failed: {type(e).__name__}: {e}"

    if not report.ok:
        logger.warning("Assumption checks violated for %s: %s", config_path, [c.name for c in report.failures])
    return (EXIT_OK if report.ok else EXIT_RUNTIME), format_validation(report)
