# Copyright (c) 2025, Equilibrium Bandits Contributors
# SPDX-License-Identifier: MIT

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Dict, Sequence

import numpy as np

from equilibrium_bandits import __version__
from equilibrium_bandits.core.exceptions import InvalidInputError
from equilibrium_bandits.core.model import RegretTrajectory


@dataclass(frozen=True)
class AlgorithmSummary:
    """Pointwise mean and population std of the pseudo-regret curves, plus per-seed finals."""

    label: str
    mean: np.ndarray
    std: np.ndarray
    final_pseudo_regret: np.ndarray
    final_realized_regret: np.ndarray
    curves: np.ndarray

    @property
    def horizon(self) -> int:
        return int(self.mean.shape[0])

    @property
    def num_seeds(self) -> int:
        return int(self.curves.shape[0])


@dataclass
class AggregateResult:
    summaries: Dict[str, AlgorithmSummary] = field(default_factory=dict)
    metadata: Dict[str, Any] = field(default_factory=dict)


def aggregate(trajectories: Sequence[RegretTrajectory], label: str = "") -> AlgorithmSummary:
    if not trajectories:
        raise InvalidInputError("aggregate needs at least one trajectory")
    horizons = {tr.horizon for tr in trajectories}
    if len(horizons) != 1:
        raise InvalidInputError(f"trajectories have different horizons: {sorted(horizons)}")
    incomplete = [i for i, tr in enumerate(trajectories) if not tr.complete]
    if incomplete:
        raise InvalidInputError(f"trajectories {incomplete} stop before the horizon")

    curves = np.stack([tr.pseudo_regret for tr in trajectories])
    return AlgorithmSummary(
        label=label,
        mean=curves.mean(axis=0),
        std=curves.std(axis=0),
        final_pseudo_regret=np.array([tr.final_pseudo_regret for tr in trajectories]),
        final_realized_regret=np.array([tr.final_realized_regret for tr in trajectories]),
        curves=curves,
    )


def aggregate_experiment(result) -> AggregateResult:
    """Summaries of every algorithm of a finished experiment, with the metadata export needs."""
    config, info = result.config, result.info
    summaries = {label: aggregate(trajectories, label) for label, trajectories in result.trajectories.items()}
    metadata = {
        "config": config.resolved(),
        "config_hash": config.config_hash(),
        "source": config.source,
        "version": __version__,
        "wall_time_seconds": result.wall_time,
        "equilibria": {
            "x_star": [float(x) for x in info.x_star],
            "delta": [float(d) for d in info.delta],
            "optimal_action": info.optimal_action + 1,
            "tie": info.tie,
        },
    }
    return AggregateResult(summaries=summaries, metadata=metadata)
