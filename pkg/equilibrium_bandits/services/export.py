# Copyright (c) 2025, Equilibrium Bandits Contributors
# SPDX-License-Identifier: MIT

"""
Plot-ready output of an experiment:

    regret_<label>.csv     t,mean_regret,std_regret       every stride-th step and T
    per_seed_<label>.csv   seed,final_pseudo_regret,final_realized_regret
    curves_<label>.csv     t,seed_0,seed_1,...            only with save_curves
    meta.json              resolved config, hash, version, wall time
"""

from __future__ import annotations

import csv
import json
import os
from datetime import datetime, timezone
from typing import Iterable, List, Sequence

import numpy as np

from equilibrium_bandits.core.exceptions import ExportError, InvalidInputError
from equilibrium_bandits.services.aggregate import AggregateResult
from equilibrium_bandits.services.logger import logger

REGRET_HEADER = ("t", "mean_regret", "std_regret")
PER_SEED_HEADER = ("seed", "final_pseudo_regret", "final_realized_regret")
META_FILE = "meta.json"


def format_number(value: float) -> str:
    """Shortest round-tripping decimal; integral values lose their trailing '.0'."""
    text = repr(float(value))
    if text.endswith(".0"):
        text = text[:-2]
    if text == "-0":
        text = "0"
    return text


def recorded_steps(horizon: int, stride: int) -> List[int]:
    """1-based timesteps kept on disk: multiples of the stride, and always T."""
    if stride < 1:
        raise InvalidInputError(f"stride must be >= 1, got {stride}")
    steps = list(range(stride, horizon + 1, stride))
    if not steps or steps[-1] != horizon:
        steps.append(horizon)
    return steps


def _write_csv(path: str, header: Sequence[str], rows: Iterable[Sequence[str]]) -> None:
    try:
        with open(path, "w", newline="", encoding="utf-8") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(header)
            writer.writerows(rows)
    except OSError as exc:
        raise ExportError(f"cannot write {path}: {exc}") from exc


def export_results(result: AggregateResult, directory: str, stride: int = 1, save_curves: bool = False) -> List[str]:
    """Write every file of the experiment into `directory` and return their paths."""
    try:
        os.makedirs(directory, exist_ok=True)
    except OSError as exc:
        raise ExportError(f"cannot create output directory {directory}: {exc}") from exc

    written: List[str] = []
    for label, summary in result.summaries.items():
        steps = recorded_steps(summary.horizon, stride)

        path = os.path.join(directory, f"regret_{label}.csv")
        _write_csv(
            path,
            REGRET_HEADER,
            ((str(t), format_number(summary.mean[t - 1]), format_number(summary.std[t - 1])) for t in steps),
        )
        written.append(path)

        path = os.path.join(directory, f"per_seed_{label}.csv")
        _write_csv(
            path,
            PER_SEED_HEADER,
            (
                (str(k), format_number(pseudo), format_number(realized))
                for k, (pseudo, realized) in enumerate(zip(summary.final_pseudo_regret, summary.final_realized_regret))
            ),
        )
        written.append(path)

        if save_curves:
            path = os.path.join(directory, f"curves_{label}.csv")
            header = ["t"] + [f"seed_{k}" for k in range(summary.num_seeds)]
            _write_csv(
                path,
                header,
                ([str(t)] + [format_number(v) for v in summary.curves[:, t - 1]] for t in steps),
            )
            written.append(path)

    meta = dict(result.metadata)
    meta["written_at"] = datetime.now(timezone.utc).isoformat()
    path = os.path.join(directory, META_FILE)
    try:
        with open(path, "w", encoding="utf-8") as f:
            json.dump(meta, f, indent=2, sort_keys=True)
            f.write("\n")
    except (OSError, TypeError) as exc:
        raise ExportError(f"cannot write {path}: {exc}") from exc
    written.append(path)

    logger.info("Wrote %d file(s) to %s", len(written), directory)
    return written


def read_regret_csv(path: str) -> np.ndarray:
    """Rows of a regret_<label>.csv as an (n, 3) array of t, mean, std."""
    try:
        with open(path, "r", newline="", encoding="utf-8") as f:
            rows = list(csv.reader(f))
    except OSError as exc:
        raise ExportError(f"cannot read {path}: {exc}") from exc
    if not rows or tuple(rows[0]) != REGRET_HEADER:
        raise ExportError(f"{path} does not start with the header {','.join(REGRET_HEADER)}")
    return np.array([[float(v) for v in row] for row in rows[1:]]).reshape(-1, 3)
