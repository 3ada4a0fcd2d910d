# Copyright (c) 2025, Equilibrium Bandits Contributors
# SPDX-License-Identifier: MIT

import sys
from typing import List, Optional

import click

from equilibrium_bandits import __version__
from equilibrium_bandits.commands.utils import (
    EXIT_CONFIG,
    EXIT_OK,
    equilibria_logic,
    run_logic,
    validate_logic,
)

CONFIG_OPTION = click.option(
    "--config", "config_path", required=True, type=click.Path(dir_okay=False),
    help="Experiment config file (TOML).",
)


@click.group("equilibrium-bandits")
@click.version_option(__version__, prog_name="equilibrium-bandits")
def cli():
    """Simulate equilibrium bandits: UECB and baselines on systems that converge to action-dependent equilibria."""
    pass


@cli.command("run")
@CONFIG_OPTION
@click.option("--out", type=click.Path(file_okay=False), help="Output directory. Overrides [run] output_dir.")
@click.option("--seeds", type=click.IntRange(min=1), help="Number of realizations. Overrides [run] num_seeds.")
@click.option("--horizon", type=click.IntRange(min=1), help="Timesteps per realization. Overrides [run] horizon.")
@click.option("--workers", type=click.IntRange(min=1), help="Parallel worker processes. Overrides [run] workers.")
@click.option("--paper-scale", is_flag=True, help="Use 100 seeds unless --seeds is given.")
@click.pass_context
def run(ctx, config_path, out, seeds, horizon, workers, paper_scale):
    """Runs every configured algorithm and writes regret CSVs plus meta.json."""
    status, message = run_logic(
        config_path, out=out, seeds=seeds, horizon=horizon, workers=workers, paper_scale=paper_scale,
        progress=lambda label, k: click.echo(f"{label}: seed {k} done", err=True),
    )
    click.secho(message, fg="green" if status == EXIT_OK else "red")
    ctx.exit(status)


@cli.command("equilibria")
@CONFIG_OPTION
@click.option("--dump-dir", type=click.Path(file_okay=False), help="Also write the SIS contact matrices here.")
@click.pass_context
def equilibria_command(ctx, config_path, dump_dir):
    """Prints x_a*, the gaps and the optimal action of the configured environment."""
    status, message = equilibria_logic(config_path, dump_dir=dump_dir)
    click.secho(message, fg="green" if status == EXIT_OK else "red")
    ctx.exit(status)


@cli.command("validate")
@CONFIG_OPTION
@click.pass_context
def validate(ctx, config_path):
    """Checks contraction, reward bounds and fixed points; exits nonzero on any violation."""
    status, message = validate_logic(config_path)
    click.secho(message, fg="green" if status == EXIT_OK else "red")
    ctx.exit(status)


def cli_main(argv: Optional[List[str]] = None) -> int:
    """Runs the command group without exiting the interpreter and returns the exit status."""
    try:
        status = cli.main(args=argv, prog_name="equilibrium-bandits", standalone_mode=False)
    except click.ClickException as e:
        e.show()
        return EXIT_CONFIG
    except click.Abort:
        click.secho("Aborted.", fg="red", err=True)
        return EXIT_CONFIG
    return EXIT_OK if status is None else int(status)


def main():
    sys.exit(cli_main(sys.argv[1:]))

