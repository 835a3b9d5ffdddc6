# commands/reproduce.py
import click

import config as app_config
from app.services import presets

from .common import configure_progress, emit_report, out_option, progress_option, workers_option


@click.command("reproduce")
@click.option("--preset", required=True, type=click.Choice(sorted(presets.PRESETS)), help="Experimento.")
@click.option("--rounds", type=click.IntRange(min=1), default=app_config.DEFAULT_ROUNDS, show_default=True)
@click.option("--seed", type=click.IntRange(min=0, max=2 ** 64 - 1), default=app_config.DEFAULT_SEED,
              show_default=True)
@workers_option
@out_option
@progress_option
def reproduce_cmd(preset, rounds, seed, workers, out, no_progress):
    """Executa uma varredura do catálogo e grava um CSV para gráficos."""
    configure_progress(no_progress)
    report = presets.run_preset(preset, K=rounds, seed=seed, workers=workers)
    emit_report(report, out, f"{preset}-K{rounds}-s{seed}.csv")
