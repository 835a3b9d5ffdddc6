# commands/simulate.py
from dataclasses import replace

import click

import config as app_config
from app.services import mc_engine, report_csv
from app.services.scenario_loader import load_scenario

from .common import configure_progress, emit_report, out_option, progress_option, workers_option


@click.command("simulate")
@click.option("--config", "config_path", required=True, type=click.Path(exists=True, dir_okay=False),
              help="Arquivo JSON do cenário.")
@click.option("--rounds", type=click.IntRange(min=1), default=None, help="Rodadas K.")
@click.option("--seed", type=click.IntRange(min=0, max=2 ** 64 - 1), default=None, help="Sobrescreve a semente.")
@workers_option
@out_option
@progress_option
def simulate_cmd(config_path, rounds, seed, workers, out, no_progress):
    """Estima pmf, E e Var de I(k) e das métricas I_i."""
    configure_progress(no_progress)
    config, params = load_scenario(config_path)
    if seed is not None:
        config = replace(config, seed=seed)

    if rounds is None:
        if params.rounds is not None:
            rounds = params.rounds
        elif params.guarantee is not None:
            rounds = mc_engine.required_rounds(params.guarantee)
        else:
            rounds = app_config.DEFAULT_ROUNDS

    report = mc_engine.run(config, rounds, workers=workers or params.workers, label="simulate")

    comments = report_csv.comments_for({"command": "simulate", "K": rounds, "scenario": config.to_dict(),
                                        "digest": config.digest()})
    if params.guarantee is not None:
        bounds = mc_engine.guarantee_bounds(params.guarantee, report)
        comments += report_csv.comments_for({"guarantee": params.guarantee.to_dict(),
                                             "bound_E": bounds["E"], "bound_Var": bounds["Var"]})

    csv = report_csv.build_report(comments, report_csv.accuracy_rows("scenario", report))
    emit_report(csv, out or params.out, f"simulate-{config.digest()[:12]}.csv")
