# commands/compare.py
from dataclasses import replace

import click

import config as app_config
from app.models import ReviewPlan
from app.services import report_csv, strategies
from app.services.scenario_loader import load_scenario

from .common import configure_progress, emit_report, out_option, progress_option, workers_option


@click.command("compare")
@click.option("--config", "config_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--strategy", type=click.Choice(["hetero"]), default="hetero", show_default=True)
@click.option("--n", "n", type=click.IntRange(min=2), required=True, help="Revisões por paper.")
@click.option("--challenger", type=click.Choice(["hetero", "homogeneous"]), default=None,
              help="Braço desafiante (homogeneous = diagnóstico, ΔE = 0).")
@click.option("--rounds", type=click.IntRange(min=1), default=None)
@click.option("--seed", type=click.IntRange(min=0, max=2 ** 64 - 1), default=None)
@workers_option
@out_option
@progress_option
def compare_cmd(config_path, strategy, n, challenger, rounds, seed, workers, out, no_progress):
    """Compara a estratégia em duas rodadas com a homogênea de mesmo n."""
    configure_progress(no_progress)
    config, params = load_scenario(config_path)
    if seed is not None:
        config = replace(config, seed=seed)
    K = rounds or params.rounds or app_config.DEFAULT_ROUNDS

    arm = ReviewPlan.homogeneous(n) if challenger == "homogeneous" else ReviewPlan.heterogeneous(n)
    report = strategies.compare_strategies(config, n, K, workers=workers or params.workers, challenger=arm)

    comments = report_csv.comments_for({"command": "compare", "strategy": strategy, "n": n,
                                        "challenger": arm.to_dict(), "K": K, "scenario": config.to_dict()})
    rows = report_csv.improvement_rows(f"{strategy};n={n}", report)
    emit_report(report_csv.build_report(comments, rows), out or params.out,
                f"compare-{config.digest()[:12]}-n{n}.csv")
