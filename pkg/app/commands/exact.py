# commands/exact.py
import click

import config as app_config
from app.models import (
    ExactInstance,
    MatchingKind,
    PlanKind,
    QualitySource,
    ScenarioConfig,
    SigmaKind,
    TieBreakRule,
    ValidationError,
    VotingKind,
)
from app.services import exact_solver, report_csv
from app.services.scenario_loader import load_scenario

from .common import emit_report, out_option


def instance_from_config(config: ScenarioConfig, size_guard: int) -> ExactInstance:
    """Cenário → instância exata; só o caso especial é aceito."""
    checks = (
        (config.review_policy.kind == PlanKind.HOMOGENEOUS, "plano homogêneo"),
        (config.voting.kind == VotingKind.AVERAGE, "regra da média"),
        (config.tiebreak == TieBreakRule.RANDOM, "desempate aleatório"),
        (config.sigma_policy.kind == SigmaKind.CONSTANT, "σ constante"),
        (config.matching_model.kind == MatchingKind.NONE, "sem matching"),
        (not any(config.behavior_mix.values()), "revisores honestos"),
        (config.quality_source == QualitySource.LINEAR_GRID, "quality_source linear-grid"),
    )
    for ok, what in checks:
        if not ok:
            raise ValidationError(f"solver exato exige {what}", invariant="exact special case")

    return exact_solver.grid_instance(
        config.n_papers, config.k, config.review_policy.n, config.m,
        sigma=config.sigma_policy.sigma, size_guard=size_guard,
    )


@click.command("exact")
@click.option("--config", "config_path", required=True, type=click.Path(exists=True, dir_okay=False),
              help="Cenário do caso especial (linear-grid, média, desempate aleatório).")
@click.option("--size-guard", type=click.IntRange(min=1), default=app_config.EXACT_SIZE_GUARD,
              show_default=True, help="Maior N aceito.")
@click.option("--oracle", is_flag=True, default=False, help="Confere contra a enumeração completa.")
@out_option
def exact_cmd(config_path, size_guard, oracle, out):
    """pmf exata de I(k) no caso especial."""
    config, params = load_scenario(config_path)
    instance = instance_from_config(config, size_guard)

    pmf = exact_solver.intersection_pmf_exact(instance)
    deviation = None
    if oracle:
        reference = exact_solver.brute_force_oracle(instance)
        deviation = max(abs(a - b) for a, b in zip(pmf, reference))

    comments = report_csv.comments_for({"command": "exact", "instance": instance.to_dict(),
                                        "digest": config.digest()})
    rows = report_csv.exact_rows("exact", pmf, exact_solver.pmf_moments(pmf), deviation)
    emit_report(report_csv.build_report(comments, rows), out or params.out,
                f"exact-{config.digest()[:12]}.csv")
