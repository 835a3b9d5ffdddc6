# commands/plan.py
import click

from app.models import BoundKind, GuaranteeSpec
from app.services import mc_engine


@click.command("plan")
@click.option("--epsilon", type=float, required=True, help="Erro ε.")
@click.option("--delta", type=float, required=True, help="Probabilidade de falha δ.")
@click.option("--k", "k", type=click.IntRange(min=1), required=True, help="Vagas k.")
@click.option("--bound", type=click.Choice([b.value for b in BoundKind]), default=BoundKind.TIGHT.value,
              show_default=True)
@click.option("--p-floor", type=float, default=None, help="Cota inferior das entradas não nulas (loose).")
def plan_cmd(epsilon, delta, k, bound, p_floor):
    """Número de rodadas K para a garantia (ε, δ)."""
    spec = GuaranteeSpec(epsilon=epsilon, delta=delta, bound=BoundKind(bound), k=k, p_floor=p_floor)
    click.echo(mc_engine.required_rounds(spec))
