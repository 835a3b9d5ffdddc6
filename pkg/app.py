import click

from app.commands import compare_cmd, exact_cmd, plan_cmd, reproduce_cmd, simulate_cmd
from app.models import GroupRecError
from app.services.resources import check_system_resources
from app.utils.structured_logging import install_global_error_handlers, log_event, setup_logging


# --------------------------------------------------------------------
#  ERROS DE DOMÍNIO → CÓDIGO DE SAÍDA
# --------------------------------------------------------------------
class GroupRecCLI(click.Group):
    """
    Grupo raiz: erros de domínio viram uma linha no stderr e o exit code da
    classe (2 validação, 3 modelo inviável, 130 cancelado). O resto segue
    para o excepthook global.
    """

    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except GroupRecError as e:
            log_event(
                "cli.error",
                severity="ERROR",
                command=ctx.invoked_subcommand,
                error=str(e),
                exception_type=type(e).__name__,
                invariant=getattr(e, "invariant", None),
            )
            click.echo(f"erro: {e}", err=True)
            ctx.exit(e.exit_code)


# --------------------------------------------------------------------
#  CREATE_CLI — AQUI TUDO SE JUNTA
# --------------------------------------------------------------------
def create_cli() -> click.Group:

    @click.group(cls=GroupRecCLI)
    @click.pass_context
    def cli(ctx):
        """Simulador de acurácia de recomendação competitiva em grupo (revisão por pares)."""
        setup_logging()
        install_global_error_handlers()
        log_event("cli.start", command=ctx.invoked_subcommand)

        if ctx.invoked_subcommand in ("simulate", "reproduce", "compare"):
            probe = check_system_resources()
            log_event("resources.probe", severity="WARNING" if probe["status"] != "ok" else "INFO", **probe)

    # ------------------------------
    # SUBCOMANDOS
    # ------------------------------
    cli.add_command(simulate_cmd)
    cli.add_command(exact_cmd)
    cli.add_command(plan_cmd)
    cli.add_command(reproduce_cmd)
    cli.add_command(compare_cmd)

    return cli


# --------------------------------------------------------------------
#  EXECUÇÃO DIRETA
# --------------------------------------------------------------------
if __name__ == "__main__":
    create_cli()()
