# commands/common.py
"""Opções e saídas compartilhadas pelos subcomandos."""
import click

from app.models import ReportCsv
from app.services import progress, report_csv
from app.services.storage import StorageService


def workers_option(f):
    return click.option(
        "--workers", type=click.IntRange(min=1), default=None,
        help="Threads do motor (padrão: GROUPREC_WORKERS ou núcleos físicos).",
    )(f)


def progress_option(f):
    return click.option(
        "--no-progress", is_flag=True, default=False,
        help="Não exibe a linha de progresso no stderr.",
    )(f)


def out_option(f):
    return click.option(
        "--out", type=click.Path(dir_okay=False, writable=True), default=None,
        help="CSV de saída (padrão: storage/results/).",
    )(f)


def configure_progress(no_progress: bool) -> None:
    progress.enable_rendering(not no_progress)


def emit_report(report: ReportCsv, out: str | None, default_name: str) -> str:
    """Grava o CSV e informa o caminho no stdout."""
    path = out or StorageService.results_path_for(default_name)
    report_csv.write_report(report, path)
    click.echo(path)
    return path
