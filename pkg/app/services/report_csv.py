# services/report_csv.py
"""
CSV de resultados: linhas de comentário "# chave=valor" com os parâmetros do
cenário, depois a tabela (scenario, metric, i_or_bin, value, stderr, K, seed).
Floats saem com 12 dígitos significativos.
"""
import io
import json
import math
from typing import Iterable, Optional

import pandas as pd

from app.models import (
    REPORT_COLUMNS,
    AccuracyReport,
    ImprovementReport,
    ParseError,
    ReportCsv,
    ReportRow,
)
from app.services.storage import StorageService

FLOAT_FORMAT = "%.12g"


# ---------------------------------------------------
# Montagem das linhas
# ---------------------------------------------------
def accuracy_rows(scenario: str, report: AccuracyReport) -> list:
    rows = []
    K, seed = report.K, report.seed
    for v, p in enumerate(report.pmf_hat):
        p = float(p)
        rows.append(ReportRow(scenario, "pmf", v, p, math.sqrt(p * (1.0 - p) / K), K, seed))
    for i in report.metrics_i:
        rows.append(ReportRow(scenario, "E", i, report.e_hat[i], report.stderr(i), K, seed))
    for i in report.metrics_i:
        rows.append(ReportRow(scenario, "Var", i, report.var_hat[i], None, K, seed))
    return rows


def exact_rows(scenario: str, pmf, moments: tuple, deviation: Optional[float] = None) -> list:
    rows = [ReportRow(scenario, "pmf", v, float(p), None, 0, 0) for v, p in enumerate(pmf)]
    k = len(pmf) - 1
    rows.append(ReportRow(scenario, "E", k, moments[0], None, 0, 0))
    rows.append(ReportRow(scenario, "Var", k, moments[1], None, 0, 0))
    if deviation is not None:
        rows.append(ReportRow(scenario, "oracle_max_dev", k, deviation, None, 0, 0))
    return rows


def improvement_rows(scenario: str, report: ImprovementReport) -> list:
    rows = []
    K, seed = report.K, report.seed
    for i in sorted(report.e_hom):
        rows.append(ReportRow(scenario, "E_hom", i, report.e_hom[i], report.stderr_hom[i], K, seed))
        rows.append(ReportRow(scenario, "E_het", i, report.e_het[i], report.stderr_het[i], K, seed))
        # braços acoplados: soma dos erros padrão é conservadora
        rows.append(ReportRow(scenario, "delta_E", i, report.delta_e[i],
                              report.stderr_hom[i] + report.stderr_het[i], K, seed))
        if i in report.ratio:
            rows.append(ReportRow(scenario, "ratio", i, report.ratio[i], None, K, seed))
    rows.append(ReportRow(scenario, "W_hom", 0, float(report.workloads[0]), None, K, seed))
    rows.append(ReportRow(scenario, "W_het", 0, float(report.workloads[1]), None, K, seed))
    return rows


def comments_for(params: dict) -> tuple:
    """Parâmetros como linhas "chave=valor" (dicts viram JSON compacto)."""
    lines = []
    for key, value in params.items():
        if isinstance(value, (dict, list, tuple)):
            value = json.dumps(value, sort_keys=True, ensure_ascii=False, separators=(",", ":"))
        lines.append(f"{key}={value}")
    return tuple(lines)


def build_report(comments: Iterable[str], rows: Iterable[ReportRow]) -> ReportCsv:
    return ReportCsv(comments=tuple(comments), rows=tuple(rows))


# ---------------------------------------------------
# Escrita / leitura
# ---------------------------------------------------
def to_frame(report: ReportCsv) -> pd.DataFrame:
    frame = pd.DataFrame([row.as_tuple() for row in report.rows], columns=list(REPORT_COLUMNS))
    # None → NaN, para o float_format valer nas duas colunas
    return frame.astype({"value": "float64", "stderr": "float64"})


def render(report: ReportCsv) -> str:
    buffer = io.StringIO()
    for line in report.comments:
        buffer.write(f"# {line}\n")
    to_frame(report).to_csv(buffer, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    return buffer.getvalue()


def write_report(report: ReportCsv, path: str) -> str:
    return StorageService.write_text_atomic(path, render(report))


def read_report(path: str) -> ReportCsv:
    comments = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            if not line.startswith("#"):
                break
            comments.append(line[1:].strip())

    try:
        frame = pd.read_csv(
            path,
            skiprows=len(comments),
            dtype={"scenario": str, "metric": str},
            keep_default_na=False,
            na_values={"stderr": [""], "value": [""]},
        )
    except (pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise ParseError(f"CSV inválido: {e}") from None

    if tuple(frame.columns) != REPORT_COLUMNS:
        raise ParseError(f"cabeçalho inesperado: {list(frame.columns)}", line=len(comments) + 1)

    rows = tuple(
        ReportRow(
            scenario=r.scenario,
            metric=r.metric,
            i_or_bin=int(r.i_or_bin),
            value=float(r.value),
            stderr=None if pd.isna(r.stderr) else float(r.stderr),
            K=int(r.K),
            seed=int(r.seed),
        )
        for r in frame.itertuples(index=False)
    )
    return ReportCsv(comments=tuple(comments), rows=rows)
