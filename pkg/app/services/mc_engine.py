# services/mc_engine.py
"""
Estimador Monte Carlo da distribuição de I(k) e das métricas I_i, mais os
planejadores de rodadas e as checagens de garantia.

As rodadas são divididas em blocos vetorizados e distribuídas num pool de
threads. Cada rodada lê suas uniformes do fluxo por contador, então o
relatório depende só de (cenário, intervalo de rodadas).
"""
import concurrent.futures
import contextvars
import math
import time
import uuid
from typing import Iterable, Optional

import numpy as np

from app.models import (
    AccuracyReport,
    AdjustmentInfeasible,
    BoundKind,
    ConfigMismatch,
    GuaranteeSpec,
    QualitySource,
    RunCanceled,
    ScenarioConfig,
    ValidationError,
)
from app.services import progress, quality_model, resources, review_rounds, score_model
from app.utils.rng import RoundStreams
from app.utils.structured_logging import bind_run, log_event


# =========================================================
# 1. VALIDAÇÃO PRÉVIA
# =========================================================
def check_feasibility(config: ScenarioConfig) -> None:
    """Ajuste (α, β) viável para todo Q possível e todo σ que a política emite."""
    if config.quality_source == QualitySource.LINEAR_GRID:
        qualities = quality_model.linear_quality_grid(config.n_papers, config.m)
    else:
        qualities = score_model.feasibility_points(config.m)
    score_model.assert_feasible(qualities, config.sigma_policy.sigma_values(), config.m)


def tallied_metrics(config: ScenarioConfig) -> tuple:
    return tuple(sorted(set(config.metrics_i) | {config.k}))


# =========================================================
# 2. EXECUÇÃO POR BLOCOS
# =========================================================
def _bytes_per_round(config: ScenarioConfig, draws_per_round: int) -> int:
    # uniformes + pmfs por revisão + intermediários inteiros
    per_review = config.n_papers * config.draw_capacity
    return 8 * (draws_per_round + per_review * (config.m + 8))


def _run_chunk(config, layout, streams, start: int, rounds: int, metrics: tuple, task_id: Optional[str]) -> dict:
    if task_id and progress.is_canceled(task_id):
        raise RunCanceled(f"execução {task_id} cancelada")

    u = streams.uniforms(start, rounds)
    _, ranks = review_rounds.simulate_block(config, layout, u)

    histograms = {}
    for i in metrics:
        hits = (ranks < i).sum(axis=1)
        histograms[i] = np.bincount(hits, minlength=min(i, config.k) + 1).astype(np.int64)

    if task_id:
        progress.update_progress(task_id, {"rounds_delta": rounds})
        progress.render_progress(task_id)
    log_event("engine.block.done", severity="DEBUG", start=start, rounds=rounds)
    return histograms


def _tally(config, layout, streams, chunks, metrics: tuple, task_id: str, workers: int) -> dict:
    totals = {i: np.zeros(min(i, config.k) + 1, dtype=np.int64) for i in metrics}
    with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as executor:
        # cada bloco roda numa cópia do contexto (campos de bind_run)
        futures = [
            executor.submit(contextvars.copy_context().run, _run_chunk,
                            config, layout, streams, s, b, metrics, task_id)
            for s, b in chunks
        ]
        try:
            for future in concurrent.futures.as_completed(futures):
                for i, hist in future.result().items():
                    totals[i] += hist
        except KeyboardInterrupt:
            progress.set_task_cancel(task_id)
            for f in futures:
                f.cancel()
            progress.finish_task(task_id, phase="cancelado", message="Cancelado pelo usuário.")
            raise RunCanceled(f"execução {task_id} cancelada")
        except RunCanceled:
            for f in futures:
                f.cancel()
            progress.finish_task(task_id, phase="cancelado", message="Cancelada.")
            raise
        except Exception as e:
            for f in futures:
                f.cancel()
            progress.finish_task(task_id, phase="erro", message=str(e))
            log_event("engine.block.error", severity="ERROR", error=str(e))
            raise
    return totals


def run(config: ScenarioConfig, K: int, workers: Optional[int] = None, start_round: int = 0,
        task_id: Optional[str] = None, label: str = "") -> AccuracyReport:
    """
    Executa as rodadas [start_round, start_round + K) e devolve os histogramas
    de I_i para todo i em metrics_i e para i = k.
    """
    if K < 1:
        raise ValidationError(f"rodadas inválidas: {K}", invariant="K ≥ 1")
    if start_round < 0:
        raise ValidationError(f"rodada inicial negativa: {start_round}", invariant="start_round ≥ 0")

    try:
        check_feasibility(config)
    except AdjustmentInfeasible as e:
        log_event("engine.infeasible", severity="ERROR", quality=e.quality, sigma=e.sigma,
                  alpha=e.alpha, beta=e.beta)
        raise

    workers = workers or resources.default_workers()
    layout = review_rounds.draw_layout(config)
    streams = RoundStreams(config.seed, layout.draws_per_round)
    metrics = tallied_metrics(config)
    block = resources.block_rounds(_bytes_per_round(config, streams.draws_per_round), workers)

    end = start_round + K
    chunks = [(s, min(block, end - s)) for s in range(start_round, end, block)]

    task_id = task_id or uuid.uuid4().hex[:12]
    progress.init_task(task_id, K, label=label)
    progress.update_progress(task_id, {"phase": "simulando", "message": "Simulando rodadas..."})

    with bind_run(task_id=task_id, run=config.digest()[:16], seed=config.seed):
        log_event("engine.run.start", rounds=K, start_round=start_round,
                  workers=workers, block_rounds=block, chunks=len(chunks))
        started = time.perf_counter()
        totals = _tally(config, layout, streams, chunks, metrics, task_id, workers)
        elapsed = time.perf_counter() - started
        progress.finish_task(task_id)
        log_event("engine.run.finish", rounds=K, seconds=round(elapsed, 3),
                  rounds_per_s=round(K / elapsed, 1) if elapsed > 0 else None)

    return AccuracyReport(
        k=config.k,
        K=K,
        seed=config.seed,
        config_digest=config.digest(),
        histograms={i: tuple(int(c) for c in hist) for i, hist in totals.items()},
        rounds=((start_round, end),),
    )


def run_rounds(config: ScenarioConfig, start: int, stop: int, **kwargs) -> AccuracyReport:
    """Atalho para um intervalo [start, stop) de rodadas."""
    return run(config, stop - start, start_round=start, **kwargs)


# =========================================================
# 3. JUNÇÃO DE RELATÓRIOS PARCIAIS
# =========================================================
def _normalize_rounds(intervals: Iterable[tuple]) -> tuple:
    merged = []
    for start, stop in sorted(intervals):
        if merged and start < merged[-1][1]:
            raise ConfigMismatch(f"intervalos de rodadas sobrepostos em {start}", invariant="disjoint rounds")
        if merged and start == merged[-1][1]:
            merged[-1] = (merged[-1][0], stop)
        else:
            merged.append((start, stop))
    return tuple(merged)


def merge_reports(partials) -> AccuracyReport:
    partials = list(partials)
    if not partials:
        raise ValidationError("nenhum relatório para juntar", invariant="partials ≠ ∅")

    first = partials[0]
    for other in partials[1:]:
        if other.config_digest != first.config_digest:
            raise ConfigMismatch("relatórios de cenários diferentes", invariant="same config digest")
        if other.seed != first.seed or other.k != first.k:
            raise ConfigMismatch("semente ou k divergentes", invariant="same config digest")
        if set(other.histograms) != set(first.histograms):
            raise ConfigMismatch("métricas I_i divergentes", invariant="same metrics")

    rounds = _normalize_rounds(r for p in partials for r in p.rounds)
    histograms = {
        i: tuple(int(sum(col)) for col in zip(*(p.histograms[i] for p in partials)))
        for i in first.histograms
    }
    return AccuracyReport(
        k=first.k,
        K=sum(p.K for p in partials),
        seed=first.seed,
        config_digest=first.config_digest,
        histograms=histograms,
        rounds=rounds,
    )


# =========================================================
# 4. PLANEJAMENTO DE RODADAS (Chernoff)
# =========================================================
def _chernoff_numerator(spec: GuaranteeSpec) -> float:
    return 3.0 * math.log(2.0 * (spec.k + 1) / spec.delta)


def required_rounds_tight(spec: GuaranteeSpec) -> int:
    """K = ⌈3 ln(2(k+1)/δ) / ε²⌉: erro ≤ ε√Pr em cada entrada da pmf."""
    return math.ceil(_chernoff_numerator(spec) / spec.epsilon ** 2)


def required_rounds_loose(spec: GuaranteeSpec) -> int:
    """K = ⌈3 ln(2(k+1)/δ) / (p_floor·ε²)⌉: erro relativo ε em cada entrada."""
    if spec.p_floor is None:
        raise ValidationError("limite loose exige p_floor", invariant="0 < p_floor ≤ 1")
    return math.ceil(_chernoff_numerator(spec) / (spec.p_floor * spec.epsilon ** 2))


def required_rounds(spec: GuaranteeSpec) -> int:
    if spec.bound == BoundKind.TIGHT:
        return required_rounds_tight(spec)
    return required_rounds_loose(spec)


def required_rounds_for_pmf(epsilon: float, delta: float, pmf) -> int:
    """Limite loose usando a menor entrada não nula de uma pmf conhecida (exata ou piloto)."""
    nonzero = [float(p) for p in pmf if p > 0]
    if not nonzero:
        raise ValidationError("pmf sem massa", invariant="Σ pmf = 1")
    spec = GuaranteeSpec(epsilon=epsilon, delta=delta, bound=BoundKind.LOOSE,
                         k=len(pmf) - 1, p_floor=min(1.0, min(nonzero)))
    return required_rounds_loose(spec)


def guarantee_bounds(spec: GuaranteeSpec, report: AccuracyReport) -> dict:
    """Raios de erro prometidos pelo planejador, avaliados nas estimativas."""
    eps, k = spec.epsilon, spec.k
    pmf = [float(p) for p in report.pmf_hat]
    e = report.e_hat[report.k]
    var = report.var_hat[report.k]

    if spec.bound == BoundKind.LOOSE:
        return {
            "pmf": [eps * p for p in pmf],
            "E": eps * e,
            "Var": eps * (1.0 + eps) * var,
        }
    return {
        "pmf": [eps * math.sqrt(p) for p in pmf],
        "E": eps * math.sqrt(k * (k + 1) * e / 2.0),
        "Var": eps * (k + 1) * (eps * var + math.sqrt((2 * k + 1) * var / 6.0)),
    }


def pmf_violations(report: AccuracyReport, exact_pmf, epsilon: float) -> list:
    """Índices i com |P̂r − Pr| > ε√Pr."""
    estimated = report.pmf_hat
    if len(estimated) != len(exact_pmf):
        raise ValidationError("pmfs com suportes diferentes", invariant="len(pmf) = k + 1")
    return [
        i for i, (p_hat, p) in enumerate(zip(estimated, exact_pmf))
        if abs(float(p_hat) - p) > epsilon * math.sqrt(max(p, 0.0))
    ]
