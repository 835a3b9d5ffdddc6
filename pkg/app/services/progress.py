import copy
import threading
import time

import click

import config as app_config

# Cache em memória das execuções
PROGRESS: dict[str, dict] = {}

# LOCK para acesso seguro às threads
_progress_lock = threading.Lock()
_last_render: dict[str, float] = {}


def init_task(task_id: str, rounds_total: int, label: str = "") -> dict:
    """
    Registra uma execução nova do motor.
    """
    initial_state = {
        "phase": "iniciando",
        "label": label,
        "rounds_total": int(rounds_total),
        "rounds_done": 0,
        "started_at": time.monotonic(),
        "message": "Iniciando simulação...",
        "history": ["Tarefa criada."],
        "canceled": False,
    }

    with _progress_lock:
        PROGRESS[task_id] = initial_state
        return copy.deepcopy(PROGRESS[task_id])


def update_progress(task_id: str, updates: dict):
    """
    Atualiza o progresso em memória; `history` é acrescentado, nunca substituído.
    `rounds_delta` soma rodadas concluídas.
    """
    with _progress_lock:
        if task_id not in PROGRESS:
            return
        state = PROGRESS[task_id]
        updates = dict(updates)

        if "history" in updates:
            new_logs = updates.pop("history")
            if isinstance(new_logs, list):
                state["history"].extend(new_logs)
            else:
                state["history"].append(new_logs)

        if "rounds_delta" in updates:
            state["rounds_done"] += int(updates.pop("rounds_delta"))

        state.update(updates)


def get_task_progress(task_id: str) -> dict:
    with _progress_lock:
        if task_id in PROGRESS:
            return copy.deepcopy(PROGRESS[task_id])

    return {
        "phase": "desconhecido",
        "message": "Tarefa não encontrada.",
        "history": [],
    }


def _calculate_percent(data):
    phase = data.get("phase")
    if phase == "concluido":
        return 100
    if phase == "simulando":
        total = data.get("rounds_total", 0)
        done = data.get("rounds_done", 0)
        if total > 0:
            return int((done / total) * 100)
    return 0


def finish_task(task_id: str, phase: str = "concluido", message: str = "Concluído.") -> dict:
    """
    Fecha a execução: última linha de progresso e remoção do registro.
    Devolve o estado final.
    """
    update_progress(task_id, {"phase": phase, "message": message, "history": message})
    render_progress(task_id, force=True)
    with _progress_lock:
        state = PROGRESS.pop(task_id, None)
        _last_render.pop(task_id, None)
    return state or {}


# --- Controles de Estado ---

def set_task_cancel(task_id: str):
    with _progress_lock:
        if task_id in PROGRESS:
            PROGRESS[task_id]["canceled"] = True
            PROGRESS[task_id]["history"].append("Solicitando cancelamento...")


def is_canceled(task_id: str) -> bool:
    with _progress_lock:
        return bool(PROGRESS.get(task_id, {}).get("canceled"))


# --- Saída no stderr ---

_render_enabled = False


def enable_rendering(enabled: bool = True):
    global _render_enabled
    _render_enabled = enabled


def render_progress(task_id: str, force: bool = False):
    """Linha de progresso no stderr, no máximo uma a cada PROGRESS_MIN_INTERVAL."""
    if not _render_enabled:
        return
    now = time.monotonic()
    with _progress_lock:
        if task_id not in PROGRESS:
            return
        if not force and now - _last_render.get(task_id, 0.0) < app_config.PROGRESS_MIN_INTERVAL:
            return
        _last_render[task_id] = now

    snapshot = get_task_progress(task_id)
    if "started_at" not in snapshot:
        return
    elapsed = now - snapshot["started_at"]
    rate = snapshot["rounds_done"] / elapsed if elapsed > 0 else 0.0
    click.echo(
        f"[{snapshot.get('label') or task_id}] {_calculate_percent(snapshot):3d}% "
        f"{snapshot['rounds_done']}/{snapshot['rounds_total']} rodadas ({rate:,.0f}/s)",
        err=True,
    )
