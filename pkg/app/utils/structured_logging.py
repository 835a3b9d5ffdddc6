# structured_logging.py
"""
Logs estruturados do simulador.

Cada evento é um JSON {"event", "severity", ...campos} formatado em linha
no estilo Laravel:
    [2025-01-18 13:55:22] local.INFO: engine.run.finish {"run": "3f2a…", "rounds": 1000000}

Campos ligados com bind_run(...) (semente, digest do cenário, task_id) são
anexados a todos os eventos emitidos dentro do bloco, inclusive nas threads
do motor que rodam com uma cópia do contexto.
"""
import contextlib
import contextvars
import datetime as dt
import json
import logging
import logging.handlers
import os
import sys
import threading
import traceback

import numpy as np
import requests

import config as app_config
from app.services.storage import StorageService

LOGGER_NAME = "grouprec"

LEVEL_MAP = {
    "DEBUG": logging.DEBUG,
    "INFO": logging.INFO,
    "WARNING": logging.WARNING,
    "ERROR": logging.ERROR,
    "CRITICAL": logging.CRITICAL,
}

_run_fields: contextvars.ContextVar = contextvars.ContextVar("grouprec_run_fields", default={})
_http = threading.local()


def _jsonable(value):
    """numpy e Fraction não são serializáveis por padrão."""
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, np.ndarray):
        return value.tolist()
    return str(value)


def _dumps(payload: dict) -> str:
    return json.dumps(payload, ensure_ascii=False, default=_jsonable)


# =================================================================
# FORMATO LARAVEL
# =================================================================

class LaravelFormatter(logging.Formatter):

    def __init__(self, environment: str = "local"):
        super().__init__()
        self.environment = environment

    def format(self, record):
        ts = dt.datetime.fromtimestamp(record.created).strftime("%Y-%m-%d %H:%M:%S")
        payload = getattr(record, "payload", None)
        if payload is None:
            return f"[{ts}] {self.environment}.{record.levelname}: {record.getMessage()}"

        fields = {k: v for k, v in payload.items() if k not in ("event", "severity", "ts")}
        return (f"[{ts}] {self.environment}.{payload.get('severity', record.levelname)}: "
                f"{payload.get('event', 'log')} {_dumps(fields)}")


# =================================================================
# LOGGER PRINCIPAL
# =================================================================

def setup_logging() -> logging.Logger:
    logger = logging.getLogger(LOGGER_NAME)
    if not app_config.LOG_ENABLED or logger.handlers:
        return logger

    logger.setLevel(logging.INFO)
    logger.propagate = False
    formatter = LaravelFormatter(environment=app_config.LOG_ENVIRONMENT)

    # stderr: stdout fica reservado para a saída dos comandos
    console = logging.StreamHandler(sys.stderr)
    console.setLevel(logging.WARNING)
    console.setFormatter(formatter)
    logger.addHandler(console)

    file_handler = logging.handlers.TimedRotatingFileHandler(
        filename=os.path.join(StorageService.logs_dir(), "grouprec.log"),
        when="midnight",
        backupCount=7,
        encoding="utf-8",
    )
    file_handler.setFormatter(formatter)
    logger.addHandler(file_handler)
    return logger


@contextlib.contextmanager
def bind_run(**fields):
    """Anexa campos a todos os log_event emitidos dentro do bloco."""
    token = _run_fields.set({**_run_fields.get(), **fields})
    try:
        yield
    finally:
        _run_fields.reset(token)


def _post_external(body: str) -> None:
    session = getattr(_http, "session", None)
    if session is None:
        session = _http.session = requests.Session()
    try:
        session.post(app_config.LOG_EXTERNAL_URL, data=body.encode("utf-8"),
                     headers={"Content-Type": "application/json"}, timeout=1)
    except requests.RequestException:
        pass


def log_event(event: str, severity: str = "INFO", **fields) -> None:
    if not app_config.LOG_ENABLED:
        return

    severity = severity.upper()
    payload = {
        "ts": dt.datetime.now(dt.timezone.utc).isoformat(timespec="milliseconds"),
        "event": event,
        "severity": severity,
        **_run_fields.get(),
        **fields,
    }
    logging.getLogger(LOGGER_NAME).log(LEVEL_MAP.get(severity, logging.INFO), event,
                                       extra={"payload": payload})

    if app_config.LOG_EXTERNAL_ENABLED:
        _post_external(_dumps(payload))


# =================================================================
# ERROS GLOBAIS + THREADS
# =================================================================

def install_global_error_handlers() -> None:

    def handle_exception(exc_type, exc_value, exc_traceback):
        if not issubclass(exc_type, KeyboardInterrupt):
            log_event(
                "python.unhandled_exception",
                severity="ERROR",
                exception_type=exc_type.__name__,
                error=str(exc_value),
                traceback="".join(traceback.format_exception(exc_type, exc_value, exc_traceback)),
            )
        sys.__excepthook__(exc_type, exc_value, exc_traceback)

    def handle_thread_exception(args):
        log_event(
            "thread.unhandled_exception",
            severity="ERROR",
            thread=args.thread.name if args.thread else None,
            exception_type=args.exc_type.__name__,
            error=str(args.exc_value),
            traceback="".join(traceback.format_exception(args.exc_type, args.exc_value, args.exc_traceback)),
        )

    sys.excepthook = handle_exception
    threading.excepthook = handle_thread_exception


__all__ = ["setup_logging", "log_event", "bind_run", "install_global_error_handlers", "LaravelFormatter"]
