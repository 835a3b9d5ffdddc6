import concurrent.futures
import contextvars
import json
import logging
import os

import numpy as np

import config as app_config
from app.services.storage import StorageService
from app.utils import structured_logging
from app.utils.structured_logging import LaravelFormatter, bind_run, log_event


def _payloads(caplog):
    return [r.payload for r in caplog.records if hasattr(r, "payload")]


def test_log_event_disabled_emits_nothing(caplog):
    caplog.set_level(logging.DEBUG, logger="grouprec")
    log_event("engine.run.start", rounds=10)
    assert _payloads(caplog) == []


def test_bind_run_fields_reach_worker_threads(monkeypatch, caplog):
    monkeypatch.setattr(app_config, "LOG_ENABLED", True)
    caplog.set_level(logging.DEBUG, logger="grouprec")

    with bind_run(run="abc123", seed=7):
        log_event("engine.run.start", rounds=5)
        with concurrent.futures.ThreadPoolExecutor(max_workers=2) as pool:
            pool.submit(contextvars.copy_context().run, log_event, "engine.block.done", start=0).result()
    log_event("fora")

    start, block, outside = _payloads(caplog)
    assert start["run"] == "abc123" and start["seed"] == 7 and start["rounds"] == 5
    assert block["run"] == "abc123" and block["start"] == 0
    assert "run" not in outside


def test_formatter_serializes_numpy_fields():
    record = logging.LogRecord("grouprec", logging.INFO, __file__, 1, "x", None, None)
    record.payload = {"event": "engine.run.finish", "severity": "INFO", "ts": "t",
                      "rounds": np.int64(3), "e": np.float64(0.5), "hist": np.array([1, 2])}

    line = LaravelFormatter(environment="teste").format(record)
    assert "teste.INFO: engine.run.finish " in line
    assert json.loads(line.split("engine.run.finish ", 1)[1]) == {"rounds": 3, "e": 0.5, "hist": [1, 2]}


def test_external_sink_receives_json(monkeypatch):
    monkeypatch.setattr(app_config, "LOG_ENABLED", True)
    monkeypatch.setattr(app_config, "LOG_EXTERNAL_ENABLED", True)
    sent = []
    monkeypatch.setattr(structured_logging, "_post_external", sent.append)

    log_event("preset.point", severity="warning", e_k=np.float64(1.25))

    body = json.loads(sent[0])
    assert body["event"] == "preset.point"
    assert body["severity"] == "WARNING"
    assert body["e_k"] == 1.25


def test_atomic_write_leaves_no_partial_files(tmp_path):
    path = str(tmp_path / "results" / "a.csv")
    StorageService.write_text_atomic(path, "x,y\n1,2\n")
    StorageService.write_text_atomic(path, "x,y\n3,4\n")

    assert open(path, encoding="utf-8").read() == "x,y\n3,4\n"
    assert os.listdir(tmp_path / "results") == ["a.csv"]


def test_results_dir_follows_environment(monkeypatch, tmp_path):
    monkeypatch.setenv("GROUPREC_RESULTS_DIR", str(tmp_path / "saida"))
    path = StorageService.results_path_for("simulate-x.csv")
    assert path == os.path.join(str(tmp_path / "saida"), "simulate-x.csv")
    assert os.path.isdir(tmp_path / "saida")
