"""HTTP API: submit scenarios as asynchronous jobs, poll their status, and
fetch results from a file-backed store.

Datasets, the fitted model, and OD coefficients load once at startup and
stay immutable. Jobs run on a bounded thread pool; submissions beyond the
queue limit get 429. Records live under store/{id}/ as scenario.json,
record.json, result.json, and result.geojson, so a restart preserves
everything already written.
"""

from __future__ import annotations

import datetime as dt
import json
import os
import shutil
import threading
import uuid
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from fastapi import FastAPI, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse

from . import __version__, scenario as scenario_mod
from .errors import StormfluxError, error_payload
from .evacmodel import load_model, model_to_dict
from .geodata import load_datasets
from .odchoice import load_coefficients
from .prevalence import load_cases

PENDING = "pending"
RUNNING = "running"
DONE = "done"
FAILED = "failed"


@dataclass(frozen=True)
class ServiceConfig:
    data_dir: str
    model_path: str
    coeffs_path: str
    store_dir: str = "store"
    workers: int = 0
    queue_limit: int = 32
    ui_dir: str | None = None

    @staticmethod
    def default_workers() -> int:
        return max(1, os.cpu_count() or 1)

    def resolved_workers(self) -> int:
        return self.workers if self.workers > 0 else self.default_workers()


def _now() -> str:
    return dt.datetime.now(dt.timezone.utc).isoformat(timespec="seconds")


def _write_json(path: Path, doc: dict, **dumps_kwargs) -> None:
    # atomic replace so concurrent readers never see a truncated file
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(json.dumps(doc, **dumps_kwargs) + "\n", encoding="utf-8")
    os.replace(tmp, path)


class JobStore:
    """Directory-per-job persistence; record mutation is lock-serialized."""

    def __init__(self, root):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()

    def _record_path(self, job_id: str) -> Path:
        return self.root / job_id / "record.json"

    def create(self, scenario_doc: dict) -> str:
        job_id = uuid.uuid4().hex
        job_dir = self.root / job_id
        job_dir.mkdir(parents=True)
        _write_json(job_dir / "scenario.json", scenario_doc,
                    indent=2, sort_keys=True)
        record = {"id": job_id, "status": PENDING, "created_at": _now(),
                  "finished_at": None, "error": None, "scenario": scenario_doc}
        _write_json(self._record_path(job_id), record, indent=2, sort_keys=True)
        return job_id

    def get(self, job_id: str) -> dict | None:
        path = self._record_path(job_id)
        if not path.is_file():
            return None
        return json.loads(path.read_text(encoding="utf-8"))

    def list(self) -> list[dict]:
        records = []
        for entry in self.root.iterdir():
            if entry.is_dir() and (entry / "record.json").is_file():
                records.append(self.get(entry.name))
        records.sort(key=lambda r: (r["created_at"], r["id"]))
        return records

    def update(self, job_id: str, **changes) -> dict:
        with self._lock:
            record = self.get(job_id)
            if record is None:
                raise KeyError(job_id)
            record.update(changes)
            _write_json(self._record_path(job_id), record,
                        indent=2, sort_keys=True)
            return record

    def write_result(self, job_id: str, result_doc: dict, geojson_doc: dict) -> None:
        job_dir = self.root / job_id
        _write_json(job_dir / "result.json", result_doc, sort_keys=True)
        _write_json(job_dir / "result.geojson", geojson_doc, sort_keys=True)

    def result_bytes(self, job_id: str, fmt: str) -> bytes | None:
        name = "result.geojson" if fmt == "geojson" else "result.json"
        path = self.root / job_id / name
        return path.read_bytes() if path.is_file() else None

    def delete(self, job_id: str) -> bool:
        job_dir = self.root / job_id
        if not job_dir.is_dir():
            return False
        shutil.rmtree(job_dir)
        return True

    def recover(self) -> None:
        # jobs that never finished before the last shutdown cannot resume:
        # the pool that owned them is gone
        for record in self.list():
            if record["status"] in (PENDING, RUNNING):
                self.update(record["id"], status=FAILED, finished_at=_now(),
                            error="interrupted by service restart")


def _cases_summary(cases_path) -> dict | None:
    if cases_path is None or not Path(cases_path).is_file():
        return None
    cases = load_cases(cases_path)
    dates = [d for series in cases.values() for d in series]
    return {"counties": len(cases),
            "first_date": min(dates).isoformat() if dates else None,
            "last_date": max(dates).isoformat() if dates else None}


def create_app(config: ServiceConfig) -> FastAPI:
    datasets = load_datasets(config.data_dir)
    model = load_model(config.model_path)
    friends, hotel, _ = load_coefficients(config.coeffs_path)
    store = JobStore(config.store_dir)
    store.recover()
    pool = ThreadPoolExecutor(max_workers=config.resolved_workers(),
                              thread_name_prefix="scenario")
    inflight: set[str] = set()
    inflight_lock = threading.Lock()

    datasets_summary = {
        "counties": len(datasets.counties),
        "block_groups": len(datasets.block_groups),
        "districts": len(set(datasets.districts.values())),
        "cases": _cases_summary(datasets.cases_path),
        "quality_warnings": list(datasets.quality_warnings),
    }

    app = FastAPI(title="stormflux", version=__version__)
    app.state.config = config
    app.state.store = store

    def _error(status: int, code: str, message: str, detail=None) -> JSONResponse:
        return JSONResponse(status_code=status,
                            content={"code": code, "message": message,
                                     "detail": detail})

    @app.exception_handler(RequestValidationError)
    def _body_error(request: Request, exc: RequestValidationError):
        return _error(400, "validation", "malformed request body",
                      detail=str(exc.errors()))

    @app.exception_handler(StormfluxError)
    def _package_error(request: Request, exc: StormfluxError):
        return JSONResponse(status_code=400, content=error_payload(exc))

    @app.exception_handler(Exception)
    def _internal_error(request: Request, exc: Exception):
        return JSONResponse(status_code=500, content=error_payload(exc))

    def _execute(job_id: str, scn: scenario_mod.Scenario) -> None:
        try:
            store.update(job_id, status=RUNNING)
            result = scenario_mod.run_scenario(scn, datasets, model,
                                               (friends, hotel))
            store.write_result(job_id,
                               scenario_mod.result_to_dict(result),
                               scenario_mod.result_to_geojson(result, datasets))
            store.update(job_id, status=DONE, finished_at=_now())
        except Exception as exc:
            store.update(job_id, status=FAILED, finished_at=_now(),
                         error=str(exc))
        finally:
            with inflight_lock:
                inflight.discard(job_id)

    @app.post("/v1/scenarios", status_code=202)
    def submit_scenario(body: dict):
        try:
            scn = scenario_mod.scenario_from_dict(body,
                                                  base_dir=config.data_dir)
        except StormfluxError as exc:
            return JSONResponse(status_code=400, content=error_payload(exc))
        with inflight_lock:
            if len(inflight) >= config.queue_limit:
                return _error(429, "queue_full",
                              f"{config.queue_limit} scenarios already queued",
                              detail={"queue_limit": config.queue_limit})
            job_id = store.create(scenario_mod.scenario_to_dict(scn))
            inflight.add(job_id)
        pool.submit(_execute, job_id, scn)
        return {"id": job_id, "status": PENDING}

    @app.get("/v1/scenarios")
    def list_scenarios():
        return {"scenarios": store.list()}

    @app.get("/v1/scenarios/{job_id}")
    def get_scenario(job_id: str):
        record = store.get(job_id)
        if record is None:
            return _error(404, "not_found", f"no scenario {job_id}")
        return record

    @app.get("/v1/scenarios/{job_id}/result")
    def get_result(job_id: str, format: str = "json"):
        if format not in ("json", "geojson"):
            return _error(400, "validation",
                          f"format must be json or geojson, got {format!r}")
        record = store.get(job_id)
        if record is None:
            return _error(404, "not_found", f"no scenario {job_id}")
        if record["status"] != DONE:
            return _error(409, "not_done",
                          f"scenario {job_id} is {record['status']}",
                          detail={"status": record["status"],
                                  "error": record["error"]})
        payload = store.result_bytes(job_id, format)
        if payload is None:
            return _error(500, "internal", "result file missing from store")
        media = "application/geo+json" if format == "geojson" else "application/json"
        return Response(content=payload, media_type=media)

    @app.delete("/v1/scenarios/{job_id}")
    def delete_scenario(job_id: str):
        record = store.get(job_id)
        if record is None:
            return _error(404, "not_found", f"no scenario {job_id}")
        if record["status"] in (PENDING, RUNNING):
            return _error(409, "not_done",
                          f"scenario {job_id} is still {record['status']}")
        store.delete(job_id)
        return {"id": job_id, "deleted": True}

    @app.get("/v1/datasets/summary")
    def get_datasets_summary():
        return datasets_summary

    @app.get("/v1/model")
    def get_model():
        return model_to_dict(model)

    if config.ui_dir is not None:
        from fastapi.staticfiles import StaticFiles

        # mounted last so /v1 routes always win
        app.mount("/", StaticFiles(directory=config.ui_dir, html=True), name="ui")

    return app
