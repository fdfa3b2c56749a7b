"""HTTP API: job lifecycle, error mapping, persistence across restarts."""

import json
import time

import pytest
from fastapi.testclient import TestClient

from conftest import TOY_SCENARIO, write_toy_tree
from stormflux.service import JobStore, ServiceConfig, create_app


def make_config(tmp_path, **overrides):
    root = write_toy_tree(tmp_path / "toy")
    kwargs = dict(data_dir=str(root / "data"),
                  model_path=str(root / "model.json"),
                  coeffs_path=str(root / "coeffs.json"),
                  store_dir=str(tmp_path / "store"),
                  workers=2)
    kwargs.update(overrides)
    return ServiceConfig(**kwargs)


@pytest.fixture()
def client(tmp_path):
    app = create_app(make_config(tmp_path))
    with TestClient(app) as c:
        yield c


def wait_until_settled(client, job_id, timeout=30.0):
    deadline = time.monotonic() + timeout
    while time.monotonic() < deadline:
        record = client.get(f"/v1/scenarios/{job_id}").json()
        if record["status"] in ("done", "failed"):
            return record
        time.sleep(0.02)
    raise AssertionError(f"job {job_id} never settled")


class TestJobLifecycle:
    def test_submit_poll_fetch(self, client):
        res = client.post("/v1/scenarios", json=TOY_SCENARIO)
        assert res.status_code == 202
        job_id = res.json()["id"]
        assert res.json()["status"] == "pending"

        record = wait_until_settled(client, job_id)
        assert record["status"] == "done", record["error"]
        assert record["finished_at"] is not None
        assert record["scenario"]["name"] == "toy"

        result = client.get(f"/v1/scenarios/{job_id}/result")
        assert result.status_code == 200
        assert result.headers["content-type"].startswith("application/json")
        doc = result.json()
        assert doc["scenario"] == "toy"
        assert len(doc["counties"]) == 3

        # results are written once; refetching returns the same bytes
        again = client.get(f"/v1/scenarios/{job_id}/result")
        assert again.content == result.content

    def test_geojson_result(self, client):
        job_id = client.post("/v1/scenarios", json=TOY_SCENARIO).json()["id"]
        wait_until_settled(client, job_id)
        res = client.get(f"/v1/scenarios/{job_id}/result",
                         params={"format": "geojson"})
        assert res.status_code == 200
        assert res.headers["content-type"].startswith("application/geo+json")
        doc = json.loads(res.content)
        assert doc["type"] == "FeatureCollection"
        assert len(doc["features"]) == 3

    def test_bad_result_format(self, client):
        job_id = client.post("/v1/scenarios", json=TOY_SCENARIO).json()["id"]
        wait_until_settled(client, job_id)
        res = client.get(f"/v1/scenarios/{job_id}/result",
                         params={"format": "xml"})
        assert res.status_code == 400

    def test_list_and_delete(self, client):
        job_id = client.post("/v1/scenarios", json=TOY_SCENARIO).json()["id"]
        wait_until_settled(client, job_id)
        listing = client.get("/v1/scenarios").json()["scenarios"]
        assert any(r["id"] == job_id for r in listing)

        assert client.delete(f"/v1/scenarios/{job_id}").json()["deleted"] is True
        assert client.get(f"/v1/scenarios/{job_id}").status_code == 404
        assert client.delete(f"/v1/scenarios/{job_id}").status_code == 404

    def test_unknown_job_is_404(self, client):
        assert client.get("/v1/scenarios/deadbeef").status_code == 404
        assert client.get("/v1/scenarios/deadbeef/result").status_code == 404

    def test_failing_scenario_records_error(self, client):
        body = dict(TOY_SCENARIO, mandatory=["01001", "99999"])
        job_id = client.post("/v1/scenarios", json=body).json()["id"]
        record = wait_until_settled(client, job_id)
        assert record["status"] == "failed"
        assert "99999" in record["error"]
        res = client.get(f"/v1/scenarios/{job_id}/result")
        assert res.status_code == 409
        assert res.json()["detail"]["status"] == "failed"


class TestResultGate:
    def test_result_before_done_is_409(self, client):
        # a record created directly in the store never reaches the pool,
        # so it stays pending
        store = client.app.state.store
        job_id = store.create({"name": "stuck"})
        res = client.get(f"/v1/scenarios/{job_id}/result")
        assert res.status_code == 409
        assert res.json()["code"] == "not_done"

    def test_delete_while_pending_is_409(self, client):
        store = client.app.state.store
        job_id = store.create({"name": "stuck"})
        assert client.delete(f"/v1/scenarios/{job_id}").status_code == 409


class TestSubmissionErrors:
    def test_overlapping_orders_rejected(self, client):
        body = dict(TOY_SCENARIO, voluntary=["01001"])
        res = client.post("/v1/scenarios", json=body)
        assert res.status_code == 400
        assert res.json()["code"] == "validation"

    def test_missing_keys_rejected(self, client):
        res = client.post("/v1/scenarios", json={"name": "x"})
        assert res.status_code == 400

    def test_non_object_body_rejected(self, client):
        res = client.post("/v1/scenarios", json=[1, 2, 3])
        assert res.status_code == 400
        assert res.json()["code"] == "validation"

    def test_queue_limit_returns_429(self, tmp_path):
        app = create_app(make_config(tmp_path, queue_limit=0))
        with TestClient(app) as c:
            res = c.post("/v1/scenarios", json=TOY_SCENARIO)
            assert res.status_code == 429
            assert res.json()["code"] == "queue_full"


class TestPersistence:
    def test_restart_marks_interrupted_jobs_failed(self, tmp_path):
        config = make_config(tmp_path)
        stale = JobStore(config.store_dir)
        job_id = stale.create({"name": "interrupted"})
        assert stale.get(job_id)["status"] == "pending"

        app = create_app(config)
        with TestClient(app) as c:
            record = c.get(f"/v1/scenarios/{job_id}").json()
            assert record["status"] == "failed"
            assert "restart" in record["error"]

    def test_results_survive_restart(self, tmp_path):
        config = make_config(tmp_path)
        with TestClient(create_app(config)) as c:
            job_id = c.post("/v1/scenarios", json=TOY_SCENARIO).json()["id"]
            wait_until_settled(c, job_id)
            first = c.get(f"/v1/scenarios/{job_id}/result").content

        with TestClient(create_app(config)) as c:
            record = c.get(f"/v1/scenarios/{job_id}").json()
            assert record["status"] == "done"
            assert c.get(f"/v1/scenarios/{job_id}/result").content == first

    def test_store_has_no_leftover_tmp_files(self, client):
        job_id = client.post("/v1/scenarios", json=TOY_SCENARIO).json()["id"]
        wait_until_settled(client, job_id)
        store = client.app.state.store
        leftovers = list(store.root.rglob("*.tmp"))
        assert leftovers == []


class TestJobStoreUnit:
    def test_update_unknown_id(self, tmp_path):
        store = JobStore(tmp_path / "store")
        with pytest.raises(KeyError):
            store.update("missing", status="done")

    def test_delete_unknown_id(self, tmp_path):
        store = JobStore(tmp_path / "store")
        assert store.delete("missing") is False

    def test_list_sorted_by_creation(self, tmp_path):
        store = JobStore(tmp_path / "store")
        ids = [store.create({"n": i}) for i in range(3)]
        listed = [r["id"] for r in store.list()]
        assert sorted(listed) == sorted(ids)


class TestReadEndpoints:
    def test_datasets_summary(self, client):
        doc = client.get("/v1/datasets/summary").json()
        assert doc["counties"] == 3
        assert doc["block_groups"] == 5
        assert doc["districts"] == 3
        assert doc["cases"]["counties"] == 3
        assert doc["cases"]["last_date"] == "2020-08-26"

    def test_model_endpoint(self, client):
        doc = client.get("/v1/model").json()
        assert doc["alpha"] == -1.0
        assert doc["lambda"] == 15.0
        assert len(doc["beta_zone"]) == 6

    def test_state_exposes_config_and_store(self, client):
        assert client.app.state.config.workers == 2
        assert client.app.state.store.root.is_dir()

    def test_optional_ui_mount(self, tmp_path):
        ui = tmp_path / "ui"
        ui.mkdir()
        (ui / "index.html").write_text("<!doctype html><title>planner</title>")
        app = create_app(make_config(tmp_path, ui_dir=str(ui)))
        with TestClient(app) as c:
            assert "planner" in c.get("/").text
            assert c.get("/v1/model").status_code == 200

    def test_no_ui_mount_by_default(self, client):
        assert client.get("/").status_code == 404
