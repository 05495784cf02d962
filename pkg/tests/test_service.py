"""
Tests for the HTTP service.
"""
import inspect

import pytest
from fastapi.testclient import TestClient

from plancherel_stein import main
from plancherel_stein.config import Config
from plancherel_stein.main import app
from plancherel_stein.storage import ReportStorage


@pytest.fixture
def client(tmp_path, monkeypatch):
    """Create test client backed by a fresh report archive."""
    monkeypatch.setattr(main, "storage", ReportStorage(str(tmp_path / "reports.db")))
    return TestClient(app)


def test_liveness(client):
    response = client.get("/health/live")
    assert response.status_code == 200
    assert response.json()["status"] == "ok"


def test_readiness(client):
    response = client.get("/health/ready")
    assert response.status_code == 200
    assert response.json()["database"] == "connected"


def test_run_id_header(client):
    """Every response carries the run id it was logged under."""
    response = client.get("/health/live")
    assert len(response.headers["X-Run-ID"]) == 12


def test_plancherel(client):
    response = client.get("/plancherel/3")
    assert response.status_code == 200
    states = response.json()["states"]
    assert [s["partition"] for s in states] == ["[3]", "[2,1]", "[1,1,1]"]
    assert [s["probability"] for s in states] == ["1/6", "2/3", "1/6"]


def test_plancherel_errors(client):
    """Negative n is a bad request, huge n exceeds the enumeration cap."""
    assert client.get("/plancherel/-1").status_code == 400
    response = client.get("/plancherel/99")
    assert response.status_code == 413
    assert response.json()["cap"] == 40


def test_characters(client):
    response = client.get("/characters/3")
    assert response.status_code == 200
    data = response.json()
    assert data["irreducibles"] == ["[3]", "[2,1]", "[1,1,1]"]
    assert data["table"] == [["1", "1", "1"], ["-1", "0", "2"], ["1", "-1", "1"]]
    assert client.get("/characters/0").status_code == 400
    assert client.get("/characters/13").status_code == 413


def test_chain_matrix(client):
    response = client.get("/chains/updown/2")
    assert response.status_code == 200
    assert response.json()["entries"] == [["2/3", "1/3"], ["1/3", "2/3"]]


def test_chain_spectrum(client):
    response = client.get("/chains/downup/5", params={"spectrum": "true"})
    assert response.status_code == 200
    spectrum = response.json()["spectrum"]
    assert spectrum["valid"] is True
    assert spectrum["beta"] == "3/5"
    assert spectrum["rank"] == 7


def test_chain_errors(client):
    assert client.get("/chains/downup/3", params={"k": 5}).status_code == 400
    assert client.get("/chains/kingman/13").status_code == 413
    assert client.get("/chains/sideways/3").status_code == 422
    assert client.get("/chains/kingman/4", params={"spectrum": "true"}).status_code == 400


def test_tensor(client):
    response = client.get("/tensor/3", params={"k": 1, "r": 2})
    assert response.status_code == 200
    rows = {row["partition"]: row["multiplicity"] for row in response.json()["results"]["rows"]}
    assert rows == {"[3]": "2", "[2,1]": "3", "[1,1,1]": "1"}

    small = client.get("/tensor/2", params={"k": 1, "r": 3}).json()
    assert small["multiplicities"] == {"[2]": "4", "[1,1]": "4"}


def test_clt_is_archived_once(client):
    """Rerunning the same seeded experiment is recognised as a duplicate."""
    body = {"n": 12, "count": 200, "seed": 5}
    first = client.post("/experiments/clt", json=body)
    assert first.status_code == 200
    assert first.json()["stored"] is True
    second = client.post("/experiments/clt", json=body)
    assert second.json()["stored"] is False
    assert second.json()["report_key"] == first.json()["report_key"]
    assert second.json()["report"] == first.json()["report"]


def test_clt_archive_key_includes_chunk_size(client, monkeypatch):
    """The same body under another chunk size is a new experiment."""
    body = {"n": 12, "count": 200, "seed": 5}
    monkeypatch.setattr(Config, "CHUNK_SIZE", 64)
    first = client.post("/experiments/clt", json=body).json()
    assert first["report"]["chunk_size"] == 64
    monkeypatch.setattr(Config, "CHUNK_SIZE", 50)
    second = client.post("/experiments/clt", json=body).json()
    assert second["stored"] is True
    assert second["report_key"] != first["report_key"]
    stored = client.get(f"/reports/{second['report_key']}").json()
    assert stored["payload"]["parameters"]["chunk_size"] == 50


def test_compute_endpoints_run_in_threadpool():
    """Compute handlers are plain functions, so they never block the event loop."""
    for handler in (
        main.plancherel_endpoint,
        main.characters_endpoint,
        main.chains_endpoint,
        main.tensor_endpoint,
        main.clt_endpoint,
    ):
        assert not inspect.iscoroutinefunction(handler), handler.__name__


def test_clt_validation(client):
    assert client.post("/experiments/clt", json={"n": 1}).status_code == 422
    assert client.post("/experiments/clt", json={"n": 8, "count": 0}).status_code == 422


def test_reports(client):
    client.post("/experiments/clt", json={"n": 10, "count": 100, "seed": 1})
    client.post("/experiments/clt", json={"n": 10, "count": 100, "seed": 2})

    listing = client.get("/reports").json()
    assert listing["total"] == 2
    assert [r["seed"] for r in listing["data"]] == [1, 2]
    assert client.get("/reports", params={"command": "tensor"}).json()["total"] == 0
    assert client.get("/reports", params={"limit": 1, "offset": 1}).json()["data"][0]["seed"] == 2

    key = listing["data"][0]["report_key"]
    single = client.get(f"/reports/{key}")
    assert single.status_code == 200
    assert single.json()["payload"]["command"] == "clt"
    assert client.get("/reports/missing").status_code == 404


def test_report_stats(client):
    empty = client.get("/reports/stats").json()
    assert empty["total_reports"] == 0
    assert empty["first_report_at"] is None

    client.post("/experiments/clt", json={"n": 10, "count": 100, "seed": 3})
    stats = client.get("/reports/stats").json()
    assert stats["total_reports"] == 1
    assert stats["failed_reports"] == 0
    assert stats["per_command"] == [{"command": "clt", "count": 1, "failed": 0}]


def test_metrics(client):
    client.get("/health/live")
    response = client.get("/metrics")
    assert response.status_code == 200
    assert "http_requests_total" in response.text


def test_root(client):
    data = client.get("/").json()
    assert "clt" in data["endpoints"]
