import math

import pytest
from fastapi.testclient import TestClient

from pinchcert import __version__
from pinchcert.service.app import create_app
from pinchcert.spectra import LOG_Y_PLUS


@pytest.fixture(scope="module")
def client():
    with TestClient(create_app(), raise_server_exceptions=False) as c:
        yield c


class TestHealth:
    def test_reports_ok_and_version(self, client):
        resp = client.get("/health")
        assert resp.status_code == 200
        assert resp.json() == {"status": "ok", "version": __version__}


class TestCertifyEndpoint:
    def test_full_certificate_shape(self, client):
        resp = client.post("/certify", json={"n": 4, "budget": 512, "seed": 1})
        assert resp.status_code == 200
        doc = resp.json()
        assert doc["schema"] == "pinch-cert/1"
        assert doc["n"] == 4
        assert doc["passes"] is True
        assert doc["product"] < doc["target"]
        assert doc["runtime_ms"] > 0

    def test_rejects_non_dimension(self, client):
        resp = client.post("/certify", json={"n": 1})
        assert resp.status_code == 422

    def test_rejects_missing_body_field(self, client):
        resp = client.post("/certify", json={})
        assert resp.status_code == 422

    def test_undersized_budget_maps_to_422(self, client):
        resp = client.post("/certify", json={"n": 6, "budget": 3})
        assert resp.status_code == 422


class TestTableEndpoint:
    def test_mixed_rows(self, client):
        resp = client.post(
            "/table", json={"dims": [2, 1, 4], "budget": 512, "seed": 1}
        )
        assert resp.status_code == 200
        rows = resp.json()["rows"]
        assert [r["n"] for r in rows] == [2, 1, 4]
        assert rows[0]["passes"] is True
        assert rows[1]["error"]["stage"] == "polynomial"
        assert rows[2]["passes"] is True

    def test_even_only(self, client):
        resp = client.post(
            "/table",
            json={"dims": [2, 3, 4], "budget": 512, "seed": 1, "even_only": True},
        )
        assert [r["n"] for r in resp.json()["rows"]] == [2, 4]

    def test_empty_dims_rejected(self, client):
        resp = client.post("/table", json={"dims": []})
        assert resp.status_code == 422


class TestRootsEndpoint:
    def test_even_dimension_roots(self, client):
        resp = client.post("/roots", json={"n": 4})
        assert resp.status_code == 200
        doc = resp.json()
        assert doc["n"] == 4
        assert doc["lambda_max"] == pytest.approx(LOG_Y_PLUS / 2)
        assert doc["spectral_bound_holds"] is True
        assert doc["cross_check_mismatch"] < 1e-10
        assert len(doc["pairs"]) == 2
        for pair in doc["pairs"]:
            assert set(pair) == {"lambda", "phi"}
            assert 0 < pair["phi"] < math.pi

    def test_odd_dimension_has_real_roots(self, client):
        doc = client.post("/roots", json={"n": 5}).json()
        assert doc["spectral_bound_holds"] is False
        assert 0.0 in doc["reals"]


class TestCurvatureEndpoint:
    def test_search_result(self, client):
        resp = client.post("/curvature", json={"n": 2, "budget": 64, "seed": 0})
        assert resp.status_code == 200
        doc = resp.json()
        lam2 = LOG_Y_PLUS**2
        assert doc["max_abs"] == pytest.approx(lam2, rel=1e-9)
        assert doc["max_abs"] <= doc["analytic_bound"]
        assert len(doc["argmax_plane"]["u"]) == 3
        assert doc["samples_used"] <= 64

    def test_budget_below_seed_count_rejected(self, client):
        resp = client.post("/curvature", json={"n": 4, "budget": 1})
        assert resp.status_code == 422
