"""HTTP endpoints: payload contracts, validation statuses, CORS, statics."""

import json
import urllib.error
import urllib.request

import numpy as np
import pytest

from cumlink.links import logit, probit
from cumlink.serve import forward_response, serve_in_thread
from cumlink.simulate import ForwardModel, forward_probabilities


@pytest.fixture(scope="module")
def server(tmp_path_factory):
    static = tmp_path_factory.mktemp("static")
    (static / "index.html").write_text("<title>explorer</title>", "utf-8")
    (static / "app.js").write_text("export {};", "utf-8")
    secret = tmp_path_factory.mktemp("outside") / "secret.txt"
    secret.write_text("keep out", "utf-8")
    model = {"format_version": 1, "kind": "clm", "link": "probit"}
    srv, thread = serve_in_thread(model_doc=model, static_dir=str(static))
    base = f"http://127.0.0.1:{srv.server_address[1]}"
    yield base
    srv.shutdown()
    srv.server_close()


def request(base, path, body=None, method=None, headers=None):
    data = None if body is None else json.dumps(body).encode("utf-8")
    req = urllib.request.Request(
        base + path,
        data=data,
        method=method or ("POST" if body is not None else "GET"),
        headers={"Content-Type": "application/json", **(headers or {})},
    )
    try:
        with urllib.request.urlopen(req, timeout=5) as resp:
            return resp.status, dict(resp.headers), resp.read()
    except urllib.error.HTTPError as exc:
        return exc.code, dict(exc.headers), exc.read()


def body_json(payload):
    return json.loads(payload.decode("utf-8"))


def test_health(server):
    status, headers, payload = request(server, "/health")
    assert status == 200
    assert headers["Content-Type"] == "application/json"
    doc = body_json(payload)
    assert doc["status"] == "ok"
    assert doc["version"]


def test_forward_reproduces_reference_proportions(server):
    status, _, payload = request(
        server,
        "/forward",
        {"tau": [-1.2816, -0.6745], "shift": 0, "scale": 1, "link": "probit"},
    )
    assert status == 200
    probs = body_json(payload)["probs"]
    assert np.allclose(probs, [0.10, 0.15, 0.75], atol=1e-4)
    assert sum(probs) == pytest.approx(1.0, abs=1e-12)


def test_forward_single_threshold_symmetry(server):
    status, _, payload = request(server, "/forward", {"tau": [0]})
    assert status == 200
    assert body_json(payload)["probs"] == pytest.approx([0.5, 0.5])


def test_forward_equals_the_library_exactly(server):
    # same code path as forward_probabilities: equality is bitwise
    cases = [
        ([-1.1, 0.2, 0.9], 0.35, 1.4, "logit", logit),
        ([-0.4, 0.1], -1.2, 0.7, "probit", probit),
    ]
    for tau, shift, scale, name, link in cases:
        _, _, payload = request(
            server,
            "/forward",
            {"tau": tau, "shift": shift, "scale": scale, "link": name},
        )
        got = body_json(payload)["probs"]
        want = forward_probabilities(
            ForwardModel(cutpoints=tau, shift=shift, scale=scale, link=link)
        )
        assert got == [float(p) for p in want]


def test_forward_validation_statuses(server):
    status, _, payload = request(server, "/forward", {"tau": [0.5, -0.5]})
    assert status == 422
    doc = body_json(payload)
    assert doc["field"] == "tau"
    assert "increasing" in doc["error"]

    for bad, field in (
        ({}, "tau"),
        ({"tau": "no"}, "tau"),
        ({"tau": [0.0, True]}, "tau"),
        ({"tau": [0.0], "shift": "x"}, "shift"),
        ({"tau": [0.0], "scale": 0}, "scale"),
        ({"tau": [0.0], "link": "cauchit"}, "link"),
    ):
        status, _, payload = request(server, "/forward", bad)
        assert status == 400
        assert body_json(payload)["field"] == field


def test_cutpoints_endpoint_inverts_proportions(server):
    status, _, payload = request(
        server, "/cutpoints", {"props": [0.1, 0.15, 0.75]}
    )
    assert status == 200
    tau = body_json(payload)["tau"]
    assert tau == pytest.approx([-1.2815515655, -0.6744897502], abs=1e-9)

    status, _, payload = request(server, "/cutpoints", {"props": [0.5, 0.5]})
    assert body_json(payload)["tau"] == pytest.approx([0.0], abs=1e-12)

    status, _, payload = request(
        server, "/cutpoints", {"props": [0.5, 0.0, 0.5]}
    )
    assert status == 400
    assert body_json(payload)["field"] == "props"


def test_malformed_bodies_are_named(server):
    req = urllib.request.Request(
        server + "/forward",
        data=b"{broken",
        method="POST",
        headers={"Content-Type": "application/json"},
    )
    try:
        with urllib.request.urlopen(req, timeout=5) as resp:
            status, payload = resp.status, resp.read()
    except urllib.error.HTTPError as exc:
        status, payload = exc.code, exc.read()
    assert status == 400
    assert "not valid JSON" in body_json(payload)["error"]

    status, _, payload = request(server, "/forward", [1, 2])
    assert status == 400
    assert "object" in body_json(payload)["error"]

    status, _, payload = request(server, "/nope", {"tau": [0.0]})
    assert status == 404


def test_model_endpoint_returns_the_loaded_archive(server):
    status, _, payload = request(server, "/model")
    assert status == 200
    assert body_json(payload)["kind"] == "clm"


def test_model_endpoint_404_when_nothing_loaded():
    srv, _ = serve_in_thread()
    try:
        base = f"http://127.0.0.1:{srv.server_address[1]}"
        status, _, payload = request(base, "/model")
        assert status == 404
        assert "no model" in body_json(payload)["error"]
        # no static root configured either
        status, _, _ = request(base, "/anything")
        assert status == 404
    finally:
        srv.shutdown()
        srv.server_close()


def test_cors_for_local_origins_only(server):
    local = {"Origin": "http://localhost:3000"}
    status, headers, _ = request(server, "/health", headers=local)
    assert headers.get("Access-Control-Allow-Origin") == "http://localhost:3000"

    foreign = {"Origin": "https://example.com"}
    _, headers, _ = request(server, "/health", headers=foreign)
    assert "Access-Control-Allow-Origin" not in headers

    # preflight
    status, headers, _ = request(
        server, "/forward", method="OPTIONS", headers=local
    )
    assert status == 204
    assert "POST" in headers["Access-Control-Allow-Methods"]
    assert headers["Access-Control-Allow-Origin"] == "http://localhost:3000"


def test_static_files_and_traversal_guard(server):
    status, headers, payload = request(server, "/")
    assert status == 200
    assert "text/html" in headers["Content-Type"]
    assert b"explorer" in payload

    status, headers, _ = request(server, "/app.js")
    assert status == 200
    assert "javascript" in headers["Content-Type"]

    status, _, _ = request(server, "/missing.css")
    assert status == 404

    # urllib collapses "../" before sending, so splice the raw path in at
    # the socket level to prove the server-side guard fires
    import http.client

    host, port = server.replace("http://", "").split(":")
    conn = http.client.HTTPConnection(host, int(port), timeout=5)
    conn.request("GET", "/../outside/secret.txt")
    resp = conn.getresponse()
    raw = resp.read()
    assert resp.status in (403, 404)
    assert b"keep out" not in raw
    conn.close()


def test_forward_response_helper_direct():
    doc = forward_response({"tau": [-1.0, 1.0], "link": "logit"})
    want = forward_probabilities(
        ForwardModel(cutpoints=[-1.0, 1.0], link=logit)
    )
    assert doc["probs"] == [float(p) for p in want]
