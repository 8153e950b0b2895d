import json
import socket
import threading
import time

import httpx
import numpy as np
import pytest
from fastapi.testclient import TestClient

from ferrosim.harness import run_path_trial
from ferrosim.paths import DATA_DIR, preset_path
from ferrosim.plant import PlantParams
from ferrosim.service import create_app


@pytest.fixture()
def client():
    app = create_app()
    with TestClient(app) as c:
        yield c
    app.state.manager.stop_all()


def make_turbo(client, **overrides):
    body = {"turbo": True, "plant": {"drift_rms": 0.0, "lag_tau": 0.0}}
    body.update(overrides)
    r = client.post("/sessions", json=body)
    assert r.status_code == 200
    return r.json()["id"]


class TestSessionLifecycle:
    def test_create_default(self, client):
        r = client.post("/sessions", json={})
        assert r.status_code == 200
        assert "id" in r.json()

    def test_two_creates_distinct_ids(self, client):
        a = client.post("/sessions", json={"turbo": True}).json()["id"]
        b = client.post("/sessions", json={"turbo": True}).json()["id"]
        assert a != b

    def test_malformed_config_rejected(self, client):
        r = client.post("/sessions", json={"current_a": "not a number"})
        assert 400 <= r.status_code < 500

    def test_unknown_gain_preset_rejected(self, client):
        r = client.post("/sessions", json={"preset": "nope"})
        assert r.status_code == 400

    def test_unknown_session_404(self, client):
        assert client.get("/sessions/deadbeef/state").status_code == 404
        assert client.post("/sessions/deadbeef/pause").status_code == 404

    def test_state_snapshot(self, client):
        sid = make_turbo(client, start=(0.25, -0.5))
        state = client.get(f"/sessions/{sid}/state").json()
        assert state["tick"] == 0
        assert state["x_mm"] == 0.25
        assert state["mode"] == "idle"


class TestCommands:
    def test_target_outside_workspace_rejected(self, client):
        sid = make_turbo(client)
        r = client.post(f"/sessions/{sid}/target", json={"x_mm": 9.0, "y_mm": 0.0})
        assert r.status_code == 400
        state = client.get(f"/sessions/{sid}/state").json()
        assert state["mode"] == "idle"  # unchanged

    def test_target_and_run_to_hold(self, client):
        sid = make_turbo(client)
        client.post(f"/sessions/{sid}/target", json={"x_mm": 1.0, "y_mm": 0.0})
        r = client.post(f"/sessions/{sid}/run", json={"ticks": 300})
        assert r.status_code == 200
        state = client.get(f"/sessions/{sid}/state").json()
        assert state["mode"] == "hold"
        assert state["err_mm"] < 0.1

    def test_current_override_changes_behaviour(self, client):
        def distance_after(current):
            sid = make_turbo(client, current_a=current, start=(-2.0, 0.0))
            client.post(f"/sessions/{sid}/target", json={"x_mm": 2.0, "y_mm": 0.0})
            client.post(f"/sessions/{sid}/run", json={"ticks": 30})
            state = client.get(f"/sessions/{sid}/state").json()
            return state["x_mm"]

        assert distance_after(1.43) > distance_after(0.95)

    def test_bad_path_rejected(self, client):
        sid = make_turbo(client)
        r = client.post(f"/sessions/{sid}/path", json={"points": [[0, 0]]})
        assert r.status_code == 400
        r = client.post(f"/sessions/{sid}/path", json={"points": [[0, 0], [9, 0]]})
        assert r.status_code == 400

    def test_preset_path_accepted(self, client):
        sid = make_turbo(client)
        r = client.post(f"/sessions/{sid}/path", json={"preset": "circle"})
        assert r.status_code == 200
        assert r.json()["n_samples"] == len(preset_path("circle").samples)

    def test_pause_resume(self, client):
        sid = make_turbo(client)
        client.post(f"/sessions/{sid}/path", json={"preset": "line"})
        client.post(f"/sessions/{sid}/run", json={"ticks": 5})
        client.post(f"/sessions/{sid}/pause")
        client.post(f"/sessions/{sid}/run", json={"ticks": 5})
        state = client.get(f"/sessions/{sid}/state").json()
        assert state["pattern"] == 0
        client.post(f"/sessions/{sid}/resume")
        client.post(f"/sessions/{sid}/run", json={"ticks": 5})
        assert client.get(f"/sessions/{sid}/state").json()["pattern"] != 0

    def test_reset_restores_start(self, client):
        sid = make_turbo(client, start=(1.0, 1.0))
        client.post(f"/sessions/{sid}/target", json={"x_mm": 0.0, "y_mm": 0.0})
        client.post(f"/sessions/{sid}/run", json={"ticks": 50})
        client.post(f"/sessions/{sid}/reset")
        state = client.get(f"/sessions/{sid}/state").json()
        assert (state["x_mm"], state["y_mm"]) == (1.0, 1.0)
        assert state["mode"] == "idle"

    def test_params_update(self, client):
        sid = make_turbo(client)
        r = client.post(
            f"/sessions/{sid}/params",
            json={"current_a": 0.95, "preset": "fig2d", "weights": {"gamma": 0.001}},
        )
        assert r.status_code == 200
        r = client.post(f"/sessions/{sid}/params", json={"preset": "bogus"})
        assert r.status_code == 400

    def test_mid_path_current_change_keeps_path(self, client):
        sid = make_turbo(client)
        client.post(f"/sessions/{sid}/path", json={"preset": "line"})
        client.post(f"/sessions/{sid}/run", json={"ticks": 30})
        before = client.get(f"/sessions/{sid}/state").json()
        client.post(f"/sessions/{sid}/params", json={"current_a": 0.48})
        client.post(f"/sessions/{sid}/run", json={"ticks": 30})
        after = client.get(f"/sessions/{sid}/state").json()
        assert after["mode"] == "follow_path"  # no path reset
        assert after["x_mm"] > before["x_mm"]  # still progressing, just slower

    def test_config_endpoint(self, client):
        sid = make_turbo(client, current_a=1.19)
        cfg = client.get(f"/sessions/{sid}/config").json()
        assert cfg["workspace_radius_mm"] == 4.0
        assert cfg["current_a"] == 1.19
        assert len(cfg["solenoids"]) == 8
        assert cfg["solenoids"][2]["angle_deg"] == pytest.approx(90.0)


class TestHarnessEquivalence:
    def test_service_run_matches_harness_log(self, client):
        """The service is a thin host: identical seed and config give the
        identical position sequence the batch harness produces."""
        path = preset_path("line")
        params = PlantParams(seed=77)
        harness_log = run_path_trial(path, plant_params=params)

        sid = client.post(
            "/sessions",
            json={
                "turbo": True,
                "seed": 77,
                "start": [float(path.samples[0][0]), float(path.samples[0][1])],
            },
        ).json()["id"]
        client.post(f"/sessions/{sid}/path", json={"preset": "line"})
        client.post(f"/sessions/{sid}/run", json={"until_done": True, "max_ticks": 4000})
        csv_text = client.get(f"/sessions/{sid}/log.csv").text

        lines = csv_text.strip().splitlines()
        assert lines[0] == "t_s,x_mm,y_mm,tx_mm,ty_mm,pattern,err_mm"
        got = np.array(
            [[float(line.split(",")[1]), float(line.split(",")[2])] for line in lines[1:]]
        )
        np.testing.assert_array_equal(got[: len(harness_log.pos)], harness_log.pos)

    def test_service_csv_deterministic(self, client):
        def one_run():
            sid = client.post("/sessions", json={"turbo": True, "seed": 3}).json()["id"]
            client.post(f"/sessions/{sid}/path", json={"preset": "circle"})
            client.post(f"/sessions/{sid}/run", json={"ticks": 200})
            return client.get(f"/sessions/{sid}/log.csv").text

        assert one_run() == one_run()


class TestPathFiles:
    def test_preset_listing(self, client):
        names = client.get("/paths").json()["presets"]
        assert "circle" in names and "aalto_t" in names

    def test_serves_shared_files_verbatim(self, client):
        raw = client.get("/paths/circle.json")
        assert raw.status_code == 200
        assert raw.content == (DATA_DIR / "circle.json").read_bytes()

    def test_unknown_path_404(self, client):
        assert client.get("/paths/bogus.json").status_code == 404


def _free_port() -> int:
    with socket.socket() as sock:
        sock.bind(("127.0.0.1", 0))
        return sock.getsockname()[1]


@pytest.fixture(scope="module")
def live_server():
    import uvicorn

    app = create_app()
    port = _free_port()
    config = uvicorn.Config(app, host="127.0.0.1", port=port, log_level="error")
    server = uvicorn.Server(config)
    thread = threading.Thread(target=server.run, daemon=True)
    thread.start()
    deadline = time.time() + 10
    while not server.started:
        if time.time() > deadline:
            raise RuntimeError("server did not start")
        time.sleep(0.02)
    yield f"http://127.0.0.1:{port}"
    server.should_exit = True
    thread.join(timeout=5)
    app.state.manager.stop_all()


@pytest.mark.slow
class TestStreaming:
    def test_stream_rate_and_latest_wins(self, live_server):
        sid = httpx.post(f"{live_server}/sessions", json={}, timeout=5).json()["id"]
        window = 2.0
        count = 0
        ticks = []
        with httpx.stream(
            "GET", f"{live_server}/sessions/{sid}/stream", timeout=10
        ) as response:
            start = time.monotonic()
            for line in response.iter_lines():
                if not line:
                    continue
                ticks.append(json.loads(line)["tick"])
                count += 1
                if time.monotonic() - start > window:
                    break
        rate = count / window
        assert 25.0 <= rate <= 35.0
        assert all(a < b for a, b in zip(ticks, ticks[1:]))  # monotone, no repeats
        httpx.delete(f"{live_server}/sessions/{sid}", timeout=5)

    def test_two_consumers_see_consistent_ticks(self, live_server):
        sid = httpx.post(f"{live_server}/sessions", json={}, timeout=5).json()["id"]

        def consume(out):
            with httpx.stream(
                "GET", f"{live_server}/sessions/{sid}/stream", timeout=10
            ) as response:
                start = time.monotonic()
                for line in response.iter_lines():
                    if line:
                        out.append(json.loads(line)["tick"])
                    if time.monotonic() - start > 1.0:
                        return

        a: list = []
        b: list = []
        threads = [threading.Thread(target=consume, args=(x,)) for x in (a, b)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        shared = set(a) & set(b)
        assert len(shared) >= 10  # both observed the same tick sequence
        httpx.delete(f"{live_server}/sessions/{sid}", timeout=5)

    def test_tick_cadence_independent_of_consumers(self, live_server):
        def ticks_after(consumers, seconds=1.5):
            sid = httpx.post(f"{live_server}/sessions", json={}, timeout=5).json()["id"]
            stop = threading.Event()

            def consume():
                try:
                    with httpx.stream(
                        "GET", f"{live_server}/sessions/{sid}/stream", timeout=10
                    ) as response:
                        for _ in response.iter_lines():
                            if stop.is_set():
                                return
                except httpx.HTTPError:
                    pass

            threads = [threading.Thread(target=consume, daemon=True) for _ in range(consumers)]
            for t in threads:
                t.start()
            time.sleep(seconds)
            n = httpx.get(f"{live_server}/sessions/{sid}/state", timeout=5).json()["tick"]
            stop.set()
            httpx.delete(f"{live_server}/sessions/{sid}", timeout=5)
            return n

        quiet = ticks_after(0)
        busy = ticks_after(10)
        assert abs(quiet - busy) <= 5  # scheduling slack on a loaded box
