import io

import pytest
from fastapi.testclient import TestClient
from PIL import Image

from carp.service import create_app
from carp.synth import blackjack_scene, render_scene


@pytest.fixture(scope="module")
def client(model):
    return TestClient(create_app(model), raise_server_exceptions=False)


def scene_png_bytes():
    scene = render_scene(blackjack_scene(["8", "8"], ["10"], seed=4))
    buf = io.BytesIO()
    Image.fromarray(scene.image.pixels).save(buf, format="PNG")
    return buf.getvalue()


class TestRecommendEndpoint:
    def test_split_pair(self, client):
        r = client.post("/api/recommend", json={"player": ["8", "8"], "dealer": "10"})
        assert r.status_code == 200
        assert r.json() == {"move": "split", "display": "Split."}

    def test_face_cards_accepted(self, client):
        r = client.post("/api/recommend", json={"player": ["K", "6"], "dealer": "Q"})
        assert r.status_code == 200
        assert r.json()["display"] == "Hit."

    def test_short_hand_is_422(self, client):
        r = client.post("/api/recommend", json={"player": ["9"], "dealer": "5"})
        assert r.status_code == 422

    def test_malformed_inputs_are_400(self, client):
        assert client.post("/api/recommend", content=b"{not json").status_code == 400
        assert client.post("/api/recommend", json={"player": "88"}).status_code == 400
        assert client.post("/api/recommend", json={"player": ["8"], "dealer": 5}).status_code == 400
        r = client.post("/api/recommend", json={"player": ["8", "BACK"], "dealer": "5"})
        assert r.status_code == 400


class TestLabelsAndHealth:
    def test_labels(self, client):
        r = client.get("/api/labels")
        assert r.status_code == 200
        labels = r.json()["labels"]
        assert len(labels) == 14
        assert "BACK" in labels

    def test_health(self, client, model):
        r = client.get("/api/health")
        assert r.status_code == 200
        body = r.json()
        assert body["status"] == "ok"
        assert body["model"] == {"examples": model.n_examples, "k": model.k}


class TestAnalyzeEndpoint:
    def test_multipart_upload(self, client):
        r = client.post(
            "/api/analyze", files={"image": ("scene.png", scene_png_bytes(), "image/png")}
        )
        assert r.status_code == 200
        body = r.json()
        assert len(body["detections"]) == 3
        assert body["recommendation"] == {"move": "split", "display": "Split."}
        assert sorted(body["player_hand"]) == ["8", "8"]
        assert body["dealer_upcard"] == "10"

    def test_raw_body_upload(self, client):
        r = client.post(
            "/api/analyze", content=scene_png_bytes(), headers={"content-type": "image/png"}
        )
        assert r.status_code == 200
        assert len(r.json()["detections"]) == 3

    def test_undecodable_image_is_400(self, client):
        r = client.post(
            "/api/analyze", content=b"junkjunk", headers={"content-type": "image/png"}
        )
        assert r.status_code == 400

    def test_unsupported_content_type_is_400(self, client):
        r = client.post(
            "/api/analyze", content=b"x", headers={"content-type": "text/plain"}
        )
        assert r.status_code == 400


class TestStaticAssets:
    def test_static_dir_served(self, model, tmp_path):
        (tmp_path / "index.html").write_text("<html><body>table felt</body></html>")
        app = create_app(model, static_dir=tmp_path)
        client = TestClient(app)
        r = client.get("/")
        assert r.status_code == 200
        assert "table felt" in r.text
        assert client.get("/api/labels").status_code == 200
