import json

import numpy as np
import pytest

from carp.cli import main
from carp.raster import ImageRGB, save_image
from carp.synth import blackjack_scene, render_scene


@pytest.fixture(scope="module")
def advise_scene_png(tmp_path_factory):
    scene = render_scene(blackjack_scene(["A", "7"], ["BACK", "6"], seed=2))
    path = tmp_path_factory.mktemp("scenes") / "advise.png"
    save_image(scene.image, path)
    return path


@pytest.fixture(scope="module")
def blank_png(tmp_path_factory):
    img = ImageRGB(np.full((100, 140, 3), (0, 94, 48), dtype=np.uint8))
    path = tmp_path_factory.mktemp("scenes") / "blank.png"
    save_image(img, path)
    return path


class TestRecommend:
    def test_blackjack(self, capsys):
        assert main(["recommend", "--player", "A,10", "--dealer", "5"]) == 0
        assert capsys.readouterr().out.strip() == "Blackjack, you win!"

    def test_hard_eleven(self, capsys):
        assert main(["recommend", "--player", "6,5", "--dealer", "A"]) == 0
        assert capsys.readouterr().out.strip() == "Double."

    def test_face_conversion(self, capsys):
        assert main(["recommend", "--player", "Q,6", "--dealer", "10"]) == 0
        assert capsys.readouterr().out.strip() == "Hit."

    def test_invalid_token(self, capsys):
        assert main(["recommend", "--player", "A,banana", "--dealer", "5"]) == 4

    def test_short_hand(self):
        assert main(["recommend", "--player", "9", "--dealer", "5"]) == 4


class TestDetect:
    def test_json_output(self, training_dir, advise_scene_png, capsys):
        code = main(
            ["detect", str(advise_scene_png), "--train-dir", str(training_dir), "--json"]
        )
        assert code == 0
        payload = json.loads(capsys.readouterr().out)
        assert len(payload["detections"]) == 4
        labels = sorted(d["label"] for d in payload["detections"])
        assert labels == ["6", "7", "A", "BACK"]

    def test_nonexistent_image(self, training_dir, capsys):
        assert main(["detect", "/no/such/file.png", "--train-dir", str(training_dir)]) == 2
        assert "error" in capsys.readouterr().err

    def test_missing_training_dir(self, advise_scene_png):
        assert main(["detect", str(advise_scene_png), "--train-dir", "/no/such/dir"]) == 3

    def test_blank_image_zero_detections(self, training_dir, blank_png, capsys):
        assert main(["detect", str(blank_png), "--train-dir", str(training_dir)]) == 0
        assert "no cards detected" in capsys.readouterr().out

    def test_annotate_and_debug_outputs(self, training_dir, advise_scene_png, tmp_path, capsys):
        out_png = tmp_path / "annotated.png"
        debug_dir = tmp_path / "debug"
        code = main(
            [
                "detect",
                str(advise_scene_png),
                "--train-dir",
                str(training_dir),
                "--annotate",
                str(out_png),
                "--debug-dir",
                str(debug_dir),
            ]
        )
        assert code == 0
        assert out_png.exists()
        for name in ("clusters.png", "mask.png", "contours.png", "annotated.png"):
            assert (debug_dir / name).exists()
        assert list(debug_dir.glob("card_*.png")) and list(debug_dir.glob("corner_*.png"))

    def test_env_var_default(self, training_dir, blank_png, monkeypatch, capsys):
        monkeypatch.setenv("CARP_TRAIN_DIR", str(training_dir))
        assert main(["detect", str(blank_png)]) == 0


class TestAdvise:
    def test_double_scene(self, training_dir, advise_scene_png, capsys):
        code = main(["advise", str(advise_scene_png), "--train-dir", str(training_dir)])
        assert code == 0
        assert capsys.readouterr().out.strip().endswith("Double.")

    def test_single_player_card(self, training_dir, tmp_path, capsys):
        scene = render_scene(blackjack_scene(["9"], ["5"], seed=6))
        path = tmp_path / "one.png"
        save_image(scene.image, path)
        assert main(["advise", str(path), "--train-dir", str(training_dir)]) == 4
        assert "invalid hand" in capsys.readouterr().err

    def test_hidden_upcard(self, training_dir, tmp_path, capsys):
        scene = render_scene(blackjack_scene(["10", "6"], ["BACK"], seed=8))
        path = tmp_path / "hole.png"
        save_image(scene.image, path)
        assert main(["advise", str(path), "--train-dir", str(training_dir)]) == 5
        assert "upcard" in capsys.readouterr().err


class TestEval:
    def test_leave_in_patch_eval(self, training_dir, capsys):
        code = main(
            [
                "eval",
                "--train-dir",
                str(training_dir),
                "--test-dir",
                str(training_dir),
                "--k",
                "1",
            ]
        )
        assert code == 0
        table = capsys.readouterr().out
        assert "Accuracy" in table
        assert "1.00" in table

    def test_synthetic_eval_with_reports(self, training_dir, tmp_path, capsys):
        report_dir = tmp_path / "report"
        json_path = tmp_path / "report.json"
        code = main(
            [
                "eval",
                "--train-dir",
                str(training_dir),
                "--synthetic",
                "5",
                "--seed",
                "11",
                "--json",
                str(json_path),
                "--report-dir",
                str(report_dir),
            ]
        )
        assert code == 0
        assert "weighted avg" in capsys.readouterr().out
        payload = json.loads(json_path.read_text())
        assert payload["detection"]["recall"] == 1.0
        for name in ("report.txt", "report.csv", "report.json", "confusion_matrix.png"):
            assert (report_dir / name).exists()

    def test_zero_synthetic_scenes(self, training_dir):
        assert main(["eval", "--train-dir", str(training_dir), "--synthetic", "0"]) == 3


class TestSynthCommands:
    def test_synth_writes_scenes(self, tmp_path, capsys):
        out = tmp_path / "scenes"
        assert main(["synth", str(out), "--count", "2", "--seed", "5"]) == 0
        assert len(list(out.glob("*.png"))) == 2
        sidecar = json.loads((out / "scene_0000.json").read_text())
        assert "cards" in sidecar

    def test_synth_train_writes_corpus(self, tmp_path, capsys):
        out = tmp_path / "train"
        code = main(["synth-train", str(out), "--seed", "1", "--widths", "98", "--angles", "0"])
        assert code == 0
        dirs = sorted(p.name for p in out.iterdir())
        assert dirs[0] == "00-2"
        assert any(name.endswith("-BACK") for name in dirs)
        assert len(list(out.glob("*/*.png"))) == 14
