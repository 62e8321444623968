import math
import os
from pathlib import Path

import numpy as np
import pytest

import cootmv

MODELS = Path(os.environ.get("COOTMV_MODEL_DIR", Path(__file__).resolve().parents[2] / "models"))
DATA = Path(os.environ.get("COOTMV_TEST_DATA", Path(__file__).resolve().parents[2] / "tests" / "data"))


@pytest.fixture(scope="module")
def niqe():
    return cootmv.load_niqe_model(str(MODELS / "reference_niqe.txt"))


@pytest.fixture(scope="module")
def svr():
    return cootmv.load_svr_model(str(MODELS / "reference_svr.txt"))


@pytest.fixture(scope="module")
def photo():
    img = cootmv.load_image(str(DATA / "corpus" / "test" / "flower_0.png"))
    return cootmv.GrayImage(np.ascontiguousarray(img.to_numpy()[40:136, 40:136]))


def test_numpy_round_trip(tmp_path):
    arr = np.arange(12, dtype=np.uint8).reshape(3, 4)
    img = cootmv.GrayImage(arr)
    assert (img.width, img.height) == (4, 3)
    np.testing.assert_array_equal(img.to_numpy(), arr)
    cootmv.save_image(img, str(tmp_path / "x.png"))
    assert cootmv.load_image(str(tmp_path / "x.png")) == img
    with pytest.raises(cootmv.Error):
        cootmv.load_image(str(tmp_path / "missing.png"))


def test_histogram_and_split():
    img = cootmv.GrayImage(np.array([[50, 200]], dtype=np.uint8))
    hist = cootmv.compute_histogram(img)
    assert len(hist) == 256 and hist[50] == 1 and hist[200] == 1
    assert cootmv.variance_split(hist) == 50
    assert cootmv.image_mean(img) == 125.0


def test_metrics():
    a = cootmv.GrayImage(np.full((8, 8), 100, dtype=np.uint8))
    b = cootmv.GrayImage(np.full((8, 8), 101, dtype=np.uint8))
    assert cootmv.ambe(a, b) == 1.0
    assert cootmv.psnr(a, b) == pytest.approx(48.1308036087, abs=1e-6)
    assert math.isinf(cootmv.psnr(a, a))
    assert cootmv.ssi(a, a) == 1.0


def test_enhancement_pipeline(photo):
    same = cootmv.mvsihe_enhance(photo, delta=0.0)
    assert same == photo
    full = cootmv.mvsihe_enhance(photo, delta=1.0).to_numpy()
    assert full.min() == 0 and full.max() == 255
    k1, k2, k3 = cootmv.mvsihe_partition(photo)
    assert k1 < k2 < k3
    for method in (cootmv.classic_he, cootmv.bbhe, cootmv.dsihe):
        assert method(photo).to_numpy().shape == (96, 96)


def test_quality_scores(photo, niqe, svr):
    assert len(cootmv.brisque_features(photo)) == 36
    assert math.isfinite(cootmv.brisque_score(photo, svr))
    assert cootmv.niqe_score(photo, niqe) > 0


def test_coot_minimize_sphere():
    result = cootmv.coot_minimize(lambda x: sum(v * v for v in x), [-10.0] * 4, [10.0] * 4, max_iters=60, seed=3)
    trace = result["trace"]
    assert len(trace) == 60
    assert all(b <= a for a, b in zip(trace, trace[1:]))
    assert result["best_fitness"] == pytest.approx(sum(v * v for v in result["best_position"]))
    assert result["best_fitness"] < 1.0


def test_enhance_is_seeded(photo, niqe, svr):
    first = cootmv.enhance(photo, niqe, svr, max_iters=3, seed=11)
    second = cootmv.enhance(photo, niqe, svr, max_iters=3, seed=11)
    assert first["image"] == second["image"]
    assert first["trace"] == second["trace"]
    assert 0.0 <= first["delta"] <= 1.0
