"""Train the bundled reference SVR quality model.

Usage: PYTHONPATH=build/python_stage python3 tools/make_reference_svr.py

Features come from the compiled extension, so the model always matches the C++
feature extractor. Targets are synthetic opinion scores that grow with the
amount of noise or blur applied to the training tiles.
"""

import argparse
from pathlib import Path

import numpy as np
from sklearn.svm import SVR

import cootmv

ROOT = Path(__file__).resolve().parent.parent
NOISE = (0.0, 5.0, 10.0, 20.0, 30.0)
BLUR = (1.0, 2.0, 3.0)


def gaussian_blur(a, sigma):
    radius = int(3 * sigma + 0.5)
    x = np.arange(-radius, radius + 1)
    k = np.exp(-(x * x) / (2 * sigma * sigma))
    k /= k.sum()
    p = np.pad(a.astype(np.float64), radius, mode="symmetric")
    p = np.apply_along_axis(lambda r: np.convolve(r, k, mode="valid"), 1, p)
    p = np.apply_along_axis(lambda c: np.convolve(c, k, mode="valid"), 0, p)
    return p


def to_image(a):
    return cootmv.GrayImage(np.clip(np.floor(a + 0.5), 0, 255).astype(np.uint8))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--corpus", default=ROOT / "tests/data/corpus/train", type=Path)
    ap.add_argument("--out", default=ROOT / "models/reference_svr.txt", type=Path)
    ap.add_argument("--seed", default=7, type=int)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    feats, targets = [], []
    for path in sorted(args.corpus.glob("*.png")):
        base = cootmv.load_image(str(path)).to_numpy().astype(np.float64)
        for s in NOISE:
            noisy = base + rng.normal(0.0, s, base.shape) if s > 0 else base
            feats.append(cootmv.brisque_features(to_image(noisy)))
            targets.append(10.0 + 2.0 * s)
        for b in BLUR:
            feats.append(cootmv.brisque_features(to_image(gaussian_blur(base, b))))
            targets.append(10.0 + 20.0 * b)

    x = np.asarray(feats)
    y = np.asarray(targets)
    lo, hi = x.min(axis=0), x.max(axis=0)
    span = np.where(hi > lo, hi - lo, 1.0)
    xs = np.where(hi > lo, 2.0 * (x - lo) / span - 1.0, 0.0)

    gamma = 1.0 / x.shape[1]
    svr = SVR(kernel="rbf", gamma=gamma, C=100.0, epsilon=1.0).fit(xs, y)
    pred = svr.predict(xs)
    print(f"{len(y)} samples, {len(svr.support_)} support vectors, "
          f"train RMSE {np.sqrt(np.mean((pred - y) ** 2)):.3f}")

    with open(args.out, "w") as f:
        f.write("svrmodel v1\n")
        f.write(f"gamma {gamma!r}\n")
        f.write(f"bias {float(svr.intercept_[0])!r}\n")
        f.write("range 0.5 100\n")
        f.write("scale " + " ".join(f"{float(a)!r} {float(b)!r}" for a, b in zip(lo, hi)) + "\n")
        for sv, c in zip(svr.support_vectors_, svr.dual_coef_[0]):
            f.write(" ".join(repr(float(v)) for v in sv) + f" {float(c)!r}\n")

    model = cootmv.load_svr_model(str(args.out))
    check = [cootmv.brisque_score(to_image(x_img), model) for x_img in
             (base, base + rng.normal(0.0, 20.0, base.shape), gaussian_blur(base, 2.0))]
    print("clean / noisy / blurred:", ", ".join(f"{v:.2f}" for v in check))


if __name__ == "__main__":
    main()
