#!/usr/bin/env python3
"""Regenerates the synthetic files under data/.

Nothing here is measured: the power model, images and k targets are all
made up so the tools can be exercised end to end.

usage: make_synthetic_data.py BUILD_DIR [--seed N]
"""

import argparse
import json
import math
import pathlib
import subprocess
import sys

import numpy as np

ROOT = pathlib.Path(__file__).resolve().parent.parent
DATA = ROOT / "data"

# Watts per pixel at full drive is roughly 0.5*alpha + beta + gamma.
MODEL = {
    "alpha": (1.8e-7, 1.5e-7, 2.4e-7),
    "beta": (1.0e-8, 0.8e-8, 1.2e-8),
    "gamma": 2.0e-9,
}


def model_json():
    channels = {}
    for i, name in enumerate(("c0", "c1", "c2")):
        channels[name] = {
            "alpha": MODEL["alpha"][i],
            "beta": MODEL["beta"][i],
            "gamma": MODEL["gamma"],
        }
    return {
        "format": "wattcolor.power_model",
        "version": 1,
        "space": "srgb",
        "channels": channels,
        "rescale": {"offset": [0.0, 0.0, 0.0], "scale": [1.0, 1.0, 1.0]},
        "provenance": "synthetic quadratic-dominant example; not measured on any display",
    }


def calibration_rows():
    rows = ["channel,code,power_w"]
    for i, ch in enumerate("rgb"):
        a, b, g = MODEL["alpha"][i], MODEL["beta"][i], MODEL["gamma"]
        for code in range(0, 256, 15):
            v = code / 255.0
            rows.append(f"{ch},{code},{repr(0.5 * a * v * v + b * v + g)}")
    return rows


def make_image(rng, w=48, h=32):
    """Smooth two-color gradient plus a few flat blobs."""
    yy, xx = np.mgrid[0:h, 0:w].astype(float)
    c0, c1 = rng.uniform(0, 1, 3), rng.uniform(0, 1, 3)
    angle = rng.uniform(0, 2 * math.pi)
    t = (np.cos(angle) * xx / w + np.sin(angle) * yy / h)
    t = (t - t.min()) / max(t.max() - t.min(), 1e-9)
    img = c0 * (1 - t[..., None]) + c1 * t[..., None]
    for _ in range(rng.integers(1, 5)):
        cx, cy, r = rng.uniform(0, w), rng.uniform(0, h), rng.uniform(3, 12)
        mask = (xx - cx) ** 2 + (yy - cy) ** 2 < r * r
        img[mask] = rng.uniform(0, 1, 3)
    img *= rng.uniform(0.3, 1.0)
    return np.round(np.clip(img, 0, 1) * 255) / 255


def synthetic_k(f, rng):
    k = 1.5 + 3.0 * f["mean_lum"] - 2.0 * f["std_sat"] + 1.5 * math.sin(3.0 * f["std_hue"])
    return float(np.clip(k + rng.normal(0, 0.05), 0.2, 6.9))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("build_dir", type=pathlib.Path)
    ap.add_argument("--seed", type=int, default=20240611)
    args = ap.parse_args()
    sys.path.insert(0, str(args.build_dir / "python"))
    import wattcolor  # noqa: E402

    rng = np.random.default_rng(args.seed)
    (DATA / "images").mkdir(parents=True, exist_ok=True)

    model_path = DATA / "model_synthetic_srgb.json"
    model_path.write_text(json.dumps(model_json(), indent=2) + "\n")
    (DATA / "calibration_synthetic.csv").write_text("\n".join(calibration_rows()) + "\n")

    rows = ["image,space,metric,mean_lum,std_lum,std_sat,std_hue,k"]
    images = []
    for i in range(14):
        name = f"synth_{i:02d}"
        path = DATA / "images" / f"{name}.png"
        wattcolor.write_png(str(path), make_image(rng))
        f = wattcolor.extract_features(wattcolor.read_png(str(path)))
        k = synthetic_k(f, rng)
        rows.append(",".join([name, "srgb", "l22"] + [repr(f[c]) for c in ("mean_lum", "std_lum", "std_sat", "std_hue")] + [repr(k)]))
        images.append({"id": name, "path": f"images/{name}.png"})
    (DATA / "training_synthetic.csv").write_text("\n".join(rows) + "\n")
    (DATA / "sample.png").write_bytes((DATA / "images" / "synth_03.png").read_bytes())

    cli = args.build_dir / "tools" / "wattcolor"
    subprocess.run([str(cli), "train", str(DATA / "training_synthetic.csv"), str(DATA / "predictor_synthetic_svr.json"),
                    "--model-kind", "svr"], check=True)

    manifest = {
        "model": "model_synthetic_srgb.json",
        "images": images,
        "configs": [{"metric": m, "space": s} for s in ("srgb", "lab", "uvw") for m in ("l22", "l2")],
        "lambda_scale": "geometric",
        "batch_size": 20,
    }
    (DATA / "study_manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")


if __name__ == "__main__":
    main()
