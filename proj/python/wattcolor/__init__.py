"""Power-saving color transforms for emissive displays.

Images are float64 arrays of shape (height, width, 3). sRGB values are
drive levels in [0, 1].
"""

import json as _json

from . import _wattcolor as _core
from ._wattcolor import (
    WattcolorError,
    convert,
    l2_scale,
    l22_value,
    lambda_lower_bound,
    linear_to_srgb,
    lower_boundary,
    fit_k,
    max_rate,
    read_png,
    srgb_to_linear,
    write_png,
)

__all__ = [
    "WattcolorError",
    "convert",
    "cross_validate",
    "extract_features",
    "fit_k",
    "fit_lower_bound",
    "fit_measurements",
    "l2_scale",
    "l22_value",
    "lambda_lower_bound",
    "lambda_range",
    "linear_to_srgb",
    "load_model",
    "lower_boundary",
    "max_rate",
    "model_power",
    "predict_k",
    "read_png",
    "srgb_to_linear",
    "train",
    "transform",
    "write_png",
]


def _text(doc):
    return doc if isinstance(doc, str) else _json.dumps(doc)


def load_model(path):
    with open(path, encoding="utf-8") as f:
        return _json.load(f)


def fit_measurements(csv_path):
    return _json.loads(_core.fit_measurements_csv(str(csv_path)))


def model_power(model, image):
    return _core.model_power(_text(model), image)


def lambda_range(model, metric="l22", scale="geometric"):
    return _json.loads(_core.lambda_range(_text(model), metric, scale))


def transform(image, model, metric="l22", space="srgb", lambda_norm=1.0, scale="geometric"):
    """Returns (output image, report dict)."""
    out, report = _core.transform(image, _text(model), metric, space, lambda_norm, scale)
    return out, _json.loads(report)


def extract_features(image):
    return _json.loads(_core.extract_features(image))


def fit_lower_bound(ratings_csv, image, metric, space):
    return _json.loads(_core.fit_lower_bound_csv(str(ratings_csv), image, metric, space))


def train(training_csv, kind="linear"):
    return _json.loads(_core.train_csv(str(training_csv), kind))


def cross_validate(training_csv, kind="linear", folds=5, seed=0):
    return _json.loads(_core.cross_validate_csv(str(training_csv), kind, folds, seed))


def predict_k(predictor, features):
    """features: dict with mean_lum, std_lum, std_sat, std_hue, or a 4-sequence."""
    if isinstance(features, dict):
        features = [features[k] for k in ("mean_lum", "std_lum", "std_sat", "std_hue")]
    k, raw, clamped = _core.predict_k(_text(predictor), list(features))
    return {"k": k, "raw": raw, "clamped": clamped}
