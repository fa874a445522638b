"""Versioned JSON model files.  Floats are written with ``repr`` precision,
so a loaded model predicts bit-identically to the saved one."""

import json

from .ensemble import TreeEnsembleModel, model_from_dict, model_to_dict
from .naive_bayes import GaussianNbModel

FORMAT = "speechpat-model"
VERSION = 1


def dumps_model(model):
    if isinstance(model, GaussianNbModel):
        body = model.to_dict()
    elif isinstance(model, TreeEnsembleModel):
        body = model_to_dict(model)
    else:
        raise TypeError(f"cannot serialise {type(model).__name__}")
    return json.dumps({"format": FORMAT, "version": VERSION, "model": body}, sort_keys=True)


def loads_model(text):
    doc = json.loads(text)
    if doc.get("format") != FORMAT:
        raise ValueError("not a speechpat model file")
    if doc.get("version") != VERSION:
        raise ValueError(f"unsupported model file version {doc.get('version')}")
    body = doc["model"]
    if body["kind"] == "gaussian_nb":
        return GaussianNbModel.from_dict(body)
    return model_from_dict(body)


def save_model(model, path):
    with open(path, "w") as fh:
        fh.write(dumps_model(model))


def load_model(path):
    with open(path) as fh:
        return loads_model(fh.read())
