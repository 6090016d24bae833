"""Bit-exact JSON array codec used by model serialization."""

import base64

import numpy as np


def encode_array(a) -> dict:
    a = np.ascontiguousarray(a)
    return {
        "dtype": a.dtype.str,
        "shape": list(a.shape),
        "data": base64.b64encode(a.tobytes()).decode("ascii"),
    }


def decode_array(doc) -> np.ndarray:
    raw = base64.b64decode(doc["data"])
    a = np.frombuffer(raw, dtype=np.dtype(doc["dtype"])).reshape(doc["shape"])
    return a.copy()
