"""JSON encodings for configurations and reports."""

from __future__ import annotations

import json
from typing import Any, Mapping

import numpy as np

from .errors import ValidationError
from .quantum import PentagonConfig


def sig(x: float, digits: int = 12) -> float:
    """Round to ``digits`` significant digits (shortest repr after rounding)."""
    return float(f"{float(x):.{digits}g}")


def _encode_vector(v) -> list[list[float]]:
    return [[float(z.real), float(z.imag)] for z in np.asarray(v, dtype=complex)]


def _decode_vector(data, what: str) -> np.ndarray:
    try:
        arr = np.array(data, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"{what}: expected [[re, im], ...]") from exc
    if arr.shape != (3, 2):
        raise ValidationError(f"{what}: expected 3 [re, im] pairs, got shape {arr.shape}")
    return arr[:, 0] + 1j * arr[:, 1]


def config_to_dict(config: PentagonConfig) -> dict:
    return {
        "state": _encode_vector(config.state.vector),
        "projectors": [_encode_vector(a.vector) for a in config.projectors],
    }


def config_from_dict(data: Mapping[str, Any]) -> PentagonConfig:
    """Inverse of :func:`config_to_dict`; vectors must already be normalized."""
    if not isinstance(data, Mapping) or "state" not in data or "projectors" not in data:
        raise ValidationError('config needs "state" and "projectors"')
    projectors = data["projectors"]
    if not isinstance(projectors, list) or len(projectors) != 5:
        raise ValidationError("config needs exactly 5 projectors")
    state = _decode_vector(data["state"], "state")
    vecs = [_decode_vector(p, f"projector {k + 1}") for k, p in enumerate(projectors)]
    return PentagonConfig.from_vectors(state, vecs)


def dumps(obj: Any) -> str:
    return json.dumps(obj, indent=2) + "\n"
