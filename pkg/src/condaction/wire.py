"""JSON wire format: complex numbers as ``[re, im]``, matrices row-major."""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .dilation import MeasurementDilation
from .hilbert import DomainError
from .instruments import Instrument, Operation


class WireFormatError(ValueError):
    pass


def matrix_to_json(m) -> list:
    m = np.asarray(m, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def matrix_from_json(data) -> np.ndarray:
    try:
        arr = np.array(data, dtype=float)
    except (TypeError, ValueError) as exc:
        raise WireFormatError(f"matrix is not a nested array of [re, im] pairs: {exc}") from exc
    if arr.ndim != 3 or arr.shape[2] != 2:
        raise WireFormatError(f"matrix must have shape (rows, cols, 2), got {arr.shape}")
    return arr[..., 0] + 1j * arr[..., 1]


def instrument_to_json(ins: Instrument) -> dict:
    return {
        "dim": ins.dim,
        "outcomes": {n: [matrix_to_json(k) for k in ins[n].kraus] for n in ins.outcomes},
    }


def instrument_from_json(data: dict) -> Instrument:
    """Parse ``{"dim": d, "outcomes": {label: [kraus, ...]}}``; label order is kept."""
    if not isinstance(data, dict) or "outcomes" not in data:
        raise WireFormatError("instrument JSON needs an 'outcomes' object")
    outcomes = data["outcomes"]
    if not isinstance(outcomes, dict) or not outcomes:
        raise WireFormatError("'outcomes' must be a non-empty object")
    try:
        ins = Instrument({
            str(n): Operation([matrix_from_json(k) for k in ks]) for n, ks in outcomes.items()
        })
    except DomainError as exc:
        raise WireFormatError(f"invalid instrument: {exc}") from exc
    if "dim" in data and int(data["dim"]) != ins.dim:
        raise WireFormatError(f"declared dim {data['dim']} does not match Kraus shape {ins.dim}")
    return ins


def load_instrument(path: str | Path) -> Instrument:
    """Read an instrument file; malformed JSON reports line and column."""
    text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise WireFormatError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    return instrument_from_json(data)


def dilation_to_json(d: MeasurementDilation) -> dict:
    return {
        "sys_dim": d.sys_dim,
        "aux_dim": d.aux_dim,
        "sigma": matrix_to_json(d.sigma),
        "V": matrix_to_json(d.V),
        "Q": {n: matrix_to_json(q) for n, q in zip(d.Q.labels, d.Q.projections)},
    }


def dump(data, path: Path) -> Path:
    path.write_text(json.dumps(data, indent=2) + "\n")
    return path
