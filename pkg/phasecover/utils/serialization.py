"""
Deterministic serialization helpers for artifacts, configs and signals
"""

import hashlib
import json
import math
from pathlib import Path
from typing import Any, Dict, Optional, Tuple, Union

import numpy as np
import pandas as pd

from .config import CONFIG_HASH_LENGTH, FLOAT_FORMAT, SIGNIFICANT_DIGITS, VERSION


def carrier_to_dict(carrier) -> Dict[str, Any]:
    return {"kind": carrier.kind.value, "dim": carrier.dim, "modulus": carrier.modulus}


def carrier_from_dict(doc: Dict[str, Any]):
    from ..core.group import GroupCarrier
    return GroupCarrier(doc["kind"], int(doc["dim"]), doc.get("modulus"))


def round_significant(value: float, digits: int = SIGNIFICANT_DIGITS) -> Union[float, str]:
    """Float rounded to `digits` significant digits; non-finite values become strings"""
    value = float(value)
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return float(f"{value:.{digits}g}")


def round_floats(obj: Any, digits: int = SIGNIFICANT_DIGITS) -> Any:
    """Recursively round every float in a JSON-like structure"""
    if isinstance(obj, bool) or obj is None:
        return obj
    if isinstance(obj, (float, np.floating)):
        return round_significant(obj, digits)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, dict):
        return {str(k): round_floats(v, digits) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [round_floats(v, digits) for v in obj]
    return obj


def canonical_json(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def config_hash(config: Dict[str, Any], version: str = VERSION) -> str:
    """Truncated sha256 of the canonical config JSON plus the version string"""
    digest = hashlib.sha256((canonical_json(config) + version).encode("utf-8")).hexdigest()
    return digest[:CONFIG_HASH_LENGTH]


def write_json(path: Path, obj: Any) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    text = json.dumps(round_floats(obj), sort_keys=True, indent=2)
    path.write_text(text + "\n", encoding="utf-8")


def write_table(df: pd.DataFrame, path: Path) -> None:
    """CSV with fixed column order, 12 significant digits and LF line endings"""
    path.parent.mkdir(parents=True, exist_ok=True)
    df.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")


def write_signal(path: Path, vector: np.ndarray, sidecar: Optional[Dict[str, Any]] = None) -> None:
    """8-byte little-endian length header, then interleaved float64 (re, im); optional JSON sidecar"""
    vector = np.asarray(vector, dtype=complex).ravel()
    interleaved = np.empty(2 * vector.size, dtype="<f8")
    interleaved[0::2] = vector.real
    interleaved[1::2] = vector.imag
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(np.array([vector.size], dtype="<u8").tobytes() + interleaved.tobytes())
    if sidecar is not None:
        write_json(path.with_suffix(".json"), sidecar)


def read_signal(path: Path) -> Tuple[np.ndarray, Optional[Dict[str, Any]]]:
    raw = path.read_bytes()
    n = int(np.frombuffer(raw[:8], dtype="<u8")[0])
    body = np.frombuffer(raw[8:], dtype="<f8")
    if body.size != 2 * n:
        raise ValueError(f"{path}: header declares {n} samples, body holds {body.size / 2:g}")
    sidecar_path = path.with_suffix(".json")
    sidecar = json.loads(sidecar_path.read_text(encoding="utf-8")) if sidecar_path.exists() else None
    return body[0::2] + 1j * body[1::2], sidecar
