import json
import logging
import math
from pathlib import Path
from typing import Any, Dict, Iterable, Optional

import mpmath
import numpy as np
import pandas as pd

from orlicz_kit import __version__

logger = logging.getLogger(__name__)

RIGIDITY_REPORT = "rigidity-report.json"
BASIS_REPORT = "basis-report.json"
AGE_REPORT = "age-report.json"
DISJOINTNESS_REPORT = "disjointness-report.json"
TRANSITIVITY_REPORT = "transitivity-report.json"


def mp_record(x) -> Dict[str, Any]:
    """Serialize a (possibly astronomically small or large) number.

    Parameters:
        x: float or mpmath number.

    Returns:
        {"value": 17 significant digits as text, "log10": base-10 exponent}
    """
    value = mpmath.mpf(x)
    if value == 0:
        return {"value": "0.0", "log10": None}
    if not mpmath.isfinite(value):
        return {"value": str(value), "log10": None}
    return {
        "value": mpmath.nstr(value, 17),
        "log10": float(mpmath.log10(abs(value))),
    }


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, mpmath.mpf):
        return mp_record(obj)
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        value = float(obj)
        return value if math.isfinite(value) else str(value)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def envelope(command: str, config: Dict[str, Any], body: Dict[str, Any]) -> Dict[str, Any]:
    """Wrap a report body with the run config and toolkit version."""
    return {
        "command": command,
        "config": config,
        "mode": config.get("mode", "certified"),
        "toolkit_version": __version__,
        "result": body,
    }


def dumps(report: Dict[str, Any]) -> str:
    return json.dumps(_jsonable(report), sort_keys=True, indent=2) + "\n"


def write_json(report: Dict[str, Any], path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(report), encoding="utf-8")
    logger.info("Wrote %s", path)
    return path


def write_csv(rows: Iterable[Dict[str, Any]], path: Path, columns: Optional[list] = None) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    df = pd.DataFrame(list(rows), columns=columns)
    df.to_csv(path, index=False, float_format="%.17g")
    logger.info("Wrote %s", path)
    return path
