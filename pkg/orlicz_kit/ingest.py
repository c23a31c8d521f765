import json
import math
from pathlib import Path
from typing import Any, Dict, Iterator, List, Optional, Tuple, Union

import numpy as np
import pandas as pd
from sqlalchemy.orm import Session

from orlicz_kit.db import get_session
from orlicz_kit.errors import InvalidInput
from orlicz_kit.luxemburg import OrliczVector
from orlicz_kit.models import Constant, Run, Trial

# below this a decimal constant does not survive conversion to a double
MIN_LOG10_FLOAT = -307.0


def _as_python(value):
    """Return a plain Python value suitable for SQL insertion."""
    if value is None:
        return None
    if isinstance(value, float) and math.isnan(value):
        return None
    if not isinstance(value, (list, dict)) and pd.isna(value):
        return None
    return value.item() if hasattr(value, "item") else value


def _load_dataframe(
    data: Optional[Union[pd.DataFrame, Path, str]],
) -> Optional[pd.DataFrame]:
    if data is None or isinstance(data, pd.DataFrame):
        return data
    path = Path(data)
    if path.suffix in {".xlsx", ".xls"}:
        return pd.read_excel(path, header=None)
    sep = "\t" if path.suffix in {".tsv", ".txt"} else ","
    return pd.read_csv(path, sep=sep, header=None)


def _numeric(df: pd.DataFrame) -> pd.DataFrame:
    numeric = df.apply(pd.to_numeric, errors="coerce")
    bad = numeric.isna() & df.notna()
    if bad.to_numpy().any():
        row, col = next(zip(*bad.to_numpy().nonzero()))
        raise InvalidInput(f"Non-numeric coordinate {df.iat[row, col]!r} at row {row}, column {col}")
    return numeric


def load_vectors(data: Union[pd.DataFrame, Path, str]) -> List[OrliczVector]:
    """Read one vector per row from a CSV, TSV or XLSX table without a header."""
    numeric = _numeric(_load_dataframe(data))
    return [OrliczVector(row.dropna().to_numpy(dtype=float)) for _, row in numeric.iterrows()]


def load_matrix(data: Union[pd.DataFrame, Path, str]) -> np.ndarray:
    """Read an n x k matrix, column i being the image of e_i."""
    numeric = _numeric(_load_dataframe(data))
    missing = numeric.isna().to_numpy()
    if missing.any():
        row, col = next(zip(*missing.nonzero()))
        raise InvalidInput(f"Missing matrix entry at row {row}, column {col}")
    return numeric.to_numpy(dtype=float)


def _is_record(value) -> bool:
    return isinstance(value, dict) and set(value) == {"value", "log10"}


def _walk_constants(
    node: Dict[str, Any], prefix: str = ""
) -> Iterator[Tuple[str, Any, Optional[str]]]:
    provenance = node.get("provenance")
    provenance = json.dumps(provenance, sort_keys=True) if provenance is not None else None
    for key, value in node.items():
        if key in {"provenance", "trials", "config"}:
            continue
        name = f"{prefix}{key}"
        if _is_record(value):
            yield name, value, provenance
        elif isinstance(value, dict):
            yield from _walk_constants(value, f"{name}.")
        elif isinstance(value, (int, float)) and not isinstance(value, bool):
            yield name, {"value": repr(value), "log10": None}, provenance


def _constant(run: Run, name: str, record: Dict[str, Any], provenance: Optional[str]) -> Constant:
    text = record["value"]
    log10 = record["log10"]
    value_float = None
    if log10 is None or log10 > MIN_LOG10_FLOAT:
        try:
            value_float = float(text)
        except ValueError:
            value_float = None
    return Constant(
        run=run,
        name=name,
        value_text=text,
        value_float=value_float,
        log10=log10,
        provenance=provenance,
    )


def ingest_report(report: Dict[str, Any], session: Optional[Session] = None) -> int:
    """Store a report (as written by the CLI) as a Run with its constants and trials.

    Returns the id of the new run.
    """
    created_session = False
    if session is None:
        session = get_session()
        created_session = True

    config = report.get("config", {})
    result = report.get("result", {})
    trans = session.begin_nested() if session.in_transaction() else session.begin()
    try:
        run = Run(
            command=report["command"],
            family=config.get("family", "unknown"),
            p=float(config.get("p", float("nan"))),
            eps=_as_python(config.get("eps")),
            seed=_as_python(config.get("seed")),
            mode=report.get("mode", "certified"),
            toolkit_version=report["toolkit_version"],
            config_json=json.dumps(config, sort_keys=True),
        )
        session.add(run)
        for name, record, provenance in _walk_constants(result):
            session.add(_constant(run, name, record, provenance))
        for record in result.get("trials", []):
            session.add(
                Trial(
                    run=run,
                    trial=int(record["trial"]),
                    delta_achieved=_as_python(record.get("delta_achieved")),
                    defect=_as_python(record.get("defect")),
                    failure=record.get("failure"),
                )
            )
        session.flush()
        run_id = run.id
        trans.commit()
    except Exception:
        trans.rollback()
        raise
    finally:
        if created_session:
            session.close()
    return run_id
