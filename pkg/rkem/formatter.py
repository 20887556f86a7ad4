"""Output formatting for result tables."""

import json
from typing import Any

import pandas as pd


def format_table(frame: pd.DataFrame, fmt: str = "text", float_digits: int = 2) -> str:
    """Render a result table as "text", "csv" or "json"."""
    if fmt == "csv":
        return frame.to_csv(index=False)
    if fmt == "json":
        rows = frame.astype(object).where(frame.notna(), None).to_dict(orient="records")
        return to_json({"rows": rows, "count": len(frame)})
    return _format_text(frame, float_digits)


def _format_text(frame: pd.DataFrame, float_digits: int) -> str:
    shown = frame.astype(object)
    for col in frame.columns:
        if pd.api.types.is_float_dtype(frame[col]):
            shown[col] = frame[col].map(lambda x: "" if pd.isna(x) else f"{x:.{float_digits}f}")
    return shown.where(frame.notna(), "").to_string(index=False)


def _default(obj: Any) -> Any:
    # numpy scalars and arrays
    if hasattr(obj, "tolist"):
        return obj.tolist()
    if hasattr(obj, "item"):
        return obj.item()
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")


def to_json(data: Any) -> str:
    return json.dumps(data, indent=2, ensure_ascii=False, default=_default)
