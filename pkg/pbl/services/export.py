"""
Export Service
CSV / JSON / gnuplot 텍스트와 manifest 기록

같은 설정이면 같은 바이트: CSV는 17 유효숫자, JSON은 키 정렬, 시각 기록은 RECORD_TIMING일 때만.
"""
from __future__ import annotations

import hashlib
import json
import math
import os
import platform
import time
from pathlib import Path
from typing import Any, Dict, Iterable, Optional, Union

import numpy as np
import pandas as pd
import pydantic
import scipy
from loguru import logger

from pbl import __version__
from pbl.config import settings
from pbl.models.results import QuasiSolutionTrace

FLOAT_FORMAT = "%.17g"

Artifact = Union[pd.DataFrame, QuasiSolutionTrace, Any]


def _clean(value: Any) -> Any:
    """JSON 직렬화: numpy 스칼라/배열, NaN/inf → None"""
    if isinstance(value, dict):
        return {str(k): _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_clean(v) for v in value.tolist()]
    if isinstance(value, (np.bool_,)):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    if hasattr(value, "to_dict"):
        return _clean(value.to_dict())
    return value


def dumps(data: Any) -> str:
    return json.dumps(_clean(data), sort_keys=True, indent=2, ensure_ascii=False, allow_nan=False) + "\n"


def config_hash(config: Dict[str, Any]) -> str:
    """정렬된 JSON의 sha256"""
    canonical = json.dumps(_clean(config), sort_keys=True, separators=(",", ":"), allow_nan=False)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def _atomic_write(target: Path, text: str) -> Path:
    target.parent.mkdir(parents=True, exist_ok=True)
    tmp = target.with_suffix(target.suffix + ".tmp")
    with open(tmp, "w", encoding="utf-8", newline="\n") as f:
        f.write(text)
    os.replace(tmp, target)
    return target


def write_csv(frame: pd.DataFrame, target: Union[str, Path]) -> Path:
    text = frame.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    path = _atomic_write(Path(target), text)
    logger.debug(f"💾 CSV {path} ({len(frame)} rows)")
    return path


def write_json(data: Any, target: Union[str, Path]) -> Path:
    path = _atomic_write(Path(target), dumps(data))
    logger.debug(f"💾 JSON {path}")
    return path


def trace_frame(trace: QuasiSolutionTrace) -> pd.DataFrame:
    return pd.DataFrame({"tau": trace.taus, "value": trace.values})


def _columns(frame: pd.DataFrame, columns: Iterable[str]) -> str:
    """공백 구분, 주석 헤더 하나 (gnuplot)"""
    cols = list(columns)
    lines = ["# " + " ".join(cols)]
    for record in frame[cols].itertuples(index=False):
        lines.append(" ".join("NaN" if v is None or (isinstance(v, float) and math.isnan(v)) else FLOAT_FORMAT % v
                              for v in record))
    return "\n".join(lines) + "\n"


def export_plot_data(artifact: Artifact, directory: Union[str, Path], name: str, fmt: str = "all") -> Dict[str, Path]:
    """
    분기 그림 또는 trace → 파일

    Args:
        artifact: BifurcationDiagram, QuasiSolutionTrace 또는 DataFrame
        fmt: "csv", "dat" (gnuplot 2/3열), "all"

    Returns:
        {"csv": path, "dat": path}
    """
    directory = Path(directory)
    written: Dict[str, Path] = {}
    if isinstance(artifact, QuasiSolutionTrace):
        frame = trace_frame(artifact)
        plot_cols = ["tau", "value"]
    elif isinstance(artifact, pd.DataFrame):
        frame = artifact
        plot_cols = list(frame.columns[:3])
    elif hasattr(artifact, "to_frame"):
        frame = artifact.to_frame()
        plot_cols = ["lambda", "x_plus", "x_minus"]
    else:
        raise TypeError(f"cannot export {type(artifact).__name__}")

    if fmt in ("csv", "all"):
        written["csv"] = write_csv(frame, directory / f"{name}.csv")
    if fmt in ("dat", "all"):
        numeric = frame[plot_cols].apply(pd.to_numeric, errors="coerce")
        written["dat"] = _atomic_write(directory / f"{name}.dat", _columns(numeric, plot_cols))
    return written


def versions() -> Dict[str, str]:
    return {
        "pbl": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "pandas": pd.__version__,
        "scipy": scipy.__version__,
        "pydantic": pydantic.VERSION,
    }


def write_manifest(
    directory: Union[str, Path],
    command: str,
    config: Dict[str, Any],
    files: Iterable[Union[str, Path]],
    seeds: Iterable[Optional[int]],
    exit_code: int,
    started: Optional[float] = None,
) -> Path:
    """config 에코, config hash, 버전, seed, 산출물 목록 (+ RECORD_TIMING이면 wall-clock)"""
    directory = Path(directory)
    manifest: Dict[str, Any] = {
        "command": command,
        "config": config,
        "config_hash": config_hash(config),
        "versions": versions(),
        "seeds": list(seeds),
        "files": sorted(Path(f).name for f in files),
        "exit_code": exit_code,
    }
    if settings.RECORD_TIMING and started is not None:
        manifest["wall_clock_seconds"] = round(time.perf_counter() - started, 3)
    path = write_json(manifest, directory / "manifest.json")
    logger.info(f"📦 Manifest {path} (config {manifest['config_hash'][:12]})")
    return path
