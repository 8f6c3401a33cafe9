"""位相空間マップの CSV / JSON 出力と再読み込み

CSV は `mu,delta,pi_W,I` のヘッダと μ 外側の行優先順。
浮動小数点は最短の往復可能な10進表記で書く
"""

import json
import logging
import os
import tempfile
from datetime import datetime, timezone
from pathlib import Path

import numpy as np
import pandas as pd

from errors import ExportError, UsageError
from lattice import Grid1D
from wigner import PhaseSpaceMap

logger = logging.getLogger(__name__)

COLUMNS = ["mu", "delta", "pi_W", "I"]
FORMATS = ("csv", "json")
META_KEYS = (
    "scenario",
    "panel",
    "axis",
    "grids",
    "units",
    "max_I",
    "argmax",
    "relative_violation",
    "negativity_volume",
    "violation_cells",
)


def to_frame(phase_map: PhaseSpaceMap) -> pd.DataFrame:
    """マップを μ 外側の行優先順の表にする"""
    mu, delta = np.meshgrid(phase_map.mu_grid.points, phase_map.delta_grid.points, indexing="ij")
    I = phase_map.I.ravel() if phase_map.I is not None else np.full(mu.size, np.nan)
    return pd.DataFrame(
        {"mu": mu.ravel(), "delta": delta.ravel(), "pi_W": phase_map.pi_W.ravel(), "I": I},
        columns=COLUMNS,
    )


def _json_default(value):
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, np.ndarray):
        return value.tolist()
    raise TypeError(f"JSONに変換できない値です: {type(value).__name__}")


def _meta(phase_map: PhaseSpaceMap, timestamp: bool) -> dict:
    meta = {key: phase_map.meta[key] for key in META_KEYS if key in phase_map.meta}
    meta.setdefault("scenario", phase_map.meta.get("state", ""))
    meta.setdefault("grids", {"mu": phase_map.mu_grid.describe(), "delta": phase_map.delta_grid.describe()})
    if timestamp:
        meta["timestamp"] = datetime.now(timezone.utc).isoformat()
    return meta


def _render_json(phase_map: PhaseSpaceMap, timestamp: bool) -> str:
    frame = to_frame(phase_map)
    rows = [
        {"mu": mu, "delta": delta, "pi_W": pi_w, "I": None if np.isnan(i) else i}
        for mu, delta, pi_w, i in zip(
            frame["mu"].tolist(), frame["delta"].tolist(), frame["pi_W"].tolist(), frame["I"].tolist()
        )
    ]
    document = {"meta": _meta(phase_map, timestamp), "rows": rows}
    return json.dumps(document, ensure_ascii=False, indent=1, default=_json_default, allow_nan=False) + "\n"


def _atomic_write(path: Path, text: str) -> None:
    # 同じディレクトリの一時ファイルに書いてから置き換える
    fd, tmp_name = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as f:
            f.write(text)
        os.replace(tmp_name, path)
    except BaseException:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise


def render(phase_map: PhaseSpaceMap, fmt: str, timestamp: bool = False) -> str:
    """マップを出力形式の文字列にする（同じ入力なら同じ文字列）"""
    if fmt not in FORMATS:
        raise UsageError(f"未知の出力形式です: {fmt}")
    if fmt == "csv":
        if timestamp:
            logger.debug("CSV 出力にはタイムスタンプを書きません")
        return to_frame(phase_map).to_csv(index=False, lineterminator="\n")
    return _render_json(phase_map, timestamp)


def render_summary(summary: dict) -> str:
    """スキャン結果などの要約を JSON にする"""
    return json.dumps(summary, ensure_ascii=False, indent=1, default=_json_default, allow_nan=False) + "\n"


def write_text(path, text: str) -> Path:
    path = Path(path)
    try:
        _atomic_write(path, text)
    except OSError as e:
        raise ExportError(f"出力ファイルに書き込めません: {path} ({e})") from e
    return path


def export_map(phase_map: PhaseSpaceMap, fmt: str, path, timestamp: bool = False) -> Path:
    """マップを CSV または JSON で書き出す"""
    path = write_text(path, render(phase_map, fmt, timestamp))
    logger.info(f"{fmt.upper()} を書き出しました: {path} ({phase_map.mu_grid.n}x{phase_map.delta_grid.n})")
    return path


def read_table(path) -> pd.DataFrame:
    """出力ファイルを表として読み戻す（値は書き出したものとビット単位で一致）"""
    path = Path(path)
    try:
        if path.suffix.lower() == ".json":
            with open(path, "r", encoding="utf-8") as f:
                document = json.load(f)
            frame = pd.DataFrame(document["rows"], columns=COLUMNS)
            frame["I"] = frame["I"].astype(float)
            frame.attrs["meta"] = document.get("meta", {})
            return frame
        return pd.read_csv(path, float_precision="round_trip")
    except (OSError, ValueError, KeyError) as e:
        raise ExportError(f"出力ファイルを読み込めません: {path} ({e})") from e


def import_map(path) -> PhaseSpaceMap:
    """出力ファイルから PhaseSpaceMap を復元

    ファイルの pi_W と I の列はビット単位で往復する（read_table で読む値）。
    W は pi_W / π から作り直すので、元の W とは 1 ulp 程度ずれることがある
    """
    frame = read_table(path)
    if list(frame.columns) != COLUMNS:
        raise ExportError(f"列が一致しません: {list(frame.columns)}")
    meta = dict(frame.attrs.get("meta", {}))
    grids = meta.get("grids")
    if grids:
        mu_grid = Grid1D(**grids["mu"])
        delta_grid = Grid1D(**grids["delta"])
    else:
        mu_grid = Grid1D.from_points(pd.unique(frame["mu"]))
        delta_grid = Grid1D.from_points(pd.unique(frame["delta"]))
    shape = (mu_grid.n, delta_grid.n)
    if len(frame) != mu_grid.n * delta_grid.n:
        raise ExportError(f"行数が格子と一致しません: {len(frame)} != {shape[0] * shape[1]}")

    pi_w = frame["pi_W"].to_numpy(dtype=float).reshape(shape)
    I = frame["I"].to_numpy(dtype=float).reshape(shape)
    return PhaseSpaceMap(
        mu_grid,
        delta_grid,
        pi_w / np.pi,
        None if np.all(np.isnan(I)) else I,
        meta=meta,
    )
