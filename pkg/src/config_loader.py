import argparse
import logging
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Optional

from config_validator import validate_config
from errors import ConfigParseError, InputFileError, UsageError

logger = logging.getLogger(__name__)

COMMANDS = ("wigner", "scan", "maximize", "panel", "oracle-check")


@dataclass
class RunConfig:
    """1回の実行に必要な設定（既定値 < 設定ファイル < コマンドライン引数）"""

    command: str = "wigner"
    scenario: Optional[str] = None
    wave_file: Optional[str] = None
    axis: Optional[str] = None
    dove: bool = False
    mu_min: Optional[float] = None
    mu_max: Optional[float] = None
    mu_n: Optional[int] = None
    delta_min: Optional[float] = None
    delta_max: Optional[float] = None
    delta_n: Optional[int] = None
    format: str = "csv"
    out: Optional[str] = None
    panel: Optional[str] = None
    points: int = 50
    seed: int = 0
    workers: int = 1
    debug: bool = False
    timestamp: bool = False
    w_p: float = 1.0
    delta_p_pump: float = 5.0
    cat_visibility: float = 0.5
    config: Optional[str] = None

    def to_dict(self) -> dict:
        return asdict(self)


# 設定ファイルで使えるキーと型
_TYPES = {
    "scenario": str,
    "wave_file": str,
    "axis": str,
    "dove": bool,
    "mu_min": float,
    "mu_max": float,
    "mu_n": int,
    "delta_min": float,
    "delta_max": float,
    "delta_n": int,
    "format": str,
    "out": str,
    "panel": str,
    "points": int,
    "seed": int,
    "workers": int,
    "debug": bool,
    "timestamp": bool,
    "w_p": float,
    "delta_p_pump": float,
    "cat_visibility": float,
}
_TRUE = {"true", "yes", "on", "1"}
_FALSE = {"false", "no", "off", "0"}


def _convert(key: str, raw: str, line_number: int):
    kind = _TYPES[key]
    if kind is bool:
        lowered = raw.lower()
        if lowered in _TRUE:
            return True
        if lowered in _FALSE:
            return False
        raise ConfigParseError(f"{key} には真偽値が必要です: {raw}", line_number)
    try:
        return kind(raw)
    except ValueError:
        raise ConfigParseError(f"{key} の値を{kind.__name__}に変換できません: {raw}", line_number) from None


def load_config(path) -> dict:
    """`key = value` 形式の設定ファイルを読み込む

    `#` 以降はコメント、空行は無視する。未知のキーや書式の誤りは
    行番号付きの ConfigParseError になる
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise InputFileError(f"設定ファイルを読み込めません: {path} ({e})") from e

    config = {}
    for line_number, line in enumerate(text.splitlines(), start=1):
        content = line.split("#", 1)[0].strip()
        if not content:
            continue
        if "=" not in content:
            raise ConfigParseError(f"'key = value' の形式ではありません: {line.strip()}", line_number)
        key, raw = (part.strip() for part in content.split("=", 1))
        key = key.replace("-", "_")
        if key not in _TYPES:
            raise ConfigParseError(f"未知のキーです: {key}", line_number)
        if not raw:
            raise ConfigParseError(f"{key} の値が空です", line_number)
        config[key] = _convert(key, raw, line_number)

    logger.info(f"設定ファイルを読み込みました: {path} ({len(config)}項目)")
    return config


def _add_common_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="key = value 形式の設定ファイル")
    parser.add_argument("--scenario", help="TM_CW, TM_CAT, TM_CAT_DEPHASED, FREQ_PULSED")
    parser.add_argument("--wave-file", dest="wave_file", help="波動関数ファイル（p re [im]）")
    parser.add_argument("--axis", choices=["x", "y"], help="測定する横軸")
    parser.add_argument("--dove", action="store_true", default=None, help="ダブプリズムで ± 関数を入れ替える")
    for name in ("mu", "delta"):
        parser.add_argument(f"--{name}-min", dest=f"{name}_min", type=float)
        parser.add_argument(f"--{name}-max", dest=f"{name}_max", type=float)
        parser.add_argument(f"--{name}-n", dest=f"{name}_n", type=int)
    parser.add_argument("--format", choices=["csv", "json"])
    parser.add_argument("--out", help="出力ファイル（省略時は標準出力）")
    parser.add_argument("--workers", type=int, help="並列評価のスレッド数")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--w-p", dest="w_p", type=float, help="ポンプ幅")
    parser.add_argument("--delta-p-pump", dest="delta_p_pump", type=float, help="猫状態の分離")
    parser.add_argument("--cat-visibility", dest="cat_visibility", type=float, help="猫状態の干渉縞の可視度")
    parser.add_argument("--debug", action="store_true", default=None)
    parser.add_argument("--timestamp", action="store_true", default=None, help="JSON メタデータに時刻を書く")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="homsim", description="改変HOM干渉計の二光子ウィグナー関数シミュレータ")
    subparsers = parser.add_subparsers(dest="command", required=True)

    helps = {
        "wigner": "ウィグナー関数マップ（πW）",
        "scan": "同時計数確率のウィットネススキャン",
        "maximize": "スキャン後に最大点を精密化",
        "panel": "位相空間パネル a〜f の再現",
        "oracle-check": "二次元振幅からの直接計算と高速経路の比較",
    }
    for command in COMMANDS:
        sub = subparsers.add_parser(command, help=helps[command])
        _add_common_arguments(sub)
        if command == "panel":
            sub.add_argument("--id", dest="panel", help="パネル名 a〜f")
        if command == "oracle-check":
            sub.add_argument("--points", type=int, help="比較する点の数")
    return parser


def parse_args(argv=None) -> argparse.Namespace:
    """コマンドライン引数を解析する"""
    return build_parser().parse_args(argv)


def parse_config(argv=None) -> RunConfig:
    """引数と設定ファイルを統合して検証済みの RunConfig を返す"""
    args = parse_args(argv)
    values = RunConfig(command=args.command).to_dict()

    if args.config:
        values.update(load_config(args.config))
        values["config"] = args.config

    for key in _TYPES:
        flag = getattr(args, key, None)
        if flag is not None:
            values[key] = flag

    problems = validate_config(values)
    if problems:
        raise UsageError("; ".join(problems))
    return RunConfig(**values)
