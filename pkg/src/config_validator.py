"""設定の検証ユーティリティ"""

MIN_GRID_POINTS = 8
MAX_GRID_POINTS = 8192
SCENARIOS = ("TM_CW", "TM_CAT", "TM_CAT_DEPHASED", "FREQ_PULSED")
PANELS = ("a", "b", "c", "d", "e", "f")


def _check_grid(config: dict, name: str, problems: list) -> None:
    n = config.get(f"{name}_n")
    if n is not None and not MIN_GRID_POINTS <= n <= MAX_GRID_POINTS:
        problems.append(f"{name}_n は[{MIN_GRID_POINTS}, {MAX_GRID_POINTS}]の範囲が必要です ({n})")

    lo = config.get(f"{name}_min")
    hi = config.get(f"{name}_max")
    if (lo is None) != (hi is None):
        problems.append(f"{name}_min と {name}_max は両方指定する必要があります")
    elif lo is not None and not hi > lo:
        problems.append(f"{name}_max > {name}_min が必要です ({lo}, {hi})")


def validate_config(config: dict) -> list:
    """設定の検証

    Args:
        config: 検証する設定辞書

    Returns:
        問題点のメッセージのリスト（空なら有効）
    """
    problems = []
    command = config.get("command")
    scenario = config.get("scenario")
    wave_file = config.get("wave_file")

    # 状態の指定はシナリオか波動関数ファイルのどちらか一方
    if scenario and wave_file:
        problems.append("--scenario と --wave-file は同時に指定できません")
    if command == "panel":
        if config.get("panel") not in PANELS:
            problems.append(f"panel には a〜f のいずれかが必要です ({config.get('panel')})")
        if wave_file:
            problems.append("panel では --wave-file を使えません")
    elif not scenario and not wave_file:
        problems.append("--scenario または --wave-file のどちらかが必要です")

    if scenario and str(scenario).upper().replace("-", "_") not in SCENARIOS:
        problems.append(f"未知のシナリオ '{scenario}' (有効値: {', '.join(SCENARIOS)})")

    if config.get("axis") not in (None, "x", "y"):
        problems.append(f"不正な軸 '{config.get('axis')}' (有効値: x, y)")
    if config.get("format") not in ("csv", "json"):
        problems.append(f"不正な出力形式 '{config.get('format')}' (有効値: csv, json)")

    _check_grid(config, "mu", problems)
    _check_grid(config, "delta", problems)

    if config.get("workers", 1) < 1:
        problems.append(f"workers は1以上が必要です ({config.get('workers')})")
    if config.get("points", 1) < 1:
        problems.append(f"points は1以上が必要です ({config.get('points')})")
    if not config.get("w_p", 1.0) > 0:
        problems.append(f"w_p は正である必要があります ({config.get('w_p')})")
    if config.get("delta_p_pump", 0.0) < 0:
        problems.append(f"delta_p_pump は0以上が必要です ({config.get('delta_p_pump')})")
    if not 0.0 <= config.get("cat_visibility", 0.5) <= 1.0:
        problems.append(f"cat_visibility は[0, 1]の範囲が必要です ({config.get('cat_visibility')})")

    return problems
