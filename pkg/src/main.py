import logging
import sys
from typing import Tuple

import numpy as np

from config_loader import RunConfig, parse_config
from errors import HomSimError, UsageError
from exporter import export_map, render, render_summary, write_text
from hom import AxisMode, coincidence_map, refine_scan, witness_scan
from lattice import Grid1D
from scenarios import (
    PANELS,
    TM_PANEL_GRID,
    build,
    custom_state,
    get_scenario,
    oracle_check_state,
    run_panel,
)
from states import Axis, BiphotonState, Mixture, ScenarioParams, SeparablePM, load_wave_file
from wigner import PhaseSpaceMap, wigner_map

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


def setup_logging(debug: bool = False) -> None:
    """ログは標準エラーへ（データ出力と混ざらないように）"""
    logging.basicConfig(level=logging.INFO, format=LOG_FORMAT, stream=sys.stderr)
    setup_debug_mode(debug)


def setup_debug_mode(debug: bool) -> bool:
    if debug:
        logging.getLogger().setLevel(logging.DEBUG)
    return debug


def _params(config: RunConfig) -> ScenarioParams:
    return ScenarioParams(w_p=config.w_p, delta_p_pump=config.delta_p_pump, cat_visibility=config.cat_visibility)


def _grids(config: RunConfig, default_mu: Grid1D, default_delta: Grid1D) -> Tuple[Grid1D, Grid1D]:
    mu = Grid1D(
        config.mu_min if config.mu_min is not None else default_mu.min,
        config.mu_max if config.mu_max is not None else default_mu.max,
        config.mu_n or default_mu.n,
    )
    delta = Grid1D(
        config.delta_min if config.delta_min is not None else default_delta.min,
        config.delta_max if config.delta_max is not None else default_delta.max,
        config.delta_n or default_delta.n,
    )
    return mu, delta


def resolve_state(config: RunConfig) -> Tuple[BiphotonState, AxisMode, Grid1D, Grid1D, str]:
    """設定から状態・軸モード・スキャン格子・ラベルを決める"""
    if config.wave_file:
        mode = AxisMode(Axis(config.axis or "y"), config.dove)
        wave = load_wave_file(config.wave_file)
        mu_grid, delta_grid = _grids(config, TM_PANEL_GRID, TM_PANEL_GRID)
        return custom_state(wave, mode), mode, mu_grid, delta_grid, wave.label

    scenario = get_scenario(config.scenario, _params(config))
    state, mode = build(scenario)
    mode = AxisMode(Axis(config.axis) if config.axis else mode.axis, config.dove)
    mu_grid, delta_grid = _grids(config, scenario.mu_grid, scenario.delta_grid)
    return state, mode, mu_grid, delta_grid, scenario.name.value


def _emit(config: RunConfig, text: str) -> None:
    if config.out:
        write_text(config.out, text)
        logger.info(f"書き出しました: {config.out}")
    else:
        sys.stdout.write(text)


def _emit_map(config: RunConfig, phase_map: PhaseSpaceMap) -> None:
    if config.out:
        export_map(phase_map, config.format, config.out, timestamp=config.timestamp)
    else:
        sys.stdout.write(render(phase_map, config.format, timestamp=config.timestamp))


def _mixture_wigner(state: Mixture, mode: AxisMode, mu_grid: Grid1D, delta_grid: Grid1D, workers: int) -> PhaseSpaceMap:
    # 混合状態のウィグナー関数は成分の重み付き和
    W = np.zeros((mu_grid.n, delta_grid.n))
    for weight, component in zip(state.weights, state.components):
        W = W + weight * wigner_map(mode.select(component), mu_grid, delta_grid, workers=workers).W
    return PhaseSpaceMap(mu_grid, delta_grid, W)


def run_wigner(config: RunConfig) -> int:
    state, mode, mu_grid, delta_grid, label = resolve_state(config)
    if isinstance(state, SeparablePM):
        phase_map = wigner_map(mode.select(state), mu_grid, delta_grid, workers=config.workers)
    elif isinstance(state, Mixture) and all(isinstance(c, SeparablePM) for c in state.components):
        phase_map = _mixture_wigner(state, mode, mu_grid, delta_grid, config.workers)
    else:
        phase_map = coincidence_map(state, mu_grid, delta_grid, mode, config.workers)
    if phase_map.I is None:
        phase_map = phase_map.with_coincidence(0.5 - 0.5 * phase_map.pi_W)
    phase_map = phase_map.with_meta(scenario=label, axis=mode.describe())
    _emit_map(config, phase_map)
    return 0


def run_scan(config: RunConfig) -> int:
    state, mode, mu_grid, delta_grid, label = resolve_state(config)
    report, phase_map = witness_scan(state, mu_grid, delta_grid, mode, workers=config.workers)
    _emit_map(config, phase_map.with_meta(scenario=label, axis=mode.describe()))
    return 0


def run_maximize(config: RunConfig) -> int:
    state, mode, mu_grid, delta_grid, label = resolve_state(config)
    report, _ = witness_scan(state, mu_grid, delta_grid, mode, workers=config.workers)
    result = refine_scan(state, report, mu_grid, delta_grid, mode)
    summary = {
        "scenario": label,
        "axis": mode.describe(),
        "coarse": report.as_dict(),
        "refined": {
            "argmax": result.point.as_dict(),
            "max_I": result.value,
            "relative_violation": max(0.0, (result.value - 0.5) / 0.5),
            "converged": result.converged,
            "iterations": result.iterations,
        },
    }
    _emit(config, render_summary(summary))
    return 0


def run_panel_command(config: RunConfig) -> int:
    mu_grid = delta_grid = None
    if any(v is not None for v in (config.mu_min, config.mu_n, config.delta_min, config.delta_n)):
        defaults = get_scenario(PANELS[config.panel][0])
        mu_grid, delta_grid = _grids(config, defaults.mu_grid, defaults.delta_grid)
    _, phase_map = run_panel(config.panel, params=_params(config), mu_grid=mu_grid, delta_grid=delta_grid, workers=config.workers)
    _emit_map(config, phase_map)
    return 0


def run_oracle_check(config: RunConfig) -> int:
    state, _, _, _, label = resolve_state(config)
    if not isinstance(state, SeparablePM):
        raise UsageError(f"{label} は混合状態のため直接計算の検証に使えません")
    worst = oracle_check_state(state, points=config.points, seed=config.seed)
    _emit(config, render_summary({"scenario": label, "points": config.points, "seed": config.seed, "max_abs_diff": worst}))
    return 0


COMMAND_HANDLERS = {
    "wigner": run_wigner,
    "scan": run_scan,
    "maximize": run_maximize,
    "panel": run_panel_command,
    "oracle-check": run_oracle_check,
}


def main(argv=None) -> int:
    """改変HOM干渉計シミュレータのメインエントリポイント

    終了コード: 0 成功, 2 使い方の誤り, 3 数値の整合性エラー, 4 入出力エラー
    """
    setup_logging()
    try:
        config = parse_config(argv)
        setup_debug_mode(config.debug)
        logger.debug(f"設定: {config.to_dict()}")
        return COMMAND_HANDLERS[config.command](config)
    except HomSimError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return e.exit_code
    except OSError as e:
        logger.error(f"入出力エラー: {e}")
        return 4


if __name__ == "__main__":
    sys.exit(main())
