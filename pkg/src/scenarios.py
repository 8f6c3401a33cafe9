"""SPDC の代表的な二光子状態のプリセットと位相空間パネルの再現

- TM_CW: 連続波ポンプによる横運動量エンタングルメント（y 軸で F- を測る）
- TM_CAT: ポンプを二分した猫状態（x 軸で F+ を測る）
- TM_CAT_DEPHASED: 干渉縞の可視度を落とした猫状態の混合
- FREQ_PULSED: パルスポンプによる周波数エンタングルメント（F- を測る）

単位は無次元（k = L = c = n1 - n2 = 1）
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Tuple

import numpy as np

from errors import NumericalIntegrityError, UsageError
from hom import AxisMode, ScanReport, identity_check, random_points, scan_report, witness_scan
from lattice import Grid1D, SampledWave
from states import (
    Axis,
    BiphotonState,
    ScenarioParams,
    SeparablePM,
    cat_wave,
    decohered_cat,
    gaussian_wave,
    resample_wave,
    sinc_linear_wave,
    sinc_quadratic_wave,
)
from wigner import PhaseSpaceMap, wigner_map

logger = logging.getLogger(__name__)

TM_UNITS = {"mu": "sqrt(k/L)", "delta": "sqrt(L/k)"}
FREQ_UNITS = {"mu": "c/(L(n1-n2))", "delta": "L(n1-n2)/c"}

# 格子間隔はパネルの μ 格子（1/16）と整合する2の冪
PLUS_GRID = Grid1D(-8.0, 8.0, 1025)
SINC_QUADRATIC_GRID = Grid1D(-32.0, 32.0, 2049)
SINC_LINEAR_GRID = Grid1D(-256.0, 256.0, 4097)
TM_PANEL_GRID = Grid1D(-4.0, 4.0, 129)
FREQ_PANEL_GRID = Grid1D(-10.0, 10.0, 129)

# 直接計算による検証用の格子（間隔 1/64）
ORACLE_SPACING = 1.0 / 64.0
ORACLE_PLUS_HALF_WIDTH = 6.0
ORACLE_MINUS_HALF_WIDTH = 10.0
ORACLE_2D_HALF_WIDTH = 8.0
ORACLE_TOL = 2e-4


class ScenarioName(Enum):
    TM_CW = "TM_CW"
    TM_CAT = "TM_CAT"
    TM_CAT_DEPHASED = "TM_CAT_DEPHASED"
    FREQ_PULSED = "FREQ_PULSED"

    @classmethod
    def parse(cls, value: str) -> "ScenarioName":
        try:
            return cls(value.strip().upper().replace("-", "_"))
        except ValueError:
            names = ", ".join(name.value for name in cls)
            raise UsageError(f"未知のシナリオです: {value}（{names} のいずれか）") from None


@dataclass(frozen=True)
class Scenario:
    name: ScenarioName
    params: ScenarioParams = field(default_factory=ScenarioParams)
    plus_grid: Grid1D = PLUS_GRID
    minus_grid: Grid1D = SINC_QUADRATIC_GRID
    mu_grid: Grid1D = TM_PANEL_GRID
    delta_grid: Grid1D = TM_PANEL_GRID
    axis: Axis = Axis.Y_AXIS

    @property
    def is_frequency(self) -> bool:
        return self.name == ScenarioName.FREQ_PULSED

    @property
    def units(self) -> dict:
        return FREQ_UNITS if self.is_frequency else TM_UNITS


def get_scenario(name, params: Optional[ScenarioParams] = None) -> Scenario:
    """名前から既定の格子付きシナリオを作る"""
    if not isinstance(name, ScenarioName):
        name = ScenarioName.parse(str(name))
    params = params or ScenarioParams()
    if name == ScenarioName.TM_CW:
        return Scenario(name, params, axis=Axis.Y_AXIS)
    if name in (ScenarioName.TM_CAT, ScenarioName.TM_CAT_DEPHASED):
        return Scenario(name, params, axis=Axis.X_AXIS)
    return Scenario(
        name,
        params,
        minus_grid=SINC_LINEAR_GRID,
        mu_grid=FREQ_PANEL_GRID,
        delta_grid=FREQ_PANEL_GRID,
        axis=Axis.Y_AXIS,
    )


def build(scenario: Scenario) -> Tuple[BiphotonState, AxisMode]:
    """シナリオの二光子状態と、注目する関数を測る軸モード"""
    p = scenario.params
    p.validate(frequency=scenario.is_frequency)
    mode = AxisMode(scenario.axis)
    name = scenario.name

    if name == ScenarioName.TM_CW:
        f_plus = gaussian_wave(scenario.plus_grid, p.w_p, label="pump_gaussian")
        f_minus = sinc_quadratic_wave(scenario.minus_grid, p.l_over_k)
        return SeparablePM(f_plus, f_minus, scenario.axis, label=name.value), mode

    if name == ScenarioName.TM_CAT:
        f_plus = cat_wave(scenario.plus_grid, p.cat_width, p.delta_p_pump, label="pump_cat")
        f_minus = sinc_quadratic_wave(scenario.minus_grid, p.l_over_k)
        return SeparablePM(f_plus, f_minus, scenario.axis, label=name.value), mode

    if name == ScenarioName.TM_CAT_DEPHASED:
        f_minus = sinc_quadratic_wave(scenario.minus_grid, p.l_over_k)
        state = decohered_cat(scenario.plus_grid, p.cat_width, p.delta_p_pump, p.cat_visibility, f_minus, scenario.axis)
        return state, mode

    f_plus = gaussian_wave(scenario.plus_grid, p.w_p, label="pump_gaussian")
    f_minus = sinc_linear_wave(scenario.minus_grid, p.dispersion)
    return SeparablePM(f_plus, f_minus, scenario.axis, label=name.value), mode


PANELS = {
    "a": (ScenarioName.TM_CW, "wigner"),
    "b": (ScenarioName.TM_CW, "scan"),
    "c": (ScenarioName.TM_CAT, "wigner"),
    "d": (ScenarioName.TM_CAT, "scan"),
    "e": (ScenarioName.FREQ_PULSED, "wigner"),
    "f": (ScenarioName.FREQ_PULSED, "scan"),
}


def _panel_key(panel: str) -> str:
    key = str(panel).strip().lower()
    if key not in PANELS:
        raise UsageError(f"未知のパネルです: {panel}（a〜f）")
    return key


def run_panel(
    panel: str,
    params: Optional[ScenarioParams] = None,
    mu_grid: Optional[Grid1D] = None,
    delta_grid: Optional[Grid1D] = None,
    workers: int = 1,
) -> Tuple[ScanReport, PhaseSpaceMap]:
    """パネル a〜f を計算し、集計とマップを返す

    a/c/e はウィグナー関数（πW）、b/d/f は同時計数確率のマップ。
    どちらも πW と I = 1/2 − πW/2 を両方持つ
    """
    key = _panel_key(panel)
    name, kind = PANELS[key]
    scenario = get_scenario(name, params)
    mu_grid = mu_grid or scenario.mu_grid
    delta_grid = delta_grid or scenario.delta_grid
    state, mode = build(scenario)

    logger.info(f"パネル {key} ({name.value}, {kind}) を計算します: {mu_grid.n}x{delta_grid.n}")
    if kind == "wigner":
        phase_map = wigner_map(mode.select(state), mu_grid, delta_grid, workers=workers)
        phase_map = phase_map.with_coincidence(0.5 - 0.5 * phase_map.pi_W)
        report = scan_report(phase_map)
    else:
        report, phase_map = witness_scan(state, mu_grid, delta_grid, mode, workers=workers)

    phase_map = phase_map.with_meta(
        panel=key,
        scenario=name.value,
        axis=mode.describe(),
        units=scenario.units,
        grids={"mu": mu_grid.describe(), "delta": delta_grid.describe()},
        **report.as_dict(),
    )
    return report, phase_map


def reproduce_panel(panel: str, **kwargs) -> PhaseSpaceMap:
    return run_panel(panel, **kwargs)[1]


def custom_state(wave: SampledWave, mode: AxisMode) -> SeparablePM:
    """ファイルから読んだ関数を測定対象に、単位幅ガウスを相方にした状態"""
    center = 0.0 if wave.grid.contains(0.0) else wave.grid.center
    companion = gaussian_wave(wave.grid, 1.0, center, label="companion_gaussian")
    if mode.selects_minus:
        return SeparablePM(companion, wave, mode.axis, label=wave.label)
    return SeparablePM(wave, companion, mode.axis, label=wave.label)


def oracle_check_state(
    state: SeparablePM,
    points: int = 50,
    seed: int = 0,
    tol: float = ORACLE_TOL,
) -> float:
    """二次元振幅からの直接計算と高速経路をランダムな点で比較

    F+ を [-6, 6]、F- を [-10, 10] に間隔 1/64 で取り直し、[-8, 8]^2 に埋め込む
    """
    plus_grid = Grid1D.with_spacing(ORACLE_PLUS_HALF_WIDTH, ORACLE_SPACING)
    minus_grid = Grid1D.with_spacing(ORACLE_MINUS_HALF_WIDTH, ORACLE_SPACING)
    grid2d = Grid1D.with_spacing(ORACLE_2D_HALF_WIDTH, ORACLE_SPACING)
    resampled = SeparablePM(
        resample_wave(state.f_plus, plus_grid),
        resample_wave(state.f_minus, minus_grid),
        Axis.Y_AXIS,
        label=state.label,
    )
    rng = np.random.default_rng(seed)
    pts = random_points(rng, points, mu_limit=3.0, delta_limit=3.0, mu_lattice=ORACLE_SPACING)
    worst = identity_check(resampled, grid2d, pts)
    if worst > tol:
        raise NumericalIntegrityError(f"直接計算と高速経路の差が許容値を超えました: {worst:.3e} > {tol:.0e}")
    return worst


def oracle_check(
    name,
    points: int = 50,
    seed: int = 0,
    params: Optional[ScenarioParams] = None,
    tol: float = ORACLE_TOL,
) -> float:
    scenario = get_scenario(name, params)
    state, _ = build(scenario)
    if not isinstance(state, SeparablePM):
        raise UsageError(f"{scenario.name.value} は混合状態のため直接計算の検証に使えません")
    return oracle_check_state(state, points, seed, tol)
