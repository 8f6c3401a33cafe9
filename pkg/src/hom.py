"""改変HOM干渉計の同時計数確率と分離可能性ウィットネス

I(μ, δ) は変位 (μ, δ) を片方の光子に与えたときの同時計数確率。
分離可能な状態では I ≤ 1/2 となり、これを超える点はエンタングルメントの証拠になる
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Dict, Iterable, Optional, Sequence, Tuple

import numpy as np

from errors import DimensionError, InvalidStateError, NumericalIntegrityError
from lattice import Grid1D, SampledWave, integrate_2d, interpolate
from states import MAX_TRUNCATED_MASS, Axis, BiphotonState, General2D, Mixture, SeparablePM, to_general2d
from wigner import (
    VIOLATION_TOL,
    PhaseSpaceMap,
    PhaseSpacePoint,
    negativity_volume,
    wigner_map,
    wigner_point,
)

logger = logging.getLogger(__name__)

RANGE_TOL = 1e-6
ORACLE_RANGE_TOL = 1e-3
MAX_ITERATIONS = 500
STEP_TOL = 1e-9

Bounds = Tuple[Tuple[float, float], Tuple[float, float]]


@dataclass(frozen=True)
class AxisMode:
    """測定する横軸とダブプリズムによる ± 関数の入れ替え

    y 軸は F-、x 軸は F+ を測る。dove_swap で逆になる
    """

    axis: Axis = Axis.Y_AXIS
    dove_swap: bool = False

    @property
    def selects_minus(self) -> bool:
        return (self.axis == Axis.Y_AXIS) != self.dove_swap

    def select(self, state: SeparablePM) -> SampledWave:
        return state.f_minus if self.selects_minus else state.f_plus

    def describe(self) -> str:
        return f"{self.axis.value}{'+dove' if self.dove_swap else ''}"


@dataclass(frozen=True)
class ScanReport:
    max_I: float
    argmax: PhaseSpacePoint
    relative_violation: float
    negativity_volume: float
    grid_spec: Dict[str, dict]
    violation_cells: int = 0

    def as_dict(self) -> dict:
        return {
            "max_I": self.max_I,
            "argmax": self.argmax.as_dict(),
            "relative_violation": self.relative_violation,
            "negativity_volume": self.negativity_volume,
            "violation_cells": self.violation_cells,
        }


@dataclass(frozen=True)
class MaximizeResult:
    point: PhaseSpacePoint
    value: float
    converged: bool
    iterations: int


def _resolve_mode(state: SeparablePM, mode: Optional[AxisMode]) -> AxisMode:
    return mode if mode is not None else AxisMode(state.axis)


def _check_range(value: float, where: str) -> None:
    if value < -RANGE_TOL or value > 1.0 + RANGE_TOL:
        logger.warning(f"{where}: 同時計数確率が[0, 1]の範囲外です: {value:.9f}")


def coincidence_fast(state: SeparablePM, pt: PhaseSpacePoint, mode: Optional[AxisMode] = None) -> float:
    """I = 1/2 − (π/2) W_j(μ, δ)、j は軸モードで選ばれる ± 関数"""
    mode = _resolve_mode(state, mode)
    value = 0.5 - 0.5 * np.pi * wigner_point(mode.select(state), pt)
    _check_range(value, f"coincidence_fast({pt.mu}, {pt.delta})")
    return value


def coincidence_oracle(state: General2D, pt: PhaseSpacePoint) -> float:
    """二次元振幅から直接計算する同時計数確率（y 軸の規約）

    I = 1/2 − 1/2 Re ∬ F(p2+μ, p1) F*(p1+μ, p2) e^{2i(p1−p2)δ} dp1 dp2
    """
    if state.grid1 != state.grid2:
        raise DimensionError("直接計算には grid1 == grid2 の正方格子が必要です")
    grid = state.grid1
    p = grid.points
    # shifted[i, j] = F(p_i + μ, p_j)
    shifted = interpolate(state.amp, grid, p + pt.mu)
    lost = state.norm() - integrate_2d(np.abs(shifted) ** 2, grid, grid).real
    if lost > MAX_TRUNCATED_MASS:
        logger.warning(f"μ = {pt.mu} のずらしで振幅が格子外に出ています（切り捨て質量 {lost:.3g}）")
    phase = np.exp(2j * p * pt.delta)
    integrand = shifted.T * np.conj(shifted) * phase[:, None] * np.conj(phase)[None, :]
    value = 0.5 - 0.5 * integrate_2d(integrand, grid, grid).real
    if value < -ORACLE_RANGE_TOL or value > 1.0 + ORACLE_RANGE_TOL:
        raise NumericalIntegrityError(f"直接計算の同時計数確率が範囲外です: I({pt.mu}, {pt.delta}) = {value}")
    return value


def coincidence_mixture(state: Mixture, pt: PhaseSpacePoint, mode: Optional[AxisMode] = None) -> float:
    """成分の同時計数確率の重み付き和"""
    return float(sum(w * coincidence(component, pt, mode) for w, component in zip(state.weights, state.components)))


def coincidence(state: BiphotonState, pt: PhaseSpacePoint, mode: Optional[AxisMode] = None) -> float:
    if isinstance(state, SeparablePM):
        return coincidence_fast(state, pt, mode)
    if isinstance(state, General2D):
        if mode is not None and mode.axis == Axis.X_AXIS:
            raise InvalidStateError("x 軸の一般二光子振幅からの直接計算には対応していません")
        return coincidence_oracle(state, pt)
    if isinstance(state, Mixture):
        return coincidence_mixture(state, pt, mode)
    raise InvalidStateError(f"未知の状態型です: {type(state).__name__}")


def coincidence_2d(
    f_plus_x: SampledWave,
    f_minus_y: SampledWave,
    pt_x: PhaseSpacePoint,
    pt_y: PhaseSpacePoint,
) -> float:
    """二次元の同時計数確率 I = 1/2 − (π²/2) W_{x+} W_{y−}"""
    return 0.5 - 0.5 * np.pi**2 * wigner_point(f_plus_x, pt_x) * wigner_point(f_minus_y, pt_y)


def _evaluate_grid(
    func: Callable[[PhaseSpacePoint], float],
    mu_grid: Grid1D,
    delta_grid: Grid1D,
    workers: int,
) -> np.ndarray:
    deltas = delta_grid.points

    def row(mu):
        return [func(PhaseSpacePoint(mu, d)) for d in deltas]

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            rows = list(executor.map(row, mu_grid.points))
    else:
        rows = [row(mu) for mu in mu_grid.points]
    return np.array(rows, dtype=float)


def coincidence_map(
    state: BiphotonState,
    mu_grid: Grid1D,
    delta_grid: Grid1D,
    mode: Optional[AxisMode] = None,
    workers: int = 1,
) -> PhaseSpaceMap:
    """格子上の I と、それに対応する πW = 1 − 2I を持つマップ"""
    if isinstance(state, SeparablePM):
        mode = _resolve_mode(state, mode)
        wave = mode.select(state)
        phase_map = wigner_map(wave, mu_grid, delta_grid, workers=workers)
        I = 0.5 - 0.5 * phase_map.pi_W
        return phase_map.with_coincidence(I).with_meta(state=state.label, axis=mode.describe())

    if isinstance(state, Mixture) and all(isinstance(c, SeparablePM) for c in state.components):
        # 同時計数確率は密度演算子について線形
        I = np.zeros((mu_grid.n, delta_grid.n))
        for weight, component in zip(state.weights, state.components):
            I = I + weight * coincidence_map(component, mu_grid, delta_grid, mode, workers).I
        return PhaseSpaceMap(mu_grid, delta_grid, (1.0 - 2.0 * I) / np.pi, I, meta={"state": state.label})

    I = _evaluate_grid(lambda pt: coincidence(state, pt, mode), mu_grid, delta_grid, workers)
    W = (1.0 - 2.0 * I) / np.pi
    return PhaseSpaceMap(mu_grid, delta_grid, W, I, meta={"state": getattr(state, "label", "")})


def scan_report(phase_map: PhaseSpaceMap) -> ScanReport:
    """マップから最大値・違反度を集計（同値は行優先で最初のもの）"""
    if phase_map.I is None:
        raise InvalidStateError("同時計数確率を持たないマップは集計できません")
    flat = int(np.argmax(phase_map.I))
    i, j = np.unravel_index(flat, phase_map.shape)
    max_I = float(phase_map.I[i, j])
    if max_I > 1.0 + RANGE_TOL:
        logger.warning(f"最大同時計数確率が1を超えています: {max_I}")
    relative = (max_I - 0.5) / 0.5 if max_I > 0.5 + VIOLATION_TOL else 0.0
    return ScanReport(
        max_I=max_I,
        argmax=phase_map.point(i, j),
        relative_violation=relative,
        negativity_volume=negativity_volume(phase_map),
        grid_spec={"mu": phase_map.mu_grid.describe(), "delta": phase_map.delta_grid.describe()},
        violation_cells=int(np.count_nonzero(phase_map.violation_mask())),
    )


def witness_scan(
    state: BiphotonState,
    mu_grid: Grid1D,
    delta_grid: Grid1D,
    mode: Optional[AxisMode] = None,
    workers: int = 1,
) -> Tuple[ScanReport, PhaseSpaceMap]:
    """格子全体で I を評価し、ウィットネス違反を報告する"""
    phase_map = coincidence_map(state, mu_grid, delta_grid, mode, workers)
    report = scan_report(phase_map)
    logger.info(
        f"ウィットネススキャン: max_I={report.max_I:.6f} @ ({report.argmax.mu:.4f}, {report.argmax.delta:.4f}), "
        f"相対違反={report.relative_violation:.4f}"
    )
    return report, phase_map.with_meta(**report.as_dict())


def scan_2d(
    f_plus_x: SampledWave,
    f_minus_y: SampledWave,
    pt_x: PhaseSpacePoint,
    mu_grid: Grid1D,
    delta_grid: Grid1D,
    workers: int = 1,
) -> PhaseSpaceMap:
    """x 側の点を固定した y 平面の二次元スキャン"""
    pi_wx = np.pi * wigner_point(f_plus_x, pt_x)
    y_map = wigner_map(f_minus_y, mu_grid, delta_grid, workers=workers)
    pi_w = pi_wx * y_map.pi_W
    return PhaseSpaceMap(
        mu_grid,
        delta_grid,
        pi_w / np.pi,
        0.5 - 0.5 * pi_w,
        meta={"pi_W_x": pi_wx, "pt_x": pt_x.as_dict()},
    )


def delay_cut(
    state: BiphotonState,
    mu: float,
    delta_grid: Grid1D,
    mode: Optional[AxisMode] = None,
) -> np.ndarray:
    """μ を固定した遅延のみのスキャン（従来のHOM測定）"""
    return np.array([coincidence(state, PhaseSpacePoint(mu, d), mode) for d in delta_grid.points])


def _clip(value: float, bound: Tuple[float, float]) -> float:
    return float(np.clip(value, bound[0], bound[1]))


def pattern_search(
    objective: Callable[[PhaseSpacePoint], float],
    seed: PhaseSpacePoint,
    bounds: Bounds,
    steps: Tuple[float, float],
    max_iterations: int = MAX_ITERATIONS,
    step_tol: float = STEP_TOL,
) -> MaximizeResult:
    """軸方向の ±step を試し、改善がなければ step を半分にする"""
    (mu_lo, mu_hi), (d_lo, d_hi) = bounds
    if not (mu_lo <= seed.mu <= mu_hi and d_lo <= seed.delta <= d_hi):
        raise InvalidStateError(f"初期点が範囲外です: ({seed.mu}, {seed.delta})")
    step_mu, step_delta = steps
    if not (step_mu > 0 and step_delta > 0):
        raise InvalidStateError(f"初期ステップは正である必要があります: {steps}")

    best = seed
    best_value = objective(seed)
    for iteration in range(1, max_iterations + 1):
        if max(step_mu, step_delta) < step_tol:
            return MaximizeResult(best, best_value, True, iteration - 1)
        candidates = [
            PhaseSpacePoint(_clip(best.mu + step_mu, bounds[0]), best.delta),
            PhaseSpacePoint(_clip(best.mu - step_mu, bounds[0]), best.delta),
            PhaseSpacePoint(best.mu, _clip(best.delta + step_delta, bounds[1])),
            PhaseSpacePoint(best.mu, _clip(best.delta - step_delta, bounds[1])),
        ]
        improved = False
        for candidate in candidates:
            if candidate == best:
                continue
            value = objective(candidate)
            if value > best_value:
                best, best_value, improved = candidate, value, True
        if not improved:
            step_mu *= 0.5
            step_delta *= 0.5

    logger.warning(f"パターンサーチが{max_iterations}回で収束しませんでした（最良値 {best_value:.9f}）")
    return MaximizeResult(best, best_value, False, max_iterations)


def witness_maximize(
    state: BiphotonState,
    seed_pt: PhaseSpacePoint,
    bounds: Bounds,
    mode: Optional[AxisMode] = None,
    steps: Optional[Tuple[float, float]] = None,
    max_iterations: int = MAX_ITERATIONS,
) -> MaximizeResult:
    """I の局所最大を導関数なしで探す"""
    if steps is None:
        steps = ((bounds[0][1] - bounds[0][0]) / 128.0, (bounds[1][1] - bounds[1][0]) / 128.0)
    result = pattern_search(lambda pt: coincidence(state, pt, mode), seed_pt, bounds, steps, max_iterations)
    logger.info(
        f"最大化: I={result.value:.6f} @ ({result.point.mu:.6f}, {result.point.delta:.6f}) "
        f"反復={result.iterations} 収束={result.converged}"
    )
    return result


def refine_scan(
    state: BiphotonState,
    report: ScanReport,
    mu_grid: Grid1D,
    delta_grid: Grid1D,
    mode: Optional[AxisMode] = None,
    max_iterations: int = MAX_ITERATIONS,
) -> MaximizeResult:
    """粗いスキャンの最大セルから格子間隔を初期ステップにして精密化"""
    bounds = ((mu_grid.min, mu_grid.max), (delta_grid.min, delta_grid.max))
    result = witness_maximize(
        state, report.argmax, bounds, mode, steps=(mu_grid.spacing, delta_grid.spacing), max_iterations=max_iterations
    )
    # 高速変換と点評価の丸め差で粗い値を下回らないようにする
    if result.value < report.max_I:
        return MaximizeResult(report.argmax, report.max_I, result.converged, result.iterations)
    return result


def identity_check(
    state: SeparablePM,
    grid2d: Grid1D,
    points: Iterable[PhaseSpacePoint],
    max_truncated: float = 1e-4,
) -> float:
    """二次元振幅からの直接計算と高速経路（y 軸）の最大差"""
    general = to_general2d(state, grid2d, grid2d, max_truncated=max_truncated)
    mode = AxisMode(Axis.Y_AXIS)
    worst = 0.0
    for pt in points:
        diff = abs(coincidence_oracle(general, pt) - coincidence_fast(state, pt, mode))
        logger.debug(f"identity_check ({pt.mu:.5f}, {pt.delta:.5f}): 差 {diff:.3e}")
        worst = max(worst, diff)
    logger.info(f"直接計算と高速経路の最大差: {worst:.3e}")
    return worst


def random_points(
    rng: np.random.Generator,
    count: int,
    mu_limit: float,
    delta_limit: float,
    mu_lattice: Optional[float] = None,
) -> Sequence[PhaseSpacePoint]:
    """検証用のランダムな位相空間の点（mu_lattice 指定時は μ をその格子に乗せる）"""
    if mu_lattice:
        k_max = int(np.floor(mu_limit / mu_lattice))
        mus = rng.integers(-k_max, k_max + 1, size=count) * mu_lattice
    else:
        mus = rng.uniform(-mu_limit, mu_limit, size=count)
    deltas = rng.uniform(-delta_limit, delta_limit, size=count)
    return [PhaseSpacePoint(m, d) for m, d in zip(mus, deltas)]
