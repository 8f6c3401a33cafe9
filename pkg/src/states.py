"""二光子状態の構成

ポンプ分布 F+、位相整合関数 F-、猫状態、混合状態、表形式の波動関数を
論文の無次元単位（k = L = c = n1 - n2 = 1）で作る
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import List, Sequence, Union

import numpy as np

from errors import DimensionError, InputFileError, InvalidStateError, TruncationError
from lattice import Grid1D, SampledWave, integrate_2d

logger = logging.getLogger(__name__)

MAX_TRUNCATED_MASS = 1e-4
GENERAL2D_NORM_TOL = 1e-8
WEIGHT_SUM_TOL = 1e-12


class Axis(Enum):
    """横方向の軸（y: 入射面に垂直, x: 入射面内）"""

    Y_AXIS = "y"
    X_AXIS = "x"


@dataclass(frozen=True)
class ScenarioParams:
    """シナリオの物理パラメータ（無次元形では k = L = c = 1）"""

    w_p: float = 1.0
    k: float = 1.0
    L: float = 1.0
    n1: float = 2.0
    n2: float = 1.0
    c: float = 1.0
    delta_p_pump: float = 5.0
    cat_width: float = 1.0
    cat_visibility: float = 0.5

    def validate(self, frequency: bool = False) -> None:
        problems = []
        for name in ("w_p", "k", "L", "c", "cat_width"):
            if not getattr(self, name) > 0:
                problems.append(f"{name} は正である必要があります: {getattr(self, name)}")
        if self.delta_p_pump < 0:
            problems.append(f"delta_p_pump は0以上である必要があります: {self.delta_p_pump}")
        if not 0.0 <= self.cat_visibility <= 1.0:
            problems.append(f"cat_visibility は[0, 1]の範囲が必要です: {self.cat_visibility}")
        if frequency and self.n1 == self.n2:
            problems.append("周波数シナリオでは n1 != n2 が必要です")
        if problems:
            raise InvalidStateError("; ".join(problems))

    @property
    def l_over_k(self) -> float:
        return self.L / self.k

    @property
    def dispersion(self) -> float:
        """(n1 - n2) L / c"""
        return (self.n1 - self.n2) * self.L / self.c


@dataclass(frozen=True, eq=False)
class SeparablePM:
    """F+(p1+p2) F-(p1-p2) 型の状態"""

    f_plus: SampledWave
    f_minus: SampledWave
    axis: Axis = Axis.Y_AXIS
    label: str = ""


@dataclass(frozen=True, eq=False)
class General2D:
    """直積格子上の一般の二光子振幅 F(p1, p2)"""

    grid1: Grid1D
    grid2: Grid1D
    amp: np.ndarray
    truncated_mass: float = 0.0
    label: str = ""

    def __post_init__(self):
        amp = np.array(self.amp, dtype=complex)
        if amp.shape != (self.grid1.n, self.grid2.n):
            raise DimensionError(
                f"振幅の形状が格子と一致しません: {amp.shape} != ({self.grid1.n}, {self.grid2.n})"
            )
        amp.setflags(write=False)
        object.__setattr__(self, "amp", amp)
        norm = self.norm()
        if abs(norm - 1.0) > GENERAL2D_NORM_TOL:
            raise InvalidStateError(f"二光子振幅が規格化されていません: norm={norm!r}")

    @classmethod
    def normalized(cls, grid1: Grid1D, grid2: Grid1D, samples, truncated_mass: float = 0.0, label: str = "") -> "General2D":
        samples = np.asarray(samples, dtype=complex)
        if samples.shape != (grid1.n, grid2.n):
            raise DimensionError(f"振幅の形状が格子と一致しません: {samples.shape}")
        norm = integrate_2d(np.abs(samples) ** 2, grid1, grid2).real
        if not np.isfinite(norm) or norm <= 0.0:
            raise InvalidStateError(f"規格化できない二光子振幅です（ノルム={norm}）")
        return cls(grid1, grid2, samples / np.sqrt(norm), truncated_mass=truncated_mass, label=label)

    def norm(self) -> float:
        return integrate_2d(np.abs(self.amp) ** 2, self.grid1, self.grid2).real

    def is_symmetric(self, tol: float = 1e-12) -> bool:
        return self.grid1 == self.grid2 and bool(np.max(np.abs(self.amp - self.amp.T)) <= tol)


PureState = Union[SeparablePM, General2D]


@dataclass(frozen=True, eq=False)
class Mixture:
    """純粋状態の凸結合"""

    weights: np.ndarray
    components: List[PureState] = field(default_factory=list)
    label: str = ""

    def __post_init__(self):
        weights = np.array(self.weights, dtype=float)
        if weights.ndim != 1 or weights.size == 0:
            raise InvalidStateError("重みは空でない1次元配列が必要です")
        if weights.size != len(self.components):
            raise DimensionError(f"重みと成分の数が一致しません: {weights.size} != {len(self.components)}")
        if np.any(weights < 0):
            raise InvalidStateError(f"重みは非負である必要があります: {weights}")
        if abs(weights.sum() - 1.0) > WEIGHT_SUM_TOL:
            raise InvalidStateError(f"重みの和が1ではありません: {weights.sum()!r}")
        for component in self.components:
            if not isinstance(component, (SeparablePM, General2D)):
                raise InvalidStateError(f"混合状態の成分は純粋状態である必要があります: {type(component).__name__}")
        weights.setflags(write=False)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "components", list(self.components))

    @classmethod
    def from_weights(cls, weights: Sequence[float], components: Sequence[PureState], label: str = "") -> "Mixture":
        """重みを和1に揃え、重み0の成分を除いて作る"""
        weights = np.asarray(weights, dtype=float)
        if np.any(weights < 0) or weights.sum() <= 0:
            raise InvalidStateError(f"重みは非負で和が正である必要があります: {weights}")
        keep = [i for i, w in enumerate(weights) if w > 0]
        kept = weights[keep] / weights[keep].sum()
        return cls(kept, [components[i] for i in keep], label=label)


BiphotonState = Union[SeparablePM, General2D, Mixture]


def _sinc(x: np.ndarray) -> np.ndarray:
    """sin(x)/x（sinc(0) = 1）"""
    return np.sinc(x / np.pi)


def gaussian_wave(grid: Grid1D, width: float, center: float = 0.0, label: str = "gaussian") -> SampledWave:
    """exp(-(p - center)^2 / width^2) を規格化した波動関数"""
    if not width > 0:
        raise InvalidStateError(f"幅は正である必要があります: {width}")
    if not grid.contains(center):
        raise InvalidStateError(f"中心が格子の範囲外です: {center}")
    p = grid.points
    return SampledWave.normalized(grid, np.exp(-((p - center) ** 2) / width**2), label=label)


def sinc_quadratic_wave(grid: Grid1D, l_over_k: float = 1.0, label: str = "sinc_quadratic") -> SampledWave:
    """横運動量の位相整合関数 sinc(p^2 L / k)"""
    if not l_over_k > 0:
        raise InvalidStateError(f"L/k は正である必要があります: {l_over_k}")
    p = grid.points
    return SampledWave.normalized(grid, _sinc(p**2 * l_over_k), label=label)


def sinc_linear_wave(grid: Grid1D, dispersion: float = 1.0, label: str = "sinc_linear") -> SampledWave:
    """周波数の位相整合関数 sinc((n1 - n2) L ω / (2√2 c))"""
    if dispersion == 0:
        raise InvalidStateError("(n1 - n2) L / c が0です")
    omega = grid.points
    return SampledWave.normalized(grid, _sinc(dispersion * omega / (2.0 * np.sqrt(2.0))), label=label)


def cat_wave(grid: Grid1D, width: float, separation: float, phase: float = 0.0, label: str = "cat") -> SampledWave:
    """ポンプを二分して運動量方向にずらした猫状態

    exp(-(p - s/2)^2/w^2) + e^{i phase} exp(-(p + s/2)^2/w^2)
    """
    if not width > 0:
        raise InvalidStateError(f"幅は正である必要があります: {width}")
    if separation < 0:
        raise InvalidStateError(f"分離は0以上である必要があります: {separation}")
    p = grid.points
    half = 0.5 * separation
    samples = np.exp(-((p - half) ** 2) / width**2) + np.exp(1j * phase) * np.exp(-((p + half) ** 2) / width**2)
    if phase == 0.0:
        samples = samples.real
    return SampledWave.normalized(grid, samples, label=label)


def tabulated_wave(grid: Grid1D, samples, label: str = "tabulated") -> SampledWave:
    """ユーザー指定の振幅を規格化"""
    samples = np.asarray(samples, dtype=complex)
    if samples.shape != (grid.n,):
        raise DimensionError(f"サンプル数が格子と一致しません: {samples.shape} != ({grid.n},)")
    if not np.any(samples != 0):
        raise InvalidStateError("振幅がすべて0です")
    return SampledWave.normalized(grid, samples, label=label)


def resample_wave(wave: SampledWave, grid: Grid1D) -> SampledWave:
    """別の格子へ線形補間して再規格化"""
    return tabulated_wave(grid, wave(grid.points), label=wave.label)


def gaussian_surrogate(wave: SampledWave) -> SampledWave:
    """平均と分散を合わせたガウス近似

    密度 exp(-2(p-m)^2/w^2) の分散は w^2/4 なので w = 2σ
    """
    sigma = np.sqrt(wave.variance())
    return gaussian_wave(wave.grid, 2.0 * sigma, wave.mean(), label=f"{wave.label}_gaussian")


def load_wave_file(path, label: str = "") -> SampledWave:
    """`p re [im]` 形式のテキストから波動関数を読み込む（# はコメント）"""
    path = Path(path)
    try:
        table = np.loadtxt(path, comments="#", ndmin=2)
    except OSError as e:
        raise InputFileError(f"波動関数ファイルを読み込めません: {path} ({e})") from e
    except ValueError as e:
        raise InvalidStateError(f"波動関数ファイルの書式が不正です: {path} ({e})") from e

    if table.shape[1] not in (2, 3):
        raise InvalidStateError(f"波動関数ファイルは2列または3列が必要です: {table.shape[1]}列")
    grid = Grid1D.from_points(table[:, 0])
    samples = table[:, 1].astype(complex)
    if table.shape[1] == 3:
        samples = samples + 1j * table[:, 2]
    logger.info(f"波動関数ファイルを読み込みました: {path} ({grid.n}点, [{grid.min}, {grid.max}])")
    return tabulated_wave(grid, samples, label=label or path.stem)


def to_general2d(
    state: SeparablePM, grid1: Grid1D, grid2: Grid1D, max_truncated: float = MAX_TRUNCATED_MASS
) -> General2D:
    """F(p1, p2) = F+(p1+p2) F-(p1-p2) を直積格子上に展開

    F± がともに規格化されていれば ∬|F|^2 dp1 dp2 = 1/2（ヤコビアン）なので、
    それとの差を切り捨て質量として記録する
    """
    p1 = grid1.points[:, None]
    p2 = grid2.points[None, :]
    raw = state.f_plus(p1 + p2) * state.f_minus(p1 - p2)
    raw_norm = integrate_2d(np.abs(raw) ** 2, grid1, grid2).real
    truncated = max(0.0, 1.0 - 2.0 * raw_norm)
    if truncated > max_truncated:
        raise TruncationError(
            f"直積格子が狭すぎます: 切り捨て質量 {truncated:.3e} > {max_truncated:.1e}"
        )
    logger.debug(f"to_general2d: 切り捨て質量 {truncated:.3e}")
    return General2D.normalized(grid1, grid2, raw, truncated_mass=truncated, label=state.label)


def product_state(f1: SampledWave, f2: SampledWave, label: str = "product") -> General2D:
    """分離可能な積状態 f1(p1) f2(p2)"""
    return General2D.normalized(f1.grid, f2.grid, np.outer(f1.amp, f2.amp), label=label)


def decohered_cat(
    grid: Grid1D,
    width: float,
    separation: float,
    visibility: float,
    f_minus: SampledWave,
    axis: Axis = Axis.X_AXIS,
) -> Mixture:
    """偶・奇の猫状態を (1±v)/2 で混ぜた、干渉縞の可視度 v の混合状態"""
    if not 0.0 <= visibility <= 1.0:
        raise InvalidStateError(f"可視度は[0, 1]の範囲が必要です: {visibility}")
    even = SeparablePM(cat_wave(grid, width, separation, 0.0, label="cat_even"), f_minus, axis, label="cat_even")
    components: List[PureState] = [even]
    weights = [0.5 * (1.0 + visibility)]
    if visibility < 1.0:
        odd = SeparablePM(cat_wave(grid, width, separation, np.pi, label="cat_odd"), f_minus, axis, label="cat_odd")
        components.append(odd)
        weights.append(0.5 * (1.0 - visibility))
    return Mixture.from_weights(weights, components, label=f"cat_v{visibility:g}")
