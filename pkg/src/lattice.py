"""一様格子・台形則・振動核変換

運動量（または周波数）変数の離散化と、各物理モジュールが使う積分の土台
"""

import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.integrate import trapezoid
from scipy.signal import czt

from errors import DimensionError, InvalidStateError, NumericalIntegrityError

logger = logging.getLogger(__name__)

MIN_POINTS = 8
DEFAULT_NORM_TOL = 1e-10
BOUNDARY_DECAY = 1e-6
UNIFORM_RTOL = 1e-9
# 等間隔δがこの個数以上あればchirp-z経路を使う
CZT_MIN_DELTAS = 16
# 直接法で一度に作る核行列の行数
DIRECT_CHUNK = 64
# 格子点からこの割合以内のはみ出しは格子端とみなす
_SNAP = 1e-9


@dataclass(frozen=True)
class Grid1D:
    """連続変数の一様サンプリング格子"""

    min: float
    max: float
    n: int

    def __post_init__(self):
        if not (np.isfinite(self.min) and np.isfinite(self.max)):
            raise DimensionError(f"格子の端点が有限ではありません: [{self.min}, {self.max}]")
        if int(self.n) != self.n or self.n < MIN_POINTS:
            raise DimensionError(f"格子点数は{MIN_POINTS}以上の整数が必要です: n={self.n}")
        if not self.max > self.min:
            raise DimensionError(f"max > min が必要です: [{self.min}, {self.max}]")
        object.__setattr__(self, "min", float(self.min))
        object.__setattr__(self, "max", float(self.max))
        object.__setattr__(self, "n", int(self.n))

    @property
    def spacing(self) -> float:
        return (self.max - self.min) / (self.n - 1)

    @property
    def points(self) -> np.ndarray:
        # 端点は max と厳密に一致させる
        return np.linspace(self.min, self.max, self.n)

    @property
    def center(self) -> float:
        return 0.5 * (self.min + self.max)

    @property
    def half_width(self) -> float:
        return 0.5 * (self.max - self.min)

    def contains(self, x: float) -> bool:
        return self.min <= x <= self.max

    def describe(self) -> dict:
        return {"min": self.min, "max": self.max, "n": self.n}

    @classmethod
    def with_spacing(cls, half_width: float, spacing: float) -> "Grid1D":
        """[-half_width, half_width] を指定間隔で刻む格子"""
        n = int(round(2.0 * half_width / spacing)) + 1
        return cls(-half_width, half_width, n)

    @classmethod
    def from_points(cls, points, rtol: float = UNIFORM_RTOL) -> "Grid1D":
        """サンプル点列から格子を復元（等間隔でなければエラー）"""
        points = np.asarray(points, dtype=float)
        if points.ndim != 1 or points.size < MIN_POINTS:
            raise DimensionError(f"格子点列は{MIN_POINTS}点以上の1次元配列が必要です")
        grid = cls(points[0], points[-1], points.size)
        steps = np.diff(points)
        if np.max(np.abs(steps - grid.spacing)) > rtol * grid.spacing:
            raise DimensionError("サンプル点が等間隔ではありません")
        return grid


def lag_grid(grid: Grid1D) -> Grid1D:
    """ウィグナー積分の遅れ変数 p 用の、0対称で同じ間隔の格子"""
    return Grid1D(-grid.half_width, grid.half_width, grid.n)


def _check_length(values: np.ndarray, grid: Grid1D, axis: int = 0) -> None:
    if values.shape[axis] != grid.n:
        raise DimensionError(f"サンプル数が格子と一致しません: {values.shape[axis]} != {grid.n}")


def integrate(values, grid: Grid1D) -> complex:
    """台形則による ∫ values dp"""
    values = np.asarray(values)
    if values.ndim != 1:
        raise DimensionError(f"1次元配列が必要です: shape={values.shape}")
    _check_length(values, grid)
    return complex(trapezoid(values, dx=grid.spacing))


def integrate_2d(values, grid1: Grid1D, grid2: Grid1D) -> complex:
    """直積台形則による ∬ values dp1 dp2（行が grid1、列が grid2）"""
    values = np.asarray(values)
    if values.ndim != 2:
        raise DimensionError(f"2次元配列が必要です: shape={values.shape}")
    _check_length(values, grid1, axis=0)
    _check_length(values, grid2, axis=1)
    inner = trapezoid(values, dx=grid2.spacing, axis=1)
    return complex(trapezoid(inner, dx=grid1.spacing))


def interpolate(values, grid: Grid1D, x) -> np.ndarray:
    """線形補間。台の外は0

    values が2次元なら axis=0 に沿って補間する（x は1次元）
    """
    values = np.asarray(values)
    _check_length(values, grid)
    x = np.asarray(x, dtype=float)
    if values.ndim > 1 and x.ndim != 1:
        raise DimensionError("2次元以上の補間では x は1次元配列が必要です")

    s = (x - grid.min) / grid.spacing
    finite = np.isfinite(s)
    s = np.where(finite, s, -1.0)
    inside = finite & (s >= -_SNAP) & (s <= grid.n - 1 + _SNAP)
    i0 = np.clip(np.floor(s).astype(np.int64), 0, grid.n - 2)
    t = np.clip(s - i0, 0.0, 1.0)

    if values.ndim > 1:
        extra = (1,) * (values.ndim - 1)
        t = t.reshape(t.shape + extra)
        inside = inside.reshape(inside.shape + extra)
    result = (1.0 - t) * values[i0] + t * values[i0 + 1]
    return np.where(inside, result, 0.0)


def _is_uniform(deltas: np.ndarray) -> bool:
    if deltas.size < 2:
        return False
    step = (deltas[-1] - deltas[0]) / (deltas.size - 1)
    if step == 0.0:
        return False
    return bool(np.max(np.abs(np.diff(deltas) - step)) <= UNIFORM_RTOL * abs(step))


def _direct_transform(values: np.ndarray, grid: Grid1D, deltas: np.ndarray) -> np.ndarray:
    p = grid.points
    out = np.empty(deltas.size, dtype=complex)
    for start in range(0, deltas.size, DIRECT_CHUNK):
        block = deltas[start:start + DIRECT_CHUNK]
        kernel = np.exp(-2j * np.outer(block, p))
        out[start:start + DIRECT_CHUNK] = trapezoid(kernel * values, dx=grid.spacing, axis=1)
    return out


def _czt_transform(values: np.ndarray, grid: Grid1D, deltas: np.ndarray) -> np.ndarray:
    # Σ_j w_j v_j exp(-2i (p0 + j dp)(d0 + k dd)) を Bluestein の chirp-z で評価
    m = deltas.size
    d0 = deltas[0]
    dd = (deltas[-1] - deltas[0]) / (m - 1)
    dp = grid.spacing
    weighted = values * dp
    weighted[0] *= 0.5
    weighted[-1] *= 0.5
    a = np.exp(2j * dp * d0)
    w = np.exp(-2j * dp * dd)
    spectrum = czt(weighted, m=m, w=w, a=a)
    return spectrum * np.exp(-2j * grid.min * (d0 + np.arange(m) * dd))


def oscillatory_transform(values, grid: Grid1D, deltas, method: str = "auto") -> np.ndarray:
    """各 δ について ∫ values(p) e^{-2ipδ} dp を返す

    method: "auto"（等間隔なら chirp-z）、"direct"、"czt"
    """
    values = np.asarray(values, dtype=complex)
    if values.ndim != 1:
        raise DimensionError(f"1次元配列が必要です: shape={values.shape}")
    _check_length(values, grid)
    deltas = np.atleast_1d(np.asarray(deltas, dtype=float))

    if method == "auto":
        method = "czt" if deltas.size >= CZT_MIN_DELTAS and _is_uniform(deltas) else "direct"
    if method == "direct":
        return _direct_transform(values, grid, deltas)
    if method == "czt":
        if not _is_uniform(deltas):
            raise DimensionError("chirp-z 経路には等間隔の δ が必要です")
        return _czt_transform(values.copy(), grid, deltas)
    raise ValueError(f"未知の変換方式: {method}")


@dataclass(frozen=True, eq=False)
class SampledWave:
    """格子上でサンプルされた規格化済み複素振幅"""

    grid: Grid1D
    amp: np.ndarray
    norm_tol: float = DEFAULT_NORM_TOL
    label: str = ""
    boundary_ratio: float = field(init=False, default=0.0)

    def __post_init__(self):
        amp = np.array(self.amp, dtype=complex)
        if amp.ndim != 1:
            raise DimensionError(f"振幅は1次元配列が必要です: shape={amp.shape}")
        _check_length(amp, self.grid)
        if not np.all(np.isfinite(amp)):
            raise InvalidStateError("振幅に有限でない値が含まれています")
        amp.setflags(write=False)
        object.__setattr__(self, "amp", amp)

        norm = integrate(np.abs(amp) ** 2, self.grid).real
        if abs(norm - 1.0) > self.norm_tol:
            raise NumericalIntegrityError(f"波動関数が規格化されていません: norm={norm!r}")

        intensity = np.abs(amp) ** 2
        peak = float(intensity.max())
        ratio = float(max(intensity[0], intensity[-1]) / peak) if peak > 0 else 0.0
        object.__setattr__(self, "boundary_ratio", ratio)
        if ratio > BOUNDARY_DECAY:
            logger.warning(
                f"波動関数 {self.label or '(無名)'} が格子端で十分減衰していません: "
                f"|amp|^2端/最大 = {ratio:.3e}（台の切り捨ての可能性）"
            )

    @classmethod
    def normalized(
        cls, grid: Grid1D, samples, label: str = "", norm_tol: float = DEFAULT_NORM_TOL
    ) -> "SampledWave":
        """サンプルを規格化して SampledWave を作る"""
        samples = np.asarray(samples, dtype=complex)
        if samples.ndim != 1:
            raise DimensionError(f"1次元配列が必要です: shape={samples.shape}")
        _check_length(samples, grid)
        norm = integrate(np.abs(samples) ** 2, grid).real
        if not np.isfinite(norm) or norm <= 0.0:
            raise InvalidStateError(f"規格化できない振幅です（ノルム={norm}）")
        return cls(grid, samples / np.sqrt(norm), norm_tol=norm_tol, label=label)

    def __call__(self, x) -> np.ndarray:
        return interpolate(self.amp, self.grid, x)

    def norm(self) -> float:
        return integrate(np.abs(self.amp) ** 2, self.grid).real

    def mean(self) -> float:
        return integrate(self.grid.points * np.abs(self.amp) ** 2, self.grid).real

    def second_moment(self, about: Optional[float] = None) -> float:
        center = 0.0 if about is None else about
        return integrate((self.grid.points - center) ** 2 * np.abs(self.amp) ** 2, self.grid).real

    def variance(self) -> float:
        return self.second_moment(about=self.mean())

    def is_real(self, tol: float = 1e-12) -> bool:
        return bool(np.max(np.abs(self.amp.imag)) <= tol * np.max(np.abs(self.amp)))

    def is_even(self, tol: float = 1e-9) -> bool:
        if abs(self.grid.center) > tol * self.grid.half_width:
            return False
        return bool(np.max(np.abs(self.amp - self.amp[::-1])) <= tol * np.max(np.abs(self.amp)))
