"""一次元ウィグナー関数

W(μ, δ) = (1/π) ∫ F(μ+p) F*(μ−p) e^{−2ipδ} dp

遅れ変数 p は0対称の格子で積分し、F(μ±p) は線形補間で評価する
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Any, Dict, Optional

import numpy as np

from errors import DimensionError, NumericalIntegrityError
from lattice import Grid1D, SampledWave, integrate, integrate_2d, lag_grid, oscillatory_transform

logger = logging.getLogger(__name__)

# πW の虚部残差の上限
IMAG_RESIDUE_TOL = 1e-9
VIOLATION_TOL = 1e-4


@dataclass(frozen=True)
class PhaseSpacePoint:
    mu: float
    delta: float

    def __post_init__(self):
        if not (np.isfinite(self.mu) and np.isfinite(self.delta)):
            raise DimensionError(f"位相空間の点が有限ではありません: ({self.mu}, {self.delta})")
        object.__setattr__(self, "mu", float(self.mu))
        object.__setattr__(self, "delta", float(self.delta))

    def as_dict(self) -> Dict[str, float]:
        return {"mu": self.mu, "delta": self.delta}


@dataclass(frozen=True, eq=False)
class PhaseSpaceMap:
    """(μ, δ) 格子上のウィグナー関数と同時計数確率

    W[i, j] は (mu_grid.points[i], delta_grid.points[j]) の値。
    I は省略可能（ウィグナーのみのマップ）
    """

    mu_grid: Grid1D
    delta_grid: Grid1D
    W: np.ndarray
    I: Optional[np.ndarray] = None
    meta: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        shape = (self.mu_grid.n, self.delta_grid.n)
        W = np.array(self.W, dtype=float)
        if W.shape != shape:
            raise DimensionError(f"W の形状が格子と一致しません: {W.shape} != {shape}")
        W.setflags(write=False)
        object.__setattr__(self, "W", W)
        if self.I is not None:
            I = np.array(self.I, dtype=float)
            if I.shape != shape:
                raise DimensionError(f"I の形状が格子と一致しません: {I.shape} != {shape}")
            I.setflags(write=False)
            object.__setattr__(self, "I", I)
        object.__setattr__(self, "meta", dict(self.meta))

    @property
    def shape(self):
        return self.W.shape

    @property
    def pi_W(self) -> np.ndarray:
        return np.pi * self.W

    def point(self, i: int, j: int) -> PhaseSpacePoint:
        return PhaseSpacePoint(self.mu_grid.points[i], self.delta_grid.points[j])

    def violation_mask(self, tol: float = VIOLATION_TOL) -> np.ndarray:
        """I > 1/2 + tol のセル"""
        if self.I is None:
            return np.zeros(self.shape, dtype=bool)
        return self.I > 0.5 + tol

    def with_coincidence(self, I: np.ndarray) -> "PhaseSpaceMap":
        return replace(self, I=I)

    def with_meta(self, **meta) -> "PhaseSpaceMap":
        return replace(self, meta={**self.meta, **meta})


def _check_mu(wave: SampledWave, mu: float) -> None:
    if not wave.grid.contains(mu):
        logger.warning(
            f"μ={mu} が波動関数 {wave.label or '(無名)'} の台 [{wave.grid.min}, {wave.grid.max}] の外です（W はほぼ0になります）"
        )


def _lag_product(wave: SampledWave, mu: float, lags: np.ndarray) -> np.ndarray:
    # F(μ+p) F*(μ−p)：0対称の格子上でエルミート対称になる
    return wave(mu + lags) * np.conj(wave(mu - lags))


def _check_residue(pi_w: np.ndarray, where: str) -> None:
    residue = float(np.max(np.abs(np.imag(pi_w)))) if np.size(pi_w) else 0.0
    if residue > IMAG_RESIDUE_TOL:
        raise NumericalIntegrityError(
            f"{where}: ウィグナー関数の虚部残差が大きすぎます ({residue:.3e} > {IMAG_RESIDUE_TOL:.0e})。格子が粗いか台が切れています"
        )


def wigner_point(wave: SampledWave, pt: PhaseSpacePoint) -> float:
    """1点でのウィグナー関数 W(μ, δ)"""
    _check_mu(wave, pt.mu)
    lags = lag_grid(wave.grid)
    p = lags.points
    integrand = _lag_product(wave, pt.mu, p) * np.exp(-2j * p * pt.delta)
    pi_w = integrate(integrand, lags)
    _check_residue(np.array([pi_w]), f"wigner_point({pt.mu}, {pt.delta})")
    return pi_w.real / np.pi


def _wigner_row(wave: SampledWave, lags: Grid1D, mu: float, deltas: np.ndarray, method: str) -> np.ndarray:
    row = oscillatory_transform(_lag_product(wave, mu, lags.points), lags, deltas, method=method)
    _check_residue(row, f"wigner_map(μ={mu})")
    return row.real / np.pi


def wigner_map(
    wave: SampledWave,
    mu_grid: Grid1D,
    delta_grid: Grid1D,
    workers: int = 1,
    method: str = "auto",
) -> PhaseSpaceMap:
    """μ 行ごとに δ 方向を一括変換してマップを作る

    workers > 1 のとき行をスレッドプールで並列評価する（結果は同一）
    """
    mu_values = mu_grid.points
    if mu_grid.min < wave.grid.min or mu_grid.max > wave.grid.max:
        logger.warning(
            f"μ の範囲 [{mu_grid.min}, {mu_grid.max}] が波動関数 {wave.label or '(無名)'} の台を超えています"
        )
    lags = lag_grid(wave.grid)
    deltas = delta_grid.points

    def row(mu):
        return _wigner_row(wave, lags, mu, deltas, method)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            rows = list(executor.map(row, mu_values))
    else:
        rows = [row(mu) for mu in mu_values]

    logger.debug(f"wigner_map: {wave.label} {mu_grid.n}x{delta_grid.n} を計算しました")
    return PhaseSpaceMap(mu_grid, delta_grid, np.vstack(rows), meta={"wave": wave.label})


def negativity_volume(phase_map: PhaseSpaceMap) -> float:
    """ΣΣ max(−W, 0) Δμ Δδ"""
    cell = phase_map.mu_grid.spacing * phase_map.delta_grid.spacing
    return float(np.sum(np.clip(-phase_map.W, 0.0, None)) * cell)


def wigner_volume(phase_map: PhaseSpaceMap) -> float:
    """∫∫ W dμ dδ（十分広いマップでは1）"""
    return integrate_2d(phase_map.W, phase_map.mu_grid, phase_map.delta_grid).real
