"""
Two-sided Wiener paths
양방향 브라운 경로 샘플링, θ_t 이동(shift), 보간 평가, sublinearity 진단

경로는 균일 그리드 위의 값 배열이고 노드 사이에서는 piecewise-linear로 본다.
t ≥ 0 / t ≤ 0 두 가지는 seed에서 파생된 독립 난수 스트림으로 0에서 바깥쪽으로 누적합을 쌓는다.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np
from loguru import logger
from scipy import integrate

from pbl.exceptions import (
    AlignmentError,
    ConfigurationError,
    InsufficientSupportError,
    OutOfSupportError,
)

# 그리드 정렬 판정 허용 오차 (step 단위)
ALIGN_TOL = 1e-9


def _steps(value: float, step: float) -> int:
    """value가 step의 정수배이면 그 정수를, 아니면 AlignmentError"""
    ratio = value / step
    k = int(round(ratio))
    if abs(ratio - k) > ALIGN_TOL * max(1.0, abs(ratio)):
        raise AlignmentError(f"{value!r} is not an integer multiple of step {step!r}")
    return k


@dataclass(frozen=True)
class TimeGrid:
    """Uniform time grid containing 0 exactly"""

    t_min: float
    t_max: float
    step: float
    n_points: int

    def __post_init__(self):
        if not self.step > 0:
            raise ConfigurationError(f"grid step must be positive, got {self.step}")
        if not (self.t_min < 0 < self.t_max):
            raise ConfigurationError(
                f"grid must satisfy t_min < 0 < t_max, got [{self.t_min}, {self.t_max}]"
            )
        try:
            n_neg = _steps(-self.t_min, self.step)
            n_pos = _steps(self.t_max, self.step)
        except AlignmentError as e:
            raise ConfigurationError(f"0 is not a grid node: {e.detail}")
        if n_neg + n_pos + 1 != self.n_points:
            raise ConfigurationError(
                f"n_points={self.n_points} inconsistent with [{self.t_min}, {self.t_max}] / {self.step}"
            )

    @classmethod
    def span(cls, t_min: float, t_max: float, step: float) -> "TimeGrid":
        """[t_min, t_max]를 step 간격으로 덮는 그리드"""
        if not step > 0:
            raise ConfigurationError(f"grid step must be positive, got {step}")
        try:
            n_neg = _steps(-t_min, step)
            n_pos = _steps(t_max, step)
        except AlignmentError as e:
            raise ConfigurationError(f"0 is not a grid node: {e.detail}")
        return cls(t_min=-n_neg * step, t_max=n_pos * step, step=step, n_points=n_neg + n_pos + 1)

    @property
    def zero_index(self) -> int:
        return int(round(-self.t_min / self.step))

    @property
    def times(self) -> np.ndarray:
        # 0 노드가 정확히 0.0이 되도록 인덱스 기준으로 생성
        return (np.arange(self.n_points) - self.zero_index) * self.step

    def times_at(self, idx) -> np.ndarray:
        """times[idx]와 같은 값 (전체 배열을 만들지 않는다)"""
        return (np.asarray(idx) - self.zero_index) * self.step

    def index(self, t: float) -> int:
        """그리드 노드 t의 인덱스 (정렬되지 않으면 AlignmentError)"""
        k = _steps(t, self.step) + self.zero_index
        if k < 0 or k >= self.n_points:
            raise OutOfSupportError(f"t={t} outside grid [{self.t_min}, {self.t_max}]")
        return k

    def contains(self, a: float, b: float) -> bool:
        slack = ALIGN_TOL * self.step
        return self.t_min - slack <= a and b <= self.t_max + slack


@dataclass(frozen=True)
class WienerPath:
    """A sampled two-sided path ω with ω(0) = 0"""

    grid: TimeGrid
    values: np.ndarray = field(repr=False)
    seed: Optional[int]
    origin_shift: float = 0.0
    kind: str = "brownian"
    slope: float = 0.0
    # shift 군 법칙을 비트 단위로 맞추기 위해 원본 배열과 앵커를 보관
    _base: np.ndarray = field(default=None, repr=False, compare=False)
    _anchor: int = field(default=0, repr=False, compare=False)
    _memo: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if self._base is None:
            object.__setattr__(self, "_base", self.values)
            object.__setattr__(self, "_anchor", self.grid.zero_index)
        self.values.setflags(write=False)

    @property
    def step(self) -> float:
        return self.grid.step

    @property
    def times(self) -> np.ndarray:
        return self.grid.times

    def __call__(self, t: float) -> float:
        return eval_path(self, t)

    def side(self, side: str) -> np.ndarray:
        """0에서 바깥쪽 순서의 노드 인덱스 (past: 0, −h, ... / future: 0, h, ...)"""
        z = self.grid.zero_index
        if side == "past":
            return np.arange(z, -1, -1)
        if side == "future":
            return np.arange(z, self.grid.n_points)
        raise ConfigurationError(f"unknown path side {side!r}")

    def tail_sup(self, side: str) -> np.ndarray:
        """
        ε_k = sup_{j ≥ k} |ω(r_j)/r_j| (바깥쪽 인덱스 k 기준, k = 0은 k = 1과 같게)

        꼬리 절단 상계에 쓰는 경험적 sublinearity 상수. 경로마다 한 번 계산해 보관한다.
        """
        cached = self._memo.get(side)
        if cached is not None:
            return cached
        if side not in ("past", "future"):
            raise ConfigurationError(f"unknown path side {side!r}")
        z = self.grid.zero_index
        w = self.values[z::-1] if side == "past" else self.values[z:]
        ratio = np.abs(w)
        if ratio.size > 1:
            ratio[1:] /= np.arange(1, ratio.size) * self.step
            ratio[0] = ratio[1]
        else:
            ratio[:] = 0.0
        profile = np.maximum.accumulate(ratio[::-1])[::-1]
        profile.setflags(write=False)
        self._memo[side] = profile
        return profile

    def segment(self, a: float, b: float) -> Tuple[np.ndarray, np.ndarray]:
        """노드 시각/값 조각 [a, b] (양 끝은 그리드 노드여야 함)"""
        i, j = self.grid.index(a), self.grid.index(b)
        if j < i:
            raise ConfigurationError(f"empty segment [{a}, {b}]")
        return self.grid.times_at(np.arange(i, j + 1)), self.values[i:j + 1]


def _require_seed(seed: int) -> int:
    if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)):
        raise ConfigurationError(f"seed must be an integer, got {seed!r}")
    if seed < 0 or seed >= 2 ** 64:
        raise ConfigurationError(f"seed must fit in 64 unsigned bits, got {seed}")
    return int(seed)


def _side_streams(seed: int) -> Tuple[np.random.Generator, np.random.Generator]:
    """seed → (음의 시간 스트림, 양의 시간 스트림)"""
    negative, positive = np.random.SeedSequence(seed).spawn(2)
    return np.random.default_rng(negative), np.random.default_rng(positive)


def sample_path(seed: int, grid: TimeGrid) -> WienerPath:
    """
    Sample a two-sided Brownian path

    각 방향으로 0에서 바깥쪽으로 증분을 뽑으므로 같은 seed로 더 넓은 그리드를 뽑으면
    공통 구간의 값은 비트 단위로 같다 (prefix-consistent).
    """
    seed = _require_seed(seed)
    z = grid.zero_index
    n_neg = z
    n_pos = grid.n_points - z - 1
    rng_neg, rng_pos = _side_streams(seed)
    scale = np.sqrt(grid.step)

    values = np.empty(grid.n_points)
    values[z] = 0.0
    if n_pos:
        values[z + 1:] = np.cumsum(rng_pos.standard_normal(n_pos) * scale)
    if n_neg:
        values[:z] = np.cumsum(rng_neg.standard_normal(n_neg) * scale)[::-1]

    logger.debug(f"🎲 Sampled path seed={seed} on [{grid.t_min}, {grid.t_max}] step={grid.step}")
    return WienerPath(grid=grid, values=values, seed=seed)


def zero_path(grid: TimeGrid) -> WienerPath:
    """ω ≡ 0 (결정론적 극한 oracle용)"""
    return WienerPath(grid=grid, values=np.zeros(grid.n_points), seed=None, kind="zero")


def linear_path(grid: TimeGrid, slope: float = 1.0) -> WienerPath:
    """ω(t) = slope·t (sublinearity oracle용)"""
    return WienerPath(
        grid=grid, values=slope * grid.times, seed=None, kind="linear", slope=slope
    )


def widen(path: WienerPath, t_min: Optional[float] = None, t_max: Optional[float] = None) -> WienerPath:
    """같은 seed로 더 넓은 창에서 다시 샘플링 (공통 구간은 동일)"""
    if path.origin_shift != 0.0:
        raise ConfigurationError("only unshifted paths can be widened")
    lo = min(path.grid.t_min, t_min) if t_min is not None else path.grid.t_min
    hi = max(path.grid.t_max, t_max) if t_max is not None else path.grid.t_max
    grid = TimeGrid.span(lo, hi, path.step)
    logger.info(f"↔️ Widening path (seed={path.seed}, kind={path.kind}) to [{grid.t_min}, {grid.t_max}]")
    if path.kind == "zero":
        return zero_path(grid)
    if path.kind == "linear":
        return linear_path(grid, path.slope)
    return sample_path(path.seed, grid)


def shift(path: WienerPath, t: float, window: Optional[Tuple[float, float]] = None) -> WienerPath:
    """
    θ_t ω(·) = ω(· + t) − ω(t)

    Args:
        t: 이동량 (path.step의 정수배)
        window: 호출자가 평가할 구간 (a, b). 이동된 경로가 덮지 못하면 InsufficientSupportError
    """
    k = _steps(t, path.step)
    anchor = path._anchor + k
    base = path._base
    n = base.shape[0]
    if anchor <= 0 or anchor >= n - 1:
        raise InsufficientSupportError(
            f"shift by {t} leaves no data on one side of the origin",
            required_window=(
                path.origin_shift + path.grid.t_min + min(t, 0.0) - path.step,
                path.origin_shift + path.grid.t_max + max(t, 0.0) + path.step,
            ),
        )
    grid = TimeGrid(
        t_min=-anchor * path.step,
        t_max=(n - 1 - anchor) * path.step,
        step=path.step,
        n_points=n,
    )
    if window is not None:
        a, b = window
        if not grid.contains(a, b):
            raise InsufficientSupportError(
                f"shifted path covers [{grid.t_min}, {grid.t_max}], window [{a}, {b}] requested",
                required_window=(a + path.origin_shift + t, b + path.origin_shift + t),
            )
    values = base - base[anchor]
    return WienerPath(
        grid=grid,
        values=values,
        seed=path.seed,
        origin_shift=path.origin_shift + k * path.step,
        kind=path.kind,
        slope=path.slope,
        _base=base,
        _anchor=anchor,
    )


def eval_path(path: WienerPath, t: float) -> float:
    """노드에서는 저장값, 그 사이에서는 선형 보간"""
    grid = path.grid
    pos = (t - grid.t_min) / grid.step
    slack = ALIGN_TOL * max(1.0, abs(pos))
    if pos < -slack or pos > grid.n_points - 1 + slack:
        raise OutOfSupportError(f"t={t} outside grid [{grid.t_min}, {grid.t_max}]")
    k = int(round(pos))
    if abs(pos - k) <= slack:
        return float(path.values[min(max(k, 0), grid.n_points - 1)])
    i = int(np.floor(pos))
    w = pos - i
    return float((1.0 - w) * path.values[i] + w * path.values[i + 1])


def eval_many(path: WienerPath, ts: np.ndarray) -> np.ndarray:
    """벡터화된 eval (support 밖이면 OutOfSupportError)"""
    ts = np.asarray(ts, dtype=float)
    grid = path.grid
    if ts.size and (ts.min() < grid.t_min - ALIGN_TOL * grid.step or ts.max() > grid.t_max + ALIGN_TOL * grid.step):
        raise OutOfSupportError(f"evaluation outside grid [{grid.t_min}, {grid.t_max}]")
    return np.interp(ts, path.times, path.values)


@dataclass(frozen=True)
class SublinearityReport:
    """sup |ω(t)/t| 진단"""

    t0: float
    sup_ratio: float
    sup_past: float
    sup_future: float
    argmax: float
    recommended_eps: float

    def to_dict(self) -> dict:
        return {
            "t0": self.t0,
            "sup_ratio": self.sup_ratio,
            "sup_past": self.sup_past,
            "sup_future": self.sup_future,
            "argmax": self.argmax,
            "recommended_eps": self.recommended_eps,
        }


def ratio_profile(path: WienerPath) -> Tuple[np.ndarray, np.ndarray]:
    """(t, |ω(t)/t|) for t ≠ 0"""
    times = path.times
    mask = times != 0.0
    return times[mask], np.abs(path.values[mask] / times[mask])


def sublinearity_report(path: WienerPath, t0: float = 1.0) -> SublinearityReport:
    """
    Empirical sublinear-growth constant

    sup_ratio는 |t| ≥ t0 전체의 최댓값, recommended_eps는 창의 먼 절반(|t| ≥ 창/2)에서의
    최댓값으로 꼬리 절단 상계에 쓰인다.
    """
    grid = path.grid
    if not (grid.t_min <= -t0 or grid.t_max >= t0):
        raise InsufficientSupportError(
            f"grid [{grid.t_min}, {grid.t_max}] does not reach |t| = {t0}",
            required_window=(-t0, t0),
        )
    times, ratio = ratio_profile(path)
    far = np.abs(times) >= t0
    past = far & (times < 0)
    future = far & (times > 0)
    sup_past = float(ratio[past].max()) if past.any() else 0.0
    sup_future = float(ratio[future].max()) if future.any() else 0.0
    sup_ratio = max(sup_past, sup_future)
    argmax = float(times[far][np.argmax(ratio[far])]) if far.any() else 0.0

    half = max(t0, 0.5 * max(-grid.t_min, grid.t_max))
    tail = np.abs(times) >= half
    recommended = float(ratio[tail].max()) if tail.any() else sup_ratio
    return SublinearityReport(
        t0=t0,
        sup_ratio=sup_ratio,
        sup_past=sup_past,
        sup_future=sup_future,
        argmax=argmax,
        recommended_eps=recommended,
    )


def divergence_report(path: WienerPath, delta: float) -> dict:
    """∫_{−T}^0 e^{2δω} 와 ∫_0^T e^{2δω} 의 유한 창 값 (발산 성질 진단)"""
    times = path.times
    z = path.grid.zero_index
    weights = np.exp(2.0 * delta * path.values)
    past = float(integrate.trapezoid(weights[:z + 1], dx=path.step))
    future = float(integrate.trapezoid(weights[z:], dx=path.step))
    return {
        "delta": delta,
        "window": [float(times[0]), float(times[-1])],
        "past_integral": past,
        "future_integral": future,
        "past_per_unit_time": past / max(-float(times[0]), path.step),
        "future_per_unit_time": future / max(float(times[-1]), path.step),
    }
