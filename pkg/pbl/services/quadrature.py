"""
Quadrature Service
∫ e^{a·r + b·ω(r)} W(r + offset) dr 형태 적분 (유한 구간 / 절단된 반무한 구간)

모든 지수 인자는 최댓값 기준으로 스케일해서 다루고, 결과는 log 값으로 돌려준다.
기본 규칙("exponential")은 셀마다 선형 지수 × 2차 보간 가중치를 정확히 적분하므로
ω ≡ 0, 상수 W에서는 반올림 오차를 빼면 정확하다. "trapezoid"는 scipy의 사다리꼴 규칙.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Tuple

import numpy as np
from loguru import logger
from scipy import integrate

from pbl.config import settings
from pbl.exceptions import ConfigurationError, DomainError, InsufficientSupportError
from pbl.services.wiener import WienerPath

RULES = ("exponential", "trapezoid")

# |d| < SERIES_CUTOFF 에서는 moment를 급수로 계산
SERIES_CUTOFF = 0.5
SERIES_TERMS = 18

# 반무한 적분에서 한 번에 다루는 최대 노드 수
BLOCK_NODES = 1 << 20

Weight = Optional[Callable[[np.ndarray], np.ndarray]]


@dataclass(frozen=True)
class QuadratureSpec:
    """Quadrature / truncation settings"""

    rel_tol: float = field(default_factory=lambda: settings.REL_TOL)
    max_truncation: Optional[float] = None
    rule: str = field(default_factory=lambda: settings.QUADRATURE_RULE)

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise ConfigurationError(f"rel_tol must be positive, got {self.rel_tol}")
        if self.max_truncation is not None and not self.max_truncation > 0:
            raise ConfigurationError(f"max_truncation must be positive, got {self.max_truncation}")
        if self.rule not in RULES:
            raise ConfigurationError(f"unknown quadrature rule {self.rule!r} (expected one of {', '.join(RULES)})")


@dataclass(frozen=True)
class ImproperIntegral:
    """절단된 반무한 적분 결과"""

    log_value: float
    truncation: float
    tail_bound: float  # 상대 꼬리 상계 (bound / partial)
    side: str

    @property
    def value(self) -> float:
        return math.exp(self.log_value)


def _moments(d: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """M_k(d) = ∫_0^1 u^k e^{du} du, k = 0, 1, 2"""
    d = np.asarray(d, dtype=float)
    m0 = np.empty_like(d)
    m1 = np.empty_like(d)
    m2 = np.empty_like(d)

    small = np.abs(d) < SERIES_CUTOFF
    if np.any(small):
        ds = d[small]
        term = np.ones_like(ds)
        s0 = np.zeros_like(ds)
        s1 = np.zeros_like(ds)
        s2 = np.zeros_like(ds)
        for n in range(SERIES_TERMS):
            s0 += term / (n + 1)
            s1 += term / (n + 2)
            s2 += term / (n + 3)
            term = term * ds / (n + 1)
        m0[small], m1[small], m2[small] = s0, s1, s2

    large = ~small
    if np.any(large):
        dl = d[large]
        ed = np.exp(dl)
        l0 = np.expm1(dl) / dl
        l1 = (ed - l0) / dl
        l2 = (ed - 2.0 * l1) / dl
        m0[large], m1[large], m2[large] = l0, l1, l2
    return m0, m1, m2


def fitted_weights(d: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Exponentially fitted Simpson weights on a unit cell

    ∫_0^1 e^{du} q(u) du = w0·q(0) + wm·q(½) + w1·q(1) for every quadratic q.
    d = 0 에서 Simpson 가중치 (1/6, 2/3, 1/6).
    """
    m0, m1, m2 = _moments(d)
    return 2.0 * m2 - 3.0 * m1 + m0, 4.0 * (m1 - m2), 2.0 * m2 - m1


def weighted_cells(
    exponent: np.ndarray,
    w_nodes: np.ndarray,
    w_mid: Optional[np.ndarray],
    step: float,
    rule: str,
) -> Tuple[float, np.ndarray]:
    """셀별 ∫ e^{E − m} W (m = max E) → (m, cells)"""
    m = float(np.max(exponent))
    if rule == "trapezoid":
        scaled = np.exp(exponent - m) * w_nodes
        return m, 0.5 * step * (scaled[:-1] + scaled[1:])
    w0, wm, w1 = fitted_weights(np.diff(exponent))
    cells = step * np.exp(exponent[:-1] - m) * (w0 * w_nodes[:-1] + wm * w_mid + w1 * w_nodes[1:])
    return m, cells


def _weights(weight: Weight, r: np.ndarray, offset: float, rule: str) -> Tuple[np.ndarray, Optional[np.ndarray]]:
    if weight is None:
        ones = np.ones_like(r)
        return ones, (ones[:-1] if rule == "exponential" else None)
    nodes = np.asarray(weight(r + offset), dtype=float)
    if rule != "exponential":
        return nodes, None
    mids = np.asarray(weight(0.5 * (r[:-1] + r[1:]) + offset), dtype=float)
    return nodes, mids


def _segment_nodes(path: WienerPath, t0: float, t1: float) -> Tuple[np.ndarray, np.ndarray]:
    i, j = path.grid.index(t0), path.grid.index(t1)
    if j < i:
        raise ConfigurationError(f"segment [{t0}, {t1}] is reversed")
    return path.grid.times_at(np.arange(i, j + 1)), path.values[i:j + 1]


def segment_log_integral(
    path: WienerPath,
    t0: float,
    t1: float,
    a: float,
    b: float,
    weight: Weight = None,
    offset: float = 0.0,
    rule: str = "exponential",
) -> float:
    """log ∫_{t0}^{t1} e^{a r + b ω(r)} W(r + offset) dr (빈 구간이면 −inf)"""
    if t1 == t0:
        return -math.inf
    r, w = _segment_nodes(path, t0, t1)
    exponent = a * r + b * w
    wn, wm = _weights(weight, r, offset, rule)
    if rule == "trapezoid":
        m = float(np.max(exponent))
        total = float(integrate.trapezoid(np.exp(exponent - m) * wn, dx=path.step))
    else:
        m, cells = weighted_cells(exponent, wn, wm, path.step, rule)
        total = float(np.sum(cells))
    if total <= 0.0:
        return -math.inf
    return m + math.log(total)


def segment_cumulative(
    path: WienerPath,
    t0: float,
    t1: float,
    a: float,
    b: float,
    weight: Weight = None,
    offset: float = 0.0,
    rule: str = "exponential",
) -> Tuple[np.ndarray, np.ndarray, float, np.ndarray]:
    """
    노드별 누적 적분 (스케일된 형태)

    Returns:
        (r, exponent, m, cumulative) with ∫_{t0}^{r_k} = e^m · cumulative[k]
    """
    r, w = _segment_nodes(path, t0, t1)
    exponent = a * r + b * w
    wn, wm = _weights(weight, r, offset, rule)
    if rule == "trapezoid":
        m = float(np.max(exponent))
        cumulative = integrate.cumulative_trapezoid(np.exp(exponent - m) * wn, dx=path.step, initial=0.0)
    else:
        m, cells = weighted_cells(exponent, wn, wm, path.step, rule)
        cumulative = np.concatenate(([0.0], np.cumsum(cells)))
    return r, exponent, m, cumulative


def improper_log_integral(
    path: WienerPath,
    a: float,
    b: float,
    weight: Weight,
    weight_bound: float,
    spec: QuadratureSpec,
    offset: float = 0.0,
    side: str = "past",
) -> ImproperIntegral:
    """
    Certified truncation of ∫_{−∞}^0 (past) or ∫_0^∞ (future) of e^{a r + b ω(r)} W(r + offset) dr

    꼬리 ∫_{|r|>R}는 W₁·e^{−ρR}/ρ 로 상계한다. ρ = decay − |b|·ε(R),
    ε(R)는 |r| ≥ R 구간의 경험적 sup |ω(r)/r|. 상계가 rel_tol × 부분적분 아래로
    내려가는 가장 작은 그리드 R을 쓴다.
    """
    decay = a if side == "past" else -a
    if not decay > 0:
        raise DomainError(f"exponential weight does not decay on the {side} side (rate {a})")
    if weight_bound < 0:
        raise ConfigurationError(f"weight bound must be nonnegative, got {weight_bound}")
    if weight_bound == 0.0:
        return ImproperIntegral(log_value=-math.inf, truncation=0.0, tail_bound=0.0, side=side)

    grid = path.grid
    support = -grid.t_min if side == "past" else grid.t_max
    limit = support if spec.max_truncation is None else min(support, spec.max_truncation)
    n_avail = int(math.floor(limit / grid.step + 1e-9))
    if n_avail < 1:
        raise InsufficientSupportError(f"no path support on the {side} side", truncation=True)

    z = grid.zero_index
    outward = -1 if side == "past" else 1
    eps = path.tail_sup(side)
    log_w1 = math.log(weight_bound)
    log_tol = math.log(spec.rel_tol)
    beta = abs(b)

    # 바깥쪽 노드 구간 [k0, k1]씩 진행, 누적값은 log 척도로 이어 붙인다
    # 첫 구간 길이: 지수 감쇠만으로 rel_tol에 닿는 길이의 두 배
    guess = 2.0 * (-log_tol + 1.0) / decay
    size = min(BLOCK_NODES, max(16, int(math.ceil(guess / grid.step))))
    last_log = -math.inf
    k0 = 0
    while k0 < n_avail:
        k1 = min(n_avail, k0 + size)
        k = np.arange(k0, k1 + 1)
        r = (outward * k) * grid.step
        exponent = a * r + b * path.values[z + outward * k]
        wn, wm = _weights(weight, r, offset, spec.rule)
        m, cells = weighted_cells(exponent, wn, wm, grid.step, spec.rule)
        with np.errstate(divide="ignore"):
            log_partial = np.logaddexp(last_log, m + np.log(np.cumsum(cells)))
        R = k[1:] * grid.step
        rate = decay - beta * eps[k0 + 1:k1 + 1]
        ok_rate = rate > 0
        with np.errstate(divide="ignore", invalid="ignore"):
            log_bound = np.where(ok_rate, log_w1 - rate * R - np.log(np.where(ok_rate, rate, 1.0)), np.inf)
        hit = np.flatnonzero(ok_rate & (log_bound < log_tol + log_partial))
        if hit.size:
            j = int(hit[0])
            tail = float(math.exp(log_bound[j] - log_partial[j]))
            logger.debug(f"∫ certified on {side} side at R={R[j]:.6g} (tail ≤ {tail:.3g} relative)")
            return ImproperIntegral(log_value=float(log_partial[j]), truncation=float(R[j]), tail_bound=tail, side=side)
        last_log = float(log_partial[-1])
        k0 = k1
        size = min(BLOCK_NODES, 2 * size)

    # support 소진 → 필요한 R 추정
    rate_far = decay - beta * float(eps[n_avail])
    if rate_far > 0:
        required = (log_w1 - math.log(rate_far) - log_tol - last_log) / rate_far
        required = max(required, (n_avail + 1) * grid.step)
    else:
        required = None
    reach = (required if required else 2.0 * support) * 1.25
    # 창은 원래(이동 전) 경로 좌표로 보고
    shift = path.origin_shift
    if side == "past":
        window = (shift - reach, shift + grid.t_max)
    else:
        window = (shift + grid.t_min, shift + reach)
    capped = " (capped by max_truncation)" if limit < support else ""
    raise InsufficientSupportError(
        f"tail bound not achievable within {limit:g} time units on the {side} side{capped}; "
        f"required truncation {'unknown (sublinearity constant too large)' if required is None else f'{required:.6g}'}",
        required_window=window,
        required_truncation=required,
        truncation=True,
    )
