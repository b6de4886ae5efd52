"""
Recurrence Service
고정 ω 위에서 quasi-solution trace의 주기 / 거의 주기 / 거의 자기동형 판정

모든 판정은 유한 창 위의 대리 판정이다. 상대 조밀성은 max gap 통계로만 보고한다.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from loguru import logger
from numpy.lib.stride_tricks import sliding_window_view

from pbl.exceptions import AlignmentError, ConfigurationError, CoverageError
from pbl.models.results import CheckReport, QuasiSolutionTrace
from pbl.services.wiener import WienerPath

MIN_SUBSEQUENCE = 3
LAG_TOL = 1e-6


def _lag(trace: QuasiSolutionTrace, t: float) -> int:
    """t를 trace 격자 간격의 정수배로"""
    step = trace.step
    k = t / step
    if abs(k - round(k)) > LAG_TOL * max(1.0, abs(k)):
        raise AlignmentError(f"shift {t} is not a multiple of the trace step {step}")
    lag = int(round(k))
    if lag < 1:
        raise AlignmentError(f"shift {t} is shorter than the trace step {step}")
    return lag


def _sup_residual(values: np.ndarray) -> float:
    return float(np.max(np.abs(values))) if np.all(np.isfinite(values)) else math.inf


def detect_period(trace: QuasiSolutionTrace, T: float, tol: float) -> CheckReport:
    """max over covered τ of |ξ(τ+T) − ξ(τ)|"""
    if not T > 0:
        raise ConfigurationError(f"period must be positive, got {T}")
    k = _lag(trace, T)
    span = float(trace.taus[-1] - trace.taus[0])
    if span < 3.0 * T - trace.step * 0.5:
        raise CoverageError(f"trace covers {span:g} time units, period test at T={T} needs at least {3 * T:g}")
    residual = _sup_residual(trace.values[k:] - trace.values[:-k])
    logger.debug(f"🔄 Period test T={T} on {trace.label or trace.branch}: residual {residual:.3g}")
    return CheckReport(
        check="periodic",
        params={"trace": trace.label or trace.branch, "T": T, "lambda": trace.lam, "seed": trace.seed},
        residual=residual,
        verdict="pass" if residual <= tol else "fail",
        tolerances={"tol": tol},
    )


@dataclass
class AlmostPeriodScan:
    """ε-almost-period 스캔 결과"""

    eps: float
    window: Tuple[float, float]
    density: float
    hits: List[float]
    max_gap: float
    landscape: pd.DataFrame = field(repr=False)

    @property
    def dense(self) -> bool:
        return bool(self.hits) and self.max_gap <= self.density

    def report(self, trace: QuasiSolutionTrace) -> CheckReport:
        return CheckReport(
            check="almost_periodic",
            params={
                "trace": trace.label or trace.branch, "eps": self.eps, "window": list(self.window),
                "density": self.density, "lambda": trace.lam, "seed": trace.seed,
            },
            residual=self.max_gap if self.hits else None,
            verdict="pass" if self.dense else "fail",
            tolerances={"eps": self.eps, "density": self.density},
            details={"hits": self.hits, "n_hits": len(self.hits), "max_gap": self.max_gap if self.hits else None},
        )


def almost_period_scan(
    trace: QuasiSolutionTrace,
    eps: float,
    window: Tuple[float, float],
    density: float,
) -> AlmostPeriodScan:
    """
    t₀ ∈ window 중 sup_τ |ξ(τ+t₀) − ξ(τ)| < ε 인 격자점을 찾는다

    τ 범위는 모든 후보에 공통: [τ_min, τ_max − window 끝]. max gap은 창 양 끝을 포함해 잰다.
    """
    lo, hi = window
    if not (0 <= lo < hi):
        raise ConfigurationError(f"scan window must satisfy 0 ≤ lo < hi, got {window}")
    if not eps > 0 or not density > 0:
        raise ConfigurationError("eps and density window must be positive")
    k_lo = max(1, math.ceil(lo / trace.step - 1e-9))
    k_hi = math.floor(hi / trace.step + LAG_TOL)
    span = float(trace.taus[-1] - trace.taus[0])
    if span < hi + density:
        raise CoverageError(f"trace covers {span:g} time units, scan needs {hi + density:g} (window + density)")
    m = len(trace) - k_hi
    values = trace.values
    lags = np.arange(k_lo, k_hi + 1)
    windows = sliding_window_view(values, m)[lags]
    with np.errstate(invalid="ignore"):
        residuals = np.max(np.abs(windows - values[:m]), axis=1)
    residuals = np.where(np.all(np.isfinite(windows), axis=1), residuals, np.inf)
    shifts = lags * trace.step
    hits = [float(t) for t in shifts[residuals < eps]]
    edges = [lo] + hits + [hi]
    max_gap = float(max(b - a for a, b in zip(edges, edges[1:])))
    logger.info(
        f"🔎 Almost-period scan ε={eps} on {trace.label or trace.branch}: {len(hits)} hits, max gap {max_gap:.4g}"
    )
    landscape = pd.DataFrame({"t0": shifts, "residual": residuals})
    return AlmostPeriodScan(eps=eps, window=(lo, hi), density=density, hits=hits, max_gap=max_gap, landscape=landscape)


def _cauchy_cluster(table: np.ndarray, tol: float) -> List[int]:
    """
    모든 쌍의 차이가 tol 이하인 가장 큰 부분수열

    각 원소를 중심으로 tol/2 이내의 원소를 모으고 가장 긴 것을 고른다 (같으면 앞선 중심).
    """
    n = table.shape[0]
    best: List[int] = []
    finite = np.all(np.isfinite(table), axis=1)
    for anchor in range(n):
        if not finite[anchor]:
            continue
        close = finite & np.all(np.abs(table - table[anchor]) <= 0.5 * tol, axis=1)
        members = [int(i) for i in np.flatnonzero(close)]
        if len(members) > len(best):
            best = members
    return best


def automorphy_probe(
    generator: Callable[[float], float],
    sequence: Sequence[float],
    tol: float,
    probes: Sequence[float] = (0.0, 1.0, math.sqrt(2.0)),
    label: str = "",
) -> CheckReport:
    """
    두 방향 부분수열 극한 검사

    forward: 고른 부분수열에서 ξ(τ + τ_{n_m})가 probe마다 Cauchy (쌍별 차이 ≤ tol).
    ζ(τ)는 부분수열 마지막 원소의 값으로 표를 만든다.
    backward: ζ(τ − τ_{n_{K−1}}) ≈ ξ(τ − τ_{n_{K−1}} + τ_{n_K}) 를 다시 계산해 ξ(τ)와 비교.
    부분수열이 너무 짧으면 inconclusive.
    """
    sequence = [float(s) for s in sequence]
    probes = [float(p) for p in probes]
    if not sequence or not probes:
        raise ConfigurationError("automorphy probe needs a nonempty sequence and probe set")
    table = np.array([[generator(p + s) for p in probes] for s in sequence])
    chosen = _cauchy_cluster(table, tol)
    params = {"trace": label, "tol": tol, "probes": probes, "sequence_length": len(sequence)}
    if len(chosen) < MIN_SUBSEQUENCE:
        logger.info(f"❔ Automorphy probe {label}: no Cauchy subsequence of length {MIN_SUBSEQUENCE}")
        return CheckReport(
            check="almost_automorphic", params=params, residual=None, verdict="inconclusive",
            tolerances={"tol": tol}, details={"subsequence": chosen},
        )

    sub = table[chosen]
    forward = float(np.max(sub.max(axis=0) - sub.min(axis=0)))
    zeta = sub[-1]
    last, prev = sequence[chosen[-1]], sequence[chosen[-2]]
    base = np.array([generator(p) for p in probes])
    back = np.array([generator(p - prev + last) for p in probes])
    backward = _sup_residual(back - base)
    residual = max(forward, backward)
    verdict = "pass" if residual <= tol else "fail"
    logger.info(
        f"🪞 Automorphy probe {label}: |subsequence|={len(chosen)}, forward {forward:.3g}, backward {backward:.3g} → {verdict}"
    )
    return CheckReport(
        check="almost_automorphic",
        params=params,
        residual=residual,
        verdict=verdict,
        tolerances={"tol": tol},
        details={
            "subsequence": chosen,
            "subsequence_tau": [sequence[i] for i in chosen],
            "zeta": {repr(p): float(z) for p, z in zip(probes, zeta)},
            "forward_residual": forward,
            "backward_residual": backward if math.isfinite(backward) else None,
        },
    )


def path_generator(generator: Callable[[float, WienerPath], float], path: WienerPath) -> Callable[[float], float]:
    """고정 ω에서 τ ↦ ξ(τ, ω)"""
    def evaluate(tau: float) -> float:
        return generator(tau, path)
    return evaluate


@dataclass
class RecurrenceReport:
    """trace 하나에 대한 클래스별 판정"""

    trace_id: str
    periodic: Optional[CheckReport] = None
    almost_periodic: Optional[CheckReport] = None
    automorphic: Optional[CheckReport] = None
    landscape: Optional[pd.DataFrame] = field(default=None, repr=False)
    exploratory: bool = False

    def checks(self) -> List[CheckReport]:
        return [c for c in (self.periodic, self.almost_periodic, self.automorphic) if c is not None]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "trace": self.trace_id,
            "exploratory": self.exploratory,
            "checks": {c.check: c.to_dict() for c in self.checks()},
        }


def classify(
    trace: QuasiSolutionTrace,
    period: Optional[float] = None,
    period_tol: float = 1e-6,
    eps: Optional[float] = None,
    window: Optional[Tuple[float, float]] = None,
    density: Optional[float] = None,
    automorphy: Optional[Dict[str, Any]] = None,
) -> RecurrenceReport:
    """
    요청된 검사를 묶어서 실행

    주기 검사를 통과하면 같은 tol로 T의 배수들이 ε-almost-period가 되는지도 확인한다.
    automorphy는 {"generator", "sequence", "tol", "probes"} 딕셔너리.
    """
    report = RecurrenceReport(trace_id=trace.label or trace.branch)
    if period is not None:
        report.periodic = detect_period(trace, period, period_tol)
    if eps is not None:
        window = window or (0.0, float(trace.taus[-1] - trace.taus[0]) / 2.0)
        scan = almost_period_scan(trace, eps, window, density or (window[1] - window[0]))
        report.almost_periodic = scan.report(trace)
        report.landscape = scan.landscape
    elif report.periodic is not None and report.periodic.passed:
        # 주기 ⇒ 거의 주기: ε = 2 × 주기 tol, 창은 [0, 1.25T]
        scan = almost_period_scan(trace, 2.0 * max(period_tol, report.periodic.residual), (0.0, 1.25 * period), 1.25 * period)
        report.almost_periodic = scan.report(trace)
        report.landscape = scan.landscape
    if automorphy is not None:
        report.automorphic = automorphy_probe(
            automorphy["generator"], automorphy["sequence"], automorphy.get("tol", 0.05),
            automorphy.get("probes", (0.0, 1.0, math.sqrt(2.0))), label=report.trace_id,
        )
    return report
