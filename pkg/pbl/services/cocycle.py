"""
Cocycle Service
cocycle 법칙, quasi-solution 항등식, pullback 극한, 끌개 양 끝점, temperedness, 안정성 판정

Φ(t, τ, ω, x) = x(t+τ, τ, θ_{−τ}ω, x) 는 경로 ω를 [0, t]에서 따라가고 계수를 τ + s 에서 읽는
국소 시간 흐름으로 계산한다. pullback 상태 Φ(t, τ−t, θ_{−t}ω, x)는 [−t, 0] 흐름이다.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from loguru import logger

from pbl.config import settings
from pbl.exceptions import (
    ConfigurationError,
    ConvergenceError,
    CoverageError,
    InsufficientSupportError,
    MonotonicityViolation,
)
from pbl.models.results import AttractorInterval, BlowUp, CheckReport, PullbackResult
from pbl.services import closed_form, integrator
from pbl.services.coefficients import BetaFn, LinearEnvelopeData
from pbl.services.integrator import DriftSpec, scheme_tolerance
from pbl.services.quadrature import QuadratureSpec
from pbl.services.wiener import TimeGrid, WienerPath, shift, zero_path

State = Union[float, BlowUp]
Generator = Callable[[float, WienerPath], float]

# (path, t0, t1, xs, offset) → states at t1
Flow = Callable[[WienerPath, float, float, Sequence[float], float], List[State]]

IDENTITY_PROBES = (-2.0, -0.5, 0.0, 0.5, 2.0)


@dataclass(frozen=True)
class CocycleHandle:
    """Φ realized by closed_form or integrator"""

    flow: Flow = field(repr=False)
    family: str
    kind: str
    coefficients: Dict[str, Any]
    tolerance: float
    period: Optional[float] = None
    step: Optional[float] = None
    grid_flow: Optional[Callable] = field(default=None, repr=False)

    def __post_init__(self):
        # 항등 공리 Φ(0, τ, ω, x) = x (흐름 함수를 직접 호출)
        step = self.step or settings.GRID_STEP
        probe = zero_path(TimeGrid.span(-10 * step, 10 * step, step))
        for tau in (0.0, 1.5):
            values = self.flow(probe, 0.0, 0.0, list(IDENTITY_PROBES), tau)
            for x, value in zip(IDENTITY_PROBES, values):
                if isinstance(value, BlowUp) or abs(value - x) > self.tolerance:
                    raise ConfigurationError(f"{self.kind} {self.family} cocycle fails Φ(0, τ, ω, x) = x at x={x}")

    def __call__(self, t: float, tau: float, path: WienerPath, x: float) -> State:
        """Φ(t, τ, ω, x)"""
        if t < 0:
            raise ConfigurationError(f"cocycle time must be nonnegative, got {t}")
        if t == 0:
            return float(x)
        return self.flow(path, 0.0, t, [x], tau)[0]

    def pullback(self, t: float, tau: float, path: WienerPath, xs: Sequence[float]) -> List[State]:
        """Φ(t, τ−t, θ_{−t}ω, x) for each x"""
        if t == 0:
            return [float(x) for x in xs]
        return self.flow(path, -t, 0.0, xs, tau)

    def pullback_grid(self, ts: Sequence[float], tau: float, path: WienerPath, x0s) -> List[List[State]]:
        """행 i: ts[i]에서의 pullback 상태 (x0s가 2차원이면 행마다 초기값)"""
        if self.grid_flow is not None:
            return self.grid_flow(path, tau, ts, x0s)
        x0s = np.asarray(x0s, dtype=float)
        rows = []
        for i, t in enumerate(ts):
            row = x0s if x0s.ndim == 1 else x0s[i]
            rows.append(self.pullback(t, tau, path, row))
        return rows


def closed_form_handle(
    family: str,
    lam: float,
    delta: float,
    beta: Optional[BetaFn] = None,
    envelope: Optional[LinearEnvelopeData] = None,
    spec: Optional[QuadratureSpec] = None,
) -> CocycleHandle:
    """정확해 공식으로 만든 Φ (γ ≡ 0) 또는 선형 envelope Ψ"""
    spec = spec or QuadratureSpec()
    rule = spec.rule
    if family == "pitchfork":
        if beta is None:
            raise ConfigurationError("pitchfork handle needs β")

        def flow(path, t0, t1, xs, offset):
            return [closed_form.pitchfork_flow(lam, delta, beta, path, t0, t1, x, offset, rule) for x in xs]
        coefficients = {"lambda": lam, "delta": delta, "beta": beta.describe()}
        period = beta.period
    elif family == "transcritical":
        if beta is None:
            raise ConfigurationError("transcritical handle needs β")

        def flow(path, t0, t1, xs, offset):
            return [closed_form.transcritical_flow(lam, delta, beta, path, t0, t1, x, offset, rule) for x in xs]
        coefficients = {"lambda": lam, "delta": delta, "beta": beta.describe()}
        period = beta.period
    elif family == "linear_envelope":
        if envelope is None:
            raise ConfigurationError("linear envelope handle needs envelope data")

        def flow(path, t0, t1, xs, offset):
            return [
                closed_form.linear_flow(envelope.nu, delta, envelope.forcing, path, t0, t1, x, offset, rule)
                for x in xs
            ]
        coefficients = {"nu": envelope.nu, "delta": delta, "forcing_bound": envelope.forcing_bound}
        period = envelope.period
    else:
        raise ConfigurationError(f"no closed form for family {family!r}")
    return CocycleHandle(
        flow=flow, family=family, kind="closed_form", coefficients=coefficients,
        tolerance=10.0 * spec.rel_tol, period=period,
    )


def integrator_handle(drift: DriftSpec, step: Optional[float] = None) -> CocycleHandle:
    """Stratonovich-Heun으로 만든 Φ"""

    def flow(path, t0, t1, xs, offset):
        return integrator.flow_states(drift, path, t0, t1, xs, step, offset)

    def grid_flow(path, tau, ts, x0s):
        return integrator.pullback_grid(drift, path, tau, ts, x0s, step)

    return CocycleHandle(
        flow=flow, family=drift.family, kind="integrator", coefficients=drift.describe(),
        tolerance=scheme_tolerance(step or settings.GRID_STEP), period=drift.period, step=step,
        grid_flow=grid_flow,
    )


def _residual(a: State, b: State) -> float:
    if isinstance(a, BlowUp) or isinstance(b, BlowUp):
        if isinstance(a, BlowUp) and isinstance(b, BlowUp):
            return 0.0
        return math.inf
    return abs(a - b)


def _verdict(residual: float, tol: float) -> str:
    return "pass" if residual <= tol else "fail"


# ============================================================
# laws
# ============================================================

def check_cocycle_law(
    handle: CocycleHandle,
    path: WienerPath,
    tau: float,
    t: float,
    s: float,
    x: float,
    tol: Optional[float] = None,
) -> CheckReport:
    """|Φ(t+s, τ, ω, x) − Φ(t, τ+s, θ_sω, Φ(s, τ, ω, x))|"""
    tol = handle.tolerance if tol is None else tol
    direct = handle(t + s, tau, path, x)
    first = handle(s, tau, path, x)
    if isinstance(first, BlowUp):
        residual = 0.0 if isinstance(direct, BlowUp) else math.inf
    else:
        composed = handle(t, tau + s, shift(path, s, window=(0.0, t)), first)
        residual = _residual(direct, composed)
    return CheckReport(
        check="cocycle_law",
        params={"family": handle.family, "kind": handle.kind, "tau": tau, "t": t, "s": s, "x": x, "seed": path.seed},
        residual=residual,
        verdict=_verdict(residual, tol),
        tolerances={"tol": tol},
    )


def check_quasi_solution(
    handle: CocycleHandle,
    generator: Generator,
    path: WienerPath,
    samples: Sequence[Tuple[float, float]],
    tol: Optional[float] = None,
    label: str = "",
) -> CheckReport:
    """max |Φ(t, τ, ω, ξ(τ, ω)) − ξ(τ+t, θ_tω)| over (t, τ) samples"""
    tol = handle.tolerance if tol is None else tol
    worst = 0.0
    rows = []
    for t, tau in samples:
        start = generator(tau, path)
        moved = handle(t, tau, path, start)
        target = generator(tau + t, shift(path, t))
        residual = _residual(moved, target)
        rows.append({"t": t, "tau": tau, "residual": residual if math.isfinite(residual) else None})
        worst = max(worst, residual)
    logger.info(f"🔁 Quasi-solution identity {label or handle.family}: max residual {worst:.3g}")
    return CheckReport(
        check="quasi_solution",
        params={"family": handle.family, "kind": handle.kind, "label": label, "seed": path.seed},
        residual=worst,
        verdict=_verdict(worst, tol),
        tolerances={"tol": tol},
        details={"samples": rows},
    )


def check_periodic_cocycle(
    handle: CocycleHandle,
    path: WienerPath,
    tau: float,
    t: float,
    period: float,
    x: float,
    tol: Optional[float] = None,
) -> CheckReport:
    """Φ(t, τ+T, ω, x) = Φ(t, τ, ω, x) for T-periodic coefficients"""
    tol = handle.tolerance if tol is None else tol
    residual = _residual(handle(t, tau + period, path, x), handle(t, tau, path, x))
    return CheckReport(
        check="periodic_cocycle",
        params={"family": handle.family, "tau": tau, "t": t, "T": period, "x": x, "seed": path.seed},
        residual=residual,
        verdict=_verdict(residual, tol),
        tolerances={"tol": tol},
    )


# ============================================================
# pullback
# ============================================================

def _agreed(history: List[float], tol: float) -> bool:
    """마지막 두 번의 연속 차이가 모두 tol 이하"""
    if len(history) < 3:
        return False
    a, b, c = history[-3:]
    scale = max(1.0, abs(c))
    return abs(c - b) <= tol * scale and abs(b - a) <= tol * scale


def _schedule(schedule: Optional[Sequence[float]]) -> List[float]:
    schedule = list(settings.PULLBACK_SCHEDULE if schedule is None else schedule)
    if not schedule or any(t <= 0 for t in schedule) or any(b <= a for a, b in zip(schedule, schedule[1:])):
        raise ConfigurationError(f"pullback schedule must be positive and increasing, got {schedule}")
    return [float(t) for t in schedule]


def pullback_limit(
    handle: CocycleHandle,
    path: WienerPath,
    tau: float,
    x0: float,
    schedule: Optional[Sequence[float]] = None,
    tol: Optional[float] = None,
    max_pullback: Optional[float] = None,
) -> PullbackResult:
    """
    Φ(t, τ−t, θ_{−t}ω, x₀) along the schedule

    두 번 연속 일치하면 수렴. 스케줄 끝까지 수렴하지 않으면 max_pullback까지 두 배씩 늘린다.
    BlowUp이 나오면 발산 판정으로 멈춘다.
    """
    schedule = _schedule(schedule)
    tol = settings.PULLBACK_TOL if tol is None else tol
    max_pullback = settings.MAX_PULLBACK if max_pullback is None else max_pullback

    history: List[Tuple[float, State]] = []
    values: List[float] = []
    rows = handle.pullback_grid(schedule, tau, path, [x0])
    pending = [(t, row[0]) for t, row in zip(schedule, rows)]
    t = schedule[-1]
    while True:
        for t_k, value in pending:
            history.append((t_k, value))
            if isinstance(value, BlowUp):
                logger.info(f"💥 Pullback from x₀={x0} diverged at t={t_k}")
                return PullbackResult(limit=None, converged=False, history=history, diverged=True)
            values.append(value)
            if _agreed(values, tol):
                return PullbackResult(limit=value, converged=True, history=history)
        t *= 2.0
        if t > max_pullback:
            return PullbackResult(limit=values[-1], converged=False, history=history)
        pending = [(t, handle.pullback(t, tau, path, [x0])[0])]


def pullback_compact(
    handle: CocycleHandle,
    path: WienerPath,
    tau: float,
    compact: Tuple[float, float],
    schedule: Optional[Sequence[float]] = None,
    tol: Optional[float] = None,
) -> CheckReport:
    """compact K = [a, b]의 pullback 흡인 (순서 보존이므로 양 끝점만 본다)"""
    a, b = compact
    if a > b:
        raise ConfigurationError(f"compact set must satisfy a ≤ b, got [{a}, {b}]")
    tol = settings.PULLBACK_TOL if tol is None else tol
    ends = [pullback_limit(handle, path, tau, x, schedule, tol) for x in (a, b)]
    limits = [r.limit for r in ends]
    converged = all(r.converged for r in ends)
    spread = abs(limits[0] - limits[1]) if converged else math.inf
    return CheckReport(
        check="pullback_compact",
        params={"family": handle.family, "tau": tau, "compact": [a, b], "seed": path.seed},
        residual=spread,
        verdict="pass" if converged and spread <= 10.0 * tol * max(1.0, abs(limits[1])) else "fail",
        tolerances={"tol": tol},
        details={"limits": limits, "histories": [r.to_dict() for r in ends]},
    )


def attractor_endpoints(
    handle: CocycleHandle,
    xi: Generator,
    path: WienerPath,
    tau: float,
    schedule: Optional[Sequence[float]] = None,
    tol: Optional[float] = None,
    mono_tol: Optional[float] = None,
    max_pullback: Optional[float] = None,
) -> AttractorInterval:
    """
    x*(τ, ω) = lim Φ(t, τ−t, θ_{−t}ω, ξ(τ−t, θ_{−t}ω)), x₋ 는 −ξ 에서

    위쪽 수열은 비증가, 아래쪽 수열은 비감소여야 한다 (mono_tol 이내). 위반 시 MonotonicityViolation.
    """
    schedule = _schedule(schedule)
    tol = settings.PULLBACK_TOL if tol is None else tol
    mono_tol = 10.0 * handle.tolerance if mono_tol is None else mono_tol
    max_pullback = settings.MAX_PULLBACK if max_pullback is None else max_pullback

    def starts(ts):
        return [[xi(tau - t, shift(path, -t)) * s for s in (1.0, -1.0)] for t in ts]

    upper: List[float] = []
    lower: List[float] = []
    done: List[float] = []
    ts = schedule
    while True:
        rows = handle.pullback_grid(ts, tau, path, starts(ts))
        for t, (hi, lo) in zip(ts, rows):
            if isinstance(hi, BlowUp) or isinstance(lo, BlowUp):
                raise ConvergenceError(f"pullback from ±ξ blew up at t={t}")
            if upper and hi > upper[-1] + mono_tol:
                raise MonotonicityViolation(
                    f"upper endpoint increased from {upper[-1]:.12g} to {hi:.12g} at t={t} (tol {mono_tol:g})"
                )
            if lower and lo < lower[-1] - mono_tol:
                raise MonotonicityViolation(
                    f"lower endpoint decreased from {lower[-1]:.12g} to {lo:.12g} at t={t} (tol {mono_tol:g})"
                )
            upper.append(hi)
            lower.append(lo)
            done.append(t)
            if _agreed(upper, tol) and _agreed(lower, tol):
                residual = max(abs(upper[-1] - upper[-2]), abs(lower[-1] - lower[-2]))
                logger.info(f"🧲 Attractor at τ={tau}: [{lo:.8g}, {hi:.8g}] after t={t}")
                return AttractorInterval(
                    tau=tau, lower=min(lo, hi), upper=max(lo, hi), iterations=len(done), residual=residual,
                    upper_history=upper, lower_history=lower, schedule=done,
                )
        nxt = done[-1] * 2.0
        if nxt > max_pullback:
            raise ConvergenceError(
                f"attractor endpoints did not converge by t={done[-1]} "
                f"(last steps {abs(upper[-1] - upper[-2]):.3g}, {abs(lower[-1] - lower[-2]):.3g})"
            )
        ts = [nxt]


def check_invariance(
    handle: CocycleHandle,
    interval_at: Callable[[float, WienerPath], AttractorInterval],
    path: WienerPath,
    tau: float,
    t: float,
    tol: Optional[float] = None,
) -> CheckReport:
    """Φ(t, τ, ω, ·)가 [x₋, x*](τ, ω)를 [x₋, x*](τ+t, θ_tω)로 끝점끼리 보내는지"""
    tol = 10.0 * handle.tolerance if tol is None else tol
    here = interval_at(tau, path)
    there = interval_at(tau + t, shift(path, t))
    moved_lo = handle(t, tau, path, here.lower)
    moved_hi = handle(t, tau, path, here.upper)
    residual = max(_residual(moved_lo, there.lower), _residual(moved_hi, there.upper))
    return CheckReport(
        check="invariance",
        params={"family": handle.family, "tau": tau, "t": t, "seed": path.seed},
        residual=residual,
        verdict=_verdict(residual, tol),
        tolerances={"tol": tol},
        details={"here": here.to_dict(), "there": there.to_dict()},
    )


# ============================================================
# temperedness
# ============================================================

def tempered_profile(generator: Generator, path: WienerPath, tau: float, ts: Sequence[float]) -> np.ndarray:
    """t ↦ ξ(τ+t, θ_tω)"""
    return np.array([generator(tau + t, shift(path, t)) for t in ts])


def temperedness_check(
    ts: Sequence[float],
    values: Sequence[float],
    c: float,
    window: Tuple[float, float],
    threshold: float = 1e-6,
    reciprocal: bool = False,
) -> CheckReport:
    """
    e^{ct}|ξ(τ+t, θ_tω)| (reciprocal이면 e^{ct}/|ξ|) 가 t가 창 아래쪽으로 갈 때 threshold 아래로 내려가는지

    판정: 창의 가장 먼 1/4 구간에서의 최댓값 ≤ threshold.
    """
    if not c > 0:
        raise ConfigurationError(f"temperedness rate c must be positive, got {c}")
    ts = np.asarray(ts, dtype=float)
    values = np.asarray(values, dtype=float)
    lo, hi = window
    if not lo < hi <= 0:
        raise ConfigurationError(f"temperedness window must satisfy lo < hi ≤ 0, got {window}")
    step_tol = 1e-9 * max(1.0, abs(lo))
    if ts.size == 0 or ts.min() > lo + step_tol or ts.max() < hi - step_tol:
        raise CoverageError(f"profile covers [{ts.min() if ts.size else None}, {ts.max() if ts.size else None}], window {window} requested")
    inside = (ts >= lo - step_tol) & (ts <= hi + step_tol)
    ts, values = ts[inside], values[inside]
    order = np.argsort(ts)
    ts, values = ts[order], values[order]
    with np.errstate(divide="ignore", over="ignore"):
        magnitude = 1.0 / np.abs(values) if reciprocal else np.abs(values)
        profile = np.exp(c * ts) * magnitude
    far = ts <= lo + 0.25 * (hi - lo)
    sup_far = float(np.max(profile[far]))
    # 먼 쪽으로 갈수록 감소하는지 (구간 최댓값 기준)
    quarters = np.array_split(profile[::-1], 4)
    quarter_max = [float(np.max(q)) for q in quarters if q.size]
    decreasing = all(b <= a for a, b in zip(quarter_max, quarter_max[1:]))
    return CheckReport(
        check="temperedness_reciprocal" if reciprocal else "temperedness",
        params={"c": c, "window": [lo, hi]},
        residual=sup_far,
        verdict="pass" if sup_far <= threshold else "fail",
        tolerances={"threshold": threshold},
        details={
            "decreasing": decreasing,
            "quarter_max": quarter_max,
            "profile": [[float(t), float(p)] for t, p in zip(ts, profile)],
        },
    )


# ============================================================
# stability
# ============================================================

def _escapes(handle, path, tau, schedule, deltas, eps, domain) -> np.ndarray:
    """δ 후보마다: (−δ, δ) (positive면 (0, δ]) 에서 출발한 pullback 궤도가 스케줄 시각에 (−ε, ε)를 벗어나는지"""
    deltas = np.asarray(deltas, dtype=float)
    xs = list(deltas) if domain == "positive" else [s * d for d in deltas for s in (-1.0, 1.0)]
    rows = handle.pullback_grid(schedule, tau, path, xs)
    out = np.zeros(len(xs), dtype=bool)
    for row in rows:
        out |= np.array([isinstance(v, BlowUp) or not abs(v) < eps for v in row])
    if domain != "positive":
        out = out.reshape(-1, 2).any(axis=1)
    return out


def _largest_delta(handle, path, tau, schedule, eps, domain, bisect_iters: int, fan: int) -> Optional[float]:
    """
    궤도가 (−ε, ε)에 머무는 가장 큰 δ ≤ ε (log₂ 척도 k-분할 탐색)

    순서 보존 흐름이므로 탈출 여부는 δ에 대해 단조다. δ_min = ε·2^{−bisect_iters}도 탈출하면 None.
    매 라운드 fan개의 내부 점을 한 번의 적분으로 시험해 구간을 (fan+1)배 좁힌다.
    """
    lo_exp, hi_exp = -float(bisect_iters), 0.0
    first = _escapes(handle, path, tau, schedule, [eps * 2.0 ** lo_exp, eps], eps, domain)
    if not first[1]:
        return eps
    if first[0]:
        return None
    target = (hi_exp - lo_exp) / 2.0 ** bisect_iters
    while hi_exp - lo_exp > target:
        candidates = np.linspace(lo_exp, hi_exp, fan + 2)[1:-1]
        escaped = _escapes(handle, path, tau, schedule, eps * 2.0 ** candidates, eps, domain)
        hit = np.flatnonzero(escaped)
        if hit.size:
            j = int(hit[0])
            hi_exp = float(candidates[j])
            if j > 0:
                lo_exp = float(candidates[j - 1])
        else:
            lo_exp = float(candidates[-1])
    return eps * 2.0 ** lo_exp


def _extend_horizon(handle, path, tau, schedule, eps, floor, domain, max_horizon) -> List[float]:
    """
    δ = floor 궤도가 (−ε, ε) 안에서 자라는 동안 스케줄 끝 시각을 두 배씩 늘린다 (max_horizon까지)

    0 근처 선형화 성장률이 작으면 (λ → 0⁺) 기본 스케줄로는 floor가 ε까지 자라지 못한다.
    """
    extended = list(schedule)
    xs = [floor] if domain == "positive" else [-floor, floor]
    while extended[-1] * 2.0 <= max_horizon:
        last = handle.pullback(extended[-1], tau, path, xs)
        if any(isinstance(v, BlowUp) or not abs(v) < eps for v in last):
            break
        if max(abs(v) for v in last) <= floor:
            break
        extended.append(extended[-1] * 2.0)
    if len(extended) > len(schedule):
        logger.debug(f"⚖️ Stability horizon extended to t={extended[-1]:g}")
    return extended


def stability_probe(
    handle: CocycleHandle,
    path: WienerPath,
    tau: float,
    eps_grid: Sequence[float] = (1e-1, 1e-2, 1e-3),
    schedule: Optional[Sequence[float]] = None,
    domain: str = "R",
    bisect_iters: int = 20,
    attraction_grid: Optional[Sequence[float]] = None,
    attraction_tol: float = 1e-4,
    fan: int = 16,
    max_horizon: Optional[float] = None,
) -> Dict[str, Any]:
    """
    영해의 pullback 안정성 (유한 창 판정)

    각 ε에 대해 δ(ε)를 찾는다. δ가 없는 ε이 있으면 unstable,
    모든 ε에 δ가 있고 초기값 격자에서 0으로 pullback 수렴하면 asymptotically_stable,
    아니면 lyapunov_stable_only. 가장 작은 δ의 궤도가 아직 자라고 있으면 스케줄을
    max_horizon (기본 STABILITY_HORIZON) 까지 늘린 뒤 판정한다.
    """
    if domain not in ("R", "positive"):
        raise ConfigurationError(f"stability domain must be 'R' or 'positive', got {domain!r}")
    schedule = _schedule(schedule)
    max_horizon = settings.STABILITY_HORIZON if max_horizon is None else max_horizon
    eps_min = min(eps_grid)
    schedule = _extend_horizon(
        handle, path, tau, schedule, eps_min, eps_min * 2.0 ** -bisect_iters, domain, max_horizon
    )
    deltas: Dict[str, Optional[float]] = {}
    lyapunov = True
    for eps in eps_grid:
        delta = _largest_delta(handle, path, tau, schedule, eps, domain, bisect_iters, fan)
        deltas[repr(eps)] = delta
        if delta is None:
            lyapunov = False
            break

    attraction: List[Dict[str, Any]] = []
    attracted = False
    if lyapunov:
        if attraction_grid is None:
            attraction_grid = (0.1, 1.0) if domain == "positive" else (-1.0, -0.1, 0.1, 1.0)
        attracted = True
        for x0 in attraction_grid:
            result = pullback_limit(handle, path, tau, x0, schedule)
            ok = result.converged and abs(result.limit) <= attraction_tol
            attraction.append({"x0": x0, "limit": result.limit, "converged": result.converged, "attracted": ok})
            attracted = attracted and ok

    if not lyapunov:
        verdict = "unstable"
    elif attracted:
        verdict = "asymptotically_stable"
    else:
        verdict = "lyapunov_stable_only"
    logger.info(f"⚖️ Stability of 0 ({handle.family}, domain={domain}, τ={tau}): {verdict}")
    return {
        "verdict": verdict,
        "finite_window": True,
        "domain": domain,
        "schedule": schedule,
        "deltas": deltas,
        "attraction": attraction,
    }


def is_stable(verdict: str) -> bool:
    return verdict == "asymptotically_stable"
