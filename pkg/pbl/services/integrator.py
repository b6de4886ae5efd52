"""
Integrator Service
Stratonovich-Heun 스킴으로 일반 방정식 적분

    predictor  x̃  = x + a(t, x)h + δxΔω
    corrector  x' = x + ½(a(t, x) + a(t', x̃))h + ½δ(x + x̃)Δω

노이즈 증분은 고정된 WienerPath 그리드에서만 읽는다 (적분기 안에서 새 난수 없음).
step은 경로 step의 정수배이거나 정수 약수여야 하고, t1 < t0 이면 역방향으로 적분한다.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from loguru import logger

from pbl.config import settings
from pbl.exceptions import (
    AlignmentError,
    ConfigurationError,
    InsufficientSupportError,
    SchemeError,
)
from pbl.models.results import BlowUp, Trajectory
from pbl.services.coefficients import (
    BetaFn,
    GammaFn,
    LinearEnvelopeData,
    compile_expression,
    make_gamma,
    validate_pairing,
)
from pbl.services.wiener import ALIGN_TOL, WienerPath

FAMILIES = ("pitchfork", "transcritical", "linear_envelope", "custom")


@dataclass(frozen=True)
class DriftSpec:
    """
    a(t, x) + 곱셈 노이즈 δx∘dω

    pitchfork:       λx − β(t)x³ + γ(t, x) + g(t)
    transcritical:   λx − β(t)x² + γ(t, x)
    linear_envelope: −νx + |g(t)| + h(t)
    custom:          사용자 a(t, x)
    """

    family: str
    lam: float = 0.0
    delta: float = 0.0
    beta: Optional[BetaFn] = None
    gamma: Optional[GammaFn] = None
    envelope: Optional[LinearEnvelopeData] = None
    forcing: Optional[Callable] = field(default=None, repr=False)
    custom: Optional[Callable] = field(default=None, repr=False)
    label: str = ""

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ConfigurationError(f"unknown drift family {self.family!r}")
        if self.delta < 0:
            raise ConfigurationError(f"δ must be nonnegative, got {self.delta}")
        if self.family in ("pitchfork", "transcritical"):
            if self.beta is None:
                raise ConfigurationError(f"{self.family} drift needs β")
            if self.gamma is None:
                object.__setattr__(self, "gamma", make_gamma("zero", variant=self.family))
            if self.gamma.variant != self.family:
                raise ConfigurationError(f"γ variant {self.gamma.variant!r} does not match family {self.family!r}")
            validate_pairing(self.beta, self.gamma)
            if self.forcing is not None and self.family != "pitchfork":
                raise ConfigurationError("additive forcing is only supported for the pitchfork family")
        elif self.family == "linear_envelope":
            if self.envelope is None:
                raise ConfigurationError("linear_envelope drift needs envelope data")
        elif self.custom is None:
            raise ConfigurationError("custom drift needs a callable a(t, x)")

    @classmethod
    def from_expression(cls, expr: str, delta: float = 0.0, label: str = "") -> "DriftSpec":
        """custom drift from an expression in t and x, e.g. "x" """
        return cls(family="custom", delta=delta, custom=compile_expression(expr, ("t", "x")), label=label or expr)

    @property
    def sign_preserving(self) -> bool:
        return self.family == "pitchfork" and self.forcing is None

    @property
    def period(self) -> Optional[float]:
        """계수 전체의 공통 주기 (알려진 경우)"""
        if self.family == "linear_envelope":
            return self.envelope.period
        if self.beta is None or self.forcing is not None:
            return None
        if self.gamma is None or self.gamma.kind == "zero" or self.gamma.period is None:
            return self.beta.period
        if self.beta.period is not None and math.isclose(self.beta.period, self.gamma.period):
            return self.beta.period
        return None

    def kernel(self, times: np.ndarray) -> Callable[[int, np.ndarray], np.ndarray]:
        """노드 시각에서 계수를 미리 계산한 a(t_k, x)"""
        if self.family == "custom":
            custom = self.custom

            def a(k, x):
                return np.asarray(custom(times[k], x), dtype=float) + 0.0 * x
            return a

        if self.family == "linear_envelope":
            nu = self.envelope.nu
            F = np.asarray(self.envelope.forcing(times), dtype=float)

            def a(k, x):
                return -nu * x + F[k]
            return a

        lam = self.lam
        b = np.asarray(self.beta(times), dtype=float)
        gamma = self.gamma
        power = 3 if self.family == "pitchfork" else 2
        profile = None
        if gamma.kind in ("cubic_profile", "quadratic_profile"):
            profile = np.asarray(gamma.profile(times), dtype=float)
        g = np.asarray(self.forcing(times), dtype=float) if self.forcing is not None else None

        def a(k, x):
            xp = x ** power
            out = lam * x - b[k] * xp
            if profile is not None:
                out = out + profile[k] * xp
            elif gamma.kind == "custom":
                out = out + gamma(times[k], x)
            if g is not None:
                out = out + g[k]
            return out
        return a

    def describe(self) -> Dict:
        data = {"family": self.family, "lambda": self.lam, "delta": self.delta}
        if self.beta is not None:
            data["beta"] = self.beta.describe()
        if self.gamma is not None:
            data["gamma"] = self.gamma.describe()
        if self.envelope is not None:
            data["envelope"] = {"nu": self.envelope.nu, "forcing_bound": self.envelope.forcing_bound}
        if self.label:
            data["label"] = self.label
        return data


def scheme_tolerance(step: float) -> float:
    """스킴 오차 예산 (step에 선형)"""
    return settings.SCHEME_TOL_FACTOR * step


def _integration_nodes(
    path: WienerPath, t0: float, t1: float, step: float
) -> Tuple[np.ndarray, np.ndarray]:
    """적분 노드 시각과 그 노드에서의 ω (경로 셀 안은 선형 보간)"""
    ps = path.step
    ratio = step / ps
    if ratio >= 1.0 - ALIGN_TOL:
        stride, sub = int(round(ratio)), 1
        if abs(ratio - stride) > ALIGN_TOL * ratio:
            raise AlignmentError(f"step {step} is not an integer multiple of the path step {ps}")
    else:
        stride, sub = 1, int(round(1.0 / ratio))
        if abs(1.0 / ratio - sub) > ALIGN_TOL / ratio:
            raise AlignmentError(f"step {step} does not divide the path step {ps}")

    i0, i1 = path.grid.index(t0), path.grid.index(t1)
    cells = abs(i1 - i0)
    if cells % stride:
        raise AlignmentError(f"[{t0}, {t1}] is not a whole number of steps of {step}")
    n_steps = cells * sub // stride
    direction = 1 if i1 >= i0 else -1
    if sub == 1:
        idx = i0 + direction * stride * np.arange(n_steps + 1)
        return path.grid.times_at(idx), path.values[idx]
    pos = i0 + direction * np.arange(n_steps + 1) / sub
    nodes = np.arange(path.grid.n_points, dtype=float)
    values = np.interp(pos, nodes, path.values)
    times = (pos - path.grid.zero_index) * ps
    return times, values


def _run(
    drift: DriftSpec,
    path: WienerPath,
    t0: float,
    t1: float,
    x0,
    step: Optional[float] = None,
    offset: float = 0.0,
    keep: bool = True,
    starts: Optional[np.ndarray] = None,
):
    """
    Heun 루프 (x0가 배열이면 열마다 독립 궤적)

    starts[j]는 열 j가 출발하는 노드 인덱스. 그 전까지는 초기값을 그대로 들고 있다.

    Returns:
        (times, states (n_nodes × k) 또는 마지막 상태 (k,), blow-up 노드 인덱스 (k,), 없으면 −1)
    """
    step = path.step if step is None else step
    if not step > 0:
        raise ConfigurationError(f"step must be positive, got {step}")
    if not path.grid.contains(min(t0, t1), max(t0, t1)):
        lo, hi = min(t0, t1), max(t0, t1)
        raise InsufficientSupportError(
            f"integration window [{lo}, {hi}] exceeds path support [{path.grid.t_min}, {path.grid.t_max}]",
            required_window=(path.origin_shift + min(lo * 1.25, path.grid.t_min),
                             path.origin_shift + max(hi * 1.25, path.grid.t_max)),
        )
    times, w = _integration_nodes(path, t0, t1, step)
    a = drift.kernel(times + offset)
    h = step if t1 >= t0 else -step
    dw = np.diff(w)
    delta = drift.delta
    threshold = settings.BLOWUP_THRESHOLD

    x = np.array(x0, dtype=float, ndmin=1).copy()
    start_sign = np.sign(x)
    n = times.size - 1
    states = np.empty((n + 1, x.size)) if keep else None
    if keep:
        states[0] = x
    blow_k = np.full(x.size, -1)
    alive = np.ones(x.size, dtype=bool)
    check_sign = drift.sign_preserving
    if starts is None:
        waiting = None
    else:
        starts = np.asarray(starts, dtype=int)
        waiting = starts > 0

    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(n):
            a0 = a(k, x)
            xt = x + a0 * h + delta * x * dw[k]
            a1 = a(k + 1, xt)
            stepped = x + 0.5 * (a0 + a1) * h + 0.5 * delta * (x + xt) * dw[k]
            if waiting is not None and waiting.any():
                x = np.where(waiting, x, stepped)
                waiting = starts > k + 1
            else:
                x = stepped
            bad = ~(np.abs(x) <= threshold)
            if bad.any():
                newly = bad & alive
                blow_k[newly] = k + 1
                alive &= ~bad
                x[bad] = np.nan
            if check_sign and np.any(alive & (x * start_sign < 0)):
                raise SchemeError(
                    f"sign preservation violated at t = {times[k + 1] + offset:.6g} (step {step}); reduce the step"
                )
            if keep:
                states[k + 1] = x
    return times, (states if keep else x), blow_k


def integrate(
    drift: DriftSpec,
    path: WienerPath,
    tau: float,
    t_end: float,
    x_tau: float,
    step: Optional[float] = None,
) -> Trajectory:
    """x(t, τ, ω, x_τ) on [τ, t_end] (전역 시간; t_end < τ 이면 역방향)"""
    times, states, blow_k = _run(drift, path, tau, t_end, x_tau, step)
    k = int(blow_k[0])
    if k >= 0:
        blow = BlowUp(t_star=float(times[k]), bracket=(float(times[k - 1]), float(times[k])))
        logger.info(f"💥 Blow-up at t ≈ {blow.t_star:.6g} ({drift.family}, x_τ={x_tau})")
        return Trajectory(times=times[:k], states=states[:k, 0], status="blew_up", blowup=blow)
    return Trajectory(times=times, states=states[:, 0])


def _finals(times, final, blow_k, offset) -> List[Union[float, BlowUp]]:
    out: List[Union[float, BlowUp]] = []
    for value, k in zip(final, blow_k):
        if k >= 0:
            out.append(BlowUp(t_star=float(times[k] + offset), bracket=(float(times[k - 1] + offset), float(times[k] + offset))))
        else:
            out.append(float(value))
    return out


def flow_states(
    drift: DriftSpec,
    path: WienerPath,
    t0: float,
    t1: float,
    x0: Sequence[float],
    step: Optional[float] = None,
    offset: float = 0.0,
) -> List[Union[float, BlowUp]]:
    """여러 초기값을 같은 경로로 [t0, t1] 적분 (계수는 r + offset), 마지막 상태만"""
    times, final, blow_k = _run(drift, path, t0, t1, x0, step, offset, keep=False)
    return _finals(times, final, blow_k, offset)


def phi(drift: DriftSpec, path: WienerPath, t: float, tau: float, x, step: Optional[float] = None):
    """Φ(t, τ, ω, x) = x(t+τ, τ, θ_{−τ}ω, x)"""
    if t == 0:
        return float(x)
    return flow_states(drift, path, 0.0, t, [x], step, tau)[0]


def pullback_state(
    drift: DriftSpec,
    path: WienerPath,
    tau: float,
    t: float,
    x0: float,
    step: Optional[float] = None,
) -> Union[float, BlowUp]:
    """x(τ, τ−t, θ_{−τ}ω, x₀) = Φ(t, τ−t, θ_{−t}ω, x₀)"""
    if t < 0:
        raise ConfigurationError(f"pullback time must be nonnegative, got {t}")
    if t == 0:
        return float(x0)
    return flow_states(drift, path, -t, 0.0, [x0], step, tau)[0]


def pullback_states(drift, path, tau, t, x0s, step=None) -> List[Union[float, BlowUp]]:
    """pullback_state for several initial values (같은 경로)"""
    if t == 0:
        return [float(x) for x in x0s]
    return flow_states(drift, path, -t, 0.0, x0s, step, tau)


def pullback_grid(
    drift: DriftSpec,
    path: WienerPath,
    tau: float,
    ts: Sequence[float],
    x0s,
    step: Optional[float] = None,
) -> List[List[Union[float, BlowUp]]]:
    """
    모든 (t, x₀) 조합의 pullback 상태를 한 번의 적분으로

    x0s가 2차원이면 행마다 (ts[i]에 대한) 초기값 목록.

    Returns:
        out[i][j] = Φ(ts[i], τ−ts[i], θ_{−ts[i]}ω, x0s[i][j])
    """
    ts = [float(t) for t in ts]
    if any(t < 0 for t in ts):
        raise ConfigurationError("pullback times must be nonnegative")
    x0s = np.asarray(x0s, dtype=float)
    if x0s.ndim == 1:
        x0s = np.broadcast_to(x0s, (len(ts), x0s.size))
    span = max(ts)
    if span == 0:
        return [[float(x) for x in row] for row in x0s]
    step = path.step if step is None else step
    starts = []
    for t in ts:
        k = (span - t) / step
        if abs(k - round(k)) > ALIGN_TOL * max(1.0, k):
            raise AlignmentError(f"pullback time {t} is not a multiple of the step {step}")
        starts.append(int(round(k)))
    width = x0s.shape[1]
    flat_x = x0s.reshape(-1)
    flat_starts = np.repeat(starts, width)
    times, final, blow_k = _run(drift, path, -span, 0.0, flat_x, step, tau, keep=False, starts=flat_starts)
    finals = _finals(times, final, blow_k, tau)
    return [finals[i * width:(i + 1) * width] for i in range(len(ts))]


def forward_limit_state(drift, path, tau, t, x0s, step=None) -> List[Union[float, BlowUp]]:
    """τ+t에서 τ까지 역방향 적분 (국소 시간: [t, 0])"""
    if t == 0:
        return [float(x) for x in x0s]
    return flow_states(drift, path, t, 0.0, x0s, step, tau)


def strong_order(errors: Sequence[float], steps: Sequence[float]) -> float:
    """log(error) 대 log(step) 최소제곱 기울기"""
    errors = np.asarray(errors, dtype=float)
    steps = np.asarray(steps, dtype=float)
    if errors.size < 2 or np.any(errors <= 0):
        raise ConfigurationError("strong order needs at least two positive errors")
    slope, _ = np.polyfit(np.log(steps), np.log(errors), 1)
    return float(slope)


def self_convergence(
    drift: DriftSpec,
    path: WienerPath,
    tau: float,
    t_end: float,
    x_tau: float,
    steps: Sequence[float],
    reference: Optional[Union[float, Callable[[], float]]] = None,
) -> Dict:
    """
    단계 사다리에서의 끝점 오차와 관측 차수

    reference가 없으면 가장 작은 step의 1/4로 적분한 값을 기준으로 쓴다.
    """
    steps = sorted(steps, reverse=True)
    if reference is None:
        ref = integrate(drift, path, tau, t_end, x_tau, min(steps) / 4.0).final
    elif callable(reference):
        ref = reference()
    else:
        ref = float(reference)
    errors = [abs(integrate(drift, path, tau, t_end, x_tau, h).final - ref) for h in steps]
    order = strong_order(errors, steps)
    logger.info(f"📐 Observed strong order {order:.3f} over steps {steps}")
    return {"steps": list(steps), "errors": errors, "reference": ref, "order": order}
