"""
Closed-form Service
pitchfork / transcritical 방정식의 정확해, quasi-solution x^±_λ, x_λ, 선형 envelope 해와 ξ,
그리고 비교 상·하한

시간 인자 규약:
    *_flow(path, t0, t1, x, offset)  경로 ω를 [t0, t1]에서 따라가고 계수는 r + offset에서 읽는다
    exact_*                          전역 시간 (offset = 0)
    *_phi / pullback                 국소 시간 (offset = τ), 즉 Φ(t, τ, ω, x)
"""
from __future__ import annotations

import math
from typing import Callable, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np
from loguru import logger

from pbl.exceptions import ConfigurationError, DomainError, IncompatibleCoefficientsError, InsufficientSupportError
from pbl.models.results import BlowUp, QuasiSolutionTrace
from pbl.services.coefficients import BetaFn, CertifiedBounds, LinearEnvelopeData
from pbl.services.quadrature import (
    QuadratureSpec,
    improper_log_integral,
    segment_cumulative,
    segment_log_integral,
)
from pbl.services.wiener import WienerPath

Generator = Callable[[float, WienerPath], float]


class QuasiPitchfork(NamedTuple):
    x_plus: float
    x_minus: float
    truncation: float
    tail_bound: float


class QuasiTranscritical(NamedTuple):
    value: float
    truncation: float
    tail_bound: float


def _node_value(path: WienerPath, t: float) -> float:
    return float(path.values[path.grid.index(t)])


def _forward(path: WienerPath, t0: float, t1: float) -> None:
    if t1 < t0:
        raise ConfigurationError(f"closed-form flows run forward in time, got [{t0}, {t1}]")
    if not path.grid.contains(t0, t1):
        raise InsufficientSupportError(
            f"flow window [{t0}, {t1}] exceeds path support [{path.grid.t_min}, {path.grid.t_max}]",
            required_window=(path.origin_shift + min(1.25 * t0, path.grid.t_min),
                             path.origin_shift + max(1.25 * t1, path.grid.t_max)),
        )


# ============================================================
# pitchfork
# ============================================================

def pitchfork_flow(
    lam: float,
    delta: float,
    beta: BetaFn,
    path: WienerPath,
    t0: float,
    t1: float,
    x: float,
    offset: float = 0.0,
    rule: str = "exponential",
) -> float:
    """x / sqrt(e^A + 2x²J) (y = x^{-2} 치환으로 얻은 해)"""
    _forward(path, t0, t1)
    if x == 0.0 or t1 == t0:
        return float(x)
    w0, w1 = _node_value(path, t0), _node_value(path, t1)
    log_a = 2.0 * lam * (t0 - t1) + 2.0 * delta * (w0 - w1)
    log_j = segment_log_integral(path, t0, t1, 2.0 * lam, 2.0 * delta, beta, offset, rule)
    log_j -= 2.0 * lam * t1 + 2.0 * delta * w1
    log_den = np.logaddexp(log_a, math.log(2.0) + 2.0 * math.log(abs(x)) + log_j)
    return float(x * math.exp(-0.5 * log_den))


def exact_pitchfork(lam, delta, beta, path, tau, t, x_tau, rule: str = "exponential") -> float:
    """x(t, τ, ω, x_τ) in global time"""
    return pitchfork_flow(lam, delta, beta, path, tau, t, x_tau, 0.0, rule)


def exact_pullback_pitchfork(lam, delta, beta, path, tau, t, x0, rule: str = "exponential") -> float:
    """x(τ, τ−t, θ_{−τ}ω, x₀) = x₀ / sqrt(e^{−2λt+2δω(−t)} + 2x₀² ∫_{−t}^0 e^{2λr+2δω(r)} β(r+τ) dr)"""
    if t < 0:
        raise ConfigurationError(f"pullback time must be nonnegative, got {t}")
    return pitchfork_flow(lam, delta, beta, path, -t, 0.0, x0, tau, rule)


def pitchfork_phi(lam, delta, beta, path, t, tau, x, rule: str = "exponential") -> float:
    """Φ(t, τ, ω, x)"""
    return pitchfork_flow(lam, delta, beta, path, 0.0, t, x, tau, rule)


def quasi_pitchfork(
    lam: float,
    delta: float,
    beta: BetaFn,
    path: WienerPath,
    tau: float,
    spec: Optional[QuadratureSpec] = None,
) -> QuasiPitchfork:
    """x^±_λ(τ, ω) = ±(2 ∫_{−∞}^0 e^{2λr+2δω(r)} β(r+τ) dr)^{−1/2}"""
    if not lam > 0:
        raise DomainError(f"x^±_λ is defined for λ > 0 only, got λ = {lam}")
    spec = spec or QuadratureSpec()
    integral = improper_log_integral(path, 2.0 * lam, 2.0 * delta, beta, beta.beta_1, spec, offset=tau)
    x_plus = math.exp(-0.5 * (math.log(2.0) + integral.log_value))
    return QuasiPitchfork(x_plus, -x_plus, integral.truncation, integral.tail_bound)


def sandwich_bounds(
    lam: float,
    delta: float,
    bounds: CertifiedBounds,
    path: WienerPath,
    tau: float = 0.0,
    spec: Optional[QuadratureSpec] = None,
) -> Tuple[float, float]:
    """
    (2(β₁−c₁)I)^{−1/2} ≤ |x^±| ≤ (2(β₀−c₂)I)^{−1/2}, I = ∫_{−∞}^0 e^{2λr+2δω(r)} dr

    I는 τ와 무관하다 (계수가 들어가지 않음).
    """
    if not lam > 0:
        raise DomainError(f"sandwich bounds need λ > 0, got λ = {lam}")
    if not bounds.c_2 < bounds.beta_0:
        raise IncompatibleCoefficientsError(
            f"standing assumption c₂ < β₀ fails: c₂ = {bounds.c_2} ≥ β₀ = {bounds.beta_0}"
        )
    spec = spec or QuadratureSpec()
    integral = improper_log_integral(path, 2.0 * lam, 2.0 * delta, None, 1.0, spec)
    log_i = integral.log_value
    lower = math.exp(-0.5 * (math.log(2.0 * (bounds.beta_1 - bounds.c_1)) + log_i))
    upper = math.exp(-0.5 * (math.log(2.0 * (bounds.beta_0 - bounds.c_2)) + log_i))
    return lower, upper


# ============================================================
# transcritical
# ============================================================

def transcritical_flow(
    lam: float,
    delta: float,
    beta: BetaFn,
    path: WienerPath,
    t0: float,
    t1: float,
    x: float,
    offset: float = 0.0,
    rule: str = "exponential",
) -> Union[float, BlowUp]:
    """
    x / (e^{λ(t0−t1)+δ(ω(t0)−ω(t1))} + x ∫ e^{λ(r−t1)+δ(ω(r)−ω(t1))} β(r+offset) dr)

    x < 0 이면 분모 e^{λt0+δω(t0)} + x∫_{t0}^{s} e^{λr+δω(r)}β 의 부호를 노드마다 보고
    처음 0 이하가 되는 노드에서 BlowUp (직전 노드와의 bracket).
    """
    _forward(path, t0, t1)
    if x == 0.0 or t1 == t0:
        return float(x)
    if x > 0:
        w0, w1 = _node_value(path, t0), _node_value(path, t1)
        log_a = lam * (t0 - t1) + delta * (w0 - w1)
        log_j = segment_log_integral(path, t0, t1, lam, delta, beta, offset, rule)
        log_j -= lam * t1 + delta * w1
        return float(x * math.exp(-np.logaddexp(log_a, math.log(x) + log_j)))

    r, exponent, m, cumulative = segment_cumulative(path, t0, t1, lam, delta, beta, offset, rule)
    scaled_den = math.exp(exponent[0] - m) + x * cumulative
    crossed = np.flatnonzero(scaled_den <= 0.0)
    if crossed.size:
        k = int(crossed[0])
        return BlowUp(t_star=float(r[k]), bracket=(float(r[k - 1]), float(r[k])))
    return float(x * math.exp(exponent[-1] - m) / scaled_den[-1])


def exact_transcritical(lam, delta, beta, path, tau, t, x_tau, rule: str = "exponential") -> Union[float, BlowUp]:
    """x(t, τ, ω, x_τ) in global time, or BlowUp"""
    return transcritical_flow(lam, delta, beta, path, tau, t, x_tau, 0.0, rule)


def transcritical_phi(lam, delta, beta, path, t, tau, x, rule: str = "exponential") -> Union[float, BlowUp]:
    """Φ(t, τ, ω, x)"""
    return transcritical_flow(lam, delta, beta, path, 0.0, t, x, tau, rule)


def quasi_transcritical(
    lam: float,
    delta: float,
    beta: BetaFn,
    path: WienerPath,
    tau: float,
    spec: Optional[QuadratureSpec] = None,
) -> QuasiTranscritical:
    """
    x_λ(τ, ω)

    λ > 0:  (∫_{−∞}^0 e^{λr+δω(r)} β(r+τ) dr)^{−1}
    λ < 0: −(∫_0^∞ e^{λr+δω(r)} β(r+τ) dr)^{−1}
    """
    if lam == 0:
        raise DomainError("x_λ is not defined at λ = 0")
    spec = spec or QuadratureSpec()
    side = "past" if lam > 0 else "future"
    integral = improper_log_integral(path, lam, delta, beta, beta.beta_1, spec, offset=tau, side=side)
    value = math.exp(-integral.log_value)
    return QuasiTranscritical(value if lam > 0 else -value, integral.truncation, integral.tail_bound)


def transcritical_bracket(
    lam: float,
    delta: float,
    beta: BetaFn,
    band: Tuple[float, float],
    path: WienerPath,
    tau: float,
    spec: Optional[QuadratureSpec] = None,
) -> Tuple[float, float]:
    """
    γ가 있을 때 x_λ의 bracket: β − c₂ (super-solution)와 β − c₁ (sub-solution) 방정식의 x_λ

    Returns:
        (lower, upper)
    """
    c_1, c_2 = band
    spec = spec or QuadratureSpec()
    sup = quasi_transcritical(lam, delta, beta.minus(c_2), path, tau, spec).value
    sub = quasi_transcritical(lam, delta, beta.minus(c_1), path, tau, spec).value
    return min(sup, sub), max(sup, sub)


# ============================================================
# linear envelope
# ============================================================

def _forcing(g: Callable, h: Callable) -> Callable:
    def forcing(t):
        return np.abs(np.asarray(g(t), dtype=float)) + np.asarray(h(t), dtype=float)
    return forcing


def linear_flow(
    nu: float,
    delta: float,
    forcing: Callable,
    path: WienerPath,
    t0: float,
    t1: float,
    y: float,
    offset: float = 0.0,
    rule: str = "exponential",
) -> float:
    """e^{ν(t0−t1)−δ(ω(t0)−ω(t1))}y + ∫ e^{ν(s−t1)−δ(ω(s)−ω(t1))} F(s+offset) ds"""
    _forward(path, t0, t1)
    if t1 == t0:
        return float(y)
    w0, w1 = _node_value(path, t0), _node_value(path, t1)
    decayed = y * math.exp(nu * (t0 - t1) - delta * (w0 - w1))
    log_i = segment_log_integral(path, t0, t1, nu, -delta, forcing, offset, rule)
    if log_i == -math.inf:
        return float(decayed)
    return float(decayed + math.exp(log_i - (nu * t1 - delta * w1)))


def linear_solution(nu, delta, g, h, path, tau, t, y_tau, rule: str = "exponential") -> float:
    """선형 envelope 방정식의 해 (전역 시간)"""
    return linear_flow(nu, delta, _forcing(g, h), path, tau, t, y_tau, 0.0, rule)


def linear_phi(envelope: LinearEnvelopeData, delta, path, t, tau, y, rule: str = "exponential") -> float:
    """Ψ(t, τ, ω, y)"""
    return linear_flow(envelope.nu, delta, envelope.forcing, path, 0.0, t, y, tau, rule)


def linear_xi(
    nu: float,
    delta: float,
    g: Callable,
    h: Callable,
    path: WienerPath,
    tau: float,
    spec: Optional[QuadratureSpec] = None,
    forcing_bound: Optional[float] = None,
) -> float:
    """
    ξ(τ, ω) = ∫_{−∞}^0 e^{νs−δω(s)} (|g(s+τ)| + h(s+τ)) ds

    forcing_bound가 없으면 경로 과거 창 위에서 |g| + h의 최댓값을 상한으로 쓴다.
    """
    if not nu > 0:
        raise DomainError(f"ν must be positive, got {nu}")
    spec = spec or QuadratureSpec()
    forcing = _forcing(g, h)
    if forcing_bound is None:
        r = path.grid.times_at(path.side("past"))
        forcing_bound = float(np.max(forcing(r + tau)))
    integral = improper_log_integral(path, nu, -delta, forcing, forcing_bound, spec, offset=tau)
    if integral.log_value == -math.inf:
        return 0.0
    return math.exp(integral.log_value)


def envelope_xi(envelope: LinearEnvelopeData, delta: float, path: WienerPath, tau: float,
                spec: Optional[QuadratureSpec] = None) -> float:
    """ξ for a LinearEnvelopeData (인증된 forcing_bound 사용)"""
    return linear_xi(envelope.nu, delta, envelope.g, envelope.h, path, tau, spec, envelope.forcing_bound)


# ============================================================
# generators / traces
# ============================================================

def pitchfork_generator(lam: float, delta: float, beta: BetaFn, spec: Optional[QuadratureSpec] = None,
                        branch: str = "plus") -> Generator:
    """(τ, path) ↦ x^±_λ(τ, path)"""
    sign = 1.0 if branch == "plus" else -1.0

    def generate(tau: float, path: WienerPath) -> float:
        return sign * quasi_pitchfork(lam, delta, beta, path, tau, spec).x_plus
    return generate


def transcritical_generator(lam: float, delta: float, beta: BetaFn,
                            spec: Optional[QuadratureSpec] = None) -> Generator:
    def generate(tau: float, path: WienerPath) -> float:
        return quasi_transcritical(lam, delta, beta, path, tau, spec).value
    return generate


def xi_generator(envelope: LinearEnvelopeData, delta: float, spec: Optional[QuadratureSpec] = None) -> Generator:
    def generate(tau: float, path: WienerPath) -> float:
        return envelope_xi(envelope, delta, path, tau, spec)
    return generate


def zero_generator(tau: float, path: WienerPath) -> float:
    return 0.0


def trace(
    generator: Generator,
    path: WienerPath,
    taus: Sequence[float],
    branch: str,
    lam: float,
    label: str = "",
) -> QuasiSolutionTrace:
    """고정 경로에서 generator를 τ 격자 위에 표로 만든다"""
    taus = np.asarray(taus, dtype=float)
    values = np.array([generator(float(tau), path) for tau in taus])
    logger.info(f"📈 Trace {label or branch} (λ={lam}, seed={path.seed}) over {taus.size} τ samples")
    return QuasiSolutionTrace(taus=taus, values=values, branch=branch, lam=lam, seed=path.seed, label=label)
