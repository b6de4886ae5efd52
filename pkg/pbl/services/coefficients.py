"""
Coefficient Service
시간 의존 계수 β, γ, (ν, g, h) 정의와 검증

내장 kind의 상·하한은 해석적으로 정확하고, custom kind는 사용자 식 + 사용자 상·하한을
조밀한 샘플링으로 검사한다 (위반 시 ConfigurationError).
"""
from __future__ import annotations

import ast
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, NamedTuple, Optional, Tuple

import numpy as np
from loguru import logger
from scipy import optimize

from pbl.config import settings
from pbl.exceptions import ConfigurationError, IncompatibleCoefficientsError

SQRT2 = math.sqrt(2.0)
TWO_PI = 2.0 * math.pi

BETA_KINDS = ("constant", "periodic", "quasi_periodic", "almost_automorphic", "custom")
GAMMA_KINDS = ("zero", "cubic_profile", "quadratic_profile", "custom")
VARIANTS = ("pitchfork", "transcritical")

# kind → 알려진 재귀 클래스
RECURRENCE_CLASS = {
    "constant": "constant",
    "periodic": "periodic",
    "quasi_periodic": "almost_periodic",
    "almost_automorphic": "almost_automorphic",
    "custom": "unknown",
}

# ============================================================
# custom 식 평가 (화이트리스트 AST)
# ============================================================

_ALLOWED_FUNCS = {
    "sin": np.sin, "cos": np.cos, "tan": np.tan, "exp": np.exp, "log": np.log,
    "sqrt": np.sqrt, "abs": np.abs, "tanh": np.tanh, "arctan": np.arctan,
    "minimum": np.minimum, "maximum": np.maximum,
}
_ALLOWED_CONSTS = {"pi": math.pi, "e": math.e, "sqrt2": SQRT2}
_ALLOWED_NODES = (
    ast.Expression, ast.BinOp, ast.UnaryOp, ast.Call, ast.Name, ast.Load, ast.Constant,
    ast.Add, ast.Sub, ast.Mult, ast.Div, ast.Pow, ast.USub, ast.UAdd, ast.Mod,
)


def compile_expression(expr: str, variables: Tuple[str, ...]) -> Callable[..., np.ndarray]:
    """산술식 + 허용 함수만 쓰는 numpy 벡터 함수로 컴파일"""
    try:
        tree = ast.parse(expr, mode="eval")
    except SyntaxError as e:
        raise ConfigurationError(f"cannot parse expression {expr!r}: {e.msg}")
    for node in ast.walk(tree):
        if not isinstance(node, _ALLOWED_NODES):
            raise ConfigurationError(f"expression {expr!r}: {type(node).__name__} is not allowed")
        if isinstance(node, ast.Name) and node.id not in _ALLOWED_FUNCS \
                and node.id not in _ALLOWED_CONSTS and node.id not in variables:
            raise ConfigurationError(f"expression {expr!r}: unknown name {node.id!r}")
        if isinstance(node, ast.Call) and not (isinstance(node.func, ast.Name) and node.func.id in _ALLOWED_FUNCS):
            raise ConfigurationError(f"expression {expr!r}: only whitelisted function calls are allowed")
    code = compile(tree, "<coefficient>", "eval")
    namespace = {"__builtins__": {}, **_ALLOWED_FUNCS, **_ALLOWED_CONSTS}

    def evaluate(*args):
        local = dict(zip(variables, args))
        return eval(code, namespace, local)

    return evaluate


def _sample_times() -> np.ndarray:
    return np.linspace(-settings.SAMPLE_WINDOW, settings.SAMPLE_WINDOW, settings.SAMPLE_POINTS)


def _param(params: Dict[str, Any], *names: str, default: Optional[float] = None) -> float:
    for name in names:
        if name in params and params[name] is not None:
            try:
                return float(params[name])
            except (TypeError, ValueError):
                raise ConfigurationError(f"parameter {name!r} must be a number, got {params[name]!r}")
    if default is not None:
        return default
    raise ConfigurationError(f"missing parameter {names[0]!r}")


def _as_output(t, values):
    if np.ndim(t) == 0:
        return float(values)
    return values


# ============================================================
# β
# ============================================================

@dataclass(frozen=True)
class BetaFn:
    """β(t) with certified bounds beta_0 ≤ β(t) ≤ beta_1"""

    kind: str
    params: Tuple[Tuple[str, Any], ...]
    beta_0: float
    beta_1: float
    period: Optional[float] = None
    offset: float = 0.0
    _expr: Optional[Callable] = field(default=None, repr=False, compare=False)

    @property
    def parameters(self) -> Dict[str, Any]:
        return dict(self.params)

    @property
    def recurrence_class(self) -> str:
        return RECURRENCE_CLASS[self.kind]

    def _raw(self, t: np.ndarray) -> np.ndarray:
        p = self.parameters
        if self.kind == "constant":
            return np.full(t.shape, p["b"])
        if self.kind == "periodic":
            return p["a"] + p["b"] * np.sin(TWO_PI * t / p["T"])
        if self.kind == "quasi_periodic":
            return p["a"] + p["b"] * np.sin(t) + p["c"] * np.sin(SQRT2 * t)
        if self.kind == "almost_automorphic":
            return p["a"] + p["b"] * np.sin(1.0 / (2.0 + np.cos(t) + np.cos(SQRT2 * t)))
        return np.broadcast_to(np.asarray(self._expr(t), dtype=float), t.shape).astype(float)

    def __call__(self, t):
        arr = np.asarray(t, dtype=float)
        values = self._raw(arr)
        if self.offset:
            values = values - self.offset
        return _as_output(t, values)

    def minus(self, c: float) -> "BetaFn":
        """β − c (전이 bracket 방정식용), 주기성 유지"""
        if c < 0:
            raise ConfigurationError(f"shift constant must be nonnegative, got {c}")
        if self.beta_0 - c <= 0:
            raise IncompatibleCoefficientsError(
                f"β − {c} is not positive: beta_0 = {self.beta_0}"
            )
        return BetaFn(
            kind=self.kind,
            params=self.params,
            beta_0=self.beta_0 - c,
            beta_1=self.beta_1 - c,
            period=self.period,
            offset=self.offset + c,
            _expr=self._expr,
        )

    def describe(self) -> Dict[str, Any]:
        return {
            "kind": self.kind,
            **self.parameters,
            "beta_0": self.beta_0,
            "beta_1": self.beta_1,
            "period": self.period,
            "offset": self.offset,
        }


def make_beta(kind: str, params: Optional[Dict[str, Any]] = None) -> BetaFn:
    """
    Build a BetaFn

    Kinds:
        constant: b
        periodic: a + b·sin(2πt/T), a > |b|
        quasi_periodic: a + b·sin t + c·sin(√2 t), a > |b| + |c|
        almost_automorphic: a + b·sin(1/(2 + cos t + cos √2 t)), a > |b|
        custom: expr (in t) + 사용자 상·하한 beta_0, beta_1
    """
    params = dict(params or {})
    params.pop("kind", None)
    if kind not in BETA_KINDS:
        raise ConfigurationError(f"unknown beta kind {kind!r} (expected one of {', '.join(BETA_KINDS)})")

    if kind == "constant":
        b = _param(params, "b", "value")
        if not b > 0:
            raise ConfigurationError(f"constant beta must be positive, got b={b}")
        return BetaFn(kind, (("b", b),), beta_0=b, beta_1=b)

    if kind == "periodic":
        a = _param(params, "a")
        b = _param(params, "b")
        T = _param(params, "T", "period")
        if not T > 0:
            raise ConfigurationError(f"period must be positive, got T={T}")
        if not a > abs(b):
            raise ConfigurationError(f"periodic beta needs a > |b|, got a={a}, b={b}")
        return BetaFn(kind, (("a", a), ("b", b), ("T", T)), beta_0=a - abs(b), beta_1=a + abs(b), period=T)

    if kind == "quasi_periodic":
        a = _param(params, "a")
        b = _param(params, "b")
        c = _param(params, "c")
        if not a > abs(b) + abs(c):
            raise ConfigurationError(f"quasi-periodic beta needs a > |b| + |c|, got a={a}, b={b}, c={c}")
        spread = abs(b) + abs(c)
        return BetaFn(kind, (("a", a), ("b", b), ("c", c)), beta_0=a - spread, beta_1=a + spread)

    if kind == "almost_automorphic":
        a = _param(params, "a")
        b = _param(params, "b")
        if not a > abs(b):
            raise ConfigurationError(f"almost automorphic beta needs a > |b|, got a={a}, b={b}")
        return BetaFn(kind, (("a", a), ("b", b)), beta_0=a - abs(b), beta_1=a + abs(b))

    expr = params.get("expr")
    if not isinstance(expr, str):
        raise ConfigurationError("custom beta needs an 'expr' string in t")
    beta_0 = _param(params, "beta_0")
    beta_1 = _param(params, "beta_1")
    if not (0 < beta_0 <= beta_1):
        raise ConfigurationError(f"custom beta needs 0 < beta_0 ≤ beta_1, got ({beta_0}, {beta_1})")
    period = params.get("period")
    fn = compile_expression(expr, ("t",))
    beta = BetaFn(
        kind, (("expr", expr),), beta_0=beta_0, beta_1=beta_1,
        period=float(period) if period is not None else None, _expr=fn,
    )
    ts = _sample_times()
    values = beta(ts)
    if not np.all(np.isfinite(values)):
        raise ConfigurationError(f"custom beta {expr!r} is not finite on the sampling window")
    lo, hi = float(values.min()), float(values.max())
    if lo < beta_0 or hi > beta_1:
        raise ConfigurationError(
            f"custom beta {expr!r} leaves its declared band: sampled range [{lo}, {hi}] vs [{beta_0}, {beta_1}]"
        )
    logger.info(f"🧪 Custom beta {expr!r} verified on {ts.size} samples: [{lo:.6g}, {hi:.6g}]")
    return beta


def beta_descriptor(flag: str) -> Dict[str, Any]:
    """
    CLI 표기 → JSON descriptor

    Examples:
        "constant:1", "periodic:2,1,6.2831853", "quasi_periodic:3,1,1",
        "almost_automorphic:3,1", "custom:2+sin(t)|1|3"
    """
    kind, _, rest = flag.partition(":")
    kind = kind.strip()
    if kind == "custom":
        parts = rest.split("|")
        if len(parts) != 3:
            raise ConfigurationError("custom beta flag must look like custom:<expr>|<beta_0>|<beta_1>")
        return {"kind": kind, "expr": parts[0], "beta_0": parts[1], "beta_1": parts[2]}
    names = {
        "constant": ("b",),
        "periodic": ("a", "b", "T"),
        "quasi_periodic": ("a", "b", "c"),
        "almost_automorphic": ("a", "b"),
    }.get(kind)
    if names is None:
        raise ConfigurationError(f"unknown beta kind {kind!r}")
    values = [v for v in rest.split(",") if v.strip()]
    if len(values) != len(names):
        raise ConfigurationError(f"beta kind {kind!r} takes {len(names)} values ({', '.join(names)})")
    try:
        numbers = [float(v) for v in values]
    except ValueError:
        raise ConfigurationError(f"beta flag {flag!r}: values must be numbers")
    return {"kind": kind, **dict(zip(names, numbers))}


def parse_beta_flag(flag: str) -> BetaFn:
    descriptor = beta_descriptor(flag)
    return make_beta(descriptor.pop("kind"), descriptor)


# ============================================================
# γ
# ============================================================

@dataclass(frozen=True)
class GammaFn:
    """γ(t, x) with band constants c_1 ≤ c_2"""

    kind: str
    c_1: float
    c_2: float
    variant: str
    params: Tuple[Tuple[str, Any], ...] = ()
    period: Optional[float] = None
    _expr: Optional[Callable] = field(default=None, repr=False, compare=False)

    @property
    def parameters(self) -> Dict[str, Any]:
        return dict(self.params)

    @property
    def is_zero(self) -> bool:
        return self.kind == "zero"

    def profile(self, t):
        """c(t) (profile kind 전용)"""
        p = self.parameters
        arr = np.asarray(t, dtype=float)
        values = p["mean"] + p["amplitude"] * np.sin(TWO_PI * arr / p["period"])
        return _as_output(t, values)

    def __call__(self, t, x):
        t_arr = np.asarray(t, dtype=float)
        x_arr = np.asarray(x, dtype=float)
        if self.kind == "zero":
            values = np.zeros(np.broadcast(t_arr, x_arr).shape)
        elif self.kind == "cubic_profile":
            values = self.profile(t_arr) * x_arr ** 3
        elif self.kind == "quadratic_profile":
            values = self.profile(t_arr) * x_arr ** 2
        else:
            values = np.asarray(self._expr(t_arr, x_arr), dtype=float)
            # γ(t, 0) = 0 정확히
            values = np.where(x_arr == 0.0, 0.0, values)
        if np.ndim(t) == 0 and np.ndim(x) == 0:
            return float(values)
        return values

    def describe(self) -> Dict[str, Any]:
        return {"kind": self.kind, "variant": self.variant, "c_1": self.c_1, "c_2": self.c_2, **self.parameters}


def _check_gamma_band(gamma: GammaFn, ts: np.ndarray) -> None:
    """샘플 (t, x), |x| ≤ 10 에서 band 조건 검사"""
    xs = np.linspace(-10.0, 10.0, 81)
    T, X = np.meshgrid(ts, xs[xs != 0.0], indexing="ij")
    g = gamma(T, X)
    if gamma.variant == "pitchfork":
        lhs, scale = g * X, X ** 4
    else:
        lhs, scale = g, X ** 2
    tol = 1e-12 * scale
    if np.any(lhs < gamma.c_1 * scale - tol) or np.any(lhs > gamma.c_2 * scale + tol):
        raise ConfigurationError(
            f"gamma ({gamma.kind}) leaves the {gamma.variant} band [{gamma.c_1}, {gamma.c_2}] on sampled points"
        )
    zero = gamma(ts, np.zeros_like(ts))
    if np.any(zero != 0.0):
        raise ConfigurationError(f"gamma ({gamma.kind}) must vanish at x = 0")


def make_gamma(kind: str, params: Optional[Dict[str, Any]] = None, variant: str = "pitchfork") -> GammaFn:
    """
    Build a GammaFn

    Kinds:
        zero: γ ≡ 0 (c_1 = c_2 = 0)
        cubic_profile: c(t)·x³ (pitchfork), c(t) = mean + amplitude·sin(2πt/period) 또는 상수 c
                       (c_1, c_2만 주면 mean = (c_1+c_2)/2, amplitude = (c_2−c_1)/2)
        quadratic_profile: c(t)·x² (transcritical), c(t) 동일
        custom: expr (in t, x) + 사용자 c_1, c_2
    """
    params = dict(params or {})
    params.pop("kind", None)
    if variant not in VARIANTS:
        raise ConfigurationError(f"unknown gamma variant {variant!r}")
    if kind not in GAMMA_KINDS:
        raise ConfigurationError(f"unknown gamma kind {kind!r} (expected one of {', '.join(GAMMA_KINDS)})")

    if kind == "zero":
        return GammaFn("zero", 0.0, 0.0, variant)

    if kind in ("cubic_profile", "quadratic_profile"):
        expected = "pitchfork" if kind == "cubic_profile" else "transcritical"
        if variant != expected:
            raise ConfigurationError(f"{kind} belongs to the {expected} variant, not {variant}")
        if "c" in params:
            mean, amplitude, period = _param(params, "c"), 0.0, TWO_PI
        elif "mean" not in params and "m" not in params and "c_1" in params and "c_2" in params:
            # band만 주어지면 band를 정확히 채우는 사인 profile
            lo, hi = _param(params, "c_1"), _param(params, "c_2")
            mean, amplitude = 0.5 * (lo + hi), 0.5 * (hi - lo)
            period = _param(params, "period", "P", default=TWO_PI)
        else:
            mean = _param(params, "mean", "m")
            amplitude = _param(params, "amplitude", "A", default=0.0)
            period = _param(params, "period", "P", default=TWO_PI)
        if not period > 0:
            raise ConfigurationError(f"gamma profile period must be positive, got {period}")
        c_1 = mean - abs(amplitude)
        c_2 = mean + abs(amplitude)
        if "c_1" in params or "c_2" in params:
            declared = (_param(params, "c_1", default=c_1), _param(params, "c_2", default=c_2))
            if declared[0] > c_1 or declared[1] < c_2:
                raise ConfigurationError(f"declared band {declared} does not contain the profile range [{c_1}, {c_2}]")
            c_1, c_2 = declared
        if c_1 < 0 or c_2 < 0:
            raise ConfigurationError(f"gamma band constants must be nonnegative, got ({c_1}, {c_2})")
        gamma = GammaFn(
            kind, c_1, c_2, variant,
            params=(("mean", mean), ("amplitude", amplitude), ("period", period)),
            period=period if amplitude else None,
        )
        ts = np.linspace(0.0, period, 4097)
        prof = gamma.profile(ts)
        lo, hi = float(prof.min()), float(prof.max())
        logger.debug(f"γ profile sampled over one period: [{lo:.6g}, {hi:.6g}]")
        if lo < c_1 - 1e-12 or hi > c_2 + 1e-12:
            raise ConfigurationError(f"gamma profile range [{lo}, {hi}] leaves band [{c_1}, {c_2}]")
        return gamma

    expr = params.get("expr")
    if not isinstance(expr, str):
        raise ConfigurationError("custom gamma needs an 'expr' string in t and x")
    c_1 = _param(params, "c_1")
    c_2 = _param(params, "c_2")
    if c_1 < 0 or c_2 < 0:
        raise ConfigurationError(f"gamma band constants must be nonnegative, got ({c_1}, {c_2})")
    if c_1 > c_2:
        raise ConfigurationError(f"gamma band needs c_1 ≤ c_2, got ({c_1}, {c_2})")
    period = params.get("period")
    gamma = GammaFn(
        kind, c_1, c_2, variant, params=(("expr", expr),),
        period=float(period) if period is not None else None,
        _expr=compile_expression(expr, ("t", "x")),
    )
    _check_gamma_band(gamma, np.linspace(-settings.SAMPLE_WINDOW, settings.SAMPLE_WINDOW, 401))
    return gamma


def gamma_descriptor(flag: str) -> Dict[str, Any]:
    """
    CLI 표기 → JSON descriptor

    Examples:
        "zero", "cubic_profile:0.3", "quadratic_profile:0.1,0.3", "quadratic_profile:0.2,0.1,6.2831853",
        "custom:0.2*x**3|0.2|0.2"
    """
    kind, _, rest = flag.partition(":")
    kind = kind.strip()
    if kind == "zero":
        return {"kind": kind}
    if kind == "custom":
        parts = rest.split("|")
        if len(parts) != 3:
            raise ConfigurationError("custom gamma flag must look like custom:<expr>|<c_1>|<c_2>")
        return {"kind": kind, "expr": parts[0], "c_1": parts[1], "c_2": parts[2]}
    values = [v for v in rest.split(",") if v.strip()]
    names = {1: ("c",), 2: ("c_1", "c_2"), 3: ("mean", "amplitude", "period")}.get(len(values))
    if names is None:
        raise ConfigurationError(f"gamma flag {flag!r}: expected c, c_1,c_2 or mean,amplitude,period")
    try:
        numbers = [float(v) for v in values]
    except ValueError:
        raise ConfigurationError(f"gamma flag {flag!r}: values must be numbers")
    return {"kind": kind, **dict(zip(names, numbers))}


def parse_gamma_flag(flag: str, variant: str = "pitchfork") -> GammaFn:
    descriptor = gamma_descriptor(flag)
    return make_gamma(descriptor.pop("kind"), descriptor, variant)


# ============================================================
# pairing / envelope
# ============================================================

class CertifiedBounds(NamedTuple):
    beta_0: float
    beta_1: float
    c_1: float
    c_2: float


def validate_pairing(beta: BetaFn, gamma: GammaFn) -> CertifiedBounds:
    """표준 가정 c₁ ≤ c₂ < β₀ 검사"""
    if gamma.c_1 > gamma.c_2:
        raise ConfigurationError(f"gamma band needs c_1 ≤ c_2, got ({gamma.c_1}, {gamma.c_2})")
    if gamma.c_2 >= beta.beta_0:
        raise IncompatibleCoefficientsError(
            f"standing assumption c₂ < β₀ fails: c₂ = {gamma.c_2} ≥ β₀ = {beta.beta_0}"
        )
    return CertifiedBounds(beta.beta_0, beta.beta_1, gamma.c_1, gamma.c_2)


def constant_fn(value: float) -> Callable:
    """상수 시간 함수 (벡터화)"""
    def fn(t):
        return _as_output(t, np.full(np.shape(t), float(value)))
    fn.constant = float(value)
    return fn


@dataclass(frozen=True)
class LinearEnvelopeData:
    """dy = (−νy + |g| + h)dt + δy∘dω 의 계수"""

    nu: float
    g: Callable = field(repr=False)
    h: Callable = field(repr=False)
    alpha: float
    forcing_bound: float
    period: Optional[float] = None

    def __post_init__(self):
        if not self.nu > 0:
            raise ConfigurationError(f"nu must be positive, got {self.nu}")
        if not (0 < self.alpha < self.nu):
            raise ConfigurationError(f"alpha must lie in (0, nu={self.nu}), got {self.alpha}")
        if self.forcing_bound < 0:
            raise ConfigurationError("forcing bound must be nonnegative")

    def forcing(self, t):
        """|g(t)| + h(t)"""
        arr = np.asarray(t, dtype=float)
        values = np.abs(np.asarray(self.g(arr), dtype=float)) + np.asarray(self.h(arr), dtype=float)
        return _as_output(t, np.broadcast_to(values, arr.shape).astype(float))

    @property
    def is_zero(self) -> bool:
        return self.forcing_bound == 0.0


def make_envelope(
    nu: float,
    g: Optional[Callable] = None,
    h: Optional[Callable] = None,
    alpha: Optional[float] = None,
    forcing_bound: Optional[float] = None,
    period: Optional[float] = None,
) -> LinearEnvelopeData:
    """
    선형 envelope 데이터 생성

    forcing_bound가 없으면 샘플링 창에서 sup(|g| + h)를 측정한다.
    h < 0 또는 유한하지 않은 값은 ConfigurationError.
    """
    g = g or constant_fn(0.0)
    h = h or constant_fn(0.0)
    alpha = alpha if alpha is not None else 0.5 * nu
    ts = _sample_times()
    hv = np.asarray(h(ts), dtype=float)
    gv = np.asarray(g(ts), dtype=float)
    if np.any(hv < 0):
        raise ConfigurationError("h must be nonnegative")
    forcing = np.abs(gv) + hv
    if not np.all(np.isfinite(forcing)):
        raise ConfigurationError("|g| + h is not finite on the sampling window")
    measured = float(forcing.max(initial=0.0))
    if forcing_bound is None:
        forcing_bound = measured
    elif measured > forcing_bound * (1 + 1e-12):
        raise ConfigurationError(f"sampled |g| + h reaches {measured}, above declared bound {forcing_bound}")
    return LinearEnvelopeData(nu=nu, g=g, h=h, alpha=alpha, forcing_bound=forcing_bound, period=period)


def young_constant(lam: float, beta_0: float, c_2: float, margin: float = 0.1) -> float:
    """
    c = max_x (|λ+1|·x − ½(β₀−c₂)·x³) · (1 + margin)

    λx − (β₀−c₂)x³ ≤ −x + c 를 만족시키는 상수. 최댓값이 0이면 margin 자체를 쓴다.
    """
    gap = beta_0 - c_2
    if not gap > 0:
        raise IncompatibleCoefficientsError(f"standing assumption c₂ < β₀ fails: β₀ − c₂ = {gap}")
    slope = abs(lam + 1.0)
    if slope == 0.0:
        return margin
    a = 0.5 * gap
    x_hi = 2.0 * math.sqrt(slope / (3.0 * a)) + 1.0
    res = optimize.minimize_scalar(
        lambda x: -(slope * x - a * x ** 3),
        bounds=(0.0, x_hi),
        method="bounded",
        options={"xatol": 1e-12},
    )
    peak = max(-float(res.fun), 0.0)
    return peak * (1.0 + margin) if peak > 0 else margin


def envelope_for(
    lam: float,
    bounds: CertifiedBounds,
    forcing: Optional[Callable] = None,
    forcing_bound: float = 0.0,
    margin: float = 0.1,
) -> LinearEnvelopeData:
    """pitchfork 일반 γ 방정식의 선형 envelope (ν = 1, g = forcing, h ≡ c)"""
    c = young_constant(lam, bounds.beta_0, bounds.c_2, margin)
    g = forcing or constant_fn(0.0)
    return LinearEnvelopeData(
        nu=1.0, g=g, h=constant_fn(c), alpha=0.5, forcing_bound=c + abs(forcing_bound),
    )


def load_coefficients(descriptor: Dict[str, Any], variant: str = "pitchfork") -> Tuple[BetaFn, GammaFn]:
    """
    JSON 계수 descriptor → (β, γ)

    Example:
        {"beta": {"kind": "periodic", "a": 2, "b": 1, "T": 6.2831853}, "gamma": {"kind": "zero"}}
    """
    if hasattr(descriptor, "model_dump"):
        descriptor = descriptor.model_dump(exclude_none=True)
    beta_desc = dict(descriptor.get("beta") or {})
    gamma_desc = dict(descriptor.get("gamma") or {"kind": "zero"})
    if "kind" not in beta_desc:
        raise ConfigurationError("beta descriptor needs a 'kind'")
    beta = make_beta(beta_desc.pop("kind"), beta_desc)
    gamma = make_gamma(gamma_desc.pop("kind", "zero"), gamma_desc, variant)
    validate_pairing(beta, gamma)
    return beta, gamma
