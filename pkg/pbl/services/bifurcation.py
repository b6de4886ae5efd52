"""
Bifurcation Service
λ-sweep: pitchfork / transcritical 분기 그림, 안정성 교대, 재귀 클래스 상속

행(λ, seed)마다 독립 계산이며 오류는 행에 기록하고 sweep은 계속한다.
경로 support가 모자라면 요청된 창으로 넓혀서 MAX_WINDOW까지 다시 시도한다.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from loguru import logger

from pbl.config import settings
from pbl.exceptions import ConfigurationError, ConvergenceError, InsufficientSupportError, PBLError
from pbl.models.results import AttractorInterval, BlowUp, QuasiSolutionTrace
from pbl.services import closed_form, cocycle, integrator, recurrence
from pbl.services.coefficients import BetaFn, GammaFn, envelope_for, validate_pairing
from pbl.services.integrator import DriftSpec
from pbl.services.path_cache import path_cache
from pbl.services.quadrature import QuadratureSpec
from pbl.services.wiener import TimeGrid, WienerPath, zero_path

# λ ≤ 0 pitchfork 끝점의 0 판정 허용 오차
ATTRACTOR_TOL = 1e-4

SCENARIOS = ("pitchfork_exact", "pitchfork_general", "transcritical_exact", "transcritical_general")

DIAGRAM_COLUMNS = [
    "lambda", "tau", "seed", "x_plus", "x_minus", "lower_bound", "upper_bound",
    "stability", "truncation_R", "status",
]


# ============================================================
# records
# ============================================================

@dataclass
class DiagramRow:
    """λ 하나, seed 하나의 기록"""

    lam: float
    tau: float
    seed: Optional[int]
    x_plus: Optional[float] = None
    x_minus: Optional[float] = None
    lower_bound: Optional[float] = None
    upper_bound: Optional[float] = None
    stability: Optional[str] = None
    truncation_R: Optional[float] = None
    status: str = "ok"
    attractor: Optional[AttractorInterval] = None
    error: Optional[Dict[str, Any]] = None
    details: Dict[str, Any] = field(default_factory=dict)

    def csv_record(self) -> Dict[str, Any]:
        return {
            "lambda": self.lam,
            "tau": self.tau,
            "seed": self.seed,
            "x_plus": self.x_plus,
            "x_minus": self.x_minus,
            "lower_bound": self.lower_bound,
            "upper_bound": self.upper_bound,
            "stability": self.stability,
            "truncation_R": self.truncation_R,
            "status": self.status,
        }

    def to_dict(self) -> Dict[str, Any]:
        data = self.csv_record()
        data["attractor"] = self.attractor.to_dict() if self.attractor else None
        if self.error:
            data["error"] = self.error
        if self.details:
            data["details"] = self.details
        return data


@dataclass
class BifurcationDiagram:
    """λ 격자 위의 분기 기록"""

    scenario: str
    tau: float
    seeds: List[Optional[int]]
    lam_grid: List[float]
    rows: List[DiagramRow]
    coefficients: Dict[str, Any] = field(default_factory=dict)
    recurrence: List[Dict[str, Any]] = field(default_factory=list)
    invariants: Dict[str, Any] = field(default_factory=dict)
    traces: Dict[str, QuasiSolutionTrace] = field(default_factory=dict, repr=False)
    landscapes: Dict[str, pd.DataFrame] = field(default_factory=dict, repr=False)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame([row.csv_record() for row in self.rows], columns=DIAGRAM_COLUMNS)

    @property
    def ok(self) -> bool:
        return all(row.status in ("ok", "degenerate") for row in self.rows) and all(
            v.get("passed", True) for v in self.invariants.values()
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "scenario": self.scenario,
            "tau": self.tau,
            "seeds": self.seeds,
            "lambda_grid": self.lam_grid,
            "coefficients": self.coefficients,
            "rows": [row.to_dict() for row in self.rows],
            "invariants": self.invariants,
            "recurrence": self.recurrence,
        }


@dataclass(frozen=True)
class SweepOptions:
    """sweep 공통 설정"""

    delta: float = 0.0
    spec: QuadratureSpec = field(default_factory=QuadratureSpec)
    schedule: Tuple[float, ...] = field(default_factory=lambda: tuple(settings.PULLBACK_SCHEDULE))
    pullback_tol: float = field(default_factory=lambda: settings.PULLBACK_TOL)
    step: Optional[float] = None
    grid: Optional[TimeGrid] = None
    stability: bool = True
    workers: int = field(default_factory=lambda: settings.WORKERS)
    max_window: float = field(default_factory=lambda: settings.MAX_WINDOW)
    max_truncation_window: float = field(default_factory=lambda: settings.MAX_TRUNCATION_WINDOW)

    def time_grid(self) -> TimeGrid:
        return self.grid or TimeGrid.span(settings.GRID_T_MIN, settings.GRID_T_MAX, settings.GRID_STEP)


# ============================================================
# path support
# ============================================================

def load_path(seed: Optional[int], grid: TimeGrid) -> WienerPath:
    """seed None → ω ≡ 0"""
    if seed is None:
        return zero_path(grid)
    return path_cache.get_path(seed, grid)


def _widened(
    grid: TimeGrid,
    error: InsufficientSupportError,
    max_window: float,
    max_truncation_window: Optional[float] = None,
) -> Optional[TimeGrid]:
    """
    오류가 요청한 창을 덮는 더 넓은 격자

    일반 요청은 max_window를 넘으면 None. 꼬리 절단 요청은 max_truncation_window까지 허용하고,
    추정치가 그보다 크면 상한 길이로 잘라서 한 번 더 시도한다.
    """
    lo, hi = grid.t_min, grid.t_max
    if error.required_window is not None:
        want_lo, want_hi = error.required_window
        lo, hi = min(lo, want_lo), max(hi, want_hi)
    if (lo, hi) == (grid.t_min, grid.t_max):
        # 창을 모르면 과거 쪽을 두 배로
        lo = 2.0 * lo
    lo = math.floor(lo)
    hi = math.ceil(hi)
    if hi - lo <= max_window:
        return TimeGrid.span(lo, hi, grid.step)
    if not error.truncation or max_truncation_window is None or max_truncation_window <= max_window:
        return None
    if hi - lo > max_truncation_window:
        if lo < grid.t_min:
            lo = math.ceil(hi - max_truncation_window)
        else:
            hi = math.floor(lo + max_truncation_window)
    if lo >= grid.t_min and hi <= grid.t_max:
        return None
    return TimeGrid.span(min(lo, grid.t_min), max(hi, grid.t_max), grid.step)


def with_support(
    seed: Optional[int],
    grid: TimeGrid,
    compute: Callable[[WienerPath], Any],
    max_window: Optional[float] = None,
    max_truncation_window: Optional[float] = None,
) -> Tuple[Any, WienerPath]:
    """InsufficientSupportError가 나면 경로를 넓혀서 다시 계산"""
    max_window = settings.MAX_WINDOW if max_window is None else max_window
    if max_truncation_window is None:
        max_truncation_window = settings.MAX_TRUNCATION_WINDOW
    while True:
        path = load_path(seed, grid)
        try:
            return compute(path), path
        except InsufficientSupportError as e:
            wider = _widened(grid, e, max_window, max_truncation_window)
            if wider is None:
                raise
            logger.info(f"↔️ Widening path (seed={seed}) to [{wider.t_min:g}, {wider.t_max:g}]: {e.detail}")
            grid = wider


def _run_rows(tasks: Sequence[Tuple[float, Optional[int]]], work: Callable, workers: int) -> List[DiagramRow]:
    """행 단위 병렬 실행, 출력 순서는 입력 순서"""
    if workers <= 1:
        return [work(lam, seed) for lam, seed in tasks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda task: work(*task), tasks))


def _error_row(row: DiagramRow, e: PBLError) -> DiagramRow:
    row.status = "error"
    row.error = e.to_dict()
    logger.warning(f"⚠️ Row λ={row.lam}, seed={row.seed} failed: {e.detail}")
    return row


# ============================================================
# pitchfork
# ============================================================

def pitchfork_handle(lam: float, beta: BetaFn, gamma: GammaFn, options: SweepOptions) -> cocycle.CocycleHandle:
    if gamma.is_zero:
        return cocycle.closed_form_handle("pitchfork", lam, options.delta, beta=beta, spec=options.spec)
    drift = DriftSpec(family="pitchfork", lam=lam, delta=options.delta, beta=beta, gamma=gamma)
    return cocycle.integrator_handle(drift, options.step)


def pitchfork_attractor(
    lam: float, beta: BetaFn, gamma: GammaFn, options: SweepOptions, path: WienerPath, tau: float
) -> AttractorInterval:
    """±ξ (선형 envelope)에서 출발한 monotone pullback 끝점"""
    bounds = validate_pairing(beta, gamma)
    envelope = envelope_for(lam, bounds)
    xi = closed_form.xi_generator(envelope, options.delta, options.spec)
    handle = pitchfork_handle(lam, beta, gamma, options)
    return cocycle.attractor_endpoints(handle, xi, path, tau, options.schedule, options.pullback_tol)


def _pitchfork_row(lam, seed, tau, beta, gamma, options) -> DiagramRow:
    row = DiagramRow(lam=lam, tau=tau, seed=seed)
    bounds = validate_pairing(beta, gamma)
    grid = options.time_grid()

    def compute(path: WienerPath) -> None:
        if lam > 0 and gamma.is_zero:
            quasi = closed_form.quasi_pitchfork(lam, options.delta, beta, path, tau, options.spec)
            row.x_plus, row.x_minus = quasi.x_plus, quasi.x_minus
            row.truncation_R = quasi.truncation
            row.attractor = AttractorInterval(
                tau=tau, lower=quasi.x_minus, upper=quasi.x_plus, iterations=0, residual=quasi.tail_bound,
            )
        else:
            interval = pitchfork_attractor(lam, beta, gamma, options, path, tau)
            row.attractor = interval
            row.x_plus, row.x_minus = interval.upper, interval.lower
        if lam > 0:
            row.lower_bound, row.upper_bound = closed_form.sandwich_bounds(
                lam, options.delta, bounds, path, tau, options.spec
            )
        if options.stability:
            handle = pitchfork_handle(lam, beta, gamma, options)
            probe = cocycle.stability_probe(handle, path, tau, schedule=options.schedule, domain="R")
            row.stability = probe["verdict"]
            row.details["stability"] = probe

    try:
        _, path = with_support(seed, grid, compute, options.max_window, options.max_truncation_window)
        row.details["window"] = [path.grid.t_min, path.grid.t_max]
    except PBLError as e:
        return _error_row(row, e)

    if lam > 0 and not (row.x_minus < 0 < row.x_plus):
        row.status = "invariant_violation"
        row.details["violation"] = "expected x⁻ < 0 < x⁺"
    elif lam <= 0 and not _is_trivial(row):
        row.status = "invariant_violation"
        row.details["violation"] = f"expected |x^±| ≤ {ATTRACTOR_TOL:g} for λ ≤ 0"
    return row


def _is_trivial(row: DiagramRow) -> bool:
    return abs(row.x_plus) <= ATTRACTOR_TOL and abs(row.x_minus) <= ATTRACTOR_TOL


def pitchfork_sweep(
    beta: BetaFn,
    gamma: GammaFn,
    tau: float,
    lam_grid: Sequence[float],
    seeds: Sequence[Optional[int]],
    options: Optional[SweepOptions] = None,
) -> BifurcationDiagram:
    """
    λ ≤ 0: 자명 분기 (attractor_endpoints, ≈ 0)
    λ > 0: γ ≡ 0이면 x^±_λ 정확해, 아니면 monotone pullback 끝점 + sandwich bounds
    """
    options = options or SweepOptions()
    lam_grid = [float(lam) for lam in lam_grid]
    if not any(lam <= 0 for lam in lam_grid) or not any(lam > 0 for lam in lam_grid):
        logger.warning("⚠️ λ grid does not straddle 0; the stability exchange cannot be observed")
    scenario = "pitchfork_exact" if gamma.is_zero else "pitchfork_general"
    logger.info(f"🍴 Pitchfork sweep ({scenario}) over λ={lam_grid}, seeds={list(seeds)}")
    tasks = [(lam, seed) for seed in seeds for lam in lam_grid]
    rows = _run_rows(tasks, lambda lam, seed: _pitchfork_row(lam, seed, tau, beta, gamma, options), options.workers)
    diagram = BifurcationDiagram(
        scenario=scenario, tau=tau, seeds=list(seeds), lam_grid=lam_grid, rows=rows,
        coefficients={"beta": beta.describe(), "gamma": gamma.describe(), "delta": options.delta},
    )
    diagram.invariants = pitchfork_invariants(diagram, options.stability)
    return diagram


def _per_seed(diagram: BifurcationDiagram) -> Dict[Optional[int], List[DiagramRow]]:
    groups: Dict[Optional[int], List[DiagramRow]] = {}
    for row in diagram.rows:
        groups.setdefault(row.seed, []).append(row)
    return groups


def stability_flips(rows: Sequence[DiagramRow]) -> Optional[int]:
    """λ 오름차순으로 0의 안정성 판정이 바뀐 횟수 (asymptotically_stable만 안정)"""
    verdicts = [cocycle.is_stable(r.stability) for r in sorted(rows, key=lambda r: r.lam) if r.stability]
    if len(verdicts) < 2:
        return None
    return int(sum(a != b for a, b in zip(verdicts, verdicts[1:])))


def pitchfork_invariants(diagram: BifurcationDiagram, with_stability: bool = True) -> Dict[str, Any]:
    """대칭, 붕괴 (|x^±| 감소), λ ≤ 0 자명 분기, 안정성 교대 1회"""
    out: Dict[str, Any] = {}
    symmetric = True
    collapse = True
    trivial: List[float] = []
    flips: Dict[str, Optional[int]] = {}
    for seed, rows in _per_seed(diagram).items():
        done = [r for r in rows if r.status == "ok" and r.lam > 0]
        trivial.extend(r.lam for r in rows if r.lam <= 0 and r.x_plus is not None and not _is_trivial(r))
        for r in done:
            if diagram.scenario == "pitchfork_exact" and r.x_minus != -r.x_plus:
                symmetric = False
        positive = sorted(done, key=lambda r: r.lam)
        magnitudes = [abs(r.x_plus) for r in positive]
        if any(b <= a for a, b in zip(magnitudes, magnitudes[1:])):
            collapse = False
        if with_stability:
            flips[str(seed)] = stability_flips([r for r in rows if r.status == "ok"])
    if diagram.scenario == "pitchfork_exact":
        out["symmetry"] = {"passed": symmetric}
    out["collapse"] = {"passed": collapse}
    out["trivial_branch"] = {"passed": not trivial, "tol": ATTRACTOR_TOL, "violations": trivial}
    if with_stability:
        out["stability_exchange"] = {
            "passed": all(v == 1 for v in flips.values() if v is not None),
            "flips": flips,
        }
    return out


# ============================================================
# transcritical
# ============================================================

def transcritical_handle(lam: float, beta: BetaFn, gamma: GammaFn, options: SweepOptions) -> cocycle.CocycleHandle:
    if gamma.is_zero:
        return cocycle.closed_form_handle("transcritical", lam, options.delta, beta=beta, spec=options.spec)
    drift = DriftSpec(family="transcritical", lam=lam, delta=options.delta, beta=beta, gamma=gamma)
    return cocycle.integrator_handle(drift, options.step)


def future_limit(
    drift: DriftSpec,
    path: WienerPath,
    tau: float,
    x0: float,
    schedule: Sequence[float],
    tol: float,
    step: Optional[float] = None,
    max_time: Optional[float] = None,
) -> float:
    """
    τ+t에서 τ까지 역방향 적분한 값의 t → ∞ 극한 (λ < 0의 x_λ)

    역시간에서 x_λ < 0은 (−∞, 0)을 끌어당긴다. 두 번 연속 일치하면 수렴.
    """
    max_time = settings.MAX_PULLBACK if max_time is None else max_time
    ts = [float(t) for t in schedule]
    values: List[float] = []
    while True:
        for t in ts:
            value = integrator.forward_limit_state(drift, path, tau, t, [x0], step)[0]
            if isinstance(value, BlowUp):
                raise ConvergenceError(f"reverse-time integration from t={t} blew up")
            values.append(value)
            if len(values) >= 3:
                a, b, c = values[-3:]
                scale = max(1.0, abs(c))
                if abs(c - b) <= tol * scale and abs(b - a) <= tol * scale:
                    return c
        nxt = ts[-1] * 2.0
        if nxt > max_time:
            raise ConvergenceError(f"future limit did not converge by t={ts[-1]}")
        ts = [nxt]


def transcritical_general(
    lam: float, beta: BetaFn, gamma: GammaFn, options: SweepOptions, path: WienerPath, tau: float
) -> Tuple[float, float, float]:
    """
    γ ≢ 0 의 x_λ(τ, ω) → (값, bracket 아래, bracket 위)

    bracket 중점에서 출발해 λ > 0이면 pullback 극한, λ < 0이면 역시간 극한.
    """
    lower, upper = closed_form.transcritical_bracket(
        lam, options.delta, beta, (gamma.c_1, gamma.c_2), path, tau, options.spec
    )
    drift = DriftSpec(family="transcritical", lam=lam, delta=options.delta, beta=beta, gamma=gamma)
    start = 0.5 * (lower + upper)
    if lam > 0:
        handle = cocycle.integrator_handle(drift, options.step)
        result = cocycle.pullback_limit(handle, path, tau, start, options.schedule, options.pullback_tol)
        if not result.converged:
            raise ConvergenceError(f"pullback to x_λ did not converge (λ={lam})")
        return result.limit, lower, upper
    value = future_limit(drift, path, tau, start, options.schedule, options.pullback_tol, options.step)
    return value, lower, upper


def _transcritical_row(lam, seed, tau, beta, gamma, options) -> DiagramRow:
    row = DiagramRow(lam=lam, tau=tau, seed=seed)
    if lam == 0:
        row.status = "degenerate"
        row.details["note"] = "degenerate: no x_λ defined at λ = 0"
        return row
    grid = options.time_grid()

    def compute(path: WienerPath) -> None:
        if gamma.is_zero:
            quasi = closed_form.quasi_transcritical(lam, options.delta, beta, path, tau, options.spec)
            row.x_plus = quasi.value
            row.truncation_R = quasi.truncation
        else:
            row.x_plus, row.lower_bound, row.upper_bound = transcritical_general(
                lam, beta, gamma, options, path, tau
            )
        if options.stability:
            handle = transcritical_handle(lam, beta, gamma, options)
            probe = cocycle.stability_probe(handle, path, tau, schedule=options.schedule, domain="positive")
            row.stability = probe["verdict"]
            row.details["stability"] = probe

    try:
        _, path = with_support(seed, grid, compute, options.max_window, options.max_truncation_window)
        row.details["window"] = [path.grid.t_min, path.grid.t_max]
    except PBLError as e:
        return _error_row(row, e)

    if np.sign(row.x_plus) != np.sign(lam):
        row.status = "invariant_violation"
        row.details["violation"] = "expected sign(x_λ) = sign(λ)"
    return row


def transcritical_sweep(
    beta: BetaFn,
    gamma: GammaFn,
    tau: float,
    lam_grid: Sequence[float],
    seeds: Sequence[Optional[int]],
    options: Optional[SweepOptions] = None,
) -> BifurcationDiagram:
    """x_λ (γ ≡ 0이면 정확해, 아니면 bracket + 적분) 와 (0, ∞)에서의 0의 안정성"""
    options = options or SweepOptions()
    if gamma.variant != "transcritical":
        raise ConfigurationError(f"transcritical sweep needs a transcritical γ, got variant {gamma.variant!r}")
    lam_grid = [float(lam) for lam in lam_grid]
    scenario = "transcritical_exact" if gamma.is_zero else "transcritical_general"
    logger.info(f"✂️ Transcritical sweep ({scenario}) over λ={lam_grid}, seeds={list(seeds)}")
    tasks = [(lam, seed) for seed in seeds for lam in lam_grid]
    rows = _run_rows(tasks, lambda lam, seed: _transcritical_row(lam, seed, tau, beta, gamma, options), options.workers)
    diagram = BifurcationDiagram(
        scenario=scenario, tau=tau, seeds=list(seeds), lam_grid=lam_grid, rows=rows,
        coefficients={"beta": beta.describe(), "gamma": gamma.describe(), "delta": options.delta},
    )
    invariants: Dict[str, Any] = {
        "sign_law": {"passed": all(r.status != "invariant_violation" for r in rows)},
    }
    if options.stability:
        flips = {str(seed): stability_flips([r for r in group if r.status == "ok"])
                 for seed, group in _per_seed(diagram).items()}
        invariants["stability_exchange"] = {
            "passed": all(v == 1 for v in flips.values() if v is not None),
            "flips": flips,
        }
    diagram.invariants = invariants
    return diagram


# ============================================================
# recurrence
# ============================================================

@dataclass(frozen=True)
class RecurrenceParams:
    """분기 trace의 재귀 검사 설정"""

    taus: Tuple[float, float] = (0.0, 400.0)
    tau_step: float = 0.05
    period: Optional[float] = None
    period_tol: float = 1e-6
    eps: float = 0.05
    window: Tuple[float, float] = (0.0, 200.0)
    density: float = 10.0
    automorphy_tol: float = 0.05
    automorphy_terms: int = 64
    probes: Tuple[float, ...] = (0.0, 1.0, math.sqrt(2.0))

    def tau_grid(self, period: Optional[float] = None) -> np.ndarray:
        """τ 격자 (period가 있으면 간격을 period의 약수로 맞춘다)"""
        lo, hi = self.taus
        step = self.tau_step
        if period:
            step = period / max(1, round(period / step))
        n = int(math.floor((hi - lo) / step + 1e-9))
        return lo + step * np.arange(n + 1)


def _branch_generator(
    row: DiagramRow, diagram: BifurcationDiagram, beta: BetaFn, gamma: GammaFn, options: SweepOptions
) -> Tuple[closed_form.Generator, str]:
    """행과 같은 방법으로 x⁺ (또는 x_λ)를 τ마다 다시 계산하는 generator"""
    lam = row.lam
    if diagram.scenario.startswith("pitchfork"):
        if gamma.is_zero:
            return closed_form.pitchfork_generator(lam, options.delta, beta, options.spec, "plus"), "plus"

        def pitchfork_upper(tau: float, path: WienerPath) -> float:
            return pitchfork_attractor(lam, beta, gamma, options, path, tau).upper
        return pitchfork_upper, "plus"
    if gamma.is_zero:
        return closed_form.transcritical_generator(lam, options.delta, beta, options.spec), "transcritical"

    def transcritical_value(tau: float, path: WienerPath) -> float:
        return transcritical_general(lam, beta, gamma, options, path, tau)[0]
    return transcritical_value, "transcritical"


def recurrence_sweep(
    diagram: BifurcationDiagram,
    beta: BetaFn,
    gamma: GammaFn,
    params: Optional[RecurrenceParams] = None,
    options: Optional[SweepOptions] = None,
) -> BifurcationDiagram:
    """
    행마다 분기 trace를 τ 창 위에서 만들고 β의 재귀 클래스에 맞는 검사를 붙인다

    periodic β ⇒ 주기 검사, quasi_periodic β ⇒ almost-period 스캔 (주기 검사는 음성 대조로 함께),
    almost_automorphic β ⇒ automorphy probe. γ ≢ 0 이면 주기 검사만 판정하고
    나머지는 탐색 자료로 남긴다.
    """
    params = params or RecurrenceParams()
    options = options or SweepOptions()
    kind = beta.recurrence_class
    period = params.period or beta.period
    if kind == "constant":
        period = period or 2.0 * math.pi
    # 주기 검사 (almost_periodic에서는 음성 대조) 의 T
    control = period if kind in ("periodic", "constant") else None
    if kind == "almost_periodic":
        control = params.period or 2.0 * math.pi
    taus = params.tau_grid(control)

    for row in diagram.rows:
        if row.status != "ok" or row.lam <= 0 and diagram.scenario.startswith("pitchfork"):
            continue
        if not gamma.is_zero and kind != "periodic":
            exploratory = True
        else:
            exploratory = False
        generator, branch = _branch_generator(row, diagram, beta, gamma, options)
        label = f"{branch}@λ={row.lam:g},seed={row.seed}"

        def compute(path: WienerPath):
            trace = closed_form.trace(generator, path, taus, branch, row.lam, label)
            auto = None
            if kind == "almost_automorphic":
                two_pi = 2.0 * math.pi
                auto = {
                    "generator": recurrence.path_generator(generator, path),
                    "sequence": [two_pi * n for n in range(1, params.automorphy_terms + 1)],
                    "tol": params.automorphy_tol,
                    "probes": params.probes,
                }
            if kind in ("periodic", "constant") and control:
                report = recurrence.classify(trace, period=control, period_tol=params.period_tol, automorphy=auto)
            elif kind == "almost_periodic":
                report = recurrence.classify(
                    trace, period=control,
                    period_tol=params.period_tol, eps=params.eps, window=params.window, density=params.density,
                    automorphy=auto,
                )
            else:
                report = recurrence.classify(trace, automorphy=auto)
            return trace, report

        try:
            (trace, report), _ = with_support(
                row.seed, options.time_grid(), compute, options.max_window, options.max_truncation_window
            )
        except PBLError as e:
            diagram.recurrence.append({"lambda": row.lam, "seed": row.seed, "error": e.to_dict()})
            continue
        report.exploratory = exploratory
        diagram.traces[label] = trace
        if report.landscape is not None:
            diagram.landscapes[label] = report.landscape
        entry = report.to_dict()
        entry.update({"lambda": row.lam, "seed": row.seed, "beta_class": kind})
        entry["inherited"] = None if exploratory else _inherited(kind, report)
        diagram.recurrence.append(entry)
        logger.info(f"🧬 Recurrence {label}: class {kind}, inherited={entry['inherited']}")

    judged = [e["inherited"] for e in diagram.recurrence if e.get("inherited") is not None]
    diagram.invariants["recurrence_inheritance"] = {"passed": all(judged), "judged": len(judged)}
    return diagram


def _inherited(kind: str, report: recurrence.RecurrenceReport) -> Optional[bool]:
    """β의 클래스가 분기에 상속됐는지"""
    if kind in ("periodic", "constant"):
        return report.periodic is not None and report.periodic.verdict == "pass"
    if kind == "almost_periodic":
        return report.almost_periodic is not None and report.almost_periodic.verdict == "pass"
    if kind == "almost_automorphic":
        return report.automorphic is not None and report.automorphic.verdict == "pass"
    return None
