"""
PBL (Pullback Bifurcation Lab) - command line entry point

    python -m pbl selftest
    python -m pbl pitchfork-sweep --beta periodic:2,1,6.2831853 --lambda-grid "-1,-0.1,0.1,1" --seed 7
"""
import argparse
import json
import sys
import time
from pathlib import Path
from typing import Any, Dict, List, Optional

from loguru import logger

from pbl import __version__
from pbl.commands import COMMANDS
from pbl.config import settings
from pbl.exceptions import ConfigurationError, PBLError
from pbl.models.schemas import ExperimentConfig, load_config
from pbl.services.coefficients import beta_descriptor, gamma_descriptor
from pbl.services.export import write_json, write_manifest
from pbl.services.path_cache import path_cache

# 값이 음수로 시작할 수 있는 플래그 ("--lambda-grid -1,1" → "--lambda-grid=-1,1")
SIGNED_FLAGS = ("--lambda-grid", "--lambda", "--tau", "--x0")


def setup_logging(level: str) -> None:
    """stderr + 회전 파일 sink"""
    logger.remove()
    logger.add(sys.stderr, level=level)
    logger.add(
        str(Path(settings.LOG_DIR) / "pbl.log"),
        rotation="1 day",
        retention="7 days",
        level=level,
    )


def _floats(text: str) -> List[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _ints(text: str) -> List[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--config", help="ExperimentConfig JSON 파일 (플래그가 덮어씀)")
    shared.add_argument("--beta", help="예: constant:1, periodic:2,1,6.2831853, quasi_periodic:3,1,1")
    shared.add_argument("--gamma", help="예: zero, cubic_profile:0.3, quadratic_profile:0.1,0.3")
    shared.add_argument("--lambda-grid", type=_floats, help="예: -1,-0.1,0.1,1")
    shared.add_argument("--lambda", dest="lam", type=float)
    shared.add_argument("--delta", type=float)
    shared.add_argument("--tau", type=float)
    shared.add_argument("--seed", type=_ints, action="append", help="반복 가능, 쉼표 목록 가능")
    shared.add_argument("--zero-noise", action="store_true", help="ω ≡ 0")
    shared.add_argument("--family", choices=["pitchfork", "transcritical"])
    shared.add_argument("--expr", help="integrate: 사용자 drift a(t, x)")
    shared.add_argument("--x0", type=float)
    shared.add_argument("--t-end", type=float)
    shared.add_argument("--step", type=float, help="적분 step")
    shared.add_argument("--no-stability", action="store_true")
    shared.add_argument("--output-dir")
    shared.add_argument("--workers", type=int)
    shared.add_argument("--path-cache", help=f"경로 캐시 디렉터리 (기본값 PBL_PATH_CACHE={settings.PATH_CACHE})")
    shared.add_argument("--log-level", default=settings.LOG_LEVEL)

    parser = argparse.ArgumentParser(prog="pbl", description=settings.PROJECT_NAME)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[shared])
    return parser


def _join_signed(argv: List[str]) -> List[str]:
    out: List[str] = []
    i = 0
    while i < len(argv):
        if argv[i] in SIGNED_FLAGS and i + 1 < len(argv):
            out.append(f"{argv[i]}={argv[i + 1]}")
            i += 2
            continue
        out.append(argv[i])
        i += 1
    return out


def _read_config(path: Optional[str]) -> Dict[str, Any]:
    if not path:
        return {}
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except OSError as e:
        raise ConfigurationError(f"cannot read config {path}: {e}")
    except json.JSONDecodeError as e:
        raise ConfigurationError(f"config {path} is not valid JSON: {e}")
    if not isinstance(data, dict):
        raise ConfigurationError(f"config {path} must hold a JSON object")
    return data


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    """--config 파일 + 플래그 → ExperimentConfig"""
    data = _read_config(args.config)
    data["scenario"] = args.command

    def section(name: str) -> Dict[str, Any]:
        return data.setdefault(name, {})

    if args.beta:
        section("coefficients")["beta"] = beta_descriptor(args.beta)
    if args.gamma:
        section("coefficients")["gamma"] = gamma_descriptor(args.gamma)
    if args.lambda_grid is not None:
        data["lambda_grid"] = args.lambda_grid
    if args.lam is not None:
        data["lambda"] = args.lam
    if args.delta is not None:
        data["delta"] = args.delta
    if args.tau is not None:
        data["tau"] = args.tau
    if args.seed:
        data["seeds"] = [s for group in args.seed for s in group]
    if args.zero_noise:
        data["zero_noise"] = True
    if args.family:
        section("verify")["family"] = args.family
        section("integrate")["family"] = args.family
    if args.expr:
        section("integrate").update({"family": "custom", "expr": args.expr})
    if args.x0 is not None:
        section("integrate")["x0"] = args.x0
    if args.t_end is not None:
        section("integrate")["t_end"] = args.t_end
    if args.step is not None:
        section("tolerances")["step"] = args.step
    if args.no_stability:
        data["stability"] = False
    if args.output_dir:
        data["output_dir"] = args.output_dir
    if args.workers is not None:
        data["workers"] = args.workers
    return load_config(data)


def run(argv: Optional[List[str]] = None) -> int:
    """실행 후 종료 코드 반환 (0 성공, 1 계산 오류/불변량 실패, 2 설정 오류)"""
    args = build_parser().parse_args(_join_signed(list(sys.argv[1:] if argv is None else argv)))
    setup_logging(args.log_level.upper())
    started = time.perf_counter()
    logger.info(f"🚀 {settings.PROJECT_NAME} {__version__}: {args.command}")

    try:
        if args.path_cache:
            path_cache.use_directory(args.path_cache)
        config = config_from_args(args)
    except PBLError as e:
        logger.error(f"❌ {type(e).__name__}: {e.detail}")
        return e.exit_code

    out = Path(config.output_dir)
    try:
        outcome = COMMANDS[args.command](config)
        exit_code, files = outcome.exit_code, outcome.files
    except PBLError as e:
        logger.error(f"❌ {args.command} aborted - {type(e).__name__}: {e.detail}")
        out.mkdir(parents=True, exist_ok=True)
        exit_code = e.exit_code
        files = [write_json({"command": args.command, "error": e.to_dict()}, out / "error.json")]

    write_manifest(out, args.command, config.echo(), files, config.seed_list(), exit_code, started)
    if exit_code == 0:
        logger.info(f"✅ {args.command} finished: {len(files)} files in {out}")
    else:
        logger.warning(f"⚠️ {args.command} finished with exit code {exit_code}")
    return exit_code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
