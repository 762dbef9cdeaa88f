"""
命令行入口

Usage:
    python -m src.cli synth    --out runs/demo --seed 7
    python -m src.cli pipeline --out runs/demo --threshold 0.7 --mode-sizes 5,3,1
    python -m src.cli theory   --out runs/demo --mu-fracs 0.4,0.62,1 --trials 500
    python -m src.cli report   --out runs/demo

配置优先级：命令行参数 > --config 文件 > 环境变量 (.env) > 默认值

退出码：
- 0 成功
- 1 某个阶段失败（错误信息带阶段名）
- 2 用法错误（参数解析、配置校验、配置文件无法读取）
"""

import argparse
import json
import logging
from typing import Callable, Dict, List, Optional

from pydantic import ValidationError
from rich.logging import RichHandler

from src.core.config import RunConfig, get_config, load_run_config
from src.core.errors import CRSError, StageError
from src.core.models import Estimator
from .pipeline import cmd_pipeline, cmd_synth, cmd_theory
from .reports import cmd_report

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_STAGE = 1
EXIT_USAGE = 2


# ==================== 参数类型 ====================

def density_arg(text: str) -> float:
    """(0, 1] 内的浮点数；argparse 会在错误信息前加上参数名"""
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"density must be a number, got {text!r}")
    if not 0.0 < value <= 1.0:
        raise argparse.ArgumentTypeError(f"density must lie in (0, 1], got {value}")
    return value


def int_list_arg(text: str) -> List[int]:
    """逗号分隔的正整数，例如 5,3,1"""
    try:
        values = [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    if not values or any(v < 1 for v in values):
        raise argparse.ArgumentTypeError(f"expected positive integers, got {text!r}")
    return values


def float_list_arg(text: str) -> List[float]:
    try:
        values = [float(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")
    if not values:
        raise argparse.ArgumentTypeError("expected at least one number")
    return values


# ==================== 解析器 ====================

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON 配置文件（可以是某次运行输出的 config.json）")
    common.add_argument("--out", help="输出目录")
    common.add_argument("--seed", type=int, help="master seed")
    common.add_argument("--workers", type=int, help="worker 数")
    common.add_argument("--log-level", choices=["DEBUG", "INFO", "WARNING", "ERROR"], type=str.upper)

    data = argparse.ArgumentParser(add_help=False)
    data.add_argument("--data", help="传感器阵列 CSV；不给则合成数据")
    data.add_argument("--density", type=density_arg, help="合成灵敏度矩阵的非零密度 (0, 1]")

    theory = argparse.ArgumentParser(add_help=False)
    theory.add_argument("--trials", type=int, help="每个 n 的蒙特卡洛试验次数")
    theory.add_argument("--estimator", choices=[e.value for e in Estimator])
    theory.add_argument("--mu-fracs", type=float_list_arg, help="逗号分隔的 mu_frac 列表")

    parser = argparse.ArgumentParser(prog="python -m src.cli", description="传感器阵列优化流水线")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("synth", parents=[common, data], help="合成数据集")
    pipeline = sub.add_parser("pipeline", parents=[common, data, theory], help="完整流水线")
    pipeline.add_argument("--threshold", type=float, help="委员会准入阈值")
    pipeline.add_argument("--repeats", type=int, help="委员会划分轮数")
    pipeline.add_argument("--mode-sizes", type=int_list_arg, help="绿色模式大小，例如 5,3,1")
    sub.add_parser("theory", parents=[common, theory], help="解析曲线与 MC 曲线")
    sub.add_parser("report", parents=[common], help="从已有输出包重新渲染报告")
    return parser


def setup_logging(level: Optional[str] = None) -> None:
    level = (level or get_config().log_level).upper()
    logging.basicConfig(
        level=level,
        format="%(name)s: %(message)s",
        datefmt="%H:%M:%S",
        handlers=[RichHandler(rich_tracebacks=False, show_path=False)],
        force=True,
    )


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """
    配置文件 + 命令行覆盖

    Raises:
        ValidationError: 覆盖后的配置非法
        OSError / json.JSONDecodeError: 配置文件无法读取
    """
    cfg = load_run_config(args.config)
    return cfg.with_overrides(**{
        "data": getattr(args, "data", None),
        "synth.density": getattr(args, "density", None),
        "out": args.out,
        "seed": args.seed,
        "workers": args.workers,
        "committee.admission_threshold": getattr(args, "threshold", None),
        "committee.repeats": getattr(args, "repeats", None),
        "modes.sizes": getattr(args, "mode_sizes", None),
        "theory.trials": getattr(args, "trials", None),
        "theory.estimator": getattr(args, "estimator", None),
        "theory.mu_fracs": getattr(args, "mu_fracs", None),
    })


COMMANDS: Dict[str, Callable[[RunConfig], int]] = {
    "synth": cmd_synth,
    "pipeline": cmd_pipeline,
    "theory": cmd_theory,
    "report": lambda cfg: cmd_report(cfg.out),
}


def main(argv: Optional[List[str]] = None) -> int:
    """
    Returns:
        退出码（参数解析失败时 argparse 直接以 2 退出）
    """
    args = build_parser().parse_args(argv)
    setup_logging(args.log_level)

    try:
        cfg = resolve_config(args)
    except ValidationError as e:
        logger.error(f"配置非法: {e}")
        return EXIT_USAGE
    except (OSError, json.JSONDecodeError) as e:
        logger.error(f"无法读取配置文件: {e}")
        return EXIT_USAGE

    try:
        return COMMANDS[args.command](cfg)
    except StageError as e:
        logger.error(f"✗ 阶段 '{e.stage}' 失败: {e.cause}")
        return EXIT_STAGE
    except CRSError as e:
        logger.error(f"✗ {e}")
        return EXIT_STAGE
    except FileNotFoundError as e:
        logger.error(f"✗ {e}")
        return EXIT_USAGE
