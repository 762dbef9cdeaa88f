"""
CLI 模块 - synth / pipeline / theory / report 四个命令
"""

from .main import build_parser, main, resolve_config
from .pipeline import cmd_pipeline, cmd_synth, cmd_theory, synthesize
from .reports import cmd_report

__all__ = [
    "build_parser",
    "cmd_pipeline",
    "cmd_report",
    "cmd_synth",
    "cmd_theory",
    "main",
    "resolve_config",
    "synthesize",
]
