"""
终端报告

用 rich 表格展示 scorecard、传感器排名、模式对比和理论判定。
这里只负责展示，数据全部来自 summary.json / modes.json / verdict.json，
所以 report 命令可以从已有输出包重新渲染。
"""

import logging
from typing import Any, Dict, Optional

import pandas as pd
from rich.console import Console
from rich.table import Table

from src.core.bundle import BundleManager
from src.core.models import ModelScorecard, ModeReport

logger = logging.getLogger(__name__)

console = Console()

SCORE_COLUMNS = ("accuracy", "macro_precision", "macro_recall", "macro_f1", "micro_f1")


def mode_table(report: ModeReport) -> pd.DataFrame:
    """模式对比表：每个模式一行，含 F1、降幅和能耗节省"""
    rows = []
    for e in report.entries:
        rows.append({
            "mode": e.mode.name,
            "sensors": len(e.mode.active_sensors),
            "active_sensors": " ".join(e.mode.active_sensors),
            "readout_model": e.mode.readout_model_kind.value,
            "macro_f1": e.mean.macro_f1,
            "macro_f1_std": e.std.get("macro_f1", 0.0),
            "accuracy": e.mean.accuracy,
            "f1_reduction_vs_blue": e.f1_reduction_vs_blue,
            "energy_savings": e.energy_savings,
        })
    return pd.DataFrame(rows)


def scorecard_table(cards: Dict[str, Any], admitted: Optional[list] = None) -> Table:
    table = Table(title="模型评估（多轮平均）")
    table.add_column("model")
    for name in SCORE_COLUMNS:
        table.add_column(name, justify="right")
    table.add_column("committee", justify="center")
    admitted = set(admitted or [])
    for kind, card in cards.items():
        card = card if isinstance(card, ModelScorecard) else ModelScorecard.model_validate(card)
        mark = "✓" if kind in admitted else ""
        table.add_row(kind, *(f"{getattr(card, name):.4f}" for name in SCORE_COLUMNS), mark)
    return table


def ranking_table(summary: Dict[str, Any]) -> Table:
    table = Table(title="传感器加权得分")
    table.add_column("#", justify="right")
    table.add_column("sensor")
    table.add_column("score", justify="right")
    selected = set(summary.get("selected", []))
    scores = summary.get("weighted_scores", {})
    for i, sid in enumerate(summary.get("ranking", []), start=1):
        if scores.get(sid, 0.0) <= 0.0:
            break
        name = f"[bold]{sid}[/bold]" if sid in selected else sid
        table.add_row(str(i), name, f"{scores[sid]:.4f}")
    return table


def modes_table(modes: list) -> Table:
    table = Table(title="工作模式")
    table.add_column("mode")
    table.add_column("sensors", justify="right")
    table.add_column("macro F1", justify="right")
    table.add_column("F1 reduction", justify="right")
    table.add_column("energy savings", justify="right")
    for row in modes:
        table.add_row(
            row["name"], str(row["sensors"]), f"{row['macro_f1']:.4f}",
            f"{row['f1_reduction_vs_blue']:+.4f}", f"{row['energy_savings']:.1%}",
        )
    return table


def theory_table(verdict: Dict[str, Any]) -> Table:
    table = Table(title=f"理论验证（{verdict.get('estimator')}, {verdict.get('trials')} trials）")
    table.add_column("mu_frac", justify="right")
    table.add_column("target", justify="right")
    table.add_column("n analytic", justify="right")
    table.add_column("n MC", justify="right")
    table.add_column("", justify="center")
    for curve in verdict.get("curves", []):
        for c in curve.get("crossings", []):
            table.add_row(
                f"{curve['mu_frac']:g}", f"{c['target']:g}",
                str(c["n_analytic"]), str(c["n_mc"]), "✓" if c["passed"] else "✗",
            )
    return table


def render_pipeline(summary: Dict[str, Any]) -> None:
    console.print(scorecard_table(summary["scorecards"], summary.get("admitted")))
    console.print(ranking_table(summary))
    console.print(modes_table(summary["modes"]))
    if "planted" in summary:
        hit = set(summary["planted"]) == set(summary["selected"])
        console.print(f"植入的信息传感器: {summary['planted']} {'✓' if hit else '✗'}")


def render_theory(verdict: Dict[str, Any]) -> None:
    console.print(theory_table(verdict))
    console.print("✓ 全部交点一致" if verdict.get("passed") else "✗ 存在不一致的交点")


def cmd_report(out: str) -> int:
    """
    从已有输出包重新渲染报告，并用 modes.json 重写 modes/mode_table.csv

    Raises:
        FileNotFoundError: 输出包里没有 summary.json
    """
    bundle = BundleManager(out)
    if not bundle.exists("summary.json"):
        raise FileNotFoundError(f"no summary.json under {bundle.root}")
    render_pipeline(bundle.read_json("summary.json"))
    if bundle.exists("modes/modes.json"):
        report = ModeReport.model_validate(bundle.read_json("modes/modes.json"))
        bundle.write_csv("modes/mode_table.csv", mode_table(report))
    if bundle.exists("theory/verdict.json"):
        render_theory(bundle.read_json("theory/verdict.json"))
    logger.info(f"已从 {bundle.root} 重新生成报告")
    return 0
