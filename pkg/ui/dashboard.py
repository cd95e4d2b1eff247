"""
Rich-based terminal tables for coglab results.

Computation lives in ``cogmarket`` -- this module only does presentation
via the ``rich`` library.
"""
from __future__ import annotations

from typing import Dict, List, Mapping, Optional, Sequence

from rich import box
from rich.console import Console
from rich.panel import Panel
from rich.table import Table

console = Console()


# ---------------------------------------------------------------------------
# Formatting helpers
# ---------------------------------------------------------------------------

_BARS = "▁▂▃▄▅▆▇█"


def sparkline(values: Sequence[float]) -> str:
    """Single-line Unicode sparkline chart."""
    if not values:
        return ""
    lo, hi = min(values), max(values)
    span = hi - lo if hi > lo else 1.0
    return "".join(_BARS[min(int((v - lo) / span * (len(_BARS) - 1)), len(_BARS) - 1)] for v in values)


def fmt(value: Optional[float], digits: int = 4) -> str:
    if value is None:
        return "[dim]n/a[/dim]"
    return f"{value:.{digits}f}"


def pct(value: Optional[float]) -> str:
    if value is None:
        return "[dim]n/a[/dim]"
    color = "green" if value >= 0 else "red"
    return f"[{color}]{value * 100:+.2f}%[/{color}]"


def print_header(title: str, subtitle: str = "") -> None:
    body = f"[bold cyan]{title}[/bold cyan]"
    if subtitle:
        body += f"\n[dim]{subtitle}[/dim]"
    console.print()
    console.print(Panel.fit(body, border_style="cyan"))


def print_written(paths: Sequence[str]) -> None:
    for path in paths:
        console.print(f"[dim]wrote {path}[/dim]")


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def print_day_states(frame) -> None:  # noqa: ANN001 (pandas.DataFrame)
    table = Table(title="Day States", box=box.ROUNDED)
    table.add_column("Date", style="dim")
    table.add_column("MDI", justify="right")
    table.add_column("MCFI", justify="right")
    table.add_column("Meta", justify="right")
    for row in frame.itertuples(index=False):
        table.add_row(row.date, fmt(row.mdi), fmt(row.mcfi), fmt(row.meta, 2))
    console.print(table)


def print_macro_table(rows: List[dict]) -> None:
    table = Table(title="Macro State", box=box.ROUNDED)
    table.add_column("Date", style="dim")
    table.add_column("MDI", justify="right")
    table.add_column("MCFI", justify="right")
    table.add_column("v_MDI", justify="right")
    table.add_column("a_MDI", justify="right")
    table.add_column("Quadrant", style="bold")
    for r in rows:
        table.add_row(r["date"], fmt(r["mdi"]), fmt(r["mcfi"]), fmt(r.get("v_mdi")), fmt(r.get("a_mdi")), r["dominant"])
    console.print(table)
    console.print(f"  [cyan]MDI trend:[/cyan] {sparkline([r['mdi'] for r in rows])}")


def print_trajectory(rows: List[dict], vol_dims: Sequence[str]) -> None:
    table = Table(title="Counterfactual Trajectory", box=box.ROUNDED)
    table.add_column("Date", style="dim")
    table.add_column("Event")
    table.add_column("Novice fear", justify="right")
    table.add_column("MDI", justify="right")
    for dim in vol_dims:
        table.add_column(f"h_{dim}", justify="right")
    table.add_column("Quadrant", style="bold")
    for r in rows:
        flag = " [red](fragile)[/red]" if r.get("fragile") else ""
        table.add_row(
            r["date"],
            (r.get("event") or "-") + flag,
            fmt(r["novice_fear"]),
            fmt(r["mdi"]),
            *(fmt(r[f"h_{d}"]) for d in vol_dims),
            r["dominant"],
        )
    console.print(table)


def print_backtest(reports: Mapping[str, dict]) -> None:
    table = Table(title="Backtest", box=box.ROUNDED)
    table.add_column("Mode", style="bold")
    table.add_column("Net return", justify="right")
    table.add_column("Max drawdown", justify="right")
    table.add_column("Sharpe", justify="right")
    table.add_column("Trades", justify="right")
    table.add_column("Latency", justify="right")
    table.add_column("Entropy", justify="right")
    for mode, rep in reports.items():
        m = rep["metrics"]
        q = rep["signal_quality"]
        table.add_row(
            mode,
            pct(m["net_return"]),
            f"[red]{m['max_drawdown'] * 100:.2f}%[/red]",
            fmt(m["sharpe"], 3),
            str(m["trade_count"]),
            fmt(q["mean_latency_days"], 1),
            fmt(q["entropy"], 3),
        )
    console.print(table)

    for mode, rep in reports.items():
        vs = rep.get("versus_baseline")
        if vs:
            console.print(
                f"  [bold]{mode}[/bold] vs baseline: defensive alpha {pct(vs['defensive_alpha'])}, "
                f"safety buffer [bold]{vs['safety_buffer']:.1f}x[/bold] cost "
                f"[dim](Welch p = {fmt(vs['welch_p_one_tailed'], 4)})[/dim]"
            )


def print_ic_table(rows: List[dict], ordering: bool) -> None:
    table = Table(title="Information Coefficient", box=box.ROUNDED)
    table.add_column("Model", style="bold")
    table.add_column("r", justify="right")
    table.add_column("p", justify="right")
    table.add_column("N", justify="right", style="dim")
    for r in rows:
        table.add_row(r["model"], f"{r['r']:+.3f}", f"{r['p']:.3g}", str(r["n"]))
    console.print(table)
    verdict = "[green]holds[/green]" if ordering else "[red]does not hold[/red]"
    console.print(f"  Ordering {' > '.join('r(' + r['model'] + ')' for r in rows)}: {verdict}")


def print_fingerprint(jsd: Mapping[str, float]) -> None:
    table = Table(title="Fingerprint divergence (JSD)", box=box.ROUNDED)
    table.add_column("Metric", style="bold")
    table.add_column("JSD", justify="right")
    for metric, value in jsd.items():
        table.add_row(metric, fmt(value))
    console.print(table)


def print_moments(groups: Mapping[str, dict], title: str = "Distribution") -> None:
    table = Table(title=title, box=box.ROUNDED)
    table.add_column("Group", style="bold")
    table.add_column("N", justify="right", style="dim")
    table.add_column("Mean", justify="right")
    table.add_column("SD", justify="right")
    table.add_column("CV", justify="right")
    table.add_column("Skew", justify="right")
    table.add_column("Shapiro p", justify="right")
    for name, g in groups.items():
        normal = g.get("normal")
        p = fmt(g.get("shapiro_p"), 4)
        if normal is False:
            p = f"[red]{p}[/red]"
        table.add_row(name, str(g["n"]), fmt(g["mean"], 2), fmt(g["sd"], 2), fmt(g["cv"], 3), fmt(g["skewness"], 3), p)
    console.print(table)


def print_calibration(kind: str, result: Dict[str, object]) -> None:
    table = Table(title=f"Calibration: {kind}", box=box.ROUNDED)
    table.add_column("Term", style="bold")
    table.add_column("Estimate", justify="right")
    table.add_column("p", justify="right")
    if kind == "decay":
        table.add_row("alpha", fmt(result["alpha"]), "")
        table.add_row("beta0", fmt(result["beta0"]), "")
        table.add_row("beta2", fmt(result["beta2"]), "")
        table.add_row("half-life (days)", fmt(result.get("half_life_days"), 2), "")
        table.add_row("R²", fmt(result["r_squared"]), "")
    elif kind == "satellite":
        for name, c in result["coefficients"].items():
            table.add_row(name, fmt(c["estimate"]), f"{c['p_value']:.3g}")
        table.add_row("R²", fmt(result["r_squared"]), "")
    else:
        for key in ("avg_holiday", "avg_normal", "ratio", "t", "multiplier"):
            table.add_row(key, fmt(result[key]), f"{result['p']:.3g}" if key == "t" else "")
    console.print(table)


def print_validation(report: Mapping[str, object]) -> None:
    if "lengths" in report:
        print_moments(report["lengths"], title="Length distributions")
    consistency = report.get("consistency")
    if consistency:
        console.print(
            f"  ICC(C,1) [bold]{consistency['icc']:.3f}[/bold]  "
            f"Pearson r [bold]{consistency['pearson_r']:.3f}[/bold] "
            f"[dim](p = {consistency['pearson_p']:.3g}, n = {consistency['n']})[/dim]"
        )
    manifest = report.get("manifest")
    if manifest:
        verdict = "[green]match[/green]" if manifest["match"] else "[red]MISMATCH[/red]"
        console.print(f"  Manifest digest: {verdict}")
