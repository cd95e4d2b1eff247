#!/usr/bin/env python3
"""
coglab -- cognitive market simulation, calibration and backtesting.

Usage::

    coglab ingest reports/                          # -> day_states.csv
    coglab macro day_states.csv                     # -> macro.csv
    coglab simulate day_states.csv --horizon 5 --shocks fear,none,confusion
    coglab backtest prices.csv day_states.csv --mode dynamic
    coglab backtest --scenario crash-drill --sweep dynamic,baseline,static-garch
    coglab abtest --fixture 2015
    coglab fingerprint human.txt generated.txt --lexicons lexicons/
    coglab perturb --i-rhythm 0.85 --p-leap 0.1 -n 200
    coglab calibrate decay samples.csv
    coglab validate --lengths lengths.csv --manifest out/manifest.json

Global flags go before the subcommand: ``coglab --config model.toml
--out runs/1 --seed 7 backtest ...``.  Every command writes its files and a
``manifest.json`` into ``--out``.
"""
from __future__ import annotations

import argparse
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Dict, List, Optional, Sequence

import pandas as pd
from rich.console import Console
from rich.logging import RichHandler

from cogmarket import __version__
from cogmarket import strategy as strategy_mod
from cogmarket.affect import fit_decay, fit_satellite, half_life, holiday_test
from cogmarket.backtest import information_coefficients, ordering_holds
from cogmarket.errors import CoglabError, InputError
from cogmarket.fixtures import FIXTURES, abtest_fixture
from cogmarket.garch import freeze_predicate, pir_drift, pir_frame, pir_initial, pir_simulate
from cogmarket.ingest import (
    ModelConfig,
    day_states_frame,
    load_day_states,
    load_events,
    load_groups,
    load_model_config,
    load_numeric_columns,
    load_price_series,
    load_reports,
    load_series,
)
from cogmarket.macrostate import macro_table
from cogmarket.manifest import MANIFEST_NAME, build_manifest, verify_manifest
from cogmarket.pipeline import compare, run_backtest, run_report
from cogmarket.scenarios import SCENARIOS
from cogmarket.stats import describe_groups, icc, pearson
from cogmarket.textlab import (
    MarketContext,
    PerturbationParams,
    RHYTHM_REGIMES,
    RhythmPhysics,
    SlangDictionary,
    TemplateBank,
    compare_corpora,
    fingerprint,
    generate_synthetic_comments,
    load_corpus,
    load_lexicons,
    load_slang,
    load_templates,
    perturb_distribution,
    sentence_lengths,
)
from ui.dashboard import (
    console,
    print_backtest,
    print_calibration,
    print_day_states,
    print_fingerprint,
    print_header,
    print_ic_table,
    print_macro_table,
    print_moments,
    print_trajectory,
    print_validation,
    print_written,
)
from ui.output import save_json, write_csv, write_lines

logger = logging.getLogger("coglab")


# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------

class Run:
    """Output directory of one command."""

    def __init__(self, args: argparse.Namespace, cfg: Optional[ModelConfig]) -> None:
        self.args = args
        self.cfg = cfg
        self.out = args.out
        os.makedirs(self.out, exist_ok=True)

    def path(self, name: str) -> str:
        return os.path.join(self.out, name)

    def json(self, name: str, data: object) -> None:
        save_json(data, self.path(name))

    def csv(self, name: str, frame: pd.DataFrame) -> None:
        write_csv(frame, self.path(name))

    def lines(self, name: str, lines: Sequence[str]) -> None:
        write_lines(lines, self.path(name))

    def finish(self, command: str, inputs: Sequence[str]) -> None:
        manifest = build_manifest(
            self.out, command, self.cfg.source if self.cfg else None, inputs, self.args.seed,
        )
        self.json(MANIFEST_NAME, manifest.to_dict())
        if not self.args.quiet:
            print_written([self.path(name) for name in manifest.outputs + [MANIFEST_NAME]])


def _split(raw: Optional[str]) -> List[str]:
    return [s.strip() for s in raw.split(",")] if raw else []


def _floats(raw: str, name: str) -> List[float]:
    try:
        return [float(v) for v in _split(raw)]
    except ValueError:
        raise InputError(f"--{name} expects comma-separated numbers, got {raw!r}") from None


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_ingest(args: argparse.Namespace, cfg: ModelConfig) -> None:
    reports = load_reports(args.reports, cfg.registry, clamp=cfg.clamp_on_ingest or args.clamp)
    frame = day_states_frame([r.persona_day for r in reports], cfg.mcfi_alpha)
    run = Run(args, cfg)
    run.csv("day_states.csv", frame)
    if not args.quiet:
        print_day_states(frame)
    run.finish("ingest", [args.reports])


def cmd_macro(args: argparse.Namespace, cfg: ModelConfig) -> None:
    days = load_day_states(args.day_states, cfg.registry, clamp=cfg.clamp_on_ingest)
    rows = [r.to_row() for r in macro_table(days, cfg.prototypes, cfg.mcfi_alpha, cfg.lag)]
    run = Run(args, cfg)
    run.csv("macro.csv", pd.DataFrame(rows))
    if not args.quiet:
        print_macro_table(rows)
    run.finish("macro", [args.day_states])


def cmd_simulate(args: argparse.Namespace, cfg: ModelConfig) -> None:
    days = load_day_states(args.day_states, cfg.registry, clamp=cfg.clamp_on_ingest)
    start = days[-1]
    if args.start:
        matches = [d for d in days if d.date.isoformat() == args.start]
        if not matches:
            raise InputError(f"no day state dated {args.start}")
        start = matches[0]

    trajectory = pir_simulate(
        pir_initial(start, cfg), _split(args.shocks), args.horizon, cfg, args.seed, cfg.strategy.volatility_mode,
    )
    frame = pir_frame(trajectory)
    if args.liquidity is not None:
        frame["freeze"] = [freeze_predicate(s.macro.mdi, args.liquidity) for s in trajectory]

    run = Run(args, cfg)
    run.csv("trajectory.csv", frame)
    run.csv("drift.csv", pir_drift(trajectory).to_frame())
    if not args.quiet:
        shown = [d for d in ("fear", "joy") if d in trajectory[0].vol] or list(trajectory[0].vol)[:2]
        print_trajectory(frame.to_dict("records"), shown)
    run.finish("simulate", [args.day_states])


def _backtest_one(prices, days, cfg: ModelConfig, mode: str, events, out_dir: str) -> Dict[str, object]:
    strategy = run_backtest(prices, days, cfg, mode)
    comparison = None
    if mode != "baseline":
        comparison = compare(strategy, run_backtest(prices, days, cfg, "baseline"), cfg)
    report = run_report(strategy, cfg, events, comparison)

    os.makedirs(out_dir, exist_ok=True)
    save_json(report, os.path.join(out_dir, "report.json"))
    write_csv(strategy.result.to_frame(), os.path.join(out_dir, "equity.csv"))
    write_csv(strategy.signals_frame(), os.path.join(out_dir, "signals.csv"))
    if strategy.mode != "baseline":
        write_csv(strategy.drift.to_frame(), os.path.join(out_dir, "drift.csv"))
    return report


def cmd_backtest(args: argparse.Namespace, cfg: ModelConfig) -> None:
    inputs: List[str] = []
    if args.scenario:
        scenario = SCENARIOS[args.scenario](registry=cfg.registry)
        prices, days, events = scenario.prices, list(scenario.days), list(scenario.events)
        inputs.append(f"scenario:{args.scenario}")
    else:
        if not (args.prices and args.day_states):
            raise InputError("backtest needs PRICES and DAY_STATES, or --scenario")
        prices = load_price_series(args.prices, args.price_format)
        days = load_day_states(args.day_states, cfg.registry, clamp=cfg.clamp_on_ingest)
        events = []
        inputs += [args.prices, args.day_states]
    if args.events:
        events = load_events(args.events)
        inputs.append(args.events)

    run = Run(args, cfg)
    if args.sweep:
        modes = _split(args.sweep)
        for m in modes:
            if m not in strategy_mod.MODES:
                raise InputError(f"unknown mode {m!r} in --sweep; choose from {strategy_mod.MODES}")
        with ThreadPoolExecutor(max_workers=min(len(modes), 4)) as pool:
            futures = [
                pool.submit(_backtest_one, prices, days, cfg, m, events, run.path(m))
                for m in modes
            ]
            reports = {m: f.result() for m, f in zip(modes, futures)}
        run.json("summary.json", {m: r["metrics"] for m, r in reports.items()})
    else:
        mode = cfg.strategy.mode
        reports = {mode: _backtest_one(prices, days, cfg, mode, events, run.out)}

    if not args.quiet:
        print_backtest(reports)
    run.finish("backtest", inputs)


def cmd_abtest(args: argparse.Namespace, cfg: ModelConfig) -> None:
    if args.models:
        if not args.index:
            raise InputError("--models needs --index")
        names = [chr(ord("A") + i) for i in range(len(args.models))]
        models = {n: load_series(p, args.column) for n, p in zip(names, args.models)}
        index = load_series(args.index, args.index_column)
        inputs = [*args.models, args.index]
    else:
        data = abtest_fixture(args.fixture)
        models, index = data.models, data.index
        inputs = [f"fixture:{args.fixture}"]

    rows = information_coefficients(models, index)
    ordering = ordering_holds(rows)
    run = Run(args, cfg)
    run.csv("ic.csv", pd.DataFrame([r.to_dict() for r in rows]))
    run.json("abtest.json", {"rows": [r.to_dict() for r in rows], "ordering_holds": ordering})
    if not args.quiet:
        print_ic_table([r.to_dict() for r in rows], ordering)
    run.finish("abtest", inputs)


def cmd_fingerprint(args: argparse.Namespace, cfg: ModelConfig) -> None:
    lexicons = load_lexicons(args.lexicons)
    fa = fingerprint(load_corpus(args.corpus_a), lexicons)
    fb = fingerprint(load_corpus(args.corpus_b), lexicons)
    jsd = compare_corpora(fa, fb, args.bins or cfg.textlab.bins)

    run = Run(args, cfg)
    run.csv("fingerprint.csv", pd.DataFrame({"metric": list(jsd), "jsd": list(jsd.values())}))
    run.csv("metrics_a.csv", fa.to_frame())
    run.csv("metrics_b.csv", fb.to_frame())
    if not args.quiet:
        print_fingerprint(jsd)
    run.finish("fingerprint", [args.corpus_a, args.corpus_b, args.lexicons])


def cmd_perturb(args: argparse.Namespace, cfg: ModelConfig) -> None:
    run = Run(args, cfg)
    inputs: List[str] = []

    if args.probs:
        params = PerturbationParams(
            tau=args.tau,
            mask=tuple(_floats(args.mask, "mask")) if args.mask else None,
            beta=args.beta,
            theta_leap=cfg.textlab.leap_threshold,
            epsilon_sd=args.epsilon_sd,
        )
        p = _floats(args.probs, "probs")
        q = perturb_distribution(p, params, args.seed, mode=args.operator)
        run.csv("distribution.csv", pd.DataFrame({"token": range(len(p)), "p": p, "q": q}))

    slang_p = cfg.textlab.slang_p if args.slang_p is None else args.slang_p
    if args.slang:
        slang = load_slang(args.slang, slang_p)
        inputs.append(args.slang)
    else:
        slang = SlangDictionary(p=slang_p)
    if args.templates:
        templates = load_templates(args.templates)
        inputs.append(args.templates)
    else:
        templates = TemplateBank()

    if args.regime:
        physics = RhythmPhysics.regime(args.regime, args.p_leap)
    elif args.i_rhythm is not None:
        physics = RhythmPhysics(args.i_rhythm, args.p_leap)
    else:
        physics = RhythmPhysics(p_leap=args.p_leap)

    comments = generate_synthetic_comments(
        MarketContext(args.condition, args.event),
        {"novice": args.novice_share, "veteran": 1.0 - args.novice_share},
        physics,
        slang,
        templates,
        args.n,
        args.seed,
        cfg.textlab,
    )
    run.lines("corpus.txt", [c.text for c in comments])
    run.csv("comments.csv", pd.DataFrame([c.to_row() for c in comments]))
    run.csv("schedule.csv", pd.DataFrame(
        [{"comment": i, "sentence": j, "length": n} for i, c in enumerate(comments) for j, n in enumerate(c.lengths)],
        columns=["comment", "sentence", "length"],
    ))
    lengths = sentence_lengths(comments)
    if lengths.size and not args.quiet:
        print_moments(describe_groups({f"I_rhythm={physics.i_rhythm:g}": lengths}), title="Sentence lengths")
    run.finish("perturb", inputs)


_CALIBRATION_COLUMNS = {
    "decay": ("e_t", "t", "e_next"),
    "satellite": ("y", "x", "v_x", "mcfi"),
}


def cmd_calibrate(args: argparse.Namespace, cfg: ModelConfig) -> None:
    if args.kind == "holiday":
        groups = {g.lower(): v for g, v in load_groups(args.samples, "value").items()}
        for needed in ("holiday", "normal"):
            if needed not in groups:
                raise InputError(f"{args.samples}: no rows in group {needed!r}")
        result = holiday_test(
            groups["holiday"],
            groups["normal"],
            cfg.holiday.significance,
        ).to_dict()
    else:
        table = load_numeric_columns(args.samples, _CALIBRATION_COLUMNS[args.kind])
        rows = table.to_numpy().tolist()
        if args.kind == "decay":
            fit = fit_decay(rows)
            result = fit.to_dict()
            result["half_life_days"] = half_life(fit.alpha, fit.beta0, fit.beta2) if fit.alpha > 0 else None
        else:
            result = fit_satellite(rows).to_dict()

    run = Run(args, cfg)
    run.json("calibration.json", {"kind": args.kind, **result})
    if not args.quiet:
        print_calibration(args.kind, result)
    run.finish(f"calibrate {args.kind}", [args.samples])


def cmd_validate(args: argparse.Namespace, cfg: ModelConfig) -> None:
    if not (args.lengths or args.pairs or args.manifest):
        raise InputError("validate needs --lengths, --pairs or --manifest")
    report: Dict[str, object] = {}
    inputs: List[str] = []

    if args.lengths:
        report["lengths"] = describe_groups(load_groups(args.lengths, "length"))
        inputs.append(args.lengths)
    if args.pairs:
        table = load_numeric_columns(args.pairs, ("rater1", "rater2"))
        pairs = table.to_numpy()
        r, p = pearson(pairs[:, 0], pairs[:, 1])
        report["consistency"] = {"icc": icc(pairs.tolist()), "pearson_r": r, "pearson_p": p, "n": len(pairs)}
        inputs.append(args.pairs)
    if args.manifest:
        report["manifest"] = verify_manifest(args.manifest)
        inputs.append(args.manifest)

    run = Run(args, cfg)
    run.json("validation.json", report)
    if not args.quiet:
        print_validation(report)
    run.finish("validate", inputs)


# ---------------------------------------------------------------------------
# CLI
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="coglab",
        description="coglab -- cognitive market simulation, calibration and backtesting",
    )
    parser.add_argument("--version", action="version", version=f"coglab {__version__}")
    parser.add_argument("--config", metavar="FILE", help="Model config (.toml or .json); falls back to $COGLAB_CONFIG")
    parser.add_argument("--seed", type=int, default=0, help="Seed for every random draw (default: 0)")
    parser.add_argument("--mode", choices=strategy_mod.MODES, default=None, help="Strategy mode (default: from config)")
    parser.add_argument("--out", default="out", metavar="DIR", help="Output directory (default: out)")
    parser.add_argument("--strict-ranges", action="store_true", default=None, help="Reject overrides outside documented ranges")
    parser.add_argument("--annualize", action="store_true", default=None, help="Annualize the Sharpe ratio (x sqrt(252))")
    parser.add_argument("--quiet", "-q", action="store_true", help="No tables on stdout")
    parser.add_argument("--verbose", "-v", action="store_true", help="Debug logging on stderr")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("ingest", help="Normalize cognitive state reports into a day-state table")
    p.add_argument("reports", help="Report file, .jsonl stream or directory")
    p.add_argument("--clamp", action="store_true", help="Clamp out-of-range scores instead of failing")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("macro", help="MDI, MCFI, dynamics and quadrant per day")
    p.add_argument("day_states")
    p.set_defaults(func=cmd_macro)

    p = sub.add_parser("simulate", help="Counterfactual forward simulation from a known day")
    p.add_argument("day_states")
    p.add_argument("--horizon", type=int, default=5, metavar="N", help="Days to simulate (default: 5)")
    p.add_argument("--shocks", default="", metavar="LIST", help="Per-day event classes, e.g. fear,none,confusion")
    p.add_argument("--start", metavar="DATE", help="Start from this day state (default: the last)")
    p.add_argument("--liquidity", type=float, default=None, help="Liquidity level for the freeze predicate")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("backtest", help="Friction-aware strategy backtest")
    p.add_argument("prices", nargs="?", help="date,close table")
    p.add_argument("day_states", nargs="?")
    p.add_argument("--price-format", choices=("csv", "tsv"), default="csv")
    p.add_argument("--scenario", choices=sorted(SCENARIOS), help="Use a bundled synthetic scenario")
    p.add_argument("--events", metavar="CSV", help="date,kind table for signal latency")
    p.add_argument("--sweep", metavar="MODES", help="Comma-separated modes run in parallel into OUT/<mode>/")
    p.set_defaults(func=cmd_backtest)

    p = sub.add_parser("abtest", help="Information coefficient of sentiment sequences against an index")
    p.add_argument("--fixture", choices=sorted(FIXTURES), default="2015")
    p.add_argument("--models", nargs="+", metavar="CSV", help="Sentiment sequences, listed A, B, C...")
    p.add_argument("--index", metavar="CSV", help="Index percentage change sequence")
    p.add_argument("--column", default=None, help="Column of the model tables (default: last)")
    p.add_argument("--index-column", default=None, help="Column of the index table (default: last)")
    p.set_defaults(func=cmd_abtest)

    p = sub.add_parser("fingerprint", help="Per-metric JSD between two corpora")
    p.add_argument("corpus_a")
    p.add_argument("corpus_b")
    p.add_argument("--lexicons", required=True, metavar="DIR")
    p.add_argument("--bins", type=int, default=None)
    p.set_defaults(func=cmd_fingerprint)

    p = sub.add_parser("perturb", help="Generate synthetic comments under a rhythm regime")
    rhythm = p.add_mutually_exclusive_group()
    rhythm.add_argument("--i-rhythm", type=float, default=None, help="Rhythm intensity in [0, 1.5] (default: 0.85)")
    rhythm.add_argument("--regime", choices=sorted(RHYTHM_REGIMES), help="Named rhythm intensity preset")
    p.add_argument("--p-leap", type=float, default=0.0)
    p.add_argument("-n", type=int, default=100, help="Number of comments (default: 100)")
    p.add_argument("--condition", choices=("crash", "rally", "flat"), default="crash")
    p.add_argument("--event", default="大盘", help="Text for the {event} template slot")
    p.add_argument("--novice-share", type=float, default=0.5)
    p.add_argument("--slang", metavar="CSV", help="category,phrase,tag dictionary")
    p.add_argument("--slang-p", type=float, default=None)
    p.add_argument("--templates", metavar="TOML")
    p.add_argument("--probs", metavar="LIST", help="Token distribution to perturb, e.g. 0.5,0.3,0.2")
    p.add_argument("--operator", choices=("tempered", "additive"), default="tempered")
    p.add_argument("--tau", type=float, default=1.0)
    p.add_argument("--beta", type=float, default=0.0)
    p.add_argument("--mask", metavar="LIST")
    p.add_argument("--epsilon-sd", type=float, default=0.01)
    p.set_defaults(func=cmd_perturb)

    p = sub.add_parser("calibrate", help="Fit decay, satellite or holiday parameters")
    p.add_argument("kind", choices=("decay", "satellite", "holiday"))
    p.add_argument("samples", help="decay: e_t,t,e_next  satellite: y,x,v_x,mcfi  holiday: group,value")
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("validate", help="Distribution, consistency and manifest checks")
    p.add_argument("--lengths", metavar="CSV", help="group,length table")
    p.add_argument("--pairs", metavar="CSV", help="rater1,rater2 table")
    p.add_argument("--manifest", metavar="PATH")
    p.set_defaults(func=cmd_validate)
    return parser


def _setup_logging(verbose: bool) -> None:
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format="%(name)s: %(message)s",
        handlers=[RichHandler(console=Console(stderr=True), show_time=False, show_path=False)],
        force=True,
    )


def main(argv: Optional[Sequence[str]] = None) -> None:
    args = build_parser().parse_args(argv)
    _setup_logging(args.verbose)

    func: Callable[[argparse.Namespace, ModelConfig], None] = args.func
    try:
        cfg = load_model_config(args.config, args.strict_ranges, mode=args.mode, annualize=args.annualize)
        logger.debug("config from %s", cfg.source or "built-in defaults")
        if not args.quiet:
            print_header(f"coglab {args.command}", f"seed {args.seed} -> {args.out}")
        func(args, cfg)
    except CoglabError as exc:
        console.print(f"[red]Error: {exc}[/red]")
        sys.exit(exc.exit_code)
    except OSError as exc:
        console.print(f"[red]Error: {exc}[/red]")
        sys.exit(InputError.exit_code)
    except KeyboardInterrupt:
        console.print("\n[yellow]Cancelled by user[/yellow]")
        sys.exit(1)


if __name__ == "__main__":
    main()
