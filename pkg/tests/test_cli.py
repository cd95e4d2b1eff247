"""End-to-end tests for the coglab command line."""

import json
import math
import os
import tempfile
import unittest
from unittest import mock

import numpy as np
import pandas as pd

import coglab
from cogmarket.errors import InputError
from ui.output import save_json

HERE = os.path.dirname(__file__)
REPORTS = os.path.join(HERE, "data", "reports")
LEXICONS = os.path.join(HERE, "data", "lexicons")


def _run(out, *argv, extra=()):
    coglab.main([*extra, "--out", out, "-q", *argv])


def _read_json(path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def _write(path, text):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)
    return path


class CLITestCase(unittest.TestCase):
    def setUp(self):
        self._tmp = tempfile.TemporaryDirectory()
        self.tmp = self._tmp.name

    def tearDown(self):
        self._tmp.cleanup()

    def out(self, name):
        return os.path.join(self.tmp, name)

    def assertExits(self, code, *argv, extra=()):
        with mock.patch("coglab.console"):
            with self.assertRaises(SystemExit) as ctx:
                _run(self.out("err"), *argv, extra=extra)
        self.assertEqual(ctx.exception.code, code)


class TestIngestMacroSimulate(CLITestCase):
    """ingest -> macro -> simulate on the bundled reports."""

    def setUp(self):
        super().setUp()
        _run(self.out("ingest"), "ingest", REPORTS)
        self.day_states = os.path.join(self.out("ingest"), "day_states.csv")

    def test_ingest(self):
        frame = pd.read_csv(self.day_states)
        self.assertEqual(list(frame["date"]), ["2025-05-12", "2025-05-13"])
        manifest = _read_json(os.path.join(self.out("ingest"), "manifest.json"))
        self.assertEqual(manifest["command"], "ingest")
        self.assertEqual(manifest["outputs"], ["day_states.csv"])
        self.assertEqual(manifest["seed"], 0)

    def test_macro(self):
        _run(self.out("macro"), "macro", self.day_states)
        frame = pd.read_csv(os.path.join(self.out("macro"), "macro.csv"))
        self.assertEqual(len(frame), 2)
        for letter in "ABCDEF":
            self.assertIn(f"p_{letter}", frame.columns)
        self.assertIn("dominant", frame.columns)

    def test_simulate_with_freeze(self):
        _run(self.out("sim"), "simulate", self.day_states, "--horizon", "3", "--shocks", "fear", "--liquidity", "0.1")
        frame = pd.read_csv(os.path.join(self.out("sim"), "trajectory.csv"))
        self.assertEqual(len(frame), 4)
        self.assertIn("freeze", frame.columns)
        self.assertTrue(os.path.exists(os.path.join(self.out("sim"), "drift.csv")))

    def test_simulate_unknown_start(self):
        self.assertExits(2, "simulate", self.day_states, "--start", "1999-01-01")


class TestBacktestCommand(CLITestCase):
    """Backtest runs, sweeps and reproducibility."""

    def test_crash_drill_is_reproducible(self):
        _run(self.out("a"), "backtest", "--scenario", "crash-drill")
        _run(self.out("b"), "backtest", "--scenario", "crash-drill")
        names = sorted(os.listdir(self.out("a")))
        self.assertEqual(names, sorted(os.listdir(self.out("b"))))
        self.assertIn("report.json", names)
        self.assertIn("equity.csv", names)
        self.assertIn("signals.csv", names)
        for name in names:
            with open(os.path.join(self.out("a"), name), "rb") as fa, open(os.path.join(self.out("b"), name), "rb") as fb:
                self.assertEqual(fa.read(), fb.read(), name)
        manifest = _read_json(os.path.join(self.out("a"), "manifest.json"))
        self.assertEqual(manifest["inputs"], ["scenario:crash-drill"])

    def test_sweep(self):
        _run(self.out("sweep"), "backtest", "--scenario", "crash-drill", "--sweep", "dynamic,baseline")
        summary = _read_json(os.path.join(self.out("sweep"), "summary.json"))
        self.assertEqual(set(summary), {"dynamic", "baseline"})
        self.assertTrue(os.path.exists(os.path.join(self.out("sweep"), "dynamic", "drift.csv")))
        self.assertFalse(os.path.exists(os.path.join(self.out("sweep"), "baseline", "drift.csv")))
        report = _read_json(os.path.join(self.out("sweep"), "dynamic", "report.json"))
        self.assertEqual(report["metrics"], summary["dynamic"])
        self.assertIn("versus_baseline", report)
        manifest = _read_json(os.path.join(self.out("sweep"), "manifest.json"))
        self.assertIn("dynamic/report.json", manifest["outputs"])

    def test_bad_sweep_mode(self):
        self.assertExits(2, "backtest", "--scenario", "crash-drill", "--sweep", "dynamic,oracle")

    def test_needs_inputs(self):
        self.assertExits(2, "backtest")

    def test_config_from_environment(self):
        path = _write(os.path.join(self.tmp, "env.toml"), "[backtest]\ncost_rate = 0.002\n")
        with mock.patch.dict(os.environ, {"COGLAB_CONFIG": path}):
            _run(self.out("env"), "backtest", "--scenario", "crash-drill")
        report = _read_json(os.path.join(self.out("env"), "report.json"))
        self.assertEqual(report["cost_rate"], 0.002)
        manifest = _read_json(os.path.join(self.out("env"), "manifest.json"))
        self.assertEqual(manifest["config_path"], path)

    def test_missing_config(self):
        self.assertExits(3, "backtest", "--scenario", "crash-drill", extra=("--config", self.out("missing.toml")))


class TestAnalysisCommands(CLITestCase):
    """abtest, fingerprint, perturb and calibrate."""

    def test_abtest_fixture(self):
        _run(self.out("ab"), "abtest", "--fixture", "2015")
        frame = pd.read_csv(os.path.join(self.out("ab"), "ic.csv"))
        self.assertEqual(len(frame), 3)
        result = _read_json(os.path.join(self.out("ab"), "abtest.json"))
        self.assertEqual(len(result["rows"]), 3)
        self.assertIsInstance(result["ordering_holds"], bool)

    def test_abtest_constant_index(self):
        a = _write(os.path.join(self.tmp, "a.csv"), "score\n0.1\n0.4\n0.2\n0.5\n")
        index = _write(os.path.join(self.tmp, "index.csv"), "pct\n1.0\n1.0\n1.0\n1.0\n")
        self.assertExits(4, "abtest", "--models", a, "--index", index)

    def test_perturb(self):
        _run(self.out("gen"), "perturb", "-n", "20", "--slang-p", "0.25", "--probs", "0.5,0.3,0.2", "--tau", "2")
        with open(os.path.join(self.out("gen"), "corpus.txt"), encoding="utf-8") as fh:
            lines = fh.read().splitlines()
        self.assertEqual(len(lines), 20)
        comments = pd.read_csv(os.path.join(self.out("gen"), "comments.csv"))
        self.assertEqual(len(comments), 20)
        schedule = pd.read_csv(os.path.join(self.out("gen"), "schedule.csv"))
        self.assertEqual(list(schedule.columns), ["comment", "sentence", "length"])
        self.assertTrue((schedule["length"] >= 1).all())
        dist = pd.read_csv(os.path.join(self.out("gen"), "distribution.csv"))
        self.assertAlmostEqual(float(dist["q"].sum()), 1.0)

    def test_perturb_bad_probs(self):
        self.assertExits(2, "perturb", "-n", "5", "--probs", "0.5,x")

    def test_regime_matches_rhythm_value(self):
        _run(self.out("robot"), "perturb", "-n", "15", "--regime", "robot")
        _run(self.out("value"), "perturb", "-n", "15", "--i-rhythm", "0.1")
        with open(os.path.join(self.out("robot"), "corpus.txt"), encoding="utf-8") as fa:
            with open(os.path.join(self.out("value"), "corpus.txt"), encoding="utf-8") as fb:
                self.assertEqual(fa.read(), fb.read())

    def test_regime_and_rhythm_are_exclusive(self):
        with mock.patch("sys.stderr"):
            self.assertExits(2, "perturb", "-n", "5", "--regime", "madman", "--i-rhythm", "0.5")

    def test_fingerprint(self):
        _run(self.out("gen"), "perturb", "-n", "30", "--i-rhythm", "0.85")
        _run(self.out("gen2"), "perturb", "-n", "30", "--i-rhythm", "0.1", extra=("--seed", "4"))
        _run(
            self.out("fp"), "fingerprint",
            os.path.join(self.out("gen"), "corpus.txt"),
            os.path.join(self.out("gen2"), "corpus.txt"),
            "--lexicons", LEXICONS,
        )
        frame = pd.read_csv(os.path.join(self.out("fp"), "fingerprint.csv"))
        self.assertEqual(list(frame.columns), ["metric", "jsd"])
        self.assertTrue(((frame["jsd"] >= 0) & (frame["jsd"] <= 1)).all())
        self.assertEqual(len(pd.read_csv(os.path.join(self.out("fp"), "metrics_a.csv"))), 30)

    def test_calibrate_decay(self):
        rng = np.random.default_rng(3)
        rows = ["e_t,t,e_next"]
        for _ in range(30):
            e_t = rng.uniform(0.3, 1.0)
            t = int(rng.integers(1, 15))
            rows.append(f"{e_t!r},{t},{math.exp(0.05) * t ** -0.3 * e_t ** 0.95!r}")
        samples = _write(os.path.join(self.tmp, "decay.csv"), "\n".join(rows) + "\n")
        _run(self.out("cal"), "calibrate", "decay", samples)
        result = _read_json(os.path.join(self.out("cal"), "calibration.json"))
        self.assertEqual(result["kind"], "decay")
        self.assertAlmostEqual(result["alpha"], 0.3, places=6)
        self.assertIsNotNone(result["half_life_days"])

    def test_calibrate_missing_column(self):
        samples = _write(os.path.join(self.tmp, "bad.csv"), "e_t,t\n0.5,2\n")
        self.assertExits(2, "calibrate", "decay", samples)


class TestValidateCommand(CLITestCase):
    """Distribution, consistency and manifest checks."""

    def test_manifest_match_and_tamper(self):
        _run(self.out("bt"), "backtest", "--scenario", "crash-drill")
        manifest = os.path.join(self.out("bt"), "manifest.json")
        _run(self.out("v1"), "validate", "--manifest", manifest)
        self.assertTrue(_read_json(os.path.join(self.out("v1"), "validation.json"))["manifest"]["match"])

        with open(os.path.join(self.out("bt"), "equity.csv"), "a", encoding="utf-8") as fh:
            fh.write("tampered\n")
        _run(self.out("v2"), "validate", "--manifest", manifest)
        self.assertFalse(_read_json(os.path.join(self.out("v2"), "validation.json"))["manifest"]["match"])

    def test_lengths_and_pairs(self):
        lengths = _write(
            os.path.join(self.tmp, "lengths.csv"),
            "group,length\n" + "".join(f"human,{n}\n" for n in (3, 5, 8, 13, 4, 21, 6, 9)),
        )
        pairs = _write(os.path.join(self.tmp, "pairs.csv"), "rater1,rater2\n1,1.1\n2,2.2\n3,2.9\n4,4.1\n5,5.0\n")
        _run(self.out("val"), "validate", "--lengths", lengths, "--pairs", pairs)
        report = _read_json(os.path.join(self.out("val"), "validation.json"))
        self.assertIn("human", report["lengths"])
        self.assertEqual(report["consistency"]["n"], 5)
        self.assertGreater(report["consistency"]["icc"], 0.9)
        self.assertGreater(report["consistency"]["pearson_r"], 0.9)

    def test_constant_rater(self):
        pairs = _write(os.path.join(self.tmp, "flat.csv"), "rater1,rater2\n1,3\n2,3\n3,3\n4,3\n")
        self.assertExits(4, "validate", "--pairs", pairs)

    def test_nothing_to_validate(self):
        self.assertExits(2, "validate")

    def test_empty_reports_directory(self):
        empty = self.out("empty")
        os.makedirs(empty)
        self.assertExits(2, "ingest", empty)

    def test_unwritable_output_directory(self):
        blocker = _write(os.path.join(self.tmp, "blocker"), "not a directory\n")
        with mock.patch("coglab.console"):
            with self.assertRaises(SystemExit) as ctx:
                _run(blocker, "backtest", "--scenario", "crash-drill")
        self.assertEqual(ctx.exception.code, 2)

    def test_save_json_reports_write_failure(self):
        blocker = _write(os.path.join(self.tmp, "blocker"), "not a directory\n")
        with self.assertRaises(InputError):
            save_json({"ok": True}, os.path.join(blocker, "report.json"))
        self.assertEqual(os.listdir(self.tmp), ["blocker"])


if __name__ == "__main__":
    unittest.main()
