"""Tests for the GJR-GARCH engine, the parameter arsenal and the forward simulation."""

import math
import unittest
from datetime import date, timedelta

import numpy as np

from cogmarket.affect import satellite_step, signed_decay
from cogmarket.cogvec import CognitiveVector, DimensionRegistry, Persona, PersonaDayState
from cogmarket.config import DEFAULTS, deep_merge
from cogmarket.errors import ConfigError, InputError, NumericError
from cogmarket.garch import (
    FeedbackConfig,
    GarchParams,
    ParamArsenal,
    freeze_predicate,
    gjr_step,
    innovations,
    pir_drift,
    pir_frame,
    pir_initial,
    pir_simulate,
    run_volatility,
    select_params,
)
from cogmarket.ingest import build_model_config
from cogmarket.macrostate import Quadrant

REG = DimensionRegistry.default()
P = GarchParams(omega=0.1, alpha=0.05, alpha_neg=0.1, beta=0.6)


class TestGJRStep(unittest.TestCase):
    def test_hand_values(self):
        self.assertAlmostEqual(gjr_step(0.05, -0.2, P), 0.136)
        self.assertAlmostEqual(gjr_step(0.05, 0.2, P), 0.132)
        self.assertAlmostEqual(gjr_step(0.05, 0.0, P), 0.13)

    def test_positive_and_asymmetric(self):
        rng = np.random.default_rng(42)
        for _ in range(10000):
            params = GarchParams(
                omega=rng.uniform(1e-4, 0.3),
                alpha=rng.uniform(0, 0.3),
                alpha_neg=rng.uniform(1e-4, 0.3),
                beta=rng.uniform(0, 0.99),
            )
            h = rng.uniform(0, 2)
            eps = rng.uniform(1e-3, 1)
            up = gjr_step(h, eps, params)
            down = gjr_step(h, -eps, params)
            self.assertGreater(up, 0)
            self.assertGreater(down, up)

    def test_long_run_variance(self):
        self.assertAlmostEqual(P.persistence, 0.7)
        self.assertAlmostEqual(P.long_run_variance, 1 / 3)
        rng = np.random.default_rng(0)
        z = rng.standard_normal(200000)
        h = P.long_run_variance
        total = 0.0
        for zt in z:
            eps = math.sqrt(h) * zt
            h = gjr_step(h, eps, P)
            total += h
        mean_h = total / len(z)
        self.assertLess(abs(mean_h - 1 / 3) / (1 / 3), 0.05)

    def test_non_stationary(self):
        params = GarchParams(0.1, 0.2, 0.2, 0.8)
        self.assertFalse(params.is_stationary)
        with self.assertRaises(NumericError):
            params.long_run_variance

    def test_invalid_params(self):
        with self.assertRaises(ConfigError):
            GarchParams(0.0, 0.1, 0.1, 0.5)
        with self.assertRaises(ConfigError):
            GarchParams(0.1, -0.1, 0.1, 0.5)
        with self.assertRaises(InputError):
            gjr_step(-0.1, 0.2, P)


class TestArsenal(unittest.TestCase):
    def setUp(self):
        self.arsenal = ParamArsenal.from_dict(DEFAULTS["arsenal"])

    def test_midpoint_selection(self):
        sel = self.arsenal.selection(Quadrant.B)
        self.assertAlmostEqual(sel.omega, 0.125)
        self.assertAlmostEqual(sel.alpha, 0.075)
        self.assertAlmostEqual(sel.alpha_neg, 0.115)
        self.assertAlmostEqual(sel.beta, 0.85)

    def test_static_is_mean_of_selections(self):
        static = select_params(Quadrant.A, self.arsenal, "static")
        for name in ("omega", "alpha", "alpha_neg", "beta"):
            values = [getattr(self.arsenal.selection(q), name) for q in Quadrant]
            self.assertAlmostEqual(getattr(static, name), sum(values) / 6)
        self.assertEqual(select_params(Quadrant.C, self.arsenal, "static"), static)

    def test_dynamic_uses_quadrant(self):
        self.assertEqual(select_params("C", self.arsenal), self.arsenal.selection(Quadrant.C))
        with self.assertRaises(ConfigError):
            select_params(Quadrant.C, self.arsenal, "adaptive")

    def test_override(self):
        section = deep_merge(DEFAULTS["arsenal"], {"B": {"alpha_neg": 0.18}})
        arsenal = ParamArsenal.from_dict(section)
        self.assertEqual(arsenal.selection(Quadrant.B).alpha_neg, 0.18)
        with self.assertRaises(ConfigError):
            ParamArsenal.from_dict(section, strict_ranges=True)
        inside = deep_merge(DEFAULTS["arsenal"], {"B": {"alpha_neg": 0.1}})
        self.assertEqual(ParamArsenal.from_dict(inside, strict_ranges=True).selection(Quadrant.B).alpha_neg, 0.1)

    def test_strict_stationarity_rejects_dead_freeze(self):
        self.assertGreaterEqual(self.arsenal.selection(Quadrant.C).persistence, 1.0)
        with self.assertRaises(ConfigError):
            ParamArsenal.from_dict(DEFAULTS["arsenal"], strict_stationarity=True)

    def test_missing_quadrant(self):
        section = dict(DEFAULTS["arsenal"])
        del section["E"]
        with self.assertRaises(ConfigError):
            ParamArsenal.from_dict(section)


class TestVolatilityPath(unittest.TestCase):
    def setUp(self):
        self.arsenal = ParamArsenal.from_dict(DEFAULTS["arsenal"])

    def test_innovations(self):
        np.testing.assert_allclose(innovations([1.0, 3.0, 2.0]), [0.0, 2.0, -1.0])
        np.testing.assert_allclose(innovations([1.0, 3.0, 2.0], "residual"), [0.0, 2.0, 0.0])
        with self.assertRaises(ConfigError):
            innovations([1.0, 2.0], "level")

    def test_dynamic_path_and_drift_log(self):
        dates = [date(2015, 6, 8) + timedelta(days=i) for i in range(3)]
        path = [Quadrant.A, Quadrant.B, Quadrant.B]
        h, log = run_volatility([0.1, 0.3, 0.2], path, self.arsenal, h0=0.05, dates=dates)
        b = self.arsenal.selection(Quadrant.B)
        self.assertEqual(h[0], 0.05)
        self.assertAlmostEqual(h[1], gjr_step(0.05, 0.2, b))
        self.assertAlmostEqual(h[2], gjr_step(h[1], -0.1, b))
        self.assertEqual(len(log), 3)
        self.assertEqual(log.column("quadrant"), [q.value for q in path])
        frame = log.to_frame()
        self.assertEqual(list(frame["date"]), [d.isoformat() for d in dates])

    def test_static_mode(self):
        h, log = run_volatility([0.1, 0.3, 0.2], [Quadrant.A, Quadrant.B, Quadrant.C], self.arsenal, "static")
        self.assertEqual(set(log.column("quadrant")), {"static"})
        self.assertEqual(len(set(log.column("alpha_neg"))), 1)
        self.assertTrue(np.all(h > 0))

    def test_feedback_amplifies_alpha_neg(self):
        n = 7
        a_mdi = [None, None, 0.0, 0.01, -0.01, 0.0, 5.0]
        h, log = run_volatility(
            [0.5] * (n - 1) + [0.1], [Quadrant.B] * n, self.arsenal,
            a_mdi=a_mdi, feedback=FeedbackConfig(),
        )
        corrected = log.column("corrected")
        self.assertEqual(corrected, [False] * 6 + [True])
        self.assertAlmostEqual(log.records[-1].alpha_neg, 0.115 * 1.5)
        plain, _ = run_volatility([0.5] * (n - 1) + [0.1], [Quadrant.B] * n, self.arsenal)
        self.assertGreater(h[-1], plain[-1])

    def test_input_errors(self):
        with self.assertRaises(InputError):
            run_volatility([0.1], [Quadrant.A], self.arsenal)
        with self.assertRaises(InputError):
            run_volatility([0.1, 0.2], [Quadrant.A], self.arsenal)
        with self.assertRaises(InputError):
            run_volatility([0.1, 0.2], [Quadrant.A, Quadrant.A], self.arsenal, h0=-1.0)


class TestFreeze(unittest.TestCase):
    def test_needs_both_conditions(self):
        self.assertTrue(freeze_predicate(0.9, 0.2))
        self.assertFalse(freeze_predicate(0.9, 0.4))
        self.assertFalse(freeze_predicate(0.5, 0.1))
        self.assertFalse(freeze_predicate(0.8, 0.1))


class TestForwardSimulation(unittest.TestCase):
    def setUp(self):
        self.cfg = build_model_config(DEFAULTS)
        day = PersonaDayState(
            date(2015, 6, 12),
            CognitiveVector.from_scores(REG, {"fear": 0.2, "trust": 0.5, "joy": 0.3}),
            CognitiveVector.from_scores(REG, {"fear": 0.1}),
        )
        self.initial = pir_initial(day, self.cfg)

    def test_length_and_dates(self):
        traj = pir_simulate(self.initial, [], 5, self.cfg)
        self.assertEqual(len(traj), 6)
        self.assertEqual(traj[-1].date, date(2015, 6, 17))
        self.assertTrue(all(h >= 0 for s in traj for h in s.vol.values()))

    def test_shock_then_decay(self):
        traj = pir_simulate(self.initial, ["fear"], 3, self.cfg)
        self.assertEqual(traj[1].event, "fear")
        self.assertAlmostEqual(traj[1].novice.get("fear"), 0.95)
        self.assertAlmostEqual(traj[1].novice.get("trust"), -0.55)
        self.assertAlmostEqual(traj[2].novice.get("fear"), 0.95 * 2 ** -0.32)
        self.assertIsNone(traj[2].event)

    def test_deterministic(self):
        a = pir_frame(pir_simulate(self.initial, ["none", "confusion"], 4, self.cfg, seed=3))
        b = pir_frame(pir_simulate(self.initial, ["none", "confusion"], 4, self.cfg, seed=3))
        self.assertTrue(a.equals(b))

    def test_noise_is_seeded(self):
        cfg = build_model_config(deep_merge(DEFAULTS, {"simulation": {"noise_sd": 0.05}}))
        initial = pir_initial(self.initial_day(), cfg)
        a = pir_frame(pir_simulate(initial, [], 3, cfg, seed=1))
        b = pir_frame(pir_simulate(initial, [], 3, cfg, seed=1))
        c = pir_frame(pir_simulate(initial, [], 3, cfg, seed=2))
        self.assertTrue(a.equals(b))
        self.assertFalse(a.equals(c))

    def initial_day(self):
        return PersonaDayState(self.initial.date, self.initial.novice, self.initial.veteran)

    def test_drift_covers_every_dimension(self):
        traj = pir_simulate(self.initial, [], 2, self.cfg)
        self.assertEqual(len(pir_drift(traj)), 2 * len(REG))

    def test_schedule_errors(self):
        with self.assertRaises(InputError):
            pir_simulate(self.initial, ["meteor"], 2, self.cfg)
        with self.assertRaises(InputError):
            pir_simulate(self.initial, ["fear", "fear", "fear"], 2, self.cfg)
        with self.assertRaises(InputError):
            pir_simulate(self.initial, [], -1, self.cfg)


ZERO_COEFFS = {
    "fomo": [0.0] * 5,
    "greed": [0.0] * 5,
    "uncertainty": [0.0] * 3,
    "regret": [0.0] * 3,
    "regimes": {"A": {"fomo": {"c1": 0.0}}, "F": {"fomo": {"c1": 0.0}}},
}


class TestForwardByHand(unittest.TestCase):
    """Day-by-day forward states checked against the module operations applied by hand."""

    NOVICE = {"fear": 0.6, "fomo": 0.8, "greed": 0.7, "regret": 0.5, "uncertainty": 0.9,
              "sadness": 0.9, "joy": 0.3, "trust": -0.75}
    VETERAN = {"fear": 0.2, "greed": -0.85, "anticipation": 0.95, "regret": 0.95}

    def _initial(self, cfg):
        day = PersonaDayState(
            date(2015, 6, 12),
            CognitiveVector.from_scores(REG, self.NOVICE),
            CognitiveVector.from_scores(REG, self.VETERAN),
        )
        return pir_initial(day, cfg)

    def test_zero_satellite_is_pure_decay(self):
        cfg = build_model_config(deep_merge(DEFAULTS, {"satellite": ZERO_COEFFS}))
        initial = self._initial(cfg)
        traj = pir_simulate(initial, [], 6, cfg)
        for t in range(1, 7):
            for persona in Persona:
                start = initial.persona(persona)
                got = traj[t].persona(persona)
                for d in REG.labels:
                    expected = signed_decay(start.get(d), t + 1, d, cfg.decay)
                    self.assertAlmostEqual(got.get(d), expected, msg=f"day {t} {persona.value} {d}")

    def test_day_one_composes_decay_satellite_and_garch(self):
        cfg = build_model_config(DEFAULTS)
        initial = self._initial(cfg)
        traj = pir_simulate(initial, [], 2, cfg)
        self.assertEqual(len(traj), 3)

        coeffs = cfg.satellite.coeffs_for(initial.quadrant)
        expected = {}
        for persona in Persona:
            start = initial.persona(persona)
            cur = {d: signed_decay(start.get(d), 2, d, cfg.decay) for d in REG.labels}
            out = satellite_step(
                joy=cur["joy"],
                v_joy=cur["joy"] - start.get("joy"),
                mcfi=initial.macro.mcfi,
                regret_lag=start.get("regret"),
                v_mdi=0.0,
                coeffs=coeffs,
            )
            cur["fomo"] = out.fomo
            cur["greed"] = out.greed
            cur["regret"] = out.regret
            cur["uncertainty"] = min(max(cur["uncertainty"] + out.d_uncertainty, -1.0), 1.0)
            expected[persona] = cur
            for d in REG.labels:
                self.assertAlmostEqual(traj[1].persona(persona).get(d), cur[d], msg=f"{persona.value} {d}")

        params = select_params(initial.quadrant, cfg.arsenal)
        for d, h in traj[1].vol.items():
            eps = (
                (expected[Persona.NOVICE][d] + expected[Persona.VETERAN][d]) / 2.0
                - (initial.novice.get(d) + initial.veteran.get(d)) / 2.0
            )
            self.assertAlmostEqual(h, gjr_step(initial.vol[d], eps, params), msg=d)

    def test_dynamics_use_configured_lag(self):
        cfg = build_model_config(deep_merge(DEFAULTS, {"macro": {"lag": 2}}))
        traj = pir_simulate(self._initial(cfg), ["fear"], 5, cfg)
        mdi = [s.macro.mdi for s in traj]
        self.assertIsNone(traj[1].dynamics.v_mdi)
        self.assertAlmostEqual(traj[2].dynamics.v_mdi, (mdi[2] - mdi[0]) / 2)
        self.assertAlmostEqual(traj[5].dynamics.v_mdi, (mdi[5] - mdi[3]) / 2)
        self.assertIsNone(traj[3].dynamics.a_mdi)
        self.assertAlmostEqual(
            traj[4].dynamics.a_mdi, (traj[4].dynamics.v_mdi - traj[2].dynamics.v_mdi) / 2,
        )

        lag_one = build_model_config(DEFAULTS)
        traj = pir_simulate(self._initial(lag_one), ["fear"], 2, lag_one)
        self.assertAlmostEqual(traj[1].dynamics.v_mdi, traj[1].macro.mdi - traj[0].macro.mdi)
        self.assertIsNone(traj[1].dynamics.a_mdi)
        self.assertAlmostEqual(
            traj[2].dynamics.a_mdi, traj[2].dynamics.v_mdi - traj[1].dynamics.v_mdi,
        )



if __name__ == "__main__":
    unittest.main()
