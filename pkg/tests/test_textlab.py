"""Tests for the rhythm oscillator, sampling operators, fingerprints and the comment generator."""

import math
import os
import tempfile
import unittest

import numpy as np

from cogmarket.errors import InputError, NumericError
from cogmarket.stats import moments, shapiro_wilk
from cogmarket.textlab import (
    MarketContext,
    OscillationParams,
    RHYTHM_REGIMES,
    PerturbationParams,
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
    oscillation_schedule,
    perturb_distribution,
    segment_sentences,
    semantic_gate,
    sentence_lengths,
    text_metrics,
)

LEXICONS = os.path.join(os.path.dirname(__file__), "data", "lexicons")
PERSONAS = {"novice": 0.7, "veteran": 0.3}


def _generate(i_rhythm, n, seed=0, p=0.0, p_leap=0.0):
    return generate_synthetic_comments(
        MarketContext("crash"),
        PERSONAS,
        RhythmPhysics(i_rhythm, p_leap),
        SlangDictionary(p=p),
        TemplateBank(),
        n,
        seed,
    )


class TestOscillation(unittest.TestCase):
    def test_noise_free_formula(self):
        params = OscillationParams(base_length=16, amplitude=10, omega=1.1)
        expected = [max(1, math.floor(16 + 10 * math.sin(1.1 * n))) for n in range(1, 9)]
        self.assertEqual(oscillation_schedule(params, 8), expected)

    def test_min_length(self):
        params = OscillationParams(base_length=2, amplitude=5, omega=1.5, min_len=2)
        self.assertTrue(all(v >= 2 for v in oscillation_schedule(params, 20)))

    def test_seeded_noise(self):
        params = OscillationParams(base_length=16, amplitude=4, noise=3)
        self.assertEqual(oscillation_schedule(params, 10, seed=4), oscillation_schedule(params, 10, seed=4))

    def test_invalid(self):
        with self.assertRaises(InputError):
            OscillationParams(base_length=0.5)
        with self.assertRaises(InputError):
            oscillation_schedule(OscillationParams(base_length=10), 0)


class TestPerturbation(unittest.TestCase):
    P = [0.5, 0.25, 0.25]

    def test_unit_temperature_is_identity(self):
        np.testing.assert_allclose(perturb_distribution(self.P, PerturbationParams()), self.P)

    def test_temperature_flattens(self):
        q = perturb_distribution(self.P, PerturbationParams(tau=2.0))
        w = np.sqrt(self.P)
        np.testing.assert_allclose(q, w / w.sum())
        self.assertLess(q[0], 0.5)

    def test_mask_zeroes_tokens(self):
        q = perturb_distribution(self.P, PerturbationParams(mask=(1.0, 0.0, 1.0)))
        np.testing.assert_allclose(q, [2 / 3, 0.0, 1 / 3])

    def test_additive(self):
        params = PerturbationParams(beta=0.0, epsilon_sd=0.0)
        np.testing.assert_allclose(perturb_distribution(self.P, params, mode="additive"), self.P)
        noisy = PerturbationParams(beta=0.2, epsilon_sd=0.05)
        a = perturb_distribution(self.P, noisy, seed=9, mode="additive")
        b = perturb_distribution(self.P, noisy, seed=9, mode="additive")
        np.testing.assert_array_equal(a, b)
        self.assertAlmostEqual(float(a.sum()), 1.0)
        self.assertTrue(np.all(a >= 0))

    def test_random_distributions_stay_normalized(self):
        rng = np.random.default_rng(44)
        for i in range(200):
            p = rng.dirichlet([0.5] * 8)
            mask = (rng.random(8) < 0.7).astype(float)
            mask[int(np.argmax(p))] = 1.0
            tempered = perturb_distribution(p, PerturbationParams(tau=float(rng.uniform(0.05, 20.0)), mask=tuple(mask)))
            additive = perturb_distribution(
                p,
                PerturbationParams(beta=float(rng.uniform(0.0, 0.5)), epsilon_sd=0.01),
                seed=i,
                mode="additive",
            )
            for q in (tempered, additive):
                self.assertAlmostEqual(float(q.sum()), 1.0)
                self.assertTrue(np.all(q >= 0))
            self.assertTrue(np.all(tempered[mask == 0] == 0))

    def test_temperature_limits(self):
        for p in ([0.7, 0.2, 0.1], [0.1, 0.6, 0.3]):
            hot = perturb_distribution(p, PerturbationParams(tau=100.0))
            np.testing.assert_allclose(hot, np.full(3, 1 / 3), atol=0.01)
            cold = perturb_distribution(p, PerturbationParams(tau=0.01))
            self.assertAlmostEqual(float(cold[int(np.argmax(p))]), 1.0)

    def test_invalid(self):
        with self.assertRaises(InputError):
            perturb_distribution([0.5, 0.6], PerturbationParams())
        with self.assertRaises(InputError):
            perturb_distribution(self.P, PerturbationParams(), mode="nucleus")
        with self.assertRaises(InputError):
            PerturbationParams(mask=(0.0, 0.0, 0.0))
        with self.assertRaises(InputError):
            PerturbationParams(tau=0.0)
        with self.assertRaises(NumericError):
            perturb_distribution([1.0, 0.0], PerturbationParams(mask=(0.0, 1.0)))

    def test_semantic_gate(self):
        self.assertTrue(semantic_gate([1.0, 0.0], [0.0, 1.0]))
        self.assertFalse(semantic_gate([1.0, 0.0], [1.0, 0.1]))
        self.assertTrue(semantic_gate([1.0, 0.0], [1.0, 0.1], theta_leap=1.0))
        with self.assertRaises(InputError):
            semantic_gate([0.0, 0.0], [1.0, 0.0])


class TestSegmentation(unittest.TestCase):
    def test_mixed_terminators(self):
        sentences = segment_sentences("今天大跌。明天呢？！ok. tail")
        self.assertEqual([s.text for s in sentences], ["今天大跌", "明天呢", "ok", "tail"])
        self.assertEqual([s.length for s in sentences], [4, 3, 2, 4])

    def test_empty(self):
        self.assertEqual(segment_sentences("。。！"), [])


class TestFingerprint(unittest.TestCase):
    def setUp(self):
        self.lexicons = load_lexicons(LEXICONS)

    def test_lexicons(self):
        self.assertIn("大盘", self.lexicons.nouns)
        self.assertEqual(self.lexicons.sentiment["后悔"], -0.8)

    def test_missing_lexicon_names_path(self):
        with tempfile.TemporaryDirectory() as tmpdir:
            with self.assertRaises(InputError) as ctx:
                load_lexicons(tmpdir)
        self.assertIn("adjectives.txt", str(ctx.exception))

    def test_metrics_by_hand(self):
        m = text_metrics("大盘涨了。我很开心！", self.lexicons)
        self.assertEqual(m["avg_sentence_length"], 4.0)
        self.assertEqual(m["sentence_length_sd"], 0.0)
        self.assertAlmostEqual(m["adjective_density"], 1 / 8)
        self.assertEqual(m["noun_verb_ratio"], 1.0)
        self.assertEqual(m["interjection_count"], 0.0)
        self.assertAlmostEqual(m["sentiment_volatility"], 0.05)

    def test_latin_words_match_whole(self):
        m = text_metrics("Wow, the stock is good. Stocks are bad.", self.lexicons)
        self.assertEqual(m["interjection_count"], 1.0)
        self.assertEqual(m["noun_verb_ratio"], 1.0)

    def test_self_divergence_is_zero(self):
        corpus = [c.text for c in _generate(0.85, 40)]
        fp = fingerprint(corpus, self.lexicons)
        self.assertEqual(fp.n_texts, 40)
        for value in compare_corpora(fp, fp).values():
            self.assertAlmostEqual(value, 0.0)

    def test_human_rhythm_closer_to_human_than_robot(self):
        human_a = fingerprint([c.text for c in _generate(0.85, 200, seed=1)], self.lexicons)
        human_b = fingerprint([c.text for c in _generate(0.85, 200, seed=2)], self.lexicons)
        robot = fingerprint([c.text for c in _generate(0.1, 200, seed=3)], self.lexicons)
        near = compare_corpora(human_a, human_b)["sentence_length_sd"]
        far = compare_corpora(human_a, robot)["sentence_length_sd"]
        self.assertLess(near, far)

    def test_empty_corpus(self):
        with self.assertRaises(InputError):
            fingerprint([], self.lexicons)
        with tempfile.TemporaryDirectory() as tmpdir:
            path = os.path.join(tmpdir, "corpus.txt")
            with open(path, "w", encoding="utf-8") as fh:
                fh.write("\n\n")
            with self.assertRaises(InputError):
                load_corpus(path)


class TestGenerator(unittest.TestCase):
    def test_deterministic(self):
        a = [c.text for c in _generate(0.85, 20, seed=5, p=0.3)]
        b = [c.text for c in _generate(0.85, 20, seed=5, p=0.3)]
        c = [c.text for c in _generate(0.85, 20, seed=6, p=0.3)]
        self.assertEqual(a, b)
        self.assertNotEqual(a, c)

    def test_exact_slang_count(self):
        for n, p in ((25, 0.3), (10, 0.25), (7, 1.0), (9, 0.0)):
            comments = _generate(0.85, n, p=p)
            self.assertEqual(sum(c.slang for c in comments), math.floor(p * n + 0.5))

    def test_segmentation_recovers_lengths(self):
        for i_rhythm in (0.1, 0.85, 1.2):
            for c in _generate(i_rhythm, 30, seed=11, p=0.5):
                self.assertEqual([s.length for s in segment_sentences(c.text)], list(c.lengths))

    def test_leaps(self):
        self.assertTrue(all(c.leaps == 0 for c in _generate(0.85, 10)))
        self.assertTrue(all(c.leaps == len(c.lengths) for c in _generate(0.85, 10, p_leap=1.0)))

    def test_rhythm_widens_length_spread(self):
        cv = {}
        for i_rhythm in (0.1, 0.85, 1.2):
            cv[i_rhythm] = moments(sentence_lengths(_generate(i_rhythm, 300, seed=21))).cv
        self.assertLess(cv[0.1], cv[0.85])
        self.assertLess(cv[0.85], cv[1.2])

    def test_named_regimes_order_length_spread(self):
        def mean_cv(name):
            physics = RhythmPhysics.regime(name)
            cvs = []
            for seed in range(50):
                comments = generate_synthetic_comments(
                    MarketContext("crash"), PERSONAS, physics, SlangDictionary(p=0.0), TemplateBank(), 60, seed,
                )
                cvs.append(moments(sentence_lengths(comments)).cv)
            return float(np.mean(cvs))

        robot, human, madman = mean_cv("robot"), mean_cv("human"), mean_cv("madman")
        self.assertLess(robot, human)
        self.assertLess(human, madman)

    def test_regime_lookup(self):
        self.assertEqual(RhythmPhysics.regime("robot").i_rhythm, 0.1)
        self.assertEqual(RhythmPhysics.regime("human"), RhythmPhysics())
        self.assertEqual(RhythmPhysics.regime("madman", p_leap=0.2), RhythmPhysics(1.2, 0.2))
        self.assertEqual(set(RHYTHM_REGIMES), {"robot", "human", "madman"})
        with self.assertRaises(InputError):
            RhythmPhysics.regime("poet")

    def test_human_rhythm_is_skewed_and_non_normal(self):
        lengths = sentence_lengths(_generate(0.85, 300, seed=8))
        self.assertGreater(moments(lengths).skewness, 0.0)
        _, p = shapiro_wilk(lengths)
        self.assertLess(p, 0.05)

    def test_invalid_inputs(self):
        with self.assertRaises(InputError):
            MarketContext("sideways")
        with self.assertRaises(InputError):
            RhythmPhysics(i_rhythm=2.0)
        with self.assertRaises(InputError):
            generate_synthetic_comments(
                MarketContext(), {"novice": 0.5, "veteran": 0.4}, RhythmPhysics(),
                SlangDictionary(), TemplateBank(), 5,
            )
        with self.assertRaises(InputError):
            TemplateBank().get("veteran", "greed")


class TestResourceFiles(unittest.TestCase):
    def test_load_slang(self):
        with tempfile.TemporaryDirectory() as tmpdir:
            path = os.path.join(tmpdir, "slang.csv")
            with open(path, "w", encoding="utf-8") as fh:
                fh.write("category,phrase,tag\nDespair,关灯吃面,sadness\nEuphoria,满仓干,greed\n")
            slang = load_slang(path, p=0.5)
        self.assertEqual(slang.p, 0.5)
        self.assertEqual(slang.entries["Despair"][0].phrase, "关灯吃面")
        comments = generate_synthetic_comments(
            MarketContext("rally"), PERSONAS, RhythmPhysics(), slang, TemplateBank(), 4,
        )
        self.assertEqual(sum(c.slang for c in comments), 2)

    def test_bad_slang_category(self):
        with tempfile.TemporaryDirectory() as tmpdir:
            path = os.path.join(tmpdir, "slang.csv")
            with open(path, "w", encoding="utf-8") as fh:
                fh.write("category,phrase\nHope,明天会更好\n")
            with self.assertRaises(InputError):
                load_slang(path)

    def test_load_templates(self):
        with tempfile.TemporaryDirectory() as tmpdir:
            path = os.path.join(tmpdir, "templates.toml")
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(
                    '[novice]\nfear = ["{event}要完了"]\n'
                    '[veteran]\nfear = ["控制仓位"]\nsadness = ["错过了"]\nanger = ["老套路"]\n'
                )
            bank = load_templates(path)
        self.assertEqual(bank.get("novice", "fear"), ("{event}要完了",))
        comments = generate_synthetic_comments(
            MarketContext("crash"), {"veteran": 1.0}, RhythmPhysics(0.5), SlangDictionary(p=0.0), bank, 3,
        )
        self.assertTrue(all(c.persona.value == "veteran" for c in comments))


if __name__ == "__main__":
    unittest.main()
