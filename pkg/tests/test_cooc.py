"""Co-occurrence counting, leakage, and per-object count bias."""

import pytest

import oracles

from biasaudit import (
    CaptionRecord,
    InputError,
    caption_mentions,
    cooc_counts,
    leakage,
    per_image_mean_to_m,
    per_object_bias,
)


def rec(i, text, image_id="img1", source="model"):
    return CaptionRecord(f"c{i}", image_id, text, source)


class TestCaptionMentions:
    def test_whole_word_only(self):
        assert caption_mentions("a man on a motorcycle", "motorcycle")
        assert not caption_mentions("two motorcycles parked", "motorcycle")
        assert not caption_mentions("a commotion outside", "motion")

    def test_multi_word_label(self):
        assert caption_mentions("hitting a tennis ball hard", "tennis ball")
        assert not caption_mentions("playing tennis with a ball", "tennis ball")

    def test_case_insensitive(self):
        assert caption_mentions("A DOG RUNS", "dog")


class TestCoocCounts:
    def test_small_example(self, lexicon):
        records = [
            rec(0, "a man with a dog"),
            rec(1, "a woman with a dog"),
            rec(2, "a man and a woman with a dog"),
            rec(3, "a person with a cat"),
            rec(4, "two men in a kitchen"),
        ]
        counts = cooc_counts(records, lexicon)
        assert (counts.man, counts.woman, counts.neutral, counts.mixed) == (2, 1, 1, 1)
        assert counts.to_m() == pytest.approx(2 / 3, abs=1e-15)

    def test_object_filter(self, lexicon):
        records = [
            rec(0, "a man with a dog"),
            rec(1, "a woman with a cat"),
            rec(2, "a woman walking a dog"),
        ]
        counts = cooc_counts(records, lexicon, object_filter="dog")
        assert (counts.man, counts.woman) == (1, 1)

    def test_fixture_corpus_matches_serial_recomputation(
        self, captions, lexicon, lexicon_dict
    ):
        rows = [{"text": r.text} for r in captions]
        expected = oracles.o_cooc_counts(rows, lexicon_dict)
        got = cooc_counts(captions, lexicon)
        assert {
            "man": got.man,
            "woman": got.woman,
            "neutral": got.neutral,
            "mixed": got.mixed,
        } == expected

    def test_per_source_split_is_exact(self, captions, lexicon, lexicon_dict):
        for source in ("model", "human"):
            subset = [r for r in captions if r.source == source]
            rows = [{"text": r.text} for r in subset]
            expected = oracles.o_cooc_counts(rows, lexicon_dict)
            got = cooc_counts(subset, lexicon)
            assert got.man == expected["man"] and got.woman == expected["woman"]

    def test_empty_ratio_is_none(self, lexicon):
        counts = cooc_counts([rec(0, "a dog on grass")], lexicon)
        assert counts.to_m() is None
        assert counts.to_dict()["to_m"] is None


class TestLeakage:
    def test_model_genders_less_than_humans(self):
        assert leakage(792, 930) == pytest.approx(0.8516129032258064, abs=1e-15)

    def test_model_genders_more_than_humans(self):
        assert leakage(408, 291) == pytest.approx(1.402061855670103, abs=1e-15)

    def test_zero_human_count_is_undefined(self):
        assert leakage(10, 0) is None

    def test_negative_rejected(self):
        with pytest.raises(InputError):
            leakage(-1, 5)


class TestPerObjectBias:
    def test_count_weighting(self, lexicon):
        records = [
            rec(0, "a man on a surfboard"),
            rec(1, "a man carrying a surfboard"),
            rec(2, "a woman with a surfboard"),
            rec(3, "a man in a kitchen"),
        ]
        to_m, to_w = per_object_bias(records, lexicon, "surfboard")
        assert to_m == pytest.approx(2 / 3, abs=1e-15)
        assert to_w == pytest.approx(1 / 3, abs=1e-15)

    def test_score_weighting(self, lexicon):
        records = [
            rec(0, "a man on a surfboard"),
            rec(1, "a woman with a surfboard"),
        ]
        scores = {"c0": 0.3, "c1": 0.1}
        to_m, to_w = per_object_bias(
            records, lexicon, "surfboard", method="gender_score", scores=scores
        )
        assert to_m == pytest.approx(0.75, abs=1e-15)

    def test_missing_score_skipped_with_warning(self, lexicon, caplog):
        records = [
            rec(0, "a man on a surfboard"),
            rec(1, "a woman with a surfboard"),
        ]
        to_m, _ = per_object_bias(
            records, lexicon, "surfboard", method="gender_score", scores={"c0": 0.3}
        )
        assert to_m == 1.0
        assert any("c1" in r.message for r in caplog.records)

    def test_no_mentions_is_undefined(self, lexicon):
        records = [rec(0, "a man in a kitchen")]
        assert per_object_bias(records, lexicon, "surfboard") == (None, None)

    def test_unknown_method_rejected(self, lexicon):
        with pytest.raises(InputError):
            per_object_bias([], lexicon, "surfboard", method="votes")

    def test_score_method_requires_scores(self, lexicon):
        with pytest.raises(InputError):
            per_object_bias([], lexicon, "surfboard", method="gender_score")


class TestPerImageMean:
    def test_images_weighted_equally(self, lexicon):
        records = [
            rec(0, "a man with a dog", image_id="img1"),
            rec(1, "a man with a dog", image_id="img1"),
            rec(2, "a man with a dog", image_id="img1"),
            rec(3, "a woman with a cat", image_id="img2"),
        ]
        # per-caption ratio would be 3/4; per-image it is (1.0 + 0.0) / 2
        mean, n = per_image_mean_to_m(records, lexicon)
        assert mean == pytest.approx(0.5, abs=1e-15)
        assert n == 2

    def test_ungendered_images_skipped(self, lexicon):
        records = [
            rec(0, "a man with a dog", image_id="img1"),
            rec(1, "a dog on grass", image_id="img3"),
        ]
        mean, n = per_image_mean_to_m(records, lexicon)
        assert (mean, n) == (1.0, 1)

    def test_mixed_captions_do_not_gender_an_image(self, lexicon):
        records = [rec(0, "a man and a woman", image_id="img1")]
        assert per_image_mean_to_m(records, lexicon) == (None, 0)

    def test_fixture_corpus(self, captions, lexicon, lexicon_dict):
        human = [r for r in captions if r.source == "human"]
        mean, n = per_image_mean_to_m(human, lexicon)
        # serial recomputation
        import math

        per_image = {}
        for r in human:
            cls = oracles.o_label(r.text, lexicon_dict)
            m, w = per_image.get(r.image_id, (0, 0))
            per_image[r.image_id] = (m + (cls == "man"), w + (cls == "woman"))
        ratios = [
            m / (m + w) for m, w in per_image.values() if m + w > 0
        ]
        assert n == len(ratios)
        assert mean == pytest.approx(math.fsum(ratios) / len(ratios), abs=1e-15)
