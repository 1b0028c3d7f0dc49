import pytest

from qa_sidecar.model import SidecarConfig, decode_spans


def offsets_for(context: str, words: list[str], n_prefix: int):
    """Offset mapping with ``n_prefix`` special/question slots, then one
    context slot per word (words must appear left to right)."""
    offsets = [None] * n_prefix
    cursor = 0
    for word in words:
        start = context.index(word, cursor)
        offsets.append((start, start + len(word)))
        cursor = start + len(word)
    return offsets


class TestConfig:
    def test_valid(self):
        config = SidecarConfig(model_id="some/checkpoint")
        assert config.device == "cpu"
        assert config.max_seq_len == 384

    @pytest.mark.parametrize("kwargs", [
        {"model_id": ""},
        {"model_id": "m", "max_seq_len": 8},
        {"model_id": "m", "batch_size": 0},
        {"model_id": "m", "max_answer_tokens": 0},
    ])
    def test_invalid(self, kwargs):
        with pytest.raises(ValueError):
            SidecarConfig(**kwargs)


class TestDecodeSpans:
    CONTEXT = "alpha bravo charlie delta"
    WORDS = CONTEXT.split()

    def decode(self, start, end, max_candidates=5, **kwargs):
        offsets = offsets_for(self.CONTEXT, self.WORDS, n_prefix=2)
        return decode_spans(start, end, offsets, self.CONTEXT,
                            max_candidates, **kwargs)

    def test_argmax_span(self):
        # best start at "bravo", best end at "charlie"
        start = [0.0, 0.0, 1.0, 9.0, 2.0, 1.0]
        end = [0.0, 0.0, 1.0, 1.0, 8.0, 2.0]
        result = self.decode(start, end)
        top = result.candidates[0]
        assert top.text == "bravo charlie"
        assert self.CONTEXT[top.start_char:top.end_char] == top.text
        assert top.score == 17.0

    def test_candidates_sorted_and_sliced(self):
        start = [0.0, 0.0, 3.0, 2.0, 1.0, 0.5]
        end = [0.0, 0.0, 3.0, 2.0, 1.0, 0.5]
        result = self.decode(start, end, max_candidates=3)
        scores = [c.score for c in result.candidates]
        assert scores == sorted(scores, reverse=True)
        assert len(result.candidates) == 3
        for candidate in result.candidates:
            assert self.CONTEXT[candidate.start_char:candidate.end_char] \
                == candidate.text

    def test_tie_prefers_earlier_then_shorter(self):
        # all logits equal: every span scores the same
        start = [0.0] * 6
        end = [0.0] * 6
        top = self.decode(start, end).candidates[0]
        assert top.text == "alpha"

    def test_max_answer_tokens_limits_span(self):
        start = [0.0, 0.0, 9.0, 0.0, 0.0, 0.0]
        end = [0.0, 0.0, 0.0, 0.0, 0.0, 9.0]
        result = self.decode(start, end, max_answer_tokens=2)
        assert all(len(c.text.split()) <= 2 for c in result.candidates)

    def test_question_tokens_never_selected(self):
        # huge logits on the prefix slots must not produce spans
        start = [50.0, 50.0, 1.0, 0.0, 0.0, 0.0]
        end = [50.0, 50.0, 1.0, 0.0, 0.0, 0.0]
        result = self.decode(start, end)
        assert all(c.start_char >= 0 and c.text for c in result.candidates)
        assert result.candidates[0].text == "alpha"

    def test_no_answer_is_null_span_logit(self):
        start = [4.0, 0.0, 1.0, 0.0, 0.0, 0.0]
        end = [3.0, 0.0, 1.0, 0.0, 0.0, 0.0]
        assert self.decode(start, end).no_answer_score == 7.0

    def test_no_answer_zero_without_special_prefix(self):
        context = "alpha bravo"
        offsets = offsets_for(context, context.split(), n_prefix=0)
        result = decode_spans([1.0, 1.0], [1.0, 1.0], offsets, context, 5)
        assert result.no_answer_score == 0.0

    def test_duplicate_char_spans_deduplicated(self):
        # two context tokens covering identical char ranges (e.g. after
        # subword merging quirks) collapse to one candidate
        context = "alpha"
        offsets = [None, (0, 5), (0, 5)]
        result = decode_spans([0.0, 1.0, 2.0], [0.0, 1.0, 2.0],
                              offsets, context, 5)
        assert len(result.candidates) == 1
        assert result.candidates[0].score == 4.0

    def test_empty_char_ranges_skipped(self):
        context = "alpha"
        offsets = [None, (0, 0), (0, 5)]
        result = decode_spans([0.0, 9.0, 1.0], [0.0, 9.0, 1.0],
                              offsets, context, 5)
        assert [c.text for c in result.candidates] == ["alpha"]

    def test_length_mismatch_rejected(self):
        with pytest.raises(ValueError):
            decode_spans([0.0], [0.0, 0.0], [None, None], "x", 5)

    def test_unicode_offsets_are_character_based(self):
        context = "従業員は三千人以上います"
        offsets = [None] + [(i, i + 1) for i in range(len(context))]
        n = len(offsets)
        start = [0.0] * n
        end = [0.0] * n
        start[1 + context.index("三")] = 9.0
        end[1 + context.index("上")] = 9.0
        top = decode_spans(start, end, offsets, context, 5).candidates[0]
        assert top.text == "三千人以上"
        assert context[top.start_char:top.end_char] == top.text
