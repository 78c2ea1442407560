"""Tokenizer contract: greedy splitting, fixed length, determinism."""
import pytest
from hypothesis import given, settings, strategies as st

from toxishield.errors import EmptyInput
from toxishield.tokenizer import (
    HAVE_COMPILED_KERNEL,
    TokenSequence,
    Vocab,
    VocabError,
    detokenize,
    pre_split,
    split_text,
    tokenize,
    wordpiece_split,
)

# exercise the compiled kernel and the pure twin on the same cases
IMPLS = [True] if not HAVE_COMPILED_KERNEL else [True, False]


@pytest.fixture(params=IMPLS, ids=lambda p: "python" if p else "compiled")
def force_python(request):
    return request.param


def test_env_var_forces_pure_python():
    import os
    import subprocess
    import sys

    probe = "import toxishield.tokenizer as t; print(t.HAVE_COMPILED_KERNEL)"
    out = subprocess.run(
        [sys.executable, "-c", probe],
        env={**os.environ, "TOXISHIELD_PURE_PYTHON": "1"},
        capture_output=True,
        text=True,
        check=True,
    )
    assert out.stdout.strip() == "False"


class TestVocab:
    def test_missing_special_rejected(self):
        with pytest.raises(VocabError, match="UNK"):
            Vocab({"[CLS]": 0, "[SEP]": 1, "[PAD]": 2, "x": 3})

    def test_sparse_ids_rejected(self):
        with pytest.raises(VocabError, match="dense"):
            Vocab({"[CLS]": 0, "[SEP]": 1, "[UNK]": 2, "[PAD]": 4})

    def test_from_file_line_number_is_id(self, tmp_path):
        path = tmp_path / "vocab.txt"
        path.write_text("[PAD]\n[UNK]\n[CLS]\n[SEP]\nhello\n", encoding="utf-8")
        vocab = Vocab.from_file(path)
        assert vocab.token_ids["hello"] == 4
        assert vocab.pad_id == 0

    def test_duplicate_token_rejected(self, tmp_path):
        path = tmp_path / "vocab.txt"
        path.write_text("[PAD]\n[UNK]\n[CLS]\n[SEP]\nx\nx\n", encoding="utf-8")
        with pytest.raises(VocabError, match="duplicate"):
            Vocab.from_file(path)

    def test_unk_pad_distinct(self, tiny_vocab):
        assert tiny_vocab.unk_id != tiny_vocab.pad_id


class TestWordpieceSplit:
    def test_verbatim_word_is_identity(self, tiny_vocab, force_python):
        assert wordpiece_split("please", tiny_vocab, force_python=force_python) == ["please"]

    def test_greedy_longest_match(self, force_python):
        # hand-traced on the 3-entry vocab: un | ##afford | ##able
        vocab = Vocab.from_tokens(["un", "##afford", "##able"])
        pieces = wordpiece_split("unaffordable", vocab, force_python=force_python)
        assert pieces == ["un", "##afford", "##able"]

    def test_total_miss_is_unk(self, tiny_vocab, force_python):
        assert wordpiece_split("zzz", tiny_vocab, force_python=force_python) == ["[UNK]"]

    def test_partial_miss_is_unk(self, force_python):
        # first piece matches but the tail cannot: whole word becomes UNK
        vocab = Vocab.from_tokens(["un"])
        assert wordpiece_split("unq", vocab, force_python=force_python) == ["[UNK]"]

    def test_over_long_word_is_unk(self, tiny_vocab, force_python):
        assert wordpiece_split("a" * 200, tiny_vocab, force_python=force_python) == ["[UNK]"]

    def test_empty_word_rejected(self, tiny_vocab):
        with pytest.raises(ValueError):
            wordpiece_split("", tiny_vocab)

    @given(st.text(alphabet="abcdefun", min_size=1, max_size=12))
    @settings(max_examples=200)
    def test_compiled_and_python_agree(self, word):
        if not HAVE_COMPILED_KERNEL:
            pytest.skip("no compiled kernel in this build")
        vocab = Vocab.from_tokens(
            ["un", "a", "b", "f", "##afford", "##able", "##a", "##b", "##un", "##e"]
        )
        assert wordpiece_split(word, vocab) == wordpiece_split(
            word, vocab, force_python=True
        )


class TestPreSplit:
    def test_punctuation_isolated(self, force_python):
        assert pre_split("fix, please!", force_python=force_python) == [
            "fix", ",", "please", "!",
        ]

    def test_runs_of_punctuation_split_each(self, force_python):
        assert pre_split("what?!", force_python=force_python) == ["what", "?", "!"]

    def test_whitespace_collapsed(self, force_python):
        assert pre_split("  a \t b \n", force_python=force_python) == ["a", "b"]

    @given(text=st.text(max_size=120))
    @settings(max_examples=300)
    def test_compiled_and_python_agree(self, text):
        if not HAVE_COMPILED_KERNEL:
            pytest.skip("no compiled kernel in this build")
        assert pre_split(text) == pre_split(text, force_python=True)


class TestTokenize:
    def test_empty_raises(self, tiny_vocab):
        with pytest.raises(EmptyInput):
            tokenize("   ", tiny_vocab)

    def test_single_word_shape(self, tiny_vocab):
        seq = tokenize("please", tiny_vocab, 128)
        assert len(seq.ids) == 128
        assert len(seq.attention_mask) == 128
        assert seq.ids[0] == tiny_vocab.cls_id
        assert seq.ids[1] == tiny_vocab.token_ids["please"]
        assert seq.ids[2] == tiny_vocab.sep_id
        assert all(i == tiny_vocab.pad_id for i in seq.ids[3:])
        assert seq.attention_mask[:3] == (1, 1, 1)
        assert sum(seq.attention_mask) == 3

    def test_truncation_to_126_content_ids(self):
        # synthetic vocab where every word is exactly one token; 300 words
        # must truncate to a 126-id content region and a fully-1 mask
        words = [f"w{i}" for i in range(300)]
        vocab = Vocab.from_tokens(words)
        seq = tokenize(" ".join(words), vocab, 128)
        assert len(seq.ids) == 128
        assert sum(seq.attention_mask) == 128
        assert seq.content_ids(vocab) == tuple(
            vocab.token_ids[w] for w in words[:126]
        )

    def test_lowercases_input(self, tiny_vocab):
        upper = tokenize("PLEASE Fix", tiny_vocab)
        lower = tokenize("please fix", tiny_vocab)
        assert upper.ids == lower.ids

    def test_max_len_too_small(self, tiny_vocab):
        with pytest.raises(ValueError):
            tokenize("please", tiny_vocab, 2)

    def test_unknown_chars_absorbed_as_unk(self, tiny_vocab):
        seq = tokenize("\U0001f63a", tiny_vocab, 8)
        assert seq.ids[1] == tiny_vocab.unk_id

    @given(text=st.text(min_size=1, max_size=80))
    @settings(max_examples=150)
    def test_length_invariant_any_input(self, text):
        vocab = Vocab.from_tokens(["please", "fix", "the", "loop", "##s", "a", "b"])
        try:
            seq = tokenize(text, vocab, 128)
        except EmptyInput:
            return
        assert len(seq.ids) == 128
        assert len(seq.attention_mask) == 128

    def test_determinism_repeated_calls(self, tiny_vocab):
        reference = tokenize("please fix the loop bound !", tiny_vocab)
        for _ in range(50):
            assert tokenize("please fix the loop bound !", tiny_vocab) == reference

    def test_round_trip_for_covered_input(self, tiny_vocab):
        text = "please fix the unaffordable loop bound"
        seq = tokenize(text, tiny_vocab)
        restored = detokenize(seq.content_ids(tiny_vocab), tiny_vocab)
        assert restored == text.lower()

    def test_monotone_truncation_on_word_prefix(self, tiny_vocab):
        full = split_text("please fix the loop bound", tiny_vocab)
        prefix = split_text("please fix the", tiny_vocab)
        assert full[: len(prefix)] == prefix

    def test_mask_marks_padding_only(self, tiny_vocab):
        seq = tokenize("please fix", tiny_vocab, 16)
        for i, mask in zip(seq.ids, seq.attention_mask):
            if mask == 0:
                assert i == tiny_vocab.pad_id

    def test_mismatched_lengths_rejected(self):
        with pytest.raises(ValueError):
            TokenSequence(ids=(1, 2), attention_mask=(1,))
