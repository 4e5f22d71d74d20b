"""Corpus pipeline tests: vocabulary, pairs, targets, synthetic generator."""

import numpy as np
import pytest

from qcse import CapacityError
from qcse.corpus import (
    CorpusConfig,
    SyntheticSpec,
    TrainPair,
    build_vocabulary,
    dump_pairs,
    extract_pairs,
    generate_synthetic_corpus,
    load_sentences,
    read_corpus,
    target_bits,
    tokenize,
    write_corpus,
)


# -- tokenization and vocabulary ----------------------------------------------


def test_tokenize_lowercases_and_strips_punctuation():
    assert tokenize("Hello, World!") == ["hello", "world"]
    assert tokenize("  a  b\tc ") == ["a", "b", "c"]


def test_vocabulary_four_distinct_tokens():
    vocab = build_vocabulary([tokenize("natural language is awesome")])
    assert vocab.size == 4


def test_vocabulary_collapses_duplicates():
    vocab = build_vocabulary([tokenize("a b a")])
    assert vocab.size == 2


def test_vocabulary_first_appearance_order():
    vocab = build_vocabulary([["c", "a"], ["b", "a"]])
    assert vocab.index_to_word == ["c", "a", "b"]
    assert vocab.word_to_index == {"c": 0, "a": 1, "b": 2}


def test_vocabulary_round_trip():
    vocab = build_vocabulary([tokenize("the quick brown fox jumps over the lazy dog")])
    for token, idx in vocab.word_to_index.items():
        assert vocab.index_to_word[idx] == token
        assert vocab.index_of(token) == idx


def test_vocabulary_rejects_empty_corpus():
    with pytest.raises(ValueError):
        build_vocabulary([])
    with pytest.raises(ValueError):
        build_vocabulary([[]])


def test_unknown_token_raises():
    vocab = build_vocabulary([["a"]])
    with pytest.raises(ValueError):
        vocab.index_of("b")


# -- pair extraction ------------------------------------------------------------


def test_extract_pairs_center_word_example():
    sentence = tokenize("natural language processing is awesome")
    vocab = build_vocabulary([sentence])
    pairs = extract_pairs([sentence], vocab, window_radius=2)
    center = vocab.index_of("processing")
    pair = next(p for p in pairs if p.center == center)
    assert pair.context == tuple(vocab.index_of(t) for t in ("natural", "language", "is", "awesome"))


def test_extract_pairs_single_token_sentence():
    vocab = build_vocabulary([["solo"]])
    pairs = extract_pairs([["solo"]], vocab)
    assert pairs == [TrainPair(0, ())]


def test_extract_pairs_boundary_lengths():
    sentence = ["a", "b", "c", "d", "e"]
    vocab = build_vocabulary([sentence])
    pairs = extract_pairs([sentence], vocab, window_radius=2)
    assert len(pairs) == 5
    assert [len(p.context) for p in pairs] == [2, 3, 4, 3, 2]
    assert pairs[0].context == (1, 2)


def test_extract_pairs_center_never_in_own_window_slot():
    sentence = ["x", "y", "x", "z"]
    vocab = build_vocabulary([sentence])
    for i, pair in enumerate(extract_pairs([sentence], vocab)):
        assert pair.center == vocab.index_of(sentence[i])
        assert len(pair.context) <= 4


def test_pair_count_equals_token_count():
    sentences = generate_synthetic_corpus(1, 40, 12, 5)
    vocab = build_vocabulary(sentences)
    pairs = extract_pairs(sentences, vocab)
    assert len(pairs) == sum(len(s) for s in sentences) == 200


def test_extract_pairs_rejects_bad_radius():
    vocab = build_vocabulary([["a"]])
    with pytest.raises(ValueError):
        extract_pairs([["a"]], vocab, window_radius=0)


# -- bit targets -----------------------------------------------------------------


def test_target_bits_zero():
    np.testing.assert_array_equal(target_bits(0, 5), [0, 0, 0, 0, 0])


def test_target_bits_all_ones():
    np.testing.assert_array_equal(target_bits(31, 5), [1, 1, 1, 1, 1])


def test_target_bits_big_endian():
    np.testing.assert_array_equal(target_bits(6, 4), [0, 1, 1, 0])


def test_target_bits_injective():
    m = 4
    seen = {tuple(target_bits(c, m)) for c in range(1 << m)}
    assert len(seen) == 1 << m


def test_target_bits_capacity_error():
    with pytest.raises(CapacityError):
        target_bits(32, 5)


# -- synthetic corpus ---------------------------------------------------------------


def test_synthetic_corpus_shape_and_coverage():
    sentences = generate_synthetic_corpus(42, 300, 34, 4)
    assert len(sentences) == 300
    assert all(len(s) == 4 for s in sentences)
    tokens = [t for s in sentences for t in s]
    assert len(tokens) == 1200
    assert len(set(tokens)) == 34


def test_synthetic_corpus_deterministic():
    a = generate_synthetic_corpus(7, 50, 20, 4)
    b = generate_synthetic_corpus(7, 50, 20, 4)
    assert a == b
    c = generate_synthetic_corpus(8, 50, 20, 4)
    assert a != c


def test_synthetic_corpus_small_scale():
    sentences = generate_synthetic_corpus(3, 32, 27, 4)
    tokens = [t for s in sentences for t in s]
    assert len(tokens) == 128
    assert len(set(tokens)) == 27


def test_synthetic_corpus_zipf_like_frequencies():
    sentences = generate_synthetic_corpus(42, 300, 34, 4)
    counts = np.sort(
        np.bincount([int(t[1:]) for s in sentences for t in s], minlength=34)
    )[::-1]
    # heavy head, light tail
    assert counts[0] >= 3 * counts[len(counts) // 2]
    assert counts[0] >= 10 * counts[-1]


def test_synthetic_corpus_validation():
    with pytest.raises(ValueError):
        generate_synthetic_corpus(0, 10, 1, 4)
    with pytest.raises(ValueError):
        generate_synthetic_corpus(0, 2, 20, 4)


# -- file round trips -----------------------------------------------------------------


def test_corpus_file_round_trip(tmp_path):
    sentences = generate_synthetic_corpus(11, 20, 10, 4)
    path = tmp_path / "corpus.txt"
    write_corpus(sentences, path)
    assert read_corpus(path) == sentences


def test_read_corpus_skips_blank_lines(tmp_path):
    path = tmp_path / "c.txt"
    path.write_text("a b\n\n  \nc d\n")
    assert read_corpus(path) == [["a", "b"], ["c", "d"]]


def test_dump_pairs_jsonl(tmp_path):
    import json

    pairs = [TrainPair(3, (1, 2)), TrainPair(0, ())]
    path = tmp_path / "pairs.jsonl"
    dump_pairs(pairs, path)
    records = [json.loads(line) for line in path.read_text().splitlines()]
    assert records == [{"center": 3, "context": [1, 2]}, {"center": 0, "context": []}]


def test_corpus_config_sources(tmp_path):
    with pytest.raises(ValueError):
        CorpusConfig()
    with pytest.raises(ValueError):
        CorpusConfig(path="x", synthetic=SyntheticSpec())
    spec = SyntheticSpec(seed=5, num_sentences=10, vocab_size=8, sentence_len=3)
    generated = load_sentences(CorpusConfig(synthetic=spec))
    assert generated == generate_synthetic_corpus(5, 10, 8, 3)
    path = tmp_path / "c.txt"
    write_corpus(generated, path)
    assert load_sentences(CorpusConfig(path=str(path))) == generated
