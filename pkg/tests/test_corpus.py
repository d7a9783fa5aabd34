from __future__ import annotations

from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from emoexplain.corpus import (
    BOS,
    EOS,
    PAD,
    SPECIAL_TOKENS,
    UNK,
    CorpusSpec,
    Record,
    build_vocabulary,
    encode_example,
    generate_synthetic_corpus,
    load_records,
    save_records,
    split_dataset,
    tokenize,
)
from emoexplain.fixtures import POOLS, pool_corpus_spec
from emoexplain.lexicon import classify_explanation


# --- tokenize -------------------------------------------------------------

def test_tokenize_detaches_punctuation():
    assert tokenize("Beautiful lobby and nice bar.") == ["beautiful", "lobby", "and", "nice", "bar", "."]


def test_tokenize_empty():
    assert tokenize("") == []


def test_tokenize_lowercases_and_splits():
    assert tokenize("Don't STOP") == ["don", "'", "t", "stop"]


@settings(max_examples=100)
@given(st.text(max_size=40))
def test_tokenize_idempotent_on_joined_output(text):
    tokens = tokenize(text)
    assert tokenize(" ".join(tokens)) == tokens


# --- records & files -------------------------------------------------------

def test_record_requires_feature():
    with pytest.raises(ValueError, match="at least one feature"):
        Record("u", "i", (), "some text")


def test_record_requires_nonempty_explanation():
    with pytest.raises(ValueError, match="empty after tokenization"):
        Record("u", "i", ("f",), "   ")


def test_load_records_parses_lines(tmp_path):
    path = tmp_path / "r.jsonl"
    path.write_text(
        '{"user": "u1", "item": "i1", "features": ["lobby"], "explanation": "nice bar"}\n'
        '{"user": "u2", "item": "i2", "features": ["pool"], "explanation": "cold pool", "emotion": "sad"}\n'
        '{"user": "u3", "item": "i1", "features": ["bar"], "explanation": "loud bar"}\n',
        encoding="utf-8",
    )
    records = load_records(path)
    assert len(records) == 3
    assert records[0].user == "u1"
    assert records[1].emotion == "sad"
    assert records[2].features == ("bar",)


def test_load_records_error_carries_line_number(tmp_path):
    path = tmp_path / "r.jsonl"
    path.write_text(
        '{"user": "u1", "item": "i1", "features": ["lobby"], "explanation": "nice bar"}\n'
        '{"user": "u2", "item": "i2", "explanation": "no features"}\n',
        encoding="utf-8",
    )
    with pytest.raises(ValueError) as err:
        load_records(path)
    assert "line 2" in str(err.value)
    assert "features" in str(err.value)


def test_load_records_empty_file_errors(tmp_path):
    path = tmp_path / "r.jsonl"
    path.write_text("", encoding="utf-8")
    with pytest.raises(ValueError, match="no records"):
        load_records(path)


def test_save_load_round_trip(tmp_path):
    spec = pool_corpus_spec(5, 5, 50, (0.3, 0.1, 0.2, 0.1, 0.1, 0.2))
    records = generate_synthetic_corpus(spec, seed=9)
    path = tmp_path / "corpus.jsonl"
    save_records(path, records)
    loaded = load_records(path)
    assert loaded == records


# --- split ------------------------------------------------------------------

def test_split_sizes_8_1_1(small_records):
    # 12 records -> valid 1, test 1, train 10
    split = split_dataset(small_records, seed=0)
    assert (len(split.train), len(split.valid), len(split.test)) == (10, 1, 1)


def test_split_ten_records_is_8_1_1():
    records = [
        Record(f"u{k % 2}", f"i{k % 5}", ("f",), f"text number {k}", "neutral")
        for k in range(10)
    ]
    split = split_dataset(records, seed=0)
    assert (len(split.train), len(split.valid), len(split.test)) == (8, 1, 1)
    train_users = {r.user for r in split.train}
    train_items = {r.item for r in split.train}
    assert train_users == {"u0", "u1"}
    assert train_items == {f"i{k}" for k in range(5)}


def test_split_of_100_records_is_80_10_10():
    spec = pool_corpus_spec(10, 10, 100, (0.3, 0.1, 0.2, 0.1, 0.1, 0.2))
    records = generate_synthetic_corpus(spec, seed=2)
    split = split_dataset(records, seed=2)
    assert (len(split.train), len(split.valid), len(split.test)) == (80, 10, 10)


def test_split_deterministic(small_records):
    a = split_dataset(small_records, seed=7)
    b = split_dataset(small_records, seed=7)
    assert a == b


def test_split_preserves_multiset(small_records):
    split = split_dataset(small_records, seed=3)
    assert Counter(split.records) == Counter(small_records)


@given(st.integers(min_value=0, max_value=10_000))
@settings(max_examples=50)
def test_split_preserves_multiset_for_any_seed(seed):
    from .conftest import SMALL_RECORDS

    split = split_dataset(list(SMALL_RECORDS), seed=seed)
    assert Counter(split.records) == Counter(SMALL_RECORDS)
    assert (len(split.train), len(split.valid), len(split.test)) == (10, 1, 1)


@pytest.mark.parametrize("seed", [0, 1, 2, 3, 17])
def test_split_coverage_every_user_and_item_in_train(seed):
    spec = pool_corpus_spec(10, 10, 100, (0.3, 0.1, 0.2, 0.1, 0.1, 0.2))
    records = generate_synthetic_corpus(spec, seed=seed)
    split = split_dataset(records, seed=seed)
    train_users = {r.user for r in split.train}
    train_items = {r.item for r in split.train}
    for rec in records:
        assert rec.user in train_users
        assert rec.item in train_items


def test_split_too_few_records_errors(small_records):
    with pytest.raises(ValueError, match="at least 10"):
        split_dataset(small_records[:5], seed=0)


def test_split_impossible_coverage_reports_entity():
    records = [
        Record(f"u{k}", f"i{k}", ("f",), f"text number {k}", "neutral") for k in range(10)
    ]
    # 10 records over 10 distinct users: coverage demands all of them in train,
    # but the 8:1:1 ratio only leaves 8 slots.
    with pytest.raises(ValueError, match="cannot cover"):
        split_dataset(records, seed=0)


# --- vocabulary --------------------------------------------------------------

def test_vocabulary_small_corpus_keeps_everything(small_records):
    vocab = build_vocabulary(small_records[:2])
    words = set("delightful lovely lobby awful rude room".split())
    assert set(vocab.id_to_token) == set(SPECIAL_TOKENS) | words
    assert vocab.id_to_token[:10] == SPECIAL_TOKENS


def test_vocabulary_cap_binds():
    records = [
        Record("u", "i", ("f",), " ".join(f"w{k:05d}" for k in range(start, start + 10)))
        for start in range(0, 30000, 10)
    ]
    vocab = build_vocabulary(records, max_tokens=20000)
    assert vocab.n_tokens == 20000 + 10


def test_vocabulary_tie_breaks_lexicographically():
    # "aa" and "ab" tie at frequency 1 with one slot left; "aa" wins
    records = [Record("u", "i", ("bb",), "cc cc bb aa ab")]
    vocab = build_vocabulary(records, max_tokens=3)
    kept = set(vocab.id_to_token[10:])
    assert kept == {"cc", "bb", "aa"}


def test_vocabulary_order_free(small_records):
    forward = build_vocabulary(small_records)
    backward = build_vocabulary(list(reversed(small_records)))
    assert forward == backward


@given(st.permutations(list(range(12))))
@settings(max_examples=25)
def test_vocabulary_order_free_property(order):
    from .conftest import SMALL_RECORDS

    reordered = [SMALL_RECORDS[i] for i in order]
    assert build_vocabulary(reordered) == build_vocabulary(SMALL_RECORDS)


def test_vocabulary_bijection(small_records):
    vocab = build_vocabulary(small_records)
    for token, idx in vocab.token_to_id.items():
        assert vocab.id_to_token[idx] == token


# --- encoding ----------------------------------------------------------------

def test_encode_layout(tiny_vocab):
    rec = Record("u000", "i000", ("lobby",), "nice bar", "happy")
    ex = encode_example(rec, tiny_vocab, max_len=10)
    lobby = tiny_vocab.token_to_id["lobby"]
    nice = tiny_vocab.token_to_id["nice"]
    bar = tiny_vocab.token_to_id["bar"]
    happy_tok = tiny_vocab.token_to_id["<happy>"]
    assert ex.context_ids == (0, 0, lobby, happy_tok, BOS, nice, bar, EOS, PAD, PAD)
    assert ex.prefix_len == 4
    assert ex.tag_position == 3
    assert ex.text_len == 2
    assert ex.emotion_target == 0


def test_encode_unknown_word_maps_to_unk(tiny_vocab):
    rec = Record("u000", "i000", ("lobby",), "zzzq bar", "happy")
    ex = encode_example(rec, tiny_vocab, max_len=10)
    assert ex.context_ids[5] == UNK


def test_encode_truncates_long_explanations(tiny_vocab):
    words = " ".join(["bar"] * 30)
    rec = Record("u000", "i000", ("lobby",), words, "sad")
    ex = encode_example(rec, tiny_vocab, max_len=26)
    # budget = 26 - 4 (prefix) - 2 (<bos>/<eos>) = 20
    assert ex.text_len == 20
    assert ex.context_ids[ex.eos_position] == EOS


def test_encode_errors_when_max_len_too_small(tiny_vocab):
    rec = Record("u000", "i000", ("lobby", "pool", "bar"), "nice", "happy")
    with pytest.raises(ValueError, match="too small"):
        encode_example(rec, tiny_vocab, max_len=8)


def test_encode_requires_tag(tiny_vocab):
    rec = Record("u000", "i000", ("lobby",), "nice bar")
    with pytest.raises(ValueError, match="no emotion tag"):
        encode_example(rec, tiny_vocab, max_len=10)


def test_encode_decode_round_trip(tiny_vocab):
    rec = Record("u000", "i001", ("pool",), "warm quiet pool walk", "happy")
    ex = encode_example(rec, tiny_vocab, max_len=12)
    tokens = [tiny_vocab.id_to_token[i] for i in ex.context_ids[2:]]
    assert tokens[:3] == ["pool", "<happy>", "<bos>"]
    assert tokens[3:7] == ["warm", "quiet", "pool", "walk"]
    assert tokens[7] == "<eos>"


@given(
    words=st.lists(
        st.sampled_from(["bar", "lobby", "nice", "pool", "quiet", "zzzq", "xxxv"]),
        min_size=1, max_size=12),
    emotion=st.sampled_from(["happy", "sad", "neutral"]),
)
@settings(max_examples=60)
def test_encode_decode_round_trip_property(words, emotion):
    from emoexplain.corpus import Vocabulary

    vocab = Vocabulary(
        id_to_token=SPECIAL_TOKENS + ("bar", "lobby", "nice", "pool", "quiet"),
        id_to_user=("u000",),
        id_to_item=("i000",),
    )
    rec = Record("u000", "i000", ("lobby",), " ".join(words), emotion)
    ex = encode_example(rec, vocab, max_len=16)
    budget = 16 - ex.prefix_len - 2
    expected = [w if w in vocab.token_to_id else "<unk>" for w in words[:budget]]
    decoded = [vocab.id_to_token[i] for i in
               ex.context_ids[ex.bos_position + 1: ex.eos_position]]
    assert decoded == expected


# --- synthetic corpus ----------------------------------------------------------

def test_synthetic_all_happy_classifies_happy(lex):
    spec = pool_corpus_spec(4, 4, 16, (1.0, 0, 0, 0, 0, 0))
    for rec in generate_synthetic_corpus(spec, seed=1):
        assert rec.emotion == "happy"
        assert classify_explanation(lex, tokenize(rec.explanation)) == "happy"


def test_synthetic_zero_records():
    spec = pool_corpus_spec(4, 4, 0, (1.0, 0, 0, 0, 0, 0))
    assert generate_synthetic_corpus(spec, seed=1) == []


def test_synthetic_distribution_matches_target(lex):
    target = (0.5, 0.1, 0.1, 0.1, 0.1, 0.1)
    spec = pool_corpus_spec(20, 50, 1000, target)
    records = generate_synthetic_corpus(spec, seed=7)
    tallied = Counter(classify_explanation(lex, tokenize(r.explanation)) for r in records)
    from emoexplain.lexicon import CATEGORIES
    for k, name in enumerate(CATEGORIES):
        assert abs(tallied[name] / 1000 - target[k]) <= 0.05


def test_synthetic_classifier_recovers_tags(lex):
    spec = pool_corpus_spec(6, 6, 36, (0.25, 0.15, 0.15, 0.15, 0.15, 0.15))
    for rec in generate_synthetic_corpus(spec, seed=4):
        assert classify_explanation(lex, tokenize(rec.explanation)) == rec.emotion


def test_synthetic_deterministic():
    spec = pool_corpus_spec(5, 5, 50, (0.3, 0.1, 0.2, 0.1, 0.1, 0.2))
    assert generate_synthetic_corpus(spec, seed=5) == generate_synthetic_corpus(spec, seed=5)


def test_synthetic_feature_appears_in_explanation():
    spec = pool_corpus_spec(5, 5, 50, (0.3, 0.1, 0.2, 0.1, 0.1, 0.2))
    for rec in generate_synthetic_corpus(spec, seed=6):
        assert rec.features[0] in tokenize(rec.explanation)


def test_synthetic_bad_distribution_errors():
    with pytest.raises(ValueError, match="sums to"):
        CorpusSpec(4, 4, 16, POOLS, (0.5, 0.1, 0.1, 0.1, 0.1, 0.2))


def test_synthetic_grid_mode_covers_all_pairs():
    spec = pool_corpus_spec(4, 4, 16, (0.3, 0.1, 0.2, 0.1, 0.1, 0.2))
    records = generate_synthetic_corpus(spec, seed=8)
    assert len({(r.user, r.item) for r in records}) == 16
