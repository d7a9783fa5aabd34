from __future__ import annotations

from dataclasses import replace

import numpy as np
import pytest

from emoexplain.corpus import build_vocabulary, generate_synthetic_corpus, split_dataset
from emoexplain.fixtures import pool_corpus_spec
from emoexplain.model import config_for_vocab
from emoexplain.trainer import (
    ABLATION_INTENSITIES,
    ABLATION_LOSS_SETTINGS,
    TrainConfig,
    ablation_grid,
    evaluate_loss,
    train,
)

BALANCED = (0.25, 0.15, 0.15, 0.15, 0.15, 0.15)


@pytest.fixture(scope="module")
def small_split(lex):
    spec = pool_corpus_spec(5, 6, 30, BALANCED, min_words=3, max_words=5)
    records = generate_synthetic_corpus(spec, seed=13)
    return split_dataset(records, seed=13)


@pytest.fixture(scope="module")
def small_vocab(small_split):
    return build_vocabulary(list(small_split.train))


def _config(vocab, **overrides):
    overrides.setdefault("embed_dim", 16)
    overrides.setdefault("ffn_dim", 32)
    return config_for_vocab(vocab, **overrides)


def test_train_is_deterministic(small_split, small_vocab, lex):
    config = _config(small_vocab)
    tc = TrainConfig(batch_size=8, max_epochs=3, patience=3, seed=21)
    params_a, hist_a = train(config, tc, small_split, lex, small_vocab)
    params_b, hist_b = train(config, tc, small_split, lex, small_vocab)
    assert hist_a == hist_b
    for pa, pb in zip(params_a.all(), params_b.all()):
        assert np.array_equal(pa.data, pb.data)


def test_train_records_emotion_loss_even_when_disabled(small_split, small_vocab, lex):
    config = _config(small_vocab)
    tc = TrainConfig(batch_size=8, max_epochs=2, patience=2, seed=3, c2=0.0)
    params, hist = train(config, tc, small_split, lex, small_vocab)
    assert all(e.train_emo > 0 for e in hist.epochs)
    assert all(e.train_total == pytest.approx(e.train_lm, abs=1e-12) for e in hist.epochs)


def test_train_with_c2_zero_leaves_emotion_head_untouched(small_split, small_vocab, lex):
    config = _config(small_vocab)
    tc = TrainConfig(batch_size=8, max_epochs=2, patience=2, seed=5, c2=0.0)
    params, _ = train(config, tc, small_split, lex, small_vocab)
    fresh = type(params)(replace(config, c2=0.0), seed=5)
    assert np.array_equal(params.emotion_head_weight.data, fresh.emotion_head_weight.data)


def test_train_history_not_longer_than_max_epochs(small_split, small_vocab, lex):
    config = _config(small_vocab)
    tc = TrainConfig(batch_size=8, max_epochs=4, patience=1, seed=2)
    _, hist = train(config, tc, small_split, lex, small_vocab)
    assert len(hist.epochs) <= 4
    assert 0 <= hist.best_epoch < len(hist.epochs)


def test_early_stopping_respects_patience(small_split, small_vocab, lex):
    config = _config(small_vocab)
    tc = TrainConfig(batch_size=8, max_epochs=40, patience=2, seed=9)
    _, hist = train(config, tc, small_split, lex, small_vocab)
    if len(hist.epochs) < 40:
        assert len(hist.epochs) - 1 - hist.best_epoch == 2


def test_evaluate_loss_after_overfit_run(overfit_setup, lex):
    params, config, vocab, split, _ = overfit_setup
    _, _, total = evaluate_loss(params, list(split.train), config, vocab, lex)
    assert total < 0.05


def test_evaluate_loss_pure_and_consistent(small_split, small_vocab, lex):
    config = _config(small_vocab)
    tc = TrainConfig(batch_size=8, max_epochs=2, patience=2, seed=7)
    params, _ = train(config, tc, small_split, lex, small_vocab)
    snapshot = params.snapshot()
    a = evaluate_loss(params, list(small_split.valid), config, small_vocab, lex)
    b = evaluate_loss(params, list(small_split.valid), config, small_vocab, lex)
    assert a == b
    assert a[2] == pytest.approx(config.c1 * a[0] + config.c2 * a[1], abs=1e-12)
    for p, before in zip(params.all(), snapshot):
        assert np.array_equal(p.data, before)


def test_evaluate_loss_empty_errors(small_vocab, lex):
    from emoexplain.model import ModelParams

    config = _config(small_vocab)
    params = ModelParams(config, seed=0)
    with pytest.raises(ValueError, match="at least one record"):
        evaluate_loss(params, [], config, small_vocab, lex)


def test_train_rejects_nonpositive_settings():
    with pytest.raises(ValueError):
        TrainConfig(batch_size=0)
    with pytest.raises(ValueError):
        TrainConfig(learning_rate=0.0)
    with pytest.raises(ValueError):
        TrainConfig(c2=-0.5)


def test_diverging_run_names_the_batch(small_split, small_vocab, lex):
    # an absurd learning rate overflows the weights within a couple of steps
    config = _config(small_vocab)
    tc = TrainConfig(batch_size=8, max_epochs=3, patience=3, seed=1, learning_rate=1e200)
    with np.errstate(over="ignore", invalid="ignore"):
        with pytest.raises(FloatingPointError, match=r"epoch \d+, batch \d+"):
            train(config, tc, small_split, lex, small_vocab)


def test_ablation_grid_shape_and_determinism(small_split, small_vocab, lex):
    config = _config(small_vocab)
    tc = TrainConfig(batch_size=8, max_epochs=1, patience=1, seed=31)
    rows = ablation_grid(config, tc, small_split, lex, small_vocab, max_tokens=6)
    assert len(rows) == 9
    combos = {(r["loss_setting"], r["intensity"]) for r in rows}
    assert combos == {(s, i) for s in ABLATION_LOSS_SETTINGS for i in ABLATION_INTENSITIES}
    for row in rows:
        for column in ("fmr", "fcr", "div", "usr", "bleu1", "bleu4",
                       "rouge1_p", "rouge1_r", "rouge1_f", "rouge2_p", "rouge2_r", "rouge2_f"):
            assert column in row

    # the (full, intensity=1) cell must match a standalone run with the same seeds
    full_cell = next(r for r in rows if r["loss_setting"] == "full" and r["intensity"] == 1.0)
    params, _ = train(config, replace(tc, intensity=1.0), small_split, lex, small_vocab)
    from emoexplain.generator import GenerationQuery, generate
    from emoexplain.metrics import EvaluationPair, build_report, report_to_dict
    from emoexplain.corpus import assign_emotion_tags

    tagged = assign_emotion_tags(list(small_split.test), lex)
    pairs = [
        EvaluationPair.from_texts(
            rec.explanation,
            " ".join(generate(params, replace(config, intensity=1.0), small_vocab, lex,
                              GenerationQuery(rec.user, rec.item, rec.features, rec.emotion,
                                              max_tokens=6))),
            rec.features)
        for rec in tagged
    ]
    standalone = report_to_dict(build_report(pairs, lex))
    for key, value in standalone.items():
        if key in ("header", "emotion_audit"):
            continue
        assert full_cell[key] == value, key


def test_ablation_disable_settings_zero_the_right_weight(small_split, small_vocab, lex):
    config = _config(small_vocab)
    tc = TrainConfig(batch_size=8, max_epochs=1, patience=1, seed=31, c1=0.7, c2=0.3)
    rows = ablation_grid(config, tc, small_split, lex, small_vocab, max_tokens=4)
    by_setting = {(r["loss_setting"], r["intensity"]): r for r in rows}
    assert by_setting[("disable_emotion", 1.0)]["c2"] == 0.0
    assert by_setting[("disable_emotion", 1.0)]["c1"] == 0.7
    assert by_setting[("disable_lm", 1.0)]["c1"] == 0.0
    assert by_setting[("disable_lm", 1.0)]["c2"] == 0.3
