"""Mini-batch multi-task training with validation-based early stopping and ablations."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from . import numerics as nm
from .corpus import DatasetSplit, Record, Vocabulary, assign_emotion_tags, encode_example
from .lexicon import Lexicon
from .model import (
    ModelConfig,
    ModelParams,
    emotion_input_matrix,
    total_loss,
)


@dataclass(frozen=True)
class TrainConfig:
    batch_size: int = 16
    learning_rate: float = 1.0
    clip: float = 1.0
    max_epochs: int = 50
    patience: int = 5
    seed: int = 0
    c1: float = 1.0
    c2: float = 1.0
    intensity: float = 1.0

    def __post_init__(self):
        if min(self.batch_size, self.max_epochs, self.patience) <= 0:
            raise ValueError("batch_size, max_epochs and patience must be positive")
        if self.learning_rate <= 0 or self.clip <= 0:
            raise ValueError("learning_rate and clip must be positive")
        if self.c1 < 0 or self.c2 < 0 or self.intensity < 0:
            raise ValueError("c1, c2 and intensity must be non-negative")


@dataclass(frozen=True)
class EpochStats:
    train_lm: float
    train_emo: float
    train_total: float
    valid_lm: float
    valid_emo: float
    valid_total: float


@dataclass
class TrainHistory:
    initial_train: tuple[float, float, float]
    epochs: list[EpochStats]
    best_epoch: int

    def to_dict(self) -> dict:
        return {
            "initial_train": {
                "lm": self.initial_train[0],
                "emo": self.initial_train[1],
                "total": self.initial_train[2],
            },
            "best_epoch": self.best_epoch,
            "epochs": [
                {
                    "train_lm": e.train_lm, "train_emo": e.train_emo, "train_total": e.train_total,
                    "valid_lm": e.valid_lm, "valid_emo": e.valid_emo, "valid_total": e.valid_total,
                }
                for e in self.epochs
            ],
        }


def _prepare(records, vocab: Vocabulary, lex: Lexicon, config: ModelConfig):
    tagged = assign_emotion_tags(list(records), lex)
    out = []
    for rec in tagged:
        ex = encode_example(rec, vocab, config.max_len)
        out.append((ex, emotion_input_matrix(ex, vocab, lex, config.mask_emotion_tag)))
    return out


def _mean_losses(params: ModelParams, prepared, config: ModelConfig) -> tuple[float, float, float]:
    lm_sum = emo_sum = 0.0
    with nm.no_grad():
        for ex, vnrc in prepared:
            _, lm, emo = total_loss(ex, params, config, vnrc)
            lm_sum += lm.item()
            emo_sum += emo.item()
    n = len(prepared)
    lm_mean, emo_mean = lm_sum / n, emo_sum / n
    return lm_mean, emo_mean, config.c1 * lm_mean + config.c2 * emo_mean


def evaluate_loss(
    params: ModelParams, records: list[Record], config: ModelConfig,
    vocab: Vocabulary, lex: Lexicon,
) -> tuple[float, float, float]:
    """(L_lm, L_emo, L_total) averaged over records, without touching parameters."""
    if not records:
        raise ValueError("evaluate_loss needs at least one record")
    return _mean_losses(params, _prepare(records, vocab, lex, config), config)


def train(
    model_config: ModelConfig, train_config: TrainConfig, splits: DatasetSplit,
    lex: Lexicon, vocab: Vocabulary,
) -> tuple[ModelParams, TrainHistory]:
    """SGD over shuffled mini-batches; returns the best-validation-epoch weights.

    ``train_config``'s c1/c2/intensity override the model config so ablations
    only have to vary one object.  The same seed drives initialization and
    batch shuffling, so identical configs give bit-identical histories.
    """
    config = replace(
        model_config, c1=train_config.c1, c2=train_config.c2, intensity=train_config.intensity)
    if not splits.train or not splits.valid:
        raise ValueError("train and valid splits must be non-empty")
    prepared_train = _prepare(splits.train, vocab, lex, config)
    prepared_valid = _prepare(splits.valid, vocab, lex, config)

    params = ModelParams(config, train_config.seed)
    rng = np.random.default_rng(train_config.seed)
    all_params = params.all()

    history: list[EpochStats] = []
    initial = _mean_losses(params, prepared_train, config)
    best_val = float("inf")
    best_snapshot = params.snapshot()
    best_epoch = -1
    stale = 0

    n = len(prepared_train)
    for epoch in range(train_config.max_epochs):
        order = rng.permutation(n)
        lm_sum = emo_sum = 0.0
        for batch_index, start in enumerate(range(0, n, train_config.batch_size)):
            batch = [prepared_train[i] for i in order[start:start + train_config.batch_size]]
            try:
                combined = None
                for ex, vnrc in batch:
                    loss, lm, emo = total_loss(ex, params, config, vnrc)
                    lm_sum += lm.item()
                    emo_sum += emo.item()
                    combined = loss if combined is None else nm.add(combined, loss)
                nm.backward(nm.scalar_mul(combined, 1.0 / len(batch)))
                nm.sgd_step(all_params, train_config.learning_rate, train_config.clip)
            except FloatingPointError as err:
                raise FloatingPointError(
                    f"non-finite loss at epoch {epoch}, batch {batch_index}: {err}") from err

        train_lm, train_emo = lm_sum / n, emo_sum / n
        valid_lm, valid_emo, valid_total = _mean_losses(params, prepared_valid, config)
        history.append(EpochStats(
            train_lm=train_lm,
            train_emo=train_emo,
            train_total=config.c1 * train_lm + config.c2 * train_emo,
            valid_lm=valid_lm,
            valid_emo=valid_emo,
            valid_total=valid_total,
        ))
        if valid_total < best_val:
            best_val = valid_total
            best_snapshot = params.snapshot()
            best_epoch = epoch
            stale = 0
        else:
            stale += 1
            if stale >= train_config.patience:
                break

    params.restore(best_snapshot)
    return params, TrainHistory(initial_train=initial, epochs=history, best_epoch=best_epoch)


ABLATION_LOSS_SETTINGS = ("full", "disable_emotion", "disable_lm")
ABLATION_INTENSITIES = (0.5, 1.0, 2.0)


def ablation_grid(
    model_config: ModelConfig, train_config: TrainConfig, splits: DatasetSplit,
    lex: Lexicon, vocab: Vocabulary, max_tokens: int = 20,
) -> list[dict]:
    """Train and evaluate the 3x3 grid of loss settings x intensity values.

    Every cell reuses the same seeds, so the (full, intensity=1) cell matches a
    standalone run bit for bit.  Each row carries the full metrics report plus
    the emotion-audit L1 distance.
    """
    from .generator import GenerationQuery, generate
    from .metrics import EvaluationPair, build_report, report_to_dict

    tagged_test = assign_emotion_tags(list(splits.test), lex)
    rows = []
    for setting in ABLATION_LOSS_SETTINGS:
        c1 = 0.0 if setting == "disable_lm" else train_config.c1
        c2 = 0.0 if setting == "disable_emotion" else train_config.c2
        for intensity in ABLATION_INTENSITIES:
            cell_config = replace(train_config, c1=c1, c2=c2, intensity=intensity)
            params, _ = train(model_config, cell_config, splits, lex, vocab)
            effective = replace(model_config, c1=c1, c2=c2, intensity=intensity)
            pairs = []
            hyps = []
            for rec in tagged_test:
                tokens = generate(params, effective, vocab, lex, GenerationQuery(
                    user=rec.user, item=rec.item, features=rec.features,
                    emotion=rec.emotion, max_tokens=max_tokens,
                ))
                hyps.append(tokens)
                pairs.append(EvaluationPair.from_texts(rec.explanation, " ".join(tokens), rec.features))
            report = build_report(pairs, lex)
            row = {"loss_setting": setting, "intensity": intensity, "c1": c1, "c2": c2}
            row.update(report_to_dict(report))
            rows.append(row)
    return rows
